import { SessionState, TeacherResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class VersionConflict extends ApiError {}

type FetchLike = typeof fetch;

// Every mutation round-trips through the service and adopts the returned
// state; nothing is ever updated locally.
export class SessionApi {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const reply = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const body = await reply.json();
    if (!reply.ok) {
      const { code = "error", message = reply.statusText } = body ?? {};
      if (reply.status === 409) {
        throw new VersionConflict(reply.status, code, message);
      }
      throw new ApiError(reply.status, code, message);
    }
    return body;
  }

  async listScenarios(): Promise<{ name: string; description: string }[]> {
    const body = (await this.request("/scenarios")) as {
      scenarios: { name: string; description: string }[];
    };
    return body.scenarios;
  }

  createSession(
    scenario: string | object,
    learner: string,
  ): Promise<SessionState> {
    return this.request("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ scenario, learner }),
    }) as Promise<SessionState>;
  }

  getState(sessionId: string): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}`) as Promise<SessionState>;
  }

  postAction(
    sessionId: string,
    version: number,
    response: TeacherResponse,
  ): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}/actions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ version, response }),
    }) as Promise<SessionState>;
  }
}
