import { describe, expect, it } from "vitest";

import {
  availability,
  pickAxes,
  scatterModel,
  statusLine,
  unlabeledIds,
  unusedPool,
} from "../src/model.js";
import { SessionState } from "../src/types.js";

const base = (over: Partial<SessionState> = {}): SessionState => ({
  session_id: "s",
  version: 1,
  phase: "await_example",
  outcome: null,
  round: 0,
  learner: "logreg-ml",
  training: [],
  features: ["a", "b"],
  pool: [
    { id: "a", expr: "a", used: true },
    { id: "b", expr: "b", used: true },
    { id: "ab", expr: "a * b", used: false },
  ],
  training_error_ids: [],
  pending_request: { kind: "await_example", accepts: ["add_example", "terminate"] },
  invalidation_set: null,
  hypothesis: { kind: "linear", w: [1, 1], b: 0 },
  boundary_polyline: null,
  predictions: { x0: 0, x1: 1 },
  objects: [
    { id: "x0", attrs: { a: 0, b: 0 } },
    { id: "x1", attrs: { a: 0, b: 1 } },
  ],
  featurized: { x0: [0, 0], x1: [0, 1] },
  event_log: [],
  ...over,
});

describe("availability", () => {
  it("is a pure function of the pending request kind", () => {
    expect(availability(base())).toEqual({
      label: true,
      terminate: true,
      verdict: false,
      addFeature: false,
    });
    const verdict = base({
      phase: "await_verdict",
      pending_request: {
        kind: "check_labels",
        accepts: ["check_labels"],
        invalidation_set: [["x0", 0]],
      },
    });
    expect(availability(verdict)).toMatchObject({ label: false, verdict: true });
    const feature = base({
      phase: "await_verdict",
      pending_request: { kind: "add_feature", accepts: ["add_feature"] },
    });
    expect(availability(feature)).toMatchObject({ addFeature: true, verdict: false });
    expect(availability(base({ phase: "done", pending_request: null }))).toEqual({
      label: false,
      terminate: false,
      verdict: false,
      addFeature: false,
    });
  });
});

describe("pickAxes", () => {
  it("uses the first two features when p is 2", () => {
    expect(pickAxes(base(), null)).toEqual([0, 1]);
  });
  it("honors a valid picked pair only when p exceeds 2", () => {
    const wide = base({ features: ["a", "b", "ab"] });
    expect(pickAxes(wide, ["ab", "a"])).toEqual([2, 0]);
    expect(pickAxes(wide, ["zz", "a"])).toEqual([0, 1]);
    expect(pickAxes(base(), ["b", "a"])).toEqual([0, 1]);
  });
  it("degrades to a strip or placeholder for small p", () => {
    expect(pickAxes(base({ features: ["a"] }), null)).toEqual([0, 0]);
    expect(pickAxes(base({ features: [] }), null)).toBeNull();
  });
});

describe("scatterModel", () => {
  it("marks errors, flagged members, and training labels", () => {
    const state = base({
      training: [["x0", 0]],
      training_error_ids: ["x0"],
      pending_request: {
        kind: "check_labels",
        accepts: ["check_labels"],
        invalidation_set: [["x0", 0]],
      },
    });
    const model = scatterModel(state, null, "x1");
    expect(model.kind).toBe("scatter");
    const byId = Object.fromEntries(model.points.map((p) => [p.id, p]));
    expect(byId.x0).toMatchObject({ labeled: true, isError: true, flagged: true });
    expect(byId.x1).toMatchObject({ labeled: false, flagged: false, selected: true });
  });

  it("only carries the boundary when plotting the first two features", () => {
    const poly = [[[0, 0], [1, 1]]];
    const wide = base({
      features: ["a", "b", "ab"],
      featurized: { x0: [0, 0, 0], x1: [0, 1, 0] },
      boundary_polyline: poly,
    });
    expect(scatterModel(wide, null, null).boundary).toEqual(poly);
    expect(scatterModel(wide, ["ab", "b"], null).boundary).toBeNull();
  });

  it("returns a placeholder with no features", () => {
    const model = scatterModel(base({ features: [], featurized: { x0: [], x1: [] } }), null, null);
    expect(model.kind).toBe("empty");
    expect(model.points).toEqual([]);
  });
});

describe("selection helpers", () => {
  it("lists unlabeled objects and unused pool features", () => {
    const state = base({ training: [["x0", 0]] });
    expect(unlabeledIds(state)).toEqual(["x1"]);
    expect(unusedPool(state)).toEqual(["ab"]);
  });
});

describe("statusLine", () => {
  it("summarizes progress and terminal outcomes", () => {
    expect(statusLine(base())).toContain("no training errors");
    expect(statusLine(base({ training_error_ids: ["x0"] }))).toContain("1 training error");
    expect(statusLine(base({ phase: "done", outcome: "completed" }))).toBe(
      "session complete",
    );
    expect(statusLine(base({ phase: "done", outcome: "not_realizable" }))).toContain(
      "not_realizable",
    );
  });
});
