// End-to-end: the scripted XOR walkthrough against a live service,
// driven through the rendered DOM.

import { ChildProcess, spawn } from "node:child_process";
import { dirname, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, expect, it, vi } from "vitest";

import { App } from "../src/app.js";

const repoRoot = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");

let service: ChildProcess;
let baseUrl = "";

const startService = (): Promise<string> =>
  new Promise((resolvePort, reject) => {
    service = spawn("python3", ["-m", "teachbench.cli", "serve", "--port", "0"], {
      cwd: repoRoot,
      stdio: ["ignore", "pipe", "pipe"],
    });
    let out = "";
    service.stdout!.on("data", (chunk: Buffer) => {
      out += chunk.toString();
      const match = out.match(/listening on (http:\/\/[\d.]+:\d+)/);
      if (match) resolvePort(match[1]);
    });
    service.on("error", reject);
    service.on("exit", (code) => reject(new Error(`service exited: ${code}`)));
  });

beforeAll(async () => {
  baseUrl = await startService();
});

afterAll(() => {
  service?.kill();
});

const click = (id: string) => {
  const node = document.getElementById(id);
  expect(node, `#${id} should be rendered`).toBeTruthy();
  (node as HTMLElement).click();
};

const settle = (app: App, predicate: () => boolean) =>
  vi.waitFor(
    () => {
      expect(predicate()).toBe(true);
    },
    { timeout: 30_000, interval: 25 },
  );

const selectObject = (id: string) => {
  const picker = document.getElementById("object-picker") as HTMLSelectElement;
  expect(picker).toBeTruthy();
  picker.value = id;
  picker.dispatchEvent(new Event("change"));
};

const labelObject = async (app: App, id: string, label: 0 | 1) => {
  const before = app.state.version;
  selectObject(id);
  click(`label-${label}`);
  await settle(app, () => app.state.version > before);
};

const declineMislabeling = async (app: App) => {
  expect(app.state.pending_request?.kind).toBe("check_labels");
  const before = app.state.version;
  click("submit-verdict"); // no boxes ticked: "these labels are fine"
  await settle(app, () => app.state.version > before);
};

const addFeature = async (app: App, featureId: string) => {
  expect(app.state.pending_request?.kind).toBe("add_feature");
  const picker = document.getElementById("feature-picker") as HTMLSelectElement;
  picker.value = featureId;
  const before = app.state.version;
  click("add-feature");
  await settle(app, () => app.state.version > before);
};

it("teaches XOR end to end through the UI", async () => {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = await App.start(root, {
    baseUrl,
    scenario: "xor",
    learner: "logreg-ml",
  });

  expect(app.state.phase).toBe("await_example");
  expect(document.getElementById("status")!.textContent).toContain("0 labeled");
  // nothing to plot yet: the feature set starts empty
  expect(root.querySelector("#scatter .placeholder")).toBeTruthy();

  await labelObject(app, "x0", 0);
  expect(app.state.training_error_ids).toEqual([]);

  // x1 conflicts with x0 under zero features
  await labelObject(app, "x1", 1);
  expect(app.state.phase).toBe("await_verdict");
  await declineMislabeling(app);
  await addFeature(app, "b");
  expect(app.state.training_error_ids).toEqual([]);

  await labelObject(app, "x2", 1);
  expect(app.state.phase).toBe("await_verdict");
  await declineMislabeling(app);
  await addFeature(app, "a");
  expect(app.state.training_error_ids).toEqual([]);
  // two features now: the scatter shows a linear boundary
  expect(root.querySelectorAll("#scatter .boundary").length).toBeGreaterThan(0);

  // the fourth corner completes XOR: all four get flagged together
  await labelObject(app, "x3", 0);
  expect(app.state.phase).toBe("await_verdict");
  const checklist = root.querySelectorAll("#invalidation-list input");
  expect(checklist.length).toBe(4);

  // labels are right, so decline and add the product feature
  await declineMislabeling(app);
  await addFeature(app, "ab");
  expect(app.state.training_error_ids).toEqual([]);
  expect(app.state.predictions).toEqual({ x0: 0, x1: 1, x2: 1, x3: 0 });
  // the composed boundary is drawn in the plotted plane
  expect(root.querySelectorAll("#scatter .boundary").length).toBeGreaterThan(0);
  expect(document.getElementById("status")!.textContent).toContain(
    "no training errors",
  );

  click("terminate");
  await settle(app, () => app.state.phase === "done");
  expect(app.state.outcome).toBe("completed");
  expect(document.getElementById("done-banner")!.textContent).toContain("complete");
});

it("reconstructs the identical view after a refresh", async () => {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = await App.start(root, {
    baseUrl,
    scenario: "xor",
    learner: "1nn",
  });
  await labelObject(app, "x0", 0);
  const rendered = root.innerHTML;
  await app.refresh();
  expect(root.innerHTML).toBe(rendered);
});
