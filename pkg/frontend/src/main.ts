import { App } from "./app.js";

const params = new URLSearchParams(window.location.search);
const root = document.getElementById("app");
if (root) {
  void App.start(root, {
    baseUrl: "",
    scenario: params.get("scenario") ?? "xor",
    learner: params.get("learner") ?? "logreg-ml",
  }).catch((err) => {
    root.textContent = `failed to start session: ${err}`;
  });
}
