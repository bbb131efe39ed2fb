import { SessionApi, VersionConflict } from "./api.js";
import {
  availability,
  scatterModel,
  statusLine,
  unlabeledIds,
  unusedPool,
} from "./model.js";
import { renderScatter } from "./scatter.js";
import { Label, SessionState, TeacherResponse } from "./types.js";

export type AppOptions = {
  baseUrl: string;
  scenario: string | object;
  learner: string;
};

// One session per app instance. All protocol state lives on the server;
// the app only keeps UI selections and re-renders from the last state
// document it received.
export class App {
  state!: SessionState;
  selected: string | null = null;
  pickedAxes: [string, string] | null = null;
  notice = "";

  constructor(
    private root: HTMLElement,
    private api: SessionApi,
  ) {}

  static async start(root: HTMLElement, opts: AppOptions): Promise<App> {
    const app = new App(root, new SessionApi(opts.baseUrl));
    app.state = await app.api.createSession(opts.scenario, opts.learner);
    app.render();
    return app;
  }

  async refresh(): Promise<void> {
    this.state = await this.api.getState(this.state.session_id);
    this.render();
  }

  private async apply(response: TeacherResponse): Promise<void> {
    try {
      this.state = await this.api.postAction(
        this.state.session_id,
        this.state.version,
        response,
      );
      this.notice = "";
    } catch (err) {
      if (err instanceof VersionConflict) {
        // someone else moved the session: adopt their state, ask again
        this.state = await this.api.getState(this.state.session_id);
        this.notice = "Session changed elsewhere — please repeat your action.";
      } else {
        this.notice = err instanceof Error ? err.message : String(err);
      }
    }
    this.render();
  }

  async labelSelected(label: Label): Promise<void> {
    if (this.selected === null) return;
    const objectId = this.selected;
    this.selected = null;
    await this.apply({ kind: "add_example", object_id: objectId, label });
  }

  terminate(): Promise<void> {
    return this.apply({ kind: "terminate" });
  }

  // The invalidation checklist answers Check-labels and Correct-Labels as
  // one interaction: unchecked boxes mean "these labels are fine".
  async submitVerdict(): Promise<void> {
    const toggled: [string, Label][] = [];
    this.root
      .querySelectorAll<HTMLInputElement>("#invalidation-list input:checked")
      .forEach((box) => {
        const id = box.dataset.objectId!;
        const current = Number(box.dataset.currentLabel) as Label;
        toggled.push([id, current === 1 ? 0 : 1]);
      });
    if (this.state.pending_request?.kind === "check_labels") {
      await this.apply({ kind: "check_labels", found_mislabeled: toggled.length > 0 });
      if (toggled.length === 0) return;
    }
    if (this.state.pending_request?.kind === "correct_labels") {
      await this.apply({ kind: "correct_labels", relabels: toggled });
    }
  }

  async addFeature(): Promise<void> {
    const picker = this.root.querySelector<HTMLSelectElement>("#feature-picker");
    if (picker && picker.value) {
      await this.apply({ kind: "add_feature", feature_id: picker.value });
    }
  }

  render(): void {
    const state = this.state;
    const avail = availability(state);
    this.root.replaceChildren();

    const status = document.createElement("p");
    status.id = "status";
    status.textContent = statusLine(state);
    this.root.appendChild(status);

    if (this.notice) {
      const note = document.createElement("p");
      note.id = "notice";
      note.textContent = this.notice;
      this.root.appendChild(note);
    }

    if (state.features.length > 2) {
      this.root.appendChild(this.axisPicker());
    }
    this.root.appendChild(
      renderScatter(scatterModel(state, this.pickedAxes, this.selected), (id) => {
        this.selected = id;
        this.render();
      }),
    );

    const panel = document.createElement("div");
    panel.id = "panel";
    if (state.phase === "done") {
      const banner = document.createElement("p");
      banner.id = "done-banner";
      banner.textContent =
        state.outcome === "completed"
          ? "Teaching session complete."
          : `Session ended: ${state.outcome}.`;
      panel.appendChild(banner);
    } else if (avail.label) {
      panel.appendChild(this.labelControls());
    } else if (avail.verdict) {
      panel.appendChild(this.verdictControls());
    } else if (avail.addFeature) {
      panel.appendChild(this.featureControls());
    }
    this.root.appendChild(panel);
  }

  private axisPicker(): HTMLElement {
    const wrap = document.createElement("div");
    wrap.id = "axis-picker";
    const current = this.pickedAxes ?? [this.state.features[0], this.state.features[1]];
    (["x", "y"] as const).forEach((axis, i) => {
      const select = document.createElement("select");
      select.id = `axis-${axis}`;
      for (const fid of this.state.features) {
        const option = document.createElement("option");
        option.value = fid;
        option.textContent = fid;
        option.selected = fid === current[i];
        select.appendChild(option);
      }
      select.addEventListener("change", () => {
        const x = this.root.querySelector<HTMLSelectElement>("#axis-x")!.value;
        const y = this.root.querySelector<HTMLSelectElement>("#axis-y")!.value;
        this.pickedAxes = [x, y];
        this.render();
      });
      wrap.appendChild(select);
    });
    return wrap;
  }

  private labelControls(): HTMLElement {
    const wrap = document.createElement("div");
    wrap.id = "label-controls";

    const picker = document.createElement("select");
    picker.id = "object-picker";
    const blank = document.createElement("option");
    blank.value = "";
    blank.textContent = "pick an object…";
    picker.appendChild(blank);
    for (const id of unlabeledIds(this.state)) {
      const option = document.createElement("option");
      option.value = id;
      option.textContent = id;
      option.selected = id === this.selected;
      picker.appendChild(option);
    }
    picker.addEventListener("change", () => {
      this.selected = picker.value || null;
      this.render();
    });
    wrap.appendChild(picker);

    for (const label of [0, 1] as Label[]) {
      const button = document.createElement("button");
      button.id = `label-${label}`;
      button.textContent = `label ${label}`;
      button.disabled = this.selected === null;
      button.addEventListener("click", () => void this.labelSelected(label));
      wrap.appendChild(button);
    }

    const terminate = document.createElement("button");
    terminate.id = "terminate";
    terminate.textContent = "terminate";
    terminate.addEventListener("click", () => void this.terminate());
    wrap.appendChild(terminate);
    return wrap;
  }

  private verdictControls(): HTMLElement {
    const wrap = document.createElement("div");
    const heading = document.createElement("p");
    heading.textContent =
      "The learner cannot fit these examples together. Tick any whose label is wrong:";
    wrap.appendChild(heading);

    const list = document.createElement("ul");
    list.id = "invalidation-list";
    for (const [id, label] of this.state.pending_request?.invalidation_set ?? []) {
      const item = document.createElement("li");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.dataset.objectId = id;
      box.dataset.currentLabel = String(label);
      const text = document.createElement("label");
      text.textContent = ` ${id} (label ${label})`;
      item.appendChild(box);
      item.appendChild(text);
      list.appendChild(item);
    }
    wrap.appendChild(list);

    const submit = document.createElement("button");
    submit.id = "submit-verdict";
    submit.textContent = "submit verdict";
    submit.addEventListener("click", () => void this.submitVerdict());
    wrap.appendChild(submit);
    return wrap;
  }

  private featureControls(): HTMLElement {
    const wrap = document.createElement("div");
    const heading = document.createElement("p");
    heading.textContent = "Labels are right but unfittable: add a feature.";
    wrap.appendChild(heading);

    const picker = document.createElement("select");
    picker.id = "feature-picker";
    for (const fid of unusedPool(this.state)) {
      const option = document.createElement("option");
      option.value = fid;
      option.textContent = `${fid}: ${this.state.pool.find((f) => f.id === fid)!.expr}`;
      picker.appendChild(option);
    }
    wrap.appendChild(picker);

    const button = document.createElement("button");
    button.id = "add-feature";
    button.textContent = "add feature";
    button.addEventListener("click", () => void this.addFeature());
    wrap.appendChild(button);
    return wrap;
  }
}
