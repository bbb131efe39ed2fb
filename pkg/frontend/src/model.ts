import { SessionState } from "./types.js";

// Which controls are live is a pure function of the pending request.
export type Availability = {
  label: boolean;
  terminate: boolean;
  verdict: boolean; // the invalidation checklist (check/correct as one step)
  addFeature: boolean;
};

export const availability = (state: SessionState): Availability => {
  const kind = state.pending_request?.kind;
  return {
    label: kind === "await_example",
    terminate: kind === "await_example",
    verdict: kind === "check_labels" || kind === "correct_labels",
    addFeature: kind === "add_feature",
  };
};

export type ScatterPoint = {
  id: string;
  x: number;
  y: number;
  labeled: boolean;
  label: number | null; // training label when labeled
  predicted: number;
  isError: boolean;
  flagged: boolean; // member of the presented invalidation set
  selected: boolean;
};

export type ScatterModel = {
  kind: "scatter" | "strip" | "empty";
  axes: [string, string] | [string] | null;
  points: ScatterPoint[];
  // in data coordinates; [xMin, xMax, yMin, yMax]
  bounds: [number, number, number, number] | null;
  boundary: number[][][] | null;
};

const pad = (lo: number, hi: number): [number, number] => {
  const span = Math.max(hi - lo, 1e-9);
  return [lo - 0.15 * span, hi + 0.15 * span];
};

// Plot axes: the user's picked pair when the featurization has more than
// two dimensions, otherwise the first feature(s). No projection tricks:
// coordinates are exactly the chosen feature values.
export const pickAxes = (
  state: SessionState,
  picked: [string, string] | null,
): [number, number] | null => {
  const dims = state.features.length;
  if (dims === 0) return null;
  if (dims === 1) return [0, 0];
  if (dims === 2 || picked === null) return [0, 1];
  const ix = state.features.indexOf(picked[0]);
  const iy = state.features.indexOf(picked[1]);
  if (ix < 0 || iy < 0 || ix === iy) return [0, 1];
  return [ix, iy];
};

export const scatterModel = (
  state: SessionState,
  picked: [string, string] | null,
  selectedId: string | null,
): ScatterModel => {
  const axisIdx = pickAxes(state, picked);
  if (axisIdx === null) {
    return { kind: "empty", axes: null, points: [], bounds: null, boundary: null };
  }
  const [ix, iy] = axisIdx;
  const oneD = state.features.length === 1;
  const training = new Map(state.training);
  const flagged = new Set(
    (state.pending_request?.invalidation_set ?? state.invalidation_set ?? []).map(
      ([id]) => id,
    ),
  );
  const errors = new Set(state.training_error_ids);

  const points: ScatterPoint[] = state.objects.map((obj) => {
    const coords = state.featurized[obj.id];
    return {
      id: obj.id,
      x: coords[ix],
      y: oneD ? 0 : coords[iy],
      labeled: training.has(obj.id),
      label: training.get(obj.id) ?? null,
      predicted: state.predictions[obj.id],
      isError: errors.has(obj.id),
      flagged: flagged.has(obj.id),
      selected: obj.id === selectedId,
    };
  });

  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const [xMin, xMax] = pad(Math.min(...xs, 0), Math.max(...xs, 0));
  const [yMin, yMax] = pad(Math.min(...ys, 0), Math.max(...ys, 0));

  // the service's polylines live in the first-two-features plane
  const boundary = ix === 0 && iy === 1 ? state.boundary_polyline : null;
  return {
    kind: oneD ? "strip" : "scatter",
    axes: oneD
      ? [state.features[0]]
      : [state.features[ix], state.features[iy]],
    points,
    bounds: [xMin, xMax, yMin, yMax],
    boundary,
  };
};

export const unlabeledIds = (state: SessionState): string[] => {
  const training = new Set(state.training.map(([id]) => id));
  return state.objects.map((o) => o.id).filter((id) => !training.has(id));
};

export const unusedPool = (state: SessionState): string[] =>
  state.pool.filter((f) => !f.used).map((f) => f.id);

export const statusLine = (state: SessionState): string => {
  if (state.phase === "done") {
    return state.outcome === "completed"
      ? "session complete"
      : `stopped: ${state.outcome}`;
  }
  const errors = state.training_error_ids.length;
  return (
    `round ${state.round} | ${state.training.length} labeled | ` +
    `features [${state.features.join(", ")}] | ` +
    (errors ? `${errors} training error(s)` : "no training errors")
  );
};
