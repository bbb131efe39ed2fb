// Wire types mirroring the session service's state document.

export type Label = 0 | 1;

export type PoolFeature = {
  id: string;
  expr: string;
  used: boolean;
};

export type PendingRequest = {
  kind: "await_example" | "check_labels" | "correct_labels" | "add_feature";
  accepts: string[];
  invalidation_set?: [string, Label][];
};

export type Hypothesis =
  | { kind: "linear"; w: number[]; b: number }
  | { kind: "memorized"; k: number; rows: unknown[] };

export type SessionState = {
  session_id: string;
  version: number;
  phase: "await_example" | "await_verdict" | "done";
  outcome: string | null;
  round: number;
  learner: string;
  training: [string, Label][];
  features: string[];
  pool: PoolFeature[];
  training_error_ids: string[];
  pending_request: PendingRequest | null;
  invalidation_set: [string, Label][] | null;
  hypothesis: Hypothesis;
  boundary_polyline: number[][][] | null;
  predictions: Record<string, Label>;
  objects: { id: string; attrs: Record<string, number> }[];
  featurized: Record<string, number[]>;
  event_log: unknown[];
};

export type TeacherResponse =
  | { kind: "add_example"; object_id: string; label: Label }
  | { kind: "terminate" }
  | { kind: "check_labels"; found_mislabeled: boolean }
  | { kind: "correct_labels"; relabels: [string, Label][] }
  | { kind: "add_feature"; feature_id: string };

export type ApiErrorBody = { code: string; message: string };
