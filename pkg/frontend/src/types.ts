// Payload shapes of the session HTTP API. The client renders exactly what
// the server reports; it never recomputes dominance or volumes.

export type CellClass = -1 | 0 | 1;

export interface SessionSummary {
  id: string;
  created_at: string;
  status: "ready_to_suggest" | "awaiting_outcome" | "complete" | "corrupt";
  strategy: { kind: string; dimension: number; budget: number; seed: number };
  n_evaluated: number;
  v_uncertain: number;
  v_history: number[];
  pending: { unit: number[]; physical: number[] } | null;
  corrupt_witnesses: Witness[] | null;
}

export interface Witness {
  point: number[];
  label: -1 | 1;
}

export interface SuggestResponse {
  complete: boolean;
  status?: string;
  unit?: number[];
  physical?: number[];
  units?: string[];
  final_v_uncertain?: number;
}

export interface OutcomeResponse {
  status: string;
  n_evaluated: number;
  volume: { v_negative: number; v_positive: number; v_uncertain: number; method: string };
}

export interface ApiErrorBody {
  code: string;
  message: string;
  witnesses?: Witness[];
}

export interface EvaluatedPoint {
  index: number;
  unit: number[];
  physical: number[];
  label: -1 | 1;
}

export interface SliceReport {
  dims: number[];
  fixed: number[];
  grid: number;
  raster: CellClass[][]; // raster[i][j]: dims[0] = (i+0.5)/grid, dims[1] = (j+0.5)/grid
  uncertain_fraction: number;
  decision: number[][] | null;
}

export interface Report {
  session_id: string;
  status: string;
  n_evaluated: number;
  v_uncertain: number;
  v_negative: number;
  v_positive: number;
  v_history: number[];
  evaluated: EvaluatedPoint[];
  neg_frontier: number[][];
  pos_frontier: number[][];
  pending: { unit: number[]; physical: number[] } | null;
  unit_labels: string[];
  corrupt_witnesses: Witness[] | null;
  svc: unknown | null;
  slice: SliceReport;
}
