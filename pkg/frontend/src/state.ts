import { ApiError } from "./api.js";
import type { OutcomeResponse, SuggestResponse, Witness } from "./types.js";

// View-side session state: tracks the pending suggestion, guards against
// double submits, and surfaces the corrupt banner with its witnesses.

export interface ViewState {
  sessionId: string | null;
  status: "idle" | "ready" | "awaiting" | "submitting" | "complete" | "corrupt";
  pendingUnit: number[] | null;
  pendingPhysical: number[] | null;
  unitLabels: string[];
  vHistory: number[];
  corruptWitnesses: Witness[] | null;
  lastError: string | null;
  paused: boolean;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    status: "idle",
    pendingUnit: null,
    pendingPhysical: null,
    unitLabels: [],
    vHistory: [],
    corruptWitnesses: null,
    lastError: null,
    paused: false,
  };
}

export function applySuggest(state: ViewState, res: SuggestResponse): ViewState {
  if (res.complete) {
    return { ...state, status: "complete", pendingUnit: null, pendingPhysical: null };
  }
  return {
    ...state,
    status: "awaiting",
    pendingUnit: res.unit ?? null,
    pendingPhysical: res.physical ?? null,
    unitLabels: res.units ?? state.unitLabels,
    lastError: null,
  };
}

/** True when an outcome submit may fire; flips the guard on. */
export function beginSubmit(state: ViewState): ViewState | null {
  if (state.status !== "awaiting" || state.pendingUnit === null) {
    return null; // double submit or nothing pending: refuse
  }
  return { ...state, status: "submitting" };
}

export function applyOutcome(state: ViewState, res: OutcomeResponse): ViewState {
  return {
    ...state,
    status: "ready",
    pendingUnit: null,
    pendingPhysical: null,
    vHistory: [...state.vHistory, res.volume.v_uncertain],
    lastError: null,
  };
}

export function applyOutcomeError(state: ViewState, err: unknown): ViewState {
  if (err instanceof ApiError && err.body.code === "corrupt") {
    return {
      ...state,
      status: "corrupt",
      pendingUnit: null,
      pendingPhysical: null,
      corruptWitnesses: err.body.witnesses ?? [],
      lastError: err.body.message,
    };
  }
  const message = err instanceof Error ? err.message : String(err);
  // network or validation hiccup: stay answerable so the human may retry
  return { ...state, status: "awaiting", lastError: message };
}

export function corruptBannerText(witnesses: Witness[]): string {
  const parts = witnesses.map(
    (w) => `f(${w.point.map((v) => v.toPrecision(4)).join(", ")}) = ${w.label}`,
  );
  return `Monotonicity violated: ${parts.join(" conflicts with ")}`;
}
