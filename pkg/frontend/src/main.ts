import { ApiError, SessionApi } from "./api.js";
import { renderSlice, renderSparkline } from "./render.js";
import {
  applyOutcome,
  applyOutcomeError,
  applySuggest,
  beginSubmit,
  corruptBannerText,
  initialState,
  type ViewState,
} from "./state.js";
import type { Report, SessionSummary } from "./types.js";

const api = new SessionApi();
let state: ViewState = initialState();
let dimension = 2;
let lastReport: Report | null = null;
const GRID = 64;
const POLL_MS = 2500;

const el = (id: string) => document.getElementById(id)!;
const sessionSelect = el("session-select") as HTMLSelectElement;
const sliceX = el("slice-x") as HTMLSelectElement;
const sliceY = el("slice-y") as HTMLSelectElement;
const fixedInputs = el("fixed-inputs");
const banner = el("corrupt-banner");
const suggestion = el("suggestion");
const statusLine = el("status-line");
const canvas = el("slice-canvas") as HTMLCanvasElement;
const spark = el("sparkline") as HTMLCanvasElement;

function setBanner(text: string | null): void {
  banner.textContent = text ?? "";
  banner.classList.toggle("visible", text !== null);
}

function sliceDims(): [number, number] {
  if (dimension === 1) return [0, 0];
  const a = Number(sliceX.value);
  const b = Number(sliceY.value);
  return a === b ? [a, (a + 1) % dimension] : [a, b];
}

function fixedValues(): number[] {
  const values = new Array<number>(dimension).fill(0.5);
  fixedInputs.querySelectorAll("input").forEach((input) => {
    values[Number(input.dataset.dim)] = Number(input.value);
  });
  return values;
}

function rebuildDimensionControls(): void {
  const options = Array.from({ length: dimension }, (_, k) => `<option value="${k}">x${k + 1}</option>`).join("");
  sliceX.innerHTML = options;
  sliceY.innerHTML = options;
  sliceX.value = "0";
  sliceY.value = String(Math.min(1, dimension - 1));
  fixedInputs.innerHTML = "";
  const [dx, dy] = sliceDims();
  for (let k = 0; k < dimension; k++) {
    if (k === dx || k === dy) continue;
    const label = document.createElement("label");
    label.textContent = `x${k + 1} = `;
    const input = document.createElement("input");
    input.type = "number";
    input.min = "0";
    input.max = "1";
    input.step = "0.25";
    input.value = "0.5";
    input.dataset.dim = String(k);
    input.addEventListener("change", () => void refresh());
    label.appendChild(input);
    fixedInputs.appendChild(label);
  }
}

async function refreshSessions(): Promise<void> {
  const sessions = await api.listSessions();
  const current = sessionSelect.value;
  sessionSelect.innerHTML = sessions
    .map((s: SessionSummary) => `<option value="${s.id}">${s.id.slice(0, 8)} · ${s.strategy.kind} p=${s.strategy.dimension} · ${s.status}</option>`)
    .join("");
  if (sessions.length === 0) {
    statusLine.textContent = "no sessions yet - create one below";
    return;
  }
  sessionSelect.value = sessions.some((s) => s.id === current) ? current : sessions[0].id;
  await selectSession(sessionSelect.value, sessions);
}

async function selectSession(id: string, sessions?: SessionSummary[]): Promise<void> {
  const list = sessions ?? (await api.listSessions());
  const summary = list.find((s) => s.id === id);
  if (!summary) return;
  const fresh = state.sessionId !== id;
  state = {
    ...state,
    sessionId: id,
    vHistory: summary.v_history,
    corruptWitnesses: summary.corrupt_witnesses,
    status:
      summary.status === "corrupt"
        ? "corrupt"
        : summary.status === "complete"
          ? "complete"
          : summary.status === "awaiting_outcome"
            ? "awaiting"
            : "ready",
    pendingUnit: summary.pending?.unit ?? null,
    pendingPhysical: summary.pending?.physical ?? null,
  };
  if (fresh) {
    dimension = summary.strategy.dimension;
    rebuildDimensionControls();
  }
  await refresh();
}

async function refresh(): Promise<void> {
  if (!state.sessionId) return;
  lastReport = await api.report(state.sessionId, sliceDims(), GRID, fixedValues());
  renderSlice(canvas, lastReport);
  renderSparkline(spark, lastReport.v_history);
  statusLine.textContent =
    `status: ${state.status} · evaluated: ${lastReport.n_evaluated} · ` +
    `uncertain volume: ${lastReport.v_uncertain.toFixed(4)}`;
  if (state.status === "corrupt" && state.corruptWitnesses) {
    setBanner(corruptBannerText(state.corruptWitnesses));
  } else {
    setBanner(null);
  }
  if (state.pendingPhysical) {
    const labels = lastReport.unit_labels;
    suggestion.textContent =
      "next run: " +
      state.pendingPhysical.map((v, k) => `${v.toPrecision(5)} ${labels[k] ?? ""}`.trim()).join(", ");
  } else {
    suggestion.textContent = state.status === "complete" ? "campaign complete" : "press Suggest for the next run";
  }
}

async function onSuggest(): Promise<void> {
  if (!state.sessionId || state.status === "corrupt") return;
  try {
    state = applySuggest(state, await api.suggest(state.sessionId));
  } catch (err) {
    state = { ...state, lastError: err instanceof Error ? err.message : String(err) };
  }
  await refresh();
}

async function onOutcome(label: -1 | 1): Promise<void> {
  const sid = state.sessionId;
  if (!sid) return;
  const next = beginSubmit(state);
  if (next === null) return; // double-submit guard
  state = next;
  try {
    state = applyOutcome(state, await api.recordOutcome(sid, label));
  } catch (err) {
    state = applyOutcomeError(state, err);
  }
  await refresh();
}

async function onCreate(): Promise<void> {
  const kind = (el("new-kind") as HTMLSelectElement).value;
  const p = Number((el("new-dim") as HTMLInputElement).value);
  const budget = Number((el("new-budget") as HTMLInputElement).value);
  const seed = Number((el("new-seed") as HTMLInputElement).value);
  const preset = (el("new-transform") as HTMLSelectElement).value;
  try {
    await api.createSession(
      { kind, dimension: p, budget, seed },
      preset === "identity" ? null : preset,
    );
    await refreshSessions();
  } catch (err) {
    setBanner(err instanceof ApiError ? err.body.message : String(err));
  }
}

function onExport(): void {
  if (!lastReport) return;
  const blob = new Blob([JSON.stringify(lastReport, null, 1)], { type: "application/json" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = `session-${lastReport.session_id.slice(0, 8)}-report.json`;
  link.click();
  URL.revokeObjectURL(link.href);
}

function bind(): void {
  el("btn-suggest").addEventListener("click", () => void onSuggest());
  el("btn-negative").addEventListener("click", () => void onOutcome(-1));
  el("btn-positive").addEventListener("click", () => void onOutcome(1));
  el("btn-create").addEventListener("click", () => void onCreate());
  el("btn-export").addEventListener("click", onExport);
  el("btn-pause").addEventListener("click", () => {
    state = { ...state, paused: !state.paused };
    el("btn-pause").textContent = state.paused ? "Resume" : "Pause";
  });
  sessionSelect.addEventListener("change", () => void selectSession(sessionSelect.value));
  sliceX.addEventListener("change", () => {
    rebuildDimensionControls();
    void refresh();
  });
  sliceY.addEventListener("change", () => {
    rebuildDimensionControls();
    void refresh();
  });
  setInterval(() => {
    const sid = state.sessionId;
    if (!state.paused && sid) void selectSession(sid);
  }, POLL_MS);
}

bind();
void refreshSessions();
