import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { ApiError } from "../src/api.js";
import {
  applyOutcome,
  applyOutcomeError,
  applySuggest,
  beginSubmit,
  corruptBannerText,
  initialState,
} from "../src/state.js";
import type { ApiErrorBody } from "../src/types.js";

const corruptFixture = JSON.parse(
  readFileSync(new URL("./fixtures/corrupt_response.json", import.meta.url), "utf8"),
) as { status_code: number; body: ApiErrorBody };

function awaiting() {
  let s = { ...initialState(), sessionId: "abc", status: "ready" as const };
  return applySuggest(s, {
    complete: false,
    status: "awaiting_outcome",
    unit: [0.5, 0.5],
    physical: [22.5, 10.0],
    units: ["m/s", "mm"],
  });
}

describe("outcome submission state machine", () => {
  it("valid outcome flips back to ready and extends the volume history", () => {
    let s = awaiting();
    const guard = beginSubmit(s);
    expect(guard).not.toBeNull();
    s = applyOutcome(guard!, {
      status: "ready_to_suggest",
      n_evaluated: 1,
      volume: { v_negative: 0.25, v_positive: 0, v_uncertain: 0.75, method: "exact" },
    });
    expect(s.status).toBe("ready");
    expect(s.vHistory).toEqual([0.75]);
    expect(s.pendingUnit).toBeNull();
  });

  it("double submits are refused while a request is in flight", () => {
    const s = awaiting();
    const first = beginSubmit(s);
    expect(first).not.toBeNull();
    // the second click arrives before the response: state is submitting
    expect(beginSubmit(first!)).toBeNull();
    // and with nothing pending there is nothing to submit either
    expect(beginSubmit(initialState())).toBeNull();
  });

  it("a corrupt response freezes input and carries both witnesses", () => {
    const s = beginSubmit(awaiting())!;
    const err = new ApiError(corruptFixture.status_code, corruptFixture.body);
    const next = applyOutcomeError(s, err);
    expect(next.status).toBe("corrupt");
    expect(next.corruptWitnesses).toHaveLength(2);
    const labels = next.corruptWitnesses!.map((w) => w.label).sort();
    expect(labels).toEqual([-1, 1]);
    const banner = corruptBannerText(next.corruptWitnesses!);
    expect(banner).toContain("Monotonicity violated");
    expect(banner).toContain("= -1");
    expect(banner).toContain("= 1");
    // corrupt sessions accept no further submits
    expect(beginSubmit(next)).toBeNull();
  });

  it("network failures keep the question open for a retry", () => {
    const s = beginSubmit(awaiting())!;
    const next = applyOutcomeError(s, new Error("connection reset"));
    expect(next.status).toBe("awaiting");
    expect(next.lastError).toBe("connection reset");
  });

  it("a completion notice ends the session view", () => {
    const s = applySuggest(awaiting(), { complete: true, final_v_uncertain: 0.0 });
    expect(s.status).toBe("complete");
    expect(s.pendingUnit).toBeNull();
  });
});
