import { describe, expect, it } from "vitest";

import { EMPTY_FORM, initialState, validateForm } from "../src/state.js";

describe("validateForm", () => {
  it("empty form yields an empty filter body", () => {
    const result = validateForm({ ...EMPTY_FORM });
    expect(result).toEqual({ ok: true, body: {} });
  });

  it("converts wear hours to minutes", () => {
    const result = validateForm({ ...EMPTY_FORM, minWearHours: "18" });
    expect(result).toEqual({ ok: true, body: { min_wear_minutes_per_day: 1080 } });
  });

  it("accepts fractional hours", () => {
    const result = validateForm({ ...EMPTY_FORM, minWearHours: "1.5" });
    expect(result).toEqual({ ok: true, body: { min_wear_minutes_per_day: 90 } });
  });

  it("rejects negative thresholds client-side", () => {
    expect(validateForm({ ...EMPTY_FORM, minWearHours: "-1" }).ok).toBe(false);
    expect(validateForm({ ...EMPTY_FORM, minSteps: "-5" }).ok).toBe(false);
  });

  it("rejects non-numeric input", () => {
    const result = validateForm({ ...EMPTY_FORM, minSteps: "lots" });
    expect(result.ok).toBe(false);
  });

  it("rejects fractional step counts", () => {
    expect(validateForm({ ...EMPTY_FORM, minSteps: "10.5" }).ok).toBe(false);
  });

  it("rejects inverted and half-open date ranges", () => {
    expect(
      validateForm({ ...EMPTY_FORM, from: "2024-03-02", to: "2024-03-01" }).ok,
    ).toBe(false);
    expect(validateForm({ ...EMPTY_FORM, from: "2024-03-01" }).ok).toBe(false);
  });

  it("passes a well-formed date range through", () => {
    const result = validateForm({ ...EMPTY_FORM, from: "2024-03-01", to: "2024-03-02" });
    expect(result).toEqual({
      ok: true,
      body: { date_range: ["2024-03-01", "2024-03-02"] },
    });
  });
});

describe("initialState", () => {
  it("starts unfiltered with all items enabled", () => {
    const state = initialState(["steps", "sleep"]);
    expect(state.keptDates).toBeNull();
    expect([...state.toggles]).toEqual(["steps", "sleep"]);
    expect(state.granularity).toBe("window");
  });
});
