/** View state and client-side form validation. Validation only guards the
 * request shape (non-negative numbers, ordered ranges); all filtering
 * semantics live server-side. */

import type { FilterBody, Granularity } from "./api.js";

export interface FilterFormValues {
  minWearHours: string;
  minSteps: string;
  from: string;
  to: string;
}

export const EMPTY_FORM: FilterFormValues = {
  minWearHours: "",
  minSteps: "",
  from: "",
  to: "",
};

export type FormResult =
  | { ok: true; body: FilterBody }
  | { ok: false; error: string };

const DATE_RE = /^\d{4}-\d{2}-\d{2}$/;

function parseNonNegative(text: string, label: string): number | string {
  const value = Number(text);
  if (!Number.isFinite(value)) return `${label} must be a number`;
  if (value < 0) return `${label} must be non-negative`;
  return value;
}

export function validateForm(values: FilterFormValues): FormResult {
  const body: FilterBody = {};
  if (values.minWearHours.trim() !== "") {
    const hours = parseNonNegative(values.minWearHours, "minimum wear hours");
    if (typeof hours === "string") return { ok: false, error: hours };
    body.min_wear_minutes_per_day = Math.round(hours * 60);
  }
  if (values.minSteps.trim() !== "") {
    const steps = parseNonNegative(values.minSteps, "minimum steps");
    if (typeof steps === "string") return { ok: false, error: steps };
    if (!Number.isInteger(steps)) return { ok: false, error: "minimum steps must be an integer" };
    body.min_steps_per_day = steps;
  }
  const from = values.from.trim();
  const to = values.to.trim();
  if ((from === "") !== (to === "")) {
    return { ok: false, error: "date range needs both first and last day" };
  }
  if (from !== "") {
    if (!DATE_RE.test(from) || !DATE_RE.test(to)) {
      return { ok: false, error: "dates must be YYYY-MM-DD" };
    }
    if (from > to) return { ok: false, error: "date range is inverted (first > last)" };
    body.date_range = [from, to];
  }
  return { ok: true, body };
}

export interface ViewState {
  datasetId: string | null;
  granularity: Granularity;
  /** Enabled item keys; toggles only hide series client-side. */
  toggles: Set<string>;
  form: FilterFormValues;
  /** Dates kept by the last applied filter; null = no filter active. */
  keptDates: Set<string> | null;
  lastSummary: { kept: number; dropped: { date: string; reason: string }[] } | null;
}

export function initialState(itemKeys: string[]): ViewState {
  return {
    datasetId: null,
    granularity: "window",
    toggles: new Set(itemKeys),
    form: { ...EMPTY_FORM },
    keptDates: null,
    lastSummary: null,
  };
}
