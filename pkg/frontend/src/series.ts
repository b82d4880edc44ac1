/** Turn API rows into plottable series. Absent values become nulls (gaps),
 * never zeros; values are passed through untouched. */

import type { DailyRow, Granularity, WindowRow } from "./api.js";

export interface ItemDef {
  key: string;
  label: string;
  unit: string;
  windowField: keyof WindowRow | null;
  dailyField: keyof DailyRow;
}

export const ITEMS: ItemDef[] = [
  { key: "steps", label: "Steps", unit: "count", windowField: "steps", dailyField: "total_steps" },
  { key: "activity", label: "Activity", unit: "min", windowField: "activity_minutes", dailyField: "total_activity_minutes" },
  { key: "exercise", label: "Exercise", unit: "min", windowField: "exercise_minutes", dailyField: "total_exercise_minutes" },
  { key: "heart_rate", label: "Heart rate", unit: "bpm", windowField: "heart_rate_bpm", dailyField: "mean_heart_rate_bpm" },
  { key: "spo2", label: "SpO2", unit: "%", windowField: "spo2_percent", dailyField: "mean_spo2_percent" },
  { key: "sleep", label: "Sleep", unit: "min", windowField: "sleep_minutes", dailyField: "total_sleep_minutes" },
  { key: "wear", label: "Wear time", unit: "min", windowField: null, dailyField: "wear_minutes" },
];

export interface Point {
  /** Timestamp or date string straight from the API. */
  x: string;
  /** Epoch milliseconds, for spacing and gap detection. */
  t: number;
  y: number | null;
}

export interface Series {
  item: string;
  label: string;
  unit: string;
  points: Point[];
}

function epochMs(x: string): number {
  // window_start is "YYYY-MM-DD HH:MM:SS"; dates are "YYYY-MM-DD".
  return Date.parse(x.includes(" ") ? x.replace(" ", "T") : `${x}T00:00:00`);
}

export function buildSeries(
  rows: (WindowRow | DailyRow)[],
  granularity: Granularity,
  enabled: Set<string>,
): Series[] {
  const out: Series[] = [];
  for (const item of ITEMS) {
    if (!enabled.has(item.key)) continue;
    if (granularity === "window" && item.windowField === null) continue;
    const points: Point[] = rows.map((row) => {
      const x = granularity === "window"
        ? (row as WindowRow).window_start
        : (row as DailyRow).date;
      const raw = granularity === "window"
        ? (row as WindowRow)[item.windowField as keyof WindowRow]
        : (row as DailyRow)[item.dailyField];
      const y = typeof raw === "number" ? raw : null;
      return { x, t: epochMs(x), y };
    });
    out.push({ item: item.key, label: item.label, unit: item.unit, points });
  }
  return out;
}

export function rowDate(row: WindowRow | DailyRow): string {
  return "window_start" in row ? row.window_start.slice(0, 10) : row.date;
}
