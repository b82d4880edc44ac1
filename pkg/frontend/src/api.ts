/** Typed client for the vital HTTP API. Every number the dashboard shows
 * comes from these responses; nothing is recomputed client-side. */

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

export interface DatasetManifest {
  dataset_id: string;
  frame_count: number;
  timezone?: string;
  interval_minutes?: number;
  [key: string]: unknown;
}

export interface WindowRow {
  window_start: string;
  steps?: number;
  activity_minutes?: number;
  exercise_minutes?: number;
  heart_rate_bpm?: number;
  spo2_percent?: number;
  sleep_minutes?: number;
  sleep_stage?: string;
  sources?: Record<string, string>;
  sample_counts?: Record<string, number>;
}

export interface DailyRow {
  date: string;
  total_steps: number;
  total_sleep_minutes: number;
  total_activity_minutes: number;
  total_exercise_minutes: number;
  mean_heart_rate_bpm: number | null;
  mean_spo2_percent: number | null;
  wear_minutes: number;
  nonempty_windows: number;
}

export type Granularity = "window" | "daily";

export interface FilterBody {
  min_wear_minutes_per_day?: number;
  min_steps_per_day?: number;
  date_range?: [string, string];
  name?: string;
}

export interface RetentionSummary {
  kept_dates: string[];
  dropped_dates: { date: string; reason: string }[];
  saved_as: string | null;
}

export type QualityTree = Record<string, unknown>;

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

const defaultFetch: FetchLike = (url, init) => globalThis.fetch(url, init);

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private token = "",
    private fetchFn: FetchLike = defaultFetch,
  ) {}

  private async request(path: string, init: RequestInit = {}): Promise<Response> {
    const headers = new Headers(init.headers);
    if (this.token) headers.set("Authorization", `Bearer ${this.token}`);
    const res = await this.fetchFn(this.baseUrl + path, { ...init, headers });
    if (!res.ok) {
      let code = "error";
      let message = `${res.status}`;
      try {
        const body = (await res.json()) as { code?: string; message?: string };
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiRequestError(res.status, code, message);
    }
    return res;
  }

  async listDatasets(): Promise<DatasetManifest[]> {
    const res = await this.request("/datasets");
    const body = (await res.json()) as { datasets: DatasetManifest[] };
    return body.datasets;
  }

  async frames(
    datasetId: string,
    granularity: Granularity,
    range?: { from?: string; to?: string },
  ): Promise<(WindowRow | DailyRow)[]> {
    const params = new URLSearchParams({ granularity });
    if (range?.from) params.set("from", range.from);
    if (range?.to) params.set("to", range.to);
    const res = await this.request(
      `/datasets/${encodeURIComponent(datasetId)}/frames?${params}`,
    );
    const body = (await res.json()) as { rows: (WindowRow | DailyRow)[] };
    return body.rows;
  }

  async quality(datasetId: string, lookbackDays?: number): Promise<QualityTree> {
    const suffix = lookbackDays ? `?lookback_days=${lookbackDays}` : "";
    const res = await this.request(
      `/datasets/${encodeURIComponent(datasetId)}/quality${suffix}`,
    );
    return (await res.json()) as QualityTree;
  }

  async applyFilter(datasetId: string, body: FilterBody): Promise<RetentionSummary> {
    const res = await this.request(
      `/datasets/${encodeURIComponent(datasetId)}/filter`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      },
    );
    return (await res.json()) as RetentionSummary;
  }

  async exportCsv(datasetId: string, filterName?: string): Promise<Uint8Array> {
    const suffix = filterName ? `?filter=${encodeURIComponent(filterName)}` : "";
    const res = await this.request(
      `/datasets/${encodeURIComponent(datasetId)}/export.csv${suffix}`,
    );
    return new Uint8Array(await res.arrayBuffer());
  }
}
