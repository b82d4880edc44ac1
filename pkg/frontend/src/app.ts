/** Single-page dashboard: dataset picker, per-item trend plots, sidebar
 * filter form, collapsible quality panel, CSV export. The page is stateless
 * with respect to truth — every displayed number comes from the API. */

import { ApiRequestError } from "./api.js";
import type {
  DailyRow,
  DatasetManifest,
  FilterBody,
  Granularity,
  QualityTree,
  RetentionSummary,
  WindowRow,
} from "./api.js";
import { chartSvg } from "./chart.js";
import { qualityPanelHtml } from "./quality.js";
import { ITEMS, buildSeries, rowDate } from "./series.js";
import { initialState, validateForm } from "./state.js";
import type { ViewState } from "./state.js";

const FILTER_NAME = "dashboard";
const DAY_MS = 24 * 3600 * 1000;

/** The slice of the API client the dashboard uses (structural, so tests
 * can substitute a stub). */
export interface DashboardApi {
  listDatasets(): Promise<DatasetManifest[]>;
  frames(
    datasetId: string,
    granularity: Granularity,
    range?: { from?: string; to?: string },
  ): Promise<(WindowRow | DailyRow)[]>;
  quality(datasetId: string, lookbackDays?: number): Promise<QualityTree>;
  applyFilter(datasetId: string, body: FilterBody): Promise<RetentionSummary>;
  exportCsv(datasetId: string, filterName?: string): Promise<Uint8Array>;
}

export class DashboardApp {
  readonly state: ViewState;
  private rows: (WindowRow | DailyRow)[] = [];
  private intervalMinutes = 10;
  private filterInFlight = false;
  private filterQueued = false;
  /** Name of the server-saved spec matching the plots; null = unfiltered. */
  private activeFilterName: string | null = null;

  constructor(
    private root: HTMLElement,
    private api: DashboardApi,
  ) {
    this.state = initialState(ITEMS.map((i) => i.key));
    this.root.innerHTML = this.shell();
    this.bind();
  }

  private shell(): string {
    const toggles = ITEMS.map(
      (i) =>
        `<label><input type="checkbox" class="item-toggle" value="${i.key}" checked> ` +
        `${i.label}</label>`,
    ).join("");
    return `
<nav class="siderail" aria-label="sections">
  <a href="#trends">Trends</a>
  <a href="#filters">Filters</a>
  <a href="#quality">Quality</a>
  <a href="#export">Export</a>
</nav>
<main>
  <header>
    <label>Dataset <select id="dataset-picker"></select></label>
    <label><input type="radio" name="granularity" value="window" checked> 10-min windows</label>
    <label><input type="radio" name="granularity" value="daily"> Daily</label>
  </header>
  <div id="error-banner" class="banner banner-error" hidden></div>
  <section id="trends">
    <div class="toggles">${toggles}</div>
    <div id="plots"></div>
  </section>
  <aside id="filters">
    <h2>Quality filters</h2>
    <form id="filter-form">
      <label>Min wear (hours/day) <input name="minWearHours" inputmode="decimal"></label>
      <label>Min steps (per day) <input name="minSteps" inputmode="numeric"></label>
      <label>First day <input name="from" placeholder="YYYY-MM-DD"></label>
      <label>Last day <input name="to" placeholder="YYYY-MM-DD"></label>
      <button type="submit">Apply</button>
      <button type="button" id="clear-filter">Clear</button>
      <div id="form-error" class="form-error" hidden></div>
    </form>
    <div id="retention-banner" class="banner" hidden></div>
  </aside>
  <details id="quality">
    <summary>Data quality</summary>
    <div id="quality-panel"></div>
  </details>
  <section id="export">
    <button id="export-btn">Download CSV</button>
  </section>
</main>`;
  }

  private el<T extends HTMLElement>(selector: string): T {
    const node = this.root.querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as T;
  }

  private bind(): void {
    this.el<HTMLSelectElement>("#dataset-picker").addEventListener("change", () => {
      void this.selectDataset(this.el<HTMLSelectElement>("#dataset-picker").value);
    });
    for (const radio of this.root.querySelectorAll<HTMLInputElement>(
      'input[name="granularity"]',
    )) {
      radio.addEventListener("change", () => {
        if (radio.checked) void this.setGranularity(radio.value as Granularity);
      });
    }
    for (const box of this.root.querySelectorAll<HTMLInputElement>(".item-toggle")) {
      box.addEventListener("change", () => {
        if (box.checked) this.state.toggles.add(box.value);
        else this.state.toggles.delete(box.value);
        this.renderPlots();
      });
    }
    this.el<HTMLFormElement>("#filter-form").addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.submitFilter();
    });
    this.el<HTMLButtonElement>("#clear-filter").addEventListener("click", () => {
      void this.clearFilter();
    });
    this.el<HTMLButtonElement>("#export-btn").addEventListener("click", () => {
      void this.downloadExport();
    });
  }

  async start(): Promise<void> {
    const datasets = await this.api.listDatasets();
    const picker = this.el<HTMLSelectElement>("#dataset-picker");
    picker.innerHTML = datasets
      .map(
        (m) =>
          `<option value="${m.dataset_id}">${m.dataset_id} ` +
          `(${m.frame_count} frames)</option>`,
      )
      .join("");
    const first = datasets[0];
    if (first) await this.selectDataset(first.dataset_id);
  }

  async selectDataset(datasetId: string): Promise<void> {
    this.state.datasetId = datasetId;
    this.state.keptDates = null;
    this.state.lastSummary = null;
    this.activeFilterName = null;
    this.el<HTMLElement>("#retention-banner").hidden = true;
    await this.refreshFrames();
    await this.refreshQuality();
  }

  async setGranularity(granularity: Granularity): Promise<void> {
    this.state.granularity = granularity;
    await this.refreshFrames();
  }

  private async refreshFrames(): Promise<void> {
    if (!this.state.datasetId) return;
    try {
      this.rows = await this.api.frames(this.state.datasetId, this.state.granularity);
      this.hideError();
    } catch (err) {
      this.showError(err);
      return; // previous plot retained
    }
    this.renderPlots();
  }

  /** Rows currently visible: the last fetch, minus days a filter dropped. */
  visibleRows(): (WindowRow | DailyRow)[] {
    const kept = this.state.keptDates;
    if (!kept) return this.rows;
    return this.rows.filter((row) => kept.has(rowDate(row)));
  }

  renderPlots(): void {
    const plots = this.el<HTMLElement>("#plots");
    if (this.state.toggles.size === 0) {
      plots.innerHTML = '<p class="hint">All items hidden — enable a toggle above.</p>';
      return;
    }
    const maxGapMs =
      this.state.granularity === "window"
        ? this.intervalMinutes * 60 * 1000 * 1.5
        : DAY_MS * 1.5;
    const series = buildSeries(this.visibleRows(), this.state.granularity, this.state.toggles);
    plots.innerHTML = series.map((s) => chartSvg(s, { maxGapMs })).join("");
  }

  private async refreshQuality(): Promise<void> {
    if (!this.state.datasetId) return;
    try {
      const tree = await this.api.quality(this.state.datasetId);
      this.el<HTMLElement>("#quality-panel").innerHTML = qualityPanelHtml(tree);
    } catch (err) {
      this.showError(err);
    }
  }

  private readForm(): void {
    const form = this.el<HTMLFormElement>("#filter-form");
    const read = (name: string) =>
      (form.querySelector(`[name="${name}"]`) as HTMLInputElement).value;
    this.state.form = {
      minWearHours: read("minWearHours"),
      minSteps: read("minSteps"),
      from: read("from"),
      to: read("to"),
    };
  }

  async submitFilter(): Promise<void> {
    // At most one in-flight filter request; later submissions re-run once.
    if (this.filterInFlight) {
      this.filterQueued = true;
      return;
    }
    this.readForm();
    const result = validateForm(this.state.form);
    const formError = this.el<HTMLElement>("#form-error");
    if (!result.ok) {
      formError.textContent = result.error;
      formError.hidden = false;
      return; // invalid form: no request, plots unchanged
    }
    formError.hidden = true;
    if (!this.state.datasetId) return;
    this.filterInFlight = true;
    try {
      const body: FilterBody = { ...result.body, name: FILTER_NAME };
      const summary = await this.api.applyFilter(this.state.datasetId, body);
      this.state.keptDates = new Set(summary.kept_dates);
      this.state.lastSummary = {
        kept: summary.kept_dates.length,
        dropped: summary.dropped_dates,
      };
      this.activeFilterName = summary.saved_as ?? FILTER_NAME;
      this.renderRetention();
      await this.refreshFrames();
      this.hideError();
    } catch (err) {
      if (err instanceof ApiRequestError) {
        formError.textContent = err.message;
        formError.hidden = false;
      } else {
        this.showError(err);
      }
    } finally {
      this.filterInFlight = false;
      if (this.filterQueued) {
        this.filterQueued = false;
        await this.submitFilter();
      }
    }
  }

  async clearFilter(): Promise<void> {
    this.state.keptDates = null;
    this.state.lastSummary = null;
    this.activeFilterName = null;
    this.el<HTMLElement>("#retention-banner").hidden = true;
    for (const input of this.root.querySelectorAll<HTMLInputElement>("#filter-form input")) {
      input.value = "";
    }
    await this.refreshFrames();
  }

  private renderRetention(): void {
    const banner = this.el<HTMLElement>("#retention-banner");
    const summary = this.state.lastSummary;
    if (!summary) {
      banner.hidden = true;
      return;
    }
    const dropped = summary.dropped;
    const keptText = `${summary.kept} ${summary.kept === 1 ? "day" : "days"} kept`;
    const dropText = `${dropped.length} ${dropped.length === 1 ? "day" : "days"} dropped`;
    const reasons = dropped.map((d) => `${d.date}: ${d.reason}`).join(", ");
    banner.textContent = dropped.length
      ? `${keptText}, ${dropText} (${reasons})`
      : `${keptText}, ${dropText}`;
    banner.hidden = false;
  }

  /** Fetch the export bytes for the active filter (or the full dataset). */
  async exportBytes(): Promise<Uint8Array> {
    if (!this.state.datasetId) throw new Error("no dataset selected");
    return this.api.exportCsv(this.state.datasetId, this.activeFilterName ?? undefined);
  }

  private async downloadExport(): Promise<void> {
    try {
      const bytes = await this.exportBytes();
      const blob = new Blob([bytes.buffer as ArrayBuffer], { type: "text/csv" });
      const url = URL.createObjectURL(blob);
      const anchor = document.createElement("a");
      anchor.href = url;
      anchor.download = `${this.state.datasetId}.csv`;
      anchor.click();
      URL.revokeObjectURL(url);
      this.hideError();
    } catch (err) {
      this.showError(err);
    }
  }

  private showError(err: unknown): void {
    const banner = this.el<HTMLElement>("#error-banner");
    banner.textContent =
      err instanceof ApiRequestError
        ? `${err.code}: ${err.message}`
        : `request failed: ${String(err)}`;
    banner.hidden = false;
  }

  private hideError(): void {
    this.el<HTMLElement>("#error-banner").hidden = true;
  }
}

export function createApp(root: HTMLElement, api: DashboardApi): DashboardApp {
  return new DashboardApp(root, api);
}
