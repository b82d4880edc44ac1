/** End-to-end dashboard loop against the real HTTP API (started by the
 * global setup with a 17 h/18 h/19 h wear-time dataset):
 * applying the 18-hour filter plots 2 days and reports 1 dropped day,
 * the export button's bytes equal GET /export.csv for the same filter,
 * and the quality panel equals the /quality response verbatim. */
import { describe, expect, inject, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { createApp } from "../src/app.js";
import { qualityLeaves } from "../src/quality.js";

function plottedDates(root: HTMLElement, item: string): Set<string> {
  const dots = root.querySelectorAll(`[data-item="${item}"] circle[data-x]`);
  return new Set([...dots].map((d) => d.getAttribute("data-x")!.slice(0, 10)));
}

describe("dashboard loop against the live API", () => {
  it("18-hour filter: 2 days plotted, 1 dropped-day banner, export bytes match, quality verbatim", async () => {
    const base = inject("apiBase");
    const api = new ApiClient(base);
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById("app")!;
    const app = createApp(root, api);
    await app.start();

    // unfiltered: all three days are plotted
    expect(plottedDates(root, "steps")).toEqual(
      new Set(["2024-03-01", "2024-03-02", "2024-03-03"]),
    );

    // apply the 18-hour minimum wear filter through the sidebar form
    root.querySelector<HTMLInputElement>('[name="minWearHours"]')!.value = "18";
    await app.submitFilter();

    expect(plottedDates(root, "steps")).toEqual(new Set(["2024-03-02", "2024-03-03"]));
    const banner = root.querySelector<HTMLElement>("#retention-banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("2 days kept");
    expect(banner.textContent).toContain("1 day dropped");
    expect(banner.textContent).toContain("2024-03-01: wear");

    // export button bytes equal a direct GET /export.csv with the same spec
    const buttonBytes = await app.exportBytes();
    const direct = await fetch(`${base}/datasets/wear/export.csv?filter=dashboard`);
    const directBytes = new Uint8Array(await direct.arrayBuffer());
    expect(buttonBytes).toEqual(directBytes);
    const text = new TextDecoder().decode(buttonBytes);
    const days = new Set(text.trim().split("\n").slice(1).map((l) => l.slice(0, 10)));
    expect(days).toEqual(new Set(["2024-03-02", "2024-03-03"]));

    // quality panel values equal the /quality response verbatim
    const tree = (await (await fetch(`${base}/datasets/wear/quality`)).json()) as Record<
      string,
      unknown
    >;
    const leaves = qualityLeaves(tree);
    expect(leaves.size).toBeGreaterThan(0);
    for (const [path, json] of leaves) {
      const leaf = root.querySelector(`[data-path="${path}"]`);
      expect(leaf, path).not.toBeNull();
      expect(leaf!.textContent, path).toBe(json);
    }

    // the daily view reflects the same retention without recomputation
    await app.setGranularity("daily");
    expect(plottedDates(root, "wear")).toEqual(new Set(["2024-03-02", "2024-03-03"]));
  });
});
