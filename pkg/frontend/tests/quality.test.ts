import { describe, expect, it } from "vitest";

import { qualityLeaves, qualityPanelHtml } from "../src/quality.js";

const TREE = {
  completeness: { overall: 0.5, per_day: { "2024-03-15": 0.5 } },
  recency: { lookback_days: 30, proportion_recent: 1.0, mean_age_days: 3.0 },
  plausibility: { hr_outliers: [], steps_during_sleep: [] },
  wear: { per_day_minutes: { "2024-03-15": 1080 } },
};

describe("qualityPanelHtml", () => {
  it("renders every leaf verbatim with its path", () => {
    const html = qualityPanelHtml(TREE);
    const container = document.createElement("div");
    container.innerHTML = html;
    for (const [path, json] of qualityLeaves(TREE)) {
      const leaf = container.querySelector(`[data-path="${path}"]`);
      expect(leaf, path).not.toBeNull();
      expect(leaf!.textContent).toBe(json);
    }
  });

  it("escapes HTML-sensitive strings", () => {
    const html = qualityPanelHtml({ note: "<script>" });
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("qualityLeaves", () => {
  it("treats scalar arrays as single leaves", () => {
    const leaves = qualityLeaves({ bounds: [25, 220] });
    expect(leaves.get("bounds")).toBe("[25,220]");
  });

  it("descends into arrays of objects", () => {
    const leaves = qualityLeaves({ out: [{ bpm: 240 }] });
    expect(leaves.get("out.0.bpm")).toBe("240");
  });
});
