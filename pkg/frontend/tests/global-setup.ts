/** Boots the real HTTP API with a seeded three-day (17 h/18 h/19 h wear)
 * dataset so the integration test can exercise the full dashboard loop. */
import { spawn, spawnSync } from "node:child_process";
import type { ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import type { TestProject } from "vitest/node";

const PORT = 8799;
export const API_BASE = `http://127.0.0.1:${PORT}`;

const SEED = `
from vital.fixtures import wear_scenario_records
from vital.integrate import integrate
from vital.model import WindowGrid
from vital.store import DatasetStore
import sys
ds = integrate(wear_scenario_records(), WindowGrid(10), dataset_id="wear")
DatasetStore(sys.argv[1]).save(ds)
`;

const SERVE = `
import sys, uvicorn
from vital.service import create_app
uvicorn.run(create_app(data_dir=sys.argv[1]), host="127.0.0.1", port=int(sys.argv[2]), log_level="warning")
`;

let server: ChildProcess | undefined;
let dataDir: string | undefined;

export default async function setup(project: TestProject): Promise<() => void> {
  dataDir = mkdtempSync(join(tmpdir(), "vital-dash-"));
  const seeded = spawnSync("python3", ["-c", SEED, dataDir], { encoding: "utf-8" });
  if (seeded.status !== 0) {
    throw new Error(`seeding failed: ${seeded.stderr}`);
  }
  server = spawn("python3", ["-c", SERVE, dataDir, String(PORT)], { stdio: "inherit" });

  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const res = await fetch(`${API_BASE}/datasets`);
      if (res.ok) break;
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) throw new Error("API did not come up on " + API_BASE);
    await new Promise((r) => setTimeout(r, 200));
  }
  project.provide("apiBase", API_BASE);

  return () => {
    server?.kill();
    if (dataDir) rmSync(dataDir, { recursive: true, force: true });
  };
}

declare module "vitest" {
  export interface ProvidedContext {
    apiBase: string;
  }
}
