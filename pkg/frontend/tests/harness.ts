// Spawn the real HTTP service for the tests; the UI talks only to /api.
import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

export interface Service {
  base: string;
  proc: ChildProcess;
  out: string;
}

const repoRoot = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");

export async function startService(port: number): Promise<Service> {
  const out = mkdtempSync(join(tmpdir(), "carm-ui-test-"));
  const proc = spawn(
    "python3",
    ["-m", "carm", "serve", "--port", String(port), "--out", out],
    {
      env: { ...process.env, PYTHONPATH: join(repoRoot, "src") },
      stdio: ["ignore", "pipe", "pipe"],
    },
  );
  let stderr = "";
  proc.stderr?.on("data", (chunk) => (stderr += String(chunk)));
  const base = `http://127.0.0.1:${port}`;
  for (let attempt = 0; attempt < 150; attempt++) {
    if (proc.exitCode !== null) break;
    try {
      const res = await fetch(`${base}/api/datasets`);
      if (res.ok) return { base, proc, out };
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  proc.kill("SIGKILL");
  throw new Error(`service did not come up on ${port}\n${stderr}`);
}

export function stopService(svc: Service | undefined): void {
  svc?.proc.kill("SIGTERM");
}
