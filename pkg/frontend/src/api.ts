import type {
  DatasetInfo,
  FieldError,
  FrontEntry,
  RunConfig,
  RunHandle,
  StreamEvent,
} from "./types.js";

export type CreateResult =
  | { ok: true; handle: RunHandle }
  | { ok: false; status: number; errors: FieldError[] };

async function asJson(res: Response) {
  if (!res.ok) throw new Error(`${res.url}: HTTP ${res.status}`);
  return res.json();
}

/** Incremental server-sent-events parser; feed() returns completed events. */
export class SseParser {
  private buf = "";

  feed(chunk: string): StreamEvent[] {
    this.buf += chunk.replace(/\r\n/g, "\n");
    const out: StreamEvent[] = [];
    let cut: number;
    while ((cut = this.buf.indexOf("\n\n")) >= 0) {
      const block = this.buf.slice(0, cut);
      this.buf = this.buf.slice(cut + 2);
      let kind = "";
      let data = "";
      for (const line of block.split("\n")) {
        if (line.startsWith(":")) continue; // keepalive comment
        if (line.startsWith("event: ")) kind = line.slice(7);
        else if (line.startsWith("data: ")) data = line.slice(6);
      }
      if (kind && data) out.push({ event: kind, data: JSON.parse(data) } as StreamEvent);
    }
    return out;
  }
}

export class Api {
  constructor(readonly base: string = "") {}

  datasets(): Promise<DatasetInfo[]> {
    return fetch(`${this.base}/api/datasets`).then(asJson);
  }

  presets(): Promise<RunConfig[]> {
    return fetch(`${this.base}/api/presets`).then(asJson);
  }

  async createRun(config: RunConfig): Promise<CreateResult> {
    const res = await fetch(`${this.base}/api/runs`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
    if (res.status === 201) return { ok: true, handle: await res.json() };
    const body = await res.json().catch(() => ({ errors: [] }));
    return { ok: false, status: res.status, errors: body.errors ?? [] };
  }

  run(runId: string): Promise<RunHandle> {
    return fetch(`${this.base}/api/runs/${runId}`).then(asJson);
  }

  async stop(runId: string): Promise<void> {
    await fetch(`${this.base}/api/runs/${runId}/stop`, { method: "POST" });
  }

  front(runId: string): Promise<FrontEntry[]> {
    return fetch(`${this.base}/api/runs/${runId}/front`).then(asJson);
  }

  rules(runId: string, all = false): Promise<unknown[]> {
    const q = all ? "?all=true" : "";
    return fetch(`${this.base}/api/runs/${runId}/rules${q}`).then(asJson);
  }

  config(runId: string): Promise<RunConfig> {
    return fetch(`${this.base}/api/runs/${runId}/config`).then(asJson);
  }

  /**
   * Follow a run's event stream until the terminal event (or abort).
   * Uses fetch streaming rather than EventSource so the same code path
   * runs in the browser and under node tests.
   */
  async events(
    runId: string,
    onEvent: (ev: StreamEvent) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const res = await fetch(`${this.base}/api/runs/${runId}/events`, { signal });
    if (!res.ok || !res.body) throw new Error(`events: HTTP ${res.status}`);
    const reader = res.body.getReader();
    const decoder = new TextDecoder();
    const parser = new SseParser();
    for (;;) {
      const { done, value } = await reader.read();
      if (done) return;
      for (const ev of parser.feed(decoder.decode(value, { stream: true }))) {
        onEvent(ev);
        if (ev.event === "terminal") {
          await reader.cancel().catch(() => {});
          return;
        }
      }
    }
  }
}
