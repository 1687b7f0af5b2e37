/** Transports carrying one protocol request to one response.
 *
 * The browser posts each request over HTTP to the `serve --web` bridge;
 * tests and editor integrations talk line-delimited JSON to a spawned
 * `lflogic serve` process over stdio.  Both deliver requests in order.
 */

import type { Request, Response } from "./protocol.js";

export interface Transport {
  send(req: Request): Promise<Response>;
  close(): Promise<void>;
}

/** Browser transport: one POST per request against the web bridge. */
export class HttpTransport implements Transport {
  constructor(private readonly base: string = "") {}

  async send(req: Request): Promise<Response> {
    const r = await fetch(`${this.base}/session`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    return (await r.json()) as Response;
  }

  async close(): Promise<void> {}
}

/** The slice of a child process the stdio transport needs; kept abstract
 * so this module stays loadable in the browser. */
export interface LineProcess {
  writeLine(line: string): void;
  onLine(handler: (line: string) => void): void;
  end(): Promise<void>;
}

/** Line-delimited JSON over a spawned prover process. */
export class StdioTransport implements Transport {
  private waiters: Array<(line: string) => void> = [];

  constructor(private readonly proc: LineProcess) {
    proc.onLine((line) => {
      const w = this.waiters.shift();
      if (w) w(line);
    });
  }

  send(req: Request): Promise<Response> {
    return new Promise((resolve, reject) => {
      this.waiters.push((line) => {
        try {
          resolve(JSON.parse(line) as Response);
        } catch (e) {
          reject(e);
        }
      });
      this.proc.writeLine(JSON.stringify(req));
    });
  }

  async close(): Promise<void> {
    await this.proc.end();
  }
}
