/** The session client: serializes requests by id, mirrors the goal state
 * from responses, and maintains the timeline.  All logic lives on the
 * prover side; this class only forwards strings.
 */

import type { GoalView, Request, Response } from "./protocol.js";
import { Timeline } from "./timeline.js";
import type { Transport } from "./transport.js";

export class SessionError extends Error {}

export class SessionClient {
  private nextId = 1;
  private queue: Promise<unknown> = Promise.resolve();

  goals: GoalView[] = [];
  theorem: string | null = null;
  done = false;
  readonly timeline = new Timeline();

  constructor(private readonly transport: Transport) {}

  private request(op: Request["op"], arg: Request["arg"]): Promise<Response> {
    const id = this.nextId++;
    const run = this.queue.then(() =>
      this.transport.send({ id, op, arg }));
    this.queue = run.catch(() => undefined);
    return run.then((resp) => {
      if (resp.id !== id) {
        throw new SessionError(`response id ${resp.id} for request ${id}`);
      }
      return resp;
    });
  }

  private absorb(resp: Response): Response {
    if (resp.goals) this.goals = resp.goals;
    if (resp.theorem !== undefined) this.theorem = resp.theorem ?? null;
    if (resp.done !== undefined) this.done = resp.done;
    return resp;
  }

  async load(files: string | string[]): Promise<Response> {
    const resp = this.absorb(await this.request("load", files));
    if (!resp.ok) throw new SessionError(resp.error ?? "load failed");
    this.timeline.initial = this.goals;
    return resp;
  }

  /** Run one tactic; commits to the timeline only when the prover says ok. */
  async tactic(text: string): Promise<Response> {
    const resp = this.absorb(await this.request("tactic", text));
    if (!resp.ok) throw new SessionError(resp.error ?? "tactic failed");
    this.timeline.push({ tactic: text, goals: this.goals, done: this.done });
    return resp;
  }

  async undo(): Promise<Response> {
    const resp = this.absorb(await this.request("undo", null));
    if (!resp.ok) throw new SessionError(resp.error ?? "undo failed");
    this.timeline.undo();
    return resp;
  }

  async redo(): Promise<Response | undefined> {
    const t = this.timeline.redoCandidate();
    if (t === undefined) return undefined;
    return this.tactic(t);
  }

  async state(): Promise<Response> {
    const resp = this.absorb(await this.request("state", null));
    if (!resp.ok) throw new SessionError(resp.error ?? "state failed");
    return resp;
  }

  async quit(): Promise<void> {
    try {
      await this.request("quit", null);
    } finally {
      await this.transport.close();
    }
  }

  focusedRendering(): string {
    return this.goals[0]?.rendering ?? "Proof completed.";
  }
}
