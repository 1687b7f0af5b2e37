/** Wire types for the prover session protocol.
 *
 * Requests are `{id, op, arg}`; responses carry the canonical goal
 * renderings.  The UI never derives a rendering itself: every string shown
 * comes out of a response verbatim.
 */

export type Op = "load" | "tactic" | "undo" | "state" | "quit";

export interface Request {
  id: number;
  op: Op;
  arg: string | string[] | null;
}

export interface HypView {
  name: string;
  rendering: string;
}

export interface GoalView {
  gid: number;
  rendering: string;
  hyps: HypView[];
}

export interface Response {
  id: number | null;
  ok: boolean;
  goals?: GoalView[];
  theorem?: string | null;
  done?: boolean;
  log?: string[];
  error?: string;
}
