/** The proof timeline: the tactics committed so far, an undo/redo stack,
 * and the script export that replays them in batch mode.
 *
 * Every entry stores the prover's own goal renderings so replay fidelity
 * is checkable string-for-string.
 */

import type { GoalView } from "./protocol.js";

export interface TimelineEntry {
  tactic: string;
  goals: GoalView[];
  done: boolean;
}

export class Timeline {
  private entries: TimelineEntry[] = [];
  private redoStack: TimelineEntry[] = [];

  /** Goal state before any tactic ran (set on load). */
  initial: GoalView[] = [];

  push(entry: TimelineEntry): void {
    this.entries.push(entry);
    this.redoStack = [];
  }

  /** Remove the newest entry and remember it for redo. */
  undo(): TimelineEntry | undefined {
    const e = this.entries.pop();
    if (e) this.redoStack.push(e);
    return e;
  }

  /** The tactic to re-send on redo; the caller pushes the fresh result. */
  redoCandidate(): string | undefined {
    const e = this.redoStack.pop();
    return e?.tactic;
  }

  current(): TimelineEntry | undefined {
    return this.entries[this.entries.length - 1];
  }

  tactics(): string[] {
    return this.entries.map((e) => e.tactic);
  }

  snapshot(): readonly TimelineEntry[] {
    return this.entries.slice();
  }

  length(): number {
    return this.entries.length;
  }

  done(): boolean {
    return this.current()?.done ?? false;
  }

  /** A batch script: the loaded theory source followed by the committed
   * tactic sentences, sealed when the proof is complete. */
  exportScript(theorySource: string): string {
    const body = this.tactics().map((t) => `${t}.`).join("\n");
    const seal = this.done() ? "\nQed.\n" : "\n";
    return `${theorySource.trimEnd()}\n${body}${seal}`;
  }
}
