/** Browser wiring: goal pane, clickable hypotheses, a keyboard-first
 * tactic bar, undo/redo, and timeline export.  Rendering strings come
 * from the prover verbatim; this file only places them in the DOM.
 */

import { SessionClient } from "./client.js";
import { HttpTransport } from "./transport.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, cls?: string, text?: string): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  private client = new SessionClient(new HttpTransport(""));
  private status!: HTMLElement;
  private goalPane!: HTMLElement;
  private hypPane!: HTMLElement;
  private input!: HTMLInputElement;
  private logPane!: HTMLElement;
  private theorySource = "";

  mount(root: HTMLElement): void {
    const bar = el("div", "bar");
    const files = el("input") as HTMLInputElement;
    files.placeholder = "files to load (comma separated)";
    files.value = "src/lflogic/examples/stlc.lfs, src/lflogic/examples/uniqueness_goal.ath";
    files.size = 70;
    const loadBtn = el("button", "", "Load");
    const undoBtn = el("button", "", "Undo");
    const redoBtn = el("button", "", "Redo");
    const exportBtn = el("button", "", "Export script");
    bar.append(files, loadBtn, undoBtn, redoBtn, exportBtn);

    this.status = el("div", "status", "No theorem in flight.");
    this.hypPane = el("div", "hyps");
    this.goalPane = el("pre", "goal");
    this.input = el("input", "tactic") as HTMLInputElement;
    this.input.placeholder = "tactic (press Enter)";
    this.input.size = 70;
    this.logPane = el("pre", "log");
    root.append(bar, this.status, this.hypPane, this.goalPane,
                this.input, this.logPane);

    loadBtn.onclick = () => void this.load(files.value);
    undoBtn.onclick = () => void this.run(() => this.client.undo());
    redoBtn.onclick = () => void this.run(() => this.client.redo());
    exportBtn.onclick = () => this.export();
    this.input.onkeydown = (ev) => {
      if (ev.key === "Enter" && this.input.value.trim()) {
        const t = this.input.value.trim().replace(/\.$/, "");
        this.input.value = "";
        void this.run(() => this.client.tactic(t));
      }
    };
  }

  private async load(csv: string): Promise<void> {
    const paths = csv.split(",").map((s) => s.trim()).filter(Boolean);
    this.theorySource = "";
    for (const p of paths) {
      if (p.endsWith(".ath")) {
        try {
          const r = await fetch(`/${p}`);
          if (r.ok) this.theorySource += (await r.text()) + "\n";
        } catch {
          // export will fall back to a header comment
        }
      }
    }
    await this.run(() => this.client.load(paths));
  }

  private async run(step: () => Promise<unknown>): Promise<void> {
    try {
      await step();
      this.status.textContent = this.client.done
        ? `theorem ${this.client.theorem}: proof completed`
        : `theorem ${this.client.theorem ?? "?"}: ` +
          `${this.client.goals.length} goal(s)`;
    } catch (e) {
      this.status.textContent = String(e);
    }
    this.render();
  }

  private render(): void {
    const g = this.client.goals[0];
    this.goalPane.textContent = this.client.focusedRendering();
    this.hypPane.textContent = "";
    if (g) {
      for (const h of g.hyps) {
        const b = el("button", "hyp", `${h.name}`);
        b.title = h.rendering;
        // clicking a hypothesis analyzes it
        b.onclick = () => void this.run(() => this.client.tactic(`case ${h.name}`));
        this.hypPane.append(b);
      }
    }
    this.logPane.textContent =
      this.client.timeline.tactics().map((t) => `${t}.`).join("\n");
  }

  private export(): void {
    const src = this.theorySource ||
      "% exported timeline (load source unavailable)";
    const blob = new Blob([this.client.timeline.exportScript(src)],
                          { type: "text/plain" });
    const a = el("a") as HTMLAnchorElement;
    a.href = URL.createObjectURL(blob);
    a.download = `${this.client.theorem ?? "proof"}.ath`;
    a.click();
    URL.revokeObjectURL(a.href);
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  new App().mount(document.getElementById("app")!);
}
