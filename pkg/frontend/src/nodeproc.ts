/** Node-only glue: wrap a spawned prover process as a LineProcess for the
 * stdio transport.  Kept in its own module so browser bundles never pull
 * in node builtins. */

import { spawn } from "node:child_process";
import type { LineProcess } from "./transport.js";

export function spawnProver(command: string, args: string[],
                            cwd?: string): LineProcess {
  const proc = spawn(command, args, { cwd, stdio: ["pipe", "pipe", "pipe"] });
  proc.stdout.setEncoding("utf8");
  let buffer = "";
  let handler: ((line: string) => void) | undefined;
  proc.stdout.on("data", (chunk: string) => {
    buffer += chunk;
    let idx;
    while ((idx = buffer.indexOf("\n")) >= 0) {
      const line = buffer.slice(0, idx);
      buffer = buffer.slice(idx + 1);
      if (handler) handler(line);
    }
  });
  return {
    writeLine(line: string) {
      proc.stdin.write(line + "\n");
    },
    onLine(h) {
      handler = h;
    },
    async end() {
      proc.stdin.end();
      await new Promise((resolve) => proc.once("exit", resolve));
    },
  };
}
