#!/usr/bin/env node
// SMT-LIB 2 solver process backed by the Z3 WebAssembly build.
//
// One-shot mode: pipe a script to stdin, close it, read the result.
// Persistent mode: send a script followed by a line ';;RUN'; the evaluation
// result is written back followed by a line ';;READY'. Each request runs in
// a fresh solver context, so sessions share no state.

"use strict";

const { init } = require("z3-solver");

async function main() {
  const { Z3 } = await init();

  async function evalScript(text) {
    const ctx = Z3.mk_context(Z3.mk_config());
    try {
      return await Z3.eval_smtlib2_string(ctx, text);
    } catch (err) {
      return `(error "${String(err).replace(/"/g, "'")}")\n`;
    } finally {
      Z3.del_context(ctx);
    }
  }

  let buffer = [];
  let queue = Promise.resolve();
  let sawRun = false;

  const flush = (lines, persistent) => {
    const script = lines.join("\n");
    queue = queue.then(async () => {
      const out = await evalScript(script);
      process.stdout.write(out.endsWith("\n") || out === "" ? out : out + "\n");
      if (persistent) process.stdout.write(";;READY\n");
    });
    return queue;
  };

  const readline = require("readline").createInterface({
    input: process.stdin,
    terminal: false,
  });
  readline.on("line", (line) => {
    if (line.trim() === ";;RUN") {
      sawRun = true;
      const lines = buffer;
      buffer = [];
      flush(lines, true);
    } else {
      buffer.push(line);
    }
  });
  readline.on("close", () => {
    const pending = buffer.some((l) => l.trim() !== "");
    const finish = pending || !sawRun ? flush(buffer, false) : queue;
    finish.then(() => process.exit(0));
  });
}

main().catch((err) => {
  process.stderr.write(`shim failed to start: ${err}\n`);
  process.exit(3);
});
