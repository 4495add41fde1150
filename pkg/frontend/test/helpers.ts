/** Shared test helpers: temp dirs and deterministic member-trace files. */

import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}

/** Deterministic member trace: smooth decay with a member-dependent wiggle. */
export function memberCsv(member: number, iterations = 40): string {
  const lines = ["iteration,cost,resnorm"];
  for (let i = 0; i <= iterations; i++) {
    const wiggle = 1 + 0.004 * Math.sin(member * 2.3 + i * 0.7);
    const cost = (16000 * Math.exp(-0.2 * i) + 2400) * wiggle;
    const res = 400 * Math.exp(-0.08 * i);
    lines.push(`${i},${cost.toPrecision(17)},${res.toPrecision(17)}`);
  }
  return lines.join("\n") + "\n";
}

export function writeMembers(dir: string, count: number): void {
  for (let m = 0; m < count; m++) {
    const name = `member_${String(m).padStart(3, "0")}.csv`;
    writeFileSync(join(dir, name), memberCsv(m));
  }
}

export const FIXTURES = join(__dirname, "..", "..", "fixtures");
