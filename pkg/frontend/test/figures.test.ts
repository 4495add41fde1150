/**
 * The four figure kinds render from the golden CSV fixtures with exit code
 * zero and produce a nonempty PNG; the spaghetti figure consumes exactly
 * one hundred member files.
 */

import assert from "node:assert/strict";
import { test } from "node:test";
import { existsSync, readFileSync, statSync } from "fs";
import { join } from "path";

import { ensembleSpaghetti } from "../src/figures";
import { run } from "../src/main";
import { PNG_SIGNATURE } from "../src/png";
import { FIXTURES, tempDir, writeMembers } from "./helpers";

function assertPng(path: string): void {
  assert.ok(existsSync(path), `${path} missing`);
  assert.ok(statSync(path).size > 1000, `${path} suspiciously small`);
  const head = readFileSync(path).subarray(0, 8);
  assert.deepEqual([...head], [...PNG_SIGNATURE]);
}

test("trace-compare renders two labelled curves", () => {
  const out = join(tempDir("figs-"), "trace.png");
  const code = run([
    "trace-compare",
    "--inputs", join(FIXTURES, "trace_none.csv"), join(FIXTURES, "trace_exact.csv"),
    "--labels", "no preconditioner", "exact transform",
    "--title", "case 3",
    "--out", out,
  ]);
  assert.equal(code, 0);
  assertPng(out);
});

test("ensemble-spaghetti consumes exactly one hundred member files", () => {
  const dir = tempDir("members-");
  writeMembers(dir, 100);
  const result = ensembleSpaghetti(dir, join(FIXTURES, "trace_none.csv"));
  assert.equal(result.memberCount, 100);

  const out = join(tempDir("figs-"), "spaghetti.png");
  const code = run([
    "ensemble-spaghetti",
    "--members-dir", dir,
    "--reference", join(FIXTURES, "trace_none.csv"),
    "--out", out,
  ]);
  assert.equal(code, 0);
  assertPng(out);
});

test("mean-compare renders aggregates plus the reference trace", () => {
  const out = join(tempDir("figs-"), "means.png");
  const code = run([
    "mean-compare",
    "--inputs", join(FIXTURES, "aggregate_linv30.csv"), join(FIXTURES, "aggregate_s30.csv"),
    "--labels", "rank 30 plain", "rank 30 scaled",
    "--reference", join(FIXTURES, "trace_none.csv"),
    "--out", out,
  ]);
  assert.equal(code, 0);
  assertPng(out);
});

test("singular-values renders one series per rank column", () => {
  const out = join(tempDir("figs-"), "sv.png");
  const code = run([
    "singular-values",
    "--input", join(FIXTURES, "singvals.csv"),
    "--out", out,
  ]);
  assert.equal(code, 0);
  assertPng(out);
});

test("missing input fails with a nonzero exit code", () => {
  const out = join(tempDir("figs-"), "never.png");
  const code = run(["trace-compare", "--inputs", "/no/such/file.csv", "--out", out]);
  assert.equal(code, 1);
  assert.ok(!existsSync(out));
});

test("malformed csv fails with a nonzero exit code", () => {
  const dir = tempDir("bad-");
  const bad = join(dir, "bad.csv");
  require("fs").writeFileSync(bad, "iteration,cost,resnorm\n0,oops,1\n");
  const code = run(["trace-compare", "--inputs", bad, "--out", join(dir, "fig.png")]);
  assert.equal(code, 1);
});

test("empty members directory fails cleanly", () => {
  const dir = tempDir("empty-");
  const code = run(["ensemble-spaghetti", "--members-dir", dir, "--out", join(dir, "f.png")]);
  assert.equal(code, 1);
});

test("usage errors fail cleanly", () => {
  assert.equal(run([]), 1);
  assert.equal(run(["nonsense-kind", "--out", "x.png"]), 1);
  assert.equal(run(["singular-values", "--input", join(FIXTURES, "singvals.csv")]), 1);
});
