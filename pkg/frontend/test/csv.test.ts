import assert from "node:assert/strict";
import { test } from "node:test";
import { join } from "path";

import { column, CsvError, parseCsv, readCsv } from "../src/csv";
import { FIXTURES } from "./helpers";

test("parses header and numeric rows", () => {
  const table = parseCsv("iteration,cost,resnorm\n0,10.5,1\n1,9,0.5\n", "inline");
  assert.deepEqual(table.header, ["iteration", "cost", "resnorm"]);
  assert.deepEqual(table.rows, [
    [0, 10.5, 1],
    [1, 9, 0.5],
  ]);
});

test("empty cells become NaN", () => {
  const table = parseCsv("index,rank_2\n1,5.0\n2,\n", "inline");
  assert.equal(table.rows[1].length, 2);
  assert.ok(Number.isNaN(table.rows[1][1]));
});

test("rejects inconsistent column counts", () => {
  assert.throws(() => parseCsv("a,b\n1,2,3\n", "inline"), CsvError);
});

test("rejects non-numeric cells", () => {
  assert.throws(() => parseCsv("a,b\n1,zebra\n", "inline"), CsvError);
});

test("rejects empty input", () => {
  assert.throws(() => parseCsv("", "inline"), CsvError);
});

test("missing file raises CsvError", () => {
  assert.throws(() => readCsv("/nonexistent/file.csv"), CsvError);
});

test("column lookup by name", () => {
  const table = readCsv(join(FIXTURES, "trace_none.csv"));
  const costs = column(table, "cost");
  assert.equal(costs.length, 101);
  assert.ok(costs[100] < costs[0]);
  assert.throws(() => column(table, "bogus"), CsvError);
});

test("reads the 17-digit fixture values exactly", () => {
  const table = readCsv(join(FIXTURES, "trace_exact.csv"));
  const cost0 = column(table, "cost")[0];
  assert.equal(cost0, 17000.0 * Math.exp(-0.45 * 0) + 1650.0);
});
