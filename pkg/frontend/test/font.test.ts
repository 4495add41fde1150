import assert from "node:assert/strict";
import { test } from "node:test";

import { GLYPH_HEIGHT, GLYPH_WIDTH, glyph, glyphNames } from "../src/font";

test("every glyph is a 5x7 grid of # and .", () => {
  for (const name of glyphNames()) {
    const rows = glyph(name);
    assert.equal(rows.length, GLYPH_HEIGHT, `glyph "${name}" height`);
    for (const row of rows) {
      assert.equal(row.length, GLYPH_WIDTH, `glyph "${name}" width`);
      assert.match(row, /^[#.]+$/, `glyph "${name}" row content`);
    }
  }
});

test("covers letters, digits, and the axis punctuation", () => {
  for (const char of "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,-+=()/:%<>[]") {
    const rows = glyph(char);
    assert.equal(rows.length, GLYPH_HEIGHT, `missing glyph for "${char}"`);
  }
});

test("lowercase folds to uppercase", () => {
  assert.deepEqual(glyph("k"), glyph("K"));
});

test("unknown characters render as a box", () => {
  const rows = glyph("é");
  assert.equal(rows[0], "#####");
  assert.equal(rows[6], "#####");
});

test("distinguishable digits", () => {
  assert.notDeepEqual(glyph("0"), glyph("8"));
  assert.notDeepEqual(glyph("1"), glyph("7"));
});
