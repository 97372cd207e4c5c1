import { describe, expect, it } from "vitest";

import { EXPECTED_HEADER, parseRateCsv, SchemaError } from "../src/csv.js";

const GOOD = [
  EXPECTED_HEADER,
  "bound:broadcast_lb,-,0,-6,narrow_band,0.266652609,nats,,,,",
  "af:multisession,joint_opt,0,-6,wide_band,0.261,nats,0.0016,50000,20251,budget saturated for 1 of 50000 pairs",
].join("\n");

describe("parseRateCsv", () => {
  it("parses well-formed rows", () => {
    const rows = parseRateCsv(GOOD);
    expect(rows).toHaveLength(2);
    expect(rows[0].strategy).toBe("bound:broadcast_lb");
    expect(rows[0].rate).toBeCloseTo(0.266652609, 9);
    expect(rows[0].stderr).toBeNull();
    expect(rows[0].warnings).toEqual([]);
    expect(rows[1].alloc).toBe("joint_opt");
    expect(rows[1].nSamples).toBe(50000);
    expect(rows[1].seed).toBe(20251);
    expect(rows[1].warnings).toHaveLength(1);
  });

  it("rejects a wrong header with column diagnostics", () => {
    const bad = GOOD.replace("ps_db", "ps");
    expect(() => parseRateCsv(bad)).toThrowError(SchemaError);
    expect(() => parseRateCsv(bad)).toThrowError(/column 3/);
  });

  it("rejects an empty file and a header-only file", () => {
    expect(() => parseRateCsv("")).toThrowError(/empty CSV/);
    expect(() => parseRateCsv(EXPECTED_HEADER)).toThrowError(/no data rows/);
  });

  it("rejects rows with the wrong arity or non-numeric rates", () => {
    expect(() => parseRateCsv(`${EXPECTED_HEADER}\na,b,c`)).toThrowError(/11 columns/);
    const bad = `${EXPECTED_HEADER}\nx,-,0,0,narrow_band,not_a_rate,nats,,,,`;
    expect(() => parseRateCsv(bad)).toThrowError(/rate/);
  });

  it("accepts -inf relay power (zero relay power in dB)", () => {
    const rows = parseRateCsv(
      `${EXPECTED_HEADER}\nbound:cut_set,-,0,-inf,narrow_band,0.59,nats,,,,`,
    );
    expect(rows[0].prDb).toBe(-Infinity);
  });
});
