import { describe, expect, it } from "vitest";

import { columnIndex, numericColumn, parseCsv, prefixedColumns } from "../src/csv";

const GOOD = `# riskgmm-csv v1
a,b,c
1,2.5,x
3,4.5,y
`;

describe("csv parsing", () => {
  it("parses the versioned schema", () => {
    const t = parseCsv(GOOD);
    expect(t.columns).toEqual(["a", "b", "c"]);
    expect(t.rows).toHaveLength(2);
    expect(numericColumn(t, "b")).toEqual([2.5, 4.5]);
  });

  it("rejects a wrong schema line", () => {
    expect(() => parseCsv("a,b\n1,2\n")).toThrow(/schema version/);
    expect(() => parseCsv("# riskgmm-csv v2\na\n1\n")).toThrow(/schema version/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("# riskgmm-csv v1\na,b\n1\n")).toThrow(/fields/);
  });

  it("names the missing column", () => {
    const t = parseCsv(GOOD);
    expect(() => columnIndex(t, "zzz")).toThrow("missing column: zzz");
  });

  it("finds prefixed column families", () => {
    const t = parseCsv("# riskgmm-csv v1\nrisk_theta_1,risk_theta_5,other\n1,2,3\n");
    expect(prefixedColumns(t, "risk_theta_")).toEqual(["risk_theta_1", "risk_theta_5"]);
  });
});
