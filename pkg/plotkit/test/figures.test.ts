import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

import { describe, expect, it } from "vitest";

import { main } from "../src/cli";
import { readTable } from "../src/csv";
import { FigureKind, render } from "../src/figures";

const FIXTURES = join(__dirname, "fixtures");

const CASES: Array<{ kind: FigureKind; file: string; mark: string }> = [
  { kind: "bands", file: "bands.csv", mark: "<polyline" },
  { kind: "ecdf", file: "finals.csv", mark: "<polyline" },
  { kind: "risk-trace", file: "risk_trace.csv", mark: "<polyline" },
  { kind: "pareto", file: "quad_sweep.csv", mark: "<polyline" },
  { kind: "heatmap", file: "smooth_sweep.csv", mark: "<circle" },
];

describe("figure rendering", () => {
  for (const { kind, file, mark } of CASES) {
    it(`renders ${kind} from experiment output`, () => {
      const table = readTable(join(FIXTURES, file));
      const svg = render(kind, [table]);
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg.endsWith("</svg>\n")).toBe(true);
      expect(svg).toContain(mark);
    });

    it(`re-renders ${kind} byte-identically`, () => {
      const table = readTable(join(FIXTURES, file));
      expect(render(kind, [table])).toBe(render(kind, [readTable(join(FIXTURES, file))]));
    });
  }

  it("bands supports the std band variant and labels it", () => {
    const table = readTable(join(FIXTURES, "bands.csv"));
    const rms = render("bands", [table]);
    const std = render("bands", [table], { useStd: true });
    expect(rms).toContain("±rms");
    expect(std).toContain("±std");
    expect(rms).not.toBe(std);
  });

  it("ecdf curves are monotone step functions", () => {
    const table = readTable(join(FIXTURES, "finals.csv"));
    const svg = render("ecdf", [table]);
    const polys = [...svg.matchAll(/<polyline points="([^"]+)"/g)].map((m) => m[1]);
    expect(polys.length).toBeGreaterThan(0);
    for (const pts of polys) {
      const ys = pts.split(" ").map((p) => Number(p.split(",")[1]));
      for (let i = 1; i < ys.length; i++) {
        expect(ys[i]).toBeLessThanOrEqual(ys[i - 1] + 1e-9); // y axis points up
      }
    }
  });

  it("fails loudly on a missing column", () => {
    const table = readTable(join(FIXTURES, "bands.csv"));
    const broken = { columns: table.columns.filter((c) => c !== "rms"), rows: table.rows.map((r) => r.slice(0, -1)) };
    expect(() => render("bands", [broken])).toThrow("missing column: rms");
  });
});

describe("cli", () => {
  it("writes an svg file and is deterministic", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const out1 = join(dir, "a.svg");
    const out2 = join(dir, "b.svg");
    const input = join(FIXTURES, "risk_trace.csv");
    expect(main(["--in", input, "--kind", "risk-trace", "--out", out1])).toBe(0);
    expect(main(["--in", input, "--kind", "risk-trace", "--out", out2])).toBe(0);
    expect(readFileSync(out1, "utf8")).toBe(readFileSync(out2, "utf8"));
  });

  it("exits nonzero on schema mismatch", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "a,b\n1,2\n");
    expect(main(["--in", bad, "--kind", "bands", "--out", join(dir, "x.svg")])).toBe(1);
  });

  it("exits nonzero on unknown kind or missing flags", () => {
    expect(main(["--kind", "nope", "--in", "x", "--out", "y"])).toBe(1);
    expect(main(["--kind", "bands"])).toBe(1);
  });
});
