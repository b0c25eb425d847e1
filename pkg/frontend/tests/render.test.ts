import { mkdtempSync, readFileSync, existsSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { parseLinkCsv, parseSystemCsv, CsvError } from "../src/csv.js";
import { PER_FLOOR } from "../src/charts.js";
import { render, renderedDigest, sourceDigest } from "../src/render.js";
import { logScale, linearScale } from "../src/scales.js";

const LINK_CSV = `# schema: link-sim-v1
codec,snr_db,trials,errors,per,ci_halfwidth
svc,2.0,2000,400,0.2,0.0175
svc,6.0,20000,200,0.01,0.0014
svc,10.0,150000,150,0.001,0.00016
cc,6.0,2000,500,0.25,0.019
cc,10.0,30000,300,0.01,0.0011
cc,14.0,200000,100,0.0005,9.8e-05
polar,4.0,2000,300,0.15,0.0156
polar,12.0,200000,0,0.0,0.0
`;

const SYSTEM_CSV = `# schema: system-sim-v1
scheme,policy,seed,embb_throughput_bps,urllc_mean_latency_us,urllc_p99_latency_us,urllc_per,wasted_reserved_fraction,preemption_count
baseline,lte_retx,1,30200000.0,nan,nan,0.0,0.0,0
baseline,lte_retx,2,29800000.0,nan,nan,0.0,0.0,0
instant,lte_retx,1,12400000.0,160.5,420.0,0.0001,0.0,980
instant,lte_retx,2,12600000.0,159.5,410.0,0.0,0.0,1020
semi_static_reservation,lte_retx,1,17800000.0,420.0,800.0,0.0,0.7,0
dynamic_reservation,lte_retx,1,16600000.0,350.0,700.0,0.0,0.8,0
`;

describe("csv parsing", () => {
  it("parses link rows", () => {
    const rows = parseLinkCsv(LINK_CSV);
    expect(rows).toHaveLength(8);
    expect(rows[0]).toMatchObject({ codec: "svc", snrDb: 2.0, per: 0.2 });
  });

  it("parses system rows including nan latency", () => {
    const rows = parseSystemCsv(SYSTEM_CSV);
    expect(rows).toHaveLength(6);
    expect(Number.isNaN(rows[0].urllcMeanLatencyUs)).toBe(true);
    expect(rows[2].preemptionCount).toBe(980);
  });

  it("rejects missing schema and wrong schema", () => {
    expect(() => parseLinkCsv("codec,snr_db\n")).toThrow(CsvError);
    expect(() => parseLinkCsv(SYSTEM_CSV)).toThrow(/expected schema link-sim-v1/);
    expect(() => parseSystemCsv(LINK_CSV)).toThrow(/expected schema system-sim-v1/);
  });

  it("rejects empty data", () => {
    const empty = "# schema: link-sim-v1\ncodec,snr_db,trials,errors,per,ci_halfwidth\n";
    expect(() => parseLinkCsv(empty)).toThrow(/no data rows/);
  });
});

describe("digest fidelity", () => {
  it("per_curve rendering is digest-equal to the CSV", () => {
    const svg = render("per_curve", LINK_CSV);
    expect(renderedDigest(svg)).toBe(sourceDigest("per_curve", LINK_CSV));
  });

  it("sched_bars rendering is digest-equal to the CSV", () => {
    const svg = render("sched_bars", SYSTEM_CSV);
    expect(renderedDigest(svg)).toBe(sourceDigest("sched_bars", SYSTEM_CSV));
  });

  it("coexist_bars rendering is digest-equal to the CSV", () => {
    const svg = render("coexist_bars", SYSTEM_CSV);
    expect(renderedDigest(svg)).toBe(sourceDigest("coexist_bars", SYSTEM_CSV));
  });

  it("rendering is deterministic", () => {
    expect(render("per_curve", LINK_CSV)).toBe(render("per_curve", LINK_CSV));
  });
});

describe("per_curve axis", () => {
  it("log y-axis spans at least 1e-5 .. 1", () => {
    const svg = render("per_curve", LINK_CSV);
    // axis tick labels 1e-5 .. 1e0 must all be present
    for (let e = -5; e <= 0; e++) {
      expect(svg).toContain(`>1e${e}<`);
    }
    expect(PER_FLOOR).toBeLessThanOrEqual(1e-5);
  });

  it("draws one series per codec", () => {
    const svg = render("per_curve", LINK_CSV);
    expect(svg.match(/data-series="svc"/g)).toHaveLength(1);
    expect(svg.match(/data-series="cc"/g)).toHaveLength(1);
    expect(svg.match(/data-series="polar"/g)).toHaveLength(1);
  });
});

describe("kind/schema matching", () => {
  it("refuses a system CSV for per_curve with an actionable message", () => {
    expect(() => render("per_curve", SYSTEM_CSV)).toThrow(/--kind/);
  });
  it("refuses a link CSV for bar kinds", () => {
    expect(() => render("sched_bars", LINK_CSV)).toThrow(/--kind/);
  });
});

describe("cli", () => {
  it("renders an svg file end to end", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const input = join(dir, "link.csv");
    writeFileSync(input, LINK_CSV);
    const out = join(dir, "fig4a.svg");
    expect(main(["--in", input, "--kind", "per_curve", "--out", out])).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
  });

  it("writes nothing for an empty csv", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const input = join(dir, "empty.csv");
    writeFileSync(input, "# schema: link-sim-v1\ncodec,snr_db,trials,errors,per,ci_halfwidth\n");
    const out = join(dir, "out.svg");
    expect(main(["--in", input, "--kind", "per_curve", "--out", out])).toBe(2);
    expect(existsSync(out)).toBe(false);
  });

  it("rejects png output with an explanation", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const input = join(dir, "link.csv");
    writeFileSync(input, LINK_CSV);
    expect(main(["--in", input, "--kind", "per_curve", "--out", join(dir, "x.png")])).toBe(2);
  });

  it("rejects unknown kinds and missing args", () => {
    expect(main([])).toBe(2);
    expect(main(["--in", "x", "--kind", "nope", "--out", "y.svg"])).toBe(2);
  });
});

describe("scales", () => {
  it("log scale ticks cover decades", () => {
    const s = logScale([1e-5, 1], [100, 0]);
    expect(s.ticks()).toEqual([1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1]);
    expect(s(1)).toBe(0);
    expect(s(1e-5)).toBe(100);
  });

  it("linear scale maps endpoints", () => {
    const s = linearScale([0, 10], [0, 100]);
    expect(s(5)).toBe(50);
    expect(s.ticks()).toContain(0);
  });
});
