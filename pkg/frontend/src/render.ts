/** Kind dispatch, schema checks, and the rendered-vs-source digest. */

import { createHash } from "node:crypto";

import {
  groupSystemRows,
  renderCoexistBars,
  renderPerCurves,
  renderSchedBars,
  serializeValues,
} from "./charts.js";
import { CsvError, parseLinkCsv, parseSystemCsv, readSchema, LINK_SCHEMA, SYSTEM_SCHEMA } from "./csv.js";

export type PlotKind = "per_curve" | "sched_bars" | "coexist_bars";

export const KIND_SCHEMAS: Record<PlotKind, string> = {
  per_curve: LINK_SCHEMA,
  sched_bars: SYSTEM_SCHEMA,
  coexist_bars: SYSTEM_SCHEMA,
};

export function render(kind: PlotKind, csvText: string): string {
  const schema = readSchema(csvText);
  const expected = KIND_SCHEMAS[kind];
  if (schema !== expected) {
    throw new CsvError(
      `plot kind '${kind}' needs schema ${expected}, but the file declares ` +
        `${schema}; pick the matching --kind or the matching CSV`,
    );
  }
  if (kind === "per_curve") {
    return renderPerCurves(parseLinkCsv(csvText));
  }
  if (kind === "sched_bars") {
    return renderSchedBars(parseSystemCsv(csvText));
  }
  return renderCoexistBars(parseSystemCsv(csvText));
}

function sha256(text: string): string {
  return createHash("sha256").update(text).digest("hex");
}

/** Digest of every data-values attribute in document order. */
export function renderedDigest(svgText: string): string {
  const values: string[] = [];
  const re = /data-values="([^"]*)"/g;
  let match: RegExpExecArray | null;
  while ((match = re.exec(svgText)) !== null) {
    values.push(match[1]);
  }
  return sha256(values.join("|"));
}

/** The same digest computed from the CSV alone. */
export function sourceDigest(kind: PlotKind, csvText: string): string {
  if (kind === "per_curve") {
    const rows = parseLinkCsv(csvText);
    const codecs: string[] = [];
    for (const row of rows) {
      if (!codecs.includes(row.codec)) codecs.push(row.codec);
    }
    const parts = codecs.map((codec) =>
      serializeValues(
        rows.filter((r) => r.codec === codec).flatMap((r) => [r.snrDb, r.per]),
      ),
    );
    return sha256(parts.join("|"));
  }
  const groups = groupSystemRows(parseSystemCsv(csvText));
  const parts: string[] = [];
  for (const g of groups) {
    parts.push(serializeValues([g.throughputMbps]));
    if (kind === "sched_bars" && !Number.isNaN(g.latencyMs)) {
      parts.push(serializeValues([g.latencyMs]));
    }
  }
  return sha256(parts.join("|"));
}
