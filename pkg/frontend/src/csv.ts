/** Parsers for the versioned simulator result CSVs. */

export const LINK_SCHEMA = "link-sim-v1";
export const SYSTEM_SCHEMA = "system-sim-v1";

export interface LinkRow {
  codec: string;
  snrDb: number;
  trials: number;
  errors: number;
  per: number;
  ciHalfwidth: number;
}

export interface SystemRow {
  scheme: string;
  policy: string;
  seed: number;
  embbThroughputBps: number;
  urllcMeanLatencyUs: number;
  urllcP99LatencyUs: number;
  urllcPer: number;
  wastedReservedFraction: number;
  preemptionCount: number;
}

export class CsvError extends Error {}

export function readSchema(text: string): string {
  const first = text.split(/\r?\n/, 1)[0] ?? "";
  const match = first.match(/^# schema: (.+)$/);
  if (!match) {
    throw new CsvError(
      "missing '# schema: <name>' header line; is this a simulator result CSV?",
    );
  }
  return match[1].trim();
}

function dataLines(text: string): string[] {
  return text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0 && !line.startsWith("#"));
}

const LINK_HEADER = "codec,snr_db,trials,errors,per,ci_halfwidth";
const SYSTEM_HEADER =
  "scheme,policy,seed,embb_throughput_bps,urllc_mean_latency_us," +
  "urllc_p99_latency_us,urllc_per,wasted_reserved_fraction,preemption_count";

function toNumber(raw: string, column: string, line: number): number {
  if (raw === "nan") return NaN;
  const value = Number(raw);
  if (Number.isNaN(value) && raw !== "nan") {
    throw new CsvError(`line ${line}: column ${column}: not a number: ${raw}`);
  }
  return value;
}

export function parseLinkCsv(text: string): LinkRow[] {
  const schema = readSchema(text);
  if (schema !== LINK_SCHEMA) {
    throw new CsvError(`expected schema ${LINK_SCHEMA}, got ${schema}`);
  }
  const lines = dataLines(text);
  if (lines[0] !== LINK_HEADER) {
    throw new CsvError(`unexpected columns: ${lines[0] ?? "<empty>"}`);
  }
  const rows: LinkRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 6) {
      throw new CsvError(`line ${i + 1}: expected 6 fields, got ${parts.length}`);
    }
    rows.push({
      codec: parts[0],
      snrDb: toNumber(parts[1], "snr_db", i + 1),
      trials: toNumber(parts[2], "trials", i + 1),
      errors: toNumber(parts[3], "errors", i + 1),
      per: toNumber(parts[4], "per", i + 1),
      ciHalfwidth: toNumber(parts[5], "ci_halfwidth", i + 1),
    });
  }
  if (rows.length === 0) {
    throw new CsvError("no data rows");
  }
  return rows;
}

export function parseSystemCsv(text: string): SystemRow[] {
  const schema = readSchema(text);
  if (schema !== SYSTEM_SCHEMA) {
    throw new CsvError(`expected schema ${SYSTEM_SCHEMA}, got ${schema}`);
  }
  const lines = dataLines(text);
  if (lines[0] !== SYSTEM_HEADER) {
    throw new CsvError(`unexpected columns: ${lines[0] ?? "<empty>"}`);
  }
  const rows: SystemRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 9) {
      throw new CsvError(`line ${i + 1}: expected 9 fields, got ${parts.length}`);
    }
    rows.push({
      scheme: parts[0],
      policy: parts[1],
      seed: toNumber(parts[2], "seed", i + 1),
      embbThroughputBps: toNumber(parts[3], "embb_throughput_bps", i + 1),
      urllcMeanLatencyUs: toNumber(parts[4], "urllc_mean_latency_us", i + 1),
      urllcP99LatencyUs: toNumber(parts[5], "urllc_p99_latency_us", i + 1),
      urllcPer: toNumber(parts[6], "urllc_per", i + 1),
      wastedReservedFraction: toNumber(parts[7], "wasted_reserved_fraction", i + 1),
      preemptionCount: toNumber(parts[8], "preemption_count", i + 1),
    });
  }
  if (rows.length === 0) {
    throw new CsvError("no data rows");
  }
  return rows;
}
