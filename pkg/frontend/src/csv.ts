/**
 * Schema-validated CSV reading for the lab's output files.
 *
 * Every producer writes a `# schema=<name>` line ahead of the header; the
 * consumers here refuse files whose schema line or column set differs from
 * what they were built against, so silent format drift cannot produce
 * quietly-wrong figures.
 */

export class SchemaError extends Error {}

export interface ParsedCsv {
  schema: string;
  columns: string[];
  rows: string[][];
}

export function parseCsv(
  text: string,
  expectedSchema: string,
  expectedColumns: readonly string[],
): ParsedCsv {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new SchemaError("file too short: need a schema line and a header");
  }
  const schemaLine = lines[0];
  const m = /^# schema=(\S+)$/.exec(schemaLine);
  if (!m) {
    throw new SchemaError(`missing schema line, got: ${schemaLine}`);
  }
  if (m[1] !== expectedSchema) {
    throw new SchemaError(
      `schema mismatch: expected ${expectedSchema}, got ${m[1]}`,
    );
  }
  const columns = lines[1].split(",");
  if (columns.length !== expectedColumns.length) {
    throw new SchemaError(
      `column count mismatch: expected ${expectedColumns.length}, got ` +
        `${columns.length}`,
    );
  }
  for (let i = 0; i < columns.length; i++) {
    if (columns[i] !== expectedColumns[i]) {
      throw new SchemaError(
        `unknown or misplaced column '${columns[i]}' ` +
          `(expected '${expectedColumns[i]}' at position ${i})`,
      );
    }
  }
  const rows = lines.slice(2).map((l) => l.split(","));
  for (const row of rows) {
    if (row.length !== columns.length) {
      throw new SchemaError(`row has ${row.length} cells, expected ${columns.length}`);
    }
  }
  return { schema: m[1], columns, rows };
}

export const HISTORY_SCHEMA = "mhdlab.history.v1";
export const HISTORY_COLUMNS = [
  "t",
  "norm_h2l",
  "min_theta_total",
  "min_h_total",
  "div_u",
  "div_h",
  "m_of_t",
  "equiv_ratio_lo",
  "equiv_ratio_hi",
  "sup_dy1",
  "sup_dy2",
  "abort",
] as const;

export interface HistoryRow {
  t: number;
  norm_h2l: number;
  min_theta_total: number;
  min_h_total: number;
  div_u: number;
  div_h: number;
  m_of_t: number;
  equiv_ratio_lo: number;
  equiv_ratio_hi: number;
  sup_dy1: number;
  sup_dy2: number;
  abort: string;
}

function toNumber(cell: string, column: string): number {
  const v = Number(cell);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`non-numeric value '${cell}' in column ${column}`);
  }
  return v;
}

export function parseHistory(text: string): HistoryRow[] {
  const parsed = parseCsv(text, HISTORY_SCHEMA, HISTORY_COLUMNS);
  return parsed.rows.map((cells) => {
    const row: Record<string, number | string> = {};
    HISTORY_COLUMNS.forEach((name, i) => {
      row[name] = name === "abort" ? cells[i] : toNumber(cells[i], name);
    });
    return row as unknown as HistoryRow;
  });
}

export const STUDY_SCHEMAS = ["mhdlab.study.grid.v1", "mhdlab.study.epsilon.v1"];
export const STUDY_COLUMNS = ["axis", "parameter", "error", "observed_order"] as const;

export interface StudyRow {
  axis: string;
  parameter: number;
  error: number;
  observedOrder: number | null;
}

export function parseStudy(text: string): StudyRow[] {
  const lines = text.split(/\r?\n/);
  const m = /^# schema=(\S+)$/.exec(lines[0] ?? "");
  if (!m || !STUDY_SCHEMAS.includes(m[1])) {
    throw new SchemaError(
      `expected one of [${STUDY_SCHEMAS.join(", ")}], got: ${lines[0]}`,
    );
  }
  const parsed = parseCsv(text, m[1], STUDY_COLUMNS);
  return parsed.rows.map((cells) => ({
    axis: cells[0],
    parameter: toNumber(cells[1], "parameter"),
    error: toNumber(cells[2], "error"),
    observedOrder: cells[3] === "nan" ? null : toNumber(cells[3], "observed_order"),
  }));
}
