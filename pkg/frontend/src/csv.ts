/** Parser for the solver's CSV output: an optional leading `#` provenance
 * comment, a header row, then RFC-4180-style rows (quoted fields may contain
 * commas, quotes double up). */

export interface CsvTable {
  comment: string | null;
  columns: string[];
  rows: Record<string, string>[];
}

function splitLine(line: string): string[] {
  const fields: string[] = [];
  let current = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
          current += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        current += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      fields.push(current);
      current = "";
    } else {
      current += ch;
    }
  }
  fields.push(current);
  return fields;
}

export function parseCsv(text: string): CsvTable {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  let comment: string | null = null;
  let start = 0;
  if (lines.length > 0 && lines[0].startsWith("#")) {
    comment = lines[0];
    start = 1;
  }
  if (lines.length <= start) {
    return { comment, columns: [], rows: [] };
  }
  const columns = splitLine(lines[start]);
  const rows = lines.slice(start + 1).map((line) => {
    const cells = splitLine(line);
    const row: Record<string, string> = {};
    columns.forEach((c, i) => {
      row[c] = cells[i] ?? "";
    });
    return row;
  });
  return { comment, columns, rows };
}

/** Group rows by a column, preserving first-seen order of the keys. */
export function groupBy(
  rows: Record<string, string>[],
  column: string,
): Map<string, Record<string, string>[]> {
  const out = new Map<string, Record<string, string>[]>();
  for (const row of rows) {
    const key = row[column];
    const bucket = out.get(key);
    if (bucket) {
      bucket.push(row);
    } else {
      out.set(key, [row]);
    }
  }
  return out;
}
