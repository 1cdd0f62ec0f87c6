export class EmptyCsv extends Error {
  constructor(path: string) {
    super(`no data rows in ${path}`);
    this.name = "EmptyCsv";
  }
}

export class MissingColumn extends Error {
  constructor(column: string, available: string[]) {
    super(`column '${column}' not in header [${available.join(", ")}]`);
    this.name = "MissingColumn";
  }
}
