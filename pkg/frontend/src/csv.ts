import * as fs from "fs";
import * as path from "path";

/** Raised when an input file does not match its expected schema exactly. */
export class SchemaError extends Error {
    constructor(message: string) {
        super(message);
        this.name = "SchemaError";
    }
}

export type Row = Record<string, string>;

/**
 * Read a CSV written by the simulator: single header row, comma separation,
 * no quoting. The header must match the expected columns exactly; anything
 * else is a schema error, never a silent reinterpretation.
 */
export function readCsv(filePath: string, expectedHeader: string[]): Row[] {
    if (!fs.existsSync(filePath)) {
        throw new SchemaError(`missing input file: ${filePath}`);
    }
    const text = fs.readFileSync(filePath, "utf-8");
    const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
    if (lines.length === 0) {
        throw new SchemaError(`empty input file: ${filePath}`);
    }
    const header = lines[0].split(",");
    if (header.length !== expectedHeader.length
        || header.some((name, i) => name !== expectedHeader[i])) {
        throw new SchemaError(
            `${path.basename(filePath)}: header [${header.join(",")}] does not match `
            + `expected [${expectedHeader.join(",")}]`);
    }
    return lines.slice(1).map((line, lineno) => {
        const cells = line.split(",");
        if (cells.length !== expectedHeader.length) {
            throw new SchemaError(
                `${path.basename(filePath)}:${lineno + 2}: expected `
                + `${expectedHeader.length} cells, found ${cells.length}`);
        }
        const row: Row = {};
        expectedHeader.forEach((name, i) => (row[name] = cells[i]));
        return row;
    });
}

export function num(row: Row, column: string): number {
    const value = Number(row[column]);
    if (Number.isNaN(value)) {
        throw new SchemaError(`non-numeric value ${row[column]!} in column ${column}`);
    }
    return value;
}
