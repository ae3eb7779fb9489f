#!/usr/bin/env node
/**
 * Render publication-style figures from a simulator run directory.
 *
 * Usage: doublewell-plot <kind> <run-dir> [-o out.svg] [--xlim a,b] [--ylim a,b]
 *   kind: spectral_flow | timeseries | freq_amp
 *
 * Output is SVG. Exit codes: 0 success, 2 usage or schema error.
 */

import { FigureKind, PlotJob, renderJob } from "./charts";
import { SchemaError } from "./csv";

const KINDS: FigureKind[] = ["spectral_flow", "timeseries", "freq_amp"];

function parseRange(raw: string, flag: string): [number, number] {
    const parts = raw.split(",").map(Number);
    if (parts.length !== 2 || parts.some(Number.isNaN)) {
        throw new SchemaError(`${flag} expects two comma-separated numbers, got ${raw}`);
    }
    return [parts[0], parts[1]];
}

export function parseArgs(argv: string[]): PlotJob {
    const positional: string[] = [];
    let output: string | undefined;
    let xlim: [number, number] | undefined;
    let ylim: [number, number] | undefined;
    for (let i = 0; i < argv.length; i++) {
        const arg = argv[i];
        if (arg === "-o" || arg === "--output") {
            output = argv[++i];
        } else if (arg === "--xlim") {
            xlim = parseRange(argv[++i], "--xlim");
        } else if (arg === "--ylim") {
            ylim = parseRange(argv[++i], "--ylim");
        } else if (arg.startsWith("-")) {
            throw new SchemaError(`unknown flag ${arg}`);
        } else {
            positional.push(arg);
        }
    }
    if (positional.length !== 2 || !KINDS.includes(positional[0] as FigureKind)) {
        throw new SchemaError(
            `usage: doublewell-plot <${KINDS.join("|")}> <run-dir> [-o out.svg]`);
    }
    const kind = positional[0] as FigureKind;
    if (output && !output.endsWith(".svg")) {
        throw new SchemaError(
            `output must be an .svg path (got ${output}); raster formats are not supported`);
    }
    return { kind, inputDir: positional[1], output: output ?? `${kind}.svg`, xlim, ylim };
}

export function main(argv: string[]): number {
    try {
        const job = parseArgs(argv);
        const written = renderJob(job);
        console.log(`wrote ${written}`);
        return 0;
    } catch (err) {
        if (err instanceof SchemaError) {
            console.error(`error: ${err.message}`);
            return 2;
        }
        throw err;
    }
}

if (require.main === module) {
    process.exit(main(process.argv.slice(2)));
}
