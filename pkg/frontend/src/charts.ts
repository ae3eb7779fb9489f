import * as fs from "fs";
import { num } from "./csv";
import {
    DominantRecord,
    readCrossings,
    readDominantVsU,
    readFrequencies,
    readInitialEnergy,
    readScan,
    readTimeseries,
} from "./schemas";
import { Panel, Svg, color, drawAxes, linearScale } from "./svg";

export type FigureKind = "spectral_flow" | "timeseries" | "freq_amp";

export interface PlotJob {
    inputDir: string;
    kind: FigureKind;
    output: string;
    xlim?: [number, number];
    ylim?: [number, number];
}

const WEIGHT_PANEL_FLOOR = 0.05;

function groupBy<T>(items: T[], key: (item: T) => number): Map<number, T[]> {
    const out = new Map<number, T[]>();
    for (const item of items) {
        const k = key(item);
        const bucket = out.get(k);
        if (bucket) bucket.push(item);
        else out.set(k, [item]);
    }
    return out;
}

function extent(values: number[]): [number, number] {
    let lo = Infinity;
    let hi = -Infinity;
    for (const v of values) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    return [lo, hi];
}

function pad([lo, hi]: [number, number], fraction: number): [number, number] {
    const span = hi - lo || Math.abs(hi) || 1;
    return [lo - fraction * span, hi + fraction * span];
}

// ---------------------------------------------------------------------------
// spectral flow (level diagram + initial-state weight panel)

export function plotSpectralFlow(job: PlotJob): string {
    const scan = readScan(job.inputDir);
    const initial = readInitialEnergy(job.inputDir);
    let crossings: { u: number; gap: number }[] = [];
    try {
        crossings = readCrossings(job.inputDir);
    } catch {
        crossings = []; // crossings file is optional for this figure
    }

    const branches = groupBy(scan, (r) => r.branch);
    const uDomain = job.xlim ?? extent(scan.map((r) => r.u));
    const initByU = new Map(initial.map((p) => [p.u, p.e]));
    const eDomain =
        job.ylim ??
        (initial.length
            ? pad(extent(initial.map((p) => p.e)), 0.35)
            : pad(extent(scan.map((r) => r.energy)), 0.05));

    const width = 760;
    const insetRow = crossings.length > 0 && crossings.length <= 6;
    const mainTop = 34;
    const mainHeight = 330;
    const insetTop = mainTop + mainHeight + 28;
    const insetHeight = insetRow ? 130 : 0;
    const weightTop = insetTop + (insetRow ? insetHeight + 36 : 8);
    const weightHeight = 150;
    const height = weightTop + weightHeight + 54;
    const svg = new Svg(width, height);

    const main: Panel = {
        left: 78, top: mainTop, width: width - 110, height: mainHeight,
        x: linearScale(uDomain, [78, width - 32]),
        y: linearScale(eDomain, [mainTop + mainHeight, mainTop]),
    };
    svg.text(width / 2, 18, "Energy levels vs interaction strength", {
        "text-anchor": "middle", "font-size": 14,
    });
    svg.clipPath("main-clip", main.left, main.top, main.width, main.height);
    drawAxes(svg, main, "U L", "E L^2");

    svg.openGroup({ "clip-path": "url(#main-clip)" });
    for (const [, rows] of branches) {
        rows.sort((a, b) => a.u - b.u);
        svg.polyline(rows.map((r) => [main.x(r.u), main.y(r.energy)]),
            { stroke: "#000", "stroke-width": 0.8, opacity: 0.85 });
    }
    if (initial.length) {
        initial.sort((a, b) => a.u - b.u);
        svg.polyline(initial.map((p) => [main.x(p.u), main.y(p.e)]),
            { stroke: "#d62728", "stroke-width": 1.8 });
    }
    for (const c of crossings) {
        const e = interpolateInitial(initial, c.u);
        const wBox = (uDomain[1] - uDomain[0]) * 0.03;
        const hBox = (eDomain[1] - eDomain[0]) * 0.08;
        svg.rect(main.x(c.u - wBox), main.y(e + hBox),
            main.x(c.u + wBox) - main.x(c.u - wBox),
            main.y(e - hBox) - main.y(e + hBox),
            { fill: "none", stroke: "#2ca02c", "stroke-width": 1.4 });
    }
    svg.closeGroup();

    if (insetRow) {
        drawCrossingInsets(svg, scan, initial, crossings, insetTop, insetHeight, width);
    }

    const weightPanel: Panel = {
        left: 78, top: weightTop, width: width - 110, height: weightHeight,
        x: linearScale(uDomain, [78, width - 32]),
        y: linearScale([0, 1], [weightTop + weightHeight, weightTop]),
    };
    drawAxes(svg, weightPanel, "U L", "weight");
    svg.clipPath("weight-clip", weightPanel.left, weightPanel.top,
        weightPanel.width, weightPanel.height);
    svg.openGroup({ "clip-path": "url(#weight-clip)" });
    for (const [branch, rows] of branches) {
        if (Math.max(...rows.map((r) => r.weight)) < WEIGHT_PANEL_FLOOR) continue;
        rows.sort((a, b) => a.u - b.u);
        svg.polyline(rows.map((r) => [weightPanel.x(r.u), weightPanel.y(r.weight)]),
            { stroke: color(branch), "stroke-width": 1.4 });
    }
    svg.closeGroup();
    return svg.render();
}

function interpolateInitial(initial: { u: number; e: number }[], u: number): number {
    if (!initial.length) return 0;
    let best = initial[0];
    for (const p of initial) {
        if (Math.abs(p.u - u) < Math.abs(best.u - u)) best = p;
    }
    return best.e;
}

function drawCrossingInsets(
    svg: Svg,
    scan: ReturnType<typeof readScan>,
    initial: { u: number; e: number }[],
    crossings: { u: number; gap: number }[],
    top: number,
    height: number,
    width: number,
): void {
    const n = crossings.length;
    const gapPx = 14;
    const insetWidth = (width - 110 - gapPx * (n - 1)) / n;
    const us = [...new Set(scan.map((r) => r.u))].sort((a, b) => a - b);
    const du = us.length > 1 ? us[1] - us[0] : 1;
    crossings.forEach((c, idx) => {
        const left = 78 + idx * (insetWidth + gapPx);
        const eCenter = interpolateInitial(initial, c.u);
        const uSpan: [number, number] = [c.u - 4 * du, c.u + 4 * du];
        const eSpan: [number, number] = [
            eCenter - Math.max(6 * c.gap, 2e-4),
            eCenter + Math.max(6 * c.gap, 2e-4),
        ];
        const panel: Panel = {
            left, top, width: insetWidth, height,
            x: linearScale(uSpan, [left, left + insetWidth]),
            y: linearScale(eSpan, [top + height, top]),
        };
        const clipId = `inset-${idx}`;
        svg.clipPath(clipId, left, top, insetWidth, height);
        svg.rect(left, top, insetWidth, height,
            { fill: "none", stroke: "#2ca02c", "stroke-width": 1.2 });
        svg.openGroup({ "clip-path": `url(#${clipId})` });
        for (const [, rows] of groupBy(scan, (r) => r.branch)) {
            const local = rows
                .filter((r) => r.u >= uSpan[0] - du && r.u <= uSpan[1] + du)
                .sort((a, b) => a.u - b.u);
            svg.polyline(local.map((r) => [panel.x(r.u), panel.y(r.energy)]),
                { stroke: "#000", "stroke-width": 0.9 });
        }
        svg.closeGroup();
        svg.text(left + insetWidth / 2, top + height + 14,
            `U = ${Number(c.u.toPrecision(3))}`,
            { "text-anchor": "middle", "font-size": 10 });
    });
}

// ---------------------------------------------------------------------------
// time series (occupation probabilities + dominant-beat reconstruction)

export function plotTimeseries(job: PlotJob): string {
    const rows = readTimeseries(job.inputDir);
    const frequencies = readFrequencies(job.inputDir);
    const t = rows.map((r) => num(r, "t"));
    const curves: [string, string, number[]][] = [
        ["P0", "#9467bd", rows.map((r) => num(r, "P0"))],
        ["P1", "#2ca02c", rows.map((r) => num(r, "P1"))],
        ["P2", "#1f77b4", rows.map((r) => num(r, "P2"))],
        ["N_L", "#d62728", rows.map((r) => num(r, "N_L"))],
    ];
    const dominantComponents = frequencies
        .filter((r) => r["dominant_flag"] === "1")
        .map((r) => ({ omega: num(r, "omega"), amplitude: num(r, "A") }));
    const reconstruction = t.map((time) =>
        dominantComponents.reduce(
            (acc, c) => acc + c.amplitude * Math.cos(c.omega * time), 0.5));

    const width = 760;
    const height = 430;
    const svg = new Svg(width, height);
    const panel: Panel = {
        left: 78, top: 40, width: width - 110, height: height - 110,
        x: linearScale(job.xlim ?? extent(t), [78, width - 32]),
        y: linearScale(job.ylim ?? [0, 1.05], [height - 70, 40]),
    };
    svg.text(width / 2, 20, "Left-well occupation probabilities", {
        "text-anchor": "middle", "font-size": 14,
    });
    drawAxes(svg, panel, "t / L^2", "probability");
    svg.clipPath("ts-clip", panel.left, panel.top, panel.width, panel.height);
    svg.openGroup({ "clip-path": "url(#ts-clip)" });
    for (const [, stroke, values] of curves) {
        svg.polyline(t.map((time, i) => [panel.x(time), panel.y(values[i])]),
            { stroke, "stroke-width": 1.4 });
    }
    svg.polyline(t.map((time, i) => [panel.x(time), panel.y(reconstruction[i])]),
        { stroke: "#000", "stroke-width": 1.2, "stroke-dasharray": "6 4" });
    svg.closeGroup();

    let lx = panel.left + 10;
    for (const [label, stroke] of [...curves.map((c) => [c[0], c[1]] as [string, string]),
                                   ["dominant beats", "#000"] as [string, string]]) {
        svg.line(lx, 30, lx + 18, 30, {
            stroke, "stroke-width": 1.6,
            ...(label === "dominant beats" ? { "stroke-dasharray": "6 4" } : {}),
        });
        svg.text(lx + 22, 33, label, { "font-size": 10 });
        lx += 30 + label.length * 6;
    }
    return svg.render();
}

// ---------------------------------------------------------------------------
// dominant frequencies and stacked amplitudes vs strength

export function stackHeights(records: DominantRecord[]): Map<number, number> {
    const heights = new Map<number, number>();
    for (const r of records) {
        if (r.amplitude > 0) {
            heights.set(r.u, (heights.get(r.u) ?? 0) + r.amplitude);
        }
    }
    return heights;
}

export function plotFreqAmp(job: PlotJob): string {
    const records = readDominantVsU(job.inputDir);
    const uValues = [...new Set(records.map((r) => r.u))].sort((a, b) => a - b);
    const du = uValues.length > 1 ? uValues[1] - uValues[0] : 1;
    const uDomain = job.xlim ?? pad(extent(records.map((r) => r.u)), 0.02);

    const width = 760;
    const height = 560;
    const svg = new Svg(width, height);
    const topPanel: Panel = {
        left: 78, top: 36, width: width - 110, height: 210,
        x: linearScale(uDomain, [78, width - 32]),
        y: linearScale(pad(extent(records.map((r) => r.omega)), 0.08),
            [36 + 210, 36]),
    };
    svg.text(width / 2, 18, "Dominant beat frequencies and amplitudes", {
        "text-anchor": "middle", "font-size": 14,
    });
    drawAxes(svg, topPanel, "", "omega L^2");
    svg.clipPath("freq-clip", topPanel.left, topPanel.top, topPanel.width, topPanel.height);
    svg.openGroup({ "clip-path": "url(#freq-clip)" });
    for (const [component, rows] of groupBy(records, (r) => r.component)) {
        rows.sort((a, b) => a.u - b.u);
        for (const r of rows) {
            svg.circle(topPanel.x(r.u), topPanel.y(r.omega), 2, { fill: color(component) });
        }
        // join contiguous strengths so each component reads as a curve
        let segment: [number, number][] = [];
        let prevU = NaN;
        for (const r of rows) {
            if (segment.length && r.u - prevU > 1.5 * du) {
                svg.polyline(segment, { stroke: color(component), "stroke-width": 1 });
                segment = [];
            }
            segment.push([topPanel.x(r.u), topPanel.y(r.omega)]);
            prevU = r.u;
        }
        svg.polyline(segment, { stroke: color(component), "stroke-width": 1 });
    }
    svg.closeGroup();

    const bottomPanel: Panel = {
        left: 78, top: 300, width: width - 110, height: 200,
        x: linearScale(uDomain, [78, width - 32]),
        y: linearScale([0, 0.55], [300 + 200, 300]),
    };
    drawAxes(svg, bottomPanel, "U L", "A_k (stacked)");
    svg.line(bottomPanel.left, bottomPanel.y(0.5), bottomPanel.left + bottomPanel.width,
        bottomPanel.y(0.5), { stroke: "#999", "stroke-width": 0.8, "stroke-dasharray": "3 3" });
    const barWidth = Math.max(
        bottomPanel.x(uValues[0] + 0.8 * du) - bottomPanel.x(uValues[0]), 1.0);
    for (const [u, rows] of groupBy(records, (r) => r.u)) {
        let base = 0;
        for (const r of rows.slice().sort((a, b) => a.component - b.component)) {
            if (r.amplitude <= 0) continue; // sign-flagged beats are not stackable
            const y0 = bottomPanel.y(base);
            const y1 = bottomPanel.y(base + r.amplitude);
            svg.rect(bottomPanel.x(u) - barWidth / 2, y1, barWidth, y0 - y1,
                { fill: color(r.component), stroke: "none" });
            base += r.amplitude;
        }
    }
    return svg.render();
}

// ---------------------------------------------------------------------------

export function renderJob(job: PlotJob): string {
    const figure =
        job.kind === "spectral_flow" ? plotSpectralFlow(job)
        : job.kind === "timeseries" ? plotTimeseries(job)
        : plotFreqAmp(job);
    fs.writeFileSync(job.output, figure);
    return job.output;
}
