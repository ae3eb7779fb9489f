/** Minimal SVG scene builder: enough shapes for line charts and bar stacks. */

function esc(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

function fmt(value: number): string {
    return Number(value.toFixed(3)).toString();
}

export type Attrs = Record<string, string | number>;

function attrString(attrs: Attrs): string {
    return Object.entries(attrs)
        .map(([key, value]) => `${key}="${value}"`)
        .join(" ");
}

export class Svg {
    private parts: string[] = [];
    private defs: string[] = [];

    constructor(readonly width: number, readonly height: number) {}

    line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs): void {
        this.parts.push(
            `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ${attrString(attrs)}/>`);
    }

    polyline(points: [number, number][], attrs: Attrs): void {
        if (points.length < 2) return;
        const joined = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
        this.parts.push(`<polyline points="${joined}" fill="none" ${attrString(attrs)}/>`);
    }

    rect(x: number, y: number, w: number, h: number, attrs: Attrs): void {
        this.parts.push(
            `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(Math.max(w, 0))}" height="${fmt(Math.max(h, 0))}" ${attrString(attrs)}/>`);
    }

    circle(cx: number, cy: number, r: number, attrs: Attrs): void {
        this.parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" ${attrString(attrs)}/>`);
    }

    text(x: number, y: number, content: string, attrs: Attrs = {}): void {
        const merged: Attrs = { "font-family": "sans-serif", "font-size": 11, ...attrs };
        this.parts.push(`<text x="${fmt(x)}" y="${fmt(y)}" ${attrString(merged)}>${esc(content)}</text>`);
    }

    clipPath(id: string, x: number, y: number, w: number, h: number): void {
        this.defs.push(
            `<clipPath id="${id}"><rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}"/></clipPath>`);
    }

    openGroup(attrs: Attrs): void {
        this.parts.push(`<g ${attrString(attrs)}>`);
    }

    closeGroup(): void {
        this.parts.push("</g>");
    }

    render(): string {
        return [
            `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
            `<rect x="0" y="0" width="${this.width}" height="${this.height}" fill="white"/>`,
            this.defs.length ? `<defs>${this.defs.join("")}</defs>` : "",
            ...this.parts,
            "</svg>",
            "",
        ].join("\n");
    }
}

export interface Scale {
    (value: number): number;
    domain: [number, number];
    range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
    const [d0, d1] = domain;
    const [r0, r1] = range;
    const span = d1 - d0 || 1;
    const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
    scale.domain = domain;
    scale.range = range;
    return scale;
}

/** Round tick positions covering [lo, hi], in the d3 "nice ticks" spirit. */
export function ticks(lo: number, hi: number, count = 6): number[] {
    if (!(hi > lo)) return [lo];
    const rawStep = (hi - lo) / Math.max(count, 1);
    const magnitude = Math.pow(10, Math.floor(Math.log10(rawStep)));
    const residual = rawStep / magnitude;
    const step = magnitude * (residual >= 5 ? 10 : residual >= 2 ? 5 : residual >= 1 ? 2 : 1);
    const start = Math.ceil(lo / step) * step;
    const out: number[] = [];
    for (let v = start; v <= hi + 1e-12 * step; v += step) {
        out.push(Number(v.toPrecision(12)));
    }
    return out;
}

export function tickLabel(value: number): string {
    if (value === 0) return "0";
    const magnitude = Math.abs(value);
    if (magnitude >= 0.01 && magnitude < 10000) {
        return Number(value.toPrecision(6)).toString();
    }
    return value.toExponential(1);
}

export interface Panel {
    x: Scale;
    y: Scale;
    left: number;
    top: number;
    width: number;
    height: number;
}

export function drawAxes(
    svg: Svg,
    panel: Panel,
    xLabel: string,
    yLabel: string,
    options: { xTicks?: boolean } = {},
): void {
    const { left, top, width, height, x, y } = panel;
    const bottom = top + height;
    svg.rect(left, top, width, height, { fill: "none", stroke: "#000", "stroke-width": 1 });
    for (const tx of ticks(x.domain[0], x.domain[1])) {
        svg.line(x(tx), bottom, x(tx), bottom - 4, { stroke: "#000", "stroke-width": 1 });
        if (options.xTicks !== false) {
            svg.text(x(tx), bottom + 14, tickLabel(tx), { "text-anchor": "middle" });
        }
    }
    for (const ty of ticks(y.domain[0], y.domain[1])) {
        svg.line(left, y(ty), left + 4, y(ty), { stroke: "#000", "stroke-width": 1 });
        svg.text(left - 6, y(ty) + 3, tickLabel(ty), { "text-anchor": "end", "font-size": 10 });
    }
    if (xLabel) {
        svg.text(left + width / 2, bottom + 30, xLabel, { "text-anchor": "middle", "font-size": 12 });
    }
    if (yLabel) {
        svg.text(left - 52, top + height / 2, yLabel, {
            "text-anchor": "middle",
            "font-size": 12,
            transform: `rotate(-90 ${left - 52} ${top + height / 2})`,
        });
    }
}

export const PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];

export function color(index: number): string {
    return PALETTE[((index % PALETTE.length) + PALETTE.length) % PALETTE.length];
}
