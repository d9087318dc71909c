/**
 * Deterministic SVG assembly: pure string building with fixed number
 * formatting, so identical inputs reproduce identical bytes.
 */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const r = Math.round(x * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

export interface Attrs {
  [key: string]: string | number;
}

function attrs(a: Attrs): string {
  return Object.keys(a)
    .sort()
    .map((k) => ` ${k}="${a[k]}"`)
    .join("");
}

export function el(tag: string, a: Attrs, body = ""): string {
  return body === ""
    ? `<${tag}${attrs(a)}/>`
    : `<${tag}${attrs(a)}>${body}</${tag}>`;
}

export function text(x: number, y: number, body: string, a: Attrs = {}): string {
  return el(
    "text",
    { x: fmt(x), y: fmt(y), "font-family": "monospace", "font-size": 11, ...a },
    body,
  );
}

export function line(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  a: Attrs = {},
): string {
  return el("line", {
    x1: fmt(x1),
    y1: fmt(y1),
    x2: fmt(x2),
    y2: fmt(y2),
    stroke: "#444",
    "stroke-width": 1,
    ...a,
  });
}

export function circle(cx: number, cy: number, r: number, a: Attrs = {}): string {
  return el("circle", { cx: fmt(cx), cy: fmt(cy), r: fmt(r), ...a });
}

export function polyline(points: Array<[number, number]>, a: Attrs = {}): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return el("polyline", { points: pts, fill: "none", ...a });
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    `<rect width="${width}" height="${height}" fill="#ffffff"/>\n` +
    body +
    "\n</svg>\n"
  );
}

/** Logarithmic axis mapping with decade ticks. */
export class LogScale {
  readonly lo: number;
  readonly hi: number;
  readonly a: number;
  readonly b: number;

  constructor(values: number[], pixLo: number, pixHi: number, pad = 0.08) {
    const pos = values.filter((v) => v > 0);
    if (pos.length === 0) {
      throw new Error("log scale needs at least one positive value");
    }
    let lo = Math.log10(Math.min(...pos));
    let hi = Math.log10(Math.max(...pos));
    if (hi - lo < 1e-9) {
      lo -= 0.5;
      hi += 0.5;
    }
    const span = hi - lo;
    lo -= pad * span;
    hi += pad * span;
    this.lo = lo;
    this.hi = hi;
    this.a = (pixHi - pixLo) / (hi - lo);
    this.b = pixLo - this.a * lo;
  }

  map(v: number): number {
    return this.a * Math.log10(v) + this.b;
  }

  ticks(): number[] {
    const out: number[] = [];
    for (let d = Math.ceil(this.lo); d <= Math.floor(this.hi); d++) {
      out.push(Math.pow(10, d));
    }
    if (out.length < 2) {
      out.length = 0;
      out.push(Math.pow(10, this.lo), Math.pow(10, this.hi));
    }
    return out;
  }
}

export function tickLabel(v: number): string {
  const d = Math.log10(v);
  if (Number.isInteger(d)) return d === 0 ? "1" : `1e${d}`;
  return v.toExponential(1);
}
