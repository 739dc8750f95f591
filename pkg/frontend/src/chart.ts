// Posterior-vs-budget line chart, drawn as plain SVG. One series, a reference
// line at the 0.5 prior, nothing fancier.

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ChartOptions {
  width?: number;
  height?: number;
  pad?: number;
}

export function tracePoints(
  trace: number[],
  width: number,
  height: number,
  pad: number,
): Array<[number, number]> {
  const innerW = width - 2 * pad;
  const innerH = height - 2 * pad;
  const n = trace.length;
  const xAt = (i: number) => pad + (n <= 1 ? 0 : (i / (n - 1)) * innerW);
  const yAt = (p: number) => pad + (1 - p) * innerH;
  return trace.map((p, i) => [xAt(i), yAt(p)]);
}

export function traceChart(trace: number[], opts: ChartOptions = {}): SVGSVGElement {
  const width = opts.width ?? 420;
  const height = opts.height ?? 160;
  const pad = opts.pad ?? 14;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "trace-chart");
  svg.setAttribute("role", "img");
  svg.setAttribute("aria-label", `posterior over ${trace.length - 1} samples`);

  const frame = document.createElementNS(SVG_NS, "rect");
  frame.setAttribute("x", String(pad));
  frame.setAttribute("y", String(pad));
  frame.setAttribute("width", String(width - 2 * pad));
  frame.setAttribute("height", String(height - 2 * pad));
  frame.setAttribute("class", "chart-frame");
  svg.appendChild(frame);

  const points = tracePoints(trace, width, height, pad);
  const priorY = pad + 0.5 * (height - 2 * pad);
  const prior = document.createElementNS(SVG_NS, "line");
  prior.setAttribute("x1", String(pad));
  prior.setAttribute("x2", String(width - pad));
  prior.setAttribute("y1", String(priorY));
  prior.setAttribute("y2", String(priorY));
  prior.setAttribute("class", "chart-prior");
  svg.appendChild(prior);

  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute("points", points.map(([x, y]) => `${x},${y}`).join(" "));
  line.setAttribute("class", "chart-series");
  line.setAttribute("fill", "none");
  svg.appendChild(line);

  const final = document.createElementNS(SVG_NS, "text");
  final.setAttribute("x", String(width - pad - 4));
  final.setAttribute("y", String(Math.max(pad + 10, points[points.length - 1][1] - 6)));
  final.setAttribute("text-anchor", "end");
  final.setAttribute("class", "chart-final");
  final.textContent = trace[trace.length - 1].toFixed(3);
  svg.appendChild(final);

  return svg;
}
