/**
 * Hand-rolled SVG line charts. No canvas, no DOM: the output is a plain
 * markup string, so tests can count series and markers directly and the
 * bytes are deterministic for identical input.
 */

export interface SeriesPoint {
  x: number;
  y: number;
  err: number;
}

export interface Series {
  name: string;
  points: SeriesPoint[];
}

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  logy: boolean;
  series: Series[];
}

export const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
];

const FIG_W = 980;
const FIG_H = 430;
const MARGIN = { top: 58, right: 18, bottom: 52, left: 72 };

interface Tick {
  v: number;
  label: string;
}

function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e5 || a < 1e-3) {
    return v.toExponential(0).replace("e+", "e");
  }
  // strip accumulated float dust from step multiples
  return String(parseFloat(v.toPrecision(10)));
}

function linearTicks(lo: number, hi: number, want = 5): Tick[] {
  const span = hi - lo;
  const raw = span / Math.max(1, want);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  const out: Tick[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push({ v, label: tickLabel(v) });
  }
  return out;
}

function logTicks(lo: number, hi: number): Tick[] {
  const out: Tick[] = [];
  const kLo = Math.ceil(Math.log10(lo) - 1e-9);
  const kHi = Math.floor(Math.log10(hi) + 1e-9);
  for (let k = kLo; k <= kHi; k++) {
    out.push({ v: Math.pow(10, k), label: tickLabel(Math.pow(10, k)) });
  }
  if (out.length >= 2) {
    return out;
  }
  // under a decade of range: fall back to 1-2-5 within it
  const fine: Tick[] = [];
  for (let k = Math.floor(Math.log10(lo)); k <= kHi + 1; k++) {
    for (const m of [1, 2, 5]) {
      const v = m * Math.pow(10, k);
      if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) {
        fine.push({ v, label: tickLabel(v) });
      }
    }
  }
  return fine.length >= 2 ? fine : out;
}

interface Scale {
  (v: number): number;
  ticks: Tick[];
}

function linearScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  if (lo === hi) {
    const pad = Math.max(1, Math.abs(lo) * 0.1);
    lo -= pad;
    hi += pad;
  } else {
    const pad = (hi - lo) * 0.06;
    lo -= pad;
    hi += pad;
  }
  const f = ((v: number) =>
    rLo + ((v - lo) / (hi - lo)) * (rHi - rLo)) as Scale;
  f.ticks = linearTicks(lo, hi);
  return f;
}

function logScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  if (lo === hi) {
    lo /= 2;
    hi *= 2;
  } else {
    const pad = Math.pow(hi / lo, 0.06);
    lo /= pad;
    hi *= pad;
  }
  const la = Math.log10(lo);
  const lb = Math.log10(hi);
  const f = ((v: number) =>
    rLo + ((Math.log10(Math.max(v, lo)) - la) / (lb - la)) * (rHi - rLo)) as Scale;
  f.ticks = logTicks(lo, hi);
  return f;
}

function fx(v: number): string {
  return v.toFixed(2);
}

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderPanel(panel: Panel, x0: number, width: number): string {
  const plotX = x0 + MARGIN.left;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotY = MARGIN.top;
  const plotH = FIG_H - MARGIN.top - MARGIN.bottom;

  const xs: number[] = [];
  const yLo: number[] = [];
  const yHi: number[] = [];
  for (const s of panel.series) {
    for (const p of s.points) {
      xs.push(p.x);
      yHi.push(p.y + p.err);
      if (panel.logy) {
        yLo.push(p.y - p.err > 0 ? p.y - p.err : p.y);
      } else {
        yLo.push(p.y - p.err);
      }
    }
  }
  const sx = linearScale(
    Math.min(...xs),
    Math.max(...xs),
    plotX,
    plotX + plotW,
  );
  const sy = panel.logy
    ? logScale(Math.min(...yLo), Math.max(...yHi), plotY + plotH, plotY)
    : linearScale(Math.min(...yLo), Math.max(...yHi), plotY + plotH, plotY);

  const clampY = (v: number) =>
    Math.min(plotY + plotH, Math.max(plotY, sy(v)));

  const parts: string[] = [];
  parts.push(`<g class="panel">`);
  parts.push(
    `<rect x="${fx(plotX)}" y="${fx(plotY)}" width="${fx(plotW)}" height="${fx(
      plotH,
    )}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  parts.push(
    `<text class="title" x="${fx(plotX + plotW / 2)}" y="${fx(
      plotY - 10,
    )}" text-anchor="middle" font-size="13">${esc(panel.title)}</text>`,
  );

  for (const t of sx.ticks) {
    const px = sx(t.v);
    if (px < plotX - 0.5 || px > plotX + plotW + 0.5) continue;
    parts.push(
      `<line x1="${fx(px)}" y1="${fx(plotY + plotH)}" x2="${fx(px)}" y2="${fx(
        plotY + plotH + 5,
      )}" stroke="#333"/>`,
    );
    parts.push(
      `<text x="${fx(px)}" y="${fx(
        plotY + plotH + 18,
      )}" text-anchor="middle" font-size="10">${esc(t.label)}</text>`,
    );
  }
  for (const t of sy.ticks) {
    const py = sy(t.v);
    if (py < plotY - 0.5 || py > plotY + plotH + 0.5) continue;
    parts.push(
      `<line x1="${fx(plotX - 5)}" y1="${fx(py)}" x2="${fx(plotX)}" y2="${fx(
        py,
      )}" stroke="#333"/>`,
    );
    parts.push(
      `<line x1="${fx(plotX)}" y1="${fx(py)}" x2="${fx(plotX + plotW)}" y2="${fx(
        py,
      )}" stroke="#ddd" stroke-width="0.5"/>`,
    );
    parts.push(
      `<text x="${fx(plotX - 8)}" y="${fx(
        py + 3.5,
      )}" text-anchor="end" font-size="10">${esc(t.label)}</text>`,
    );
  }
  parts.push(
    `<text x="${fx(plotX + plotW / 2)}" y="${fx(
      FIG_H - 12,
    )}" text-anchor="middle" font-size="12">${esc(panel.xLabel)}</text>`,
  );
  parts.push(
    `<text x="${fx(x0 + 18)}" y="${fx(plotY + plotH / 2)}" text-anchor="middle" ` +
      `font-size="12" transform="rotate(-90 ${fx(x0 + 18)} ${fx(
        plotY + plotH / 2,
      )})">${esc(panel.yLabel)}</text>`,
  );

  panel.series.forEach((series, si) => {
    const color = PALETTE[si % PALETTE.length];
    const pts = [...series.points].sort((a, b) => a.x - b.x);
    for (const p of pts) {
      if (p.err <= 0) continue;
      const px = sx(p.x);
      const lo = clampY(p.y - p.err);
      const hi = clampY(p.y + p.err);
      parts.push(
        `<line class="errbar" x1="${fx(px)}" y1="${fx(lo)}" x2="${fx(
          px,
        )}" y2="${fx(hi)}" stroke="${color}" stroke-width="1"/>`,
      );
      for (const end of [lo, hi]) {
        parts.push(
          `<line class="errcap" x1="${fx(px - 3.5)}" y1="${fx(end)}" x2="${fx(
            px + 3.5,
          )}" y2="${fx(end)}" stroke="${color}" stroke-width="1"/>`,
        );
      }
    }
    const coords = pts.map((p) => `${fx(sx(p.x))},${fx(clampY(p.y))}`);
    parts.push(
      `<polyline class="series" data-name="${esc(series.name)}" ` +
        `points="${coords.join(" ")}" fill="none" stroke="${color}" stroke-width="1.5"/>`,
    );
    for (const p of pts) {
      parts.push(
        `<circle class="marker" cx="${fx(sx(p.x))}" cy="${fx(
          clampY(p.y),
        )}" r="3" fill="${color}"/>`,
      );
    }
  });

  parts.push(`</g>`);
  return parts.join("\n");
}

/** Assemble the full figure: one panel per entry, shared legend on top. */
export function renderFigure(panels: Panel[]): string {
  const names: string[] = [];
  for (const panel of panels) {
    for (const s of panel.series) {
      if (!names.includes(s.name)) {
        names.push(s.name);
      }
    }
  }
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${FIG_W}" height="${FIG_H}" ` +
      `viewBox="0 0 ${FIG_W} ${FIG_H}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(
    `<rect x="0" y="0" width="${FIG_W}" height="${FIG_H}" fill="#ffffff"/>`,
  );

  const itemW = 110;
  let lx = FIG_W / 2 - (names.length * itemW) / 2;
  names.forEach((name, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(
      `<g class="legend"><line x1="${fx(lx)}" y1="16" x2="${fx(
        lx + 22,
      )}" y2="16" stroke="${color}" stroke-width="2"/>` +
        `<text x="${fx(lx + 28)}" y="20" font-size="12">${esc(name)}</text></g>`,
    );
    lx += itemW;
  });

  const panelW = FIG_W / panels.length;
  panels.forEach((panel, i) => {
    parts.push(renderPanel(panel, i * panelW, panelW));
  });
  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}
