/** Deterministic SVG assembly: same data in, same bytes out. */

import { FigureKind, KINDS, Series } from "./figures";
import { fmt, fmtPix, makeScale } from "./scale";
import {
  FALLBACK_COLORS,
  FONT,
  HEIGHT,
  MARGIN,
  RECEIVER_DASH,
  SCHEME_COLORS,
  TITLE_FONT,
  WIDTH,
} from "./style";

export function renderSvg(kind: FigureKind, series: Series[], title: string): string {
  const spec = KINDS[kind];
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  if (xs.length === 0) {
    throw new Error("nothing to draw: every series is empty");
  }
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const sx = makeScale(spec.xScale, Math.min(...xs), Math.max(...xs), x0, x1);
  const sy = makeScale(spec.yScale, Math.min(...ys), Math.max(...ys), y0, y1);

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  out.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  out.push(
    `<text x="${(x0 + x1) / 2}" y="16" text-anchor="middle" ` +
    `style="font:${TITLE_FONT}">${escapeXml(title)}</text>`,
  );

  // gridlines + ticks
  for (const t of sx.ticks) {
    const px = fmtPix(sx.toPixel(t));
    out.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y1}" stroke="#dddddd"/>`);
    out.push(
      `<text x="${px}" y="${y0 + 16}" text-anchor="middle" style="font:${FONT}">` +
      `${fmt(t)}</text>`,
    );
  }
  for (const t of sy.ticks) {
    const py = fmtPix(sy.toPixel(t));
    out.push(`<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="#dddddd"/>`);
    out.push(
      `<text x="${x0 - 6}" y="${py}" text-anchor="end" dominant-baseline="middle" ` +
      `style="font:${FONT}">${fmt(t)}</text>`,
    );
  }
  out.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" ` +
    `fill="none" stroke="#333333"/>`);
  out.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 14}" text-anchor="middle" ` +
    `style="font:${FONT}">${escapeXml(spec.xLabel)}</text>`,
  );
  out.push(
    `<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" style="font:${FONT}" ` +
    `transform="rotate(-90 18 ${(y0 + y1) / 2})">${escapeXml(spec.yLabel)}</text>`,
  );

  // series lines and markers
  let fallback = 0;
  series.forEach((s, idx) => {
    const color =
      SCHEME_COLORS[s.scheme] ?? FALLBACK_COLORS[fallback++ % FALLBACK_COLORS.length];
    const dash = RECEIVER_DASH[s.receiver] ?? "";
    const pts = s.points
      .map((p) => `${fmtPix(sx.toPixel(p.x))},${fmtPix(sy.toPixel(p.y))}`)
      .join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    out.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.6"${dashAttr}/>`,
    );
    for (const p of s.points) {
      out.push(
        `<circle cx="${fmtPix(sx.toPixel(p.x))}" cy="${fmtPix(sy.toPixel(p.y))}" ` +
        `r="2.6" fill="${color}"/>`,
      );
    }
    // legend entry
    const ly = y1 + 14 + idx * 16;
    const lx = x1 - 190;
    out.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" ` +
      `stroke="${color}" stroke-width="1.6"${dashAttr}/>`,
    );
    out.push(
      `<text x="${lx + 32}" y="${ly}" style="font:${FONT}">${escapeXml(s.key)}</text>`,
    );
  });

  out.push("</svg>");
  return out.join("\n") + "\n";
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
