/** SVG string builders for the viewer's grids, cross-sections and plots. */

import type { AssemblyResponse, CoreResponse, RodResponse, ScaleBounds } from "./api.js";
import {
  ASSEMBLY_TYPE_COLORS,
  ROD_KIND_COLORS,
  SERIES_COLORS,
  colorFor,
  css,
  ringColor,
} from "./color.js";

const SVG_NS = 'xmlns="http://www.w3.org/2000/svg"';

function fmt(x: number): string {
  const s = Number(x.toPrecision(6)).toString();
  return s === "-0" ? "0" : s;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function hexCenter(row: number, col: number, pitch: number): [number, number] {
  const radius = pitch / Math.sqrt(3);
  return [1.5 * radius * col, Math.sqrt(3) * radius * (row + col / 2)];
}

function hexPoints(cx: number, cy: number, radius: number): string {
  const pts: string[] = [];
  for (let i = 0; i < 6; i++) {
    const angle = (Math.PI / 3) * i;
    pts.push(`${fmt(cx + radius * Math.cos(angle))},${fmt(cy + radius * Math.sin(angle))}`);
  }
  return pts.join(" ");
}

function svgOpen(x0: number, y0: number, w: number, h: number, pxW: number): string {
  const pxH = Math.round((pxW * h) / w);
  return `<svg ${SVG_NS} width="${pxW}" height="${pxH}" viewBox="${fmt(x0)} ${fmt(y0)} ${fmt(w)} ${fmt(h)}">`;
}

function text(x: number, y: number, size: number, content: string): string {
  return (
    `<text x="${fmt(x)}" y="${fmt(y)}" font-family="sans-serif" ` +
    `font-size="${fmt(size)}" text-anchor="middle">${esc(content)}</text>`
  );
}

interface GridCell {
  row: number;
  col: number;
  fill: string;
  occupied: boolean;
  action: string;
  title?: string;
  value?: number | null;
}

function gridSvg(
  size: number,
  pitch: number,
  hexagonal: boolean,
  cells: GridCell[],
  labels: { rows: string[]; cols: string[] },
  extra = "",
  extraWidth = 0,
): string {
  const parts: string[] = [];
  const font = 0.35 * pitch;
  for (const cell of cells) {
    const data =
      `class="cell${cell.occupied ? " occupied" : " empty"}" ` +
      `data-action="${cell.action}" data-row="${cell.row}" data-col="${cell.col}"` +
      (cell.value !== undefined && cell.value !== null
        ? ` data-value="${cell.value}"`
        : "") +
      (cell.title ? `><title>${esc(cell.title)}</title` : "");
    if (hexagonal) {
      const [cx, cy] = hexCenter(cell.row, cell.col, pitch);
      const radius = (0.95 * pitch) / Math.sqrt(3);
      parts.push(
        `<polygon points="${hexPoints(cx, cy, radius)}" fill="${cell.fill}" ${data}></polygon>`,
      );
    } else {
      const x = cell.col * pitch + 0.04 * pitch;
      const y = cell.row * pitch + 0.04 * pitch;
      parts.push(
        `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(0.92 * pitch)}" ` +
          `height="${fmt(0.92 * pitch)}" fill="${cell.fill}" ${data}></rect>`,
      );
    }
  }
  for (let row = 0; row < size; row++) {
    const [cx, cy] = hexagonal
      ? hexCenter(row, 0, pitch)
      : [0.5 * pitch, (row + 0.5) * pitch];
    parts.push(text(cx - pitch, cy + font / 3, font, labels.rows[row] ?? ""));
  }
  for (let col = 0; col < size; col++) {
    const [cx, cy] = hexagonal
      ? hexCenter(0, col, pitch)
      : [(col + 0.5) * pitch, 0.5 * pitch];
    parts.push(text(cx, cy - pitch, font, labels.cols[col] ?? ""));
  }
  let x0: number;
  let y0: number;
  let w: number;
  let h: number;
  if (hexagonal) {
    const centers: Array<[number, number]> = [];
    for (let r = 0; r < size; r++) {
      for (let c = 0; c < size; c++) centers.push(hexCenter(r, c, pitch));
    }
    const xs = centers.map((p) => p[0]);
    const ys = centers.map((p) => p[1]);
    x0 = Math.min(...xs) - 2 * pitch;
    y0 = Math.min(...ys) - 2 * pitch;
    w = Math.max(...xs) - Math.min(...xs) + 4 * pitch + extraWidth * pitch;
    h = Math.max(...ys) - Math.min(...ys) + 4 * pitch;
  } else {
    x0 = -1.5 * pitch;
    y0 = -1.5 * pitch;
    w = size * pitch + (3 + extraWidth) * pitch;
    h = size * pitch + 3 * pitch;
  }
  return [svgOpen(x0, y0, w, h, 560), ...parts, extra, "</svg>"].join("\n");
}

export function coreSvg(core: CoreResponse): string {
  const cells: GridCell[] = [];
  for (let row = 0; row < core.size; row++) {
    for (let col = 0; col < core.size; col++) {
      const cell = core.cells[row][col];
      cells.push({
        row,
        col,
        occupied: cell !== null,
        fill: cell ? (ASSEMBLY_TYPE_COLORS[core.type] ?? "#888888") : "#f2f2f2",
        action: cell ? "select-cell" : "flash-cell",
        title: cell ? cell.name : undefined,
      });
    }
  }
  return gridSvg(
    core.size,
    core.pitch,
    core.reactor_type === "SFR",
    cells,
    core.labels,
  );
}

export function axialStripSvg(
  x: number,
  height: number,
  levels: number,
  selected: number,
  width: number,
): string {
  const parts = [`<g class="axial-strip" data-levels="${levels}">`];
  const slot = height / levels;
  for (let k = 1; k <= levels; k++) {
    const y = height - k * slot;
    const fill = k === selected ? "#222222" : "#eeeeee";
    parts.push(
      `<rect class="level" data-action="strip-level" data-level="${k}" ` +
        `x="${fmt(x)}" y="${fmt(y)}" width="${fmt(width)}" ` +
        `height="${fmt(slot * 0.9)}" fill="${fill}" stroke="#999999" ` +
        `stroke-width="${fmt(width / 30)}"></rect>`,
    );
  }
  parts.push("</g>");
  return parts.join("\n");
}

export function assemblySvg(
  payload: AssemblyResponse,
  mode: "geometry" | "data",
  scale: ScaleBounds | null,
): string {
  const hexagonal = payload.reactor_type === "SFR";
  const pitch = payload.rod_pitch;
  const cells: GridCell[] = [];
  for (let row = 0; row < payload.size; row++) {
    for (let col = 0; col < payload.size; col++) {
      if (!payload.occupied[row][col]) continue;
      let fill: string;
      let value: number | null | undefined;
      if (mode === "data") {
        value = payload.values?.[row]?.[col] ?? null;
        fill =
          value === null || scale === null
            ? css(colorFor(Number.NaN, 0, 1))
            : css(colorFor(value, scale.min, scale.max));
      } else {
        const kind = payload.kinds[row][col];
        fill = (kind && ROD_KIND_COLORS[kind]) || "#888888";
      }
      cells.push({
        row,
        col,
        occupied: true,
        fill,
        action: "select-pin",
        value,
        title: payload.labels.rows[row] + payload.labels.cols[col],
      });
    }
  }
  let strip = "";
  let extraWidth = 0;
  if (payload.levels > 0) {
    extraWidth = 2.5;
    const stripX = hexagonal
      ? hexCenter(0, payload.size - 1, pitch)[0] + 1.5 * pitch
      : payload.size * pitch + pitch;
    const stripH = hexagonal
      ? hexCenter(payload.size - 1, payload.size - 1, pitch)[1] + pitch
      : payload.size * pitch;
    strip = axialStripSvg(stripX, stripH, payload.levels, payload.level, 0.8 * pitch);
  }
  return gridSvg(
    payload.size,
    pitch,
    hexagonal,
    cells,
    payload.labels,
    strip,
    extraWidth,
  );
}

export function ringsSvg(rod: RodResponse, z: number): string {
  const allOuter = rod.blocks.flatMap((b) => b.rings.map((r) => r.outer_radius));
  const outer = allOuter.length ? Math.max(...allOuter) : 1;
  const extent = 1.3 * outer;
  const parts = [svgOpen(-extent, -extent, 2 * extent, 2 * extent, 360)];
  const block = rod.blocks.find((b) => b.z_start <= z && z < b.z_end);
  if (!block) {
    parts.push(
      `<circle class="empty-section" cx="0" cy="0" r="${fmt(0.8 * outer)}" ` +
        `fill="none" stroke="#808080" stroke-width="${fmt(0.05 * outer)}" ` +
        `stroke-dasharray="${fmt(0.12 * outer)} ${fmt(0.08 * outer)}"></circle>`,
    );
  } else {
    for (const ring of [...block.rings].reverse()) {
      parts.push(
        `<circle class="ring" cx="0" cy="0" r="${fmt(ring.outer_radius)}" ` +
          `fill="${ringColor(ring.material, ring.phase)}">` +
          `<title>${esc(ring.material)}</title></circle>`,
      );
    }
    const innermost = block.rings[0];
    if (innermost && innermost.inner_radius > 0) {
      parts.push(
        `<circle class="bore" cx="0" cy="0" r="${fmt(innermost.inner_radius)}" ` +
          `fill="#ffffff"></circle>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("\n");
}

export interface PlotSeries {
  name: string;
  points: Array<[number, number]>;
}

export function plotSvg(series: PlotSeries[], xLabel: string, yLabel: string): string {
  const drawable = series.filter((s) => s.points.length > 0);
  if (drawable.length === 0) {
    return `<svg ${SVG_NS} width="600" height="120"><text x="300" y="60" text-anchor="middle" font-family="sans-serif">no data</text></svg>`;
  }
  const xs = drawable.flatMap((s) => s.points.map((p) => p[0]));
  const ys = drawable.flatMap((s) => s.points.map((p) => p[1]));
  const pad = (lo: number, hi: number): [number, number] =>
    lo === hi ? [lo - 1, hi + 1] : [lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo)];
  const [xLo, xHi] = pad(Math.min(...xs), Math.max(...xs));
  const [yLo, yHi] = pad(Math.min(...ys), Math.max(...ys));
  const width = 600;
  const height = 360;
  const left = 60;
  const right = 140;
  const top = 20;
  const bottom = 45;
  const plotW = width - left - right;
  const plotH = height - top - bottom;
  const px = (x: number): number => left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number): number => top + ((yHi - y) / (yHi - yLo)) * plotH;

  const parts = [svgOpen(0, 0, width, height, width)];
  parts.push(
    `<rect x="${left}" y="${top}" width="${plotW}" height="${plotH}" fill="none" stroke="#444444"></rect>`,
  );
  for (const frac of [0, 0.5, 1]) {
    const xv = xLo + frac * (xHi - xLo);
    const yv = yLo + frac * (yHi - yLo);
    parts.push(text(px(xv), top + plotH + 18, 11, fmt(xv)));
    parts.push(
      `<text x="${left - 6}" y="${fmt(py(yv) + 4)}" font-family="sans-serif" ` +
        `font-size="11" text-anchor="end">${fmt(yv)}</text>`,
    );
  }
  parts.push(text(left + plotW / 2, height - 10, 12, xLabel));
  parts.push(
    `<text x="14" y="${fmt(top + plotH / 2)}" font-family="sans-serif" font-size="12" ` +
      `text-anchor="middle" transform="rotate(-90 14 ${fmt(top + plotH / 2)})">${esc(yLabel)}</text>`,
  );
  drawable.forEach((s, i) => {
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    if (s.points.length === 1) {
      parts.push(
        `<circle class="series" data-name="${esc(s.name)}" cx="${fmt(px(s.points[0][0]))}" ` +
          `cy="${fmt(py(s.points[0][1]))}" r="3" fill="${color}"></circle>`,
      );
    } else {
      const coords = s.points.map((p) => `${fmt(px(p[0]))},${fmt(py(p[1]))}`).join(" ");
      parts.push(
        `<polyline class="series" data-name="${esc(s.name)}" points="${coords}" ` +
          `fill="none" stroke="${color}" stroke-width="1.5"></polyline>`,
      );
    }
    const ly = top + 12 + 18 * i;
    parts.push(
      `<line x1="${width - right + 10}" y1="${ly}" x2="${width - right + 30}" y2="${ly}" ` +
        `stroke="${color}" stroke-width="1.5"></line>`,
    );
    parts.push(
      `<text class="legend" x="${width - right + 36}" y="${ly + 4}" font-family="sans-serif" ` +
        `font-size="11">${esc(s.name)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n");
}
