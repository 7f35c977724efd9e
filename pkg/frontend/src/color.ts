/**
 * The single piece of client-side numerical computation: the linear
 * blue-to-red color interpolation. Everything else shown in the viewer
 * is taken verbatim from API payloads.
 */

export type Rgb = [number, number, number];

export const MISSING_GRAY: Rgb = [128, 128, 128];

/** hue 240(1-t) at full saturation, 50% lightness; NaN is 50% gray and a
 * degenerate scale maps everything to the mid hue. */
export function colorFor(value: number, min: number, max: number): Rgb {
  if (Number.isNaN(value)) {
    return MISSING_GRAY;
  }
  let t: number;
  if (max === min) {
    t = 0.5;
  } else {
    t = Math.min(1, Math.max(0, (value - min) / (max - min)));
  }
  const hue = 240 * (1 - t);
  return hslToRgb(hue / 360, 1.0, 0.5);
}

function hslToRgb(h: number, s: number, l: number): Rgb {
  const q = l < 0.5 ? l * (1 + s) : l + s - l * s;
  const p = 2 * l - q;
  const channel = (tc: number): number => {
    if (tc < 0) tc += 1;
    if (tc > 1) tc -= 1;
    if (tc < 1 / 6) return p + (q - p) * 6 * tc;
    if (tc < 1 / 2) return q;
    if (tc < 2 / 3) return p + (q - p) * (2 / 3 - tc) * 6;
    return p;
  };
  return [
    Math.round(channel(h + 1 / 3) * 255),
    Math.round(channel(h) * 255),
    Math.round(channel(h - 1 / 3) * 255),
  ];
}

export function css(rgb: Rgb): string {
  return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
}

/** Fixed palettes mirroring the server's renderer; a lookup, not a computation. */
export const ASSEMBLY_TYPE_COLORS: Record<string, string> = {
  fuel: "#3cb44b",
  control_bank: "#ffe119",
  incore_instrument: "#911eb4",
  rod_cluster: "#f58231",
  control: "#ffd711",
  reflector: "#a9a9a9",
  shield: "#469990",
  test: "#42d4f4",
};

export const ROD_KIND_COLORS: Record<string, string> = {
  fuel: "#e6194b",
  control: "#4363d8",
  poison: "#911eb4",
  empty: "#d3d3d3",
  reflector: "#3cb44b",
};

export const SERIES_COLORS = [
  "#e6194b",
  "#4363d8",
  "#3cb44b",
  "#f58231",
  "#911eb4",
  "#469990",
];

export function ringColor(material: string, phase: string): string {
  if (phase === "gas") return "#ffe119";
  if (phase === "liquid") return "#9fc5e8";
  const name = material.toLowerCase();
  if (name.includes("fuel") || name.includes("uo2") || name.includes("u-zr")) {
    return "#e6194b";
  }
  if (name.includes("clad") || name.includes("zirc") || name.includes("steel")) {
    return "#3cb44b";
  }
  return "#9e9e9e";
}
