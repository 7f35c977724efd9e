/**
 * Deep-linkable viewer state: everything needed to reproduce the current
 * view is encoded in the URL hash, so a reload (or a shared link)
 * restores it exactly.
 */

export type Screen = "core" | "assembly" | "pin" | "compare";
export type Norm = "selected_level" | "whole_assembly" | "all_assemblies";
export type AssemblyMode = "geometry" | "data";

export interface CompareSelection {
  inputFile: string;
  inputReactor: string;
  refFile: string;
  refReactor: string;
  feature: string;
  pins: string;
}

export class ViewerState {
  screen: Screen = "core";
  file = "";
  reactor = "";
  type = "fuel";
  row = -1;
  col = -1;
  pinRow = -1;
  pinCol = -1;
  level = 1;
  feature = "";
  norm: Norm = "selected_level";
  mode: AssemblyMode = "data";
  compare: CompareSelection = {
    inputFile: "",
    inputReactor: "",
    refFile: "",
    refReactor: "",
    feature: "",
    pins: "",
  };

  toHash(): string {
    const params = new URLSearchParams();
    const fields: Array<[string, string | number]> = [
      ["screen", this.screen],
      ["file", this.file],
      ["reactor", this.reactor],
      ["type", this.type],
      ["row", this.row],
      ["col", this.col],
      ["pinRow", this.pinRow],
      ["pinCol", this.pinCol],
      ["level", this.level],
      ["feature", this.feature],
      ["norm", this.norm],
      ["mode", this.mode],
      ["cInFile", this.compare.inputFile],
      ["cInReactor", this.compare.inputReactor],
      ["cRefFile", this.compare.refFile],
      ["cRefReactor", this.compare.refReactor],
      ["cFeature", this.compare.feature],
      ["cPins", this.compare.pins],
    ];
    const defaults = new ViewerState();
    const defaultMap = new Map(defaultsOf(defaults));
    for (const [key, value] of fields) {
      if (String(value) !== defaultMap.get(key)) {
        params.set(key, String(value));
      }
    }
    const text = params.toString();
    return text ? `#${text}` : "";
  }

  static fromHash(hash: string): ViewerState {
    const state = new ViewerState();
    const params = new URLSearchParams(hash.replace(/^#/, ""));
    const str = (key: string, fallback: string): string =>
      params.get(key) ?? fallback;
    const num = (key: string, fallback: number): number => {
      const raw = params.get(key);
      if (raw === null) return fallback;
      const parsed = Number(raw);
      return Number.isFinite(parsed) ? parsed : fallback;
    };
    const screen = str("screen", state.screen);
    if (["core", "assembly", "pin", "compare"].includes(screen)) {
      state.screen = screen as Screen;
    }
    state.file = str("file", state.file);
    state.reactor = str("reactor", state.reactor);
    state.type = str("type", state.type);
    state.row = num("row", state.row);
    state.col = num("col", state.col);
    state.pinRow = num("pinRow", state.pinRow);
    state.pinCol = num("pinCol", state.pinCol);
    state.level = Math.max(1, Math.trunc(num("level", state.level)));
    state.feature = str("feature", state.feature);
    const norm = str("norm", state.norm);
    if (["selected_level", "whole_assembly", "all_assemblies"].includes(norm)) {
      state.norm = norm as Norm;
    }
    const mode = str("mode", state.mode);
    if (mode === "geometry" || mode === "data") {
      state.mode = mode;
    }
    state.compare = {
      inputFile: str("cInFile", ""),
      inputReactor: str("cInReactor", ""),
      refFile: str("cRefFile", ""),
      refReactor: str("cRefReactor", ""),
      feature: str("cFeature", ""),
      pins: str("cPins", ""),
    };
    return state;
  }

  clone(): ViewerState {
    const copy = ViewerState.fromHash(this.toHash());
    return copy;
  }
}

function defaultsOf(state: ViewerState): Array<[string, string]> {
  return [
    ["screen", state.screen],
    ["file", state.file],
    ["reactor", state.reactor],
    ["type", state.type],
    ["row", String(state.row)],
    ["col", String(state.col)],
    ["pinRow", String(state.pinRow)],
    ["pinCol", String(state.pinCol)],
    ["level", String(state.level)],
    ["feature", state.feature],
    ["norm", state.norm],
    ["mode", state.mode],
    ["cInFile", ""],
    ["cInReactor", ""],
    ["cRefFile", ""],
    ["cRefReactor", ""],
    ["cFeature", ""],
    ["cPins", ""],
  ];
}
