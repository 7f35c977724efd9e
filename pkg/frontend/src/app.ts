/**
 * Viewer application: core map -> assembly -> pin drill-down plus a
 * side-by-side comparison screen.
 *
 * Every value shown comes verbatim from an API payload; the client only
 * interpolates colors. Navigation mutates ViewerState, mirrors it into
 * the URL hash (deep links restore the exact view) and re-renders.
 * Fetches go through LatestFetcher so stale responses are discarded.
 */

import {
  ApiClient,
  ApiError,
  type AssemblyResponse,
  type FileDescriptor,
  type ReactorDescriptor,
  type RodResponse,
  type ToolResult,
  LatestFetcher,
} from "./api.js";
import { ViewerState } from "./state.js";
import { assemblySvg, coreSvg, plotSvg, ringsSvg } from "./render.js";

export interface WindowLike {
  location: { hash: string };
  history: { replaceState(data: unknown, title: string, url?: string): void };
}

function option(value: string, selected: boolean, label?: string): string {
  return `<option value="${value}"${selected ? " selected" : ""}>${label ?? value}</option>`;
}

export class App {
  state = new ViewerState();
  files: FileDescriptor[] = [];
  reactors = new Map<string, ReactorDescriptor[]>();
  lastAssembly: AssemblyResponse | null = null;
  lastRod: RodResponse | null = null;
  lastCompare: ToolResult | null = null;
  compareError = "";
  fetchCount = 0;

  private fetcher = new LatestFetcher();
  private queue: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly win: WindowLike,
  ) {
    this.root.addEventListener("click", (event) => this.onClick(event));
    this.root.addEventListener("change", (event) => this.onFieldChange(event));
    this.root.addEventListener("input", (event) => this.onFieldChange(event));
  }

  whenIdle(): Promise<void> {
    return this.queue;
  }

  private enqueue(action: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(action, action);
    return this.queue;
  }

  async boot(): Promise<void> {
    await this.enqueue(async () => {
      this.state = ViewerState.fromHash(this.win.location.hash);
      this.files = (await this.api.files()).files;
      if (!this.state.file && this.files.length) {
        this.state.file = this.files[0].id;
      }
      if (!this.state.reactor && this.files.length) {
        const file = this.files.find((f) => f.id === this.state.file);
        this.state.reactor = file?.reactors[0] ?? "";
      }
      await this.render();
    });
    return this.whenIdle();
  }

  navigate(mutate: (state: ViewerState) => void): Promise<void> {
    return this.enqueue(async () => {
      mutate(this.state);
      this.syncHash();
      await this.render();
    });
  }

  private syncHash(): void {
    this.win.history.replaceState(null, "", this.state.toHash() || "#");
  }

  // ------------------------------------------------------------------ events

  private onClick(event: Event): void {
    const target = (event.target as Element | null)?.closest?.("[data-action]");
    if (!target) return;
    const action = target.getAttribute("data-action");
    const num = (name: string): number => Number(target.getAttribute(name) ?? -1);
    switch (action) {
      case "select-cell":
        void this.navigate((s) => {
          s.screen = "assembly";
          s.row = num("data-row");
          s.col = num("data-col");
          s.level = 1;
          s.feature = "";
          s.mode = "data";
        });
        break;
      case "flash-cell":
        target.classList.add("flash");
        setTimeout(() => target.classList.remove("flash"), 300);
        break;
      case "select-pin":
        void this.navigate((s) => {
          s.screen = "pin";
          s.pinRow = num("data-row");
          s.pinCol = num("data-col");
        });
        break;
      case "strip-level":
        void this.navigate((s) => {
          s.level = num("data-level");
        });
        break;
      case "back-core":
        void this.navigate((s) => {
          s.screen = "core";
        });
        break;
      case "back-assembly":
        void this.navigate((s) => {
          s.screen = "assembly";
        });
        break;
      case "go-compare":
        void this.navigate((s) => {
          s.screen = "compare";
          if (!s.compare.inputFile) {
            s.compare.inputFile = s.file;
            s.compare.inputReactor = s.reactor;
            s.compare.refFile = s.file;
            s.compare.refReactor = s.reactor;
          }
        });
        break;
      case "run-compare":
        void this.runCompare();
        break;
      default:
        break;
    }
  }

  private onFieldChange(event: Event): void {
    const target = event.target as HTMLInputElement | HTMLSelectElement | null;
    const field = target?.getAttribute?.("data-field");
    if (!target || !field) return;
    const value = target.value;
    switch (field) {
      case "file":
        void this.navigate((s) => {
          s.file = value;
          s.reactor = this.files.find((f) => f.id === value)?.reactors[0] ?? "";
          s.screen = "core";
        });
        break;
      case "reactor":
        void this.navigate((s) => {
          s.reactor = value;
          s.screen = "core";
        });
        break;
      case "type":
        void this.navigate((s) => {
          s.type = value;
        });
        break;
      case "mode":
        void this.navigate((s) => {
          s.mode = value as "geometry" | "data";
        });
        break;
      case "feature":
        void this.navigate((s) => {
          s.feature = value;
          s.level = 1;
        });
        break;
      case "norm":
        // pure recolor: the payload already carries every scope's scale
        this.state.norm = value as ViewerState["norm"];
        this.syncHash();
        this.recolorAssembly();
        break;
      case "level-slider":
      case "level-spinner":
        void this.navigate((s) => {
          s.level = Math.max(1, Math.trunc(Number(value) || 1));
        });
        break;
      case "cInFile":
      case "cInReactor":
      case "cRefFile":
      case "cRefReactor":
      case "cFeature":
      case "cPins": {
        const key = {
          cInFile: "inputFile",
          cInReactor: "inputReactor",
          cRefFile: "refFile",
          cRefReactor: "refReactor",
          cFeature: "feature",
          cPins: "pins",
        }[field] as keyof ViewerState["compare"];
        this.state.compare[key] = value;
        this.syncHash();
        break;
      }
      default:
        break;
    }
  }

  // ----------------------------------------------------------------- screens

  private async render(): Promise<void> {
    try {
      switch (this.state.screen) {
        case "core":
          await this.renderCore();
          break;
        case "assembly":
          await this.renderAssembly();
          break;
        case "pin":
          await this.renderPin();
          break;
        case "compare":
          await this.renderCompare();
          break;
      }
    } catch (error) {
      this.toast(error);
    }
  }

  private headerHtml(): string {
    const fileOptions = this.files
      .map((f) => option(f.id, f.id === this.state.file, `${f.id}: ${f.path}`))
      .join("");
    const file = this.files.find((f) => f.id === this.state.file);
    const reactorOptions = (file?.reactors ?? [])
      .map((name) => option(name, name === this.state.reactor))
      .join("");
    return (
      `<header>` +
      `<label>file <select data-field="file">${fileOptions}</select></label>` +
      `<label>reactor <select data-field="reactor">${reactorOptions}</select></label>` +
      `<button data-action="go-compare">compare</button>` +
      `</header>`
    );
  }

  private async describe(fid: string): Promise<ReactorDescriptor[]> {
    const cached = this.reactors.get(fid);
    if (cached) return cached;
    const described = (await this.track(this.api.reactors(fid))).reactors;
    this.reactors.set(fid, described);
    return described;
  }

  private track<T>(promise: Promise<T>): Promise<T> {
    this.fetchCount += 1;
    return promise;
  }

  private async renderCore(): Promise<void> {
    const descriptors = await this.describe(this.state.file);
    const reactor = descriptors.find((r) => r.name === this.state.reactor);
    if (!reactor) {
      this.root.innerHTML = this.headerHtml() + `<p>no reactor selected</p>`;
      return;
    }
    if (!reactor.grid_types.includes(this.state.type)) {
      this.state.type = reactor.grid_types[0];
    }
    const core = await this.fetcher.fetch(
      "core",
      `${this.state.file}/${this.state.reactor}/${this.state.type}`,
      () => this.track(this.api.core(this.state.file, this.state.reactor, this.state.type)),
    );
    if (core === null) return; // a newer request superseded this one
    const typeOptions = reactor.grid_types
      .map((t) => option(t, t === this.state.type))
      .join("");
    this.root.innerHTML =
      this.headerHtml() +
      `<h2>${reactor.name} (${reactor.type})</h2>` +
      `<label>assembly type <select data-field="type">${typeOptions}</select></label>` +
      `<div id="core-view">${coreSvg(core)}</div>` +
      `<div id="toasts"></div>`;
  }

  private assemblyChannelKey(): string {
    const s = this.state;
    return [s.file, s.reactor, s.type, s.row, s.col, s.feature, s.level].join("/");
  }

  private async renderAssembly(): Promise<void> {
    const payload = await this.fetcher.fetch("assembly", this.assemblyChannelKey(), () =>
      this.track(
        this.api.assembly(
          this.state.file,
          this.state.reactor,
          this.state.type,
          this.state.row,
          this.state.col,
          {
            level: this.state.level,
            feature: this.state.feature || undefined,
            norm: this.state.norm,
          },
        ),
      ),
    );
    if (payload === null) return;
    this.lastAssembly = payload;
    if (payload.feature && !this.state.feature) {
      this.state.feature = payload.feature;
      this.syncHash();
    }
    const featureOptions = payload.features
      .map((f) => option(f, f === (this.state.feature || payload.feature)))
      .join("");
    const norms: Array<[ViewerState["norm"], string]> = [
      ["selected_level", "selected level"],
      ["whole_assembly", "whole assembly"],
      ["all_assemblies", "all assemblies"],
    ];
    const normRadios = norms
      .map(
        ([value, label]) =>
          `<label><input type="radio" name="norm" data-field="norm" value="${value}"` +
          `${this.state.norm === value ? " checked" : ""}> ${label}</label>`,
      )
      .join(" ");
    const cellLabel =
      (payload.labels.rows[this.state.row] ?? "") +
      (payload.labels.cols[this.state.col] ?? "");
    this.root.innerHTML =
      this.headerHtml() +
      `<button data-action="back-core">&larr; core</button>` +
      `<h2>${payload.name} (${payload.type})</h2>` +
      `<div class="controls">` +
      `<label>view <select data-field="mode">` +
      option("geometry", this.state.mode === "geometry") +
      option("data", this.state.mode === "data") +
      `</select></label>` +
      `<label>feature <select data-field="feature">${featureOptions}</select></label>` +
      `<fieldset id="norm">${normRadios}</fieldset>` +
      `<label>level <input type="range" data-field="level-slider" min="1" ` +
      `max="${Math.max(payload.levels, 1)}" value="${payload.level}"></label>` +
      `<input type="number" data-field="level-spinner" min="1" ` +
      `max="${Math.max(payload.levels, 1)}" value="${payload.level}">` +
      `</div>` +
      `<div id="assembly-view" data-cell="${cellLabel}"></div>` +
      `<div id="toasts"></div>`;
    this.paintAssembly();
  }

  /** Repaint the grid from the cached payload; no network involved. */
  private recolorAssembly(): void {
    if (this.state.screen === "assembly" && this.lastAssembly) {
      this.paintAssembly();
    }
  }

  private paintAssembly(): void {
    const payload = this.lastAssembly;
    const view = this.root.querySelector("#assembly-view");
    if (!payload || !view) return;
    const scale = payload.scales ? (payload.scales[this.state.norm] ?? null) : null;
    view.innerHTML = assemblySvg(payload, this.state.mode, scale);
  }

  private async renderPin(): Promise<void> {
    const payload = await this.fetcher.fetch(
      "rod",
      `${this.state.file}/${this.state.reactor}/${this.state.type}/` +
        `${this.state.row}/${this.state.col}/${this.state.pinRow}/${this.state.pinCol}`,
      () =>
        this.track(
          this.api.rod(
            this.state.file,
            this.state.reactor,
            this.state.type,
            this.state.row,
            this.state.col,
            this.state.pinRow,
            this.state.pinCol,
          ),
        ),
    );
    if (payload === null) return;
    this.lastRod = payload;
    const feature = this.state.feature || payload.series[0]?.feature || "";
    const active = payload.series.find((s) => s.feature === feature) ?? payload.series[0];
    const points: Array<[number, number]> = (active?.points ?? [])
      .filter((p): p is [number, number, number] => p[1] !== null)
      .map((p) => [p[0], p[1]]);
    // cross-section at the z of the selected level, else mid-height
    const z =
      active && active.points.length >= this.state.level
        ? active.points[this.state.level - 1][0]!
        : payload.blocks.length
          ? (payload.blocks[0].z_start + payload.height / 2)
          : 0;
    this.root.innerHTML =
      this.headerHtml() +
      `<button data-action="back-assembly">&larr; assembly</button>` +
      `<h2>pin ${payload.label}: ${payload.name} (${payload.kind})</h2>` +
      `<div id="pin-section" data-rings="${
        payload.blocks.find((b) => b.z_start <= z && z < b.z_end)?.rings.length ?? 0
      }">${ringsSvg(payload, z)}</div>` +
      `<div id="pin-plot">${
        active
          ? plotSvg(
              [{ name: active.feature, points }],
              "height from pin bottom (cm)",
              active.feature,
            )
          : "<p>no data stored on this pin</p>"
      }</div>` +
      `<div id="toasts"></div>`;
  }

  private async renderCompare(): Promise<void> {
    const c = this.state.compare;
    const selector = (fileField: string, reactorField: string, fid: string, rname: string): string => {
      const fileOptions = this.files
        .map((f) => option(f.id, f.id === fid))
        .join("");
      const file = this.files.find((f) => f.id === fid);
      const reactorOptions = (file?.reactors ?? [])
        .map((name) => option(name, name === rname))
        .join("");
      return (
        `<select data-field="${fileField}">${fileOptions}</select>` +
        `<select data-field="${reactorField}">${reactorOptions}</select>`
      );
    };
    const plot = this.lastCompare
      ? plotSvg(
          Object.entries(this.lastCompare.series).map(([name, pts]) => ({
            name,
            points: pts
              .filter((p): p is [number, number] => p[1] !== null)
              .map((p) => [p[0], p[1]] as [number, number]),
          })),
          "height from pin bottom (cm)",
          "difference (%)",
        )
      : "";
    this.root.innerHTML =
      this.headerHtml() +
      `<button data-action="back-core">&larr; core</button>` +
      `<h2>compare</h2>` +
      `<div class="controls">` +
      `<label>input ${selector("cInFile", "cInReactor", c.inputFile, c.inputReactor)}</label>` +
      `<label>reference ${selector("cRefFile", "cRefReactor", c.refFile, c.refReactor)}</label>` +
      `<label>feature <input data-field="cFeature" value="${c.feature}"></label>` +
      `<label>pins <input data-field="cPins" value="${c.pins}" placeholder="B2,E4,H7"></label>` +
      `<button data-action="run-compare">run pin_diff</button>` +
      `</div>` +
      `<div id="compare-error">${this.compareError}</div>` +
      `<div id="compare-plot">${plot}</div>` +
      `<div id="toasts"></div>`;
  }

  private runCompare(): Promise<void> {
    return this.enqueue(async () => {
      const c = this.state.compare;
      this.compareError = "";
      try {
        this.lastCompare = await this.track(
          this.api.runTool(
            "pin_diff",
            [
              { file: c.inputFile, reactor: c.inputReactor, assembly_def: 0 },
              { file: c.refFile, reactor: c.refReactor, assembly_def: 0 },
            ],
            { feature: c.feature, pins: c.pins },
          ),
        );
      } catch (error) {
        this.lastCompare = null;
        this.compareError =
          error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
      }
      await this.render();
    });
  }

  private toast(error: unknown): void {
    const message =
      error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
    const holder = this.root.querySelector("#toasts") ?? this.root;
    const div = this.root.ownerDocument.createElement("div");
    div.className = "toast";
    div.textContent = message;
    holder.appendChild(div);
    setTimeout(() => div.remove(), 4000);
  }
}
