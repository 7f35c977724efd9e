/** Typed client for the reactorkit JSON API. */

export interface FileDescriptor {
  id: string;
  path: string;
  bytes: number;
  reactors: string[];
}

export interface FeatureInfo {
  times: number[];
  levels: number;
}

export interface AssemblyDefDescriptor {
  index: number;
  name: string;
  type: string;
  size: number;
  rod_pitch: number;
  pins: number;
  features: Record<string, FeatureInfo>;
  labels: GridLabels;
}

export interface ReactorDescriptor {
  name: string;
  type: string;
  size: number;
  assembly_pitch: number | null;
  lattice_pitch: number | null;
  flat_to_flat: number | null;
  units: string[];
  labels: GridLabels;
  rod_defs: string[];
  assembly_defs: AssemblyDefDescriptor[];
  grid_types: string[];
}

export interface GridLabels {
  rows: string[];
  cols: string[];
}

export interface CoreCell {
  def: number;
  name: string;
}

export interface CoreResponse {
  reactor: string;
  type: string;
  reactor_type: string;
  size: number;
  pitch: number;
  labels: GridLabels;
  cells: Array<Array<CoreCell | null>>;
}

export interface ScaleBounds {
  min: number;
  max: number;
}

export interface AssemblyResponse {
  name: string;
  type: string;
  size: number;
  reactor_type: string;
  rod_pitch: number;
  labels: GridLabels;
  features: string[];
  occupied: boolean[][];
  kinds: Array<Array<string | null>>;
  feature: string | null;
  level: number;
  levels: number;
  norm: string;
  time: number | null;
  times: number[];
  scale: (ScaleBounds & { scope: string }) | null;
  scales: Record<string, ScaleBounds> | null;
  values: Array<Array<number | null>> | null;
}

export interface RingInfo {
  material: string;
  phase: string;
  inner_radius: number;
  outer_radius: number;
  height: number;
}

export interface RodResponse {
  name: string;
  kind: string;
  pressure: number | null;
  height: number;
  label: string;
  blocks: Array<{ z_start: number; z_end: number; rings: RingInfo[] }>;
  series: Array<{ feature: string; time: number; points: Array<Array<number | null>> }>;
}

export interface ToolDescriptor {
  name: string;
  enabled_by_default: boolean;
  n_assemblies: number;
  params: Array<{ name: string; type: string; default: unknown; choices: string[] }>;
}

export interface ToolResult {
  result_id: string;
  tool: string;
  created_at: string;
  auto_plot: boolean;
  tables: Record<
    string,
    { row_labels: string[]; col_labels: string[]; values: Array<Array<number | null>> }
  >;
  series: Record<string, Array<[number, number | null]>>;
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly code: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike,
    private readonly base = "",
  ) {}

  private async request<T>(url: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + url, init);
    if (!response.ok) {
      let code = "http_error";
      let message = `${response.status} on ${url}`;
      try {
        const body = (await response.json()) as {
          error?: { code?: string; message?: string };
        };
        if (body.error) {
          code = body.error.code ?? code;
          message = body.error.message ?? message;
        }
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(message, response.status, code);
    }
    return (await response.json()) as T;
  }

  files(): Promise<{ files: FileDescriptor[] }> {
    return this.request("/api/files");
  }

  reactors(fid: string): Promise<{ reactors: ReactorDescriptor[] }> {
    return this.request(`/api/reactors/${encodeURIComponent(fid)}`);
  }

  core(fid: string, reactor: string, type: string): Promise<CoreResponse> {
    return this.request(
      `/api/reactors/${encodeURIComponent(fid)}/${encodeURIComponent(reactor)}` +
        `/core?type=${encodeURIComponent(type)}`,
    );
  }

  assembly(
    fid: string,
    reactor: string,
    type: string,
    row: number,
    col: number,
    query: { level?: number; feature?: string; norm?: string; time?: number },
  ): Promise<AssemblyResponse> {
    const params = new URLSearchParams();
    if (query.level !== undefined) params.set("level", String(query.level));
    if (query.feature) params.set("feature", query.feature);
    if (query.norm) params.set("norm", query.norm);
    if (query.time !== undefined) params.set("time", String(query.time));
    const suffix = params.toString() ? `?${params.toString()}` : "";
    return this.request(
      `/api/reactors/${encodeURIComponent(fid)}/${encodeURIComponent(reactor)}` +
        `/assembly/${encodeURIComponent(type)}/${row}/${col}${suffix}`,
    );
  }

  rod(
    fid: string,
    reactor: string,
    type: string,
    arow: number,
    acol: number,
    prow: number,
    pcol: number,
  ): Promise<RodResponse> {
    return this.request(
      `/api/reactors/${encodeURIComponent(fid)}/${encodeURIComponent(reactor)}` +
        `/rod/${arow}/${acol}/${prow}/${pcol}?type=${encodeURIComponent(type)}`,
    );
  }

  tools(): Promise<{ tools: ToolDescriptor[] }> {
    return this.request("/api/tools");
  }

  runTool(
    name: string,
    assemblies: Array<Record<string, unknown>>,
    params: Record<string, unknown>,
  ): Promise<ToolResult> {
    return this.request(`/api/tools/${encodeURIComponent(name)}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ assemblies, params }),
    });
  }
}

/**
 * Per-channel latest-wins fetching: concurrent requests for the same key
 * share one promise, and a response that is no longer the newest for its
 * channel resolves to null so the caller can discard it.
 */
export class LatestFetcher {
  private seq = new Map<string, number>();
  private inflight = new Map<string, { key: string; promise: Promise<unknown> }>();

  fetch<T>(channel: string, key: string, load: () => Promise<T>): Promise<T | null> {
    const existing = this.inflight.get(channel);
    if (existing && existing.key === key) {
      return existing.promise as Promise<T | null>;
    }
    const id = (this.seq.get(channel) ?? 0) + 1;
    this.seq.set(channel, id);
    const promise = load().then(
      (data) => (this.seq.get(channel) === id ? data : null),
      (error) => {
        if (this.seq.get(channel) === id) throw error;
        return null; // stale failures are dropped too
      },
    );
    this.inflight.set(channel, { key, promise });
    const cleanup = (): void => {
      if (this.inflight.get(channel)?.promise === promise) {
        this.inflight.delete(channel);
      }
    };
    promise.then(cleanup, cleanup); // never rejects, no unhandled warning
    return promise;
  }
}
