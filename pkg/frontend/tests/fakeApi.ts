/**
 * In-memory stand-in for the JSON API, shaped exactly like the server's
 * payloads. One file (f0) holding one PWR with a 3x3 fuel assembly at
 * the core center; pin values follow value(r, c, level) = pin * level
 * with pin = r*3 + c + 1, so every expectation is computable in tests.
 */

export const LEVELS = 49;
export const SIZE = 3;

export function pinValue(
  row: number,
  col: number,
  level: number,
  feature = "Axial Power",
): number {
  const base = (row * SIZE + col + 1) * level;
  return feature === "Total Power" ? base + 5000 : base;
}

export function assemblyPayload(level: number, norm: string, feature = "Axial Power") {
  const values: number[][] = [];
  for (let r = 0; r < SIZE; r++) {
    const rowValues: number[] = [];
    for (let c = 0; c < SIZE; c++) rowValues.push(pinValue(r, c, level, feature));
    values.push(rowValues);
  }
  const scales = {
    selected_level: {
      min: pinValue(0, 0, level, feature),
      max: pinValue(2, 2, level, feature),
    },
    whole_assembly: {
      min: pinValue(0, 0, 1, feature),
      max: pinValue(2, 2, LEVELS, feature),
    },
    all_assemblies: {
      min: pinValue(0, 0, 1, feature),
      max: pinValue(2, 2, LEVELS, feature),
    },
  } as Record<string, { min: number; max: number }>;
  const scale = scales[norm] ?? scales.selected_level;
  return {
    schema_version: 1,
    reactor: "pwr_3a",
    type: "fuel",
    name: "fa3",
    size: SIZE,
    reactor_type: "PWR",
    rod_pitch: 1.26,
    labels: { rows: ["A", "B", "C"], cols: ["1", "2", "3"] },
    features: ["Axial Power", "Total Power"],
    occupied: Array.from({ length: SIZE }, () => Array(SIZE).fill(true)),
    kinds: Array.from({ length: SIZE }, () => Array(SIZE).fill("fuel")),
    feature,
    level,
    levels: LEVELS,
    norm,
    time: 0.0,
    times: [0.0],
    scale: { ...scale, scope: norm },
    scales,
    values,
  };
}

function rodPayload(prow: number, pcol: number) {
  const points: Array<[number, number, number]> = [];
  for (let k = 1; k <= LEVELS; k++) {
    points.push([k * 2.0, pinValue(prow, pcol, k), 0.0]);
  }
  return {
    schema_version: 1,
    name: "fuel_rod",
    kind: "fuel",
    pressure: 2.25,
    height: 100.0,
    label: ["A", "B", "C"][prow] + String(pcol + 1),
    blocks: [
      {
        z_start: 0.0,
        z_end: 100.0,
        rings: [
          { material: "UO2 fuel", phase: "solid", inner_radius: 0, outer_radius: 0.41, height: 100 },
          { material: "helium fill gas", phase: "gas", inner_radius: 0.41, outer_radius: 0.42, height: 100 },
          { material: "zircaloy clad", phase: "solid", inner_radius: 0.42, outer_radius: 0.48, height: 100 },
        ],
      },
    ],
    series: [{ feature: "Axial Power", time: 0.0, points }],
  };
}

function corePayload(type: string) {
  const cells: Array<Array<{ def: number; name: string } | null>> = [
    [null, null, null],
    [null, null, null],
    [null, null, null],
  ];
  if (type === "fuel") {
    cells[1][1] = { def: 0, name: "fa3" };
  } else if (type === "control_bank") {
    for (let r = 0; r < 3; r++) {
      for (let c = 0; c < 3; c++) {
        if (r !== 1 || c !== 1) cells[r][c] = { def: 1, name: "bank" };
      }
    }
  }
  return {
    schema_version: 1,
    reactor: "pwr_3a",
    type,
    reactor_type: "PWR",
    size: 3,
    pitch: 21.5,
    labels: { rows: ["A", "B", "C"], cols: ["1", "2", "3"] },
    cells,
  };
}

const FILES = {
  schema_version: 1,
  files: [{ id: "f0", path: "3a.nrdf", bytes: 1234, reactors: ["pwr_3a"] }],
};

const DESCRIPTOR = {
  schema_version: 1,
  id: "f0",
  reactors: [
    {
      name: "pwr_3a",
      type: "PWR",
      size: 3,
      assembly_pitch: 21.5,
      lattice_pitch: null,
      flat_to_flat: null,
      units: ["W/cm"],
      labels: { rows: ["A", "B", "C"], cols: ["1", "2", "3"] },
      rod_defs: ["fuel_rod"],
      assembly_defs: [
        {
          index: 0,
          name: "fa3",
          type: "fuel",
          size: SIZE,
          rod_pitch: 1.26,
          pins: 9,
          features: { "Axial Power": { times: [0.0], levels: LEVELS } },
          labels: { rows: ["A", "B", "C"], cols: ["1", "2", "3"] },
        },
      ],
      grid_types: ["fuel", "control_bank", "incore_instrument", "rod_cluster"],
    },
  ],
};

export interface FakeApiOptions {
  /** force POST /api/tools/pin_diff to fail with a 422 shape error */
  shapeError?: boolean;
  /** per-URL-substring artificial delay in ms */
  delays?: Record<string, number>;
}

export function makeFakeFetch(options: FakeApiOptions = {}) {
  const log: string[] = [];

  const json = (body: unknown, status = 200): Response =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });

  const route = (url: string, init?: RequestInit): Response => {
    const parsed = new URL(url, "http://localhost");
    const path = parsed.pathname;
    const q = parsed.searchParams;
    if (path === "/api/files") return json(FILES);
    if (path === "/api/reactors/f0") return json(DESCRIPTOR);
    if (path === "/api/reactors/f0/pwr_3a/core") {
      return json(corePayload(q.get("type") ?? "fuel"));
    }
    const assembly = path.match(/^\/api\/reactors\/f0\/pwr_3a\/assembly\/fuel\/1\/1$/);
    if (assembly) {
      const level = Number(q.get("level") ?? "1");
      if (level < 1 || level > LEVELS) {
        return json(
          { schema_version: 1, error: { code: "bad_param", message: `level ${level} outside 1..${LEVELS}` } },
          400,
        );
      }
      return json(
        assemblyPayload(
          level,
          q.get("norm") ?? "selected_level",
          q.get("feature") ?? "Axial Power",
        ),
      );
    }
    const rod = path.match(/^\/api\/reactors\/f0\/pwr_3a\/rod\/1\/1\/(\d+)\/(\d+)$/);
    if (rod) return json(rodPayload(Number(rod[1]), Number(rod[2])));
    if (path === "/api/tools/pin_diff" && init?.method === "POST") {
      if (options.shapeError) {
        return json(
          {
            schema_version: 1,
            error: {
              code: "shape_error",
              message: "pin B2: 49 levels in input, 10 in reference",
            },
          },
          422,
        );
      }
      const body = JSON.parse(String(init.body)) as {
        params: { pins: string };
      };
      const pins = body.params.pins.split(",").map((p) => p.trim()).filter(Boolean);
      const series: Record<string, Array<[number, number]>> = {};
      for (const pin of pins) {
        series[pin] = Array.from({ length: LEVELS }, (_, k) => [k * 2.0, 0.0]);
      }
      return json({
        schema_version: 1,
        result_id: "r0",
        tool: "pin_diff",
        created_at: "2026-08-09T00:00:00+00:00",
        auto_plot: true,
        tables: {},
        series,
      });
    }
    return json(
      { schema_version: 1, error: { code: "not_found", message: `no route ${path}` } },
      404,
    );
  };

  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    log.push(`${init?.method ?? "GET"} ${url}`);
    const delay = Object.entries(options.delays ?? {}).find(([needle]) =>
      url.includes(needle),
    )?.[1];
    if (delay) await new Promise((resolve) => setTimeout(resolve, delay));
    return route(url, init);
  };

  return { fetchFn, log };
}
