/* tslint:disable */
/* eslint-disable */

export class DoubleSlit {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Histogram of `points` as a density, next to the exact bin-averaged |ψ(t)|².
     */
    compare_histogram(points: Float64Array, t: number, bins: number): Float64Array;
    density(t: number): Float64Array;
    fringe_spacing(): number;
    /**
     * Closed-form dark fringes on the grid at time t.
     */
    minima(t: number): Float64Array;
    /**
     * Grid spans the envelope at the screen with 6σ to spare and resolves σ/20.
     */
    constructor(separation: number, slit_width: number, screen_time: number);
    /**
     * Paths from |ψ(0)|² to the screen, with or without the Wiener term.
     */
    paths(n_paths: number, n_steps: number, noise: boolean, seed: bigint): Paths;
    xs(): Float64Array;
}

/**
 * A Gaussian packet in a harmonic well, advanced by the Crank–Nicolson solver.
 */
export class Packet {
    free(): void;
    [Symbol.dispose](): void;
    advance(steps: number): void;
    density(): Float64Array;
    energy(): number;
    mean_position(): number;
    constructor(center: number, width: number, momentum: number, omega: number, dt: number);
    norm(): number;
    phi_c(): Float64Array;
    phi_r(): Float64Array;
    time(): number;
    xs(): Float64Array;
}

export class Paths {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    endpoints(): Float64Array;
    /**
     * Row-major: all paths at the first recorded time, then the next.
     */
    positions(): Float64Array;
    reflections(): number;
    times(): Float64Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_doubleslit_free: (a: number, b: number) => void;
    readonly __wbg_packet_free: (a: number, b: number) => void;
    readonly __wbg_paths_free: (a: number, b: number) => void;
    readonly doubleslit_compare_histogram: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly doubleslit_density: (a: number, b: number) => [number, number, number, number];
    readonly doubleslit_fringe_spacing: (a: number) => number;
    readonly doubleslit_minima: (a: number, b: number) => [number, number];
    readonly doubleslit_new: (a: number, b: number, c: number) => [number, number, number];
    readonly doubleslit_paths: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly doubleslit_xs: (a: number) => [number, number];
    readonly packet_advance: (a: number, b: number) => [number, number];
    readonly packet_density: (a: number) => [number, number];
    readonly packet_energy: (a: number) => number;
    readonly packet_mean_position: (a: number) => number;
    readonly packet_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly packet_norm: (a: number) => number;
    readonly packet_phi_c: (a: number) => [number, number];
    readonly packet_phi_r: (a: number) => [number, number];
    readonly packet_time: (a: number) => number;
    readonly packet_xs: (a: number) => [number, number];
    readonly paths_endpoints: (a: number) => [number, number];
    readonly paths_positions: (a: number) => [number, number];
    readonly paths_reflections: (a: number) => number;
    readonly paths_times: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
