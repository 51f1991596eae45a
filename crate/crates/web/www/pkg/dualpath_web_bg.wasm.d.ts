/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_doubleslit_free: (a: number, b: number) => void;
export const __wbg_packet_free: (a: number, b: number) => void;
export const __wbg_paths_free: (a: number, b: number) => void;
export const doubleslit_compare_histogram: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const doubleslit_density: (a: number, b: number) => [number, number, number, number];
export const doubleslit_fringe_spacing: (a: number) => number;
export const doubleslit_minima: (a: number, b: number) => [number, number];
export const doubleslit_new: (a: number, b: number, c: number) => [number, number, number];
export const doubleslit_paths: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const doubleslit_xs: (a: number) => [number, number];
export const packet_advance: (a: number, b: number) => [number, number];
export const packet_density: (a: number) => [number, number];
export const packet_energy: (a: number) => number;
export const packet_mean_position: (a: number) => number;
export const packet_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const packet_norm: (a: number) => number;
export const packet_phi_c: (a: number) => [number, number];
export const packet_phi_r: (a: number) => [number, number];
export const packet_time: (a: number) => number;
export const packet_xs: (a: number) => [number, number];
export const paths_endpoints: (a: number) => [number, number];
export const paths_positions: (a: number) => [number, number];
export const paths_reflections: (a: number) => number;
export const paths_times: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
