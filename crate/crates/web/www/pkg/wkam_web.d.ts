/* tslint:disable */
/* eslint-disable */

/**
 * Contact orbit from `(x0, u0, p0)` as rows `t, x, u, p, H`, at most
 * `max_rows` of them.
 */
export function contact_orbit(lambda: number, c: number, x0: number, u0: number, p0: number, t: number, max_rows: number): Float64Array;

/**
 * `T⁻_t φ` (or `T⁺_t φ` when `forward`) for `t` rounded to the `dt` lattice.
 */
export function evolve_profile(n: number, lambda: number, c: number, dt: number, t: number, forward: boolean, kind: string, level: number): Float64Array;

/**
 * `[u₋ (n values), u₊ (n values), Aubry flags (n values of 0/1)]`.
 */
export function weak_kam_pair(n: number, lambda: number, c: number, dt: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly contact_orbit: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly evolve_profile: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly weak_kam_pair: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
