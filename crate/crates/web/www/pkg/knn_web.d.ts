/* tslint:disable */
/* eslint-disable */

/**
 * `[truth, estimate per size...]`.
 */
export function entropyCurve(distribution: string, d: number, k: number, variant: string, sizes: Uint32Array, seed: bigint): Float64Array;

/**
 * `[depth, x0, y0, x1, y1, ...]` for every kd-tree split.
 */
export function kdtreeSplits(points: Float64Array, leaf_size: number): Float64Array;

/**
 * `[evals, index_0, dist_0, ...]` for the k nearest points to `(x, y)`.
 */
export function neighbors(points: Float64Array, x: number, y: number, k: number, metric: string, kdtree: boolean): Float64Array;

/**
 * `n` points in the unit square, flattened `[x0, y0, x1, y1, ...]`.
 */
export function randomPoints(n: number, seed: bigint, clustered: boolean): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly entropyCurve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number, number];
    readonly kdtreeSplits: (a: number, b: number, c: number) => [number, number, number, number];
    readonly neighbors: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly randomPoints: (a: number, b: bigint, c: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
