/* tslint:disable */
/* eslint-disable */

/**
 * Generates an instance (`uniform`: sizes 20..100 in bins of 150;
 * `weibull`: Weibull(3, 45) in bins of 100) and packs it with every heuristic.
 */
export function compare(kind: string, n: number, seed: number, candidates: string): string;

/**
 * Evolves up to `wanted` instances won outright by `target` (small budget).
 */
export function evolve(target: string, wanted: number, generations: number, seed: number): string;

/**
 * Heuristic ids usable in the other calls.
 */
export function heuristics(): string;

/**
 * Packs whitespace or comma separated sizes with one heuristic.
 */
export function pack(items: string, capacity: number, heuristic: string, candidates: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly compare: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly evolve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly heuristics: () => [number, number];
    readonly pack: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
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
