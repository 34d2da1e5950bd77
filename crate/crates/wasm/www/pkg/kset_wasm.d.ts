/* tslint:disable */
/* eslint-disable */

/**
 * Pseudosphere with `sizes[p]` input values for process `p`, e.g. `"2,2,3"`.
 */
export function analyze_pseudosphere(sizes: string): string;

/**
 * One seeded protocol run. `inputs` is empty for random inputs, or a comma
 * list with one value per process.
 */
export function run_agreement(n_plus_1: number, t: number, k: number, d: number, adversary: string, inputs: string, seed: number): string;

/**
 * Stage sizes of the scenario complex of one input facet, plus the
 * connectivity of the result.
 */
export function scenario_summary(n_plus_1: number, t: number, k: number, input_facet: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analyze_pseudosphere: (a: number, b: number) => [number, number];
    readonly run_agreement: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number];
    readonly scenario_summary: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
