/* tslint:disable */
/* eslint-disable */

/**
 * Rows of `[width_nm, n_TE0, n_TE1, n_TE2]` for a width sweep at fixed
 * core height.
 */
export function dispersion(height_nm: number, width_min_nm: number, width_max_nm: number, step_nm: number): Float64Array;

/**
 * Rows of `[delay_um, coincidences / baseline]`, followed by one final row
 * `[visibility, fwhm_um]` from the Gaussian fit.
 */
export function hom_dip(eta: number, overlap: number): Float64Array;

/**
 * Rows of `[power_W, singles / max, coincidences / max]`, followed by one
 * final row `[classical visibility, quantum visibility, period ratio]`.
 */
export function noon_fringes(eta1: number, eta2: number, overlap: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly dispersion: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly hom_dip: (a: number, b: number) => [number, number, number, number];
    readonly noon_fringes: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
