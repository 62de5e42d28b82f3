//! Type 1,1 pseudo-differential operators on the discrete torus.
//!
//! Grid functions, Littlewood–Paley frames, symbols and operators are
//! realised on `[0, 2π)^n` with integer frequencies, so that identities for
//! band-limited data hold to machine precision.

pub mod config;
pub mod corpus;
pub mod error;
pub mod experiments;
pub mod frame;
pub mod grid;
pub mod growth;
pub mod io;
pub mod operator;
pub mod pointwise;
mod smooth;
pub mod spaces;
pub mod symbol;

pub use error::{PdError, Result};
pub use frame::{block_project, corona_blocks, BlockKind, LpFrame, ModulationFunction, Profile};
pub use grid::{fft_forward, fft_inverse, lp_norm, sobolev_norm, GridFunction, GridSpec, SpectralFunction};
pub use smooth::{smoothstep, smoothstep_derivative};
pub use symbol::{
    ChingSymbol, ElementarySymbol, FnSymbol, MultiplicationSymbol, RadialBump, Symbol, SymbolRef,
    SymbolTable,
};

pub use num_complex::Complex64;

/// Folds `0..n` in parallel over a fixed number of contiguous chunks and
/// combines the partial results in order, so the floating-point result does
/// not depend on the thread count or on scheduling.
pub(crate) fn ordered_fold<A: Send>(
    n: usize,
    init: impl Fn() -> A + Sync + Send,
    fold: impl Fn(A, usize) -> A + Sync + Send,
    combine: impl Fn(A, A) -> A,
) -> A {
    use rayon::prelude::*;
    let chunk = n.div_ceil(32).max(1);
    let parts: Vec<A> = (0..n).into_par_iter().fold_chunks(chunk, &init, &fold).collect();
    parts.into_iter().fold(init(), combine)
}

/// Caps the global worker pool at `PDLAB_THREADS` when the variable is set.
/// Returns the number of threads in effect.
pub fn init_threads() -> usize {
    if let Some(n) = std::env::var("PDLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    rayon::current_num_threads()
}
