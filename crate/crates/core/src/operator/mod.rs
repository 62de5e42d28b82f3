//! Operators `a(x, D)` on grid functions: application, vanishing frequency
//! modulation, the paradifferential split, kernels and support rules.

mod apply;
mod engine;
mod kernel;
mod matrix;
mod paradiff;
mod vfm;

pub use apply::{
    apply, apply_direct, apply_fast_elementary, apply_separable, apply_table, output_spectrum,
    values_from_spectrum, DIRECT_LIMIT,
};
pub use engine::{embed_spectrum, fold_spectrum, Bilinear};
pub use kernel::{kernel, spectral_support_rule_check, support_rule_check, tau_support, KernelTable, SupportReport};
pub use matrix::{SparseOperator, MATRIX_LIMIT};
pub use paradiff::{corona_ball_report, paradiff_split, CoronaReport, CoronaRow, ParadiffTerms, Summand};
pub use vfm::{saturation_index, vfm_apply, vfm_limit, vfm_refine, PsiTrace, RefinementTrace, VfmTrace};
