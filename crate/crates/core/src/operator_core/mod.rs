//! Block-matrix containers, norms, banding, Schur complements and the
//! elementary bounds the analysis modules rely on.

mod bounds;
mod decay;
mod lemmas;
mod norms;
mod schur;
mod window;

pub use bounds::{banded_error_bound, demko_bound, demko_bound_sharp};
pub use decay::{decay_weights, gu, zeta};
pub use lemmas::{
    convolution_envelope, convolution_envelope_symmetric, convolution_sum, matrix_cauchy_schwarz, row_sum_bound,
    stacked_row_bound, ConvolutionSum,
};
pub use norms::{
    inf_norm, matrix_eig_range, spectral_norm, spd_inverse, sym_eig_range, EigRange,
    SPD_THRESHOLD,
};
pub use schur::{block_inverse_identity, schur_complement, schur_complement_window};
pub use window::{band_truncate, BandedBlockWindow, BlockWindow};
