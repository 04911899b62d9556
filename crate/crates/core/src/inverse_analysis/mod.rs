//! Inverses of covariance operators: finite sections, Neumann
//! approximation around a banded part, decay fits and local-stationarity
//! gaps.

mod decay;
mod gap;
mod neumann;
mod section;
mod smoothness;

pub use decay::inverse_decay_fit;
pub use gap::{max_ratio, GapIndex, GapReport};
pub use neumann::{neumann_inverse, neumann_inverse_with_envelope, window_distance, NeumannApprox};
pub use section::{
    bottom_row, bottom_row_drift, default_pad, finite_section_inverse, model_inverse_window, one_sided_inverse,
    reference_kappa, stationary_inverse_derivative_seq, stationary_inverse_seq, InverseWindow,
};
pub use smoothness::{inverse_lipschitz_gap, inverse_smoothness_gap};
