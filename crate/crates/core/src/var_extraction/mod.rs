//! VAR(∞) coefficients of locally stationary processes, finite-order
//! projections, and the gaps between them.

mod coeffs;
mod gaps;

pub use coeffs::{
    bottom_row_coeffs, normal_equation_coeffs, stationary_var_coeffs, stationary_var_coeffs_infinite,
    var_coeffs_finite, var_coeffs_infinite, VarCoefficients, DRIFT_STEP,
};
pub use gaps::{
    baxter_gaps, finite_order_smoothness_gap, kolmogorov_gap, var_decay_fit, var_lipschitz_gap, var_smoothness_gap,
    BaxterGaps, KolmogorovGap, VarSmoothness,
};
