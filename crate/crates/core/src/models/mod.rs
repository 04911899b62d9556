//! Locally stationary process families: closed-form covariance windows,
//! local autocovariances and spectral densities, simulators, and empirical
//! checks of the decay and smoothness assumptions.

mod coefficient;
mod covariance;
mod fit;
mod simulate;
mod spec;
mod spectral;

pub use coefficient::{CoefficientFn, Mat};
pub use covariance::{
    cov_block, cov_window, rescaled, stationary_cov, stationary_cov_derivative_seq, stationary_cov_seq,
    stationary_window, stationary_window_derivative, var_pad, var_precision_window,
};
pub use fit::{assumption_fit, line_fit, AssumptionFit, DecayProfile, LineFit, SmoothnessConstants};
pub use simulate::{burn_in, physical_dep_estimate, simulate_path, PhysicalDependence, SamplePath};
pub use spec::{check_grid, Family, ModelSpec, PowerTail};
pub use spectral::{
    hermitian_eig_range, inverse_spectral_density, local_spectral_density, omega_grid,
    spectral_eig_range, var_transfer, CMatrix,
};
