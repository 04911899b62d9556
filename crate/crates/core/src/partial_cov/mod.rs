//! Partial covariances of component pairs given all lags of the remaining
//! components, their frozen counterparts, and local partial coherence.

mod coherence;
mod grouped;
mod pair;

pub use coherence::{coherence_consistency_gap, coherence_truncation_lag, partial_spectral_coherence, CoherenceConsistency};
pub use grouped::{regroup_by_component, ungroup, GroupedWindow};
pub use pair::{
    partial_cov_pair, partial_lipschitz_gap, partial_smoothness_gap, self_partial_cov, stationary_partial_pair,
    PartialPair, PartialSmoothness, StationaryPartial,
};
