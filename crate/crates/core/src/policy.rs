//! Numeric tolerances shared by every module.
//!
//! A single [`NumericPolicy`] is consulted by all operations. It can be
//! replaced once per process with [`set_policy`] before first use; after
//! that it is frozen.

use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericPolicy {
    /// Maximum deviation of a row sum from 1.
    pub row_sum: f64,
    /// Residual allowed in `pi P = pi`.
    pub stationary: f64,
    /// Detailed-balance tolerance used by the reversibility flag.
    pub reversible: f64,
    /// Maximum asymmetry of the discriminant before symmetrization.
    pub discriminant_asymmetry: f64,
    /// Largest interpolation parameter allowed on paths that need ergodicity.
    pub s_cap: f64,
    /// Eigenvalues exceeding 1 in magnitude by less than this are clamped.
    pub eigen_clamp: f64,
    /// Spectral hitting time refuses eigenvalues this close to 1.
    pub ill_conditioned: f64,
    /// Smallest post-selection probability accepted by the pointer simulation.
    pub min_postselect: f64,
    /// Unitary-completion residual allowed in the full edge-space build.
    pub completion: f64,
    /// Largest chain accepted by the full n^2-dimensional build.
    pub full_build_limit: usize,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            row_sum: 1e-12,
            stationary: 1e-10,
            reversible: 1e-10,
            discriminant_asymmetry: 1e-13,
            s_cap: 1.0 - 1e-9,
            eigen_clamp: 1e-10,
            ill_conditioned: 1e-12,
            min_postselect: 1e-15,
            completion: 1e-10,
            full_build_limit: 12,
        }
    }
}

static POLICY: OnceLock<NumericPolicy> = OnceLock::new();

/// The active policy.
pub fn policy() -> &'static NumericPolicy {
    POLICY.get_or_init(NumericPolicy::default)
}

/// Install a policy. Returns the rejected value if one is already active.
pub fn set_policy(p: NumericPolicy) -> Result<(), NumericPolicy> {
    POLICY.set(p)
}
