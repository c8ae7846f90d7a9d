//! Special functions and quadrature at double precision.
//!
//! Everything downstream (exponential-sum identities, Fourier expansions,
//! cycle integrals) reduces to a handful of kernels implemented here:
//!
//! | routine            | definition                                              |
//! |--------------------|---------------------------------------------------------|
//! | [`gamma_complex`]  | Γ(z), Lanczos approximation with reflection             |
//! | [`bessel_k`]       | K_ν(x), complex order, exponential integral form        |
//! | [`bessel_j`]/[`bessel_i`] | J_ν(x), I_ν(x), real order ν ≥ 0                 |
//! | [`whittaker_m`]    | M_{μ,ν}(x) via the Kummer series                        |
//! | [`hurwitz_zeta`]/[`completed_zeta`] | ζ(s,a) and Λ(s) = π^{−s/2}Γ(s/2)ζ(s)  |
//! | [`integrate`]      | adaptive Gauss–Kronrod on finite and half-line domains  |
//!
//! Values of magnitude below 1e-300 are flushed to exact zero and flagged,
//! so no routine ever returns a subnormal.

mod bessel;
mod gamma;
mod kbessel;
mod quad;
mod whittaker;
mod zeta;

pub use bessel::{bessel_i, bessel_j};
pub use gamma::gamma_complex;
pub use kbessel::{bessel_k, bessel_k_mellin, KBessel};
pub(crate) use kbessel::bessel_k_ir;
pub use quad::{integrate, DecayHint, Domain, IntegralResult};
pub use whittaker::{whittaker_m, WhittakerMu};
pub use zeta::{completed_zeta, hurwitz_zeta, zeta};

use num_complex::Complex64;
use thiserror::Error;

/// Magnitude below which results are flushed to exact zero (and flagged).
pub const FLUSH_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Clone, Error)]
pub enum NumericsError {
    #[error("gamma pole at non-positive integer z = {0}")]
    GammaPole(Complex64),
    #[error("zeta pole at s = 1")]
    ZetaPole,
    #[error("completed zeta pole at s = {0}")]
    CompletedZetaPole(Complex64),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("series or quadrature failed to converge: {0}")]
    ConvergenceFailure(String),
    #[error("result overflows double precision: {0}")]
    Overflow(String),
    #[error("invalid precision request: {0}")]
    InvalidPrecision(String),
}

/// Error budget and subdivision cap for adaptive quadrature.
///
/// Both targets must be positive; an interval is accepted once its error
/// estimate drops below `target_abs_err + target_rel_err * |integral|`.
#[derive(Debug, Clone, Copy)]
pub struct Precision {
    pub target_abs_err: f64,
    pub target_rel_err: f64,
    pub max_subdivisions: usize,
}

impl Precision {
    pub fn new(
        target_abs_err: f64,
        target_rel_err: f64,
        max_subdivisions: usize,
    ) -> Result<Self, NumericsError> {
        if !(target_abs_err > 0.0) || !(target_rel_err > 0.0) {
            return Err(NumericsError::InvalidPrecision(format!(
                "error targets must be positive, got abs={target_abs_err}, rel={target_rel_err}"
            )));
        }
        if max_subdivisions == 0 {
            return Err(NumericsError::InvalidPrecision(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(Self {
            target_abs_err,
            target_rel_err,
            max_subdivisions,
        })
    }

    /// Workhorse default: 1e-12 absolute, 1e-11 relative.
    pub fn standard() -> Self {
        Self {
            target_abs_err: 1e-12,
            target_rel_err: 1e-11,
            max_subdivisions: 4000,
        }
    }

    /// Looser budget for expensive two-dimensional or oscillatory integrals.
    pub fn relaxed(abs: f64, rel: f64) -> Self {
        Self {
            target_abs_err: abs,
            target_rel_err: rel,
            max_subdivisions: 4000,
        }
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::standard()
    }
}

/// Truncation policy for infinite modulus sums (Kloosterman-type series).
///
/// `max_modulus` caps the modulus range, `tail_exponent` is the exponent β
/// such that the dropped tail is bounded by C·Σ_{c>max} c^{−β} for the
/// prefactor C recorded by the caller, and `target_rel_err` is the requested
/// relative accuracy of the assembled sum.
#[derive(Debug, Clone, Copy)]
pub struct SumSpec {
    pub max_modulus: u64,
    pub tail_exponent: f64,
    pub target_rel_err: f64,
}

impl SumSpec {
    pub fn new(max_modulus: u64, tail_exponent: f64, target_rel_err: f64) -> Self {
        Self {
            max_modulus,
            tail_exponent,
            target_rel_err,
        }
    }
}

impl Default for SumSpec {
    fn default() -> Self {
        Self {
            max_modulus: 1000,
            tail_exponent: 1.5,
            target_rel_err: 1e-8,
        }
    }
}

/// Flush values of magnitude below [`FLUSH_THRESHOLD`] to exact zero.
/// Returns the (possibly zeroed) value and whether flushing happened.
pub(crate) fn flush_tiny(v: Complex64) -> (Complex64, bool) {
    if v.norm() < FLUSH_THRESHOLD && v != Complex64::new(0.0, 0.0) {
        (Complex64::new(0.0, 0.0), true)
    } else {
        (v, false)
    }
}
