//! Whittaker M function for the two first-index values this crate needs.
//!
//! The Whittaker function M_{μ,ν}(x) for x > 0 factors through Kummer's
//! confluent hypergeometric series:
//!
//!   M_{μ,ν}(x) = x^{ν+1/2} e^{−x/2} ₁F₁(ν − μ + 1/2; 1 + 2ν; x).
//!
//! Only μ = 0 (exponentially balanced growth, reducible to the I-Bessel by
//! M_{0,ν}(2z) = 2^{2ν+1/2} Γ(1+ν) √z I_ν(z)) and μ = 1 appear in the
//! Fourier expansions handled here, so the first index is an enum rather
//! than a free parameter: it keeps callers honest about which branch of the
//! expansion they are on.

use super::{NumericsError, Precision};
use num_complex::Complex64;

/// First index of the Whittaker M function as used by the Fourier expansions
/// in this crate: `Zero` for weight-0 series, `One` for the raised weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhittakerMu {
    Zero,
    One,
}

impl WhittakerMu {
    fn value(self) -> f64 {
        match self {
            WhittakerMu::Zero => 0.0,
            WhittakerMu::One => 1.0,
        }
    }
}

/// M_{μ,ν}(x) by the Kummer series. The second index may be complex (it is
/// s − 1/2 in every call site); x must be positive and small enough that
/// e^{x/2} stays in range.
pub fn whittaker_m(
    mu: WhittakerMu,
    nu: Complex64,
    x: f64,
    prec: &Precision,
) -> Result<Complex64, NumericsError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(NumericsError::Domain(format!(
            "whittaker_m requires x > 0, got {x}"
        )));
    }
    if x > 1300.0 {
        return Err(NumericsError::Overflow(format!(
            "whittaker_m argument {x} overflows the e^{{x/2}} growth"
        )));
    }
    let b = Complex64::new(1.0, 0.0) + 2.0 * nu;
    // b at or within rounding of a non-positive integer makes the series singular
    if b.im.abs() < 1e-12 && b.re <= 1e-9 && (b.re - b.re.round()).abs() < 1e-9 {
        return Err(NumericsError::Domain(format!(
            "whittaker_m second index makes 1 + 2nu = {b} a non-positive integer"
        )));
    }
    let a = nu - mu.value() + 0.5;

    // Kummer series: sum_{k>=0} (a)_k / (b)_k x^k / k!
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let tol = prec.target_rel_err.min(1e-13);
    let max_terms = 2000usize;
    let mut converged = false;
    for k in 0..max_terms {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * (x / (kf + 1.0));
        sum += term;
        if term.norm() <= tol * sum.norm().max(1e-300) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(NumericsError::ConvergenceFailure(format!(
            "Kummer series for whittaker_m(mu={:?}, nu={nu}, x={x}) did not settle",
            mu
        )));
    }
    // prefactor x^{nu+1/2} e^{-x/2}, assembled in log form to dodge overflow
    let log_pref = (nu + 0.5) * x.ln() - 0.5 * x;
    if log_pref.re + sum.norm().ln().max(0.0) > 700.0 {
        return Err(NumericsError::Overflow(format!(
            "whittaker_m(mu={:?}, nu={nu}, x={x}) exceeds double range",
            mu
        )));
    }
    Ok(log_pref.exp() * sum)
}
