//! K-Bessel function with complex order, the workhorse behind every Maass
//! form evaluation in this crate.
//!
//! Primary path: the exponentially decaying integral
//!
//!   K_ν(x) = ∫_0^∞ e^{−x cosh t} cosh(νt) dt,      re(x) > 0,
//!
//! evaluated by the trapezoid rule with step halving. The integrand is even
//! and analytic and dies double-exponentially, so the trapezoid converges
//! geometrically. A second, independent path ([`bessel_k_mellin`]) uses the
//! Mellin-type kernel on a different contour and exists to cross-check the
//! first; the two must agree to 1e-10 on the orders used here (ν = ir with
//! r ≤ 30, plus real shifts |re ν| ≤ 2).

use super::{flush_tiny, gamma_complex, NumericsError, Precision};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct KBessel {
    pub value: Complex64,
    /// true when the result magnitude fell below 1e-300 and was zeroed
    pub flushed: bool,
}

const MAX_RE_ORDER: f64 = 2.5;

fn check_args(nu: Complex64, x: f64) -> Result<(), NumericsError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(NumericsError::Domain(format!(
            "bessel_k requires x > 0, got {x}"
        )));
    }
    if nu.re.abs() > MAX_RE_ORDER {
        return Err(NumericsError::Domain(format!(
            "bessel_k supports |re(order)| <= {MAX_RE_ORDER}, got {nu}"
        )));
    }
    Ok(())
}

// Trapezoid sum with step halving until two passes agree to `tol` relative,
// or to the roundoff floor set by the gross (unsigned) integrand mass: for
// oscillatory orders the result sits many digits below the integrand peak and
// cancellation caps the achievable absolute accuracy near eps * ∫|f|.
// `f` must be even about 0 (so the t=0 weight is 1/2) and negligible past `t_max`.
fn trapezoid_halving<F: Fn(f64) -> Complex64>(
    f: F,
    t_max: f64,
    tol: f64,
    max_levels: u32,
) -> Result<Complex64, NumericsError> {
    let mut h = t_max / 24.0;
    let mut n = 24usize;
    let mut acc = 0.5 * f(0.0);
    let mut gross = acc.norm();
    for k in 1..=n {
        let v = f(h * k as f64);
        acc += v;
        gross += v.norm();
    }
    let mut prev = acc * h;
    for _level in 0..max_levels {
        // refine: add midpoints
        for k in 0..n {
            let v = f(h * (k as f64 + 0.5));
            acc += v;
            gross += v.norm();
        }
        n *= 2;
        h *= 0.5;
        let cur = acc * h;
        let floor = 32.0 * f64::EPSILON * gross * h;
        if (cur - prev).norm() <= (tol * cur.norm()).max(floor) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(NumericsError::ConvergenceFailure(format!(
        "K-Bessel trapezoid did not converge within {max_levels} halvings"
    )))
}

/// K_{iρ}(x) by the ascending series, from K_ν = π(I_{−ν} − I_ν)/(2 sin πν)
/// at ν = iρ with x real, where I_{−iρ}(x) = conj(I_{iρ}(x)):
///
///   K_{iρ}(x) = −π · Im[ (x/2)^{iρ} Σ_k (x²/4)^k / (k! Γ(k+1+iρ)) ] / sinh(πρ)
///
/// The largest series term exceeds the sum by at most ~e^{x²/4}, so for small
/// x this path avoids the ~e^{x−πρ/2} cancellation of the integral kernel and
/// keeps near-full relative precision deep in the oscillatory regime x < ρ.
fn series_imag_order(rho: f64, x: f64) -> Result<f64, NumericsError> {
    let nu = Complex64::new(0.0, rho);
    // 1/Γ(1+iρ) ~ e^{πρ/2}; safe in double range for ρ ≤ 180
    let mut term = gamma_complex(Complex64::new(1.0, rho))?.inv();
    let mut sum = term;
    let q = 0.25 * x * x;
    for k in 1..400 {
        term *= q / (k as f64 * (k as f64 + nu));
        sum += term;
        if term.norm() < 1e-20 * sum.norm() {
            let phase = (nu * (0.5 * x).ln()).exp();
            return Ok(-PI * (phase * sum).im / (PI * rho).sinh());
        }
    }
    Err(NumericsError::ConvergenceFailure(
        "imaginary-order K series did not converge".into(),
    ))
}

/// K_ν(x) by the cosh-kernel integral (with an ascending-series fast path for
/// purely imaginary order at small argument, where the integral loses digits
/// to cancellation). Returns exact zero with the `flushed` flag once e^{−x}
/// leaves double range. Purely imaginary order is detected and the
/// (identically zero) imaginary part is pinned to 0.
pub fn bessel_k(nu: Complex64, x: f64, prec: &Precision) -> Result<KBessel, NumericsError> {
    check_args(nu, x)?;
    if x > 700.0 {
        return Ok(KBessel {
            value: Complex64::new(0.0, 0.0),
            flushed: true,
        });
    }
    if nu.re == 0.0 && nu.im.abs() >= 1.0 && nu.im.abs() <= 180.0 && x <= 7.5 {
        let v = series_imag_order(nu.im.abs(), x)?;
        let (value, flushed) = flush_tiny(Complex64::new(v, 0.0));
        return Ok(KBessel { value, flushed });
    }
    // e^{-x cosh t} < 1e-330 past x cosh t = 760 (with margin for cosh(νt) growth)
    let t_max = ((760.0 + 60.0) / x + (((760.0 + 60.0) / x).powi(2) + 1.0).sqrt()).ln();
    let tol = (prec.target_rel_err * 0.1).clamp(1e-15, 1e-10);
    let sigma = nu.re;
    let rho = nu.im;
    let value = if sigma == 0.0 {
        // cosh(iρt) = cos(ρt): real integrand
        let v = trapezoid_halving(
            |t| Complex64::new((-x * t.cosh()).exp() * (rho * t).cos(), 0.0),
            t_max,
            tol,
            16,
        )?;
        Complex64::new(v.re, 0.0)
    } else if rho == 0.0 {
        let v = trapezoid_halving(
            |t| Complex64::new((-x * t.cosh()).exp() * (sigma * t).cosh(), 0.0),
            t_max,
            tol,
            16,
        )?;
        Complex64::new(v.re, 0.0)
    } else {
        // cosh((σ+iρ)t) = cosh σt cos ρt + i sinh σt sin ρt
        trapezoid_halving(
            |t| {
                let w = (-x * t.cosh()).exp();
                let (st, ct) = ((sigma * t).sinh(), (sigma * t).cosh());
                Complex64::new(w * ct * (rho * t).cos(), w * st * (rho * t).sin())
            },
            t_max,
            tol,
            16,
        )?
    };
    let (value, flushed) = flush_tiny(value);
    Ok(KBessel { value, flushed })
}

/// Independent second path: Mellin-type kernel
///
///   K_ν(x) = (1/2)(x/2)^ν ∫_ℝ exp(−e^u − (x²/4)e^{−u}) e^{−νu} du,
///
/// the substitution t = e^u of DLMF 10.32.10. Different integrand, different
/// contour; used to cross-check [`bessel_k`].
pub fn bessel_k_mellin(nu: Complex64, x: f64, prec: &Precision) -> Result<KBessel, NumericsError> {
    check_args(nu, x)?;
    if x > 700.0 {
        return Ok(KBessel {
            value: Complex64::new(0.0, 0.0),
            flushed: true,
        });
    }
    let u_hi = 760.0_f64.ln().max(1.0) + 0.5; // e^u term kills the integrand
    let u_lo = (x * x / (4.0 * 760.0)).ln() - 0.5; // the e^{-u} term kills it
    let tol = (prec.target_rel_err * 0.1).clamp(1e-15, 1e-10);
    // not even about 0: integrate as a shifted even-ized pair of half-lines
    // by plain trapezoid on [u_lo, u_hi] with halving (integrand decays
    // double-exponentially at both ends, endpoint weights are immaterial).
    let mut n = 48usize;
    let mut h = (u_hi - u_lo) / n as f64;
    let f = |u: f64| -> Complex64 {
        let w = (-u.exp() - 0.25 * x * x * (-u).exp()).exp();
        w * (-nu * u).exp()
    };
    let mut acc = 0.5 * (f(u_lo) + f(u_hi));
    let mut gross = acc.norm();
    for k in 1..n {
        let v = f(u_lo + h * k as f64);
        acc += v;
        gross += v.norm();
    }
    let mut prev = acc * h;
    let mut converged = None;
    for _ in 0..16 {
        for k in 0..n {
            let v = f(u_lo + h * (k as f64 + 0.5));
            acc += v;
            gross += v.norm();
        }
        n *= 2;
        h *= 0.5;
        let cur = acc * h;
        let floor = 32.0 * f64::EPSILON * gross * h;
        if (cur - prev).norm() <= (tol * cur.norm()).max(floor) {
            converged = Some((cur, gross * h));
            break;
        }
        prev = cur;
    }
    let (integral, gross_mass) = converged.ok_or_else(|| {
        NumericsError::ConvergenceFailure("Mellin-kernel K-Bessel did not converge".into())
    })?;
    let prefactor = 0.5 * (nu * (0.5 * x).ln()).exp();
    let mut value = prefactor * integral;
    if nu.re == 0.0 {
        // K_{iρ}(x) is real; the quadrature imaginary part must be noise,
        // judged against the gross integrand mass (cancellation scale)
        let noise_scale = prefactor.norm() * gross_mass;
        if value.im.abs() > 1e-9 * noise_scale.max(1e-280) {
            return Err(NumericsError::ConvergenceFailure(format!(
                "imaginary-order K lost realness: {value}"
            )));
        }
        value = Complex64::new(value.re, 0.0);
    }
    let (value, flushed) = flush_tiny(value);
    Ok(KBessel { value, flushed })
}

/// Convenience wrapper for purely imaginary order: K_{ir}(x) as a real number.
pub(crate) fn bessel_k_ir(r: f64, x: f64, prec: &Precision) -> Result<f64, NumericsError> {
    Ok(bessel_k(Complex64::new(0.0, r), x, prec)?.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_prec() -> Precision {
        Precision::standard()
    }

    #[test]
    fn k0_frozen_value() {
        // oracle: 30-digit evaluation of the cosh integral
        let v = bessel_k(Complex64::new(0.0, 0.0), 1.0, &std_prec()).unwrap();
        assert!((v.value.re - 0.421_024_438_240_708_33).abs() < 1e-14);
        assert!(!v.flushed);
    }

    #[test]
    fn dual_paths_agree_at_oscillatory_order() {
        // the acceptance-pinned point: ν = 13.78i, x = 5
        let nu = Complex64::new(0.0, 13.78);
        let a = bessel_k(nu, 5.0, &std_prec()).unwrap().value;
        let b = bessel_k_mellin(nu, 5.0, &std_prec()).unwrap().value;
        // relative 1e-10 with an absolute floor: the value is ~1e-10 while the
        // integrand mass is ~1e-2, so cancellation caps absolute accuracy
        assert!(
            (a - b).norm() <= 1e-10 * a.norm() + 1e-15,
            "paths disagree: {a} vs {b}"
        );
        // frozen external-precision value
        let frozen = -2.780_130_404_149_07e-10;
        assert!((a.re - frozen).abs() < 1e-6 * frozen.abs(), "{}", a.re);
        assert!(a.im == 0.0);
    }

    #[test]
    fn dual_paths_agree_on_grid() {
        for &(rho, x) in &[(0.5, 0.3), (5.0, 2.0), (13.78, 12.0), (25.0, 40.0)] {
            let nu = Complex64::new(0.0, rho);
            let a = bessel_k(nu, x, &std_prec()).unwrap().value;
            let b = bessel_k_mellin(nu, x, &std_prec()).unwrap().value;
            assert!(
                (a - b).norm() < 1e-10 * a.norm() + 1e-15,
                "disagreement at rho={rho}, x={x}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn half_integer_closed_form() {
        // K_{3/2}(x) = sqrt(π/(2x)) e^{−x} (1 + 1/x)
        for &x in &[0.5, 2.0, 10.0] {
            let expect =
                (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / x);
            let got = bessel_k(Complex64::new(1.5, 0.0), x, &std_prec()).unwrap().value;
            assert!(
                (got.re - expect).abs() / expect < 1e-12,
                "K_3/2({x}): {} vs {expect}",
                got.re
            );
        }
    }

    #[test]
    fn order_reflection_symmetry() {
        // K_{−ν} = K_ν, including complex order
        let nu = Complex64::new(1.0, 13.78);
        let a = bessel_k(nu, 6.0, &std_prec()).unwrap().value;
        let b = bessel_k(-nu, 6.0, &std_prec()).unwrap().value;
        assert!((a - b).norm() / a.norm() < 1e-12);
        // and conjugate symmetry for real x
        let c = bessel_k(nu.conj(), 6.0, &std_prec()).unwrap().value;
        assert!((a.conj() - c).norm() / a.norm() < 1e-12);
    }

    #[test]
    fn derivative_identity_against_central_difference() {
        // K_ν'(x) = −(K_{ν−1}(x) + K_{ν+1}(x))/2 at complex order
        let nu = Complex64::new(0.0, 13.78);
        let one = Complex64::new(1.0, 0.0);
        for i in 0..20 {
            let x = 4.0 + 0.9 * i as f64;
            let h = 1e-5 * x;
            let kp = bessel_k(nu, x + h, &std_prec()).unwrap().value;
            let km = bessel_k(nu, x - h, &std_prec()).unwrap().value;
            let fd = (kp - km) / (2.0 * h);
            let lhs = -(bessel_k(nu - one, x, &std_prec()).unwrap().value
                + bessel_k(nu + one, x, &std_prec()).unwrap().value)
                / 2.0;
            // absolute floor: dividing the quadrature roundoff (~3e-17 in the
            // oscillatory regime) by 2h puts a hard cap on the fd accuracy
            assert!(
                (fd - lhs).norm() < 1e-6 * lhs.norm() + 5e-12,
                "derivative identity failed at x={x}: {fd} vs {lhs}"
            );
        }
    }

    #[test]
    fn series_path_matches_external_values() {
        // reference values computed with 40-digit arithmetic; all three land
        // in the ascending-series regime (imaginary order, x <= 7.5)
        let cases = [
            (9.5, 2.0, 5.457_893_839_360_141_9e-8, 1e-12),
            (13.779_751_351_9, 4.4, 1.909_553_991_388_945_8e-11, 1e-12),
            // near the series/integral crossover the ~e^{x^2/4} term growth
            // costs digits; accuracy degrades gracefully toward ~1e-9
            (13.779_751_351_9, 7.3, 5.534_596_319_414_842_6e-12, 5e-9),
        ];
        for &(rho, x, want, tol) in &cases {
            let v = bessel_k(Complex64::new(0.0, rho), x, &std_prec()).unwrap();
            assert!(
                (v.value.re - want).abs() < tol * want.abs(),
                "K_(i{rho})({x}) = {}, want {want}",
                v.value.re
            );
            assert_eq!(v.value.im, 0.0);
        }
    }

    #[test]
    fn monotone_region_frozen_value() {
        // x past the turning point x = r: no oscillation, full relative accuracy
        let v = bessel_k(Complex64::new(0.0, 13.78), 21.78, &std_prec()).unwrap();
        let frozen = 1.131_637_720_808_959e-12;
        assert!((v.value.re - frozen).abs() < 1e-9 * frozen, "{}", v.value.re);
    }

    #[test]
    fn underflow_flushes_to_zero_with_flag() {
        let v = bessel_k(Complex64::new(0.0, 2.0), 800.0, &std_prec()).unwrap();
        assert!(v.flushed);
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k(Complex64::new(0.0, 1.0), 0.0, &std_prec()).is_err());
        assert!(bessel_k(Complex64::new(0.0, 1.0), -1.0, &std_prec()).is_err());
        assert!(bessel_k(Complex64::new(3.0, 0.0), 1.0, &std_prec()).is_err());
    }
}
