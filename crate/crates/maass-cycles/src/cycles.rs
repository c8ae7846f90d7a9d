//! Cycle integrals along the geodesics of square-discriminant forms, and the
//! closed right-hand sides they are expected to reproduce.
//!
//! For a fundamental discriminant d, the Γ-classes of integral forms of
//! discriminant d² are represented by Q_c = [0, |d|, c] with 0 ≤ c < |d|;
//! the geodesic C_{Q_c} is the vertical line x = −c/|d| and the genus
//! character weights it by (d/c). Unfolding the sum over c against the
//! Fourier expansion of an even Hecke–Maass form φ with eigenvalue
//! 1/4 + r² turns Gauss sums into χ_d values and evaluates termwise to a
//! product of Γ factors and a twisted L-value:
//!
//!   Σ_c (d/c) ∫₀^∞ φ(−c/|d| + iy) y^{s−1} dy            (d > 0)
//!   Σ_c (d/c) · i∫_{C_Q} ∂_zφ(z) y^s dz                  (d < 0)
//!     = π^{−s−1/2} √|d| |Γ(s/2 + 1/4 + (1−sgn d)/4 + ir/2)|²
//!       · L(s + 1/2, φ × χ_d).
//!
//! The d < 0 cycles are oriented downward, which folds the i and the dz into
//! a plain +∫₀^∞ … dy; [`cycle_sum_maass_dz`] hard-codes that orientation
//! and a synthetic-integrand unit test pins it. The same cycle sum applied
//! to the truncated Eisenstein series F_{0,Q} collapses by a Kloosterman
//! identity to a ratio of Dirichlet L-values ([`eisenstein_cycle_check`]).
//! [`h_m`] evaluates the arc integrals H_m(t) that play the analogous role
//! for negative discriminants, in both quadrature and closed Bessel form.

use crate::arithmetic::{extended_gcd, Discriminant};
use crate::lfunctions::{dirichlet_l, twisted_l_center, twisted_l_direct, LFunctionError};
use crate::maassforms::{MaassError, MaassForm};
use crate::numerics::{
    bessel_j, completed_zeta, gamma_complex, integrate, whittaker_m, zeta, DecayHint, Domain,
    NumericsError, Precision, WhittakerMu,
};
use crate::poincare::{poincare_truncated, EvalMode, PoincareError};
use crate::quadforms::{
    act, genus_character, square_disc_representatives, GammaElement, QuadFormError,
    QuadraticForm, RepresentativeFlavor,
};
use num_complex::Complex64;
use std::cell::RefCell;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CycleError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Maass(#[from] MaassError),
    #[error(transparent)]
    LFunction(#[from] LFunctionError),
    #[error(transparent)]
    Poincare(#[from] PoincareError),
    #[error(transparent)]
    QuadForm(#[from] QuadFormError),
    #[error("result expected real, imaginary part {0:e} too large")]
    NonRealResult(f64),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// Which cycle integrand a [`CycleIntegralJob`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleIntegrand {
    /// φ(z) y^{s−1} dy over positive-discriminant cycles.
    Maass,
    /// i ∂_zφ(z) y^s dz over negative-discriminant cycles.
    MaassDz,
    /// F_{0,Q}(z,s) y^{−1} dy over positive-discriminant cycles.
    EisensteinTruncated,
    /// ∂_z of the truncated Eisenstein series; declared but not evaluated.
    EisensteinTruncatedDz,
}

/// Both sides of one cycle-integral identity.
#[derive(Debug, Clone, Copy)]
pub struct CyclePair {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

/// A packaged cycle-integral verification: discriminant, spectral weight s,
/// integrand kind and quadrature budget.
#[derive(Debug, Clone)]
pub struct CycleIntegralJob {
    pub d: Discriminant,
    pub s: f64,
    pub integrand: CycleIntegrand,
    pub quad: Precision,
}

impl CycleIntegralJob {
    /// Evaluate both sides of the identity this job encodes. The Maass
    /// integrands require a form and re(s) ≥ 0 with the sign of d matching
    /// the integrand; the Eisenstein integrand requires d > 0 and s > 1.
    pub fn run(&self, phi: Option<&MaassForm>) -> Result<CyclePair, CycleError> {
        let need_phi = || {
            phi.ok_or_else(|| {
                CycleError::BadParameter("this integrand requires a Maass form".into())
            })
        };
        match self.integrand {
            CycleIntegrand::Maass => {
                let phi = need_phi()?;
                let lhs = cycle_sum_maass(phi, self.d, self.s, &self.quad)?;
                let rhs = rhs_formula(phi, self.d, self.s)?;
                Ok(CyclePair {
                    lhs: Complex64::new(lhs, 0.0),
                    rhs: Complex64::new(rhs, 0.0),
                })
            }
            CycleIntegrand::MaassDz => {
                let phi = need_phi()?;
                let lhs = cycle_sum_maass_dz(phi, self.d, self.s, &self.quad)?;
                let rhs = rhs_formula(phi, self.d, self.s)?;
                Ok(CyclePair {
                    lhs,
                    rhs: Complex64::new(rhs, 0.0),
                })
            }
            CycleIntegrand::EisensteinTruncated => {
                let (lhs, rhs) = eisenstein_cycle_check(self.d, self.s, &self.quad)?;
                Ok(CyclePair {
                    lhs: Complex64::new(lhs, 0.0),
                    rhs: Complex64::new(rhs, 0.0),
                })
            }
            CycleIntegrand::EisensteinTruncatedDz => Err(CycleError::Unsupported(
                "the ∂_z variant of the truncated Eisenstein cycle is not evaluated".into(),
            )),
        }
    }
}

/// Production split between the pullback-dominated segment and the plain
/// expansion segment of a vertical line integral.
const PULLBACK_SPLIT: f64 = 0.5;
/// Height at which Eisenstein cycle integrals switch to the analytic
/// y^{1−s} tail.
const EISENSTEIN_CUTOFF: f64 = 1000.0;

/// Quadrature budget rescaled to the natural magnitude of φ: the
/// unnormalized K_{ir} factor makes every value of order e^{−πr/2}, so an
/// absolute target has to ride on [`MaassForm::amplitude_scale`] for the
/// relative accuracy to be meaningful.
fn line_precision(phi: &MaassForm, prec: &Precision) -> Precision {
    let rel = prec.target_rel_err.max(1e-10);
    Precision {
        target_abs_err: (phi.amplitude_scale() * rel).max(1e-280),
        target_rel_err: rel,
        max_subdivisions: prec.max_subdivisions,
    }
}

/// ∫₀^∞ φ(x₀ + iy) y^{s−1} dy along a vertical geodesic ending at a cusp of
/// denominator `den`. Below `split` the evaluation pulls back into the
/// fundamental domain; below 1/(18 den²) the pullback height exceeds 18 and
/// the integrand is beyond double-precision underflow of e^{−2πy}.
fn line_integral_maass(
    phi: &MaassForm,
    x0: f64,
    den: u64,
    s: f64,
    split: f64,
    prec: &Precision,
) -> Result<f64, CycleError> {
    let eff = line_precision(phi, prec);
    let eval_prec = Precision::standard();
    let y_floor = 1.0 / (18.0 * (den * den) as f64);
    let err: RefCell<Option<MaassError>> = RefCell::new(None);
    let f = |y: f64| -> Complex64 {
        if err.borrow().is_some() {
            return Complex64::new(0.0, 0.0);
        }
        match phi.evaluate(Complex64::new(x0, y), &eval_prec) {
            Ok(ev) => Complex64::new(ev.value * y.powf(s - 1.0), 0.0),
            Err(e) => {
                *err.borrow_mut() = Some(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let lower = integrate(&f, Domain::Finite { a: y_floor, b: split }, &eff)?;
    let upper = integrate(
        &f,
        Domain::SemiInfinite {
            a: split,
            decay: DecayHint::Exponential { rate: 2.0 * PI },
        },
        &eff,
    )?;
    if let Some(e) = err.into_inner() {
        return Err(e.into());
    }
    Ok(lower.value.re + upper.value.re)
}

/// Same line integral with integrand ∂_zφ(x₀ + iy) y^s.
fn line_integral_dz(
    phi: &MaassForm,
    x0: f64,
    den: u64,
    s: f64,
    prec: &Precision,
) -> Result<Complex64, CycleError> {
    let eff = line_precision(phi, prec);
    let eval_prec = Precision::standard();
    let y_floor = 1.0 / (18.0 * (den * den) as f64);
    let err: RefCell<Option<MaassError>> = RefCell::new(None);
    let f = |y: f64| -> Complex64 {
        if err.borrow().is_some() {
            return Complex64::new(0.0, 0.0);
        }
        match phi.evaluate_dz(Complex64::new(x0, y), &eval_prec) {
            Ok(ev) => ev.value * y.powf(s),
            Err(e) => {
                *err.borrow_mut() = Some(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let lower = integrate(
        &f,
        Domain::Finite {
            a: y_floor,
            b: PULLBACK_SPLIT,
        },
        &eff,
    )?;
    let upper = integrate(
        &f,
        Domain::SemiInfinite {
            a: PULLBACK_SPLIT,
            decay: DecayHint::Exponential { rate: 2.0 * PI },
        },
        &eff,
    )?;
    if let Some(e) = err.into_inner() {
        return Err(e.into());
    }
    Ok(lower.value + upper.value)
}

/// Σ_{c mod d} (d/c) ∫₀^∞ φ(−c/d + iy) y^{s−1} dy for d > 0 and s ≥ 0.
pub fn cycle_sum_maass(
    phi: &MaassForm,
    d: Discriminant,
    s: f64,
    prec: &Precision,
) -> Result<f64, CycleError> {
    cycle_sum_maass_split(phi, d, s, PULLBACK_SPLIT, prec)
}

fn cycle_sum_maass_split(
    phi: &MaassForm,
    d: Discriminant,
    s: f64,
    split: f64,
    prec: &Precision,
) -> Result<f64, CycleError> {
    if !d.is_positive() {
        return Err(CycleError::BadParameter(format!(
            "cycle_sum_maass requires d > 0, got {d}"
        )));
    }
    if !(s >= 0.0) {
        return Err(CycleError::BadParameter(format!(
            "cycle_sum_maass requires s ≥ 0, got {s}"
        )));
    }
    let dv = d.abs();
    let mut acc = 0.0;
    for q in square_disc_representatives(d, RepresentativeFlavor::Right) {
        let chi = genus_character(d, &q)?;
        if chi == 0 {
            continue;
        }
        let x0 = -(q.c() as f64) / dv as f64;
        acc += chi as f64 * line_integral_maass(phi, x0, dv, s, split, prec)?;
    }
    Ok(acc)
}

/// Σ_{c mod |d|} (d/c) · i∫_{C_Q} ∂_zφ(z) y^s dz for d < 0 and s ≥ 0.
///
/// The cycles are the vertical lines x = −c/|d| traversed downward, so
/// dz = i dy with y falling and the integral is +∫₀^∞ ∂_zφ(−c/|d|+iy) y^s dy.
/// The result is real up to quadrature noise; the imaginary part is
/// returned for the caller to audit.
pub fn cycle_sum_maass_dz(
    phi: &MaassForm,
    d: Discriminant,
    s: f64,
    prec: &Precision,
) -> Result<Complex64, CycleError> {
    if d.is_positive() {
        return Err(CycleError::BadParameter(format!(
            "cycle_sum_maass_dz requires d < 0, got {d}"
        )));
    }
    if !(s >= 0.0) {
        return Err(CycleError::BadParameter(format!(
            "cycle_sum_maass_dz requires s ≥ 0, got {s}"
        )));
    }
    let dv = d.abs();
    let mut acc = Complex64::new(0.0, 0.0);
    for q in square_disc_representatives(d, RepresentativeFlavor::Right) {
        let chi = genus_character(d, &q)?;
        if chi == 0 {
            continue;
        }
        let x0 = -(q.c() as f64) / dv as f64;
        acc += chi as f64 * line_integral_dz(phi, x0, dv, s, prec)?;
    }
    Ok(acc)
}

/// The closed form both Maass cycle sums unfold to:
///
///   π^{−s−1/2} √|d| · |Γ(s/2 + 1/4 + (1−sgn d)/4 + ir/2)|²
///     · L(s + 1/2, φ × χ_d).
///
/// The L-value is summed directly when re(s) + 1/2 ≥ 1.7 and by the
/// central-point machinery when s = 0; in between no supported route exists.
pub fn rhs_formula(phi: &MaassForm, d: Discriminant, s: f64) -> Result<f64, CycleError> {
    if !(s >= 0.0) {
        return Err(CycleError::BadParameter(format!(
            "rhs_formula requires s ≥ 0, got {s}"
        )));
    }
    let shift = if d.is_positive() { 0.0 } else { 0.5 };
    let w = Complex64::new(0.5 * s + 0.25 + shift, 0.5 * phi.r());
    let gamma_pair = gamma_complex(w)?.norm_sqr();
    let l_value = if s.abs() < 1e-12 {
        twisted_l_center(phi, d)?
    } else if s + 0.5 >= 1.7 - 1e-12 {
        twisted_l_direct(Complex64::new(s + 0.5, 0.0), phi, d)?.value.re
    } else {
        return Err(CycleError::BadParameter(format!(
            "no L-value route at re = {}: the direct series needs re ≥ 1.7 \
             and the central route handles s = 0 only",
            s + 0.5
        )));
    };
    Ok(PI.powf(-s - 0.5) * (d.abs() as f64).sqrt() * gamma_pair * l_value)
}

/// How to evaluate [`h_m`].
#[derive(Debug, Clone, Copy)]
pub enum HmMode {
    /// Integrate over the semicircular arc parametrization.
    Quadrature,
    /// The Bessel/Gamma closed form.
    Closed,
}

/// The weight-2 profile φ_{2,m}(y, s): s y^{s−1} for m = 0 and
/// s m^{−1/2} (2πy)^{−1} Γ(s)/Γ(2s) · M_{1,s−1/2}(4πmy) for m ≥ 1.
fn weight_two_profile(m: u64, y: f64, s: f64, prec: &Precision) -> Result<f64, CycleError> {
    if m == 0 {
        return Ok(s * y.powf(s - 1.0));
    }
    let mf = m as f64;
    let gs = gamma_complex(Complex64::new(s, 0.0))?.re;
    let g2s = gamma_complex(Complex64::new(2.0 * s, 0.0))?.re;
    let profile = whittaker_m(
        WhittakerMu::One,
        Complex64::new(s - 0.5, 0.0),
        4.0 * PI * mf * y,
        prec,
    )?
    .re;
    Ok(s / (mf.sqrt() * 2.0 * PI * y) * gs / g2s * profile)
}

/// The arc integral H_m(t) = i t ∫₀^π e(−mt cos θ) φ_{2,m}(t sin θ, s)
/// e^{−iθ} dθ over the semicircle of radius t, for t > 0 and s > 0.
///
/// Closed form: 2√π Γ((s+1)/2) t^{1/2} J_{s−1/2}(2πmt) / Γ(s/2) for m ≥ 1
/// (requiring s ≥ 1/2 so the Bessel order is nonnegative) and
/// 2√π t^s Γ((s+1)/2) / Γ(s/2) for m = 0.
///
/// For m ≥ 1 the arc integrand peaks like e^{2πmt} at the apex while the
/// integral stays O(t^{1/2}), so the quadrature route loses roughly
/// 2πmt/ln 10 digits to cancellation; keep mt ≲ 2 when double-precision
/// answers near 1e-8 are wanted.
pub fn h_m(m: u64, t: f64, s: f64, mode: HmMode) -> Result<f64, CycleError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(CycleError::BadParameter(format!(
            "h_m requires t > 0, got {t}"
        )));
    }
    if !(s > 0.0) {
        return Err(CycleError::BadParameter(format!(
            "h_m requires s > 0, got {s}"
        )));
    }
    match mode {
        HmMode::Closed => {
            let ratio = gamma_complex(Complex64::new(0.5 * (s + 1.0), 0.0))?.re
                / gamma_complex(Complex64::new(0.5 * s, 0.0))?.re;
            if m == 0 {
                Ok(2.0 * PI.sqrt() * t.powf(s) * ratio)
            } else {
                let j = bessel_j(s - 0.5, 2.0 * PI * m as f64 * t)?;
                Ok(2.0 * PI.sqrt() * ratio * t.sqrt() * j)
            }
        }
        HmMode::Quadrature => {
            let prec = Precision::standard();
            let mf = m as f64;
            let integrand = |theta: f64| -> Result<Complex64, CycleError> {
                let profile = weight_two_profile(m, t * theta.sin(), s, &prec)?;
                let phase = Complex64::from_polar(1.0, -2.0 * PI * mf * t * theta.cos());
                let turn = Complex64::from_polar(1.0, -theta);
                Ok(Complex64::i() * t * phase * profile * turn)
            };
            // the profile carries an algebraic (sin θ)^{s−1} factor at both
            // arc ends; integrating each half-arc under θ = (π/2) v^{4/s}
            // flattens the endpoint to v³ so the panels converge
            let q = 4.0 / s;
            let half_arc = |mirrored: bool| -> Result<Complex64, CycleError> {
                let err: RefCell<Option<CycleError>> = RefCell::new(None);
                let g = |v: f64| -> Complex64 {
                    if err.borrow().is_some() {
                        return Complex64::new(0.0, 0.0);
                    }
                    let near = 0.5 * PI * v.powf(q);
                    let theta = if mirrored { PI - near } else { near };
                    let jacobian = 0.5 * PI * q * v.powf(q - 1.0);
                    match integrand(theta) {
                        Ok(w) => w * jacobian,
                        Err(e) => {
                            *err.borrow_mut() = Some(e);
                            Complex64::new(0.0, 0.0)
                        }
                    }
                };
                let piece = integrate(&g, Domain::Finite { a: 0.0, b: 1.0 }, &prec)?;
                if let Some(e) = err.into_inner() {
                    return Err(e);
                }
                Ok(piece.value)
            };
            let v = half_arc(false)? + half_arc(true)?;
            if v.im.abs() > 1e-8 * v.re.abs().max(1.0) {
                return Err(CycleError::NonRealResult(v.im));
            }
            Ok(v.re)
        }
    }
}

/// One piece of an Eisenstein cycle integral: ∫ F_{0,q}(x₀+iy, s) dy/y from
/// y = 1/den to the cutoff, plus the analytic tail. Beyond the cutoff the
/// truncated series is exactly c₁ y^{1−s} − (den² y)^{−s} up to e^{−2πy}
/// terms, with c₁ = Λ(2s−1)/Λ(2s).
fn truncated_line_piece(
    q: &QuadraticForm,
    x0: f64,
    den: u64,
    s: f64,
    prec: &Precision,
) -> Result<f64, CycleError> {
    let start = 1.0 / den as f64;
    let err: RefCell<Option<PoincareError>> = RefCell::new(None);
    let f = |y: f64| -> Complex64 {
        if err.borrow().is_some() {
            return Complex64::new(0.0, 0.0);
        }
        match poincare_truncated(0, q, Complex64::new(x0, y), s, EvalMode::Fourier) {
            Ok(v) => v / y,
            Err(e) => {
                *err.borrow_mut() = Some(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let body = integrate(
        &f,
        Domain::Finite {
            a: start,
            b: EISENSTEIN_CUTOFF,
        },
        prec,
    )?;
    if let Some(e) = err.into_inner() {
        return Err(e.into());
    }
    let sc = Complex64::new(s, 0.0);
    let c1 = (completed_zeta(2.0 * sc - 1.0)? / completed_zeta(2.0 * sc)?).re;
    let tail = c1 * EISENSTEIN_CUTOFF.powf(1.0 - s) / (s - 1.0)
        - (den as f64).powf(-2.0 * s) * EISENSTEIN_CUTOFF.powf(-s) / s;
    Ok(body.value.re + tail)
}

/// Cycle sum of the truncated Eisenstein series against its closed form:
///
///   Σ_c (d/c) ∫_{C_{Q_c}} F_{0,Q_c}(z, s) y^{−1} |dz|
///     = Γ(s/2)² d^s L(s, χ_d)² / (Γ(s) ζ(2s)),   d > 0, s > 1.
///
/// Returns (lhs, rhs). Each line integral is split at y = 1/|d|: the upper
/// half is integrated as is, and the lower half is carried to the line
/// x = a/|d| by the coset matrix fixing the finite endpoint (hyperbolic arc
/// length is invariant, and the truncated series transports to the one
/// attached to the transported form), so no evaluation ever happens close
/// to a cusp.
pub fn eisenstein_cycle_check(
    d: Discriminant,
    s: f64,
    prec: &Precision,
) -> Result<(f64, f64), CycleError> {
    if !d.is_positive() {
        return Err(CycleError::BadParameter(format!(
            "eisenstein_cycle_check requires d > 0, got {d}"
        )));
    }
    if !(s > 1.0) {
        return Err(CycleError::BadParameter(format!(
            "eisenstein_cycle_check requires s > 1, got {s}"
        )));
    }
    let dv = d.abs();
    let dvi = dv as i64;
    let mut lhs = 0.0;
    for q in square_disc_representatives(d, RepresentativeFlavor::Right) {
        let chi = genus_character(d, &q)?;
        if chi == 0 {
            continue;
        }
        let c = q.c();
        let upper = truncated_line_piece(&q, -(c as f64) / dv as f64, dv, s, prec)?;
        // carry y < 1/|d| to the image line through the endpoint coset
        let (g, x, y) = extended_gcd(c, dvi);
        debug_assert_eq!(g, 1);
        let (a, b) = (x, -y);
        let gamma2 = GammaElement::new(a, b, dvi, c)?;
        let q2 = act(&gamma2, &q);
        let lower = truncated_line_piece(&q2, a as f64 / dv as f64, dv, s, prec)?;
        lhs += chi as f64 * (upper + lower);
    }
    let g_half = gamma_complex(Complex64::new(0.5 * s, 0.0))?.re;
    let g_full = gamma_complex(Complex64::new(s, 0.0))?.re;
    let l = dirichlet_l(Complex64::new(s, 0.0), d)?.re;
    let zeta_2s = zeta(Complex64::new(2.0 * s, 0.0))?.re;
    let rhs = g_half * g_half * (dv as f64).powf(s) * l * l / (g_full * zeta_2s);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::gauss_sum;
    use crate::maassforms::test_support::FIRST_EVEN_WIDE;

    fn zc(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn relf(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    fn disc(v: i64) -> Discriminant {
        Discriminant::new(v).unwrap()
    }

    #[test]
    fn h_m_modes_agree_on_grid() {
        for s in [1.2, 2.0] {
            for m in [0u64, 1, 3] {
                for t in [0.25, 0.7, 1.6] {
                    if m as f64 * t > 2.2 {
                        // the arc route cancels ~e^{2πmt} at double precision
                        continue;
                    }
                    let closed = h_m(m, t, s, HmMode::Closed).unwrap();
                    let quad = h_m(m, t, s, HmMode::Quadrature).unwrap();
                    assert!(
                        (closed - quad).abs() <= 1e-7 * closed.abs().max(1.0),
                        "m = {m}, t = {t}, s = {s}: closed {closed} vs quadrature {quad}"
                    );
                }
            }
        }
        // reference point away from the grid
        let closed = h_m(1, 0.7, 1.8, HmMode::Closed).unwrap();
        let quad = h_m(1, 0.7, 1.8, HmMode::Quadrature).unwrap();
        assert!((closed - quad).abs() <= 1e-8 * closed.abs().max(1.0));
    }

    #[test]
    fn h_zero_closed_forms_are_elementary() {
        // s = 1 gives 2t, s = 2 gives πt²
        let t = 0.83;
        assert!((h_m(0, t, 1.0, HmMode::Closed).unwrap() - 2.0 * t).abs() < 1e-12);
        assert!((h_m(0, t, 2.0, HmMode::Closed).unwrap() - PI * t * t).abs() < 1e-12);
    }

    #[test]
    fn h_m_rejects_bad_parameters() {
        assert!(matches!(
            h_m(1, 0.0, 1.5, HmMode::Closed),
            Err(CycleError::BadParameter(_))
        ));
        assert!(matches!(
            h_m(1, -0.3, 1.5, HmMode::Closed),
            Err(CycleError::BadParameter(_))
        ));
        assert!(matches!(
            h_m(1, 0.5, 0.0, HmMode::Quadrature),
            Err(CycleError::BadParameter(_))
        ));
    }

    #[test]
    fn downward_orientation_folds_into_plain_dy_integral() {
        // i ∫ h(z) y^s dz along the downward vertical line at x₀ must equal
        // +∫₀^∞ h(x₀+iy) y^s dy; with h = e^{iz} both are e^{ix₀} Γ(s+1)
        let (x0, s) = (0.3f64, 1.7f64);
        let prec = Precision::standard();
        let parametrized = integrate(
            |tau: f64| {
                let y = (1.0 - tau) / tau;
                let h = (Complex64::i() * zc(x0, y)).exp();
                let dz_dtau = Complex64::i() * (-1.0 / (tau * tau));
                Complex64::i() * h * y.powf(s) * dz_dtau
            },
            Domain::Finite {
                a: 1e-12,
                b: 1.0 - 1e-12,
            },
            &prec,
        )
        .unwrap()
        .value;
        let folded = integrate(
            |y: f64| (Complex64::i() * zc(x0, y)).exp() * y.powf(s),
            Domain::SemiInfinite {
                a: 0.0,
                decay: DecayHint::Exponential { rate: 1.0 },
            },
            &prec,
        )
        .unwrap()
        .value;
        let expected = gamma_complex(zc(s + 1.0, 0.0)).unwrap().re
            * Complex64::from_polar(1.0, x0);
        assert!((parametrized - expected).norm() < 1e-9 * expected.norm());
        assert!((folded - expected).norm() < 1e-9 * expected.norm());
    }

    #[test]
    fn gauss_sum_unfolding_matches_cycle_sum() {
        // unfold Σ_c (d/c) ∫ φ y^{s−1} dy against the Fourier expansion:
        // 2 Σ_{n≠0} a(|n|) G(−n, d) ∫₀^∞ y^{s−1/2} K_{ir}(2π|n|y) dy with
        // the Mellin integral 2^{s−3/2}(2πn)^{−s−1/2}|Γ((s+1/2)/2 + ir/2)|²
        let phi = &*FIRST_EVEN_WIDE;
        let s = 2.0;
        let prec = Precision::standard();
        let gamma_pair = gamma_complex(zc(0.5 * (s + 0.5), 0.5 * phi.r()))
            .unwrap()
            .norm_sqr();
        for dval in [1i64, 5] {
            let d = disc(dval);
            let quadrature = cycle_sum_maass(phi, d, s, &prec).unwrap();
            let mut termwise = 0.0;
            for (i, &a) in phi.coefficients().iter().enumerate() {
                let n = (i + 1) as i64;
                let g_both = (gauss_sum(-n, d) + gauss_sum(n, d)).re;
                let mellin = 2.0f64.powf(s - 1.5)
                    * (2.0 * PI * n as f64).powf(-s - 0.5)
                    * gamma_pair;
                termwise += 2.0 * a * g_both * mellin;
            }
            assert!(
                relf(quadrature, termwise) < 1e-6,
                "d = {dval}: quadrature {quadrature:e} vs termwise {termwise:e}"
            );
        }
    }

    #[test]
    fn cycle_sum_is_stable_under_split_choice() {
        let phi = &*FIRST_EVEN_WIDE;
        let prec = Precision::standard();
        let d = disc(5);
        let at_half = cycle_sum_maass_split(phi, d, 2.0, 0.5, &prec).unwrap();
        let at_one = cycle_sum_maass_split(phi, d, 2.0, 1.0, &prec).unwrap();
        assert!(
            relf(at_half, at_one) < 1e-8,
            "split 0.5: {at_half:e}, split 1.0: {at_one:e}"
        );
    }

    #[test]
    fn maass_cycle_sum_matches_gamma_l_formula() {
        let phi = &*FIRST_EVEN_WIDE;
        let prec = Precision::standard();
        let d = disc(5);
        let lhs = cycle_sum_maass(phi, d, 2.0, &prec).unwrap();
        let rhs = rhs_formula(phi, d, 2.0).unwrap();
        assert!(
            relf(lhs, rhs) < 1e-4,
            "cycle sum {lhs:e} vs closed form {rhs:e}"
        );
    }

    #[test]
    fn dz_cycle_sum_matches_gamma_l_formula() {
        let phi = &*FIRST_EVEN_WIDE;
        let prec = Precision::standard();
        let d = disc(-3);
        let lhs = cycle_sum_maass_dz(phi, d, 2.0, &prec).unwrap();
        let rhs = rhs_formula(phi, d, 2.0).unwrap();
        assert!(
            lhs.im.abs() <= 1e-6 * lhs.norm(),
            "imaginary residue {:e} on {:e}",
            lhs.im,
            lhs.norm()
        );
        assert!(
            relf(lhs.re, rhs) < 1e-3,
            "dz cycle sum {:e} vs closed form {rhs:e}",
            lhs.re
        );
    }

    #[test]
    fn dz_integrand_vanishes_at_both_ends() {
        // on the line x = −1/3 the integrand ∂_zφ · y² dies off toward both
        // the cusp at −1/3 (pullback height ~ 1/(9y)) and the cusp at ∞
        let phi = &*FIRST_EVEN_WIDE;
        let prec = Precision::standard();
        let sample = |y: f64| {
            phi.evaluate_dz(zc(-1.0 / 3.0, y), &prec).unwrap().value.norm() * y * y
        };
        let mid = sample(1.0);
        assert!(sample(0.004) < 1e-10 * mid);
        assert!(sample(30.0) < 1e-10 * mid);
    }

    #[test]
    fn rhs_formula_routes_by_s() {
        let phi = &*FIRST_EVEN_WIDE;
        let direct = rhs_formula(phi, disc(5), 2.0).unwrap();
        assert!(direct.is_finite() && direct > 0.0);
        let central = rhs_formula(phi, disc(-3), 0.0).unwrap();
        assert!(central.is_finite());
        assert!(matches!(
            rhs_formula(phi, disc(5), 0.5),
            Err(CycleError::BadParameter(_))
        ));
    }

    #[test]
    fn eisenstein_cycle_identity_for_unit_discriminant() {
        let prec = Precision::standard();
        let (lhs, rhs) = eisenstein_cycle_check(disc(1), 2.0, &prec).unwrap();
        // ζ(2)²/ζ(4) · Γ(1)²/Γ(2) = 5/2 exactly
        assert!((rhs - 2.5).abs() < 1e-9, "rhs {rhs}");
        assert!(relf(lhs, rhs) < 1e-4, "lhs {lhs} vs rhs {rhs}");
    }

    #[test]
    fn eisenstein_cycle_identity_for_d_five() {
        let prec = Precision::standard();
        let (lhs, rhs) = eisenstein_cycle_check(disc(5), 2.0, &prec).unwrap();
        assert!(relf(lhs, rhs) < 1e-4, "lhs {lhs} vs rhs {rhs}");
    }

    #[test]
    fn job_dispatch_validates_inputs() {
        let phi = &*FIRST_EVEN_WIDE;
        let job = |d: i64, s: f64, integrand: CycleIntegrand| CycleIntegralJob {
            d: disc(d),
            s,
            integrand,
            quad: Precision::standard(),
        };
        assert!(matches!(
            job(5, 2.0, CycleIntegrand::EisensteinTruncatedDz).run(None),
            Err(CycleError::Unsupported(_))
        ));
        assert!(matches!(
            job(5, 2.0, CycleIntegrand::Maass).run(None),
            Err(CycleError::BadParameter(_))
        ));
        assert!(matches!(
            job(-3, 2.0, CycleIntegrand::Maass).run(Some(phi)),
            Err(CycleError::BadParameter(_))
        ));
        assert!(matches!(
            job(5, 2.0, CycleIntegrand::MaassDz).run(Some(phi)),
            Err(CycleError::BadParameter(_))
        ));
        assert!(matches!(
            job(5, 1.0, CycleIntegrand::EisensteinTruncated).run(None),
            Err(CycleError::BadParameter(_))
        ));
        let pair = job(5, 2.0, CycleIntegrand::Maass).run(Some(phi)).unwrap();
        assert!((pair.lhs - pair.rhs).norm() < 1e-4 * pair.rhs.norm());
    }
}
