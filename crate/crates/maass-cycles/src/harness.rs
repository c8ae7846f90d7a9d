//! Verification campaigns: identity checks packaged as report rows, a
//! config-driven runner, and the |b(d)|² closure computed two independent
//! ways.
//!
//! Every check evaluates both sides of one identity and records them in a
//! [`VerificationRow`] with `rel_err = |lhs−rhs| / max(|lhs|, |rhs|, 1e-300)`
//! and a pass/fail status against the configured tolerance. A campaign runs
//! its rows on a worker pool keyed by (check, discriminant) and assembles
//! the report in configuration order, so identical configs and coefficient
//! files produce byte-identical reports (timings are all zero unless
//! explicitly requested).
//!
//! The closure check ties the package together: |b(d)|² obtained from the
//! s = 0 cycle sums, divided by 12√π |d|^{3/2} ⟨φ,φ⟩, must match
//! |Γ(1/2 − sgn(d)/4 + ir/2)|² L(1/2, φ×χ_d) / (12π |d| ⟨φ,φ⟩) computed
//! from the central twisted L-value alone.

use crate::arithmetic::{ArithmeticError, Discriminant, PlusZeroEvaluator, SmallestPrimeFactors};
use crate::cycles::{
    cycle_sum_maass, cycle_sum_maass_dz, eisenstein_cycle_check, CycleError, CycleIntegralJob,
    CycleIntegrand,
};
use crate::lfunctions::{dirichlet_l, twisted_l_center, LFunctionError};
use crate::maassforms::{
    hejhal_solve, load_coefficients, MaassError, MaassForm, SolverParams, SolverReport,
};
use crate::numerics::{gamma_complex, zeta, NumericsError, Precision};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error(transparent)]
    Maass(#[from] MaassError),
    #[error(transparent)]
    LFunction(#[from] LFunctionError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("report serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("the form has no Petersson norm attached; solve or load one and call set_norm")]
    MissingNorm,
    #[error("|b(d)|² came out negative ({value:e}) in {mode} mode: convention bug")]
    NegativeSquare { mode: &'static str, value: f64 },
}

/// Outcome of one verification row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Pass => write!(f, "pass"),
            RowStatus::Fail => write!(f, "fail"),
            RowStatus::Skipped => write!(f, "skipped"),
        }
    }
}

/// One identity check: both sides, their distance, and the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationRow {
    pub check_id: String,
    pub d: i64,
    pub s_re: f64,
    pub s_im: f64,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub status: RowStatus,
    pub runtime_ms: u64,
}

impl VerificationRow {
    /// Builds a row from both sides of an identity; pass iff
    /// rel_err ≤ tol with rel_err = |lhs−rhs| / max(|lhs|, |rhs|, 1e-300).
    pub fn from_sides(
        check_id: &str,
        d: i64,
        s: Complex64,
        lhs: Complex64,
        rhs: Complex64,
        tol: f64,
    ) -> VerificationRow {
        let abs_err = (lhs - rhs).norm();
        let rel_err = abs_err / lhs.norm().max(rhs.norm()).max(1e-300);
        let status = if rel_err <= tol {
            RowStatus::Pass
        } else {
            RowStatus::Fail
        };
        VerificationRow {
            check_id: check_id.to_string(),
            d,
            s_re: s.re,
            s_im: s.im,
            lhs_re: lhs.re,
            lhs_im: lhs.im,
            rhs_re: rhs.re,
            rhs_im: rhs.im,
            abs_err,
            rel_err,
            status,
            runtime_ms: 0,
        }
    }

    /// A fail row for a check that errored out before producing both sides.
    /// The numeric fields are NaN; the message goes to the caller's log,
    /// never into the report, so reports stay deterministic.
    fn from_error(check_id: &str, d: i64, s: Complex64) -> VerificationRow {
        VerificationRow {
            check_id: check_id.to_string(),
            d,
            s_re: s.re,
            s_im: s.im,
            lhs_re: f64::NAN,
            lhs_im: f64::NAN,
            rhs_re: f64::NAN,
            rhs_im: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            status: RowStatus::Fail,
            runtime_ms: 0,
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.check_id,
            self.d,
            self.s_re,
            self.s_im,
            self.lhs_re,
            self.lhs_im,
            self.rhs_re,
            self.rhs_im,
            self.abs_err,
            self.rel_err,
            self.status,
            self.runtime_ms
        )
    }
}

/// Truncated plus-space Kloosterman Dirichlet series against its closed
/// form:
///
///   Σ_{c=1}^{max_c} K⁺(d, 0; 4c) c^{−s−1/2} = 4 L(s, χ_d) / ζ(2s),
///
/// valid for re(s) > 1 with the truncation error decaying like c^{−s+1/2+ε}.
pub fn kloosterman_identity_check(
    d: Discriminant,
    s: f64,
    max_c: u64,
    tol: f64,
) -> Result<VerificationRow, HarnessError> {
    if !(s > 1.0) {
        return Err(HarnessError::Config(format!(
            "kloosterman check needs s > 1, got {s}"
        )));
    }
    let dv = d.value();
    let spf = SmallestPrimeFactors::up_to(4 * max_c);
    let terms: Vec<Result<f64, ArithmeticError>> = (1..=max_c)
        .into_par_iter()
        .map_init(
            || PlusZeroEvaluator::new(&spf),
            |ev, c| ev.eval(dv, 4 * c).map(|k| k * (c as f64).powf(-s - 0.5)),
        )
        .collect();
    let mut lhs = 0.0;
    for t in terms {
        lhs += t?;
    }
    let rhs = 4.0 * dirichlet_l(Complex64::new(s, 0.0), d)?.re
        / zeta(Complex64::new(2.0 * s, 0.0))?.re;
    Ok(VerificationRow::from_sides(
        "kloosterman-plus",
        dv,
        Complex64::new(s, 0.0),
        Complex64::new(lhs, 0.0),
        Complex64::new(rhs, 0.0),
        tol,
    ))
}

/// Cycle sum of φ (or i∂_zφ for d < 0) against the Γ·L closed form.
pub fn theorem_identity_check(
    phi: &MaassForm,
    d: Discriminant,
    s: f64,
    prec: &Precision,
    tol: f64,
) -> Result<VerificationRow, HarnessError> {
    let integrand = if d.is_positive() {
        CycleIntegrand::Maass
    } else {
        CycleIntegrand::MaassDz
    };
    let job = CycleIntegralJob {
        d,
        s,
        integrand,
        quad: prec.clone(),
    };
    let pair = job.run(Some(phi))?;
    Ok(VerificationRow::from_sides(
        "theorem-cycle",
        d.value(),
        Complex64::new(s, 0.0),
        pair.lhs,
        pair.rhs,
        tol,
    ))
}

/// Truncated-Eisenstein cycle sum against its Dirichlet L-value closed form.
pub fn eisenstein_identity_check(
    d: Discriminant,
    s: f64,
    prec: &Precision,
    tol: f64,
) -> Result<VerificationRow, HarnessError> {
    let (lhs, rhs) = eisenstein_cycle_check(d, s, prec)?;
    Ok(VerificationRow::from_sides(
        "eisenstein-cycle",
        d.value(),
        Complex64::new(s, 0.0),
        Complex64::new(lhs, 0.0),
        Complex64::new(rhs, 0.0),
        tol,
    ))
}

/// Which display of |b(d)|² to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BMode {
    /// s = 0 cycle sums divided by 12√π |d|^{3/2} ⟨φ,φ⟩.
    Cycle,
    /// |Γ(1/2 − sgn(d)/4 + ir/2)|² L(1/2, φ×χ_d) / (12π |d| ⟨φ,φ⟩).
    Lvalue,
}

/// |b(d)|² for the half-integral-weight lift of φ, by either display.
/// Requires the Petersson norm to be attached to the form. The two modes
/// agreeing is the content of the verified theorem; a negative value means
/// a convention bug and is returned as an error, never clamped.
pub fn compute_b_coefficient(
    phi: &MaassForm,
    d: Discriminant,
    mode: BMode,
    prec: &Precision,
) -> Result<f64, HarnessError> {
    let norm = phi.norm().ok_or(HarnessError::MissingNorm)?;
    let dv = d.abs() as f64;
    let b2 = match mode {
        BMode::Cycle => {
            let raw = if d.is_positive() {
                cycle_sum_maass(phi, d, 0.0, prec)?
            } else {
                cycle_sum_maass_dz(phi, d, 0.0, prec)?.re
            };
            raw / (12.0 * PI.sqrt() * dv.powf(1.5) * norm)
        }
        BMode::Lvalue => {
            let sign_shift = if d.is_positive() { 0.25 } else { -0.25 };
            let w = Complex64::new(0.5 - sign_shift, 0.5 * phi.r());
            let gamma_pair = gamma_complex(w)?.norm_sqr();
            let l = twisted_l_center(phi, d)?;
            gamma_pair * l / (12.0 * PI * dv * norm)
        }
    };
    if b2 < 0.0 {
        return Err(HarnessError::NegativeSquare {
            mode: match mode {
                BMode::Cycle => "cycle",
                BMode::Lvalue => "lvalue",
            },
            value: b2,
        });
    }
    Ok(b2)
}

/// Cross-mode |b(d)|² agreement as a report row (s column fixed at 0).
pub fn b_agreement_check(
    phi: &MaassForm,
    d: Discriminant,
    prec: &Precision,
    tol: f64,
) -> Result<VerificationRow, HarnessError> {
    let cycle = compute_b_coefficient(phi, d, BMode::Cycle, prec)?;
    let lvalue = compute_b_coefficient(phi, d, BMode::Lvalue, prec)?;
    Ok(VerificationRow::from_sides(
        "b-agreement",
        d.value(),
        Complex64::new(0.0, 0.0),
        Complex64::new(cycle, 0.0),
        Complex64::new(lvalue, 0.0),
        tol,
    ))
}

fn default_n_coeffs() -> usize {
    3600
}

fn default_max_c() -> u64 {
    25000
}

fn default_tol() -> f64 {
    1e-4
}

/// Where the Maass form comes from: a coefficient file, or a Hejhal solve
/// over a spectral bracket. Exactly one of `coeffs` and `r_bracket` must be
/// set.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSource {
    #[serde(default)]
    pub coeffs: Option<PathBuf>,
    #[serde(default)]
    pub r_bracket: Option<(f64, f64)>,
    #[serde(default = "default_n_coeffs")]
    pub n_coeffs: usize,
}

impl FormSource {
    pub fn solve_bracket(lo: f64, hi: f64, n_coeffs: usize) -> FormSource {
        FormSource {
            coeffs: None,
            r_bracket: Some((lo, hi)),
            n_coeffs,
        }
    }

    pub fn from_file(path: PathBuf) -> FormSource {
        FormSource {
            coeffs: Some(path),
            r_bracket: None,
            n_coeffs: 0,
        }
    }
}

/// The identity families a campaign can exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Kloosterman,
    Theorem,
    Eisenstein,
    BAgreement,
}

impl CheckKind {
    fn needs_form(self) -> bool {
        matches!(self, CheckKind::Theorem | CheckKind::BAgreement)
    }

    fn needs_norm(self) -> bool {
        self == CheckKind::BAgreement
    }
}

/// One campaign entry: a check kind fanned out over a discriminant list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub kind: CheckKind,
    pub d: Vec<i64>,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_c")]
    pub max_c: u64,
}

/// Report destination and encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
}

/// A full campaign: form source, check list, output routing.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub form: FormSource,
    #[serde(default, rename = "check")]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl CampaignConfig {
    pub fn parse_toml(text: &str) -> Result<CampaignConfig, HarnessError> {
        let config: CampaignConfig =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// The default campaign: every identity family over its standard
    /// discriminant list at s = 2 (AFE central values only in the closure
    /// check, so quadrature and series bugs stay separated from AFE bugs).
    pub fn default_campaign() -> CampaignConfig {
        let spec = |kind, d: &[i64], s: Option<f64>, tol: f64| CheckSpec {
            kind,
            d: d.to_vec(),
            s,
            tol,
            max_c: default_max_c(),
        };
        CampaignConfig {
            form: FormSource::solve_bracket(13.5, 14.0, default_n_coeffs()),
            checks: vec![
                spec(CheckKind::Kloosterman, &[1, 5, 8, -3, -4], Some(2.0), 1e-4),
                spec(CheckKind::Theorem, &[1, 5, 8], Some(2.0), 1e-4),
                spec(CheckKind::Theorem, &[-3, -4], Some(2.0), 1e-3),
                spec(CheckKind::Eisenstein, &[1, 5], Some(2.0), 1e-4),
                spec(CheckKind::BAgreement, &[1, 5, -3, -4], None, 5e-3),
            ],
            output: OutputSpec::default(),
        }
    }

    /// Field-by-field validation: discriminants fundamental, s inside each
    /// check's convergence domain, a usable form source when needed.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let mut problems = Vec::new();
        if self.needs_form() {
            match (&self.form.coeffs, &self.form.r_bracket) {
                (Some(_), Some(_)) => problems.push(
                    "form: set exactly one of `coeffs` and `r_bracket`, not both".to_string(),
                ),
                (None, None) => problems.push(
                    "form: a check needs the Maass form; set `coeffs` or `r_bracket`".to_string(),
                ),
                (None, Some((lo, hi))) => {
                    if !(*lo > 0.0 && hi > lo) {
                        problems.push(format!("form.r_bracket: need 0 < lo < hi, got {lo}:{hi}"));
                    }
                    if self.form.n_coeffs < 64 {
                        problems.push(format!(
                            "form.n_coeffs: need at least 64, got {}",
                            self.form.n_coeffs
                        ));
                    }
                }
                (Some(_), None) => {}
            }
        }
        for (i, check) in self.checks.iter().enumerate() {
            let at = |field: &str| format!("check[{i}].{field}");
            if check.d.is_empty() {
                problems.push(format!("{}: empty discriminant list", at("d")));
            }
            for &dv in &check.d {
                if let Err(e) = Discriminant::new(dv) {
                    problems.push(format!("{}: {e}", at("d")));
                }
            }
            if !(check.tol > 0.0) {
                problems.push(format!("{}: tolerance must be positive", at("tol")));
            }
            match check.kind {
                CheckKind::Kloosterman => match check.s {
                    Some(s) if s > 1.0 => {}
                    other => problems.push(format!(
                        "{}: kloosterman needs s > 1, got {other:?}",
                        at("s")
                    )),
                },
                CheckKind::Eisenstein => {
                    match check.s {
                        Some(s) if s > 1.0 => {}
                        other => problems.push(format!(
                            "{}: eisenstein needs s > 1, got {other:?}",
                            at("s")
                        )),
                    }
                    if check.d.iter().any(|&dv| dv < 0) {
                        problems.push(format!(
                            "{}: eisenstein cycles are defined for d > 0 only",
                            at("d")
                        ));
                    }
                }
                CheckKind::Theorem => match check.s {
                    Some(s) if s.abs() < 1e-12 || (s >= 0.0 && s + 0.5 >= 1.7 - 1e-12) => {}
                    other => problems.push(format!(
                        "{}: theorem needs s = 0 or s ≥ 1.2 (L-series route), got {other:?}",
                        at("s")
                    )),
                },
                CheckKind::BAgreement => {}
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Config(problems.join("; ")))
        }
    }

    pub fn needs_form(&self) -> bool {
        self.checks.iter().any(|c| c.kind.needs_form())
    }

    pub fn needs_norm(&self) -> bool {
        self.checks.iter().any(|c| c.kind.needs_norm())
    }
}

/// Assembled campaign output.
#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub rows: Vec<VerificationRow>,
}

pub const CSV_HEADER: &str =
    "check_id,d,s_re,s_im,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,status,runtime_ms";

impl CampaignReport {
    pub fn any_fail(&self) -> bool {
        self.rows.iter().any(|r| r.status == RowStatus::Fail)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String, HarnessError> {
        let mut out = serde_json::to_string_pretty(&self.rows)?;
        out.push('\n');
        Ok(out)
    }

    pub fn render(&self, format: ReportFormat) -> Result<String, HarnessError> {
        match format {
            ReportFormat::Csv => Ok(self.to_csv()),
            ReportFormat::Json => self.to_json(),
        }
    }
}

/// Builds the form a campaign will verify against, attaching the Petersson
/// norm when some check divides by it.
pub fn resolve_form(
    source: &FormSource,
    need_norm: bool,
) -> Result<(MaassForm, Option<SolverReport>), HarnessError> {
    let (mut phi, report) = match (&source.coeffs, &source.r_bracket) {
        (Some(path), None) => {
            let (phi, _) = load_coefficients(path)?;
            (phi, None)
        }
        (None, Some(bracket)) => {
            let (phi, report) =
                hejhal_solve(*bracket, source.n_coeffs, &SolverParams::default())?;
            (phi, Some(report))
        }
        _ => {
            return Err(HarnessError::Config(
                "form: set exactly one of `coeffs` and `r_bracket`".into(),
            ))
        }
    };
    if need_norm {
        let norm = phi.petersson_norm(&Precision::standard())?;
        phi.set_norm(norm);
    }
    Ok((phi, report))
}

fn run_one_row(
    check: &CheckSpec,
    dv: i64,
    phi: Option<&MaassForm>,
    timings: bool,
) -> VerificationRow {
    let prec = Precision::standard();
    let s = check.s.unwrap_or(0.0);
    let started = Instant::now();
    let result: Result<VerificationRow, HarnessError> = (|| {
        let d = Discriminant::new(dv)?;
        match check.kind {
            CheckKind::Kloosterman => kloosterman_identity_check(d, s, check.max_c, check.tol),
            CheckKind::Theorem => {
                let phi = phi.ok_or(HarnessError::MissingNorm)?;
                theorem_identity_check(phi, d, s, &prec, check.tol)
            }
            CheckKind::Eisenstein => eisenstein_identity_check(d, s, &prec, check.tol),
            CheckKind::BAgreement => {
                let phi = phi.ok_or(HarnessError::MissingNorm)?;
                b_agreement_check(phi, d, &prec, check.tol)
            }
        }
    })();
    let check_id = match check.kind {
        CheckKind::Kloosterman => "kloosterman-plus",
        CheckKind::Theorem => "theorem-cycle",
        CheckKind::Eisenstein => "eisenstein-cycle",
        CheckKind::BAgreement => "b-agreement",
    };
    let mut row = match result {
        Ok(row) => row,
        Err(e) => {
            eprintln!("{check_id} d={dv}: {e}");
            VerificationRow::from_error(check_id, dv, Complex64::new(s, 0.0))
        }
    };
    if timings {
        row.runtime_ms = started.elapsed().as_millis() as u64;
    }
    row
}

/// Runs every row of the campaign on the rayon pool and assembles the
/// report in configuration order. Rows whose evaluation errors become fail
/// rows with NaN values (the error text goes to stderr only). `timings`
/// fills `runtime_ms`; leaving it off keeps reports byte-identical across
/// machines.
pub fn run_campaign(
    config: &CampaignConfig,
    timings: bool,
) -> Result<(CampaignReport, Option<SolverReport>), HarnessError> {
    config.validate()?;
    let (phi, solver_report) = if config.needs_form() {
        let (phi, report) = resolve_form(&config.form, config.needs_norm())?;
        (Some(phi), report)
    } else {
        (None, None)
    };
    let jobs: Vec<(&CheckSpec, i64)> = config
        .checks
        .iter()
        .flat_map(|check| check.d.iter().map(move |&dv| (check, dv)))
        .collect();
    let rows: Vec<VerificationRow> = jobs
        .par_iter()
        .map(|(check, dv)| run_one_row(check, *dv, phi.as_ref(), timings))
        .collect();
    Ok((CampaignReport { rows }, solver_report))
}
