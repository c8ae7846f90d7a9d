//! Reading and writing Fourier coefficient files.
//!
//! The on-disk format is a small line-oriented text format:
//!
//! ```text
//! r=13.7797513518887
//! parity=even
//! 1,1
//! 2,-0.5417352370657103
//! 3,0.1006526144280345
//! ...
//! ```
//!
//! Line 1 holds the spectral parameter, line 2 the parity, and every
//! subsequent line is an `n,a(n)` pair with `n` strictly increasing from 1.
//! Floats are written with Rust's shortest round-trip formatting, so a
//! save/load/save cycle reproduces the file byte for byte.

use std::fs;
use std::path::Path;

use super::{MaassError, MaassForm, Parity};

/// Diagnostics produced while loading a coefficient file.
#[derive(Debug, Clone)]
pub struct LoadReport {
    /// True when the stored a(1) differed from 1 and the coefficients were
    /// rescaled to restore the a(1) = 1 normalization.
    pub rescaled: bool,
    /// Factor the stored coefficients were multiplied by (1/a_stored(1)).
    pub rescale_factor: f64,
    /// Largest relative Hecke residual |a(p)a(q) - a(pq)| found during the
    /// coprime spot check, as a fraction of max(|a(p)a(q)|, 1).
    pub max_hecke_residual: f64,
}

/// Writes a form's spectral data and coefficients to `path`.
///
/// The format is documented at module level. Coefficients are written for
/// n = 1..=N in order with shortest round-trip float formatting.
pub fn save_coefficients(form: &MaassForm, path: &Path) -> Result<(), MaassError> {
    let mut out = String::with_capacity(32 * (form.max_n() as usize + 2));
    out.push_str(&format!("r={}\n", form.r()));
    out.push_str(match form.parity() {
        Parity::Even => "parity=even\n",
        Parity::Odd => "parity=odd\n",
    });
    for n in 1..=form.max_n() {
        let a = form.coefficient(n)?;
        out.push_str(&format!("{},{}\n", n, a));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a coefficient file written by [`save_coefficients`].
///
/// Parsing is strict: malformed headers, out-of-order indices, and
/// unparsable numbers are reported with their line number. If the stored
/// a(1) differs from 1 the whole list is rescaled by 1/a(1) (recorded in
/// the report) so the returned form always satisfies a(1) = 1. After
/// loading, a Hecke spot check `a(p)a(q) = a(pq)` over small coprime pairs
/// must hold to 1e-5 relative or the file is rejected as not being a
/// plausible Hecke eigenform.
pub fn load_coefficients(path: &Path) -> Result<(MaassForm, LoadReport), MaassError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (line_no, first) = lines.next().ok_or_else(|| MaassError::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let r: f64 = first
        .strip_prefix("r=")
        .ok_or_else(|| MaassError::Parse {
            line: line_no + 1,
            msg: format!("expected `r=<value>`, found {first:?}"),
        })?
        .trim()
        .parse()
        .map_err(|e| MaassError::Parse {
            line: line_no + 1,
            msg: format!("bad spectral parameter: {e}"),
        })?;

    let (line_no, second) = lines.next().ok_or_else(|| MaassError::Parse {
        line: 2,
        msg: "missing parity line".into(),
    })?;
    let parity = match second
        .strip_prefix("parity=")
        .ok_or_else(|| MaassError::Parse {
            line: line_no + 1,
            msg: format!("expected `parity=even|odd`, found {second:?}"),
        })?
        .trim()
    {
        "even" => Parity::Even,
        "odd" => Parity::Odd,
        other => {
            return Err(MaassError::Parse {
                line: line_no + 1,
                msg: format!("unknown parity {other:?}"),
            })
        }
    };

    let mut coeffs: Vec<f64> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (n_str, a_str) = trimmed.split_once(',').ok_or_else(|| MaassError::Parse {
            line: line_no,
            msg: format!("expected `n,a(n)`, found {trimmed:?}"),
        })?;
        let n: usize = n_str.trim().parse().map_err(|e| MaassError::Parse {
            line: line_no,
            msg: format!("bad index: {e}"),
        })?;
        if n != coeffs.len() + 1 {
            return Err(MaassError::Parse {
                line: line_no,
                msg: format!(
                    "coefficient indices must increase by 1 from 1; expected {}, found {}",
                    coeffs.len() + 1,
                    n
                ),
            });
        }
        let a: f64 = a_str.trim().parse().map_err(|e| MaassError::Parse {
            line: line_no,
            msg: format!("bad coefficient: {e}"),
        })?;
        if !a.is_finite() {
            return Err(MaassError::Parse {
                line: line_no,
                msg: format!("non-finite coefficient {a}"),
            });
        }
        coeffs.push(a);
    }

    if coeffs.is_empty() {
        return Err(MaassError::Parse {
            line: 3,
            msg: "no coefficient lines".into(),
        });
    }

    let a1 = coeffs[0];
    if a1 == 0.0 || !a1.is_finite() {
        return Err(MaassError::BadNormalization(a1));
    }
    let rescaled = (a1 - 1.0).abs() > 1e-9;
    let rescale_factor = 1.0 / a1;
    if rescaled {
        for a in &mut coeffs {
            *a *= rescale_factor;
        }
    }
    coeffs[0] = 1.0;

    let max_hecke_residual = hecke_spot_check(&coeffs)?;

    let form = MaassForm::new(r, parity, coeffs)?;
    Ok((
        form,
        LoadReport {
            rescaled,
            rescale_factor,
            max_hecke_residual,
        },
    ))
}

/// Checks a(p)a(q) = a(pq) over the small coprime prime pairs that fit in
/// the coefficient range, returning the worst relative residual.
fn hecke_spot_check(coeffs: &[f64]) -> Result<f64, MaassError> {
    const PRIMES: [usize; 6] = [2, 3, 5, 7, 11, 13];
    let n = coeffs.len();
    let mut worst: f64 = 0.0;
    for (i, &p) in PRIMES.iter().enumerate() {
        for &q in &PRIMES[i + 1..] {
            if p * q > n {
                continue;
            }
            let lhs = coeffs[p - 1] * coeffs[q - 1];
            let rhs = coeffs[p * q - 1];
            let rel = (lhs - rhs).abs() / lhs.abs().max(1.0);
            worst = worst.max(rel);
        }
    }
    if worst > 1e-5 {
        return Err(MaassError::InvariantViolation(format!(
            "Hecke multiplicativity fails: worst relative residual {worst:.3e} exceeds 1e-5"
        )));
    }
    Ok(worst)
}
