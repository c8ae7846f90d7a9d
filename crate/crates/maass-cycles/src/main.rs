//! Command-line front end: solve for a form, run verification campaigns,
//! tabulate |b(d)|², and evaluate the exponential sums ad hoc.

use clap::{Parser, Subcommand, ValueEnum};
use maass_cycles::arithmetic::{gauss_sum, kloosterman, kloosterman_plus, Discriminant};
use maass_cycles::harness::{
    compute_b_coefficient, resolve_form, run_campaign, BMode, CampaignConfig, FormSource,
    HarnessError, ReportFormat,
};
use maass_cycles::maassforms::{hejhal_solve, save_coefficients, SolverParams};
use maass_cycles::numerics::Precision;
use serde::Serialize;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "maass-cycles",
    version,
    about = "Cycle-integral identity checks for even Hecke-Maass cusp forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> ReportFormat {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SumKind {
    /// Classical Kloosterman sum K(m, n; c)
    Kloosterman,
    /// Plus-space half-integral-weight sum K⁺(m, n; c), 4 | c
    KloostermanPlus,
    /// Gauss sum G(n, d) over residues mod |d|
    Gauss,
}

#[derive(Subcommand)]
enum Command {
    /// Locate an even Maass form in a spectral bracket, write coefficients
    Solve {
        /// Spectral bracket for r as LO:HI
        #[arg(long, value_parser = parse_bracket, default_value = "13.5:14.0")]
        r_bracket: (f64, f64),
        /// Number of Fourier coefficients to produce
        #[arg(long, default_value_t = 3600)]
        n_coeffs: usize,
        /// Output coefficient file
        #[arg(long)]
        coeffs: PathBuf,
    },
    /// Run a verification campaign and emit the report
    Verify {
        /// Campaign config (TOML); omitted = built-in default campaign
        #[arg(long)]
        config: Option<PathBuf>,
        /// Coefficient file overriding the config's form source
        #[arg(long)]
        coeffs: Option<PathBuf>,
        /// Keep only these discriminants (comma separated)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        d: Option<Vec<i64>>,
        /// Override s for every check that takes one
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        /// Override every check's tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Override the Kloosterman series cutoff
        #[arg(long)]
        max_c: Option<u64>,
        /// Report file; omitted = stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report encoding
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Fill runtime_ms in rows (reports stop being byte-identical)
        #[arg(long)]
        timings: bool,
    },
    /// Tabulate |b(d)|² by both displays
    BTable {
        /// Coefficient file; omitted = solve over --r-bracket
        #[arg(long)]
        coeffs: Option<PathBuf>,
        /// Spectral bracket used when no coefficient file is given
        #[arg(long, value_parser = parse_bracket, default_value = "13.5:14.0")]
        r_bracket: (f64, f64),
        /// Coefficients to solve for when no file is given
        #[arg(long, default_value_t = 3600)]
        n_coeffs: usize,
        /// Discriminants to tabulate (comma separated)
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        d: Vec<i64>,
        /// Table file; omitted = stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Evaluate one exponential sum
    Sums {
        #[arg(long, value_enum)]
        kind: SumKind,
        /// First index
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        m: i64,
        /// Second index (unused for gauss)
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        n: i64,
        /// Modulus for the Kloosterman kinds
        #[arg(long)]
        c: Option<u64>,
        /// Fundamental discriminant for gauss
        #[arg(long, allow_hyphen_values = true)]
        d: Option<i64>,
    },
}

fn parse_bracket(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {text:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    if !(lo > 0.0 && hi > lo) {
        return Err(format!("need 0 < LO < HI, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Serialize)]
struct BTableRow {
    d: i64,
    b2_cycle: f64,
    b2_lvalue: f64,
    rel_err: f64,
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), HarnessError> {
    match out {
        Some(path) => {
            fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, HarnessError> {
    match cli.command {
        Command::Solve {
            r_bracket,
            n_coeffs,
            coeffs,
        } => {
            let (phi, report) = hejhal_solve(r_bracket, n_coeffs, &SolverParams::default())?;
            save_coefficients(&phi, &coeffs)?;
            println!(
                "r = {} in [{}, {}], height agreement {:.3e}, hecke residual {:.3e}, {} coefficients -> {}",
                report.r,
                report.bracket.0,
                report.bracket.1,
                report.height_agreement,
                report.hecke_residual,
                report.n_coeffs,
                coeffs.display()
            );
            Ok(0)
        }
        Command::Verify {
            config,
            coeffs,
            d,
            s,
            tol,
            max_c,
            out,
            format,
            timings,
        } => {
            let mut campaign = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| {
                        HarnessError::Config(format!("cannot read {}: {e}", path.display()))
                    })?;
                    CampaignConfig::parse_toml(&text)?
                }
                None => CampaignConfig::default_campaign(),
            };
            if let Some(path) = coeffs {
                campaign.form = FormSource::from_file(path);
            }
            if let Some(keep) = d {
                for check in &mut campaign.checks {
                    check.d.retain(|dv| keep.contains(dv));
                }
                campaign.checks.retain(|check| !check.d.is_empty());
            }
            if let Some(s) = s {
                for check in &mut campaign.checks {
                    if check.s.is_some() {
                        check.s = Some(s);
                    }
                }
            }
            if let Some(tol) = tol {
                for check in &mut campaign.checks {
                    check.tol = tol;
                }
            }
            if let Some(max_c) = max_c {
                for check in &mut campaign.checks {
                    check.max_c = max_c;
                }
            }
            if let Some(path) = out {
                campaign.output.path = Some(path);
            }
            campaign.output.format = format.into();
            let (report, solver) = run_campaign(&campaign, timings)?;
            if let Some(sr) = solver {
                eprintln!(
                    "solved r = {} (height agreement {:.3e}, hecke residual {:.3e})",
                    sr.r, sr.height_agreement, sr.hecke_residual
                );
            }
            let text = report.render(campaign.output.format)?;
            emit(&text, campaign.output.path.as_ref())?;
            let (pass, fail) = report.rows.iter().fold((0, 0), |(p, f), row| {
                match row.status {
                    maass_cycles::harness::RowStatus::Pass => (p + 1, f),
                    maass_cycles::harness::RowStatus::Fail => (p, f + 1),
                    maass_cycles::harness::RowStatus::Skipped => (p, f),
                }
            });
            eprintln!("{} rows: {pass} pass, {fail} fail", report.rows.len());
            Ok(if report.any_fail() { 1 } else { 0 })
        }
        Command::BTable {
            coeffs,
            r_bracket,
            n_coeffs,
            d,
            out,
            format,
        } => {
            let source = match coeffs {
                Some(path) => FormSource::from_file(path),
                None => FormSource::solve_bracket(r_bracket.0, r_bracket.1, n_coeffs),
            };
            let (phi, _) = resolve_form(&source, true)?;
            let prec = Precision::standard();
            let mut rows = Vec::with_capacity(d.len());
            for dv in d {
                let disc = Discriminant::new(dv)
                    .map_err(|e| HarnessError::Config(format!("d = {dv}: {e}")))?;
                let b2_cycle = compute_b_coefficient(&phi, disc, BMode::Cycle, &prec)?;
                let b2_lvalue = compute_b_coefficient(&phi, disc, BMode::Lvalue, &prec)?;
                let rel_err = (b2_cycle - b2_lvalue).abs()
                    / b2_cycle.abs().max(b2_lvalue.abs()).max(1e-300);
                rows.push(BTableRow {
                    d: dv,
                    b2_cycle,
                    b2_lvalue,
                    rel_err,
                });
            }
            let text = match ReportFormat::from(format) {
                ReportFormat::Csv => {
                    let mut text = String::from("d,b2_cycle,b2_lvalue,rel_err\n");
                    for row in &rows {
                        text.push_str(&format!(
                            "{},{},{},{}\n",
                            row.d, row.b2_cycle, row.b2_lvalue, row.rel_err
                        ));
                    }
                    text
                }
                ReportFormat::Json => {
                    let mut text = serde_json::to_string_pretty(&rows)
                        .map_err(HarnessError::Json)?;
                    text.push('\n');
                    text
                }
            };
            emit(&text, out.as_ref())?;
            Ok(0)
        }
        Command::Sums { kind, m, n, c, d } => {
            match kind {
                SumKind::Kloosterman => {
                    let c = c.ok_or_else(|| {
                        HarnessError::Config("kloosterman needs --c".into())
                    })?;
                    println!("K({m},{n};{c}) = {}", kloosterman(m, n, c)?);
                }
                SumKind::KloostermanPlus => {
                    let c = c.ok_or_else(|| {
                        HarnessError::Config("kloosterman-plus needs --c".into())
                    })?;
                    println!("K+({m},{n};{c}) = {}", kloosterman_plus(m, n, c)?);
                }
                SumKind::Gauss => {
                    let dv = d.ok_or_else(|| HarnessError::Config("gauss needs --d".into()))?;
                    let disc = Discriminant::new(dv)
                        .map_err(|e| HarnessError::Config(format!("d = {dv}: {e}")))?;
                    let g = gauss_sum(m, disc);
                    println!("G({m},{dv}) = {} + {}i", g.re, g.im);
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                HarnessError::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
