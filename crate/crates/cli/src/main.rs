//! Command line front end: matrix I/O, family selection, critical point
//! computations, chamber scans, and the certification suites.
//!
//! Matrices travel as JSON files; small vectors ride the command line as
//! comma-separated decimals. Exit codes: 0 success, 2 unusable input,
//! 3 non-generic data, 4 solver failure, 5 verification failure.

use clap::{Parser, Subcommand};
use hddeg::chambers::{self, ChambersError, GridSpec};
use hddeg::config::Tolerances;
use hddeg::cxmat::{svd, CxmatError};
use hddeg::lift::{eckart_young, hd_poly, lift_critical, LiftError};
use hddeg::slices::{genericity_check, SliceError, SliceFamily};
use hddeg::verify::{
    lemma_complex_suite, lemma_rd_suite, lemma_skew_suite, oracle_suite, splitting_suite,
    SuiteReport, VerifyError,
};
use hddeg::CMat;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hddeg",
    version,
    about = "Hermitian distance critical points via the singular value slice"
)]
struct Cli {
    /// Certification tolerance for residual and orthogonality gates.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for scans (0 = automatic). Never changes output.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Singular value decomposition of a matrix JSON file.
    Svd {
        /// Path to the matrix JSON.
        matrix: PathBuf,
    },
    /// Real distance critical points on a slice family.
    Critical {
        /// Family selector as inline JSON, e.g. '{"family":"detmag"}'.
        #[arg(long)]
        family: String,
        /// Data point as comma-separated decimals.
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Critical points of the matrix distance problem, via the slice.
    Lift {
        /// Family selector as inline JSON, e.g. '{"family":"rank","n":3,"r":1}'.
        #[arg(long)]
        family: String,
        /// Data matrix as a JSON file.
        matrix: PathBuf,
    },
    /// All critical rank-k matrices for a data matrix.
    EckartYoung {
        /// Data matrix as a JSON file.
        matrix: PathBuf,
        /// Target rank.
        #[arg(long)]
        k: usize,
    },
    /// Coefficients of the squared-distance polynomial for rank at most r.
    Hdpoly {
        /// Data matrix as a JSON file.
        matrix: PathBuf,
        /// Rank bound.
        #[arg(long)]
        r: usize,
    },
    /// Predicted-versus-observed counts over a parameter grid, as CSV.
    ChamberScan {
        /// Family selector as inline JSON; detmag and parabola only.
        #[arg(long)]
        family: String,
        /// y1 axis as min,max,steps.
        #[arg(long, allow_hyphen_values = true)]
        y1: String,
        /// y2 axis as min,max,steps. Defaults to the y1 axis.
        #[arg(long, allow_hyphen_values = true)]
        y2: Option<String>,
    },
    /// Certification suites; nonzero exit when any check fails.
    Verify {
        /// One of: rd, complex, skew, splitting, oracle, all.
        suite: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn code_for_mat(e: &CxmatError) -> u8 {
    match e {
        CxmatError::ConvergenceFailure { .. } => 4,
        _ => 2,
    }
}

fn code_for_slice(e: &SliceError) -> u8 {
    match e {
        SliceError::NonGenericData(_) => 3,
        SliceError::Solver(_) => 4,
        _ => 2,
    }
}

fn code_for_lift(e: &LiftError) -> u8 {
    match e {
        LiftError::Mat(m) => code_for_mat(m),
        LiftError::Slice(s) => code_for_slice(s),
        _ => 2,
    }
}

fn code_for_verify(e: &VerifyError) -> u8 {
    match e {
        VerifyError::Mat(m) => code_for_mat(m),
        VerifyError::Slice(s) => code_for_slice(s),
        VerifyError::Lift(l) => code_for_lift(l),
        VerifyError::DegenerateY(_) => 3,
        VerifyError::Unsupported(_) => 2,
    }
}

fn code_for_chambers(e: &ChambersError) -> u8 {
    match e {
        ChambersError::Slice(s) => code_for_slice(s),
        _ => 2,
    }
}

fn read_matrix(path: &Path) -> Result<CMat, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn parse_family(text: &str) -> Result<SliceFamily, Failure> {
    let family: SliceFamily =
        serde_json::from_str(text).map_err(|e| fail(2, format!("family selector: {e}")))?;
    family
        .validate()
        .map_err(|e| fail(code_for_slice(&e), format!("family selector: {e}")))?;
    Ok(family)
}

fn parse_vector(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|piece| {
            let v: f64 = piece
                .trim()
                .parse()
                .map_err(|e| fail(2, format!("bad decimal {piece:?}: {e}")))?;
            if !v.is_finite() {
                return Err(fail(2, format!("non-finite value {piece:?}")));
            }
            Ok(v)
        })
        .collect()
}

fn parse_axis(text: &str) -> Result<(f64, f64, usize), Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(fail(2, format!("axis {text:?} is not min,max,steps")));
    }
    let min: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| fail(2, format!("axis {text:?}: {e}")))?;
    let max: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| fail(2, format!("axis {text:?}: {e}")))?;
    let steps: usize = parts[2]
        .trim()
        .parse()
        .map_err(|e| fail(2, format!("axis {text:?}: {e}")))?;
    Ok((min, max, steps))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| fail(2, format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{}", text.trim_end_matches('\n')) {
                Ok(()) => Ok(()),
                // A closed pipe (e.g. `hddeg ... | head`) is not a failure
                // of the computation; finish quietly.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {
                    std::process::exit(0);
                }
                Err(e) => Err(fail(2, format!("cannot write to stdout: {e}"))),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if !(cli.tol > 0.0) || !cli.tol.is_finite() {
        return Err(fail(2, format!("--tol must be positive, got {}", cli.tol)));
    }
    if cli.threads > 0 {
        // The pool is global and may already exist (tests call run twice);
        // a second build attempt is harmless because output never depends
        // on the thread count.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let mut tol = Tolerances::default();
    tol.orthogonality = cli.tol;

    match &cli.cmd {
        Cmd::Svd { matrix } => {
            let a = read_matrix(matrix)?;
            let f = svd(&a, &tol).map_err(|e| fail(code_for_mat(&e), e.to_string()))?;
            let body = json!({
                "u": f.u,
                "sigma": f.sigma,
                "v": f.v,
                "reconstruction_residual": f.reconstruction_residual(&a),
                "orthonormality_defect": f.orthonormality_defect(),
            });
            emit(&cli.out, &serde_json::to_string_pretty(&body).unwrap())
        }
        Cmd::Critical { family, y } => {
            let family = parse_family(family)?;
            let y = parse_vector(y)?;
            let genericity = genericity_check(&family, &y, &tol)
                .map_err(|e| fail(code_for_slice(&e), e.to_string()))?;
            if !genericity.ok {
                return Err(fail(
                    3,
                    format!("non-generic data: {}", genericity.diagnostics.join("; ")),
                ));
            }
            let points = family
                .ed_critical(&y, &tol)
                .map_err(|e| fail(code_for_slice(&e), e.to_string()))?;
            let body = json!({
                "family": family,
                "y": y,
                "genericity": genericity,
                "count": points.len(),
                "points": points,
            });
            emit(&cli.out, &serde_json::to_string_pretty(&body).unwrap())
        }
        Cmd::Lift { family, matrix } => {
            let family = parse_family(family)?;
            let y = read_matrix(matrix)?;
            let report =
                lift_critical(&family, &y, &tol).map_err(|e| fail(code_for_lift(&e), e.to_string()))?;
            if !report.genericity.lift_ok {
                return Err(fail(
                    3,
                    format!(
                        "degenerate spectrum: {}",
                        report.genericity.diagnostics.join("; ")
                    ),
                ));
            }
            emit(&cli.out, &serde_json::to_string_pretty(&report).unwrap())
        }
        Cmd::EckartYoung { matrix, k } => {
            let y = read_matrix(matrix)?;
            let points =
                eckart_young(&y, *k, &tol).map_err(|e| fail(code_for_lift(&e), e.to_string()))?;
            let body = json!({ "k": k, "count": points.len(), "points": points });
            emit(&cli.out, &serde_json::to_string_pretty(&body).unwrap())
        }
        Cmd::Hdpoly { matrix, r } => {
            let y = read_matrix(matrix)?;
            let poly =
                hd_poly(&y, *r, &tol).map_err(|e| fail(code_for_lift(&e), e.to_string()))?;
            let body = json!({
                "r": r,
                "variable": "squared distance",
                "coeffs_ascending": poly.coeffs(),
            });
            emit(&cli.out, &serde_json::to_string_pretty(&body).unwrap())
        }
        Cmd::ChamberScan { family, y1, y2 } => {
            let family = parse_family(family)?;
            let (y1_min, y1_max, y1_steps) = parse_axis(y1)?;
            let (y2_min, y2_max, y2_steps) = match y2 {
                Some(axis) => parse_axis(axis)?,
                None => (y1_min, y1_max, y1_steps),
            };
            let grid = GridSpec {
                y1_min,
                y1_max,
                y1_steps,
                y2_min,
                y2_max,
                y2_steps,
            };
            let report = chambers::chamber_scan(&family, &grid, &tol)
                .map_err(|e| fail(code_for_chambers(&e), e.to_string()))?;
            emit(&cli.out, &report.to_csv())?;
            if !report.all_agree() {
                return Err(fail(
                    5,
                    format!(
                        "{} of {} checked cells disagree with the prediction",
                        report.checked - report.agreements,
                        report.checked
                    ),
                ));
            }
            Ok(())
        }
        Cmd::Verify { suite } => {
            let wanted: Vec<&str> = match suite.as_str() {
                "all" => vec!["rd", "complex", "skew", "splitting", "oracle"],
                "rd" | "complex" | "skew" | "splitting" | "oracle" => vec![suite.as_str()],
                other => return Err(fail(2, format!("unknown suite {other:?}"))),
            };
            let mut rows = Vec::new();
            let mut all_ok = true;
            for name in wanted {
                let report = run_suite(name, cli.seed, &tol)
                    .map_err(|e| fail(code_for_verify(&e), e.to_string()))?;
                all_ok &= report.ok;
                rows.push(json!({
                    "suite": name,
                    "cases": report.cases,
                    "max_defect": report.max_defect,
                    "ok": report.ok,
                }));
            }
            let body = json!({ "suites": rows, "ok": all_ok });
            emit(&cli.out, &serde_json::to_string_pretty(&body).unwrap())?;
            if !all_ok {
                return Err(fail(5, "verification failed"));
            }
            Ok(())
        }
    }
}

fn run_suite(name: &str, seed: u64, tol: &Tolerances) -> Result<SuiteReport, VerifyError> {
    match name {
        "rd" => lemma_rd_suite(seed, tol),
        "complex" => lemma_complex_suite(seed ^ 0x636f6d, tol),
        "skew" => lemma_skew_suite(seed ^ 0x736b65, tol),
        "splitting" => splitting_suite(seed ^ 0x73706c, 100, tol),
        "oracle" => oracle_suite(seed ^ 0x6f7261, 4, tol),
        other => Err(VerifyError::Unsupported(format!("suite {other:?}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
