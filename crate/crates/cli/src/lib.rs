//! Command-line front end. Every subcommand writes its result to `out`,
//! diagnostics to `err`, and returns a process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | PSD, or success |
//! | 1 | NotPSD |
//! | 2 | usage or input error |
//! | 3 | verification or sign-fact failure |
//! | 4 | Uncovered |

pub mod document;
pub mod parse;
mod render;

use std::fs;
use std::io::{self, Read, Write};

use anticirc::classifier::{classify, classify_generating, Tolerances, VerifyReport, CERTIFICATE_POINTS};
use anticirc::combinatorics::{residue_sum_table, sign_fact_report, sum_signs, PeriodicSequence};
use anticirc::oracle::{matrix_psd, sphere_min_with, SphereMinOptions};
use anticirc::poly::{eval_fast, eval_magnitude, eval_naive, eval_with_gradient};
use anticirc::tensor::DEFAULT_DENSE_CAP;
use anticirc::{ClassifyOptions, Execution, Status, Verdict};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::document::{Tensor, TensorDocument};
use crate::parse::{parse_integer, parse_list, parse_rational, parse_real};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_PSD: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_UNCOVERED: i32 = 4;

/// Relative agreement required between fast and naive evaluation.
pub const NAIVE_RTOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] anticirc::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn message(&self) -> String {
        self.to_string()
    }
}

#[derive(Debug, Parser)]
#[command(name = "anticirc", version, about = "Positive semi-definiteness of generalized anti-circulant Hankel tensors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Random starts of the sphere descent.
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
    /// Seed of the start generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run the starts on one thread.
    #[arg(long)]
    pub sequential: bool,
}

impl OracleArgs {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

fn real_arg(s: &str) -> Result<f64, String> {
    match parse_real(s) {
        Ok(v) if v >= 0.0 => Ok(v),
        Ok(v) => Err(format!("tolerance must be non-negative, got {v}")),
        Err(e) => Err(e.message()),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide positive semi-definiteness of the tensor in FILE ("-" for stdin).
    Classify {
        file: String,
        #[command(flatten)]
        oracle: OracleArgs,
        /// Relative tolerance for seed comparisons; 0 compares exactly.
        #[arg(long, value_parser = real_arg)]
        tolerance: Option<f64>,
        /// Round-trip the verdict through its document form and re-check every claim.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate f(x) at a comma-separated point.
    Eval {
        file: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
        /// Cross-check against entrywise summation when n^m is within the cap.
        #[arg(long)]
        naive: bool,
        #[arg(long)]
        gradient: bool,
        #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
        dense_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Exact residue-class sums of (a_1 + a_2 z + ..)^m modulo z^r - 1.
    Sums {
        m: usize,
        r: usize,
        #[arg(allow_hyphen_values = true)]
        pattern: String,
        #[arg(long)]
        json: bool,
    },
    /// Recompute every exact sign fact behind the index-three classification.
    Signfacts {
        #[arg(long)]
        json: bool,
    },
    /// Classify, then independently re-check the certificate or witness.
    Certify {
        file: String,
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long, value_parser = real_arg)]
        tolerance: Option<f64>,
        /// Check a saved `classify --json` document instead of classifying afresh.
        #[arg(long)]
        verdict: Option<String>,
        /// Random points for the power-sum identity.
        #[arg(long, default_value_t = CERTIFICATE_POINTS)]
        points: usize,
        /// Seed of the identity points.
        #[arg(long, default_value_t = 0)]
        point_seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Multistart minimization of f over the unit sphere (evidence, not proof).
    Oracle {
        file: String,
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        json: bool,
    },
    /// Alternating binomial sums D_i of a periodic sequence, and their signs.
    Theorem1 {
        /// Binomial order M.
        order: usize,
        /// One period u_0, .., u_{p-1} (exact rationals).
        #[arg(allow_hyphen_values = true)]
        u: String,
        #[arg(long)]
        json: bool,
    },
    /// The associated Hankel matrix and its eigenvalues.
    Hankelmatrix {
        file: String,
        #[arg(long)]
        json: bool,
    },
}

/// `classify --json` output; also the input of `certify --verdict`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictDocument {
    pub oracle_seed: u64,
    pub oracle_starts: usize,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerifyReport>,
}

fn read_source(path: &str) -> Result<String, CliError> {
    let io_err = |source| CliError::Io { path: path.to_string(), source };
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn load(path: &str) -> Result<TensorDocument, CliError> {
    TensorDocument::parse(&read_source(path)?).map_err(|e| CliError::Input(format!("{path}: {}", e.message())))
}

fn status_code(status: Status) -> i32 {
    match status {
        Status::Psd => EXIT_OK,
        Status::NotPsd => EXIT_NOT_PSD,
        Status::Uncovered => EXIT_UNCOVERED,
    }
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> io::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    writeln!(out, "{text}")
}

fn classify_document(doc: &TensorDocument, oracle: &OracleArgs, tolerance: Option<f64>) -> Result<Verdict, CliError> {
    let mut tolerances = Tolerances::default();
    if let Some(t) = tolerance.or(doc.tolerance) {
        tolerances.seed_equality = t;
        tolerances.necessary = t;
    }
    let opts = ClassifyOptions {
        tolerances,
        oracle_starts: oracle.starts,
        oracle_seed: oracle.seed,
        execution: oracle.execution(),
    };
    Ok(match &doc.tensor {
        Tensor::Circulant(spec) => classify(spec, &opts)?,
        Tensor::Generating(gen) => classify_generating(gen, &opts)?,
    })
}

/// Runs one subcommand. Errors map to [`EXIT_INPUT`] in [`main_with`].
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let io = |e: io::Error| CliError::Io { path: "<output>".into(), source: e };
    match cli.command {
        Command::Classify { file, oracle, tolerance, verify, json } => {
            let doc = load(&file)?;
            if oracle.starts == 0 {
                return Err(CliError::Input("--starts must be at least 1".into()));
            }
            let verdict = classify_document(&doc, &oracle, tolerance)?;
            let mut code = status_code(verdict.status);
            let mut record =
                VerdictDocument { oracle_seed: oracle.seed, oracle_starts: oracle.starts, verdict, verification: None };
            if verify {
                let text = serde_json::to_string(&record).map_err(|e| CliError::Input(e.to_string()))?;
                let back: VerdictDocument = serde_json::from_str(&text).map_err(|e| CliError::Input(e.to_string()))?;
                let report = back.verdict.verify(&doc.generating(), CERTIFICATE_POINTS, 0)?;
                if back != record || !report.passed() {
                    code = EXIT_VERIFY;
                }
                record.verification = Some(report);
            }
            if json {
                write_json(out, &record).map_err(io)?;
            } else {
                render::verdict(out, &record).map_err(io)?;
            }
            Ok(code)
        }
        Command::Eval { file, x, naive, gradient, dense_cap, json } => {
            let doc = load(&file)?;
            let x = parse_list(&x, parse_real)?;
            let gen = doc.generating();
            let (value, grad) = if gradient {
                let (f, g) = eval_with_gradient(&gen, &x)?;
                (f, Some(g))
            } else {
                (eval_fast(&gen, &x)?, None)
            };
            let mut code = EXIT_OK;
            let mut naive_value = None;
            if naive {
                match eval_naive(&gen, &x, dense_cap) {
                    Ok(v) => {
                        let scale = eval_magnitude(&gen, &x)?.max(f64::MIN_POSITIVE);
                        let rel = (v - value).abs() / scale;
                        if rel > NAIVE_RTOL {
                            writeln!(err, "fast and naive evaluation disagree: relative difference {rel:e}").map_err(io)?;
                            code = EXIT_VERIFY;
                        }
                        naive_value = Some((v, rel));
                    }
                    Err(e @ anticirc::Error::DenseCapExceeded { .. }) => {
                        writeln!(err, "naive cross-check skipped: {e}").map_err(io)?;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            if json {
                write_json(
                    out,
                    &json!({
                        "value": value,
                        "gradient": grad,
                        "naive": naive_value.map(|(v, _)| v),
                        "naive_relative_difference": naive_value.map(|(_, r)| r),
                    }),
                )
                .map_err(io)?;
            } else {
                writeln!(out, "f(x) = {}", render::num(value)).map_err(io)?;
                if let Some(g) = grad {
                    writeln!(out, "gradient = {}", render::tuple(&g)).map_err(io)?;
                }
                if let Some((v, rel)) = naive_value {
                    writeln!(out, "naive = {} (relative difference {rel:.1e})", render::num(v)).map_err(io)?;
                }
            }
            Ok(code)
        }
        Command::Sums { m, r, pattern, json } => {
            if m < 2 || r < 2 {
                return Err(CliError::Input(format!("sums needs m >= 2 and r >= 2, got m = {m}, r = {r}")));
            }
            let pattern = parse_list(&pattern, parse_integer)?;
            let table = residue_sum_table(m, r, &pattern)?;
            if json {
                write_json(out, &table).map_err(io)?;
            } else {
                for (j, s) in table.sums.iter().enumerate() {
                    writeln!(out, "S_{j} = {s}").map_err(io)?;
                }
                writeln!(out, "total = {}", table.total()).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Signfacts { json } => {
            let report = sign_fact_report();
            if json {
                write_json(out, &json!({ "all_passed": report.all_passed(), "facts": report.facts })).map_err(io)?;
            } else {
                render::sign_facts(out, &report).map_err(io)?;
            }
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Certify { file, oracle, tolerance, verdict, points, point_seed, json } => {
            let doc = load(&file)?;
            let verdict = match verdict {
                Some(path) => {
                    let saved: VerdictDocument = serde_json::from_str(&read_source(&path)?)
                        .map_err(|e| CliError::Input(format!("{path}: {e}")))?;
                    saved.verdict
                }
                None => classify_document(&doc, &oracle, tolerance)?,
            };
            let report = verdict.verify(&doc.generating(), points, point_seed)?;
            if json {
                write_json(out, &json!({ "status": verdict.status, "passed": report.passed(), "checks": report.checks }))
                    .map_err(io)?;
            } else {
                render::certification(out, &verdict, &report).map_err(io)?;
            }
            Ok(if !report.passed() {
                EXIT_VERIFY
            } else if verdict.status == Status::Uncovered {
                EXIT_UNCOVERED
            } else {
                EXIT_OK
            })
        }
        Command::Oracle { file, oracle, json } => {
            let doc = load(&file)?;
            let res = sphere_min_with(
                &doc.generating(),
                &SphereMinOptions {
                    starts: oracle.starts,
                    seed: oracle.seed,
                    execution: oracle.execution(),
                    ..Default::default()
                },
            )?;
            if json {
                write_json(out, &res).map_err(io)?;
            } else {
                render::sphere_min(out, &res).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Theorem1 { order, u, json } => {
            let u = parse_list(&u, parse_rational)?;
            let seq = PeriodicSequence::new(u.clone())?;
            let (sums, signs) = sum_signs(&seq, order)?;
            if json {
                let strings = |v: &[num_rational::BigRational]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>();
                write_json(
                    out,
                    &json!({ "order": order, "sequence": strings(&u), "sums": strings(&sums), "signs": signs }),
                )
                .map_err(io)?;
            } else {
                let shown: Vec<String> = sums.iter().map(|q| q.to_string()).collect();
                writeln!(out, "D = ({})", shown.join(", ")).map_err(io)?;
                writeln!(out, "signs: {}", render::signs(signs)).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Hankelmatrix { file, json } => {
            let doc = load(&file)?;
            let matrix = doc.generating().hankel_matrix()?;
            let rows = matrix.rows();
            let psd = matrix_psd(&rows)?;
            if json {
                write_json(out, &json!({ "size": matrix.size(), "rows": rows, "psd": psd })).map_err(io)?;
            } else {
                render::matrix(out, &rows, &psd).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` and runs; returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(code) => code,
        Err(CliError::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
