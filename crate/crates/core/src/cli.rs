//! Command-line front end for the `wax` binary.
//!
//! Exit codes:
//!
//! | code | category |
//! |------|----------|
//! | 0 | success |
//! | 1 | io / other |
//! | 2 | parse (malformed JSON or matrix file) |
//! | 3 | dimension mismatch or invalid argument |
//! | 4 | infeasible dimensions or no nontrivial solution |
//! | 5 | numerical singularity (singular W-inverse, residual too large, SVD failure) |
//! | 6 | combiner validation failed (verdict `invalid`) |
//!
//! On failure a one-line JSON object `{"error": <category>, "message": ...}`
//! is written to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::combiner::{self, ValidationConfig, Verdict};
use crate::error::{Result, WaxError};
use crate::fixtures;
use crate::io::{self, InputDigest, ReportFile};
use crate::linalg::ComplexMatrix;
use crate::rng::{self, Purpose};
use crate::sim::{self, SimConfig};
use crate::tradeoff::{self, CurveVariant};
use crate::wax::{self, NullSpaceMethod, SolverOptions, SystemDims};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_SINGULAR: i32 = 5;
pub const EXIT_INVALID_COMBINER: i32 = 6;

#[derive(Debug, Parser)]
#[command(
    name = "wax",
    version,
    about = "WAX decomposition toolkit for decentralized massive MIMO receivers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose a channel H against a combiner Ã.
    Decompose {
        /// Channel matrix file (M x K).
        #[arg(long = "h")]
        h_file: PathBuf,
        /// Combiner matrix file (M x T).
        #[arg(long = "a")]
        a_file: PathBuf,
        /// Outputs per antenna.
        #[arg(long)]
        l: usize,
        /// Relative residual accepted as success.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, env = "WAX_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Projected)]
        method: MethodArg,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the combiner validity checks.
    Validate {
        #[arg(long = "a")]
        a_file: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Maximum row selections to enumerate before switching to sampling.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, env = "WAX_SEED", default_value_t = 0)]
        seed: u64,
        /// Report file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a combiner or channel matrix file.
    Generate {
        #[arg(long, value_enum)]
        kind: GenerateKind,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, env = "WAX_SEED", default_value_t = 0)]
        seed: u64,
        /// Matrix file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimal CPU inputs against per-antenna outputs or multiplications.
    Tradeoff {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        /// Use multiplications per antenna (starting at 0) on the x axis.
        #[arg(long)]
        mult: bool,
        /// Only per-antenna counts dividing M.
        #[arg(long)]
        realizable: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare centralized and decentralized receivers over random channels.
    Simulate {
        /// JSON simulation config.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long, env = "WAX_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Projected,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenerateKind {
    /// Complex Gaussian combiner, needs M and T.
    Random,
    /// Sparse nested-identity combiner, needs M, K and L.
    Nested,
    /// The 100x61 sparse combiner.
    FixtureEx2,
    /// The 8x5 integer combiner.
    FixtureEx3,
    /// The 8x5 integer channel matching `fixture-ex3`.
    FixtureEx3H,
    /// IID Rayleigh channel, needs M and K.
    Rayleigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Maps an error to its exit code and category name.
pub fn classify(e: &WaxError) -> (i32, &'static str) {
    match e.root() {
        WaxError::Io(_) => (EXIT_IO, "io"),
        WaxError::Parse(_) => (EXIT_PARSE, "parse"),
        WaxError::DimensionMismatch { .. } => (EXIT_DIMENSION, "dimension"),
        WaxError::InvalidArgument(_) => (EXIT_DIMENSION, "invalid-argument"),
        WaxError::Infeasible { .. } => (EXIT_INFEASIBLE, "infeasible"),
        WaxError::NoNontrivialSolution => (EXIT_INFEASIBLE, "no-nontrivial-solution"),
        WaxError::SingularWInverse { .. } => (EXIT_SINGULAR, "singular-w-inverse"),
        WaxError::NumericallySingular { .. } => (EXIT_SINGULAR, "numerically-singular"),
        WaxError::ResidualTooLarge { .. } => (EXIT_SINGULAR, "residual-too-large"),
        WaxError::SvdNotConverged => (EXIT_SINGULAR, "svd-not-converged"),
        WaxError::ConstructionFailed { .. } => (EXIT_IO, "construction-failed"),
        WaxError::Trial { .. } => unreachable!("root strips trial wrappers"),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Errors are reported on stderr.
pub fn run_from<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_DIMENSION
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let (code, category) = classify(&e);
            eprintln!("{}", json!({ "error": category, "message": e.to_string() }));
            code
        }
    }
}

pub fn run(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Decompose {
            h_file,
            a_file,
            l,
            tol,
            seed,
            method,
            out,
        } => cmd_decompose(&h_file, &a_file, l, tol, seed, method, &out),
        Command::Validate {
            a_file,
            l,
            k,
            trials,
            budget,
            tol,
            seed,
            out,
        } => {
            let cfg = ValidationConfig {
                trials,
                budget,
                seed,
                tol,
            };
            cmd_validate(&a_file, l, k, &cfg, out.as_deref())
        }
        Command::Generate {
            kind,
            m,
            k,
            l,
            t,
            seed,
            out,
        } => {
            let mat = generate(kind, m, k, l, t, seed)?;
            emit(out.as_deref(), &io::matrix_to_json(&mat))?;
            Ok(EXIT_OK)
        }
        Command::Tradeoff {
            m,
            k,
            mult,
            realizable,
            format,
            out,
        } => {
            let text = tradeoff_text(m, k, mult, realizable, format)?;
            emit(out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Simulate { config, seed, out } => cmd_simulate(&config, seed, out.as_deref()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct DecomposeResults {
    m: usize,
    k: usize,
    l: usize,
    t: usize,
    residual_rel: f64,
    nullspace_dim: usize,
    w_inverse_condition: f64,
    variables: usize,
    equations: usize,
    free_variables: i64,
    note: String,
    files: Vec<String>,
}

fn cmd_decompose(
    h_file: &Path,
    a_file: &Path,
    l: usize,
    tol: f64,
    seed: u64,
    method: MethodArg,
    out: &Path,
) -> Result<i32> {
    let h = io::read_matrix(h_file)?;
    let a = io::read_matrix(a_file)?;
    let dims = SystemDims::from_shapes(&h, &a, l)?;
    let opts = SolverOptions {
        success_tol: tol,
        seed,
        method: match method {
            MethodArg::Projected => NullSpaceMethod::Projected,
            MethodArg::Dense => NullSpaceMethod::Dense,
        },
        ..SolverOptions::default()
    };
    let f = wax::wax_decompose(&h, &a, l, &opts)?;

    fs::create_dir_all(out)?;
    let mut files = vec!["w_tilde.json".to_string()];
    io::write_matrix(&out.join("w_tilde.json"), &f.w_tilde())?;
    for (n, blk) in f.w_blocks.iter().enumerate() {
        let name = format!("w_block_{n}.json");
        io::write_matrix(&out.join(&name), blk)?;
        files.push(name);
    }
    io::write_matrix(&out.join("x.json"), &f.x)?;
    files.push("x.json".into());

    let variables = dims.t * dims.k + dims.m * dims.l;
    let equations = dims.m * dims.k;
    let free = dims.free_variable_count();
    let note = format!(
        "{variables} unknowns vs {equations} equations ({} more {} than equations)",
        free.abs(),
        if free.abs() == 1 {
            "variable"
        } else {
            "variables"
        }
    );
    let report = ReportFile {
        command: "decompose".into(),
        args: json!({ "l": l, "tol": tol, "method": method }),
        inputs: vec![InputDigest::of_file(h_file)?, InputDigest::of_file(a_file)?],
        seeds: vec![seed],
        version: env!("CARGO_PKG_VERSION"),
        results: DecomposeResults {
            m: dims.m,
            k: dims.k,
            l: dims.l,
            t: dims.t,
            residual_rel: f.residual_rel,
            nullspace_dim: f.nullspace_dim,
            w_inverse_condition: f.w_inverse_condition,
            variables,
            equations,
            free_variables: free,
            note,
            files,
        },
    };
    fs::write(out.join("report.json"), report.to_json()?)?;
    Ok(EXIT_OK)
}

fn cmd_validate(
    a_file: &Path,
    l: usize,
    k: usize,
    cfg: &ValidationConfig,
    out: Option<&Path>,
) -> Result<i32> {
    let a = io::read_matrix(a_file)?;
    let result = combiner::validate(&a, l, k, cfg)?;
    let code = if result.verdict == Verdict::Invalid {
        EXIT_INVALID_COMBINER
    } else {
        EXIT_OK
    };
    let report = ReportFile {
        command: "validate".into(),
        args: json!({
            "l": l,
            "k": k,
            "trials": cfg.trials,
            "budget": cfg.budget,
            "tol": cfg.tol,
        }),
        inputs: vec![InputDigest::of_file(a_file)?],
        seeds: vec![cfg.seed],
        version: env!("CARGO_PKG_VERSION"),
        results: result,
    };
    emit(out, &report.to_json()?)?;
    Ok(code)
}

fn need(v: Option<usize>, name: &str, kind: GenerateKind) -> Result<usize> {
    v.ok_or_else(|| WaxError::InvalidArgument(format!("--{name} is required for kind {kind:?}")))
}

pub fn generate(
    kind: GenerateKind,
    m: Option<usize>,
    k: Option<usize>,
    l: Option<usize>,
    t: Option<usize>,
    seed: u64,
) -> Result<ComplexMatrix> {
    Ok(match kind {
        GenerateKind::Random => {
            let (m, t) = (need(m, "m", kind)?, need(t, "t", kind)?);
            combiner::random_combiner(m, t, seed)
        }
        GenerateKind::Nested => combiner::nested_identity_combiner(
            need(m, "m", kind)?,
            need(k, "k", kind)?,
            need(l, "l", kind)?,
        )?,
        GenerateKind::FixtureEx2 => fixtures::ex2_a_tilde(),
        GenerateKind::FixtureEx3 => fixtures::ex3_a_tilde(),
        GenerateKind::FixtureEx3H => fixtures::ex3_h(),
        GenerateKind::Rayleigh => {
            let (m, k) = (need(m, "m", kind)?, need(k, "k", kind)?);
            rng::gaussian_matrix(&mut rng::stream(seed, 0, Purpose::Channel), m, k)
        }
    })
}

pub fn tradeoff_text(
    m: usize,
    k: usize,
    mult: bool,
    realizable: bool,
    format: Format,
) -> Result<String> {
    if m == 0 || k == 0 || k > m {
        return Err(WaxError::InvalidArgument(format!(
            "need 1 <= K <= M, got M={m}, K={k}"
        )));
    }
    let variant = if mult {
        CurveVariant::Multiplications
    } else {
        CurveVariant::Outputs
    };
    let curve = tradeoff::tradeoff_curve(m, k, variant, realizable);
    let x_name = if mult { "l_mult" } else { "l" };
    match format {
        Format::Json => {
            let rows: Vec<_> = curve
                .iter()
                .map(|p| json!({ x_name: p.per_antenna, "t": p.inputs, "regime": p.regime }))
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({ "m": m, "k": k, "curve": rows }))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| WaxError::InvalidArgument(e.to_string());
            w.write_record([x_name, "t", "regime"]).map_err(csv_err)?;
            for p in &curve {
                w.write_record([
                    p.per_antenna.to_string(),
                    p.inputs.to_string(),
                    p.regime.as_str().to_string(),
                ])
                .map_err(csv_err)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| WaxError::InvalidArgument(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

fn cmd_simulate(config: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<i32> {
    let mut cfg: SimConfig = serde_json::from_str(&fs::read_to_string(config)?)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let result = sim::run_equivalence_experiment(&cfg)?;
    let mut inputs = vec![InputDigest::of_file(config)?];
    if let sim::CombinerSource::File { path } = &cfg.combiner {
        inputs.push(InputDigest::of_file(path)?);
    }
    let report = ReportFile {
        command: "simulate".into(),
        args: serde_json::to_value(&cfg)?,
        inputs,
        seeds: vec![cfg.seed],
        version: env!("CARGO_PKG_VERSION"),
        results: result,
    };
    emit(out, &report.to_json()?)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tradeoff_csv_endpoints() {
        let s = tradeoff_text(100, 10, false, false, Format::Csv).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "l,t,regime");
        assert_eq!(lines[1], "1,91,matrix-bound");
        assert_eq!(lines[10], "10,10,user-bound");
        let s = tradeoff_text(100, 10, true, false, Format::Csv).unwrap();
        assert_eq!(s.lines().nth(1).unwrap(), "0,100,matrix-bound");
    }

    #[test]
    fn tradeoff_json_contains_example_point() {
        let s = tradeoff_text(8, 5, false, false, Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(v["curve"]
            .as_array()
            .unwrap()
            .iter()
            .any(|p| p["l"] == 2 && p["t"] == 5));
    }

    #[test]
    fn classify_codes_are_distinct() {
        let cases = [
            WaxError::Parse(String::new()),
            WaxError::mismatch("x", (1, 1), (2, 2)),
            WaxError::Infeasible {
                m: 8,
                k: 5,
                l: 2,
                t: 4,
            },
            WaxError::SingularWInverse {
                condition: 1e13,
                attempts: 9,
            },
        ];
        let codes: Vec<i32> = cases.iter().map(|e| classify(e).0).collect();
        assert_eq!(
            codes,
            vec![EXIT_PARSE, EXIT_DIMENSION, EXIT_INFEASIBLE, EXIT_SINGULAR]
        );
        let wrapped = WaxError::Trial {
            trial: 3,
            source: Box::new(WaxError::NoNontrivialSolution),
        };
        assert_eq!(
            classify(&wrapped),
            (EXIT_INFEASIBLE, "no-nontrivial-solution")
        );
    }

    #[test]
    fn generate_requires_dimensions() {
        assert!(generate(GenerateKind::Random, Some(8), None, None, None, 0).is_err());
        assert_eq!(
            generate(GenerateKind::Random, Some(8), None, None, Some(5), 1).unwrap(),
            generate(GenerateKind::Random, Some(8), None, None, Some(5), 1).unwrap()
        );
        assert_eq!(
            generate(GenerateKind::FixtureEx2, None, None, None, None, 0)
                .unwrap()
                .shape(),
            (100, 61)
        );
    }
}
