//! Command-line front end. The binary only parses arguments and calls [`run`].
//!
//! Every command produces a [`Report`], printed as `key: value` lines or, with
//! `--json`, as a single JSON object. Exit codes: 0 success, 1 error,
//! 2 a criterion is violated (`analyze`), 3 infeasibility evidence and
//! 4 inconclusive (`extend`).

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::criteria::{
    criterion_ccnr, criterion_corr_psd, criterion_covariance, criterion_eta_psd, equivalence_report, CriterionId,
    CriterionVerdict,
};
use crate::error::{Error, Result};
use crate::extension::{find_extension, verify_extension, ExtensionProblem, ExtensionStatus};
use crate::io::{read_state, LoadedState, Metadata, StateFile};
use crate::linalg::{min_eigenvalue, partial_transpose, DensityMatrix};
use crate::search::{hill_climb, lambda_min, SearchConfig};
use crate::states::{
    breuer, embed_invariant, embed_symmetric, ppt_margin, ppt_threshold_with, rho_be4, rho_be5, singlet,
};
use crate::symspace::{classify, compressed_pt_spectrum, representative_splits, to_bipartite, SymmetricState};
use crate::tol;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATED: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "symsep", version, about = "Separability tests for symmetric and invariant states")]
pub struct Cli {
    /// Numerical tolerance for the command (criterion slack, bisection width,
    /// feasibility tolerance or search target, depending on the command).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Breuer,
    EmbedInvariant,
    EmbedSymmetric,
    Be4,
    Be5,
    Singlet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ThresholdFamily {
    Breuer,
    EmbedSymmetric,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate separability criteria on a state file.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated subset of eta_psd, ppt, ccnr, corr_psd, cov_norm, cov_diag.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<String>>,
        /// Subsystems to transpose (computational basis) or the size of the
        /// first block of the split (Dicke basis).
        #[arg(long, value_delimiter = ',')]
        partition: Option<Vec<usize>>,
    },
    /// Build a named state and write it to a file.
    Construct {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Outer dimension of the symmetric embedding.
        #[arg(long = "D")]
        big_d: Option<usize>,
        /// Source state for embed-invariant.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Locate the PPT threshold of a one-parameter family.
    Threshold {
        #[arg(long, value_enum)]
        family: ThresholdFamily,
        #[arg(long)]
        d: usize,
        #[arg(long = "D", default_value_t = 2)]
        big_d: usize,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
    },
    /// Hill-climb towards a symmetric state that is PPT on the balanced cut
    /// and NPT elsewhere.
    Search {
        #[arg(long, default_value_t = 4)]
        qubits: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.02)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Look for a PPT symmetric extension of a Dicke-basis state.
    Extend {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "M")]
        extension_qubits: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 50_000)]
        max_iter: usize,
        /// Where to write the extension, if one is found.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Map a Dicke-basis state to a bipartite computational-basis state.
    Map {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1)]
        split: Vec<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Construct { .. } => "construct",
            Command::Threshold { .. } => "threshold",
            Command::Search { .. } => "search",
            Command::Extend { .. } => "extend",
            Command::Map { .. } => "map",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub result: Value,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        out.push(format!("command: {}", self.command));
        out.push(format!("version: {}", self.version));
        if let Some(e) = &self.error {
            out.push(format!("error: {e}"));
        }
        flatten("", &self.result, &mut out);
        out.push(format!("exit_code: {}", self.exit_code));
        out.push(format!("wall_time_ms: {:.3}", self.wall_time_ms));
        out.join("\n")
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(xs) if xs.iter().any(|x| x.is_object()) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::Null if prefix.is_empty() => {}
        other => out.push(format!("{prefix}: {other}")),
    }
}

/// Parses `args` (including the program name), runs the command and prints
/// the report. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let report = execute(&cli);
    if cli.json {
        println!("{}", report.to_json());
    } else {
        println!("{}", report.to_text());
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    report.exit_code
}

pub fn execute(cli: &Cli) -> Report {
    let start = Instant::now();
    let outcome = match cli.tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(Error::BadParams(format!("tolerance {t} must be positive"))),
        _ => dispatch(&cli.command, cli.tol),
    };
    let (result, exit_code, error) = match outcome {
        Ok((v, code)) => (v, code, None),
        Err(e) => (Value::Null, EXIT_ERROR, Some(e.to_string())),
    };
    Report {
        command: cli.command.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        exit_code,
        error,
        result,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn dispatch(cmd: &Command, tol: Option<f64>) -> Result<(Value, i32)> {
    match cmd {
        Command::Analyze { input, criteria, partition } => {
            analyze(read_state(input)?, criteria.as_deref(), partition.as_deref(), tol.unwrap_or(tol::CRITERION))
        }
        Command::Construct { family, d, lambda, big_d, input, output } => {
            construct(*family, *d, *lambda, *big_d, input.as_deref(), output)
        }
        Command::Threshold { family, d, big_d, lo, hi } => {
            threshold(*family, *d, *big_d, (*lo, *hi), tol.unwrap_or(1e-9))
        }
        Command::Search { qubits, seed, epsilon, max_iter, output } => {
            let mut config = SearchConfig::new(*qubits, *seed);
            config.epsilon = *epsilon;
            config.max_iter = *max_iter;
            config.epsilon_floor = config.epsilon_floor.min(*epsilon);
            if let Some(t) = tol {
                config.target_margin = -t;
            }
            search(&config, output.as_deref())
        }
        Command::Extend { input, extension_qubits, seed, max_iter, output } => {
            let target = match read_state(input)? {
                LoadedState::Symmetric(s) => s,
                LoadedState::Density(_) => {
                    return Err(Error::NotApplicable("extend needs a Dicke-basis state".into()))
                }
            };
            let mut problem = ExtensionProblem::new(target, *extension_qubits);
            problem.max_iter = *max_iter;
            if let Some(t) = tol {
                problem.tol_feas = t;
            }
            extend(&problem, *seed, output.as_deref())
        }
        Command::Map { input, split, output } => {
            let sigma = match read_state(input)? {
                LoadedState::Symmetric(s) => s,
                LoadedState::Density(_) => return Err(Error::NotApplicable("map needs a Dicke-basis state".into())),
            };
            let &[a, b] = split.as_slice() else {
                return Err(Error::BadParams("--split takes two sizes, e.g. 2,2".into()));
            };
            map(&sigma, (a, b), output.as_deref(), tol.unwrap_or(tol::CRITERION))
        }
    }
}

fn verdicts_exit(verdicts: &[CriterionVerdict]) -> i32 {
    if verdicts.iter().all(|v| v.satisfied) {
        EXIT_OK
    } else {
        EXIT_VIOLATED
    }
}

fn parse_criteria(names: &[String]) -> Result<Vec<CriterionId>> {
    names
        .iter()
        .map(|n| CriterionId::parse(n.trim()).ok_or_else(|| Error::BadParams(format!("unknown criterion {n:?}"))))
        .collect()
}

pub fn analyze(
    state: LoadedState,
    criteria: Option<&[String]>,
    partition: Option<&[usize]>,
    tol: f64,
) -> Result<(Value, i32)> {
    let requested = criteria.map(parse_criteria).transpose()?;
    match state {
        LoadedState::Symmetric(sigma) => analyze_dicke(&sigma, requested, partition, tol),
        LoadedState::Density(rho) => analyze_density(&rho, requested, partition, tol),
    }
}

fn analyze_dicke(
    sigma: &SymmetricState,
    requested: Option<Vec<CriterionId>>,
    partition: Option<&[usize]>,
    tol: f64,
) -> Result<(Value, i32)> {
    if let Some(r) = &requested {
        if let Some(c) = r.iter().find(|&&c| c != CriterionId::Ppt) {
            return Err(Error::NotApplicable(format!("{} on a Dicke-basis state; use map first", c.name())));
        }
    }
    let n = sigma.qubits();
    let splits = match partition {
        None => representative_splits(n),
        Some(&[a]) if a >= 1 && a < n => vec![(a, n - a)],
        Some(p) => return Err(Error::BadParams(format!("partition {p:?} for {n} qubits"))),
    };
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for split in splits {
        let m = compressed_pt_spectrum(sigma, split)?.min();
        let v = CriterionVerdict::from_margin(CriterionId::Ppt, m, tol);
        rows.push(json!({ "split": [split.0, split.1], "margin": m, "satisfied": v.satisfied }));
        verdicts.push(v);
    }
    let result = json!({
        "basis": "dicke",
        "qubits": n,
        "tolerance": tol,
        "splits": rows,
        "lambda_min": finite_or_null(lambda_min(sigma, false)?),
    });
    Ok((result, verdicts_exit(&verdicts)))
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn analyze_density(
    rho: &DensityMatrix,
    requested: Option<Vec<CriterionId>>,
    partition: Option<&[usize]>,
    tol: f64,
) -> Result<(Value, i32)> {
    if rho.dims().len() != 2 {
        if requested.as_ref().is_some_and(|r| r.iter().any(|&c| c != CriterionId::Ppt)) {
            return Err(Error::NotBipartite(rho.dims().to_vec()));
        }
        let part = partition.unwrap_or(&[0]);
        let v = CriterionVerdict::from_margin(CriterionId::Ppt, ppt_margin(rho, part)?, tol);
        let result = json!({ "dims": rho.dims(), "tolerance": tol, "partition": part, "verdicts": [v] });
        return Ok((result, verdicts_exit(&[v])));
    }

    let symmetry = classify(rho)?;
    let ids = match requested {
        Some(r) => r,
        None => CriterionId::ALL.into_iter().filter(|c| symmetry.is_invariant() || !c.needs_invariance()).collect(),
    };
    let mut verdicts = Vec::new();
    let mut covariance = None;
    for id in ids {
        let v = match id {
            CriterionId::EtaPsd => criterion_eta_psd(rho, tol)?,
            CriterionId::Ppt => {
                let part = partition.unwrap_or(&[0]);
                CriterionVerdict::from_margin(CriterionId::Ppt, min_eigenvalue(&partial_transpose(rho, part)?)?, tol)
            }
            CriterionId::Ccnr => criterion_ccnr(rho, tol)?,
            CriterionId::CorrPsd => criterion_corr_psd(rho, tol)?,
            CriterionId::CovNorm | CriterionId::CovDiag => {
                let (norm, diag) = match covariance {
                    Some(c) => c,
                    None => *covariance.insert(criterion_covariance(rho, tol)?),
                };
                if id == CriterionId::CovNorm {
                    norm
                } else {
                    diag
                }
            }
        };
        verdicts.push(v);
    }
    let mut result = Map::new();
    result.insert("dims".into(), json!(rho.dims()));
    result.insert("symmetry".into(), json!(symmetry));
    result.insert("tolerance".into(), json!(tol));
    result.insert("verdicts".into(), json!(verdicts));
    if symmetry.is_invariant() {
        let eq = equivalence_report(rho, tol)?;
        result.insert(
            "equivalence".into(),
            json!({
                "consistent": eq.consistent(),
                "boundary": eq.boundary,
                "inconsistencies": eq.inconsistencies,
            }),
        );
    }
    Ok((Value::Object(result), verdicts_exit(&verdicts)))
}

fn need<T>(x: Option<T>, flag: &str, family: &str) -> Result<T> {
    x.ok_or_else(|| Error::BadParams(format!("{family} needs --{flag}")))
}

fn density_summary(rho: &DensityMatrix) -> Result<Value> {
    let min = min_eigenvalue(rho.matrix())?;
    let symmetry = if rho.dims().len() == 2 && rho.basis() == crate::linalg::Basis::Computational {
        json!(classify(rho)?)
    } else {
        Value::Null
    };
    Ok(json!({
        "dims": rho.dims(),
        "basis": rho.basis(),
        "trace": rho.matrix().trace().re,
        "min_eigenvalue": min,
        "symmetry": symmetry,
    }))
}

pub fn construct(
    family: Family,
    d: Option<usize>,
    lambda: Option<f64>,
    big_d: Option<usize>,
    input: Option<&Path>,
    output: &Path,
) -> Result<(Value, i32)> {
    let (rho, name) = match family {
        Family::Breuer => {
            let (d, l) = (need(d, "d", "breuer")?, need(lambda, "lambda", "breuer")?);
            (breuer(d, l)?, format!("breuer d={d} lambda={l}"))
        }
        Family::EmbedInvariant => {
            let path = need(input, "input", "embed-invariant")?;
            let src = match read_state(path)? {
                LoadedState::Density(r) => r,
                LoadedState::Symmetric(_) => {
                    return Err(Error::NotApplicable("embed-invariant needs a computational-basis state".into()))
                }
            };
            (embed_invariant(&src)?, format!("embed-invariant of {}", path.display()))
        }
        Family::EmbedSymmetric => {
            let big = need(big_d, "D", "embed-symmetric")?;
            let (d, l) = (need(d, "d", "embed-symmetric")?, need(lambda, "lambda", "embed-symmetric")?);
            (embed_symmetric(big, d, l)?, format!("embed-symmetric D={big} d={d} lambda={l}"))
        }
        Family::Be4 => (rho_be4().to_density(), "be4".to_string()),
        Family::Be5 => (rho_be5().to_density(), "be5".to_string()),
        Family::Singlet => {
            let d = need(d, "d", "singlet")?;
            (DensityMatrix::pure(&singlet(d)?, vec![d, d])?, format!("singlet d={d}"))
        }
    };
    let meta = Metadata { name: Some(name.clone()), seed: None, provenance: Some("symsep construct".into()) };
    StateFile::from_density(&rho, meta).write(output)?;
    let mut summary = density_summary(&rho)?;
    summary["name"] = json!(name);
    summary["output"] = json!(output.display().to_string());
    Ok((summary, EXIT_OK))
}

pub fn threshold(
    family: ThresholdFamily,
    d: usize,
    big_d: usize,
    range: (f64, f64),
    width: f64,
) -> Result<(Value, i32)> {
    let t = match family {
        ThresholdFamily::Breuer => ppt_threshold_with(|l| breuer(d, l), range, &[0], width)?,
        ThresholdFamily::EmbedSymmetric => {
            ppt_threshold_with(|l| embed_symmetric(big_d, d, l), range, &[0], width)?
        }
    };
    let mut result = json!({ "d": d, "range": [range.0, range.1], "width": width, "threshold": t });
    if family == ThresholdFamily::EmbedSymmetric {
        result["D"] = json!(big_d);
    }
    Ok((result, EXIT_OK))
}

pub fn search(config: &SearchConfig, output: Option<&Path>) -> Result<(Value, i32)> {
    let report = hill_climb(config)?;
    let audit = report.audit(config);
    if let Some(path) = output {
        let meta = Metadata {
            name: Some(format!("search N={}", config.qubits)),
            seed: Some(config.seed),
            provenance: Some("symsep search".into()),
        };
        StateFile::from_symmetric(&report.final_state, meta).write(path)?;
    }
    let result = json!({
        "config": config,
        "success": report.success,
        "iterations": report.iterations,
        "accepted_steps": report.lambda_trace.len() - 1,
        "initial_draws": report.initial_draws,
        "final_epsilon": report.final_epsilon,
        "final_lambda_min": finite_or_null(report.final_lambda_min()),
        "lambda_trace": report.lambda_trace.iter().map(|&x| finite_or_null(x)).collect::<Vec<_>>(),
        "audit": match &audit { Ok(()) => "ok".to_string(), Err(e) => e.clone() },
    });
    Ok((result, if audit.is_ok() { EXIT_OK } else { EXIT_ERROR }))
}

pub fn extend(problem: &ExtensionProblem, seed: u64, output: Option<&Path>) -> Result<(Value, i32)> {
    let result = find_extension(problem)?;
    let window = result.final_window();
    let mut value = json!({
        "target_qubits": problem.target.qubits(),
        "extension_qubits": problem.extension_qubits,
        "seed": seed,
        "tol_feas": problem.tol_feas,
        "max_iter": problem.max_iter,
        "status": result.status,
        "residual_gap": result.residual_gap,
        "iterations": result.iterations,
        "monotonicity_violations": result.monotonicity_violations,
        "final_window": {
            "len": window.len(),
            "first": window.first(),
            "last": window.last(),
            "min": window.iter().copied().fold(f64::INFINITY, f64::min),
        },
    });
    if let Some(w) = &result.witness {
        value["verification"] = json!(verify_extension(w, &problem.target, problem.tol_feas)?);
        if let Some(path) = output {
            let meta = Metadata {
                name: Some(format!("extension M={}", problem.extension_qubits)),
                seed: Some(seed),
                provenance: Some("symsep extend".into()),
            };
            StateFile::from_symmetric(w, meta).write(path)?;
        }
    }
    let code = match result.status {
        ExtensionStatus::Feasible => EXIT_OK,
        ExtensionStatus::InfeasibleEvidence => EXIT_INFEASIBLE,
        ExtensionStatus::Inconclusive => EXIT_INCONCLUSIVE,
    };
    Ok((value, code))
}

pub fn map(sigma: &SymmetricState, split: (usize, usize), output: Option<&Path>, tol: f64) -> Result<(Value, i32)> {
    let rho = to_bipartite(sigma, split)?;
    if let Some(path) = output {
        let meta = Metadata {
            name: Some(format!("split {}:{}", split.0, split.1)),
            seed: None,
            provenance: Some("symsep map".into()),
        };
        StateFile::from_density(&rho, meta).write(path)?;
    }
    let mut summary = density_summary(&rho)?;
    let ppt = CriterionVerdict::from_margin(CriterionId::Ppt, ppt_margin(&rho, &[0])?, tol);
    summary["split"] = json!([split.0, split.1]);
    summary["ppt"] = json!(ppt);
    Ok((summary, EXIT_OK))
}
