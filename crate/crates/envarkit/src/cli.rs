//! Argument parsing and the subcommands. Transform and swap indices on the
//! command line are one-based and refer to the Schmidt basis of the input.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use envarkit_core::derivation::{
    adjacent_swaps, generate_terms, numeric_probabilities, saturate, Probability, Rule, RuleSet,
};
use envarkit_core::envariance::{check_envariance, oracle_best_counter, schmidt_phase, schmidt_swap, ENVAR_TOL};
use envarkit_core::finegrain::{rationalize, CountingEngine, RationalWeights};
use envarkit_core::gleason::{audit, random_density, FrameFunction, Verdict, FRAME_TOL};
use envarkit_core::random::{random_state, rng};
use envarkit_core::schmidt::{is_even, schmidt, SCHMIDT_TOL};
use envarkit_core::BipartiteState;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::formats::{
    AuditRecord, CountingReport, DecompositionFile, DerivationReport, FractionRecord, SchmidtReport, StateFile,
    VerdictReport,
};

/// Largest denominator tried when decimal weights are rationalized.
pub const DEFAULT_MAX_DEN: u64 = 1000;
/// Tolerance for rationalizing decimal weights.
pub const DEFAULT_WEIGHT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "envarkit", version, about = "Envariance checks, swap-chain derivations and frame-function audits")]
pub struct Cli {
    /// Seed for every random draw in the run.
    #[arg(long, global = true, env = "ENVARKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Override the command's tolerance (evenness, residual, weight fit or
    /// frame-sum threshold).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Schmidt coefficients, vectors, rank and evenness of a state file.
    Schmidt {
        state: PathBuf,
        /// Rescale an unnormalized state instead of rejecting it.
        #[arg(long)]
        normalize: bool,
    },
    /// Decide envariance of `swap:i,j` or `phase:b1,b2,...`.
    Envariance {
        state: PathBuf,
        #[arg(allow_hyphen_values = true)]
        transform: String,
        #[arg(long)]
        normalize: bool,
    },
    /// Run the swap-chain derivation on an even state.
    Derive {
        state: PathBuf,
        /// Rule to switch off; repeatable.
        #[arg(long)]
        disable: Vec<String>,
        /// Report every leave-one-out rule set instead of a single run.
        #[arg(long)]
        ablate: bool,
        /// Swap schedule such as `1-2,2-3`; defaults to adjacent swaps.
        #[arg(long)]
        swaps: Option<String>,
        #[arg(long)]
        normalize: bool,
    },
    /// Born weights by counting, from weights like `1/3,2/3`.
    Finegrain {
        weights: String,
        /// Largest denominator tried for decimal weights.
        #[arg(long, default_value_t = DEFAULT_MAX_DEN)]
        max_den: u64,
    },
    /// Audit `quadratic`, `mixed` or `power:<alpha>` over Haar bases.
    Gleason {
        kind: String,
        #[arg(default_value_t = 3)]
        dim: usize,
        #[arg(default_value_t = 1000)]
        trials: usize,
    },
    /// Write a state file: `bell`, `max:d`, `product:ds,de` or `random:ds,de`.
    State { kind: String },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Schmidt { .. } => "schmidt",
            Command::Envariance { .. } => "envariance",
            Command::Derive { .. } => "derive",
            Command::Finegrain { .. } => "finegrain",
            Command::Gleason { .. } => "gleason",
            Command::State { .. } => "state",
        }
    }
}

/// Everything a run depends on; equal configs give byte-identical reports.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        RunConfig {
            command: c.command,
            seed: c.seed,
            tol: c.tol,
            out: c.out,
            format: c.format,
        }
    }
}

/// A finished run: the rendered report and the exit status (0 or 1).
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub status: u8,
}

fn json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn read_state(path: &Path, normalize: bool) -> Result<BipartiteState, CliError> {
    let text = std::fs::read_to_string(path)?;
    StateFile::parse(&text)?.to_state(normalize)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::parse(format!("{what}: cannot read '{}'", x.trim())))
        })
        .collect()
}

fn one_based(i: usize, what: &str) -> Result<usize, CliError> {
    i.checked_sub(1)
        .ok_or_else(|| CliError::parse(format!("{what}: indices start at 1")))
}

fn tol_or(tol: Option<f64>, default: f64) -> Result<f64, CliError> {
    match tol {
        Some(t) if !(t.is_finite() && t >= 0.0) => Err(CliError::parse("--tol must be a nonnegative number")),
        Some(t) => Ok(t),
        None => Ok(default),
    }
}

/// Runs one command and renders its report.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if let Command::State { kind } = &cfg.command {
        let psi = build_state(kind, cfg.seed)?;
        return Ok(Outcome {
            report: StateFile::from_state(&psi).write(),
            status: 0,
        });
    }
    let (value, status) = match &cfg.command {
        Command::Schmidt { state, normalize } => cmd_schmidt(&read_state(state, *normalize)?, tol_or(cfg.tol, SCHMIDT_TOL)?),
        Command::Envariance {
            state,
            transform,
            normalize,
        } => cmd_envariance(&read_state(state, *normalize)?, transform, tol_or(cfg.tol, ENVAR_TOL)?)?,
        Command::Derive {
            state,
            disable,
            ablate,
            swaps,
            normalize,
        } => cmd_derive(&read_state(state, *normalize)?, disable, *ablate, swaps.as_deref())?,
        Command::Finegrain { weights, max_den } => {
            cmd_finegrain(weights, tol_or(cfg.tol, DEFAULT_WEIGHT_TOL)?, *max_den)?
        }
        Command::Gleason { kind, dim, trials } => {
            cmd_gleason(kind, *dim, *trials, cfg.seed, tol_or(cfg.tol, FRAME_TOL)?)?
        }
        Command::State { .. } => unreachable!("handled above"),
    };
    let report = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => render_text(&value),
    };
    Ok(Outcome { report, status })
}

pub fn cmd_schmidt(psi: &BipartiteState, tol: f64) -> (Value, u8) {
    let d = schmidt(psi);
    let report = SchmidtReport {
        decomposition: DecompositionFile::from_decomposition(&d),
        rank: d.rank(),
        even: is_even(&d, tol),
    };
    (json(&report), 0)
}

pub fn cmd_envariance(psi: &BipartiteState, transform: &str, tol: f64) -> Result<(Value, u8), CliError> {
    let (kind, args) = transform
        .split_once(':')
        .ok_or_else(|| CliError::parse(format!("transform '{transform}': expected swap:i,j or phase:b1,...")))?;
    let u = match kind.trim() {
        "swap" => {
            let idx: Vec<usize> = parse_list(args, "swap")?;
            let [i, j] = idx[..] else {
                return Err(CliError::parse("swap: expected two indices"));
            };
            schmidt_swap(psi, one_based(i, "swap")?, one_based(j, "swap")?)?
        }
        "phase" => {
            let betas: Vec<f64> = parse_list(args, "phase")?;
            if betas.iter().any(|b| !b.is_finite()) {
                return Err(CliError::parse("phase: angles must be finite"));
            }
            schmidt_phase(psi, &betas)?
        }
        other => return Err(CliError::parse(format!("unknown transform kind '{other}'"))),
    };
    let mut verdict = check_envariance(psi, &u)?;
    if verdict.residual > tol {
        verdict.envariant = false;
        verdict.counter = None;
    }
    let (_, oracle) = oracle_best_counter(psi, &u)?;
    let status = u8::from(!verdict.envariant);
    Ok((json(&VerdictReport::new(&verdict, oracle)), status))
}

fn parse_rule(name: &str) -> Result<Rule, CliError> {
    Rule::from_name(name).ok_or_else(|| {
        let known: Vec<&str> = Rule::ALL.iter().map(|r| r.name()).collect();
        CliError::parse(format!("unknown rule '{name}' (known: {})", known.join(", ")))
    })
}

fn parse_swaps(s: &str) -> Result<Vec<(usize, usize)>, CliError> {
    s.split(',')
        .map(|pair| {
            let (a, b) = pair
                .split_once('-')
                .ok_or_else(|| CliError::parse(format!("swap schedule: expected i-j, got '{pair}'")))?;
            let read = |x: &str| -> Result<usize, CliError> {
                let i: usize = x
                    .trim()
                    .parse()
                    .map_err(|_| CliError::parse(format!("swap schedule: cannot read '{}'", x.trim())))?;
                one_based(i, "swap schedule")
            };
            Ok((read(a)?, read(b)?))
        })
        .collect()
}

pub fn cmd_derive(
    psi: &BipartiteState,
    disable: &[String],
    ablate: bool,
    swaps: Option<&str>,
) -> Result<(Value, u8), CliError> {
    let schedule = match swaps {
        Some(s) => parse_swaps(s)?,
        None => adjacent_swaps(schmidt(psi).rank()),
    };
    let terms = generate_terms(psi, &schedule)?;
    let mut base = RuleSet::all();
    for name in disable {
        base = base.without(parse_rule(name)?);
    }
    if ablate {
        let runs: Vec<Value> = Rule::EQUALITY_RULES
            .iter()
            .filter(|r| base.enabled(**r))
            .map(|&r| {
                let store = saturate(&terms, base.without(r));
                let mut v = json(&DerivationReport::new(&store, numeric_probabilities(&store)));
                v.as_object_mut()
                    .expect("report is an object")
                    .insert("without".into(), Value::String(r.name().into()));
                v
            })
            .collect();
        return Ok((serde_json::json!({ "ablations": runs }), 0));
    }
    let store = saturate(&terms, base);
    let report = DerivationReport::new(&store, numeric_probabilities(&store));
    let status = u8::from(report.probabilities.is_none());
    Ok((json(&report), status))
}

/// `m1/M,m2/M,...`, or decimals fitted to a common denominator.
pub fn parse_weights(s: &str, tol: f64, max_den: u64) -> Result<RationalWeights, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.iter().all(|p| p.contains('/')) {
        let fractions = parts
            .iter()
            .map(|p| {
                let (a, b) = p.split_once('/').expect("checked above");
                let read = |x: &str| {
                    x.trim()
                        .parse::<u64>()
                        .map_err(|_| CliError::parse(format!("weights: cannot read '{p}'")))
                };
                Ok((read(a)?, read(b)?))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        return Ok(RationalWeights::from_fractions(&fractions)?);
    }
    let values: Vec<f64> = parts
        .iter()
        .map(|p| {
            if let Some((a, b)) = p.split_once('/') {
                let a: f64 = a.trim().parse().map_err(|_| CliError::parse(format!("weights: cannot read '{p}'")))?;
                let b: f64 = b.trim().parse().map_err(|_| CliError::parse(format!("weights: cannot read '{p}'")))?;
                Ok(a / b)
            } else {
                p.parse().map_err(|_| CliError::parse(format!("weights: cannot read '{p}'")))
            }
        })
        .collect::<Result<_, CliError>>()?;
    Ok(rationalize(&values, tol, max_den)?)
}

pub fn cmd_finegrain(weights: &str, tol: f64, max_den: u64) -> Result<(Value, u8), CliError> {
    let w = parse_weights(weights, tol, max_den)?;
    let res = CountingEngine::new().born(&w)?;
    let rho = res.fine_grained.state().reduced_density_system();
    let m = w.denominator();
    let report = CountingReport {
        weights: w.numerators().iter().map(|k| format!("{k}/{m}")).collect(),
        grain: res.fine_grained.grain(),
        probabilities: res.probabilities.iter().copied().map(FractionRecord::new).collect(),
        schmidt_weights: (0..w.len()).map(|k| rho[(k, k)].re).collect(),
        fine_probabilities: res.fine_probabilities.iter().map(Probability::to_string).collect(),
        derivation_merges: res.derivation.trace().len(),
    };
    Ok((json(&report), 0))
}

fn frame_function(kind: &str, dim: usize, seed: u64) -> Result<FrameFunction, CliError> {
    match kind.split_once(':') {
        None if kind == "quadratic" => Ok(FrameFunction::quadratic(random_density(dim, seed))?),
        None if kind == "mixed" => Ok(FrameFunction::maximally_mixed(dim)),
        Some(("power", a)) => {
            let alpha: f64 = a
                .trim()
                .parse()
                .map_err(|_| CliError::parse(format!("power: cannot read exponent '{a}'")))?;
            Ok(FrameFunction::power_of_first_axis(dim, alpha)?)
        }
        _ => Err(CliError::parse(format!(
            "unknown frame function '{kind}' (expected quadratic, mixed or power:<alpha>)"
        ))),
    }
}

pub fn cmd_gleason(kind: &str, dim: usize, trials: usize, seed: u64, tol: f64) -> Result<(Value, u8), CliError> {
    if dim < 3 {
        return Err(envarkit_core::Error::DimensionTooSmall(dim).into());
    }
    let p = frame_function(kind, dim, seed)?;
    let mut report = audit(&p, dim, trials, seed)?;
    report.verdict = if report.max_dev <= tol {
        Verdict::Consistent
    } else {
        Verdict::Violated
    };
    let status = u8::from(report.verdict == Verdict::Violated);
    Ok((json(&AuditRecord::from(&report)), status))
}

pub fn build_state(kind: &str, seed: u64) -> Result<BipartiteState, CliError> {
    let (name, args) = kind.split_once(':').unwrap_or((kind, ""));
    let dims = |n: usize| -> Result<Vec<usize>, CliError> {
        let v: Vec<usize> = parse_list(args, name)?;
        if v.len() != n || v.contains(&0) {
            return Err(CliError::parse(format!("{name}: expected {n} positive dimension(s)")));
        }
        Ok(v)
    };
    match name {
        "bell" => Ok(BipartiteState::bell()),
        "max" => Ok(BipartiteState::maximally_entangled(dims(1)?[0])),
        "product" => {
            let d = dims(2)?;
            Ok(BipartiteState::product_basis(d[0], d[1], 0, 0))
        }
        "random" => {
            let d = dims(2)?;
            Ok(random_state(&mut rng(seed), d[0], d[1]))
        }
        _ => Err(CliError::parse(format!(
            "unknown state '{kind}' (expected bell, max:d, product:ds,de or random:ds,de)"
        ))),
    }
}

/// `key: value` lines; nested values stay compact JSON.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let shown = match x {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("{k}: {shown}\n"));
            }
        }
        other => {
            out.push_str(&other.to_string());
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_schedule_parsing() {
        assert_eq!(parse_swaps("1-2, 2-3").unwrap(), vec![(0, 1), (1, 2)]);
        assert!(parse_swaps("0-1").is_err());
        assert!(parse_swaps("1,2").is_err());
    }

    #[test]
    fn weight_parsing() {
        let w = parse_weights("1/3,2/3", 1e-9, 1000).unwrap();
        assert_eq!((w.numerators(), w.denominator()), (&[1u64, 2][..], 3));
        let w = parse_weights("0.25,0.75", 1e-9, 1000).unwrap();
        assert_eq!((w.numerators(), w.denominator()), (&[1u64, 3][..], 4));
        let err = parse_weights("1/3,1/3", 1e-9, 1000).unwrap_err();
        assert!(err.to_string().starts_with("WeightMismatch"), "{err}");
        assert!(parse_weights("a/3", 1e-9, 1000).is_err());
    }

    #[test]
    fn transform_errors() {
        let bell = BipartiteState::bell();
        assert!(cmd_envariance(&bell, "swap:1", ENVAR_TOL).is_err());
        assert!(cmd_envariance(&bell, "swap:0,1", ENVAR_TOL).is_err());
        assert!(cmd_envariance(&bell, "rotate:1", ENVAR_TOL).is_err());
        assert!(cmd_envariance(&bell, "swap", ENVAR_TOL).is_err());
    }

    #[test]
    fn text_view() {
        let v = serde_json::json!({"even": true, "kind": "quadratic", "lambda": [0.5]});
        assert_eq!(render_text(&v), "even: true\nkind: quadratic\nlambda: [0.5]\n");
    }

    #[test]
    fn state_builders() {
        assert_eq!(build_state("bell", 0).unwrap(), BipartiteState::bell());
        assert_eq!(build_state("max:3", 0).unwrap().dim_s(), 3);
        assert_eq!(build_state("random:2,3", 5).unwrap(), build_state("random:2,3", 5).unwrap());
        assert!(build_state("product:2", 0).is_err());
        assert!(build_state("max:0", 0).is_err());
        assert!(build_state("ghz", 0).is_err());
    }
}
