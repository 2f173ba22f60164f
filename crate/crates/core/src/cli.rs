//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 oracle guard exceeded,
//! 3 selftest failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cones::{
    chain_report, hasse_coordinates, in_hasse_cone, in_min_cone, in_std_cone, min_cone_rays,
    weight_hasse_coordinates,
};
use crate::error::{Error, Result};
use crate::oracle::{
    census_csv, check_decomposition, classify_box, confluence_sweep, equivalence_sweep,
    hilbert_basis, BoxSpec, DEFAULT_CEILING,
};
use crate::reduction::{explain, reduce, ReductionOutcome, StepStrategy, VanishingWitness};
use crate::splitting::SplittingType;
use crate::weights::{RationalVector, WeightVector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    First,
    Last,
}

impl From<StrategyArg> for StepStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::First => StepStrategy::FirstViolated,
            StrategyArg::Last => StepStrategy::LastViolated,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hasse-cones",
    version,
    about = "Weight cones and weight reduction for mod-p Hilbert modular forms"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Maximum number of candidates an exhaustive oracle may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_CEILING, value_parser = clap::value_parser!(u64).range(1..))]
    pub ceiling: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Membership in the minimal, standard and Hasse cones, with Hasse coordinates.
    ConeCheck {
        #[arg(long)]
        st: String,
        /// JSON array of integers or "a/b" strings.
        #[arg(long, allow_hyphen_values = true)]
        k: String,
    },
    /// Reduce a weight into the minimal cone or certify vanishing.
    Reduce {
        #[arg(long)]
        st: String,
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long, value_enum, default_value = "first")]
        strategy: StrategyArg,
        /// Text format only: print the conclusion without the step list.
        #[arg(long)]
        no_trace: bool,
    },
    /// Primitive integer generators of the minimal cone.
    Rays {
        #[arg(long)]
        st: String,
    },
    /// Containment chain of the three cones, with strictness witnesses.
    Chain {
        #[arg(long)]
        st: String,
    },
    /// Classify every weight of the box [lo, hi]^d.
    Census {
        #[arg(long)]
        st: String,
        #[arg(long, allow_negative_numbers = true)]
        lo: i64,
        #[arg(long, allow_negative_numbers = true)]
        hi: i64,
    },
    /// Explore every reduction order on the box [lo, hi]^d.
    Confluence {
        #[arg(long)]
        st: String,
        #[arg(long, allow_negative_numbers = true)]
        lo: i64,
        #[arg(long, allow_negative_numbers = true)]
        hi: i64,
    },
    /// Brute-force Hilbert basis of the minimal cone inside [0, bound]^d.
    Hilbert {
        #[arg(long)]
        st: String,
        #[arg(long, allow_negative_numbers = true)]
        bound: i64,
    },
    /// Cross-check reduction against the brute-force oracles on built-in cases.
    Selftest,
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct Config {
    pub splitting: Option<Arc<SplittingType>>,
    pub format: Format,
    pub ceiling: u64,
    pub strategy: StepStrategy,
}

/// Parses `p=<int>;f=<int>(,<int>)*`, ignoring whitespace.
pub fn parse_splitting(text: &str) -> Result<SplittingType> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |why: &str| Error::Parse(format!("splitting type {text:?}: {why}"));
    let (p_part, f_part) = compact
        .split_once(';')
        .ok_or_else(|| bad("expected \"p=<int>;f=<int>,...\""))?;
    let p = p_part
        .strip_prefix("p=")
        .ok_or_else(|| bad("missing \"p=\""))?
        .parse::<u64>()
        .map_err(|_| bad("p is not a nonnegative integer"))?;
    let degrees = f_part
        .strip_prefix("f=")
        .ok_or_else(|| bad("missing \"f=\""))?;
    let degrees = if degrees.is_empty() {
        Vec::new()
    } else {
        degrees
            .split(',')
            .map(|f| f.parse::<usize>().map_err(|_| bad("degree is not a nonnegative integer")))
            .collect::<Result<Vec<_>>>()?
    };
    SplittingType::new(p, &degrees)
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::GuardExceeded { .. } => EXIT_GUARD,
        _ => EXIT_USAGE,
    }
}

/// Runs the CLI; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn splitting_arg(text: &str, err: &mut dyn Write) -> Result<Arc<SplittingType>> {
    let st = parse_splitting(text)?;
    if st.d() == 1 {
        let _ = writeln!(
            err,
            "warning: d = 1 (a single degree-one prime over Q); results are computed \
             but the theory assumes a field of degree d > 1"
        );
    }
    Ok(Arc::new(st))
}

fn config(cli: &Cli, err: &mut dyn Write) -> Result<Config> {
    let (splitting, strategy) = match &cli.command {
        Command::ConeCheck { st, .. }
        | Command::Rays { st }
        | Command::Chain { st }
        | Command::Census { st, .. }
        | Command::Confluence { st, .. }
        | Command::Hilbert { st, .. } => (Some(splitting_arg(st, err)?), StepStrategy::default()),
        Command::Reduce { st, strategy, .. } => (Some(splitting_arg(st, err)?), (*strategy).into()),
        Command::Selftest => (None, StepStrategy::default()),
    };
    Ok(Config {
        splitting,
        format: cli.format,
        ceiling: cli.ceiling,
        strategy,
    })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report types serialize");
    s.push('\n');
    s
}

fn unsupported(format: Format, command: &str) -> Error {
    Error::Parse(format!("--format {format:?} is not supported by {command}").to_lowercase())
}

fn vectors_csv(vs: &[WeightVector]) -> String {
    let mut s = String::new();
    for v in vs {
        let row: Vec<String> = v.entries().iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Serialize)]
struct ConeCheckReport<'a> {
    min: bool,
    std: bool,
    hasse: bool,
    y: &'a RationalVector,
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = config(cli, err)?;
    let st = || cfg.splitting.clone().expect("command has a splitting type");
    let text = match &cli.command {
        Command::ConeCheck { k, .. } => {
            let x = RationalVector::from_json(&st(), k)?;
            let y = hasse_coordinates(&x);
            let report = ConeCheckReport {
                min: in_min_cone(&x),
                std: in_std_cone(&x),
                hasse: in_hasse_cone(&x),
                y: y.y(),
            };
            match cfg.format {
                Format::Json => json(&report),
                Format::Text => format!(
                    "k = {x}\nminimal cone: {}\nstandard cone: {}\nHasse cone: {}\ny = {}\n",
                    yes(report.min),
                    yes(report.std),
                    yes(report.hasse),
                    y.y()
                ),
                Format::Csv => return Err(unsupported(cfg.format, "cone-check")),
            }
        }
        Command::Reduce { k, no_trace, .. } => {
            let k = WeightVector::from_json(&st(), k)?;
            let outcome = reduce(&k, cfg.strategy)?;
            match cfg.format {
                Format::Json => json(&outcome),
                Format::Text if *no_trace => summary(&outcome),
                Format::Text => explain(&outcome),
                Format::Csv => return Err(unsupported(cfg.format, "reduce")),
            }
        }
        Command::Rays { .. } => {
            let rays = min_cone_rays(&st());
            match cfg.format {
                Format::Json => json(&rays),
                Format::Csv => vectors_csv(&rays),
                Format::Text => rays.iter().map(|r| format!("{r}\n")).collect(),
            }
        }
        Command::Chain { .. } => {
            let report = chain_report(&st());
            match cfg.format {
                Format::Json => json(&report),
                Format::Text => match &report.witnesses {
                    None => format!(
                        "splits completely: yes\nC^min = C^st = C^Hasse\n{}\n",
                        report.note.as_deref().unwrap_or_default()
                    ),
                    Some(w) => format!(
                        "splits completely: no\nC^min < C^st < C^Hasse (strict)\n\
                         in C^st but not C^min: e_{} = {}\n\
                         in C^Hasse but not C^st: h_{} = {}\n",
                        w.beta, w.std_not_min, w.beta, w.hasse_not_std
                    ),
                },
                Format::Csv => return Err(unsupported(cfg.format, "chain")),
            }
        }
        Command::Census { lo, hi, .. } => {
            let census = classify_box(&BoxSpec::new(&st(), *lo, *hi)?, cfg.ceiling)?;
            match cfg.format {
                Format::Json => json(&census),
                Format::Csv => census_csv(&census)?,
                Format::Text => format!(
                    "weights: {}\nminimal already: {}\nreduces to minimal: {}\n\
                     vanishing (outside Hasse cone): {}\nvanishing (by chain): {}\n\
                     cross-checks: {}\n",
                    census.total,
                    census.minimal_already,
                    census.reduces,
                    census.vanishing_by_hasse,
                    census.vanishing_by_chain,
                    if census.cross_checks.all_pass() { "pass" } else { "FAIL" }
                ),
            }
        }
        Command::Confluence { lo, hi, .. } => {
            let report = confluence_sweep(&BoxSpec::new(&st(), *lo, *hi)?, cfg.ceiling)?;
            match cfg.format {
                Format::Json => json(&report),
                Format::Text => {
                    let mut s = format!(
                        "weights checked: {}\nempty traces: {}\ncounterexamples: {}\n",
                        report.weights_checked,
                        report.empty_traces,
                        report.counterexamples.len()
                    );
                    for c in &report.counterexamples {
                        let _ = writeln!(s, "  {} -> {}", c.k, json(&c.endpoints).trim());
                    }
                    s
                }
                Format::Csv => return Err(unsupported(cfg.format, "confluence")),
            }
        }
        Command::Hilbert { bound, .. } => {
            let basis = hilbert_basis(&st(), *bound, cfg.ceiling)?;
            match cfg.format {
                Format::Json => json(&basis),
                Format::Csv => vectors_csv(&basis.elements),
                Format::Text => {
                    let mut s: String = basis.elements.iter().map(|e| format!("{e}\n")).collect();
                    let _ = writeln!(s, "status: {}", basis.status);
                    s
                }
            }
        }
        Command::Selftest => {
            let (report, ok) = selftest(cfg.ceiling)?;
            out.write_all(report.as_bytes())
                .map_err(|e| Error::Internal(e.to_string()))?;
            return Ok(if ok { EXIT_OK } else { EXIT_SELFTEST });
        }
    };
    out.write_all(text.as_bytes())
        .map_err(|e| Error::Internal(format!("writing output: {e}")))?;
    Ok(EXIT_OK)
}

fn summary(outcome: &ReductionOutcome) -> String {
    match outcome {
        ReductionOutcome::Minimal { k_min, n, trace } => format!(
            "minimal weight {k_min} with exponents n = {n} after {} steps\n",
            trace.len()
        ),
        ReductionOutcome::Vanishing { trace, witness } => format!(
            "vanishing after {} steps: {} at {} with value {}\n",
            trace.len(),
            witness.kind(),
            witness.beta(),
            witness.value_string()
        ),
    }
}

/// Built-in oracle-equivalence and golden checks. Returns the report and
/// whether everything passed.
pub fn selftest(ceiling: u64) -> Result<(String, bool)> {
    let mut report = String::new();
    let mut ok = true;
    let mut line = |name: String, pass: bool| {
        ok &= pass;
        let _ = writeln!(report, "{} {name}", if pass { "PASS" } else { "FAIL" });
    };

    for (p, degrees, lo, hi) in [
        (2, &[2][..], -6, 6),
        (3, &[3][..], -4, 4),
        (2, &[1, 2][..], -4, 4),
        (5, &[1, 1][..], -6, 6),
        (3, &[2, 2][..], -2, 2),
    ] {
        let st = Arc::new(SplittingType::new(p, degrees)?);
        let eq = equivalence_sweep(&BoxSpec::new(&st, lo, hi)?, ceiling)?;
        line(
            format!(
                "oracle equivalence {st} on [{lo},{hi}]^{}: {} weights, {} minimal, {} vanishing",
                st.d(),
                eq.checked,
                eq.minimal,
                eq.vanishing
            ),
            eq.is_consistent(),
        );
        let census = classify_box(&BoxSpec::new(&st, lo, hi)?, ceiling)?;
        line(format!("census cross-checks {st}"), census.cross_checks.all_pass());
    }

    let inert = Arc::new(SplittingType::new(2, &[2])?);
    let split = Arc::new(SplittingType::new(5, &[1, 1])?);
    let golden = |st: &Arc<SplittingType>, k: &[i64]| -> Result<ReductionOutcome> {
        reduce(&WeightVector::from_i64(st, k)?, StepStrategy::FirstViolated)
    };
    let w = |st: &Arc<SplittingType>, k: &[i64]| WeightVector::from_i64(st, k);

    let pass = matches!(golden(&inert, &[0, 3])?,
        ReductionOutcome::Minimal { ref k_min, ref n, .. }
            if *k_min == w(&inert, &[1, 1])? && *n == w(&inert, &[1, 0])?);
    line("golden p=2;f=2 reduce (0,3) -> (1,1), n = (1,0)".into(), pass);

    let pass = matches!(golden(&inert, &[0, 1])?,
        ReductionOutcome::Vanishing { ref trace, witness: VanishingWitness::NegativeHasseCoordinate { .. } }
            if trace.len() <= 2);
    line("golden p=2;f=2 reduce (0,1) vanishes with a negative Hasse coordinate".into(), pass);

    let pass = matches!(golden(&split, &[-1, 7])?,
        ReductionOutcome::Vanishing { ref trace, witness: VanishingWitness::DegreeOneNegative { .. } }
            if trace.is_empty());
    line("golden p=5;f=1,1 reduce (-1,7) vanishes on a degree-one orbit".into(), pass);

    let y = weight_hasse_coordinates(&w(&inert, &[-1, -1])?);
    line(
        "golden p=2;f=2 y(-1,-1) = (-1,-1)".into(),
        y.y().to_integer() == Some(w(&inert, &[-1, -1])?),
    );

    let basis = hilbert_basis(&inert, 6, ceiling)?;
    let check = check_decomposition(&inert, 6, &basis.elements, ceiling)?;
    line(
        format!("hilbert basis p=2;f=2 bound 6: {} elements, all box points decompose", basis.elements.len()),
        check.undecomposed.is_empty(),
    );

    Ok((report, ok))
}
