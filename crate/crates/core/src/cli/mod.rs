//! The `ontokit` command line.
//!
//! Exit codes: `0` success, `1` a verification failed (some residual above
//! tolerance), `2` usage error (bad flags, unreadable or malformed input).
//! [`execute`] runs a command line in-process and returns the code with the
//! bytes that would be written.

mod demo;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;
use serde::de::DeserializeOwned;
use serde_json::json;

pub use demo::{run_demo, DemoOptions};

use crate::chained::{chained_row, ChainedRow};
use crate::error::{Error, Result};
use crate::models::{
    abcl_model, beltrametti_bugajski, bell_model, maximally_mixed_decompositions, ppm_natural_model, qubit_zx_fragment,
    random_basis_fragment, spekkens_fragment, spekkens_toy_bit, KsQubitModel,
};
use crate::onto::{classify, detect_preparation_contextuality, verify_reproduces, OntologicalModel};
use crate::prob::{self, oracle, FiniteDistribution};
use crate::quantum::{born_rule, PMFragment};
use crate::report::{format_float, render_json, render_report, Format, Report};
use crate::{POVM_TOL, ZERO_WEIGHT};

/// Environment variable holding the default tolerance.
pub const TOL_ENV: &str = "ONTOKIT_TOL";

#[derive(Parser, Debug)]
#[command(name = "ontokit", version, about = "Ontological models of quantum fragments: build, verify, classify")]
pub struct Cli {
    /// Residual tolerance (default: $ONTOKIT_TOL, else 1e-10).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized fragments and sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Artifact format: json (default) or csv.
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Spekkens,
    Bb,
    Bell,
    Ks,
    Abcl,
    Ppm,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Spekkens,
    Bb,
    Bell,
    Ks,
    Abcl,
    Ppm,
    Pbr,
    Hardy,
    Chained,
    PbrWitness,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit a built-in model as JSON.
    Model {
        kind: ModelKind,
        /// Fragment JSON for bell/abcl (default: qubit Z/X fragment, or a
        /// seeded random fragment when --dim is given).
        #[arg(long)]
        fragment: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        /// States in a random fragment.
        #[arg(long, default_value_t = 20)]
        states: usize,
        /// Bases in a random fragment.
        #[arg(long, default_value_t = 20)]
        bases: usize,
        /// ABCL overlapping states (default: first nonorthogonal pair).
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        /// Write the fragment here and leave it out of the model JSON.
        #[arg(long)]
        fragment_out: Option<PathBuf>,
    },
    /// Check that a model reproduces its fragment's Born probabilities.
    Verify {
        #[arg(long)]
        model: PathBuf,
        /// Fragment JSON, replacing any fragment inside the model.
        #[arg(long)]
        fragment: Option<PathBuf>,
    },
    /// psi-ontic / psi-epistemic classification and preparation contextuality.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        fragment: Option<PathBuf>,
    },
    /// Run a worked example ending in a pass/fail verdict.
    Demo {
        name: DemoName,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        overlap: Option<f64>,
        /// Number of seeded random pairs to sweep.
        #[arg(long)]
        pairs: Option<usize>,
        /// `N` or an inclusive range `A..B`.
        #[arg(long)]
        n: Option<String>,
    },
    /// Overlap and pairwise distances of finite distributions.
    Overlap {
        /// JSON list (or name-keyed object) of `{label: weight}` maps.
        #[arg(long)]
        input: PathBuf,
    },
    /// Chained Bell correlation `I_N` against its closed form and bound.
    Chained {
        /// `N` or an inclusive range `A..B`.
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Cross-check the closed-form tables against the Born rule.
        #[arg(long)]
        verify: bool,
    },
    /// Re-render a report JSON; exit status follows its verdict.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

struct Artifact {
    bytes: Vec<u8>,
    passed: bool,
}

struct Context {
    tol: f64,
    seed: u64,
    format: Format,
}

/// Parses and runs a full command line (first item is the program name).
pub fn execute<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CliOutput { code, stdout: text.into_bytes(), stderr: String::new() }
            } else {
                CliOutput { code, stdout: Vec::new(), stderr: text }
            };
        }
    };
    match run(cli) {
        Ok(out) => out,
        Err(e) => CliOutput { code: 2, stdout: Vec::new(), stderr: format!("error: {e}\n") },
    }
}

fn resolve_tol(flag: Option<f64>) -> Result<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(v) => v
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("{TOL_ENV}={v} is not a number")))?,
            Err(_) => POVM_TOL,
        },
    };
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    Ok(tol)
}

fn run(cli: Cli) -> Result<CliOutput> {
    let format = if cli.json { Format::Json } else { cli.format.unwrap_or(Format::Json) };
    let ctx = Context { tol: resolve_tol(cli.tol)?, seed: cli.seed, format };
    let artifact = dispatch(&cli.command, &ctx)?;
    let code = if artifact.passed { 0 } else { 1 };
    match &cli.out {
        Some(path) => {
            fs::write(path, &artifact.bytes).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
            Ok(CliOutput { code, stdout: Vec::new(), stderr: String::new() })
        }
        None => Ok(CliOutput { code, stdout: artifact.bytes, stderr: String::new() }),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn json_artifact(value: &serde_json::Value, ctx: &Context) -> Result<Artifact> {
    if ctx.format != Format::Json {
        return Err(Error::InvalidArgument("this command only emits JSON".into()));
    }
    let mut text = render_json(value);
    text.push('\n');
    Ok(Artifact { bytes: text.into_bytes(), passed: true })
}

fn report_artifact(report: &Report, ctx: &Context) -> Result<Artifact> {
    Ok(Artifact { bytes: render_report(report, ctx.format)?, passed: report.verified })
}

fn load_model(model: &Path, fragment: Option<&PathBuf>) -> Result<OntologicalModel> {
    let m: OntologicalModel = read_json(model)?;
    match fragment {
        Some(f) => m.with_fragment(read_json(f)?),
        None => Ok(m),
    }
}

fn dispatch(cmd: &Command, ctx: &Context) -> Result<Artifact> {
    match cmd {
        Command::Model { kind, fragment, dim, states, bases, a, b, fragment_out } => {
            let value = build_model(*kind, fragment.as_ref(), *dim, (*states, *bases), (a.as_deref(), b.as_deref()), fragment_out.as_ref(), ctx)?;
            json_artifact(&value, ctx)
        }
        Command::Verify { model, fragment } => {
            let m = load_model(model, fragment.as_ref())?;
            report_artifact(&verify_reproduces(&m, ctx.tol)?, ctx)
        }
        Command::Classify { model, fragment } => {
            let m = load_model(model, fragment.as_ref())?;
            let mut r = classify(&m)?.to_report();
            let contextual = detect_preparation_contextuality(&m)?;
            r.flag("preparation_contextual", !contextual.is_empty());
            for s in contextual {
                r.note(format!("preparation contextual on `{s}`"));
            }
            report_artifact(&r, ctx)
        }
        Command::Demo { name, dim, overlap, pairs, n } => {
            let opts = DemoOptions { dim: *dim, overlap: *overlap, pairs: *pairs, n: n.as_deref().map(parse_n_range).transpose()? };
            let r = run_demo(*name, &opts, ctx.tol, ctx.seed)?;
            report_artifact(&r, ctx)
        }
        Command::Overlap { input } => report_artifact(&overlap_report(&read_json(input)?, ctx.tol)?, ctx),
        Command::Chained { n, dim, verify } => chained_artifact(parse_n_range(n)?, *dim, *verify, ctx),
        Command::Report { input } => {
            let r: Report = read_json(input)?;
            report_artifact(&r, ctx)
        }
    }
}

/// `"N"` or `"A..B"` (inclusive).
pub fn parse_n_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidArgument(format!("`{s}` is not N or A..B"));
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn first_nonorthogonal_pair(f: &PMFragment) -> Result<(String, String)> {
    let names: Vec<&String> = f.states.keys().collect();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            if born_rule(&f.states[*a], &f.states[*b])? > POVM_TOL {
                return Ok(((*a).clone(), (*b).clone()));
            }
        }
    }
    Err(Error::InvalidArgument("fragment has no nonorthogonal pair of states".into()))
}

fn build_model(
    kind: ModelKind,
    fragment: Option<&PathBuf>,
    dim: Option<usize>,
    (states, bases): (usize, usize),
    (a, b): (Option<&str>, Option<&str>),
    fragment_out: Option<&PathBuf>,
    ctx: &Context,
) -> Result<serde_json::Value> {
    use rand::SeedableRng;
    let basis_fragment = || -> Result<PMFragment> {
        match (fragment, dim) {
            (Some(p), _) => read_json(p),
            (None, Some(d)) => Ok(random_basis_fragment(d, states, bases, &mut rand::rngs::StdRng::seed_from_u64(ctx.seed))),
            (None, None) => Ok(qubit_zx_fragment()),
        }
    };
    let model = match kind {
        ModelKind::Ks => return Ok(json!({ "kind": "ks_qubit", "model": serde_json::to_value(KsQubitModel::default())? })),
        ModelKind::Spekkens => spekkens_toy_bit(),
        ModelKind::Bb => beltrametti_bugajski(&spekkens_fragment(), &maximally_mixed_decompositions(), true)?,
        ModelKind::Ppm => ppm_natural_model(dim.unwrap_or(3))?,
        ModelKind::Bell => bell_model(&basis_fragment()?)?,
        ModelKind::Abcl => {
            let f = basis_fragment()?;
            let (da, db) = first_nonorthogonal_pair(&f)?;
            let (na, nb) = (a.map_or(da, String::from), b.map_or(db, String::from));
            let (va, vb) = (f.pure_vector(&na, POVM_TOL)?, f.pure_vector(&nb, POVM_TOL)?);
            abcl_model(&f, &va, &vb)?.model
        }
    };
    match fragment_out {
        Some(path) => {
            let (space, delta, xi, frag) = model.into_parts();
            let frag = frag.expect("built-in models carry fragments");
            let mut text = render_json(&serde_json::to_value(&frag)?);
            text.push('\n');
            fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
            Ok(serde_json::to_value(OntologicalModel::new(space, delta, xi, None)?)?)
        }
        None => Ok(serde_json::to_value(&model)?),
    }
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum DistributionSet {
    List(Vec<FiniteDistribution>),
    Named(IndexMap<String, FiniteDistribution>),
}

/// Largest union support for which the partition-enumeration oracle runs.
const ORACLE_MAX_SUPPORT: usize = 8;

fn overlap_report(input: &DistributionSet, tol: f64) -> Result<Report> {
    let (names, mus): (Vec<String>, Vec<FiniteDistribution>) = match input {
        DistributionSet::List(v) => v.iter().enumerate().map(|(i, m)| (i.to_string(), m.clone())).unzip(),
        DistributionSet::Named(m) => m.iter().map(|(k, v)| (k.clone(), v.clone())).unzip(),
    };
    if mus.is_empty() {
        return Err(Error::InvalidArgument("no distributions given".into()));
    }
    let mut r = Report::new("overlap", tol);
    let l = prob::overlap(&mus)?;
    r.metric("overlap", l);
    r.metric("overlap_thresholded", prob::overlap_thresholded(&mus, ZERO_WEIGHT)?);
    for i in 0..mus.len() {
        for j in i + 1..mus.len() {
            let d = prob::variational_distance(&mus[i], &mus[j]);
            let lij = prob::overlap(&[mus[i].clone(), mus[j].clone()])?;
            r.metric(format!("distance[{},{}]", names[i], names[j]), d);
            r.check(format!("overlap_is_1_minus_distance[{},{}]", names[i], names[j]), 1.0 - d, lij);
        }
    }
    if prob::unified_labels(&mus).len() <= ORACLE_MAX_SUPPORT {
        r.check("partition_oracle", oracle::partition_overlap(&mus)?, l);
    }
    Ok(r)
}

fn chained_artifact((lo, hi): (usize, usize), dim: usize, verify: bool, ctx: &Context) -> Result<Artifact> {
    let rows: Vec<ChainedRow> = (lo..=hi).map(|n| chained_row(n, dim, verify)).collect::<Result<_>>()?;
    let passed = rows.iter().all(|r| r.i_n <= r.bound && r.max_born_residual.is_none_or(|x| x <= ctx.tol));
    let bytes = match ctx.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "dim", "i_n", "closed_form", "bound", "max_born_residual"])?;
            for r in &rows {
                w.write_record([
                    r.n.to_string(),
                    r.dim.to_string(),
                    format_float(r.i_n),
                    format_float(r.closed_form),
                    format_float(r.bound),
                    r.max_born_residual.map(format_float).unwrap_or_default(),
                ])?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))?
        }
        Format::Json => {
            let mut text = render_json(&json!({ "tolerance": ctx.tol, "verified": passed, "rows": rows }));
            text.push('\n');
            text.into_bytes()
        }
    };
    Ok(Artifact { bytes, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> CliOutput {
        execute(std::iter::once("ontokit").chain(args.iter().copied()))
    }

    #[test]
    fn n_ranges() {
        assert_eq!(parse_n_range("8").unwrap(), (8, 8));
        assert_eq!(parse_n_range("1..64").unwrap(), (1, 64));
        assert_eq!(parse_n_range("2..=3").unwrap(), (2, 3));
        assert!(parse_n_range("0").is_err() && parse_n_range("5..2").is_err() && parse_n_range("x").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(&["frobnicate"]).code, 2);
        assert_eq!(run(&["chained", "--n", "0"]).code, 2);
        assert_eq!(run(&["chained", "--n", "3", "--tol", "-1"]).code, 2);
        assert_eq!(run(&["verify", "--model", "/nonexistent/m.json"]).code, 2);
        assert_eq!(run(&["model", "spekkens", "--format", "csv"]).code, 2);
    }

    #[test]
    fn help_exits_0() {
        let out = run(&["--help"]);
        assert_eq!(out.code, 0);
        assert!(String::from_utf8(out.stdout).unwrap().contains("chained"));
    }

    #[test]
    fn chained_csv_row() {
        let out = run(&["chained", "--n", "8", "--format", "csv"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let text = String::from_utf8(out.stdout).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("n,dim,i_n"));
        assert!(lines[1].starts_with("8,2,"));
    }
}
