use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use confprop::automata::Dfa;
use confprop::eventlog::EventLog;
use confprop::measures::{EvalConfig, Registry, BASELINE_MEASURES, TABLE_MEASURES};
use confprop::negev::Window;
use confprop::procmodel::{format_value, MeasureValue, Model, Net};
use confprop::propositions::catalog::{self, FixtureSet};
use confprop::propositions::suite::{self, PropositionVerdict, Status, SuiteConfig};
use confprop::propositions::{CheckConfig, Outcome, PropositionId, ALL, DETPRO_POLICIES};
use confprop::replay::ReplayPolicy;

/// Writes to stdout, exiting quietly when it is a closed pipe.
fn emit(args: std::fmt::Arguments, newline: bool) {
    use std::io::Write as _;
    let mut out = std::io::stdout().lock();
    let res = out.write_fmt(args).and_then(|_| if newline { out.write_all(b"\n") } else { Ok(()) });
    if let Err(e) = res {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {e}");
    }
}

macro_rules! out {
    () => { emit(format_args!(""), true) };
    ($($t:tt)*) => { emit(format_args!($($t)*), true) };
}

macro_rules! out_raw {
    ($($t:tt)*) => { emit(format_args!($($t)*), false) };
}

const EXIT_UNDEFINED: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "confprop", version, about = "Conformance measures and the propositions they should satisfy")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate measures on one log and one model.
    Measure(MeasureArgs),
    /// Audit measures against the propositions and print the verdict grid.
    Suite(SuiteArgs),
    /// List or verify the shipped fixtures.
    Fixtures(FixtureArgs),
    /// Re-check a serialized witness bundle.
    Witness(WitnessArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Subset size for the projected measures.
    #[arg(long, default_value_t = confprop::projected::DEFAULT_K)]
    k: usize,
    /// Negative-event window; defaults to the longest trace.
    #[arg(long)]
    window: Option<usize>,
}

impl EvalArgs {
    fn config(&self) -> EvalConfig {
        EvalConfig { k: self.k, window: self.window.map_or(Window::Max, Window::Len), ..EvalConfig::default() }
    }
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    log: PathBuf,
    /// Petri net in `.net` format.
    #[arg(long, required_unless_present = "dfa", conflicts_with = "dfa")]
    net: Option<PathBuf>,
    /// Automaton in `.dfa` format.
    #[arg(long)]
    dfa: Option<PathBuf>,
    /// Measure ids, repeatable or comma-separated.
    #[arg(long, required = true, value_delimiter = ',')]
    measure: Vec<String>,
    #[arg(long, default_value_t = 0)]
    policy_seed: u64,
    #[command(flatten)]
    eval: EvalArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
    JsonLines,
}

#[derive(Args)]
struct SuiteArgs {
    /// Every registered measure and every proposition.
    #[arg(long)]
    all: bool,
    /// Measure ids, comma-separated, or `all`.
    #[arg(long, value_delimiter = ',', required_unless_present = "all")]
    measures: Vec<String>,
    /// Propositions: names, numbers, ranges such as `RecPro1..5`, or `all`.
    #[arg(long, value_delimiter = ',')]
    props: Vec<String>,
    /// Random instances per (measure, proposition).
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Comparison tolerance; defaults to each measure's own.
    #[arg(long)]
    eps: Option<f64>,
    /// Reference grid (`measure,proposition,verdict`); exit 3 on any differing cell.
    #[arg(long)]
    expect: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the grid here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write one witness bundle per violated or undefined cell.
    #[arg(long)]
    witness_dir: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Skip the fixture counter-examples.
    #[arg(long)]
    no_fixtures: bool,
    /// RecPro3 variant that also requires the base log to fit.
    #[arg(long)]
    recpro3_fitting_base: bool,
    #[command(flatten)]
    eval: EvalArgs,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long, conflicts_with = "verify", required_unless_present = "verify")]
    list: bool,
    #[arg(long)]
    verify: bool,
    /// Directory whose `.log`/`.net` files override the embedded fixtures.
    #[arg(long)]
    dir: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    /// Bundle directory containing `manifest.txt`.
    dir: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_model(net: Option<&Path>, dfa: Option<&Path>) -> Result<Model> {
    match (net, dfa) {
        (Some(p), _) => Ok(Model::from_net(Net::parse(&read(p)?).with_context(|| p.display().to_string())?)),
        (_, Some(p)) => Ok(Model::from_dfa(Dfa::parse(&read(p)?).with_context(|| p.display().to_string())?)),
        _ => bail!("a model is required"),
    }
}

fn show(v: &MeasureValue) -> String {
    match v {
        MeasureValue::Value(x) => format_value(*x),
        MeasureValue::Undefined(r) => format!("undefined({r})"),
    }
}

fn cmd_measure(a: &MeasureArgs) -> Result<u8> {
    let reg = Registry::standard();
    let ms = a.measure.iter().map(|id| reg.require(id.trim())).collect::<confprop::error::Result<Vec<_>>>()?;
    let log = EventLog::parse(&read(&a.log)?).with_context(|| a.log.display().to_string())?;
    let model = load_model(a.net.as_deref(), a.dfa.as_deref())?;
    let cfg = a.eval.config().with_policy(ReplayPolicy::new(a.policy_seed));
    let mut code = 0;
    for m in ms {
        let v = m.eval(&log, &model, &cfg).with_context(|| m.id().to_string())?;
        if v.value().is_none() {
            code = EXIT_UNDEFINED;
        }
        out!("{}\t{}", m.id(), show(&v));
    }
    Ok(code)
}

fn parse_props(specs: &[String]) -> Result<Vec<PropositionId>> {
    if specs.is_empty() || specs.iter().any(|s| s.eq_ignore_ascii_case("all")) {
        return Ok(ALL.to_vec());
    }
    let mut out = Vec::new();
    for s in specs {
        let s = s.trim();
        let picked: Vec<PropositionId> = match s.split_once("..") {
            Some((lo, hi)) => {
                let first = PropositionId::parse(lo).with_context(|| format!("unknown proposition `{lo}`"))?;
                // `RecPro1..5` repeats the prefix of the lower bound.
                let hi = if hi.chars().all(|c| c.is_ascii_digit()) && !lo.chars().all(|c| c.is_ascii_digit()) {
                    format!("{}{hi}", lo.trim_end_matches(|c: char| c.is_ascii_digit()))
                } else {
                    hi.to_string()
                };
                let last = PropositionId::parse(&hi).with_context(|| format!("unknown proposition `{hi}`"))?;
                if last.number() < first.number() {
                    bail!("empty proposition range `{s}`");
                }
                ALL[first.number() - 1..last.number()].to_vec()
            }
            None => vec![PropositionId::parse(s).with_context(|| format!("unknown proposition `{s}`"))?],
        };
        for p in picked {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

fn json_lines(verdicts: &[PropositionVerdict], cfg: &SuiteConfig) -> String {
    let seeds: Vec<u64> = cfg.check.policies.iter().map(|p| p.seed).collect();
    let mut s = String::new();
    for v in verdicts {
        let (instances, detail) = match &v.status {
            Status::HoldsOnSuite(n) => (*n, None),
            Status::Violated(w) | Status::UndefinedEncountered(w) => (0, Some(w.detail.as_str())),
        };
        let rec = json!({
            "measure": v.measure,
            "proposition": v.proposition.name(),
            "verdict": v.status.verdict().word(),
            "instances": instances,
            "skipped": v.skipped,
            "rejected": v.rejected,
            "seed": cfg.seed,
            "budget": cfg.budget,
            "policy_seeds": seeds,
            "eps": v.eps,
            "detail": detail,
        });
        s.push_str(&rec.to_string());
        s.push('\n');
    }
    s
}

fn cmd_suite(a: &SuiteArgs) -> Result<u8> {
    let reg = Registry::standard();
    let measures: Vec<String> = if a.all || a.measures.iter().any(|m| m == "all") {
        TABLE_MEASURES.iter().chain(BASELINE_MEASURES).map(|s| s.to_string()).collect()
    } else {
        a.measures.iter().map(|m| m.trim().to_string()).collect()
    };
    for m in &measures {
        reg.require(m)?;
    }
    let props = if a.all { ALL.to_vec() } else { parse_props(&a.props)? };
    if let Some(eps) = a.eps {
        if !(eps >= 0.0) {
            bail!("--eps must be non-negative");
        }
    }
    let cfg = SuiteConfig {
        budget: a.budget as usize,
        seed: a.seed,
        check: CheckConfig {
            eval: a.eval.config(),
            policies: (0..DETPRO_POLICIES).map(ReplayPolicy::new).collect(),
            eps: a.eps,
            recpro3_fitting_base: a.recpro3_fitting_base,
        },
        fixtures: !a.no_fixtures,
    };
    let expected = match &a.expect {
        Some(p) => Some(suite::parse_grid(&read(p)?).with_context(|| p.display().to_string())?),
        None => None,
    };
    let started = Instant::now();
    let ids: Vec<&str> = measures.iter().map(String::as_str).collect();
    let fixtures = FixtureSet::embedded();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = a.jobs {
        pool = pool.num_threads(n.max(1));
    }
    let report = pool.build()?.install(|| suite::run_suite(&reg, &ids, &props, &cfg, &fixtures))?;

    let grid = match a.format {
        Format::Csv => suite::to_csv(&report.verdicts),
        Format::Markdown => suite::to_markdown(&report.verdicts),
        Format::JsonLines => json_lines(&report.verdicts, &cfg),
    };
    match &a.output {
        Some(p) => std::fs::write(p, &grid).with_context(|| format!("writing {}", p.display()))?,
        None => out_raw!("{grid}"),
    }
    if let Some(dir) = &a.witness_dir {
        let written = suite::write_witnesses(dir, &report.verdicts, &cfg)?;
        eprintln!("{} witness bundle(s) in {}", written.len(), dir.display());
    }
    eprintln!("{} cell(s) in {:.1}s", report.verdicts.len(), started.elapsed().as_secs_f64());
    for f in &report.implication_failures {
        eprintln!("implication check: {f}");
    }
    let mut code = if report.implication_failures.is_empty() { 0 } else { EXIT_MISMATCH };
    if let Some(expected) = expected {
        let diff = suite::diff(&report.verdicts, &expected);
        for d in &diff {
            eprintln!("mismatch: {d}");
        }
        if !diff.is_empty() {
            eprintln!("{} cell(s) differ from {}", diff.len(), a.expect.as_ref().expect("set").display());
            code = EXIT_MISMATCH;
        }
    }
    Ok(code)
}

fn cmd_fixtures(a: &FixtureArgs) -> Result<u8> {
    let set = match &a.dir {
        Some(d) => FixtureSet::with_dir(d)?,
        None => FixtureSet::embedded(),
    };
    if a.list {
        for ce in catalog::counter_examples() {
            out!("{}\t{}\t{}\t{}", ce.name, ce.proposition, ce.measures.join(","), ce.passage);
        }
        for p in catalog::pins() {
            out!("{}\tpin {}\t\t{}", p.name, format_value(p.expected), p.passage);
        }
        return Ok(0);
    }
    let drift = catalog::verify(&set);
    for d in &drift {
        match &d.got {
            Ok(v) => out!("drift\t{}\texpected {}\tgot {}", d.name, format_value(d.expected), format_value(*v)),
            Err(e) => out!("drift\t{}\texpected {}\terror: {e}", d.name, format_value(d.expected)),
        }
    }
    let n = catalog::pins().len();
    out!("{} of {n} pinned value(s) verified", n - drift.len());
    Ok(if drift.is_empty() { 0 } else { EXIT_MISMATCH })
}

fn cmd_witness(a: &WitnessArgs) -> Result<u8> {
    let reg = Registry::standard();
    let w = suite::read_witness(&a.dir)?;
    let out = suite::replay_witness(&reg, &w, &CheckConfig::default())?;
    let got = suite::outcome_values(&out);
    out!("{} {}: {}", w.measure, w.proposition, match &out {
        Outcome::Holds(_) => "holds".to_string(),
        Outcome::Violated { detail, .. } => format!("violated, {detail}"),
        Outcome::Skipped(r) => format!("skipped, {r}"),
        Outcome::Error(e) => format!("error, {e}"),
    });
    if got != w.values {
        out!("recorded values [{}] differ from recomputed [{}]", w.values.join(" "), got.join(" "));
        return Ok(EXIT_MISMATCH);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Measure(a) => cmd_measure(a),
        Cmd::Suite(a) => cmd_suite(a),
        Cmd::Fixtures(a) => cmd_fixtures(a),
        Cmd::Witness(a) => cmd_witness(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
