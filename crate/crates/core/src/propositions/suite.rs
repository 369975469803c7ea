//! Verdict grids: every (measure, proposition) pair audited on the fixture
//! counter-examples and then on random instances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::catalog::{counter_examples, FixtureSet};
use super::{check, generate, CheckConfig, Instance, Outcome, PropositionId};
use crate::error::{Error, Result};
use crate::eventlog::EventLog;
use crate::measures::{Dimension, Measure, Registry};
use crate::procmodel::{format_value, MeasureValue, Model, Net};
use crate::automata::Dfa;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Random instances per (measure, proposition) pair.
    pub budget: usize,
    pub seed: u64,
    pub check: CheckConfig,
    /// Check the fixture counter-examples first.
    pub fixtures: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { budget: 500, seed: 7, check: CheckConfig::default(), fixtures: true }
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub instance: Instance,
    pub values: Vec<MeasureValue>,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub enum Status {
    /// No violation on this many checked instances.
    HoldsOnSuite(usize),
    Violated(Witness),
    /// No violation, but some evaluation failed; the first failure is kept.
    UndefinedEncountered(Witness),
}

impl Status {
    pub fn verdict(&self) -> Verdict {
        match self {
            Status::HoldsOnSuite(_) => Verdict::Holds,
            Status::Violated(_) => Verdict::Violated,
            Status::UndefinedEncountered(_) => Verdict::Undefined,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Status::HoldsOnSuite(_) => None,
            Status::Violated(w) | Status::UndefinedEncountered(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Holds,
    Violated,
    Undefined,
}

impl Verdict {
    pub fn word(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Undefined => "undefined",
        }
    }

    pub fn mark(self) -> &'static str {
        match self {
            Verdict::Holds => "✓",
            Verdict::Violated => "✗",
            Verdict::Undefined => "?",
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        match s.trim() {
            "holds" | "✓" => Some(Verdict::Holds),
            "violated" | "✗" => Some(Verdict::Violated),
            "undefined" | "?" => Some(Verdict::Undefined),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropositionVerdict {
    pub measure: String,
    pub dimension: Dimension,
    pub proposition: PropositionId,
    pub status: Status,
    pub eps: f64,
    /// Instances whose comparison was skipped (undefined values).
    pub skipped: usize,
    /// Random instances whose precondition could not be established.
    pub rejected: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub verdicts: Vec<PropositionVerdict>,
    /// Measures reported as meeting an extension proposition while violating BehPro.
    pub implication_failures: Vec<String>,
}

fn extension_prop(d: Dimension) -> PropositionId {
    match d {
        Dimension::Recall => PropositionId::RecPro1,
        Dimension::Precision => PropositionId::PrecPro1,
        Dimension::Generalization => PropositionId::GenPro1,
    }
}

struct Tally {
    checked: usize,
    skipped: usize,
    error: Option<Witness>,
}

/// Checks instances in order and stops at the first violation.
fn audit<'a, I>(m: &dyn Measure, prop: PropositionId, insts: I, cfg: &CheckConfig, tally: &mut Tally) -> Option<Witness>
where
    I: IntoIterator<Item = &'a Instance>,
{
    for inst in insts {
        match check(m, prop, inst, cfg) {
            Outcome::Holds(_) => tally.checked += 1,
            Outcome::Violated { values, detail } => return Some(Witness { instance: inst.clone(), values, detail }),
            Outcome::Skipped(_) => tally.skipped += 1,
            Outcome::Error(e) => {
                tally.error.get_or_insert_with(|| Witness { instance: inst.clone(), values: Vec::new(), detail: e });
            }
        }
    }
    None
}

/// Swapped-model copy of a language-equal pair.
fn swapped(inst: &Instance) -> Instance {
    let mut s = inst.clone();
    s.models.swap(0, 1);
    s.origin = format!("{} (models swapped)", inst.origin);
    s
}

pub fn run_suite(reg: &Registry, measures: &[&str], props: &[PropositionId], cfg: &SuiteConfig, fixtures: &FixtureSet) -> Result<SuiteReport> {
    let ms: Vec<&dyn Measure> = measures.iter().map(|id| reg.require(id)).collect::<Result<_>>()?;
    let props: Vec<PropositionId> = super::ALL.iter().copied().filter(|p| props.contains(p)).collect();
    let used: Vec<PropositionId> = props.iter().copied().filter(|p| ms.iter().any(|m| p.applies_to(m.dimension()))).collect();

    let mut fixture_insts: BTreeMap<PropositionId, Vec<Instance>> = BTreeMap::new();
    if cfg.fixtures {
        for ce in counter_examples() {
            fixture_insts.entry(ce.proposition).or_default().push((ce.build)(fixtures)?);
        }
    }
    let mut random: BTreeMap<PropositionId, Vec<Option<Instance>>> = BTreeMap::new();
    for &p in &used {
        let insts: Vec<Option<Instance>> = (0..cfg.budget).into_par_iter().map(|i| generate::instance(p, cfg.seed, i)).collect();
        random.insert(p, insts);
    }

    let run_pair = |m: &dyn Measure, prop: PropositionId, extra: &[Instance]| -> PropositionVerdict {
        let mut tally = Tally { checked: 0, skipped: 0, error: None };
        let generated = random.get(&prop).map(Vec::as_slice).unwrap_or(&[]);
        let rejected = generated.iter().filter(|i| i.is_none()).count();
        let fixed = fixture_insts.get(&prop).map(Vec::as_slice).unwrap_or(&[]);
        let witness = audit(m, prop, fixed.iter().chain(extra), &cfg.check, &mut tally)
            .or_else(|| audit(m, prop, generated.iter().flatten(), &cfg.check, &mut tally));
        let status = match (witness, tally.error) {
            (Some(w), _) => Status::Violated(w),
            (None, Some(w)) => Status::UndefinedEncountered(w),
            (None, None) => Status::HoldsOnSuite(tally.checked),
        };
        PropositionVerdict {
            measure: m.id().to_string(),
            dimension: m.dimension(),
            proposition: prop,
            status,
            eps: cfg.check.eps.unwrap_or_else(|| m.eps()),
            skipped: tally.skipped,
            rejected,
        }
    };

    let is_ext = |p: PropositionId| matches!(p, PropositionId::RecPro1 | PropositionId::PrecPro1 | PropositionId::GenPro1);
    let pairs: Vec<(usize, PropositionId)> = ms
        .iter()
        .enumerate()
        .flat_map(|(i, m)| props.iter().copied().filter(|p| p.applies_to(m.dimension())).map(move |p| (i, p)))
        .collect();

    // BehPro witnesses are also extension instances (in both directions), so
    // extension pairs run after everything else.
    let first: Vec<PropositionVerdict> =
        pairs.par_iter().filter(|(_, p)| !is_ext(*p)).map(|&(i, p)| run_pair(ms[i], p, &[])).collect();
    let beh: BTreeMap<&str, &Witness> = first
        .iter()
        .filter(|v| v.proposition == PropositionId::BehPro)
        .filter_map(|v| match &v.status {
            Status::Violated(w) => Some((v.measure.as_str(), w)),
            _ => None,
        })
        .collect();
    let second: Vec<PropositionVerdict> = pairs
        .par_iter()
        .filter(|(_, p)| is_ext(*p))
        .map(|&(i, p)| {
            let extra: Vec<Instance> = beh.get(ms[i].id()).map(|w| vec![w.instance.clone(), swapped(&w.instance)]).unwrap_or_default();
            run_pair(ms[i], p, &extra)
        })
        .collect();

    let mut all: BTreeMap<(usize, PropositionId), PropositionVerdict> = BTreeMap::new();
    for v in first.into_iter().chain(second) {
        let i = ms.iter().position(|m| m.id() == v.measure).expect("measure in set");
        all.insert((i, v.proposition), v);
    }
    let verdicts: Vec<PropositionVerdict> = all.into_values().collect();
    let implication_failures = implication_check(&verdicts);
    Ok(SuiteReport { verdicts, implication_failures })
}

/// Measures reported Holds on RecPro1/PrecPro1/GenPro1 but Violated on BehPro.
pub fn implication_check(verdicts: &[PropositionVerdict]) -> Vec<String> {
    let get = |m: &str, p: PropositionId| verdicts.iter().find(|v| v.measure == m && v.proposition == p).map(|v| v.status.verdict());
    let measures: BTreeSet<(&str, Dimension)> = verdicts.iter().map(|v| (v.measure.as_str(), v.dimension)).collect();
    measures
        .into_iter()
        .filter_map(|(m, d)| {
            let ext = extension_prop(d);
            (get(m, ext) == Some(Verdict::Holds) && get(m, PropositionId::BehPro) == Some(Verdict::Violated))
                .then(|| format!("{m}: {ext} holds but BehPro is violated"))
        })
        .collect()
}

/// Long-format grid: `measure,proposition,verdict`.
pub fn to_csv(verdicts: &[PropositionVerdict]) -> String {
    let mut s = String::from("measure,proposition,verdict\n");
    for v in verdicts {
        let _ = writeln!(s, "{},{},{}", v.measure, v.proposition, v.status.verdict().word());
    }
    s
}

/// One table per dimension: propositions as rows, measures as columns.
pub fn to_markdown(verdicts: &[PropositionVerdict]) -> String {
    let mut s = String::new();
    for d in [Dimension::Recall, Dimension::Precision, Dimension::Generalization] {
        let mut cols: Vec<&str> = Vec::new();
        for v in verdicts.iter().filter(|v| v.dimension == d) {
            if !cols.contains(&v.measure.as_str()) {
                cols.push(&v.measure);
            }
        }
        if cols.is_empty() {
            continue;
        }
        let rows: Vec<PropositionId> =
            super::ALL.iter().copied().filter(|p| verdicts.iter().any(|v| v.dimension == d && v.proposition == *p)).collect();
        let _ = writeln!(s, "{}{d}\n", if s.is_empty() { "" } else { "\n" });
        let _ = writeln!(s, "| Proposition | {} |", cols.join(" | "));
        let _ = writeln!(s, "|---|{}", "---|".repeat(cols.len()));
        for p in rows {
            let cells: Vec<&str> = cols
                .iter()
                .map(|c| verdicts.iter().find(|v| v.measure == *c && v.proposition == p).map_or("", |v| v.status.verdict().mark()))
                .collect();
            let _ = writeln!(s, "| {}{} {} | {} |", p.number(), "", format!("{p}{}", p.tag()), cells.join(" | "));
        }
    }
    s
}

/// Parses a long-format grid.
pub fn parse_grid(src: &str) -> Result<BTreeMap<(String, PropositionId), Verdict>> {
    let mut out = BTreeMap::new();
    for (i, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("measure,")) {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::parse(i + 1, format!("expected `measure,proposition,verdict`, got `{line}`"));
        if f.len() != 3 {
            return Err(bad());
        }
        let p = PropositionId::parse(f[1]).ok_or_else(bad)?;
        let v = Verdict::parse(f[2]).ok_or_else(bad)?;
        out.insert((f[0].to_string(), p), v);
    }
    Ok(out)
}

/// Cell-level differences against a reference grid, restricted to the cells the run produced.
pub fn diff(verdicts: &[PropositionVerdict], expected: &BTreeMap<(String, PropositionId), Verdict>) -> Vec<String> {
    verdicts
        .iter()
        .filter_map(|v| {
            let want = expected.get(&(v.measure.clone(), v.proposition))?;
            let got = v.status.verdict();
            (got != *want).then(|| format!("{} {}: expected {}, got {}", v.measure, v.proposition, want.word(), got.word()))
        })
        .collect()
}

fn bundle_name(v: &PropositionVerdict) -> String {
    format!("{}__{}", v.measure, v.proposition)
}

/// Writes one witness bundle per non-holding verdict under `dir`; returns the bundle paths.
pub fn write_witnesses(dir: &Path, verdicts: &[PropositionVerdict], cfg: &SuiteConfig) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| Error::Invalid(e.to_string());
    let mut out = Vec::new();
    for v in verdicts {
        let Some(w) = v.status.witness() else { continue };
        let b = dir.join(bundle_name(v));
        std::fs::create_dir_all(&b).map_err(io)?;
        let (log_roles, model_roles) = v.proposition.roles();
        let mut manifest = String::new();
        let _ = writeln!(manifest, "measure: {}", v.measure);
        let _ = writeln!(manifest, "proposition: {}", v.proposition);
        let _ = writeln!(manifest, "verdict: {}", v.status.verdict().word());
        let _ = writeln!(manifest, "origin: {}", w.instance.origin);
        let _ = writeln!(manifest, "k: {}", w.instance.k);
        let _ = writeln!(manifest, "eps: {:e}", v.eps);
        let _ = writeln!(manifest, "policy_seeds: {}", cfg.check.policies.iter().map(|p| p.seed.to_string()).collect::<Vec<_>>().join(" "));
        let _ = writeln!(manifest, "values: {}", w.values.iter().map(show).collect::<Vec<_>>().join(" "));
        let _ = writeln!(manifest, "detail: {}", w.detail);
        for (role, l) in log_roles.iter().zip(&w.instance.logs) {
            std::fs::write(b.join(format!("{role}.log")), l.to_text()).map_err(io)?;
            let _ = writeln!(manifest, "log {role}: {role}.log");
        }
        for (role, m) in model_roles.iter().zip(&w.instance.models) {
            let (ext, text) = m.to_text()?;
            std::fs::write(b.join(format!("{role}.{ext}")), text).map_err(io)?;
            let _ = writeln!(manifest, "model {role}: {role}.{ext}");
        }
        std::fs::write(b.join("manifest.txt"), manifest).map_err(io)?;
        out.push(b);
    }
    Ok(out)
}

fn show(v: &MeasureValue) -> String {
    match v {
        MeasureValue::Value(x) => format_value(*x),
        MeasureValue::Undefined(_) => "undefined".into(),
    }
}

/// A witness bundle read back from disk.
#[derive(Debug, Clone)]
pub struct LoadedWitness {
    pub measure: String,
    pub proposition: PropositionId,
    pub instance: Instance,
    /// Values as recorded, six decimals or `undefined`.
    pub values: Vec<String>,
}

pub fn read_witness(dir: &Path) -> Result<LoadedWitness> {
    let read = |p: PathBuf| std::fs::read_to_string(&p).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())));
    let manifest = read(dir.join("manifest.txt"))?;
    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    let mut logs = Vec::new();
    let mut models = Vec::new();
    for line in manifest.lines() {
        let Some((k, v)) = line.split_once(": ") else { continue };
        if let Some(_role) = k.strip_prefix("log ") {
            logs.push(EventLog::parse(&read(dir.join(v))?)?);
        } else if let Some(_role) = k.strip_prefix("model ") {
            let text = read(dir.join(v))?;
            models.push(if v.ends_with(".net") {
                Model::from_net(Net::parse(&text)?)
            } else if v.ends_with(".set") {
                Model::from_traces(EventLog::parse(&text)?.variants())
            } else {
                Model::from_dfa(Dfa::parse(&text)?)
            });
        } else {
            fields.insert(k, v);
        }
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::Invalid(format!("manifest lacks `{k}`")));
    let proposition = PropositionId::parse(get("proposition")?).ok_or_else(|| Error::Invalid("bad proposition".into()))?;
    let k: u64 = get("k")?.parse().map_err(|_| Error::Invalid("bad k".into()))?;
    let instance = Instance { logs, models, k, origin: get("origin")?.to_string() };
    Ok(LoadedWitness {
        measure: get("measure")?.to_string(),
        proposition,
        instance,
        values: get("values")?.split_whitespace().map(str::to_string).collect(),
    })
}

/// Re-checks a witness; returns the recomputed outcome.
pub fn replay_witness(reg: &Registry, w: &LoadedWitness, cfg: &CheckConfig) -> Result<Outcome> {
    Ok(check(reg.require(&w.measure)?, w.proposition, &w.instance, cfg))
}

/// Printable values of an outcome, matching the manifest's `values` field.
pub fn outcome_values(o: &Outcome) -> Vec<String> {
    match o {
        Outcome::Holds(v) | Outcome::Violated { values: v, .. } => v.iter().map(show).collect(),
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig { budget: 20, ..SuiteConfig::default() }
    }

    #[test]
    fn empty_measure_set_gives_empty_grid() {
        let r = Registry::standard();
        let rep = run_suite(&r, &[], &super::super::ALL, &small(), &FixtureSet::embedded()).unwrap();
        assert!(rep.verdicts.is_empty());
    }

    #[test]
    fn deterministic_and_parsable() {
        let r = Registry::standard();
        let props = [PropositionId::DetPro, PropositionId::BehPro, PropositionId::RecPro1, PropositionId::RecPro5];
        let a = run_suite(&r, &["rec_A", "rec_TB"], &props, &small(), &FixtureSet::embedded()).unwrap();
        let b = run_suite(&r, &["rec_A", "rec_TB"], &props, &small(), &FixtureSet::embedded()).unwrap();
        assert_eq!(to_csv(&a.verdicts), to_csv(&b.verdicts));
        let grid = parse_grid(&to_csv(&a.verdicts)).unwrap();
        assert_eq!(grid.len(), 8);
        assert!(diff(&a.verdicts, &grid).is_empty());
        assert_eq!(grid[&("rec_A".to_string(), PropositionId::RecPro5)], Verdict::Violated);
        assert!(to_markdown(&a.verdicts).contains("| Proposition | rec_A | rec_TB |"));
    }

    #[test]
    fn witnesses_replay() {
        let r = Registry::standard();
        let rep = run_suite(&r, &["rec_A"], &[PropositionId::RecPro5], &small(), &FixtureSet::embedded()).unwrap();
        let dir = std::env::temp_dir().join(format!("confprop-witness-{}", std::process::id()));
        let paths = write_witnesses(&dir, &rep.verdicts, &small()).unwrap();
        assert_eq!(paths.len(), 1);
        let w = read_witness(&paths[0]).unwrap();
        let out = replay_witness(&r, &w, &CheckConfig::default()).unwrap();
        assert!(out.is_violation());
        assert_eq!(outcome_values(&out), w.values);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
