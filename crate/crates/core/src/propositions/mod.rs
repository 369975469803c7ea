//! The 21 conformance propositions as executable checks over any registered
//! measure.

pub mod catalog;
pub mod generate;
pub mod suite;

use std::fmt::{self, Write as _};

use crate::automata::Dfa;
use crate::eventlog::EventLog;
use crate::measures::{Dimension, EvalConfig, Measure};
use crate::procmodel::{format_value, MeasureValue, Model};
use crate::replay::ReplayPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropositionId {
    DetPro,
    BehPro,
    RecPro1,
    RecPro2,
    RecPro3,
    RecPro4,
    RecPro5,
    PrecPro1,
    PrecPro2,
    PrecPro3,
    PrecPro4,
    PrecPro5,
    PrecPro6,
    GenPro1,
    GenPro2,
    GenPro3,
    GenPro4,
    GenPro5,
    GenPro6,
    GenPro7,
    GenPro8,
}

use PropositionId::*;

pub const ALL: [PropositionId; 21] = [
    DetPro, BehPro, RecPro1, RecPro2, RecPro3, RecPro4, RecPro5, PrecPro1, PrecPro2, PrecPro3, PrecPro4, PrecPro5, PrecPro6, GenPro1, GenPro2, GenPro3,
    GenPro4, GenPro5, GenPro6, GenPro7, GenPro8,
];

impl PropositionId {
    /// Position in the numbered list, 1 to 21.
    pub fn number(self) -> usize {
        ALL.iter().position(|&p| p == self).expect("listed") + 1
    }

    pub fn name(self) -> &'static str {
        const NAMES: [&str; 21] = [
            "DetPro", "BehPro", "RecPro1", "RecPro2", "RecPro3", "RecPro4", "RecPro5", "PrecPro1", "PrecPro2", "PrecPro3", "PrecPro4", "PrecPro5", "PrecPro6",
            "GenPro1", "GenPro2", "GenPro3", "GenPro4", "GenPro5", "GenPro6", "GenPro7", "GenPro8",
        ];
        NAMES[self.number() - 1]
    }

    /// `+` for propositions every measure should meet, `0` for debatable ones.
    pub fn tag(self) -> char {
        match self {
            RecPro3 | RecPro4 | PrecPro3 | PrecPro4 | PrecPro6 | GenPro3 | GenPro6 | GenPro7 | GenPro8 => '0',
            _ => '+',
        }
    }

    /// Dimension the proposition constrains; `None` for the shared ones.
    pub fn dimension(self) -> Option<Dimension> {
        match self.number() {
            1 | 2 => None,
            3..=7 => Some(Dimension::Recall),
            8..=13 => Some(Dimension::Precision),
            _ => Some(Dimension::Generalization),
        }
    }

    pub fn applies_to(self, d: Dimension) -> bool {
        self.dimension().map_or(true, |x| x == d)
    }

    /// Accepts a name (any case) or a number.
    pub fn parse(s: &str) -> Option<PropositionId> {
        let s = s.trim();
        if let Ok(n) = s.parse::<usize>() {
            return ALL.get(n.checked_sub(1)?).copied();
        }
        ALL.iter().copied().find(|p| p.name().eq_ignore_ascii_case(s))
    }

    /// Role names of the instance logs and models.
    pub fn roles(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            BehPro | RecPro1 | PrecPro1 | GenPro1 => (&["l"], &["m1", "m2"]),
            RecPro2 | RecPro3 | PrecPro2 | PrecPro3 | GenPro2 | GenPro3 => (&["l1", "l3"], &["m"]),
            _ => (&["l"], &["m"]),
        }
    }

    /// Whether the comparison involves the duplication factor `k`.
    pub fn uses_k(self) -> bool {
        matches!(self, RecPro4 | PrecPro4 | GenPro4 | GenPro5 | GenPro6 | GenPro7)
    }
}

impl fmt::Display for PropositionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Logs and models a proposition is evaluated on; see `PropositionId::roles`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub logs: Vec<EventLog>,
    pub models: Vec<Model>,
    /// Duplication factor for the `l^k` propositions.
    pub k: u64,
    /// How the instance was obtained.
    pub origin: String,
}

impl Instance {
    pub fn new(logs: Vec<EventLog>, models: Vec<Model>, origin: &str) -> Instance {
        Instance { logs, models, k: 1, origin: origin.to_string() }
    }

    pub fn with_k(mut self, k: u64) -> Instance {
        self.k = k;
        self
    }

    /// Human-readable dump of every component.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "origin: {}\nk: {}", self.origin, self.k);
        for (i, l) in self.logs.iter().enumerate() {
            let _ = write!(s, "log {i}:\n{}", l.to_text());
        }
        for (i, m) in self.models.iter().enumerate() {
            match m.to_text() {
                Ok((ext, text)) => {
                    let _ = write!(s, "model {i} ({ext}):\n{text}");
                }
                Err(e) => {
                    let _ = writeln!(s, "model {i}: {e}");
                }
            }
        }
        s
    }
}

/// Settings for proposition checks.
#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub eval: EvalConfig,
    /// Policies compared by DetPro.
    pub policies: Vec<ReplayPolicy>,
    /// Overrides the measure's own tolerance.
    pub eps: Option<f64>,
    /// RecPro3 variant that also requires the base log to fit.
    pub recpro3_fitting_base: bool,
}

pub const DETPRO_POLICIES: u64 = 5;

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            eval: EvalConfig::default(),
            policies: (0..DETPRO_POLICIES).map(ReplayPolicy::new).collect(),
            eps: None,
            recpro3_fitting_base: false,
        }
    }
}

/// Outcome of one proposition on one instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Holds(Vec<MeasureValue>),
    Violated { values: Vec<MeasureValue>, detail: String },
    /// A value was undefined where the comparison needs numbers.
    Skipped(String),
    /// A measure evaluation failed (resource limit or invalid input).
    Error(String),
}

impl Outcome {
    pub fn is_violation(&self) -> bool {
        matches!(self, Outcome::Violated { .. })
    }
}

fn log_dfa(l: &EventLog) -> Dfa {
    Dfa::from_traces(l.variants())
}

fn all_fit(l: &EventLog, m: &Model) -> Result<bool, String> {
    for t in l.variants() {
        if !m.fits(t).map_err(|e| e.to_string())? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn none_fit(l: &EventLog, m: &Model) -> Result<bool, String> {
    for t in l.variants() {
        if m.fits(t).map_err(|e| e.to_string())? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn dfa(m: &Model) -> Result<Dfa, String> {
    m.dfa().map_err(|e| e.to_string())
}

/// Verifies the proposition's precondition on `inst`.
pub fn precondition(prop: PropositionId, inst: &Instance, cfg: &CheckConfig) -> Result<(), String> {
    let (logs, models) = prop.roles();
    if inst.logs.len() < logs.len() || inst.models.len() < models.len() {
        return Err(format!("{prop} needs {} log(s) and {} model(s)", logs.len(), models.len()));
    }
    let l = &inst.logs[0];
    let m = &inst.models[0];
    let require = |ok: Result<bool, String>, what: &str| match ok {
        Ok(true) => Ok(()),
        Ok(false) => Err(what.to_string()),
        Err(e) => Err(e),
    };
    match prop {
        DetPro => Ok(()),
        BehPro => require(Ok(dfa(m)?.same_language(&dfa(&inst.models[1])?)), "models are not language-equal"),
        RecPro1 | GenPro1 => require(Ok(dfa(&inst.models[1])?.includes(&dfa(m)?)), "tau(m1) is not a subset of tau(m2)"),
        PrecPro1 => {
            let (d1, d2) = (dfa(m)?, dfa(&inst.models[1])?);
            require(Ok(d2.includes(&d1)), "tau(m1) is not a subset of tau(m2)")?;
            let added = d2.difference(&d1);
            require(Ok(l.variants().all(|t| !added.accepts(t))), "log meets the added behavior")
        }
        RecPro2 | PrecPro2 | GenPro2 => require(all_fit(&inst.logs[1], m), "l3 does not fit"),
        RecPro3 | PrecPro3 | GenPro3 => {
            require(none_fit(&inst.logs[1], m), "l3 has fitting traces")?;
            if prop == RecPro3 && cfg.recpro3_fitting_base {
                require(all_fit(l, m), "l1 does not fit")?;
            }
            Ok(())
        }
        RecPro4 | PrecPro4 => require(Ok(inst.k >= 1), "k < 1"),
        GenPro4 => require(all_fit(l, m).map(|b| b && inst.k >= 1), "log does not fit"),
        GenPro5 => require(none_fit(l, m).map(|b| b && inst.k >= 1), "log has fitting traces"),
        GenPro6 | GenPro7 => {
            let (fit, nonfit) = l.try_split_fitting(|t| m.fits(t)).map_err(|e| e.to_string())?;
            let ok = if prop == GenPro6 { fit.size() >= nonfit.size() } else { fit.size() <= nonfit.size() };
            require(Ok(ok && inst.k >= 1), "fitting/non-fitting balance not met")
        }
        RecPro5 => require(all_fit(l, m), "log does not fit"),
        PrecPro5 => require(Ok(dfa(m)?.same_language(&log_dfa(l))), "tau(m) differs from tau(l)"),
        PrecPro6 => require(Ok(log_dfa(l).includes(&dfa(m)?)), "tau(m) is not a subset of tau(l)"),
        GenPro8 => {
            let mut sigma = l.alphabet();
            sigma.extend(m.alphabet().map_err(|e| e.to_string())?);
            require(Ok(dfa(m)?.same_language(&Dfa::universal(sigma))), "model is not the universal language")
        }
    }
}

fn show(v: &MeasureValue) -> String {
    match v {
        MeasureValue::Value(x) => format_value(*x),
        MeasureValue::Undefined(r) => format!("undefined({r})"),
    }
}

/// Evaluates `prop` for `measure` on a precondition-checked instance.
pub fn check(measure: &dyn Measure, prop: PropositionId, inst: &Instance, cfg: &CheckConfig) -> Outcome {
    if let Err(e) = precondition(prop, inst, cfg) {
        return Outcome::Skipped(format!("precondition: {e}"));
    }
    let eps = cfg.eps.unwrap_or_else(|| measure.eps());
    let id = measure.id();
    let eval_with = |l: &EventLog, m: &Model, c: &EvalConfig| measure.eval(l, m, c);
    let eval = |l: &EventLog, m: &Model| eval_with(l, m, &cfg.eval);
    macro_rules! val {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(e) => return Outcome::Error(format!("{id}: {e}")),
            }
        };
    }
    let l = &inst.logs[0];
    let m = &inst.models[0];
    let merged = || l.sum(&inst.logs[1]).expect("small counts");
    let power = || l.power(inst.k).expect("small counts");
    // (values, relation, labels) for a two-sided comparison.
    enum Cmp {
        Le,
        Ge,
        Eq,
    }
    let (values, cmp, what) = match prop {
        DetPro => {
            let mut vals = Vec::new();
            for p in &cfg.policies {
                vals.push(val!(eval_with(l, m, &cfg.eval.with_policy(*p))));
            }
            if let Some((i, MeasureValue::Undefined(r))) = vals.iter().enumerate().find(|(_, v)| v.value().is_none()) {
                let detail = format!("{id}(l,m) is undefined ({r}) under policy seed {}", cfg.policies[i].seed);
                return Outcome::Violated { values: vals, detail };
            }
            let xs: Vec<f64> = vals.iter().filter_map(MeasureValue::value).collect();
            return match xs.iter().position(|x| (x - xs[0]).abs() > eps) {
                Some(i) => Outcome::Violated {
                    detail: format!(
                        "{id}(l,m) = {} under policy seed {} but {} under seed {}",
                        show(&vals[0]),
                        cfg.policies[0].seed,
                        show(&vals[i]),
                        cfg.policies[i].seed
                    ),
                    values: vals,
                },
                None => Outcome::Holds(vals),
            };
        }
        BehPro => (vec![val!(eval(l, m)), val!(eval(l, &inst.models[1]))], Cmp::Eq, ["(l,m1)", "(l,m2)"]),
        RecPro1 | GenPro1 => (vec![val!(eval(l, m)), val!(eval(l, &inst.models[1]))], Cmp::Le, ["(l,m1)", "(l,m2)"]),
        PrecPro1 => (vec![val!(eval(l, m)), val!(eval(l, &inst.models[1]))], Cmp::Ge, ["(l,m1)", "(l,m2)"]),
        RecPro2 | PrecPro2 | GenPro2 => (vec![val!(eval(l, m)), val!(eval(&merged(), m))], Cmp::Le, ["(l1,m)", "(l2,m)"]),
        RecPro3 | GenPro3 => (vec![val!(eval(l, m)), val!(eval(&merged(), m))], Cmp::Ge, ["(l1,m)", "(l2,m)"]),
        PrecPro3 => (vec![val!(eval(l, m)), val!(eval(&merged(), m))], Cmp::Eq, ["(l1,m)", "(l2,m)"]),
        RecPro4 | PrecPro4 => (vec![val!(eval(&power(), m)), val!(eval(l, m))], Cmp::Eq, ["(l^k,m)", "(l,m)"]),
        GenPro4 | GenPro6 => (vec![val!(eval(&power(), m)), val!(eval(l, m))], Cmp::Ge, ["(l^k,m)", "(l,m)"]),
        GenPro5 | GenPro7 => (vec![val!(eval(&power(), m)), val!(eval(l, m))], Cmp::Le, ["(l^k,m)", "(l,m)"]),
        RecPro5 | PrecPro5 | PrecPro6 | GenPro8 => {
            let v = val!(eval(l, m));
            let Some(x) = v.value() else {
                return Outcome::Skipped(format!("{id}(l,m) is {}", show(&v)));
            };
            return if (x - 1.0).abs() <= eps {
                Outcome::Holds(vec![v])
            } else {
                Outcome::Violated { detail: format!("{id}(l,m) = {} but must be 1", show(&v)), values: vec![v] }
            };
        }
    };
    let (a, b) = (&values[0], &values[1]);
    let text = |rel: &str| format!("{id}{} = {} {rel} {id}{} = {}", what[0], show(a), what[1], show(b));
    match (a.value(), b.value(), cmp) {
        (None, None, Cmp::Eq) => Outcome::Holds(values),
        (None, _, Cmp::Eq) | (_, None, Cmp::Eq) => Outcome::Violated { detail: text("!="), values },
        (None, _, _) | (_, None, _) => Outcome::Skipped(text("vs")),
        (Some(x), Some(y), cmp) => {
            let (ok, rel) = match cmp {
                Cmp::Le => (x <= y + eps, ">"),
                Cmp::Ge => (x + eps >= y, "<"),
                Cmp::Eq => ((x - y).abs() <= eps, "!="),
            };
            if ok {
                Outcome::Holds(values)
            } else {
                Outcome::Violated { detail: text(rel), values }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::measures::Registry;

    #[test]
    fn ids_and_tags() {
        assert_eq!(ALL.len(), 21);
        assert_eq!(PropositionId::parse("recpro3"), Some(RecPro3));
        assert_eq!(PropositionId::parse("13"), Some(PrecPro6));
        assert_eq!(PropositionId::parse("22"), None);
        assert_eq!(ALL.iter().filter(|p| p.tag() == '0').count(), 9);
        assert_eq!(ALL.iter().filter(|p| p.applies_to(Dimension::Recall)).count(), 7);
        assert_eq!(ALL.iter().filter(|p| p.applies_to(Dimension::Precision)).count(), 8);
        assert_eq!(ALL.iter().filter(|p| p.applies_to(Dimension::Generalization)).count(), 10);
    }

    #[test]
    fn footprint_recall_needs_complete_logs() {
        let r = Registry::standard();
        let inst = Instance::new(vec![fixtures::log("l4")], vec![fixtures::model("m4")], "l4/m4");
        let out = check(r.get("rec_A").unwrap(), RecPro5, &inst, &CheckConfig::default());
        let Outcome::Violated { values, .. } = out else { panic!("{out:?}") };
        assert!((values[0].value().unwrap() - 0.72).abs() < 1e-2);
    }

    #[test]
    fn precondition_is_verified() {
        let r = Registry::standard();
        // l4 fits m4, so it cannot serve as the non-fitting extension.
        let inst = Instance::new(vec![fixtures::log("l9"), fixtures::log("l4")], vec![fixtures::model("m4")], "bad");
        assert!(matches!(check(r.get("rec_B").unwrap(), RecPro3, &inst, &CheckConfig::default()), Outcome::Skipped(_)));
    }

    #[test]
    fn duplication_is_exact_for_alignment_recall() {
        let r = Registry::standard();
        let inst = Instance::new(vec![fixtures::log("l12")], vec![fixtures::model("m4")], "l12/m4").with_k(3);
        assert!(matches!(check(r.get("rec_C").unwrap(), RecPro4, &inst, &CheckConfig::default()), Outcome::Holds(_)));
    }

    #[test]
    fn infinite_language_breaks_soundness_determinism() {
        let r = Registry::standard();
        let inst = Instance::new(vec![fixtures::log("l12_loop")], vec![fixtures::model("m1")], "loop");
        assert!(check(r.get("prec_H").unwrap(), DetPro, &inst, &CheckConfig::default()).is_violation());
    }
}
