//! Fixture catalog: pinned measure values and the counter-example instances
//! checked before any random instance.

use std::collections::BTreeMap;
use std::path::Path;

use super::{Instance, PropositionId};
use crate::error::{Error, Result};
use crate::eventlog::{EventLog, Trace};
use crate::fixtures;
use crate::measures::{EvalConfig, Registry};
use crate::negev::{self, Window};
use crate::procmodel::{Model, Net};
use crate::projected;
use crate::replay::ReplayPolicy;

/// Fixture sources by name; the embedded set, optionally overridden from disk.
#[derive(Debug, Clone)]
pub struct FixtureSet {
    logs: BTreeMap<String, String>,
    nets: BTreeMap<String, String>,
}

impl FixtureSet {
    pub fn embedded() -> FixtureSet {
        let own = |xs: &[(&str, &str)]| xs.iter().map(|(n, s)| (n.to_string(), s.to_string())).collect();
        FixtureSet { logs: own(fixtures::LOGS), nets: own(fixtures::NETS) }
    }

    /// Embedded fixtures with every `<name>.log` / `<name>.net` in `dir` taking precedence.
    pub fn with_dir(dir: &Path) -> Result<FixtureSet> {
        let mut set = FixtureSet::embedded();
        let entries = std::fs::read_dir(dir).map_err(|e| Error::Invalid(format!("{}: {e}", dir.display())))?;
        for entry in entries {
            let path = entry.map_err(|e| Error::Invalid(e.to_string()))?.path();
            let (Some(stem), Some(ext)) = (path.file_stem().and_then(|s| s.to_str()), path.extension().and_then(|s| s.to_str())) else {
                continue;
            };
            let target = match ext {
                "log" => &mut set.logs,
                "net" => &mut set.nets,
                _ => continue,
            };
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
            target.insert(stem.to_string(), text);
        }
        Ok(set)
    }

    pub fn log(&self, name: &str) -> Result<EventLog> {
        let src = self.logs.get(name).ok_or_else(|| Error::Invalid(format!("no fixture log `{name}`")))?;
        EventLog::parse(src)
    }

    pub fn net(&self, name: &str) -> Result<Net> {
        let src = self.nets.get(name).ok_or_else(|| Error::Invalid(format!("no fixture net `{name}`")))?;
        Net::parse(src)
    }

    pub fn model(&self, name: &str) -> Result<Model> {
        Ok(Model::from_net(self.net(name)?))
    }
}

fn letters(items: &[(&str, u64)]) -> EventLog {
    EventLog::from_letters(items)
}

fn value(id: &str, l: &EventLog, m: &Model) -> Result<f64> {
    let r = Registry::standard();
    r.require(id)?
        .eval(l, m, &EvalConfig::default())?
        .value()
        .ok_or_else(|| Error::Invalid(format!("{id} is undefined on this fixture")))
}

fn measure(id: &str, log: &str, net: &str, f: &FixtureSet) -> Result<f64> {
    value(id, &f.log(log)?, &f.model(net)?)
}

fn counters(log: &str, f: &FixtureSet) -> Result<negev::ConfusionCounts> {
    let nl = negev::induce_negatives(&f.log(log)?, Window::Max, false);
    Ok(negev::confusion_replay(&nl, &f.model("m10")?, ReplayPolicy::default())?.0)
}

fn subset_recall(log: &str, f: &FixtureSet) -> Result<f64> {
    let dm = f.model("m6")?.dfa()?;
    let (fit, n) = projected::rec_e_subset(&f.log(log)?, &dm, &["a", "b"].iter().map(|s| s.to_string()).collect());
    Ok(fit as f64 / n as f64)
}

/// A measured quantity with the value it is pinned to.
pub struct Pin {
    pub name: &'static str,
    /// The worked example the value comes from.
    pub passage: &'static str,
    pub expected: f64,
    pub compute: fn(&FixtureSet) -> Result<f64>,
}

pub const PIN_TOLERANCE: f64 = 1e-9;

pub fn pins() -> Vec<Pin> {
    macro_rules! pin {
        ($name:expr, $passage:expr, $expected:expr, $f:expr) => {
            Pin { name: $name, passage: $passage, expected: $expected, compute: $f }
        };
    }
    vec![
        pin!("rec_A/l4/m4", "recall appendix, RecPro5 for causal footprint recall", 1.0 - 10.0 / 36.0, |f| measure("rec_A", "l4", "m4", f)),
        pin!("rec_A/l7/m4", "recall appendix, RecPro1 for causal footprint recall", 1.0 - 6.0 / 36.0, |f| measure("rec_A", "l7", "m4", f)),
        pin!("rec_A/l7/m5", "recall appendix, RecPro1 for causal footprint recall", 1.0 - 14.0 / 49.0, |f| measure("rec_A", "l7", "m5", f)),
        pin!("rec_A/l8/m4", "recall appendix, RecPro3 for causal footprint recall (printed 0.88, tables give 6 mismatches)", 1.0 - 6.0 / 36.0, |f| {
            measure("rec_A", "l8", "m4", f)
        }),
        pin!("rec_B/l9/m6", "recall evaluation, token replay on the non-fitting trace", 5.0 / 6.0, |f| measure("rec_B", "l9", "m6", f)),
        pin!("rec_B/l10/m6", "recall evaluation, token replay after adding a non-fitting trace", 11.0 / 13.0, |f| measure("rec_B", "l10", "m6", f)),
        pin!("rec_C/l11/m4", "recall appendix, RecPro3 for alignment recall", 0.25, |f| measure("rec_C", "l11", "m4", f)),
        pin!("rec_C/l12/m4", "recall appendix, RecPro3 for alignment recall (printed 0.64)", 1.0 - 7.0 / 19.0, |f| measure("rec_C", "l12", "m4", f)),
        pin!("rec_D/l9/m6", "recall appendix, RecPro3 for behavioral recall", 0.75, |f| measure("rec_D", "l9", "m6", f)),
        pin!("rec_D/l10/m6", "recall appendix, RecPro3 for behavioral recall", 7.0 / 9.0, |f| measure("rec_D", "l10", "m6", f)),
        pin!("rec_E/l9/m6/{a,b}", "recall appendix, RecPro3 for projected recall", 0.0, |f| subset_recall("l9", f)),
        pin!("rec_E/l10/m6/{a,b}", "recall appendix, RecPro3 for projected recall", 0.5, |f| subset_recall("l10", f)),
        pin!("prec_K/abcg/m7", "precision appendix, DetPro for ETC precision (first alignment)", 0.8, |f| {
            value("prec_K", &letters(&[("abcg", 1)]), &f.model("m7")?)
        }),
        pin!("prec_K/adeg/m7", "precision appendix, DetPro for ETC precision (second alignment)", 4.0 / 6.0, |f| {
            value("prec_K", &letters(&[("adeg", 1)]), &f.model("m7")?)
        }),
        pin!("prec_L/l15/m1_se", "precision appendix, PrecPro2 for ETC precision", 12.0 / 14.0, |f| measure("prec_L", "l15", "m1_se", f)),
        pin!("prec_L/l16_etc/m1_se", "precision appendix, PrecPro2 for ETC precision (printed 31/37)", 30.0 / 36.0, |f| {
            measure("prec_L", "l16_etc", "m1_se", f)
        }),
        pin!("negev/l16/m10/TP", "precision appendix, PrecPro2 for negative-event precision", 8.0, |f| Ok(counters("l16", f)?.tp)),
        pin!("negev/l16/m10/FP", "precision appendix, PrecPro2 for negative-event precision", 10.0, |f| Ok(counters("l16", f)?.fp)),
        pin!("negev/l16/m10/TN", "precision appendix, PrecPro2 for negative-event precision (text says 8; the printed ratio uses 12)", 12.0, |f| {
            Ok(counters("l16", f)?.tn)
        }),
        pin!("negev/l17/m10/TP", "precision appendix, PrecPro2 for negative-event precision", 17.0, |f| Ok(counters("l17", f)?.tp)),
        pin!("negev/l17/m10/TN", "precision appendix, PrecPro2 for negative-event precision", 23.0, |f| Ok(counters("l17", f)?.tn)),
        pin!("prec_N/l16/m10", "precision appendix, PrecPro2 for behavioral precision", 8.0 / 18.0, |f| measure("prec_N", "l16", "m10", f)),
        pin!("prec_P/l18/m11/{c,d}", "precision appendix, PrecPro3 for projected precision", 0.0, |f| {
            let dm = f.model("m11")?.dfa()?;
            let sub = ["c", "d"].iter().map(|s| s.to_string()).collect();
            let (c, n) = projected::prec_p_subset(&f.log("l18")?, &dm, &sub).ok_or_else(|| Error::Invalid("empty projection".into()))?;
            Ok(c as f64 / n as f64)
        }),
        pin!("prec_TB/l3/m3", "baseline measures, trace-based precision", 0.75, |f| measure("prec_TB", "l3", "m3", f)),
        pin!("rec_TB/l3/m3", "baseline measures, trace-based recall", 1.0, |f| measure("rec_TB", "l3", "m3", f)),
        pin!("gen_T/flower", "generalization appendix, GenPro8 for negative-event generalization", 1.0, |f| {
            value("gen_T", &letters(&[("abcd", 1), ("ac", 2)]), &f.model("flower")?)
        }),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Drift {
    pub name: String,
    pub expected: f64,
    /// Recomputed value, or the error message.
    pub got: std::result::Result<f64, String>,
}

/// Recomputes every pin; returns the ones that moved.
pub fn verify(f: &FixtureSet) -> Vec<Drift> {
    pins()
        .into_iter()
        .filter_map(|p| {
            let got = (p.compute)(f).map_err(|e| e.to_string());
            let ok = matches!(got, Ok(v) if (v - p.expected).abs() <= PIN_TOLERANCE);
            (!ok).then(|| Drift { name: p.name.to_string(), expected: p.expected, got })
        })
        .collect()
}

/// A fixture instance for one proposition, with the measures it is cited for.
pub struct CounterExample {
    pub name: &'static str,
    pub passage: &'static str,
    pub proposition: PropositionId,
    pub measures: &'static [&'static str],
    pub build: fn(&FixtureSet) -> Result<Instance>,
}

fn inst(logs: Vec<EventLog>, models: Vec<Model>, name: &str) -> Instance {
    Instance::new(logs, models, &format!("fixture {name}"))
}

pub fn counter_examples() -> Vec<CounterExample> {
    use PropositionId::*;
    macro_rules! ce {
        ($name:expr, $passage:expr, $prop:expr, $ms:expr, $f:expr) => {
            CounterExample { name: $name, passage: $passage, proposition: $prop, measures: $ms, build: $f }
        };
    }
    vec![
        ce!("l4/m4", "recall evaluation, footprint of a fitting but incomplete log", RecPro5, &["rec_A"], |f| {
            Ok(inst(vec![f.log("l4")?], vec![f.model("m4")?], "l4/m4"))
        }),
        ce!("l7/m4/m5", "recall appendix, RecPro1 for causal footprint recall", RecPro1, &["rec_A"], |f| {
            Ok(inst(vec![f.log("l7")?], vec![f.model("m4")?, f.model("m5")?], "l7/m4/m5"))
        }),
        ce!("l9/l10/m6", "recall appendix, RecPro3 for replay, behavioral and projected recall", RecPro3, &["rec_B", "rec_D", "rec_E"], |f| {
            let (l9, l10) = (f.log("l9")?, f.log("l10")?);
            Ok(inst(vec![l9.clone(), l10.difference(&l9)], vec![f.model("m6")?], "l9/l10/m6"))
        }),
        ce!("l11/l12/m4", "recall appendix, RecPro3 for alignment recall", RecPro3, &["rec_C"], |f| {
            let (l11, l12) = (f.log("l11")?, f.log("l12")?);
            Ok(inst(vec![l11.clone(), l12.difference(&l11)], vec![f.model("m4")?], "l11/l12/m4"))
        }),
        ce!("l7/l8/m4", "recall appendix, RecPro3 for causal footprint recall", RecPro3, &["rec_A"], |f| {
            let (l7, l8) = (f.log("l7")?, f.log("l8")?);
            Ok(inst(vec![l7.clone(), l8.difference(&l7)], vec![f.model("m4")?], "l7/l8/m4"))
        }),
        ce!("m7/[ag]", "precision appendix, DetPro for ETC precision", DetPro, &["prec_K"], |f| {
            Ok(inst(vec![f.log("l14")?], vec![f.model("m7")?], "m7/[ag]"))
        }),
        ce!("m7/[abcg]+[adg]", "precision appendix, PrecPro3 for ETC precision", PrecPro3, &["prec_K", "prec_L"], |f| {
            Ok(inst(vec![letters(&[("abcg", 1)]), letters(&[("adg", 1)])], vec![f.model("m7")?], "m7/[abcg]+[adg]"))
        }),
        ce!("l15/l16/m1", "precision appendix, PrecPro2 for ETC precision", PrecPro2, &["prec_K", "prec_L"], |f| {
            let (l15, l16) = (f.log("l15")?, f.log("l16_etc")?);
            Ok(inst(vec![l15.clone(), l16.difference(&l15)], vec![f.model("m1_se")?], "l15/l16/m1"))
        }),
        ce!("l16/l17/m10", "precision appendix, PrecPro2 for negative-event precision", PrecPro2, &["prec_M", "prec_N"], |f| {
            let (l16, l17) = (f.log("l16")?, f.log("l17")?);
            Ok(inst(vec![l16.clone(), l17.difference(&l16)], vec![f.model("m10")?], "l16/l17/m10"))
        }),
        ce!("m11/l18/l19", "precision appendix, PrecPro3 for projected precision", PrecPro3, &["prec_P"], |f| {
            let (l18, l19) = (f.log("l18")?, f.log("l19")?);
            Ok(inst(vec![l18.clone(), l19.difference(&l18)], vec![f.model("m11")?], "m11/l18/l19"))
        }),
        ce!("m_cloop/[cbc]+[cc]", "precision evaluation, PrecPro2 for projected precision (a fitting trace reaches a model state with unused edges)", PrecPro2, &["prec_P"], |f| {
            Ok(inst(vec![letters(&[("cbc", 1)]), letters(&[("cc", 1)])], vec![f.model("m_cloop")?], "m_cloop/[cbc]+[cc]"))
        }),
        ce!("l12_loop/m1", "precision evaluation, soundness on an infinite language", DetPro, &["prec_H", "prec_TB"], |f| {
            Ok(inst(vec![f.log("l12_loop")?], vec![f.model("m1")?], "l12_loop/m1"))
        }),
        ce!("m1/m2", "language-equal nets with a duplicated loop transition, one trace ends before the loop closes", BehPro, &["rec_B", "prec_I"], |f| {
            let l = f.log("l12_loop")?.sum(&letters(&[("abcd", 1)]))?;
            Ok(inst(vec![l], vec![f.model("m1")?, f.model("m2")?], "m1/m2"))
        }),
        ce!("m8/m9", "choice on a shared label made early or late", BehPro, &["prec_I", "prec_J"], |f| {
            Ok(inst(vec![letters(&[("ab", 1), ("ac", 1)])], vec![f.model("m8")?, f.model("m9")?], "m8/m9"))
        }),
        ce!("m8/m8_dup", "language-equal nets, one with a duplicated visible transition", BehPro, &["prec_K", "prec_L"], |f| {
            Ok(inst(vec![letters(&[("ab", 1)])], vec![f.model("m8")?, f.model("m8_dup")?], "m8/m8_dup"))
        }),
        ce!("dup_choice", "duplicate visible transitions with the log equal to the language", PrecPro5, &["prec_I", "prec_K", "prec_L"], |f| {
            let m = f.model("dup_choice")?;
            let ts: Vec<Trace> = m.enumerate(8)?.into_iter().collect();
            let l = EventLog::from_counts(ts.into_iter().map(|t| (t, 1)))?;
            Ok(inst(vec![l], vec![m], "dup_choice"))
        }),
        ce!("flower", "generalization appendix, GenPro8 on the flower model", GenPro8, &["gen_S"], |f| {
            Ok(inst(vec![letters(&[("abcd", 1), ("ac", 2)])], vec![f.model("flower")?], "flower"))
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propositions::{check, CheckConfig, Outcome};

    #[test]
    fn pins_hold_on_embedded_fixtures() {
        let drift = verify(&FixtureSet::embedded());
        assert!(drift.is_empty(), "{drift:?}");
        assert!(pins().len() >= 15);
    }

    #[test]
    fn counter_examples_violate_their_measures() {
        let f = FixtureSet::embedded();
        let r = Registry::standard();
        for ce in counter_examples() {
            // With the footprint tables as printed, l8 scores the same as l7.
            if ce.name == "l7/l8/m4" {
                continue;
            }
            let inst = (ce.build)(&f).unwrap();
            for id in ce.measures {
                let out = check(r.get(id).unwrap(), ce.proposition, &inst, &CheckConfig::default());
                assert!(matches!(out, Outcome::Violated { .. }), "{} {} {id}: {out:?}", ce.name, ce.proposition);
            }
        }
    }

    #[test]
    fn tampered_log_drifts() {
        let dir = std::env::temp_dir().join(format!("confprop-catalog-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("l9.log"), "1: a b g\n").unwrap();
        let drift = verify(&FixtureSet::with_dir(&dir).unwrap());
        std::fs::remove_dir_all(&dir).unwrap();
        assert!(drift.iter().any(|d| d.name == "rec_B/l9/m6"), "{drift:?}");
    }
}
