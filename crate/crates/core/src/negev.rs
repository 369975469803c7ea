//! Artificial negative events and the confusion-matrix measures built on them.
//!
//! Activity `a` is negative at position `i` of a trace when no trace of the
//! log shows the context before `i` followed by `a`. With the context at
//! least as long as the prefix, the context is the whole prefix, anchored at
//! the trace start; shorter windows match anywhere.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::Result;
use crate::eventlog::{Activity, EventLog, Trace};
use crate::procmodel::{MeasureValue, Model};
use crate::replay::{ReplayPolicy, Replayer, StepKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Max,
    Len(usize),
}

impl Window {
    fn resolve(self, l: &EventLog) -> usize {
        match self {
            Window::Max => l.max_trace_len(),
            Window::Len(n) => n.max(1),
        }
    }
}

/// Negatives per position of one trace, as `(activity, weight)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedTrace {
    pub trace: Trace,
    pub negatives: Vec<BTreeMap<Activity, f64>>,
}

impl AnnotatedTrace {
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (i, (a, neg)) in self.trace.iter().zip(&self.negatives).enumerate() {
            let ns: Vec<String> = neg.iter().map(|(b, w)| format!("{b}({w})")).collect();
            let _ = writeln!(s, "pos {i}: event {a}; neg: {}", ns.join(" "));
        }
        s
    }
}

/// Every variant annotated, with its case count.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeAnnotatedLog {
    pub cases: Vec<(AnnotatedTrace, u64)>,
}

impl NegativeAnnotatedLog {
    pub fn num_negatives(&self) -> u64 {
        self.cases.iter().map(|(t, n)| n * t.negatives.iter().map(|s| s.len() as u64).sum::<u64>()).sum()
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (t, n) in &self.cases {
            let _ = writeln!(s, "# {n}: {}", t.trace);
            s.push_str(&t.dump());
        }
        s
    }
}

struct Contexts<'a> {
    /// Anchored prefixes and the activities that follow them.
    prefix: HashMap<&'a [Activity], HashSet<&'a str>>,
    /// Contiguous substrings of length ≤ window and their followers.
    inner: HashMap<&'a [Activity], HashSet<&'a str>>,
}

impl<'a> Contexts<'a> {
    fn new(l: &'a EventLog, window: usize) -> Self {
        let mut prefix: HashMap<&[Activity], HashSet<&str>> = HashMap::new();
        let mut inner: HashMap<&[Activity], HashSet<&str>> = HashMap::new();
        for t in l.variants() {
            let w = &t.0;
            for j in 0..w.len() {
                if j <= window {
                    prefix.entry(&w[..j]).or_default().insert(&w[j]);
                }
                for len in 0..=j.min(window) {
                    inner.entry(&w[j - len..j]).or_default().insert(&w[j]);
                }
            }
        }
        Contexts { prefix, inner }
    }

    fn follows(map: &HashMap<&[Activity], HashSet<&str>>, ctx: &[Activity], a: &str) -> bool {
        map.get(ctx).is_some_and(|s| s.contains(a))
    }
}

/// Induces negative events. Unweighted: all weights 1. Weighted: with `W` the
/// context length and `L` the longest shorter context after which `a` does
/// occur, the weight is `(W - L) / W`.
pub fn induce_negatives(l: &EventLog, window: Window, weighted: bool) -> NegativeAnnotatedLog {
    let win = window.resolve(l);
    let ctx = Contexts::new(l, win);
    let alphabet = l.alphabet();
    let mut cases = Vec::new();
    for (t, n) in l.iter() {
        let w = &t.0;
        let mut negatives = Vec::with_capacity(w.len());
        for i in 0..w.len() {
            let len = i.min(win);
            let c = &w[i - len..i];
            let mut neg = BTreeMap::new();
            for a in &alphabet {
                if *a == w[i] {
                    continue;
                }
                let allowed = if len == i { Contexts::follows(&ctx.prefix, c, a) } else { Contexts::follows(&ctx.inner, c, a) };
                if allowed {
                    continue;
                }
                let weight = if !weighted || len == 0 {
                    1.0
                } else {
                    let l_allow = (0..len).rev().find(|&k| Contexts::follows(&ctx.inner, &c[len - k..], a)).unwrap_or(0);
                    (len - l_allow) as f64 / len as f64
                };
                neg.insert(a.clone(), weight);
            }
            negatives.push(neg);
        }
        cases.push((AnnotatedTrace { trace: t.clone(), negatives }, n));
    }
    NegativeAnnotatedLog { cases }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConfusionCounts {
    pub tp: f64,
    pub fn_: f64,
    pub fp: f64,
    pub tn: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GeneralizationCounts {
    pub ag: f64,
    pub dg: f64,
}

/// Replays the annotated log: positives count as TP/FN, negatives enabled at
/// their position as FP (and AG += 1 - w), the others as TN (and DG += 1 - w).
pub fn confusion_replay(nl: &NegativeAnnotatedLog, m: &Model, policy: ReplayPolicy) -> Result<(ConfusionCounts, GeneralizationCounts)> {
    let h = m.net_handle()?;
    let r = Replayer::new(&h, policy)?;
    let net = h.net();
    let mut c = ConfusionCounts::default();
    let mut g = GeneralizationCounts::default();
    for (at, n) in &nl.cases {
        let n = *n as f64;
        let rt = r.replay(&at.trace);
        for (step, neg) in rt.steps.iter().zip(&at.negatives) {
            if step.kind == StepKind::Enabled {
                c.tp += n;
            } else {
                c.fn_ += n;
            }
            let labels: BTreeSet<&str> = step.enabled_visible.iter().filter_map(|&t| net.transitions()[t].label.as_deref()).collect();
            for (a, &w) in neg {
                if labels.contains(a.as_str()) {
                    c.fp += n * w;
                    g.ag += n * (1.0 - w);
                } else {
                    c.tn += n * w;
                    g.dg += n * (1.0 - w);
                }
            }
        }
    }
    Ok((c, g))
}

fn counts(l: &EventLog, m: &Model, window: Window, weighted: bool, policy: ReplayPolicy) -> Result<(NegativeAnnotatedLog, ConfusionCounts, GeneralizationCounts)> {
    let nl = induce_negatives(l, window, weighted);
    let (c, g) = confusion_replay(&nl, m, policy)?;
    Ok((nl, c, g))
}

pub fn rec_d(l: &EventLog, m: &Model, policy: ReplayPolicy) -> Result<MeasureValue> {
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let (_, c, _) = counts(l, m, Window::Max, false, policy)?;
    Ok(MeasureValue::ratio(c.tp, c.tp + c.fn_, "no events"))
}

pub fn prec_m(l: &EventLog, m: &Model, window: Window, policy: ReplayPolicy) -> Result<MeasureValue> {
    let (nl, c, _) = counts(l, m, window, false, policy)?;
    if nl.num_negatives() == 0 {
        return Ok(MeasureValue::undefined("no negative events"));
    }
    Ok(MeasureValue::ratio(c.tn, c.tn + c.fp, "no negative events"))
}

pub fn prec_n(l: &EventLog, m: &Model, window: Window, policy: ReplayPolicy) -> Result<MeasureValue> {
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let (_, c, _) = counts(l, m, window, false, policy)?;
    Ok(MeasureValue::ratio(c.tp, c.tp + c.fp, "no events"))
}

pub fn prec_o(l: &EventLog, m: &Model, window: Window, policy: ReplayPolicy) -> Result<MeasureValue> {
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let (_, c, _) = counts(l, m, window, true, policy)?;
    Ok(MeasureValue::ratio(c.tp, c.tp + c.fp, "no events"))
}

/// AG / (AG + DG), 1 when neither occurs.
pub fn gen_t(l: &EventLog, m: &Model, window: Window, policy: ReplayPolicy) -> Result<MeasureValue> {
    let (_, _, g) = counts(l, m, window, true, policy)?;
    if g.ag + g.dg == 0.0 {
        return Ok(MeasureValue::Value(1.0));
    }
    Ok(MeasureValue::Value(g.ag / (g.ag + g.dg)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn names(s: &BTreeMap<Activity, f64>) -> String {
        s.keys().cloned().collect()
    }

    #[test]
    fn l16_table() {
        let nl = induce_negatives(&fixtures::log("l16"), Window::Max, false);
        let want = [("abbd", ["bcd", "acd", "ad", "abc"]), ("abcd", ["bcd", "acd", "ad", "abc"])];
        assert_eq!(nl.cases.len(), 2);
        for ((at, _), (t, negs)) in nl.cases.iter().zip(want) {
            assert_eq!(at.trace, Trace::letters(t));
            let got: Vec<String> = at.negatives.iter().map(names).collect();
            assert_eq!(got, negs);
        }
        assert!(nl.cases.iter().flat_map(|(t, _)| &t.negatives).flat_map(|s| s.values()).all(|&w| w == 1.0));
    }

    #[test]
    fn l17_rule() {
        let nl = induce_negatives(&fixtures::log("l17"), Window::Max, false);
        let long = nl.cases.iter().find(|(t, _)| t.trace.len() == 9).unwrap();
        let got: Vec<String> = long.0.negatives.iter().map(names).collect();
        assert_eq!(got, ["bcd", "acd", "ad", "ac", "acd", "acd", "acd", "acd", "abc"]);
        // `abc` is now followed by both `b` and `d`.
        let abcd = nl.cases.iter().find(|(t, _)| t.trace == Trace::letters("abcd")).unwrap();
        assert_eq!(names(&abcd.0.negatives[3]), "ac");
    }

    #[test]
    fn no_alternatives() {
        let nl = induce_negatives(&EventLog::from_letters(&[("a", 3)]), Window::Max, true);
        assert_eq!(nl.num_negatives(), 0);
        assert_eq!(nl.cases[0].0.dump(), "pos 0: event a; neg: \n");
    }

    #[test]
    fn weights() {
        // Context `ab` at position 2 of `abc`; `x` follows `b` elsewhere, so
        // the longest allowing context has length 1.
        let l = EventLog::from_letters(&[("abc", 1), ("bx", 1)]);
        let nl = induce_negatives(&l, Window::Max, true);
        let abc = &nl.cases.iter().find(|(t, _)| t.trace == Trace::letters("abc")).unwrap().0;
        assert_eq!(abc.negatives[2].get("x"), Some(&0.5));
        assert_eq!(abc.negatives[2].get("a"), Some(&1.0));
        for (t, _) in &nl.cases {
            for s in &t.negatives {
                assert!(s.values().all(|&w| w > 0.0 && w <= 1.0));
            }
        }
        let one = induce_negatives(&l, Window::Len(1), true);
        assert!(one.cases.iter().flat_map(|(t, _)| &t.negatives).flat_map(|s| s.values()).all(|&w| w == 1.0));
    }

    #[test]
    fn fixture_counters() {
        let m10 = fixtures::model("m10");
        let p = ReplayPolicy::default();
        let (c, _) = confusion_replay(&induce_negatives(&fixtures::log("l16"), Window::Max, false), &m10, p).unwrap();
        assert_eq!((c.tp, c.fp, c.tn, c.fn_), (8.0, 10.0, 12.0, 0.0));
        let (c, _) = confusion_replay(&induce_negatives(&fixtures::log("l17"), Window::Max, false), &m10, p).unwrap();
        assert_eq!(c.tp, 17.0);
        assert_eq!(c.tn, 23.0);
        assert_eq!(prec_n(&fixtures::log("l16"), &m10, Window::Max, p).unwrap(), MeasureValue::Value(8.0 / 18.0));
    }

    #[test]
    fn behavioral_recall() {
        let m6 = fixtures::model("m6");
        let p = ReplayPolicy::default();
        assert_eq!(rec_d(&fixtures::log("l9"), &m6, p).unwrap(), MeasureValue::Value(0.75));
        assert_eq!(rec_d(&fixtures::log("l10"), &m6, p).unwrap(), MeasureValue::Value(7.0 / 9.0));
    }

    #[test]
    fn exact_models() {
        let l = fixtures::log("l16");
        let m = Model::from_traces(l.variants());
        let p = ReplayPolicy::default();
        assert_eq!(prec_m(&l, &m, Window::Max, p).unwrap(), MeasureValue::Value(1.0));
        assert_eq!(prec_o(&l, &m, Window::Max, p).unwrap(), MeasureValue::Value(1.0));
        let flower = fixtures::model("flower");
        assert_eq!(gen_t(&l, &flower, Window::Max, p).unwrap(), MeasureValue::Value(1.0));
        let chain = Model::from_traces(&[Trace::letters("abc")]);
        let l2 = EventLog::from_letters(&[("abc", 1), ("cab", 1)]);
        let v = gen_t(&EventLog::from_letters(&[("abc", 1)]), &chain, Window::Max, p).unwrap();
        assert_eq!(v, MeasureValue::Value(1.0));
        assert!(gen_t(&l2, &chain, Window::Max, p).unwrap().value().is_some());
        assert!(prec_m(&EventLog::from_letters(&[("a", 1)]), &chain, Window::Max, p).unwrap().value().is_none());
    }
}
