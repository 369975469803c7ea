//! Projected recall and precision over all activity subsets of size k.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::automata::Dfa;
use crate::error::Result;
use crate::eventlog::{Activity, EventLog};
use crate::procmodel::{MeasureValue, Model};

pub const DEFAULT_K: usize = 2;

/// Subsets of size `min(k, |alphabet|)` in lexicographic order.
pub fn subsets(alphabet: &BTreeSet<Activity>, k: usize) -> Vec<BTreeSet<Activity>> {
    let items: Vec<&Activity> = alphabet.iter().collect();
    let k = k.min(items.len());
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k == 0 {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i].clone()).collect());
        let Some(p) = (0..k).rev().find(|&p| idx[p] < items.len() - k + p) else {
            return out;
        };
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

fn union_alphabet(l: &EventLog, m: &Model) -> Result<BTreeSet<Activity>> {
    let mut s = l.alphabet();
    s.extend(m.alphabet()?);
    Ok(s)
}

pub fn project_log(l: &EventLog, a: &BTreeSet<Activity>) -> Dfa {
    let ts: Vec<_> = l.variants().map(|t| t.project(a)).collect();
    Dfa::from_traces(&ts)
}

/// Fraction of cases whose projection the projected model accepts, for one subset.
pub fn rec_e_subset(l: &EventLog, dm: &Dfa, a: &BTreeSet<Activity>) -> (u64, u64) {
    let pm = dm.project(a);
    let fit = l.iter().filter(|(t, _)| pm.accepts(&t.project(a))).map(|(_, n)| n).sum();
    (fit, l.size())
}

pub fn rec_e(l: &EventLog, m: &Model, k: usize) -> Result<MeasureValue> {
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let dm = m.dfa()?;
    let subs = subsets(&union_alphabet(l, m)?, k);
    if subs.is_empty() {
        return Ok(MeasureValue::undefined("empty alphabet"));
    }
    let total: f64 = subs
        .iter()
        .map(|a| {
            let (f, n) = rec_e_subset(l, &dm, a);
            f as f64 / n as f64
        })
        .sum();
    Ok(MeasureValue::Value(total / subs.len() as f64))
}

/// Edge counts `(conjunctive, model)` for one subset, or `None` when the
/// projected model language is empty. The conjunctive automaton is the
/// trimmed product of the projected log and model automata (its initial
/// state always kept); the model count covers the model states it reaches.
pub fn prec_p_subset(l: &EventLog, dm: &Dfa, a: &BTreeSet<Activity>) -> Option<(usize, usize)> {
    let pm = dm.project(a).minimize();
    if pm.is_empty_language() {
        return None;
    }
    let pl = project_log(l, a).minimize();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert((pl.initial(), pm.initial()), 0);
    pairs.push((pl.initial(), pm.initial()));
    queue.push_back(0);
    while let Some(u) = queue.pop_front() {
        let (p, q) = pairs[u];
        for (sym, p2) in pl.out(p) {
            let Some(q2) = pm.step_label(q, &pl.alphabet()[sym]) else { continue };
            let v = *index.entry((p2, q2)).or_insert_with(|| {
                pairs.push((p2, q2));
                queue.push_back(pairs.len() - 1);
                pairs.len() - 1
            });
            edges.push((u, v));
        }
    }
    let mut live: Vec<bool> = pairs.iter().map(|&(p, q)| pl.is_accepting(p) && pm.is_accepting(q)).collect();
    loop {
        let mut changed = false;
        for &(u, v) in &edges {
            if live[v] && !live[u] {
                live[u] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let conj = edges.iter().filter(|&&(u, v)| live[u] && live[v]).count();
    let image: BTreeSet<usize> = pairs.iter().enumerate().filter(|&(i, _)| live[i] || i == 0).map(|(_, &(_, q))| q).collect();
    let model: usize = image.iter().map(|&q| pm.out(q).count()).sum();
    Some((conj, model))
}

pub fn prec_p(l: &EventLog, m: &Model, k: usize) -> Result<MeasureValue> {
    let dm = m.dfa()?;
    let subs = subsets(&union_alphabet(l, m)?, k);
    let vals: Vec<f64> = subs
        .iter()
        .filter_map(|a| prec_p_subset(l, &dm, a))
        .map(|(c, n)| if n == 0 { 1.0 } else { (c as f64 / n as f64).min(1.0) })
        .collect();
    if vals.is_empty() {
        return Ok(MeasureValue::Value(1.0));
    }
    Ok(MeasureValue::Value(vals.iter().sum::<f64>() / vals.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventlog::Trace;
    use crate::fixtures;

    fn set(s: &str) -> BTreeSet<Activity> {
        s.chars().map(|c| c.to_string()).collect()
    }

    #[test]
    fn lexicographic_subsets() {
        let s: Vec<String> = subsets(&set("abcd"), 2).iter().map(|x| x.iter().cloned().collect()).collect();
        assert_eq!(s, ["ab", "ac", "ad", "bc", "bd", "cd"]);
        assert_eq!(subsets(&set("ab"), 3), vec![set("ab")]);
        assert!(subsets(&BTreeSet::new(), 2).is_empty());
    }

    #[test]
    fn recall_on_ab() {
        let dm = fixtures::model("m6").dfa().unwrap();
        assert_eq!(rec_e_subset(&fixtures::log("l9"), &dm, &set("ab")), (0, 1));
        assert_eq!(rec_e_subset(&fixtures::log("l10"), &dm, &set("ab")), (1, 2));
        let l = EventLog::from_letters(&[("ab", 2)]);
        assert_eq!(project_log(&l, &set("c")), Dfa::from_traces(&[Trace::new(Vec::<String>::new())]));
    }

    #[test]
    fn precision_on_cd() {
        let dm = fixtures::model("m11").dfa().unwrap();
        let l18 = fixtures::log("l18");
        assert_eq!(prec_p_subset(&l18, &dm, &set("cd")), Some((0, 1)));
        let l = EventLog::from_letters(&[("ab", 1), ("cd", 1)]);
        assert_eq!(prec_p(&l, &fixtures::model("m11"), 2).unwrap(), MeasureValue::Value(1.0));
        assert!(prec_p(&l18, &fixtures::model("m11"), 2).unwrap().value().unwrap() < 1.0);
    }

    #[test]
    fn duplication_free() {
        let m = fixtures::model("m3");
        let l = fixtures::log("l3");
        let l3 = l.power(3).unwrap();
        assert_eq!(rec_e(&l, &m, 2).unwrap(), rec_e(&l3, &m, 2).unwrap());
        assert_eq!(prec_p(&l, &m, 2).unwrap(), prec_p(&l3, &m, 2).unwrap());
    }

    #[test]
    fn fitting_trace_can_lower_precision() {
        // c+ (b|~) c; minimal automaton out-degrees q0:1 q1:2 q2:2 q3:1 q4:0.
        let m = fixtures::model("m_cloop");
        let dm = m.dfa().unwrap();
        let l1 = EventLog::from_letters(&[("cbc", 1)]);
        let l2 = EventLog::from_letters(&[("cbc", 1), ("cc", 1)]);
        // q0 q1 q3 q4 visited: 3 conjunctive edges over 1+2+1+0.
        assert_eq!(prec_p_subset(&l1, &dm, &set("bc")), Some((3, 4)));
        // cc adds q2 (2 edges) and one conjunctive edge into it.
        assert_eq!(prec_p_subset(&l2, &dm, &set("bc")), Some((4, 6)));
        assert!(prec_p(&l2, &m, 2).unwrap().value().unwrap() < prec_p(&l1, &m, 2).unwrap().value().unwrap());
    }
}
