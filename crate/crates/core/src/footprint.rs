//! Causal footprints and follows/precedes relation sets.

use std::collections::BTreeSet;
use std::fmt;

use crate::automata::{Dfa, Nfa};
use crate::error::Result;
use crate::eventlog::{Activity, EventLog};
use crate::procmodel::{MeasureValue, Model, NetHandle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Choice,
    Causal,
    Reverse,
    Parallel,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Choice => "#",
            Rel::Causal => "->",
            Rel::Reverse => "<-",
            Rel::Parallel => "||",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FootprintMatrix {
    alphabet: Vec<Activity>,
    rel: Vec<Rel>,
}

impl FootprintMatrix {
    /// Builds from directly-follows pairs over `alphabet` (pairs outside it are ignored).
    pub fn from_pairs(alphabet: &BTreeSet<Activity>, df: &BTreeSet<(Activity, Activity)>) -> Self {
        let alphabet: Vec<Activity> = alphabet.iter().cloned().collect();
        let n = alphabet.len();
        let mut rel = vec![Rel::Choice; n * n];
        for (i, a) in alphabet.iter().enumerate() {
            for (j, b) in alphabet.iter().enumerate() {
                let ab = df.contains(&(a.clone(), b.clone()));
                let ba = df.contains(&(b.clone(), a.clone()));
                rel[i * n + j] = match (ab, ba) {
                    (true, true) => Rel::Parallel,
                    (true, false) => Rel::Causal,
                    (false, true) => Rel::Reverse,
                    (false, false) => Rel::Choice,
                };
            }
        }
        FootprintMatrix { alphabet, rel }
    }

    pub fn alphabet(&self) -> &[Activity] {
        &self.alphabet
    }

    pub fn get(&self, a: &str, b: &str) -> Option<Rel> {
        let i = self.alphabet.iter().position(|x| x == a)?;
        let j = self.alphabet.iter().position(|x| x == b)?;
        Some(self.rel[i * self.alphabet.len() + j])
    }

    /// Number of differing cells; both matrices must share the alphabet.
    pub fn mismatches(&self, other: &FootprintMatrix) -> usize {
        assert_eq!(self.alphabet, other.alphabet, "footprints over different alphabets");
        self.rel.iter().zip(&other.rel).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for FootprintMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, " ")?;
        for a in &self.alphabet {
            write!(f, "\t{a}")?;
        }
        writeln!(f)?;
        let n = self.alphabet.len();
        for (i, a) in self.alphabet.iter().enumerate() {
            write!(f, "{a}")?;
            for j in 0..n {
                write!(f, "\t{}", self.rel[i * n + j].symbol())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn log_pairs(l: &EventLog) -> BTreeSet<(Activity, Activity)> {
    l.variants().flat_map(|t| t.0.windows(2).map(|w| (w[0].clone(), w[1].clone()))).collect()
}

/// Directly-follows pairs of a language, read from its trimmed minimal DFA.
pub fn dfa_pairs(d: &Dfa) -> BTreeSet<(Activity, Activity)> {
    let m = d.minimize();
    let mut incoming: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.num_states()];
    for (_, a, q) in m.edges() {
        incoming[q].insert(a);
    }
    let mut out = BTreeSet::new();
    for (q, b, _) in m.edges() {
        for &a in &incoming[q] {
            out.insert((m.alphabet()[a].clone(), m.alphabet()[b].clone()));
        }
    }
    out
}

pub fn footprint_of_log(l: &EventLog) -> FootprintMatrix {
    FootprintMatrix::from_pairs(&l.alphabet(), &log_pairs(l))
}

pub fn footprint_of_model(m: &Model) -> Result<FootprintMatrix> {
    Ok(FootprintMatrix::from_pairs(&m.alphabet()?, &dfa_pairs(&m.dfa()?)))
}

/// Causal-footprint recall over the union alphabet; activities missing on
/// one side are in `#` with everything on that side.
pub fn rec_a(l: &EventLog, m: &Model) -> Result<MeasureValue> {
    let mut sigma = l.alphabet();
    sigma.extend(m.alphabet()?);
    if sigma.is_empty() {
        return Ok(MeasureValue::undefined("empty alphabet"));
    }
    let fl = FootprintMatrix::from_pairs(&sigma, &log_pairs(l));
    let fm = FootprintMatrix::from_pairs(&sigma, &dfa_pairs(&m.dfa()?));
    let n = sigma.len() as f64;
    Ok(MeasureValue::Value(1.0 - fl.mismatches(&fm) as f64 / (n * n)))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationSets {
    pub sometimes_follows: BTreeSet<(Activity, Activity)>,
    pub sometimes_precedes: BTreeSet<(Activity, Activity)>,
}

/// Sometimes-follows/precedes over the words of `d`. `(a,b)` sometimes
/// follows when some occurrence of `a` in some word is eventually followed
/// by `b` and some other occurrence is not; precedes looks backwards.
pub fn relation_sets_of_dfa(d: &Dfa) -> RelationSets {
    relation_sets_mapped(d, |a| a.to_string())
}

/// As [`relation_sets_of_dfa`] for an automaton whose symbols are mapped to
/// activities by `label`: occurrences are told apart per symbol, while the
/// followed/preceded side is the activity.
pub fn relation_sets_mapped<F: Fn(&str) -> Activity>(d: &Dfa, label: F) -> RelationSets {
    let m = d.minimize();
    let n = m.num_states();
    let k = m.alphabet().len();
    let labels: Vec<Activity> = m.alphabet().iter().map(|a| label(a)).collect();
    let targets: BTreeSet<&Activity> = labels.iter().collect();
    let edges: Vec<(usize, usize, usize)> = m.edges().collect();
    let mut out = RelationSets::default();
    if m.is_empty_language() {
        return out;
    }
    // Forward: from state q, can we reach acceptance with / without a `b` edge?
    // Backward: can we reach q from the initial state with / without `b`?
    for b in targets {
        let is_b: Vec<bool> = labels.iter().map(|x| x == b).collect();
        let fwd_with = closure(n, &edges, &is_b, true, |q| m.is_accepting(q), false);
        let fwd_without = closure(n, &edges, &is_b, false, |q| m.is_accepting(q), false);
        let bwd_with = closure(n, &edges, &is_b, true, |q| q == m.initial(), true);
        let bwd_without = closure(n, &edges, &is_b, false, |q| q == m.initial(), true);
        let mut seen = vec![[false; 4]; k];
        for &(p, a, q) in &edges {
            let f = &mut seen[a];
            f[0] |= fwd_with[q];
            f[1] |= fwd_without[q];
            f[2] |= bwd_with[p];
            f[3] |= bwd_without[p];
        }
        for (a, f) in seen.iter().enumerate() {
            let pair = (labels[a].clone(), b.clone());
            if f[0] && f[1] {
                out.sometimes_follows.insert(pair.clone());
            }
            if f[2] && f[3] {
                out.sometimes_precedes.insert(pair);
            }
        }
    }
    out
}

/// Fixpoint over paths toward targets. `with`: the path must use a symbol in
/// `is_b`; otherwise it must avoid them. `reverse` follows edges backwards.
fn closure<F: Fn(usize) -> bool>(n: usize, edges: &[(usize, usize, usize)], is_b: &[bool], with: bool, target: F, reverse: bool) -> Vec<bool> {
    let orient = |&(p, a, q): &(usize, usize, usize)| if reverse { (q, a, p) } else { (p, a, q) };
    // `without[q]`: q reaches a target avoiding b.
    let mut without: Vec<bool> = (0..n).map(&target).collect();
    loop {
        let mut changed = false;
        for e in edges {
            let (p, a, q) = orient(e);
            if !is_b[a] && without[q] && !without[p] {
                without[p] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !with {
        return without;
    }
    // `any[q]`: q reaches a target by any path.
    let mut any: Vec<bool> = (0..n).map(&target).collect();
    loop {
        let mut changed = false;
        for e in edges {
            let (p, _, q) = orient(e);
            if any[q] && !any[p] {
                any[p] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // `with_b[q]`: some path uses a b edge, i.e. q reaches (p -b-> q') with any[q'].
    let mut with_b = vec![false; n];
    for e in edges {
        let (p, a, q) = orient(e);
        if is_b[a] && any[q] {
            with_b[p] = true;
        }
    }
    loop {
        let mut changed = false;
        for e in edges {
            let (p, _, q) = orient(e);
            if with_b[q] && !with_b[p] {
                with_b[p] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    with_b
}

pub fn relation_sets_of_log(l: &EventLog) -> RelationSets {
    relation_sets_of_dfa(&Dfa::from_traces(l.variants()))
}

/// Language of accepting runs spelled in visible transition ids.
pub fn transition_language(h: &NetHandle) -> Result<Dfa> {
    let rg = h.reach_graph()?;
    let net = h.net();
    let mut nfa = Nfa::new(net.transitions().iter().filter(|t| t.label.is_some()).map(|t| t.id.clone()).collect());
    for _ in 0..rg.len() {
        nfa.add_state(false);
    }
    if let Some(f) = rg.state_of(net.final_marking()) {
        nfa.set_accepting(f);
    }
    for s in 0..rg.len() {
        for &(t, s2) in &rg.edges[s] {
            let trn = &net.transitions()[t];
            let sym = trn.label.as_ref().and_then(|_| nfa.symbol(&trn.id));
            nfa.add_edge(s, sym, s2);
        }
    }
    nfa.initial.push(0);
    Ok(nfa.determinize(h.cap())?.minimize())
}

/// Model relation sets: occurrences are told apart per transition, so
/// duplicate transitions can split a relation the language has.
pub fn relation_sets_of_model(m: &Model) -> Result<RelationSets> {
    let h = m.net_handle()?;
    let net = h.net();
    let d = transition_language(&h)?;
    Ok(relation_sets_mapped(&d, |id| {
        let t = net.transition_index(id).expect("symbols are transition ids");
        net.transitions()[t].label.clone().expect("visible")
    }))
}

/// Advanced behavioral appropriateness.
pub fn prec_j(l: &EventLog, m: &Model) -> Result<MeasureValue> {
    let sm = relation_sets_of_model(m)?;
    let sl = relation_sets_of_log(l);
    let mut terms = Vec::new();
    for (ml, ll) in [(&sm.sometimes_follows, &sl.sometimes_follows), (&sm.sometimes_precedes, &sl.sometimes_precedes)] {
        if !ml.is_empty() {
            terms.push(ml.intersection(ll).count() as f64 / ml.len() as f64);
        }
    }
    if terms.is_empty() {
        return Ok(MeasureValue::undefined("model has no sometimes relations"));
    }
    Ok(MeasureValue::Value(terms.iter().sum::<f64>() / terms.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventlog::Trace;
    use crate::fixtures;

    fn pairs(ps: &[&str]) -> BTreeSet<(Activity, Activity)> {
        ps.iter().map(|p| (p[0..1].to_string(), p[1..2].to_string())).collect()
    }

    #[test]
    fn log_footprint() {
        let f = footprint_of_log(&EventLog::from_letters(&[("ab", 1)]));
        assert_eq!(f.get("a", "b"), Some(Rel::Causal));
        assert_eq!(f.get("b", "a"), Some(Rel::Reverse));
        assert_eq!(f.get("a", "a"), Some(Rel::Choice));
        assert!(footprint_of_log(&EventLog::new()).alphabet().is_empty());
        let m = Model::from_traces(&[Trace::letters("ab")]);
        assert_eq!(footprint_of_model(&m).unwrap(), f);
    }

    #[test]
    fn model_footprints() {
        let m1 = footprint_of_model(&fixtures::model("m1")).unwrap();
        assert_eq!(m1.get("c", "d"), Some(Rel::Parallel));
        assert_eq!(m1.get("a", "b"), Some(Rel::Parallel));
        let m4 = footprint_of_model(&fixtures::model("m4")).unwrap();
        assert_eq!(m4.get("a", "b"), Some(Rel::Causal));
        assert_eq!(m4.get("b", "d"), Some(Rel::Parallel));
        assert_eq!(m4.get("c", "f"), Some(Rel::Causal));
        assert_eq!(m4.get("a", "f"), Some(Rel::Choice));
    }

    #[test]
    fn fixture_mismatch_counts() {
        // l8/m4 differs in 6 cells: the c/f pair also mismatches.
        let cases = [("l4", "m4", 10.0, 36.0), ("l7", "m4", 6.0, 36.0), ("l7", "m5", 14.0, 49.0), ("l8", "m4", 6.0, 36.0), ("l13", "m4", 10.0, 36.0)];
        for (l, m, mis, n) in cases {
            let v = rec_a(&fixtures::log(l), &fixtures::model(m)).unwrap().value().unwrap();
            assert!((v - (1.0 - mis / n)).abs() < 1e-12, "{l}/{m}: {v}");
        }
    }

    #[test]
    fn relation_sets() {
        let one = relation_sets_of_dfa(&Dfa::from_traces(&[Trace::letters("ab")]));
        assert_eq!(one, RelationSets::default());
        let two = relation_sets_of_dfa(&Dfa::from_traces(&[Trace::letters("ab"), Trace::letters("ac")]));
        assert_eq!(two.sometimes_follows, pairs(&["ab", "ac"]));
        assert!(two.sometimes_precedes.is_empty());
        // Per occurrence: the first `a` of `aba` precedes b, the second does not.
        let r = relation_sets_of_dfa(&Dfa::from_traces(&[Trace::letters("aba")]));
        assert_eq!(r.sometimes_follows, pairs(&["ab", "aa"]));
        assert_eq!(r.sometimes_precedes, pairs(&["ab", "aa"]));
        let l = EventLog::from_letters(&[("abc", 1)]);
        assert_eq!(relation_sets_of_log(&l), relation_sets_of_dfa(&Dfa::from_traces(&[Trace::letters("abc")])));
    }

    #[test]
    fn advanced_appropriateness() {
        let m = Model::from_traces(&[Trace::letters("ab"), Trace::letters("ac")]);
        let l = EventLog::from_letters(&[("ab", 1)]);
        assert_eq!(prec_j(&l, &m).unwrap(), MeasureValue::Value(0.0));
        let l2 = EventLog::from_letters(&[("ab", 1), ("ac", 1)]);
        assert_eq!(prec_j(&l2, &m).unwrap(), MeasureValue::Value(1.0));
        let seq = Model::from_traces(&[Trace::letters("abc")]);
        assert!(prec_j(&l, &seq).unwrap().value().is_none());
        let l2 = EventLog::from_letters(&[("ab", 1), ("ac", 1)]);
        assert_eq!(prec_j(&l2, &fixtures::model("m8")).unwrap(), MeasureValue::Value(1.0));
        // Duplicates decide the choice early: no sometimes relation remains.
        assert!(prec_j(&l2, &fixtures::model("m9")).unwrap().value().is_none());
        let l3 = fixtures::log("l3");
        let m3 = fixtures::model("m3");
        let v = prec_j(&l3, &m3).unwrap().value().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}
