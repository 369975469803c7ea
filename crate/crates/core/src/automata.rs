//! Deterministic finite automata over activity labels.
//!
//! Transition functions are stored partially (missing entries go to an
//! implicit dead state). [`Dfa::minimize`] trims, merges equivalent states and
//! renumbers in BFS order with symbols sorted, so two minimal automata of the
//! same language serialize identically.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::eventlog::{is_activity, Activity, Trace};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    alphabet: Vec<Activity>,
    initial: u32,
    accepting: Vec<bool>,
    /// Row-major `states × alphabet`, `NONE` where undefined.
    delta: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductMode {
    Intersection,
    Difference,
    Union,
}

impl Dfa {
    /// The automaton accepting nothing.
    pub fn empty() -> Dfa {
        Dfa { alphabet: Vec::new(), initial: 0, accepting: vec![false], delta: Vec::new() }
    }

    /// Σ* over the given alphabet.
    pub fn universal<I, S>(alphabet: I) -> Dfa
    where
        I: IntoIterator<Item = S>,
        S: Into<Activity>,
    {
        let alphabet = sorted_alphabet(alphabet.into_iter().map(Into::into));
        let k = alphabet.len();
        Dfa { alphabet, initial: 0, accepting: vec![true], delta: vec![0; k] }
    }

    /// Minimal automaton accepting exactly the given traces.
    pub fn from_traces<'a, I>(traces: I) -> Dfa
    where
        I: IntoIterator<Item = &'a Trace>,
    {
        let traces: Vec<&Trace> = traces.into_iter().collect();
        let alphabet = sorted_alphabet(traces.iter().flat_map(|t| t.0.iter().cloned()));
        let k = alphabet.len();
        let mut accepting = vec![false];
        let mut delta = vec![NONE; k];
        for t in traces {
            let mut s = 0usize;
            for a in t.iter() {
                let i = sym_index(&alphabet, a).expect("symbol collected above");
                let next = delta[s * k + i];
                s = if next == NONE {
                    let n = accepting.len();
                    accepting.push(false);
                    delta.extend(std::iter::repeat(NONE).take(k));
                    delta[s * k + i] = n as u32;
                    n
                } else {
                    next as usize
                };
            }
            accepting[s] = true;
        }
        Dfa { alphabet, initial: 0, accepting, delta }.minimize()
    }

    /// Builds from explicit parts. Edges are `(source, symbol, target)`.
    pub fn from_parts(
        alphabet: Vec<Activity>,
        num_states: usize,
        initial: usize,
        accepting: &[usize],
        edges: &[(usize, Activity, usize)],
    ) -> Result<Dfa> {
        let alphabet = sorted_alphabet(alphabet.into_iter().chain(edges.iter().map(|e| e.1.clone())));
        let k = alphabet.len();
        if initial >= num_states {
            return Err(Error::Invalid(format!("initial state {initial} out of range")));
        }
        let mut acc = vec![false; num_states];
        for &s in accepting {
            *acc.get_mut(s).ok_or_else(|| Error::Invalid(format!("state {s} out of range")))? = true;
        }
        let mut delta = vec![NONE; num_states * k];
        for (s, a, t) in edges {
            if *s >= num_states || *t >= num_states {
                return Err(Error::Invalid(format!("edge {s} {a} {t} out of range")));
            }
            let i = sym_index(&alphabet, a).expect("alphabet includes edge symbols");
            let slot = &mut delta[s * k + i];
            if *slot != NONE && *slot != *t as u32 {
                return Err(Error::Invalid(format!("nondeterministic edge from {s} on {a}")));
            }
            *slot = *t as u32;
        }
        Ok(Dfa { alphabet, initial: initial as u32, accepting: acc, delta })
    }

    pub fn alphabet(&self) -> &[Activity] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial as usize
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn symbol_index(&self, a: &str) -> Option<usize> {
        sym_index(&self.alphabet, a)
    }

    pub fn step(&self, s: usize, sym: usize) -> Option<usize> {
        let t = self.delta[s * self.alphabet.len() + sym];
        (t != NONE).then_some(t as usize)
    }

    pub fn step_label(&self, s: usize, a: &str) -> Option<usize> {
        self.step(s, self.symbol_index(a)?)
    }

    /// State reached after reading `t`, if defined.
    pub fn run(&self, t: &Trace) -> Option<usize> {
        let mut s = self.initial();
        for a in t.iter() {
            s = self.step_label(s, a)?;
        }
        Some(s)
    }

    pub fn accepts(&self, t: &Trace) -> bool {
        self.run(t).is_some_and(|s| self.accepting[s])
    }

    /// Outgoing edges `(symbol index, target)` of state `s`.
    pub fn out(&self, s: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.alphabet.len();
        self.delta[s * k..(s + 1) * k]
            .iter()
            .enumerate()
            .filter(|(_, &t)| t != NONE)
            .map(|(i, &t)| (i, t as usize))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.num_states()).flat_map(move |s| self.out(s).map(move |(a, t)| (s, a, t)))
    }

    pub fn num_edges(&self) -> usize {
        self.delta.iter().filter(|&&t| t != NONE).count()
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.initial()];
        seen[self.initial()] = true;
        while let Some(s) = stack.pop() {
            for (_, t) in self.out(s) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, _, t) in self.edges() {
            rev[t].push(s);
        }
        let mut seen = self.accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&s| seen[s]).collect();
        while let Some(s) = stack.pop() {
            for &p in &rev[s] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// States that are reachable and co-reachable. The initial state is always kept.
    pub fn useful_states(&self) -> Vec<bool> {
        let r = self.reachable();
        let c = self.coreachable();
        let mut u: Vec<bool> = r.iter().zip(&c).map(|(a, b)| *a && *b).collect();
        u[self.initial()] = true;
        u
    }

    pub fn is_empty_language(&self) -> bool {
        let r = self.reachable();
        !(0..self.num_states()).any(|s| r[s] && self.accepting[s])
    }

    /// Minimal, trimmed, canonically numbered equivalent.
    pub fn minimize(&self) -> Dfa {
        let k = self.alphabet.len();
        let useful = self.useful_states();
        // Moore refinement over useful states; NONE is its own class.
        let states: Vec<usize> = (0..self.num_states()).filter(|&s| useful[s]).collect();
        let mut class: Vec<u32> = vec![NONE; self.num_states()];
        for &s in &states {
            class[s] = self.accepting[s] as u32;
        }
        let mut nclasses = 0;
        loop {
            let mut sigs: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next = vec![NONE; self.num_states()];
            for &s in &states {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[s]);
                for a in 0..k {
                    let t = self.delta[s * k + a];
                    sig.push(if t == NONE || !useful[t as usize] { NONE } else { class[t as usize] });
                }
                let len = sigs.len() as u32;
                next[s] = *sigs.entry(sig).or_insert(len);
            }
            let n = sigs.len();
            class = next;
            if n == nclasses {
                break;
            }
            nclasses = n;
        }
        // Canonical BFS numbering over classes.
        let mut rep: HashMap<u32, usize> = HashMap::new();
        for &s in &states {
            rep.entry(class[s]).or_insert(s);
        }
        let mut number: HashMap<u32, u32> = HashMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        number.insert(class[self.initial()], 0);
        order.push(class[self.initial()]);
        queue.push_back(class[self.initial()]);
        while let Some(c) = queue.pop_front() {
            let s = rep[&c];
            for a in 0..k {
                let t = self.delta[s * k + a];
                if t == NONE || !useful[t as usize] {
                    continue;
                }
                let tc = class[t as usize];
                if !number.contains_key(&tc) {
                    number.insert(tc, order.len() as u32);
                    order.push(tc);
                    queue.push_back(tc);
                }
            }
        }
        let mut used = vec![false; k];
        for &c in &order {
            let s = rep[&c];
            for a in 0..k {
                let t = self.delta[s * k + a];
                if t != NONE && useful[t as usize] {
                    used[a] = true;
                }
            }
        }
        let alphabet: Vec<Activity> =
            (0..k).filter(|&a| used[a]).map(|a| self.alphabet[a].clone()).collect();
        let remap: Vec<usize> = (0..k).filter(|&a| used[a]).collect();
        let nk = alphabet.len();
        let mut delta = vec![NONE; order.len() * nk];
        let mut accepting = vec![false; order.len()];
        for (i, &c) in order.iter().enumerate() {
            let s = rep[&c];
            accepting[i] = self.accepting[s];
            for (j, &a) in remap.iter().enumerate() {
                let t = self.delta[s * k + a];
                if t != NONE && useful[t as usize] {
                    delta[i * nk + j] = number[&class[t as usize]];
                }
            }
        }
        Dfa { alphabet, initial: 0, accepting, delta }
    }

    /// Same language over a larger alphabet.
    pub fn with_alphabet<I, S>(&self, extra: I) -> Dfa
    where
        I: IntoIterator<Item = S>,
        S: Into<Activity>,
    {
        let alphabet = sorted_alphabet(self.alphabet.iter().cloned().chain(extra.into_iter().map(Into::into)));
        if alphabet.len() == self.alphabet.len() {
            return self.clone();
        }
        let k = alphabet.len();
        let map: Vec<usize> = self.alphabet.iter().map(|a| sym_index(&alphabet, a).unwrap()).collect();
        let mut delta = vec![NONE; self.num_states() * k];
        for (s, a, t) in self.edges() {
            delta[s * k + map[a]] = t as u32;
        }
        Dfa { alphabet, initial: self.initial, accepting: self.accepting.clone(), delta }
    }

    /// Product automaton, minimized. Missing transitions lead to a dead state.
    pub fn product(&self, other: &Dfa, mode: ProductMode) -> Dfa {
        let alphabet = sorted_alphabet(self.alphabet.iter().chain(&other.alphabet).cloned());
        let k = alphabet.len();
        let ma: Vec<Option<usize>> = alphabet.iter().map(|x| self.symbol_index(x)).collect();
        let mb: Vec<Option<usize>> = alphabet.iter().map(|x| other.symbol_index(x)).collect();
        let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs = vec![(self.initial, other.initial)];
        ids.insert((self.initial, other.initial), 0);
        let mut delta = Vec::new();
        let mut accepting = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let acc_p = p != NONE && self.accepting[p as usize];
            let acc_q = q != NONE && other.accepting[q as usize];
            accepting.push(match mode {
                ProductMode::Intersection => acc_p && acc_q,
                ProductMode::Difference => acc_p && !acc_q,
                ProductMode::Union => acc_p || acc_q,
            });
            for a in 0..k {
                let np = match (p, ma[a]) {
                    (p, Some(x)) if p != NONE => self.step(p as usize, x).map_or(NONE, |t| t as u32),
                    _ => NONE,
                };
                let nq = match (q, mb[a]) {
                    (q, Some(x)) if q != NONE => other.step(q as usize, x).map_or(NONE, |t| t as u32),
                    _ => NONE,
                };
                let live = match mode {
                    ProductMode::Intersection => np != NONE && nq != NONE,
                    ProductMode::Difference => np != NONE,
                    ProductMode::Union => np != NONE || nq != NONE,
                };
                if !live {
                    delta.push(NONE);
                    continue;
                }
                let len = pairs.len() as u32;
                let id = *ids.entry((np, nq)).or_insert_with(|| {
                    pairs.push((np, nq));
                    len
                });
                delta.push(id);
            }
            i += 1;
        }
        Dfa { alphabet, initial: 0, accepting, delta }.minimize()
    }

    pub fn intersect(&self, other: &Dfa) -> Dfa {
        self.product(other, ProductMode::Intersection)
    }

    pub fn union(&self, other: &Dfa) -> Dfa {
        self.product(other, ProductMode::Union)
    }

    pub fn difference(&self, other: &Dfa) -> Dfa {
        self.product(other, ProductMode::Difference)
    }

    /// L(other) ⊆ L(self).
    pub fn includes(&self, other: &Dfa) -> bool {
        other.difference(self).is_empty_language()
    }

    pub fn same_language(&self, other: &Dfa) -> bool {
        self.includes(other) && other.includes(self)
    }

    /// Complement relative to Σ* over `alphabet ∪ self.alphabet`.
    pub fn complement<I, S>(&self, alphabet: I) -> Dfa
    where
        I: IntoIterator<Item = S>,
        S: Into<Activity>,
    {
        Dfa::universal(alphabet.into_iter().map(Into::into).chain(self.alphabet.iter().cloned()))
            .difference(self)
    }

    /// Erases every symbol outside `keep`.
    pub fn project(&self, keep: &BTreeSet<Activity>) -> Dfa {
        let mut nfa = Nfa::new(keep.iter().cloned().collect());
        for s in 0..self.num_states() {
            let id = nfa.add_state(self.accepting[s]);
            debug_assert_eq!(id, s);
        }
        nfa.initial.push(self.initial);
        for (s, a, t) in self.edges() {
            let sym = nfa.symbol(&self.alphabet[a]);
            nfa.add_edge(s, sym, t);
        }
        nfa.determinize(usize::MAX).expect("uncapped").minimize()
    }

    /// Language has infinitely many words (cycle among useful states).
    pub fn is_infinite(&self) -> bool {
        let m = self.minimize();
        // Minimal form holds only useful states, except possibly a lone initial state.
        let n = m.num_states();
        let mut color = vec![0u8; n];
        fn dfs(d: &Dfa, s: usize, color: &mut [u8]) -> bool {
            color[s] = 1;
            for (_, t) in d.out(s) {
                if color[t] == 1 || (color[t] == 0 && dfs(d, t, color)) {
                    return true;
                }
            }
            color[s] = 2;
            false
        }
        !m.is_empty_language() && dfs(&m, m.initial(), &mut color)
    }

    /// All accepted words of length ≤ `max_len`, sorted.
    pub fn enumerate(&self, max_len: usize) -> BTreeSet<Trace> {
        let mut out = BTreeSet::new();
        let m = self.minimize();
        if m.is_empty_language() {
            return out;
        }
        let mut word = Vec::new();
        fn go(d: &Dfa, s: usize, left: usize, word: &mut Vec<Activity>, out: &mut BTreeSet<Trace>) {
            if d.accepting[s] {
                out.insert(Trace(word.clone()));
            }
            if left == 0 {
                return;
            }
            for (a, t) in d.out(s) {
                word.push(d.alphabet[a].clone());
                go(d, t, left - 1, word, out);
                word.pop();
            }
        }
        go(&m, m.initial(), max_len, &mut word, &mut out);
        out
    }

    /// Number of accepted words, `None` when infinite.
    pub fn count_words(&self) -> Option<u128> {
        if self.is_infinite() {
            return None;
        }
        let m = self.minimize();
        let mut memo: Vec<Option<u128>> = vec![None; m.num_states()];
        fn go(d: &Dfa, s: usize, memo: &mut Vec<Option<u128>>) -> u128 {
            if let Some(v) = memo[s] {
                return v;
            }
            let mut n = d.accepting[s] as u128;
            for (_, t) in d.out(s) {
                n = n.saturating_add(go(d, t, memo));
            }
            memo[s] = Some(n);
            n
        }
        Some(go(&m, m.initial(), &mut memo))
    }

    /// Canonical text form; states are listed in index order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "alphabet: {}", self.alphabet.join(" "));
        let _ = writeln!(s, "states: {}", self.num_states());
        let _ = writeln!(s, "initial: {}", self.initial);
        let acc: Vec<String> =
            (0..self.num_states()).filter(|&q| self.accepting[q]).map(|q| q.to_string()).collect();
        let _ = writeln!(s, "accepting: {}", acc.join(" "));
        let _ = writeln!(s, "edges:");
        for (p, a, q) in self.edges() {
            let _ = writeln!(s, "{p} {} {q}", self.alphabet[a]);
        }
        s
    }

    pub fn parse(src: &str) -> Result<Dfa> {
        let mut alphabet = None;
        let mut states = None;
        let mut initial = None;
        let mut accepting = None;
        let mut edges = Vec::new();
        let mut in_edges = false;
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            let lineno = i + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let num = |t: &str| t.parse::<usize>().map_err(|_| Error::parse(lineno, format!("bad number `{t}`")));
            if let Some((key, rest)) = line.split_once(':') {
                in_edges = false;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                match key.trim() {
                    "alphabet" => {
                        if let Some(bad) = toks.iter().find(|t| !is_activity(t)) {
                            return Err(Error::parse(lineno, format!("illegal activity `{bad}`")));
                        }
                        alphabet = Some(toks.iter().map(|t| t.to_string()).collect::<Vec<_>>());
                    }
                    "states" => states = Some(num(toks.first().copied().unwrap_or(""))?),
                    "initial" => initial = Some(num(toks.first().copied().unwrap_or(""))?),
                    "accepting" => accepting = Some(toks.iter().map(|t| num(t)).collect::<Result<Vec<_>>>()?),
                    "edges" => in_edges = true,
                    other => return Err(Error::parse(lineno, format!("unknown section `{other}`"))),
                }
                continue;
            }
            if !in_edges {
                return Err(Error::parse(lineno, "line outside a section"));
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [p, a, q] = toks.as_slice() else {
                return Err(Error::parse(lineno, "edge must be `src symbol dst`"));
            };
            if !is_activity(a) {
                return Err(Error::parse(lineno, format!("illegal activity `{a}`")));
            }
            edges.push((num(p)?, a.to_string(), num(q)?));
        }
        let missing = |what: &str| Error::parse(0, format!("missing `{what}:` section"));
        Dfa::from_parts(
            alphabet.ok_or_else(|| missing("alphabet"))?,
            states.ok_or_else(|| missing("states"))?,
            initial.ok_or_else(|| missing("initial"))?,
            &accepting.ok_or_else(|| missing("accepting"))?,
            &edges,
        )
    }
}

fn sorted_alphabet<I: IntoIterator<Item = Activity>>(it: I) -> Vec<Activity> {
    let set: BTreeSet<Activity> = it.into_iter().collect();
    set.into_iter().collect()
}

fn sym_index(alphabet: &[Activity], a: &str) -> Option<usize> {
    alphabet.binary_search_by(|x| x.as_str().cmp(a)).ok()
}

/// Nondeterministic automaton with ε-moves, used for determinization.
#[derive(Debug, Clone)]
pub(crate) struct Nfa {
    alphabet: Vec<Activity>,
    pub(crate) initial: Vec<u32>,
    accepting: Vec<bool>,
    eps: Vec<Vec<u32>>,
    edges: Vec<Vec<(u32, u32)>>,
}

impl Nfa {
    /// `alphabet` lists the symbols to keep; [`symbol`](Self::symbol) maps anything else to ε.
    pub(crate) fn new(alphabet: Vec<Activity>) -> Nfa {
        Nfa { alphabet: sorted_alphabet(alphabet), initial: Vec::new(), accepting: Vec::new(), eps: Vec::new(), edges: Vec::new() }
    }

    pub(crate) fn add_state(&mut self, accepting: bool) -> usize {
        self.accepting.push(accepting);
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        self.accepting.len() - 1
    }

    pub(crate) fn set_accepting(&mut self, s: usize) {
        self.accepting[s] = true;
    }

    pub(crate) fn symbol(&self, a: &str) -> Option<usize> {
        sym_index(&self.alphabet, a)
    }

    pub(crate) fn add_edge(&mut self, s: usize, sym: Option<usize>, t: usize) {
        match sym {
            Some(a) => self.edges[s].push((a as u32, t as u32)),
            None => self.eps[s].push(t as u32),
        }
    }

    fn closure(&self, set: &mut Vec<u32>) {
        let mut seen: BTreeSet<u32> = set.iter().copied().collect();
        let mut stack = set.clone();
        while let Some(s) = stack.pop() {
            for &t in &self.eps[s as usize] {
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        *set = seen.into_iter().collect();
    }

    /// Subset construction; fails when more than `cap` subsets are produced.
    pub(crate) fn determinize(&self, cap: usize) -> Result<Dfa> {
        let k = self.alphabet.len();
        let mut start = self.initial.clone();
        self.closure(&mut start);
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        ids.insert(start.clone(), 0);
        let mut subsets = vec![start];
        let mut delta = Vec::new();
        let mut accepting = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            let cur = subsets[i].clone();
            accepting.push(cur.iter().any(|&s| self.accepting[s as usize]));
            let mut moves: Vec<Vec<u32>> = vec![Vec::new(); k];
            for &s in &cur {
                for &(a, t) in &self.edges[s as usize] {
                    moves[a as usize].push(t);
                }
            }
            for mut tgt in moves {
                if tgt.is_empty() {
                    delta.push(NONE);
                    continue;
                }
                self.closure(&mut tgt);
                let len = subsets.len() as u32;
                let id = match ids.get(&tgt) {
                    Some(&id) => id,
                    None => {
                        if subsets.len() >= cap {
                            return Err(Error::StateCap { cap });
                        }
                        ids.insert(tgt.clone(), len);
                        subsets.push(tgt);
                        len
                    }
                };
                delta.push(id);
            }
            i += 1;
        }
        Ok(Dfa { alphabet: self.alphabet.clone(), initial: 0, accepting, delta })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(ws: &[&str]) -> Vec<Trace> {
        ws.iter().map(|w| Trace::letters(w)).collect()
    }

    #[test]
    fn from_traces_is_minimal() {
        let d = Dfa::from_traces(&words(&["ab"]));
        assert_eq!(d.num_states(), 3);
        assert!(d.accepts(&Trace::letters("ab")));
        assert!(!d.accepts(&Trace::letters("a")));

        let d = Dfa::from_traces(&words(&["a", "aa"]));
        assert_eq!(d.num_states(), 3);
        assert_eq!((0..3).filter(|&s| d.is_accepting(s)).count(), 2);

        let d = Dfa::from_traces(&[]);
        assert!(d.is_empty_language());
        assert_eq!(d, Dfa::empty());
    }

    #[test]
    fn canonical_form() {
        // Two different automata for {ab}.
        let a = Dfa::from_parts(vec![], 3, 0, &[2], &[(0, "a".into(), 1), (1, "b".into(), 2)]).unwrap();
        let b = Dfa::from_parts(
            vec!["c".into()],
            5,
            4,
            &[1, 3],
            &[(4, "a".into(), 2), (2, "b".into(), 1), (2, "c".into(), 0), (0, "a".into(), 0)],
        )
        .unwrap();
        assert_eq!(a.minimize(), b.minimize());
        assert_eq!(a.minimize().to_text(), b.minimize().to_text());
        let m = b.minimize();
        assert_eq!(m.minimize(), m);
    }

    #[test]
    fn products_and_inclusion() {
        let d = Dfa::from_traces(&words(&["ab", "ac", "b"]));
        assert_eq!(d.intersect(&d), d);
        let u = Dfa::universal(["a", "b", "c"]);
        assert_eq!(u.intersect(&d), d);
        assert!(u.includes(&d));
        assert!(!Dfa::empty().includes(&Dfa::from_traces(&words(&["a"]))));
        let e = d.difference(&Dfa::from_traces(&words(&["b"])));
        assert_eq!(e, Dfa::from_traces(&words(&["ab", "ac"])));
        assert_eq!(e.union(&Dfa::from_traces(&words(&["b"]))), d);
    }

    #[test]
    fn complement_and_projection() {
        let d = Dfa::from_traces(&words(&["ab"]));
        let c = d.complement(["a", "b"]);
        assert!(!c.accepts(&Trace::letters("ab")));
        assert!(c.accepts(&Trace::letters("aa")));
        assert!(c.accepts(&Trace::default()));

        let keep: BTreeSet<Activity> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let p = Dfa::from_traces(&words(&["abfg"])).project(&keep);
        assert_eq!(p, Dfa::from_traces(&words(&["ab"])));
        let keep: BTreeSet<Activity> = ["c".to_string()].into();
        let p = d.project(&keep);
        assert_eq!(p.enumerate(3), [Trace::default()].into());
    }

    #[test]
    fn infinite_and_enumeration() {
        let loop_ = Dfa::from_parts(vec![], 2, 0, &[1], &[(0, "a".into(), 1), (1, "b".into(), 0)]).unwrap();
        assert!(loop_.is_infinite());
        assert_eq!(loop_.count_words(), None);
        assert_eq!(loop_.enumerate(3), words(&["a", "aba"]).into_iter().collect());
        let fin = Dfa::from_traces(&words(&["a", "bc"]));
        assert!(!fin.is_infinite());
        assert_eq!(fin.count_words(), Some(2));
        // A dead cycle does not make the language infinite.
        let dead = Dfa::from_parts(vec![], 3, 0, &[1], &[(0, "a".into(), 1), (0, "b".into(), 2), (2, "b".into(), 2)]).unwrap();
        assert!(!dead.is_infinite());
    }

    #[test]
    fn text_roundtrip() {
        let d = Dfa::from_traces(&words(&["ab", "ba", "abc"]));
        assert_eq!(Dfa::parse(&d.to_text()).unwrap(), d);
        assert!(Dfa::parse("alphabet: a\nstates: 1\ninitial: 0\naccepting:\nedges:\n0 a 3\n").is_err());
    }
}
