//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use nalgebra::DMatrix;
use rand::Rng;

use confprop::automata::Dfa;
use confprop::eventlog::{Activity, EventLog, Trace};
use confprop::procmodel::{Marking, Net};
use confprop::propositions::generate::{rewrite, Tree, REWRITES};

pub fn letters(n: usize) -> Vec<Activity> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// Raw random automaton: `(states, accepting, edges)`, initial state 0.
pub struct RawDfa {
    pub states: usize,
    pub accepting: Vec<usize>,
    pub edges: Vec<(usize, Activity, usize)>,
}

impl RawDfa {
    pub fn random<R: Rng>(rng: &mut R, max_states: usize, alphabet: &[Activity], density: f64) -> RawDfa {
        let states = rng.gen_range(1..=max_states);
        let accepting: Vec<usize> = (0..states).filter(|_| rng.gen_bool(0.4)).collect();
        let mut edges = Vec::new();
        for s in 0..states {
            for a in alphabet {
                if rng.gen_bool(density) {
                    edges.push((s, a.clone(), rng.gen_range(0..states)));
                }
            }
        }
        RawDfa { states, accepting, edges }
    }

    pub fn dfa(&self, alphabet: &[Activity]) -> Dfa {
        Dfa::from_parts(alphabet.to_vec(), self.states, 0, &self.accepting, &self.edges).expect("valid parts")
    }

    /// Same automaton with states renumbered by `perm` (0 stays initial).
    pub fn permuted<R: Rng>(&self, rng: &mut R) -> RawDfa {
        let mut perm: Vec<usize> = (1..self.states).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        perm.insert(0, 0);
        RawDfa {
            states: self.states,
            accepting: self.accepting.iter().map(|&s| perm[s]).collect(),
            edges: self.edges.iter().rev().map(|(s, a, t)| (perm[*s], a.clone(), perm[*t])).collect(),
        }
    }

    pub fn accepts(&self, w: &[Activity]) -> bool {
        let mut s = 0;
        for a in w {
            match self.edges.iter().find(|(p, b, _)| *p == s && b == a) {
                Some((_, _, t)) => s = *t,
                None => return false,
            }
        }
        self.accepting.contains(&s)
    }

    /// States both reachable from 0 and co-reachable to acceptance.
    pub fn useful(&self) -> Vec<bool> {
        let mut fwd = vec![false; self.states];
        fwd[0] = true;
        let mut bwd = vec![false; self.states];
        for &s in &self.accepting {
            bwd[s] = true;
        }
        for _ in 0..self.states {
            for (s, _, t) in &self.edges {
                if fwd[*s] {
                    fwd[*t] = true;
                }
                if bwd[*t] {
                    bwd[*s] = true;
                }
            }
        }
        (0..self.states).map(|s| fwd[s] && bwd[s]).collect()
    }

    /// Dense adjacency of the trimmed automaton plus one edge from every
    /// accepting state to 0, over the useful states only.
    pub fn short_circuit(&self) -> DMatrix<f64> {
        let useful = self.useful();
        if !useful[0] {
            return DMatrix::zeros(0, 0);
        }
        let keep: Vec<usize> = (0..self.states).filter(|&s| useful[s]).collect();
        let at = |s: usize| keep.iter().position(|&k| k == s).unwrap();
        let mut a = DMatrix::<f64>::zeros(keep.len(), keep.len());
        for (s, _, t) in &self.edges {
            if useful[*s] && useful[*t] {
                a[(at(*s), at(*t))] += 1.0;
            }
        }
        for &s in &self.accepting {
            if useful[s] {
                a[(at(s), 0)] += 1.0;
            }
        }
        a
    }
}

/// Spectral radius of a nonnegative matrix from its dense spectrum. QR stalls
/// when all eigenvalues share one modulus (cyclic permutations), so the
/// spectrum of A + I/2 is taken instead: for nonnegative A its radius is
/// exactly rho(A) + 1/2.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let shifted = a + DMatrix::<f64>::identity(n, n) * 0.5;
    let schur = nalgebra::Schur::try_new(shifted, 1e-12, 100_000).expect("Schur iteration converges");
    schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max) - 0.5
}

/// All words over `alphabet` of length at most `max_len`, shortest first.
pub fn all_words(alphabet: &[Activity], max_len: usize) -> Vec<Vec<Activity>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in alphabet {
                let mut v: Vec<Activity> = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn fire(net: &Net, m: &Marking, t: usize) -> Option<Marking> {
    let tr = &net.transitions()[t];
    let mut v = m.0.clone();
    for &p in &tr.pre {
        if v[p] == 0 {
            return None;
        }
        v[p] -= 1;
    }
    for &p in &tr.post {
        v[p] += 1;
    }
    Some(Marking(v))
}

/// Visible words of every run from the initial to the final marking whose
/// word has at most `max_len` events, by exhaustive exploration of
/// (marking, word) pairs.
pub fn run_words(net: &Net, max_len: usize) -> BTreeSet<Vec<Activity>> {
    let mut seen: HashSet<(Marking, Vec<Activity>)> = HashSet::new();
    let mut queue = VecDeque::new();
    let start = (net.initial().clone(), Vec::new());
    seen.insert(start.clone());
    queue.push_back(start);
    let mut out = BTreeSet::new();
    while let Some((m, w)) = queue.pop_front() {
        if &m == net.final_marking() {
            out.insert(w.clone());
        }
        for t in 0..net.transitions().len() {
            let Some(m2) = fire(net, &m, t) else { continue };
            let mut w2 = w.clone();
            if let Some(a) = &net.transitions()[t].label {
                if w2.len() == max_len {
                    continue;
                }
                w2.push(a.clone());
            }
            let key = (m2, w2);
            if seen.insert(key.clone()) {
                queue.push_back(key);
            }
        }
    }
    out
}

/// Cost of aligning `s` to `w` with unit log and model moves: |s| + |w| - 2 lcs.
pub fn edit_cost(s: &[Activity], w: &[Activity]) -> u64 {
    let mut dp = vec![vec![0usize; w.len() + 1]; s.len() + 1];
    for i in 1..=s.len() {
        for j in 1..=w.len() {
            dp[i][j] = if s[i - 1] == w[j - 1] { dp[i - 1][j - 1] + 1 } else { dp[i - 1][j].max(dp[i][j - 1]) };
        }
    }
    (s.len() + w.len() - 2 * dp[s.len()][w.len()]) as u64
}

/// Optimal alignment cost by enumerating model runs. Words longer than
/// 2|s| + shortest cannot beat aligning against the shortest word.
pub fn brute_alignment_cost(net: &Net, s: &Trace) -> Option<u64> {
    let mut bound = 0;
    let shortest = loop {
        let ws = run_words(net, bound);
        if let Some(w) = ws.iter().min_by_key(|w| w.len()) {
            break w.len();
        }
        bound += 1;
        if bound > 16 {
            return None;
        }
    };
    let ws = run_words(net, 2 * s.len() + shortest);
    ws.iter().map(|w| edit_cost(&s.0, w)).min()
}

/// Random workflow net with at most `max_transitions` transitions.
pub fn small_net<R: Rng>(rng: &mut R, max_transitions: usize) -> Net {
    loop {
        let alphabet = letters(rng.gen_range(2..=4));
        let leaves = rng.gen_range(1..=4);
        let mut net = Tree::random(rng, &alphabet, leaves, true).to_net();
        if rng.gen_bool(0.5) {
            let rw = REWRITES[rng.gen_range(0..REWRITES.len())];
            if let Some(n) = rewrite(&net, rw, rng) {
                net = n;
            }
        }
        if net.transitions().len() <= max_transitions {
            return net;
        }
    }
}

pub fn random_word<R: Rng>(rng: &mut R, alphabet: &[Activity], min: usize, max: usize) -> Trace {
    Trace((0..rng.gen_range(min..=max)).map(|_| alphabet[rng.gen_range(0..alphabet.len())].clone()).collect())
}

/// Random log drawing each case from `pool` or a fresh random word.
pub fn random_log<R: Rng>(rng: &mut R, pool: &[Trace], alphabet: &[Activity], cases: usize) -> EventLog {
    let mut l = EventLog::new();
    for _ in 0..cases {
        let t = if !pool.is_empty() && rng.gen_bool(0.6) {
            pool[rng.gen_range(0..pool.len())].clone()
        } else {
            random_word(rng, alphabet, 1, 4)
        };
        l.add(t, rng.gen_range(1..=3)).expect("small counts");
    }
    l
}
