//! Random instance generators and the mutations that establish each
//! proposition's precondition.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, PropositionId};
use crate::automata::Dfa;
use crate::eventlog::{Activity, EventLog, Trace};
use crate::procmodel::{Model, ModelLanguage, Net, Transition};

pub const MAX_ALPHABET: usize = 6;
pub const MAX_TRACE_LEN: usize = 8;
const ATTEMPTS: usize = 40;
/// Largest language enumerated for the "log equals model" propositions.
const MAX_ENUMERATED: u128 = 40;

pub fn rng_for(seed: u64, prop: PropositionId, index: usize) -> ChaCha8Rng {
    let mut x = seed ^ ((prop.number() as u64) << 48) ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha8Rng::seed_from_u64(x ^ (x >> 31))
}

fn letters(n: usize) -> Vec<Activity> {
    (b'a'..b'a' + n as u8).map(|c| (c as char).to_string()).collect()
}

/// Block-structured process tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Act(Activity),
    Tau,
    Seq(Vec<Tree>),
    Xor(Vec<Tree>),
    And(Vec<Tree>),
    /// Body, then any number of (redo, body) rounds.
    Loop(Box<Tree>, Box<Tree>),
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, op: &str, cs: &[Tree]| {
            write!(f, "{op}(")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        };
        match self {
            Tree::Act(a) => write!(f, "{a}"),
            Tree::Tau => write!(f, "~"),
            Tree::Seq(cs) => list(f, "seq", cs),
            Tree::Xor(cs) => list(f, "xor", cs),
            Tree::And(cs) => list(f, "and", cs),
            Tree::Loop(b, r) => write!(f, "loop({b},{r})"),
        }
    }
}

impl Tree {
    pub fn random<R: Rng>(rng: &mut R, alphabet: &[Activity], leaves: usize, loops: bool) -> Tree {
        if leaves <= 1 {
            return if rng.gen_bool(0.1) { Tree::Tau } else { Tree::Act(alphabet.choose(rng).expect("alphabet").clone()) };
        }
        let op = rng.gen_range(0..if loops { 10 } else { 8 });
        if op >= 8 {
            let redo = if rng.gen_bool(0.5) { Tree::Tau } else { Tree::random(rng, alphabet, 1, false) };
            return Tree::Loop(Box::new(Tree::random(rng, alphabet, leaves - 1, loops)), Box::new(redo));
        }
        let n = rng.gen_range(2..=leaves.min(3));
        let mut parts = vec![1; n];
        for _ in n..leaves {
            parts[rng.gen_range(0..n)] += 1;
        }
        let cs = parts.into_iter().map(|k| Tree::random(rng, alphabet, k, loops)).collect();
        match op {
            0..=3 => Tree::Seq(cs),
            4 | 5 => Tree::Xor(cs),
            _ => Tree::And(cs),
        }
    }

    /// Workflow net with source place `i` and sink place `o`.
    pub fn to_net(&self) -> Net {
        let mut b = NetBuilder { net: Net::new(), places: 0, transitions: 0 };
        b.net.add_place("i");
        b.net.add_place("o");
        b.build(self, "i", "o");
        b.net.set_initial(&["i"]);
        b.net.set_final(&["o"]);
        b.net
    }
}

struct NetBuilder {
    net: Net,
    places: usize,
    transitions: usize,
}

impl NetBuilder {
    fn place(&mut self) -> String {
        let s = format!("p{}", self.places);
        self.places += 1;
        self.net.add_place(&s);
        s
    }

    fn transition(&mut self, label: Option<&str>, pre: &[String], post: &[String]) {
        let id = format!("t{}", self.transitions);
        self.transitions += 1;
        let pre: Vec<&str> = pre.iter().map(String::as_str).collect();
        let post: Vec<&str> = post.iter().map(String::as_str).collect();
        self.net.add_transition(&id, label, &pre, &post);
    }

    fn build(&mut self, t: &Tree, i: &str, o: &str) {
        let (i, o) = (i.to_string(), o.to_string());
        match t {
            Tree::Act(a) => self.transition(Some(a), &[i], &[o]),
            Tree::Tau => self.transition(None, &[i], &[o]),
            Tree::Seq(cs) => {
                let mut cur = i;
                for (k, c) in cs.iter().enumerate() {
                    let next = if k + 1 == cs.len() { o.clone() } else { self.place() };
                    self.build(c, &cur, &next);
                    cur = next;
                }
            }
            Tree::Xor(cs) => {
                for c in cs {
                    self.build(c, &i, &o);
                }
            }
            Tree::And(cs) => {
                let ins: Vec<String> = cs.iter().map(|_| self.place()).collect();
                let outs: Vec<String> = cs.iter().map(|_| self.place()).collect();
                self.transition(None, &[i], &ins);
                for (k, c) in cs.iter().enumerate() {
                    self.build(c, &ins[k], &outs[k]);
                }
                self.transition(None, &outs, &[o]);
            }
            Tree::Loop(b, r) => {
                let (p1, p2) = (self.place(), self.place());
                self.transition(None, &[i], &[p1.clone()]);
                self.build(b, &p1, &p2);
                self.build(r, &p2, &p1);
                self.transition(None, &[p2], &[o]);
            }
        }
    }
}

fn parts(net: &Net) -> (Vec<String>, Vec<Transition>, Vec<u32>, Vec<u32>) {
    (net.places().to_vec(), net.transitions().to_vec(), net.initial().0.clone(), net.final_marking().0.clone())
}

fn assemble(places: Vec<String>, transitions: Vec<Transition>, initial: Vec<u32>, fin: Vec<u32>) -> Net {
    use crate::procmodel::Marking;
    Net::from_parts(places, transitions, Marking(initial), Marking(fin)).expect("rewrites keep arcs in range")
}

fn fresh_id(net: &Net, base: &str) -> String {
    (0..).map(|i| format!("{base}_{i}")).find(|id| net.transition_index(id).is_none()).expect("unbounded")
}

fn fresh_place(places: &[String], base: &str) -> String {
    (0..).map(|i| format!("{base}_{i}")).find(|p| !places.contains(p)).expect("unbounded")
}

/// Language-preserving net rewrites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rewrite {
    /// Copy of a place with the same arcs and tokens.
    ImplicitPlace,
    /// A visible transition hands its output to a new silent transition.
    SilentChain,
    /// A transition copy with identical label, preset and postset.
    Duplicate,
    /// The single producer of a choice place is split into one copy per
    /// branch, so the choice is made when the producer fires.
    SplitDuplicate,
}

pub const REWRITES: [Rewrite; 4] = [Rewrite::ImplicitPlace, Rewrite::SilentChain, Rewrite::Duplicate, Rewrite::SplitDuplicate];

impl fmt::Display for Rewrite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rewrite::ImplicitPlace => "implicit-place",
            Rewrite::SilentChain => "silent-chain",
            Rewrite::Duplicate => "duplicate",
            Rewrite::SplitDuplicate => "split-duplicate",
        })
    }
}

/// Applies `rw` at a random applicable spot, or `None` when nothing applies.
pub fn rewrite<R: Rng>(net: &Net, rw: Rewrite, rng: &mut R) -> Option<Net> {
    let (mut places, mut ts, mut init, mut fin) = parts(net);
    match rw {
        Rewrite::ImplicitPlace => {
            let q = rng.gen_range(0..places.len());
            let name = fresh_place(&places, &places[q]);
            let p = places.len();
            places.push(name);
            for t in &mut ts {
                if t.pre.contains(&q) {
                    t.pre.push(p);
                }
                if t.post.contains(&q) {
                    t.post.push(p);
                }
            }
            init.push(init[q]);
            fin.push(fin[q]);
        }
        Rewrite::SilentChain => {
            let vis: Vec<usize> = (0..ts.len()).filter(|&t| ts[t].label.is_some()).collect();
            let &t = vis.choose(rng)?;
            let x = places.len();
            places.push(fresh_place(&places, "x"));
            init.push(0);
            fin.push(0);
            let post = std::mem::replace(&mut ts[t].post, vec![x]);
            ts.push(Transition { id: fresh_id(net, "s"), label: None, pre: vec![x], post });
        }
        Rewrite::Duplicate => {
            let t = rng.gen_range(0..ts.len());
            let mut copy = ts[t].clone();
            copy.id = fresh_id(net, &ts[t].id);
            ts.push(copy);
        }
        Rewrite::SplitDuplicate => {
            let candidates: Vec<(usize, usize, Vec<usize>)> = (0..places.len())
                .filter(|&p| init[p] == 0 && fin[p] == 0)
                .filter_map(|p| {
                    let producers: Vec<usize> = (0..ts.len()).filter(|&t| ts[t].post.contains(&p)).collect();
                    let consumers: Vec<usize> = (0..ts.len()).filter(|&t| ts[t].pre.contains(&p)).collect();
                    let ok = producers.len() == 1
                        && consumers.len() >= 2
                        && !consumers.contains(&producers[0])
                        && consumers.iter().all(|&c| ts[c].pre == [p]);
                    ok.then(|| (p, producers[0], consumers))
                })
                .collect();
            let (p, t, consumers) = candidates.choose(rng)?.clone();
            let original = ts[t].clone();
            for (k, &c) in consumers.iter().enumerate() {
                let pk = places.len();
                places.push(fresh_place(&places, &places[p]));
                init.push(0);
                fin.push(0);
                ts[c].pre = vec![pk];
                let mut copy = original.clone();
                copy.post = copy.post.iter().map(|&q| if q == p { pk } else { q }).collect();
                if k == 0 {
                    ts[t] = copy;
                } else {
                    copy.id = fresh_id(net, &original.id);
                    copy.id.push_str(&format!("{k}"));
                    ts.push(copy);
                }
            }
        }
    }
    Some(assemble(places, ts, init, fin))
}

/// A net for any model: nets as-is, other languages via their net realization.
pub fn as_net(m: &Model) -> Option<Net> {
    Some(m.net_handle().ok()?.net().clone())
}

/// Language-equal structural variant: one or two random rewrites, verified
/// by automaton equality.
pub fn language_variant<R: Rng>(m: &Model, rng: &mut R) -> Option<(Model, String)> {
    let mut net = as_net(m)?;
    let mut applied = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let mut order = REWRITES.to_vec();
        order.shuffle(rng);
        for rw in order {
            if let Some(n) = rewrite(&net, rw, rng) {
                net = n;
                applied.push(rw.to_string());
                break;
            }
        }
    }
    let v = Model::from_net(net);
    let same = v.dfa().ok()?.same_language(&m.dfa().ok()?);
    same.then(|| (v, applied.join("+")))
}

/// Random trace of the model language, biased towards short traces.
pub fn fitting_trace<R: Rng>(rng: &mut R, d: &Dfa) -> Option<Trace> {
    let n = d.num_states();
    if d.is_empty_language() {
        return None;
    }
    // Distance to acceptance, by reverse breadth-first search.
    let mut dist = vec![usize::MAX; n];
    let mut queue: std::collections::VecDeque<usize> = (0..n).filter(|&s| d.is_accepting(s)).collect();
    for &s in &queue {
        dist[s] = 0;
    }
    let edges: Vec<(usize, usize, usize)> = d.edges().collect();
    while let Some(v) = queue.pop_front() {
        for &(u, _, w) in &edges {
            if w == v && dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let mut s = d.initial();
    let mut word = Vec::new();
    loop {
        let out: Vec<(usize, usize)> = d.out(s).filter(|&(_, t)| dist[t] != usize::MAX).collect();
        let may_stop = d.is_accepting(s) && !word.is_empty();
        if may_stop && (out.is_empty() || rng.gen_bool(0.35)) {
            return Some(Trace(word));
        }
        let pool: Vec<(usize, usize)> = if word.len() + dist[s] >= MAX_TRACE_LEN {
            if may_stop {
                return Some(Trace(word));
            }
            let best = out.iter().map(|&(_, t)| dist[t]).min()?;
            out.into_iter().filter(|&(_, t)| dist[t] == best).collect()
        } else {
            out
        };
        let &(sym, t) = pool.choose(rng)?;
        word.push(d.alphabet()[sym].clone());
        s = t;
        if word.len() > MAX_TRACE_LEN + n {
            return None;
        }
    }
}

/// Random trace outside the model language, over the alphabet plus `x`.
pub fn nonfitting_trace<R: Rng>(rng: &mut R, d: &Dfa, alphabet: &[Activity]) -> Option<Trace> {
    let mut pool = alphabet.to_vec();
    if pool.is_empty() || rng.gen_bool(0.1) {
        pool.push("x".into());
    }
    for _ in 0..ATTEMPTS {
        let mut w = match fitting_trace(rng, d) {
            Some(t) if rng.gen_bool(0.8) => t.0,
            _ => (0..rng.gen_range(1..=5)).map(|_| pool.choose(rng).expect("pool").clone()).collect(),
        };
        for _ in 0..rng.gen_range(1..=2) {
            let n = w.len();
            match rng.gen_range(0..4) {
                0 if n >= 2 => {
                    let i = rng.gen_range(0..n - 1);
                    w.swap(i, i + 1);
                }
                1 if n >= 2 => {
                    w.remove(rng.gen_range(0..n));
                }
                2 => w.insert(rng.gen_range(0..=n), pool.choose(rng).expect("pool").clone()),
                _ if n >= 1 => w[rng.gen_range(0..n)] = pool.choose(rng).expect("pool").clone(),
                _ => {}
            }
        }
        let t = Trace(w);
        if !t.is_empty() && t.len() <= MAX_TRACE_LEN && !d.accepts(&t) {
            return Some(t);
        }
    }
    None
}

fn model_alphabet(m: &Model) -> Vec<Activity> {
    m.alphabet().map(|a| a.into_iter().collect()).unwrap_or_default()
}

/// Log with `fit` fitting and `nonfit` non-fitting variants, multiplicities 1..=3.
pub fn sample_log<R: Rng>(rng: &mut R, m: &Model, fit: usize, nonfit: usize) -> Option<EventLog> {
    let d = m.dfa().ok()?;
    let alphabet = model_alphabet(m);
    let mut l = EventLog::new();
    for _ in 0..fit {
        l.add(fitting_trace(rng, &d)?, rng.gen_range(1..=3)).ok()?;
    }
    for _ in 0..nonfit {
        l.add(nonfitting_trace(rng, &d, &alphabet)?, rng.gen_range(1..=3)).ok()?;
    }
    (!l.is_empty()).then_some(l)
}

fn mixed_log<R: Rng>(rng: &mut R, m: &Model) -> Option<EventLog> {
    let fit = rng.gen_range(0..=3);
    let nonfit = rng.gen_range(if fit == 0 { 1 } else { 0 }..=2);
    sample_log(rng, m, fit, nonfit)
}

/// Base model: a random process-tree net, or a random finite language.
/// Never accepts the empty trace.
pub fn base_model<R: Rng>(rng: &mut R, loops: bool) -> Option<(Model, String)> {
    let alphabet = letters(rng.gen_range(3..=MAX_ALPHABET));
    for _ in 0..ATTEMPTS {
        let (m, origin) = if rng.gen_bool(0.75) {
            let size = rng.gen_range(2..=7);
            let tree = Tree::random(rng, &alphabet, size, loops);
            let origin = format!("tree {tree}");
            (Model::from_net(tree.to_net()), origin)
        } else {
            let ts: BTreeSet<Trace> = (0..rng.gen_range(1..=4))
                .map(|_| Trace((0..rng.gen_range(1..=5)).map(|_| alphabet.choose(rng).expect("alphabet").clone()).collect()))
                .collect();
            let origin = format!("finite set of {} traces", ts.len());
            (Model::new(ModelLanguage::FiniteSet(ts)), origin)
        };
        let Ok(d) = m.dfa() else { continue };
        if !d.is_empty_language() && !d.accepts(&Trace(Vec::new())) {
            return Some((m, origin));
        }
    }
    None
}

/// Model kinds produced by `mutate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    ExtendModel,
    AddFitting,
    AddNonfitting,
    DuplicateLog(u64),
    LanguageEqualVariant,
}

/// Appends to `inst` what the mutation establishes: a second model with a
/// larger (or equal) language, a fitting or non-fitting extension log, a
/// duplication factor, or a language-equal second model.
pub fn mutate(kind: MutationKind, inst: &Instance, seed: u64) -> Option<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = inst.models.first()?;
    let mut out = inst.clone();
    match kind {
        MutationKind::ExtendModel => {
            let (m1, m2, how) = extension(&mut rng, m)?;
            out.models = vec![m1, m2];
            out.origin.push_str(&format!("; extension {how}"));
        }
        MutationKind::AddFitting | MutationKind::AddNonfitting => {
            let n = rng.gen_range(1..=2);
            let l3 = if kind == MutationKind::AddFitting { sample_log(&mut rng, m, n, 0)? } else { sample_log(&mut rng, m, 0, n)? };
            out.logs.truncate(1);
            out.logs.push(l3);
        }
        MutationKind::DuplicateLog(k) => out.k = k,
        MutationKind::LanguageEqualVariant => {
            let (v, how) = language_variant(m, &mut rng)?;
            out.models = vec![m.clone(), v];
            out.origin.push_str(&format!("; variant {how}"));
        }
    }
    Some(out)
}

/// `(m1, m2)` with τ(m1) ⊆ τ(m2), one of them being `m`.
fn extension<R: Rng>(rng: &mut R, m: &Model) -> Option<(Model, Model, String)> {
    let d = m.dfa().ok()?;
    let alphabet = model_alphabet(m);
    let (m1, m2, how) = match rng.gen_range(0..4) {
        0 => {
            let (v, how) = language_variant(m, rng)?;
            if rng.gen_bool(0.5) {
                (m.clone(), v, format!("equal ({how})"))
            } else {
                (v, m.clone(), format!("equal reversed ({how})"))
            }
        }
        1 => {
            // Extra branch from the source to the sink spelling a new trace.
            let extra = nonfitting_trace(rng, &d, &alphabet)?;
            let m2 = match m.language() {
                ModelLanguage::FiniteSet(ts) => {
                    let mut ts = ts.clone();
                    ts.insert(extra.clone());
                    Model::new(ModelLanguage::FiniteSet(ts))
                }
                _ => Model::from_net(add_branch(&as_net(m)?, &extra)?),
            };
            (m.clone(), m2, format!("branch {extra}"))
        }
        2 => {
            // Self-loop repeating a visible transition's label on its output.
            let net = as_net(m)?;
            let vis: Vec<usize> = (0..net.transitions().len())
                .filter(|&t| net.transitions()[t].label.is_some() && net.transitions()[t].post.len() == 1)
                .collect();
            let &t = vis.choose(rng)?;
            let (places, mut ts, init, fin) = parts(&net);
            let q = ts[t].post[0];
            let label = ts[t].label.clone();
            ts.push(Transition { id: fresh_id(&net, "r"), label: label.clone(), pre: vec![q], post: vec![q] });
            (m.clone(), Model::from_net(assemble(places, ts, init, fin)), format!("repeat {}", label.unwrap_or_default()))
        }
        _ => {
            // Restriction of m to words of bounded length.
            let n = rng.gen_range(1..=MAX_TRACE_LEN);
            let bounded = bounded_words(&alphabet, n).intersect(&d).minimize();
            if bounded.is_empty_language() {
                return None;
            }
            (Model::from_dfa(bounded), m.clone(), format!("restricted to length <= {n}"))
        }
    };
    let (d1, d2) = (m1.dfa().ok()?, m2.dfa().ok()?);
    d2.includes(&d1).then_some((m1, m2, how))
}

/// All words of length at most `n`.
fn bounded_words(alphabet: &[Activity], n: usize) -> Dfa {
    let edges: Vec<(usize, Activity, usize)> = (0..n).flat_map(|s| alphabet.iter().map(move |a| (s, a.clone(), s + 1))).collect();
    let accepting: Vec<usize> = (0..=n).collect();
    Dfa::from_parts(alphabet.to_vec(), n + 1, 0, &accepting, &edges).expect("well-formed")
}

fn add_branch(net: &Net, w: &Trace) -> Option<Net> {
    let single = |m: &[u32]| -> Option<usize> { (m.iter().sum::<u32>() == 1).then(|| m.iter().position(|&x| x == 1)).flatten() };
    let (mut places, mut ts, mut init, mut fin) = parts(net);
    let (src, sink) = (single(&init)?, single(&fin)?);
    let mut cur = src;
    for (k, a) in w.iter().enumerate() {
        let next = if k + 1 == w.len() {
            sink
        } else {
            places.push(fresh_place(&places, "b"));
            init.push(0);
            fin.push(0);
            places.len() - 1
        };
        let id = format!("{}{k}", fresh_id(net, "b"));
        ts.push(Transition { id, label: Some(a.clone()), pre: vec![cur], post: vec![next] });
        cur = next;
    }
    Some(assemble(places, ts, init, fin))
}

/// Flower model over `alphabet`: every word, the empty one included.
pub fn flower(alphabet: &[Activity]) -> Net {
    let mut net = Net::new();
    net.add_place("p");
    for a in alphabet {
        net.add_transition(&format!("t{a}"), Some(a), &["p"], &["p"]);
    }
    net.set_initial(&["p"]);
    net.set_final(&["p"]);
    net
}

fn finite_language<R: Rng>(rng: &mut R) -> Option<(Model, Vec<Trace>, String)> {
    let (m, origin) = base_model(rng, false)?;
    let d = m.dfa().ok()?;
    match d.count_words() {
        Some(n) if n <= MAX_ENUMERATED => Some((m, d.enumerate(d.num_states()).into_iter().collect(), origin)),
        _ => None,
    }
}

fn log_of(rng: &mut impl Rng, ts: &[Trace]) -> EventLog {
    let mut l = EventLog::new();
    for t in ts {
        l.add(t.clone(), rng.gen_range(1..=3)).expect("small counts");
    }
    l
}

fn try_instance<R: Rng>(prop: PropositionId, rng: &mut R) -> Option<Instance> {
    use PropositionId::*;
    let k = [2u64, 3, 5][rng.gen_range(0..3)];
    let seed: u64 = rng.gen();
    let inst = match prop {
        PrecPro5 | PrecPro6 => {
            let (m, ts, origin) = finite_language(rng)?;
            let mut l = log_of(rng, &ts);
            if prop == PrecPro6 {
                let d = m.dfa().ok()?;
                let alphabet = model_alphabet(&m);
                for _ in 0..rng.gen_range(1..=2) {
                    l.add(nonfitting_trace(rng, &d, &alphabet)?, rng.gen_range(1..=3)).ok()?;
                }
            }
            Instance::new(vec![l], vec![m], &origin)
        }
        GenPro8 => {
            let alphabet = letters(rng.gen_range(2..=4));
            let m = if rng.gen_bool(0.5) { Model::from_net(flower(&alphabet)) } else { Model::from_dfa(Dfa::universal(alphabet.clone())) };
            let mut l = EventLog::new();
            for _ in 0..rng.gen_range(1..=4) {
                let t = Trace((0..rng.gen_range(1..=6)).map(|_| alphabet.choose(rng).expect("alphabet").clone()).collect());
                l.add(t, rng.gen_range(1..=3)).ok()?;
            }
            Instance::new(vec![l], vec![m], "flower")
        }
        _ => {
            let (m, origin) = base_model(rng, true)?;
            let l = match prop {
                RecPro5 | GenPro4 => {
                    let n = rng.gen_range(1..=3);
                    sample_log(rng, &m, n, 0)?
                }
                GenPro5 => {
                    let n = rng.gen_range(1..=3);
                    sample_log(rng, &m, 0, n)?
                }
                _ => mixed_log(rng, &m)?,
            };
            let base = Instance::new(vec![l], vec![m], &origin);
            match prop {
                BehPro => mutate(MutationKind::LanguageEqualVariant, &base, seed)?,
                RecPro1 | PrecPro1 | GenPro1 => {
                    let mut i = mutate(MutationKind::ExtendModel, &base, seed)?;
                    if prop == PrecPro1 {
                        // Drop log traces in the added behavior.
                        let (m1, m2) = (&i.models[0], &i.models[1]);
                        let keep = i.logs[0].iter().filter(|(t, _)| !(m2.fits(t).unwrap_or(true) && !m1.fits(t).unwrap_or(false)));
                        let l = EventLog::from_counts(keep.map(|(t, n)| (t.clone(), n))).ok()?;
                        if l.is_empty() {
                            return None;
                        }
                        i.logs[0] = l;
                    }
                    i
                }
                RecPro2 | PrecPro2 | GenPro2 => mutate(MutationKind::AddFitting, &base, seed)?,
                RecPro3 | PrecPro3 | GenPro3 => mutate(MutationKind::AddNonfitting, &base, seed)?,
                RecPro4 | PrecPro4 | GenPro4 | GenPro5 | GenPro6 | GenPro7 => {
                    let i = mutate(MutationKind::DuplicateLog(k), &base, seed)?;
                    if matches!(prop, GenPro6 | GenPro7) {
                        let (fit, nonfit) = i.logs[0].split_fitting(|t| i.models[0].fits(t).unwrap_or(false));
                        let ok = if prop == GenPro6 { fit.size() >= nonfit.size() } else { fit.size() <= nonfit.size() };
                        if !ok {
                            return None;
                        }
                    }
                    i
                }
                _ => base,
            }
        }
    };
    Some(inst)
}

/// The `index`-th random instance for `prop`, or `None` when no instance
/// meeting the precondition was found.
pub fn instance(prop: PropositionId, seed: u64, index: usize) -> Option<Instance> {
    let mut rng = rng_for(seed, prop, index);
    (0..ATTEMPTS).find_map(|_| try_instance(prop, &mut rng)).map(|mut i| {
        i.origin = format!("random #{index}: {}", i.origin);
        i
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn tree_nets_have_the_tree_language() {
        let t = Tree::Seq(vec![Tree::Act("a".into()), Tree::Xor(vec![Tree::Act("b".into()), Tree::Act("c".into())])]);
        let m = Model::from_net(t.to_net());
        assert!(m.dfa().unwrap().same_language(&fixtures::model("m8").dfa().unwrap()));
        let l = Tree::Loop(Box::new(Tree::Act("a".into())), Box::new(Tree::Tau));
        let d = Model::from_net(l.to_net()).dfa().unwrap();
        assert!(d.accepts(&Trace::letters("aaa")) && !d.accepts(&Trace::letters("")));
        let p = Tree::And(vec![Tree::Act("a".into()), Tree::Act("b".into())]);
        assert_eq!(Model::from_net(p.to_net()).enumerate(4).unwrap().len(), 2);
    }

    #[test]
    fn split_duplicate_turns_m8_into_m9() {
        let m8 = fixtures::net("m8");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = rewrite(&m8, Rewrite::SplitDuplicate, &mut rng).unwrap();
        assert_eq!(n.transitions().iter().filter(|t| t.label.as_deref() == Some("a")).count(), 2);
        let (a, b) = (Model::from_net(n), fixtures::model("m9"));
        assert!(a.dfa().unwrap().same_language(&b.dfa().unwrap()));
    }

    #[test]
    fn rewrites_preserve_language() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alphabet = letters(4);
        for _ in 0..200 {
            let size = rng.gen_range(2..=7);
            let tree = Tree::random(&mut rng, &alphabet, size, true);
            let net = tree.to_net();
            let d = Model::from_net(net.clone()).dfa().unwrap();
            for rw in REWRITES {
                if let Some(n) = rewrite(&net, rw, &mut rng) {
                    assert!(Model::from_net(n).dfa().unwrap().same_language(&d), "{rw} on {tree}");
                }
            }
        }
    }

    #[test]
    fn samplers_respect_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = fixtures::model("m1");
        let d = m.dfa().unwrap();
        let alphabet = model_alphabet(&m);
        for _ in 0..100 {
            let t = fitting_trace(&mut rng, &d).unwrap();
            assert!(d.accepts(&t) && t.len() <= MAX_TRACE_LEN + d.num_states());
            let u = nonfitting_trace(&mut rng, &d, &alphabet).unwrap();
            assert!(!d.accepts(&u));
        }
    }

    #[test]
    fn instances_are_reproducible() {
        for p in super::super::ALL {
            let a = instance(p, 7, 3).map(|i| i.to_text());
            let b = instance(p, 7, 3).map(|i| i.to_text());
            assert_eq!(a, b, "{p}");
            assert!(a.is_some(), "{p}");
        }
    }
}
