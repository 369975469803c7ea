//! Optimal alignments over the synchronous product of a trace and a net's
//! reachability graph, and the measures built on them.
//!
//! Costs: log move 1, visible model move 1, silent model move 0, synchronous 0.
//! Distances are computed forward and backward with Dijkstra over
//! `(cost, moves)` pairs, so an edge lies on an optimal alignment iff
//! `d_fwd(u) + c + d_bwd(v) = C`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::eventlog::{Activity, EventLog, Trace};
use crate::procmodel::{MeasureValue, Model, Net, NetHandle, ReachGraph};
use crate::replay::{ReplayPolicy, Replayer};

/// Cap on distinct optimal model projections per trace.
pub const PROJECTION_CAP: usize = 1000;
/// Number of projections kept by the `rep` variant.
pub const REP_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Sync,
    Log,
    Model,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    /// `None` only for silent model moves.
    pub label: Option<Activity>,
    pub transition: Option<usize>,
}

impl Move {
    pub fn cost(&self) -> u64 {
        match (self.kind, &self.label) {
            (MoveKind::Sync, _) | (MoveKind::Model, None) => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub moves: Vec<Move>,
    pub cost: u64,
}

impl Alignment {
    pub fn log_projection(&self) -> Trace {
        Trace(self.moves.iter().filter(|m| m.kind != MoveKind::Model).filter_map(|m| m.label.clone()).collect())
    }

    pub fn model_projection(&self) -> Trace {
        Trace(self.moves.iter().filter(|m| m.kind != MoveKind::Log).filter_map(|m| m.label.clone()).collect())
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.moves {
            let l = m.label.as_deref().unwrap_or("~");
            match m.kind {
                MoveKind::Sync => writeln!(f, "sync {l}")?,
                MoveKind::Log => writeln!(f, "log {l}")?,
                MoveKind::Model => writeln!(f, "model {l}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    One,
    Rep,
    All,
}

type Dist = (u64, u64);
const INF: Dist = (u64::MAX, u64::MAX);

struct Product {
    goal: usize,
    /// Edges `(target, cost, move index)`, in canonical order.
    out: Vec<Vec<(usize, u64, usize)>>,
    moves: Vec<Move>,
    fwd: Vec<Dist>,
    bwd: Vec<Dist>,
}

impl Product {
    fn build(net: &Net, rg: &ReachGraph, t: &Trace) -> Result<Product> {
        let fin = rg
            .state_of(net.final_marking())
            .ok_or_else(|| Error::Invalid("final marking unreachable: empty model language".into()))?;
        let width = t.len() + 1;
        let n = rg.len() * width;
        let mut out: Vec<Vec<(usize, u64, usize)>> = vec![Vec::new(); n];
        let mut rev: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
        let mut moves = Vec::new();
        for s in 0..rg.len() {
            for i in 0..width {
                let u = s * width + i;
                let mut push = |v: usize, m: Move| {
                    let c = m.cost();
                    out[u].push((v, c, moves.len()));
                    rev[v].push((u, c));
                    moves.push(m);
                };
                // Canonical order: synchronous, model (by transition), log.
                if i < t.len() {
                    for &(tr, s2) in &rg.edges[s] {
                        if net.transitions()[tr].label.as_deref() == Some(t.0[i].as_str()) {
                            push(s2 * width + i + 1, Move { kind: MoveKind::Sync, label: Some(t.0[i].clone()), transition: Some(tr) });
                        }
                    }
                }
                for &(tr, s2) in &rg.edges[s] {
                    push(s2 * width + i, Move { kind: MoveKind::Model, label: net.transitions()[tr].label.clone(), transition: Some(tr) });
                }
                if i < t.len() {
                    push(u + 1, Move { kind: MoveKind::Log, label: Some(t.0[i].clone()), transition: None });
                }
            }
        }
        let goal = fin * width + t.len();
        let fwd = dijkstra(n, 0, |u| out[u].iter().map(|&(v, c, _)| (v, c)).collect());
        if fwd[goal] == INF {
            return Err(Error::Invalid("no alignment reaches the final marking".into()));
        }
        let bwd = dijkstra(n, goal, |u| rev[u].clone());
        Ok(Product { goal, out, moves, fwd, bwd })
    }

    fn cost(&self) -> u64 {
        self.fwd[self.goal].0
    }

    /// First optimal alignment in canonical edge order.
    fn canonical(&self) -> Alignment {
        let target = self.fwd[self.goal];
        let mut u = 0;
        let mut moves = Vec::new();
        while u != self.goal {
            let &(v, _, mi) = self.out[u]
                .iter()
                .find(|&&(v, c, _)| {
                    let (fc, fs) = self.fwd[u];
                    let (bc, bs) = self.bwd[v];
                    bc != u64::MAX && (fc + c + bc, fs + 1 + bs) == target
                })
                .expect("an optimal edge leaves every state on an optimal path");
            moves.push(self.moves[mi].clone());
            u = v;
        }
        Alignment { moves, cost: target.0 }
    }

    fn optimal(&self, u: usize, c: u64, v: usize) -> bool {
        let bc = self.bwd[v].0;
        bc != u64::MAX && self.fwd[u].0 != u64::MAX && self.fwd[u].0 + c + bc == self.cost()
    }

    /// Smallest optimal model projection in trace order, without enumerating
    /// the others: extend a frontier of product states label by label.
    fn least_projection(&self) -> Trace {
        let closure = |start: Vec<usize>| -> BTreeSet<usize> {
            let mut set: BTreeSet<usize> = start.iter().copied().collect();
            let mut stack = start;
            while let Some(u) = stack.pop() {
                for &(v, c, mi) in &self.out[u] {
                    let m = &self.moves[mi];
                    let silent = m.kind == MoveKind::Log || m.label.is_none();
                    if silent && self.optimal(u, c, v) && set.insert(v) {
                        stack.push(v);
                    }
                }
            }
            set
        };
        let mut frontier = closure(vec![0]);
        let mut word = Vec::new();
        while !frontier.contains(&self.goal) {
            let mut best: Option<&Activity> = None;
            let mut next = Vec::new();
            for &u in &frontier {
                for &(v, c, mi) in &self.out[u] {
                    let m = &self.moves[mi];
                    let (MoveKind::Sync | MoveKind::Model, Some(a)) = (m.kind, &m.label) else { continue };
                    if !self.optimal(u, c, v) {
                        continue;
                    }
                    if best.map_or(true, |b| a < b) {
                        best = Some(a);
                        next.clear();
                    }
                    if best == Some(a) {
                        next.push(v);
                    }
                }
            }
            word.push(best.expect("frontier states lie on optimal paths").clone());
            frontier = closure(next);
        }
        Trace(word)
    }

    /// Distinct visible model projections over all cost-optimal alignments, sorted.
    fn projections(&self, cap: usize) -> Result<Vec<Trace>> {
        let c_opt = self.cost();
        let mut found: BTreeSet<Vec<Activity>> = BTreeSet::new();
        let mut seen: HashSet<(usize, Vec<Activity>)> = HashSet::new();
        let mut stack = vec![(0usize, Vec::<Activity>::new())];
        seen.insert((0, Vec::new()));
        while let Some((u, prefix)) = stack.pop() {
            if u == self.goal {
                found.insert(prefix.clone());
                if found.len() > cap {
                    return Err(Error::Resource(format!("more than {cap} optimal alignments")));
                }
            }
            for &(v, c, mi) in &self.out[u] {
                let bc = self.bwd[v].0;
                if bc == u64::MAX || self.fwd[u].0 + c + bc != c_opt {
                    continue;
                }
                let m = &self.moves[mi];
                let mut p = prefix.clone();
                if m.kind != MoveKind::Log {
                    if let Some(a) = &m.label {
                        p.push(a.clone());
                    }
                }
                if seen.insert((v, p.clone())) {
                    stack.push((v, p));
                }
            }
        }
        Ok(found.into_iter().map(Trace).collect())
    }
}

fn dijkstra<F>(n: usize, src: usize, adj: F) -> Vec<Dist>
where
    F: Fn(usize) -> Vec<(usize, u64)>,
{
    let mut dist = vec![INF; n];
    dist[src] = (0, 0);
    let mut heap = BinaryHeap::from([Reverse(((0u64, 0u64), src))]);
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for (v, c) in adj(u) {
            let nd = (d.0 + c, d.1 + 1);
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Aligns traces against one net.
pub struct Aligner<'a> {
    h: &'a NetHandle,
    rg: Arc<ReachGraph>,
}

impl<'a> Aligner<'a> {
    pub fn new(h: &'a NetHandle) -> Result<Self> {
        Ok(Aligner { h, rg: h.reach_graph()? })
    }

    pub fn cost(&self, t: &Trace) -> Result<u64> {
        Ok(Product::build(self.h.net(), &self.rg, t)?.cost())
    }

    /// The canonical optimal alignment.
    pub fn align(&self, t: &Trace) -> Result<Alignment> {
        Ok(Product::build(self.h.net(), &self.rg, t)?.canonical())
    }

    /// Every distinct optimal model projection (sorted), capped.
    pub fn projections(&self, t: &Trace) -> Result<Vec<Trace>> {
        Product::build(self.h.net(), &self.rg, t)?.projections(PROJECTION_CAP)
    }

    /// First element of `projections`, found without enumeration.
    pub fn least_projection(&self, t: &Trace) -> Result<Trace> {
        Ok(Product::build(self.h.net(), &self.rg, t)?.least_projection())
    }

    /// Cheapest visible cost of any accepting run.
    pub fn move_model_cost(&self) -> Result<u64> {
        let net = self.h.net();
        let fin = self
            .rg
            .state_of(net.final_marking())
            .ok_or_else(|| Error::Invalid("final marking unreachable: empty model language".into()))?;
        let d = dijkstra(self.rg.len(), 0, |u| {
            self.rg.edges[u].iter().map(|&(t, v)| (v, net.transitions()[t].label.is_some() as u64)).collect()
        });
        Ok(d[fin].0)
    }
}

pub fn optimal_alignment(h: &NetHandle, t: &Trace) -> Result<Alignment> {
    Aligner::new(h)?.align(t)
}

fn fnv(seed: u64, t: &Trace) -> u64 {
    let mut x: u64 = 0xcbf2_9ce4_8422_2325 ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for a in t.iter() {
        for b in a.bytes().chain([0xff]) {
            x ^= b as u64;
            x = x.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    x
}

/// Projections chosen for one trace with their weight shares. `One` under
/// seed 0 takes the smallest projection; other seeds hash into the sorted set.
pub fn aligned_projections(al: &Aligner, fits: bool, t: &Trace, variant: Variant, policy: ReplayPolicy) -> Result<Vec<(Trace, f64)>> {
    if fits {
        return Ok(vec![(t.clone(), 1.0)]);
    }
    if variant == Variant::One && policy.seed == 0 {
        return Ok(vec![(al.least_projection(t)?, 1.0)]);
    }
    let mut ps = al.projections(t)?;
    match variant {
        Variant::One => {
            let i = (fnv(policy.seed, t) % ps.len() as u64) as usize;
            Ok(vec![(ps.swap_remove(i), 1.0)])
        }
        Variant::Rep | Variant::All => {
            if variant == Variant::Rep {
                ps.truncate(REP_SIZE);
            }
            let w = 1.0 / ps.len() as f64;
            Ok(ps.into_iter().map(|p| (p, w)).collect())
        }
    }
}

/// Aligned log as weighted model traces, merged by trace.
pub fn align_log(l: &EventLog, m: &Model, variant: Variant, policy: ReplayPolicy) -> Result<BTreeMap<Trace, f64>> {
    let h = m.net_handle()?;
    let al = Aligner::new(&h)?;
    let mut out = BTreeMap::new();
    for (t, n) in l.iter() {
        for (p, w) in aligned_projections(&al, m.fits(t)?, t, variant, policy)? {
            *out.entry(p).or_insert(0.0) += w * n as f64;
        }
    }
    Ok(out)
}

pub fn rec_c(l: &EventLog, m: &Model) -> Result<MeasureValue> {
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let h = m.net_handle()?;
    let al = Aligner::new(&h)?;
    let mut fcost = 0u64;
    let mut move_l = 0u64;
    for (t, n) in l.iter() {
        fcost += n * al.cost(t)?;
        move_l += n * t.len() as u64;
    }
    let den = move_l + l.size() * al.move_model_cost()?;
    if den == 0 {
        return Ok(MeasureValue::undefined("zero worst-case cost"));
    }
    Ok(MeasureValue::Value(1.0 - fcost as f64 / den as f64))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EtcState {
    pub weight: f64,
    pub allowed: BTreeSet<usize>,
    pub used: BTreeSet<usize>,
}

/// Prefix automaton of an aligned log with escaping-edge bookkeeping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EtcAutomaton {
    pub states: BTreeMap<Vec<Activity>, EtcState>,
}

impl EtcAutomaton {
    pub fn build(aligned: &BTreeMap<Trace, f64>, h: &NetHandle) -> Result<EtcAutomaton> {
        let r = Replayer::new(h, ReplayPolicy::default())?;
        let net = h.net();
        let mut auto = EtcAutomaton::default();
        for (t, &w) in aligned {
            let run = r
                .accepting_run(t)
                .ok_or_else(|| Error::Invalid(format!("aligned trace `{t}` is not a model run")))?;
            let mut m = net.initial().clone();
            let mut prefix: Vec<Activity> = Vec::new();
            let mut visit = |prefix: &[Activity], m: &crate::procmodel::Marking, next: Option<usize>| {
                let st = auto.states.entry(prefix.to_vec()).or_default();
                st.weight += w;
                st.allowed.extend(r.closure_visible(m));
                if let Some(tr) = next {
                    st.used.insert(tr);
                    st.allowed.insert(tr);
                }
            };
            let mut at = m.clone();
            for &tr in &run {
                if let Some(a) = &net.transitions()[tr].label {
                    visit(&prefix, &at, Some(tr));
                    prefix.push(a.clone());
                    m = net.fire(&m, tr);
                    at = m.clone();
                } else {
                    m = net.fire(&m, tr);
                }
            }
            visit(&prefix, &at, None);
        }
        Ok(auto)
    }

    /// Σ w·|used| / Σ w·|allowed|; 1 when nothing is allowed anywhere.
    pub fn precision(&self) -> f64 {
        let (mut u, mut a) = (0.0, 0.0);
        for s in self.states.values() {
            u += s.weight * s.used.len() as f64;
            a += s.weight * s.allowed.len() as f64;
        }
        if a == 0.0 {
            1.0
        } else {
            u / a
        }
    }

    pub fn dump(&self, net: &Net) -> String {
        let mut s = String::new();
        let names = |set: &BTreeSet<usize>| set.iter().map(|&t| net.transitions()[t].id.clone()).collect::<Vec<_>>().join(" ");
        for (p, st) in &self.states {
            let _ = writeln!(s, "<{}> w={} used [{}] allowed [{}]", p.join(","), st.weight, names(&st.used), names(&st.allowed));
        }
        s
    }
}

/// ETC precision: `One`/`Rep` give prec_K, `All` gives prec_L.
pub fn etc_precision(l: &EventLog, m: &Model, variant: Variant, policy: ReplayPolicy) -> Result<MeasureValue> {
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let aligned = align_log(l, m, variant, policy)?;
    let h = m.net_handle()?;
    Ok(MeasureValue::Value(EtcAutomaton::build(&aligned, &h)?.precision()))
}

/// Probability that the next visit of a state shows new behavior.
pub fn pnew(w: u64, n: u64) -> f64 {
    if n < 2 {
        return 1.0;
    }
    let (w, n) = (w as f64, n as f64);
    (w * (w + 1.0) / (n * (n - 1.0))).min(1.0)
}

/// Alignment generalization. The state of an event is the state of the
/// minimal automaton of τ(m) after the aligned prefix.
pub fn gen_s(l: &EventLog, m: &Model) -> Result<MeasureValue> {
    let aligned = align_log(l, m, Variant::One, ReplayPolicy::default())?;
    let d = m.dfa()?;
    let mut visits: BTreeMap<usize, (u64, BTreeSet<Activity>)> = BTreeMap::new();
    let mut events = 0u64;
    for (t, w) in &aligned {
        let n = w.round() as u64;
        let mut s = d.initial();
        for a in t.iter() {
            let e = visits.entry(s).or_default();
            e.0 += n;
            e.1.insert(a.clone());
            events += n;
            s = d.step_label(s, a).ok_or_else(|| Error::Invalid(format!("aligned trace `{t}` left the model language")))?;
        }
    }
    if events == 0 {
        return Ok(MeasureValue::undefined("no events"));
    }
    let missing: f64 = visits.values().map(|(n, ws)| *n as f64 * pnew(ws.len() as u64, *n)).sum();
    Ok(MeasureValue::Value(1.0 - missing / events as f64))
}
