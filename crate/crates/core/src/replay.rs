//! Token-based replay with an explicit tie-breaking policy.
//!
//! Fitting traces are replayed along a shortest accepting run (no missing or
//! remaining tokens). Other traces use a greedy heuristic: fire an enabled
//! transition with the event's label, else the shortest silent path that
//! enables one, else force-fire the candidate missing the fewest tokens.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::eventlog::{EventLog, Trace};
use crate::procmodel::{Marking, MeasureValue, Model, Net, NetHandle, ReachGraph};

/// Maximum number of silent firings explored when looking for an enabling path.
pub const SILENT_DEPTH: usize = 8;

/// Selects a total order over transitions used for every tie-break.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ReplayPolicy {
    pub seed: u64,
}

impl ReplayPolicy {
    pub fn new(seed: u64) -> Self {
        ReplayPolicy { seed }
    }

    /// `rank[t]`: position of transition `t` in the policy order. Seed 0 is
    /// declaration order.
    pub fn rank(&self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        if self.seed != 0 {
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
        }
        let mut rank = vec![0; n];
        for (i, t) in order.into_iter().enumerate() {
            rank[t] = i;
        }
        rank
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TokenCounts {
    pub produced: u64,
    pub consumed: u64,
    pub missing: u64,
    pub remaining: u64,
}

impl TokenCounts {
    pub fn add_scaled(&mut self, o: &TokenCounts, k: u64) {
        self.produced += o.produced * k;
        self.consumed += o.consumed * k;
        self.missing += o.missing * k;
        self.remaining += o.remaining * k;
    }

    /// ½(1 − m/c) + ½(1 − r/p)
    pub fn fitness(&self) -> f64 {
        let a = if self.consumed == 0 { 1.0 } else { 1.0 - self.missing as f64 / self.consumed as f64 };
        let b = if self.produced == 0 { 1.0 } else { 1.0 - self.remaining as f64 / self.produced as f64 };
        0.5 * a + 0.5 * b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Enabled directly or after a silent path.
    Enabled,
    /// Force-fired with missing tokens.
    Forced,
    /// Label not present in the net.
    Unknown,
}

#[derive(Debug, Clone)]
pub struct Step {
    /// Visible transitions enabled in the silent closure of the marking
    /// reached after the previous event.
    pub enabled_visible: Vec<usize>,
    pub kind: StepKind,
    pub fired: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ReplayTrace {
    pub fitting: bool,
    pub counts: TokenCounts,
    pub steps: Vec<Step>,
    /// Every transition fired, silent ones included.
    pub firings: Vec<usize>,
}

impl ReplayTrace {
    /// Line-oriented debug dump.
    pub fn dump(&self, net: &Net) -> String {
        let mut s = String::new();
        let name = |t: usize| net.transitions()[t].id.clone();
        let fired: Vec<String> = self.firings.iter().map(|&t| name(t)).collect();
        let _ = writeln!(s, "fitting: {}", self.fitting);
        let _ = writeln!(s, "fired: {}", fired.join(" "));
        for (i, st) in self.steps.iter().enumerate() {
            let en: Vec<String> = st.enabled_visible.iter().map(|&t| name(t)).collect();
            let _ = writeln!(s, "event {i}: {:?} {} enabled [{}]", st.kind, st.fired.map(name).unwrap_or_default(), en.join(" "));
        }
        let c = &self.counts;
        let _ = writeln!(s, "p={} c={} m={} r={}", c.produced, c.consumed, c.missing, c.remaining);
        s
    }
}

/// Replays traces on one net under one policy.
pub struct Replayer<'a> {
    net: &'a Net,
    rg: std::sync::Arc<ReachGraph>,
    rank: Vec<usize>,
    by_label: HashMap<&'a str, Vec<usize>>,
    silent: Vec<usize>,
}

impl<'a> Replayer<'a> {
    pub fn new(h: &'a NetHandle, policy: ReplayPolicy) -> Result<Self> {
        let net = h.net();
        let rg = h.reach_graph()?;
        let rank = policy.rank(net.transitions().len());
        let mut by_label: HashMap<&str, Vec<usize>> = HashMap::new();
        let mut silent = Vec::new();
        let mut order: Vec<usize> = (0..net.transitions().len()).collect();
        order.sort_by_key(|&t| rank[t]);
        for &t in &order {
            match net.transitions()[t].label.as_deref() {
                Some(a) => by_label.entry(a).or_default().push(t),
                None => silent.push(t),
            }
        }
        Ok(Replayer { net, rg, rank, by_label, silent })
    }

    pub fn net(&self) -> &Net {
        self.net
    }

    pub fn rank(&self) -> &[usize] {
        &self.rank
    }

    /// Shortest silent firing sequence (≤ depth) from `m` to a marking
    /// satisfying `goal`, exploring transitions in policy order.
    fn silent_search<F>(&self, m: &Marking, goal: F) -> Option<(Vec<usize>, Marking)>
    where
        F: Fn(&Marking) -> bool,
    {
        if goal(m) {
            return Some((Vec::new(), m.clone()));
        }
        let mut seen: HashSet<Marking> = HashSet::from([m.clone()]);
        let mut queue = VecDeque::from([(m.clone(), Vec::new())]);
        while let Some((cur, path)) = queue.pop_front() {
            if path.len() >= SILENT_DEPTH {
                continue;
            }
            for &t in &self.silent {
                if !self.net.is_enabled(&cur, t) {
                    continue;
                }
                let next = self.net.fire(&cur, t);
                if !seen.insert(next.clone()) {
                    continue;
                }
                let mut p = path.clone();
                p.push(t);
                if goal(&next) {
                    return Some((p, next));
                }
                queue.push_back((next, p));
            }
        }
        None
    }

    /// Visible transitions enabled at some marking reachable from `m` by at
    /// most `SILENT_DEPTH` silent firings. Sorted by transition index.
    pub fn closure_visible(&self, m: &Marking) -> Vec<usize> {
        let mut out: Vec<bool> = vec![false; self.net.transitions().len()];
        let mut seen: HashSet<Marking> = HashSet::from([m.clone()]);
        let mut layer = vec![m.clone()];
        for depth in 0..=SILENT_DEPTH {
            let mut next_layer = Vec::new();
            for cur in &layer {
                for t in self.net.enabled(cur) {
                    if self.net.transitions()[t].label.is_some() {
                        out[t] = true;
                    } else if depth < SILENT_DEPTH {
                        let n = self.net.fire(cur, t);
                        if seen.insert(n.clone()) {
                            next_layer.push(n);
                        }
                    }
                }
            }
            if next_layer.is_empty() {
                break;
            }
            layer = next_layer;
        }
        (0..out.len()).filter(|&t| out[t]).collect()
    }

    /// Shortest accepting run whose visible labels spell `t`, breadth-first
    /// over (state, position) with transitions in policy order.
    pub fn accepting_run(&self, t: &Trace) -> Option<Vec<usize>> {
        let rg = &self.rg;
        let final_state = rg.state_of(self.net.final_marking())?;
        let n = t.len();
        let key = |s: usize, i: usize| s * (n + 1) + i;
        let mut prev: HashMap<usize, (usize, usize)> = HashMap::new();
        let start = key(0, 0);
        let goal = key(final_state, n);
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        let mut seen = HashSet::from([start]);
        let mut found = start == goal;
        while let (false, Some((s, i))) = (found, queue.pop_front()) {
            let mut out = rg.edges[s].clone();
            out.sort_by_key(|&(tr, _)| self.rank[tr]);
            for (tr, s2) in out {
                let i2 = match self.net.transitions()[tr].label.as_deref() {
                    None => i,
                    Some(a) if i < n && t.0[i] == a => i + 1,
                    _ => continue,
                };
                let k = key(s2, i2);
                if seen.insert(k) {
                    prev.insert(k, (key(s, i), tr));
                    if k == goal {
                        found = true;
                        break;
                    }
                    queue.push_back((s2, i2));
                }
            }
        }
        if !found {
            return None;
        }
        let mut run = Vec::new();
        let mut cur = goal;
        while cur != start {
            let (p, tr) = prev[&cur];
            run.push(tr);
            cur = p;
        }
        run.reverse();
        Some(run)
    }

    pub fn replay(&self, t: &Trace) -> ReplayTrace {
        match self.accepting_run(t) {
            Some(run) => self.replay_run(&run),
            None => self.replay_heuristic(t),
        }
    }

    fn replay_run(&self, run: &[usize]) -> ReplayTrace {
        let net = self.net;
        let mut m = net.initial().clone();
        let mut counts = TokenCounts { produced: m.tokens(), ..Default::default() };
        let mut steps = Vec::new();
        let mut pending = Some(self.closure_visible(&m));
        for &tr in run {
            let trn = &net.transitions()[tr];
            if trn.label.is_some() {
                let enabled_visible = pending.take().unwrap_or_else(|| self.closure_visible(&m));
                steps.push(Step { enabled_visible, kind: StepKind::Enabled, fired: Some(tr) });
            }
            counts.consumed += trn.pre.len() as u64;
            counts.produced += trn.post.len() as u64;
            m = net.fire(&m, tr);
            if trn.label.is_some() {
                pending = Some(self.closure_visible(&m));
            }
        }
        counts.consumed += net.final_marking().tokens();
        ReplayTrace { fitting: true, counts, steps, firings: run.to_vec() }
    }

    fn replay_heuristic(&self, t: &Trace) -> ReplayTrace {
        let net = self.net;
        let mut m = net.initial().clone();
        let mut counts = TokenCounts { produced: m.tokens(), ..Default::default() };
        let mut steps = Vec::new();
        let mut firings = Vec::new();
        let fire = |m: &mut Marking, tr: usize, counts: &mut TokenCounts, firings: &mut Vec<usize>| {
            let trn = &net.transitions()[tr];
            counts.consumed += trn.pre.len() as u64;
            counts.produced += trn.post.len() as u64;
            counts.missing += net.force_fire(m, tr);
            firings.push(tr);
        };
        for a in t.iter() {
            let enabled_visible = self.closure_visible(&m);
            let Some(cands) = self.by_label.get(a.as_str()) else {
                counts.consumed += 1;
                counts.missing += 1;
                counts.produced += 1;
                counts.remaining += 1;
                steps.push(Step { enabled_visible, kind: StepKind::Unknown, fired: None });
                continue;
            };
            let pick = |m: &Marking| cands.iter().copied().find(|&c| net.is_enabled(m, c));
            let (kind, tr) = match self.silent_search(&m, |x| pick(x).is_some()) {
                Some((path, _)) => {
                    for s in path {
                        fire(&mut m, s, &mut counts, &mut firings);
                    }
                    (StepKind::Enabled, pick(&m).expect("goal marking enables a candidate"))
                }
                None => {
                    let missing = |c: usize| net.transitions()[c].pre.iter().filter(|&&p| m.0[p] == 0).count();
                    let best = cands.iter().copied().min_by_key(|&c| (missing(c), self.rank[c])).expect("non-empty");
                    (StepKind::Forced, best)
                }
            };
            fire(&mut m, tr, &mut counts, &mut firings);
            steps.push(Step { enabled_visible, kind, fired: Some(tr) });
        }
        let fin = net.final_marking();
        if let Some((path, _)) = self.silent_search(&m, |x| x == fin) {
            for s in path {
                fire(&mut m, s, &mut counts, &mut firings);
            }
        }
        for (p, &need) in fin.0.iter().enumerate() {
            let have = m.0[p];
            counts.consumed += need as u64;
            if have < need {
                counts.missing += (need - have) as u64;
                m.0[p] = 0;
            } else {
                m.0[p] -= need;
            }
        }
        counts.remaining += m.tokens();
        ReplayTrace { fitting: false, counts, steps, firings }
    }
}

/// Token counts of one trace.
pub fn token_replay(h: &NetHandle, t: &Trace, policy: ReplayPolicy) -> Result<TokenCounts> {
    Ok(Replayer::new(h, policy)?.replay(t).counts)
}

/// Global counters over all cases.
pub fn log_counts(l: &EventLog, h: &NetHandle, policy: ReplayPolicy) -> Result<TokenCounts> {
    let r = Replayer::new(h, policy)?;
    let mut total = TokenCounts::default();
    for (t, n) in l.iter() {
        total.add_scaled(&r.replay(t).counts, n);
    }
    Ok(total)
}

pub fn rec_b(l: &EventLog, m: &Model, policy: ReplayPolicy) -> Result<MeasureValue> {
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let h = m.net_handle()?;
    Ok(MeasureValue::Value(log_counts(l, &h, policy)?.fitness()))
}

/// Simple behavioral appropriateness.
pub fn prec_i(l: &EventLog, m: &Model, policy: ReplayPolicy) -> Result<MeasureValue> {
    let h = m.net_handle()?;
    let tv = h.net().visible_count();
    if tv < 2 {
        return Ok(MeasureValue::undefined("fewer than two visible transitions"));
    }
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let r = Replayer::new(&h, policy)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, n) in l.iter() {
        let rt = r.replay(t);
        let x = if rt.steps.is_empty() {
            r.closure_visible(h.net().initial()).len().max(1) as f64
        } else {
            let s: usize = rt.steps.iter().map(|s| s.enabled_visible.len().max(1)).sum();
            s as f64 / rt.steps.len() as f64
        };
        num += n as f64 * (tv as f64 - x);
        den += n as f64 * (tv as f64 - 1.0);
    }
    Ok(MeasureValue::Value(num / den))
}
