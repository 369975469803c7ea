//! Labeled Petri nets, model languages and the trace-level baseline measures.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::sync::{Arc, OnceLock};

use crate::automata::{Dfa, Nfa};
use crate::error::{Error, Result};
use crate::eventlog::{is_activity, Activity, EventLog, Trace};

pub const DEFAULT_STATE_CAP: usize = 100_000;
pub const STATE_CAP_ENV: &str = "CONFPROP_STATE_CAP";

/// Reachability cap, overridable through `CONFPROP_STATE_CAP`.
pub fn default_state_cap() -> usize {
    std::env::var(STATE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or(DEFAULT_STATE_CAP)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureValue {
    Value(f64),
    Undefined(String),
}

impl MeasureValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            MeasureValue::Value(v) => Some(*v),
            MeasureValue::Undefined(_) => None,
        }
    }

    pub fn undefined(reason: impl Into<String>) -> Self {
        MeasureValue::Undefined(reason.into())
    }

    /// `num / den`, undefined when `den` is zero.
    pub fn ratio(num: f64, den: f64, reason: &str) -> Self {
        if den == 0.0 {
            MeasureValue::Undefined(reason.into())
        } else {
            MeasureValue::Value(num / den)
        }
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Value(v) => write!(f, "{}", format_value(*v)),
            MeasureValue::Undefined(r) => write!(f, "undefined({r})"),
        }
    }
}

/// Six decimals. Formatting rounds the exact binary value, ties to even.
pub fn format_value(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" { "0.000000".into() } else { s }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(pub Vec<u32>);

impl Marking {
    pub fn tokens(&self) -> u64 {
        self.0.iter().map(|&n| n as u64).sum()
    }

    pub fn covers(&self, other: &Marking) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    /// `None` for silent transitions.
    pub label: Option<Activity>,
    pub pre: Vec<usize>,
    pub post: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    places: Vec<String>,
    transitions: Vec<Transition>,
    initial: Marking,
    final_marking: Marking,
}

impl Net {
    pub fn new() -> Net {
        Net { places: Vec::new(), transitions: Vec::new(), initial: Marking(Vec::new()), final_marking: Marking(Vec::new()) }
    }

    /// Builds a net from raw parts; arcs must reference existing places.
    pub fn from_parts(places: Vec<String>, transitions: Vec<Transition>, initial: Marking, final_marking: Marking) -> Result<Net> {
        let n = places.len();
        if initial.0.len() != n || final_marking.0.len() != n {
            return Err(Error::Invalid("marking length differs from the place count".into()));
        }
        if transitions.iter().flat_map(|t| t.pre.iter().chain(&t.post)).any(|&p| p >= n) {
            return Err(Error::Invalid("arc to an unknown place".into()));
        }
        let mut net = Net { places, transitions: Vec::new(), initial, final_marking };
        for t in transitions {
            net.push_transition(t);
        }
        Ok(net)
    }

    pub fn add_place(&mut self, name: &str) -> usize {
        if let Some(i) = self.place_index(name) {
            return i;
        }
        self.places.push(name.to_string());
        self.initial.0.push(0);
        self.final_marking.0.push(0);
        self.places.len() - 1
    }

    /// Adds a transition; places are created on demand. `label = None` is silent.
    pub fn add_transition(&mut self, id: &str, label: Option<&str>, pre: &[&str], post: &[&str]) -> usize {
        let pre = pre.iter().map(|p| self.add_place(p)).collect();
        let post = post.iter().map(|p| self.add_place(p)).collect();
        self.push_transition(Transition { id: id.to_string(), label: label.map(str::to_string), pre, post })
    }

    pub(crate) fn push_transition(&mut self, mut t: Transition) -> usize {
        t.pre.sort_unstable();
        t.pre.dedup();
        t.post.sort_unstable();
        t.post.dedup();
        self.transitions.push(t);
        self.transitions.len() - 1
    }

    pub fn set_initial(&mut self, places: &[&str]) {
        let m = self.marking_of(places);
        self.initial = m;
    }

    pub fn set_final(&mut self, places: &[&str]) {
        let m = self.marking_of(places);
        self.final_marking = m;
    }

    pub fn marking_of(&mut self, places: &[&str]) -> Marking {
        let idx: Vec<usize> = places.iter().map(|p| self.add_place(p)).collect();
        let mut m = vec![0; self.places.len()];
        for i in idx {
            m[i] += 1;
        }
        Marking(m)
    }

    pub fn place_index(&self, name: &str) -> Option<usize> {
        self.places.iter().position(|p| p == name)
    }

    pub fn transition_index(&self, id: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.id == id)
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transitions_mut(&mut self) -> &mut [Transition] {
        &mut self.transitions
    }

    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    pub fn final_marking(&self) -> &Marking {
        &self.final_marking
    }

    pub fn alphabet(&self) -> BTreeSet<Activity> {
        self.transitions.iter().filter_map(|t| t.label.clone()).collect()
    }

    pub fn visible_count(&self) -> usize {
        self.transitions.iter().filter(|t| t.label.is_some()).count()
    }

    pub fn is_enabled(&self, m: &Marking, t: usize) -> bool {
        self.transitions[t].pre.iter().all(|&p| m.0[p] > 0)
    }

    pub fn enabled(&self, m: &Marking) -> Vec<usize> {
        (0..self.transitions.len()).filter(|&t| self.is_enabled(m, t)).collect()
    }

    /// Fires an enabled transition.
    pub fn fire(&self, m: &Marking, t: usize) -> Marking {
        let mut out = m.clone();
        let tr = &self.transitions[t];
        for &p in &tr.pre {
            out.0[p] -= 1;
        }
        for &p in &tr.post {
            out.0[p] += 1;
        }
        out
    }

    /// Fires `t`, creating missing input tokens. Returns the number created.
    pub fn force_fire(&self, m: &mut Marking, t: usize) -> u64 {
        let tr = &self.transitions[t];
        let mut missing = 0;
        for &p in &tr.pre {
            if m.0[p] == 0 {
                missing += 1;
            } else {
                m.0[p] -= 1;
            }
        }
        for &p in &tr.post {
            m.0[p] += 1;
        }
        missing
    }

    pub fn parse(src: &str) -> Result<Net> {
        #[derive(PartialEq)]
        enum Sec {
            None,
            Places,
            Transitions,
            Arcs,
            Initial,
            Final,
        }
        let mut sec = Sec::None;
        let mut places: Vec<(usize, String)> = Vec::new();
        let mut trans: Vec<(usize, String, Option<String>)> = Vec::new();
        let mut arcs: Vec<(usize, String, String)> = Vec::new();
        let mut initial: Option<Vec<(usize, String)>> = None;
        let mut final_: Option<Vec<(usize, String)>> = None;
        for (i, raw) in src.lines().enumerate() {
            let lineno = i + 1;
            let mut line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((head, rest)) = line.split_once(':') {
                sec = match head.trim() {
                    "places" => Sec::Places,
                    "transitions" => Sec::Transitions,
                    "arcs" => Sec::Arcs,
                    "initial" => {
                        initial.get_or_insert_with(Vec::new);
                        Sec::Initial
                    }
                    "final" => {
                        final_.get_or_insert_with(Vec::new);
                        Sec::Final
                    }
                    other => return Err(Error::parse(lineno, format!("unknown section `{other}`"))),
                };
                line = rest.trim();
                if line.is_empty() {
                    continue;
                }
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match sec {
                Sec::None => return Err(Error::parse(lineno, "content before any section")),
                Sec::Places => places.extend(toks.iter().map(|t| (lineno, t.to_string()))),
                Sec::Initial => initial.as_mut().unwrap().extend(toks.iter().map(|t| (lineno, t.to_string()))),
                Sec::Final => final_.as_mut().unwrap().extend(toks.iter().map(|t| (lineno, t.to_string()))),
                Sec::Transitions => {
                    let [id, label] = toks.as_slice() else {
                        return Err(Error::parse(lineno, "transition must be `id label` or `id ~`"));
                    };
                    let label = if *label == "~" {
                        None
                    } else if is_activity(label) {
                        Some(label.to_string())
                    } else {
                        return Err(Error::parse(lineno, format!("illegal activity `{label}`")));
                    };
                    trans.push((lineno, id.to_string(), label));
                }
                Sec::Arcs => {
                    let [a, "->", b] = toks.as_slice() else {
                        return Err(Error::parse(lineno, "arc must be `x -> y`"));
                    };
                    arcs.push((lineno, a.to_string(), b.to_string()));
                }
            }
        }
        let initial = initial.ok_or_else(|| Error::parse(0, "missing `initial:` section"))?;
        let final_ = final_.ok_or_else(|| Error::parse(0, "missing `final:` section"))?;

        let mut net = Net::new();
        for (lineno, p) in &places {
            if net.place_index(p).is_some() {
                return Err(Error::parse(*lineno, format!("duplicate place `{p}`")));
            }
            net.add_place(p);
        }
        let mut tindex: HashMap<String, usize> = HashMap::new();
        for (lineno, id, label) in trans {
            if tindex.contains_key(&id) || net.place_index(&id).is_some() {
                return Err(Error::parse(lineno, format!("duplicate node id `{id}`")));
            }
            tindex.insert(id.clone(), net.transitions.len());
            net.transitions.push(Transition { id, label, pre: Vec::new(), post: Vec::new() });
        }
        for (lineno, a, b) in arcs {
            match (net.place_index(&a), tindex.get(&b), tindex.get(&a), net.place_index(&b)) {
                (Some(p), Some(&t), _, _) => net.transitions[t].pre.push(p),
                (_, _, Some(&t), Some(p)) => net.transitions[t].post.push(p),
                _ => return Err(Error::parse(lineno, format!("arc `{a} -> {b}` references an unknown place or transition"))),
            }
        }
        for t in &mut net.transitions {
            t.pre.sort_unstable();
            t.pre.dedup();
            t.post.sort_unstable();
            t.post.dedup();
        }
        let mk = |net: &Net, list: &[(usize, String)]| -> Result<Marking> {
            let mut m = vec![0u32; net.places.len()];
            for (lineno, p) in list {
                let i = net.place_index(p).ok_or_else(|| Error::parse(*lineno, format!("unknown place `{p}`")))?;
                m[i] += 1;
            }
            Ok(Marking(m))
        };
        net.initial = mk(&net, &initial)?;
        net.final_marking = mk(&net, &final_)?;
        Ok(net)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "places: {}", self.places.join(" "));
        let _ = writeln!(s, "transitions:");
        for t in &self.transitions {
            let _ = writeln!(s, "{} {}", t.id, t.label.as_deref().unwrap_or("~"));
        }
        let _ = writeln!(s, "arcs:");
        for t in &self.transitions {
            for &p in &t.pre {
                let _ = writeln!(s, "{} -> {}", self.places[p], t.id);
            }
            for &p in &t.post {
                let _ = writeln!(s, "{} -> {}", t.id, self.places[p]);
            }
        }
        let list = |m: &Marking| -> String {
            let mut v = Vec::new();
            for (i, &n) in m.0.iter().enumerate() {
                for _ in 0..n {
                    v.push(self.places[i].as_str());
                }
            }
            v.join(" ")
        };
        let _ = writeln!(s, "initial: {}", list(&self.initial));
        let _ = writeln!(s, "final: {}", list(&self.final_marking));
        s
    }

    /// Net whose language is that of `d`: one place per state, one transition
    /// per edge and a silent transition from each accepting state to a sink.
    pub fn from_dfa(d: &Dfa) -> Net {
        let mut net = Net::new();
        for s in 0..d.num_states() {
            net.add_place(&format!("q{s}"));
        }
        let end = net.add_place("end");
        for (s, a, t) in d.edges() {
            let id = format!("t{}", net.transitions.len());
            net.push_transition(Transition { id, label: Some(d.alphabet()[a].clone()), pre: vec![s], post: vec![t] });
        }
        for s in 0..d.num_states() {
            if d.is_accepting(s) {
                let id = format!("t{}", net.transitions.len());
                net.push_transition(Transition { id, label: None, pre: vec![s], post: vec![end] });
            }
        }
        net.initial.0[d.initial()] = 1;
        net.final_marking.0[end] = 1;
        net
    }

    /// Prefix-tree net of a finite language.
    pub fn prefix_tree<'a, I: IntoIterator<Item = &'a Trace>>(traces: I) -> Net {
        let mut net = Net::new();
        net.add_place("n0");
        let end = net.add_place("end");
        let mut children: HashMap<(usize, Activity), usize> = HashMap::new();
        let mut accepting = BTreeSet::new();
        let mut sorted: Vec<&Trace> = traces.into_iter().collect();
        sorted.sort();
        sorted.dedup();
        for t in sorted {
            let mut cur = 0;
            for a in t.iter() {
                cur = match children.get(&(cur, a.clone())) {
                    Some(&n) => n,
                    None => {
                        let n = net.add_place(&format!("n{}", net.places.len() - 1));
                        let id = format!("t{}", net.transitions.len());
                        net.push_transition(Transition { id, label: Some(a.clone()), pre: vec![cur], post: vec![n] });
                        children.insert((cur, a.clone()), n);
                        n
                    }
                };
            }
            accepting.insert(cur);
        }
        for s in accepting {
            let id = format!("t{}", net.transitions.len());
            net.push_transition(Transition { id, label: None, pre: vec![s], post: vec![end] });
        }
        net.initial.0[0] = 1;
        net.final_marking.0[end] = 1;
        net
    }
}

impl Default for Net {
    fn default() -> Self {
        Net::new()
    }
}

/// Explicit state space of a bounded net.
#[derive(Debug, Clone)]
pub struct ReachGraph {
    pub markings: Vec<Marking>,
    /// Outgoing `(transition, target state)` per state, transitions in index order.
    pub edges: Vec<Vec<(usize, usize)>>,
    index: HashMap<Marking, usize>,
}

impl ReachGraph {
    pub fn build(net: &Net, cap: usize) -> Result<ReachGraph> {
        let mut markings = vec![net.initial.clone()];
        let mut parent: Vec<Option<usize>> = vec![None];
        let mut index = HashMap::new();
        index.insert(net.initial.clone(), 0);
        let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            let m = markings[s].clone();
            let mut out = Vec::new();
            for t in net.enabled(&m) {
                let m2 = net.fire(&m, t);
                let id = match index.get(&m2) {
                    Some(&id) => id,
                    None => {
                        let mut anc = Some(s);
                        while let Some(a) = anc {
                            if m2.covers(&markings[a]) && m2 != markings[a] {
                                let p = m2.0.iter().zip(&markings[a].0).position(|(x, y)| x > y).unwrap();
                                return Err(Error::Unbounded { place: net.places[p].clone() });
                            }
                            anc = parent[a];
                        }
                        if markings.len() >= cap {
                            return Err(Error::StateCap { cap });
                        }
                        let id = markings.len();
                        index.insert(m2.clone(), id);
                        markings.push(m2);
                        parent.push(Some(s));
                        queue.push_back(id);
                        id
                    }
                };
                out.push((t, id));
            }
            if edges.len() <= s {
                edges.resize(s + 1, Vec::new());
            }
            edges[s] = out;
        }
        edges.resize(markings.len(), Vec::new());
        Ok(ReachGraph { markings, edges, index })
    }

    pub fn state_of(&self, m: &Marking) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn len(&self) -> usize {
        self.markings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markings.is_empty()
    }
}

/// A net with its lazily built state space.
#[derive(Debug)]
pub struct NetHandle {
    net: Net,
    cap: usize,
    rg: OnceLock<Result<Arc<ReachGraph>>>,
}

impl NetHandle {
    pub fn new(net: Net, cap: usize) -> NetHandle {
        NetHandle { net, cap, rg: OnceLock::new() }
    }

    pub fn net(&self) -> &Net {
        &self.net
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn reach_graph(&self) -> Result<Arc<ReachGraph>> {
        self.rg.get_or_init(|| ReachGraph::build(&self.net, self.cap).map(Arc::new)).clone()
    }

    /// Minimal DFA of the visible language, optionally relabelling
    /// transitions outside `keep` as silent.
    pub fn dfa(&self, keep: Option<&BTreeSet<Activity>>) -> Result<Dfa> {
        let rg = self.reach_graph()?;
        let alphabet: Vec<Activity> = match keep {
            Some(k) => k.iter().cloned().collect(),
            None => self.net.alphabet().into_iter().collect(),
        };
        let mut nfa = Nfa::new(alphabet);
        for m in &rg.markings {
            nfa.add_state(*m == self.net.final_marking);
        }
        nfa.initial.push(0);
        for (s, out) in rg.edges.iter().enumerate() {
            for &(t, s2) in out {
                let sym = self.net.transitions[t].label.as_deref().and_then(|a| nfa.symbol(a));
                nfa.add_edge(s, sym, s2);
            }
        }
        Ok(nfa.determinize(self.cap)?.minimize())
    }
}

#[derive(Debug, Clone)]
pub enum ModelLanguage {
    FiniteSet(BTreeSet<Trace>),
    NetDerived(Arc<NetHandle>),
    Automaton(Dfa),
}

/// A model: its language plus cached automaton and net realizations.
#[derive(Debug, Clone)]
pub struct Model {
    lang: ModelLanguage,
    cap: usize,
    dfa: Arc<OnceLock<Result<Dfa>>>,
    handle: Arc<OnceLock<Arc<NetHandle>>>,
}

impl Model {
    pub fn new(lang: ModelLanguage) -> Model {
        let cap = match &lang {
            ModelLanguage::NetDerived(h) => h.cap,
            _ => default_state_cap(),
        };
        Model { lang, cap, dfa: Arc::default(), handle: Arc::default() }
    }

    pub fn from_net(net: Net) -> Model {
        Model::from_net_with_cap(net, default_state_cap())
    }

    pub fn from_net_with_cap(net: Net, cap: usize) -> Model {
        Model::new(ModelLanguage::NetDerived(Arc::new(NetHandle::new(net, cap))))
    }

    pub fn from_traces<'a, I: IntoIterator<Item = &'a Trace>>(traces: I) -> Model {
        Model::new(ModelLanguage::FiniteSet(traces.into_iter().cloned().collect()))
    }

    pub fn from_dfa(d: Dfa) -> Model {
        Model::new(ModelLanguage::Automaton(d))
    }

    pub fn language(&self) -> &ModelLanguage {
        &self.lang
    }

    /// Minimal DFA of τ(m).
    pub fn dfa(&self) -> Result<Dfa> {
        self.dfa
            .get_or_init(|| match &self.lang {
                ModelLanguage::FiniteSet(ts) => Ok(Dfa::from_traces(ts)),
                ModelLanguage::NetDerived(h) => h.dfa(None),
                ModelLanguage::Automaton(d) => Ok(d.minimize()),
            })
            .clone()
    }

    /// Net realization. Non-net models are translated (prefix tree for
    /// finite sets, one place per state for automata).
    pub fn net_handle(&self) -> Result<Arc<NetHandle>> {
        if let ModelLanguage::NetDerived(h) = &self.lang {
            return Ok(h.clone());
        }
        if let Some(h) = self.handle.get() {
            return Ok(h.clone());
        }
        let net = match &self.lang {
            ModelLanguage::FiniteSet(ts) => Net::prefix_tree(ts),
            _ => Net::from_dfa(&self.dfa()?),
        };
        Ok(self.handle.get_or_init(|| Arc::new(NetHandle::new(net, self.cap))).clone())
    }

    pub fn net(&self) -> Option<&Net> {
        match &self.lang {
            ModelLanguage::NetDerived(h) => Some(h.net()),
            _ => None,
        }
    }

    pub fn fits(&self, t: &Trace) -> Result<bool> {
        if let ModelLanguage::FiniteSet(ts) = &self.lang {
            return Ok(ts.contains(t));
        }
        Ok(self.dfa()?.accepts(t))
    }

    pub fn enumerate(&self, max_len: usize) -> Result<BTreeSet<Trace>> {
        if let ModelLanguage::FiniteSet(ts) = &self.lang {
            return Ok(ts.iter().filter(|t| t.len() <= max_len).cloned().collect());
        }
        Ok(self.dfa()?.enumerate(max_len))
    }

    pub fn is_infinite(&self) -> Result<bool> {
        if let ModelLanguage::FiniteSet(_) = &self.lang {
            return Ok(false);
        }
        Ok(self.dfa()?.is_infinite())
    }

    pub fn alphabet(&self) -> Result<BTreeSet<Activity>> {
        Ok(match &self.lang {
            ModelLanguage::FiniteSet(ts) => ts.iter().flat_map(|t| t.0.iter().cloned()).collect(),
            ModelLanguage::NetDerived(h) => h.net().alphabet(),
            ModelLanguage::Automaton(d) => d.alphabet().iter().cloned().collect(),
        })
    }

    /// Text form: `.net` for nets, `.dfa` otherwise.
    pub fn to_text(&self) -> Result<(&'static str, String)> {
        Ok(match &self.lang {
            ModelLanguage::NetDerived(h) => ("net", h.net().to_text()),
            ModelLanguage::FiniteSet(ts) => {
                let mut l = EventLog::new();
                for t in ts {
                    l.add(t.clone(), 1)?;
                }
                ("set", l.to_text())
            }
            ModelLanguage::Automaton(_) => ("dfa", self.dfa()?.to_text()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Ofit,
    Ufit,
    Nfit,
}

/// Reference discovery: overfitting, underfitting and non-fitting models.
pub fn reference_model(kind: ReferenceKind, l: &EventLog, alphabet: Option<&BTreeSet<Activity>>) -> Result<Model> {
    let mut sigma = l.alphabet();
    if let Some(a) = alphabet {
        sigma.extend(a.iter().cloned());
    }
    Ok(match kind {
        ReferenceKind::Ofit => Model::from_traces(l.variants()),
        ReferenceKind::Ufit => Model::from_dfa(Dfa::universal(sigma)),
        ReferenceKind::Nfit => {
            if alphabet.is_none() {
                return Err(Error::Invalid("nfit requires a declared alphabet".into()));
            }
            Model::from_dfa(Dfa::from_traces(l.variants()).complement(sigma))
        }
    })
}

fn fitting_variants(l: &EventLog, m: &Model) -> Result<(usize, u64)> {
    let mut variants = 0;
    let mut cases = 0;
    for (t, n) in l.iter() {
        if m.fits(t)? {
            variants += 1;
            cases += n;
        }
    }
    Ok((variants, cases))
}

pub fn rec_tb(l: &EventLog, m: &Model) -> Result<MeasureValue> {
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let (v, _) = fitting_variants(l, m)?;
    Ok(MeasureValue::Value(v as f64 / l.num_variants() as f64))
}

pub fn rec_fb(l: &EventLog, m: &Model) -> Result<MeasureValue> {
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let (_, c) = fitting_variants(l, m)?;
    Ok(MeasureValue::Value(c as f64 / l.size() as f64))
}

/// Trace-based precision; the soundness measure.
pub fn prec_tb(l: &EventLog, m: &Model) -> Result<MeasureValue> {
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let size = match &m.lang {
        ModelLanguage::FiniteSet(ts) => Some(ts.len() as u128),
        _ => m.dfa()?.count_words(),
    };
    let Some(size) = size else {
        return Ok(MeasureValue::undefined("infinite language"));
    };
    if size == 0 {
        return Ok(MeasureValue::undefined("empty model language"));
    }
    let (v, _) = fitting_variants(l, m)?;
    Ok(MeasureValue::Value(v as f64 / size as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3() -> Net {
        Net::parse(
            "places: p1 p2 p3 p4 pf\ntransitions:\nta a\ntb b\ntc c\ntd d\narcs:\n\
             p1 -> ta\nta -> p3\np2 -> tb\ntb -> p4\np3 -> tc\np4 -> tc\ntc -> pf\n\
             p3 -> td\np4 -> td\ntd -> pf\ninitial: p1 p2\nfinal: pf\n",
        )
        .unwrap()
    }

    fn set(ws: &[&str]) -> BTreeSet<Trace> {
        ws.iter().map(|w| Trace::letters(w)).collect()
    }

    #[test]
    fn parse_and_language() {
        let net = m3();
        let m = Model::from_net(net.clone());
        assert_eq!(m.enumerate(6).unwrap(), set(&["abc", "bac", "abd", "bad"]));
        assert!(m.fits(&Trace::letters("bac")).unwrap());
        assert!(!m.fits(&Trace::letters("ac")).unwrap());
        assert_eq!(Net::parse(&net.to_text()).unwrap(), net);
        let en: Vec<&str> = net.enabled(net.initial()).iter().map(|&t| net.transitions()[t].id.as_str()).collect();
        assert_eq!(en, ["ta", "tb"]);
        assert!(net.enabled(&Marking(vec![0; 5])).is_empty());
        assert!(net.enabled(net.final_marking()).is_empty());
    }

    #[test]
    fn parse_errors() {
        assert!(Net::parse("places: p\ntransitions:\nt a\narcs:\nq -> t\ninitial: p\nfinal: p\n").is_err());
        assert!(Net::parse("places: p\ntransitions:\nt a\narcs:\np -> t\nfinal: p\n").is_err());
        let single = Net::parse("places: i o\ntransitions:\nt a\narcs:\ni -> t\nt -> o\ninitial: i\nfinal: o\n").unwrap();
        assert_eq!(Model::from_net(single).enumerate(4).unwrap(), set(&["a"]));
    }

    #[test]
    fn unbounded_and_cap() {
        let mut n = Net::new();
        n.add_transition("t", Some("a"), &["p"], &["p", "q"]);
        n.set_initial(&["p"]);
        n.set_final(&["p"]);
        assert!(matches!(ReachGraph::build(&n, 100), Err(Error::Unbounded { .. })));
        let m = Model::from_net(n);
        assert!(m.fits(&Trace::letters("a")).is_err());

        let mut c = Net::new();
        c.add_transition("t1", Some("a"), &["p0"], &["p1"]);
        c.add_transition("t2", Some("a"), &["p1"], &["p2"]);
        c.set_initial(&["p0"]);
        c.set_final(&["p2"]);
        assert_eq!(ReachGraph::build(&c, 2).unwrap_err(), Error::StateCap { cap: 2 });
    }

    #[test]
    fn reference_models() {
        let l3 = EventLog::from_letters(&[("abc", 5), ("bad", 3), ("abd", 2)]);
        let o = reference_model(ReferenceKind::Ofit, &l3, None).unwrap();
        assert_eq!(o.enumerate(10).unwrap(), set(&["abc", "bad", "abd"]));
        let u = reference_model(ReferenceKind::Ufit, &l3, None).unwrap();
        assert!(u.fits(&Trace::letters("dddd")).unwrap());
        assert!(reference_model(ReferenceKind::Nfit, &l3, None).is_err());
        let sigma = l3.alphabet();
        let n = reference_model(ReferenceKind::Nfit, &l3, Some(&sigma)).unwrap();
        assert!(!n.fits(&Trace::letters("abc")).unwrap());
        assert!(n.fits(&Trace::letters("aa")).unwrap());
    }

    #[test]
    fn baselines() {
        let l3 = EventLog::from_letters(&[("abc", 5), ("bad", 3), ("abd", 2)]);
        let m = Model::from_net(m3());
        assert_eq!(rec_tb(&l3, &m).unwrap(), MeasureValue::Value(1.0));
        assert_eq!(rec_fb(&l3, &m).unwrap(), MeasureValue::Value(1.0));
        assert_eq!(prec_tb(&l3, &m).unwrap(), MeasureValue::Value(0.75));
        let a = Model::from_traces(&[Trace::letters("a")]);
        let ab = EventLog::from_letters(&[("a", 1), ("b", 1)]);
        assert_eq!(rec_tb(&ab, &a).unwrap(), MeasureValue::Value(0.5));
        let a9 = EventLog::from_letters(&[("a", 9), ("b", 1)]);
        assert_eq!(rec_fb(&a9, &a).unwrap(), MeasureValue::Value(0.9));
        let o = reference_model(ReferenceKind::Ofit, &l3, None).unwrap();
        assert_eq!(prec_tb(&l3, &o).unwrap(), MeasureValue::Value(1.0));
        assert!(rec_tb(&EventLog::new(), &a).unwrap().value().is_none());
    }

    #[test]
    fn translations_preserve_language() {
        let d = Dfa::from_traces(&[Trace::letters("ab"), Trace::letters("abab"), Trace::letters("c")]);
        let via_dfa = Model::from_net(Net::from_dfa(&d));
        assert_eq!(via_dfa.dfa().unwrap(), d);
        let ts = set(&["ab", "a", "ba"]);
        let via_tree = Model::from_net(Net::prefix_tree(&ts));
        assert_eq!(via_tree.enumerate(5).unwrap(), ts);
    }

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(5.0 / 6.0), "0.833333");
        assert_eq!(format_value(1.0), "1.000000");
        assert_eq!(format_value(-1e-12), "0.000000");
    }
}
