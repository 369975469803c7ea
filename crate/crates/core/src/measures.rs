//! Measure registry: every measure is a `Measure` trait object looked up by id.

use std::fmt;

use crate::align::{self, Variant};
use crate::eigen;
use crate::error::{Error, Result};
use crate::eventlog::EventLog;
use crate::footprint;
use crate::negev::{self, Window};
use crate::procmodel::{self, MeasureValue, Model};
use crate::projected;
use crate::replay::{self, ReplayPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    Recall,
    Precision,
    Generalization,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Recall => "recall",
            Dimension::Precision => "precision",
            Dimension::Generalization => "generalization",
        })
    }
}

/// Knobs shared by all measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub policy: ReplayPolicy,
    /// Subset size for the projected measures.
    pub k: usize,
    /// Context window for negative-event induction.
    pub window: Window,
    /// ETC variant used by prec_K (`One` or `Rep`).
    pub etc_variant: Variant,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { policy: ReplayPolicy::default(), k: projected::DEFAULT_K, window: Window::Max, etc_variant: Variant::One }
    }
}

impl EvalConfig {
    pub fn with_policy(mut self, policy: ReplayPolicy) -> Self {
        self.policy = policy;
        self
    }
}

pub trait Measure: Send + Sync {
    fn id(&self) -> &str;
    fn dimension(&self) -> Dimension;
    fn eval(&self, l: &EventLog, m: &Model, cfg: &EvalConfig) -> Result<MeasureValue>;

    /// Comparison tolerance for proposition checks.
    fn eps(&self) -> f64 {
        1e-9
    }
}

type EvalFn = fn(&EventLog, &Model, &EvalConfig) -> Result<MeasureValue>;

/// A measure backed by a plain function.
pub struct FnMeasure {
    pub id: &'static str,
    pub dimension: Dimension,
    pub eps: f64,
    /// Counts enter only through their ratios; evaluate on the gcd-reduced log.
    pub relative: bool,
    pub f: EvalFn,
}

impl Measure for FnMeasure {
    fn id(&self) -> &str {
        self.id
    }

    fn dimension(&self) -> Dimension {
        self.dimension
    }

    fn eval(&self, l: &EventLog, m: &Model, cfg: &EvalConfig) -> Result<MeasureValue> {
        if self.relative {
            (self.f)(&l.reduced(), m, cfg)
        } else {
            (self.f)(l, m, cfg)
        }
    }

    fn eps(&self) -> f64 {
        self.eps
    }
}

#[derive(Default)]
pub struct Registry {
    measures: Vec<Box<dyn Measure>>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    /// Adds a measure; a later registration under the same id replaces it.
    pub fn register(&mut self, m: Box<dyn Measure>) {
        self.measures.retain(|x| x.id() != m.id());
        self.measures.push(m);
    }

    pub fn get(&self, id: &str) -> Option<&dyn Measure> {
        self.measures.iter().find(|m| m.id() == id).map(|b| b.as_ref())
    }

    pub fn require(&self, id: &str) -> Result<&dyn Measure> {
        self.get(id).ok_or_else(|| Error::Invalid(format!("unknown measure `{id}`")))
    }

    pub fn ids(&self) -> Vec<&str> {
        self.measures.iter().map(|m| m.id()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Measure> {
        self.measures.iter().map(|b| b.as_ref())
    }

    /// All built-in measures, in table order.
    pub fn standard() -> Self {
        use Dimension::*;
        let mut r = Registry::new();
        let mut add = |id: &'static str, dimension: Dimension, f: EvalFn| r.register(Box::new(FnMeasure { id, dimension, eps: 1e-9, relative: id != "gen_S", f }));
        add("rec_TB", Recall, |l, m, _| procmodel::rec_tb(l, m));
        add("rec_FB", Recall, |l, m, _| procmodel::rec_fb(l, m));
        add("prec_TB", Precision, |l, m, _| procmodel::prec_tb(l, m));
        add("rec_A", Recall, |l, m, _| footprint::rec_a(l, m));
        add("rec_B", Recall, |l, m, c| replay::rec_b(l, m, c.policy));
        add("rec_C", Recall, |l, m, _| align::rec_c(l, m));
        add("rec_D", Recall, |l, m, c| negev::rec_d(l, m, c.policy));
        add("rec_E", Recall, |l, m, c| projected::rec_e(l, m, c.k));
        add("prec_H", Precision, |l, m, _| procmodel::prec_tb(l, m));
        add("prec_I", Precision, |l, m, c| replay::prec_i(l, m, c.policy));
        add("prec_J", Precision, |l, m, _| footprint::prec_j(l, m));
        add("prec_K", Precision, |l, m, c| align::etc_precision(l, m, c.etc_variant, c.policy));
        add("prec_L", Precision, |l, m, c| align::etc_precision(l, m, Variant::All, c.policy));
        add("prec_M", Precision, |l, m, c| negev::prec_m(l, m, c.window, c.policy));
        add("prec_N", Precision, |l, m, c| negev::prec_n(l, m, c.window, c.policy));
        add("prec_O", Precision, |l, m, c| negev::prec_o(l, m, c.window, c.policy));
        add("prec_P", Precision, |l, m, c| projected::prec_p(l, m, c.k));
        add("gen_S", Generalization, |l, m, _| align::gen_s(l, m));
        add("gen_T", Generalization, |l, m, c| negev::gen_t(l, m, c.window, c.policy));
        for (id, dimension, f) in [
            ("rec_G", Recall, (|l, m, _| eigen::rec_g(l, m)) as EvalFn),
            ("prec_R", Precision, (|l, m, _| eigen::prec_r(l, m)) as EvalFn),
        ] {
            r.register(Box::new(FnMeasure { id, dimension, eps: 1e-6, relative: true, f }));
        }
        r
    }
}

/// Ids of the measures in the verdict tables, in table order.
pub const TABLE_MEASURES: &[&str] = &[
    "rec_A", "rec_B", "rec_C", "rec_D", "rec_E", "rec_G", "prec_H", "prec_I", "prec_J", "prec_K", "prec_L", "prec_M", "prec_N", "prec_O",
    "prec_P", "prec_R", "gen_S", "gen_T",
];

pub const BASELINE_MEASURES: &[&str] = &["rec_TB", "rec_FB", "prec_TB"];
