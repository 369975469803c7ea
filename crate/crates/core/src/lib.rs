//! Recall, precision and generalization measures for process models, and an
//! executable audit of the properties such measures are expected to satisfy.

pub mod align;
pub mod automata;
pub mod eigen;
pub mod error;
pub mod eventlog;
pub mod fixtures;
pub mod footprint;
pub mod measures;
pub mod negev;
pub mod procmodel;
pub mod projected;
pub mod propositions;
pub mod replay;

pub use automata::{Dfa, ProductMode};
pub use error::{Error, Result};
pub use eventlog::{Activity, EventLog, Trace};
pub use procmodel::{Marking, MeasureValue, Model, ModelLanguage, Net, NetHandle, ReachGraph};
