//! Traces and event logs as multisets of traces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

pub type Activity = String;

/// Token used in log files for the empty trace.
pub const EMPTY_TOKEN: &str = "<empty>";

pub fn is_activity(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace(pub Vec<Activity>);

impl Trace {
    pub fn new<I, S>(events: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Activity>,
    {
        Trace(events.into_iter().map(Into::into).collect())
    }

    /// One activity per character: `Trace::letters("abc")` is ⟨a,b,c⟩.
    pub fn letters(s: &str) -> Self {
        Trace(s.chars().map(|c| c.to_string()).collect())
    }

    /// Whitespace separated activities.
    pub fn words(s: &str) -> Self {
        Trace(s.split_whitespace().map(str::to_string).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Activity> {
        self.0.iter()
    }

    pub fn project(&self, keep: &BTreeSet<Activity>) -> Trace {
        Trace(self.0.iter().filter(|a| keep.contains(*a)).cloned().collect())
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(EMPTY_TOKEN);
        }
        f.write_str(&self.0.join(" "))
    }
}

impl From<Vec<Activity>> for Trace {
    fn from(v: Vec<Activity>) -> Self {
        Trace(v)
    }
}

/// Finite multiset of traces. Zero counts are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EventLog {
    entries: BTreeMap<Trace, u64>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts<I>(it: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Trace, u64)>,
    {
        let mut log = EventLog::new();
        for (t, n) in it {
            log.add(t, n)?;
        }
        Ok(log)
    }

    /// Convenience for fixtures: `[("abc", 5), ("bad", 3)]` with one letter per activity.
    pub fn from_letters(items: &[(&str, u64)]) -> Self {
        let mut log = EventLog::new();
        for (s, n) in items {
            log.add(Trace::letters(s), *n).expect("fixture counts fit in u64");
        }
        log
    }

    pub fn add(&mut self, t: Trace, n: u64) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        let e = self.entries.entry(t).or_insert(0);
        *e = e.checked_add(n).ok_or(Error::Overflow)?;
        Ok(())
    }

    /// l(t), zero when absent.
    pub fn count(&self, t: &Trace) -> u64 {
        self.entries.get(t).copied().unwrap_or(0)
    }

    /// |l|, the number of cases.
    pub fn size(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_variants(&self) -> usize {
        self.entries.len()
    }

    /// τ(l)
    pub fn variants(&self) -> impl Iterator<Item = &Trace> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Trace, u64)> {
        self.entries.iter().map(|(t, n)| (t, *n))
    }

    pub fn alphabet(&self) -> BTreeSet<Activity> {
        self.entries.keys().flat_map(|t| t.0.iter().cloned()).collect()
    }

    pub fn max_trace_len(&self) -> usize {
        self.entries.keys().map(Trace::len).max().unwrap_or(0)
    }

    pub fn contains(&self, t: &Trace) -> bool {
        self.entries.contains_key(t)
    }

    pub fn sum(&self, other: &EventLog) -> Result<EventLog> {
        let mut out = self.clone();
        for (t, n) in other.iter() {
            out.add(t.clone(), n)?;
        }
        Ok(out)
    }

    pub fn difference(&self, other: &EventLog) -> EventLog {
        let entries = self
            .entries
            .iter()
            .filter_map(|(t, &n)| {
                let d = n.saturating_sub(other.count(t));
                (d > 0).then(|| (t.clone(), d))
            })
            .collect();
        EventLog { entries }
    }

    pub fn intersection(&self, other: &EventLog) -> EventLog {
        let entries = self
            .entries
            .iter()
            .filter_map(|(t, &n)| {
                let d = n.min(other.count(t));
                (d > 0).then(|| (t.clone(), d))
            })
            .collect();
        EventLog { entries }
    }

    pub fn is_subset_of(&self, other: &EventLog) -> bool {
        self.entries.iter().all(|(t, &n)| n <= other.count(t))
    }

    /// lᵏ: every count multiplied by k.
    pub fn power(&self, k: u64) -> Result<EventLog> {
        if k == 0 {
            return Err(Error::Invalid("log power requires k >= 1".into()));
        }
        let mut entries = BTreeMap::new();
        for (t, &n) in &self.entries {
            entries.insert(t.clone(), n.checked_mul(k).ok_or(Error::Overflow)?);
        }
        Ok(EventLog { entries })
    }

    /// The log with every count divided by the gcd of all counts, so that
    /// l and lᵏ reduce to the same log.
    pub fn reduced(&self) -> EventLog {
        let g = self.entries.values().fold(0, |a, &b| gcd(a, b));
        if g <= 1 {
            return self.clone();
        }
        EventLog { entries: self.entries.iter().map(|(t, &n)| (t.clone(), n / g)).collect() }
    }

    pub fn split_fitting<F>(&self, mut fits: F) -> (EventLog, EventLog)
    where
        F: FnMut(&Trace) -> bool,
    {
        let mut yes = BTreeMap::new();
        let mut no = BTreeMap::new();
        for (t, &n) in &self.entries {
            if fits(t) {
                yes.insert(t.clone(), n);
            } else {
                no.insert(t.clone(), n);
            }
        }
        (EventLog { entries: yes }, EventLog { entries: no })
    }

    /// Same as [`split_fitting`](Self::split_fitting) with a fallible predicate.
    pub fn try_split_fitting<F>(&self, mut fits: F) -> Result<(EventLog, EventLog)>
    where
        F: FnMut(&Trace) -> Result<bool>,
    {
        let mut err = None;
        let parts = self.split_fitting(|t| match fits(t) {
            Ok(b) => b,
            Err(e) => {
                err.get_or_insert(e);
                false
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(parts),
        }
    }

    pub fn parse(src: &str) -> Result<EventLog> {
        let mut log = EventLog::new();
        for (i, raw) in src.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (count, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, "expected `<count>: <activities>`"))?;
            let count = count.trim();
            let n: u64 = count
                .parse()
                .map_err(|_| Error::parse(lineno, format!("malformed count `{count}`")))?;
            if n == 0 {
                return Err(Error::parse(lineno, "count must be positive"));
            }
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let trace = match toks.as_slice() {
                [] => return Err(Error::parse(lineno, format!("no activities (use `{EMPTY_TOKEN}`)"))),
                [one] if *one == EMPTY_TOKEN => Trace::default(),
                _ => {
                    if let Some(bad) = toks.iter().find(|t| !is_activity(t)) {
                        return Err(Error::parse(lineno, format!("illegal activity `{bad}`")));
                    }
                    Trace::new(toks.iter().copied())
                }
            };
            log.add(trace, n).map_err(|_| Error::parse(lineno, "count overflow"))?;
        }
        Ok(log)
    }

    /// Canonical text: traces in lexicographic order, one `<count>: <acts>` per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (t, n) in &self.entries {
            s.push_str(&format!("{n}: {t}\n"));
        }
        s
    }
}

impl fmt::Display for EventLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (t, n)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "<{}>", t.0.join(","))?;
            if *n != 1 {
                write!(f, "^{n}")?;
            }
        }
        f.write_str("]")
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}
