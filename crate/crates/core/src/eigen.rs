//! Short-circuit eigenvalue measures over regular languages.

use crate::automata::Dfa;
use crate::error::{Error, Result};
use crate::eventlog::EventLog;
use crate::procmodel::{MeasureValue, Model};

pub const TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 10_000;
const CLAMP_SLACK: f64 = 1e-9;

/// Row-major count matrix of the trimmed minimal automaton of `d` with an
/// extra edge from every accepting state back to the initial state.
/// Returns an empty matrix for the empty language.
pub fn short_circuit_matrix(d: &Dfa) -> (usize, Vec<f64>) {
    let m = d.minimize();
    if m.is_empty_language() {
        return (0, Vec::new());
    }
    let n = m.num_states();
    let mut a = vec![0.0; n * n];
    for (s, _, t) in m.edges() {
        a[s * n + t] += 1.0;
    }
    for s in 0..n {
        if m.is_accepting(s) {
            a[s * n + m.initial()] += 1.0;
        }
    }
    (n, a)
}

/// Spectral radius of the short-circuited automaton of `d`; 0 for the empty
/// language. Power iteration runs on `A + I`, which is primitive whenever
/// `A` is irreducible, and stops when the Collatz-Wielandt bounds meet.
pub fn eig(d: &Dfa) -> Result<f64> {
    let (n, a) = short_circuit_matrix(d);
    if n == 0 {
        return Ok(0.0);
    }
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    let mut gap = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        for i in 0..n {
            y[i] = x[i] + a[i * n..(i + 1) * n].iter().zip(&x).map(|(p, q)| p * q).sum::<f64>();
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        gap = hi - lo;
        if gap < TOLERANCE {
            return Ok((lo + hi) / 2.0 - 1.0);
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        for i in 0..n {
            x[i] = y[i] / norm;
        }
    }
    Err(Error::Resource(format!("power iteration did not converge in {MAX_ITERATIONS} iterations (bound gap {gap:e}, {n} states)")))
}

fn quotient(num: f64, den: f64) -> Result<f64> {
    let q = num / den;
    if q > 1.0 + CLAMP_SLACK {
        return Err(Error::Invalid(format!("eigenvalue quotient {q} exceeds 1")));
    }
    Ok(q.min(1.0))
}

pub fn rec_g(l: &EventLog, m: &Model) -> Result<MeasureValue> {
    if l.is_empty() {
        return Ok(MeasureValue::undefined("empty log"));
    }
    let dl = Dfa::from_traces(l.variants());
    let den = eig(&dl)?;
    Ok(MeasureValue::Value(quotient(eig(&dl.intersect(&m.dfa()?))?, den)?))
}

pub fn prec_r(l: &EventLog, m: &Model) -> Result<MeasureValue> {
    let dm = m.dfa()?;
    if dm.is_empty_language() {
        return Ok(MeasureValue::undefined("empty model language"));
    }
    let den = eig(&dm)?;
    let dl = Dfa::from_traces(l.variants());
    Ok(MeasureValue::Value(quotient(eig(&dm.intersect(&dl))?, den)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventlog::Trace;
    use crate::fixtures;

    #[test]
    fn analytic_values() {
        let alph: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        assert!((eig(&Dfa::universal(&alph)).unwrap() - 4.0).abs() < 1e-9);
        // {a}: two-state cycle.
        assert!((eig(&Dfa::from_traces(&[Trace::letters("a")])).unwrap() - 1.0).abs() < 1e-9);
        // {ε}: one state with the short-circuit loop.
        assert!((eig(&Dfa::from_traces(&[Trace::new(Vec::<String>::new())])).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(eig(&Dfa::empty()).unwrap(), 0.0);
        // {a, b}: A = [[0,2],[1,0]].
        assert!((eig(&Dfa::from_traces(&[Trace::letters("a"), Trace::letters("b")])).unwrap() - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn measures() {
        let m1 = fixtures::model("m1");
        let l = EventLog::from_letters(&[("abcf", 1)]);
        let fits = m1.fits(&Trace::letters("abcf")).unwrap();
        let r = rec_g(&l, &m1).unwrap().value().unwrap();
        assert_eq!(r, if fits { 1.0 } else { 0.0 });
        let p = prec_r(&fixtures::log("l3"), &fixtures::model("m3")).unwrap().value().unwrap();
        assert!(p > 0.0 && p <= 1.0);
        let l3 = fixtures::log("l3");
        let exact = Model::from_traces(l3.variants());
        assert_eq!(prec_r(&l3, &exact).unwrap(), MeasureValue::Value(1.0));
        assert_eq!(rec_g(&l3, &exact).unwrap(), MeasureValue::Value(1.0));
        assert!(rec_g(&EventLog::new(), &exact).unwrap().value().is_none());
    }
}
