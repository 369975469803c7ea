//! Randomized invariants, driven by proptest seeds.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use confprop::eigen::eig;
use confprop::eventlog::{EventLog, Trace};
use confprop::measures::{EvalConfig, Registry, TABLE_MEASURES};
use confprop::procmodel::{Model, Net};
use confprop::propositions::{generate, PropositionId};
use confprop::Dfa;

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn minimize_is_idempotent_and_canonical(seed in any::<u64>()) {
        let mut r = rng(seed);
        let alphabet = letters(r.gen_range(1..=3));
        let raw = RawDfa::random(&mut r, 8, &alphabet, 0.6);
        let m = raw.dfa(&alphabet).minimize();
        prop_assert_eq!(&m.minimize(), &m);
        prop_assert_eq!(raw.permuted(&mut r).dfa(&alphabet).minimize().to_text(), m.to_text());
    }

    #[test]
    fn automaton_accepts_like_raw_edges(seed in any::<u64>()) {
        let mut r = rng(seed);
        let alphabet = letters(r.gen_range(1..=3));
        let raw = RawDfa::random(&mut r, 6, &alphabet, 0.6);
        let d = raw.dfa(&alphabet);
        let m = d.minimize();
        for w in all_words(&alphabet, 5) {
            let t = Trace(w.clone());
            prop_assert_eq!(d.accepts(&t), raw.accepts(&w));
            prop_assert_eq!(m.accepts(&t), raw.accepts(&w));
        }
    }

    #[test]
    fn intersection_and_inclusion(seed in any::<u64>()) {
        let mut r = rng(seed);
        let alphabet = letters(r.gen_range(1..=3));
        let (a, b) = (RawDfa::random(&mut r, 5, &alphabet, 0.6), RawDfa::random(&mut r, 5, &alphabet, 0.6));
        let (da, db) = (a.dfa(&alphabet), b.dfa(&alphabet));
        let both = da.intersect(&db);
        for w in all_words(&alphabet, 5) {
            prop_assert_eq!(both.accepts(&Trace(w.clone())), a.accepts(&w) && b.accepts(&w));
        }
        prop_assert!(da.includes(&both));
        prop_assert!(db.includes(&both));
        prop_assert_eq!(da.includes(&db) && db.includes(&da), da.same_language(&db));
    }

    #[test]
    fn eig_matches_dense_solver_and_is_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let alphabet = letters(r.gen_range(1..=3));
        let (a, b) = (RawDfa::random(&mut r, 10, &alphabet, 0.5), RawDfa::random(&mut r, 10, &alphabet, 0.5));
        let (da, db) = (a.dfa(&alphabet), b.dfa(&alphabet));
        let ea = eig(&da).unwrap();
        prop_assert!((ea - spectral_radius(&a.short_circuit())).abs() <= 1e-6);
        prop_assert!(eig(&da.intersect(&db)).unwrap() <= ea + 1e-9);
    }

    #[test]
    fn net_language_matches_run_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = small_net(&mut r, 10);
        let m = Model::from_net(net.clone());
        let got: Vec<Vec<String>> = m.enumerate(4).unwrap().into_iter().map(|t| t.0).collect();
        let want: Vec<Vec<String>> = run_words(&net, 4).into_iter().collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn net_text_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = small_net(&mut r, 12);
        let back = Net::parse(&net.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), net.to_text());
        let (a, b) = (Model::from_net(net).dfa().unwrap(), Model::from_net(back).dfa().unwrap());
        prop_assert!(a.same_language(&b));
    }

    #[test]
    fn log_text_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let alphabet = letters(4);
        let cases = r.gen_range(0..8);
        let l = random_log(&mut r, &[], &alphabet, cases);
        prop_assert_eq!(EventLog::parse(&l.to_text()).unwrap(), l);
    }

    #[test]
    fn alignment_cost_agrees_with_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = small_net(&mut r, 8);
        let alphabet: Vec<String> = net.alphabet().into_iter().chain(["x".to_string()]).collect();
        let t = random_word(&mut r, &alphabet, 0, 4);
        let h = Model::from_net(net.clone()).net_handle().unwrap();
        let got = confprop::align::optimal_alignment(&h, &t).unwrap().cost;
        if let Some(want) = brute_alignment_cost(&net, &t) {
            prop_assert_eq!(got, want);
        }
        prop_assert_eq!(got == 0, Model::from_net(net).fits(&t).unwrap());
    }

    #[test]
    fn measure_values_lie_in_unit_interval(seed in any::<u64>(), index in 0usize..200) {
        let Some(inst) = generate::instance(PropositionId::RecPro4, seed % 16, index) else { return Ok(()) };
        let reg = Registry::standard();
        let cfg = EvalConfig::default();
        for id in TABLE_MEASURES {
            let v = reg.get(id).unwrap().eval(&inst.logs[0], &inst.models[0], &cfg).unwrap();
            if let Some(x) = v.value() {
                prop_assert!((-1e-9..=1.0 + 1e-9).contains(&x), "{} = {} on {}", id, x, inst.origin);
            }
        }
    }

    #[test]
    fn fitting_logs_have_full_token_recall(seed in any::<u64>(), index in 0usize..200) {
        let Some(inst) = generate::instance(PropositionId::RecPro5, seed % 16, index) else { return Ok(()) };
        let reg = Registry::standard();
        let cfg = EvalConfig::default();
        for id in ["rec_TB", "rec_FB", "rec_B", "rec_C", "rec_D"] {
            let v = reg.get(id).unwrap().eval(&inst.logs[0], &inst.models[0], &cfg).unwrap();
            prop_assert_eq!(v.value(), Some(1.0), "{} on {}", id, inst.origin);
        }
    }

    #[test]
    fn reduced_log_is_shared_by_powers(seed in any::<u64>(), k in 1u64..6) {
        let mut r = rng(seed);
        let cases = r.gen_range(1..6);
        let l = random_log(&mut r, &[], &letters(3), cases);
        prop_assert_eq!(l.power(k).unwrap().reduced(), l.reduced());
        prop_assert_eq!(l.reduced().size() * (l.size() / l.reduced().size()), l.size());
    }
}

#[test]
fn dfa_text_round_trips() {
    let mut r = rng(11);
    for _ in 0..50 {
        let alphabet = letters(3);
        let d = RawDfa::random(&mut r, 6, &alphabet, 0.6).dfa(&alphabet).minimize();
        let back = Dfa::parse(&d.to_text()).unwrap();
        assert!(back.same_language(&d));
    }
}
