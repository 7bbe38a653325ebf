mod common;

use caplab::cantor::{enumerate_trees, BitString, ClopenSet, CodeWalker, PrunedTree, TernaryCode};
use caplab::capacity::{capacity_clopen, choquet_invert, recover_mu_star, UniformCapacity};
use caplab::constructions::{
    build_usc_capacity, capacity_sparse, SparseConstraint, DEFAULT_LEAF_BUDGET,
};
use caplab::measure::{lebesgue, MeasureSpec};
use caplab::random_lab::{classify_regime, pn_enclosure, pn_exact, symmetric_map, PnMap, Regime};
use caplab::rational::{int, pow};
use caplab::Rational;
use common::{clopen, r, weights};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

/// A pruned tree of height `≤ max_height` built from arbitrary digits.
fn tree(max_height: usize) -> impl Strategy<Value = PrunedTree> {
    (0..=max_height, proptest::collection::vec(0u8..3, 15)).prop_map(|(h, digits)| {
        let mut walker = CodeWalker::new(h);
        for d in digits.into_iter().cycle() {
            if walker.is_complete() {
                break;
            }
            walker.push(d).unwrap();
        }
        walker.finish().unwrap()
    })
}

fn bitstring(max_len: usize) -> impl Strategy<Value = BitString> {
    proptest::collection::vec(any::<bool>(), 0..=max_len).prop_map(BitString::from_bits)
}

fn uniform(w: &(Rational, Rational)) -> MeasureSpec {
    MeasureSpec::uniform(w.0.clone(), w.1.clone())
}

/// Nonincreasing target lists starting at 1 on the grid `k/8`.
fn targets() -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(0i64..=8, 1..5).prop_map(|mut ks| {
        ks.sort_unstable_by(|a, b| b.cmp(a));
        std::iter::once(int(1))
            .chain(ks.into_iter().map(|k| r(k, 8)))
            .collect()
    })
}

/// Weights whose smaller value is at least 1/4, keeping refinement depths small.
fn stout_weights() -> impl Strategy<Value = (Rational, Rational)> {
    prop_oneof![
        Just((r(1, 3), r(1, 3))),
        Just((r(1, 4), r(1, 4))),
        Just((r(2, 5), r(1, 4))),
        Just((r(1, 2), r(1, 3))),
        Just((r(3, 8), r(3, 8))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn code_round_trip(t in tree(4)) {
        let code = t.encode();
        prop_assert_eq!(PrunedTree::decode(&code, t.height()).unwrap(), t.clone());
        let internal = t.nodes().iter().filter(|s| s.len() < t.height()).count();
        prop_assert_eq!(code.len(), internal);
        let text = code.to_string();
        prop_assert_eq!(text.parse::<TernaryCode>().unwrap(), code);
    }

    #[test]
    fn clopen_canonical(strings in proptest::collection::vec(bitstring(4), 0..8)) {
        let q = ClopenSet::from_strings(0, strings.clone());
        let mut reversed = strings.clone();
        reversed.reverse();
        prop_assert_eq!(&ClopenSet::from_strings(0, reversed), &q);
        prop_assert_eq!(&ClopenSet::from_strings(0, q.leaves().iter().cloned()), &q);
        for s in q.leaves() {
            if let Some(sib) = s.sibling() {
                prop_assert!(!q.leaves().contains(&sib));
            }
            for t in q.leaves() {
                prop_assert!(s == t || !s.is_prefix_of(t));
            }
        }
        for s in &strings {
            prop_assert!(q.covers(s));
        }
    }

    #[test]
    fn truncation_decreases(t in tree(4)) {
        let spec = MeasureSpec::symmetric(r(1, 3));
        for n in 0..t.height() {
            let (a, b) = (t.truncate(n).unwrap(), t.truncate(n + 1).unwrap());
            prop_assert!(b.is_subset(&a));
            prop_assert!(capacity_clopen(&spec, &b).unwrap() <= capacity_clopen(&spec, &a).unwrap());
        }
    }

    #[test]
    fn measure_additive(w in weights(), digits in proptest::collection::vec(0u8..3, 0..5)) {
        let spec = uniform(&w);
        let c = TernaryCode::from_digits(digits).unwrap();
        let parts: Rational = (0..3).map(|i| spec.mu_code(&c.child(i)).unwrap()).sum();
        prop_assert_eq!(parts, spec.mu_code(&c).unwrap());
    }

    #[test]
    fn lebesgue_monotone_and_additive(p in clopen(4), q in clopen(4)) {
        let (u, i) = (p.union(&q), p.intersection(&q));
        prop_assert_eq!(lebesgue(&u) + lebesgue(&i), lebesgue(&p) + lebesgue(&q));
        prop_assert!(lebesgue(&i) <= lebesgue(&p) && lebesgue(&p) <= lebesgue(&u));
        let d = p.difference(&q);
        prop_assert_eq!(lebesgue(&d) + lebesgue(&i), lebesgue(&p));
    }

    #[test]
    fn capacity_monotone_and_bounded(w in weights(), p in clopen(3), q in clopen(3)) {
        let spec = uniform(&w);
        let t = |x: &ClopenSet| capacity_clopen(&spec, x).unwrap();
        let (i, u) = (p.intersection(&q), p.union(&q));
        prop_assert!(t(&i) <= t(&p) && t(&p) <= t(&u));
        prop_assert!(t(&u) <= t(&p) + t(&q) - t(&i));
        prop_assert!(t(&u) <= int(1) && !t(&i).is_negative());
    }

    #[test]
    fn symmetric_scaling(k in 1i64..12, q in clopen(3)) {
        let b = r(k, 24);
        let spec = MeasureSpec::symmetric(b.clone());
        let shifted = ClopenSet::join(&q, &ClopenSet::empty());
        prop_assert_eq!(
            capacity_clopen(&spec, &shifted).unwrap(),
            (int(1) - b) * capacity_clopen(&spec, &q).unwrap()
        );
    }

    #[test]
    fn removal_bound(w in weights(), pieces in proptest::collection::vec(bitstring(3), 1..6)) {
        let cap = UniformCapacity::new(&uniform(&w)).unwrap();
        let q = ClopenSet::from_strings(0, pieces.clone());
        let r_max = int(1) - &w.1;
        for s in &pieces {
            let rest = q.difference(&ClopenSet::interval(s.clone()));
            prop_assert!(cap.eval(&q) - cap.eval(&rest) <= pow(&r_max, s.len()));
        }
    }

    #[test]
    fn pn_nonincreasing_and_enclosed(w in weights()) {
        let seq = pn_exact(&w.0, &w.1, 12).unwrap();
        prop_assert!(seq.values[0].is_one());
        prop_assert!(seq.values.windows(2).all(|x| x[1] <= x[0]));
        let map = PnMap::new(&w.0, &w.1).unwrap();
        for x in seq.values.windows(2) {
            prop_assert_eq!(&map.apply(&x[0]), &x[1]);
        }
        let enc = pn_enclosure(&w.0, &w.1, 12, 64).unwrap();
        for (n, v) in seq.values.iter().enumerate() {
            prop_assert!(enc.lower[n] <= *v && *v <= enc.upper[n]);
        }
    }

    #[test]
    fn fixed_point_is_fixed(w in weights()) {
        let report = classify_regime(&w.0, &w.1).unwrap();
        let map = PnMap::new(&w.0, &w.1).unwrap();
        prop_assert_eq!(map.apply(&report.fixed_point), report.fixed_point.clone());
        match report.regime {
            Regime::ZeroCapacity => {
                prop_assert!(report.fixed_point.is_zero());
                prop_assert!(!report.discriminant.is_positive());
            }
            Regime::PositiveCapacity => {
                prop_assert!(report.fixed_point.is_positive() && report.fixed_point <= int(1));
                prop_assert!(report.discriminant.is_positive());
            }
        }
    }

    #[test]
    fn symmetric_recursion_consistent(k in 1i64..48) {
        let b = r(k, 96);
        let seq = pn_exact(&b, &b, 6).unwrap();
        let two = int(2);
        for x in seq.values.windows(2) {
            let p = &x[0];
            let expected = (&two * &b * &b - int(4) * &b + &two) * p
                - (int(1) - int(4) * &b + int(4) * &b * &b) * p * p;
            prop_assert_eq!(&x[1], &expected);
            prop_assert_eq!(&symmetric_map(&b, p), &expected);
        }
    }

    #[test]
    fn sparse_against_reference(k in 1i64..12, mask in 1u8..16) {
        let b = r(k, 24);
        let indices: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
        let sigma = SparseConstraint::new(indices.clone()).unwrap();
        let depth = indices.last().unwrap() + 1;
        prop_assert_eq!(
            capacity_sparse(&b, &sigma).unwrap(),
            common::capacity(&b, &b, &sigma.to_clopen(), depth)
        );
        prop_assert_eq!(lebesgue(&sigma.to_clopen()), sigma.lebesgue());
    }

    #[test]
    fn usc_trace_sound(w in stout_weights(), q in targets()) {
        let trace = build_usc_capacity(&w.0, &w.1, &q, DEFAULT_LEAF_BUDGET).unwrap();
        prop_assert!(trace.violations().is_empty(), "{:?}", trace.violations());
        prop_assert_eq!(trace.stages.len(), q.len());
        let spec = uniform(&w);
        for (n, pair) in trace.stages.windows(2).enumerate() {
            let (prev, cur) = (&pair[0], &pair[1]);
            prop_assert!(cur.clopen.is_subset(&prev.clopen));
            let t = capacity_clopen(&spec, &cur.clopen).unwrap();
            prop_assert_eq!(&t, &cur.capacity);
            prop_assert!(t <= prev.capacity);
            prop_assert!(q[n + 1] <= t);
            if q[n + 1] < q[n] {
                prop_assert!(t <= q[n]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn choquet_round_trip(w in weights()) {
        let spec = uniform(&w);
        let cap = UniformCapacity::new(&spec).unwrap();
        let MeasureSpec::Table { entries, .. } = choquet_invert(&cap, 2, 4).unwrap() else {
            panic!("inversion yields a table");
        };
        for (c, v) in &entries {
            prop_assert_eq!(v, &spec.mu_code(c).unwrap());
        }
        let rec = recover_mu_star(&cap, 2, 4).unwrap();
        let total: Rational = rec.iter().map(|(_, m)| m).sum();
        prop_assert!(total.is_one());
        for (t, m) in &rec {
            prop_assert_eq!(m, &spec.mu_star_tree(t).unwrap());
        }
    }
}

#[test]
fn mu_star_normalized() {
    let spec = MeasureSpec::uniform(r(2, 5), r(1, 5));
    for h in 0..=3 {
        let total: Rational = enumerate_trees(h, 4)
            .unwrap()
            .map(|t| spec.mu_star_tree(&t).unwrap())
            .sum();
        assert!(total.is_one(), "height {h}");
    }
}

#[test]
fn symmetric_map_decreasing_in_weight() {
    let grid: Vec<Rational> = (0..=64).map(|k| r(k, 64)).collect();
    let weights: Vec<Rational> = (0..=32).map(|k| r(k, 64)).collect();
    for (i, b) in weights.iter().enumerate() {
        for c in &weights[i + 1..] {
            for p in &grid {
                assert!(
                    symmetric_map(c, p) <= symmetric_map(b, p),
                    "b={b} c={c} p={p}"
                );
            }
        }
    }
}
