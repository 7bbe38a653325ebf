mod common;

use caplab::cantor::{enumerate_trees, BitString, ClopenSet, PrunedTree};
use caplab::capacity::{
    all_clopen_sets, capacity_bruteforce, capacity_clopen, recover_mu_star, BruteForceCapacity,
    UniformCapacity,
};
use caplab::constructions::{capacity_sparse, SparseConstraint};
use caplab::measure::MeasureSpec;
use caplab::random_lab::{claim1_check, pair_intersection_probability, pn_exact};
use caplab::rational::{dyadic, int, pow};
use caplab::Rational;
use common::{capacity, level_distribution, pair_sum, r};
use num_traits::{One, Zero};

fn weight_settings() -> Vec<(Rational, Rational)> {
    vec![
        (r(1, 3), r(1, 3)),
        (r(1, 4), r(1, 4)),
        (r(2, 5), r(1, 5)),
        (r(1, 2), r(1, 3)),
    ]
}

#[test]
fn reference_distribution_is_normalized() {
    for (b0, b1) in weight_settings() {
        for h in 0..=4 {
            let total: Rational = level_distribution(&b0, &b1, h).iter().sum();
            assert!(total.is_one(), "h={h}");
        }
    }
}

#[test]
fn tree_counts() {
    let counts: Vec<usize> = (0..=4)
        .map(|h| enumerate_trees(h, 4).unwrap().count())
        .collect();
    assert_eq!(counts, vec![1, 3, 15, 255, 65535]);
}

#[test]
fn mu_star_normalized_up_to_height_four() {
    let spec = MeasureSpec::uniform(r(2, 5), r(1, 5));
    for h in 0..=4 {
        let total: Rational = enumerate_trees(h, 4)
            .unwrap()
            .map(|t| spec.mu_star_tree(&t).unwrap())
            .sum();
        assert!(total.is_one(), "h={h}");
    }
}

#[test]
fn capacity_matches_reference_on_every_small_set() {
    for (b0, b1) in weight_settings() {
        let spec = MeasureSpec::uniform(b0.clone(), b1.clone());
        for q in all_clopen_sets(3).unwrap() {
            let want = capacity(&b0, &b1, &q, 3);
            assert_eq!(capacity_clopen(&spec, &q).unwrap(), want, "{q:?}");
            assert_eq!(capacity_bruteforce(&spec, &q, 3, 4).unwrap(), want, "{q:?}");
        }
    }
}

#[test]
fn documented_capacities() {
    let third = MeasureSpec::symmetric(r(1, 3));
    let q = ClopenSet::from_strings(2, ["00".parse().unwrap(), "11".parse().unwrap()]);
    assert_eq!(capacity(&r(1, 3), &r(1, 3), &q, 2), r(20, 27));
    assert_eq!(capacity_clopen(&third, &q).unwrap(), r(20, 27));
    let x2 = SparseConstraint::new(vec![2]).unwrap().to_clopen();
    assert_eq!(capacity(&r(1, 3), &r(1, 3), &x2, 3), r(1760, 2187));
}

#[test]
fn pn_matches_reference_pair_sum() {
    for (b0, b1) in weight_settings() {
        let seq = pn_exact(&b0, &b1, 4).unwrap();
        let spec = MeasureSpec::uniform(b0.clone(), b1.clone());
        for n in 0..=3 {
            let want = pair_sum(&b0, &b1, n);
            assert_eq!(seq.values[n], want, "n={n}");
            assert_eq!(pair_intersection_probability(&spec, n).unwrap(), want);
        }
    }
    assert_eq!(pair_sum(&r(1, 3), &r(1, 3), 1), r(7, 9));
    assert_eq!(pair_sum(&r(1, 3), &r(1, 3), 2), r(455, 729));
}

#[test]
fn pn_height_four_against_reference() {
    let (b0, b1) = (r(1, 3), r(1, 3));
    assert_eq!(
        pn_exact(&b0, &b1, 4).unwrap().values[4],
        pair_sum(&b0, &b1, 4)
    );
}

#[test]
fn claim1_against_reference() {
    let (b0, b1) = (r(1, 3), r(1, 3));
    let spec = MeasureSpec::symmetric(b0.clone());
    for m in 0..=3 {
        let dist = level_distribution(&b0, &b1, m);
        let hit = |a: usize| -> Rational {
            dist.iter()
                .enumerate()
                .filter(|(b, _)| a & b != 0)
                .map(|(_, p)| p)
                .sum()
        };
        for n in 0..=4 {
            let lhs: Rational = dist
                .iter()
                .enumerate()
                .filter(|(a, p)| !p.is_zero() && hit(*a) >= dyadic(n))
                .map(|(_, p)| p)
                .sum();
            let rhs = pow(&int(2), n) * pair_sum(&b0, &b1, m);
            let report = claim1_check(&spec, m, n).unwrap();
            assert_eq!(report.lhs, lhs, "m={m} n={n}");
            assert_eq!(report.rhs, rhs);
            assert!(lhs <= rhs);
        }
    }
}

#[test]
fn sparse_capacity_against_reference() {
    let b = r(1, 3);
    for indices in [
        vec![0],
        vec![1],
        vec![2],
        vec![3],
        vec![0, 2],
        vec![1, 3],
        vec![0, 1, 2, 3],
    ] {
        let s = SparseConstraint::new(indices.clone()).unwrap();
        let h = indices.last().unwrap() + 1;
        assert_eq!(
            capacity_sparse(&b, &s).unwrap(),
            capacity(&b, &b, &s.to_clopen(), h),
            "{indices:?}"
        );
    }
}

#[test]
fn recover_on_table_spec() {
    // A non-uniform table: the brute-force oracle's capacities still invert.
    let spec = MeasureSpec::uniform(r(2, 5), r(1, 5)).tabulate(2).unwrap();
    let cap = BruteForceCapacity::new(spec.clone(), 4);
    let rec = recover_mu_star(&cap, 2, 4).unwrap();
    assert_eq!(rec.len(), 15);
    for (t, m) in rec {
        assert_eq!(m, spec.mu_star_tree(&t).unwrap());
    }
}

#[test]
fn splitting_identity_on_intervals() {
    // T(I(σ)) for uniform weights is a product of (1 - b_other) factors.
    let (b0, b1) = (r(2, 5), r(1, 5));
    let cap = UniformCapacity::new(&MeasureSpec::uniform(b0.clone(), b1.clone())).unwrap();
    for s in BitString::empty().extensions(4) {
        let want = s.bits().iter().fold(Rational::one(), |acc, &bit| {
            acc * (Rational::one() - if bit { &b0 } else { &b1 })
        });
        assert_eq!(cap.eval(&ClopenSet::interval(s)), want);
    }
}

#[test]
fn documented_tree_codes() {
    let t = PrunedTree::new(
        2,
        ["", "0", "1", "00", "01", "11"]
            .iter()
            .map(|s| s.parse().unwrap()),
    )
    .unwrap();
    assert_eq!(t.encode().to_string(), "221");
    let t = PrunedTree::new(2, ["", "1", "10", "11"].iter().map(|s| s.parse().unwrap())).unwrap();
    assert_eq!(
        t.truncate(2).unwrap(),
        ClopenSet::interval("1".parse().unwrap())
    );
}
