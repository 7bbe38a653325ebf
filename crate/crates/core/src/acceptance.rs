//! The acceptance suite, shared by `caplab selftest` and the `acceptance`
//! test target. Each criterion returns an [`Outcome`] instead of panicking
//! so a run always reports every line.

use std::fmt;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cantor::{bs, BitString, ClopenSet};
use crate::capacity::{
    capacity_bruteforce, capacity_clopen, check_alternating, choquet_invert, recover_mu_star,
    UniformCapacity,
};
use crate::constructions::{
    build_measure_zero_positive_capacity, build_usc_capacity, capacity_sparse, sparse_step,
    stage_threshold, SparseConstraint, DEFAULT_LEAF_BUDGET,
};
use crate::error::Result;
use crate::measure::{lebesgue, MeasureSpec};
use crate::random_lab::{
    claim1_check, classify_regime, mc_capacity, mc_intersection, ml_test_indices,
    pair_intersection_probability, pn_enclosure, pn_exact, Regime,
};
use crate::rational::{int, pow, ratio, Rational};

const SEED: u64 = 0x5eed_cab1;

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_ms
        )
    }
}

/// Collects failures for one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn eq(&mut self, got: &Rational, want: &Rational, what: &str) {
        self.check(got == want, || format!("{what}: got {got}, want {want}"));
    }

    fn deadline(&mut self, elapsed: Duration, limit_s: u64) {
        self.check(elapsed < Duration::from_secs(limit_s), || {
            format!("took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64())
        });
    }
}

fn run(id: usize, name: &'static str, body: impl FnOnce(&mut Checks) -> Result<String>) -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let result = body(&mut checks);
    let elapsed_ms = start.elapsed().as_millis();
    let (passed, detail) = match result {
        Err(e) => (false, format!("error: {e}")),
        Ok(summary) if checks.failures.is_empty() => {
            (true, format!("{} checks; {summary}", checks.count))
        }
        Ok(_) => {
            let shown: Vec<_> = checks.failures.iter().take(5).cloned().collect();
            (
                false,
                format!(
                    "{} of {} checks failed: {}",
                    checks.failures.len(),
                    checks.count,
                    shown.join("; ")
                ),
            )
        }
    };
    Outcome {
        id,
        name,
        passed,
        detail,
        elapsed_ms,
    }
}

fn specs() -> [MeasureSpec; 3] {
    [
        MeasureSpec::symmetric(ratio(1, 3)),
        MeasureSpec::symmetric(ratio(1, 4)),
        MeasureSpec::uniform(ratio(2, 5), ratio(1, 5)),
    ]
}

/// A uniformly chosen subset of `{0,1}^d` for a random `d ≤ max_depth`.
fn random_clopen(rng: &mut ChaCha8Rng, max_depth: usize) -> ClopenSet {
    let depth = (rng.next_u32() as usize) % (max_depth + 1);
    let strings = BitString::empty().extensions(depth);
    let mask = rng.next_u64();
    let chosen = strings
        .into_iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, s)| s);
    ClopenSet::from_strings(depth, chosen)
}

pub fn oracle_capacity() -> Outcome {
    run(1, "capacity: splitting recursion = brute force", |c| {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for spec in specs() {
            for _ in 0..200 {
                let q = random_clopen(&mut rng, 3);
                let fast = capacity_clopen(&spec, &q)?;
                let slow = capacity_bruteforce(&spec, &q, 3, 3)?;
                c.check(fast == slow, || format!("{q:?}: {fast} vs {slow}"));
            }
        }
        c.deadline(start.elapsed(), 60);
        Ok("200 random sets under each of 3 specs".into())
    })
}

pub fn oracle_pn() -> Outcome {
    run(2, "p_n: recursion = exhaustive pair sum", |c| {
        for spec in specs() {
            let [b0, b1, _] = spec.weights().expect("uniform");
            let seq = pn_exact(&b0, &b1, 3)?;
            for n in 0..=3 {
                let pairs = pair_intersection_probability(&spec, n)?;
                c.eq(&seq.values[n], &pairs, &format!("p_{n} at ({b0},{b1})"));
            }
        }
        let third = pn_exact(&ratio(1, 3), &ratio(1, 3), 2)?;
        c.eq(&third.values[1], &ratio(7, 9), "p_1 at 1/3");
        c.eq(&third.values[2], &ratio(455, 729), "p_2 at 1/3");
        Ok("p_1 = 7/9, p_2 = 455/729 at b = 1/3".into())
    })
}

pub fn regimes() -> Outcome {
    run(3, "regime classification and convergence", |c| {
        let r = classify_regime(&ratio(1, 3), &ratio(1, 3))?;
        c.check(r.regime == Regime::ZeroCapacity, || {
            "(1/3,1/3) not zero-capacity".into()
        });
        let r = classify_regime(&ratio(1, 4), &ratio(1, 4))?;
        c.check(r.regime == Regime::PositiveCapacity, || {
            "(1/4,1/4) not positive".into()
        });
        c.eq(&r.fixed_point, &ratio(1, 2), "fixed point at 1/4");
        let r = classify_regime(&ratio(2, 5), &ratio(1, 5))?;
        c.check(r.regime == Regime::ZeroCapacity, || {
            "(2/5,1/5) not zero-capacity".into()
        });
        c.eq(&r.discriminant, &int(0), "discriminant at (2/5,1/5)");

        let tol = ratio(1, 1_000_000);
        let e = pn_enclosure(&ratio(1, 4), &ratio(1, 4), 200, 128)?;
        let half = ratio(1, 2);
        c.check(
            &e.upper[200] - &half < tol && &half - &e.lower[200] < tol,
            || format!("p_200 at 1/4 in [{}, {}]", e.lower[200], e.upper[200]),
        );
        let e3 = pn_enclosure(&ratio(1, 3), &ratio(1, 3), 200, 128)?;
        c.check(e3.upper[200] < ratio(1, 1000), || {
            format!("p_200 at 1/3 ≤ {}", e3.upper[200])
        });
        Ok(format!(
            "p_200 ≈ {:.9} at 1/4, ≈ {:.3e} at 1/3",
            e.approx[200], e3.approx[200]
        ))
    })
}

pub fn monte_carlo() -> Outcome {
    run(4, "Monte Carlo within 3 sigma", |c| {
        let start = Instant::now();
        let third = MeasureSpec::symmetric(ratio(1, 3));
        let pairs = mc_intersection(&third, 8, 100_000, SEED)?;
        c.check(pairs.within_three_sigma, || format!("pairs: {pairs:?}"));
        let q = ClopenSet::interval(bs("0"));
        let hits = mc_capacity(&third, &q, 100_000, SEED, 4)?;
        c.eq(&hits.exact, &ratio(2, 3), "exact T({0})");
        c.check(hits.within_three_sigma, || format!("capacity: {hits:?}"));
        c.deadline(start.elapsed(), 30);
        Ok(format!(
            "z = {:.2} for p_8, z = {:.2} for T({{0}})",
            pairs.z_score.unwrap_or(0.0),
            hits.z_score.unwrap_or(0.0)
        ))
    })
}

pub fn choquet_round_trip() -> Outcome {
    run(5, "Choquet inversion round trip", |c| {
        for spec in [specs()[0].clone(), specs()[2].clone()] {
            let cap = UniformCapacity::new(&spec)?;
            let inverted = choquet_invert(&cap, 3, 4)?;
            let MeasureSpec::Table { entries, .. } = &inverted else {
                unreachable!("inversion yields a table")
            };
            for (code, v) in entries {
                c.eq(v, &spec.mu_code(code)?, &format!("weight of {code}"));
            }
            for h in 1..=3 {
                let rec = recover_mu_star(&cap, h, 4)?;
                let mut total = Rational::zero();
                for (tree, mass) in &rec {
                    c.eq(mass, &spec.mu_star_tree(tree)?, &format!("mu* of {tree:?}"));
                    total += mass;
                }
                c.check(total.is_one(), || {
                    format!("height {h} masses sum to {total}")
                });
            }
        }
        Ok("depth 3 under (1/3,1/3) and (2/5,1/5)".into())
    })
}

pub fn capacity_axioms() -> Outcome {
    run(6, "capacity axioms", |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
        for spec in specs() {
            let cap = UniformCapacity::new(&spec)?;
            for i in 0..200 {
                let a = random_clopen(&mut rng, 3);
                let b = random_clopen(&mut rng, 3);
                let (ta, tu) = (cap.eval(&a), cap.eval(&a.union(&b)));
                c.check(ta <= tu, || {
                    format!("monotonicity fails for {a:?} ⊆ {:?}", a.union(&b))
                });
                let mut sets = vec![a, b];
                if i % 2 == 1 {
                    sets.push(random_clopen(&mut rng, 3));
                }
                let r = check_alternating(&cap, &sets)?;
                c.check(r.holds, || {
                    format!("alternating fails: {} > {}", r.lhs, r.rhs)
                });
            }
        }
        let b = ratio(1, 3);
        let cap = UniformCapacity::new(&MeasureSpec::symmetric(b.clone()))?;
        for _ in 0..50 {
            let q = random_clopen(&mut rng, 3);
            let shifted = cap.eval(&q.prefixed(&bs("0")));
            c.eq(
                &shifted,
                &((int(1) - &b) * cap.eval(&q)),
                &format!("scaling of {q:?}"),
            );
        }
        Ok("monotone and alternating on 600 tuples; scaling on 50 sets".into())
    })
}

pub fn claim1() -> Outcome {
    run(7, "Claim 1 bound", |c| {
        let spec = MeasureSpec::symmetric(ratio(1, 3));
        for m in 0..=3 {
            for n in 0..=4 {
                let r = claim1_check(&spec, m, n)?;
                c.check(r.holds, || format!("m={m}, n={n}: {} > {}", r.lhs, r.rhs));
            }
        }
        Ok("m ≤ 3, n ≤ 4 at (1/3,1/3)".into())
    })
}

pub fn ml_indices() -> Outcome {
    run(8, "test indices", |c| {
        let m = ml_test_indices(&ratio(1, 3), &ratio(1, 3), 5, 10_000)?;
        c.check(m[0] == 4, || format!("m_0 = {}", m[0]));
        c.check(m.windows(2).all(|w| w[0] <= w[1]), || {
            format!("not monotone: {m:?}")
        });
        Ok(format!("m = {m:?}"))
    })
}

pub fn usc_construction() -> Outcome {
    run(9, "nested sets tracking capacity targets", |c| {
        let start = Instant::now();
        let targets: Vec<Rational> = [(1, 1), (3, 4), (5, 8), (9, 16), (17, 32), (33, 64)]
            .iter()
            .map(|&(a, b)| ratio(a, b))
            .collect();
        let b = ratio(1, 3);
        let trace = build_usc_capacity(&b, &b, &targets, DEFAULT_LEAF_BUDGET)?;
        let cap = UniformCapacity::new(&MeasureSpec::symmetric(b.clone()))?;
        let r = int(1) - &b;
        let mut removals = 0;
        // stages[n] is the set built for target q_n.
        for n in 1..trace.stages.len() {
            let (prev, st) = (&trace.stages[n - 1], &trace.stages[n]);
            let t = cap.eval(&st.clopen);
            c.eq(&t, &st.capacity, &format!("stage {n} capacity"));
            c.check(targets[n] <= t && t <= targets[n - 1], || {
                format!(
                    "stage {n}: {t} outside [{}, {}]",
                    targets[n],
                    targets[n - 1]
                )
            });
            c.check(st.clopen.is_subset(&prev.clopen), || {
                format!("stage {n} not nested")
            });
            let leaves = prev.clopen.refine(st.s);
            let mut current = prev.clopen.clone();
            for leaf in leaves.iter().rev() {
                if st.clopen.covers(leaf) {
                    break;
                }
                let smaller = current.difference(&ClopenSet::interval(leaf.clone()));
                let drop = cap.eval(&current) - cap.eval(&smaller);
                let bound = pow(&r, leaf.len());
                c.check(drop <= bound, || {
                    format!("removing {leaf} drops {drop} > {bound}")
                });
                current = smaller;
                removals += 1;
            }
            c.check(current == st.clopen, || {
                format!("stage {n}: removals do not reach the stage set")
            });
        }
        c.check(trace.violations().is_empty(), || {
            trace.violations().join("; ")
        });
        c.deadline(start.elapsed(), 60);
        let caps: Vec<String> = trace
            .stages
            .iter()
            .map(|s| format!("{:.4}", s.approx))
            .collect();
        Ok(format!(
            "capacities [{}], {removals} removals",
            caps.join(", ")
        ))
    })
}

pub fn sparse_construction() -> Outcome {
    run(10, "measure zero with positive capacity", |c| {
        let b = ratio(1, 3);
        let res = build_measure_zero_positive_capacity(&b, 3, 256)?;
        c.check(res.indices[0] == 2, || format!("n_0 = {}", res.indices[0]));
        let iterated = sparse_step(&b, &sparse_step(&b, &(int(1) - &b)));
        c.eq(&iterated, &ratio(1760, 2187), "f(f(1 - b))");
        c.eq(&res.capacities[0], &iterated, "T(X_(2))");
        let x2 = SparseConstraint::new(vec![2])?;
        let brute = capacity_bruteforce(&MeasureSpec::symmetric(b.clone()), &x2.to_clopen(), 3, 4)?;
        c.eq(&brute, &res.capacities[0], "brute-force T(X_(2))");
        for (k, t) in res.capacities.iter().enumerate() {
            c.check(*t >= stage_threshold(k), || {
                format!("stage {k}: {t} < c_{k}")
            });
            c.check(*t > ratio(1, 2), || format!("stage {k}: {t} ≤ 1/2"));
        }
        let last = SparseConstraint::new(res.indices.clone())?;
        c.eq(
            &capacity_sparse(&b, &last)?,
            res.capacities.last().expect("K+1 stages"),
            "final capacity",
        );
        c.eq(&res.lebesgue, &ratio(1, 16), "Lebesgue measure");
        c.eq(
            &lebesgue(&last.to_clopen()),
            &ratio(1, 16),
            "Lebesgue measure of the clopen set",
        );
        Ok(format!("indices {:?}", res.indices))
    })
}

pub type Criterion = fn() -> Outcome;

pub const CRITERIA: [Criterion; 10] = [
    oracle_capacity,
    oracle_pn,
    regimes,
    monte_carlo,
    choquet_round_trip,
    capacity_axioms,
    claim1,
    ml_indices,
    usc_construction,
    sparse_construction,
];

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().map(|f| f()).collect()
}
