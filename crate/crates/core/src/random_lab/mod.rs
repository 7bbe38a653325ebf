//! Random closed sets: the intersection recursion, regime classification,
//! test indices, seeded sampling and Monte Carlo checks.

mod claim;
mod recursion;
mod sampling;

pub use claim::{claim1_check, pair_intersection_probability, Claim1Report, PAIR_SUM_MAX_DEPTH};
pub use recursion::{
    classify_regime, ml_test_indices, pn_enclosure, pn_exact, symmetric_map, PnEnclosure, PnMap,
    PnSequence, Regime, RegimeReport, PN_EXACT_MAX,
};
pub use sampling::{
    count_hits, count_intersections, mc_capacity, mc_intersection, sample_tree, EstimateRecord,
    MAX_SAMPLE_DEPTH,
};
