use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{plan_social_route, BcCache, HazardWeights, RouteError, RouteQuery};
use crate::geo::haversine_m;
use crate::graph::StreetGraph;
use crate::zones::SharedZoneSet;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchConfig {
    pub n_pairs: usize,
    /// Inclusive great-circle distance band for sampled pairs, in km.
    pub dist_range_km: (f64, f64),
    pub weights: HazardWeights,
    pub seed: u64,
    pub min_side_km: f64,
    /// Candidate draws allowed per requested pair before giving up.
    pub draws_per_pair: usize,
}

impl BatchConfig {
    pub fn new(n_pairs: usize, weights: HazardWeights, seed: u64) -> Self {
        BatchConfig {
            n_pairs,
            dist_range_km: (4.5, 6.5),
            weights,
            seed,
            min_side_km: 5.0,
            draws_per_pair: 2000,
        }
    }

    fn validate(&self) -> Result<(), RouteError> {
        let (lo, hi) = self.dist_range_km;
        if self.n_pairs == 0 {
            return Err(RouteError::Config("n_pairs must be at least 1".into()));
        }
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(RouteError::Config(format!("bad distance band {lo}:{hi}")));
        }
        if !(self.min_side_km > 0.0) {
            return Err(RouteError::Config("min_side_km must be positive".into()));
        }
        self.weights.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub index: usize,
    pub origin: String,
    pub destination: String,
    pub distance_km: f64,
    pub shortest_m: f64,
    pub new_m: f64,
    pub increment_pct: f64,
    pub weighted_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub n_pairs: usize,
    pub avg_shortest_m: f64,
    pub avg_new_m: f64,
    /// Relative difference of the two averages, in percent.
    pub increment_pct: f64,
    pub weights: HazardWeights,
    pub seed: u64,
    pub draws: usize,
    pub skipped_infeasible: usize,
    pub per_pair_records: Vec<PairRecord>,
}

/// Samples O-D pairs with the configured seed and routes each one.
///
/// Candidates are drawn sequentially from the seeded generator and routed
/// in fixed-size rounds; within a round queries run in parallel but are
/// accepted in draw order, so the result is independent of the thread count.
/// Pairs whose query is infeasible (disconnected) are skipped.
pub fn batch_experiment(
    g: &StreetGraph,
    zones: &SharedZoneSet,
    cfg: &BatchConfig,
    cache: &BcCache,
) -> Result<BatchStats, RouteError> {
    cfg.validate()?;
    if g.node_count() < 2 {
        return Err(RouteError::Config("graph needs at least two nodes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (lo_m, hi_m) = (cfg.dist_range_km.0 * 1000.0, cfg.dist_range_km.1 * 1000.0);
    let max_draws = cfg.draws_per_pair.saturating_mul(cfg.n_pairs);
    let mut draws = 0usize;
    let mut skipped = 0usize;
    let mut records: Vec<PairRecord> = Vec::with_capacity(cfg.n_pairs);

    while records.len() < cfg.n_pairs {
        let wanted = cfg.n_pairs - records.len();
        let mut round = Vec::with_capacity(wanted);
        while round.len() < wanted && draws < max_draws {
            draws += 1;
            let a = rng.random_range(0..g.node_count());
            let b = rng.random_range(0..g.node_count());
            if a == b {
                continue;
            }
            let d = haversine_m(g.location(a), g.location(b));
            if (lo_m..=hi_m).contains(&d) {
                round.push((a, b, d));
            }
        }
        if round.is_empty() {
            return Err(RouteError::TooFewPairs { found: records.len(), wanted: cfg.n_pairs, attempts: draws });
        }
        let outcomes: Vec<_> = round
            .par_iter()
            .map(|&(a, b, d)| {
                let q = RouteQuery {
                    min_side_km: cfg.min_side_km,
                    ..RouteQuery::new(g.node(a).id.clone(), g.node(b).id.clone()).with_weights(cfg.weights)
                };
                (plan_social_route(g, zones, &q, Some(cache)), d)
            })
            .collect();
        for (outcome, d) in outcomes {
            match outcome {
                Ok(r) => records.push(PairRecord {
                    index: records.len(),
                    origin: r.origin,
                    destination: r.destination,
                    distance_km: d / 1000.0,
                    shortest_m: r.shortest_length_m,
                    new_m: r.length_m,
                    increment_pct: r.increment_pct,
                    weighted_cost: r.weighted_cost,
                }),
                Err(e) if e.is_infeasible() => skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }

    let n = records.len() as f64;
    let avg_shortest_m = records.iter().map(|r| r.shortest_m).sum::<f64>() / n;
    let avg_new_m = records.iter().map(|r| r.new_m).sum::<f64>() / n;
    Ok(BatchStats {
        n_pairs: records.len(),
        avg_shortest_m,
        avg_new_m,
        increment_pct: 100.0 * (avg_new_m - avg_shortest_m) / avg_shortest_m,
        weights: cfg.weights,
        seed: cfg.seed,
        draws,
        skipped_infeasible: skipped,
        per_pair_records: records,
    })
}
