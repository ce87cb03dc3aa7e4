#![allow(dead_code)]

use std::path::PathBuf;

use chainrisk::economy::{chain_tier_weights, EconomySpec};
use chainrisk::trade::PathIndex;
use chainrisk::EconomyParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// Random valid economy with `locations` x `tiers` entries drawn from `seed`.
pub fn random_spec(seed: u64, locations: usize, tiers: usize) -> EconomySpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = rng.gen_range(1.2..4.0);
    let theta = rng.gen_range((sigma - 1.0 + 0.5)..10.0);
    let mut labor_share: Vec<f64> = (0..tiers).map(|_| rng.gen_range(0.2..0.9)).collect();
    labor_share[0] = 1.0;
    EconomySpec {
        technology: (0..locations)
            .map(|_| (0..tiers).map(|_| rng.gen_range(0.3..3.0)).collect())
            .collect(),
        labor: (0..locations).map(|_| rng.gen_range(0.5..2.0)).collect(),
        trade_cost: (0..locations)
            .map(|i| {
                (0..locations)
                    .map(|k| if i == k { 1.0 } else { rng.gen_range(1.0..2.5) })
                    .collect()
            })
            .collect(),
        tier_weight: Some(chain_tier_weights(&labor_share)),
        labor_share,
        theta,
        sigma,
        gamma: 1.0,
    }
}

pub fn random_params(seed: u64, locations: usize, tiers: usize) -> EconomyParams {
    EconomyParams::new(random_spec(seed, locations, tiers)).expect("valid random economy")
}

pub fn random_costs(seed: u64, locations: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    (0..locations).map(|_| rng.gen_range(0.3..3.0)).collect()
}

/// Path scale written out term by term, independent of the library's sweeps.
pub fn oracle_scale(params: &EconomyParams, costs: &[f64], path: &[usize], dest: usize) -> f64 {
    let theta = params.theta();
    let mut scale = 1.0;
    for n in 0..path.len() {
        let here = path[n];
        let next = if n + 1 < path.len() { path[n + 1] } else { dest };
        let alpha = params.labor_share()[n];
        let beta = params.tier_weight()[n];
        let term = params.technology(here, n).powf(alpha)
            * (costs[here].powf(alpha) * params.trade_cost(here, next)).powf(-theta);
        scale *= term.powf(beta);
    }
    scale
}

/// All paths by nested counting, independent of the library's enumerator.
pub fn oracle_paths(locations: usize, tiers: usize) -> Vec<Vec<usize>> {
    let total = locations.pow(tiers as u32);
    (0..total)
        .map(|mut k| {
            let mut p = vec![0; tiers];
            for slot in p.iter_mut().rev() {
                *slot = k % locations;
                k /= locations;
            }
            p
        })
        .collect()
}

pub fn path(p: &[usize]) -> PathIndex {
    PathIndex(p.to_vec())
}

pub fn gamma_fn(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Two-location single-tier equilibrium by bisection on the relative wage.
///
/// Returns wages normalized to unit world income and the price indices.
pub fn oracle_single_tier(params: &EconomyParams) -> (Vec<f64>, Vec<f64>) {
    assert_eq!((params.locations(), params.tiers()), (2, 1));
    let theta = params.theta();
    let labor = params.labor();
    let shares = |w: &[f64]| -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut pi = vec![vec![0.0; 2]; 2];
        let mut totals = vec![0.0; 2];
        for j in 0..2 {
            let terms: Vec<f64> = (0..2)
                .map(|i| params.technology(i, 0) * (w[i] * params.trade_cost(i, j)).powf(-theta))
                .collect();
            totals[j] = terms.iter().sum();
            for i in 0..2 {
                pi[i][j] = terms[i] / totals[j];
            }
        }
        (pi, totals)
    };
    let normalize = |omega: f64| {
        let s = labor[0] + omega * labor[1];
        vec![1.0 / s, omega / s]
    };
    let excess = |omega: f64| {
        let w = normalize(omega);
        let (pi, _) = shares(&w);
        pi[0][0] * w[0] * labor[0] + pi[0][1] * w[1] * labor[1] - w[0] * labor[0]
    };
    let (mut lo, mut hi) = (1e-6_f64, 1e6_f64);
    for _ in 0..300 {
        let mid = (lo * hi).sqrt();
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let w = normalize((lo * hi).sqrt());
    let (_, totals) = shares(&w);
    let sigma = params.sigma();
    let kappa = gamma_fn((theta + 1.0 - sigma) / theta).powf(1.0 / (1.0 - sigma));
    let prices = totals.iter().map(|t| kappa * t.powf(-1.0 / theta)).collect();
    (w, prices)
}
