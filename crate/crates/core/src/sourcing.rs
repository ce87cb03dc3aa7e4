//! Supplier sourcing rules and the value of a sourcing allocation.
//!
//! An allocation places a fraction of each tier's `M` suppliers in every
//! location. Integer supplier counts come from largest-remainder rounding, so
//! they always add up to `M`. A location hit by an aggregate shock loses all its
//! suppliers for the period; the chain produces only if every tier keeps at
//! least one supplier. Surviving varieties are combined with the CES aggregator
//! within a tier and Cobb-Douglas (weights `alpha_n beta_n`) across tiers.
//!
//! Three decision rules are provided:
//!
//! * individual firms each pick the location with the best expected
//!   continuation value, ignoring the survival of the chain;
//! * a risk-averse planner maximizes CRRA expected utility of chain value;
//! * an ambiguity-averse planner maximizes the worst case of that expected
//!   utility over an interval of beliefs about where the shock lands.
//!
//! Planners search a grid of South shares (the same share at every tier).
//! Grid points that round to the same supplier counts score identically; such
//! ties go to the share closest to an even split, then to the smaller share.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::economy::EconomyParams;
use crate::equilibrium::EquilibriumSolution;
use crate::error::{Error, Result};
use crate::shocks::{ShockDraw, ShockParams, EAST, SOUTH};

pub const DEFAULT_GRID: usize = 1001;
pub const MIN_GRID: usize = 101;

const FRACTION_TOLERANCE: f64 = 1e-9;
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourcingAllocation {
    /// `fractions[i][n]`: share of tier-`n` suppliers located in `i`.
    fractions: Vec<Vec<f64>>,
    /// Supplier count per tier.
    suppliers: Vec<u32>,
}

impl SourcingAllocation {
    pub fn new(fractions: Vec<Vec<f64>>, suppliers: Vec<u32>) -> Result<Self> {
        let tiers = suppliers.len();
        if fractions.is_empty() || tiers == 0 {
            return Err(Error::domain("allocation needs at least one location and tier"));
        }
        if fractions.iter().any(|row| row.len() != tiers) {
            return Err(Error::domain(format!("every location needs {tiers} tier fractions")));
        }
        if suppliers.contains(&0) {
            return Err(Error::domain("every tier needs at least one supplier"));
        }
        for n in 0..tiers {
            let mut total = 0.0;
            for row in &fractions {
                let f = row[n];
                if !(0.0..=1.0).contains(&f) {
                    return Err(Error::domain(format!("fraction {f} outside [0, 1]")));
                }
                total += f;
            }
            if (total - 1.0).abs() > FRACTION_TOLERANCE {
                return Err(Error::domain(format!("tier {n} fractions sum to {total}")));
            }
        }
        Ok(SourcingAllocation { fractions, suppliers })
    }

    /// Two locations, share `south` of every tier's suppliers in South.
    pub fn two_location(south: f64, tiers: usize, suppliers: u32) -> Result<Self> {
        let mut fractions = vec![vec![1.0 - south; tiers], vec![south; tiers]];
        fractions[EAST].iter_mut().for_each(|f| *f = f.max(0.0));
        SourcingAllocation::new(fractions, vec![suppliers; tiers])
    }

    /// All suppliers in `location`.
    pub fn corner(location: usize, locations: usize, tiers: usize, suppliers: u32) -> Result<Self> {
        if location >= locations {
            return Err(Error::LocationOutOfRange {
                index: location,
                count: locations,
            });
        }
        let fractions = (0..locations)
            .map(|i| vec![if i == location { 1.0 } else { 0.0 }; tiers])
            .collect();
        SourcingAllocation::new(fractions, vec![suppliers; tiers])
    }

    pub fn locations(&self) -> usize {
        self.fractions.len()
    }

    pub fn tiers(&self) -> usize {
        self.suppliers.len()
    }

    pub fn fraction(&self, location: usize, tier: usize) -> f64 {
        self.fractions[location][tier]
    }

    pub fn suppliers(&self) -> &[u32] {
        &self.suppliers
    }

    /// South share of the most upstream tier (two-location allocations).
    pub fn south_share(&self) -> f64 {
        self.fractions.get(SOUTH).map_or(0.0, |row| row[0])
    }

    /// `counts[i][n]`: integer suppliers per location and tier.
    pub fn counts(&self) -> Vec<Vec<u32>> {
        let j = self.locations();
        let mut counts = vec![vec![0; self.tiers()]; j];
        for (n, &m) in self.suppliers.iter().enumerate() {
            let column: Vec<f64> = self.fractions.iter().map(|row| row[n]).collect();
            for (i, c) in apportion(&column, m).into_iter().enumerate() {
                counts[i][n] = c;
            }
        }
        counts
    }

    /// Supplier counts that remain active under `shock`.
    pub fn surviving_counts(&self, shock: ShockDraw) -> Vec<Vec<u32>> {
        let mut counts = self.counts();
        if let Some(hit) = shock.hit_location() {
            if let Some(row) = counts.get_mut(hit) {
                row.iter_mut().for_each(|c| *c = 0);
            }
        }
        counts
    }
}

/// Largest-remainder rounding of `fractions * m` to integers summing to `m`.
///
/// Equal remainders go to the larger fraction, then the lower index. Every
/// location with a positive fraction receives at least one supplier when `m`
/// allows it, taken from the location furthest above its quota among those
/// with two or more.
pub fn apportion(fractions: &[f64], m: u32) -> Vec<u32> {
    let quotas: Vec<f64> = fractions.iter().map(|f| f * m as f64).collect();
    let mut counts: Vec<u32> = quotas.iter().map(|q| (q + FRACTION_TOLERANCE).floor() as u32).collect();
    let assigned: u32 = counts.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    let remainder = |i: usize| quotas[i] - counts[i] as f64;
    order.sort_by(|&a, &b| {
        let (ra, rb) = (remainder(a), remainder(b));
        if (ra - rb).abs() > FRACTION_TOLERANCE {
            rb.partial_cmp(&ra).unwrap_or(Ordering::Equal)
        } else {
            fractions[b]
                .partial_cmp(&fractions[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        }
    });
    for &i in order.iter().take(m.saturating_sub(assigned) as usize) {
        counts[i] += 1;
    }
    let positive = fractions.iter().filter(|&&f| f > 0.0).count() as u32;
    if positive <= m {
        for i in 0..fractions.len() {
            if fractions[i] > 0.0 && counts[i] == 0 {
                let excess = |j: usize| counts[j] as f64 - quotas[j];
                let donor = (0..counts.len())
                    .filter(|&j| counts[j] >= 2)
                    .max_by(|&a, &b| {
                        excess(a)
                            .partial_cmp(&excess(b))
                            .unwrap_or(Ordering::Equal)
                            .then(b.cmp(&a))
                    })
                    .expect("positive <= m leaves a location with two or more");
                counts[donor] -= 1;
                counts[i] = 1;
            }
        }
    }
    counts
}

/// Whether every tier keeps at least one active supplier under `shock`.
pub fn chain_survives(alloc: &SourcingAllocation, shock: ShockDraw) -> bool {
    let counts = alloc.surviving_counts(shock);
    (0..alloc.tiers()).all(|n| counts.iter().map(|row| row[n]).sum::<u32>() >= 1)
}

/// CES aggregate `(sum_k q_k^{(sigma-1)/sigma})^{sigma/(sigma-1)}`.
pub fn ces_aggregate(quantities: &[f64], sigma: f64) -> f64 {
    let rho = (sigma - 1.0) / sigma;
    quantities.iter().map(|q| q.powf(rho)).sum::<f64>().powf(1.0 / rho)
}

/// Belief interval for the conditional probability that East is hit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefSet {
    pub zeta_lo: f64,
    pub zeta_hi: f64,
    /// Arrival probability, treated as known.
    pub eta_known: f64,
}

impl BeliefSet {
    pub fn new(zeta_lo: f64, zeta_hi: f64, eta_known: f64) -> Result<Self> {
        let b = BeliefSet {
            zeta_lo,
            zeta_hi,
            eta_known,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn singleton(zeta: f64, eta: f64) -> Result<Self> {
        BeliefSet::new(zeta, zeta, eta)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = 0.0..=1.0;
        if !(unit.contains(&self.zeta_lo) && unit.contains(&self.zeta_hi) && unit.contains(&self.eta_known)) {
            return Err(Error::domain("belief bounds must be probabilities"));
        }
        if self.zeta_lo > self.zeta_hi {
            return Err(Error::domain(format!(
                "empty belief set [{}, {}]",
                self.zeta_lo, self.zeta_hi
            )));
        }
        Ok(())
    }
}

/// Constant relative risk aversion `U(V) = V^{1-rho} / (1-rho)`, `ln V` at `rho = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilitySpec {
    pub rho: f64,
}

impl Default for UtilitySpec {
    fn default() -> Self {
        UtilitySpec { rho: 2.0 }
    }
}

impl UtilitySpec {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(Error::domain(format!("risk aversion {rho} must be nonnegative")));
        }
        Ok(UtilitySpec { rho })
    }

    /// Utility of a nonnegative value; `-inf` at zero when `rho >= 1`.
    pub fn utility(&self, value: f64) -> f64 {
        let rho = self.rho;
        if value <= 0.0 {
            return if rho >= 1.0 { f64::NEG_INFINITY } else { 0.0 };
        }
        if rho == 1.0 {
            value.ln()
        } else {
            value.powf(1.0 - rho) / (1.0 - rho)
        }
    }
}

/// Planner objective at one allocation.
///
/// Ordered by `expected` utility. When both sides are `-inf`, ranks by the
/// number of shock states in which the chain survives, then by expected value
/// over those states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Score {
    pub expected: f64,
    pub survived: usize,
    pub survived_value: f64,
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.expected == f64::NEG_INFINITY && other.expected == f64::NEG_INFINITY {
            Some(
                self.survived
                    .cmp(&other.survived)
                    .then(self.survived_value.partial_cmp(&other.survived_value)?),
            )
        } else {
            self.expected.partial_cmp(&other.expected)
        }
    }
}

impl Score {
    fn better_than(&self, other: &Score) -> Option<bool> {
        let both_finite = self.expected.is_finite() && other.expected.is_finite();
        if both_finite {
            let scale = self.expected.abs().max(other.expected.abs()).max(f64::MIN_POSITIVE);
            if (self.expected - other.expected).abs() <= TIE_TOLERANCE * scale {
                return None;
            }
        }
        match self.partial_cmp(other) {
            Some(Ordering::Greater) => Some(true),
            Some(Ordering::Less) => Some(false),
            _ => None,
        }
    }
}

/// Everything the decision rules need about the economy: per-variety
/// efficiencies, tier weights, shock process and supplier counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourcingProblem {
    pub sigma: f64,
    /// `alpha_n beta_n` per tier.
    pub tier_weights: Vec<f64>,
    /// `efficiency[i][n]`: output per unit of spending of a tier-`n` variety from `i`.
    pub efficiency: Vec<Vec<f64>>,
    pub shocks: ShockParams,
    pub suppliers: u32,
}

impl SourcingProblem {
    /// Variety efficiency `T_i^n^{1/theta} / c_i` at equilibrium composite costs.
    pub fn from_equilibrium(
        params: &EconomyParams,
        solution: &EquilibriumSolution,
        shocks: ShockParams,
        suppliers: u32,
    ) -> Result<Self> {
        let theta = params.theta();
        let efficiency = (0..params.locations())
            .map(|i| {
                (0..params.tiers())
                    .map(|n| params.technology(i, n).powf(1.0 / theta) / solution.composite_costs[i])
                    .collect()
            })
            .collect();
        let tier_weights = (0..params.tiers()).map(|n| params.value_added_share(n)).collect();
        SourcingProblem::new(params.sigma(), tier_weights, efficiency, shocks, suppliers)
    }

    pub fn new(
        sigma: f64,
        tier_weights: Vec<f64>,
        efficiency: Vec<Vec<f64>>,
        shocks: ShockParams,
        suppliers: u32,
    ) -> Result<Self> {
        shocks.validate()?;
        if !(sigma > 1.0) {
            return Err(Error::domain("sigma must exceed 1"));
        }
        if suppliers == 0 {
            return Err(Error::domain("need at least one supplier per tier"));
        }
        let tiers = tier_weights.len();
        if tiers == 0 || efficiency.is_empty() || efficiency.iter().any(|r| r.len() != tiers) {
            return Err(Error::domain("efficiency must be locations x tiers"));
        }
        if !efficiency.iter().flatten().all(|q| q.is_finite() && *q > 0.0) {
            return Err(Error::domain("variety efficiencies must be positive"));
        }
        Ok(SourcingProblem {
            sigma,
            tier_weights,
            efficiency,
            shocks,
            suppliers,
        })
    }

    pub fn locations(&self) -> usize {
        self.efficiency.len()
    }

    pub fn tiers(&self) -> usize {
        self.tier_weights.len()
    }

    fn check(&self, alloc: &SourcingAllocation) -> Result<()> {
        if alloc.locations() != self.locations() || alloc.tiers() != self.tiers() {
            return Err(Error::domain(format!(
                "allocation is {}x{}, problem is {}x{}",
                alloc.locations(),
                alloc.tiers(),
                self.locations(),
                self.tiers()
            )));
        }
        Ok(())
    }

    /// Chain output from the varieties surviving `shock`; zero if a tier is empty.
    pub fn allocation_value(&self, alloc: &SourcingAllocation, shock: ShockDraw) -> Result<f64> {
        self.check(alloc)?;
        if let Some(hit) = shock.hit_location() {
            if hit >= self.locations() {
                return Err(Error::LocationOutOfRange {
                    index: hit,
                    count: self.locations(),
                });
            }
        }
        Ok(self.value_of_counts(&alloc.surviving_counts(shock)))
    }

    fn value_of_counts(&self, counts: &[Vec<u32>]) -> f64 {
        let mut value = 1.0;
        for (n, weight) in self.tier_weights.iter().enumerate() {
            let varieties: Vec<f64> = counts
                .iter()
                .zip(&self.efficiency)
                .flat_map(|(row, q)| std::iter::repeat_n(q[n], row[n] as usize))
                .collect();
            if varieties.is_empty() {
                return 0.0;
            }
            value *= ces_aggregate(&varieties, self.sigma).powf(*weight);
        }
        value
    }

    /// Upper bound on chain value (all suppliers at the best efficiency), used
    /// to normalize values before applying utility.
    fn value_scale(&self) -> f64 {
        self.tier_weights
            .iter()
            .enumerate()
            .map(|(n, weight)| {
                let best = self.efficiency.iter().map(|q| q[n]).fold(0.0, f64::max);
                ces_aggregate(&vec![best; self.suppliers as usize], self.sigma).powf(*weight)
            })
            .product()
    }

    /// Expected continuation value of one supplier from `location` at `tier`.
    pub fn individual_value(&self, location: usize, tier: usize) -> f64 {
        let hit = self.shocks.conditional_hit(self.locations());
        (1.0 - self.shocks.eta * hit[location]) * self.efficiency[location][tier]
    }

    /// Expected-utility score of `alloc` when East is hit with conditional probability `zeta`.
    pub fn expected_score(
        &self,
        alloc: &SourcingAllocation,
        utility: &UtilitySpec,
        eta: f64,
        zeta: f64,
    ) -> Result<Score> {
        self.check(alloc)?;
        if self.locations() != 2 {
            return Err(Error::domain("planner objectives are defined for two locations"));
        }
        let scale = self.value_scale();
        let branches = [
            (ShockDraw::None, 1.0 - eta),
            (ShockDraw::EAST, eta * zeta),
            (ShockDraw::SOUTH, eta * (1.0 - zeta)),
        ];
        let mut score = Score {
            expected: 0.0,
            survived: 0,
            survived_value: 0.0,
        };
        for (draw, p) in branches {
            if p <= 0.0 {
                continue;
            }
            let v = self.value_of_counts(&alloc.surviving_counts(draw)) / scale;
            score.expected += p * utility.utility(v);
            if v > 0.0 {
                if draw != ShockDraw::None {
                    score.survived += 1;
                }
                score.survived_value += p * v;
            }
        }
        Ok(score)
    }

    /// Worst-case score over the belief interval. Expected utility is linear in
    /// `zeta`, so the worst case sits at an endpoint.
    pub fn worst_case_score(
        &self,
        alloc: &SourcingAllocation,
        utility: &UtilitySpec,
        beliefs: &BeliefSet,
    ) -> Result<Score> {
        let lo = self.expected_score(alloc, utility, beliefs.eta_known, beliefs.zeta_lo)?;
        let hi = self.expected_score(alloc, utility, beliefs.eta_known, beliefs.zeta_hi)?;
        Ok(match lo.partial_cmp(&hi) {
            Some(Ordering::Greater) => hi,
            _ => lo,
        })
    }

    pub fn grid_allocation(&self, south: f64) -> Result<SourcingAllocation> {
        SourcingAllocation::two_location(south, self.tiers(), self.suppliers)
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub south: f64,
    pub score: Score,
}

pub fn grid_shares(resolution: usize) -> Result<Vec<f64>> {
    if resolution < MIN_GRID {
        return Err(Error::domain(format!(
            "grid resolution {resolution} below the minimum of {MIN_GRID}"
        )));
    }
    let last = (resolution - 1) as f64;
    Ok((0..resolution).map(|k| k as f64 / last).collect())
}

/// Scores every grid share with `objective`.
pub fn sweep(
    problem: &SourcingProblem,
    resolution: usize,
    mut objective: impl FnMut(&SourcingAllocation) -> Result<Score>,
) -> Result<Vec<GridPoint>> {
    grid_shares(resolution)?
        .into_iter()
        .map(|south| {
            let alloc = problem.grid_allocation(south)?;
            Ok(GridPoint {
                south,
                score: objective(&alloc)?,
            })
        })
        .collect()
}

/// Best grid point with ties broken toward an even split, then the smaller share.
pub fn best_point(points: &[GridPoint]) -> Option<GridPoint> {
    let mut best: Option<GridPoint> = None;
    for &p in points {
        best = Some(match best {
            None => p,
            Some(b) => match p.score.better_than(&b.score) {
                Some(true) => p,
                Some(false) => b,
                None => {
                    if (p.south - 0.5).abs() < (b.south - 0.5).abs() - TIE_TOLERANCE {
                        p
                    } else {
                        b
                    }
                }
            },
        });
    }
    best
}

/// Each firm picks the location with the highest expected continuation value;
/// exact ties split the tier evenly among the tied locations.
pub fn individual_sourcing(problem: &SourcingProblem) -> Result<SourcingAllocation> {
    let j = problem.locations();
    let tiers = problem.tiers();
    let mut fractions = vec![vec![0.0; tiers]; j];
    for n in 0..tiers {
        let values: Vec<f64> = (0..j).map(|i| problem.individual_value(i, n)).collect();
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = (0..j)
            .filter(|&i| (best - values[i]).abs() <= TIE_TOLERANCE * best.abs())
            .collect();
        for &i in &tied {
            fractions[i][n] = 1.0 / tied.len() as f64;
        }
    }
    SourcingAllocation::new(fractions, vec![problem.suppliers; tiers])
}

pub fn planner_risk_sweep(
    problem: &SourcingProblem,
    utility: &UtilitySpec,
    resolution: usize,
) -> Result<Vec<GridPoint>> {
    let (eta, zeta) = (problem.shocks.eta, problem.shocks.zeta);
    sweep(problem, resolution, |a| problem.expected_score(a, utility, eta, zeta))
}

pub fn planner_ambiguity_sweep(
    problem: &SourcingProblem,
    beliefs: &BeliefSet,
    utility: &UtilitySpec,
    resolution: usize,
) -> Result<Vec<GridPoint>> {
    beliefs.validate()?;
    sweep(problem, resolution, |a| problem.worst_case_score(a, utility, beliefs))
}

/// Expected-utility maximizing South share under the known shock distribution.
pub fn planner_risk_sourcing(
    problem: &SourcingProblem,
    utility: &UtilitySpec,
    resolution: usize,
) -> Result<SourcingAllocation> {
    let best = best_point(&planner_risk_sweep(problem, utility, resolution)?).expect("grid is nonempty");
    problem.grid_allocation(best.south)
}

/// Max-min South share over the belief interval.
pub fn planner_ambiguity_sourcing(
    problem: &SourcingProblem,
    beliefs: &BeliefSet,
    utility: &UtilitySpec,
    resolution: usize,
) -> Result<SourcingAllocation> {
    let points = planner_ambiguity_sweep(problem, beliefs, utility, resolution)?;
    let best = best_point(&points).expect("grid is nonempty");
    problem.grid_allocation(best.south)
}

/// Free-function form of [`SourcingProblem::allocation_value`] evaluated at an
/// equilibrium of `params`.
pub fn allocation_value(
    alloc: &SourcingAllocation,
    shock: ShockDraw,
    params: &EconomyParams,
    solution: &EquilibriumSolution,
) -> Result<f64> {
    let suppliers = alloc.suppliers().iter().copied().max().unwrap_or(1);
    let problem = SourcingProblem::from_equilibrium(params, solution, ShockParams::new(0.0, 0.0, 0.5)?, suppliers)?;
    problem.allocation_value(alloc, shock)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn symmetric_problem(eta: f64, zeta: f64, m: u32) -> SourcingProblem {
        SourcingProblem::new(
            2.0,
            vec![0.5, 0.5],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            ShockParams::new(eta, 1.0, zeta).unwrap(),
            m,
        )
        .unwrap()
    }

    #[test]
    fn ces_examples() {
        assert_relative_eq!(ces_aggregate(&[1.0; 4], 2.0), 16.0, max_relative = 1e-15);
        assert_relative_eq!(ces_aggregate(&[1.0], 2.0), 1.0);
        assert_relative_eq!(ces_aggregate(&[1.0], 5.0), 1.0);
    }

    #[test]
    fn apportion_keeps_totals() {
        assert_eq!(apportion(&[0.5, 0.5], 10), vec![5, 5]);
        assert_eq!(apportion(&[0.55, 0.45], 10), vec![6, 4]);
        assert_eq!(apportion(&[0.35, 0.65], 10), vec![3, 7]);
        assert_eq!(apportion(&[0.999, 0.001], 10), vec![9, 1]);
        assert_eq!(apportion(&[1.0, 0.0], 10), vec![10, 0]);
        assert_eq!(apportion(&[0.5, 0.5], 1), vec![1, 0]);
        assert_eq!(apportion(&[0.2, 0.3, 0.5], 3), vec![1, 1, 1]);
        for k in 0..=1000 {
            let s = k as f64 / 1000.0;
            let c = apportion(&[1.0 - s, s], 7);
            assert_eq!(c.iter().sum::<u32>(), 7);
        }
    }

    #[test]
    fn survival_rules() {
        let south = SourcingAllocation::corner(SOUTH, 2, 2, 10).unwrap();
        assert!(chain_survives(&south, ShockDraw::None));
        assert!(chain_survives(&south, ShockDraw::EAST));
        assert!(!chain_survives(&south, ShockDraw::SOUTH));
        let even = SourcingAllocation::two_location(0.5, 2, 2).unwrap();
        assert!(chain_survives(&even, ShockDraw::EAST));
        assert!(chain_survives(&even, ShockDraw::SOUTH));
    }

    #[test]
    fn values_of_surviving_varieties() {
        let p = symmetric_problem(0.5, 0.9, 4);
        let east = SourcingAllocation::corner(EAST, 2, 2, 4).unwrap();
        // four unit varieties per tier: 16 per tier, Cobb-Douglas of equal tiers
        assert_relative_eq!(
            p.allocation_value(&east, ShockDraw::None).unwrap(),
            16.0,
            max_relative = 1e-14
        );
        assert_eq!(p.allocation_value(&east, ShockDraw::EAST).unwrap(), 0.0);
        let one = symmetric_problem(0.5, 0.9, 1);
        let single = SourcingAllocation::corner(SOUTH, 2, 2, 1).unwrap();
        assert_relative_eq!(one.allocation_value(&single, ShockDraw::None).unwrap(), 1.0);
    }

    #[test]
    fn value_increases_with_surviving_varieties() {
        let p = symmetric_problem(0.5, 0.9, 10);
        let mut last = 0.0;
        for k in 1..=10 {
            let alloc = SourcingAllocation::two_location(k as f64 / 10.0, 2, 10).unwrap();
            let v = p.allocation_value(&alloc, ShockDraw::EAST).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn allocation_shape_is_checked() {
        let p = symmetric_problem(0.5, 0.9, 4);
        let wrong = SourcingAllocation::corner(0, 3, 2, 4).unwrap();
        assert!(p.allocation_value(&wrong, ShockDraw::None).is_err());
        assert!(SourcingAllocation::new(vec![vec![0.5], vec![0.6]], vec![3]).is_err());
        assert!(SourcingAllocation::new(vec![vec![0.5], vec![0.5]], vec![0]).is_err());
    }

    #[test]
    fn individual_rule_goes_to_the_safer_location() {
        let south = individual_sourcing(&symmetric_problem(0.5, 0.9, 10)).unwrap();
        assert_eq!(south.south_share(), 1.0);
        assert_eq!(south.fraction(SOUTH, 1), 1.0);
        let east = individual_sourcing(&symmetric_problem(0.5, 0.1, 10)).unwrap();
        assert_eq!(east.fraction(EAST, 0), 1.0);
        let split = individual_sourcing(&symmetric_problem(0.5, 0.5, 10)).unwrap();
        assert_eq!(split.south_share(), 0.5);
    }

    #[test]
    fn risk_neutral_planner_matches_individual() {
        let p = symmetric_problem(0.5, 0.9, 10);
        let planner = planner_risk_sourcing(&p, &UtilitySpec::new(0.0).unwrap(), DEFAULT_GRID).unwrap();
        assert_eq!(planner.south_share(), individual_sourcing(&p).unwrap().south_share());
    }

    #[test]
    fn risk_averse_planner_diversifies() {
        let p = symmetric_problem(0.5, 0.9, 10);
        let alloc = planner_risk_sourcing(&p, &UtilitySpec::new(2.0).unwrap(), DEFAULT_GRID).unwrap();
        let s = alloc.south_share();
        assert!(s > 0.5 && s < 1.0, "south share {s}");
        let counts = alloc.counts();
        assert_eq!((counts[EAST][0], counts[SOUTH][0]), (3, 7));
    }

    #[test]
    fn extreme_risk_aversion_splits_evenly() {
        let p = symmetric_problem(0.5, 0.9, 10);
        let alloc = planner_risk_sourcing(&p, &UtilitySpec::new(50.0).unwrap(), DEFAULT_GRID).unwrap();
        assert!((alloc.south_share() - 0.5).abs() <= 1.0 / 1000.0);
    }

    #[test]
    fn ambiguity_planner_splits_evenly() {
        let p = symmetric_problem(0.5, 0.9, 10);
        let u = UtilitySpec::new(2.0).unwrap();
        for (lo, hi) in [(0.0, 1.0), (0.2, 0.8)] {
            let b = BeliefSet::new(lo, hi, 0.5).unwrap();
            assert_eq!(
                planner_ambiguity_sourcing(&p, &b, &u, DEFAULT_GRID)
                    .unwrap()
                    .south_share(),
                0.5
            );
        }
    }

    #[test]
    fn singleton_beliefs_reduce_to_risk() {
        let p = symmetric_problem(0.5, 0.9, 10);
        for rho in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let u = UtilitySpec::new(rho).unwrap();
            let b = BeliefSet::singleton(0.9, 0.5).unwrap();
            let amb = planner_ambiguity_sourcing(&p, &b, &u, DEFAULT_GRID).unwrap();
            let risk = planner_risk_sourcing(&p, &u, DEFAULT_GRID).unwrap();
            assert_eq!(amb, risk, "rho {rho}");
        }
    }

    #[test]
    fn log_utility_with_certain_loss_uses_lexicographic_order() {
        // one supplier per tier: every allocation loses the chain in some state
        let p = symmetric_problem(1.0, 0.9, 1);
        let u = UtilitySpec::new(1.0).unwrap();
        let points = planner_risk_sweep(&p, &u, MIN_GRID).unwrap();
        assert!(points.iter().all(|pt| pt.score.expected == f64::NEG_INFINITY));
        let best = best_point(&points).unwrap();
        // surviving the likelier East shock means sourcing in South
        assert_eq!(best.score.survived, 1);
        assert!(best.south > 0.5);
    }

    #[test]
    fn utility_values() {
        let u = UtilitySpec::new(2.0).unwrap();
        assert_relative_eq!(u.utility(2.0), -0.5);
        assert_eq!(u.utility(0.0), f64::NEG_INFINITY);
        assert_eq!(UtilitySpec::new(0.0).unwrap().utility(0.0), 0.0);
        assert_relative_eq!(UtilitySpec::new(1.0).unwrap().utility(std::f64::consts::E), 1.0);
        assert!(UtilitySpec::new(-1.0).is_err());
    }

    #[test]
    fn grid_and_beliefs_validation() {
        assert!(grid_shares(100).is_err());
        assert_eq!(grid_shares(101).unwrap()[50], 0.5);
        assert!(BeliefSet::new(0.6, 0.4, 0.5).is_err());
        assert!(BeliefSet::new(0.0, 1.2, 0.5).is_err());
    }
}
