//! Structural parameters of the multi-location, multi-tier production economy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ADDING_UP_TOLERANCE: f64 = 1e-9;

/// Plain-data description of an economy, as written in configuration files.
///
/// Indexing conventions: `technology[i][n]` is location `i` at tier `n`,
/// `trade_cost[i][j]` is the iceberg cost of shipping from `i` to `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomySpec {
    pub technology: Vec<Vec<f64>>,
    pub labor: Vec<f64>,
    pub trade_cost: Vec<Vec<f64>>,
    pub labor_share: Vec<f64>,
    /// Tier weights in final-good value. Derived from `labor_share` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier_weight: Option<Vec<f64>>,
    pub theta: f64,
    pub sigma: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_gamma() -> f64 {
    1.0
}

/// Tier weights implied by a Cobb-Douglas chain in which tier `n` combines
/// local labor (share `alpha[n]`) with the output of tier `n - 1`.
///
/// The labor income of tier `n` is `alpha[n] * prod_{m > n} (1 - alpha[m])` of
/// final value, so `beta[n] = prod_{m > n} (1 - alpha[m])`. With `alpha[0] = 1`
/// the weighted labor shares add up to one.
pub fn chain_tier_weights(labor_share: &[f64]) -> Vec<f64> {
    let n = labor_share.len();
    let mut beta = vec![1.0; n];
    for t in (0..n.saturating_sub(1)).rev() {
        beta[t] = beta[t + 1] * (1.0 - labor_share[t + 1]);
    }
    beta
}

impl EconomySpec {
    /// Fully symmetric economy: unit technology, labor and trade costs.
    ///
    /// Tier 1 is pure labor and every later tier has labor share `alpha`.
    pub fn symmetric(locations: usize, tiers: usize, alpha: f64, theta: f64, sigma: f64) -> Self {
        let mut labor_share = vec![alpha; tiers];
        if tiers > 0 {
            labor_share[0] = 1.0;
        }
        EconomySpec {
            technology: vec![vec![1.0; tiers]; locations],
            labor: vec![1.0; locations],
            trade_cost: vec![vec![1.0; locations]; locations],
            tier_weight: Some(chain_tier_weights(&labor_share)),
            labor_share,
            theta,
            sigma,
            gamma: 1.0,
        }
    }

    /// The two-tier economy used by the sourcing counterfactuals:
    /// `alpha = (1, alpha2)` and `beta = (1 - alpha2, 1)`.
    pub fn two_tier(
        technology: Vec<[f64; 2]>,
        labor: Vec<f64>,
        trade_cost: Vec<Vec<f64>>,
        alpha2: f64,
        theta: f64,
        sigma: f64,
    ) -> Self {
        EconomySpec {
            technology: technology.into_iter().map(|t| t.to_vec()).collect(),
            labor,
            trade_cost,
            labor_share: vec![1.0, alpha2],
            tier_weight: Some(vec![1.0 - alpha2, 1.0]),
            theta,
            sigma,
            gamma: 1.0,
        }
    }
}

/// Validated economy parameters. Construct through [`EconomyParams::new`] or
/// deserialize an [`EconomySpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EconomySpec", into = "EconomySpec")]
pub struct EconomyParams {
    technology: Vec<Vec<f64>>,
    labor: Vec<f64>,
    trade_cost: Vec<Vec<f64>>,
    labor_share: Vec<f64>,
    tier_weight: Vec<f64>,
    theta: f64,
    sigma: f64,
    gamma: f64,
}

impl TryFrom<EconomySpec> for EconomyParams {
    type Error = Error;

    fn try_from(spec: EconomySpec) -> Result<Self> {
        EconomyParams::new(spec)
    }
}

impl From<EconomyParams> for EconomySpec {
    fn from(p: EconomyParams) -> Self {
        EconomySpec {
            technology: p.technology,
            labor: p.labor,
            trade_cost: p.trade_cost,
            labor_share: p.labor_share,
            tier_weight: Some(p.tier_weight),
            theta: p.theta,
            sigma: p.sigma,
            gamma: p.gamma,
        }
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

impl EconomyParams {
    pub fn new(spec: EconomySpec) -> Result<Self> {
        let j = spec.labor.len();
        let n = spec.labor_share.len();
        if j == 0 {
            return Err(Error::domain("economy needs at least one location"));
        }
        if n == 0 {
            return Err(Error::domain("economy needs at least one tier"));
        }
        let tier_weight = spec
            .tier_weight
            .unwrap_or_else(|| chain_tier_weights(&spec.labor_share));
        if tier_weight.len() != n {
            return Err(Error::domain(format!(
                "tier_weight has {} entries, labor_share has {n}",
                tier_weight.len()
            )));
        }
        if spec.technology.len() != j || spec.technology.iter().any(|row| row.len() != n) {
            return Err(Error::domain(format!("technology must be {j} x {n}")));
        }
        if spec.trade_cost.len() != j || spec.trade_cost.iter().any(|row| row.len() != j) {
            return Err(Error::domain(format!("trade_cost must be {j} x {j}")));
        }
        if !spec.technology.iter().flatten().all(|&t| positive(t)) {
            return Err(Error::domain("technology levels must be strictly positive"));
        }
        if !spec.labor.iter().all(|&l| positive(l)) {
            return Err(Error::domain("labor endowments must be strictly positive"));
        }
        for (i, row) in spec.trade_cost.iter().enumerate() {
            for (k, &tau) in row.iter().enumerate() {
                if !(tau.is_finite() && tau >= 1.0) {
                    return Err(Error::domain(format!("trade_cost[{i}][{k}] = {tau} is below 1")));
                }
            }
            if row[i] != 1.0 {
                return Err(Error::domain(format!("trade_cost[{i}][{i}] must be 1")));
            }
        }
        if !spec.labor_share.iter().all(|&a| a > 0.0 && a <= 1.0) {
            return Err(Error::domain("labor shares must lie in (0, 1]"));
        }
        if !tier_weight.iter().all(|&b| b.is_finite() && b >= 0.0) {
            return Err(Error::domain("tier weights must be nonnegative"));
        }
        let adding_up: f64 = spec.labor_share.iter().zip(&tier_weight).map(|(a, b)| a * b).sum();
        if (adding_up - 1.0).abs() > ADDING_UP_TOLERANCE {
            return Err(Error::domain(format!(
                "weighted labor shares sum to {adding_up}, expected 1"
            )));
        }
        if !positive(spec.theta) {
            return Err(Error::domain("theta must be positive"));
        }
        if !(spec.sigma.is_finite() && spec.sigma > 1.0) {
            return Err(Error::domain("sigma must exceed 1"));
        }
        if spec.sigma - 1.0 >= spec.theta {
            return Err(Error::domain(format!(
                "price index undefined: sigma - 1 = {} is not below theta = {}",
                spec.sigma - 1.0,
                spec.theta
            )));
        }
        if !(spec.gamma > 0.0 && spec.gamma <= 1.0) {
            return Err(Error::domain("gamma must lie in (0, 1]"));
        }
        Ok(EconomyParams {
            technology: spec.technology,
            labor: spec.labor,
            trade_cost: spec.trade_cost,
            labor_share: spec.labor_share,
            tier_weight,
            theta: spec.theta,
            sigma: spec.sigma,
            gamma: spec.gamma,
        })
    }

    pub fn locations(&self) -> usize {
        self.labor.len()
    }

    pub fn tiers(&self) -> usize {
        self.labor_share.len()
    }

    pub fn technology(&self, location: usize, tier: usize) -> f64 {
        self.technology[location][tier]
    }

    pub fn labor(&self) -> &[f64] {
        &self.labor
    }

    pub fn trade_cost(&self, from: usize, to: usize) -> f64 {
        self.trade_cost[from][to]
    }

    pub fn labor_share(&self) -> &[f64] {
        &self.labor_share
    }

    pub fn tier_weight(&self) -> &[f64] {
        &self.tier_weight
    }

    /// `alpha[n] * beta[n]`: share of final value paid to tier-`n` labor.
    pub fn value_added_share(&self, tier: usize) -> f64 {
        self.labor_share[tier] * self.tier_weight[tier]
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn check_location(&self, index: usize) -> Result<()> {
        if index < self.locations() {
            Ok(())
        } else {
            Err(Error::LocationOutOfRange {
                index,
                count: self.locations(),
            })
        }
    }

    /// Returns a copy with different labor endowments.
    pub fn with_labor(&self, labor: Vec<f64>) -> Result<Self> {
        let mut spec = EconomySpec::from(self.clone());
        spec.labor = labor;
        EconomyParams::new(spec)
    }

    /// Returns a copy with one technology level replaced.
    pub fn with_technology(&self, location: usize, tier: usize, value: f64) -> Result<Self> {
        self.check_location(location)?;
        let mut spec = EconomySpec::from(self.clone());
        *spec
            .technology
            .get_mut(location)
            .and_then(|row| row.get_mut(tier))
            .ok_or_else(|| Error::domain(format!("tier {tier} out of range")))? = value;
        EconomyParams::new(spec)
    }

    /// Returns a copy with all off-diagonal trade costs set to `tau`.
    pub fn with_uniform_trade_cost(&self, tau: f64) -> Result<Self> {
        let mut spec = EconomySpec::from(self.clone());
        for (i, row) in spec.trade_cost.iter_mut().enumerate() {
            for (k, t) in row.iter_mut().enumerate() {
                *t = if i == k { 1.0 } else { tau };
            }
        }
        EconomyParams::new(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_weights_for_two_tiers() {
        assert_eq!(chain_tier_weights(&[1.0, 0.4]), vec![0.6, 1.0]);
        let beta = chain_tier_weights(&[1.0, 0.5, 0.25]);
        assert_eq!(beta, vec![0.375, 0.75, 1.0]);
        let total: f64 = [1.0, 0.5, 0.25].iter().zip(&beta).map(|(a, b)| a * b).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_theta_below_sigma_minus_one() {
        let spec = EconomySpec::symmetric(2, 2, 0.5, 0.9, 2.0);
        assert!(matches!(EconomyParams::new(spec), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_trade_costs() {
        let mut spec = EconomySpec::symmetric(2, 1, 0.5, 4.0, 2.0);
        spec.trade_cost[0][1] = 0.9;
        assert!(EconomyParams::new(spec.clone()).is_err());
        spec.trade_cost[0][1] = 1.0;
        spec.trade_cost[1][1] = 1.1;
        assert!(EconomyParams::new(spec).is_err());
    }

    #[test]
    fn rejects_weights_that_do_not_add_up() {
        let mut spec = EconomySpec::symmetric(2, 2, 0.5, 4.0, 2.0);
        spec.tier_weight = Some(vec![1.0, 1.0]);
        assert!(EconomyParams::new(spec).is_err());
    }

    #[test]
    fn rejects_nonpositive_primitives() {
        let mut spec = EconomySpec::symmetric(2, 2, 0.5, 4.0, 2.0);
        spec.labor[1] = 0.0;
        assert!(EconomyParams::new(spec).is_err());
        let mut spec = EconomySpec::symmetric(2, 2, 0.5, 4.0, 2.0);
        spec.technology[0][1] = -1.0;
        assert!(EconomyParams::new(spec).is_err());
    }

    #[test]
    fn serde_round_trip_validates() {
        let params = EconomyParams::new(EconomySpec::symmetric(2, 2, 0.5, 4.0, 2.0)).unwrap();
        let json = serde_json::to_string(&params).unwrap();
        let back: EconomyParams = serde_json::from_str(&json).unwrap();
        assert_eq!(params, back);

        let bad = json.replace("\"sigma\":2.0", "\"sigma\":9.0");
        assert!(serde_json::from_str::<EconomyParams>(&bad).is_err());
    }

    #[test]
    fn tier_weight_defaults_from_labor_share() {
        let json = r#"{"technology":[[1,1]],"labor":[1],"trade_cost":[[1]],
            "labor_share":[1,0.3],"theta":4,"sigma":2}"#;
        let params: EconomyParams = serde_json::from_str(json).unwrap();
        assert_eq!(params.tier_weight(), &[0.7, 1.0]);
        assert_eq!(params.gamma(), 1.0);
    }
}
