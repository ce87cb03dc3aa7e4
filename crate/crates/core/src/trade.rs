//! Static trade-and-production model: chain cost scales, path shares, price
//! indices and their aggregations by location and tier.
//!
//! A production path `l = (l^1, .., l^N)` assigns a location to every tier.
//! Serving destination `j` through `l` has scale
//!
//! ```text
//! prod_n [ (T_{l^n}^n)^{alpha_n} ((c_{l^n})^{alpha_n} tau_{l^n, l^{n+1}})^{-theta} ]^{beta_n}
//! ```
//!
//! with `l^{N+1} = j`. Path shares are scales over their sum across all `J^N`
//! paths. Aggregates over paths are evaluated exactly with forward and backward
//! sweeps across tiers, so no `J^N` enumeration is needed except where a caller
//! asks for the per-path table.

use statrs::function::gamma::gamma;

use crate::economy::EconomyParams;
use crate::error::{Error, Result};

/// Maximum number of paths produced by explicit enumeration.
pub const MAX_ENUMERATED_PATHS: u128 = 1_000_000;

/// Assignment of a location to every production tier, upstream first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathIndex(pub Vec<usize>);

impl PathIndex {
    pub fn tiers(&self) -> &[usize] {
        &self.0
    }

    /// Location of the most downstream tier.
    pub fn last(&self) -> usize {
        *self.0.last().expect("paths have at least one tier")
    }
}

/// All `J^N` paths in lexicographic order (tier 1 varies slowest).
pub fn enumerate_paths(locations: usize, tiers: usize) -> Result<Vec<PathIndex>> {
    let count = (locations as u128).checked_pow(tiers as u32).unwrap_or(u128::MAX);
    if count > MAX_ENUMERATED_PATHS {
        return Err(Error::TooManyPaths {
            count,
            limit: MAX_ENUMERATED_PATHS,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0usize; tiers];
    for _ in 0..count {
        out.push(PathIndex(current.clone()));
        for slot in current.iter_mut().rev() {
            *slot += 1;
            if *slot < locations {
                break;
            }
            *slot = 0;
        }
    }
    Ok(out)
}

/// `kappa = Gamma((theta + 1 - sigma) / theta)^(1 / (1 - sigma))`.
pub fn kappa(theta: f64, sigma: f64) -> f64 {
    gamma((theta + 1.0 - sigma) / theta).powf(1.0 / (1.0 - sigma))
}

/// The model evaluated at a fixed vector of composite costs.
///
/// Holds the per-tier transition matrices `M_n[i][k] = f_n(i) * tau_{ik}^{-theta beta_n}`
/// whose ordered product sums chain scales over paths.
#[derive(Debug, Clone)]
pub struct ChainModel<'a> {
    params: &'a EconomyParams,
    /// `hops[n][i][k]`
    hops: Vec<Vec<Vec<f64>>>,
}

impl<'a> ChainModel<'a> {
    pub fn new(params: &'a EconomyParams, costs: &[f64]) -> Result<Self> {
        let j = params.locations();
        if costs.len() != j {
            return Err(Error::domain(format!(
                "expected {j} composite costs, got {}",
                costs.len()
            )));
        }
        if !costs.iter().all(|c| c.is_finite() && *c > 0.0) {
            return Err(Error::domain("composite costs must be strictly positive"));
        }
        let theta = params.theta();
        let hops = (0..params.tiers())
            .map(|n| {
                let alpha = params.labor_share()[n];
                let beta = params.tier_weight()[n];
                (0..j)
                    .map(|i| {
                        let own = (params.technology(i, n).powf(alpha) * costs[i].powf(-theta * alpha)).powf(beta);
                        (0..j)
                            .map(|k| own * params.trade_cost(i, k).powf(-theta * beta))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(ChainModel { params, hops })
    }

    pub fn params(&self) -> &EconomyParams {
        self.params
    }

    fn check_path(&self, path: &PathIndex) -> Result<()> {
        if path.0.len() != self.params.tiers() {
            return Err(Error::domain(format!(
                "path has {} tiers, economy has {}",
                path.0.len(),
                self.params.tiers()
            )));
        }
        path.0.iter().try_for_each(|&l| self.params.check_location(l))
    }

    /// Scale of one path serving `dest`.
    pub fn chain_cost_scale(&self, path: &PathIndex, dest: usize) -> Result<f64> {
        self.check_path(path)?;
        self.params.check_location(dest)?;
        let tiers = path.tiers();
        Ok((0..tiers.len())
            .map(|n| {
                let next = tiers.get(n + 1).copied().unwrap_or(dest);
                self.hops[n][tiers[n]][next]
            })
            .product())
    }

    /// `upstream[n][i]`: summed scale of all partial paths through tiers `1..n`
    /// that deliver into location `i` at tier `n`.
    fn upstream(&self) -> Vec<Vec<f64>> {
        let j = self.params.locations();
        let mut out = Vec::with_capacity(self.params.tiers());
        let mut acc = vec![1.0; j];
        for hop in &self.hops {
            out.push(acc.clone());
            acc = (0..j).map(|k| (0..j).map(|i| acc[i] * hop[i][k]).sum()).collect();
        }
        out
    }

    /// `downstream[n][i]`: summed scale from location `i` at tier `n` through
    /// delivery to `dest`.
    fn downstream(&self, dest: usize) -> Vec<Vec<f64>> {
        let j = self.params.locations();
        let tiers = self.params.tiers();
        let mut out = vec![Vec::new(); tiers];
        let mut acc: Vec<f64> = (0..j).map(|i| self.hops[tiers - 1][i][dest]).collect();
        out[tiers - 1] = acc.clone();
        for n in (0..tiers - 1).rev() {
            acc = (0..j)
                .map(|i| (0..j).map(|k| self.hops[n][i][k] * acc[k]).sum())
                .collect();
            out[n] = acc.clone();
        }
        out
    }

    /// Sum of chain scales over every path serving `dest`.
    pub fn total_scale(&self, dest: usize) -> Result<f64> {
        self.params.check_location(dest)?;
        Ok(self.downstream(dest)[0].iter().sum())
    }

    pub fn path_share(&self, path: &PathIndex, dest: usize) -> Result<f64> {
        Ok(self.chain_cost_scale(path, dest)? / self.total_scale(dest)?)
    }

    /// Shares of every path in [`enumerate_paths`] order.
    pub fn path_shares(&self, dest: usize) -> Result<Vec<(PathIndex, f64)>> {
        let total = self.total_scale(dest)?;
        enumerate_paths(self.params.locations(), self.params.tiers())?
            .into_iter()
            .map(|p| {
                let s = self.chain_cost_scale(&p, dest)? / total;
                Ok((p, s))
            })
            .collect()
    }

    pub fn price_index(&self, dest: usize) -> Result<f64> {
        let theta = self.params.theta();
        Ok(kappa(theta, self.params.sigma()) * self.total_scale(dest)?.powf(-1.0 / theta))
    }

    pub fn price_indices(&self) -> Vec<f64> {
        (0..self.params.locations())
            .map(|j| self.price_index(j).expect("index in range"))
            .collect()
    }

    /// `participation[n][i]`: share of `dest`'s spending on paths with location
    /// `i` at tier `n`.
    pub fn tier_participation(&self, dest: usize) -> Result<Vec<Vec<f64>>> {
        self.params.check_location(dest)?;
        let up = self.upstream();
        let down = self.downstream(dest);
        let total: f64 = down[0].iter().sum();
        Ok(up
            .iter()
            .zip(&down)
            .map(|(u, d)| u.iter().zip(d).map(|(a, b)| a * b / total).collect())
            .collect())
    }

    /// Share of `dest`'s spending on chains whose last tier is in `src`.
    pub fn final_demand_share(&self, src: usize, dest: usize) -> Result<f64> {
        self.params.check_location(src)?;
        let tiers = self.params.tiers();
        Ok(self.tier_participation(dest)?[tiers - 1][src])
    }

    /// Value of intermediate deliveries from `src` to tier producers in `dest`,
    /// per unit of final spending, in every final market.
    ///
    /// A tier-`n` delivery carries the cumulative value share
    /// `sum_{m <= n} alpha_m beta_m` of the chain's final value. Final markets are
    /// weighted by `spending`.
    fn intermediate_flows(&self, spending: &[f64]) -> Result<Vec<Vec<f64>>> {
        let j = self.params.locations();
        let tiers = self.params.tiers();
        if tiers < 2 {
            return Err(Error::domain("intermediate flows need at least two tiers"));
        }
        if spending.len() != j || !spending.iter().all(|x| x.is_finite() && *x >= 0.0) {
            return Err(Error::domain(format!("spending must be {j} nonnegative values")));
        }
        let up = self.upstream();
        let mut cumulative = 0.0;
        let embodied: Vec<f64> = (0..tiers)
            .map(|n| {
                cumulative += self.params.value_added_share(n);
                cumulative
            })
            .collect();
        let mut flows = vec![vec![0.0; j]; j];
        for (market, &weight) in spending.iter().enumerate() {
            if weight == 0.0 {
                continue;
            }
            let down = self.downstream(market);
            let total: f64 = down[0].iter().sum();
            for n in 0..tiers - 1 {
                for (i, row) in flows.iter_mut().enumerate() {
                    for (k, cell) in row.iter_mut().enumerate() {
                        *cell += weight * embodied[n] * up[n][i] * self.hops[n][i][k] * down[n + 1][k] / total;
                    }
                }
            }
        }
        Ok(flows)
    }

    /// Share of `dest`'s intermediate purchases sourced from `src`.
    pub fn intermediate_flow_share(&self, src: usize, dest: usize, spending: &[f64]) -> Result<f64> {
        self.params.check_location(src)?;
        self.params.check_location(dest)?;
        let flows = self.intermediate_flows(spending)?;
        let column: f64 = flows.iter().map(|row| row[dest]).sum();
        if column <= 0.0 {
            return Err(Error::domain(format!("location {dest} purchases no intermediates")));
        }
        Ok(flows[src][dest] / column)
    }

    /// Real cost `c_j / P_j` recovered from the share of purely local chains.
    pub fn local_chain_real_wage(&self, j: usize, local_share: f64) -> Result<f64> {
        local_chain_real_wage(j, self.params, local_share)
    }
}

/// `c_j / P_j` from the share `pi_jj` of spending on chains that run every tier
/// in `j` and deliver to `j`:
///
/// ```text
/// (kappa tau_jj^{sum beta})^{-1} (prod_n (T_j^n)^{alpha_n beta_n} / pi_jj)^{1/theta}
/// ```
///
/// With `gamma = 1` composite costs are wages and this is the real wage.
pub fn local_chain_real_wage(j: usize, params: &EconomyParams, local_share: f64) -> Result<f64> {
    params.check_location(j)?;
    if !(local_share > 0.0 && local_share <= 1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "local chain share {local_share} must lie in (0, 1]"
        )));
    }
    let local_share = local_share.min(1.0);
    let theta = params.theta();
    let beta_sum: f64 = params.tier_weight().iter().sum();
    let tech: f64 = (0..params.tiers())
        .map(|n| params.technology(j, n).powf(params.value_added_share(n)))
        .product();
    let k = kappa(theta, params.sigma()) * params.trade_cost(j, j).powf(beta_sum);
    Ok((tech / local_share).powf(1.0 / theta) / k)
}

/// Fréchet CDF of a path's chain-level productivity:
/// `exp(-z^{-theta} prod_n (T_{l^n}^n)^{alpha_n beta_n})`.
pub fn chain_productivity_cdf(z: f64, path: &PathIndex, params: &EconomyParams) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain(format!("productivity level {z} must be positive")));
    }
    chain_productivity_cdf_with_shape(z, path, params, params.theta())
}

/// Same as [`chain_productivity_cdf`] with an explicit Fréchet shape.
pub fn chain_productivity_cdf_with_shape(z: f64, path: &PathIndex, params: &EconomyParams, theta: f64) -> Result<f64> {
    if path.0.len() != params.tiers() {
        return Err(Error::domain("path length does not match tier count"));
    }
    let mut location = 1.0;
    for (n, &l) in path.0.iter().enumerate() {
        params.check_location(l)?;
        location *= params.technology(l, n).powf(params.value_added_share(n));
    }
    Ok((-z.powf(-theta) * location).exp())
}

/// One numerator term of the path share. See [`ChainModel::chain_cost_scale`].
pub fn chain_cost_scale(path: &PathIndex, dest: usize, params: &EconomyParams, costs: &[f64]) -> Result<f64> {
    ChainModel::new(params, costs)?.chain_cost_scale(path, dest)
}

pub fn path_share(path: &PathIndex, dest: usize, params: &EconomyParams, costs: &[f64]) -> Result<f64> {
    ChainModel::new(params, costs)?.path_share(path, dest)
}

pub fn price_index(dest: usize, params: &EconomyParams, costs: &[f64]) -> Result<f64> {
    ChainModel::new(params, costs)?.price_index(dest)
}

pub fn final_demand_share(src: usize, dest: usize, params: &EconomyParams, costs: &[f64]) -> Result<f64> {
    ChainModel::new(params, costs)?.final_demand_share(src, dest)
}

pub fn intermediate_flow_share(
    src: usize,
    dest: usize,
    params: &EconomyParams,
    costs: &[f64],
    spending: &[f64],
) -> Result<f64> {
    ChainModel::new(params, costs)?.intermediate_flow_share(src, dest, spending)
}
