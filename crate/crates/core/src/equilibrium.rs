//! Wage fixed point of the multi-tier economy.
//!
//! Labor market clearing in location `i`:
//!
//! ```text
//! w_i L_i = sum_j sum_n alpha_n beta_n Pr(l^n = i | j) w_j L_j
//! ```
//!
//! where the participation probabilities come from path shares evaluated at
//! composite costs `c_i = w_i^gamma P_i^{1 - gamma}`. Each solver iterate tries
//! a Newton step on log relative wages with a backtracking line search and
//! falls back to a damped fixed-point update when that fails to reduce the
//! residual. World income stays at the configured target throughout.

use serde::{Deserialize, Serialize};

use crate::economy::EconomyParams;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::trade::ChainModel;

const COST_TOLERANCE: f64 = 1e-15;
const COST_MAX_ITERATIONS: usize = 10_000;
const MIN_DAMPING: f64 = 1e-6;
const JACOBIAN_STEP: f64 = 1e-6;
const LINE_SEARCH_STEPS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WageVector {
    pub values: Vec<f64>,
    /// Target of `sum_i w_i L_i`.
    pub world_income: f64,
}

impl WageVector {
    /// Rescales `values` so that world income equals `world_income`.
    pub fn normalized(mut values: Vec<f64>, labor: &[f64], world_income: f64) -> Result<Self> {
        if values.len() != labor.len() || !values.iter().all(|w| w.is_finite() && *w > 0.0) {
            return Err(Error::domain("wages must be strictly positive, one per location"));
        }
        let income: f64 = values.iter().zip(labor).map(|(w, l)| w * l).sum();
        let scale = world_income / income;
        values.iter_mut().for_each(|w| *w *= scale);
        Ok(WageVector { values, world_income })
    }

    pub fn uniform(labor: &[f64], world_income: f64) -> Self {
        let total: f64 = labor.iter().sum();
        WageVector {
            values: vec![world_income / total; labor.len()],
            world_income,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Bound on the largest labor-market residual, in units of world income.
    pub tolerance: f64,
    pub damping: f64,
    pub max_iterations: usize,
    pub world_income: f64,
    /// Starting wages; uniform when absent.
    pub initial_wages: Option<Vec<f64>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-10,
            damping: 0.5,
            max_iterations: 10_000,
            world_income: 1.0,
            initial_wages: None,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("solver tolerance must be positive"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::domain("damping must lie in (0, 1]"));
        }
        if !(self.world_income.is_finite() && self.world_income > 0.0) {
            return Err(Error::domain("world income target must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub wages: WageVector,
    pub prices: Vec<f64>,
    pub composite_costs: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl EquilibriumSolution {
    pub fn real_wages(&self) -> Vec<f64> {
        self.wages.values.iter().zip(&self.prices).map(|(w, p)| w / p).collect()
    }

    /// Nominal spending `w_j L_j` per location.
    pub fn spending(&self, params: &EconomyParams) -> Vec<f64> {
        self.wages
            .values
            .iter()
            .zip(params.labor())
            .map(|(w, l)| w * l)
            .collect()
    }

    /// World real income `sum_j w_j L_j / P_j`.
    pub fn real_income(&self, params: &EconomyParams) -> f64 {
        self.spending(params).iter().zip(&self.prices).map(|(x, p)| x / p).sum()
    }

    pub fn chain_model<'a>(&self, params: &'a EconomyParams) -> Result<ChainModel<'a>> {
        ChainModel::new(params, &self.composite_costs)
    }
}

/// Composite costs and prices consistent with `wages`.
pub fn composite_costs(wages: &[f64], params: &EconomyParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let gamma = params.gamma();
    if gamma == 1.0 {
        let model = ChainModel::new(params, wages)?;
        return Ok((wages.to_vec(), model.price_indices()));
    }
    let mut costs = wages.to_vec();
    for _ in 0..COST_MAX_ITERATIONS {
        let prices = ChainModel::new(params, &costs)?.price_indices();
        let next: Vec<f64> = wages
            .iter()
            .zip(&prices)
            .map(|(w, p)| w.powf(gamma) * p.powf(1.0 - gamma))
            .collect();
        let gap = next
            .iter()
            .zip(&costs)
            .map(|(a, b)| (a / b).ln().abs())
            .fold(0.0, f64::max);
        costs = next;
        if gap <= COST_TOLERANCE {
            let prices = ChainModel::new(params, &costs)?.price_indices();
            return Ok((costs, prices));
        }
    }
    Err(Error::NoConvergence {
        iterations: COST_MAX_ITERATIONS,
        residual: f64::NAN,
    })
}

struct Evaluation {
    costs: Vec<f64>,
    prices: Vec<f64>,
    /// Labor income each location earns from world spending.
    earnings: Vec<f64>,
}

fn evaluate(wages: &[f64], params: &EconomyParams) -> Result<Evaluation> {
    let (costs, prices) = composite_costs(wages, params)?;
    let model = ChainModel::new(params, &costs)?;
    let j = params.locations();
    let mut earnings = vec![0.0; j];
    for (dest, (&w, &l)) in wages.iter().zip(params.labor()).enumerate() {
        let spending = w * l;
        let participation = model.tier_participation(dest)?;
        for (n, row) in participation.iter().enumerate() {
            let share = params.value_added_share(n);
            for (i, p) in row.iter().enumerate() {
                earnings[i] += share * p * spending;
            }
        }
    }
    Ok(Evaluation {
        costs,
        prices,
        earnings,
    })
}

/// `RHS_i - w_i L_i` of the labor-market clearing conditions.
pub fn labor_market_residuals(wages: &[f64], params: &EconomyParams) -> Result<Vec<f64>> {
    if wages.len() != params.locations() || !wages.iter().all(|w| w.is_finite() && *w > 0.0) {
        return Err(Error::domain("wages must be strictly positive, one per location"));
    }
    let eval = evaluate(wages, params)?;
    Ok(eval
        .earnings
        .iter()
        .zip(wages.iter().zip(params.labor()))
        .map(|(e, (w, l))| e - w * l)
        .collect())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, r| f64::max(m, r.abs()))
}

fn scaled_wages(wages: &[f64], log_step: &[f64], t: f64) -> Vec<f64> {
    wages
        .iter()
        .enumerate()
        .map(|(i, w)| if i == 0 { *w } else { w * (t * log_step[i - 1]).exp() })
        .collect()
}

/// Newton step on `ln(w_i / w_0)`, `i >= 1`. Residuals are homogeneous of
/// degree one in wages and add up to zero, so location 0 is dropped.
fn newton_step(wages: &WageVector, residuals: &[f64], params: &EconomyParams) -> Option<WageVector> {
    let j = wages.values.len();
    if j < 2 {
        return None;
    }
    let m = j - 1;
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for b in 0..m {
        let mut step = vec![0.0; m];
        step[b] = JACOBIAN_STEP;
        let up = labor_market_residuals(&scaled_wages(&wages.values, &step, 1.0), params).ok()?;
        let down = labor_market_residuals(&scaled_wages(&wages.values, &step, -1.0), params).ok()?;
        for a in 0..m {
            jac[(a, b)] = (up[a + 1] - down[a + 1]) / (2.0 * JACOBIAN_STEP);
        }
    }
    let rhs = DVector::from_iterator(m, residuals[1..].iter().map(|r| -r));
    let delta = jac.lu().solve(&rhs)?;
    if !delta.iter().all(|d| d.is_finite()) {
        return None;
    }
    let current = max_abs(residuals);
    let mut t = 1.0;
    for _ in 0..LINE_SEARCH_STEPS {
        let trial = scaled_wages(&wages.values, delta.as_slice(), t);
        if let Ok(next) = WageVector::normalized(trial, params.labor(), wages.world_income) {
            if let Ok(r) = labor_market_residuals(&next.values, params) {
                if max_abs(&r) < current {
                    return Some(next);
                }
            }
        }
        t *= 0.5;
    }
    None
}

/// Snapshot of one solver iterate, passed to observers.
#[derive(Debug, Clone)]
pub struct Iterate<'a> {
    pub iteration: usize,
    pub wages: &'a [f64],
    pub residuals: &'a [f64],
    pub damping: f64,
}

pub fn solve_equilibrium(params: &EconomyParams, config: &SolverConfig) -> Result<EquilibriumSolution> {
    solve_equilibrium_observed(params, config, |_| {})
}

/// [`solve_equilibrium`] with a callback invoked at every iterate.
pub fn solve_equilibrium_observed(
    params: &EconomyParams,
    config: &SolverConfig,
    mut observe: impl FnMut(&Iterate<'_>),
) -> Result<EquilibriumSolution> {
    config.validate()?;
    let labor = params.labor();
    let target = config.world_income;
    let mut wages = match &config.initial_wages {
        Some(w) => WageVector::normalized(w.clone(), labor, target)?,
        None => WageVector::uniform(labor, target),
    };
    let mut damping = config.damping;
    let mut previous = f64::INFINITY;
    let mut residual_norm = f64::INFINITY;

    for iteration in 0..=config.max_iterations {
        let eval = evaluate(&wages.values, params)?;
        let residuals: Vec<f64> = eval
            .earnings
            .iter()
            .zip(wages.values.iter().zip(labor))
            .map(|(e, (w, l))| e - w * l)
            .collect();
        residual_norm = max_abs(&residuals) / target;
        observe(&Iterate {
            iteration,
            wages: &wages.values,
            residuals: &residuals,
            damping,
        });
        if residual_norm <= config.tolerance {
            return Ok(EquilibriumSolution {
                wages,
                prices: eval.prices,
                composite_costs: eval.costs,
                residual_norm,
                iterations: iteration,
            });
        }
        if iteration == config.max_iterations {
            break;
        }
        if let Some(next) = newton_step(&wages, &residuals, params) {
            wages = next;
            continue;
        }
        // overshooting: the update map is not a contraction at this step size
        if residual_norm > previous {
            damping = f64::max(damping * 0.5, MIN_DAMPING);
        }
        previous = residual_norm;
        let next: Vec<f64> = wages
            .values
            .iter()
            .zip(eval.earnings.iter().zip(labor))
            .map(|(w, (e, l))| (1.0 - damping) * w + damping * e / l)
            .collect();
        wages = WageVector::normalized(next, labor, target)?;
    }
    Err(Error::NoConvergence {
        iterations: config.max_iterations,
        residual: residual_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::EconomySpec;
    use approx::assert_relative_eq;

    fn symmetric() -> EconomyParams {
        EconomyParams::new(EconomySpec::symmetric(2, 2, 0.5, 4.0, 2.0)).unwrap()
    }

    #[test]
    fn symmetric_residuals_vanish_at_uniform_wages() {
        let r = labor_market_residuals(&[0.5, 0.5], &symmetric()).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn residuals_add_up_to_zero() {
        let params = EconomyParams::new(EconomySpec::two_tier(
            vec![[1.3, 0.8], [0.7, 1.9]],
            vec![2.0, 0.5],
            vec![vec![1.0, 1.4], vec![1.1, 1.0]],
            0.35,
            5.0,
            3.0,
        ))
        .unwrap();
        for wages in [[0.1, 3.0], [0.5, 0.5], [2.0, 0.01]] {
            let r = labor_market_residuals(&wages, &params).unwrap();
            assert!(r.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn better_technology_attracts_spending() {
        let params = symmetric().with_technology(0, 0, 1.1).unwrap();
        let r = labor_market_residuals(&[0.5, 0.5], &params).unwrap();
        assert!(r[0] > 0.0);
        assert!(r[1] < 0.0);
    }

    #[test]
    fn symmetric_equilibrium_has_equal_wages() {
        let sol = solve_equilibrium(&symmetric(), &SolverConfig::default()).unwrap();
        assert_relative_eq!(sol.wages.values[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(sol.wages.values[1], 0.5, epsilon = 1e-12);
        assert_eq!(sol.composite_costs, sol.wages.values);
    }

    #[test]
    fn solution_is_idempotent() {
        let params = symmetric().with_labor(vec![1.0, 3.0]).unwrap();
        let sol = solve_equilibrium(&params, &SolverConfig::default()).unwrap();
        let again = solve_equilibrium(
            &params,
            &SolverConfig {
                initial_wages: Some(sol.wages.values.clone()),
                ..SolverConfig::default()
            },
        )
        .unwrap();
        assert!(again.iterations <= 2);
    }

    #[test]
    fn roundabout_costs_converge() {
        let mut spec = EconomySpec::symmetric(3, 2, 0.6, 4.0, 2.5);
        spec.gamma = 0.4;
        spec.technology[2] = vec![1.5, 0.7];
        spec.trade_cost = vec![vec![1.0, 1.3, 1.6], vec![1.2, 1.0, 1.1], vec![1.5, 1.4, 1.0]];
        let params = EconomyParams::new(spec).unwrap();
        let sol = solve_equilibrium(&params, &SolverConfig::default()).unwrap();
        assert!(sol.residual_norm <= 1e-10);
        for i in 0..3 {
            let expect = sol.wages.values[i].powf(0.4) * sol.prices[i].powf(0.6);
            assert_relative_eq!(sol.composite_costs[i], expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn high_dispersion_converges_with_adaptive_damping() {
        let params = EconomyParams::new(EconomySpec::two_tier(
            vec![[1.0, 1.0], [2.0, 1.5]],
            vec![1.0, 1.0],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            0.5,
            12.0,
            2.0,
        ))
        .unwrap();
        let sol = solve_equilibrium(&params, &SolverConfig::default()).unwrap();
        assert!(sol.residual_norm <= 1e-10);
    }

    #[test]
    fn non_convergence_is_reported() {
        let params = symmetric().with_labor(vec![1.0, 5.0]).unwrap();
        let err = solve_equilibrium(
            &params,
            &SolverConfig {
                max_iterations: 1,
                ..SolverConfig::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 1, residual } if residual > 0.0));
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = SolverConfig {
            damping: 0.0,
            ..SolverConfig::default()
        };
        assert!(solve_equilibrium(&symmetric(), &cfg).is_err());
    }
}
