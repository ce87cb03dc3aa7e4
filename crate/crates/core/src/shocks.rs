//! Aggregate location shocks.
//!
//! Two views of the same process are provided. Each location follows a
//! two-state Normal/Shock regime chain with per-period switching probabilities
//! `eta` (Normal to Shock) and `lambda` (Shock to Normal). For scenario runs the
//! world draws at most one hit location per period: nothing with probability
//! `1 - eta`, otherwise location 0 ("East") with conditional probability `zeta`.
//!
//! All randomness enters through explicit uniform draws in `[0, 1)`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EAST: usize = 0;
pub const SOUTH: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockParams {
    pub eta: f64,
    pub lambda: f64,
    pub zeta: f64,
}

impl ShockParams {
    pub fn new(eta: f64, lambda: f64, zeta: f64) -> Result<Self> {
        let p = ShockParams { eta, lambda, zeta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eta", self.eta), ("lambda", self.lambda), ("zeta", self.zeta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(format!("{name} = {v} is not a probability")));
            }
        }
        Ok(())
    }

    /// Probability that a given location is the one hit, conditional on a shock.
    ///
    /// Location 0 carries `zeta`; the remainder is split evenly over the others.
    pub fn conditional_hit(&self, locations: usize) -> Vec<f64> {
        match locations {
            0 => Vec::new(),
            1 => vec![1.0],
            n => {
                let mut p = vec![(1.0 - self.zeta) / (n - 1) as f64; n];
                p[0] = self.zeta;
                p
            }
        }
    }

    /// Unconditional per-period probabilities `[none, hit 0, hit 1, ..]`.
    pub fn outcome_probabilities(&self, locations: usize) -> Vec<f64> {
        let hits: Vec<f64> = self
            .conditional_hit(locations)
            .into_iter()
            .map(|c| self.eta * c)
            .collect();
        let any: f64 = hits.iter().sum();
        std::iter::once(1.0 - any).chain(hits).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Normal,
    Shock,
}

impl Regime {
    pub fn step(self, params: &ShockParams, u: f64) -> Regime {
        match self {
            Regime::Normal if u < params.eta => Regime::Shock,
            Regime::Shock if u < params.lambda => Regime::Normal,
            same => same,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeState {
    pub regimes: Vec<Regime>,
    pub periods_in_state: Vec<u32>,
}

impl RegimeState {
    pub fn normal(locations: usize) -> Self {
        RegimeState {
            regimes: vec![Regime::Normal; locations],
            periods_in_state: vec![0; locations],
        }
    }
}

/// Advances every location's regime with its own uniform draw.
pub fn step_regime(state: &RegimeState, params: &ShockParams, draws: &[f64]) -> Result<RegimeState> {
    if draws.len() != state.regimes.len() {
        return Err(Error::domain(format!(
            "need {} draws, got {}",
            state.regimes.len(),
            draws.len()
        )));
    }
    let mut next = state.clone();
    for ((regime, count), &u) in next.regimes.iter_mut().zip(next.periods_in_state.iter_mut()).zip(draws) {
        let stepped = regime.step(params, u);
        *count = if stepped == *regime { *count + 1 } else { 0 };
        *regime = stepped;
    }
    Ok(next)
}

/// Long-run fraction of periods in the Shock regime, `eta / (eta + lambda)`.
pub fn stationary_share(params: &ShockParams) -> Result<f64> {
    let total = params.eta + params.lambda;
    if total <= 0.0 {
        return Err(Error::domain(
            "regime chain with eta = lambda = 0 has no unique stationary share",
        ));
    }
    Ok(params.eta / total)
}

/// Fraction of `steps` periods a single location spends in Shock, starting Normal.
pub fn simulate_occupancy<R: Rng + ?Sized>(params: &ShockParams, steps: usize, rng: &mut R) -> f64 {
    let mut regime = Regime::Normal;
    let mut shocked = 0usize;
    for _ in 0..steps {
        regime = regime.step(params, rng.gen::<f64>());
        if regime == Regime::Shock {
            shocked += 1;
        }
    }
    shocked as f64 / steps as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShockDraw {
    None,
    Hit(usize),
}

impl ShockDraw {
    pub const EAST: ShockDraw = ShockDraw::Hit(EAST);
    pub const SOUTH: ShockDraw = ShockDraw::Hit(SOUTH);

    pub fn hit_location(self) -> Option<usize> {
        match self {
            ShockDraw::None => None,
            ShockDraw::Hit(i) => Some(i),
        }
    }

    pub fn spares(self, location: usize) -> bool {
        self.hit_location() != Some(location)
    }
}

impl fmt::Display for ShockDraw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShockDraw::None => f.write_str("none"),
            ShockDraw::Hit(EAST) => f.write_str("east"),
            ShockDraw::Hit(SOUTH) => f.write_str("south"),
            ShockDraw::Hit(i) => write!(f, "location{i}"),
        }
    }
}

/// Two-location draw: East with probability `eta * zeta`, South with
/// `eta * (1 - zeta)`, otherwise no shock.
pub fn draw_shock(params: &ShockParams, u: f64) -> ShockDraw {
    draw_shock_among(params, 2, u)
}

pub fn draw_shock_among(params: &ShockParams, locations: usize, u: f64) -> ShockDraw {
    let mut cumulative = 0.0;
    for (i, p) in params.conditional_hit(locations).into_iter().enumerate() {
        cumulative += params.eta * p;
        if u < cumulative {
            return ShockDraw::Hit(i);
        }
    }
    ShockDraw::None
}

/// Active labor in the shocked period: the hit location loses its whole labor force.
pub fn apply_shock(labor: &[f64], draw: ShockDraw) -> Vec<f64> {
    labor
        .iter()
        .enumerate()
        .map(|(i, &l)| if draw.spares(i) { l } else { 0.0 })
        .collect()
}
