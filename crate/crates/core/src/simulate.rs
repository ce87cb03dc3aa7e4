//! Scenario engine: scripted shock realizations over a horizon, the
//! realization-by-information matrix, and Monte Carlo survival estimates.
//!
//! Each period the configured decision rule fixes the allocation at the start
//! of the period, the realization (scripted at `shock_period`) removes the hit
//! location's labor for that period only, and the surviving suppliers produce.
//! The decision problem is stationary, so the allocation chosen in period 1 is
//! the allocation of every period.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::economy::EconomyParams;
use crate::equilibrium::{solve_equilibrium, EquilibriumSolution, SolverConfig};
use crate::error::{Error, Result};
use crate::shocks::{apply_shock, draw_shock, ShockDraw, ShockParams, EAST, SOUTH};
use crate::sourcing::{
    chain_survives, individual_sourcing, planner_ambiguity_sourcing, planner_risk_sourcing, BeliefSet,
    SourcingAllocation, SourcingProblem, UtilitySpec, DEFAULT_GRID,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfoEnv {
    Risk,
    Ambiguity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionMode {
    Individual,
    Planner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Realization {
    None,
    East,
    South,
}

impl InfoEnv {
    pub const ALL: [InfoEnv; 2] = [InfoEnv::Risk, InfoEnv::Ambiguity];
}

impl Realization {
    pub const ALL: [Realization; 3] = [Realization::None, Realization::East, Realization::South];

    pub fn draw(self) -> ShockDraw {
        match self {
            Realization::None => ShockDraw::None,
            Realization::East => ShockDraw::EAST,
            Realization::South => ShockDraw::SOUTH,
        }
    }
}

impl fmt::Display for InfoEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfoEnv::Risk => "risk",
            InfoEnv::Ambiguity => "ambiguity",
        })
    }
}

impl fmt::Display for DecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecisionMode::Individual => "individual",
            DecisionMode::Planner => "planner",
        })
    }
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.draw().fmt(f)
    }
}

/// Belief interval as written in configuration; the arrival probability
/// defaults to the scenario's `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefConfig {
    pub zeta_lo: f64,
    pub zeta_hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_known: Option<f64>,
}

impl Default for BeliefConfig {
    fn default() -> Self {
        BeliefConfig {
            zeta_lo: 0.0,
            zeta_hi: 1.0,
            eta_known: None,
        }
    }
}

fn default_shock_period() -> usize {
    10
}

fn default_horizon() -> usize {
    20
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub info_env: InfoEnv,
    pub decision_mode: DecisionMode,
    pub realization: Realization,
    #[serde(default = "default_shock_period")]
    pub shock_period: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Suppliers per tier.
    pub suppliers: u32,
    pub shocks: ShockParams,
    pub economy: EconomyParams,
    #[serde(default)]
    pub utility: UtilitySpec,
    #[serde(default)]
    pub beliefs: BeliefConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shock_period < 1 || self.shock_period > self.horizon {
            return Err(Error::domain(format!(
                "shock period {} outside 1..={}",
                self.shock_period, self.horizon
            )));
        }
        if self.suppliers < 1 {
            return Err(Error::domain("need at least one supplier per tier"));
        }
        if self.economy.locations() != 2 {
            return Err(Error::domain("scenarios are defined for two locations (East, South)"));
        }
        self.shocks.validate()?;
        UtilitySpec::new(self.utility.rho)?;
        self.belief_set()?;
        Ok(())
    }

    pub fn belief_set(&self) -> Result<BeliefSet> {
        BeliefSet::new(
            self.beliefs.zeta_lo,
            self.beliefs.zeta_hi,
            self.beliefs.eta_known.unwrap_or(self.shocks.eta),
        )
    }

    pub fn with_cell(&self, info_env: InfoEnv, realization: Realization) -> Self {
        ScenarioConfig {
            info_env,
            realization,
            ..self.clone()
        }
    }

    /// Solves the economy and applies the configured decision rule.
    pub fn prepare(&self) -> Result<Prepared> {
        self.validate()?;
        let solution = solve_equilibrium(&self.economy, &self.solver)?;
        let problem = SourcingProblem::from_equilibrium(&self.economy, &solution, self.shocks, self.suppliers)?;
        let allocation = match (self.decision_mode, self.info_env) {
            (DecisionMode::Individual, _) => individual_sourcing(&problem)?,
            (DecisionMode::Planner, InfoEnv::Risk) => planner_risk_sourcing(&problem, &self.utility, self.grid)?,
            (DecisionMode::Planner, InfoEnv::Ambiguity) => {
                planner_ambiguity_sourcing(&problem, &self.belief_set()?, &self.utility, self.grid)?
            }
        };
        Ok(Prepared {
            solution,
            problem,
            allocation,
        })
    }
}

/// Equilibrium, decision problem and chosen allocation of a scenario.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub solution: EquilibriumSolution,
    pub problem: SourcingProblem,
    pub allocation: SourcingAllocation,
}

impl Prepared {
    /// One period's outcome under `draw`.
    pub fn period(&self, period: usize, draw: ShockDraw, economy: &EconomyParams) -> Result<PeriodRecord> {
        let active = apply_shock(economy.labor(), draw);
        let mut counts = self.allocation.counts();
        for (row, labor) in counts.iter_mut().zip(&active) {
            if *labor <= 0.0 {
                row.iter_mut().for_each(|c| *c = 0);
            }
        }
        let alive = chain_survives(&self.allocation, draw);
        let value = self.problem.allocation_value(&self.allocation, draw)?;
        let welfare = if alive {
            self.solution.real_income(economy) * value
        } else {
            0.0
        };
        let (east, south) = (counts[EAST][0], counts[SOUTH][0]);
        Ok(PeriodRecord {
            period,
            suppliers_east: east,
            suppliers_south: south,
            suppliers_total: east + south,
            chain_alive: alive,
            welfare,
        })
    }
}

/// Counts refer to the most upstream tier (intermediate input suppliers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub period: usize,
    pub suppliers_east: u32,
    pub suppliers_south: u32,
    pub suppliers_total: u32,
    pub chain_alive: bool,
    pub welfare: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub info_env: InfoEnv,
    pub decision_mode: DecisionMode,
    pub realization: Realization,
    pub allocation: SourcingAllocation,
    pub records: Vec<PeriodRecord>,
}

impl TimeSeries {
    pub fn south_share(&self) -> f64 {
        self.allocation.south_share()
    }

    /// `<mode>_<realization>_<env>`
    pub fn cell_name(&self) -> String {
        format!("{}_{}_{}", self.decision_mode, self.realization, self.info_env)
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<TimeSeries> {
    let prepared = config.prepare()?;
    run_prepared(config, &prepared)
}

fn run_prepared(config: &ScenarioConfig, prepared: &Prepared) -> Result<TimeSeries> {
    let records = (1..=config.horizon)
        .map(|t| {
            let draw = if t == config.shock_period {
                config.realization.draw()
            } else {
                ShockDraw::None
            };
            prepared.period(t, draw, &config.economy)
        })
        .collect::<Result<_>>()?;
    Ok(TimeSeries {
        info_env: config.info_env,
        decision_mode: config.decision_mode,
        realization: config.realization,
        allocation: prepared.allocation.clone(),
        records,
    })
}

/// Six scenario cells for the base decision mode.
/// `cells[r][c]`: rows realizations (none, east, south), columns (risk, ambiguity).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioMatrix {
    pub decision_mode: DecisionMode,
    pub cells: Vec<Vec<TimeSeries>>,
}

impl ScenarioMatrix {
    pub fn cell(&self, realization: Realization, info_env: InfoEnv) -> &TimeSeries {
        let r = Realization::ALL
            .iter()
            .position(|x| *x == realization)
            .expect("known row");
        let c = InfoEnv::ALL.iter().position(|x| *x == info_env).expect("known column");
        &self.cells[r][c]
    }

    pub fn iter(&self) -> impl Iterator<Item = &TimeSeries> {
        self.cells.iter().flatten()
    }
}

pub fn run_matrix(base: &ScenarioConfig) -> Result<ScenarioMatrix> {
    base.validate()?;
    // the allocation depends on the information column only
    let prepared: Vec<Prepared> = InfoEnv::ALL
        .iter()
        .map(|&env| base.with_cell(env, Realization::None).prepare())
        .collect::<Result<_>>()?;
    let cells = Realization::ALL
        .iter()
        .map(|&realization| {
            InfoEnv::ALL
                .iter()
                .zip(&prepared)
                .map(|(&env, prep)| run_prepared(&base.with_cell(env, realization), prep))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(ScenarioMatrix {
        decision_mode: base.decision_mode,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalEstimate {
    pub runs: usize,
    pub survival_rate: f64,
    pub mean_welfare: f64,
    /// Standard error of `survival_rate`.
    pub stderr: f64,
}

/// Independent generator for run `run` of a Monte Carlo experiment.
pub fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

/// Replaces the scripted realization by a draw from the shock distribution in
/// every run and reports how often the chain stays alive for the whole horizon.
pub fn monte_carlo_survival(config: &ScenarioConfig, runs: usize, seed: u64) -> Result<SurvivalEstimate> {
    if runs == 0 {
        return Err(Error::domain("need at least one Monte Carlo run"));
    }
    let prepared = config.prepare()?;
    monte_carlo_prepared(config, &prepared, runs, seed)
}

/// [`monte_carlo_survival`] with a fixed allocation.
pub fn monte_carlo_prepared(
    config: &ScenarioConfig,
    prepared: &Prepared,
    runs: usize,
    seed: u64,
) -> Result<SurvivalEstimate> {
    let mut outcomes = Vec::with_capacity(3);
    for draw in [ShockDraw::None, ShockDraw::EAST, ShockDraw::SOUTH] {
        outcomes.push((draw, prepared.period(config.shock_period, draw, &config.economy)?));
    }
    let quiet = &outcomes[0].1;
    let horizon = config.horizon as f64;
    let mut alive = 0usize;
    let mut welfare = 0.0;
    for run in 0..runs {
        let u: f64 = run_rng(seed, run as u64).gen();
        let draw = draw_shock(&config.shocks, u);
        let (_, record) = outcomes
            .iter()
            .find(|(d, _)| *d == draw)
            .expect("all outcomes tabulated");
        if record.chain_alive {
            alive += 1;
        }
        welfare += ((horizon - 1.0) * quiet.welfare + record.welfare) / horizon;
    }
    let rate = alive as f64 / runs as f64;
    Ok(SurvivalEstimate {
        runs,
        survival_rate: rate,
        mean_welfare: welfare / runs as f64,
        stderr: (rate * (1.0 - rate) / runs as f64).sqrt(),
    })
}

/// Convenience constructor for the two-location counterfactual economy.
pub fn counterfactual_config(
    economy: EconomyParams,
    shocks: ShockParams,
    suppliers: u32,
    decision_mode: DecisionMode,
    info_env: InfoEnv,
    realization: Realization,
) -> ScenarioConfig {
    ScenarioConfig {
        info_env,
        decision_mode,
        realization,
        shock_period: default_shock_period(),
        horizon: default_horizon(),
        suppliers,
        shocks,
        economy,
        utility: UtilitySpec::default(),
        beliefs: BeliefConfig::default(),
        seed: 0,
        grid: DEFAULT_GRID,
        solver: SolverConfig::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::EconomySpec;

    fn base(mode: DecisionMode, env: InfoEnv, realization: Realization) -> ScenarioConfig {
        let economy = EconomyParams::new(EconomySpec::symmetric(2, 2, 0.5, 4.0, 2.0)).unwrap();
        counterfactual_config(
            economy,
            ShockParams::new(0.5, 1.0, 0.9).unwrap(),
            10,
            mode,
            env,
            realization,
        )
    }

    #[test]
    fn individual_chain_dies_when_south_is_hit() {
        let ts = run_scenario(&base(DecisionMode::Individual, InfoEnv::Risk, Realization::South)).unwrap();
        for r in &ts.records {
            if r.period == 10 {
                assert_eq!(r.suppliers_total, 0);
                assert!(!r.chain_alive);
                assert_eq!(r.welfare, 0.0);
            } else {
                assert_eq!(r.suppliers_south, 10);
                assert!(r.chain_alive);
            }
        }
    }

    #[test]
    fn ambiguity_planner_always_survives() {
        for realization in Realization::ALL {
            let ts = run_scenario(&base(DecisionMode::Planner, InfoEnv::Ambiguity, realization)).unwrap();
            assert!(ts.records.iter().all(|r| r.chain_alive && r.suppliers_total >= 5));
        }
    }

    #[test]
    fn no_shock_gives_constant_counts() {
        for mode in [DecisionMode::Individual, DecisionMode::Planner] {
            let ts = run_scenario(&base(mode, InfoEnv::Risk, Realization::None)).unwrap();
            assert_eq!(ts.records.len(), 20);
            assert!(ts
                .records
                .windows(2)
                .all(|w| w[0].suppliers_total == w[1].suppliers_total && w[0].welfare == w[1].welfare));
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = base(DecisionMode::Planner, InfoEnv::Risk, Realization::None);
        cfg.shock_period = 21;
        assert!(run_scenario(&cfg).is_err());
        cfg.shock_period = 0;
        assert!(run_scenario(&cfg).is_err());
        let mut cfg = base(DecisionMode::Planner, InfoEnv::Risk, Realization::None);
        cfg.beliefs.zeta_lo = 0.9;
        cfg.beliefs.zeta_hi = 0.1;
        assert!(run_scenario(&cfg).is_err());
        let cfg = base(DecisionMode::Planner, InfoEnv::Risk, Realization::None);
        assert!(monte_carlo_survival(&cfg, 0, 1).is_err());
    }

    #[test]
    fn matrix_layout() {
        let m = run_matrix(&base(DecisionMode::Planner, InfoEnv::Risk, Realization::None)).unwrap();
        assert_eq!(m.cells.len(), 3);
        assert!(m.cells.iter().all(|row| row.len() == 2));
        let cell = m.cell(Realization::South, InfoEnv::Ambiguity);
        assert_eq!(cell.cell_name(), "planner_south_ambiguity");
        assert_eq!(cell.south_share(), 0.5);
        assert!(m.cell(Realization::East, InfoEnv::Risk).south_share() > 0.5);
    }

    #[test]
    fn config_json_defaults() {
        let json = r#"{
            "info_env": "risk", "decision_mode": "individual", "realization": "east",
            "suppliers": 6,
            "shocks": {"eta": 0.5, "lambda": 1.0, "zeta": 0.9},
            "economy": {"technology": [[1,1],[1,1]], "labor": [1,1],
                        "trade_cost": [[1,1],[1,1]], "labor_share": [1,0.5],
                        "theta": 4, "sigma": 2}
        }"#;
        let cfg: ScenarioConfig = serde_json::from_str(json).unwrap();
        assert_eq!((cfg.shock_period, cfg.horizon, cfg.grid), (10, 20, 1001));
        assert_eq!(cfg.belief_set().unwrap().eta_known, 0.5);
        assert_eq!(cfg.utility.rho, 2.0);
        cfg.validate().unwrap();
    }
}
