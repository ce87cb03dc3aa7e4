//! Browser bindings for three interactive views: the scenario matrix, the
//! planner's South share across risk aversion, and equilibrium wages across
//! South technology.
//!
//! The computations live in plain functions so they can be tested natively;
//! the `#[wasm_bindgen]` wrappers only convert arguments and results.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use chainrisk::simulate::{counterfactual_config, run_matrix, DecisionMode, InfoEnv, Realization};
use chainrisk::{solve_equilibrium, EconomyParams, EconomySpec, Error, ScenarioConfig, ShockParams, SolverConfig};

const CURVE_GRID: usize = 201;
const MAX_STEPS: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct CellView {
    pub name: String,
    pub south_share: f64,
    pub east: Vec<u32>,
    pub south: Vec<u32>,
    pub total: Vec<u32>,
    pub alive: Vec<bool>,
    pub welfare: Vec<f64>,
}

/// All six realization-by-information cells of a scenario file.
pub fn scenario_cells(config_json: &str) -> Result<Vec<CellView>, String> {
    let config: ScenarioConfig = serde_json::from_str(config_json).map_err(|e| format!("config: {e}"))?;
    let matrix = run_matrix(&config).map_err(|e| e.to_string())?;
    Ok(matrix
        .iter()
        .map(|ts| CellView {
            name: ts.cell_name(),
            south_share: ts.south_share(),
            east: ts.records.iter().map(|r| r.suppliers_east).collect(),
            south: ts.records.iter().map(|r| r.suppliers_south).collect(),
            total: ts.records.iter().map(|r| r.suppliers_total).collect(),
            alive: ts.records.iter().map(|r| r.chain_alive).collect(),
            welfare: ts.records.iter().map(|r| r.welfare).collect(),
        })
        .collect())
}

/// Two locations, two tiers; East is location 0 with unit technology.
fn two_location_economy(south_technology: f64, trade_cost: f64) -> Result<EconomyParams, Error> {
    EconomyParams::new(EconomySpec {
        technology: vec![vec![1.0, 1.0], vec![south_technology, south_technology]],
        labor: vec![1.0, 1.0],
        trade_cost: vec![vec![1.0, trade_cost], vec![trade_cost, 1.0]],
        labor_share: vec![1.0, 0.5],
        tier_weight: None,
        theta: 4.0,
        sigma: 2.0,
        gamma: 1.0,
    })
}

fn steps(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, String> {
    if !(lo.is_finite() && hi.is_finite() && hi >= lo) || !(2..=MAX_STEPS).contains(&n) {
        return Err(format!("need lo <= hi and 2..={MAX_STEPS} steps"));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

#[derive(Debug, Clone, Deserialize)]
pub struct CurveInput {
    pub rho_min: f64,
    pub rho_max: f64,
    pub steps: usize,
    pub eta: f64,
    pub zeta: f64,
    pub zeta_lo: f64,
    pub zeta_hi: f64,
    pub suppliers: u32,
    pub south_technology: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub rho: f64,
    pub risk: f64,
    pub ambiguity: f64,
    pub individual: f64,
}

/// South share of upstream suppliers chosen by each decision rule as risk aversion varies.
pub fn sourcing_curve(input: &CurveInput) -> Result<Vec<CurvePoint>, String> {
    let economy = two_location_economy(input.south_technology, 1.0).map_err(|e| e.to_string())?;
    let shocks = ShockParams::new(input.eta, 1.0, input.zeta).map_err(|e| e.to_string())?;
    let mut config = counterfactual_config(
        economy,
        shocks,
        input.suppliers,
        DecisionMode::Planner,
        InfoEnv::Risk,
        Realization::None,
    );
    config.grid = CURVE_GRID;
    config.beliefs.zeta_lo = input.zeta_lo;
    config.beliefs.zeta_hi = input.zeta_hi;

    let share = |c: &ScenarioConfig| -> Result<f64, String> {
        Ok(c.prepare().map_err(|e| e.to_string())?.allocation.south_share())
    };
    let mut individual = config.clone();
    individual.decision_mode = DecisionMode::Individual;
    let individual = share(&individual)?;

    steps(input.rho_min, input.rho_max, input.steps)?
        .into_iter()
        .map(|rho| {
            let mut c = config.clone();
            c.utility.rho = rho;
            let risk = share(&c)?;
            c.info_env = InfoEnv::Ambiguity;
            Ok(CurvePoint {
                rho,
                risk,
                ambiguity: share(&c)?,
                individual,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Deserialize)]
pub struct SweepInput {
    pub technology_min: f64,
    pub technology_max: f64,
    pub steps: usize,
    pub trade_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WagePoint {
    pub technology: f64,
    pub wage_east: f64,
    pub wage_south: f64,
    pub real_wage_east: f64,
    pub real_wage_south: f64,
}

/// Equilibrium wages as South technology varies, warm-starting each solve.
pub fn wage_sweep(input: &SweepInput) -> Result<Vec<WagePoint>, String> {
    let mut solver = SolverConfig::default();
    let mut out = Vec::with_capacity(input.steps);
    for t in steps(input.technology_min, input.technology_max, input.steps)? {
        let params = two_location_economy(t, input.trade_cost).map_err(|e| e.to_string())?;
        let sol = solve_equilibrium(&params, &solver).map_err(|e| e.to_string())?;
        let real = sol.real_wages();
        out.push(WagePoint {
            technology: t,
            wage_east: sol.wages.values[0],
            wage_south: sol.wages.values[1],
            real_wage_east: real[0],
            real_wage_south: real[1],
        });
        solver.initial_wages = Some(sol.wages.values);
    }
    Ok(out)
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<JsValue, JsValue> {
    let v = r.map_err(|e| JsValue::from_str(&e))?;
    serde_wasm_bindgen::to_value(&v).map_err(|e| JsValue::from_str(&e.to_string()))
}

fn from_js<T: for<'de> Deserialize<'de>>(v: JsValue) -> Result<T, JsValue> {
    serde_wasm_bindgen::from_value(v).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen(js_name = scenarioCells)]
pub fn scenario_cells_js(config_json: &str) -> Result<JsValue, JsValue> {
    to_js(scenario_cells(config_json))
}

#[wasm_bindgen(js_name = sourcingCurve)]
pub fn sourcing_curve_js(input: JsValue) -> Result<JsValue, JsValue> {
    to_js(sourcing_curve(&from_js(input)?))
}

#[wasm_bindgen(js_name = wageSweep)]
pub fn wage_sweep_js(input: JsValue) -> Result<JsValue, JsValue> {
    to_js(wage_sweep(&from_js(input)?))
}
