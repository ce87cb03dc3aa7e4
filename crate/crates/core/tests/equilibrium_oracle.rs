mod common;

use chainrisk::economy::EconomySpec;
use chainrisk::equilibrium::{labor_market_residuals, solve_equilibrium_observed};
use chainrisk::trade::local_chain_real_wage;
use chainrisk::{solve_equilibrium, EconomyParams, SolverConfig};
use common::{fixture, oracle_single_tier, path, random_spec};
use proptest::prelude::*;
use serde::Deserialize;

#[derive(Deserialize)]
struct Oracle {
    wages: Vec<f64>,
    prices: Vec<f64>,
}

fn read_json<T: for<'de> Deserialize<'de>>(name: &str) -> T {
    serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

#[test]
fn symmetric_economies_have_equal_wages() {
    for tiers in 1..=3 {
        let params = EconomyParams::new(EconomySpec::symmetric(2, tiers, 0.6, 5.0, 2.5)).unwrap();
        let sol = solve_equilibrium(&params, &SolverConfig::default()).unwrap();
        assert!((sol.wages.values[0] - sol.wages.values[1]).abs() < 1e-10);
        assert!((sol.prices[0] - sol.prices[1]).abs() < 1e-10);
    }
}

#[test]
fn residuals_sum_to_zero_at_every_iterate() {
    for seed in 0..10 {
        let params = EconomyParams::new(random_spec(seed, 3, 2)).unwrap();
        let mut worst = 0.0_f64;
        let mut count = 0;
        solve_equilibrium_observed(&params, &SolverConfig::default(), |it| {
            worst = worst.max(it.residuals.iter().sum::<f64>().abs());
            count += 1;
        })
        .unwrap();
        assert!(count > 0);
        assert!(worst < 1e-12, "seed {seed}: {worst:e}");
    }
}

#[test]
fn asymmetric_single_tier_matches_committed_oracle() {
    let spec: EconomySpec = read_json("equilibrium_asymmetric.json");
    let oracle: Oracle = read_json("equilibrium_asymmetric_oracle.json");
    let params = EconomyParams::new(spec).unwrap();
    let sol = solve_equilibrium(&params, &SolverConfig::default()).unwrap();
    for (a, b) in sol.wages.values.iter().zip(&oracle.wages) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
    for (a, b) in sol.prices.iter().zip(&oracle.prices) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn single_tier_matches_bisection(seed in any::<u64>()) {
        let params = EconomyParams::new(random_spec(seed, 2, 1)).unwrap();
        let sol = solve_equilibrium(&params, &SolverConfig::default()).unwrap();
        let (wages, prices) = oracle_single_tier(&params);
        for (a, b) in sol.wages.values.iter().zip(&wages) {
            prop_assert!((a - b).abs() < 1e-8);
        }
        for (a, b) in sol.prices.iter().zip(&prices) {
            prop_assert!((a / b - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn solutions_clear_labor_markets(seed in any::<u64>(), j in 2usize..=3, n in 1usize..=3) {
        let params = EconomyParams::new(random_spec(seed, j, n)).unwrap();
        let sol = solve_equilibrium(&params, &SolverConfig::default()).unwrap();
        let income: f64 = sol.spending(&params).iter().sum();
        prop_assert!((income - 1.0).abs() < 1e-12);
        let res = labor_market_residuals(&sol.wages.values, &params).unwrap();
        prop_assert!(res.iter().all(|r| r.abs() < 1e-9));
    }
}

#[test]
fn autarky_real_wage_matches_local_chain_formula() {
    for seed in 0..20 {
        let j = 2 + (seed as usize % 2);
        let n = 1 + (seed as usize % 3);
        let mut spec = random_spec(1000 + seed, j, n);
        for (i, row) in spec.trade_cost.iter_mut().enumerate() {
            for (k, t) in row.iter_mut().enumerate() {
                if i != k {
                    *t = 1e6;
                }
            }
        }
        let params = EconomyParams::new(spec).unwrap();
        let sol = solve_equilibrium(&params, &SolverConfig::default()).unwrap();
        let model = sol.chain_model(&params).unwrap();
        for loc in 0..j {
            let local = model.path_share(&path(&vec![loc; n]), loc).unwrap();
            let direct = sol.wages.values[loc] / sol.prices[loc];
            let formula = local_chain_real_wage(loc, &params, local).unwrap();
            assert!((direct / formula - 1.0).abs() < 1e-6, "seed {seed} loc {loc}");
        }
    }
}

#[test]
fn warm_start_from_solution_is_immediate() {
    let params = EconomyParams::new(random_spec(11, 3, 3)).unwrap();
    let sol = solve_equilibrium(&params, &SolverConfig::default()).unwrap();
    let warm = SolverConfig {
        initial_wages: Some(sol.wages.values.clone()),
        ..SolverConfig::default()
    };
    let again = solve_equilibrium(&params, &warm).unwrap();
    assert!(again.iterations <= 2);
    for (a, b) in again.wages.values.iter().zip(&sol.wages.values) {
        assert!((a - b).abs() < 1e-10);
    }
}
