mod common;

use chainrisk::simulate::{monte_carlo_survival, run_matrix, run_scenario, DecisionMode, InfoEnv, Realization};
use chainrisk::ScenarioConfig;
use common::fixture;
use proptest::prelude::*;

fn config(name: &str) -> ScenarioConfig {
    serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

#[test]
fn individual_matrix() {
    let m = run_matrix(&config("scenario_individual.json")).unwrap();
    for env in InfoEnv::ALL {
        for r in Realization::ALL {
            let cell = m.cell(r, env);
            assert_eq!(cell.allocation, m.cell(Realization::None, InfoEnv::Risk).allocation);
            for rec in &cell.records {
                let hit = rec.period == 10 && r == Realization::South;
                assert_eq!(rec.chain_alive, !hit, "{} period {}", cell.cell_name(), rec.period);
                assert_eq!(rec.suppliers_total == 0, hit);
            }
        }
    }
}

#[test]
fn planner_matrix() {
    let m = run_matrix(&config("scenario_planner.json")).unwrap();
    for cell in m.iter() {
        let counts = cell.allocation.counts();
        assert!(counts.iter().all(|row| row.iter().all(|c| *c > 0)));
        assert!(cell.records.iter().all(|r| r.chain_alive));
        for rec in cell.records.iter().filter(|r| r.period != 10) {
            assert!(rec.suppliers_east > 0 && rec.suppliers_south > 0);
        }
    }
    let risk = m.cell(Realization::None, InfoEnv::Risk).south_share();
    assert!(risk > 0.5 && risk < 1.0);
    assert_eq!(m.cell(Realization::East, InfoEnv::Ambiguity).south_share(), 0.5);
}

#[test]
fn shock_period_counts_drop_only_in_the_hit_location() {
    let mut cfg = config("scenario_planner.json");
    cfg.realization = Realization::East;
    let ts = run_scenario(&cfg).unwrap();
    let calm = &ts.records[0];
    let hit = &ts.records[9];
    assert_eq!(hit.suppliers_east, 0);
    assert_eq!(hit.suppliers_south, calm.suppliers_south);
    assert!(hit.welfare < calm.welfare && hit.welfare > 0.0);
    assert_eq!(ts.records[10], {
        let mut r = calm.clone();
        r.period = 11;
        r
    });
}

#[test]
fn survival_without_shocks_is_certain() {
    let mut cfg = config("scenario_individual.json");
    cfg.shocks.eta = 0.0;
    let est = monte_carlo_survival(&cfg, 1000, 3).unwrap();
    assert_eq!(est.survival_rate, 1.0);
}

#[test]
fn individual_corner_survival_matches_analytic_rate() {
    let mut cfg = config("scenario_individual.json");
    cfg.shocks.eta = 1.0;
    let est = monte_carlo_survival(&cfg, 100_000, 11).unwrap();
    assert!((est.survival_rate - 0.9).abs() < 3.0 * est.stderr);
    cfg.decision_mode = DecisionMode::Planner;
    assert_eq!(monte_carlo_survival(&cfg, 10_000, 11).unwrap().survival_rate, 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn runs_are_reproducible(seed in any::<u64>(), planner in any::<bool>()) {
        let mut cfg = config(if planner { "scenario_planner.json" } else { "scenario_individual.json" });
        cfg.seed = seed;
        cfg.grid = 201;
        let a = serde_json::to_string(&run_scenario(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_scenario(&cfg).unwrap()).unwrap();
        prop_assert_eq!(a, b);
        let x = monte_carlo_survival(&cfg, 500, seed).unwrap();
        let y = monte_carlo_survival(&cfg, 500, seed).unwrap();
        prop_assert_eq!(x, y);
    }
}
