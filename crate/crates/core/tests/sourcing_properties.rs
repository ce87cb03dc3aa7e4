use chainrisk::sourcing::{
    apportion, chain_survives, individual_sourcing, planner_ambiguity_sourcing, planner_ambiguity_sweep,
    planner_risk_sourcing, planner_risk_sweep, Score, SourcingProblem,
};
use chainrisk::{BeliefSet, ShockDraw, ShockParams, SourcingAllocation, UtilitySpec};
use proptest::prelude::*;

fn problem(q_east: f64, q_south: f64, eta: f64, zeta: f64, m: u32) -> SourcingProblem {
    SourcingProblem::new(
        2.5,
        vec![0.4, 0.6],
        vec![vec![q_east, q_east], vec![q_south, q_south]],
        ShockParams::new(eta, 1.0, zeta).unwrap(),
        m,
    )
    .unwrap()
}

fn not_better(candidate: &Score, best: &Score) -> bool {
    if candidate.expected.is_finite() && best.expected.is_finite() {
        candidate.expected <= best.expected + 1e-12 * best.expected.abs()
    } else {
        !matches!(candidate.partial_cmp(best), Some(std::cmp::Ordering::Greater))
    }
}

#[test]
fn max_min_choice_dominates_the_full_grid() {
    let p = problem(1.0, 1.0, 0.5, 0.9, 10);
    let utility = UtilitySpec::new(2.0).unwrap();
    for (lo, hi) in [(0.0, 1.0), (0.2, 0.8), (0.1, 0.6)] {
        let beliefs = BeliefSet::new(lo, hi, 0.5).unwrap();
        let chosen = planner_ambiguity_sourcing(&p, &beliefs, &utility, 1001).unwrap();
        let best = p.worst_case_score(&chosen, &utility, &beliefs).unwrap();
        for point in planner_ambiguity_sweep(&p, &beliefs, &utility, 1001).unwrap() {
            assert!(not_better(&point.score, &best), "[{lo},{hi}] share {}", point.south);
        }
    }
}

#[test]
fn risk_choice_dominates_the_full_grid() {
    let p = problem(1.0, 1.0, 0.5, 0.9, 10);
    let utility = UtilitySpec::new(2.0).unwrap();
    let chosen = planner_risk_sourcing(&p, &utility, 1001).unwrap();
    let best = p.expected_score(&chosen, &utility, 0.5, 0.9).unwrap();
    for point in planner_risk_sweep(&p, &utility, 1001).unwrap() {
        assert!(not_better(&point.score, &best));
    }
    assert!(chosen.south_share() > 0.5 && chosen.south_share() < 1.0);
}

#[test]
fn worst_case_sits_at_an_endpoint() {
    let p = problem(1.0, 1.2, 0.4, 0.5, 8);
    let utility = UtilitySpec::new(3.0).unwrap();
    let beliefs = BeliefSet::new(0.25, 0.75, 0.4).unwrap();
    for k in 0..=20 {
        let alloc = p.grid_allocation(k as f64 / 20.0).unwrap();
        let worst = p.worst_case_score(&alloc, &utility, &beliefs).unwrap();
        for z in 0..=10 {
            let zeta = 0.25 + 0.05 * z as f64;
            let s = p.expected_score(&alloc, &utility, 0.4, zeta).unwrap();
            assert!(!matches!(s.partial_cmp(&worst), Some(std::cmp::Ordering::Less)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn singleton_beliefs_reduce_to_risk(zeta in 0.05f64..0.95, eta in 0.05f64..0.95, rho in 0.5f64..5.0) {
        let p = problem(1.0, 1.1, eta, zeta, 6);
        let utility = UtilitySpec::new(rho).unwrap();
        let risk = planner_risk_sourcing(&p, &utility, 201).unwrap();
        let beliefs = BeliefSet::singleton(zeta, eta).unwrap();
        let amb = planner_ambiguity_sourcing(&p, &beliefs, &utility, 201).unwrap();
        prop_assert_eq!(risk, amb);
    }

    #[test]
    fn shocks_never_raise_chain_value(south in 0.0f64..=1.0, m in 1u32..20) {
        let p = problem(1.0, 1.3, 0.5, 0.5, m);
        let alloc = p.grid_allocation(south).unwrap();
        let calm = p.allocation_value(&alloc, ShockDraw::None).unwrap();
        for draw in [ShockDraw::EAST, ShockDraw::SOUTH] {
            let v = p.allocation_value(&alloc, draw).unwrap();
            prop_assert!(v <= calm);
            prop_assert_eq!(v > 0.0, chain_survives(&alloc, draw));
        }
    }

    #[test]
    fn diversified_chains_survive_any_single_hit(south in 0.0f64..=1.0, m in 2u32..30) {
        let alloc = SourcingAllocation::two_location(south, 2, m).unwrap();
        let counts = alloc.counts();
        let both = (0..2).all(|n| counts[0][n] > 0 && counts[1][n] > 0);
        let survives_all = [ShockDraw::EAST, ShockDraw::SOUTH].iter().all(|d| chain_survives(&alloc, *d));
        prop_assert_eq!(both, survives_all);
    }

    #[test]
    fn more_suppliers_never_lower_value(south in 0.0f64..=1.0, m in 1u32..30) {
        let p = problem(1.0, 1.0, 0.5, 0.5, m);
        let q = problem(1.0, 1.0, 0.5, 0.5, m + 1);
        let a = p.allocation_value(&p.grid_allocation(south).unwrap(), ShockDraw::None).unwrap();
        let b = q.allocation_value(&q.grid_allocation(south).unwrap(), ShockDraw::None).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn apportionment_preserves_totals(weights in prop::collection::vec(0.0f64..1.0, 1..6), m in 1u32..50) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 0.0);
        let fractions: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let counts = apportion(&fractions, m);
        prop_assert_eq!(counts.iter().sum::<u32>(), m);
        let positive = fractions.iter().filter(|&&f| f > 0.0).count() as u32;
        // raising small locations to one supplier can move the donors further from their quotas
        let forced = fractions.iter().any(|&f| f > 0.0 && f * (m as f64) < 1.0);
        for (c, f) in counts.iter().zip(&fractions) {
            if *f == 0.0 {
                prop_assert_eq!(*c, 0);
            } else if positive <= m {
                prop_assert!(*c >= 1);
            }
            if !forced {
                prop_assert!((*c as f64 - f * m as f64).abs() < 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn individual_rule_picks_the_safer_cheaper_side(q_east in 0.5f64..2.0, q_south in 0.5f64..2.0, zeta in 0.0f64..=1.0) {
        let p = problem(q_east, q_south, 0.5, zeta, 10);
        let alloc = individual_sourcing(&p).unwrap();
        let east = (1.0 - 0.5 * zeta) * q_east;
        let south = (1.0 - 0.5 * (1.0 - zeta)) * q_south;
        if east > south * (1.0 + 1e-9) {
            prop_assert_eq!(alloc.south_share(), 0.0);
        } else if south > east * (1.0 + 1e-9) {
            prop_assert_eq!(alloc.south_share(), 1.0);
        }
    }
}
