//! Supply-chain robustness under risk and ambiguity.
//!
//! * [`economy`] and [`trade`]: multi-tier sourcing model with Fréchet chain
//!   productivity, path shares and price indices.
//! * [`equilibrium`]: wage fixed point under a world-income normalization.
//! * [`shocks`]: regime process and single-location aggregate shock draws.
//! * [`sourcing`]: individual, risk-averse planner and max-min planner rules.
//! * [`simulate`]: scripted scenarios, the information-by-realization matrix and
//!   Monte Carlo survival.
//! * [`icio`]: Leontief inversion and foreign input/market reliance from
//!   inter-country input-output tables.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod economy;
pub mod equilibrium;
pub mod error;
pub mod icio;
pub mod shocks;
pub mod simulate;
pub mod sourcing;
pub mod trade;

pub use economy::{EconomyParams, EconomySpec};
pub use equilibrium::{solve_equilibrium, EquilibriumSolution, SolverConfig};
pub use error::{Error, Result};
pub use shocks::{ShockDraw, ShockParams};
pub use simulate::{ScenarioConfig, TimeSeries};
pub use sourcing::{BeliefSet, SourcingAllocation, UtilitySpec};
pub use trade::{ChainModel, PathIndex};
