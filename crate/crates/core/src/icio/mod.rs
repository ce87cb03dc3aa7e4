//! Inter-country input-output analysis.

mod reliance;
mod table;

pub use reliance::{
    compute_fir, compute_fmr, leontief_inverse, leontief_inverse_of, reliance_change, resolve_sectors, Measure,
    RelianceKind, RelianceMatrix, INVERSE_RESIDUAL, REST_OF_WORLD,
};
pub use table::{load_oecd_table, load_table, parse_native, parse_oecd, write_table, WorldIOTable, BALANCE_TOLERANCE};
