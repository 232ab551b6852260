//! Stock-flow-consistent macroeconomic agent-based simulation engine.
//!
//! One country with 18 industry sectors plus an aggregated rest of the
//! world. Firms, households, individuals, banks, a government, and a
//! central bank interact on goods, labour, credit, and housing markets
//! in discrete quarters. Every monetary flow debits one balance sheet
//! and credits another, and the engine audits the resulting identities
//! (three-way GDP, firm equity, bank liabilities/reserves, household
//! net wealth) as it runs.
//!
//! Determinism contract: a trajectory is a pure function of the initial
//! bundle, the parameter vector, and a master seed. Same seed, same
//! bytes.

pub mod aggregates;
pub mod ar1;
pub mod assign;
pub mod audit;
pub mod banking;
pub mod error;
pub mod firms;
pub mod households;
pub mod init;
pub mod markets;
pub mod params;
pub mod public_sector;
pub mod rng;
pub mod row;
pub mod scheduler;
pub mod state;
#[cfg(test)]
pub(crate) mod testkit;
pub mod trajectory;

pub use error::{Error, Result};
pub use params::{FixedParams, ParameterVector};
pub use state::EconomyState;
