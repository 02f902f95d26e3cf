//! Quarterly stochastic simulator for a small open economy under debt and
//! balance-of-payments stress.
//!
//! The model state ([`StateVector`]) advances one quarter at a time through a
//! fixed sequence of blocks (see [`engine`]). Policy strategies are data
//! ([`Scenario`]); ensembles of seeded paths are summarized into quantile
//! tables and strategy rankings ([`report`]).

pub mod cli;
pub mod engine;
pub mod error;
pub mod external;
pub mod fiscal;
pub mod params;
pub mod report;
pub mod scenario;
pub mod social;
pub mod state;
pub mod stochastics;

pub use engine::{run_ensemble, simulate_path, PathResult, QuarterRecord};
pub use error::{Error, Result, Violation};
pub use external::{BoPFlows, FxRegime};
pub use fiscal::FiscalImpulse;
pub use params::Params;
pub use scenario::{Scenario, ScenarioSet};
pub use state::{classify_regime, output_gap, Regime, StateVector};
pub use stochastics::{PathSeed, SeedSpec, ShockDraws, StreamLabel};
