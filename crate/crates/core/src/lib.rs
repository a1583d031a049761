//! Direct scattering for the defocusing NLS Dirac operator.

pub mod bracket;
pub mod config;
pub mod cover;
pub mod divisor;
pub mod error;
pub mod flows;
pub mod grid;
pub mod linalg;
mod ode;
pub mod potentials;
pub mod report;
pub mod scattering;
pub mod suite;

pub use error::{Error, Result};
pub use grid::{ComplexField, Grid, C64};
pub use linalg::{Mat2, Vec2};
pub use potentials::{hamiltonians, make_potential, Hamiltonians, Potential, PotentialKind};
pub use config::SuiteConfig;
pub use report::{CheckRecord, ExportFormat, SuiteReport};
pub use suite::{run_suite, SuiteName};
