//! Minimum submodular-cost allocation: Lovász-extension relaxations,
//! rounding schemes, exact enumeration and instance tooling.

pub mod error;
pub mod exact;
pub mod instances;
pub mod lovasz;
pub mod model;
pub mod oracle;
pub mod relax;
pub mod rounding;
pub mod set;
pub mod verify;

pub use error::{Error, Result};
pub use model::{FractionalAllocation, Partition, ProblemInstance, ProblemKind};
pub use oracle::{Oracle, SetFunction};
pub use set::ElementSet;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
