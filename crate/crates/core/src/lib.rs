//! Exact root-system combinatorics and flag-curvature numerics for
//! homogeneous Finsler spaces of compact Lie groups.

pub mod coset;
pub mod curvature;
pub mod error;
pub mod exact;
pub mod liealg;
pub mod norms;
pub mod numeric;
pub mod obstruct;
pub mod qnum;
pub mod rootsys;

pub use coset::{build_coset, parse_preset, preset, rank_check, CosetSpace, SubalgebraSpec};
pub use error::{Error, Result};
pub use qnum::{QNum, Rational};
pub use rootsys::{build_root_system, Family, RootSystem, RootVector};
