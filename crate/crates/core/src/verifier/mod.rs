//! Independent numerical checks of the bound engine on the modular group:
//! lattice enumeration, direct Poincaré and parabolic sums, and `S_{2k}`
//! evaluated from explicit cusp forms.

pub mod checks;
pub mod enumerate;
pub mod forms;

pub use checks::{verify_all, verify_domain, VerificationReport, VerifyItem, WeightSummary};
pub use enumerate::{enumerate_ball, IntegerMoebius};
pub use forms::{build_basis, CuspFormBasis, SUPPORTED_WEIGHTS};
