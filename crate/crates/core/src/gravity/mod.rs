//! The Palatini–Cartan v-sector in the standard frame: constraint kernel,
//! quadratic form, ε identities and the ultralocal pushforward.

pub mod epsilon;
pub mod kernel;
pub mod quadform;
pub mod ultralocal;

pub use epsilon::{epsilon_identity_check, levi_civita, EpsilonReport};
pub use kernel::{kernel_report, KernelBasis, KernelReport, Label, Sector, StandardFrame};
pub use quadform::{block_structure_check, build_quadratic_matrix, spot_check, BlockReport, QuadForm};
pub use ultralocal::{ultralocal_model, ultralocal_pushforward, Insertions, UltralocalModel, UltralocalReport};
