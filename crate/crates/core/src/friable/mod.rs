//! Friable-number statistics: exact counts, the Dickman function and the
//! saddle point of `zeta(s, y) x^s`.

pub mod dickman;
pub mod psi;
pub mod saddle;

pub use dickman::{dickman_rho, lambda, xi, DickmanTable};
pub use psi::{psi, psi_2omega, psi_squarefree};
pub use saddle::{psi_ht_estimate, saddle_alpha, SaddleData};
