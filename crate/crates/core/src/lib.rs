//! Robin p-capacity energies of compact/domain pairs.
//!
//! The energy of a pair `K ⊆ Ω` is the infimum of
//! `∫_Ω |∇v|^p + β ∮_{∂Ω} |v|^p` over fields with `v = 1` on `K`.
//!
//! - [`radial`]: exact formulas for concentric balls in any dimension,
//!   regime classification of `R -> E(B_1, B_R)` and the ball lower bound.
//! - [`geometry`] and [`mesh`]: star-shaped planar pairs and structured
//!   triangulations of the annular region between them.
//! - [`fem`]: P1 minimization of the discrete energy.
//! - [`hfunction`]: level-set functional `H(t, φ)` on radial and discrete
//!   solutions, and the derearranged test field.
//! - [`experiments`]: config files, CSV output and the command drivers used
//!   by the `robin-pcap` binary.

pub mod error;
pub mod experiments;
pub mod fem;
pub mod geometry;
pub mod hfunction;
pub mod mesh;
pub mod params;
pub mod quadrature;
pub mod radial;
pub mod roots;

pub use error::{Error, Result};
pub use params::{unit_ball_volume, ProblemParams};
