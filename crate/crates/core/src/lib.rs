//! Gauge symmetries of two-dimensional field equations in Cartan normal form.
//!
//! The crate computes a generating set of gauge transformations, the
//! reducibility relations between them and a degrees-of-freedom estimate,
//! all in exact arithmetic over the on-shell differential field of jets.

pub mod cartan;
pub mod error;
pub mod jetfield;
pub mod noether;
pub mod ore;
pub mod orematrix;
pub mod poly;
pub mod render;
#[cfg(feature = "sample")]
pub mod sample;
pub mod verify;

pub use cartan::{CartanSystem, FieldDecl, Layout, PfaffianInput, ValidationReport};
pub use error::{Error, Result};
pub use jetfield::{FieldElem, JetCoord, JetDerivations, JetKind};
pub use noether::{Analysis, ConstraintTrack, Resolution, Stabilization, SyzygyGenSet};
pub use ore::OreOp;
pub use orematrix::{JacobsonDecomposition, OreMatrix};
pub use poly::{Poly, Var};
pub use verify::{DofReport, Linearization};
