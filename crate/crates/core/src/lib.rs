//! Spectra of Schreier graphs of self-similar groups via Schur renormalization.
//!
//! The crate is organised bottom-up: [`groups`] builds tree actions,
//! [`pencils`] assembles the operator pencils and checks determinant
//! recursions exactly, [`spectra`] diagonalizes slices, [`ratmaps`] and
//! [`conjugacy`] handle the renormalization maps, and [`cohomology`] does
//! intersection calculus on blow-ups.

pub mod cohomology;
pub mod conjugacy;
pub mod error;
pub mod groups;
pub mod pencils;
pub mod ratmaps;
pub mod spectra;

pub use error::{Error, Result};
pub use groups::{GroupSpec, LevelAction};
pub use pencils::PencilScheme;
pub use ratmaps::{BinaryForm, MultiPoly, RationalMapP2};
pub use spectra::{DosResult, Measure1D};
pub use cohomology::{BlowupSurface, DivisorClass, MapAction};
pub use conjugacy::{ModelSystem, QuadExtElement, RationalFunction2};

/// Exact rationals used throughout.
pub type Q = num_rational::BigRational;
