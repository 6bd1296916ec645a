//! Symbolic computation of homotopy fixed point, Tate and homotopy orbit
//! spectral sequences for circle-equivariant commutative ring spectra.

pub mod algebra;
pub mod bokstedt;
pub mod dl;
pub mod error;
pub mod expr;
pub mod fp;
pub mod linalg;
pub mod presets;
pub mod ss;
pub mod specfile;
pub mod universal;

pub use error::{Error, Result};
pub use fp::Prime;
