//! Finite square-class models of fields whose maximal pro-2 Galois group is
//! of elementary type.
//!
//! The pipeline is: parse an [`Expr`](exprdsl::Expr), [`synthesize`](synth::synthesize)
//! its [`SquareClassStructure`](synth::SquareClassStructure), then read off the
//! Kaplansky radical, split off the free part ([`normalform`]), pass to a
//! quadratic extension ([`quadext`]) and check the invariants ([`verify`]).

pub mod error;
pub mod exprdsl;
pub mod gf2;
pub mod normalform;
pub mod quadext;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
pub use exprdsl::{parse, Expr};
pub use gf2::{BitVec, LinMap, Subspace};
pub use normalform::{decompose, NormalForm};
pub use quadext::{extend, QuadExt};
pub use synth::{synthesize, RadicalClass, SquareClassStructure};
