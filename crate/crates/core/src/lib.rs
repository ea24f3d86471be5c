//! Exact certification of boundary positivity for the minimal strata of
//! Abelian differentials.

pub mod arith;
pub mod certify;
pub mod classes;
pub mod enumerate;
pub mod envelope;
pub mod error;
pub mod graph;
pub mod identities;
pub mod linseries;
pub mod pullback;

pub use arith::{AffineInY, Endpoint, Rational, RationalInterval};
pub use error::{Error, Result};
pub use graph::{GraphInvariants, LevelGraph};
