//! Exact computational homological algebra for four small exact categories:
//! finite-dimensional vector spaces, finitely generated modules over the
//! dual numbers `k[e]/(e^2)`, vector bundles on the projective line, and
//! vector bundles on nodal rational curves given by descent data.
//!
//! Everything is computed over exact scalars (rationals or prime fields);
//! subspace bases are canonical, so results are deterministic.

pub mod backend;
pub mod complex;
pub mod curve;
pub mod error;
pub mod field;
pub mod fitting;
pub mod matrix;
pub mod sample;
pub mod tstructure;

pub use backend::{Backend, ExactStructure, Factorization, Mor, Obj, Verdict};
pub use complex::{AcyclicityWitness, ChainMap, Complex, Homotopy};
pub use curve::{LineBundleClass, NodalBundle, NodalCurve, P1Point};
pub use error::Error;
pub use field::{Field, Scalar};
pub use matrix::Matrix;
pub use tstructure::{HeartObject, Triangle};
