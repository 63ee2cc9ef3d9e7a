//! Exact-integer computations on Cayley graphs of free products of
//! free-abelian and free groups: word metrics and balls, Busemann fields and
//! the distance-like axiom, gradient rays, slimness/contraction metrology,
//! the derivative coding into a finite-alphabet shift space, and horosphere
//! experiments. All arithmetic is integer; there is no floating point in any
//! computation path.

pub mod ball;
pub mod error;
pub mod exec;
pub mod field;
pub mod figures;
pub mod fixtures;
pub mod geodesic;
pub mod gradient;
pub mod horosphere;
pub mod morse;
pub mod symbolic;
pub mod group;
pub mod manifest;
pub mod ray;

pub use ball::{Ball, VertexId};
pub use error::{Error, ErrorClass, Result};
pub use group::{Element, FactorKind, GroupSpec, Letter};
pub use ray::RayWalk;
