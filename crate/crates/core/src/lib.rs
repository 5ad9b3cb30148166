//! Exact nonrational toric geometry.
//!
//! Generalized Delzant triples `(Δ, {X₁…X_d}, Q)` over a real number field,
//! their chart atlases with countable chart groups, and symplectic reduction
//! by an arbitrary subspace `𝔨 ⊂ ℝⁿ`, together with a floating-point lab that
//! checks the construction on sampled level-set points.

pub mod delzant;
pub mod field;
pub mod io;
pub mod linalg;
pub mod numlab;
pub mod polyhedron;
mod poly;
pub mod quasilattice;
pub mod reduction;

pub use delzant::{DelzantTriple, VertexChart};
pub use field::{Field, FieldElem, FieldSpec};
pub use polyhedron::{HalfSpace, Polyhedron};
pub use quasilattice::Quasilattice;
pub use reduction::{ReductionResult, SubspaceData};
