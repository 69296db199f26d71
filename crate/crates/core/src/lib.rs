//! Degree-two configuration-space invariant of rational homology spheres.
//!
//! The crate is organised bottom-up:
//!
//! * [`graphs`]: half-edge trivalent graphs, the four named graphs
//!   `T1`, `T2`, `W1`, `W2` (plus `T_less`), labelings, isomorphism and
//!   edge collapse.
//! * [`diagrams`]: the span of vertex-oriented diagrams modulo AS and
//!   Jacobi relations, and the weight system `w`.
//! * [`orient`]: the half-edge ordering sign engine.
//! * [`faces`]: classification of every boundary term and the cancellation
//!   ledger.
//! * [`geometry`]: Gauss map, its derivative, and the chain-intersection
//!   feasibility solver.
//! * [`integrate`]: propagator densities, the pointwise integrand and the
//!   Monte Carlo estimators.
//! * [`lmo`]: p-adic valuations and the LMO/KKT delta combination.

pub mod diagrams;
pub mod error;
pub mod faces;
pub mod geometry;
pub mod graphs;
pub mod integrate;
pub mod linalg;
pub mod lmo;
pub mod lp;
pub mod orient;
pub mod perm;
pub mod rational;

pub use error::{Error, Result};
