//! Exact-arithmetic enumeration and certification of geometric permutations
//! of pairwise disjoint convex polytopes in R^2 and R^3.
//!
//! The pipeline: separate every pair of bodies by an oriented hyperplane,
//! build the arrangement of the induced great circles on the direction
//! sphere, classify each face by its pairwise-order tournament, certify
//! permutation faces with explicit witness transversal lines, and audit the
//! structural counting identities (popular vertices/edges, border levels,
//! conflict weights, removal identities) that drive the near-cubic bound.
//!
//! All coordinates, predicates and solver pivots are exact rationals; the
//! core is generic over the [`Scalar`] field, instantiated as [`Rat`].

pub mod arrangement;
pub mod audit;
pub mod body;
pub mod census;
pub mod error;
pub mod generate;
pub mod io;
pub mod pipeline;
pub mod linalg;
pub mod lp;
pub mod scalar;
pub mod transversal;

pub use error::Error;
pub use linalg::{canonical_ray, plane_intersection_line, sign_dot, Ray, Vector};
pub use lp::{lp_feasible, Feasibility, LinearSystem, Rel};
pub use scalar::{parse_rat, rat, rat_int, rat_to_string, Scalar};

/// The shipped exact scalar: arbitrary-precision rationals.
pub type Rat = num_rational::BigRational;

/// Concrete aliases for the shipped scalar.
pub type RatVector = Vector<Rat>;
pub type RatRay = Ray<Rat>;
