//! Exact computations in the weight lattices, Weyl groups and group rings
//! of `Spin(2n+1)` (family B) and `Spin(2n)` (family D): orbit sums, the
//! truncated characteristic map, symbolic identity checks, a brute-force
//! exponent oracle and torsion-bound tables.
//!
//! All arithmetic is exact. Containers are generic over [`scalar::Scalar`];
//! the aliases below fix the types used throughout.

pub mod arith;
pub mod bounds;
pub mod error;
pub mod groupring;
pub mod identities;
pub mod lattice;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod suite;
pub mod weyl;

pub use error::{Error, Result};
pub use groupring::GroupRingElement;
pub use lattice::{Family, GroupType, Weight};
pub use report::{Status, VerificationReport};

/// Rational polynomial (e- or omega-variables).
pub type QPoly = poly::Polynomial<num_rational::BigRational>;
/// Integer polynomial.
pub type ZPoly = poly::Polynomial<num_bigint::BigInt>;
/// Integer matrix with arbitrary-precision entries.
pub type ZMatrix = matrix::IntMatrix<num_bigint::BigInt>;
/// Integer lattice with arbitrary-precision entries.
pub type ZLattice = matrix::Lattice<num_bigint::BigInt>;
/// Machine-word polynomial, for hot loops with known small coefficients.
pub type SmallPoly = poly::Polynomial<i64>;
