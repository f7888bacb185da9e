//! Exact computation in two-generator algebras subject to an affine relation.
//!
//! The central object is the associative unital algebra
//!
//! ```text
//! A(q, alpha, beta, gamma) = K<x, y | y*x = q*x*y + alpha*x + beta*y + gamma>
//! ```
//!
//! over a field `K`, with `q != 0`.  The family covers the commutative plane,
//! the first Weyl algebra, the shift-operator algebra, the quantum plane and
//! the quantum Weyl algebra, and every member has a Poincare-Birkhoff-Witt
//! basis `{x^a y^b}` in which all arithmetic here is carried out exactly.
//!
//! Module map:
//!
//! * [`coeffs`] - coefficient fields: arbitrary-precision rationals, the
//!   rational function field `Q(q, alpha, beta, gamma)`, and prime fields.
//! * [`qcomb`] - q-numbers, q-binomials, Stirling numbers and friends.
//! * [`algebra`] - parameter records, classification onto the five model
//!   algebras, affine generator maps and their verification.
//! * [`ncpoly`] - normally ordered polynomials, the rewriting oracle, closed
//!   commutation formulas, recurrences, pullback through isomorphisms, and
//!   the commutation cache with its storage strategies.
//! * [`identities`] - binomial-type expansions and the misordering index.
//! * [`center`] - centralizers, centers and gradings on a degree window.
//! * [`expr`] - a small expression language for building elements.
//! * [`bench`] - deterministic workloads and cache-strategy reports.

pub mod algebra;
pub mod bench;
pub mod center;
pub mod coeffs;
pub mod expr;
pub mod identities;
pub mod ncpoly;
pub mod qcomb;

pub use algebra::{classify, AffineMap, AlgebraParams, AlgebraRef, ModelClass, TableRow};
pub use coeffs::{BigRat, FieldElem, FieldMode};
pub use ncpoly::{CacheStrategy, CommuteCache, Monomial, NcPoly};
