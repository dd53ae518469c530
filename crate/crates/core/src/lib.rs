//! Universal monoid actions on free objects, at desk scale.
//!
//! The crate builds and checks, over exact arithmetic:
//!
//! * finite and length-truncated countable monoids ([`monoid`]);
//! * monoid actions on set carriers, the free action `zeta` on `M x S`, and
//!   liftings of actions with commutation certificates ([`action`]);
//! * functional-digraph analysis of finitely described countable self-maps,
//!   including the decision procedure for surjective universality
//!   ([`funcgraph`]);
//! * an abstract concrete-category layer with a free-functor interface,
//!   nice-epimorphism axioms, and three built-in instances ([`freecat`]);
//! * exact-rational finitely supported l1 vectors, basic operators, and the
//!   operator lifting pipeline onto rational targets ([`ellone`]).
//!
//! All verification bounds are explicit, every certificate records what was
//! checked and what was skipped, and nothing in the crate uses floating
//! point.

pub mod action;
pub mod cert;
pub mod ellone;
pub mod freecat;
pub mod funcgraph;
pub mod linalg;
pub mod monoid;
pub mod rng;

/// Default coefficient scalar: arbitrary-precision rationals.
pub type Rat = num_rational::BigRational;

/// Sparse l1 vector with [`Rat`] coefficients over basis `I`.
pub type QSparseVec<I> = linalg::SparseVec<I, Rat>;

/// Dense matrix with [`Rat`] entries.
pub type QMatrix = linalg::Matrix<Rat>;

pub use cert::{CertSquare, Certificate};
pub use monoid::{EnumerationBound, Monoid, MonoidElement};

/// Convenience constructor for a [`Rat`] from an integer pair.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(num_bigint::BigInt::from(numer), num_bigint::BigInt::from(denom))
}
