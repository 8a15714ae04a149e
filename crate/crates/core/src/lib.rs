//! Exact computer algebra on totally disconnected locally compact groups.
//!
//! The crate provides, over the cyclotomic scalar field:
//!
//! * [`scalar`] — arithmetic in Q(zeta_N) with arbitrary-precision rational
//!   coefficients, canonicalized to the minimal conductor;
//! * [`group`] — a uniform model of locally profinite groups presented by a
//!   filtration of compact open subgroups (finite groups, Z_p, Q_p, discrete
//!   Z, the ax+b-style group Q_p x| Z, and finite products), with exact coset
//!   enumeration, Haar measure and modular function;
//! * [`schwartz`] — the multiplier Hopf *-algebra of locally constant
//!   compactly supported functions: pointwise algebra, translations,
//!   antipode, counit, Haar integrals, finite coproduct decompositions and
//!   their inverses, group-like detection, membership certificates;
//! * [`convalg`] — the dual convolution algebra of symbols acting by left
//!   convolution: product, involution, dual coproduct/antipode/counit, Haar
//!   weight, subgroup projections, conditional expectation, reconstruction;
//! * [`fourier`] — exact Pontryagin duality for the self-dual abelian
//!   instances (Q_p and labelled finite abelian groups, and products);
//! * [`operator`] — exact finite truncations of L^2(G): matrices of
//!   convolution and multiplication operators, fraction-free rank,
//!   commutators;
//! * [`harness`] — seeded, deterministic property suites with shrinking and
//!   machine-readable reports;
//! * [`dsl`] — the text syntax for scalars, group elements and functions used
//!   by the CLI and the JSON formats.

pub mod convalg;
pub mod dsl;
pub mod error;
pub mod fourier;
pub mod group;
pub mod harness;
pub mod linalg;
pub mod operator;
pub mod scalar;
pub mod schwartz;

pub use convalg::{ConvElement, DualDecomposition};
pub use error::{Error, Result};
pub use group::{GElem, Group, GroupModel, Level, Side};
pub use scalar::CycScalar;
pub use schwartz::{BSFunction, TensorDecomposition};
pub use operator::{TruncMatrix, Truncation};
