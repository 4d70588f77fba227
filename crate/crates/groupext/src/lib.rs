//! A finite-model calculus for extensions of groupoids by bundles of abelian groups.
//!
//! Everything here is desk scale: groupoids are explicit composition tables, bundles
//! assign a finite abelian group (as an invariant-factor tuple) to each unit, and
//! extensions carry their inclusion and projection maps as finite tables. On top of
//! that sit the constructions one wants to compute with rather than prove about:
//! pushouts of extensions along bundle homomorphisms, Baer sums, dual bundles and
//! their transformation groupoids, degree-2 cocycles with Smith-form cohomology, and
//! twisted convolution algebras with a numerical Wedderburn fingerprint.
//!
//! Exactness is the rule. Group elements are integer exponent tuples, cocycle
//! arithmetic is modular, cohomology runs on `BigInt` Smith normal forms, and
//! twisted structure constants are roots of unity stored as exponents. Floating
//! point appears only in the spectral decomposition behind fingerprints and
//! commutant computations, with pinned tolerances and a seeded generator so results
//! are reproducible bit for bit.

// Tables and tensors are walked with parallel indices throughout; iterator
// chains would hide which axis is which.
#![allow(clippy::needless_range_loop)]

pub mod abelian;
pub mod algebra;
pub mod bundle;
pub mod cohomology;
pub mod corpus;
pub mod error;
pub mod extension;
pub mod groupoid;
pub mod intmat;
pub mod io;
pub mod iso;
pub mod report;
pub mod suites;
pub mod wedderburn;

pub use error::{Error, Result};
pub use report::{CheckResult, CheckStatus, ValidationReport, VerificationReport};
