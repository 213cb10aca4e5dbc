//! Arithmetic of real quadratic orders O_f = Z + fωZ inside K = Q(√d).
//!
//! The central question the crate answers: for which conductors f does the
//! order O_f have an *unusual* set of distances — equivalently, a Picard
//! group of order 2 none of whose nontrivial classes is hit by the atoms of
//! smallest norm? The module map follows the pipeline that decides it:
//!
//! * [`arith`] — primes, factorization, Kronecker symbol, field invariants;
//! * [`contfrac`] — continued fractions and the fundamental unit ε;
//! * [`forms`] — indefinite binary quadratic forms and ρ-cycles;
//! * [`class_numbers`] — h(d_K), unit indices, and Picard group orders;
//! * [`diophantine`] — the Pell-type solvability conditions |pa² − qb²| = 4
//!   and their conductor-scaled refinements;
//! * [`ideals`] — ideals of O_f in standard form, atoms of norm p³, and
//!   principality with explicit generator witnesses;
//! * [`unusual`] — the four decision routes for "O_f is unusual", the sets
//!   D_d and D'_d, and the type/form classification of d;
//! * [`surveys`] — censuses and searches over ranges of d, with JSON-lines
//!   logging and resume support.

pub mod arith;
pub mod class_numbers;
pub mod config;
pub mod contfrac;
pub mod diophantine;
pub mod error;
pub mod forms;
pub mod ideals;
pub mod surveys;
pub mod unusual;

pub use arith::{FieldData, OmegaKind, PrimeSplit};
pub use contfrac::{FundamentalUnit, UnitResidues};
pub use error::{Error, Result};
