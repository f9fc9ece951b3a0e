//! Exact calculator for the invariants attached to a circle action on an
//! infinite UHF algebra.
//!
//! The input is a character polynomial `p = a_0 + a_1 t + ... + a_d t^d` with
//! nonnegative integer coefficients and `a_0 >= 1`. From it the crate computes,
//! with exact integer arithmetic throughout:
//!
//! * the localization `Z[t, 1/t, 1/p]` of `Z[t]`, its unit group and the
//!   monoid of positive units ([`locring`]),
//! * the bounded subring and its two distinguished subgroups, with
//!   certificate-producing membership tests ([`bddring`]),
//! * the Bratteli diagram of the fixed point algebra and the K-theory
//!   connecting maps between its levels ([`bratteli`]),
//! * homotopy groups of unitary groups and automorphism groups built from the
//!   endpoint coefficients `a_0`, `a_d` ([`homotopy`]),
//! * the cohomology-theoretic assembly over tori and finite CW complexes,
//!   including the comparison against the classical degree-one and
//!   degree-three invariants when `p = 1` ([`cohomology`]),
//! * the combinatorial coefficient-growth estimates used to control powers of
//!   polynomials with large middle coefficients ([`appendixpolys`]).
//!
//! Decisions that depend on an unbounded search (positivity of an element,
//! membership in the bounded subring) are tri-state: a definite yes carries a
//! witness exponent, a definite no carries a machine-checkable certificate,
//! and everything else is reported as unknown rather than guessed.

pub mod appendixpolys;
pub mod bddring;
pub mod bratteli;
pub mod cohomology;
pub mod descriptor;
pub mod factorint;
pub mod homotopy;
pub mod locring;
pub mod polycore;
