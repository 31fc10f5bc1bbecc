//! Finite-difference toolkit for degenerate quasilinear elliptic equations
//! in non-divergence form,
//!
//! ```text
//! -Ψ(x, |Du|) Δp u + ℋ(x, Du) = f(x)   in Ω,   u = g on ∂Ω,
//! ```
//!
//! where the diffusion is the normalized p-Laplacian (1 < p <= ∞, plus the
//! (3-h)-homogeneous and variable-exponent variants), `Ψ` is a degeneracy
//! law pinned by power-type exponents, and `ℋ` is a first-order Hamiltonian
//! with power growth.
//!
//! Besides a monotone pseudo-time solver, the crate carries the geometric
//! machinery of sup-bound (Alexandroff-Bakelman-Pucci type) estimates —
//! concave envelopes, contact sets, level-band integrals, sup-convolutions —
//! and desk-scale checkers for the comparison principle, the strong maximum
//! principle with Hopf bound, Liouville-type barriers, and a classical
//! non-uniqueness scenario.
//!
//! See the `book/` guide for worked narrative chapters; its code snippets
//! compile and run as doctests of this crate.

pub mod error;
pub mod fields;
pub mod grid;
pub mod operators;
pub mod abp;
pub mod cli;
pub mod config;
pub mod envelope;
pub mod solver;
pub mod qualitative;
pub mod supconv;

pub use error::{Error, Result};
