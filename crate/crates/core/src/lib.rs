//! Finite-field and exact-arithmetic checks for permutation binomials of
//! the form `x^(q-2) + t*x^(q^2-q-1)` over `F_{q^2}` and the binomial-sum
//! identities behind their classification.

pub mod binom_mod;
pub mod ffield;
pub mod fpoly;
pub mod gnq;
pub mod permtest;
pub mod report;
pub mod sweeps;
pub mod wzhyper;
