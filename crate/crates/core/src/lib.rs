//! Causal perturbation theory at desk scale.
//!
//! The crate follows the inductive Epstein-Glaser construction of the scattering
//! operator with creation/annihilation operators realised as Hida operators on a
//! finite momentum grid:
//!
//! * [`grassmann`] parity signs for reorderings of graded variables,
//! * [`fock`] truncated Fock space, ladder operators and integral kernel operators,
//! * [`wick`] symbolic Wick products and the Wick theorem for products,
//! * [`causal`] pairing/commutation functions and power counting,
//! * [`splitting`] retarded/advanced splitting of causal distributions,
//! * [`qed`] second-order vacuum polarization and self energy with on-shell normalization,
//! * [`adiabatic`] scaling family `g(eps x)` and the adiabatic-limit sweeps,
//! * [`induction`] the inductive step `A'_n`, `R'_n`, `D_n`, `S_n`,
//! * [`cli`] the batch command-line front end.

pub mod adiabatic;
pub mod causal;
pub mod cli;
pub mod fock;
pub mod grassmann;
pub mod induction;
pub mod qed;
pub mod quad;
pub mod splitting;
pub mod wick;

pub use num_complex::Complex64;
