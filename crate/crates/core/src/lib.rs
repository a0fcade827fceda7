//! Numerics for degenerate Beltrami equations `f_zbar = mu f_z`.
//!
//! The crate is organised by task:
//!
//! * [`beltrami`] – coefficient families, dilatation and tangent dilatation;
//! * [`criteria`] – circle norms and the admissibility tests built on them;
//! * [`modulus`] – condenser capacity and the ring inequality;
//! * [`qcsolver`] – a spectral Beltrami solver and conformal normalisation;
//! * [`dirichlet`] – the Schwarz-formula Dirichlet pipeline and annular
//!   multivalent solutions;
//! * [`primeends`] – prime-end spaces of catalog domains;
//! * [`cli`] – configuration-driven runs producing JSON/CSV reports.

pub mod beltrami;
pub mod error;
pub mod exec;
pub mod fft;
pub mod geometry;
pub mod grid;
pub mod interp;
pub mod quad;
pub mod criteria;
pub mod maps;
pub mod modulus;
pub mod qcsolver;
pub mod primeends;
pub mod dirichlet;
pub mod cli;

pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::C64;
