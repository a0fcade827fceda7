//! Homeomorphic solutions of the Beltrami equation and conformal
//! normalisation onto the disk or a round annulus.
//!
//! [`solve_beltrami`] iterates `h = mu (1 + S h)` with the Beurling transform
//! `S` applied as the Fourier multiplier `conj(k)/k` on a box twice the size
//! of the mask grid; `f = z + m conj(z) + P` where `P_zbar = h - m`.
//! Constant coefficients are periodised over the whole box, so the affine
//! solution is reproduced exactly; otherwise `mu` is tapered to zero in the
//! padding and the solution is normalised by composing with the conformal
//! map of its image ([`normalize`]).

mod arnoldi;
mod conformal;
mod solve;

pub use arnoldi::ArnoldiBasis;
pub use conformal::{
    annulus_map, annulus_map_curves, compose_normalized, image_mapper, normalize, riemann_map,
    riemann_map_curve, BoundaryTable, ComposedMap, DiskMap, MapTarget,
};
pub use solve::{
    delta_study, jacobian_check, solve_beltrami, sup_error, JacobianReport, Normalization, QcSolution,
    ResidualStats, SolverOptions,
};

#[cfg(test)]
mod tests;
