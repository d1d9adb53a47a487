//! Finitely generated shift-invariant subspaces of L²(ℝ), computed fiber by fiber.
//!
//! Every element of L²(ℝ) is represented by its Fourier transform sampled on
//! `t_i + k`, where `t_i = i/M` runs over the unit interval ("fibers") and
//! `k ∈ {-K, …, K}` over integer translates. Integer-periodic symbols such as
//! bracket products, weights and coefficient functions are sampled on the
//! fibers alone.
//!
//! The crate is `no_std` (it needs `alloc`). Enabling the `rayon` feature
//! parallelizes fiber loops; results are bit-identical to the serial path.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
mod error;
pub mod fibercore;
pub mod generators;
mod linalg;
pub mod orthogonalizer;
mod par;
mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use analysis::{
    bessel_gap, dual_coefficients, lift, principal_coefficient, project, project_onto,
    project_oracle, reconstruct, relative_distance, CoeffSet, Report,
};
pub use fibercore::{
    bracket, inner, l2_norm, make_grid, periodic_quotient, periodic_quotient_with_floor,
    pointwise_multiply, weighted_norm,
    FiberMask, FiberedFunction, GridSpec, PeriodicFunction, Quotient, DEFAULT_ZERO_TOL,
};
pub use generators::{
    build_generator, build_generators, generator_weight, periodization_tail, synthesize,
    GeneratorKind, GeneratorSpec, PeriodizationTail, TrigPoly,
};
pub use orthogonalizer::{
    g_minimality, gram_field, orthogonalize, residual, residual_generator, GramField,
    MinimalityVerdict, OrthoSystem, Residual, DEFAULT_REL_TOL,
};
