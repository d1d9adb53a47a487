//! Fiberized representation of Fourier transforms and the bracket/norm
//! primitives built on it.
//!
//! A [`FiberedFunction`] stores `f̂(t_i + k)` for fibers `t_i = i/M` and
//! translates `|k| ≤ K`. The bracket product
//!
//! ```text
//! [f, g](t) = Σ_k f̂(t + k) · conj(ĝ(t + k))
//! ```
//!
//! is truncated to the stored translates, so it is exact for spectra
//! supported in `[-K, K + 1)`. All norms use the uniform `M`-point rectangle
//! rule on `[0, 1)`, which integrates trigonometric polynomials of degree
//! below `M/2` exactly.
//!
//! Sums run over ascending `k` inside a fiber, then over ascending `i`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{config_err, domain_err, shape_err};
use crate::par;
use crate::{Error, Result};

/// Relative threshold under which a weight counts as zero (the `0/0 = 0`
/// convention).
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Uniform discretization of the fiberized Fourier domain in one dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridSpec {
    fibers: usize,
    radius: usize,
}

impl GridSpec {
    pub fn new(fibers: usize, radius: usize) -> Result<Self> {
        if fibers < 2 {
            return Err(config_err!("fiber count M must be at least 2, got {fibers}"));
        }
        if radius < 1 {
            return Err(config_err!("translate radius K must be at least 1, got {radius}"));
        }
        Ok(Self { fibers, radius })
    }

    /// Number of fibers `M`.
    #[inline]
    pub fn fibers(&self) -> usize {
        self.fibers
    }

    /// Translate radius `K`.
    #[inline]
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Number of stored translates, `2K + 1`.
    #[inline]
    pub fn translates(&self) -> usize {
        2 * self.radius + 1
    }

    /// Spatial dimension. Only `n = 1` is supported.
    #[inline]
    pub fn dimension(&self) -> usize {
        1
    }

    #[inline]
    pub fn fiber_point(&self, i: usize) -> f64 {
        i as f64 / self.fibers as f64
    }

    /// Translate `k` stored in column `slot`.
    #[inline]
    pub fn translate(&self, slot: usize) -> i64 {
        slot as i64 - self.radius as i64
    }

    /// Column holding translate `k`, if `|k| ≤ K`.
    #[inline]
    pub fn slot(&self, k: i64) -> Option<usize> {
        let s = k + self.radius as i64;
        (s >= 0 && (s as usize) < self.translates()).then_some(s as usize)
    }

    pub fn translate_range(&self) -> core::ops::RangeInclusive<i64> {
        -(self.radius as i64)..=self.radius as i64
    }

    /// Frequency `t_i + k` sampled at `(i, slot)`.
    #[inline]
    pub fn frequency(&self, i: usize, slot: usize) -> f64 {
        self.fiber_point(i) + self.translate(slot) as f64
    }

    fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(shape_err!(
                "grid mismatch: (M={}, K={}) vs (M={}, K={})",
                self.fibers,
                self.radius,
                other.fibers,
                other.radius
            ));
        }
        Ok(())
    }
}

pub fn make_grid(fibers: usize, radius: usize) -> Result<GridSpec> {
    GridSpec::new(fibers, radius)
}

/// The grid shared by a nonempty generator list.
pub(crate) fn common_grid(functions: &[FiberedFunction]) -> Result<GridSpec> {
    let first = functions
        .first()
        .ok_or(Error::TooFewGenerators { required: 1, got: 0 })?;
    for f in &functions[1..] {
        first.grid.ensure_same(&f.grid)?;
    }
    Ok(first.grid)
}

fn check_finite(values: &[Complex64], width: usize) -> Result<()> {
    match values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        Some(pos) => Err(Error::NonFinite { fiber: pos / width }),
        None => Ok(()),
    }
}

/// `f̂` sampled on fibers × translates, stored fiber-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberedFunction {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl FiberedFunction {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![ZERO; grid.fibers() * grid.translates()],
        }
    }

    /// Builds `f̂(t_i + k)` from `f(i, k)`.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(usize, i64) -> Complex64 + Sync + Send,
    {
        let width = grid.translates();
        let mut values = vec![ZERO; grid.fibers() * width];
        par::for_each_row(&mut values, width, |i, row| {
            for (slot, v) in row.iter_mut().enumerate() {
                *v = f(i, grid.translate(slot));
            }
        });
        check_finite(&values, width)?;
        Ok(Self { grid, values })
    }

    /// Wraps fiber-major values (`values[i * (2K+1) + (k + K)]`).
    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        let expected = grid.fibers() * grid.translates();
        if values.len() != expected {
            return Err(shape_err!("expected {expected} values, got {}", values.len()));
        }
        check_finite(&values, grid.translates())?;
        Ok(Self { grid, values })
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// The translate sequence `(f̂(t_i + k))_k` of fiber `i`.
    #[inline]
    pub fn fiber(&self, i: usize) -> &[Complex64] {
        let w = self.grid.translates();
        &self.values[i * w..(i + 1) * w]
    }

    /// Value at fiber `i`, translate `k`; zero outside the stored band.
    pub fn get(&self, i: usize, k: i64) -> Complex64 {
        match self.grid.slot(k) {
            Some(slot) => self.fiber(i)[slot],
            None => ZERO,
        }
    }

    pub fn fibers(&self) -> impl Iterator<Item = &[Complex64]> {
        self.values.chunks(self.grid.translates())
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Sets every translate of the masked fibers to zero.
    pub fn zero_masked(&mut self, mask: &FiberMask) {
        let w = self.grid.translates();
        for (row, _) in self.values.chunks_mut(w).zip(&mask.0).filter(|(_, m)| **m) {
            row.fill(ZERO);
        }
    }
}

/// One complex value per fiber: a sampled `ℤ`-periodic function.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicFunction {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl PeriodicFunction {
    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, ZERO)
    }

    pub fn constant(grid: GridSpec, value: Complex64) -> Self {
        Self {
            grid,
            values: vec![value; grid.fibers()],
        }
    }

    pub fn from_fn<F>(grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        Self::from_values(grid, par::map_fibers(grid.fibers(), f))
    }

    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.fibers() {
            return Err(shape_err!("expected {} fiber values, got {}", grid.fibers(), values.len()));
        }
        check_finite(&values, 1)?;
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: GridSpec, values: &[f64]) -> Result<Self> {
        Self::from_values(grid, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Largest real part, or 0 when all real parts are negative.
    pub fn max_real(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Rectangle-rule integral over `[0, 1)`.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().fold(ZERO, |acc, v| acc + v) / self.grid.fibers() as f64
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn zero_masked(&mut self, mask: &FiberMask) {
        for (v, _) in self.values.iter_mut().zip(&mask.0).filter(|(_, m)| **m) {
            *v = ZERO;
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        })
    }
}

/// Set of fibers singled out by a degeneracy test.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FiberMask(Vec<bool>);

impl FiberMask {
    pub fn none(fibers: usize) -> Self {
        Self(vec![false; fibers])
    }

    pub fn from_flags(flags: Vec<bool>) -> Self {
        Self(flags)
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&m| m).count()
    }

    pub fn fraction(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.count() as f64 / self.0.len() as f64
        }
    }

    pub fn flags(&self) -> &[bool] {
        &self.0
    }

    pub fn union(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| *a || *b).collect())
    }
}

/// Result of [`periodic_quotient`]: the quotient and the fibers where the
/// denominator was treated as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Quotient {
    pub value: PeriodicFunction,
    pub zeroed: FiberMask,
}

#[inline]
fn fiber_bracket(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    f.iter().zip(g).fold(ZERO, |acc, (a, b)| acc + a * b.conj())
}

/// `[f, g](t_i) = Σ_{k=-K}^{K} f̂(t_i + k) · conj(ĝ(t_i + k))`.
pub fn bracket(f: &FiberedFunction, g: &FiberedFunction) -> Result<PeriodicFunction> {
    f.grid.ensure_same(&g.grid)?;
    let values = par::map_fibers(f.grid.fibers(), |i| fiber_bracket(f.fiber(i), g.fiber(i)));
    Ok(PeriodicFunction { grid: f.grid, values })
}

/// `A / B` fiberwise, with `0/0 = 0`: fibers where
/// `B ≤ zero_tol · max_i B` are set to zero and reported.
pub fn periodic_quotient(
    numerator: &PeriodicFunction,
    denominator: &PeriodicFunction,
    zero_tol: f64,
) -> Result<Quotient> {
    let floor = zero_tol * denominator.max_real();
    periodic_quotient_with_floor(numerator, denominator, floor)
}

/// Like [`periodic_quotient`] but with an absolute zero threshold.
pub fn periodic_quotient_with_floor(
    numerator: &PeriodicFunction,
    denominator: &PeriodicFunction,
    floor: f64,
) -> Result<Quotient> {
    numerator.grid.ensure_same(&denominator.grid)?;
    if floor.is_nan() || floor < 0.0 {
        return Err(config_err!("zero threshold must be nonnegative, got {floor}"));
    }
    for (i, b) in denominator.values.iter().enumerate() {
        if b.re < -floor || b.im.abs() > floor {
            return Err(domain_err!("weight at fiber {i} is {b}, expected a nonnegative real"));
        }
    }
    let mut zeroed = vec![false; numerator.grid.fibers()];
    let values = numerator
        .values
        .iter()
        .zip(&denominator.values)
        .zip(zeroed.iter_mut())
        .map(|((a, b), z)| {
            if b.re <= floor {
                *z = true;
                ZERO
            } else {
                a / b.re
            }
        })
        .collect();
    Ok(Quotient {
        value: PeriodicFunction {
            grid: numerator.grid,
            values,
        },
        zeroed: FiberMask(zeroed),
    })
}

/// `(F · f̂)(t_i + k) = F(t_i) · f̂(t_i + k)`, extending `F` periodically.
pub fn pointwise_multiply(coeff: &PeriodicFunction, f: &FiberedFunction) -> Result<FiberedFunction> {
    coeff.grid.ensure_same(&f.grid)?;
    let width = f.grid.translates();
    let mut values = f.values.clone();
    par::for_each_row(&mut values, width, |i, row| {
        let c = coeff.values[i];
        row.iter_mut().for_each(|v| *v *= c);
    });
    Ok(FiberedFunction {
        grid: f.grid,
        values,
    })
}

/// Per-fiber energy `Σ_k |f̂(t_i + k)|²`.
pub(crate) fn fiber_energies(f: &FiberedFunction) -> Vec<f64> {
    par::map_fibers(f.grid.fibers(), |i| fiber_bracket(f.fiber(i), f.fiber(i)).re)
}

/// `‖f‖_{L²(ℝ)}` by the rectangle rule: `sqrt((1/M) Σ_{i,k} |f̂(t_i + k)|²)`.
pub fn l2_norm(f: &FiberedFunction) -> f64 {
    let total: f64 = fiber_energies(f).iter().sum();
    libm::sqrt(total / f.grid.fibers() as f64)
}

/// `‖F‖_{L²(𝕋, W)} = sqrt((1/M) Σ_i |F(t_i)|² W(t_i))`.
pub fn weighted_norm(coeff: &PeriodicFunction, weight: &PeriodicFunction) -> Result<f64> {
    coeff.grid.ensure_same(&weight.grid)?;
    let tol = DEFAULT_ZERO_TOL * weight.max_abs();
    let mut total = 0.0;
    for (i, (c, w)) in coeff.values.iter().zip(&weight.values).enumerate() {
        if w.re < -tol || w.im.abs() > tol {
            return Err(domain_err!("weight at fiber {i} is {w}, expected a nonnegative real"));
        }
        total += c.norm_sqr() * w.re.max(0.0);
    }
    Ok(libm::sqrt(total / coeff.grid.fibers() as f64))
}

/// `⟨f, g⟩ = (1/M) Σ_{i,k} f̂(t_i + k) · conj(ĝ(t_i + k))`.
pub fn inner(f: &FiberedFunction, g: &FiberedFunction) -> Result<Complex64> {
    Ok(bracket(f, g)?.mean())
}
