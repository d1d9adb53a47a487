//! Gram fields, the generator orthogonalization procedure, residual
//! generators and the g-minimality diagnostic.
//!
//! For generators `φ_1, …, φ_N` the procedure sets `ĝ_1 = φ̂_1` and
//!
//! ```text
//! ĝ_k = φ̂_k − Σ_{j<k} b_j^(k) ĝ_j,    b_j^(k) = [φ̂_k, ĝ_j] / [ĝ_j, ĝ_j]
//! ```
//!
//! which makes the brackets `[ĝ_l, ĝ_j]` vanish for `l ≠ j` and splits
//! `S(G)` into the orthogonal sum of the `S(g_k)`. Everything is fiber-local.
//!
//! A fiber where `[ĝ_k, ĝ_k] ≤ zero_tol · max_i [φ̂_k, φ̂_k]` is treated as
//! degenerate: `ĝ_k` is set to zero there, the quotients that divide by it
//! are zero (`0/0 = 0`), and the fiber is recorded in the mask of `k`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::fibercore::{
    bracket, common_grid, periodic_quotient_with_floor, pointwise_multiply, FiberMask,
    FiberedFunction, GridSpec, PeriodicFunction, Quotient,
};
use crate::linalg::HermitianEigen;
use crate::par;
use crate::{Error, Result};

/// Default integral-ratio threshold for the g-minimality verdict.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// Per-fiber Gram matrices `Γ_{lj}(t_i) = [φ̂_l, φ̂_j](t_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramField {
    grid: GridSpec,
    size: usize,
    /// Fiber-major; each matrix row-major.
    entries: Vec<Complex64>,
}

impl GramField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Generator count `N`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// `Γ(t_i)` as a row-major `N × N` slice.
    pub fn matrix(&self, i: usize) -> &[Complex64] {
        let n2 = self.size * self.size;
        &self.entries[i * n2..(i + 1) * n2]
    }

    pub fn entry(&self, i: usize, l: usize, j: usize) -> Complex64 {
        self.matrix(i)[l * self.size + j]
    }

    /// Largest diagonal entry over all fibers.
    pub fn scale(&self) -> f64 {
        (0..self.grid.fibers())
            .flat_map(|i| (0..self.size).map(move |l| (i, l)))
            .map(|(i, l)| self.entry(i, l, l).re)
            .fold(0.0, f64::max)
    }

    pub fn max_offdiagonal(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.grid.fibers() {
            for l in 0..self.size {
                for j in 0..self.size {
                    if l != j {
                        max = max.max(self.entry(i, l, j).norm());
                    }
                }
            }
        }
        max
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.grid.fibers() {
            for l in 0..self.size {
                for j in 0..=l {
                    max = max.max((self.entry(i, l, j) - self.entry(i, j, l).conj()).norm());
                }
            }
        }
        max
    }

    /// Smallest eigenvalue over all fibers.
    pub fn min_eigenvalue(&self) -> f64 {
        par::map_fibers(self.grid.fibers(), |i| HermitianEigen::new(self.matrix(i), self.size).min_value())
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|Γ_{lj}(t_i)|²  − Γ_{ll}(t_i) Γ_{jj}(t_i)` over fibers and
    /// pairs; nonpositive up to rounding by Cauchy–Schwarz.
    pub fn cauchy_schwarz_excess(&self) -> f64 {
        let mut max = f64::NEG_INFINITY;
        for i in 0..self.grid.fibers() {
            for l in 0..self.size {
                for j in 0..self.size {
                    let lhs = self.entry(i, l, j).norm_sqr();
                    let rhs = self.entry(i, l, l).re * self.entry(i, j, j).re;
                    max = max.max(lhs - rhs);
                }
            }
        }
        max
    }
}

pub fn gram_field(generators: &[FiberedFunction]) -> Result<GramField> {
    let grid = common_grid(generators)?;
    let n = generators.len();
    let blocks = par::map_fibers(grid.fibers(), |i| {
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for l in 0..n {
            for j in 0..n {
                m[l * n + j] = generators[l]
                    .fiber(i)
                    .iter()
                    .zip(generators[j].fiber(i))
                    .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b.conj());
            }
        }
        m
    });
    Ok(GramField {
        grid,
        size: n,
        entries: blocks.into_iter().flatten().collect(),
    })
}

/// Output of [`orthogonalize`].
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoSystem {
    g: Vec<FiberedFunction>,
    /// `b[k][j] = b_j^(k)` for `j < k`.
    b: Vec<Vec<PeriodicFunction>>,
    weights: Vec<PeriodicFunction>,
    zero_mask: Vec<FiberMask>,
    floors: Vec<f64>,
}

impl OrthoSystem {
    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn grid(&self) -> &GridSpec {
        self.g[0].grid()
    }

    /// The orthogonalized generators `ĝ_k`.
    pub fn generators(&self) -> &[FiberedFunction] {
        &self.g
    }

    /// `b_j^(k)`, defined for `j < k`.
    pub fn coefficient_fn(&self, k: usize, j: usize) -> &PeriodicFunction {
        &self.b[k][j]
    }

    /// `W_{g_k} = [ĝ_k, ĝ_k]`.
    pub fn weight(&self, k: usize) -> &PeriodicFunction {
        &self.weights[k]
    }

    pub fn zero_mask(&self, k: usize) -> &FiberMask {
        &self.zero_mask[k]
    }

    /// Absolute threshold below which `W_{g_k}` counts as zero.
    pub fn floor(&self, k: usize) -> f64 {
        self.floors[k]
    }

    pub fn masked_union(&self) -> FiberMask {
        self.zero_mask
            .iter()
            .skip(1)
            .fold(self.zero_mask[0].clone(), |acc, m| acc.union(m))
    }

    /// `[f̂, ĝ_k] / [ĝ_k, ĝ_k]` with the degenerate fibers of `ĝ_k` zeroed.
    pub fn coefficient(&self, f: &FiberedFunction, k: usize) -> Result<Quotient> {
        periodic_quotient_with_floor(&bracket(f, &self.g[k])?, &self.weights[k], self.floors[k])
    }

    /// `max_{i, l≠j} |[ĝ_l, ĝ_j](t_i)|`.
    pub fn max_offdiagonal(&self) -> Result<f64> {
        Ok(gram_field(&self.g)?.max_offdiagonal())
    }

    /// Largest `|φ̂_k − ĝ_k − Σ_{j<k} b_j^(k) ĝ_j|` over translates and
    /// fibers outside the mask of `k`.
    pub fn reconstruction_defect(&self, generators: &[FiberedFunction]) -> Result<f64> {
        if generators.len() != self.g.len() {
            return Err(Error::Shape(alloc::format!(
                "{} generators for a system of {}",
                generators.len(),
                self.g.len()
            )));
        }
        let mut max = 0.0f64;
        for (k, phi) in generators.iter().enumerate() {
            let mut rebuilt = self.g[k].clone();
            for j in 0..k {
                rebuilt = rebuilt.try_add(&pointwise_multiply(&self.b[k][j], &self.g[j])?)?;
            }
            let diff = phi.try_sub(&rebuilt)?;
            for (i, row) in diff.fibers().enumerate() {
                if !self.zero_mask[k].contains(i) {
                    max = row.iter().map(|v| v.norm()).fold(max, f64::max);
                }
            }
        }
        Ok(max)
    }
}

/// Runs the orthogonalization procedure on `generators` in the given order.
pub fn orthogonalize(generators: &[FiberedFunction], zero_tol: f64) -> Result<OrthoSystem> {
    common_grid(generators)?;
    if zero_tol.is_nan() || zero_tol < 0.0 {
        return Err(Error::Config(alloc::format!("zero_tol must be nonnegative, got {zero_tol}")));
    }
    let n = generators.len();
    let mut sys = OrthoSystem {
        g: Vec::with_capacity(n),
        b: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
        zero_mask: Vec::with_capacity(n),
        floors: Vec::with_capacity(n),
    };
    for phi in generators {
        let floor = zero_tol * bracket(phi, phi)?.max_real();
        let mut g = phi.clone();
        let mut row = Vec::with_capacity(sys.g.len());
        for j in 0..sys.g.len() {
            let q = periodic_quotient_with_floor(&bracket(phi, &sys.g[j])?, &sys.weights[j], sys.floors[j])?;
            g = g.try_sub(&pointwise_multiply(&q.value, &sys.g[j])?)?;
            row.push(q.value);
        }
        let mut weight = bracket(&g, &g)?;
        let mask = FiberMask::from_flags(weight.values().iter().map(|w| w.re <= floor).collect());
        g.zero_masked(&mask);
        weight.zero_masked(&mask);
        sys.g.push(g);
        sys.b.push(row);
        sys.weights.push(weight);
        sys.zero_mask.push(mask);
        sys.floors.push(floor);
    }
    Ok(sys)
}

/// The residual `ĥ_j = φ̂_j − P̂_{G^(j)}(φ_j)` with its weight and mask.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub h: FiberedFunction,
    pub weight: PeriodicFunction,
    pub mask: FiberMask,
    pub floor: f64,
}

/// Indices of `G^(j)` in their original order, followed by `j`.
pub(crate) fn order_with_last(n: usize, j: usize) -> Vec<usize> {
    (0..n).filter(|&l| l != j).chain(core::iter::once(j)).collect()
}

/// Orthogonalizes `G` reordered so that `φ_j` comes last and returns the
/// final residual. `j` is zero-based.
pub fn residual(generators: &[FiberedFunction], j: usize, zero_tol: f64) -> Result<Residual> {
    let n = generators.len();
    if n < 2 {
        return Err(Error::TooFewGenerators { required: 2, got: n });
    }
    if j >= n {
        return Err(Error::Index { index: j, len: n });
    }
    let reordered: Vec<FiberedFunction> = order_with_last(n, j)
        .into_iter()
        .map(|l| generators[l].clone())
        .collect();
    let mut sys = orthogonalize(&reordered, zero_tol)?;
    let last = n - 1;
    Ok(Residual {
        h: sys.g.swap_remove(last),
        weight: sys.weights.swap_remove(last),
        mask: sys.zero_mask.swap_remove(last),
        floor: sys.floors[last],
    })
}

pub fn residual_generator(generators: &[FiberedFunction], j: usize, zero_tol: f64) -> Result<FiberedFunction> {
    Ok(residual(generators, j, zero_tol)?.h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimalityVerdict {
    /// `∫ W_{h_j} / ∫ W_{φ_j}` (0 when both vanish).
    pub ratio: f64,
    /// Fraction of fibers where `W_{h_j} > rel_tol · max W_{φ_j}`.
    pub positive_fraction: f64,
    /// `ratio > rel_tol`.
    pub minimal: bool,
}

/// Decides `φ_j ∉ S(G^(j))` for every `j` by comparing the integrated
/// residual weight with the generator weight.
pub fn g_minimality(generators: &[FiberedFunction], rel_tol: f64, zero_tol: f64) -> Result<Vec<MinimalityVerdict>> {
    let n = generators.len();
    if n < 2 {
        return Err(Error::TooFewGenerators { required: 2, got: n });
    }
    (0..n)
        .map(|j| {
            let r = residual(generators, j, zero_tol)?;
            let w_phi = bracket(&generators[j], &generators[j])?;
            Ok(verdict(&r.weight, &w_phi, rel_tol))
        })
        .collect()
}

pub(crate) fn verdict(w_h: &PeriodicFunction, w_phi: &PeriodicFunction, rel_tol: f64) -> MinimalityVerdict {
    let num = w_h.mean().re;
    let den = w_phi.mean().re;
    let ratio = if den > 0.0 { num / den } else { 0.0 };
    let cut = rel_tol * w_phi.max_real();
    let positive = w_h.values().iter().filter(|w| w.re > cut).count();
    MinimalityVerdict {
        ratio,
        positive_fraction: positive as f64 / w_h.values().len() as f64,
        minimal: ratio > rel_tol,
    }
}
