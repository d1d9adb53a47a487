//! Orthogonal projection onto `S(G)`, dual coefficients with respect to the
//! residual generators, the Bessel gap, and the lift into `S(G)`.
//!
//! [`project`] goes through the orthogonalized system; [`project_oracle`]
//! solves the per-fiber normal equations with a Hermitian pseudoinverse and
//! never touches the orthogonalization. The two must agree.

use alloc::string::String;
use alloc::vec::Vec;
use core::time::Duration;

use num_complex::Complex64;

use crate::fibercore::{
    bracket, common_grid, l2_norm, periodic_quotient, periodic_quotient_with_floor, pointwise_multiply,
    weighted_norm, FiberMask, FiberedFunction, PeriodicFunction,
};
use crate::linalg::HermitianEigen;
use crate::orthogonalizer::{gram_field, orthogonalize, residual, verdict, MinimalityVerdict, OrthoSystem, DEFAULT_REL_TOL};
use crate::{par, Error, Result};

fn check_member_grid(f: &FiberedFunction, generators: &[FiberedFunction]) -> Result<()> {
    let grid = common_grid(generators)?;
    if *f.grid() != grid {
        return Err(Error::Shape(alloc::format!(
            "signal grid (M={}, K={}) differs from generator grid (M={}, K={})",
            f.grid().fibers(),
            f.grid().radius(),
            grid.fibers(),
            grid.radius()
        )));
    }
    Ok(())
}

/// `‖a − b‖ / ‖b‖`, with `0/0 = 0`.
pub fn relative_distance(a: &FiberedFunction, b: &FiberedFunction) -> Result<f64> {
    let num = l2_norm(&a.try_sub(b)?);
    let den = l2_norm(b);
    Ok(if den > 0.0 { num / den } else if num == 0.0 { 0.0 } else { f64::INFINITY })
}

/// `P̂_G f = Σ_k [f̂, ĝ_k][ĝ_k, ĝ_k]^{-1} ĝ_k`.
pub fn project(f: &FiberedFunction, generators: &[FiberedFunction], zero_tol: f64) -> Result<FiberedFunction> {
    check_member_grid(f, generators)?;
    project_onto(f, &orthogonalize(generators, zero_tol)?)
}

/// Projection through an already orthogonalized system.
pub fn project_onto(f: &FiberedFunction, system: &OrthoSystem) -> Result<FiberedFunction> {
    let mut out = FiberedFunction::zeros(*f.grid());
    for (k, g) in system.generators().iter().enumerate() {
        let q = system.coefficient(f, k)?;
        out = out.try_add(&pointwise_multiply(&q.value, g)?)?;
    }
    Ok(out)
}

/// Per-fiber least-squares projection.
///
/// At each fiber solves `A c = β` with `A_{lj} = Σ_k conj(φ̂_l) φ̂_j` and
/// `β_l = [f̂, φ̂_l]` by a Hermitian pseudoinverse that drops eigenvalues at
/// or below `zero_tol · λ_max` (`λ_max` taken over all fibers), then returns
/// `Σ_l c_l φ̂_l`.
pub fn project_oracle(f: &FiberedFunction, generators: &[FiberedFunction], zero_tol: f64) -> Result<FiberedFunction> {
    check_member_grid(f, generators)?;
    let n = generators.len();
    let grid = *f.grid();
    let gram = gram_field(generators)?;
    let eigs = par::map_fibers(grid.fibers(), |i| {
        // normal matrix is the transpose of the Gram matrix
        let mut a = alloc::vec![Complex64::new(0.0, 0.0); n * n];
        for l in 0..n {
            for j in 0..n {
                a[l * n + j] = gram.entry(i, j, l);
            }
        }
        HermitianEigen::new(&a, n)
    });
    let lambda_max = eigs.iter().map(HermitianEigen::max_value).fold(0.0, f64::max);
    let cutoff = zero_tol * lambda_max;
    let width = grid.translates();
    let mut values = alloc::vec![Complex64::new(0.0, 0.0); grid.fibers() * width];
    par::for_each_row(&mut values, width, |i, row| {
        let fiber = f.fiber(i);
        let beta: Vec<Complex64> = generators
            .iter()
            .map(|phi| {
                fiber
                    .iter()
                    .zip(phi.fiber(i))
                    .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b.conj())
            })
            .collect();
        let coeffs = eigs[i].pinv_apply(&beta, cutoff);
        for (c, phi) in coeffs.iter().zip(generators) {
            for (o, p) in row.iter_mut().zip(phi.fiber(i)) {
                *o += c * p;
            }
        }
    });
    FiberedFunction::from_values(grid, values)
}

/// Coefficient functions `m_j` of `f̂ = Σ_j m_j φ̂_j`, each with its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSet {
    /// `m_j = [f̂, ĥ_j] / [ĥ_j, ĥ_j]`, zero where the weight vanishes.
    pub coefficients: Vec<PeriodicFunction>,
    /// `W_{h_j} = [ĥ_j, ĥ_j]`.
    pub weights: Vec<PeriodicFunction>,
    /// `‖m_j‖_{L²(𝕋, W_{h_j})}`.
    pub norms: Vec<f64>,
    pub masks: Vec<FiberMask>,
    pub minimality: Vec<MinimalityVerdict>,
}

impl CoeffSet {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn masked_union(&self) -> FiberMask {
        match self.masks.split_first() {
            Some((first, rest)) => rest.iter().fold(first.clone(), |acc, m| acc.union(m)),
            None => FiberMask::default(),
        }
    }

    pub fn is_g_minimal(&self) -> bool {
        self.minimality.iter().all(|v| v.minimal)
    }
}

/// Dual coefficients with respect to the residual generators `ĥ_j`.
///
/// Requires `N ≥ 2`; see [`principal_coefficient`] for one generator. A set
/// that fails the g-minimality test only produces a warning.
pub fn dual_coefficients(f: &FiberedFunction, generators: &[FiberedFunction], zero_tol: f64) -> Result<CoeffSet> {
    check_member_grid(f, generators)?;
    let n = generators.len();
    if n < 2 {
        return Err(Error::TooFewGenerators { required: 2, got: n });
    }
    let mut set = CoeffSet {
        coefficients: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
        norms: Vec::with_capacity(n),
        masks: Vec::with_capacity(n),
        minimality: Vec::with_capacity(n),
    };
    for (j, phi) in generators.iter().enumerate() {
        let r = residual(generators, j, zero_tol)?;
        let q = periodic_quotient_with_floor(&bracket(f, &r.h)?, &r.weight, r.floor)?;
        let v = verdict(&r.weight, &bracket(phi, phi)?, DEFAULT_REL_TOL);
        if !v.minimal {
            log::warn!("generator {j} is (numerically) in the span of the others: ratio {:e}", v.ratio);
        }
        set.norms.push(weighted_norm(&q.value, &r.weight)?);
        set.coefficients.push(q.value);
        set.weights.push(r.weight);
        set.masks.push(r.mask);
        set.minimality.push(v);
    }
    Ok(set)
}

/// One-generator case: `F = [f̂, φ̂] / W_φ`, so that `f̂ = F φ̂` for
/// `f ∈ S(φ)`.
pub fn principal_coefficient(f: &FiberedFunction, generator: &FiberedFunction, zero_tol: f64) -> Result<CoeffSet> {
    check_member_grid(f, core::slice::from_ref(generator))?;
    let w = bracket(generator, generator)?;
    let q = periodic_quotient(&bracket(f, generator)?, &w, zero_tol)?;
    let norm = weighted_norm(&q.value, &w)?;
    Ok(CoeffSet {
        coefficients: alloc::vec![q.value],
        weights: alloc::vec![w],
        norms: alloc::vec![norm],
        masks: alloc::vec![q.zeroed],
        minimality: Vec::new(),
    })
}

/// `Σ_j m_j φ̂_j`.
pub fn reconstruct(coeffs: &CoeffSet, generators: &[FiberedFunction]) -> Result<FiberedFunction> {
    if coeffs.len() != generators.len() {
        return Err(Error::Shape(alloc::format!(
            "{} coefficient functions for {} generators",
            coeffs.len(),
            generators.len()
        )));
    }
    let grid = common_grid(generators)?;
    let mut out = FiberedFunction::zeros(grid);
    for (m, phi) in coeffs.coefficients.iter().zip(generators) {
        out = out.try_add(&pointwise_multiply(m, phi)?)?;
    }
    Ok(out)
}

/// `‖f‖² − Σ_j ‖m_j‖²_{L²(𝕋, W_{h_j})}`.
pub fn bessel_gap(f: &FiberedFunction, coeffs: &CoeffSet) -> f64 {
    let norm = l2_norm(f);
    coeffs.norms.iter().fold(norm * norm, |acc, n| acc - n * n)
}

/// `ψ̂ = −m · P̂_{G^(j)}(φ_j)`, so that `m φ̂_j + ψ̂ = m ĥ_j ∈ Ŝ(G)` and
/// `ψ ∈ S(G^(j))`. `j` is zero-based.
pub fn lift(m: &PeriodicFunction, j: usize, generators: &[FiberedFunction], zero_tol: f64) -> Result<FiberedFunction> {
    let r = residual(generators, j, zero_tol)?;
    let projected = generators[j].try_sub(&r.h)?;
    Ok(pointwise_multiply(m, &projected)?.scaled(Complex64::new(-1.0, 0.0)))
}

/// Diagnostics of a coefficient computation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    /// `‖f − Σ m_j φ̂_j‖ / ‖f‖`.
    pub reconstruction_residual: f64,
    pub bessel_gap: f64,
    /// Named maximal violations of per-fiber invariants.
    pub violations: Vec<(String, f64)>,
    /// Fraction of fibers masked for at least one generator.
    pub masked_fraction: f64,
    pub timings: Vec<(String, Duration)>,
}

impl Report {
    pub fn for_coefficients(f: &FiberedFunction, coeffs: &CoeffSet, generators: &[FiberedFunction]) -> Result<Self> {
        let rebuilt = reconstruct(coeffs, generators)?;
        let mut weight_excess = f64::NEG_INFINITY;
        for (w_h, phi) in coeffs.weights.iter().zip(generators) {
            let w_phi = bracket(phi, phi)?;
            for (a, b) in w_h.values().iter().zip(w_phi.values()) {
                weight_excess = weight_excess.max(a.re - b.re);
            }
        }
        Ok(Self {
            reconstruction_residual: relative_distance(&rebuilt, f)?,
            bessel_gap: bessel_gap(f, coeffs),
            violations: alloc::vec![(String::from("residual_weight_excess"), weight_excess.max(0.0))],
            masked_fraction: coeffs.masked_union().fraction(),
            timings: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibercore::{inner, make_grid, GridSpec, DEFAULT_ZERO_TOL};
    use crate::generators::{build_generator, synthesize, GeneratorKind, GeneratorSpec, TrigPoly};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random(seed: u64, radius: f64, grid: &GridSpec) -> FiberedFunction {
        build_generator(&GeneratorSpec::new("r", GeneratorKind::BandlimitedRandom { seed, radius }), grid).unwrap()
    }

    fn disjoint_pair(grid: GridSpec) -> [FiberedFunction; 2] {
        let a = FiberedFunction::from_fn(grid, |i, k| if k < 0 { c(1.0, i as f64 * 0.1 + k as f64) } else { c(0.0, 0.0) }).unwrap();
        let b = FiberedFunction::from_fn(grid, |i, k| if k > 0 { c(0.5 + k as f64, -(i as f64) * 0.05) } else { c(0.0, 0.0) }).unwrap();
        [a, b]
    }

    fn poly(pairs: &[(i64, f64, f64)]) -> TrigPoly {
        TrigPoly::from_coeffs(pairs.iter().map(|&(k, re, im)| (k, c(re, im)))).unwrap()
    }

    #[test]
    fn members_are_fixed_points() {
        let grid = make_grid(64, 4).unwrap();
        let gens = [random(1, 4.0, &grid), random(2, 3.0, &grid)];
        let f = synthesize(&[poly(&[(0, 1.0, 0.5), (2, -0.3, 0.0)]), poly(&[(-1, 0.2, 0.7)])], &gens).unwrap();
        let p = project(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
        assert!(relative_distance(&p, &f).unwrap() <= 1e-9);
        let o = project_oracle(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
        assert!(relative_distance(&o, &f).unwrap() <= 1e-9);
    }

    #[test]
    fn orthogonal_complement_projects_to_zero() {
        let grid = make_grid(16, 3).unwrap();
        let gens = [FiberedFunction::from_fn(grid, |i, k| if k.abs() <= 1 { c(1.0 + i as f64, k as f64) } else { c(0.0, 0.0) }).unwrap()];
        let f = FiberedFunction::from_fn(grid, |i, k| if k.abs() >= 2 { c(i as f64, 1.0) } else { c(0.0, 0.0) }).unwrap();
        assert!(project(&f, &gens, DEFAULT_ZERO_TOL).unwrap().values().iter().all(|v| *v == c(0.0, 0.0)));
        assert_eq!(l2_norm(&project_oracle(&f, &gens, DEFAULT_ZERO_TOL).unwrap()), 0.0);
    }

    #[test]
    fn oracle_reduces_to_scalar_quotient_for_one_generator() {
        let grid = make_grid(32, 3).unwrap();
        let phi = random(3, 3.0, &grid);
        let f = random(4, 3.5, &grid);
        let w = bracket(&phi, &phi).unwrap();
        let q = periodic_quotient(&bracket(&f, &phi).unwrap(), &w, DEFAULT_ZERO_TOL).unwrap();
        let expected = pointwise_multiply(&q.value, &phi).unwrap();
        let got = project_oracle(&f, core::slice::from_ref(&phi), DEFAULT_ZERO_TOL).unwrap();
        assert!(relative_distance(&got, &expected).unwrap() <= 1e-13);
    }

    #[test]
    fn projection_is_self_adjoint_and_contracting() {
        let grid = make_grid(64, 4).unwrap();
        let gens = [random(5, 4.0, &grid), random(6, 2.5, &grid), random(7, 3.5, &grid)];
        let f = random(8, 4.5, &grid);
        let g = random(9, 4.5, &grid);
        let pf = project(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
        let pg = project(&g, &gens, DEFAULT_ZERO_TOL).unwrap();
        let lhs = inner(&pf, &g).unwrap();
        let rhs = inner(&f, &pg).unwrap();
        assert!((lhs - rhs).norm() <= 1e-10 * l2_norm(&f) * l2_norm(&g));
        assert!(l2_norm(&pf) <= l2_norm(&f) + 1e-12);
    }

    #[test]
    fn dual_coefficients_of_orthogonal_generator() {
        let grid = make_grid(16, 2).unwrap();
        let gens = disjoint_pair(grid);
        let set = dual_coefficients(&gens[0], &gens, DEFAULT_ZERO_TOL).unwrap();
        let w0 = bracket(&gens[0], &gens[0]).unwrap();
        for i in 0..16 {
            let expected = if w0.get(i).re > 0.0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
            assert!((set.coefficients[0].get(i) - expected).norm() < 1e-15);
            assert_eq!(set.coefficients[1].get(i), c(0.0, 0.0));
        }
        assert!(bessel_gap(&gens[0], &set).abs() <= 1e-10 * l2_norm(&gens[0]).powi(2));
    }

    #[test]
    fn zero_signal() {
        let grid = make_grid(16, 2).unwrap();
        let gens = [random(10, 2.5, &grid), random(11, 2.0, &grid)];
        let zero = FiberedFunction::zeros(grid);
        let set = dual_coefficients(&zero, &gens, DEFAULT_ZERO_TOL).unwrap();
        assert!(set.coefficients.iter().all(|m| m.values().iter().all(|v| *v == c(0.0, 0.0))));
        assert_eq!(bessel_gap(&zero, &set), 0.0);
        let rebuilt = reconstruct(&set, &gens).unwrap();
        assert_eq!(rebuilt, zero);
        let report = Report::for_coefficients(&zero, &set, &gens).unwrap();
        assert_eq!(report.reconstruction_residual, 0.0);
    }

    #[test]
    fn coefficient_errors() {
        let grid = make_grid(16, 2).unwrap();
        let gens = disjoint_pair(grid);
        assert!(matches!(dual_coefficients(&gens[0], &gens[..1], 1e-12), Err(Error::TooFewGenerators { .. })));
        let set = dual_coefficients(&gens[0], &gens, 1e-12).unwrap();
        assert!(matches!(reconstruct(&set, &gens[..1]), Err(Error::Shape(_))));
        assert!(matches!(project(&gens[0], &[], 1e-12), Err(Error::TooFewGenerators { .. })));
        let m = PeriodicFunction::zeros(grid);
        assert!(matches!(lift(&m, 5, &gens, 1e-12), Err(Error::Index { .. })));
        let other = FiberedFunction::zeros(make_grid(8, 2).unwrap());
        assert!(matches!(project(&other, &gens, 1e-12), Err(Error::Shape(_))));
    }

    #[test]
    fn principal_case_reconstructs() {
        let grid = make_grid(32, 3).unwrap();
        let phi = random(12, 3.0, &grid);
        let f = synthesize(&[poly(&[(0, 0.5, 0.0), (3, 0.0, 1.0)])], core::slice::from_ref(&phi)).unwrap();
        let set = principal_coefficient(&f, &phi, DEFAULT_ZERO_TOL).unwrap();
        let rebuilt = reconstruct(&set, core::slice::from_ref(&phi)).unwrap();
        assert!(relative_distance(&rebuilt, &f).unwrap() <= 1e-12);
        assert!(bessel_gap(&f, &set).abs() <= 1e-12 * l2_norm(&f).powi(2));
    }

    #[test]
    fn lift_examples() {
        let grid = make_grid(16, 2).unwrap();
        let gens = disjoint_pair(grid);
        let m = PeriodicFunction::constant(grid, c(2.0, -1.0));
        assert_eq!(l2_norm(&lift(&m, 0, &gens, 1e-12).unwrap()), 0.0);

        let gens = [random(13, 2.0, &grid), random(14, 2.5, &grid)];
        assert_eq!(l2_norm(&lift(&PeriodicFunction::zeros(grid), 1, &gens, 1e-12).unwrap()), 0.0);
    }

    #[test]
    fn bessel_fails_for_correlated_difference() {
        // f = φ₁ − φ₂ with [φ₁, φ₂] = 1/2 and unit weights: Σ‖m_j‖² = 3/2 > ‖f‖² = 1.
        let grid = make_grid(8, 1).unwrap();
        let phi1 = FiberedFunction::from_fn(grid, |_, k| if k == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) }).unwrap();
        let s = 0.75f64.sqrt();
        let phi2 = FiberedFunction::from_fn(grid, move |_, k| match k {
            0 => c(0.5, 0.0),
            1 => c(s, 0.0),
            _ => c(0.0, 0.0),
        })
        .unwrap();
        let gens = [phi1.clone(), phi2.clone()];
        let f = phi1.try_sub(&phi2).unwrap();
        let set = dual_coefficients(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
        for i in 0..8 {
            assert!((set.coefficients[0].get(i) - c(1.0, 0.0)).norm() < 1e-14);
            assert!((set.coefficients[1].get(i) - c(-1.0, 0.0)).norm() < 1e-14);
        }
        let gap = bessel_gap(&f, &set);
        assert!((gap + 0.5).abs() < 1e-13, "gap = {gap}");
        // the same identity with φ₁ + φ₂ gives a positive gap
        let f = phi1.try_add(&phi2).unwrap();
        let set = dual_coefficients(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
        assert!((bessel_gap(&f, &set) - 1.5).abs() < 1e-13);
    }
}
