//! Concrete generators with closed-form spectra, and synthesis of elements
//! of `S(G)` from finitely many integer-shift coefficients.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{config_err, shape_err};
use crate::fibercore::{bracket, pointwise_multiply, FiberedFunction, GridSpec, PeriodicFunction};
use crate::special::hurwitz_zeta;
use crate::{Error, Result};

const MAX_BSPLINE_ORDER: u32 = 64;
const RANDOM_HARMONICS: i32 = 4;

/// Analytic generator families. All are described by their Fourier transform.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorKind {
    /// Causal B-spline of order `m`, `B̂_m(ξ) = (e^{-πiξ} sin(πξ)/(πξ))^{m+1}`.
    BSpline { order: u32 },
    /// `φ̂(ξ) = exp(-π²σ²ξ²)`.
    Gaussian { sigma: f64 },
    /// Seeded random smooth spectrum supported in `[1/2 - r, 1/2 + r]`.
    BandlimitedRandom { seed: u64, radius: f64 },
    /// `φ̂ = χ_{[0,1)}`.
    Indicator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub name: String,
    pub kind: GeneratorKind,
}

impl GeneratorSpec {
    pub fn new(name: impl Into<String>, kind: GeneratorKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        match self.kind {
            GeneratorKind::BSpline { order } if order > MAX_BSPLINE_ORDER => Err(config_err!(
                "generator '{}': B-spline order {order} exceeds {MAX_BSPLINE_ORDER}",
                self.name
            )),
            GeneratorKind::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => Err(
                config_err!("generator '{}': gaussian width must be positive, got {sigma}", self.name),
            ),
            GeneratorKind::BandlimitedRandom { radius, .. } => {
                let max = grid.radius() as f64 + 0.5;
                if !(radius > 0.0 && radius <= max) {
                    Err(config_err!(
                        "generator '{}': support radius {radius} must lie in (0, {max}]",
                        self.name
                    ))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// `e^{-iπ p / M}` with `p` reduced modulo `2M`.
fn half_turn_phase(p: u64, fibers: usize) -> Complex64 {
    let m2 = 2 * fibers as u64;
    let angle = -PI * (p % m2) as f64 / fibers as f64;
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

fn bspline(order: u32, grid: GridSpec) -> Result<FiberedFunction> {
    let m = grid.fibers();
    let power = order as i32 + 1;
    FiberedFunction::from_fn(grid, move |i, k| {
        if i == 0 {
            return if k == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
        // sin(π(t+k)) e^{-πi(t+k)} = sin(πt) e^{-πit}, so only the
        // denominator depends on k.
        let t = grid.fiber_point(i);
        let ratio = libm::sin(PI * t) / (PI * (t + k as f64));
        half_turn_phase(i as u64 * power as u64, m) * libm::pow(ratio, power as f64)
    })
}

fn gaussian(sigma: f64, grid: GridSpec) -> Result<FiberedFunction> {
    let a = PI * PI * sigma * sigma;
    FiberedFunction::from_fn(grid, move |i, k| {
        let xi = grid.fiber_point(i) + k as f64;
        Complex64::new(libm::exp(-a * xi * xi), 0.0)
    })
}

/// `C^∞` bump on `(-1, 1)` with peak value 1.
fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        libm::exp(1.0 - 1.0 / (1.0 - u * u))
    }
}

fn bandlimited_random(seed: u64, radius: f64, grid: GridSpec) -> Result<FiberedFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let harmonics: Vec<(f64, Complex64)> = (-RANDOM_HARMONICS..=RANDOM_HARMONICS)
        .map(|q| {
            let re = rng.random_range(-1.0..1.0);
            let im = rng.random_range(-1.0..1.0);
            (q as f64, Complex64::new(re, im))
        })
        .collect();
    FiberedFunction::from_fn(grid, move |i, k| {
        let u = (grid.fiber_point(i) + k as f64 - 0.5) / radius;
        let w = bump(u);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let poly = harmonics.iter().fold(Complex64::new(0.0, 0.0), |acc, (q, c)| {
            let angle = PI * q * u;
            acc + c * Complex64::new(libm::cos(angle), libm::sin(angle))
        });
        poly * w
    })
}

fn indicator(grid: GridSpec) -> Result<FiberedFunction> {
    FiberedFunction::from_fn(grid, |_, k| Complex64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0))
}

/// Samples `φ̂(t_i + k)` for the generator described by `spec`.
pub fn build_generator(spec: &GeneratorSpec, grid: &GridSpec) -> Result<FiberedFunction> {
    spec.validate(grid)?;
    let grid = *grid;
    match spec.kind {
        GeneratorKind::BSpline { order } => bspline(order, grid),
        GeneratorKind::Gaussian { sigma } => gaussian(sigma, grid),
        GeneratorKind::BandlimitedRandom { seed, radius } => bandlimited_random(seed, radius, grid),
        GeneratorKind::Indicator => indicator(grid),
    }
}

/// Builds a generator set, rejecting duplicate names.
pub fn build_generators(specs: &[GeneratorSpec], grid: &GridSpec) -> Result<Vec<FiberedFunction>> {
    let mut seen = BTreeSet::new();
    for spec in specs {
        if !seen.insert(spec.name.as_str()) {
            return Err(config_err!("duplicate generator name '{}'", spec.name));
        }
    }
    specs.iter().map(|s| build_generator(s, grid)).collect()
}

/// Spectral energy lost to the translate truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodizationTail {
    /// `Σ_{|k|>K} |φ̂(t_i + k)|²` per fiber.
    pub energy: PeriodicFunction,
    /// Analytic upper bound on `energy` over all of `[0, 1)`.
    pub bound: f64,
}

impl PeriodizationTail {
    pub fn max_energy(&self) -> f64 {
        self.energy.max_real()
    }
}

fn gaussian_tail(sigma: f64, grid: GridSpec) -> Result<PeriodizationTail> {
    let a = 2.0 * PI * PI * sigma * sigma;
    let kk = grid.radius() as f64;
    let energy = PeriodicFunction::from_fn(grid, move |i| {
        let t = grid.fiber_point(i);
        let mut sum = 0.0;
        let mut n = 1.0;
        loop {
            let hi = t + kk + n;
            let lo = kk + n - t;
            let term = libm::exp(-a * hi * hi) + libm::exp(-a * lo * lo);
            sum += term;
            if term <= 1e-18 * sum || term == 0.0 || n > 1e7 {
                break;
            }
            n += 1.0;
        }
        Complex64::new(sum, 0.0)
    })?;
    let bound = 2.0 * libm::exp(-a * kk * kk) / (1.0 - libm::exp(-a * (2.0 * kk + 1.0)));
    Ok(PeriodizationTail { energy, bound })
}

fn bspline_tail(order: u32, grid: GridSpec) -> Result<PeriodizationTail> {
    let s = 2.0 * (order as f64 + 1.0);
    let kk = grid.radius() as f64;
    let pi_s = libm::pow(PI, s);
    let energy = PeriodicFunction::from_fn(grid, move |i| {
        let t = grid.fiber_point(i);
        let sin_s = libm::pow(libm::sin(PI * t), s);
        let zeta = hurwitz_zeta(s, kk + 1.0 + t) + hurwitz_zeta(s, kk + 1.0 - t);
        Complex64::new(sin_s * zeta / pi_s, 0.0)
    })?;
    let bound = (hurwitz_zeta(s, kk + 1.0) + hurwitz_zeta(s, kk)) / pi_s;
    Ok(PeriodizationTail { energy, bound })
}

/// Energy of the translates beyond `|k| ≤ K`, zero for band-limited kinds.
pub fn periodization_tail(spec: &GeneratorSpec, grid: &GridSpec) -> Result<PeriodizationTail> {
    spec.validate(grid)?;
    let grid = *grid;
    match spec.kind {
        GeneratorKind::BSpline { order } => bspline_tail(order, grid),
        GeneratorKind::Gaussian { sigma } => gaussian_tail(sigma, grid),
        GeneratorKind::BandlimitedRandom { .. } | GeneratorKind::Indicator => Ok(PeriodizationTail {
            energy: PeriodicFunction::zeros(grid),
            bound: 0.0,
        }),
    }
}

/// The untruncated weight `W_φ(t_i) = Σ_{k∈ℤ} |φ̂(t_i + k)|²`: the stored
/// bracket plus the periodization tail.
pub fn generator_weight(spec: &GeneratorSpec, grid: &GridSpec) -> Result<PeriodicFunction> {
    let phi = build_generator(spec, grid)?;
    let tail = periodization_tail(spec, grid)?;
    bracket(&phi, &phi)?.try_add(&tail.energy)
}

/// Trigonometric polynomial `T(t) = Σ_k γ_k e^{2πikt}`.
///
/// `T(t) φ̂(t)` is the transform of `Σ_k γ_k φ(· + k)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, Complex64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Self::zero();
        p.coeffs.insert(0, c);
        p
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut p = Self::zero();
        for (k, c) in coeffs {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(config_err!("non-finite coefficient at shift {k}"));
            }
            *p.coeffs.entry(k).or_default() += c;
        }
        Ok(p)
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    /// Largest `|k|` with a stored coefficient.
    pub fn degree(&self) -> u64 {
        self.coeffs.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    /// Samples `T(t_i)`; requires `degree < M/2` so the rectangle rule stays
    /// exact on products of such polynomials.
    pub fn eval(&self, grid: &GridSpec) -> Result<PeriodicFunction> {
        let m = grid.fibers() as u64;
        if 2 * self.degree() >= m {
            return Err(config_err!(
                "trigonometric degree {} must be below M/2 = {}",
                self.degree(),
                m as f64 / 2.0
            ));
        }
        let grid = *grid;
        PeriodicFunction::from_fn(grid, |i| {
            self.coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, (&k, c)| {
                let p = (k.rem_euclid(m as i64) as u64 * i as u64) % m;
                let angle = 2.0 * PI * p as f64 / m as f64;
                acc + c * Complex64::new(libm::cos(angle), libm::sin(angle))
            })
        })
    }
}

/// `Σ_j T_j φ̂_j` for one shift-coefficient polynomial per generator.
pub fn synthesize(coeffs: &[TrigPoly], generators: &[FiberedFunction]) -> Result<FiberedFunction> {
    if coeffs.len() != generators.len() {
        return Err(shape_err!(
            "{} coefficient sets for {} generators",
            coeffs.len(),
            generators.len()
        ));
    }
    let first = generators.first().ok_or(Error::TooFewGenerators { required: 1, got: 0 })?;
    let grid = *first.grid();
    let mut out = FiberedFunction::zeros(grid);
    for (t, phi) in coeffs.iter().zip(generators) {
        out = out.try_add(&pointwise_multiply(&t.eval(&grid)?, phi)?)?;
    }
    Ok(out)
}
