#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sispace_core::{
    build_generator, Complex64, FiberedFunction, GeneratorKind, GeneratorSpec, GridSpec, PeriodicFunction, TrigPoly,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Independent uniform entries on every (fiber, translate).
pub fn random_fibered(grid: GridSpec, rng: &mut ChaCha8Rng) -> FiberedFunction {
    let values = (0..grid.fibers() * grid.translates()).map(|_| random_complex(rng)).collect();
    FiberedFunction::from_values(grid, values).unwrap()
}

pub fn random_periodic(grid: GridSpec, rng: &mut ChaCha8Rng) -> PeriodicFunction {
    let values = (0..grid.fibers()).map(|_| random_complex(rng)).collect();
    PeriodicFunction::from_values(grid, values).unwrap()
}

pub fn random_poly(degree: i64, rng: &mut ChaCha8Rng) -> TrigPoly {
    TrigPoly::from_coeffs((-degree..=degree).map(|k| (k, random_complex(rng)))).unwrap()
}

/// `n` seeded band-limited generators with radii in `[K/2, K + 1/2]`.
pub fn random_generators(n: usize, grid: GridSpec, seed: u64) -> Vec<FiberedFunction> {
    let mut r = rng(seed);
    let max = grid.radius() as f64 + 0.5;
    (0..n)
        .map(|j| {
            let radius = r.random_range(0.5 * grid.radius() as f64..=max);
            let spec = GeneratorSpec::new(
                format!("g{j}"),
                GeneratorKind::BandlimitedRandom { seed: seed * 1000 + j as u64, radius },
            );
            build_generator(&spec, &grid).unwrap()
        })
        .collect()
}

pub fn random_generator(seed: u64, radius: f64, grid: GridSpec) -> FiberedFunction {
    let spec = GeneratorSpec::new("g", GeneratorKind::BandlimitedRandom { seed, radius });
    build_generator(&spec, &grid).unwrap()
}

pub fn max_diff(a: &FiberedFunction, b: &FiberedFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn periodic_max_diff(a: &PeriodicFunction, b: &PeriodicFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
