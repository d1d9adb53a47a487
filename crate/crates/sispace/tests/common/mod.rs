#![allow(dead_code)]

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sispace::formats::save_spectrum;
use sispace_core::{
    build_generator, Complex64, FiberedFunction, GeneratorKind, GeneratorSpec, GridSpec, TrigPoly,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_fibered(grid: GridSpec, rng: &mut ChaCha8Rng) -> FiberedFunction {
    let values = (0..grid.fibers() * grid.translates()).map(|_| random_complex(rng)).collect();
    FiberedFunction::from_values(grid, values).unwrap()
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

pub fn max_diff(a: &FiberedFunction, b: &FiberedFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Writes each generator as `<stem><j>.csv` and returns the generator
/// entries of a configuration referring to them.
pub fn sampled_entries(dir: &Path, stem: &str, gens: &[FiberedFunction]) -> Vec<serde_json::Value> {
    gens.iter()
        .enumerate()
        .map(|(j, g)| {
            let file = format!("{stem}{}.csv", j + 1);
            save_spectrum(&dir.join(&file), g).unwrap();
            serde_json::json!({ "name": format!("{stem}{}", j + 1), "kind": "sampled", "path": file })
        })
        .collect()
}
