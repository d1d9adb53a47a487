mod common;

use common::*;
use proptest::prelude::*;
use sispace_core::{
    bessel_gap, bracket, dual_coefficients, gram_field, inner, l2_norm, lift, make_grid, pointwise_multiply,
    project, project_oracle, reconstruct, relative_distance, synthesize, Complex64, FiberedFunction,
    PeriodicFunction, TrigPoly, DEFAULT_ZERO_TOL,
};

#[test]
fn projection_agrees_with_least_squares_oracle() {
    let mut worst = 0.0f64;
    for case in 0..100u64 {
        let m = if case % 2 == 0 { 64 } else { 256 };
        let n = 2 + (case % 3) as usize;
        let grid = make_grid(m, 4).unwrap();
        let gens = random_generators(n, grid, 5000 + case);
        let f = random_fibered(grid, &mut rng(case));
        let p = project(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
        let o = project_oracle(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
        worst = worst.max(relative_distance(&p, &o).unwrap());
    }
    assert!(worst <= 1e-8, "worst relative deviation {worst}");
}

#[test]
fn seed_five_projection_matches_oracle() {
    let grid = make_grid(256, 8).unwrap();
    let gens = random_generators(3, grid, 5);
    let f = random_fibered(grid, &mut rng(5));
    let p = project(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
    let o = project_oracle(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
    assert!(relative_distance(&p, &o).unwrap() <= 1e-8);
}

#[test]
fn theorem_round_trip_seed_thirteen() {
    let grid = make_grid(256, 8).unwrap();
    let gens = random_generators(3, grid, 13);
    let mut r = rng(13);
    let polys: Vec<TrigPoly> = (0..3).map(|_| random_poly(4, &mut r)).collect();
    let f = synthesize(&polys, &gens).unwrap();
    let set = dual_coefficients(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
    assert!(set.is_g_minimal());
    assert_eq!(set.masked_union().count(), 0);

    let rebuilt = reconstruct(&set, &gens).unwrap();
    assert!(relative_distance(&rebuilt, &f).unwrap() <= 1e-8);
    for (m, t) in set.coefficients.iter().zip(&polys) {
        let t = t.eval(&grid).unwrap();
        let scale = t.max_abs();
        assert!(periodic_max_diff(m, &t) <= 1e-8 * scale);
    }
    // the oracle sees the same element
    let o = project_oracle(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
    assert!(relative_distance(&o, &f).unwrap() <= 1e-9);
}

#[test]
fn bessel_gap_for_overlapping_pair_seed_seventeen() {
    let grid = make_grid(256, 8).unwrap();
    let gens = random_generators(2, grid, 17);
    let mut r = rng(17);
    let polys = [random_poly(4, &mut r), random_poly(4, &mut r)];
    let f = synthesize(&polys, &gens).unwrap();
    let set = dual_coefficients(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
    let gap = bessel_gap(&f, &set);

    // independent route: m_j = T_j and the two-generator residual weights
    let w1 = bracket(&gens[0], &gens[0]).unwrap();
    let w2 = bracket(&gens[1], &gens[1]).unwrap();
    let x = bracket(&gens[0], &gens[1]).unwrap();
    let t1 = polys[0].eval(&grid).unwrap();
    let t2 = polys[1].eval(&grid).unwrap();
    let mut coeff_energy = 0.0;
    for i in 0..256 {
        let wh1 = w1.get(i).re - x.get(i).norm_sqr() / w2.get(i).re;
        let wh2 = w2.get(i).re - x.get(i).norm_sqr() / w1.get(i).re;
        coeff_energy += t1.get(i).norm_sqr() * wh1 + t2.get(i).norm_sqr() * wh2;
    }
    coeff_energy /= 256.0;
    let independent = l2_norm(&f).powi(2) - coeff_energy;
    let scale = l2_norm(&f).powi(2);
    assert!((gap - independent).abs() <= 1e-10 * scale, "{gap} vs {independent}");
    assert!(gram_field(&gens).unwrap().max_offdiagonal() > 0.1 * gram_field(&gens).unwrap().scale());
    // regression value from the first run
    assert!(gap > 0.0);
    assert!((gap / scale - 0.094_830_837_707_468_3).abs() < 1e-12, "relative gap {}", gap / scale);
}

#[test]
fn lift_lands_in_both_spaces() {
    let grid = make_grid(128, 6).unwrap();
    let gens = random_generators(2, grid, 31);
    let m = TrigPoly::from_coeffs([(1, Complex64::new(1.0, 0.0))]).unwrap().eval(&grid).unwrap();
    let psi = lift(&m, 0, &gens, DEFAULT_ZERO_TOL).unwrap();
    let h = sispace_core::residual_generator(&gens, 0, DEFAULT_ZERO_TOL).unwrap();
    let combined = pointwise_multiply(&m, &gens[0]).unwrap().try_add(&psi).unwrap();
    let target = pointwise_multiply(&m, &h).unwrap();
    assert!(relative_distance(&combined, &target).unwrap() <= 1e-13);

    let in_g = project(&combined, &gens, DEFAULT_ZERO_TOL).unwrap();
    assert!(relative_distance(&in_g, &combined).unwrap() <= 1e-9);
    let others = &gens[1..];
    let in_others = project_oracle(&psi, others, DEFAULT_ZERO_TOL).unwrap();
    assert!(relative_distance(&in_others, &psi).unwrap() <= 1e-9);
}

fn periodic_zero(grid: sispace_core::GridSpec) -> PeriodicFunction {
    PeriodicFunction::zeros(grid)
}

#[test]
fn lift_of_zero_is_zero() {
    let grid = make_grid(32, 3).unwrap();
    let gens = random_generators(3, grid, 3);
    assert_eq!(l2_norm(&lift(&periodic_zero(grid), 2, &gens, DEFAULT_ZERO_TOL).unwrap()), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn projection_is_idempotent(seed in 0u64..1_000_000, n in 1usize..5) {
        let grid = make_grid(64, 4).unwrap();
        let gens = random_generators(n, grid, seed);
        let f = random_fibered(grid, &mut rng(seed));
        let p = project(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
        let pp = project(&p, &gens, DEFAULT_ZERO_TOL).unwrap();
        prop_assert!(relative_distance(&pp, &p).unwrap() <= 1e-9);
        prop_assert!(l2_norm(&p) <= l2_norm(&f) + 1e-12);
    }

    #[test]
    fn projection_is_self_adjoint(seed in 0u64..1_000_000, n in 1usize..5) {
        let grid = make_grid(64, 4).unwrap();
        let gens = random_generators(n, grid, seed);
        let mut r = rng(seed);
        let f = random_fibered(grid, &mut r);
        let g = random_fibered(grid, &mut r);
        let lhs = inner(&project(&f, &gens, DEFAULT_ZERO_TOL).unwrap(), &g).unwrap();
        let rhs = inner(&f, &project(&g, &gens, DEFAULT_ZERO_TOL).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * l2_norm(&f) * l2_norm(&g));
    }

    #[test]
    fn dual_coefficients_recover_synthesis_polynomials(seed in 0u64..1_000_000, n in 2usize..5) {
        let grid = make_grid(64, 4).unwrap();
        let gens = random_generators(n, grid, seed);
        let mut r = rng(seed);
        let polys: Vec<TrigPoly> = (0..n).map(|_| random_poly(3, &mut r)).collect();
        let f = synthesize(&polys, &gens).unwrap();
        let set = dual_coefficients(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
        let rebuilt = reconstruct(&set, &gens).unwrap();
        prop_assert!(relative_distance(&rebuilt, &f).unwrap() <= 1e-8);
        for (j, (m, t)) in set.coefficients.iter().zip(&polys).enumerate() {
            let t = t.eval(&grid).unwrap();
            for i in 0..64 {
                if !set.masks[j].contains(i) {
                    prop_assert!((m.get(i) - t.get(i)).norm() <= 1e-8 * t.max_abs());
                }
            }
        }
    }

    #[test]
    fn parseval_for_orthogonalized_generators(seed in 0u64..1_000_000, n in 2usize..5) {
        let grid = make_grid(64, 4).unwrap();
        let raw = random_generators(n, grid, seed);
        let sys = sispace_core::orthogonalize(&raw, DEFAULT_ZERO_TOL).unwrap();
        let gens: Vec<FiberedFunction> = sys.generators().to_vec();
        let mut r = rng(seed);
        let polys: Vec<TrigPoly> = (0..n).map(|_| random_poly(3, &mut r)).collect();
        let f = synthesize(&polys, &gens).unwrap();
        let set = dual_coefficients(&f, &gens, DEFAULT_ZERO_TOL).unwrap();
        let scale = l2_norm(&f).powi(2);
        prop_assert!(bessel_gap(&f, &set).abs() <= 1e-10 * scale.max(1.0));
    }
}
