mod common;

use proptest::prelude::*;
use sispace::formats::{parse_spectrum, save_spectrum, spectrum_to_string};
use sispace::formats::load_spectrum;
use sispace_core::{make_grid, Complex64, FiberedFunction};

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        -1e3..1e3f64,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(5e-324),
        Just(f64::MAX),
    ]
}

proptest! {
    #[test]
    fn spectrum_round_trip_is_exact(
        fibers in 2usize..9,
        radius in 1usize..4,
        raw in prop::collection::vec((finite(), finite()), 8 * 7),
    ) {
        let grid = make_grid(fibers, radius).unwrap();
        let values: Vec<Complex64> = raw.iter().take(fibers * grid.translates()).map(|&(a, b)| Complex64::new(a, b)).collect();
        let f = FiberedFunction::from_values(grid, values).unwrap();
        let back = parse_spectrum(&spectrum_to_string(&f), &grid, "mem").unwrap();
        for (x, y) in f.values().iter().zip(back.values()) {
            prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
            prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}

#[test]
fn file_round_trip_with_random_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let grid = make_grid(128, 8).unwrap();
    let f = common::random_fibered(grid, &mut common::rng(4));
    let path = dir.path().join("f.csv");
    save_spectrum(&path, &f).unwrap();
    assert_eq!(load_spectrum(&path, &grid).unwrap(), f);
}
