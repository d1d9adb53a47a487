//! Hurwitz zeta function for real `s > 1`, `a > 0`, via Euler–Maclaurin.

/// B_2, B_4, …, B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const DIRECT_TERMS: usize = 12;

/// `ζ(s, a) = Σ_{n≥0} (n + a)^{-s}`.
pub(crate) fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    let mut sum = 0.0;
    for n in 0..DIRECT_TERMS {
        sum += libm::pow(n as f64 + a, -s);
    }
    let x = DIRECT_TERMS as f64 + a;
    let x_pow = libm::pow(x, -s);
    sum += x * x_pow / (s - 1.0) + 0.5 * x_pow;

    // Σ_j B_2j / (2j)! · s(s+1)…(s+2j-2) · x^{-s-2j+1}
    let mut rising = s; // s(s+1)…(s+2j-2)
    let mut factorial = 2.0; // (2j)!
    let mut power = x_pow / x; // x^{-s-2j+1}
    let inv_x2 = 1.0 / (x * x);
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b / factorial * rising * power;
        sum += term;
        if libm::fabs(term) <= 1e-18 * sum {
            break;
        }
        let m = 2.0 * (j as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m);
        factorial *= (m + 1.0) * (m + 2.0);
        power *= inv_x2;
    }
    sum
}
