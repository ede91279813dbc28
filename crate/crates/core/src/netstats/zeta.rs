//! Hurwitz zeta function ζ(s, q) = Σ_{k≥0} (q + k)^(-s) for s > 1, q > 0.

/// Bernoulli numbers B_2 .. B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Euler–Maclaurin summation; relative error near machine precision for s in (1, 50].
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(s > 1.0 && q > 0.0);
    let shift = (12.0 + s - q).ceil().max(0.0) as usize;
    let mut sum = 0.0;
    for k in 0..shift {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + shift as f64;
    let a_pow = a.powf(-s);
    sum += a * a_pow / (s - 1.0) + 0.5 * a_pow;

    // term_j = B_2j / (2j)! * s(s+1)...(s+2j-2) * a^(-s-2j+1)
    let mut rising = s; // s (s+1) ... (s+2j-2)
    let mut factorial = 2.0; // (2j)!
    let mut a_term = a_pow / a; // a^(-s-2j+1)
    let a2 = a * a;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b / factorial * rising * a_term;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let k = (2 * j + 2) as f64;
        rising *= (s + k - 1.0) * (s + k);
        factorial *= (k + 1.0) * (k + 2.0);
        a_term /= a2;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs()
    }

    #[test]
    fn riemann_values() {
        assert!(close(hurwitz_zeta(2.0, 1.0), PI * PI / 6.0, 1e-14));
        assert!(close(hurwitz_zeta(3.0, 1.0), 1.202_056_903_159_594_3, 1e-14));
        assert!(close(hurwitz_zeta(4.0, 1.0), PI.powi(4) / 90.0, 1e-14));
        assert!(close(hurwitz_zeta(2.0, 2.0), PI * PI / 6.0 - 1.0, 1e-14));
    }

    #[test]
    fn matches_direct_summation_with_tail_integral() {
        // brute force: sum to K, then integral tail bound; tolerance loose accordingly
        for &(s, q) in &[(2.44, 1.0), (3.0, 5.0), (1.5, 1.0), (2.6, 37.0)] {
            let k_max = 2_000_000u64;
            let mut direct: f64 = (0..k_max).map(|k| (q + k as f64).powf(-s)).sum();
            let a = q + k_max as f64;
            direct += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
            assert!(close(hurwitz_zeta(s, q), direct, 1e-9), "s={s} q={q}");
        }
    }

    #[test]
    fn recurrence_in_q() {
        for &s in &[1.2, 2.0, 2.44, 3.16, 7.5] {
            for q in [1.0, 2.0, 7.0, 120.0] {
                let lhs = hurwitz_zeta(s, q) - hurwitz_zeta(s, q + 1.0);
                assert!(close(lhs, q.powf(-s), 1e-10), "s={s} q={q}");
            }
        }
    }
}
