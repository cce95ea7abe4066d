//! Legendre polynomials by the Bonnet upward recurrence
//! (ℓ+1)P_{ℓ+1} = (2ℓ+1)xP_ℓ − ℓP_{ℓ−1}, stable on [-1, 1].

/// Fill `out` with P_0(x) ..= P_{out.len()-1}(x).
pub fn legendre_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = x;
    for l in 1..out.len() - 1 {
        let lf = l as f64;
        out[l + 1] = ((2.0 * lf + 1.0) * x * out[l] - lf * out[l - 1]) / (lf + 1.0);
    }
}

/// P_0(x) ..= P_{l_max}(x).
pub fn legendre_table(x: f64, l_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; l_max + 1];
    legendre_into(x, &mut out);
    out
}

/// P_n(x) and P_n'(x). The derivative uses (x²−1)P_n' = n(xP_n − P_{n−1})
/// and is only valid for |x| < 1.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * p - lf * p_prev) / (lf + 1.0);
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    (p, nf * (x * p - p_prev) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn explicit(l: usize, x: f64) -> f64 {
        match l {
            0 => 1.0,
            1 => x,
            2 => 0.5 * (3.0 * x * x - 1.0),
            3 => 0.5 * (5.0 * x * x * x - 3.0 * x),
            _ => unreachable!(),
        }
    }

    #[test]
    fn matches_explicit_low_orders_at_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x: f64 = rng.random_range(-1.0..=1.0);
            let table = legendre_table(x, 3);
            for (l, &p) in table.iter().enumerate() {
                assert!((p - explicit(l, x)).abs() < 1e-13, "P_{l}({x})");
            }
        }
    }

    #[test]
    fn endpoint_values() {
        let plus = legendre_table(1.0, 64);
        let minus = legendre_table(-1.0, 64);
        for l in 0..=64 {
            assert!((plus[l] - 1.0).abs() < 1e-12);
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            assert!((minus[l] - sign).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn bounded_by_one(x in -1.0f64..=1.0, l_max in 0usize..64) {
            for p in legendre_table(x, l_max) {
                prop_assert!(p.abs() <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn derivative_matches_finite_difference(x in -0.9f64..0.9, n in 1usize..12) {
            let h = 1e-6;
            let (_, dp) = legendre_with_derivative(n, x);
            let fd = (legendre_with_derivative(n, x + h).0 - legendre_with_derivative(n, x - h).0) / (2.0 * h);
            prop_assert!((dp - fd).abs() < 1e-6 * (1.0 + dp.abs()));
        }
    }
}
