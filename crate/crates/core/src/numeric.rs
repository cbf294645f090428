//! Small numerical helpers shared by the transforms and generators.

use statrs::function::factorial::ln_factorial as statrs_ln_factorial;

/// `ln(n!)`, exact table lookup below 171 and log-gamma above.
#[inline]
pub fn ln_factorial(n: usize) -> f64 {
    statrs_ln_factorial(n as u64)
}

/// Neumaier-compensated sum of `values`, accumulated in descending order of
/// magnitude. Reorders the slice in place.
pub fn compensated_sum(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for &v in values.iter() {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// `ln(Σ exp(x_i))` with the maximum factored out and the remaining terms
/// summed with [`compensated_sum`]. Entries equal to `-inf` are ignored; an
/// empty or all `-inf` input yields `-inf`.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut scaled: Vec<f64> = logs
        .iter()
        .filter(|l| l.is_finite())
        .map(|l| (l - max).exp())
        .collect();
    max + compensated_sum(&mut scaled).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_product() {
        let mut acc = 0.0_f64;
        for n in 1..=30usize {
            acc += (n as f64).ln();
            assert!((ln_factorial(n) - acc).abs() < 1e-12 * acc.max(1.0));
        }
        assert_eq!(ln_factorial(0), 0.0);
        // past the f64 factorial overflow point
        let direct: f64 = (1..=200).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(200) - direct).abs() < 1e-10 * direct);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut v = vec![1.0, 1e-16, 1e-16, 1e-16, 1e-16, -1.0];
        let s = compensated_sum(&mut v);
        assert!((s - 4e-16).abs() < 1e-30);
    }

    #[test]
    fn log_sum_exp_handles_zeros_and_large_values() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
        let l = log_sum_exp(&[1000.0, 1000.0, f64::NEG_INFINITY]);
        assert!((l - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
