//! Conversions between `p_n`, `q_n = n!·p_n`, `x_n` and the factorial
//! moments `γ_n`.

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, log_sum_exp};
use crate::types::{FactorialMomentSequence, MomentSequence, NormPolicy, PhotonDistribution, XnSequence};

/// Relative tail tolerance for accepting a factorial moment.
pub const TAIL_TOL: f64 = 1e-10;

/// `q_n = n!·p_n` in log form. Entries at or below the distribution's zero
/// threshold become exact zeros.
pub fn p_to_q(dist: &PhotonDistribution) -> MomentSequence {
    let threshold = dist.zero_threshold();
    let ln_values = dist
        .values()
        .iter()
        .enumerate()
        .map(|(n, &p)| {
            if p <= threshold {
                f64::NEG_INFINITY
            } else {
                p.ln() + ln_factorial(n)
            }
        })
        .collect();
    MomentSequence::from_ln(ln_values).expect("distribution windows are nonempty and finite")
}

/// Inverse of [`p_to_q`]: `p_n = q_n / n!`.
pub fn q_to_p(q: &MomentSequence) -> Vec<f64> {
    q.ln_values()
        .iter()
        .enumerate()
        .map(|(n, &l)| (l - ln_factorial(n)).exp())
        .collect()
}

/// `x_n` for `n <= nmax - 2`, masked where `q_{n+1} = 0`.
pub fn q_to_x(q: &MomentSequence) -> Result<XnSequence> {
    if q.len() < 3 {
        return Err(Error::WindowTooShort {
            needed: 2,
            nmax: q.nmax(),
        });
    }
    let values = (0..=q.nmax() - 2)
        .map(|n| {
            if q.is_zero(n + 1) {
                None
            } else if q.is_zero(n) || q.is_zero(n + 2) {
                Some(0.0)
            } else {
                Some((q.ln(n) + q.ln(n + 2) - 2.0 * q.ln(n + 1)).exp())
            }
        })
        .collect();
    XnSequence::from_values(values)
}

/// Factorial moments `γ_n = Σ_{m>=n} m!/(m-n)!·p_m` for `n <= k`.
///
/// With [`NormPolicy::Exact`] the window is taken to hold the whole
/// distribution and every entry is exact. Otherwise each entry is accepted
/// only when the last term in the window is below `TAIL_TOL` of the partial
/// sum and the terms are shrinking there; the remaining tail is bounded by a
/// geometric series in the last term ratio. Returns
/// [`Error::DivergentTail`] when not even `γ_0` can be trusted.
pub fn p_to_gamma(dist: &PhotonDistribution, k: usize) -> Result<FactorialMomentSequence> {
    let nmax = dist.nmax();
    let complete = dist.norm_policy() == NormPolicy::Exact;
    let threshold = dist.zero_threshold();
    let ln_p: Vec<f64> = dist
        .values()
        .iter()
        .map(|&p| if p <= threshold { f64::NEG_INFINITY } else { p.ln() })
        .collect();

    let mut values = Vec::with_capacity(k + 1);
    let mut tails = Vec::with_capacity(k + 1);
    let mut reliable = Vec::with_capacity(k + 1);

    for n in 0..=k {
        if n > nmax {
            values.push(0.0);
            tails.push(if complete { 0.0 } else { f64::INFINITY });
            reliable.push(complete);
            continue;
        }
        let ln_terms: Vec<f64> = (n..=nmax)
            .map(|m| {
                if ln_p[m] == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    ln_p[m] + ln_factorial(m) - ln_factorial(m - n)
                }
            })
            .collect();
        let ln_sum = log_sum_exp(&ln_terms);
        let value = ln_sum.exp();
        let (tail, ok) = if complete {
            (0.0, value.is_finite())
        } else {
            edge_tail(&ln_terms, ln_sum)
        };
        values.push(if value.is_finite() { value } else { f64::MAX });
        tails.push(tail);
        reliable.push(ok && value.is_finite());
    }

    let finite_through = match reliable.iter().position(|ok| !ok) {
        Some(0) => return Err(Error::DivergentTail(0)),
        Some(first_bad) => first_bad - 1,
        None => k,
    };
    Ok(FactorialMomentSequence::from_parts(values, finite_through, tails))
}

/// Tail estimate beyond the window from the last two terms. Returns the
/// bound and whether the entry passes the acceptance rule.
fn edge_tail(ln_terms: &[f64], ln_sum: f64) -> (f64, bool) {
    let sum = ln_sum.exp();
    let last = *ln_terms.last().expect("nonempty");
    if last == f64::NEG_INFINITY {
        // support ends inside the window
        return (0.0, true);
    }
    if ln_terms.len() < 2 || ln_terms[ln_terms.len() - 2] == f64::NEG_INFINITY {
        return (f64::INFINITY, false);
    }
    let ln_ratio = last - ln_terms[ln_terms.len() - 2];
    if ln_ratio >= 0.0 {
        return (f64::INFINITY, false);
    }
    let ratio = ln_ratio.exp();
    let last_rel = (last - ln_sum).exp();
    let tail_rel = last_rel * ratio / (1.0 - ratio);
    let ok = last_rel < TAIL_TOL && tail_rel < TAIL_TOL;
    (tail_rel * sum, ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::make_distribution;

    fn dist(values: Vec<f64>, policy: NormPolicy) -> PhotonDistribution {
        make_distribution(values, policy, 0.0).unwrap()
    }

    #[test]
    fn vacuum_q() {
        let q = p_to_q(&dist(vec![1.0, 0.0, 0.0], NormPolicy::Exact));
        assert_eq!(q.value(0), 1.0);
        assert!(q.is_zero(1) && q.is_zero(2));
        assert_eq!(q.sign(1), 0);
    }

    #[test]
    fn coherent_one_gives_constant_q() {
        let mut ln_fact = 0.0;
        let values: Vec<f64> = (0..15)
            .map(|n| {
                if n > 0 {
                    ln_fact += (n as f64).ln();
                }
                (-1.0 - ln_fact).exp()
            })
            .collect();
        let q = p_to_q(&dist(values, NormPolicy::Truncated));
        for n in 0..15 {
            assert!((q.value(n) / (-1.0f64).exp() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn schiller_round_trip() {
        let q_raw = [0.44, 0.07, 0.26, 0.30, 1.44, 3.60, 28.80];
        let q = MomentSequence::from_values(&q_raw).unwrap();
        let p = q_to_p(&q);
        let d = dist(p.clone(), NormPolicy::Truncated);
        let back = p_to_q(&d);
        for (n, &v) in q_raw.iter().enumerate() {
            assert!((back.value(n) / v - 1.0).abs() < 1e-12);
        }
        assert!((p[6] - 28.80 / 720.0).abs() < 1e-15);
    }

    #[test]
    fn schiller_x1() {
        let q = MomentSequence::from_values(&[0.44, 0.07, 0.26, 0.30, 1.44, 3.60, 28.80]).unwrap();
        let x = q_to_x(&q).unwrap();
        assert_eq!(x.len(), 5);
        let expected = 0.07 * 0.30 / (0.26 * 0.26);
        assert!((x.get(1).unwrap() - expected).abs() < 1e-12);
        assert!(x.get(1).unwrap() < 1.0);
    }

    #[test]
    fn x_masks_zero_middle() {
        let q = MomentSequence::from_values(&[1.0, 0.0, 1.0, 2.0]).unwrap();
        let x = q_to_x(&q).unwrap();
        assert_eq!(x.get(0), None);
        assert_eq!(x.get(1), Some(0.0));
    }

    #[test]
    fn short_window_rejected() {
        let q = MomentSequence::from_values(&[1.0, 0.5]).unwrap();
        assert_eq!(q_to_x(&q), Err(Error::WindowTooShort { needed: 2, nmax: 1 }));
    }

    #[test]
    fn vacuum_gamma() {
        let g = p_to_gamma(&dist(vec![1.0], NormPolicy::Exact), 4).unwrap();
        assert_eq!(g.values(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(g.finite_through(), 4);
    }

    #[test]
    fn gamma_zero_is_total_probability() {
        let d = dist(vec![0.2, 0.3, 0.1, 0.05, 0.0], NormPolicy::Truncated);
        let g = p_to_gamma(&d, 2).unwrap();
        assert!((g.values()[0] - d.sum()).abs() < 1e-15);
        // n·p_n summed
        assert!((g.values()[1] - (0.3 + 0.2 + 0.15)).abs() < 1e-15);
        assert!((g.values()[2] - (2.0 * 0.1 + 6.0 * 0.05)).abs() < 1e-15);
    }

    #[test]
    fn heavy_window_edge_is_divergent() {
        // terms still growing at the window edge
        let d = dist(vec![0.1, 0.1, 0.1, 0.1, 0.2], NormPolicy::Truncated);
        assert_eq!(p_to_gamma(&d, 3), Err(Error::DivergentTail(0)));
    }
}
