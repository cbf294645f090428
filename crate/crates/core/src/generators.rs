//! Photon-number windows for analytic state families.
//!
//! Poisson and geometric terms are evaluated in log form and exponentiated
//! one at a time, so windows well past `n = 170` stay finite.

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, ln_factorial, log_sum_exp};
use crate::types::{NormPolicy, PhotonDistribution};

/// Weights and intensities `|α_j|²` of an incoherent coherent-state mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentMixtureSpec {
    weights: Vec<f64>,
    intensities: Vec<f64>,
}

impl CoherentMixtureSpec {
    pub fn new(weights: Vec<f64>, intensities: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() != intensities.len() {
            return Err(Error::InvalidParameter(format!(
                "mixture needs matching nonempty weights and intensities (got {} and {})",
                weights.len(),
                intensities.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "mixture weights must be nonnegative".into(),
            ));
        }
        if intensities.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidParameter("intensities must be nonnegative".into()));
        }
        let total: f64 = compensated_sum(&mut weights.clone());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("mixture weights sum to {total}")));
        }
        Ok(Self { weights, intensities })
    }

    /// Five-component mixture showing oscillating `p_n` for a classical state.
    pub fn fig1() -> Self {
        Self::new(
            vec![0.25, 0.25, 0.2, 0.18, 0.12],
            vec![10.0, 30.0, 60.0, 90.0, 130.0],
        )
        .expect("valid constant spec")
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights.iter().copied().zip(self.intensities.iter().copied())
    }

    pub fn max_intensity(&self) -> f64 {
        self.intensities.iter().copied().fold(0.0, f64::max)
    }

    pub fn suggested_nmax(&self) -> usize {
        suggested_coherent_nmax(self.max_intensity())
    }
}

/// `N[|z_0> + e^{iθ}|-z_0>]` given `|z_0|²` and `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatStateSpec {
    pub intensity: f64,
    pub theta: f64,
}

/// `N a†^m ρ_0 a^m` with `ρ_0` known through its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonAddedSpec {
    pub base: PhotonDistribution,
    pub added: usize,
}

/// Window length `μ + 10√μ` (never below 20) keeping truncated Poisson mass
/// negligible.
pub fn suggested_coherent_nmax(intensity: f64) -> usize {
    ((intensity + 10.0 * intensity.sqrt()).ceil() as usize).max(20)
}

/// Window length at which the geometric tail of a thermal state falls
/// below `1e-16`.
pub fn suggested_thermal_nmax(mean: f64) -> usize {
    if mean <= 0.0 {
        return 20;
    }
    let ratio = mean / (1.0 + mean);
    ((1e-16f64.ln() / ratio.ln()).ceil() as usize).max(20)
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v}")))
    }
}

/// `ln` of the Poisson law `e^{-μ} μⁿ / n!`.
fn ln_poisson(intensity: f64, n: usize) -> f64 {
    if intensity == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -intensity + n as f64 * intensity.ln() - ln_factorial(n)
}

/// Exponentiates log-probabilities, refusing entries that would underflow.
fn exp_window(ln_values: Vec<f64>) -> Result<Vec<f64>> {
    ln_values
        .into_iter()
        .enumerate()
        .map(|(n, l)| {
            if l == f64::NEG_INFINITY {
                return Ok(0.0);
            }
            let v = l.exp();
            if v < f64::MIN_POSITIVE {
                Err(Error::Underflow(n))
            } else {
                Ok(v)
            }
        })
        .collect()
}

fn truncated(values: Vec<f64>) -> Result<PhotonDistribution> {
    PhotonDistribution::new(values, NormPolicy::Truncated, 0.0)
}

/// Poisson window of a coherent state.
pub fn coherent(intensity: f64, nmax: usize) -> Result<PhotonDistribution> {
    check_nonneg("intensity", intensity)?;
    let ln_values = (0..=nmax).map(|n| ln_poisson(intensity, n)).collect();
    truncated(exp_window(ln_values)?)
}

/// Geometric window `n̄ⁿ / (1 + n̄)^{n+1}` of a thermal state.
pub fn thermal(mean: f64, nmax: usize) -> Result<PhotonDistribution> {
    check_nonneg("mean", mean)?;
    let ln_values = (0..=nmax)
        .map(|n| {
            if mean == 0.0 {
                if n == 0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                n as f64 * mean.ln() - (n as f64 + 1.0) * mean.ln_1p()
            }
        })
        .collect();
    truncated(exp_window(ln_values)?)
}

/// Fock state `|m>` in a window ending at `nmax`.
pub fn fock(m: usize, nmax: usize) -> Result<PhotonDistribution> {
    if m > nmax {
        return Err(Error::WindowTooShort { needed: m, nmax });
    }
    let mut values = vec![0.0; nmax + 1];
    values[m] = 1.0;
    PhotonDistribution::new(values, NormPolicy::Exact, 0.0)
}

/// Convex combination of Poisson windows.
pub fn coherent_mixture(spec: &CoherentMixtureSpec, nmax: usize) -> Result<PhotonDistribution> {
    let ln_values = (0..=nmax)
        .map(|n| {
            let terms: Vec<f64> = spec
                .components()
                .map(|(w, mu)| w.ln() + ln_poisson(mu, n))
                .collect();
            log_sum_exp(&terms)
        })
        .collect();
    truncated(exp_window(ln_values)?)
}

/// Two-coherent-state superposition
/// `p_n = e^{-μ} μⁿ/n! · (1 + (-1)ⁿ cos θ) / (1 + cos θ · e^{-2μ})`,
/// normalized in closed form rather than over the window.
pub fn cat_state(spec: &CatStateSpec, nmax: usize) -> Result<PhotonDistribution> {
    check_nonneg("intensity", spec.intensity)?;
    if !spec.theta.is_finite() {
        return Err(Error::InvalidParameter(format!("theta = {}", spec.theta)));
    }
    let cos = spec.theta.cos();
    let mu = spec.intensity;
    let norm = 1.0 + cos * (-2.0 * mu).exp();
    if norm <= 0.0 {
        return Err(Error::DegenerateCat);
    }
    let ln_norm = norm.ln();
    let ln_values = (0..=nmax)
        .map(|n| {
            let parity = if n % 2 == 0 { 1.0 + cos } else { 1.0 - cos };
            if parity <= 0.0 {
                f64::NEG_INFINITY
            } else {
                ln_poisson(mu, n) + parity.ln() - ln_norm
            }
        })
        .collect();
    truncated(exp_window(ln_values)?)
}

/// Relative weight tolerated beyond the window of a photon-added state.
pub const PHOTON_ADDED_TAIL_TOL: f64 = 1e-9;

/// `p_n ∝ n!/(n-m)! · base_{n-m}` for `n >= m`, normalized over the window.
///
/// Fails with [`Error::WindowTooShort`] when `nmax` reaches past the base
/// window or the weight left outside `0..=nmax` exceeds
/// [`PHOTON_ADDED_TAIL_TOL`] of the window sum.
pub fn photon_added(spec: &PhotonAddedSpec, nmax: usize) -> Result<PhotonDistribution> {
    let base = &spec.base;
    let m = spec.added;
    let base_end = base.nmax() + m;
    if nmax > base_end || nmax < m {
        return Err(Error::WindowTooShort {
            needed: nmax.max(m),
            nmax: base_end,
        });
    }
    let threshold = base.zero_threshold();
    let ln_weight = |n: usize| -> f64 {
        if n < m {
            return f64::NEG_INFINITY;
        }
        let b = base.values()[n - m];
        if b <= threshold {
            f64::NEG_INFINITY
        } else {
            b.ln() + ln_factorial(n) - ln_factorial(n - m)
        }
    };
    let ln_window: Vec<f64> = (0..=nmax).map(ln_weight).collect();
    let ln_total = log_sum_exp(&ln_window);

    // weight the base still carries past nmax, then a geometric estimate
    // past the end of the base window
    let ln_inside_base: Vec<f64> = (nmax + 1..=base_end).map(ln_weight).collect();
    let mut tail_rel = (log_sum_exp(&ln_inside_base) - ln_total).exp();
    if base.norm_policy() == NormPolicy::Truncated && base_end >= 1 {
        let last = ln_weight(base_end);
        let prev = ln_weight(base_end - 1);
        if last != f64::NEG_INFINITY {
            if prev == f64::NEG_INFINITY || last >= prev {
                return Err(Error::WindowTooShort {
                    needed: base_end + 1,
                    nmax: base_end,
                });
            }
            let ratio = (last - prev).exp();
            tail_rel += (last - ln_total).exp() * ratio / (1.0 - ratio);
        }
    }
    if tail_rel > PHOTON_ADDED_TAIL_TOL {
        return Err(Error::WindowTooShort {
            needed: nmax + 1,
            nmax,
        });
    }
    let ln_values = ln_window.into_iter().map(|l| l - ln_total).collect();
    truncated(exp_window(ln_values)?)
}
