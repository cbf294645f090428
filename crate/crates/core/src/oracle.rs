//! Slow-path moments straight from the radial distribution `P(I)`:
//!
//! `q_n = ∫ P(I) e^{-I} Iⁿ dI` and `γ_n = ∫ P(I) Iⁿ dI`.
//!
//! Nothing here goes through the factorial or log-gamma machinery of the
//! transforms, so agreement between the two paths is a real check.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::generators::CoherentMixtureSpec;
use crate::types::{FactorialMomentSequence, MomentSequence};

/// Relative change between refinements accepted as converged.
pub const QUADRATURE_REL_TOL: f64 = 1e-11;
/// Integrand fraction of its peak below which the domain is cut.
pub const DOMAIN_CUT: f64 = 1e-18;

const GAUSS_POINTS: usize = 16;
const START_PANELS: usize = 8;
const MAX_PANELS: usize = 1 << 15;
const PEAK_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    pub intensity: f64,
    pub weight: f64,
}

/// How moments of a [`RadialDistribution`] are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureScheme {
    /// Exact weighted sum over atoms.
    PointMasses,
    /// Composite Gauss–Legendre, panel count doubled until converged.
    CompositeGaussLegendre { points_per_panel: usize },
}

#[derive(Clone)]
enum Radial {
    Atoms(Vec<PointMass>),
    Density(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Phase-averaged `P(I)` on `[0, i_max]`.
#[derive(Clone)]
pub struct RadialDistribution {
    radial: Radial,
    i_max: f64,
    scheme: QuadratureScheme,
}

impl fmt::Debug for RadialDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("RadialDistribution");
        if let Radial::Atoms(a) = &self.radial {
            s.field("atoms", a);
        }
        s.field("i_max", &self.i_max)
            .field("scheme", &self.scheme)
            .finish()
    }
}

impl RadialDistribution {
    pub fn from_point_masses(atoms: Vec<PointMass>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Empty);
        }
        if atoms.iter().any(|a| {
            !(a.intensity.is_finite() && a.intensity >= 0.0 && a.weight.is_finite() && a.weight >= 0.0)
        }) {
            return Err(Error::InvalidParameter(
                "point masses need nonnegative finite values".into(),
            ));
        }
        let i_max = atoms.iter().map(|a| a.intensity).fold(0.0, f64::max);
        Ok(Self {
            radial: Radial::Atoms(atoms),
            i_max,
            scheme: QuadratureScheme::PointMasses,
        })
    }

    /// A nonnegative density on `[0, i_max]`. The evaluator must be
    /// reentrant.
    pub fn from_density(density: impl Fn(f64) -> f64 + Send + Sync + 'static, i_max: f64) -> Result<Self> {
        if !(i_max.is_finite() && i_max > 0.0) {
            return Err(Error::InvalidParameter(format!("i_max = {i_max}")));
        }
        Ok(Self {
            radial: Radial::Density(Arc::new(density)),
            i_max,
            scheme: QuadratureScheme::CompositeGaussLegendre {
                points_per_panel: GAUSS_POINTS,
            },
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (0.0, self.i_max)
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    pub fn point_masses(&self) -> Option<&[PointMass]> {
        match &self.radial {
            Radial::Atoms(a) => Some(a),
            Radial::Density(_) => None,
        }
    }

    /// `P(I)` for a density; `None` for point masses.
    pub fn density(&self, intensity: f64) -> Option<f64> {
        match &self.radial {
            Radial::Density(f) => Some(f(intensity)),
            Radial::Atoms(_) => None,
        }
    }
}

/// A coherent state `|α>` averages to a ring at `I = |α|²`, so a mixture is a
/// set of point masses.
pub fn radial_of_coherent_mixture(spec: &CoherentMixtureSpec) -> RadialDistribution {
    let atoms = spec
        .components()
        .map(|(weight, intensity)| PointMass { intensity, weight })
        .collect();
    RadialDistribution::from_point_masses(atoms).expect("mixture specs are validated")
}

/// `P(I) = e^{-I/n̄} / n̄` on `[0, n̄·(nmax + 10√nmax + 50)]`, long enough
/// for moments through `nmax`; a point mass at the origin for `n̄ = 0`.
pub fn radial_of_thermal(mean: f64, nmax: usize) -> Result<RadialDistribution> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(Error::InvalidParameter(format!("mean = {mean}")));
    }
    if mean == 0.0 {
        return RadialDistribution::from_point_masses(vec![PointMass {
            intensity: 0.0,
            weight: 1.0,
        }]);
    }
    let n = nmax.max(1) as f64;
    let i_max = mean * (n + 10.0 * n.sqrt() + 50.0);
    RadialDistribution::from_density(move |i| (-i / mean).exp() / mean, i_max)
}

/// Record of how one moment integral converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub panels: usize,
    pub rel_change: f64,
    pub cutoff: f64,
}

/// Logs of `∫ P(I) w(I) Iⁿ dI` for `n = 0..=n_max` with their certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureMoments {
    pub ln_moments: Vec<f64>,
    pub certificates: Vec<Convergence>,
}

impl QuadratureMoments {
    pub fn into_moment_sequence(self) -> MomentSequence {
        MomentSequence::from_ln(self.ln_moments).expect("quadrature moments are finite or zero")
    }

    pub fn into_factorial_moments(self) -> Result<FactorialMomentSequence> {
        FactorialMomentSequence::from_values(self.ln_moments.iter().map(|l| l.exp()).collect())
    }
}

/// `q_n` (`weighted`, i.e. with the `e^{-I}` factor) or `γ_n` by direct
/// integration.
pub fn moments_by_quadrature(
    r: &RadialDistribution,
    n_max: usize,
    weighted: bool,
) -> Result<QuadratureMoments> {
    let damping = if weighted { 1.0 } else { 0.0 };
    let mut ln_moments = Vec::with_capacity(n_max + 1);
    let mut certificates = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let (ln_m, cert) = match &r.radial {
            Radial::Atoms(atoms) => (
                atom_moment(atoms, n, damping),
                Convergence {
                    panels: 0,
                    rel_change: 0.0,
                    cutoff: r.i_max,
                },
            ),
            Radial::Density(f) => density_moment(f.as_ref(), r.i_max, n, damping)?,
        };
        ln_moments.push(ln_m);
        certificates.push(cert);
    }
    Ok(QuadratureMoments {
        ln_moments,
        certificates,
    })
}

/// `q_n` of `r` by quadrature.
pub fn q_by_quadrature(r: &RadialDistribution, n_max: usize) -> Result<MomentSequence> {
    Ok(moments_by_quadrature(r, n_max, true)?.into_moment_sequence())
}

/// `γ_n` of `r` by quadrature.
pub fn gamma_by_quadrature(r: &RadialDistribution, n_max: usize) -> Result<FactorialMomentSequence> {
    moments_by_quadrature(r, n_max, false)?.into_factorial_moments()
}

fn atom_moment(atoms: &[PointMass], n: usize, damping: f64) -> f64 {
    let logs: Vec<f64> = atoms
        .iter()
        .filter(|a| a.weight > 0.0)
        .filter_map(|a| {
            if a.intensity == 0.0 {
                (n == 0).then(|| a.weight.ln())
            } else {
                Some(a.weight.ln() + n as f64 * a.intensity.ln() - damping * a.intensity)
            }
        })
        .collect();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    let mut terms: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
    terms.sort_by(|a, b| a.total_cmp(b));
    peak + terms.iter().sum::<f64>().ln()
}

fn ln_integrand(f: &dyn Fn(f64) -> f64, i: f64, n: usize, damping: f64) -> f64 {
    let p = f(i);
    if p.is_nan() || p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let power = if n == 0 {
        0.0
    } else if i <= 0.0 {
        return f64::NEG_INFINITY;
    } else {
        n as f64 * i.ln()
    };
    p.ln() + power - damping * i
}

fn density_moment(f: &dyn Fn(f64) -> f64, i_max: f64, n: usize, damping: f64) -> Result<(f64, Convergence)> {
    let step = i_max / PEAK_GRID as f64;
    let grid: Vec<f64> = (0..=PEAK_GRID)
        .map(|k| ln_integrand(f, k as f64 * step, n, damping))
        .collect();
    let ln_peak = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if ln_peak == f64::NEG_INFINITY {
        return Ok((
            ln_peak,
            Convergence {
                panels: 0,
                rel_change: 0.0,
                cutoff: i_max,
            },
        ));
    }
    let floor = ln_peak + DOMAIN_CUT.ln();
    if grid[PEAK_GRID] > floor {
        return Err(Error::QuadratureNotConverged(n));
    }
    let last_above = grid.iter().rposition(|&g| g > floor).unwrap_or(0);
    let cutoff = ((last_above + 1) as f64 * step).min(i_max);

    let (nodes, weights) = gauss_legendre(GAUSS_POINTS);
    let integrate = |panels: usize| -> f64 {
        let h = cutoff / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            let mut panel = 0.0;
            for (x, w) in nodes.iter().zip(&weights) {
                let i = mid + 0.5 * h * x;
                panel += w * (ln_integrand(f, i, n, damping) - ln_peak).exp();
            }
            total += 0.5 * h * panel;
        }
        total
    };
    let mut panels = START_PANELS;
    let mut previous = integrate(panels);
    while panels < MAX_PANELS {
        panels *= 2;
        let current = integrate(panels);
        let rel_change = ((current - previous) / current).abs();
        if rel_change < QUADRATURE_REL_TOL {
            return Ok((
                ln_peak + current.ln(),
                Convergence {
                    panels,
                    rel_change,
                    cutoff,
                },
            ));
        }
        previous = current;
    }
    Err(Error::QuadratureNotConverged(n))
}

/// Nodes and weights of the `k`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    let kf = k as f64;
    for i in 0..k.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (kf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_k and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let pk = if k == 0 { 1.0 } else { p1 };
            let pkm1 = if k == 1 { 1.0 } else { p0 };
            dp = kf * (x * pk - pkm1) / (x * x - 1.0);
            let dx = pk / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact through degree 31
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((integral - 2.0 / 31.0).abs() < 1e-14);
        let odd: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(7)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn single_ring() {
        let spec = CoherentMixtureSpec::new(vec![1.0], vec![3.0]).unwrap();
        let r = radial_of_coherent_mixture(&spec);
        assert_eq!(r.point_masses().unwrap().len(), 1);
        let q = q_by_quadrature(&r, 6).unwrap();
        for n in 0..=6 {
            let expected = 3f64.powi(n as i32) * (-3f64).exp();
            assert!((q.value(n) / expected - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn origin_mass_is_vacuum() {
        let r = radial_of_thermal(0.0, 10).unwrap();
        let q = q_by_quadrature(&r, 4).unwrap();
        assert_eq!(q.value(0), 1.0);
        assert!((1..=4).all(|n| q.is_zero(n)));
    }

    #[test]
    fn thermal_mean_one() {
        let r = radial_of_thermal(1.0, 60).unwrap();
        let q = q_by_quadrature(&r, 3).unwrap();
        // ∫ e^{-2I} dI = 1/2
        assert!((q.value(0) - 0.5).abs() < 1e-12);
        let g = gamma_by_quadrature(&r, 4).unwrap();
        assert!((g.values()[2] - 2.0).abs() < 1e-10);
        assert!((g.values()[4] - 24.0).abs() < 1e-9);
    }

    #[test]
    fn short_domain_is_reported() {
        let r = RadialDistribution::from_density(|i| (-i).exp(), 5.0).unwrap();
        assert_eq!(
            moments_by_quadrature(&r, 3, false).unwrap_err(),
            Error::QuadratureNotConverged(0)
        );
    }

    #[test]
    fn certificates_recorded() {
        let r = radial_of_thermal(2.0, 80).unwrap();
        let m = moments_by_quadrature(&r, 5, true).unwrap();
        assert_eq!(m.certificates.len(), 6);
        assert!(m
            .certificates
            .iter()
            .all(|c| c.rel_change < QUADRATURE_REL_TOL && c.panels >= 16));
    }
}
