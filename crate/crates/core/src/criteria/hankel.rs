//! Hankel positivity on a moment sequence: `L, L̃` built from `q_n` and
//! `M, M̃` built from `γ_n`.
//!
//! Matrices are formed from the gauge-rescaled sequence `s'_n = s_n·cⁿ/a`,
//! which is a positive scaling plus the diagonal congruence
//! `diag(c⁰, …, cᴺ)` and so cannot change positivity. The eigenvalue check
//! goes one step further and scales every row and column to unit diagonal
//! (again a congruence), working from logarithms, so sequences spanning
//! hundreds of decades still give well-scaled matrices.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::criteria::config::TestConfig;
use crate::error::{Error, Result};
use crate::types::{FactorialMomentSequence, MomentSequence, TestRun, Witness, WitnessReport};

/// Which moment sequence a [`HankelPair`] was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// `q_n`, moments of `P(I)·e^{-I}`: matrices `L`, `L̃`.
    Photon,
    /// `γ_n`, moments of `P(I)`: matrices `M`, `M̃`.
    Factorial,
}

impl MomentKind {
    fn test_names(self) -> (&'static str, &'static str) {
        match self {
            MomentKind::Photon => ("hankel_L", "hankel_L_shifted"),
            MomentKind::Factorial => ("hankel_M", "hankel_M_shifted"),
        }
    }
}

/// A sequence that can feed [`build_hankel`].
pub trait HankelSource {
    /// Natural logs of the usable entries, `-inf` for zeros.
    fn ln_sequence(&self) -> Vec<f64>;
    fn kind(&self) -> MomentKind;
}

impl HankelSource for MomentSequence {
    fn ln_sequence(&self) -> Vec<f64> {
        self.ln_values().to_vec()
    }

    fn kind(&self) -> MomentKind {
        MomentKind::Photon
    }
}

impl HankelSource for FactorialMomentSequence {
    /// Only the entries through `finite_through`.
    fn ln_sequence(&self) -> Vec<f64> {
        self.reliable().iter().map(|v| v.ln()).collect()
    }

    fn kind(&self) -> MomentKind {
        MomentKind::Factorial
    }
}

/// `unshifted[m][n] = s'_{m+n}` and `shifted[m][n] = s'_{m+n+1}` for
/// `m, n = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelPair {
    order: usize,
    kind: MomentKind,
    unshifted: DMatrix<f64>,
    shifted: DMatrix<f64>,
    ln_a: f64,
    ln_c: f64,
    ln_scaled: Vec<f64>,
}

/// Builds the order-`order` pair from `s_0..=s_{2·order+1}`.
///
/// Gauge: `a = s_0` and `c` the largest value keeping every `s'_n <= 1`
/// when `s_0 > 0`; otherwise `c = 1` and `a = max s_n`.
pub fn build_hankel<S: HankelSource + ?Sized>(s: &S, order: usize) -> Result<HankelPair> {
    let ln_full = s.ln_sequence();
    let needed = 2 * order + 1;
    if ln_full.len() <= needed {
        return Err(Error::WindowTooShort {
            needed,
            nmax: ln_full.len().saturating_sub(1),
        });
    }
    let ln_seq = &ln_full[..=needed];
    let (ln_a, ln_c) = if ln_seq[0].is_finite() {
        let ln_c = ln_seq
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, l)| l.is_finite())
            .map(|(n, l)| (ln_seq[0] - l) / n as f64)
            .fold(f64::INFINITY, f64::min);
        (ln_seq[0], if ln_c.is_finite() { ln_c } else { 0.0 })
    } else {
        let ln_max = ln_seq.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (if ln_max.is_finite() { ln_max } else { 0.0 }, 0.0)
    };
    let ln_scaled: Vec<f64> = ln_seq
        .iter()
        .enumerate()
        .map(|(n, &l)| {
            if l == f64::NEG_INFINITY {
                l
            } else {
                l - ln_a + n as f64 * ln_c
            }
        })
        .collect();
    let dim = order + 1;
    let unshifted = DMatrix::from_fn(dim, dim, |i, j| ln_scaled[i + j].exp());
    let shifted = DMatrix::from_fn(dim, dim, |i, j| ln_scaled[i + j + 1].exp());
    Ok(HankelPair {
        order,
        kind: s.kind(),
        unshifted,
        shifted,
        ln_a,
        ln_c,
        ln_scaled,
    })
}

impl HankelPair {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kind(&self) -> MomentKind {
        self.kind
    }

    /// `L` (or `M`) of the rescaled sequence.
    pub fn unshifted(&self) -> &DMatrix<f64> {
        &self.unshifted
    }

    /// `L̃` (or `M̃`) of the rescaled sequence.
    pub fn shifted(&self) -> &DMatrix<f64> {
        &self.shifted
    }

    /// The gauge factors `(a, c)`.
    pub fn scale(&self) -> (f64, f64) {
        (self.ln_a.exp(), self.ln_c.exp())
    }

    /// `(ln a, ln c)`, exact even when `a` or `c` leave the double range.
    pub fn ln_scale(&self) -> (f64, f64) {
        (self.ln_a, self.ln_c)
    }

    /// Matrix of the original sequence, undoing the gauge.
    pub fn raw(&self, shifted: bool) -> DMatrix<f64> {
        let off = usize::from(shifted);
        let dim = self.order + 1;
        DMatrix::from_fn(dim, dim, |i, j| {
            let k = i + j + off;
            (self.ln_scaled[k] + self.ln_a - k as f64 * self.ln_c).exp()
        })
    }

    /// Leading `size × size` block scaled to unit diagonal. Rows with a zero
    /// diagonal are scaled so their largest entry has unit size.
    pub fn equilibrated(&self, shifted: bool, size: usize) -> DMatrix<f64> {
        assert!(size <= self.order + 1);
        let off = usize::from(shifted);
        let ln_entry = |i: usize, j: usize| self.ln_scaled[i + j + off];
        let mut ln_d: Vec<f64> = (0..size)
            .map(|i| {
                let diag = ln_entry(i, i);
                if diag.is_finite() {
                    -0.5 * diag
                } else {
                    f64::NAN
                }
            })
            .collect();
        for i in 0..size {
            if ln_d[i].is_nan() {
                let ln_row_max = (0..size)
                    .filter(|&k| !ln_d[k].is_nan())
                    .map(|k| ln_entry(i, k) + ln_d[k])
                    .fold(f64::NEG_INFINITY, f64::max);
                ln_d[i] = if ln_row_max.is_finite() { -ln_row_max } else { 0.0 };
            }
        }
        DMatrix::from_fn(size, size, |i, j| (ln_entry(i, j) + ln_d[i] + ln_d[j]).exp())
    }
}

/// Smallest eigenvalue and spectral radius of a symmetric matrix.
///
/// Matrices with entries too large for the eigensolver are necessarily
/// indefinite after unit-diagonal scaling; for those the smallest
/// eigenvalue of the offending 2×2 block, `1 - max |e_ij|`, is returned,
/// which bounds the true smallest eigenvalue from above.
pub fn spectrum_bounds(m: &DMatrix<f64>) -> (f64, f64) {
    if m.nrows() == 0 {
        return (0.0, 0.0);
    }
    let largest = m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if !largest.is_finite() || largest > 1e100 {
        let bound = (1.0 - largest).max(-f64::MAX);
        return (bound, largest.min(f64::MAX));
    }
    let eig = SymmetricEigen::new(m.clone());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let radius = eig.eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    (min, radius)
}

fn fails(min: f64, radius: f64, cfg: &TestConfig) -> bool {
    min < -cfg.psd_tol * radius.max(1.0)
}

/// Smallest eigenvalue of every leading block, for orders `0..=order`:
/// `(unshifted, shifted)`.
pub fn hankel_min_eigenvalues(pair: &HankelPair) -> (Vec<f64>, Vec<f64>) {
    let profile = |shifted: bool| {
        (1..=pair.order + 1)
            .map(|size| spectrum_bounds(&pair.equilibrated(shifted, size)).0)
            .collect()
    };
    (profile(false), profile(true))
}

pub(crate) fn hankel_runs(pair: &HankelPair, cfg: &TestConfig) -> Vec<TestRun> {
    let (name_l, name_shift) = pair.kind.test_names();
    [(false, name_l), (true, name_shift)]
        .into_iter()
        .map(|(shifted, name)| {
            let off = usize::from(shifted);
            let mut found = Vec::new();
            // positivity of order N implies every smaller order, so the
            // first failure is reported
            for size in 1..=pair.order + 1 {
                let (min, radius) = spectrum_bounds(&pair.equilibrated(shifted, size));
                if fails(min, radius, cfg) {
                    let n = size - 1;
                    found.push(Witness {
                        indices: (off..=2 * n + off).collect(),
                        lhs: min,
                        rhs: 0.0,
                        margin: min,
                    });
                    break;
                }
            }
            TestRun::new(name, Some((off, 2 * pair.order + off)), found)
        })
        .collect()
}

/// NONCLASSICAL iff, at some order up to the pair's, either matrix has an
/// eigenvalue below `-psd_tol·max(1, spectral radius)` after unit-diagonal
/// scaling. The witness covers the smallest failing order; `lhs` and
/// `margin` carry the offending eigenvalue.
pub fn test_hankel_psd(pair: &HankelPair, cfg: &TestConfig) -> WitnessReport {
    WitnessReport::from_runs(hankel_runs(pair, cfg), cfg.psd_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Verdict;

    fn q(values: &[f64]) -> MomentSequence {
        MomentSequence::from_values(values).unwrap()
    }

    const SCHILLER: [f64; 7] = [0.44, 0.07, 0.26, 0.30, 1.44, 3.60, 28.80];

    #[test]
    fn order_zero() {
        let pair = build_hankel(&q(&[0.3, 0.2]), 0).unwrap();
        let raw_l = pair.raw(false);
        let raw_s = pair.raw(true);
        assert!((raw_l[(0, 0)] - 0.3).abs() < 1e-15);
        assert!((raw_s[(0, 0)] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn schiller_order_one_layout() {
        let pair = build_hankel(&q(&SCHILLER), 1).unwrap();
        let l = pair.raw(false);
        let ls = pair.raw(true);
        let expect_l = [[0.44, 0.07], [0.07, 0.26]];
        let expect_s = [[0.07, 0.26], [0.26, 0.30]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((l[(i, j)] - expect_l[i][j]).abs() < 1e-14);
                assert!((ls[(i, j)] - expect_s[i][j]).abs() < 1e-14);
            }
        }
        let det = ls[(0, 0)] * ls[(1, 1)] - ls[(0, 1)] * ls[(1, 0)];
        assert!((det - (-0.0466)).abs() < 1e-12);
        let r = test_hankel_psd(&pair, &TestConfig::default());
        assert_eq!(r.verdict, Verdict::Nonclassical);
        let shifted = r.test("hankel_L_shifted").unwrap();
        assert_eq!(shifted.witnesses[0].indices, vec![1, 2, 3]);
        assert!(shifted.witnesses[0].lhs < 0.0);
        assert!(!r.test("hankel_L").unwrap().fired());
    }

    #[test]
    fn gauge_keeps_entries_at_most_one() {
        let pair = build_hankel(&q(&SCHILLER), 2).unwrap();
        let (a, c) = pair.scale();
        assert!((a - 0.44).abs() < 1e-15);
        assert!(c > 0.0);
        for v in pair.unshifted().iter().chain(pair.shifted().iter()) {
            assert!(*v <= 1.0 + 1e-15);
        }
        assert!((pair.unshifted()[(0, 0)] - 1.0).abs() < 1e-15);
        // symmetric by construction
        assert_eq!(pair.shifted(), &pair.shifted().transpose());
    }

    #[test]
    fn poisson_rescales_to_all_ones() {
        let mu: f64 = 7.0;
        let seq: Vec<f64> = (0..12).map(|n| (-mu + n as f64 * mu.ln()).exp()).collect();
        let pair = build_hankel(&q(&seq), 5).unwrap();
        for v in pair.unshifted().iter() {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let (min, radius) = spectrum_bounds(pair.unshifted());
        assert!(min.abs() < 1e-12);
        assert!((radius - 6.0).abs() < 1e-11);
        assert!(!test_hankel_psd(&pair, &TestConfig::default()).is_nonclassical());
    }

    #[test]
    fn coherent_factorial_moments_rank_one() {
        let mu: f64 = 2.5;
        let gamma: Vec<f64> = (0..8).map(|n| mu.powi(n)).collect();
        let g = FactorialMomentSequence::from_values(gamma).unwrap();
        let pair = build_hankel(&g, 3).unwrap();
        let raw = pair.raw(false);
        for i in 0..4 {
            for j in 0..4 {
                let outer = mu.powi(i as i32) * mu.powi(j as i32);
                assert!((raw[(i, j)] / outer - 1.0).abs() < 1e-13);
            }
        }
        let r = test_hankel_psd(&pair, &TestConfig::default());
        assert!(!r.is_nonclassical());
        assert!(r.test("hankel_M").is_some());
    }

    #[test]
    fn short_window() {
        assert!(matches!(
            build_hankel(&q(&[1.0, 0.5, 0.3]), 1),
            Err(Error::WindowTooShort { needed: 3, .. })
        ));
    }

    #[test]
    fn zero_diagonal_rows() {
        // vacuum: L = diag(1, 0, ..), L̃ = 0; positive semidefinite
        let pair = build_hankel(&q(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 2).unwrap();
        assert!(!test_hankel_psd(&pair, &TestConfig::default()).is_nonclassical());
        // Fock |1>: q = (0, 1, 0, 0): L has zero diagonal with a nonzero
        // off-diagonal entry
        let pair = build_hankel(&q(&[0.0, 1.0, 0.0, 0.0]), 1).unwrap();
        let r = test_hankel_psd(&pair, &TestConfig::default());
        assert!(r.test("hankel_L").unwrap().fired());
    }

    #[test]
    fn eigen_residual_contract() {
        let pair = build_hankel(&q(&SCHILLER), 2).unwrap();
        for shifted in [false, true] {
            let m = pair.equilibrated(shifted, 3);
            let eig = SymmetricEigen::new(m.clone());
            let norm = m.norm();
            for k in 0..3 {
                let v = eig.eigenvectors.column(k);
                let resid = (&m * v - v * eig.eigenvalues[k]).norm();
                assert!(resid <= 1e-10 * norm);
            }
        }
    }

    #[test]
    fn min_eigenvalue_profile_is_monotone() {
        let pair = build_hankel(&q(&SCHILLER), 2).unwrap();
        let (l, ls) = hankel_min_eigenvalues(&pair);
        for prof in [l, ls] {
            for w in prof.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }
}
