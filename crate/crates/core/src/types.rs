//! Domain types shared by every module.
//!
//! A finite window of data can prove nonclassicality (one violated necessary
//! condition is enough) but never classicality, so [`Verdict`] has no
//! "classical" value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Default relative zero threshold (multiplied by the largest `p_n`).
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

/// Default tolerance on `Σ p_n` checks.
pub const DEFAULT_NORM_TOL: f64 = 1e-9;

/// How the sum of a probability window is constrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormPolicy {
    /// The window holds the whole distribution: `|Σ p_n - 1| <= tol`.
    Exact,
    /// The window is a prefix of the distribution: `Σ p_n <= 1 + tol`.
    #[default]
    Truncated,
}

/// A finite window `p_0..=p_nmax` of a photon-number distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    values: Vec<f64>,
    norm_policy: NormPolicy,
    zero_tol: f64,
}

/// Validates `values` and builds a [`PhotonDistribution`] using the default
/// normalization tolerance.
pub fn make_distribution(
    values: Vec<f64>,
    norm_policy: NormPolicy,
    zero_tol: f64,
) -> Result<PhotonDistribution> {
    PhotonDistribution::new(values, norm_policy, zero_tol)
}

impl PhotonDistribution {
    pub fn new(values: Vec<f64>, norm_policy: NormPolicy, zero_tol: f64) -> Result<Self> {
        Self::with_norm_tol(values, norm_policy, zero_tol, DEFAULT_NORM_TOL)
    }

    /// Negative entries no further below zero than `zero_tol * max p_n` are
    /// clamped to zero; anything more negative is rejected.
    pub fn with_norm_tol(
        mut values: Vec<f64>,
        norm_policy: NormPolicy,
        zero_tol: f64,
        norm_tol: f64,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if !(zero_tol.is_finite() && zero_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("zero_tol = {zero_tol}")));
        }
        if !(norm_tol.is_finite() && norm_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("norm_tol = {norm_tol}")));
        }
        if let Some(n) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(n));
        }
        let max = values.iter().copied().fold(0.0_f64, f64::max);
        let clamp = zero_tol * max;
        for (n, v) in values.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v < -clamp {
                    return Err(Error::NegativeProbability { n, value: *v });
                }
                *v = 0.0;
            }
        }
        if max <= 0.0 {
            return Err(Error::ZeroDistribution);
        }
        let sum = compensated_sum(&mut values.clone());
        let ok = match norm_policy {
            NormPolicy::Exact => (sum - 1.0).abs() <= norm_tol,
            NormPolicy::Truncated => sum <= 1.0 + norm_tol,
        };
        if !ok {
            return Err(Error::NormalizationViolation(sum));
        }
        Ok(Self {
            values,
            norm_policy,
            zero_tol,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }

    /// Largest index with data.
    pub fn nmax(&self) -> usize {
        self.values.len() - 1
    }

    pub fn norm_policy(&self) -> NormPolicy {
        self.norm_policy
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    /// Absolute threshold at or below which `p_n` counts as an exact zero.
    pub fn zero_threshold(&self) -> f64 {
        self.zero_tol * self.values.iter().copied().fold(0.0_f64, f64::max)
    }

    pub fn is_zero(&self, n: usize) -> bool {
        self.values[n] <= self.zero_threshold()
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(&mut self.values.clone())
    }

    /// True when all weight sits on `n = 0`.
    pub fn is_vacuum(&self) -> bool {
        !self.is_zero(0) && (1..self.values.len()).all(|n| self.is_zero(n))
    }
}

/// The sequence `q_n = n!·p_n`, stored as natural logarithms.
///
/// An exact zero is stored as `-inf` (sign 0); every other entry is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    ln_values: Vec<f64>,
}

impl MomentSequence {
    /// Builds from log-magnitudes; `-inf` marks a zero.
    pub fn from_ln(ln_values: Vec<f64>) -> Result<Self> {
        if ln_values.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(n) = ln_values.iter().position(|l| l.is_nan() || *l == f64::INFINITY) {
            return Err(Error::NonFinite(n));
        }
        Ok(Self { ln_values })
    }

    /// Builds from plain nonnegative values.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        let mut ln_values = Vec::with_capacity(values.len());
        for (n, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(n));
            }
            if v < 0.0 {
                return Err(Error::NegativeProbability { n, value: v });
            }
            ln_values.push(v.ln());
        }
        Ok(Self { ln_values })
    }

    pub fn ln_values(&self) -> &[f64] {
        &self.ln_values
    }

    pub fn ln(&self, n: usize) -> f64 {
        self.ln_values[n]
    }

    /// `q_n` as a plain number; overflows to `inf` for very large entries.
    pub fn value(&self, n: usize) -> f64 {
        self.ln_values[n].exp()
    }

    pub fn is_zero(&self, n: usize) -> bool {
        self.ln_values[n] == f64::NEG_INFINITY
    }

    /// 0 for an exact zero, 1 otherwise.
    pub fn sign(&self, n: usize) -> u8 {
        u8::from(!self.is_zero(n))
    }

    pub fn nmax(&self) -> usize {
        self.ln_values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.ln_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_values.is_empty()
    }

    /// The gauge-transformed sequence `a·cⁿ·q_n`, given `ln a` and `ln c`.
    pub fn rescaled(&self, ln_a: f64, ln_c: f64) -> Self {
        let ln_values = self
            .ln_values
            .iter()
            .enumerate()
            .map(|(n, &l)| {
                if l == f64::NEG_INFINITY {
                    l
                } else {
                    l + ln_a + n as f64 * ln_c
                }
            })
            .collect();
        Self { ln_values }
    }
}

/// Normal-ordered (factorial) moments `γ_0..=γ_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorialMomentSequence {
    values: Vec<f64>,
    finite_through: usize,
    tail_bound: Vec<f64>,
}

impl FactorialMomentSequence {
    /// Moments supplied directly (no truncation error).
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        for (n, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(n));
            }
            if v < 0.0 {
                return Err(Error::NegativeProbability { n, value: v });
            }
        }
        let len = values.len();
        Ok(Self {
            values,
            finite_through: len - 1,
            tail_bound: vec![0.0; len],
        })
    }

    pub(crate) fn from_parts(values: Vec<f64>, finite_through: usize, tail_bound: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), tail_bound.len());
        debug_assert!(finite_through < values.len());
        Self {
            values,
            finite_through,
            tail_bound,
        }
    }

    /// All computed entries, including any beyond `finite_through`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The entries `γ_0..=γ_finite_through` that can be trusted.
    pub fn reliable(&self) -> &[f64] {
        &self.values[..=self.finite_through]
    }

    pub fn finite_through(&self) -> usize {
        self.finite_through
    }

    pub fn tail_bound(&self) -> &[f64] {
        &self.tail_bound
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }
}

/// `x_n = q_n q_{n+2} / q_{n+1}²`; `None` where `q_{n+1} = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct XnSequence {
    values: Vec<Option<f64>>,
}

impl XnSequence {
    /// Direct construction, mainly for synthetic checks of the second-order
    /// conditions.
    pub fn from_values(values: Vec<Option<f64>>) -> Result<Self> {
        for (n, v) in values.iter().enumerate() {
            if let Some(x) = v {
                if x.is_nan() || *x < 0.0 {
                    return Err(Error::InvalidParameter(format!("x_{n} = {x}")));
                }
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "NONCLASSICAL")]
    Nonclassical,
    #[serde(rename = "NO_VIOLATION_FOUND")]
    NoViolationFound,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Nonclassical => "NONCLASSICAL",
            Verdict::NoViolationFound => "NO_VIOLATION_FOUND",
        })
    }
}

/// One violated inequality `lhs >= rhs`, with `margin = lhs - rhs < 0`.
///
/// `indices` are photon numbers `n` of the entries involved, except for the
/// `local_poissonian` test whose indices label `x_n`. When the raw products
/// of a first-order or oscillation witness leave the double range, `lhs` and
/// `rhs` are both divided by the same positive factor (so `rhs = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Outcome of one test: the index window it covered (`None` when the data
/// was too short to run it) and every witness it found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRun {
    pub name: String,
    pub window: Option<(usize, usize)>,
    pub witnesses: Vec<Witness>,
}

impl TestRun {
    pub fn new(name: &str, window: Option<(usize, usize)>, mut witnesses: Vec<Witness>) -> Self {
        witnesses.sort_by(|a, b| a.indices.cmp(&b.indices));
        Self {
            name: name.to_owned(),
            window,
            witnesses,
        }
    }

    pub fn skipped(name: &str) -> Self {
        Self::new(name, None, Vec::new())
    }

    pub fn fired(&self) -> bool {
        !self.witnesses.is_empty()
    }
}

/// Verdict plus the per-test record behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub verdict: Verdict,
    pub tolerance: f64,
    pub tests: Vec<TestRun>,
}

/// Emission order of tests inside a report.
pub(crate) const TEST_ORDER: &[&str] = &[
    "zeros",
    "first_order",
    "second_order",
    "local_poissonian",
    "oscillation_q",
    "hankel_L",
    "hankel_L_shifted",
    "hankel_M",
    "hankel_M_shifted",
];

fn test_rank(name: &str) -> usize {
    TEST_ORDER
        .iter()
        .position(|t| *t == name)
        .unwrap_or(TEST_ORDER.len())
}

impl WitnessReport {
    /// Assembles a report; the verdict is NONCLASSICAL iff any test fired.
    pub fn from_runs(mut tests: Vec<TestRun>, tolerance: f64) -> Self {
        tests.sort_by(|a, b| {
            test_rank(&a.name)
                .cmp(&test_rank(&b.name))
                .then_with(|| a.name.cmp(&b.name))
        });
        let verdict = if tests.iter().any(TestRun::fired) {
            Verdict::Nonclassical
        } else {
            Verdict::NoViolationFound
        };
        Self {
            verdict,
            tolerance,
            tests,
        }
    }

    /// Order-independent union of several reports.
    pub fn merge(reports: impl IntoIterator<Item = WitnessReport>, tolerance: f64) -> Self {
        let runs = reports.into_iter().flat_map(|r| r.tests).collect();
        Self::from_runs(runs, tolerance)
    }

    pub fn is_nonclassical(&self) -> bool {
        self.verdict == Verdict::Nonclassical
    }

    /// Flattened `(test name, witness)` pairs.
    pub fn witnesses(&self) -> impl Iterator<Item = (&str, &Witness)> {
        self.tests
            .iter()
            .flat_map(|t| t.witnesses.iter().map(move |w| (t.name.as_str(), w)))
    }

    pub fn test(&self, name: &str) -> Option<&TestRun> {
        self.tests.iter().find(|t| t.name == name)
    }
}
