use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default relative tolerance for inequality and eigenvalue checks.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;
/// Default `|x_n - 1|` band counted as locally Poissonian.
pub const DEFAULT_SATURATION_TOL: f64 = 1e-6;
/// Hard cap on the Hankel order.
pub const HANKEL_ORDER_CAP: usize = 50;

/// The tests the battery knows how to run, in battery order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TestKind {
    Zeros,
    FirstOrder,
    SecondOrder,
    LocalPoissonian,
    OscillationQ,
    HankelQ,
    HankelGamma,
}

impl TestKind {
    pub const ALL: [TestKind; 7] = [
        TestKind::Zeros,
        TestKind::FirstOrder,
        TestKind::SecondOrder,
        TestKind::LocalPoissonian,
        TestKind::OscillationQ,
        TestKind::HankelQ,
        TestKind::HankelGamma,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TestKind::Zeros => "zeros",
            TestKind::FirstOrder => "first_order",
            TestKind::SecondOrder => "second_order",
            TestKind::LocalPoissonian => "local_poissonian",
            TestKind::OscillationQ => "oscillation_q",
            TestKind::HankelQ => "hankel_q",
            TestKind::HankelGamma => "hankel_gamma",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().replace('-', "_");
        TestKind::ALL
            .into_iter()
            .find(|k| k.as_str() == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown test '{s}'")))
    }
}

/// Tolerances and test selection for the battery.
#[derive(Debug, Clone, PartialEq)]
pub struct TestConfig {
    pub psd_tol: f64,
    /// `None` picks `floor((end - 1) / 2)` capped at [`HANKEL_ORDER_CAP`].
    pub max_hankel_order: Option<usize>,
    pub enabled_tests: BTreeSet<TestKind>,
    pub saturation_tol: f64,
}

impl Default for TestConfig {
    /// Everything except the factorial-moment Hankel test, which needs a
    /// window whose tail converges.
    fn default() -> Self {
        Self {
            psd_tol: DEFAULT_PSD_TOL,
            max_hankel_order: None,
            enabled_tests: TestKind::ALL
                .into_iter()
                .filter(|k| *k != TestKind::HankelGamma)
                .collect(),
            saturation_tol: DEFAULT_SATURATION_TOL,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.psd_tol.is_finite() && self.psd_tol > 0.0 && self.psd_tol < 1.0) {
            return Err(Error::InvalidParameter(format!("psd_tol = {}", self.psd_tol)));
        }
        if !(self.saturation_tol.is_finite() && self.saturation_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "saturation_tol = {}",
                self.saturation_tol
            )));
        }
        Ok(())
    }

    pub fn with_tests(mut self, tests: impl IntoIterator<Item = TestKind>) -> Self {
        self.enabled_tests = tests.into_iter().collect();
        self
    }

    pub fn enabled(&self, kind: TestKind) -> bool {
        self.enabled_tests.contains(&kind)
    }

    /// Largest Hankel order usable on a sequence whose last index is `end`.
    pub fn hankel_order(&self, end: usize) -> Option<usize> {
        if end < 1 {
            return None;
        }
        let window_cap = (end - 1) / 2;
        let wanted = self.max_hankel_order.unwrap_or(HANKEL_ORDER_CAP);
        Some(wanted.min(window_cap))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names() {
        assert_eq!("first-order".parse::<TestKind>().unwrap(), TestKind::FirstOrder);
        assert_eq!("hankel_gamma".parse::<TestKind>().unwrap(), TestKind::HankelGamma);
        assert!("nope".parse::<TestKind>().is_err());
    }

    #[test]
    fn default_orders() {
        let cfg = TestConfig::default();
        assert_eq!(cfg.hankel_order(6), Some(2));
        assert_eq!(cfg.hankel_order(200), Some(50));
        assert_eq!(cfg.hankel_order(0), None);
        let cfg = TestConfig {
            max_hankel_order: Some(3),
            ..TestConfig::default()
        };
        assert_eq!(cfg.hankel_order(200), Some(3));
        assert!(!TestConfig::default().enabled(TestKind::HankelGamma));
    }

    #[test]
    fn rejects_bad_tolerances() {
        let cfg = TestConfig {
            psd_tol: 0.0,
            ..TestConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = TestConfig {
            saturation_tol: -1.0,
            ..TestConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
