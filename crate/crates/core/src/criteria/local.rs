//! Local conditions: zeros, first- and second-order inequalities, local
//! Poissonian rigidity and oscillation of `q_n`.

use crate::criteria::config::TestConfig;
use crate::error::{Error, Result};
use crate::numeric::ln_factorial;
use crate::transforms::p_to_q;
use crate::types::{MomentSequence, PhotonDistribution, TestRun, Witness, WitnessReport, XnSequence};

/// `|ln|` beyond which products are reported relative to `rhs`.
const LN_REPORT_LIMIT: f64 = 700.0;

/// `(lhs, rhs)` from their logs; both divided by `rhs` if either would
/// leave the double range.
fn report_pair(ln_lhs: f64, ln_rhs: f64) -> (f64, f64) {
    let fits = |l: f64| l == f64::NEG_INFINITY || l.abs() < LN_REPORT_LIMIT;
    if fits(ln_lhs) && fits(ln_rhs) {
        (ln_lhs.exp(), ln_rhs.exp())
    } else {
        ((ln_lhs - ln_rhs).exp(), 1.0)
    }
}

fn witness(indices: Vec<usize>, lhs: f64, rhs: f64) -> Witness {
    Witness {
        indices,
        lhs,
        rhs,
        margin: lhs - rhs,
    }
}

fn single(run: TestRun, cfg: &TestConfig) -> WitnessReport {
    WitnessReport::from_runs(vec![run], cfg.psd_tol)
}

pub(crate) fn first_order_run(q: &MomentSequence, cfg: &TestConfig) -> Result<TestRun> {
    if q.len() < 3 {
        return Err(Error::WindowTooShort {
            needed: 2,
            nmax: q.nmax(),
        });
    }
    let ln_slack = (-cfg.psd_tol).ln_1p();
    let mut found = Vec::new();
    for n in 0..=q.nmax() - 2 {
        if q.is_zero(n + 1) {
            continue;
        }
        let ln_lhs = q.ln(n) + q.ln(n + 2);
        let ln_rhs = 2.0 * q.ln(n + 1);
        if ln_lhs < ln_rhs + ln_slack {
            let (lhs, rhs) = report_pair(ln_lhs, ln_rhs);
            found.push(witness(vec![n, n + 1, n + 2], lhs, rhs));
        }
    }
    Ok(TestRun::new("first_order", Some((0, q.nmax())), found))
}

/// `q_n q_{n+2} >= q_{n+1}²`, compared in log form with relative slack
/// `psd_tol`.
pub fn test_first_order(q: &MomentSequence, cfg: &TestConfig) -> Result<WitnessReport> {
    Ok(single(first_order_run(q, cfg)?, cfg))
}

pub(crate) fn zeros_run(q: &MomentSequence) -> TestRun {
    let zeros: Vec<usize> = (0..q.len()).filter(|&n| q.is_zero(n)).collect();
    let excited: Vec<usize> = (1..q.len()).filter(|&n| !q.is_zero(n)).collect();
    let mut found = Vec::new();
    if !zeros.is_empty() && !excited.is_empty() {
        // lhs: the flagged populations (exact zeros); rhs: the largest
        // excited population, which a classical state must accompany with
        // nonzero weight at every n
        let rhs = excited
            .iter()
            .map(|&n| (q.ln(n) - ln_factorial(n)).exp())
            .fold(0.0_f64, f64::max);
        found.push(witness(zeros, 0.0, rhs));
    }
    TestRun::new("zeros", Some((0, q.nmax())), found)
}

/// Fires when the state is not vacuum yet some `p_n` is zero.
pub fn test_zeros(dist: &PhotonDistribution) -> WitnessReport {
    let cfg = TestConfig::default();
    single(zeros_run(&p_to_q(dist)), &cfg)
}

/// [`test_zeros`] on a `q` sequence directly.
pub fn test_zeros_moments(q: &MomentSequence) -> WitnessReport {
    single(zeros_run(q), &TestConfig::default())
}

pub(crate) fn oscillation_run(q: &MomentSequence, cfg: &TestConfig) -> Option<TestRun> {
    if q.len() < 3 {
        return None;
    }
    let ln_slack = (-cfg.psd_tol).ln_1p();
    let mut found = Vec::new();
    for n in 1..q.nmax() {
        if q.is_zero(n) {
            continue;
        }
        let cut = q.ln(n) + ln_slack;
        if q.ln(n - 1) < cut && q.ln(n + 1) < cut {
            let (lhs, rhs) = report_pair(q.ln(n - 1) + q.ln(n + 1), 2.0 * q.ln(n));
            found.push(witness(vec![n - 1, n, n + 1], lhs, rhs));
        }
    }
    Some(TestRun::new("oscillation_q", Some((0, q.nmax())), found))
}

/// Strict interior local maxima of `q_n`. Unlike the other local tests this
/// one depends on the gauge `q_n -> a·cⁿ·q_n`; any maximum it finds is also a
/// first-order violation.
pub fn test_oscillation_q(q: &MomentSequence, cfg: &TestConfig) -> WitnessReport {
    match oscillation_run(q, cfg) {
        Some(run) => single(run, cfg),
        None => single(TestRun::skipped("oscillation_q"), cfg),
    }
}

/// An interior maximum of `p_n`; `start..=end` is the plateau it spans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMaximum {
    pub start: usize,
    pub end: usize,
    pub value: f64,
}

/// Interior local maxima of `p_n`, for plotting. Never part of a verdict:
/// classical states can oscillate in `p_n`.
pub fn detect_oscillation_p(dist: &PhotonDistribution) -> Vec<LocalMaximum> {
    const PLATEAU_TOL: f64 = 1e-12;
    let p = dist.values();
    let mut runs: Vec<LocalMaximum> = Vec::new();
    for (n, &v) in p.iter().enumerate() {
        match runs.last_mut() {
            Some(run) if (v - run.value).abs() <= PLATEAU_TOL * v.max(run.value) => {
                run.end = n;
                run.value = run.value.max(v);
            }
            _ => runs.push(LocalMaximum {
                start: n,
                end: n,
                value: v,
            }),
        }
    }
    runs.windows(3)
        .filter(|w| w[0].value < w[1].value && w[2].value < w[1].value)
        .map(|w| w[1])
        .collect()
}

pub(crate) fn second_order_run(x: &XnSequence, cfg: &TestConfig) -> Result<TestRun> {
    if x.len() < 3 {
        return Err(Error::WindowTooShort {
            needed: 4,
            nmax: x.len() + 1,
        });
    }
    let mut found = Vec::new();
    for n in 0..x.len() - 2 {
        let (Some(a), Some(b), Some(c)) = (x.get(n), x.get(n + 1), x.get(n + 2)) else {
            continue;
        };
        if b <= 0.0 {
            continue;
        }
        let lhs = (a - 1.0) * (c - 1.0);
        let rhs = ((b - 1.0) / b).powi(2);
        let scale = 1f64.max(lhs.abs()).max(rhs.abs());
        if lhs - rhs < -cfg.psd_tol * scale {
            found.push(witness((n..=n + 4).collect(), lhs, rhs));
        }
    }
    Ok(TestRun::new("second_order", Some((0, x.len() + 1)), found))
}

/// `(x_n - 1)(x_{n+2} - 1) >= ((x_{n+1} - 1)/x_{n+1})²`, skipping masked
/// entries. Witness indices are the five photon numbers `n..=n+4`.
pub fn test_second_order(x: &XnSequence, cfg: &TestConfig) -> Result<WitnessReport> {
    Ok(single(second_order_run(x, cfg)?, cfg))
}

pub(crate) fn local_poissonian_run(x: &XnSequence, cfg: &TestConfig) -> Option<TestRun> {
    if x.len() < 3 {
        return None;
    }
    let s = cfg.saturation_tol;
    let mut found = Vec::new();
    for n in 0..x.len() - 2 {
        let (Some(a), Some(b), Some(c)) = (x.get(n), x.get(n + 1), x.get(n + 2)) else {
            continue;
        };
        if b <= 0.0 {
            continue;
        }
        let (da, dc) = (a - 1.0, c - 1.0);
        // one outer entry saturated, the other its deviation bound
        let other = match (da.abs() <= s, dc.abs() <= s) {
            (true, true) => da.max(dc),
            (true, false) => dc,
            (false, true) => da,
            (false, false) => continue,
        };
        if other < 0.0 {
            continue;
        }
        let lhs = s * other;
        let rhs = ((b - 1.0) / b).powi(2);
        let scale = 1f64.max(lhs).max(rhs);
        if lhs - rhs < -cfg.psd_tol * scale {
            found.push(witness(vec![n, n + 1, n + 2], lhs, rhs));
        }
    }
    Some(TestRun::new("local_poissonian", Some((0, x.len() + 1)), found))
}

/// Saturation `x_n = 1` forces `x_{n+1} = 1` in a classical state. With
/// `x_n` only known to lie within `saturation_tol = s` of one, the
/// propagated bound is `((x_{n+1} - 1)/x_{n+1})² <= s·(x_{n+2} - 1)`, and
/// symmetrically from `x_{n+2}`. Fires where a saturated entry breaks it;
/// witness indices `[n, n+1, n+2]` label `x_n`, with `lhs = s·(x_other - 1)`
/// and `rhs = ((x_{n+1} - 1)/x_{n+1})²`.
///
/// A bare "saturated here, unsaturated there" rule is not used: a classical
/// mixture of coherent states can have `x_0 - 1` below any fixed tolerance
/// while `x_n - 1` grows geometrically.
pub fn test_local_poissonian(x: &XnSequence, cfg: &TestConfig) -> WitnessReport {
    match local_poissonian_run(x, cfg) {
        Some(run) => single(run, cfg),
        None => single(TestRun::skipped("local_poissonian"), cfg),
    }
}
