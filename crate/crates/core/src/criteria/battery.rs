use crate::criteria::config::{TestConfig, TestKind};
use crate::criteria::hankel::{build_hankel, hankel_runs, HankelSource};
use crate::criteria::local::{
    first_order_run, local_poissonian_run, oscillation_run, second_order_run, zeros_run,
};
use crate::error::Result;
use crate::transforms::{p_to_gamma, p_to_q, q_to_x};
use crate::types::{FactorialMomentSequence, MomentSequence, PhotonDistribution, TestRun, WitnessReport};

fn hankel_or_skip<S: HankelSource + ?Sized>(
    s: &S,
    end: Option<usize>,
    names: [&str; 2],
    cfg: &TestConfig,
) -> Vec<TestRun> {
    end.and_then(|e| cfg.hankel_order(e))
        .and_then(|order| build_hankel(s, order).ok())
        .map(|pair| hankel_runs(&pair, cfg))
        .unwrap_or_else(|| names.iter().map(|n| TestRun::skipped(n)).collect())
}

fn moment_runs(q: &MomentSequence, cfg: &TestConfig) -> Vec<TestRun> {
    let mut runs = Vec::new();
    if cfg.enabled(TestKind::Zeros) {
        runs.push(zeros_run(q));
    }
    if cfg.enabled(TestKind::FirstOrder) {
        runs.push(first_order_run(q, cfg).unwrap_or_else(|_| TestRun::skipped("first_order")));
    }
    let x = q_to_x(q).ok();
    if cfg.enabled(TestKind::SecondOrder) {
        runs.push(
            x.as_ref()
                .and_then(|x| second_order_run(x, cfg).ok())
                .unwrap_or_else(|| TestRun::skipped("second_order")),
        );
    }
    if cfg.enabled(TestKind::LocalPoissonian) {
        runs.push(
            x.as_ref()
                .and_then(|x| local_poissonian_run(x, cfg))
                .unwrap_or_else(|| TestRun::skipped("local_poissonian")),
        );
    }
    if cfg.enabled(TestKind::OscillationQ) {
        runs.push(oscillation_run(q, cfg).unwrap_or_else(|| TestRun::skipped("oscillation_q")));
    }
    if cfg.enabled(TestKind::HankelQ) {
        runs.extend(hankel_or_skip(
            q,
            Some(q.nmax()),
            ["hankel_L", "hankel_L_shifted"],
            cfg,
        ));
    }
    runs
}

/// Runs every enabled test on a photon-number window and merges the
/// witnesses. Tests the window is too short for are listed with no window.
pub fn run_battery(dist: &PhotonDistribution, cfg: &TestConfig) -> Result<WitnessReport> {
    run_battery_with_moments(&p_to_q(dist), Some(dist), cfg)
}

/// As [`run_battery`] for data supplied as `q_n`. The factorial-moment test
/// is skipped since it needs `p_n`.
pub fn run_battery_moments(q: &MomentSequence, cfg: &TestConfig) -> Result<WitnessReport> {
    run_battery_with_moments(q, None, cfg)
}

/// Battery on `q` with the distribution it came from, when known; used when
/// `q` is read natively but `p` is also available.
pub fn run_battery_with_moments(
    q: &MomentSequence,
    dist: Option<&PhotonDistribution>,
    cfg: &TestConfig,
) -> Result<WitnessReport> {
    cfg.validate()?;
    let mut runs = moment_runs(q, cfg);
    if cfg.enabled(TestKind::HankelGamma) {
        let gamma = dist.and_then(|d| p_to_gamma(d, d.nmax()).ok());
        match gamma {
            Some(g) => runs.extend(gamma_runs(&g, cfg)),
            None => runs.extend(["hankel_M", "hankel_M_shifted"].map(TestRun::skipped)),
        }
    }
    Ok(WitnessReport::from_runs(runs, cfg.psd_tol))
}

fn gamma_runs(g: &FactorialMomentSequence, cfg: &TestConfig) -> Vec<TestRun> {
    hankel_or_skip(g, Some(g.finite_through()), ["hankel_M", "hankel_M_shifted"], cfg)
}

/// `M`/`M̃` positivity on factorial moments; the only test available for
/// data given as `γ_n`.
pub fn run_gamma_battery(g: &FactorialMomentSequence, cfg: &TestConfig) -> Result<WitnessReport> {
    cfg.validate()?;
    Ok(WitnessReport::from_runs(gamma_runs(g, cfg), cfg.psd_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{fock, thermal};
    use crate::types::Verdict;

    #[test]
    fn schiller_battery() {
        let q = MomentSequence::from_values(&[0.44, 0.07, 0.26, 0.30, 1.44, 3.60, 28.80]).unwrap();
        let r = run_battery_moments(&q, &TestConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Nonclassical);
        for name in ["first_order", "second_order", "hankel_L_shifted"] {
            assert!(r.test(name).unwrap().fired(), "{name}");
        }
        assert_eq!(r.test("hankel_L").unwrap().window, Some((0, 4)));
        assert_eq!(r.test("hankel_L_shifted").unwrap().window, Some((1, 5)));
    }

    #[test]
    fn thermal_is_quiet() {
        let d = thermal(2.0, 60).unwrap();
        let cfg = TestConfig::default().with_tests(crate::criteria::TestKind::ALL);
        let r = run_battery(&d, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::NoViolationFound, "{r:#?}");
    }

    #[test]
    fn fock_one_via_zeros() {
        let r = run_battery(&fock(1, 6).unwrap(), &TestConfig::default()).unwrap();
        assert!(r.test("zeros").unwrap().fired());
    }

    #[test]
    fn vacuum_runs_only_what_fits() {
        let d = PhotonDistribution::new(vec![1.0], crate::types::NormPolicy::Exact, 0.0).unwrap();
        let r = run_battery(&d, &TestConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NoViolationFound);
        assert_eq!(r.test("zeros").unwrap().window, Some((0, 0)));
        assert_eq!(r.test("first_order").unwrap().window, None);
        assert_eq!(r.test("hankel_L").unwrap().window, None);
    }

    #[test]
    fn gamma_battery_flags_shifted_block() {
        let g = FactorialMomentSequence::from_values(vec![1.0, 1.0, 2.0, 3.0]).unwrap();
        let r = run_gamma_battery(&g, &TestConfig::default()).unwrap();
        assert!(!r.test("hankel_M").unwrap().fired());
        assert_eq!(
            r.test("hankel_M_shifted").unwrap().witnesses[0].indices,
            vec![1, 2, 3]
        );
    }
}
