//! Nonclassicality tests for phase-insensitive light.
//!
//! A photon-number distribution `p_n` is classical only if the rescaled
//! moments `q_n = n! p_n` form a Stieltjes moment sequence of a nonnegative
//! measure. The tests in [`criteria`] look for violations of necessary
//! conditions on that sequence and report concrete witnesses.
//!
//! ```
//! use nonclassicality::{run_battery_moments, MomentSequence, TestConfig, Verdict};
//!
//! let q = MomentSequence::from_values(&[0.44, 0.07, 0.26, 0.30, 1.44, 3.60, 28.80]).unwrap();
//! let report = run_battery_moments(&q, &TestConfig::default()).unwrap();
//! assert_eq!(report.verdict, Verdict::Nonclassical);
//! ```

pub mod cli;
pub mod criteria;
pub mod error;
pub mod generators;
pub mod numeric;
pub mod oracle;
pub mod transforms;
pub mod types;

pub use criteria::{run_battery, run_battery_moments, run_gamma_battery, TestConfig, TestKind};
pub use error::{Error, Result};
pub use generators::{
    cat_state, coherent, coherent_mixture, fock, photon_added, thermal, CatStateSpec, CoherentMixtureSpec,
    PhotonAddedSpec,
};
pub use transforms::{p_to_gamma, p_to_q, q_to_p, q_to_x};
pub use types::{
    FactorialMomentSequence, MomentSequence, NormPolicy, PhotonDistribution, TestRun, Verdict, Witness,
    WitnessReport, XnSequence,
};
