//! The classicality test battery.
//!
//! Every test checks a necessary condition for a nonnegative `P(I)`, so a
//! single witness proves nonclassicality while silence proves nothing.

mod battery;
mod config;
mod hankel;
mod local;

pub use battery::{run_battery, run_battery_moments, run_battery_with_moments, run_gamma_battery};
pub use config::{TestConfig, TestKind, DEFAULT_PSD_TOL, DEFAULT_SATURATION_TOL, HANKEL_ORDER_CAP};
pub use hankel::{
    build_hankel, hankel_min_eigenvalues, spectrum_bounds, test_hankel_psd, HankelPair, HankelSource,
    MomentKind,
};
pub use local::{
    detect_oscillation_p, test_first_order, test_local_poissonian, test_oscillation_q, test_second_order,
    test_zeros, test_zeros_moments, LocalMaximum,
};
