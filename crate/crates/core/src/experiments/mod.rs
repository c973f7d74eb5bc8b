//! Scripted reproductions built on [`fock`](crate::fock),
//! [`channels`](crate::channels) and [`phase`](crate::phase).
//!
//! Every runner is deterministic for fixed inputs: Monte-Carlo samples are
//! drawn from per-index streams and reduced in index order.

mod checks;
mod figures;
mod ratio;
mod thermal;

pub use checks::{
    corollary_expectation_check, operator_attenuation_check, property_suite, CheckOutcome,
};
pub use figures::{figure1a_run, figure1b_run, Fig1aRow, Fig1bRow, FIG1B_EPS, FIG1B_S_PLUS_1, FIG1B_TERMS};
pub use ratio::{
    paul_denominator, ratio_r, ratio_with_kernel, table1_run, RatioEntry, RatioReport, TABLE1_EPS,
    TABLE1_PHI, TABLE1_S,
};
pub use thermal::{
    nonlinear_amplification_scan, thermal_pb_amplified_closed_form, thermal_pb_amplified_kappa,
    thermal_pb_amplified_limit, NonlinearRow,
};
