use std::f64::consts::PI;

use crate::channels::{check_eps, AmplifierParams};
use crate::fock::thermal_state;
use crate::phase::AmplifiedPbKernel;
use crate::{Error, Result};

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain("beta", beta, "must be finite and > 0"));
    }
    Ok(())
}

/// Flat PB density of `A_kappa(thermal(beta))` on the `s`-block:
/// `(1/2pi)(1 - ((e^-beta + kappa - 1)/kappa)^{s+1})`.
pub fn thermal_pb_amplified_kappa(beta: f64, s: usize, kappa: f64) -> Result<f64> {
    check_beta(beta)?;
    AmplifierParams::new(kappa)?;
    // ln((e^-beta + kappa - 1)/kappa) = ln1p((e^-beta - 1)/kappa)
    let ln_ratio = ((-beta).exp_m1() / kappa).ln_1p();
    Ok(-((s as f64 + 1.0) * ln_ratio).exp_m1() / (2.0 * PI))
}

/// [`thermal_pb_amplified_kappa`] at `kappa = 1 + s eps`.
pub fn thermal_pb_amplified_closed_form(beta: f64, s: usize, eps: f64) -> Result<f64> {
    thermal_pb_amplified_kappa(beta, s, AmplifierParams::linear(s, eps)?.kappa())
}

/// `s -> infinity` limit at fixed `eps`: `(1/2pi)(1 - e^{-(1 - e^-beta)/eps})`.
pub fn thermal_pb_amplified_limit(beta: f64, eps: f64) -> Result<f64> {
    check_beta(beta)?;
    check_eps(eps)?;
    Ok(-((-beta).exp_m1() / eps).exp_m1() / (2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearRow {
    pub s: usize,
    pub kappa: f64,
    /// `2 pi P` from the closed form.
    pub closed_form: f64,
    /// `2 pi P` from the amplified kernel, when `s <= numeric_max_s`.
    pub numeric: Option<f64>,
}

/// `2 pi P_PB(phi | A_kappa(thermal(beta)))` with `kappa = 1 + s^2 eps`.
/// The density is flat, so one angle suffices.
pub fn nonlinear_amplification_scan(
    beta: f64,
    eps: f64,
    s_list: &[usize],
    numeric_max_s: usize,
) -> Result<Vec<NonlinearRow>> {
    check_beta(beta)?;
    s_list
        .iter()
        .map(|&s| {
            let params = AmplifierParams::quadratic(s, eps)?;
            let kappa = params.kappa();
            let closed_form = 2.0 * PI * thermal_pb_amplified_kappa(beta, s, kappa)?;
            let numeric = if s <= numeric_max_s {
                // the s-block of the output only involves inputs up to s
                let rho = thermal_state(beta, s.max(1))?;
                let kernel = AmplifiedPbKernel::new(s, &params, s)?;
                Some(2.0 * PI * kernel.density_mixed(&rho, 0.0)?)
            } else {
                None
            };
            Ok(NonlinearRow {
                s,
                kappa,
                closed_form,
                numeric,
            })
        })
        .collect()
}
