use rayon::prelude::*;

use crate::channels::AmplifierParams;
use crate::fock::{coherent_state, pure_density};
use crate::phase::{
    paul_coherent_closed_form, pb_coherent_series, AmplifiedPbKernel, PaulRadialModes, PhaseGrid,
    QuadratureConfig,
};
use crate::{Error, Result, C64};

pub const FIG1B_S_PLUS_1: [usize; 3] = [100, 1000, 10000];
pub const FIG1B_EPS: f64 = 0.01;
/// Coherent amplitudes kept in the amplified evaluation.
pub const FIG1B_TERMS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig1aRow {
    pub r_prime: f64,
    pub phi: f64,
    pub paul: f64,
    pub pb: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig1bRow {
    pub s_plus_1: usize,
    pub t: usize,
    pub phi: f64,
    pub ratio: f64,
}

/// Paul and Pegg-Barnett densities of `|r' e^{i psi}>` over a grid, one block
/// of rows per `r'`.
pub fn figure1a_run(r_prime_list: &[f64], psi: f64, grid: PhaseGrid, terms: usize) -> Result<Vec<Fig1aRow>> {
    if terms == 0 {
        return Err(Error::domain("terms", 0.0, "must be >= 1"));
    }
    if let Some(&r) = r_prime_list.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        return Err(Error::domain("r_prime", r, "must be finite and >= 0"));
    }
    Ok(r_prime_list
        .iter()
        .flat_map(|&r_prime| {
            grid.points().map(move |phi| Fig1aRow {
                r_prime,
                phi,
                paul: paul_coherent_closed_form(r_prime, psi, phi),
                pb: pb_coherent_series(r_prime, psi, phi, terms),
            })
        })
        .collect())
}

/// `R` for the coherent state `|r' e^{i psi}>` (first `terms` amplitudes) at
/// `phi = 2 pi t / 10`, for each dimension `s + 1`.
pub fn figure1b_run(
    r_prime: f64,
    psi: f64,
    eps: f64,
    s_plus_1_list: &[usize],
    t_list: &[usize],
    terms: usize,
) -> Result<Vec<Fig1bRow>> {
    if terms == 0 {
        return Err(Error::domain("terms", 0.0, "must be >= 1"));
    }
    let v = coherent_state(C64::from_polar(r_prime, psi), terms - 1);
    let rho = pure_density(&v);
    let paul = PaulRadialModes::new(&rho, &QuadratureConfig::for_state(&rho))?;
    let blocks = s_plus_1_list
        .par_iter()
        .map(|&sp1| {
            let s = sp1
                .checked_sub(1)
                .ok_or(Error::domain("s_plus_1", 0.0, "must be >= 1"))?;
            let kernel = AmplifiedPbKernel::new(s, &AmplifierParams::linear(s, eps)?, terms - 1)?;
            t_list
                .iter()
                .map(|&t| {
                    let phi = 2.0 * std::f64::consts::PI * t as f64 / 10.0;
                    let denom = paul.density(phi);
                    if denom <= 1e-12 {
                        return Err(Error::DegenerateDenominator { value: denom, phi });
                    }
                    Ok(Fig1bRow {
                        s_plus_1: sp1,
                        t,
                        phi,
                        ratio: kernel.density(&v, phi)? / denom,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(blocks.into_iter().flatten().collect())
}
