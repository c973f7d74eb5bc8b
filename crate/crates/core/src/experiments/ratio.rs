use rayon::prelude::*;

use crate::channels::AmplifierParams;
use crate::fock::{random_hs_density_indexed, DensityMatrix};
use crate::phase::{AmplifiedPbKernel, PaulRadialModes, QuadratureConfig};
use crate::{Error, Result};

/// Default `s` values of the ratio table.
pub const TABLE1_S: [usize; 5] = [1, 10, 100, 1000, 10000];
/// Default `eps` values of the ratio table.
pub const TABLE1_EPS: [f64; 5] = [1.0, 0.5, 0.1, 0.05, 0.01];
pub const TABLE1_PHI: f64 = 0.3;

/// Denominators at or below this are rejected.
const DENOMINATOR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEntry {
    pub s: usize,
    pub eps: f64,
    pub phi: f64,
    pub mean: f64,
    /// `max_i |R_i - mean|`.
    pub max_dev: f64,
    pub n_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatioReport {
    pub entries: Vec<RatioEntry>,
}

/// Paul density of `rho` at `phi`, rejecting degenerate values.
pub fn paul_denominator(rho: &DensityMatrix, phi: f64) -> Result<f64> {
    let p = PaulRadialModes::new(rho, &QuadratureConfig::for_state(rho))?.density(phi);
    if p <= DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator { value: p, phi });
    }
    Ok(p)
}

/// `R = P_PB(phi | A_kappa(rho)) / P_Paul(phi | rho)` with a prepared kernel
/// and denominator.
pub fn ratio_with_kernel(kernel: &AmplifiedPbKernel, rho: &DensityMatrix, paul: f64, phi: f64) -> Result<f64> {
    Ok(kernel.density_mixed(rho, phi)? / paul)
}

/// `R_{s,eps}(phi)` at `kappa = 1 + s eps`.
pub fn ratio_r(rho: &DensityMatrix, s: usize, eps: f64, phi: f64) -> Result<f64> {
    let params = AmplifierParams::linear(s, eps)?;
    let kernel = AmplifiedPbKernel::new(s, &params, rho.cutoff())?;
    let paul = paul_denominator(rho, phi)?;
    ratio_with_kernel(&kernel, rho, paul, phi)
}

/// Mean and maximum deviation of `R` over Hilbert-Schmidt random qubits.
///
/// Sample `i` is the same state in every `(s, eps)` cell.
pub fn table1_run(samples: usize, seed: u64, phi: f64, s_list: &[usize], eps_list: &[f64]) -> Result<RatioReport> {
    if samples == 0 {
        return Err(Error::domain("samples", 0.0, "must be >= 1"));
    }
    let states: Vec<(DensityMatrix, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let rho = random_hs_density_indexed(2, 1, seed, i)?;
            let paul = paul_denominator(&rho, phi)?;
            Ok((rho, paul))
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(f64, usize)> = eps_list
        .iter()
        .flat_map(|&eps| s_list.iter().map(move |&s| (eps, s)))
        .collect();
    let entries = cells
        .into_par_iter()
        .map(|(eps, s)| {
            let params = AmplifierParams::linear(s, eps)?;
            let kernel = AmplifiedPbKernel::new(s, &params, 1)?;
            let ratios: Vec<f64> = states
                .iter()
                .map(|(rho, paul)| ratio_with_kernel(&kernel, rho, *paul, phi))
                .collect::<Result<_>>()?;
            let mean = ratios.iter().sum::<f64>() / samples as f64;
            let max_dev = ratios.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
            Ok(RatioEntry {
                s,
                eps,
                phi,
                mean,
                max_dev,
                n_samples: samples,
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::thermal_state;
    use std::f64::consts::PI;

    #[test]
    fn thermal_ratio() {
        let rho = thermal_state(2f64.ln(), 60).unwrap();
        for phi in [0.0, 1.1, 5.0] {
            let r = ratio_r(&rho, 100, 0.1, phi).unwrap();
            assert!((r - (1.0 - (10.5f64 / 11.0).powi(101))).abs() < 1e-8);
        }
    }

    #[test]
    fn single_sample_has_no_spread() {
        let rep = table1_run(1, 3, 0.3, &[1, 10], &[0.5]).unwrap();
        assert_eq!(rep.entries.len(), 2);
        assert!(rep.entries.iter().all(|e| e.max_dev == 0.0 && e.n_samples == 1 && e.seed == 3));
    }

    #[test]
    fn deterministic_report() {
        let a = table1_run(20, 9, 0.3, &TABLE1_S, &TABLE1_EPS).unwrap();
        let b = table1_run(20, 9, 0.3, &TABLE1_S, &TABLE1_EPS).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.entries.len(), 25);
        assert_eq!((a.entries[0].eps, a.entries[0].s), (1.0, 1));
        assert_eq!((a.entries[24].eps, a.entries[24].s), (0.01, 10000));
    }

    #[test]
    fn large_s_is_near_one() {
        let rep = table1_run(50, 1, 0.3, &[10000], &[0.1]).unwrap();
        assert!((rep.entries[0].mean - 1.0).abs() < 0.005);
    }

    #[test]
    fn degenerate_denominator() {
        // almost no weight opposite the coherent phase
        let v = crate::fock::coherent_state(crate::C64::from_polar(9.0, 0.0), 200);
        let rho = crate::fock::pure_density(&v);
        assert!(matches!(
            paul_denominator(&rho, PI),
            Err(Error::DegenerateDenominator { .. })
        ));
    }
}
