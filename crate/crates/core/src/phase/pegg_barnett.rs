use std::f64::consts::PI;

use super::{PhaseDistribution, PhaseFunction, PhaseGrid};
use crate::fock::{continuous_phase_state, phase_angle, DensityMatrix};
use crate::special::LogFactorial;
use crate::{CMatrix, Result, C64};

/// Diagonal sums `D_d = sum_m rho_{m, m+d}` over the `s`-block, `d = 0..=min(s, N)`.
/// Negative offsets follow from Hermiticity.
fn diagonal_sums(rho: &DensityMatrix, s: usize) -> Vec<C64> {
    let dim = rho.dim().min(s + 1);
    (0..dim)
        .map(|d| (0..dim - d).map(|m| rho.get(m, m + d)).sum())
        .collect()
}

/// `sum_d D_d e^{i d phi}` with `D_{-d} = conj(D_d)`.
fn fourier_sum(sums: &[C64], phi: f64) -> f64 {
    let mut acc = sums[0].re;
    for (d, c) in sums.iter().enumerate().skip(1) {
        acc += 2.0 * (c * C64::from_polar(1.0, d as f64 * phi)).re;
    }
    acc
}

fn block_trace(rho: &DensityMatrix, s: usize) -> f64 {
    (0..rho.dim().min(s + 1)).map(|m| rho.get(m, m).re).sum()
}

/// `<theta_{t,s}|rho|theta_{t,s}>` for `t = 0..=s`. Entries of `rho` above `s`
/// lie outside the truncation and are ignored.
pub fn pb_discrete_distribution(rho: &DensityMatrix, s: usize) -> Result<Vec<f64>> {
    let sums = diagonal_sums(rho, s);
    let norm = 1.0 / (s + 1) as f64;
    Ok((0..=s)
        .map(|t| norm * fourier_sum(&sums, phase_angle(t, s)))
        .collect())
}

/// `((s+1)/2pi) <phi_s|rho|phi_s>` for the continuous phase state `|phi_s>`.
pub fn pb_continuous_density(rho: &DensityMatrix, s: usize, phi: f64) -> f64 {
    let v = continuous_phase_state(phi, s);
    let amps = v.amplitudes();
    let dim = rho.dim().min(s + 1);
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..dim {
        let mut row = C64::new(0.0, 0.0);
        for n in 0..dim {
            row += rho.get(m, n) * amps[n];
        }
        acc += amps[m].conj() * row;
    }
    (s + 1) as f64 * acc.re / (2.0 * PI)
}

/// Continuous Pegg-Barnett density on a grid. `quad_error` records the mass
/// outside the `s`-block.
pub fn pb_continuous_distribution(rho: &DensityMatrix, s: usize, grid: PhaseGrid) -> PhaseDistribution {
    let sums = diagonal_sums(rho, s);
    let density = grid.points().map(|phi| fourier_sum(&sums, phi) / (2.0 * PI)).collect();
    let missing = (1.0 - block_trace(rho, s)).max(0.0);
    PhaseDistribution::from_samples(grid, density, missing)
}

/// Sums `rho_{m,n}` along every offset `n - m` congruent to `-k` modulo `s+1`,
/// which is `sum_t e^{i k theta_t} <theta_t|rho|theta_t>`.
fn aliased_mode(rho: &DensityMatrix, s: usize, k: i64) -> C64 {
    let dim = rho.dim().min(s + 1) as i64;
    let period = s as i64 + 1;
    let mut d = (-k).rem_euclid(period) - period;
    let mut acc = C64::new(0.0, 0.0);
    while d < dim {
        if d > -dim {
            let lo = (-d).max(0);
            let hi = dim.min(dim - d);
            for m in lo..hi {
                acc += rho.get(m as usize, (m + d) as usize);
            }
        }
        d += period;
    }
    acc
}

/// `sum_t f(e^{i theta_{t,s}}) <theta_{t,s}|rho|theta_{t,s}>`, evaluated mode by mode.
pub fn pb_expectation(rho: &DensityMatrix, s: usize, f: &PhaseFunction) -> C64 {
    f.modes().map(|(k, c)| c * aliased_mode(rho, s, k)).sum()
}

/// Matrix of `sum_t f(e^{i theta_{t,s}}) |theta_{t,s}><theta_{t,s}|` on the
/// `(s+1)`-dimensional block: entry `(m, n)` collects `c_k` with
/// `k + m - n = 0 mod (s+1)`.
pub fn pb_operator(s: usize, f: &PhaseFunction) -> CMatrix {
    let period = s as i64 + 1;
    let mut out = CMatrix::zeros(s + 1, s + 1);
    for (k, c) in f.modes() {
        for m in 0..=s as i64 {
            let n = (k + m).rem_euclid(period);
            out[(m as usize, n as usize)] += c;
        }
    }
    out
}

/// Pegg-Barnett density of the coherent state `|r' e^{i psi}>` from its first
/// `terms` amplitudes: `(e^{-r'^2}/2pi) |sum_{n<terms} e^{i n (psi - phi)} r'^n / sqrt(n!)|^2`.
pub fn pb_coherent_series(r_prime: f64, psi: f64, phi: f64, terms: usize) -> f64 {
    if r_prime == 0.0 || terms == 0 {
        return if terms == 0 { 0.0 } else { 1.0 / (2.0 * PI) };
    }
    let lf = LogFactorial::new(terms);
    let ln_r = r_prime.ln();
    let half_r2 = 0.5 * r_prime * r_prime;
    let sum: C64 = (0..terms)
        .map(|n| {
            let mag = (n as f64 * ln_r - 0.5 * lf.get(n) - half_r2).exp();
            C64::from_polar(mag, n as f64 * (psi - phi))
        })
        .sum();
    sum.norm_sqr() / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{
        coherent_state, fock_basis_state, number_phase_state, pure_density, random_hs_density, thermal_state,
    };

    #[test]
    fn phase_state_is_point_mass() {
        let rho = pure_density(&number_phase_state(2, 5).unwrap());
        let p = pb_discrete_distribution(&rho, 5).unwrap();
        for (t, v) in p.iter().enumerate() {
            let want = if t == 2 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-12);
        }
        let e = pb_expectation(&rho, 5, &PhaseFunction::mode(1));
        assert!((e - C64::from_polar(1.0, phase_angle(2, 5))).norm() < 1e-12);
    }

    #[test]
    fn number_states_are_uniform() {
        for (n, s) in [(0usize, 0usize), (3, 3), (2, 9)] {
            let rho = pure_density(&fock_basis_state(n, n).unwrap());
            let p = pb_discrete_distribution(&rho, s).unwrap();
            assert!(p.iter().all(|v| (v - 1.0 / (s + 1) as f64).abs() < 1e-14));
            assert!((pb_continuous_density(&rho, s, 0.7) - 1.0 / (2.0 * PI)).abs() < 1e-14);
            // with s = 0 the only phase state sits at theta = 0
            let want = if s == 0 { 1.0 } else { 0.0 };
            assert!((pb_expectation(&rho, s, &PhaseFunction::mode(1)) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn coherent_completeness() {
        let rho = pure_density(&coherent_state(C64::new(1.0, 0.0), 40));
        let total: f64 = pb_discrete_distribution(&rho, 40).unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn continuous_matches_discrete_on_grid() {
        let rho = random_hs_density(3, 4, 11).unwrap();
        let s = 6;
        let p = pb_discrete_distribution(&rho, s).unwrap();
        for (t, pt) in p.iter().enumerate() {
            let c = pb_continuous_density(&rho, s, phase_angle(t, s));
            assert!((c - (s + 1) as f64 / (2.0 * PI) * pt).abs() < 1e-13);
        }
        let grid = PhaseGrid::new(64).unwrap();
        let dist = pb_continuous_distribution(&rho, s, grid);
        for (phi, v) in dist.rows() {
            assert!((v - pb_continuous_density(&rho, s, phi)).abs() < 1e-13);
        }
        assert!((dist.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_against_brute_force() {
        let rho = random_hs_density(4, 5, 3).unwrap();
        let f = PhaseFunction::from_coefficients(
            (0..9).map(|i| C64::new(0.1 * i as f64, -0.05 * i as f64)).collect(),
        )
        .unwrap();
        for s in [2usize, 3, 5, 8] {
            let p = pb_discrete_distribution(&rho, s).unwrap();
            let brute: C64 = p.iter().enumerate().map(|(t, pt)| f.eval(phase_angle(t, s)) * pt).sum();
            assert!((pb_expectation(&rho, s, &f) - brute).norm() < 1e-12, "s = {s}");
            let block = crate::linalg::resize(rho.entries(), s + 1);
            let via_op = crate::linalg::trace_product(&block, &pb_operator(s, &f));
            assert!((via_op - brute).norm() < 1e-12, "s = {s}");
        }
    }

    #[test]
    fn constant_gives_block_trace() {
        let rho = thermal_state(2f64.ln(), 20).unwrap();
        let e = pb_expectation(&rho, 5, &PhaseFunction::constant(C64::new(1.0, 0.0)));
        assert!((e.re - (1.0 - 0.5f64.powi(6))).abs() < 1e-14);
    }

    #[test]
    fn coherent_series() {
        assert!((pb_coherent_series(0.0, 1.0, 0.3, 100) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        let peak = pb_coherent_series(2.0, PI, PI, 100);
        assert!(peak > 1.0 / (2.0 * PI));
        assert!(peak > super::super::paul_coherent_closed_form(2.0, PI, PI));
        assert!((peak - pb_coherent_series(2.0, PI, PI, 200)).abs() < 1e-10);
        let rho = pure_density(&coherent_state(C64::from_polar(2.0, PI), 100));
        assert!((pb_continuous_density(&rho, 100, PI) - peak).abs() < 1e-6);
    }
}
