use std::f64::consts::PI;

use super::{Estimate, PhaseDistribution, PhaseFunction, QuadratureConfig};
use crate::fock::{coherent_state, DensityMatrix};
use crate::special::{erf, CompositeRule, LogFactorial};
use crate::{Result, C64};

/// `Q(alpha) = <alpha|rho|alpha>` with coherent amplitudes built in log space.
pub fn husimi_q(rho: &DensityMatrix, alpha: C64) -> f64 {
    let a = coherent_state(alpha, rho.cutoff());
    let amps = a.amplitudes();
    let mut q = C64::new(0.0, 0.0);
    for (m, am) in amps.iter().enumerate() {
        let mut row = C64::new(0.0, 0.0);
        for (n, an) in amps.iter().enumerate() {
            row += rho.get(m, n) * an;
        }
        q += am.conj() * row;
    }
    q.re
}

/// Radially integrated Fourier modes of the Husimi function.
///
/// Writing `Q(r e^{i phi}) = sum_d c_d(r) e^{i d phi}` with
/// `c_d(r) = sum_m rho_{m,m+d} u_m(r) u_{m+d}(r)` and
/// `u_n(r) = e^{-r^2/2} r^n / sqrt(n!)`, the Paul density is
/// `P(phi) = C_0 + 2 Re sum_{d>0} C_d e^{i d phi}` with
/// `C_d = (1/pi) int_0^{r_max} r c_d(r) dr`. The radial integral is done once
/// per mode by composite Gauss-Legendre, after which any angle costs `O(N)`.
#[derive(Debug, Clone)]
pub struct PaulRadialModes {
    modes: Vec<C64>,
    tail_bound: f64,
}

impl PaulRadialModes {
    pub fn new(rho: &DensityMatrix, cfg: &QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        let dim = rho.dim();
        let lf = LogFactorial::new(dim);
        let rule = CompositeRule::new(0.0, cfg.r_max, cfg.panels(), super::PANEL_ORDER);
        let mut modes = vec![C64::new(0.0, 0.0); dim];
        let mut u = vec![0.0; dim];
        for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
            let ln_r = r.ln();
            for (n, un) in u.iter_mut().enumerate() {
                *un = (-0.5 * r * r + n as f64 * ln_r - 0.5 * lf.get(n)).exp();
            }
            let rw = r * w / PI;
            for (d, mode) in modes.iter_mut().enumerate() {
                let mut c = C64::new(0.0, 0.0);
                for m in 0..dim - d {
                    c += rho.get(m, m + d) * (u[m] * u[m + d]);
                }
                *mode += c * rw;
            }
        }
        let n_eff = rho.photon_quantile(1e-10) as f64;
        Ok(Self {
            modes,
            tail_bound: radial_tail_bound(n_eff, cfg.r_max),
        })
    }

    pub fn density(&self, phi: f64) -> f64 {
        let mut p = self.modes[0].re;
        for (d, c) in self.modes.iter().enumerate().skip(1) {
            p += 2.0 * (c * C64::from_polar(1.0, d as f64 * phi)).re;
        }
        p
    }

    /// Bound on the neglected radial tail beyond `r_max`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }
}

/// For `r >= sqrt(N)`, `e^{-r^2} r^{2n} / n! <= e^{-(r - sqrt(N))^2}` for all
/// `n <= N`, so `|Q| <= (N+1)^2 e^{-(r - sqrt N)^2}`; integrating `r |Q| / pi`
/// beyond `r_max` gives the bound below (with `erfc(x) <= e^{-x^2}`).
fn radial_tail_bound(n_eff: f64, r_max: f64) -> f64 {
    let root = n_eff.sqrt();
    if r_max <= root {
        return f64::INFINITY;
    }
    let x = r_max - root;
    (n_eff + 1.0).powi(2) / PI * (0.5 + 0.5 * (PI * n_eff).sqrt()) * (-x * x).exp()
}

/// Paul density at a single angle.
pub fn paul_density_at(rho: &DensityMatrix, phi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(PaulRadialModes::new(rho, cfg)?.density(phi))
}

/// Paul distribution on the configured grid.
pub fn paul_distribution(rho: &DensityMatrix, cfg: &QuadratureConfig) -> Result<PhaseDistribution> {
    let modes = PaulRadialModes::new(rho, cfg)?;
    let grid = cfg.grid();
    let density = grid.points().map(|phi| modes.density(phi)).collect();
    Ok(PhaseDistribution::from_samples(
        grid,
        density,
        modes.tail_bound() + rho.trace_deficit(),
    ))
}

/// Paul distribution of the coherent state `|r' e^{i psi}>`:
/// `(e^{-r'^2} / 2 pi) (1 + sqrt(pi) x e^{x^2} (erf(x) + 1))`,
/// `x = r' cos(phi - psi)`.
pub fn paul_coherent_closed_form(r_prime: f64, psi: f64, phi: f64) -> f64 {
    let x = r_prime * (phi - psi).cos();
    let tail = if x == 0.0 {
        0.0
    } else {
        PI.sqrt() * x * (x * x - r_prime * r_prime).exp() * (erf(x) + 1.0)
    };
    ((-r_prime * r_prime).exp() + tail) / (2.0 * PI)
}

/// `sum_i f(e^{i phi_i}) P_Paul(phi_i) dphi`.
pub fn paul_expectation(rho: &DensityMatrix, f: &PhaseFunction, cfg: &QuadratureConfig) -> Result<Estimate> {
    let dist = paul_distribution(rho, cfg)?;
    let dphi = dist.grid.spacing();
    let value = dist
        .rows()
        .map(|(phi, p)| f.eval(phi) * (p * dphi))
        .sum::<C64>();
    Ok(Estimate {
        value,
        error: dist.quad_error * f.bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, fock_basis_state, pure_density, random_hs_density, thermal_state};

    /// Independent route: `int_0^inf r^{1+m+n} e^{-r^2} dr = Gamma((m+n)/2 + 1) / 2`, so
    /// `P(phi) = (1/2pi) sum rho_mn e^{i(n-m)phi} Gamma((m+n)/2+1) / sqrt(m! n!)`.
    fn paul_oracle(rho: &DensityMatrix, phi: f64) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for m in 0..rho.dim() {
            for n in 0..rho.dim() {
                let ln_c = libm::lgamma((m + n) as f64 / 2.0 + 1.0)
                    - 0.5 * (libm::lgamma(m as f64 + 1.0) + libm::lgamma(n as f64 + 1.0));
                acc += rho.get(m, n) * C64::from_polar(ln_c.exp(), (n as f64 - m as f64) * phi);
            }
        }
        acc.re / (2.0 * PI)
    }

    #[test]
    fn husimi_vacuum() {
        let vac = pure_density(&fock_basis_state(0, 4).unwrap());
        assert!((husimi_q(&vac, C64::new(1.0, 0.0)) - (-1.0f64).exp()).abs() < 1e-15);
        let rho = random_hs_density(3, 3, 4).unwrap();
        assert!((husimi_q(&rho, C64::new(0.0, 0.0)) - rho.get(0, 0).re).abs() < 1e-15);
    }

    #[test]
    fn husimi_of_coherent_state() {
        let (rp, psi) = (1.3, 0.4);
        let rho = pure_density(&coherent_state(C64::from_polar(rp, psi), 50));
        for &(r, phi) in &[(0.0, 0.0), (1.0, 0.4), (2.0, 2.0), (0.5, -1.0)] {
            let exact = (-r * r - rp * rp + 2.0 * r * rp * (phi - psi as f64).cos()).exp();
            assert!((husimi_q(&rho, C64::from_polar(r, phi)) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn paul_matches_gamma_oracle() {
        for seed in 0..5 {
            let rho = random_hs_density(5, 6, seed).unwrap();
            let cfg = QuadratureConfig::for_state(&rho);
            let modes = PaulRadialModes::new(&rho, &cfg).unwrap();
            for phi in [0.0, 0.3, 1.7, 4.0] {
                assert!((modes.density(phi) - paul_oracle(&rho, phi)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn thermal_paul_is_flat() {
        let rho = thermal_state(2f64.ln(), 45).unwrap();
        let dist = paul_distribution(&rho, &QuadratureConfig::for_state(&rho)).unwrap();
        assert!(dist.density.iter().all(|p| (p - 1.0 / (2.0 * PI)).abs() < 1e-8));
        assert!((dist.integral() - 1.0).abs() < 1e-6 + dist.quad_error);
    }

    #[test]
    fn number_states_are_flat() {
        for n in [0usize, 1, 5] {
            let rho = pure_density(&fock_basis_state(n, n).unwrap());
            let dist = paul_distribution(&rho, &QuadratureConfig::for_state(&rho).with_grid(32)).unwrap();
            assert!(dist.density.iter().all(|p| (p - 1.0 / (2.0 * PI)).abs() < 1e-12));
        }
    }

    #[test]
    fn coherent_closed_form_values() {
        assert!((paul_coherent_closed_form(0.0, 1.0, 2.0) - 1.0 / (2.0 * PI)).abs() < 1e-16);
        // (e^-4 / 2pi)(1 + 2 sqrt(pi) e^4 (erf 2 + 1)), erf 2 = 0.9953222650189527
        let direct = ((-4.0f64).exp() + 2.0 * PI.sqrt() * (1.0 + 0.995_322_265_018_952_7)) / (2.0 * PI);
        let v = paul_coherent_closed_form(2.0, PI, PI);
        assert!((v - direct).abs() < 1e-14);
        assert!((v - 1.1287).abs() < 1e-4);
        let g = super::super::PhaseGrid::new(512).unwrap();
        let total: f64 = g.points().map(|p| paul_coherent_closed_form(2.0, PI, p)).sum::<f64>() * g.spacing();
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coherent_quadrature_matches_closed_form() {
        let rho = pure_density(&coherent_state(C64::from_polar(2.0, PI), 40));
        let dist = paul_distribution(&rho, &QuadratureConfig::for_state(&rho).with_grid(64)).unwrap();
        for (phi, p) in dist.rows() {
            assert!((p - paul_coherent_closed_form(2.0, PI, phi)).abs() < 1e-10);
        }
        assert!(dist.warning().is_none());
    }

    #[test]
    fn expectations() {
        let rho = random_hs_density(2, 1, 9).unwrap();
        let cfg = QuadratureConfig::for_state(&rho);
        let one = paul_expectation(&rho, &PhaseFunction::constant(C64::new(1.0, 0.0)), &cfg).unwrap();
        assert!((one.value - C64::new(1.0, 0.0)).norm() < 1e-8);

        let th = thermal_state(2f64.ln(), 45).unwrap();
        let e1 = paul_expectation(&th, &PhaseFunction::mode(1), &QuadratureConfig::for_state(&th)).unwrap();
        assert!(e1.value.norm() < 1e-8);

        let co = pure_density(&coherent_state(C64::from_polar(2.0, PI), 40));
        let e1 = paul_expectation(&co, &PhaseFunction::mode(1), &QuadratureConfig::for_state(&co)).unwrap();
        assert!((e1.value.arg().abs() - PI).abs() < 1e-3);
    }
}
