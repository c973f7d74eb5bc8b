use std::f64::consts::PI;

use crate::channels::{check_eps, AmplifierParams};
use crate::fock::{DensityMatrix, FockVector};
use crate::special::LogFactorial;
use crate::{Error, Result, C64};

use super::PhaseFunction;

/// Pegg-Barnett density of `A_kappa(rho)` on the `(s+1)`-dimensional block,
/// evaluated from the input amplitudes.
///
/// With `q = (kappa-1)/kappa`,
/// `a_{j,m} = q^{j/2} kappa^{-m/2} sqrt(C(j+m, j))` for `j + m <= s`, and
///
/// ```text
/// P(phi) = (1 / (2 pi kappa)) sum_{j=0}^{s} |sum_m psi_m a_{j,m} e^{-i m phi}|^2.
/// ```
///
/// The table `a` is built once in log space and can be shared across states
/// and angles.
#[derive(Debug, Clone)]
pub struct AmplifiedPbKernel {
    s: usize,
    kappa: f64,
    m_max: usize,
    /// Row-major `(s+1) x (m_max+1)`, zero where `j + m > s`.
    a: Vec<f64>,
}

impl AmplifiedPbKernel {
    pub fn new(s: usize, params: &AmplifierParams, m_max: usize) -> Result<Self> {
        let kappa = params.kappa();
        let m_max = m_max.min(s);
        let lf = LogFactorial::new(s + 1);
        let half_ln_q = 0.5 * (-1.0 / kappa).ln_1p();
        let half_ln_kappa = 0.5 * kappa.ln();
        let width = m_max + 1;
        let mut a = vec![0.0; (s + 1) * width];
        for j in 0..=s {
            let jq = if j == 0 { 0.0 } else { j as f64 * half_ln_q };
            for m in 0..=m_max.min(s - j) {
                let ln_a = jq + 0.5 * lf.ln_binomial(j + m, j) - half_ln_kappa * m as f64;
                let v = ln_a.exp();
                if !v.is_finite() {
                    return Err(Error::Overflow("amplified kernel coefficient"));
                }
                a[j * width + m] = v;
            }
        }
        Ok(Self { s, kappa, m_max, a })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    #[inline]
    fn row(&self, j: usize) -> &[f64] {
        let w = self.m_max + 1;
        &self.a[j * w..(j + 1) * w]
    }

    /// Density for a pure state, using amplitudes `m < limit` only.
    fn pure_sum(&self, psi: &[C64], phi: f64, limit: usize) -> Result<f64> {
        let top = psi.len().min(self.m_max + 1).min(limit);
        let phased: Vec<C64> = (0..top)
            .map(|m| psi[m] * C64::from_polar(1.0, -(m as f64) * phi))
            .collect();
        let mut total = 0.0;
        for j in 0..=self.s {
            let row = self.row(j);
            let upto = top.min(self.s - j + 1);
            let inner: C64 = (0..upto).map(|m| phased[m] * row[m]).sum();
            total += inner.norm_sqr();
        }
        finite(total / (2.0 * PI * self.kappa))
    }

    pub fn density(&self, psi: &FockVector, phi: f64) -> Result<f64> {
        self.pure_sum(psi.amplitudes(), phi, usize::MAX)
    }

    /// Same as [`density`](Self::density) with the inner sum cut to `m < d`.
    pub fn density_truncated(&self, psi: &FockVector, phi: f64, d: usize) -> Result<f64> {
        self.pure_sum(psi.amplitudes(), phi, d)
    }

    /// Density for a mixed state, linear in `rho`:
    /// `(1/(2 pi kappa)) sum_j sum_{m,n} rho_mn a_{j,m} a_{j,n} e^{i(n-m)phi}`.
    pub fn density_mixed(&self, rho: &DensityMatrix, phi: f64) -> Result<f64> {
        let top = rho.dim().min(self.m_max + 1);
        let phase: Vec<C64> = (0..top).map(|m| C64::from_polar(1.0, m as f64 * phi)).collect();
        let diagonal = rho.is_diagonal();
        let mut total = 0.0;
        for j in 0..=self.s {
            let row = self.row(j);
            let upto = top.min(self.s - j + 1);
            let mut acc = 0.0;
            for m in 0..upto {
                acc += rho.get(m, m).re * row[m] * row[m];
                if diagonal {
                    continue;
                }
                for n in m + 1..upto {
                    let z = rho.get(m, n) * phase[n] * phase[m].conj();
                    acc += 2.0 * z.re * row[m] * row[n];
                }
            }
            total += acc;
        }
        finite(total / (2.0 * PI * self.kappa))
    }

    /// `sum_t e^{i k theta_t} <theta_t|A_kappa(rho)|theta_t>` on the `s`-block.
    ///
    /// Entries of the amplified block sit on offset `n - m` of the input, so
    /// only offsets `|d| <= m_max` congruent to `-k` modulo `s+1` contribute.
    pub fn mode_expectation(&self, rho: &DensityMatrix, k: i64) -> Result<C64> {
        let top = rho.dim().min(self.m_max + 1) as i64;
        let period = self.s as i64 + 1;
        let mut d = (-k).rem_euclid(period) - period;
        let mut acc = C64::new(0.0, 0.0);
        while d < top {
            if d > -top {
                for j in 0..=self.s {
                    let row = self.row(j);
                    let upto = top.min((self.s - j + 1) as i64);
                    for m in (-d).max(0)..upto.min(upto - d) {
                        let n = m + d;
                        acc += rho.get(m as usize, n as usize) * (row[m as usize] * row[n as usize]);
                    }
                }
            }
            d += period;
        }
        let v = acc / self.kappa;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Overflow("amplified mode expectation"));
        }
        Ok(v)
    }

    /// `sum_t f(e^{i theta_t}) <theta_t|A_kappa(rho)|theta_t>`.
    pub fn expectation(&self, rho: &DensityMatrix, f: &PhaseFunction) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in f.modes() {
            acc += c * self.mode_expectation(rho, k)?;
        }
        Ok(acc)
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow("amplified Pegg-Barnett density"))
    }
}

/// Amplified Pegg-Barnett density at `kappa = 1 + s eps` for a pure state.
pub fn pb_amplified_density(psi: &FockVector, s: usize, eps: f64, phi: f64) -> Result<f64> {
    let params = AmplifierParams::linear(s, eps)?;
    AmplifiedPbKernel::new(s, &params, psi.cutoff())?.density(psi, phi)
}

/// [`pb_amplified_density`] with the inner sum restricted to `m < d`.
pub fn pb_amplified_density_truncated(psi: &FockVector, s: usize, eps: f64, phi: f64, d: usize) -> Result<f64> {
    let params = AmplifierParams::linear(s, eps)?;
    AmplifiedPbKernel::new(s, &params, psi.cutoff().min(d))?.density_truncated(psi, phi, d)
}

/// `ln (m! eps^m)^{-1/2}`.
fn ln_term(lf: &LogFactorial, m: usize, ln_eps: f64) -> f64 {
    -0.5 * (lf.get(m) + m as f64 * ln_eps)
}

/// Partial sums of `(m! eps^m)^{-1/2}` over `m` in `[lo, hi)`.
fn term_sum(eps: f64, lo: usize, hi: usize) -> f64 {
    let lf = LogFactorial::new(hi);
    let ln_eps = eps.ln();
    (lo..hi).map(|m| ln_term(&lf, m, ln_eps).exp()).sum()
}

/// `J = (f_bound / (2 pi eps)) (sum_m (m! eps^m)^{-1/2})^2`, the series stopped
/// past its peak once a term falls below `1e-16` of the running sum.
pub fn dominating_sum(eps: f64, f_bound: f64) -> Result<f64> {
    check_eps(eps)?;
    if f_bound == 0.0 {
        return Ok(0.0);
    }
    let ln_eps = eps.ln();
    let peak = (1.0 / eps).ceil() as usize;
    let mut cap = 2 * peak + 64;
    let mut lf = LogFactorial::new(cap);
    let mut sum = 0.0;
    let mut m = 0usize;
    loop {
        if m > cap {
            cap *= 2;
            lf = LogFactorial::new(cap);
        }
        let term = ln_term(&lf, m, ln_eps).exp();
        sum += term;
        if m > peak && term < 1e-16 * sum {
            break;
        }
        m += 1;
    }
    finite(f_bound / (2.0 * PI * eps) * sum * sum)
}

/// `(|I_s(phi)|, J(phi))` with `|I_s| = f_bound * P_amp(phi)`.
pub fn appendix_a_bound(eps: f64, s: usize, phi: f64, psi: &FockVector, f_bound: f64) -> Result<(f64, f64)> {
    let j = dominating_sum(eps, f_bound)?;
    if f_bound == 0.0 {
        return Ok((0.0, 0.0));
    }
    let p = pb_amplified_density(psi, s, eps, phi)?;
    Ok((f_bound * p.abs(), j))
}

/// Bound on `|P_{2d} - P_d|` between inner sums cut at `m < 2d` and `m < d`,
/// for normalized inputs:
/// `((s+1) / (2 pi kappa)) (2 A T + T^2)` with `A = sum_{m<d}` and
/// `T = sum_{d<=m<2d}` of `(m! eps^m)^{-1/2}`.
pub fn truncation_envelope(s: usize, eps: f64, d: usize) -> Result<f64> {
    let params = AmplifierParams::linear(s, eps)?;
    let a = term_sum(eps, 0, d);
    let t = term_sum(eps, d, 2 * d);
    finite((s + 1) as f64 / (2.0 * PI * params.kappa()) * (2.0 * a * t + t * t))
}
