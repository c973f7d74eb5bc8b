//! Quantum limited amplifier and attenuator in the number basis.
//!
//! The amplifier `A_kappa` acts on matrix elements as
//!
//! ```text
//! A_kappa(rho) = (1/kappa) sum_j ((kappa-1)/kappa)^j sum_{m,n} rho_mn kappa^{-(m+n)/2}
//!                 sqrt(C(j+m, j) C(j+n, j)) |j+m><j+n|
//! ```
//!
//! and is evaluated with every coefficient formed in log space. The
//! attenuator `E_lambda` is the pure-loss channel with Kraus operators
//! `<n-j|K_j|n> = sqrt(C(n, j)) lambda^{(n-j)/2} (1-lambda)^{j/2}`; it is tied
//! to the amplifier through `Tr[A_kappa(rho) O] = Tr[rho E_{1/kappa}(O)] / kappa`.

use crate::fock::DensityMatrix;
use crate::linalg;
use crate::special::LogFactorial;
use crate::{CMatrix, Error, Result, Warning, C64};

/// Relative size of the neglected `j` tail at which the amplifier sum stops.
const J_TAIL_TOL: f64 = 1e-14;

/// How `kappa` was derived, kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    Fixed,
    /// `kappa = 1 + s * eps`.
    Linear { s: usize, eps: f64 },
    /// `kappa = 1 + s^2 * eps`.
    Quadratic { s: usize, eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierParams {
    kappa: f64,
    schedule: Schedule,
}

impl AmplifierParams {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa >= 1.0) || !kappa.is_finite() {
            return Err(Error::domain("kappa", kappa, "must be finite and >= 1"));
        }
        Ok(Self {
            kappa,
            schedule: Schedule::Fixed,
        })
    }

    /// `kappa = 1 + s * eps`, the segmented-amplification strength.
    pub fn linear(s: usize, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        Ok(Self {
            kappa: 1.0 + s as f64 * eps,
            schedule: Schedule::Linear { s, eps },
        })
    }

    /// `kappa = 1 + s^2 * eps`.
    pub fn quadratic(s: usize, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let s2 = s as f64 * s as f64;
        Ok(Self {
            kappa: 1.0 + s2 * eps,
            schedule: Schedule::Quadratic { s, eps },
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain("eps", eps, "must be finite and > 0"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttenuatorParams {
    lambda: f64,
}

impl AttenuatorParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::domain("lambda", lambda, "must lie in [0, 1]"));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Output of [`qla_apply`].
#[derive(Debug, Clone)]
pub struct Amplified {
    /// Amplified state; its `trace_deficit` is the input deficit plus
    /// `discarded_mass`.
    pub state: DensityMatrix,
    /// Mass of the `j` terms that fell outside the output cutoff.
    pub discarded_mass: f64,
}

impl Amplified {
    pub fn warning(&self) -> Option<Warning> {
        (self.discarded_mass > Warning::DISCARDED_MASS_LIMIT)
            .then_some(Warning::DiscardedMass(self.discarded_mass))
    }
}

/// Per-`(j, m)` amplitude factor `g` with
/// `A_kappa(rho)_{j+m, j+n} = sum g(j,m) g(j,n) rho_mn`.
struct AmpFactors {
    lf: LogFactorial,
    half_ln_kappa: f64,
    half_ln_q: f64,
}

impl AmpFactors {
    fn new(kappa: f64, max_index: usize) -> Self {
        Self {
            lf: LogFactorial::new(max_index),
            half_ln_kappa: 0.5 * kappa.ln(),
            half_ln_q: 0.5 * (-1.0 / kappa).ln_1p(),
        }
    }

    #[inline]
    fn ln_g(&self, j: usize, m: usize) -> f64 {
        let jq = if j == 0 { 0.0 } else { j as f64 * self.half_ln_q };
        jq - self.half_ln_kappa * (1 + m) as f64 + 0.5 * self.lf.ln_binomial(j + m, j)
    }
}

/// Policy cutoff `ceil(kappa (N+1)) + 4 sqrt(kappa (N+1)) + 10`.
pub fn policy_out_cutoff(kappa: f64, n_in: usize) -> usize {
    let scaled = kappa * (n_in as f64 + 1.0);
    (scaled.ceil() + 4.0 * scaled.sqrt() + 10.0).ceil() as usize
}

/// Output cutoff for amplifying `rho`: the policy cutoff, extended until the
/// exactly computed mass beyond it drops below `tol`.
pub fn adequate_out_cutoff(rho: &DensityMatrix, kappa: f64, tol: f64) -> usize {
    let floor = policy_out_cutoff(kappa, rho.cutoff());
    if kappa == 1.0 {
        return floor.max(rho.cutoff());
    }
    let n_in = rho.cutoff();
    let total = rho.trace();
    let diag: Vec<(usize, f64)> = (0..=n_in)
        .map(|m| (m, rho.get(m, m).re))
        .filter(|(_, p)| *p > 0.0)
        .collect();
    let mut cap = 4 * floor + 64;
    let mut f = AmpFactors::new(kappa, cap);
    let mut acc = 0.0;
    let mut k = 0usize;
    loop {
        if k > cap {
            cap *= 2;
            f = AmpFactors::new(kappa, cap);
        }
        acc += diag
            .iter()
            .filter(|(m, _)| *m <= k)
            .map(|&(m, p)| p * (2.0 * f.ln_g(k - m, m)).exp())
            .sum::<f64>();
        if k >= floor && total - acc < tol {
            return k;
        }
        if k > 1_000_000 {
            return k;
        }
        k += 1;
    }
}

/// Applies the quantum limited amplifier, truncating the output at
/// `out_cutoff >= rho.cutoff()`.
pub fn qla_apply(rho: &DensityMatrix, params: &AmplifierParams, out_cutoff: usize) -> Result<Amplified> {
    let n_in = rho.cutoff();
    if out_cutoff < n_in {
        return Err(Error::Dimension(format!(
            "output cutoff {out_cutoff} is below the input cutoff {n_in}"
        )));
    }
    let kappa = params.kappa();
    if kappa == 1.0 {
        return Ok(Amplified {
            state: rho.with_cutoff(out_cutoff),
            discarded_mass: 0.0,
        });
    }

    let nonzero: Vec<(usize, usize, C64)> = (0..=n_in)
        .flat_map(|m| (0..=n_in).map(move |n| (m, n)))
        .map(|(m, n)| (m, n, rho.get(m, n)))
        .filter(|(_, _, v)| *v != C64::new(0.0, 0.0))
        .collect();
    let diag: Vec<(usize, f64)> = (0..=n_in).map(|m| (m, rho.get(m, m).re)).collect();

    let f = AmpFactors::new(kappa, out_cutoff + n_in + 1);
    let q = (kappa - 1.0) / kappa;
    let dim = out_cutoff + 1;
    let mut out = CMatrix::zeros(dim, dim);
    let mut g = vec![0.0; n_in + 1];
    let mut accumulated = 0.0;

    for j in 0..=out_cutoff {
        for (m, gm) in g.iter_mut().enumerate() {
            *gm = f.ln_g(j, m).exp();
        }
        for &(m, n, v) in &nonzero {
            if j + m <= out_cutoff && j + n <= out_cutoff {
                out[(j + m, j + n)] += v * (g[m] * g[n]);
            }
        }
        // j-tail bound: successive diagonal weights shrink at least by
        // q (j + 1 + N) / (j + 1) once that ratio is below one.
        let mass_j: f64 = diag.iter().map(|&(m, p)| p * g[m] * g[m]).sum();
        accumulated += mass_j;
        let ratio = q * (j + 1 + n_in) as f64 / (j + 1) as f64;
        if ratio < 1.0 && mass_j * ratio / (1.0 - ratio) < J_TAIL_TOL * accumulated {
            break;
        }
    }

    let discarded = (rho.trace() - linalg::trace(&out).re).max(0.0);
    let state = DensityMatrix::new(out, rho.trace_deficit() + discarded)?;
    Ok(Amplified {
        state,
        discarded_mass: discarded,
    })
}

/// Inverse temperature of `A_kappa(thermal(beta))`:
/// `ln(kappa / (e^-beta + kappa - 1))`.
pub fn qla_thermal_closed_form(beta: f64, kappa: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain("beta", beta, "must be finite and > 0"));
    }
    AmplifierParams::new(kappa)?;
    // ln kappa - ln(kappa - 1 + e^-beta), written to stay accurate near kappa = 1
    Ok(-((-beta).exp_m1() / kappa).ln_1p())
}

/// Applies the pure-loss channel to an arbitrary operator (not necessarily a
/// state) given on cutoff `op.nrows() - 1`.
pub fn attenuator_apply(op: &CMatrix, params: &AttenuatorParams, out_cutoff: usize) -> Result<CMatrix> {
    if op.nrows() != op.ncols() || op.nrows() == 0 {
        return Err(Error::Dimension("attenuator input must be square".into()));
    }
    let lambda = params.lambda();
    let n_in = op.nrows() - 1;
    let dim = out_cutoff + 1;
    if lambda == 1.0 {
        return Ok(linalg::resize(op, dim));
    }
    let lf = LogFactorial::new(n_in);
    let ln_l = lambda.ln();
    let ln_1ml = (-lambda).ln_1p();
    let mut out = CMatrix::zeros(dim, dim);
    for m in 0..=out_cutoff.min(n_in) {
        for n in 0..=out_cutoff.min(n_in) {
            if lambda == 0.0 && m + n > 0 {
                continue;
            }
            let base = if m + n == 0 { 0.0 } else { 0.5 * (m + n) as f64 * ln_l };
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..=(n_in - m.max(n)) {
                let v = op[(m + j, n + j)];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                let jl = if j == 0 { 0.0 } else { j as f64 * ln_1ml };
                let ln_c = 0.5 * (lf.ln_binomial(m + j, j) + lf.ln_binomial(n + j, j));
                acc += v * (base + jl + ln_c).exp();
            }
            out[(m, n)] = acc;
        }
    }
    Ok(out)
}

/// `a^dag rho a - (1/2){a a^dag, rho}` on cutoff `rho.cutoff() + 1`.
pub fn gkls_generator(rho: &DensityMatrix) -> CMatrix {
    let dim = rho.dim() + 1;
    CMatrix::from_fn(dim, dim, |m, n| {
        let mut v = C64::new(0.0, 0.0);
        if m >= 1 && n >= 1 {
            v += rho.get(m - 1, n - 1) * ((m * n) as f64).sqrt();
        }
        if m < rho.dim() && n < rho.dim() {
            v -= rho.get(m, n) * (0.5 * (m + n + 2) as f64);
        }
        v
    })
}

/// `(Tr[A_kappa(rho) obs], Tr[rho E_{1/kappa}(obs)] / kappa)`, each side
/// computed through its own channel. Both are exact on the block spanned by
/// `obs`.
pub fn dual_traces(rho: &DensityMatrix, obs: &CMatrix, kappa: f64) -> Result<(C64, C64)> {
    let params = AmplifierParams::new(kappa)?;
    let n_obs = obs.nrows().checked_sub(1).ok_or_else(|| Error::Dimension("empty observable".into()))?;
    let input = rho.with_cutoff(rho.cutoff().min(n_obs));
    let amplified = qla_apply(&input, &params, n_obs)?;
    let direct = linalg::trace_product(amplified.state.entries(), obs);

    let attenuated = attenuator_apply(obs, &AttenuatorParams::new(1.0 / kappa)?, n_obs)?;
    let dual = linalg::trace_product(rho.entries(), &attenuated) / kappa;
    Ok((direct, dual))
}

/// Real form of [`dual_traces`] for Hermitian observables.
pub fn duality_pair(rho: &DensityMatrix, obs: &CMatrix, kappa: f64) -> Result<(f64, f64)> {
    let (a, b) = dual_traces(rho, obs, kappa)?;
    Ok((a.re, b.re))
}

/// Number operator on cutoff `n`.
pub fn number_operator(cutoff: usize) -> CMatrix {
    CMatrix::from_fn(cutoff + 1, cutoff + 1, |m, n| {
        if m == n { C64::new(m as f64, 0.0) } else { C64::new(0.0, 0.0) }
    })
}
