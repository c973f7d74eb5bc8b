//! States and density matrices on the truncated number basis `|0>, ..., |N>`.
//!
//! Constructors never renormalize: probability that falls beyond the cutoff
//! is recorded as `tail_mass` (pure states) or `trace_deficit` (density
//! matrices) so downstream error budgets can account for it.

mod spec;

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg;
use crate::special::LogFactorial;
use crate::{CMatrix, Error, Result, Warning, C64};

pub use spec::{PreparedState, StateSpec};

/// Tolerance on `sum |psi_m|^2 + tail_mass` for constructed states.
pub const NORM_TOL: f64 = 1e-10;
/// Entrywise Hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as "positive".
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Pure-state amplitudes `psi_m`, `m = 0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<C64>,
    tail_mass: f64,
}

impl FockVector {
    /// Wraps raw amplitudes. All entries must be finite.
    pub fn new(amplitudes: Vec<C64>, tail_mass: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Dimension("a Fock vector needs at least one amplitude".into()));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Overflow("Fock amplitudes"));
        }
        if !(tail_mass >= 0.0) {
            return Err(Error::domain("tail_mass", tail_mass, "must be >= 0"));
        }
        Ok(Self {
            amplitudes,
            tail_mass,
        })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>` over the common support.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn warning(&self) -> Option<Warning> {
        (self.tail_mass > Warning::TAIL_MASS_LIMIT).then_some(Warning::TailMass(self.tail_mass))
    }
}

/// Density matrix `rho_mn = <m|rho|n>` on the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    trace_deficit: f64,
}

impl DensityMatrix {
    /// Wraps a matrix without checking state invariants; see [`Self::validate`].
    pub fn new(entries: CMatrix, trace_deficit: f64) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(Error::Dimension(format!(
                "density matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Overflow("density matrix entries"));
        }
        Ok(Self {
            entries,
            trace_deficit: trace_deficit.max(0.0),
        })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn cutoff(&self) -> usize {
        self.entries.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.entries[(m, n)]
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.entries).re
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.entries, &self.entries).re
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.entries[(i, j)] == C64::new(0.0, 0.0)))
    }

    /// Same state embedded in (or cropped to) a different cutoff. Cropping
    /// adds the dropped diagonal mass to the deficit.
    pub fn with_cutoff(&self, cutoff: usize) -> DensityMatrix {
        let dropped: f64 = (cutoff + 1..self.dim()).map(|k| self.entries[(k, k)].re).sum();
        DensityMatrix {
            entries: linalg::resize(&self.entries, cutoff + 1),
            trace_deficit: self.trace_deficit + dropped.max(0.0),
        }
    }

    /// Smallest photon number `n` such that the diagonal mass up to `n`
    /// reaches `(1 - tol)` of the trace.
    pub fn photon_quantile(&self, tol: f64) -> usize {
        let total = self.trace();
        let target = (1.0 - tol) * total;
        let mut acc = 0.0;
        for n in 0..self.dim() {
            acc += self.entries[(n, n)].re;
            if acc >= target {
                return n;
            }
        }
        self.cutoff()
    }

    /// Checks Hermiticity, the trace window and positivity.
    pub fn validate(&self) -> Result<()> {
        let defect = linalg::hermiticity_defect(&self.entries);
        if defect > HERMITIAN_TOL {
            return Err(Error::domain("hermiticity defect", defect, "exceeds 1e-12"));
        }
        let tr = self.trace();
        if tr < 1.0 - self.trace_deficit - NORM_TOL || tr > 1.0 + NORM_TOL {
            return Err(Error::domain("trace", tr, "outside [1 - deficit, 1]"));
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::domain("smallest eigenvalue", min, "below -1e-10"));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.entries)
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    /// Decomposes the state into weighted pure components. Diagonal matrices
    /// split into number states; anything else goes through an
    /// eigen-decomposition. Components with weight below `1e-15` are dropped.
    pub fn pure_components(&self) -> Vec<(f64, FockVector)> {
        let dim = self.dim();
        if self.is_diagonal() {
            return (0..dim)
                .filter_map(|n| {
                    let w = self.entries[(n, n)].re;
                    (w > 1e-15).then(|| {
                        let mut amps = vec![C64::new(0.0, 0.0); dim];
                        amps[n] = C64::new(1.0, 0.0);
                        (w, FockVector { amplitudes: amps, tail_mass: 0.0 })
                    })
                })
                .collect();
        }
        linalg::hermitian_eigen(&self.entries)
            .into_iter()
            .filter(|(w, _)| *w > 1e-15)
            .map(|(w, v)| (w, FockVector { amplitudes: v, tail_mass: 0.0 }))
            .collect()
    }
}

/// Coherent state `|alpha>` truncated at `cutoff`.
///
/// Amplitudes are built as `exp(log-magnitude) * unit phase` with
/// `ln|alpha_m| = -|alpha|^2/2 + m ln|alpha| - ln(m!)/2`.
pub fn coherent_state(alpha: C64, cutoff: usize) -> FockVector {
    let lf = LogFactorial::new(cutoff);
    let r = alpha.norm();
    let theta = alpha.arg();
    let ln_r = r.ln();
    let mut amplitudes = Vec::with_capacity(cutoff + 1);
    for m in 0..=cutoff {
        let amp = if r == 0.0 {
            if m == 0 { 1.0 } else { 0.0 }
        } else {
            (-0.5 * r * r + m as f64 * ln_r - 0.5 * lf.get(m)).exp()
        };
        amplitudes.push(C64::from_polar(amp, m as f64 * theta));
    }
    let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    FockVector {
        amplitudes,
        tail_mass: (1.0 - norm).max(0.0),
    }
}

pub fn fock_basis_state(n: usize, cutoff: usize) -> Result<FockVector> {
    if n > cutoff {
        return Err(Error::IndexOutOfRange { index: n, cutoff });
    }
    let mut amplitudes = vec![C64::new(0.0, 0.0); cutoff + 1];
    amplitudes[n] = C64::new(1.0, 0.0);
    Ok(FockVector {
        amplitudes,
        tail_mass: 0.0,
    })
}

/// Truncated Gibbs state `(1 - e^-beta) e^{-beta n}`, `n <= cutoff`.
pub fn thermal_state(beta: f64, cutoff: usize) -> Result<DensityMatrix> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain("beta", beta, "must be finite and > 0"));
    }
    let p0 = -(-beta).exp_m1();
    let entries = CMatrix::from_fn(cutoff + 1, cutoff + 1, |m, n| {
        if m == n {
            C64::new(p0 * (-beta * n as f64).exp(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(DensityMatrix {
        entries,
        trace_deficit: (-beta * (cutoff as f64 + 1.0)).exp(),
    })
}

/// Hilbert-Schmidt random state `G G^dag / Tr(G G^dag)` for a `dim x dim`
/// complex Ginibre matrix, embedded at the top-left of the cutoff space.
pub fn random_hs_density(dim: usize, cutoff: usize, seed: u64) -> Result<DensityMatrix> {
    random_hs_density_indexed(dim, cutoff, seed, 0)
}

/// Sample `index` of the seeded Hilbert-Schmidt stream.
///
/// Each index selects its own ChaCha20 stream under the shared seed, so the
/// draw for a given index does not depend on which other indices were
/// evaluated or in which order.
pub fn random_hs_density_indexed(
    dim: usize,
    cutoff: usize,
    seed: u64,
    index: u64,
) -> Result<DensityMatrix> {
    if dim == 0 || dim > cutoff + 1 {
        return Err(Error::IndexOutOfRange {
            index: dim,
            cutoff: cutoff + 1,
        });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let ginibre = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(scale * re, scale * im)
    });
    let mut gg = &ginibre * ginibre.adjoint();
    let tr = linalg::trace(&gg).re;
    gg /= C64::new(tr, 0.0);
    // exact Hermiticity
    for i in 0..dim {
        gg[(i, i)].im = 0.0;
        for j in 0..i {
            let v = 0.5 * (gg[(i, j)] + gg[(j, i)].conj());
            gg[(i, j)] = v;
            gg[(j, i)] = v.conj();
        }
    }
    Ok(DensityMatrix {
        entries: linalg::resize(&gg, cutoff + 1),
        trace_deficit: 0.0,
    })
}

/// `|psi><psi|` carrying the vector's tail mass as trace deficit.
pub fn pure_density(psi: &FockVector) -> DensityMatrix {
    let a = &psi.amplitudes;
    let dim = a.len();
    DensityMatrix {
        entries: CMatrix::from_fn(dim, dim, |m, n| a[m] * a[n].conj()),
        trace_deficit: psi.tail_mass,
    }
}

/// Phase angle `theta_{t,s} = 2 pi t / (s + 1)`.
pub fn phase_angle(t: usize, s: usize) -> f64 {
    2.0 * PI * t as f64 / (s as f64 + 1.0)
}

/// Number-phase state `|theta_{t,s}>` on the `(s + 1)`-dimensional block.
pub fn number_phase_state(t: usize, s: usize) -> Result<FockVector> {
    if t > s {
        return Err(Error::IndexOutOfRange { index: t, cutoff: s });
    }
    Ok(phase_vector(phase_angle(t, s), s))
}

/// Continuous phase state `|phi_s>`; `phi` is reduced modulo `2 pi`.
pub fn continuous_phase_state(phi: f64, s: usize) -> FockVector {
    phase_vector(phi.rem_euclid(2.0 * PI), s)
}

fn phase_vector(phi: f64, s: usize) -> FockVector {
    let norm = 1.0 / ((s + 1) as f64).sqrt();
    let amplitudes = (0..=s)
        .map(|n| C64::from_polar(norm, n as f64 * phi))
        .collect();
    FockVector {
        amplitudes,
        tail_mass: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_coherent_state() {
        let v = coherent_state(C64::new(0.0, 0.0), 5);
        assert_eq!(v.amplitudes()[0], C64::new(1.0, 0.0));
        assert!(v.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
        assert_eq!(v.tail_mass(), 0.0);
    }

    #[test]
    fn coherent_ground_amplitude() {
        let v = coherent_state(C64::new(1.0, 0.0), 30);
        assert_relative_eq!(v.amplitudes()[0].re, (-0.5f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn coherent_norm_matches_poisson_partial_sum() {
        let v = coherent_state(C64::from_polar(2.0, PI), 40);
        // independent: Poisson(4) weights by recurrence
        let mut w = (-4.0f64).exp();
        let mut sum = w;
        for m in 1..=40 {
            w *= 4.0 / m as f64;
            sum += w;
        }
        assert!((v.norm_sqr() - sum).abs() < 1e-12);
        assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(v.warning().is_none());
    }

    #[test]
    fn coherent_truncation_warns() {
        let v = coherent_state(C64::new(3.0, 0.0), 5);
        assert!(v.tail_mass() > 1e-2);
        assert!(matches!(v.warning(), Some(Warning::TailMass(_))));
        assert!((v.norm_sqr() + v.tail_mass() - 1.0).abs() < NORM_TOL);
    }

    #[test]
    fn basis_states() {
        let v = fock_basis_state(0, 3).unwrap();
        assert_eq!(v.amplitudes().len(), 4);
        assert_eq!(v.amplitudes()[0].re, 1.0);
        let v = fock_basis_state(2, 2).unwrap();
        assert_eq!(v.amplitudes()[2].re, 1.0);
        assert_eq!(
            fock_basis_state(3, 2),
            Err(Error::IndexOutOfRange { index: 3, cutoff: 2 })
        );
    }

    #[test]
    fn thermal_geometric_weights() {
        let rho = thermal_state(2f64.ln(), 10).unwrap();
        for n in 0..=10 {
            assert_relative_eq!(rho.get(n, n).re, 0.5f64.powi(n as i32 + 1), max_relative = 1e-14);
            for m in 0..=10 {
                if m != n {
                    assert_eq!(rho.get(m, n), C64::new(0.0, 0.0));
                }
            }
        }
        assert_relative_eq!(rho.trace_deficit(), 2f64.powi(-11), max_relative = 1e-14);
        rho.validate().unwrap();
    }

    #[test]
    fn cold_thermal_is_vacuum() {
        let rho = thermal_state(50.0, 5).unwrap();
        assert!((rho.get(0, 0).re - 1.0).abs() < 1e-20);
        assert!(rho.get(1, 1).re < 1e-21);
    }

    #[test]
    fn thermal_rejects_nonpositive_beta() {
        assert!(thermal_state(0.0, 3).is_err());
        assert!(thermal_state(-1.0, 3).is_err());
    }

    #[test]
    fn hs_qubit_is_a_state() {
        for seed in 0..20 {
            let rho = random_hs_density(2, 4, seed).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert!(rho.min_eigenvalue() >= -1e-14);
            rho.validate().unwrap();
            assert_eq!(rho.get(3, 3), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn hs_one_dimensional_is_vacuum_projector() {
        let rho = random_hs_density(1, 3, 99).unwrap();
        assert!((rho.get(0, 0).re - 1.0).abs() < 1e-15);
        assert_eq!(rho.trace(), rho.get(0, 0).re);
    }

    #[test]
    fn hs_is_deterministic_and_index_keyed() {
        let a = random_hs_density(2, 1, 7).unwrap();
        let b = random_hs_density(2, 1, 7).unwrap();
        assert_eq!(a, b);
        let c = random_hs_density_indexed(2, 1, 7, 5).unwrap();
        // evaluating other indices first does not change index 5
        let _ = random_hs_density_indexed(2, 1, 7, 4).unwrap();
        assert_eq!(c, random_hs_density_indexed(2, 1, 7, 5).unwrap());
        assert_ne!(a, c);
    }

    #[test]
    fn hs_rejects_oversized_dim() {
        assert!(random_hs_density(3, 1, 0).is_err());
        assert!(random_hs_density(0, 1, 0).is_err());
    }

    #[test]
    fn hs_ensemble_statistics() {
        let n = 1000;
        let mut trace_sum = 0.0;
        let mut purity_sum = 0.0;
        for i in 0..n {
            let rho = random_hs_density_indexed(2, 1, 2024, i).unwrap();
            trace_sum += rho.trace();
            purity_sum += rho.purity();
        }
        assert!((trace_sum / n as f64 - 1.0).abs() < 1e-12);
        let mean_purity = purity_sum / n as f64;
        assert!(mean_purity > 0.5 && mean_purity < 1.0, "{mean_purity}");
    }

    #[test]
    fn pure_density_outer_product() {
        let rho = pure_density(&fock_basis_state(0, 2).unwrap());
        assert_eq!(rho.get(0, 0).re, 1.0);
        assert_eq!(rho.trace(), 1.0);
        let rho = pure_density(&fock_basis_state(1, 2).unwrap());
        assert_eq!(rho.get(1, 1).re, 1.0);

        let psi = coherent_state(C64::new(1.0, 0.0), 30);
        let rho = pure_density(&psi);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        let ev = linalg::hermitian_eigenvalues(rho.entries());
        assert!(ev[..ev.len() - 1].iter().all(|x| x.abs() < 1e-12));
        rho.validate().unwrap();
    }

    #[test]
    fn number_phase_states() {
        assert_relative_eq!(phase_angle(1, 3), PI / 2.0);
        let v = number_phase_state(1, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v.amplitudes()[0] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((v.amplitudes()[1] - C64::new(-h, 0.0)).norm() < 1e-15);
        assert!(number_phase_state(4, 3).is_err());
        for s in [1usize, 4, 9] {
            for t in 0..=s {
                for u in 0..=s {
                    let ip = number_phase_state(t, s).unwrap().inner(&number_phase_state(u, s).unwrap());
                    let expect = if t == u { 1.0 } else { 0.0 };
                    assert!((ip - C64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn phase_states_resolve_identity() {
        let s = 12;
        let mut sum = CMatrix::zeros(s + 1, s + 1);
        for t in 0..=s {
            sum += pure_density(&number_phase_state(t, s).unwrap()).entries();
        }
        let id = CMatrix::identity(s + 1, s + 1);
        assert!((sum - id).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn continuous_phase_states() {
        let v = continuous_phase_state(0.0, 2);
        let c = 1.0 / 3f64.sqrt();
        assert!(v.amplitudes().iter().all(|a| (a - C64::new(c, 0.0)).norm() < 1e-15));
        let a = continuous_phase_state(phase_angle(3, 7), 7);
        let b = number_phase_state(3, 7).unwrap();
        assert!(a.amplitudes().iter().zip(b.amplitudes()).all(|(x, y)| (x - y).norm() < 1e-15));
        let w = continuous_phase_state(-1.0 + 4.0 * PI, 5);
        assert!((w.norm_sqr() - 1.0).abs() < 1e-14);
        let u = continuous_phase_state(-1.0, 5);
        assert!(u.amplitudes().iter().zip(w.amplitudes()).all(|(x, y)| (x - y).norm() < 1e-12));
    }

    #[test]
    fn pure_components_reassemble() {
        let rho = random_hs_density(3, 3, 11).unwrap();
        let mut back = CMatrix::zeros(4, 4);
        for (w, v) in rho.pure_components() {
            back += pure_density(&v).entries() * C64::new(w, 0.0);
        }
        assert!((back - rho.entries()).iter().all(|z| z.norm() < 1e-12));

        let th = thermal_state(1.0, 6).unwrap();
        assert_eq!(th.pure_components().len(), 7);
    }
}
