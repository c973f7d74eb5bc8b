//! Phase distributions in the Paul and Pegg-Barnett formalisms.
//!
//! * [`husimi_q`] and [`paul_distribution`]: the Paul density is the radial
//!   marginal `(1/pi) int r Q(r e^{i phi}) dr` of the Husimi function,
//!   evaluated with composite Gauss-Legendre quadrature.
//! * [`pb_discrete_distribution`], [`pb_continuous_density`],
//!   [`pb_expectation`]: Pegg-Barnett quantities on the `(s+1)`-dimensional
//!   truncation.
//! * [`AmplifiedPbKernel`]: the Pegg-Barnett density of `A_{1+s eps}(rho)`
//!   evaluated directly from the input amplitudes in `O(s M)` per angle.

mod amplified;
mod paul;
mod pegg_barnett;

use std::f64::consts::PI;

use crate::fock::DensityMatrix;
use crate::{Error, Result, Warning, C64};

pub use amplified::{
    appendix_a_bound, dominating_sum, truncation_envelope, pb_amplified_density,
    pb_amplified_density_truncated, AmplifiedPbKernel,
};
pub use paul::{
    husimi_q, paul_coherent_closed_form, paul_density_at, paul_distribution, paul_expectation,
    PaulRadialModes,
};
pub use pegg_barnett::{
    pb_coherent_series, pb_continuous_density, pb_continuous_distribution,
    pb_discrete_distribution, pb_expectation, pb_operator,
};

/// Default number of grid angles.
pub const DEFAULT_GRID: usize = 512;
/// Gauss-Legendre nodes per radial panel.
pub const PANEL_ORDER: usize = 16;
/// Densities this far below zero are treated as rounding and clamped.
const CLAMP_TOL: f64 = 1e-12;

/// Uniform periodic grid `phi_i = 2 pi i / G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseGrid {
    size: usize,
}

impl PhaseGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::domain("grid", 0.0, "must be positive"));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.size as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.size as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.size).map(|i| self.point(i))
    }
}

/// Density samples on a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    pub grid: PhaseGrid,
    pub density: Vec<f64>,
    /// Error budget: quadrature tail, truncation deficit of the state and
    /// any clamped negative jitter.
    pub quad_error: f64,
}

impl PhaseDistribution {
    /// Builds a distribution, clamping values in `[-1e-12, 0)` to zero and
    /// charging the clamp to `quad_error`.
    pub(crate) fn from_samples(grid: PhaseGrid, mut density: Vec<f64>, quad_error: f64) -> Self {
        let mut clamp = 0.0f64;
        for p in density.iter_mut() {
            if *p < 0.0 && *p >= -CLAMP_TOL {
                clamp = clamp.max(-*p);
                *p = 0.0;
            }
        }
        Self {
            grid,
            density,
            quad_error: quad_error + clamp,
        }
    }

    /// Periodic rectangle rule `sum_i p_i dphi`.
    pub fn integral(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.grid.spacing()
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.points().zip(self.density.iter().copied())
    }

    pub fn warning(&self) -> Option<Warning> {
        (self.quad_error > Warning::QUADRATURE_LIMIT).then_some(Warning::QuadratureError(self.quad_error))
    }
}

/// Bounded function of `e^{i phi}` given by Fourier modes
/// `f = sum_{|k| <= K} c_k e^{i k phi}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFunction {
    max_mode: usize,
    coeffs: Vec<C64>,
}

impl PhaseFunction {
    /// Coefficients `c_{-K}, ..., c_K`; the length must be odd.
    pub fn from_coefficients(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::Dimension("Fourier coefficients need odd length 2K+1".into()));
        }
        Ok(Self {
            max_mode: coeffs.len() / 2,
            coeffs,
        })
    }

    pub fn constant(c: C64) -> Self {
        Self {
            max_mode: 0,
            coeffs: vec![c],
        }
    }

    /// `e^{i k phi}`.
    pub fn mode(k: i64) -> Self {
        let kk = k.unsigned_abs() as usize;
        let mut coeffs = vec![C64::new(0.0, 0.0); 2 * kk + 1];
        coeffs[(kk as i64 + k) as usize] = C64::new(1.0, 0.0);
        Self {
            max_mode: kk,
            coeffs,
        }
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    /// `(k, c_k)` for the non-zero modes.
    pub fn modes(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let k0 = self.max_mode as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(move |(i, c)| (i as i64 - k0, *c))
    }

    pub fn eval(&self, phi: f64) -> C64 {
        self.modes().map(|(k, c)| c * C64::from_polar(1.0, k as f64 * phi)).sum()
    }

    /// `sum |c_k|`, an upper bound on `|f|`.
    pub fn bound(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

/// Radial quadrature and angular grid settings for the Paul distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Total radial nodes, used as `radial_nodes / 16` panels of 16 nodes.
    pub radial_nodes: usize,
    pub r_max: f64,
    pub grid_size: usize,
}

impl QuadratureConfig {
    pub fn new(radial_nodes: usize, r_max: f64, grid_size: usize) -> Result<Self> {
        let cfg = Self {
            radial_nodes,
            r_max,
            grid_size,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `r_max = sqrt(N_eff) + 8` with `N_eff` the `1 - 1e-10` photon-number
    /// quantile; one 16-node panel per unit of radius.
    pub fn for_state(rho: &DensityMatrix) -> Self {
        let n_eff = rho.photon_quantile(1e-10);
        let r_max = (n_eff as f64).sqrt() + 8.0;
        Self {
            radial_nodes: PANEL_ORDER * r_max.ceil() as usize,
            r_max,
            grid_size: DEFAULT_GRID,
        }
    }

    pub fn with_grid(mut self, grid_size: usize) -> Self {
        self.grid_size = grid_size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < PANEL_ORDER {
            return Err(Error::domain("radial_nodes", self.radial_nodes as f64, "must be >= 16"));
        }
        if !(self.r_max > 0.0) || !self.r_max.is_finite() {
            return Err(Error::domain("r_max", self.r_max, "must be finite and > 0"));
        }
        PhaseGrid::new(self.grid_size)?;
        Ok(())
    }

    pub fn grid(&self) -> PhaseGrid {
        PhaseGrid { size: self.grid_size }
    }

    pub fn panels(&self) -> usize {
        (self.radial_nodes / PANEL_ORDER).max(1)
    }
}

/// An expectation value with its numerical error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: C64,
    pub error: f64,
}

impl Estimate {
    pub fn warning(&self) -> Option<Warning> {
        (self.error > Warning::QUADRATURE_LIMIT).then_some(Warning::QuadratureError(self.error))
    }
}
