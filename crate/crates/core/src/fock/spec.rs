//! The state-spec mini-language used on the command line:
//!
//! ```text
//! coherent:r=<float>,psi=<float>
//! thermal:beta=<float>
//! fock:n=<int>
//! random:dim=<int>,seed=<int>
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{
    coherent_state, fock_basis_state, pure_density, random_hs_density, thermal_state,
    DensityMatrix, FockVector,
};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Coherent { r: f64, psi: f64 },
    Thermal { beta: f64 },
    Fock { n: usize },
    Random { dim: usize, seed: u64 },
}

/// A constructed state, keeping the pure vector when there is one.
#[derive(Debug, Clone)]
pub struct PreparedState {
    pub density: DensityMatrix,
    pub pure: Option<FockVector>,
}

impl StateSpec {
    /// Cutoff used when none is given explicitly.
    ///
    /// Coherent: `r^2 + 8r + 20` (Poisson tail far below 1e-14);
    /// thermal: first `N` with `e^{-beta (N+1)} <= 1e-13`;
    /// number state: `n`; random: `dim - 1`.
    pub fn default_cutoff(&self) -> usize {
        match *self {
            StateSpec::Coherent { r, .. } => (r * r + 8.0 * r + 20.0).ceil() as usize,
            StateSpec::Thermal { beta } => {
                let n = (13.0 * std::f64::consts::LN_10 / beta).ceil() as usize;
                n.saturating_sub(1).max(1)
            }
            StateSpec::Fock { n } => n,
            StateSpec::Random { dim, .. } => dim.saturating_sub(1),
        }
    }

    pub fn build(&self, cutoff: usize) -> Result<PreparedState> {
        match *self {
            StateSpec::Coherent { r, psi } => {
                let v = coherent_state(C64::from_polar(r, psi), cutoff);
                Ok(PreparedState {
                    density: pure_density(&v),
                    pure: Some(v),
                })
            }
            StateSpec::Fock { n } => {
                let v = fock_basis_state(n, cutoff)?;
                Ok(PreparedState {
                    density: pure_density(&v),
                    pure: Some(v),
                })
            }
            StateSpec::Thermal { beta } => Ok(PreparedState {
                density: thermal_state(beta, cutoff)?,
                pure: None,
            }),
            StateSpec::Random { dim, seed } => Ok(PreparedState {
                density: random_hs_density(dim, cutoff, seed)?,
                pure: None,
            }),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Coherent { r, psi } => write!(f, "coherent:r={r},psi={psi}"),
            StateSpec::Thermal { beta } => write!(f, "thermal:beta={beta}"),
            StateSpec::Fock { n } => write!(f, "fock:n={n}"),
            StateSpec::Random { dim, seed } => write!(f, "random:dim={dim},seed={seed}"),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: String| Error::StateSpec {
            spec: s.to_string(),
            reason,
        };
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| fail("expected <kind>:<key>=<value>,...".into()))?;
        let mut params = BTreeMap::new();
        for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| fail(format!("`{pair}` is not key=value")))?;
            if params.insert(k.trim(), v.trim()).is_some() {
                return Err(fail(format!("duplicate key `{}`", k.trim())));
            }
        }
        let mut take = |key: &str| {
            params
                .remove(key)
                .ok_or_else(|| fail(format!("missing `{key}`")))
        };
        let float = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| fail(format!("`{v}` is not a finite number")))
        };
        let int = |v: &str| -> Result<u64> {
            v.parse::<u64>()
                .map_err(|_| fail(format!("`{v}` is not a non-negative integer")))
        };
        let spec = match kind.trim() {
            "coherent" => {
                let r = float(take("r")?)?;
                let psi = float(take("psi")?)?;
                if r < 0.0 {
                    return Err(fail("r must be >= 0".into()));
                }
                StateSpec::Coherent { r, psi }
            }
            "thermal" => {
                let beta = float(take("beta")?)?;
                if beta <= 0.0 {
                    return Err(fail("beta must be > 0".into()));
                }
                StateSpec::Thermal { beta }
            }
            "fock" => StateSpec::Fock {
                n: int(take("n")?)? as usize,
            },
            "random" => {
                let dim = int(take("dim")?)? as usize;
                let seed = int(take("seed")?)?;
                if dim == 0 {
                    return Err(fail("dim must be >= 1".into()));
                }
                StateSpec::Random { dim, seed }
            }
            other => return Err(fail(format!("unknown state kind `{other}`"))),
        };
        if let Some(extra) = params.keys().next() {
            return Err(fail(format!("unexpected key `{extra}`")));
        }
        Ok(spec)
    }
}
