//! Choice of N-th roots of the periodic shear weights.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::C64;
use crate::shear::ShearWeights;
use crate::weyl::RootOfUnity;

pub const PERIODICITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("trajectory does not close up: |last - first| = {gap:.3e}")]
    NonPeriodicTrajectory { gap: f64 },
    #[error("{count} selectors given for a word of length {len}")]
    TooManySelectors { count: usize, len: usize },
    #[error("empty trajectory")]
    EmptyTrajectory,
}

/// Which N-th root to take at each index of the trajectory: the principal
/// root times `exp(2πi r/N)`. Missing entries default to 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSelectors {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
}

impl RootSelectors {
    pub fn uniform() -> Self {
        Self::default()
    }

    /// Only the selectors at index 0 set.
    pub fn initial(u0: usize, v0: usize) -> Self {
        Self {
            u: vec![u0],
            v: vec![v0],
        }
    }

    fn get(list: &[usize], i: usize) -> usize {
        list.get(i).copied().unwrap_or(0)
    }

    /// Selectors for the rotated word `A_{k+1}⋯A_n A_1⋯A_k` of length `len`.
    pub fn rotated(&self, k: usize, len: usize) -> Self {
        let pick = |list: &[usize]| (0..len).map(|i| Self::get(list, (i + k) % len)).collect();
        Self {
            u: pick(&self.u),
            v: pick(&self.v),
        }
    }

    /// The full per-index lists for a word of length `len`.
    pub fn expanded(&self, len: usize) -> Self {
        self.rotated(0, len)
    }
}

/// Roots `u_i, v_i` for `i = 0..=n` with `u_n = u_0`, `v_n = v_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootChoice {
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub h: C64,
    pub selectors: RootSelectors,
}

pub fn principal_root(z: C64, n: usize) -> C64 {
    if n == 1 {
        return z;
    }
    C64::from_polar(z.norm().powf(1.0 / n as f64), z.arg() / n as f64)
}

/// Picks `u_i = x1_i^{1/N}·e^{2πi r_i/N}` (and likewise `v_i`), then closes
/// the choice by setting the last roots equal to the first ones.
pub fn choose_roots(
    trajectory: &[ShearWeights],
    root: &RootOfUnity,
    h: C64,
    selectors: &RootSelectors,
) -> Result<RootChoice, RootError> {
    let (first, last) = match (trajectory.first(), trajectory.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(RootError::EmptyTrajectory),
    };
    let len = trajectory.len() - 1;
    let gap = first.distance(last);
    let scale = first.x1.norm().max(first.x2.norm()).max(1.0);
    if gap > PERIODICITY_TOLERANCE * scale {
        return Err(RootError::NonPeriodicTrajectory { gap });
    }
    let count = selectors.u.len().max(selectors.v.len());
    if count > len.max(1) {
        return Err(RootError::TooManySelectors { count, len });
    }
    let selectors = selectors.expanded(len.max(1));
    let n = root.n();
    let pick = |z: C64, r: usize| principal_root(z, n) * root.selector_phase(r);
    let mut u = Vec::with_capacity(len + 1);
    let mut v = Vec::with_capacity(len + 1);
    for (i, w) in trajectory.iter().take(len).enumerate() {
        u.push(pick(w.x1, selectors.u[i]));
        v.push(pick(w.x2, selectors.v[i]));
    }
    if len == 0 {
        u.push(pick(first.x1, selectors.u[0]));
        v.push(pick(first.x2, selectors.v[0]));
    } else {
        u.push(u[0]);
        v.push(v[0]);
    }
    Ok(RootChoice { u, v, h, selectors })
}

impl RootChoice {
    pub fn len(&self) -> usize {
        self.u.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest relative mismatch between `u_i^N, v_i^N` and the weights.
    pub fn power_residual(&self, trajectory: &[ShearWeights], n: usize) -> f64 {
        let rel = |a: C64, b: C64| (a - b).norm() / b.norm().max(1.0);
        self.u
            .iter()
            .zip(&self.v)
            .zip(trajectory)
            .map(|((u, v), w)| rel(u.powi(n as i32), w.x1).max(rel(v.powi(n as i32), w.x2)))
            .fold(0.0, f64::max)
    }

    /// The choice seen from the rotated word `A_{k+1}⋯A_n A_1⋯A_k`.
    pub fn rotated(&self, k: usize) -> Self {
        let n = self.len();
        let pick = |list: &[C64]| {
            let mut out: Vec<C64> = (0..n).map(|i| list[(i + k) % n]).collect();
            out.push(out[0]);
            out
        };
        Self {
            u: pick(&self.u),
            v: pick(&self.v),
            h: self.h,
            selectors: self.selectors.rotated(k, n),
        }
    }
}
