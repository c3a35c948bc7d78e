//! Classical shear-weight recursions on N-th powers of the edge weights.

mod solver;

pub use solver::{select_geometric, solve_periodic, PeriodicSolution, SeedGrid, SolverOptions};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::C64;
use crate::word::{Letter, MappingClassWord};

/// Coordinates within this distance of 0 or −1 are treated as poles.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShearError {
    #[error("degenerate weight at step {step}: {detail}")]
    Degenerate { step: usize, detail: String },
    #[error("no periodic solution found from {starts} starts")]
    NoSolutionFound { starts: usize },
    #[error("no solution has all three coordinates nonreal")]
    NoGeometricCandidate,
    #[error("invalid seed grid: {0}")]
    InvalidSeedGrid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurfaceKind {
    #[serde(rename = "torus")]
    Torus1,
    #[serde(rename = "sphere")]
    Sphere4,
}

impl SurfaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::Torus1 => "torus",
            SurfaceKind::Sphere4 => "sphere",
        }
    }

    /// Sign in front of the twisted output of each step (−1 on the sphere).
    fn twist(self) -> f64 {
        match self {
            SurfaceKind::Torus1 => 1.0,
            SurfaceKind::Sphere4 => -1.0,
        }
    }
}

impl std::str::FromStr for SurfaceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "torus" | "torus1" => Ok(SurfaceKind::Torus1),
            "sphere" | "sphere4" => Ok(SurfaceKind::Sphere4),
            other => Err(format!(
                "unknown surface {other:?}; expected torus or sphere"
            )),
        }
    }
}

/// N-th powers `(x1, x2)` of two edge weights plus the central datum `h^N`.
/// The third weight `x3 = h^N / (x1 x2)` is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearWeights {
    pub x1: C64,
    pub x2: C64,
    pub h_n: C64,
}

fn near(z: C64, target: f64) -> bool {
    (z - target).norm_sqr() <= DEGENERACY_TOLERANCE * DEGENERACY_TOLERANCE
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl ShearWeights {
    pub fn new(x1: C64, x2: C64, h_n: C64) -> Self {
        Self { x1, x2, h_n }
    }

    pub fn x3(&self) -> C64 {
        self.h_n / (self.x1 * self.x2)
    }

    /// Fast form of [`ShearWeights::degeneracy`].
    #[inline]
    pub fn is_degenerate(&self) -> bool {
        let t2 = DEGENERACY_TOLERANCE * DEGENERACY_TOLERANCE;
        let bad = |z: C64, minus_one: bool| {
            !finite(z) || z.norm_sqr() <= t2 || (minus_one && (z + 1.0).norm_sqr() <= t2)
        };
        bad(self.x1, true) || bad(self.x2, true) || bad(self.h_n, false)
    }

    /// First offending coordinate, if any sits at 0, −1 or infinity.
    pub fn degeneracy(&self) -> Option<String> {
        for (name, z) in [("x1", self.x1), ("x2", self.x2), ("hN", self.h_n)] {
            if !finite(z) {
                return Some(format!("{name} is not finite"));
            }
            if near(z, 0.0) {
                return Some(format!("{name} = 0"));
            }
        }
        for (name, z) in [("x1", self.x1), ("x2", self.x2)] {
            if near(z, -1.0) {
                return Some(format!("{name} = -1"));
            }
        }
        None
    }

    pub fn distance(&self, other: &ShearWeights) -> f64 {
        (self.x1 - other.x1).norm().max((self.x2 - other.x2).norm())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.x1.conj(), self.x2.conj(), self.h_n.conj())
    }
}

impl Serialize for ShearWeights {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WeightsJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ShearWeights {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = WeightsJson::deserialize(deserializer)?;
        Ok(ShearWeights::new(
            raw.x1.into(),
            raw.x2.into(),
            raw.h_n.into(),
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct WeightsJson {
    x1: crate::report::ComplexPair,
    x2: crate::report::ComplexPair,
    x3: crate::report::ComplexPair,
    #[serde(rename = "hN")]
    h_n: crate::report::ComplexPair,
}

impl From<&ShearWeights> for WeightsJson {
    fn from(w: &ShearWeights) -> Self {
        Self {
            x1: w.x1.into(),
            x2: w.x2.into(),
            x3: w.x3().into(),
            h_n: w.h_n.into(),
        }
    }
}

fn checked(
    input: &ShearWeights,
    output: ShearWeights,
    step: usize,
) -> Result<ShearWeights, ShearError> {
    if let Some(detail) = input.degeneracy() {
        return Err(ShearError::Degenerate { step, detail });
    }
    if let Some(detail) = output.degeneracy() {
        return Err(ShearError::Degenerate {
            step,
            detail: format!("output {detail}"),
        });
    }
    Ok(output)
}

fn raw_step(w: &ShearWeights, letter: Letter, kind: SurfaceKind) -> ShearWeights {
    let one = C64::new(1.0, 0.0);
    let s = kind.twist();
    // (1 + 1/x)⁻² = x²/(1 + x)²
    match letter {
        Letter::R => {
            let t2 = (one + w.x1) * (one + w.x1);
            ShearWeights::new(s * w.h_n * w.x1 / (w.x2 * t2), t2 * w.x2, w.h_n)
        }
        Letter::L => {
            let t2 = (one + w.x2) * (one + w.x2);
            ShearWeights::new(
                w.x1 * w.x2 * w.x2 / t2,
                s * w.h_n * t2 / (w.x1 * w.x2),
                w.h_n,
            )
        }
    }
}

pub fn step(
    w: &ShearWeights,
    letter: Letter,
    kind: SurfaceKind,
) -> Result<ShearWeights, ShearError> {
    checked(w, raw_step(w, letter, kind), 1)
}

pub fn step_r(w: &ShearWeights, kind: SurfaceKind) -> Result<ShearWeights, ShearError> {
    step(w, Letter::R, kind)
}

pub fn step_l(w: &ShearWeights, kind: SurfaceKind) -> Result<ShearWeights, ShearError> {
    step(w, Letter::L, kind)
}

/// Solves the step relations for the input given the output.
pub fn step_inverse(
    out: &ShearWeights,
    letter: Letter,
    kind: SurfaceKind,
) -> Result<ShearWeights, ShearError> {
    let one = C64::new(1.0, 0.0);
    let s = kind.twist();
    let input = match letter {
        // x1' x2' = s hN x1
        Letter::R => {
            let x1 = s * out.x1 * out.x2 / out.h_n;
            ShearWeights::new(x1, out.x2 / (one + x1).powi(2), out.h_n)
        }
        // x1'' x2'' = s hN x2
        Letter::L => {
            let x2 = s * out.x1 * out.x2 / out.h_n;
            let inv = one + one / x2;
            ShearWeights::new(out.x1 * inv * inv, x2, out.h_n)
        }
    };
    checked(out, input, 1)
}

/// The trajectory `(w0, w1, …, wn)` along the word.
pub fn evolve(
    word: &MappingClassWord,
    w0: ShearWeights,
    kind: SurfaceKind,
) -> Result<Vec<ShearWeights>, ShearError> {
    evolve_letters(word.letters(), w0, kind)
}

pub fn evolve_letters(
    letters: &[Letter],
    w0: ShearWeights,
    kind: SurfaceKind,
) -> Result<Vec<ShearWeights>, ShearError> {
    let mut trajectory = Vec::with_capacity(letters.len() + 1);
    trajectory.push(w0);
    for (i, &letter) in letters.iter().enumerate() {
        let current = trajectory[i];
        let next = checked(&current, raw_step(&current, letter, kind), i + 1)?;
        trajectory.push(next);
    }
    Ok(trajectory)
}

/// 2×2 complex matrix, row-major.
pub(crate) type Jacobian = [[C64; 2]; 2];

fn mat_mul(a: &Jacobian, b: &Jacobian) -> Jacobian {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Step output and its exact derivative in `(x1, x2)`.
fn step_with_jacobian(
    w: &ShearWeights,
    letter: Letter,
    kind: SurfaceKind,
) -> (ShearWeights, Jacobian) {
    let one = C64::new(1.0, 0.0);
    let s = kind.twist();
    let out = raw_step(w, letter, kind);
    let (x1, x2, h) = (w.x1, w.x2, w.h_n);
    let jac = match letter {
        Letter::R => {
            let t = one + x1;
            [
                [s * h * (one - x1) / (x2 * t * t * t), -out.x1 / x2],
                [2.0 * t * x2, t * t],
            ]
        }
        Letter::L => {
            let t = one + x2;
            [
                [x2 * x2 / (t * t), 2.0 * x1 * x2 / (t * t * t)],
                [-out.x2 / x1, s * h * t * (x2 - one) / (x1 * x2 * x2)],
            ]
        }
    };
    (out, jac)
}

/// Endpoint of the trajectory, with the same checks as [`endpoint_with_jacobian`].
pub(crate) fn endpoint(
    letters: &[Letter],
    w0: ShearWeights,
    kind: SurfaceKind,
) -> Result<ShearWeights, ShearError> {
    let mut w = w0;
    for (i, &letter) in letters.iter().enumerate() {
        if w.is_degenerate() {
            return Err(ShearError::Degenerate {
                step: i + 1,
                detail: w.degeneracy().unwrap_or_default(),
            });
        }
        w = raw_step(&w, letter, kind);
    }
    if w.is_degenerate() {
        let detail = w.degeneracy().unwrap_or_default();
        return Err(ShearError::Degenerate {
            step: letters.len(),
            detail: format!("output {detail}"),
        });
    }
    Ok(w)
}

/// Endpoint of the trajectory and the derivative of the endpoint map.
pub(crate) fn endpoint_with_jacobian(
    letters: &[Letter],
    w0: ShearWeights,
    kind: SurfaceKind,
) -> Result<(ShearWeights, Jacobian), ShearError> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut w = w0;
    let mut jac = [[one, zero], [zero, one]];
    for (i, &letter) in letters.iter().enumerate() {
        if w.is_degenerate() {
            return Err(ShearError::Degenerate {
                step: i + 1,
                detail: w.degeneracy().unwrap_or_default(),
            });
        }
        let (next, step_jac) = step_with_jacobian(&w, letter, kind);
        jac = mat_mul(&step_jac, &jac);
        w = next;
    }
    if w.is_degenerate() {
        let detail = w.degeneracy().unwrap_or_default();
        return Err(ShearError::Degenerate {
            step: letters.len(),
            detail: format!("output {detail}"),
        });
    }
    Ok((w, jac))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn torus(x1: f64, x2: f64) -> ShearWeights {
        ShearWeights::new(c(x1, 0.0), c(x2, 0.0), c(1.0, 0.0))
    }

    fn close(a: &ShearWeights, x1: C64, x2: C64) -> bool {
        (a.x1 - x1).norm() < 1e-14 && (a.x2 - x2).norm() < 1e-14
    }

    #[test]
    fn r_examples() {
        let out = step_r(&torus(1.0, 1.0), SurfaceKind::Torus1).unwrap();
        assert!(close(&out, c(0.25, 0.0), c(4.0, 0.0)));
        let out = step_r(&torus(2.0, 1.0), SurfaceKind::Torus1).unwrap();
        assert!(close(&out, c(2.0 / 9.0, 0.0), c(9.0, 0.0)));
        let out = step_r(&torus(1.0, 1.0), SurfaceKind::Sphere4).unwrap();
        assert!(close(&out, c(-0.25, 0.0), c(4.0, 0.0)));
        assert!(matches!(
            step_r(&torus(-1.0, 2.0), SurfaceKind::Torus1),
            Err(ShearError::Degenerate { .. })
        ));
    }

    #[test]
    fn l_examples() {
        let out = step_l(&torus(1.0, 1.0), SurfaceKind::Torus1).unwrap();
        assert!(close(&out, c(0.25, 0.0), c(4.0, 0.0)));
        let out = step_l(&torus(1.0, 2.0), SurfaceKind::Torus1).unwrap();
        assert!(close(&out, c(4.0 / 9.0, 0.0), c(4.5, 0.0)));
        assert!(matches!(
            step_l(&torus(2.0, -1.0), SurfaceKind::Torus1),
            Err(ShearError::Degenerate { .. })
        ));
    }

    #[test]
    fn evolve_examples() {
        let rl: MappingClassWord = "RL".parse().unwrap();
        let traj = evolve(&rl, torus(1.0, 1.0), SurfaceKind::Torus1).unwrap();
        assert_eq!(traj.len(), 3);
        let expected = step_l(
            &step_r(&torus(1.0, 1.0), SurfaceKind::Torus1).unwrap(),
            SurfaceKind::Torus1,
        )
        .unwrap();
        assert_eq!(traj[2], expected);

        let single = evolve_letters(&[Letter::R], torus(1.0, 1.0), SurfaceKind::Torus1).unwrap();
        assert!(close(&single[1], c(0.25, 0.0), c(4.0, 0.0)));

        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let w0 = ShearWeights::new(omega, omega, c(1.0, 0.0));
        let traj = evolve(&rl, w0, SurfaceKind::Torus1).unwrap();
        assert!(traj[2].distance(&w0) < 1e-14);
    }

    #[test]
    fn degenerate_step_index_is_reported() {
        // (1, 1) -R-> (1/4, 4) -L-> fine; start on the pole instead.
        let word: MappingClassWord = "RL".parse().unwrap();
        let w0 = ShearWeights::new(c(1.0, 0.0), c(-1.0 / 4.0, 0.0), c(1.0, 0.0));
        // R keeps x2 scaled by (1+x1)^2 = 4, so x2 becomes −1 after the first step.
        assert!(matches!(
            evolve(&word, w0, SurfaceKind::Torus1),
            Err(ShearError::Degenerate { step: 1, .. })
        ));
    }

    #[test]
    fn inverse_steps_undo_steps() {
        for kind in [SurfaceKind::Torus1, SurfaceKind::Sphere4] {
            for letter in [Letter::R, Letter::L] {
                let w = ShearWeights::new(c(0.7, -0.3), c(-1.9, 0.4), c(1.0, 0.0));
                let back = step_inverse(&step(&w, letter, kind).unwrap(), letter, kind).unwrap();
                assert!(back.distance(&w) < 1e-12);
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let letters = [Letter::R, Letter::R, Letter::L];
        for kind in [SurfaceKind::Torus1, SurfaceKind::Sphere4] {
            let w = ShearWeights::new(c(0.4, 0.9), c(-0.3, 1.2), c(1.0, 0.0));
            let (end, jac) = endpoint_with_jacobian(&letters, w, kind).unwrap();
            let eps = 1e-7;
            for col in 0..2 {
                let mut shifted = w;
                if col == 0 {
                    shifted.x1 += eps;
                } else {
                    shifted.x2 += eps;
                }
                let (moved, _) = endpoint_with_jacobian(&letters, shifted, kind).unwrap();
                let d1 = (moved.x1 - end.x1) / eps;
                let d2 = (moved.x2 - end.x2) / eps;
                assert!((d1 - jac[0][col]).norm() < 1e-5 * (1.0 + d1.norm()));
                assert!((d2 - jac[1][col]).norm() < 1e-5 * (1.0 + d2.norm()));
            }
        }
    }

    #[test]
    fn h_is_preserved() {
        let w = ShearWeights::new(c(0.5, 0.5), c(2.0, -1.0), c(0.3, 0.8));
        for letter in [Letter::R, Letter::L] {
            assert_eq!(step(&w, letter, SurfaceKind::Torus1).unwrap().h_n, w.h_n);
        }
    }
}
