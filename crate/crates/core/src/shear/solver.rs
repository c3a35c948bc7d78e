//! Multi-start damped Newton for periodic weights `evolve(word, w).last = w`.

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{endpoint, endpoint_with_jacobian, Jacobian, ShearError, ShearWeights, SurfaceKind};
use crate::linalg::C64;
use crate::word::{Letter, MappingClassWord};

/// Log-space grid of starting points: `moduli` values spaced geometrically in
/// `[r_min, r_max]` times `arguments` angles in `(−π, π]`, taken independently
/// for both coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedGrid {
    pub moduli: usize,
    pub arguments: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for SeedGrid {
    fn default() -> Self {
        Self {
            moduli: 10,
            arguments: 10,
            r_min: 0.2,
            r_max: 5.0,
        }
    }
}

impl SeedGrid {
    pub fn new(
        moduli: usize,
        arguments: usize,
        r_min: f64,
        r_max: f64,
    ) -> Result<Self, ShearError> {
        if moduli == 0 || arguments == 0 {
            return Err(ShearError::InvalidSeedGrid(
                "grid sizes must be positive".into(),
            ));
        }
        if !(r_min > 0.0 && r_max >= r_min && r_max.is_finite()) {
            return Err(ShearError::InvalidSeedGrid(format!(
                "bad modulus range [{r_min}, {r_max}]"
            )));
        }
        Ok(Self {
            moduli,
            arguments,
            r_min,
            r_max,
        })
    }

    /// One coordinate's worth of seeds. Angles are symmetric under negation
    /// so the grid is closed under complex conjugation.
    fn points(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.moduli * self.arguments);
        for i in 0..self.moduli {
            let r = if self.moduli == 1 {
                self.r_min
            } else {
                let t = i as f64 / (self.moduli - 1) as f64;
                self.r_min * (self.r_max / self.r_min).powf(t)
            };
            for j in 0..self.arguments {
                let numerator = 2 * (j as i64 + 1) - self.arguments as i64;
                let theta = PI * numerator as f64 / self.arguments as f64;
                // sin(π) is not exactly zero in floating point
                let point = if numerator == self.arguments as i64 {
                    C64::new(-r, 0.0)
                } else {
                    C64::from_polar(r, theta)
                };
                out.push(point);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        (self.moduli * self.arguments).pow(2)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FromStr for SeedGrid {
    type Err = ShearError;

    /// `moduli,arguments,r_min,r_max`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || {
            ShearError::InvalidSeedGrid(format!("expected moduli,arguments,rmin,rmax; got {s:?}"))
        };
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let moduli = parts[0].parse().map_err(|_| bad())?;
        let arguments = parts[1].parse().map_err(|_| bad())?;
        let r_min = parts[2].parse().map_err(|_| bad())?;
        let r_max = parts[3].parse().map_err(|_| bad())?;
        Self::new(moduli, arguments, r_min, r_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverOptions {
    pub grid: SeedGrid,
    /// Acceptance bound on `‖F‖∞ / max(1, ‖w‖∞)`.
    pub newton_tolerance: f64,
    pub dedup_radius: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grid: SeedGrid::default(),
            newton_tolerance: 1e-12,
            dedup_radius: 1e-8,
            max_iterations: 80,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicSolution {
    pub weights: ShearWeights,
    /// `‖evolve(word, w).last − w‖∞`.
    pub residual: f64,
    /// False when the fixed-point Jacobian is numerically singular, e.g. on a curve of solutions.
    pub isolated: bool,
}

impl Serialize for PeriodicSolution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(6))?;
        map.serialize_entry("x1", &crate::report::ComplexPair::from(self.weights.x1))?;
        map.serialize_entry("x2", &crate::report::ComplexPair::from(self.weights.x2))?;
        map.serialize_entry("x3", &crate::report::ComplexPair::from(self.weights.x3()))?;
        map.serialize_entry("hN", &crate::report::ComplexPair::from(self.weights.h_n))?;
        map.serialize_entry("residual", &self.residual)?;
        map.serialize_entry("isolated", &self.isolated)?;
        map.end()
    }
}

const MAX_MAGNITUDE: f64 = 1e12;
const ISOLATION_RATIO: f64 = 1e-8;

fn sup(f: &[C64; 2]) -> f64 {
    f[0].norm_sqr().max(f[1].norm_sqr()).sqrt()
}

fn scale(w: &ShearWeights) -> f64 {
    1.0_f64.max(w.x1.norm_sqr()).max(w.x2.norm_sqr()).sqrt()
}

/// `F(w) = endpoint(w) − w` and `J_F = J − I`.
fn residual_map(
    letters: &[Letter],
    w: ShearWeights,
    kind: SurfaceKind,
) -> Option<([C64; 2], Jacobian)> {
    let (end, mut jac) = endpoint_with_jacobian(letters, w, kind).ok()?;
    let f = [end.x1 - w.x1, end.x2 - w.x2];
    if !f.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return None;
    }
    jac[0][0] -= 1.0;
    jac[1][1] -= 1.0;
    Some((f, jac))
}

fn residual_only(letters: &[Letter], w: ShearWeights, kind: SurfaceKind) -> Option<[C64; 2]> {
    let end = endpoint(letters, w, kind).ok()?;
    let f = [end.x1 - w.x1, end.x2 - w.x2];
    f.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then_some(f)
}

fn frob2(j: &Jacobian) -> f64 {
    j.iter().flatten().map(|z| z.norm_sqr()).sum()
}

/// Newton direction; falls back to the minimal-norm gradient step when the
/// 2×2 system is singular so conjugate starts stay conjugate.
fn newton_direction(f: &[C64; 2], j: &Jacobian) -> [C64; 2] {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let norm2 = frob2(j);
    if det.norm() > 1e-12 * norm2 {
        [
            -(j[1][1] * f[0] - j[0][1] * f[1]) / det,
            -(-j[1][0] * f[0] + j[0][0] * f[1]) / det,
        ]
    } else if norm2 > 0.0 {
        [
            -(j[0][0].conj() * f[0] + j[1][0].conj() * f[1]) / norm2,
            -(j[0][1].conj() * f[0] + j[1][1].conj() * f[1]) / norm2,
        ]
    } else {
        [C64::new(0.0, 0.0); 2]
    }
}

/// Ratio of singular values of a 2×2 complex matrix.
fn singular_ratio(j: &Jacobian) -> f64 {
    let det = (j[0][0] * j[1][1] - j[0][1] * j[1][0]).norm();
    let fro2 = frob2(j);
    // σ1² + σ2² = ‖J‖², σ1 σ2 = |det|
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let s_max2 = (fro2 + disc) / 2.0;
    if s_max2 == 0.0 {
        return 0.0;
    }
    let s_min2 = (det * det) / s_max2;
    (s_min2 / s_max2).sqrt()
}

fn newton(
    letters: &[Letter],
    start: ShearWeights,
    kind: SurfaceKind,
    opts: &SolverOptions,
) -> Option<PeriodicSolution> {
    let mut w = start;
    let (mut f, mut j) = residual_map(letters, w, kind)?;
    let mut converged_steps = 0;
    for _ in 0..opts.max_iterations {
        if sup(&f) <= opts.newton_tolerance * scale(&w) {
            // A couple of extra steps polish to the floating-point floor.
            converged_steps += 1;
            if converged_steps > 2 {
                break;
            }
        }
        let d = newton_direction(&f, &j);
        let current = sup(&f);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..10 {
            let trial = ShearWeights::new(w.x1 + t * d[0], w.x2 + t * d[1], w.h_n);
            if let Some(tf) = residual_only(letters, trial, kind) {
                if sup(&tf) < current || converged_steps > 0 {
                    accepted = residual_map(letters, trial, kind).map(|(tf, tj)| (trial, tf, tj));
                    break;
                }
            }
            t *= 0.5;
        }
        let (nw, nf, nj) = match accepted {
            Some(v) => v,
            None if converged_steps > 0 => break,
            None => return None,
        };
        if scale(&nw) > MAX_MAGNITUDE {
            return None;
        }
        w = nw;
        f = nf;
        j = nj;
    }
    if sup(&f) > opts.newton_tolerance * scale(&w) || w.degeneracy().is_some() {
        return None;
    }
    Some(PeriodicSolution {
        weights: w,
        residual: sup(&f),
        isolated: singular_ratio(&j) > ISOLATION_RATIO,
    })
}

fn sort_key(w: &ShearWeights) -> [f64; 4] {
    [w.x1.re, w.x1.im, w.x2.re, w.x2.im]
}

fn key_cmp(a: &ShearWeights, b: &ShearWeights) -> std::cmp::Ordering {
    let (ka, kb) = (sort_key(a), sort_key(b));
    ka.iter()
        .zip(kb.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// All periodic weights reachable from the seed grid, deduplicated and sorted.
/// Starts run in parallel; the result depends only on the grid.
pub fn solve_periodic(
    word: &MappingClassWord,
    kind: SurfaceKind,
    h_n: C64,
    opts: &SolverOptions,
) -> Result<Vec<PeriodicSolution>, ShearError> {
    let letters = word.letters();
    let points = opts.grid.points();
    let starts: Vec<ShearWeights> = points
        .iter()
        .flat_map(|&a| points.iter().map(move |&b| ShearWeights::new(a, b, h_n)))
        .collect();
    // With real hN the maps have real coefficients and Newton commutes exactly
    // with conjugation, so only one start of each conjugate pair is run.
    let partner = conjugate_partners(&points).filter(|_| h_n.im == 0.0);
    let pair_of = |i: usize| match &partner {
        Some(p) => p[i / points.len()] * points.len() + p[i % points.len()],
        None => i,
    };
    let solved: Vec<(usize, Option<PeriodicSolution>)> = (0..starts.len())
        .into_par_iter()
        .filter(|&i| pair_of(i) >= i)
        .map(|i| (i, newton(letters, starts[i], kind, opts)))
        .collect();
    let mut found: Vec<Option<PeriodicSolution>> = vec![None; starts.len()];
    for (i, sol) in solved {
        let mirror = pair_of(i);
        if mirror != i {
            found[mirror] = sol.map(|s| PeriodicSolution {
                weights: s.weights.conj(),
                ..s
            });
        }
        found[i] = sol;
    }
    merge(found, starts.len(), opts)
}

/// Deduplicates in start order, then sorts by key.
fn merge(
    found: Vec<Option<PeriodicSolution>>,
    starts: usize,
    opts: &SolverOptions,
) -> Result<Vec<PeriodicSolution>, ShearError> {
    // Squared radius `(dedup_radius · scale)²` alongside each kept solution.
    let mut unique: Vec<(PeriodicSolution, f64)> = Vec::new();
    for sol in found.into_iter().flatten() {
        let (a, b) = (sol.weights.x1, sol.weights.x2);
        let duplicate = unique.iter().any(|(u, r2)| {
            (u.weights.x1 - a)
                .norm_sqr()
                .max((u.weights.x2 - b).norm_sqr())
                <= *r2
        });
        if !duplicate {
            let r = opts.dedup_radius * scale(&sol.weights);
            unique.push((sol, r * r));
        }
    }
    let mut unique: Vec<PeriodicSolution> = unique.into_iter().map(|(s, _)| s).collect();
    if unique.is_empty() {
        return Err(ShearError::NoSolutionFound { starts });
    }
    unique.sort_by(|a, b| key_cmp(&a.weights, &b.weights));
    Ok(unique)
}

/// Index of each point's exact conjugate, if the set is closed under conjugation.
fn conjugate_partners(points: &[C64]) -> Option<Vec<usize>> {
    points
        .iter()
        .map(|z| points.iter().position(|w| w.re == z.re && w.im == -z.im))
        .collect()
}

/// How far a value is from the real axis, relative to its size.
fn nonreality(z: C64) -> f64 {
    z.im.abs() / z.norm()
}

const NONREAL_TOLERANCE: f64 = 1e-9;
const SCORE_TIE: f64 = 1e-9;

/// Picks the candidate for the hyperbolic structure: all of `x1, x2, x3`
/// nonreal, `Im x1 > 0` preferred, then the one farthest from the real
/// locus (smallest `|Im x|/|x|` over the three coordinates, maximized),
/// then the sort key.
pub fn select_geometric(solutions: &[PeriodicSolution]) -> Result<PeriodicSolution, ShearError> {
    let score = |w: &ShearWeights| {
        nonreality(w.x1)
            .min(nonreality(w.x2))
            .min(nonreality(w.x3()))
    };
    let mut candidates: Vec<&PeriodicSolution> = solutions
        .iter()
        .filter(|s| score(&s.weights) > NONREAL_TOLERANCE)
        .collect();
    if candidates.is_empty() {
        return Err(ShearError::NoGeometricCandidate);
    }
    if candidates.iter().any(|s| s.weights.x1.im > 0.0) {
        candidates.retain(|s| s.weights.x1.im > 0.0);
    }
    let best = candidates
        .iter()
        .map(|s| score(&s.weights))
        .fold(0.0, f64::max);
    candidates
        .into_iter()
        .filter(|s| score(&s.weights) >= best - SCORE_TIE)
        .min_by(|a, b| key_cmp(&a.weights, &b.weights))
        .copied()
        .ok_or(ShearError::NoGeometricCandidate)
}
