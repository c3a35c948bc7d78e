//! Spectral data of a matrix defined up to conjugation and scalar.

use thiserror::Error;

use crate::linalg::{self, CMatrix, C64};
use crate::roots::principal_root;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("matrix is singular or ill-conditioned (det = {det})")]
    IllConditioned { det: C64 },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

const TIE_TOLERANCE: f64 = 1e-9;
const SINGULAR_RATIO: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveSpectrum {
    /// Eigenvalues of `det(C)^{−1/N}·C`, sorted by modulus then argument.
    pub eigenvalues: Vec<C64>,
    /// `λ_i / λ_1`.
    pub ratios: Vec<C64>,
    /// Characteristic polynomial of the det-normalized matrix, leading coefficient first.
    pub char_poly: Vec<C64>,
}

/// Ascending modulus; moduli within a relative `1e-9` are one cluster, ordered by argument.
pub fn sort_spectrum(values: &mut [C64]) {
    values.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let top = values
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < values.len() {
        let base = values[start].norm();
        let mut end = start + 1;
        while end < values.len() && values[end].norm() - base <= TIE_TOLERANCE * top {
            end += 1;
        }
        values[start..end].sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        start = end;
    }
}

/// Coefficients of `∏(x − λ_i)`, leading first.
pub fn poly_from_roots(roots: &[C64]) -> Vec<C64> {
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &a) in coeffs.iter().enumerate() {
            next[i] += a;
            next[i + 1] -= a * r;
        }
        coeffs = next;
    }
    coeffs
}

pub fn projective_invariants(c: &CMatrix) -> Result<ProjectiveSpectrum, SpectrumError> {
    let n = c.nrows();
    let mut eigen = linalg::eigenvalues(c).ok_or(SpectrumError::NoConvergence)?;
    let det: C64 = eigen.iter().product();
    let largest = eigen.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let smallest = eigen.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !linalg::is_finite(det) || !(smallest > SINGULAR_RATIO * largest) {
        return Err(SpectrumError::IllConditioned { det });
    }
    let scale = principal_root(det, n);
    for z in eigen.iter_mut() {
        *z /= scale;
    }
    sort_spectrum(&mut eigen);
    let ratios = eigen.iter().map(|z| z / eigen[0]).collect();
    let char_poly = poly_from_roots(&eigen);
    Ok(ProjectiveSpectrum {
        eigenvalues: eigen,
        ratios,
        char_poly,
    })
}

/// Distance between two spectra as multisets up to a common scalar:
/// `min_c max_i |c·a_i − b_{π(i)}| / max|b|`, with `c` ranging over the
/// ratios that align some `a_j` to the largest `b`, and `π` a greedy
/// nearest-neighbour matching. Robust to ties in modulus, where "ratio to
/// the first eigenvalue" is ambiguous.
pub fn projective_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let (b_ref, b_scale) = b
        .iter()
        .map(|z| (*z, z.norm()))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty");
    if b_scale == 0.0 {
        return f64::INFINITY;
    }
    let mut best = f64::INFINITY;
    for aj in a.iter().filter(|z| z.norm() > 0.0) {
        let factor = b_ref / aj;
        let mut used = vec![false; b.len()];
        let mut worst = 0.0_f64;
        for ai in a {
            let scaled = ai * factor;
            let (k, d) = b
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, bk)| (k, (scaled - bk).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("unused entry remains");
            used[k] = true;
            worst = worst.max(d);
        }
        best = best.min(worst / b_scale);
    }
    best
}
