//! Closed-form intertwiners for the torus flips.
//!
//! `C_R(u, v, u', v', h)` satisfies `χ_{u,v,h}∘𝓡(X) = C_R·χ_{u',v',h}(X)·C_R⁻¹`
//! and `C_L = G·C̃_L` does the same for `𝓛`, whenever the N-th powers of the
//! primed parameters follow the shear recursions. Indices are 0-based.

use crate::linalg::{CMatrix, C64};
use crate::weyl::torus::fourier_g;
use crate::weyl::{RootOfUnity, WeylError, SINGULAR_TOLERANCE};
use crate::word::Letter;

/// Edge parameters `(u, v)` on one side of a flip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRoots {
    pub u: C64,
    pub v: C64,
}

impl EdgeRoots {
    pub fn new(u: C64, v: C64) -> Self {
        Self { u, v }
    }
}

/// `1 / ∏_{α=1}^{i} (1+q^{4α−3}t)(1+q^{4α−1}t)`.
fn pochhammer_inv(root: &RootOfUnity, t: C64, i: i64) -> C64 {
    let mut prod = C64::new(1.0, 0.0);
    for alpha in 1..=i {
        prod *= (1.0 + root.pow(4 * alpha - 3) * t) * (1.0 + root.pow(4 * alpha - 1) * t);
    }
    1.0 / prod
}

/// Rejects `t` with `t^N = −1`.
pub(crate) fn check_factor(name: &str, root: &RootOfUnity, t: C64) -> Result<(), WeylError> {
    let power = t.powi(root.n() as i32);
    if (power + 1.0).norm() <= SINGULAR_TOLERANCE * power.norm().max(1.0) {
        return Err(WeylError::SingularFactor(format!("{name}^N = -1")));
    }
    Ok(())
}

fn checked_nonzero(values: &[(&str, C64)]) -> Result<(), WeylError> {
    for (name, z) in values {
        if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
            return Err(WeylError::InvalidParameter(format!(
                "{name} must be finite and nonzero"
            )));
        }
    }
    Ok(())
}

/// `(C_R)_{ij} = q^{2(j−i)²} (u'v'/(uh))^{j−i} (v'/v)^i ∏_{α=1}^{i} 1/((1+q^{4α−3}u)(1+q^{4α−1}u))`.
/// Valid for any integers `i, j ≥ 0`; the matrix uses `0 ≤ i, j < N`.
pub fn c_r_entry(
    root: &RootOfUnity,
    from: EdgeRoots,
    to: EdgeRoots,
    h: C64,
    i: i64,
    j: i64,
) -> C64 {
    let m = j - i;
    root.pow(2 * m * m)
        * (to.u * to.v / (from.u * h)).powi(m as i32)
        * (to.v / from.v).powi(i as i32)
        * pochhammer_inv(root, from.u, i)
}

pub fn matrix_c_r(
    root: &RootOfUnity,
    from: EdgeRoots,
    to: EdgeRoots,
    h: C64,
) -> Result<CMatrix, WeylError> {
    checked_nonzero(&[
        ("u", from.u),
        ("v", from.v),
        ("u'", to.u),
        ("v'", to.v),
        ("h", h),
    ])?;
    check_factor("u", root, from.u)?;
    let n = root.n();
    Ok(CMatrix::from_fn(n, n, |i, j| {
        c_r_entry(root, from, to, h, i as i64, j as i64)
    }))
}

/// `(C̃_L)_{ij} = q^{2(j−i)²+2i²} (u''v''/(vh))^{j−i} (uvv''/h)^i ∏_{α=1}^{i} 1/((1+q^{4α−3}v)(1+q^{4α−1}v))`.
pub fn c_l_tilde_entry(
    root: &RootOfUnity,
    from: EdgeRoots,
    to: EdgeRoots,
    h: C64,
    i: i64,
    j: i64,
) -> C64 {
    let m = j - i;
    root.pow(2 * m * m + 2 * i * i)
        * (to.u * to.v / (from.v * h)).powi(m as i32)
        * (from.u * from.v * to.v / h).powi(i as i32)
        * pochhammer_inv(root, from.v, i)
}

pub fn matrix_c_l_tilde(
    root: &RootOfUnity,
    from: EdgeRoots,
    to: EdgeRoots,
    h: C64,
) -> Result<CMatrix, WeylError> {
    checked_nonzero(&[
        ("u", from.u),
        ("v", from.v),
        ("u''", to.u),
        ("v''", to.v),
        ("h", h),
    ])?;
    check_factor("v", root, from.v)?;
    let n = root.n();
    Ok(CMatrix::from_fn(n, n, |i, j| {
        c_l_tilde_entry(root, from, to, h, i as i64, j as i64)
    }))
}

/// `C_L = G·C̃_L` with `G_{ij} = q^{4ij}`.
pub fn matrix_c_l(
    root: &RootOfUnity,
    from: EdgeRoots,
    to: EdgeRoots,
    h: C64,
) -> Result<CMatrix, WeylError> {
    Ok(fourier_g(root) * matrix_c_l_tilde(root, from, to, h)?)
}

/// `(C_L)_{ij} = Σ_k q^{4ik} (C̃_L)_{kj}`, summed entrywise.
pub fn c_l_entry_summed(
    root: &RootOfUnity,
    from: EdgeRoots,
    to: EdgeRoots,
    h: C64,
    i: i64,
    j: i64,
) -> C64 {
    (0..root.n() as i64)
        .map(|k| root.pow(4 * i * k) * c_l_tilde_entry(root, from, to, h, k, j))
        .sum()
}

pub fn factor(
    root: &RootOfUnity,
    letter: Letter,
    from: EdgeRoots,
    to: EdgeRoots,
    h: C64,
) -> Result<CMatrix, WeylError> {
    match letter {
        Letter::R => matrix_c_r(root, from, to, h),
        Letter::L => matrix_c_l(root, from, to, h),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, c};
    use crate::weyl::TorusRep;

    /// Roots `(u', v')` of the R-step images of `(u^N, v^N)` at `h = 1`.
    fn r_image(root: &RootOfUnity, from: EdgeRoots) -> EdgeRoots {
        let n = root.n() as f64;
        let x = from.u.powf(n);
        let y = from.v.powf(n);
        let x1 = 1.0 / (x * y * (1.0 + 1.0 / x).powi(2));
        let x2 = (1.0 + x).powi(2) * y;
        EdgeRoots::new(x1.powf(1.0 / n), x2.powf(1.0 / n))
    }

    fn l_image(root: &RootOfUnity, from: EdgeRoots) -> EdgeRoots {
        let n = root.n() as f64;
        let x = from.u.powf(n);
        let y = from.v.powf(n);
        let x1 = x / (1.0 + 1.0 / y).powi(2);
        let x2 = (1.0 + y).powi(2) / (x * y);
        EdgeRoots::new(x1.powf(1.0 / n), x2.powf(1.0 / n))
    }

    #[test]
    fn scalar_case_is_nonzero() {
        let root = RootOfUnity::primitive(1).unwrap();
        let from = EdgeRoots::new(c(0.5, 0.1), c(1.2, -0.3));
        let one = c(1.0, 0.0);
        for letter in [Letter::R, Letter::L] {
            let m = factor(&root, letter, from, from, one).unwrap();
            assert_eq!(m.nrows(), 1);
            assert!(m[(0, 0)].norm() > 0.0);
        }
    }

    #[test]
    fn single_steps_intertwine() {
        for (n, k) in [(3, 1), (5, 2), (7, 1)] {
            let root = RootOfUnity::new(n, k).unwrap();
            let one = c(1.0, 0.0);
            let from = EdgeRoots::new(c(0.7, 0.4), c(-0.5, 0.9));
            let rep = TorusRep::standard(root, from.u, from.v, one).unwrap();
            for letter in [Letter::R, Letter::L] {
                let to = match letter {
                    Letter::R => r_image(&root, from),
                    Letter::L => l_image(&root, from),
                };
                let next = TorusRep::standard(root, to.u, to.v, one).unwrap();
                let cm = factor(&root, letter, from, to, one).unwrap();
                let res = rep
                    .apply(letter)
                    .unwrap()
                    .intertwining_residual(&cm, &next.generators);
                assert!(res < 1e-10, "N={n} {letter:?} residual {res}");
            }
        }
    }

    #[test]
    fn summed_form_matches_product() {
        let root = RootOfUnity::new(5, 2).unwrap();
        let from = EdgeRoots::new(c(0.7, 0.4), c(-0.5, 0.9));
        let to = l_image(&root, from);
        let one = c(1.0, 0.0);
        let cl = matrix_c_l(&root, from, to, one).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let summed = c_l_entry_summed(&root, from, to, one, i, j);
                assert!(
                    (summed - cl[(i as usize, j as usize)]).norm() < 1e-12 * linalg::frobenius(&cl)
                );
            }
        }
    }

    #[test]
    fn singular_u_rejected() {
        let root = RootOfUnity::primitive(3).unwrap();
        let u = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let e = EdgeRoots::new(u, c(1.0, 0.0));
        assert!(matches!(
            matrix_c_r(&root, e, e, c(1.0, 0.0)),
            Err(WeylError::SingularFactor(_))
        ));
        let e = EdgeRoots::new(c(1.0, 0.0), u);
        assert!(matches!(
            matrix_c_l(&root, e, e, c(1.0, 0.0)),
            Err(WeylError::SingularFactor(_))
        ));
    }
}
