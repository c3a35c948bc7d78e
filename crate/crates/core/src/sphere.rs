//! Closed-form intertwiners for the four-punctured sphere flips.
//!
//! With `m = j − i`, `c₃ = p₂p₃/h`, `c₄ = p₃p₄/h` and 0-based indices:
//!
//! ```text
//! (C*_R)_{ij}  = q^{m(m−1)} κ_R^m (v'/v)^i        ∏_{a<i} 1/((1+q^{2a+1}u)(1+q^{2a+1}c₃u)),  κ_R = q u'v'/(p₂u)
//! (C̃*_L)_{ij} = q^{m(m−1)+i(i−1)} κ_L^m (q u v v'/p₁)^i ∏_{a<i} 1/((1+q^{2a+1}v)(1+q^{2a+1}c₄v)),  κ_L = q u'v'/(c₄p₁v)
//! C*_L = G*·C̃*_L,  G*_{ij} = q^{2ij}
//! ```
//!
//! These satisfy `χ∘𝓡(X) = C*_R·χ'(X)·C*_R⁻¹` (and likewise for `𝓛`) for all
//! six generators whenever the primed N-th powers follow the sign-twisted
//! recursion with `h = 1, p_j = −1`, or more generally the recursion implied
//! by the central values.

use crate::linalg::{CMatrix, C64};
use crate::torus::{check_factor, EdgeRoots};
use crate::weyl::sphere::fourier_g_star;
use crate::weyl::{RootOfUnity, SphereCentrals, WeylError};
use crate::word::Letter;

fn pochhammer_inv(root: &RootOfUnity, t: C64, scale: C64, i: i64) -> C64 {
    let mut prod = C64::new(1.0, 0.0);
    for a in 0..i {
        let qa = root.pow(2 * a + 1);
        prod *= (1.0 + qa * t) * (1.0 + qa * scale * t);
    }
    1.0 / prod
}

pub fn cstar_r_entry(
    root: &RootOfUnity,
    from: EdgeRoots,
    to: EdgeRoots,
    centrals: &SphereCentrals,
    i: i64,
    j: i64,
) -> C64 {
    let m = j - i;
    let kappa = root.q() * to.u * to.v / (centrals.p[1] * from.u);
    root.pow(m * (m - 1))
        * kappa.powi(m as i32)
        * (to.v / from.v).powi(i as i32)
        * pochhammer_inv(root, from.u, centrals.c3(), i)
}

pub fn cstar_l_tilde_entry(
    root: &RootOfUnity,
    from: EdgeRoots,
    to: EdgeRoots,
    centrals: &SphereCentrals,
    i: i64,
    j: i64,
) -> C64 {
    let m = j - i;
    let p1 = centrals.p[0];
    let kappa = root.q() * to.u * to.v / (centrals.c4() * p1 * from.v);
    let diag = root.q() * from.u * from.v * to.v / p1;
    root.pow(m * (m - 1) + i * (i - 1))
        * kappa.powi(m as i32)
        * diag.powi(i as i32)
        * pochhammer_inv(root, from.v, centrals.c4(), i)
}

fn check_inputs(from: EdgeRoots, to: EdgeRoots) -> Result<(), WeylError> {
    for (name, z) in [("u", from.u), ("v", from.v), ("u'", to.u), ("v'", to.v)] {
        if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
            return Err(WeylError::InvalidParameter(format!(
                "{name} must be finite and nonzero"
            )));
        }
    }
    Ok(())
}

pub fn matrix_cstar_r(
    root: &RootOfUnity,
    from: EdgeRoots,
    to: EdgeRoots,
    centrals: &SphereCentrals,
) -> Result<CMatrix, WeylError> {
    check_inputs(from, to)?;
    check_factor("u", root, from.u)?;
    check_factor("c3 u", root, centrals.c3() * from.u)?;
    let n = root.n();
    Ok(CMatrix::from_fn(n, n, |i, j| {
        cstar_r_entry(root, from, to, centrals, i as i64, j as i64)
    }))
}

pub fn matrix_cstar_l_tilde(
    root: &RootOfUnity,
    from: EdgeRoots,
    to: EdgeRoots,
    centrals: &SphereCentrals,
) -> Result<CMatrix, WeylError> {
    check_inputs(from, to)?;
    check_factor("v", root, from.v)?;
    check_factor("c4 v", root, centrals.c4() * from.v)?;
    let n = root.n();
    Ok(CMatrix::from_fn(n, n, |i, j| {
        cstar_l_tilde_entry(root, from, to, centrals, i as i64, j as i64)
    }))
}

pub fn matrix_cstar_l(
    root: &RootOfUnity,
    from: EdgeRoots,
    to: EdgeRoots,
    centrals: &SphereCentrals,
) -> Result<CMatrix, WeylError> {
    Ok(fourier_g_star(root) * matrix_cstar_l_tilde(root, from, to, centrals)?)
}

pub fn factor(
    root: &RootOfUnity,
    letter: Letter,
    from: EdgeRoots,
    to: EdgeRoots,
    centrals: &SphereCentrals,
) -> Result<CMatrix, WeylError> {
    match letter {
        Letter::R => matrix_cstar_r(root, from, to, centrals),
        Letter::L => matrix_cstar_l(root, from, to, centrals),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::shear::{step, ShearWeights, SurfaceKind};
    use crate::weyl::SphereRep;

    fn image(root: &RootOfUnity, letter: Letter, from: EdgeRoots) -> EdgeRoots {
        let n = root.n() as i32;
        let w = ShearWeights::new(from.u.powi(n), from.v.powi(n), c(1.0, 0.0));
        let out = step(&w, letter, SurfaceKind::Sphere4).unwrap();
        EdgeRoots::new(out.x1.powf(1.0 / n as f64), out.x2.powf(1.0 / n as f64))
    }

    #[test]
    fn single_steps_intertwine() {
        let centrals = SphereCentrals::geometric();
        for (n, k) in [(3, 1), (5, 2), (7, 3)] {
            let root = RootOfUnity::new(n, k).unwrap();
            let from = EdgeRoots::new(c(0.6, 0.5), c(-0.3, 1.4));
            let rep = SphereRep::standard(root, from.u, from.v, centrals).unwrap();
            for letter in [Letter::R, Letter::L] {
                let to = image(&root, letter, from);
                let next = SphereRep::standard(root, to.u, to.v, centrals).unwrap();
                let cm = factor(&root, letter, from, to, &centrals).unwrap();
                let res = rep
                    .apply(letter)
                    .unwrap()
                    .intertwining_residual(&cm, &next.generators);
                assert!(res < 1e-10, "N={n} {letter:?} residual {res}");
            }
        }
    }

    #[test]
    fn scalar_case() {
        let root = RootOfUnity::primitive(1).unwrap();
        let e = EdgeRoots::new(c(0.5, 0.5), c(2.0, 0.0));
        let m = factor(&root, Letter::R, e, e, &SphereCentrals::geometric()).unwrap();
        assert_eq!(m.nrows(), 1);
    }
}
