//! The triangle algebra of the once-punctured torus: generators `U, V, W`
//! with `VU = q⁴UV`, `WV = q⁴VW`, `UW = q⁴WU` and central `H = q²UVW`.

use serde::ser::SerializeMap;
use serde::Serialize;

use super::{
    check_not_minus_one, commutation_residual, invert, nonzero, one_plus, RootOfUnity, WeylError,
};
use crate::linalg::{self, CMatrix, C64};
use crate::report::{matrix_to_json, ComplexPair};
use crate::word::Letter;

/// Images of `U, V, W` under a representation.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusTriple {
    pub u: CMatrix,
    pub v: CMatrix,
    pub w: CMatrix,
}

impl TorusTriple {
    pub fn generators(&self) -> [&CMatrix; 3] {
        [&self.u, &self.v, &self.w]
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// Largest relative residual of the three q-commutation relations.
    pub fn relation_residual(&self, root: &RootOfUnity) -> f64 {
        let q4 = root.pow(4);
        commutation_residual(&self.v, &self.u, q4)
            .max(commutation_residual(&self.w, &self.v, q4))
            .max(commutation_residual(&self.u, &self.w, q4))
    }

    /// `q²UVW`.
    pub fn central_h(&self, root: &RootOfUnity) -> CMatrix {
        (&self.u * &self.v * &self.w) * root.pow(2)
    }

    /// Residual of `q²UVW = h·id`.
    pub fn central_residual(&self, root: &RootOfUnity, h: C64) -> f64 {
        linalg::scalar_residual(&self.central_h(root), h)
    }

    /// The triple `(𝒜(U), 𝒜(V), 𝒜(W))` of the automorphism for `letter`,
    /// evaluated on this triple.
    pub fn apply(&self, root: &RootOfUnity, letter: Letter) -> Result<TorusTriple, WeylError> {
        let (q, q3) = (root.q(), root.pow(3));
        match letter {
            Letter::R => {
                check_not_minus_one("U", &self.u)?;
                let u_inv = invert("U", &self.u)?;
                let a = invert("1+qU^-1", &one_plus(q, &u_inv))?;
                let b = invert("1+q^3U^-1", &one_plus(q3, &u_inv))?;
                Ok(TorusTriple {
                    u: a * b * &self.w,
                    v: one_plus(q, &self.u) * one_plus(q3, &self.u) * &self.v,
                    w: u_inv,
                })
            }
            Letter::L => {
                check_not_minus_one("V", &self.v)?;
                let v_inv = invert("V", &self.v)?;
                let a = invert("1+qV^-1", &one_plus(q, &v_inv))?;
                let b = invert("1+q^3V^-1", &one_plus(q3, &v_inv))?;
                Ok(TorusTriple {
                    u: a * b * &self.u,
                    v: one_plus(q, &self.v) * one_plus(q3, &self.v) * &self.w,
                    w: v_inv,
                })
            }
        }
    }

    /// Max relative residual of `image·C = C·target` over the three generators.
    pub fn intertwining_residual(&self, c: &CMatrix, target: &TorusTriple) -> f64 {
        self.generators()
            .iter()
            .zip(target.generators())
            .map(|(image, t)| linalg::intertwining_residual(image, c, t))
            .fold(0.0, f64::max)
    }
}

/// An irreducible representation with central values `U^N = u^N`,
/// `V^N = v^N`, `H = h`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusRep {
    pub root: RootOfUnity,
    pub u: C64,
    pub v: C64,
    pub h: C64,
    pub generators: TorusTriple,
}

fn check_params(u: C64, v: C64, h: C64) -> Result<(), WeylError> {
    nonzero("u", u)?;
    nonzero("v", v)?;
    nonzero("h", h)
}

impl TorusRep {
    /// The standard representation: `U` diagonal with entries `u·q^{4a}`,
    /// `V = v·S` with `S` the cyclic shift `e_a ↦ e_{a−1}`, and `W` fixed by `q²UVW = h`.
    pub fn standard(root: RootOfUnity, u: C64, v: C64, h: C64) -> Result<Self, WeylError> {
        check_params(u, v, h)?;
        let n = root.n();
        let zero = C64::new(0.0, 0.0);
        let u_mat = linalg::diagonal((0..n).map(|a| u * root.pow(4 * a as i64)));
        let v_mat = linalg::cyclic_shift(n) * v;
        let w_scale = root.pow(-2) * h / (u * v);
        let w_mat = CMatrix::from_fn(n, n, |i, j| {
            if i == (j + 1) % n {
                w_scale * root.pow(-4 * j as i64)
            } else {
                zero
            }
        });
        Ok(Self {
            root,
            u,
            v,
            h,
            generators: TorusTriple {
                u: u_mat,
                v: v_mat,
                w: w_mat,
            },
        })
    }

    /// The companion representation with `U` cyclic and `V` diagonal,
    /// conjugate to [`TorusRep::standard`] by [`fourier_g`].
    pub fn mu(root: RootOfUnity, u: C64, v: C64, h: C64) -> Result<Self, WeylError> {
        check_params(u, v, h)?;
        let n = root.n();
        let zero = C64::new(0.0, 0.0);
        let u_mat = linalg::cyclic_shift(n).transpose() * u;
        let v_mat = linalg::diagonal((0..n).map(|a| v * root.pow(4 * a as i64)));
        let w_scale = root.pow(-2) * h / (u * v);
        let w_mat = CMatrix::from_fn(n, n, |i, j| {
            if j == (i + 1) % n {
                w_scale * root.pow(-4 * i as i64)
            } else {
                zero
            }
        });
        Ok(Self {
            root,
            u,
            v,
            h,
            generators: TorusTriple {
                u: u_mat,
                v: v_mat,
                w: w_mat,
            },
        })
    }

    pub fn relation_residual(&self) -> f64 {
        self.generators.relation_residual(&self.root)
    }

    /// Largest residual among the central equations `q²UVW = h`, `U^N = u^N`, `V^N = v^N`.
    pub fn central_residual(&self) -> f64 {
        let n = self.root.n() as i32;
        let g = &self.generators;
        g.central_residual(&self.root, self.h)
            .max(linalg::scalar_residual(
                &linalg::power(&g.u, n as usize),
                self.u.powi(n),
            ))
            .max(linalg::scalar_residual(
                &linalg::power(&g.v, n as usize),
                self.v.powi(n),
            ))
    }

    pub fn apply(&self, letter: Letter) -> Result<TorusTriple, WeylError> {
        self.generators.apply(&self.root, letter)
    }
}

/// `G_{ij} = q^{4ij}`.
pub fn fourier_g(root: &RootOfUnity) -> CMatrix {
    let n = root.n();
    CMatrix::from_fn(n, n, |i, j| root.pow(4 * (i * j) as i64))
}

impl Serialize for TorusRep {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(5))?;
        map.serialize_entry("N", &self.root.n())?;
        map.serialize_entry("k", &self.root.k())?;
        let params: Vec<(&str, ComplexPair)> = vec![
            ("u", self.u.into()),
            ("v", self.v.into()),
            ("h", self.h.into()),
        ];
        map.serialize_entry(
            "params",
            &params
                .into_iter()
                .collect::<std::collections::BTreeMap<_, _>>(),
        )?;
        let g = &self.generators;
        let matrices: std::collections::BTreeMap<&str, _> = [
            ("U", matrix_to_json(&g.u)),
            ("V", matrix_to_json(&g.v)),
            ("W", matrix_to_json(&g.w)),
        ]
        .into_iter()
        .collect();
        map.serialize_entry("matrices", &matrices)?;
        let residuals: std::collections::BTreeMap<&str, f64> = [
            ("relations", self.relation_residual()),
            ("centrals", self.central_residual()),
        ]
        .into_iter()
        .collect();
        map.serialize_entry("residuals", &residuals)?;
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn scalar_case() {
        let root = RootOfUnity::primitive(1).unwrap();
        let rep = TorusRep::standard(root, c(2.0, 0.0), c(3.0, 0.0), c(5.0, 0.0)).unwrap();
        assert_eq!(rep.generators.u[(0, 0)], c(2.0, 0.0));
        assert_eq!(rep.generators.v[(0, 0)], c(3.0, 0.0));
        assert!((rep.generators.w[(0, 0)] - c(5.0 / 6.0, 0.0)).norm() < 1e-15);
        let mu = TorusRep::mu(root, c(2.0, 0.0), c(3.0, 0.0), c(5.0, 0.0)).unwrap();
        assert_eq!(mu.generators, rep.generators);
    }

    #[test]
    fn relations_hold() {
        let root = RootOfUnity::primitive(3).unwrap();
        let one = c(1.0, 0.0);
        let rep = TorusRep::standard(root, one, one, one).unwrap();
        assert!(rep.relation_residual() < 1e-14);
        assert!(rep.central_residual() < 1e-14);
    }

    #[test]
    fn mu_is_conjugate_to_standard() {
        for (n, k) in [(3, 1), (5, 2), (7, 3)] {
            let root = RootOfUnity::new(n, k).unwrap();
            let (u, v, h) = (c(0.8, 0.6), c(-0.6, 0.8), C64::from_polar(1.0, 0.4));
            let chi = TorusRep::standard(root, u, v, h).unwrap();
            let mu = TorusRep::mu(root, u, v, h).unwrap();
            assert!(mu.relation_residual() < 1e-12);
            assert!(mu.central_residual() < 1e-12);
            let g = fourier_g(&root);
            // G μ(X) G⁻¹ = χ(X)  ⇔  χ(X)·G = G·μ(X)
            assert!(chi.generators.intertwining_residual(&g, &mu.generators) < 1e-12);
        }
    }

    #[test]
    fn zero_parameter_rejected() {
        let root = RootOfUnity::primitive(3).unwrap();
        assert!(matches!(
            TorusRep::standard(root, c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)),
            Err(WeylError::InvalidParameter(_))
        ));
    }

    #[test]
    fn automorphism_examples() {
        let root = RootOfUnity::primitive(5).unwrap();
        let rep = TorusRep::standard(root, c(0.7, 0.2), c(-0.4, 1.1), c(1.0, 0.0)).unwrap();
        let image = rep.apply(Letter::R).unwrap();
        let u_inv = linalg::inverse(&rep.generators.u).unwrap();
        assert!(linalg::relative_difference(&image.w, &u_inv) < 1e-15);
        for letter in [Letter::R, Letter::L] {
            let image = rep.apply(letter).unwrap();
            assert!(image.relation_residual(&root) < 1e-12);
            assert!(image.central_residual(&root, rep.h) < 1e-12);
        }
    }

    #[test]
    fn singular_factor_detected() {
        let root = RootOfUnity::primitive(3).unwrap();
        // u³ = −1
        let u = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let rep = TorusRep::standard(root, u, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(matches!(
            rep.apply(Letter::R),
            Err(WeylError::SingularFactor(_))
        ));
        let rep = TorusRep::standard(root, c(1.0, 0.0), u, c(1.0, 0.0)).unwrap();
        assert!(matches!(
            rep.apply(Letter::L),
            Err(WeylError::SingularFactor(_))
        ));
    }

    #[test]
    fn json_shape() {
        let root = RootOfUnity::primitive(3).unwrap();
        let rep = TorusRep::standard(root, c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let value = serde_json::to_value(&rep).unwrap();
        assert_eq!(value["N"], 3);
        assert_eq!(value["matrices"]["U"].as_array().unwrap().len(), 3);
        assert!(value["residuals"]["relations"].as_f64().unwrap() < 1e-15);
    }
}
