//! The shear algebra of the four-punctured sphere: six edge generators,
//! four puncture elements `P₁…P₄` and `H = q²X₁⋯X₆`.
//!
//! In the standard representation every generator is a monomial in
//! `X₁, X₂` up to a scalar, with exponents
//!
//! | generator | X₁ | X₂ |
//! |-----------|----|----|
//! | X₁, X₃    | 1  | 0  |
//! | X₂, X₄    | 0  | 1  |
//! | X₅, X₆    | −1 | −1 |
//!
//! so `X_i X_j = q^{2σ_ij} X_j X_i` with the table [`SIGMA`]. The central
//! values must satisfy `h² = p₁p₂p₃p₄`.

use serde::ser::SerializeMap;
use serde::Serialize;

use super::{
    check_not_minus_one, commutation_residual, invert, nonzero, one_plus, RootOfUnity, WeylError,
};
use crate::linalg::{self, CMatrix, C64};
use crate::report::{matrix_to_json, ComplexPair};
use crate::word::Letter;

/// `X_i X_j = q^{2·SIGMA[i][j]} X_j X_i`, 0-based.
pub const SIGMA: [[i64; 6]; 6] = [
    [0, -1, 0, -1, 1, 1],
    [1, 0, 1, 0, -1, -1],
    [0, -1, 0, -1, 1, 1],
    [1, 0, 1, 0, -1, -1],
    [-1, 1, -1, 1, 0, 0],
    [-1, 1, -1, 1, 0, 0],
];

/// Central values `H = h`, `P_j = p_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SphereCentrals {
    pub h: C64,
    pub p: [C64; 4],
}

impl SphereCentrals {
    pub fn new(h: C64, p: [C64; 4]) -> Result<Self, WeylError> {
        nonzero("h", h)?;
        for (i, &pj) in p.iter().enumerate() {
            nonzero(&format!("p{}", i + 1), pj)?;
        }
        Ok(Self { h, p })
    }

    /// `h = 1`, `p_j = −1`: the values whose classical shadow is the
    /// sign-twisted sphere recursion.
    pub fn geometric() -> Self {
        let minus = C64::new(-1.0, 0.0);
        Self {
            h: C64::new(1.0, 0.0),
            p: [minus; 4],
        }
    }

    /// `|h² − p₁p₂p₃p₄|`, relative.
    pub fn constraint_defect(&self) -> f64 {
        let prod = self.p.iter().product::<C64>();
        (self.h * self.h - prod).norm() / prod.norm().max((self.h * self.h).norm())
    }

    /// `X₃ = c₃X₁`.
    pub fn c3(&self) -> C64 {
        self.p[1] * self.p[2] / self.h
    }

    /// `X₄ = c₄X₂`.
    pub fn c4(&self) -> C64 {
        self.p[2] * self.p[3] / self.h
    }
}

/// Images of `X₁…X₆`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSextuple {
    pub x: [CMatrix; 6],
}

impl SphereSextuple {
    /// Fills in `X₃…X₆` from `X₁, X₂` and the central values:
    /// `X₅` from `P₁`, `X₃` from `P₂P₃/H`, `X₄` from `P₃P₄/H`, `X₆` from `P₄`.
    pub fn complete(
        root: &RootOfUnity,
        x1: CMatrix,
        x2: CMatrix,
        centrals: &SphereCentrals,
    ) -> Result<Self, WeylError> {
        let q = root.q();
        let m = invert("X1X2", &(&x1 * &x2))?;
        let [p1, _, p3, _] = centrals.p;
        let x3 = &x1 * centrals.c3();
        let x4 = &x2 * centrals.c4();
        let x5 = &m * (p1 / q);
        let x6 = &m * (centrals.h / (q * p3));
        Ok(Self {
            x: [x1, x2, x3, x4, x5, x6],
        })
    }

    pub fn dim(&self) -> usize {
        self.x[0].nrows()
    }

    /// `[P₁, P₂, P₃, P₄, H]` evaluated on the sextuple.
    pub fn central_elements(&self, root: &RootOfUnity) -> [CMatrix; 5] {
        let x = &self.x;
        let (q, qi, q2) = (root.q(), root.pow(-1), root.pow(2));
        [
            (&x[0] * &x[1] * &x[4]) * q,
            (&x[1] * &x[2] * &x[5]) * qi,
            (&x[2] * &x[3] * &x[4]) * q,
            (&x[0] * &x[3] * &x[5]) * q,
            (&x[0] * &x[1] * &x[2] * &x[3] * &x[4] * &x[5]) * q2,
        ]
    }

    /// Residuals of `P_j = p_j` (first four) and `H = h` (last).
    pub fn central_residuals(&self, root: &RootOfUnity, centrals: &SphereCentrals) -> [f64; 5] {
        let values = [
            centrals.p[0],
            centrals.p[1],
            centrals.p[2],
            centrals.p[3],
            centrals.h,
        ];
        let elements = self.central_elements(root);
        std::array::from_fn(|i| linalg::scalar_residual(&elements[i], values[i]))
    }

    /// Largest residual over the q-commutation relations in [`SIGMA`].
    pub fn relation_residual(&self, root: &RootOfUnity) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..6 {
            for j in (i + 1)..6 {
                let factor = root.pow(2 * SIGMA[i][j]);
                worst = worst.max(commutation_residual(&self.x[i], &self.x[j], factor));
            }
        }
        worst
    }

    /// The automorphism for `letter`: images of `X₁, X₂` by the flip formulas,
    /// the rest completed from the (fixed) central values.
    pub fn apply(
        &self,
        root: &RootOfUnity,
        letter: Letter,
        centrals: &SphereCentrals,
    ) -> Result<SphereSextuple, WeylError> {
        let q = root.q();
        let x = &self.x;
        let (y1, y2) = match letter {
            Letter::R => {
                check_not_minus_one("X1", &x[0])?;
                check_not_minus_one("X3", &x[2])?;
                let a = invert("1+qX1^-1", &one_plus(q, &invert("X1", &x[0])?))?;
                let b = invert("1+qX3^-1", &one_plus(q, &invert("X3", &x[2])?))?;
                (
                    a * b * &x[5],
                    one_plus(q, &x[0]) * one_plus(q, &x[2]) * &x[1],
                )
            }
            Letter::L => {
                check_not_minus_one("X2", &x[1])?;
                check_not_minus_one("X4", &x[3])?;
                let a = invert("1+qX2^-1", &one_plus(q, &invert("X2", &x[1])?))?;
                let b = invert("1+qX4^-1", &one_plus(q, &invert("X4", &x[3])?))?;
                (
                    a * b * &x[0],
                    one_plus(q, &x[1]) * one_plus(q, &x[3]) * &x[4],
                )
            }
        };
        Self::complete(root, y1, y2, centrals)
    }

    /// Max relative residual of `image·C = C·target` over the six generators.
    pub fn intertwining_residual(&self, c: &CMatrix, target: &SphereSextuple) -> f64 {
        self.x
            .iter()
            .zip(target.x.iter())
            .map(|(image, t)| linalg::intertwining_residual(image, c, t))
            .fold(0.0, f64::max)
    }
}

/// The standard representation: `X₁ = u·diag(q^{2a})`, `X₂ = v·S`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRep {
    pub root: RootOfUnity,
    pub u: C64,
    pub v: C64,
    pub centrals: SphereCentrals,
    pub generators: SphereSextuple,
}

const CENTRAL_TOLERANCE: f64 = 1e-10;

impl SphereRep {
    pub fn standard(
        root: RootOfUnity,
        u: C64,
        v: C64,
        centrals: SphereCentrals,
    ) -> Result<Self, WeylError> {
        nonzero("u", u)?;
        nonzero("v", v)?;
        let centrals = SphereCentrals::new(centrals.h, centrals.p)?;
        let n = root.n();
        let x1 = linalg::diagonal((0..n).map(|a| u * root.pow(2 * a as i64)));
        let x2 = linalg::cyclic_shift(n) * v;
        let generators = SphereSextuple::complete(&root, x1, x2, &centrals)?;
        let residuals = generators.central_residuals(&root, &centrals);
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        if worst > CENTRAL_TOLERANCE {
            return Err(WeylError::InconsistentCentrals(format!(
                "central residuals {residuals:?}; the values need h^2 = p1 p2 p3 p4 (defect {:.3e})",
                centrals.constraint_defect()
            )));
        }
        Ok(Self {
            root,
            u,
            v,
            centrals,
            generators,
        })
    }

    pub fn relation_residual(&self) -> f64 {
        self.generators.relation_residual(&self.root)
    }

    /// Largest residual among `P_j = p_j`, `H = h`, `X₁^N = u^N`, `X₂^N = v^N`.
    pub fn central_residual(&self) -> f64 {
        let n = self.root.n();
        let g = &self.generators;
        g.central_residuals(&self.root, &self.centrals)
            .into_iter()
            .fold(0.0, f64::max)
            .max(linalg::scalar_residual(
                &linalg::power(&g.x[0], n),
                self.u.powi(n as i32),
            ))
            .max(linalg::scalar_residual(
                &linalg::power(&g.x[1], n),
                self.v.powi(n as i32),
            ))
    }

    pub fn apply(&self, letter: Letter) -> Result<SphereSextuple, WeylError> {
        self.generators.apply(&self.root, letter, &self.centrals)
    }
}

/// `G*_{ij} = q^{2ij}`.
pub fn fourier_g_star(root: &RootOfUnity) -> CMatrix {
    let n = root.n();
    CMatrix::from_fn(n, n, |i, j| root.pow(2 * (i * j) as i64))
}

impl Serialize for SphereRep {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use std::collections::BTreeMap;
        let mut map = serializer.serialize_map(Some(5))?;
        map.serialize_entry("N", &self.root.n())?;
        map.serialize_entry("k", &self.root.k())?;
        let mut params: BTreeMap<String, ComplexPair> = BTreeMap::new();
        params.insert("u".into(), self.u.into());
        params.insert("v".into(), self.v.into());
        params.insert("h".into(), self.centrals.h.into());
        for (i, p) in self.centrals.p.iter().enumerate() {
            params.insert(format!("p{}", i + 1), (*p).into());
        }
        map.serialize_entry("params", &params)?;
        let matrices: BTreeMap<String, _> = self
            .generators
            .x
            .iter()
            .enumerate()
            .map(|(i, m)| (format!("X{}", i + 1), matrix_to_json(m)))
            .collect();
        map.serialize_entry("matrices", &matrices)?;
        let residuals: BTreeMap<&str, f64> = [
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

    fn one() -> C64 {
        c(1.0, 0.0)
    }

    #[test]
    fn sigma_is_antisymmetric_with_central_h() {
        for i in 0..6 {
            assert_eq!(SIGMA[i].iter().sum::<i64>(), 0);
            for j in 0..6 {
                assert_eq!(SIGMA[i][j], -SIGMA[j][i]);
            }
        }
    }

    #[test]
    fn scalar_case() {
        let root = RootOfUnity::primitive(1).unwrap();
        let centrals = SphereCentrals::new(
            c(2.0, 0.0),
            [c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)],
        )
        .unwrap();
        let rep = SphereRep::standard(root, c(2.0, 0.0), c(3.0, 0.0), centrals).unwrap();
        assert!((rep.generators.x[4][(0, 0)] - c(1.0 / 6.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn standard_matrices_satisfy_the_relations() {
        let root = RootOfUnity::primitive(3).unwrap();
        let rep = SphereRep::standard(root, one(), one(), SphereCentrals::geometric()).unwrap();
        let x = &rep.generators.x;
        assert!(commutation_residual(&x[1], &x[0], root.pow(2)) < 1e-15);
        assert!(rep.relation_residual() < 1e-12);
        assert!(rep.central_residual() < 1e-12);
    }

    #[test]
    fn all_ones_is_consistent() {
        let root = RootOfUnity::primitive(3).unwrap();
        let centrals = SphereCentrals::new(one(), [one(); 4]).unwrap();
        let rep = SphereRep::standard(root, one(), one(), centrals).unwrap();
        assert!(rep.central_residual() < 1e-12);
    }

    #[test]
    fn inconsistent_centrals_rejected() {
        let root = RootOfUnity::primitive(3).unwrap();
        let centrals = SphereCentrals::new(c(2.0, 0.0), [one(); 4]).unwrap();
        assert!(centrals.constraint_defect() > 0.5);
        assert!(matches!(
            SphereRep::standard(root, one(), one(), centrals),
            Err(WeylError::InconsistentCentrals(_))
        ));
    }

    #[test]
    fn automorphisms_fix_centrals() {
        for (n, k) in [(3, 1), (5, 2)] {
            let root = RootOfUnity::new(n, k).unwrap();
            let rep =
                SphereRep::standard(root, c(0.6, 0.5), c(-0.3, 1.4), SphereCentrals::geometric())
                    .unwrap();
            for letter in [Letter::R, Letter::L] {
                let image = rep.apply(letter).unwrap();
                let worst = image
                    .central_residuals(&root, &rep.centrals)
                    .into_iter()
                    .fold(0.0, f64::max);
                assert!(worst < 1e-12, "{letter:?} {worst}");
                assert!(image.relation_residual(&root) < 1e-12);
            }
        }
    }

    #[test]
    fn scalar_singular_factor() {
        let root = RootOfUnity::primitive(1).unwrap();
        let rep =
            SphereRep::standard(root, c(-1.0, 0.0), one(), SphereCentrals::geometric()).unwrap();
        assert!(matches!(
            rep.apply(Letter::R),
            Err(WeylError::SingularFactor(_))
        ));
    }
}
