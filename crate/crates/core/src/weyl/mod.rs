//! Finite-dimensional representations of the quantum shear algebras at a root
//! of unity, and the action of the `R`/`L` automorphisms on them.

mod root;
pub mod sphere;
pub mod torus;

pub use root::RootOfUnity;
pub use sphere::{SphereCentrals, SphereRep, SphereSextuple};
pub use torus::{TorusRep, TorusTriple};

use thiserror::Error;

use crate::linalg::{self, CMatrix, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeylError {
    #[error("invalid root of unity: {0}")]
    InvalidRoot(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular factor: {0}")]
    SingularFactor(String),
    #[error("inconsistent central values: {0}")]
    InconsistentCentrals(String),
}

/// Relative tolerance for `X^N = −1`, where some factor `1 + q^{odd}X` is singular.
pub(crate) const SINGULAR_TOLERANCE: f64 = 1e-10;

pub(crate) fn nonzero(name: &str, z: C64) -> Result<(), WeylError> {
    if z.norm() == 0.0 || !linalg::is_finite(z) {
        return Err(WeylError::InvalidParameter(format!(
            "{name} must be finite and nonzero, got {z}"
        )));
    }
    Ok(())
}

/// Checks that `x^N` of the generator `m` is not −1.
pub(crate) fn check_not_minus_one(name: &str, m: &CMatrix) -> Result<(), WeylError> {
    let power = linalg::central_power(m);
    if (power + 1.0).norm() <= SINGULAR_TOLERANCE * power.norm().max(1.0) {
        return Err(WeylError::SingularFactor(format!("{name}^N = -1")));
    }
    Ok(())
}

/// `(1 + c·m)`.
pub(crate) fn one_plus(c: C64, m: &CMatrix) -> CMatrix {
    linalg::identity(m.nrows()) + m * c
}

pub(crate) fn invert(name: &str, m: &CMatrix) -> Result<CMatrix, WeylError> {
    linalg::inverse(m).ok_or_else(|| WeylError::SingularFactor(format!("{name} is not invertible")))
}

/// Relative residual of `a·b = factor·b·a`.
pub(crate) fn commutation_residual(a: &CMatrix, b: &CMatrix, factor: C64) -> f64 {
    let lhs = a * b;
    let rhs = (b * a) * factor;
    linalg::relative_difference(&lhs, &rhs)
}
