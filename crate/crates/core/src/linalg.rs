//! Small dense complex linear algebra layer on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn diagonal(entries: impl IntoIterator<Item = C64>) -> CMatrix {
    let entries: Vec<C64> = entries.into_iter().collect();
    let n = entries.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            entries[i]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Cyclic shift with ones at `(i, i + 1 mod n)`.
pub fn cyclic_shift(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if (i + 1) % n == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    let inv = m.clone().try_inverse()?;
    inv.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then_some(inv)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖a − b‖_F / max(‖a‖_F, ‖b‖_F)`, zero when both vanish.
pub fn relative_difference(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = frobenius(a).max(frobenius(b));
    if scale == 0.0 {
        return 0.0;
    }
    frobenius(&(a - b)) / scale
}

/// Relative distance of `m` from `value · id`.
pub fn scalar_residual(m: &CMatrix, value: C64) -> f64 {
    let target = identity(m.nrows()) * value;
    relative_difference(m, &target)
}

/// Relative residual of the intertwining relation `image · c = c · target`.
pub fn intertwining_residual(image: &CMatrix, c: &CMatrix, target: &CMatrix) -> f64 {
    let lhs = image * c;
    let rhs = c * target;
    let scale = frobenius(&lhs).max(frobenius(&rhs));
    if scale == 0.0 {
        return 0.0;
    }
    frobenius(&(lhs - rhs)) / scale
}

/// Left-to-right repeated product, so results are reproducible bit for bit.
pub fn power(m: &CMatrix, exponent: usize) -> CMatrix {
    let mut acc = identity(m.nrows());
    for _ in 0..exponent {
        acc = &acc * m;
    }
    acc
}

/// The scalar `s` with `m^N = s · id` for the generators of an N-dimensional
/// representation; read off as the normalized trace.
pub fn central_power(m: &CMatrix) -> C64 {
    let n = m.nrows();
    power(m, n).trace() / n as f64
}

pub fn eigenvalues(m: &CMatrix) -> Option<Vec<C64>> {
    let schur = m.clone().schur();
    let ev = schur.eigenvalues()?;
    Some(ev.iter().copied().collect())
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `m / ‖m‖_F`.
pub fn normalize_frobenius(m: &CMatrix) -> CMatrix {
    let norm = frobenius(m);
    if norm == 0.0 {
        m.clone()
    } else {
        m / C64::new(norm, 0.0)
    }
}

pub fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
