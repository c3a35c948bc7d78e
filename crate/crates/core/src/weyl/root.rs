use serde::{Deserialize, Serialize};

use super::WeylError;
use crate::linalg::C64;

/// The primitive root `q = exp(2πik/N)` with `N` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootOfUnity {
    n: usize,
    k: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl RootOfUnity {
    pub fn new(n: usize, k: i64) -> Result<Self, WeylError> {
        if n == 0 || n.is_multiple_of(2) {
            return Err(WeylError::InvalidRoot(format!(
                "N = {n} must be odd and positive"
            )));
        }
        if n > i32::MAX as usize {
            return Err(WeylError::InvalidRoot(format!("N = {n} is too large")));
        }
        if gcd(k, n as i64) != 1 {
            return Err(WeylError::InvalidRoot(format!(
                "k = {k} is not coprime to N = {n}"
            )));
        }
        Ok(Self { n, k })
    }

    /// `k = 1`.
    pub fn primitive(n: usize) -> Result<Self, WeylError> {
        Self::new(n, 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn q(&self) -> C64 {
        self.pow(1)
    }

    /// `q^m`, evaluated from the reduced exponent so large powers stay exact.
    pub fn pow(&self, m: i64) -> C64 {
        let n = self.n as i128;
        let r = (self.k as i128 * m as i128).rem_euclid(n);
        if r == 0 {
            return C64::new(1.0, 0.0);
        }
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / n as f64)
    }

    /// The selector phase `exp(2πi r/N)` multiplying a principal N-th root.
    pub fn selector_phase(&self, r: usize) -> C64 {
        let r = r % self.n;
        if r == 0 {
            return C64::new(1.0, 0.0);
        }
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / self.n as f64)
    }
}
