//! Serializable report types (`schema: "qhi/1"`).

use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, C64};
use crate::roots::RootSelectors;
use crate::shear::{ShearWeights, SurfaceKind};
use crate::word::IntMatrix2x2;

pub const SCHEMA: &str = "qhi/1";

/// A complex number as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair(pub f64, pub f64);

impl From<C64> for ComplexPair {
    fn from(z: C64) -> Self {
        ComplexPair(z.re, z.im)
    }
}

impl From<ComplexPair> for C64 {
    fn from(p: ComplexPair) -> Self {
        C64::new(p.0, p.1)
    }
}

pub fn pairs(values: &[C64]) -> Vec<ComplexPair> {
    values.iter().map(|&z| z.into()).collect()
}

pub fn complexes(values: &[ComplexPair]) -> Vec<C64> {
    values.iter().map(|&p| p.into()).collect()
}

/// Row-major `[[ [re, im], … ], …]`.
pub fn matrix_to_json(m: &CMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

pub fn matrix_from_json(rows: &[Vec<ComplexPair>]) -> Option<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return None;
    }
    Some(CMatrix::from_fn(n, n, |i, j| rows[i][j].into()))
}

/// Pass/fail bounds for the certification residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Thresholds {
    pub relations: f64,
    pub per_step: f64,
    pub full_word: f64,
    pub cyclic_check: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            relations: 1e-11,
            per_step: 1e-10,
            full_word: 1e-8,
            cyclic_check: 1e-6,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<(), String> {
        let all = [
            self.relations,
            self.per_step,
            self.full_word,
            self.cyclic_check,
        ];
        if all.iter().all(|t| *t > 0.0 && t.is_finite()) {
            Ok(())
        } else {
            Err(format!("tolerances must be positive and finite: {self:?}"))
        }
    }

    /// Names and values of the residuals that exceed their bound.
    pub fn failures(&self, r: &Residuals) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |name: String, value: f64, bound: f64| {
            if !(value <= bound) {
                out.push(format!("{name} = {value:e} exceeds {bound:e}"));
            }
        };
        check("relations".into(), r.relations, self.relations);
        for (i, &v) in r.per_step.iter().enumerate() {
            check(format!("perStep[{i}]"), v, self.per_step);
        }
        check("fullWord".into(), r.full_word, self.full_word);
        check("cyclicCheck".into(), r.cyclic_check, self.cyclic_check);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Residuals {
    pub relations: f64,
    pub per_step: Vec<f64>,
    pub full_word: f64,
    pub cyclic_check: f64,
}

impl Residuals {
    pub fn per_step_max(&self) -> f64 {
        self.per_step.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootsJson {
    pub u: Vec<ComplexPair>,
    pub v: Vec<ComplexPair>,
    pub h: ComplexPair,
    pub selectors: RootSelectors,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralsJson {
    pub h: ComplexPair,
    pub p: [ComplexPair; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InvariantReport {
    pub schema: String,
    pub surface: SurfaceKind,
    pub word: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_matrix: Option<IntMatrix2x2>,
    pub negative_trace: bool,
    pub flags: Vec<String>,
    pub weights: Vec<ShearWeights>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centrals: Option<CentralsJson>,
    pub roots: RootsJson,
    #[serde(rename = "C")]
    pub c: Vec<Vec<ComplexPair>>,
    pub spectrum_ratios: Vec<ComplexPair>,
    pub char_poly: Vec<ComplexPair>,
    pub condition_number: f64,
    pub residuals: Residuals,
    pub thresholds: Thresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solutions_found: Option<usize>,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl InvariantReport {
    pub fn matrix(&self) -> Option<CMatrix> {
        matrix_from_json(&self.c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite")
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}
