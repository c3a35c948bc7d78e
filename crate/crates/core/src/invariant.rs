//! Assembly of `C_φ = C₁C₂⋯C_n` and its certification against the
//! conjugation identity `χ₀∘𝒜₁∘⋯∘𝒜_n(X) = C_φ·χ_n(X)·C_φ⁻¹`.

use thiserror::Error;

use crate::linalg::{self, CMatrix, C64};
use crate::roots::RootChoice;
use crate::shear::SurfaceKind;
use crate::spectrum::{self, projective_distance, SpectrumError};
use crate::torus::EdgeRoots;
use crate::weyl::{
    RootOfUnity, SphereCentrals, SphereRep, SphereSextuple, TorusRep, TorusTriple, WeylError,
};
use crate::word::Letter;
use crate::{sphere, torus};

pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("C is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },
    #[error("root choice has {roots} steps but the word has {letters}")]
    LengthMismatch { roots: usize, letters: usize },
}

/// Surface-specific central data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceParams {
    Torus { h: C64 },
    Sphere { centrals: SphereCentrals },
}

impl SurfaceParams {
    pub fn kind(&self) -> SurfaceKind {
        match self {
            SurfaceParams::Torus { .. } => SurfaceKind::Torus1,
            SurfaceParams::Sphere { .. } => SurfaceKind::Sphere4,
        }
    }

    pub fn h(&self) -> C64 {
        match self {
            SurfaceParams::Torus { h } => *h,
            SurfaceParams::Sphere { centrals } => centrals.h,
        }
    }
}

/// Generator images for either surface.
#[derive(Debug, Clone, PartialEq)]
pub enum Generators {
    Torus(TorusTriple),
    Sphere(SphereSextuple),
}

impl Generators {
    pub fn standard(
        root: &RootOfUnity,
        params: &SurfaceParams,
        at: EdgeRoots,
    ) -> Result<Self, WeylError> {
        Ok(match params {
            SurfaceParams::Torus { h } => {
                Generators::Torus(TorusRep::standard(*root, at.u, at.v, *h)?.generators)
            }
            SurfaceParams::Sphere { centrals } => {
                Generators::Sphere(SphereRep::standard(*root, at.u, at.v, *centrals)?.generators)
            }
        })
    }

    pub fn apply(
        &self,
        root: &RootOfUnity,
        params: &SurfaceParams,
        letter: Letter,
    ) -> Result<Self, WeylError> {
        Ok(match (self, params) {
            (Generators::Torus(t), _) => Generators::Torus(t.apply(root, letter)?),
            (Generators::Sphere(s), SurfaceParams::Sphere { centrals }) => {
                Generators::Sphere(s.apply(root, letter, centrals)?)
            }
            (Generators::Sphere(_), SurfaceParams::Torus { .. }) => {
                return Err(WeylError::InvalidParameter(
                    "sphere generators need sphere central values".into(),
                ))
            }
        })
    }

    pub fn intertwining_residual(&self, c: &CMatrix, target: &Generators) -> f64 {
        match (self, target) {
            (Generators::Torus(a), Generators::Torus(b)) => a.intertwining_residual(c, b),
            (Generators::Sphere(a), Generators::Sphere(b)) => a.intertwining_residual(c, b),
            _ => f64::INFINITY,
        }
    }

    /// Relations plus central equations.
    pub fn relation_residual(&self, root: &RootOfUnity, params: &SurfaceParams) -> f64 {
        match (self, params) {
            (Generators::Torus(t), SurfaceParams::Torus { h }) => {
                t.relation_residual(root).max(t.central_residual(root, *h))
            }
            (Generators::Sphere(s), SurfaceParams::Sphere { centrals }) => s
                .central_residuals(root, centrals)
                .into_iter()
                .fold(s.relation_residual(root), f64::max),
            _ => f64::INFINITY,
        }
    }
}

/// The closed-form factor for one flip.
pub fn step_factor(
    root: &RootOfUnity,
    params: &SurfaceParams,
    letter: Letter,
    from: EdgeRoots,
    to: EdgeRoots,
) -> Result<CMatrix, WeylError> {
    match params {
        SurfaceParams::Torus { h } => torus::factor(root, letter, from, to, *h),
        SurfaceParams::Sphere { centrals } => sphere::factor(root, letter, from, to, centrals),
    }
}

/// `max_X ‖𝒜(χ(X))·C − C·χ'(X)‖ / ‖𝒜(χ(X))·C‖` for a single flip.
pub fn verify_conjugation(
    root: &RootOfUnity,
    params: &SurfaceParams,
    letter: Letter,
    c: &CMatrix,
    from: EdgeRoots,
    to: EdgeRoots,
) -> Result<f64, WeylError> {
    let rep = Generators::standard(root, params, from)?;
    let next = Generators::standard(root, params, to)?;
    Ok(rep
        .apply(root, params, letter)?
        .intertwining_residual(c, &next))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    /// `C₁⋯C_n` with each factor scaled to unit Frobenius norm.
    pub c: CMatrix,
    pub factors: Vec<CMatrix>,
    /// Worst relation or central residual over the representations along the word.
    pub relations: f64,
    pub per_step: Vec<f64>,
    pub full_word: f64,
    pub condition: f64,
}

fn edge(roots: &RootChoice, i: usize) -> EdgeRoots {
    EdgeRoots::new(roots.u[i], roots.v[i])
}

pub fn assemble(
    letters: &[Letter],
    root: &RootOfUnity,
    roots: &RootChoice,
    params: &SurfaceParams,
) -> Result<Assembly, InvariantError> {
    if roots.len() != letters.len() {
        return Err(InvariantError::LengthMismatch {
            roots: roots.len(),
            letters: letters.len(),
        });
    }
    let reps: Vec<Generators> = (0..=letters.len())
        .map(|i| Generators::standard(root, params, edge(roots, i)))
        .collect::<Result<_, _>>()?;
    let relations = reps
        .iter()
        .map(|g| g.relation_residual(root, params))
        .fold(0.0, f64::max);

    let n = root.n();
    let mut c = linalg::identity(n);
    let mut factors = Vec::with_capacity(letters.len());
    let mut per_step = Vec::with_capacity(letters.len());
    for (i, &letter) in letters.iter().enumerate() {
        let factor = linalg::normalize_frobenius(&step_factor(
            root,
            params,
            letter,
            edge(roots, i),
            edge(roots, i + 1),
        )?);
        per_step.push(
            reps[i]
                .apply(root, params, letter)?
                .intertwining_residual(&factor, &reps[i + 1]),
        );
        c = &c * &factor;
        factors.push(factor);
    }

    let condition = linalg::condition_number(&c);
    if !(condition <= MAX_CONDITION) {
        return Err(InvariantError::IllConditioned { condition });
    }

    let mut image = reps[0].clone();
    for &letter in letters {
        image = image.apply(root, params, letter)?;
    }
    let full_word = image.intertwining_residual(&c, &reps[letters.len()]);
    Ok(Assembly {
        c,
        factors,
        relations,
        per_step,
        full_word,
        condition,
    })
}

/// Largest projective distance between the spectrum of `C_φ` and those of
/// the invariants assembled for each cyclic rotation of the word, with the
/// correspondingly rotated roots.
pub fn cyclic_check(
    letters: &[Letter],
    root: &RootOfUnity,
    roots: &RootChoice,
    params: &SurfaceParams,
    reference: &CMatrix,
) -> Result<f64, InvariantError> {
    let base = spectrum::projective_invariants(reference)?;
    let mut worst = 0.0_f64;
    for k in 1..letters.len() {
        let mut rotated_letters = letters.to_vec();
        rotated_letters.rotate_left(k);
        let rotated = assemble(&rotated_letters, root, &roots.rotated(k), params)?;
        let spec = spectrum::projective_invariants(&rotated.c)?;
        worst = worst.max(projective_distance(&spec.eigenvalues, &base.eigenvalues));
    }
    Ok(worst)
}
