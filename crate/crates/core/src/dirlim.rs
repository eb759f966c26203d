//! Finite levels of the direct limit `U_∞(C)`: weight cone membership,
//! level generators of `C_α` and consistency between levels.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cones::{
    calpha_generators, calpha_subset_cpi0, level_generator, same_cone, ConeDescription, ConeVerdict,
    GeneratorOrigin,
};
use crate::error::{Error, Result};
use crate::irreps::Representation;
use crate::liealg::{
    build_algebra, fixed_subalgebra, spectral_split, AlgebraKind, Derivation, MatrixLieAlgebra, RealVec,
};
use crate::matcore::{c64, CMatrix};

/// Prefix `(d_1, …, d_N)` of the diagonal sequence with pairwise distinct
/// entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DirectLimitSpec {
    d: Vec<f64>,
}

impl DirectLimitSpec {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        for i in 0..d.len() {
            if !d[i].is_finite() {
                return Err(Error::Schema(format!("entry {i} of d is not finite")));
            }
            for j in 0..i {
                if d[i] == d[j] {
                    return Err(Error::RepeatedEntries(j, i));
                }
            }
        }
        Ok(DirectLimitSpec { d })
    }

    pub fn level(&self) -> usize {
        self.d.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.d
    }

    /// The spec at level `n <= N`.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n > self.level() {
            return Err(Error::LengthMismatch {
                expected: self.level(),
                got: n,
            });
        }
        Ok(DirectLimitSpec { d: self.d[..n].to_vec() })
    }

    /// Pairs `(n, m)` with `d_n > d_m`.
    pub fn ordered_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for n in 0..self.level() {
            for m in 0..self.level() {
                if self.d[n] > self.d[m] {
                    out.push((n, m));
                }
            }
        }
        out
    }
}

impl TryFrom<Vec<f64>> for DirectLimitSpec {
    type Error = Error;
    fn try_from(d: Vec<f64>) -> Result<Self> {
        DirectLimitSpec::new(d)
    }
}

impl From<DirectLimitSpec> for Vec<f64> {
    fn from(s: DirectLimitSpec) -> Self {
        s.d
    }
}

/// `λ_n ≥ λ_m` whenever `d_n > d_m`.
pub fn that_d_membership(lam: &[i64], spec: &DirectLimitSpec) -> Result<bool> {
    if lam.len() != spec.level() {
        return Err(Error::LengthMismatch {
            expected: spec.level(),
            got: lam.len(),
        });
    }
    Ok(spec.ordered_pairs().into_iter().all(|(n, m)| lam[n] >= lam[m]))
}

/// Generators `i(E_mm − E_nn)` of `C_α` on `u(N)`, one per pair `d_n > d_m`,
/// as coefficient vectors in the standard basis of `u(N)`.
pub fn calpha_level_generators(spec: &DirectLimitSpec) -> Result<ConeDescription> {
    let n_size = spec.level();
    let pairs = spec.ordered_pairs();
    if n_size == 0 {
        return Ok(ConeDescription {
            ambient: "u(0)".into(),
            generators: vec![],
            origins: vec![],
            sampled: false,
        });
    }
    let g = build_algebra(AlgebraKind::Unitary(n_size))?;
    let mut generators = Vec::with_capacity(pairs.len());
    let mut origins = Vec::with_capacity(pairs.len());
    for (n, m) in pairs {
        generators.push(g.real_coords(&level_generator(n_size, n, m), 1e-10)?);
        origins.push(GeneratorOrigin::Level { n, m });
    }
    Ok(ConeDescription {
        ambient: g.name.clone(),
        generators,
        origins,
        sampled: false,
    })
}

/// Whether the level generators span the same cone as the generators
/// computed from the eigenspaces of `ad d` on `u(N)`.
pub fn generators_agree(spec: &DirectLimitSpec, tol: f64) -> Result<bool> {
    let n_size = spec.level();
    if n_size == 0 {
        return Ok(true);
    }
    let g = build_algebra(AlgebraKind::Unitary(n_size))?;
    let d = g.diagonal_element(spec.entries())?;
    let dd = spectral_split(&g, &d)?;
    let from_cones = calpha_generators(&g, &dd)?;
    let level = calpha_level_generators(spec)?;
    let to_mats = |c: &ConeDescription| -> Vec<CMatrix> { c.generators.iter().map(|x| g.matrix_of(x)).collect() };
    same_cone(&to_mats(&level), &to_mats(&from_cones), tol)
}

/// Membership at the prefix level `n` is implied by membership at the full
/// level `M = len(lam)`.
pub fn level_consistency(lam: &[i64], spec: &DirectLimitSpec, n: usize) -> Result<bool> {
    if lam.len() != spec.level() {
        return Err(Error::LengthMismatch {
            expected: spec.level(),
            got: lam.len(),
        });
    }
    if n >= lam.len() {
        return Err(Error::LengthMismatch {
            expected: lam.len().saturating_sub(1),
            got: n,
        });
    }
    let full = that_d_membership(lam, spec)?;
    let prefix = that_d_membership(&lam[..n], &spec.prefix(n)?)?;
    Ok(!full || prefix)
}

/// The character of the diagonal torus `g^0 ⊂ u(N)` labelled by `λ`; its
/// standard weight is `−λ`.
pub fn torus_character(g: &MatrixLieAlgebra, spec: &DirectLimitSpec, lam: &[i64]) -> Result<Representation> {
    if lam.len() != spec.level() {
        return Err(Error::LengthMismatch {
            expected: spec.level(),
            got: lam.len(),
        });
    }
    let d = g.diagonal_element(spec.entries())?;
    let (g0, elements) = fixed_subalgebra(g, &Derivation::Inner(d), 1e-9)?;
    let dpi = elements
        .iter()
        .map(|e| {
            let x = g.matrix_of(e);
            let value: f64 = (0..spec.level()).map(|k| -(lam[k] as f64) * x[(k, k)].im).sum();
            CMatrix::from_element(1, 1, c64(0.0, value))
        })
        .collect();
    Representation::new(Arc::new(g0), dpi, 1e-9)
}

/// Cone test `C_α ⊆ C_{π⁰}` for the torus character labelled by `λ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterCheck {
    pub member: bool,
    pub cone: ConeVerdict,
}

pub fn character_cone_check(
    spec: &DirectLimitSpec,
    lam: &[i64],
    tol: f64,
    samples: usize,
    seed: u64,
) -> Result<CharacterCheck> {
    let member = that_d_membership(lam, spec)?;
    let g = build_algebra(AlgebraKind::Unitary(spec.level()))?;
    let d = g.diagonal_element(spec.entries())?;
    let dd = spectral_split(&g, &d)?;
    let chi = torus_character(&g, spec, lam)?;
    let cone = calpha_subset_cpi0(&g, &dd, &chi, tol, samples, seed)?;
    Ok(CharacterCheck { member, cone })
}

/// `d` as a coefficient vector of `u(N)`.
pub fn diagonal_element(spec: &DirectLimitSpec) -> Result<RealVec> {
    let g = build_algebra(AlgebraKind::Unitary(spec.level()))?;
    g.diagonal_element(spec.entries())
}
