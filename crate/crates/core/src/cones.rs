//! The cone `C_alpha` in `g^0` spanned by `i[z*, z]` over positive
//! eigenvectors, positive cones of representations, and the tests
//! comparing them.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irreps::{block_irrep, level_blocks, Representation, Weight};
use crate::liealg::{
    build_algebra, fixed_subalgebra, spectral_split, AlgebraKind, Derivation, DerivationData,
    MatrixLieAlgebra, RealVec, RootDatum,
};
use crate::matcore::{c64, eig_hermitian, frobenius, CMatrix, CVector, CLUSTER_TOL, I};

/// Default number of random eigenspace samples per positive eigenspace.
pub const DEFAULT_SAMPLES: usize = 32;

/// Default relative tolerance for positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-8;

/// Where a cone generator came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorOrigin {
    /// `i[x*, x]` for basis vector `index` of the eigenspace `lambda`.
    Basis { lambda: f64, index: usize },
    /// `i[z*, z]` with `z = (x_a + eps x_b) / sqrt 2`, `eps` in `{1, i}`.
    Mixed { lambda: f64, a: usize, b: usize, imaginary: bool },
    /// A random unit vector of the eigenspace.
    Sample { lambda: f64, index: usize },
    /// `i(E_mm - E_nn)` at a finite level of the unitary tower.
    Level { n: usize, m: usize },
}

/// A finitely generated convex cone in `g^0`, stored by coefficient vectors
/// in the ambient algebra.
#[derive(Debug, Clone)]
pub struct ConeDescription {
    pub ambient: String,
    pub generators: Vec<RealVec>,
    pub origins: Vec<GeneratorOrigin>,
    /// Some positive eigenspace has dimension above one, so the generator
    /// list is a finite sample of the generating set.
    pub sampled: bool,
}

impl ConeDescription {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// `i[z*, z]` as a real coefficient vector.
pub fn positive_bracket(g: &MatrixLieAlgebra, z: &CVector) -> Result<RealVec> {
    let b = g.bracket(&g.star(z), z) * I;
    let scale = 1.0 + b.norm();
    let imag = b.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if imag > 1e-8 * scale {
        return Err(Error::NotInAlgebra(imag / scale));
    }
    Ok(RealVec::from_iterator(b.len(), b.iter().map(|c| c.re)))
}

/// Generators `i[x*, x]` of `C_alpha` over an orthonormal basis of each
/// positive eigenspace of `-i D`, plus the mixed vectors
/// `(x_a + x_b)/sqrt 2` and `(x_a + i x_b)/sqrt 2` inside eigenspaces of
/// dimension above one.
pub fn calpha_generators(g: &MatrixLieAlgebra, dd: &DerivationData) -> Result<ConeDescription> {
    if !dd.diagonalizable || !dd.real_spectrum {
        return Err(Error::NotDiagonalizable);
    }
    let tol = CLUSTER_TOL * (1.0 + dd.add.norm());
    let mut generators = Vec::new();
    let mut origins = Vec::new();
    let mut sampled = false;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for space in dd.positive(tol) {
        let lambda = space.lambda.re;
        let cols: Vec<CVector> = (0..space.dim()).map(|k| space.basis.column(k).into_owned()).collect();
        for (index, x) in cols.iter().enumerate() {
            generators.push(positive_bracket(g, x)?);
            origins.push(GeneratorOrigin::Basis { lambda, index });
        }
        if cols.len() > 1 {
            sampled = true;
            for a in 0..cols.len() {
                for b in a + 1..cols.len() {
                    for imaginary in [false, true] {
                        let eps = if imaginary { I } else { c64(1.0, 0.0) };
                        let z = (&cols[a] + &cols[b] * eps) * c64(s, 0.0);
                        generators.push(positive_bracket(g, &z)?);
                        origins.push(GeneratorOrigin::Mixed { lambda, a, b, imaginary });
                    }
                }
            }
        }
    }
    let cone = ConeDescription {
        ambient: g.name.clone(),
        generators,
        origins,
        sampled,
    };
    for gen in &cone.generators {
        let r = (&dd.add * gen).norm();
        if r > 1e-8 * (1.0 + gen.norm()) * (1.0 + dd.add.norm()) {
            return Err(Error::InvalidAlgebra(format!(
                "cone generator leaves the centraliser (residual {r:.3e})"
            )));
        }
    }
    Ok(cone)
}

/// Minimal eigenvalue of `-i dpi(x)` for `x` given as a matrix.
pub fn min_energy(rep: &Representation, x: &CMatrix) -> Result<f64> {
    let op = rep.eval_matrix(x)? * c64(0.0, -1.0);
    let eig = eig_hermitian(&op, 1e-8)?;
    Ok(eig.values.first().copied().unwrap_or(0.0))
}

fn psd_margin(rep: &Representation, x: &CMatrix) -> Result<(f64, f64)> {
    let op = rep.eval_matrix(x)? * c64(0.0, -1.0);
    let eig = eig_hermitian(&op, 1e-8)?;
    let norm = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((eig.values.first().copied().unwrap_or(0.0), norm))
}

/// Whether `x` (coefficients in the algebra of `rep`) lies in the positive
/// cone `{x : -i dpi(x) >= 0}`.
pub fn cpi_contains(rep: &Representation, x: &RealVec, tol: f64) -> Result<bool> {
    if x.len() != rep.algebra.dim() {
        return Err(Error::DimensionMismatch(format!(
            "element has {} coefficients, algebra has dimension {}",
            x.len(),
            rep.algebra.dim()
        )));
    }
    cpi_contains_matrix(rep, &rep.algebra.matrix_of(x), tol)
}

/// [`cpi_contains`] for an element given as a matrix.
pub fn cpi_contains_matrix(rep: &Representation, x: &CMatrix, tol: f64) -> Result<bool> {
    let (min, norm) = psd_margin(rep, x)?;
    Ok(min >= -tol * (1.0 + norm))
}

/// A cone generator on which `-i dpi` fails to be positive.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeWitness {
    /// Coefficients in the ambient algebra.
    pub generator: Vec<f64>,
    pub origin: GeneratorOrigin,
    pub min_eigenvalue: f64,
}

/// Outcome of the `C_alpha ⊆ C_pi0` test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeVerdict {
    pub holds: bool,
    pub witness: Option<ConeWitness>,
    pub sampled: bool,
    pub checked: usize,
    pub tol: f64,
}

/// Tests `C_alpha ⊆ C_pi0` on every generator of `C_alpha` and on
/// `samples` seeded random unit vectors of each positive eigenspace of
/// dimension above one. `pi0` is a representation of a subalgebra of `g`
/// containing the cone.
pub fn calpha_subset_cpi0(
    g: &MatrixLieAlgebra,
    dd: &DerivationData,
    pi0: &Representation,
    tol: f64,
    samples: usize,
    seed: u64,
) -> Result<ConeVerdict> {
    let cone = calpha_generators(g, dd)?;
    let mut candidates: Vec<(RealVec, GeneratorOrigin)> =
        cone.generators.iter().cloned().zip(cone.origins.iter().cloned()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctol = CLUSTER_TOL * (1.0 + dd.add.norm());
    for space in dd.positive(ctol) {
        if space.dim() < 2 {
            continue;
        }
        for index in 0..samples {
            let coeffs = CVector::from_fn(space.dim(), |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let mut z = &space.basis * coeffs;
            let n = z.norm();
            if n == 0.0 {
                continue;
            }
            z /= c64(n, 0.0);
            candidates.push((
                positive_bracket(g, &z)?,
                GeneratorOrigin::Sample {
                    lambda: space.lambda.re,
                    index,
                },
            ));
        }
    }
    let checked = candidates.len();
    for (gen, origin) in candidates {
        let m = g.matrix_of(&gen);
        let (min, norm) = psd_margin(pi0, &m)?;
        if min < -tol * (1.0 + norm) {
            return Ok(ConeVerdict {
                holds: false,
                witness: Some(ConeWitness {
                    generator: gen.iter().copied().collect(),
                    origin,
                    min_eigenvalue: min,
                }),
                sampled: cone.sampled,
                checked,
                tol,
            });
        }
    }
    Ok(ConeVerdict {
        holds: true,
        witness: None,
        sampled: cone.sampled,
        checked,
        tol,
    })
}

/// Outcome of the coroot test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorootVerdict {
    pub holds: bool,
    /// Root `(i, j)` with `dpi0(E_ii - E_jj)` not negative semidefinite.
    pub violated: Option<(usize, usize)>,
    pub max_eigenvalue: f64,
    pub tol: f64,
}

/// `dpi0(alpha_vee) <= 0` for every root with `alpha(-i d) > 0`.
pub fn coroot_condition(pi0: &Representation, rd: &RootDatum, tol: f64) -> Result<CorootVerdict> {
    let mut worst = f64::NEG_INFINITY;
    for root in rd.strictly_positive_roots() {
        let op = pi0.eval_matrix(&root.coroot(rd.n))?;
        let eig = eig_hermitian(&op, 1e-8)?;
        let max = eig.values.last().copied().unwrap_or(0.0);
        let norm = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        worst = worst.max(max);
        if max > tol * (1.0 + norm) {
            return Ok(CorootVerdict {
                holds: false,
                violated: Some((root.i, root.j)),
                max_eigenvalue: max,
                tol,
            });
        }
    }
    Ok(CorootVerdict {
        holds: true,
        violated: None,
        max_eigenvalue: if worst.is_finite() { worst } else { 0.0 },
        tol,
    })
}

/// Existence of a unitary highest weight representation of `SU(1,2)` for
/// the label `(l1, l2, l3)`: `l2 > l3` and `l3 - l1 >= 1`.
pub fn su12_hw_unitarizable(lambda: [i64; 3]) -> bool {
    let [l1, l2, l3] = lambda;
    l2 > l3 && l3 - l1 >= 1
}

/// Integer form of the cone condition for the same labels: `l2 >= l3` and
/// `l3 >= l1`.
pub fn su12_cone_condition(lambda: [i64; 3]) -> bool {
    let [l1, l2, l3] = lambda;
    l2 >= l3 && l3 >= l1
}

/// The `su(1,2)` data: the algebra, the element `d` with `-i d` having
/// eigenvalues `(4/3, -2/3, -2/3)`, and its eigendata.
pub fn su12_setup() -> Result<(MatrixLieAlgebra, RealVec, DerivationData)> {
    let g = build_algebra(AlgebraKind::IndefiniteSpecialUnitary(1, 2))?;
    let d = g.diagonal_element(&[4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0])?;
    let dd = spectral_split(&g, &d)?;
    Ok((g, d, dd))
}

/// The representation of the centraliser `s(u(1) + u(2))` attached to the
/// label `(l1, l2, l3)`: the contragredient of the character `l1` of `u(1)`
/// tensored with the `u(2)` irrep of highest weight `(l2, l3)`.
pub fn su12_levi_rep(g: &MatrixLieAlgebra, d: &RealVec, lambda: [i64; 3]) -> Result<Representation> {
    if lambda[1] < lambda[2] {
        return Err(Error::NotDominant(lambda.to_vec()));
    }
    let (g0, _) = fixed_subalgebra(g, &Derivation::Inner(d.clone()), 1e-9)?;
    let entries: Vec<f64> = (0..3).map(|k| g.matrix_of(d)[(k, k)].im).collect();
    let blocks = level_blocks(&entries, 1e-9);
    let rep = block_irrep(Arc::new(g0), &blocks, &Weight::new(lambda.to_vec()))?;
    Ok(rep.dual().with_label(Weight::new(lambda.to_vec())))
}

/// Numerical cone test for the `su(1,2)` label.
pub fn su12_cone_check(lambda: [i64; 3], tol: f64, samples: usize, seed: u64) -> Result<ConeVerdict> {
    let (g, d, dd) = su12_setup()?;
    let pi0 = su12_levi_rep(&g, &d, lambda)?;
    calpha_subset_cpi0(&g, &dd, &pi0, tol, samples, seed)
}

/// `i (E_mm - E_nn)` in `u(N)`.
pub fn level_generator(n_size: usize, n: usize, m: usize) -> CMatrix {
    let mut out = CMatrix::zeros(n_size, n_size);
    out[(m, m)] = I;
    out[(n, n)] = -I;
    out
}

/// Whether two cones have the same generators up to positive scaling and
/// order.
pub fn same_rays(a: &[CMatrix], b: &[CMatrix], tol: f64) -> bool {
    let normalise = |m: &CMatrix| {
        let n = frobenius(m);
        if n == 0.0 {
            m.clone()
        } else {
            m.unscale(n)
        }
    };
    let na: Vec<CMatrix> = a.iter().map(normalise).filter(|m| frobenius(m) > 0.0).collect();
    let nb: Vec<CMatrix> = b.iter().map(normalise).filter(|m| frobenius(m) > 0.0).collect();
    na.iter().all(|x| nb.iter().any(|y| frobenius(&(x - y)) <= tol))
        && nb.iter().all(|y| na.iter().any(|x| frobenius(&(x - y)) <= tol))
}

/// Real coordinates `(re, im)` of a matrix, column-major.
fn real_coords(m: &CMatrix) -> DVector<f64> {
    DVector::from_iterator(2 * m.len(), m.iter().flat_map(|z| [z.re, z.im]))
}

/// Non-negative least squares `min ||A x - b||, x >= 0` by the active set
/// method of Lawson and Hanson.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let eps = 1e-12 * (1.0 + a.norm()) * (1.0 + b.norm());
    let solve = |passive: &[bool]| -> Result<DVector<f64>> {
        let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let sub = a.select_columns(&idx);
        let sol = sub
            .svd(true, true)
            .solve(b, 1e-12)
            .map_err(|e| Error::ConvergenceFailure(format!("least squares: {e}")))?;
        let mut full = DVector::zeros(n);
        for (k, &j) in idx.iter().enumerate() {
            full[j] = sol[k];
        }
        Ok(full)
    };
    for _ in 0..3 * n.max(1) {
        let w = a.transpose() * (b - a * &x);
        let next = (0..n).filter(|&j| !passive[j] && w[j] > eps).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = next else {
            break;
        };
        passive[j] = true;
        for _ in 0..3 * n {
            let s = solve(&passive)?;
            let blocked: Vec<usize> = (0..n).filter(|&i| passive[i] && s[i] <= 0.0).collect();
            if blocked.is_empty() {
                x = s;
                break;
            }
            let alpha = blocked
                .iter()
                .map(|&i| x[i] / (x[i] - s[i]))
                .fold(f64::INFINITY, f64::min);
            x += (&s - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= eps {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
    }
    Ok(x)
}

/// Whether `m` lies in the closed convex cone generated by `gens`, up to a
/// relative residual `tol`.
pub fn in_cone(m: &CMatrix, gens: &[CMatrix], tol: f64) -> Result<bool> {
    let b = real_coords(m);
    if b.norm() == 0.0 {
        return Ok(true);
    }
    if gens.is_empty() {
        return Ok(false);
    }
    let cols: Vec<DVector<f64>> = gens.iter().map(real_coords).collect();
    let a = DMatrix::from_columns(&cols);
    let x = nnls(&a, &b)?;
    Ok((&a * x - &b).norm() <= tol * b.norm())
}

/// Whether the two generator lists span the same closed convex cone.
pub fn same_cone(a: &[CMatrix], b: &[CMatrix], tol: f64) -> Result<bool> {
    for m in a {
        if !in_cone(m, b, tol)? {
            return Ok(false);
        }
    }
    for m in b {
        if !in_cone(m, a, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}
