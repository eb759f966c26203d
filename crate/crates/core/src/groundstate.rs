//! Minimal energy spaces of finite-dimensional unitary representations and
//! the verdicts built on them: cyclicity, ground state, strictness, the
//! ellipticity implication, direct sums and spectral translation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irreps::Representation;
use crate::liealg::{
    fixed_subalgebra, is_elliptic, spectral_split, spectral_subspace, spectral_subspace_of_derivation,
    Derivation, IntervalSet, RealVec,
};
use crate::matcore::{
    algebra_closure, c64, commutant_basis, commutant_of_star_span, compress, eig_hermitian, identity, orthonormal_columns,
    rank, vectorize, CMatrix, OperatorSubspace, CLUSTER_TOL, DEFAULT_RANK_TOL,
};

/// Tolerances used by [`analyze`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value threshold for rank decisions.
    pub rank: f64,
    /// Relative eigenvalue clustering threshold.
    pub cluster: f64,
    /// Projector distance below which two operator spaces agree.
    pub subspace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: DEFAULT_RANK_TOL,
            cluster: CLUSTER_TOL,
            subspace: 1e-6,
        }
    }
}

/// Dimensions of the commutants compared by the strictness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutantDims {
    /// `dim pi(G)'`
    pub full: usize,
    /// `dim pi0(G0)'` on the minimal energy space.
    pub ground: usize,
    /// `dim P0 pi(G)'' P0`
    pub compressed_algebra: usize,
    /// `dim (P0 pi(G)'' P0)'` on the minimal energy space.
    pub compressed_commutant: usize,
}

/// Result of [`analyze`].
#[derive(Debug, Clone)]
pub struct GroundStateReport {
    /// Minimal eigenvalue of `H = -i dpi(d)`.
    pub m: f64,
    /// Eigenvalues of `H`, ascending.
    pub spectrum: Vec<f64>,
    /// Orthonormal basis of the minimal energy space, as columns.
    pub h0_basis: CMatrix,
    /// Representation of `g^0 = ker ad(d)` on the minimal energy space.
    pub pi0: Representation,
    /// Coefficients of the `g^0` basis in `g`.
    pub g0_elements: Vec<RealVec>,
    pub cyclic: bool,
    pub ground_state: bool,
    pub strict: bool,
    /// The constant `c` with `U_t = e^{it(H - c)}` positive and minimal.
    pub minimal_shift: f64,
    pub commutant_dims: CommutantDims,
    /// Projector distance between the two algebras compared for strictness.
    pub strictness_distance: f64,
    pub tolerances: Tolerances,
}

impl GroundStateReport {
    pub fn h0_dim(&self) -> usize {
        self.h0_basis.ncols()
    }
}

/// `H = -i dpi(d)`.
pub fn energy_operator(pi: &Representation, d: &RealVec) -> CMatrix {
    pi.eval(d) * c64(0.0, -1.0)
}

/// Orthonormal basis of the smallest subspace containing `start` and
/// invariant under `ops`.
pub fn invariant_closure(ops: &[CMatrix], start: &CMatrix, tol: f64) -> Result<CMatrix> {
    let dim = start.nrows();
    let mut current = orthonormal_columns(start, tol)?;
    loop {
        if current.ncols() == dim {
            return Ok(current);
        }
        let mut cols = current.clone();
        for op in ops {
            let img = op * &current;
            let mut grown = CMatrix::zeros(dim, cols.ncols() + img.ncols());
            grown.view_mut((0, 0), (dim, cols.ncols())).copy_from(&cols);
            grown.view_mut((0, cols.ncols()), (dim, img.ncols())).copy_from(&img);
            cols = grown;
        }
        let next = orthonormal_columns(&cols, tol)?;
        if next.ncols() == current.ncols() {
            return Ok(current);
        }
        current = next;
    }
}

/// Full analysis of `pi` relative to the one-parameter group generated by
/// `d`.
pub fn analyze(pi: &Representation, d: &RealVec, tol: Tolerances) -> Result<GroundStateReport> {
    let g = &pi.algebra;
    if d.len() != g.dim() {
        return Err(Error::LengthMismatch {
            expected: g.dim(),
            got: d.len(),
        });
    }
    let h = energy_operator(pi, d);
    let eig = eig_hermitian(&h, 1e-8)?;
    let scale = 1.0 + eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let clusters = eig.clusters(tol.cluster * scale);
    let lowest = clusters
        .first()
        .cloned()
        .ok_or_else(|| Error::InvalidRepresentation("zero-dimensional representation".into()))?;
    let h0 = eig.subspace(lowest.clone());
    let m = eig.values[lowest].iter().sum::<f64>() / h0.ncols() as f64;

    let (g0, g0_elements) = fixed_subalgebra(g, &Derivation::Inner(d.clone()), tol.rank)?;
    let g0 = Arc::new(g0);
    let pi0 = pi.restrict(g0, &g0_elements)?.compress(&h0);

    let closure = invariant_closure(&pi.dpi, &h0, tol.rank)?;
    let cyclic = closure.ncols() == pi.dim;

    let full_algebra = algebra_closure(pi.dim, &pi.dpi, true, tol.rank)?;
    let compressed = compress(&h0, &full_algebra, tol.rank)?;
    let ground_algebra = algebra_closure(h0.ncols(), &pi0.dpi, true, tol.rank)?;
    let strictness_distance = if compressed.dimension() == ground_algebra.dimension() {
        compressed.projector_distance(&ground_algebra)
    } else {
        f64::INFINITY
    };
    let same = strictness_distance <= tol.subspace;

    let full_commutant = commutant_basis(pi.dim, &pi.dpi, tol.rank)?;
    let ground_commutant = commutant_basis(h0.ncols(), &pi0.dpi, tol.rank)?;
    let compressed_commutant = commutant_of_space(&compressed, tol.rank)?;

    Ok(GroundStateReport {
        m,
        spectrum: eig.values.clone(),
        h0_basis: h0,
        pi0,
        g0_elements,
        cyclic,
        ground_state: cyclic,
        strict: cyclic && same,
        minimal_shift: m,
        commutant_dims: CommutantDims {
            full: full_commutant.dimension(),
            ground: ground_commutant.dimension(),
            compressed_algebra: compressed.dimension(),
            compressed_commutant: compressed_commutant.dimension(),
        },
        strictness_distance,
        tolerances: tol,
    })
}

fn commutant_of_space(space: &OperatorSubspace, tol: f64) -> Result<OperatorSubspace> {
    commutant_of_star_span(space.ambient, &space.basis, tol)
}

/// Strictness verdict for a representation whose minimal energy space is
/// spanned by the orthonormal columns of `h0`, with `pi0_ops` the
/// compressed `g^0` action.
pub fn is_strict(pi: &Representation, h0: &CMatrix, pi0_ops: &[CMatrix], tol: Tolerances) -> Result<bool> {
    let full = algebra_closure(pi.dim, &pi.dpi, true, tol.rank)?;
    let b = compress(h0, &full, tol.rank)?;
    let c = algebra_closure(h0.ncols(), pi0_ops, true, tol.rank)?;
    Ok(b.same_span(&c, tol.subspace))
}

/// Outcome of the ellipticity implication check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MooreVerdict {
    pub eigenvector_exists: bool,
    pub elliptic: bool,
    pub implication_holds: bool,
}

/// For irreducible `pi` that is injective on `g`: if `-i dpi(d)` has an
/// eigenvector (always at finite dimension), then `ad d` is elliptic.
pub fn moore_check(pi: &Representation, d: &RealVec, tol: f64) -> Result<MooreVerdict> {
    let commutant = commutant_basis(pi.dim, &pi.dpi, tol)?;
    if commutant.dimension() != 1 {
        return Err(Error::NotIrreducible(format!(
            "commutant has dimension {}",
            commutant.dimension()
        )));
    }
    let mut stacked = CMatrix::zeros(pi.dim * pi.dim, pi.dpi.len());
    for (k, m) in pi.dpi.iter().enumerate() {
        stacked.set_column(k, &vectorize(m));
    }
    if rank(&stacked, tol)? != pi.algebra.dim() {
        return Err(Error::NonInjective);
    }
    let eigenvector_exists = pi.dim > 0;
    let elliptic = is_elliptic(&pi.algebra, &Derivation::Inner(d.clone()))?;
    Ok(MooreVerdict {
        eigenvector_exists,
        elliptic,
        implication_holds: !eigenvector_exists || elliptic,
    })
}

/// The ground state property of a direct sum agrees with that of all
/// summands.
pub fn direct_sum_law(reps: &[Representation], d: &RealVec, tol: Tolerances) -> Result<bool> {
    if reps.is_empty() {
        return Ok(true);
    }
    let sum = Representation::direct_sum(reps)?;
    let report = analyze(&sum, d, tol)?;
    let shift = report.minimal_shift;
    let whole = is_ground_state_at(&sum, d, shift, tol)?;
    let mut parts = true;
    for r in reps {
        parts &= is_ground_state_at(r, d, shift, tol)?;
    }
    Ok(whole == parts && whole == report.ground_state)
}

/// Ground state test for the fixed one-parameter group `e^{it(H - shift)}`:
/// `H - shift >= 0` and `ker(H - shift)` is cyclic.
pub fn is_ground_state_at(pi: &Representation, d: &RealVec, shift: f64, tol: Tolerances) -> Result<bool> {
    let h = energy_operator(pi, d);
    let eig = eig_hermitian(&h, 1e-8)?;
    let scale = 1.0 + eig.values.iter().fold(shift.abs(), |m, v| m.max(v.abs()));
    let slack = tol.cluster * scale;
    if eig.values.iter().any(|&v| v < shift - slack) {
        return Ok(false);
    }
    let kernel: Vec<usize> = (0..eig.values.len())
        .filter(|&k| (eig.values[k] - shift).abs() <= slack)
        .collect();
    if kernel.is_empty() {
        return Ok(pi.dim == 0);
    }
    let h0 = eig.subspace(kernel[0]..kernel[kernel.len() - 1] + 1);
    Ok(invariant_closure(&pi.dpi, &h0, tol.rank)?.ncols() == pi.dim)
}

/// Outcome of the spectral translation check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TranslationVerdict {
    pub holds: bool,
    /// Largest norm of the component of `dpi(z) v` outside `H(E + F)`.
    pub residual: f64,
    /// Number of `(z, v)` pairs checked.
    pub pairs: usize,
}

/// Checks `dpi(g_C(E)) H(F) ⊆ H(E + F)` for spectral subspaces of `ad d` on
/// `g_C` and of `-i dpi(d)`, on orthonormal bases.
pub fn spectral_translation_check(
    pi: &Representation,
    d: &RealVec,
    e: &IntervalSet,
    f: &IntervalSet,
    tol: f64,
) -> Result<TranslationVerdict> {
    let dd = spectral_split(&pi.algebra, d)?;
    let zs = spectral_subspace_of_derivation(&dd, e, 1e-8);
    let h = energy_operator(pi, d);
    let hf = spectral_subspace(&h, f, 1e-8)?;
    let target = spectral_subspace(&h, &e.sum(f), 1e-8)?;
    let mut residual: f64 = 0.0;
    let mut pairs = 0;
    for k in 0..zs.ncols() {
        let op = pi.eval_complex(&zs.column(k).into_owned());
        for j in 0..hf.ncols() {
            let w = &op * hf.column(j);
            let outside = if target.ncols() == 0 {
                w.norm()
            } else {
                (&w - &target * (target.adjoint() * &w)).norm()
            };
            residual = residual.max(outside);
            pairs += 1;
        }
    }
    Ok(TranslationVerdict {
        holds: residual <= tol,
        residual,
        pairs,
    })
}

/// The commuting two-dimensional representation of the three-dimensional
/// Heisenberg algebra with `dpi(p) = 0`, `dpi(q) = i diag(1, -1)`,
/// `dpi(c) = 0`, analysed for `d = p`. Its minimal energy space is the whole
/// space, `pi0` is zero, and the generated algebra is the diagonal one.
pub fn nonstrict_fixture() -> Result<(Representation, RealVec)> {
    use crate::liealg::{build_algebra, AlgebraKind};
    let g = Arc::new(build_algebra(AlgebraKind::Heisenberg(2))?);
    let zero = CMatrix::zeros(2, 2);
    let mut q = identity(2) * c64(0.0, 1.0);
    q[(1, 1)] = c64(0.0, -1.0);
    let pi = Representation::new(g, vec![zero.clone(), q, zero], 1e-10)?;
    let d = RealVec::from_vec(vec![1.0, 0.0, 0.0]);
    Ok((pi, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::irreps::{irrep_un, Weight};
    use crate::liealg::{build_algebra, AlgebraKind};

    fn u(n: usize) -> Arc<crate::liealg::MatrixLieAlgebra> {
        Arc::new(build_algebra(AlgebraKind::Unitary(n)).unwrap())
    }

    #[test]
    fn u3_defining() {
        let g = u(3);
        let pi = Representation::defining(g.clone()).unwrap();
        let d = g.diagonal_element(&[1.0, 0.0, 0.0]).unwrap();
        let r = analyze(&pi, &d, Tolerances::default()).unwrap();
        assert!(r.m.abs() < 1e-10);
        assert_eq!(r.h0_dim(), 2);
        assert_eq!(r.commutant_dims.ground, 1);
        assert!(r.cyclic && r.ground_state && r.strict);
        // H0 = span{e2, e3}
        assert!(r.h0_basis.row(0).norm() < 1e-12);
    }

    #[test]
    fn trivial_d_is_strict() {
        let pi = irrep_un(2, &Weight::new(vec![2, 0])).unwrap();
        let d = RealVec::zeros(4);
        let r = analyze(&pi, &d, Tolerances::default()).unwrap();
        assert_eq!(r.h0_dim(), 3);
        assert!(r.ground_state && r.strict);
    }

    #[test]
    fn sum_with_trivial() {
        let g = u(2);
        let def = Representation::defining(g.clone()).unwrap();
        let triv = Representation::trivial(g.clone(), 1);
        let sum = Representation::direct_sum(&[def, triv]).unwrap();
        let d = g.diagonal_element(&[1.0, 0.0]).unwrap();
        let r = analyze(&sum, &d, Tolerances::default()).unwrap();
        assert!(r.m.abs() < 1e-12);
        assert_eq!(r.h0_dim(), 2);
        assert!(r.cyclic);
    }

    #[test]
    fn non_cyclic_sum() {
        // the minimal energy space of the first summand lies below the
        // spectrum of the second, so the second summand is unreachable
        let g = u(2);
        let def = Representation::defining(g.clone()).unwrap();
        let shifted = irrep_un(2, &Weight::new(vec![2, 2])).unwrap();
        let sum = Representation::direct_sum(&[def, shifted]).unwrap();
        let d = g.diagonal_element(&[1.0, 0.0]).unwrap();
        let r = analyze(&sum, &d, Tolerances::default()).unwrap();
        assert!(!r.cyclic && !r.ground_state && !r.strict);
        assert!(direct_sum_law(
            &[Representation::defining(g.clone()).unwrap(), irrep_un(2, &Weight::new(vec![2, 2])).unwrap()],
            &d,
            Tolerances::default()
        )
        .unwrap());
    }

    #[test]
    fn direct_sum_examples() {
        let g = u(2);
        let def = Representation::defining(g.clone()).unwrap();
        let det = irrep_un(2, &Weight::new(vec![1, 1])).unwrap();
        let d = g.diagonal_element(&[1.0, 0.0]).unwrap();
        let t = Tolerances::default();
        assert!(direct_sum_law(&[def.clone(), def.clone()], &d, t).unwrap());
        assert!(direct_sum_law(&[def, det], &d, t).unwrap());
        assert!(direct_sum_law(&[], &d, t).unwrap());
    }

    #[test]
    fn shifted_summand_is_not_ground_state() {
        let det = irrep_un(2, &Weight::new(vec![1, 1])).unwrap();
        let d = det.algebra.diagonal_element(&[1.0, 0.0]).unwrap();
        let t = Tolerances::default();
        assert!(analyze(&det, &d, t).unwrap().ground_state);
        assert!(is_ground_state_at(&det, &d, 1.0, t).unwrap());
        assert!(!is_ground_state_at(&det, &d, 0.0, t).unwrap());
        assert!(!is_ground_state_at(&det, &d, 2.0, t).unwrap());
    }

    #[test]
    fn nonstrict_fixture_detected() {
        let (pi, d) = nonstrict_fixture().unwrap();
        let r = analyze(&pi, &d, Tolerances::default()).unwrap();
        assert_eq!(r.h0_dim(), 2);
        assert!(r.cyclic && r.ground_state);
        assert_eq!(r.commutant_dims.compressed_algebra, 2);
        assert!(!r.strict);
    }

    #[test]
    fn moore_examples() {
        let pi = irrep_un(3, &Weight::new(vec![2, 1, 0])).unwrap();
        let d = pi.algebra.diagonal_element(&[0.3, -1.0, 2.0]).unwrap();
        let v = moore_check(&pi, &d, 1e-9).unwrap();
        assert!(v.implication_holds && v.elliptic);

        let (heis, dh) = nonstrict_fixture().unwrap();
        assert!(moore_check(&heis, &dh, 1e-9).is_err());

        let su2 = Arc::new(build_algebra(AlgebraKind::SpecialUnitary(2)).unwrap());
        let adj = crate::irreps::irrep_sun(2, &Weight::new(vec![1, -1])).unwrap();
        let d = su2.diagonal_element(&[0.7, -0.7]).unwrap();
        assert!(moore_check(&adj, &d, 1e-9).unwrap().implication_holds);
    }

    #[test]
    fn moore_rejects_non_injective() {
        // determinant character of u(2) kills su(2)
        let det = irrep_un(2, &Weight::new(vec![1, 1])).unwrap();
        let d = det.algebra.diagonal_element(&[1.0, 0.0]).unwrap();
        assert!(matches!(moore_check(&det, &d, 1e-9), Err(Error::NonInjective)));
    }

    #[test]
    fn spectral_translation_examples() {
        let g = u(3);
        let pi = Representation::defining(g.clone()).unwrap();
        let d = g.diagonal_element(&[1.0, 0.0, 0.0]).unwrap();
        let any = IntervalSet::all();
        assert!(spectral_translation_check(&pi, &d, &IntervalSet::point(0.0), &any, 1e-9).unwrap().holds);
        let up = spectral_translation_check(&pi, &d, &IntervalSet::point(1.0), &IntervalSet::point(0.0), 1e-9).unwrap();
        assert!(up.holds && up.pairs == 4);
        let down = spectral_translation_check(&pi, &d, &IntervalSet::point(-1.0), &IntervalSet::point(0.0), 1e-9).unwrap();
        assert!(down.holds && down.residual < 1e-12);
    }

    #[test]
    fn invariant_closure_of_vector() {
        let g = u(2);
        let pi = Representation::defining(g).unwrap();
        let start = identity(2).columns(0, 1).into_owned();
        assert_eq!(invariant_closure(&pi.dpi, &start, 1e-9).unwrap().ncols(), 2);
    }
}
