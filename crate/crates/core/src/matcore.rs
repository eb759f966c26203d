//! Dense complex linear algebra kernel.
//!
//! Operator spaces carry the trace inner product `<A, B> = tr(A* B)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative singular-value threshold used for all rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Absolute eigenvalue clustering tolerance for exactly-integral spectra.
pub const CLUSTER_TOL: f64 = 1e-8;

const SOLVER_EPS: f64 = f64::EPSILON;
const SOLVER_MAX_ITER: usize = 100_000;

// Seed for the generic elements used to block-reduce commutant problems. The
// result does not depend on it, only the amount of reduction does.
const GENERIC_SEED: u64 = 0x6773_7265_7073;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The matrix unit `E_ij` of size `n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = c64(1.0, 0.0);
    m
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `tr(A* B)`.
pub fn trace_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    frobenius(&(m - m.adjoint()))
}

pub fn anti_hermitian_residual(m: &CMatrix) -> f64 {
    frobenius(&(m + m.adjoint()))
}

/// Column-major flattening, so `trace_inner(a, b) == vec(a)^H vec(b)`.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().copied())
}

pub fn unvectorize(v: &[Complex64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_column_slice(rows, cols, v)
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors, in the same order.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Indices grouped into clusters of eigenvalues closer than `tol`.
    pub fn clusters(&self, tol: f64) -> Vec<std::ops::Range<usize>> {
        cluster_sorted(&self.values, tol)
    }

    /// Columns `range` of the eigenvector matrix.
    pub fn subspace(&self, range: std::ops::Range<usize>) -> CMatrix {
        self.vectors.columns(range.start, range.len()).into_owned()
    }
}

/// Diagonalises a Hermitian matrix.
///
/// The precondition is `||H - H*|| <= tol * ||H||` (Frobenius norms). The
/// input is symmetrised before the solver runs.
pub fn eig_hermitian(h: &CMatrix, tol: f64) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eig_hermitian needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let n = h.nrows();
    let residual = hermitian_residual(h);
    if residual > tol * frobenius(h) {
        return Err(Error::NotHermitian { residual });
    }
    if n == 0 {
        return Ok(HermitianEigen {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(sym, SOLVER_EPS, SOLVER_MAX_ITER).ok_or_else(|| {
        Error::ConvergenceFailure(format!("Hermitian eigensolver on {n}x{n} input"))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Groups a sorted list into runs whose consecutive gaps are at most `tol`.
pub fn cluster_sorted(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tol {
            if k > start {
                out.push(start..k);
            }
            start = k;
        }
    }
    out
}

fn svd(m: CMatrix, want_u: bool, want_v: bool) -> Result<SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>> {
    let (r, c) = m.shape();
    SVD::try_new(m, want_u, want_v, SOLVER_EPS, SOLVER_MAX_ITER)
        .ok_or_else(|| Error::ConvergenceFailure(format!("SVD on {r}x{c} input")))
}

/// Orthonormal basis (as columns) of the column span of `m`.
///
/// Singular values below `rel_tol * sigma_max` are treated as zero.
pub fn orthonormal_columns(m: &CMatrix, rel_tol: f64) -> Result<CMatrix> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(CMatrix::zeros(rows, 0));
    }
    let s = svd(m.clone(), true, false)?;
    let smax = s.singular_values.max();
    if smax <= f64::MIN_POSITIVE {
        return Ok(CMatrix::zeros(rows, 0));
    }
    let u = s.u.expect("requested U");
    let keep: Vec<usize> = (0..s.singular_values.len())
        .filter(|&k| s.singular_values[k] > rel_tol * smax)
        .collect();
    let mut out = CMatrix::zeros(rows, keep.len());
    for (dst, &k) in keep.iter().enumerate() {
        out.set_column(dst, &u.column(k));
    }
    Ok(out)
}

/// Orthonormal basis of the null space of `m`, as columns.
///
/// The threshold is relative to the largest singular value of `m`; a zero
/// matrix has the whole space as kernel.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> Result<CMatrix> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    if rows == 0 || m.iter().all(|z| z.norm_sqr() == 0.0) {
        return Ok(CMatrix::identity(cols, cols));
    }
    // Tall systems are reduced to their square triangular factor first.
    let square = if rows > cols {
        m.clone().qr().r()
    } else if rows < cols {
        let mut padded = CMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let s = svd(square, false, true)?;
    let smax = s.singular_values.max();
    let v_t = s.v_t.expect("requested V^T");
    let keep: Vec<usize> = (0..s.singular_values.len())
        .filter(|&k| s.singular_values[k] <= rel_tol * smax)
        .collect();
    let mut out = CMatrix::zeros(cols, keep.len());
    for (dst, &k) in keep.iter().enumerate() {
        let row = v_t.row(k).adjoint();
        out.set_column(dst, &row);
    }
    Ok(out)
}

/// Orthonormal basis of the null space of a real matrix, as columns.
pub fn real_null_space(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if rows == 0 || m.iter().all(|&x| x == 0.0) {
        return Ok(DMatrix::identity(cols, cols));
    }
    let mut square = DMatrix::zeros(rows.max(cols), cols);
    square.view_mut((0, 0), (rows, cols)).copy_from(m);
    let s = SVD::try_new(square, false, true, SOLVER_EPS, SOLVER_MAX_ITER)
        .ok_or_else(|| Error::ConvergenceFailure(format!("SVD on {rows}x{cols} input")))?;
    let smax = s.singular_values.max();
    let v_t = s.v_t.expect("requested V^T");
    let keep: Vec<usize> = (0..s.singular_values.len())
        .filter(|&k| s.singular_values[k] <= rel_tol * smax)
        .collect();
    let mut out = DMatrix::zeros(cols, keep.len());
    for (dst, &k) in keep.iter().enumerate() {
        out.set_column(dst, &v_t.row(k).transpose());
    }
    Ok(out)
}

/// Lifts a real matrix to a complex one.
pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| c64(x, 0.0))
}

/// Numerical rank with a relative singular-value threshold.
pub fn rank(m: &CMatrix, rel_tol: f64) -> Result<usize> {
    if m.is_empty() {
        return Ok(0);
    }
    let sv = svd(m.clone(), false, false)?.singular_values;
    let smax = sv.max();
    if smax <= f64::MIN_POSITIVE {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_tol * smax).count())
}

/// Norm of the component of `v` orthogonal to the orthonormal columns `q`.
pub fn residual_outside(q: &CMatrix, v: &CVector) -> f64 {
    if q.ncols() == 0 {
        return v.norm();
    }
    let proj = q * (q.adjoint() * v);
    (v - proj).norm()
}

/// A linear space of operators on `C^ambient`, stored by a basis that is
/// orthonormal for the trace inner product.
#[derive(Debug, Clone)]
pub struct OperatorSubspace {
    pub ambient: usize,
    pub basis: Vec<CMatrix>,
    /// Columns are `vec(basis[k])`.
    frame: CMatrix,
    pub is_algebra: Option<bool>,
    pub is_star_closed: Option<bool>,
}

impl OperatorSubspace {
    fn from_frame(ambient: usize, frame: CMatrix) -> Self {
        let basis = (0..frame.ncols())
            .map(|k| unvectorize(frame.column(k).as_slice(), ambient, ambient))
            .collect();
        OperatorSubspace {
            ambient,
            basis,
            frame,
            is_algebra: None,
            is_star_closed: None,
        }
    }

    /// Orthonormalised span of `mats`.
    pub fn span(ambient: usize, mats: &[CMatrix], tol: f64) -> Result<Self> {
        for m in mats {
            check_square(m, ambient)?;
        }
        let mut stacked = CMatrix::zeros(ambient * ambient, mats.len());
        for (k, m) in mats.iter().enumerate() {
            stacked.set_column(k, &vectorize(m));
        }
        let frame = orthonormal_columns(&stacked, tol)?;
        Ok(Self::from_frame(ambient, frame))
    }

    /// All operators on `C^ambient`.
    pub fn full(ambient: usize) -> Self {
        let mut s = Self::from_frame(ambient, CMatrix::identity(ambient * ambient, ambient * ambient));
        s.is_algebra = Some(true);
        s.is_star_closed = Some(true);
        s
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Orthonormal frame as a `ambient^2 x dimension` matrix.
    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    /// Distance `||P_self - P_other||_F` between the orthogonal projectors
    /// onto the two subspaces.
    pub fn projector_distance(&self, other: &OperatorSubspace) -> f64 {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions differ");
        let overlap = self.frame.adjoint() * &other.frame;
        let cross: f64 = overlap.iter().map(|z| z.norm_sqr()).sum();
        let sq = self.dimension() as f64 + other.dimension() as f64 - 2.0 * cross;
        sq.max(0.0).sqrt()
    }

    pub fn same_span(&self, other: &OperatorSubspace, tol: f64) -> bool {
        self.ambient == other.ambient
            && self.dimension() == other.dimension()
            && self.projector_distance(other) <= tol
    }

    /// Relative distance of `m` from the subspace.
    pub fn distance_rel(&self, m: &CMatrix) -> f64 {
        let v = vectorize(m);
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        residual_outside(&self.frame, &v) / n
    }

    pub fn contains(&self, m: &CMatrix, tol: f64) -> bool {
        self.distance_rel(m) <= tol
    }

    /// True when every element of `other` lies in `self`.
    pub fn includes(&self, other: &OperatorSubspace, tol: f64) -> bool {
        other.basis.iter().all(|b| self.contains(b, tol))
    }

    /// Checks closure under adjoints directly and records the flag.
    pub fn check_star_closed(&mut self, tol: f64) -> bool {
        let closed = self.basis.iter().all(|b| self.contains(&b.adjoint(), tol));
        self.is_star_closed = Some(closed);
        closed
    }

    /// Checks closure under products directly and records the flag.
    pub fn check_algebra(&mut self, tol: f64) -> bool {
        let closed = self
            .basis
            .iter()
            .all(|a| self.basis.iter().all(|b| self.contains(&(a * b), tol)));
        self.is_algebra = Some(closed);
        closed
    }
}

fn check_square(m: &CMatrix, d: usize) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "expected {d}x{d} operator, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Returns the Hermitian matrix `H` with `op = H` or `op = iH`, if any.
fn hermitian_version(op: &CMatrix, tol: f64) -> Option<CMatrix> {
    let scale = frobenius(op).max(1.0);
    if hermitian_residual(op) <= tol * scale {
        Some(op.clone())
    } else if anti_hermitian_residual(op) <= tol * scale {
        Some(op * c64(0.0, -1.0))
    } else {
        None
    }
}

fn is_scalar(op: &CMatrix, tol: f64) -> bool {
    let d = op.nrows();
    if d == 0 {
        return true;
    }
    let mean = op.trace() / c64(d as f64, 0.0);
    frobenius(&(op - identity(d) * mean)) <= tol * frobenius(op).max(f64::MIN_POSITIVE)
}

/// Every operator Hermitian or anti-Hermitian, so that the real span is
/// closed under the adjoint.
pub fn is_star_closed_set(ops: &[CMatrix], tol: f64) -> bool {
    ops.iter().all(|o| hermitian_version(o, tol).is_some())
}

/// Basis of the commutant `{X : [X, A] = 0 for all A in ops}` on `C^dim`.
///
/// When the operators are (anti-)Hermitian the problem is first block
/// reduced along the eigenspaces of a generic real combination; otherwise the
/// full `dim^2` unknown space is used. The kernel is taken with the relative
/// singular-value threshold `tol`.
pub fn commutant_basis(dim: usize, ops: &[CMatrix], tol: f64) -> Result<OperatorSubspace> {
    for op in ops {
        check_square(op, dim)?;
    }
    let largest = ops.iter().map(frobenius).fold(0.0f64, f64::max);
    let constraints: Vec<&CMatrix> = ops
        .iter()
        .filter(|o| frobenius(o) > tol * largest && !is_scalar(o, tol))
        .collect();
    let star = constraints.iter().all(|o| hermitian_version(o, tol).is_some());

    let (frame_change, blocks) = if star && !constraints.is_empty() {
        generic_block_structure(dim, &constraints, tol)?
    } else {
        (identity(dim), vec![0..dim])
    };

    let unknowns: Vec<(usize, usize)> = blocks
        .iter()
        .flat_map(|b| b.clone().flat_map(move |r| b.clone().map(move |c| (r, c))))
        .collect();

    let kernel = if constraints.is_empty() {
        CMatrix::identity(unknowns.len(), unknowns.len())
    } else {
        let rotated: Vec<CMatrix> = constraints
            .iter()
            .map(|a| frame_change.adjoint() * *a * &frame_change)
            .collect();
        // Constraint blocks are folded into a triangular factor as they are
        // produced, which keeps the singular values and bounds the memory.
        let u = unknowns.len();
        let limit = (4 * u).max(dim * dim);
        let mut reduced = CMatrix::zeros(0, u);
        let mut pending: Vec<CMatrix> = Vec::new();
        let mut pending_rows = 0;
        for at in &rotated {
            let mut block = CMatrix::zeros(dim * dim, u);
            for (col, &(a, b)) in unknowns.iter().enumerate() {
                // [E_ab, A] = E_ab A - A E_ab
                for q in 0..dim {
                    // row a of E_ab A is A[b, :]
                    block[(q * dim + a, col)] += at[(b, q)];
                }
                for p in 0..dim {
                    // column b of A E_ab is A[:, a]
                    block[(b * dim + p, col)] -= at[(p, a)];
                }
            }
            pending_rows += block.nrows();
            pending.push(block);
            if reduced.nrows() + pending_rows > limit {
                reduced = fold_rows(reduced, &mut pending);
                pending_rows = 0;
            }
        }
        reduced = fold_rows(reduced, &mut pending);
        null_space(&reduced, tol)?
    };

    let mut frame = CMatrix::zeros(dim * dim, kernel.ncols());
    for k in 0..kernel.ncols() {
        let mut y = CMatrix::zeros(dim, dim);
        for (row, &(a, b)) in unknowns.iter().enumerate() {
            y[(a, b)] = kernel[(row, k)];
        }
        let x = &frame_change * y * frame_change.adjoint();
        frame.set_column(k, &vectorize(&x));
    }
    let mut out = OperatorSubspace::from_frame(dim, frame);
    out.is_algebra = Some(true);
    if star {
        out.is_star_closed = Some(true);
    }
    Ok(out)
}

/// Stacks `pending` under `top` and replaces tall results by their
/// triangular QR factor, which has the same singular values and right
/// singular vectors.
fn fold_rows(top: CMatrix, pending: &mut Vec<CMatrix>) -> CMatrix {
    let cols = top.ncols();
    let rows = top.nrows() + pending.iter().map(|b| b.nrows()).sum::<usize>();
    let mut stacked = CMatrix::zeros(rows, cols);
    stacked.view_mut((0, 0), (top.nrows(), cols)).copy_from(&top);
    let mut at = top.nrows();
    for b in pending.drain(..) {
        stacked.view_mut((at, 0), (b.nrows(), cols)).copy_from(&b);
        at += b.nrows();
    }
    if rows > cols {
        stacked.qr().r()
    } else {
        stacked
    }
}

/// Commutant of the span of `mats`, which must be closed under the adjoint.
/// The span is replaced by the Hermitian parts of its elements so that the
/// block-reduced path of [`commutant_basis`] applies.
pub fn commutant_of_star_span(dim: usize, mats: &[CMatrix], tol: f64) -> Result<OperatorSubspace> {
    let hermitian: Vec<CMatrix> = mats
        .iter()
        .flat_map(|x| [x + x.adjoint(), (x - x.adjoint()) * I])
        .filter(|h| frobenius(h) > tol)
        .collect();
    commutant_basis(dim, &hermitian, tol)
}

/// Eigenbasis of a generic Hermitian combination of the operators together
/// with its eigenvalue clusters.
fn generic_block_structure(
    dim: usize,
    ops: &[&CMatrix],
    tol: f64,
) -> Result<(CMatrix, Vec<std::ops::Range<usize>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(GENERIC_SEED);
    let mut generic = CMatrix::zeros(dim, dim);
    for op in ops {
        let h = hermitian_version(op, tol).expect("caller checked star-closure");
        let coeff: f64 = rng.gen_range(-1.0..1.0);
        generic += h.scale(coeff / frobenius(&h).max(f64::MIN_POSITIVE));
    }
    let eig = eig_hermitian(&generic, 1e-8)?;
    let scale = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let blocks = eig.clusters(CLUSTER_TOL * (1.0 + scale));
    Ok((eig.vectors, blocks))
}

/// The associative algebra generated by `ops` (and the identity when
/// `include_identity`).
///
/// For a unital algebra generated by an adjoint-closed set this is the
/// double commutant; every other input goes through
/// [`algebra_closure_by_products`].
pub fn algebra_closure(
    dim: usize,
    ops: &[CMatrix],
    include_identity: bool,
    tol: f64,
) -> Result<OperatorSubspace> {
    for op in ops {
        check_square(op, dim)?;
    }
    if include_identity && is_star_closed_set(ops, tol) {
        let first = commutant_basis(dim, ops, tol)?;
        let mut out = commutant_of_star_span(dim, &first.basis, tol)?;
        out.is_algebra = Some(true);
        out.is_star_closed = Some(true);
        return Ok(out);
    }
    algebra_closure_by_products(dim, ops, include_identity, tol)
}

/// Generated algebra by saturating words in `ops` degree by degree, capped
/// at degree `dim^2`.
pub fn algebra_closure_by_products(
    dim: usize,
    ops: &[CMatrix],
    include_identity: bool,
    tol: f64,
) -> Result<OperatorSubspace> {
    for op in ops {
        check_square(op, dim)?;
    }
    let mut seeds: Vec<CMatrix> = ops.to_vec();
    if include_identity {
        seeds.push(identity(dim));
    }
    let seed_space = OperatorSubspace::span(dim, &seeds, tol)?;
    let mut frame = seed_space.frame.clone();
    let mut frontier: Vec<CMatrix> = seed_space.basis.clone();

    let cap = dim * dim;
    let mut degree = 1;
    while !frontier.is_empty() && degree <= cap && frame.ncols() < dim * dim {
        let mut candidates = CMatrix::zeros(dim * dim, ops.len() * frontier.len());
        let mut scale = 0.0f64;
        let mut col = 0;
        for g in ops {
            for f in &frontier {
                let v = vectorize(&(g * f));
                scale = scale.max(v.norm());
                candidates.set_column(col, &v);
                col += 1;
            }
        }
        if scale == 0.0 {
            break;
        }
        // Two passes of projection keep the growing frame orthonormal.
        for _ in 0..2 {
            if frame.ncols() > 0 {
                let coeffs = frame.adjoint() * &candidates;
                candidates -= &frame * coeffs;
            }
        }
        let fresh = new_directions(&candidates, scale, tol)?;
        frontier = (0..fresh.ncols())
            .map(|k| unvectorize(fresh.column(k).as_slice(), dim, dim))
            .collect();
        if fresh.ncols() > 0 {
            let mut grown = CMatrix::zeros(dim * dim, frame.ncols() + fresh.ncols());
            grown.view_mut((0, 0), (dim * dim, frame.ncols())).copy_from(&frame);
            grown
                .view_mut((0, frame.ncols()), (dim * dim, fresh.ncols()))
                .copy_from(&fresh);
            frame = grown;
        }
        degree += 1;
    }
    let mut out = OperatorSubspace::from_frame(dim, frame);
    out.is_algebra = Some(true);
    Ok(out)
}

/// Orthonormal directions of `residuals` whose singular values exceed
/// `tol * scale`, where `scale` is the size of the unprojected candidates.
fn new_directions(residuals: &CMatrix, scale: f64, tol: f64) -> Result<CMatrix> {
    let (rows, cols) = residuals.shape();
    if cols == 0 {
        return Ok(CMatrix::zeros(rows, 0));
    }
    let s = svd(residuals.clone(), true, false)?;
    let u = s.u.expect("requested U");
    let keep: Vec<usize> = (0..s.singular_values.len())
        .filter(|&k| s.singular_values[k] > tol * scale)
        .collect();
    let mut out = CMatrix::zeros(rows, keep.len());
    for (dst, &k) in keep.iter().enumerate() {
        out.set_column(dst, &u.column(k));
    }
    Ok(out)
}

/// `span{P* A P : A in S}` as operators on the subspace with orthonormal
/// basis `p` (columns).
pub fn compress(p: &CMatrix, s: &OperatorSubspace, tol: f64) -> Result<OperatorSubspace> {
    if p.nrows() != s.ambient {
        return Err(Error::DimensionMismatch(format!(
            "subspace basis lives in C^{}, operators act on C^{}",
            p.nrows(),
            s.ambient
        )));
    }
    let gram = p.adjoint() * p;
    let h = p.ncols();
    if frobenius(&(gram - identity(h))) > 1e-8 * (1.0 + h as f64) {
        return Err(Error::DimensionMismatch(
            "compression basis is not orthonormal".into(),
        ));
    }
    let pieces: Vec<CMatrix> = s.basis.iter().map(|a| p.adjoint() * a * p).collect();
    OperatorSubspace::span(h, &pieces, tol)
}

/// `exp(A)` for anti-Hermitian `A`, computed through the spectral theorem.
pub fn expm_anti_hermitian(a: &CMatrix) -> Result<CMatrix> {
    let h = a * c64(0.0, -1.0);
    let eig = eig_hermitian(&h, 1e-8)?;
    let phases = CVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|&l| Complex64::from_polar(1.0, l)),
    );
    let v = &eig.vectors;
    Ok(v * CMatrix::from_diagonal(&phases) * v.adjoint())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Block-diagonal sum of square matrices.
pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(b);
        off += k;
    }
    out
}
