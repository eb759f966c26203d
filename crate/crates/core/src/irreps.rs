//! Unitary representations of matrix Lie algebras: highest weight irreps of
//! `u(n)` and `su(n)`, weights, extremal weights and decomposition into
//! irreducibles.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{build_algebra, AlgebraKind, MatrixLieAlgebra, RealVec, RootDatum};
use crate::matcore::{
    anti_hermitian_residual, block_diag, c64, commutant_basis, commutator, eig_hermitian,
    frobenius, identity, kron, null_space, CMatrix, CVector, CLUSTER_TOL, DEFAULT_RANK_TOL,
};

const WEIGHT_SEED: u64 = 0x7765_6967_6874;

/// An integral weight, as the tuple of eigenvalues of `-i dpi` on a Cartan
/// basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn new(entries: impl Into<Vec<i64>>) -> Self {
        Weight(entries.into())
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Non-increasing entries.
    pub fn is_dominant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    /// Rounds a real tuple to the nearest integers when every entry is
    /// within `tol` of one.
    pub fn from_reals(values: &[f64], tol: f64) -> Option<Self> {
        values
            .iter()
            .map(|&x| {
                let r = x.round();
                ((x - r).abs() <= tol).then_some(r as i64)
            })
            .collect::<Option<Vec<_>>>()
            .map(Weight)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A finite-dimensional unitary representation, given by the anti-Hermitian
/// matrices `dpi(x_k)` on the algebra basis.
#[derive(Debug, Clone)]
pub struct Representation {
    pub algebra: Arc<MatrixLieAlgebra>,
    pub dim: usize,
    pub dpi: Vec<CMatrix>,
    pub label: Option<Weight>,
}

impl Representation {
    /// Validates anti-Hermiticity and the homomorphism property within `tol`.
    pub fn new(algebra: Arc<MatrixLieAlgebra>, dpi: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let rep = Self::unchecked(algebra, dpi)?;
        for (k, m) in rep.dpi.iter().enumerate() {
            let r = anti_hermitian_residual(m);
            if r > tol * (1.0 + frobenius(m)) {
                return Err(Error::InvalidRepresentation(format!(
                    "dpi of basis element {k} is not anti-Hermitian (residual {r:.3e})"
                )));
            }
        }
        let res = rep.homomorphism_residual();
        if res > tol {
            return Err(Error::InvalidRepresentation(format!(
                "bracket relations violated (residual {res:.3e})"
            )));
        }
        Ok(rep)
    }

    fn unchecked(algebra: Arc<MatrixLieAlgebra>, dpi: Vec<CMatrix>) -> Result<Self> {
        if dpi.len() != algebra.dim() {
            return Err(Error::LengthMismatch {
                expected: algebra.dim(),
                got: dpi.len(),
            });
        }
        let dim = dpi.first().map(|m| m.nrows()).unwrap_or(0);
        if dpi.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::DimensionMismatch(
                "representation matrices differ in size".into(),
            ));
        }
        Ok(Representation {
            algebra,
            dim,
            dpi,
            label: None,
        })
    }

    pub fn with_label(mut self, label: Weight) -> Self {
        self.label = Some(label);
        self
    }

    /// The zero representation on `C^dim`.
    pub fn trivial(algebra: Arc<MatrixLieAlgebra>, dim: usize) -> Self {
        let dpi = vec![CMatrix::zeros(dim, dim); algebra.dim()];
        Representation {
            algebra,
            dim,
            dpi,
            label: None,
        }
    }

    /// The identity representation of a matrix algebra with anti-Hermitian
    /// basis.
    pub fn defining(algebra: Arc<MatrixLieAlgebra>) -> Result<Self> {
        let dpi = algebra.basis.clone();
        Self::new(algebra, dpi, 1e-10)
    }

    /// `dpi(x)` for real coefficients.
    pub fn eval(&self, x: &RealVec) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (c, d) in x.iter().zip(&self.dpi) {
            if *c != 0.0 {
                m += d.scale(*c);
            }
        }
        m
    }

    /// Complex-linear extension to `g_C`.
    pub fn eval_complex(&self, z: &CVector) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (c, d) in z.iter().zip(&self.dpi) {
            if *c != c64(0.0, 0.0) {
                m += d * *c;
            }
        }
        m
    }

    /// `dpi(z)` for a matrix `z` in `g_C`.
    pub fn eval_matrix(&self, z: &CMatrix) -> Result<CMatrix> {
        let coords = self.algebra.complex_coords(z, 1e-8)?;
        Ok(self.eval_complex(&coords))
    }

    /// Largest `||dpi([x_i,x_j]) - [dpi(x_i), dpi(x_j)]||` relative to the
    /// sizes involved.
    pub fn homomorphism_residual(&self) -> f64 {
        let g = &self.algebra;
        let mut worst: f64 = 0.0;
        for i in 0..g.dim() {
            for j in i + 1..g.dim() {
                let c = RealVec::from_vec(g.structure_constants[i][j].clone());
                let lhs = self.eval(&c);
                let rhs = commutator(&self.dpi[i], &self.dpi[j]);
                let scale = 1.0 + frobenius(&self.dpi[i]) * frobenius(&self.dpi[j]);
                worst = worst.max(frobenius(&(lhs - rhs)) / scale);
            }
        }
        worst
    }

    /// Restriction to the subspace with orthonormal basis `p`, which must be
    /// invariant.
    pub fn compress(&self, p: &CMatrix) -> Self {
        let dpi = self.dpi.iter().map(|m| p.adjoint() * m * p).collect();
        Representation {
            algebra: self.algebra.clone(),
            dim: p.ncols(),
            dpi,
            label: None,
        }
    }

    /// Restriction to a subalgebra whose basis elements have the given
    /// coefficient vectors in the ambient algebra.
    pub fn restrict(&self, sub: Arc<MatrixLieAlgebra>, elements: &[RealVec]) -> Result<Self> {
        let dpi = elements.iter().map(|e| self.eval(e)).collect();
        Self::unchecked(sub, dpi)
    }

    /// Contragredient representation.
    pub fn dual(&self) -> Self {
        Representation {
            algebra: self.algebra.clone(),
            dim: self.dim,
            dpi: self.dpi.iter().map(|m| m.map(|z| z.conj())).collect(),
            label: None,
        }
    }

    pub fn direct_sum(reps: &[Representation]) -> Result<Self> {
        let first = reps
            .first()
            .ok_or_else(|| Error::InvalidRepresentation("empty direct sum".into()))?;
        let dpi = (0..first.algebra.dim())
            .map(|k| block_diag(&reps.iter().map(|r| r.dpi[k].clone()).collect::<Vec<_>>()))
            .collect();
        Self::unchecked(first.algebra.clone(), dpi)
    }

    pub fn tensor(&self, other: &Representation) -> Self {
        let ia = identity(self.dim);
        let ib = identity(other.dim);
        let dpi = self
            .dpi
            .iter()
            .zip(&other.dpi)
            .map(|(a, b)| kron(a, &ib) + kron(&ia, b))
            .collect();
        Representation {
            algebra: self.algebra.clone(),
            dim: self.dim * other.dim,
            dpi,
            label: None,
        }
    }

    /// Dimension of the commutant of `dpi(g)`.
    pub fn commutant_dim(&self, tol: f64) -> Result<usize> {
        Ok(commutant_basis(self.dim, &self.dpi, tol)?.dimension())
    }

    pub fn is_irreducible(&self, tol: f64) -> Result<bool> {
        Ok(self.dim > 0 && self.commutant_dim(tol)? == 1)
    }
}

/// Dimension of the `u(n)` irrep with highest weight `lam` from the Weyl
/// dimension formula.
pub fn weyl_dimension(lam: &[i64]) -> usize {
    let n = lam.len();
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for i in 0..n {
        for j in i + 1..n {
            num *= (lam[i] - lam[j]) as i128 + (j - i) as i128;
            den *= (j - i) as i128;
        }
    }
    (num / den) as usize
}

/// Dense vectors on `(C^n)^{⊗k}` with the natural `gl(n)` action.
struct TensorPower {
    n: usize,
    k: usize,
    size: usize,
    strides: Vec<usize>,
}

impl TensorPower {
    fn new(n: usize, k: usize) -> Self {
        let strides: Vec<usize> = (0..k).map(|p| n.pow(p as u32)).collect();
        TensorPower {
            n,
            k,
            size: n.pow(k as u32),
            strides,
        }
    }

    fn digit(&self, idx: usize, p: usize) -> usize {
        (idx / self.strides[p]) % self.n
    }

    fn counts(&self, idx: usize) -> Vec<i64> {
        let mut c = vec![0i64; self.n];
        for p in 0..self.k {
            c[self.digit(idx, p)] += 1;
        }
        c
    }

    /// `E_ij` acting on `v`.
    fn apply(&self, i: usize, j: usize, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.size);
        for (idx, &x) in v.iter().enumerate() {
            if x == c64(0.0, 0.0) {
                continue;
            }
            for p in 0..self.k {
                if self.digit(idx, p) == j {
                    let target = idx + i * self.strides[p] - j * self.strides[p];
                    out[target] += x;
                }
            }
        }
        out
    }
}

fn orthogonalize(v: &mut CVector, basis: &[CVector]) {
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(v);
            *v -= b * c;
        }
    }
}

/// Irreducible unitary representation of `u(n)` with highest weight `lam`.
pub fn irrep_un(n: usize, lam: &Weight) -> Result<Representation> {
    if lam.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: lam.len(),
        });
    }
    if !lam.is_dominant() {
        return Err(Error::NotDominant(lam.0.clone()));
    }
    let algebra = Arc::new(build_algebra(AlgebraKind::Unitary(n))?);
    let shift = lam.0[n - 1];
    let mu: Vec<i64> = lam.0.iter().map(|&x| x - shift).collect();
    let k: usize = mu.iter().sum::<i64>() as usize;
    let tp = TensorPower::new(n, k);

    // highest weight vector inside the mu-weight space
    let weight_space: Vec<usize> = (0..tp.size).filter(|&idx| tp.counts(idx) == mu).collect();
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut entries: Vec<(usize, usize, Complex64)> = Vec::new();
    for (col, &idx) in weight_space.iter().enumerate() {
        let mut e = CVector::zeros(tp.size);
        e[idx] = c64(1.0, 0.0);
        for i in 0..n.saturating_sub(1) {
            let img = tp.apply(i, i + 1, &e);
            for (t, &x) in img.iter().enumerate() {
                if x != c64(0.0, 0.0) {
                    let key = i * tp.size + t;
                    let next = rows.len();
                    let r = *rows.entry(key).or_insert(next);
                    entries.push((r, col, x));
                }
            }
        }
    }
    let mut raising = CMatrix::zeros(rows.len(), weight_space.len());
    for (r, c, x) in entries {
        raising[(r, c)] += x;
    }
    let kernel = null_space(&raising, DEFAULT_RANK_TOL)?;
    if kernel.ncols() == 0 {
        return Err(Error::DimensionOracleMismatch {
            expected: weyl_dimension(&lam.0),
            got: 0,
        });
    }
    let mut top = CVector::zeros(tp.size);
    for (row, &idx) in weight_space.iter().enumerate() {
        top[idx] = kernel[(row, 0)];
    }
    top /= c64(top.norm(), 0.0);

    // span under the simple lowering operators
    let mut basis = vec![top.clone()];
    let mut queue = VecDeque::from([top]);
    while let Some(u) = queue.pop_front() {
        for i in 0..n.saturating_sub(1) {
            let mut w = tp.apply(i + 1, i, &u);
            let before = w.norm();
            if before == 0.0 {
                continue;
            }
            orthogonalize(&mut w, &basis);
            let after = w.norm();
            if after > 1e-8 * before.max(1.0) {
                w /= c64(after, 0.0);
                basis.push(w.clone());
                queue.push_back(w);
            }
        }
    }
    let expected = weyl_dimension(&lam.0);
    if basis.len() != expected {
        return Err(Error::DimensionOracleMismatch {
            expected,
            got: basis.len(),
        });
    }
    let dim = basis.len();

    // compressed matrix units
    let mut units = vec![vec![CMatrix::zeros(dim, dim); n]; n];
    for (i, row) in units.iter_mut().enumerate() {
        for (j, m) in row.iter_mut().enumerate() {
            for (c, b) in basis.iter().enumerate() {
                let img = tp.apply(i, j, b);
                for (r, br) in basis.iter().enumerate() {
                    m[(r, c)] = br.dotc(&img);
                }
            }
        }
    }
    let dpi = algebra
        .basis
        .iter()
        .map(|x| {
            let mut m = identity(dim) * (x.trace() * shift as f64);
            for i in 0..n {
                for j in 0..n {
                    if x[(i, j)] != c64(0.0, 0.0) {
                        m += &units[i][j] * x[(i, j)];
                    }
                }
            }
            m
        })
        .collect();
    Ok(Representation::new(algebra, dpi, 1e-9)?.with_label(lam.clone()))
}

/// Irreducible representation of `su(n)` with highest weight `lam`, the
/// restriction of the `u(n)` irrep.
pub fn irrep_sun(n: usize, lam: &Weight) -> Result<Representation> {
    let full = irrep_un(n, lam)?;
    let algebra = Arc::new(build_algebra(AlgebraKind::SpecialUnitary(n))?);
    let dpi = algebra
        .basis
        .iter()
        .map(|x| full.eval_matrix(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Representation::new(algebra, dpi, 1e-9)?.with_label(lam.clone()))
}

/// Partition of `0..n` into groups of equal entries, ordered by first index.
pub fn level_blocks(entries: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (k, &x) in entries.iter().enumerate() {
        match blocks.iter_mut().find(|b| (entries[b[0]] - x).abs() <= tol) {
            Some(b) => b.push(k),
            None => blocks.push(vec![k]),
        }
    }
    blocks
}

/// Irreducible representation of a block-diagonal subalgebra `h` of
/// `gl(n)` whose elements restrict to `u(n_b)` on each index block.
///
/// `lam` has length `n`; its restriction to each block, read in index order,
/// is the highest weight of the corresponding factor.
pub fn block_irrep(h: Arc<MatrixLieAlgebra>, blocks: &[Vec<usize>], lam: &Weight) -> Result<Representation> {
    let factors = blocks
        .iter()
        .map(|b| {
            let w = Weight(b.iter().map(|&k| lam.0[k]).collect());
            irrep_un(b.len(), &w)
        })
        .collect::<Result<Vec<_>>>()?;
    let dims: Vec<usize> = factors.iter().map(|f| f.dim).collect();
    let total: usize = dims.iter().product();
    let mut dpi = Vec::with_capacity(h.dim());
    for x in &h.basis {
        let mut m = CMatrix::zeros(total, total);
        for (b, (idx, f)) in blocks.iter().zip(&factors).enumerate() {
            let part = CMatrix::from_fn(idx.len(), idx.len(), |r, c| x[(idx[r], idx[c])]);
            let local = f.eval_matrix(&part)?;
            let left: usize = dims[..b].iter().product();
            let right: usize = dims[b + 1..].iter().product();
            m += kron(&kron(&identity(left), &local), &identity(right));
        }
        dpi.push(m);
    }
    Ok(Representation::new(h, dpi, 1e-9)?.with_label(lam.clone()))
}

/// A joint eigenspace of `-i dpi(h)` over a Cartan basis.
#[derive(Debug, Clone)]
pub struct WeightSpace {
    pub values: Vec<f64>,
    pub multiplicity: usize,
    /// Orthonormal basis, as columns.
    pub basis: CMatrix,
}

impl WeightSpace {
    pub fn weight(&self, tol: f64) -> Option<Weight> {
        Weight::from_reals(&self.values, tol)
    }
}

/// Joint eigenspaces of `-i dpi(h)` for `h` in `cartan` (matrices in `g`).
pub fn weights_of(rep: &Representation, cartan: &[CMatrix], tol: f64) -> Result<Vec<WeightSpace>> {
    let ops: Vec<CMatrix> = cartan
        .iter()
        .map(|h| rep.eval_matrix(h).map(|m| m * c64(0.0, -1.0)))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for a in &ops {
        for b in &ops {
            let scale = 1.0 + frobenius(a) * frobenius(b);
            worst = worst.max(frobenius(&commutator(a, b)) / scale);
        }
    }
    if worst > tol {
        return Err(Error::NonCommutingCartan(worst));
    }
    if rep.dim == 0 {
        return Ok(vec![]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(WEIGHT_SEED);
    let mut generic = CMatrix::zeros(rep.dim, rep.dim);
    for op in &ops {
        generic += op.scale(rng.gen_range(0.5..1.5) * std::f64::consts::SQRT_2.powi(rng.gen_range(0..4)));
    }
    let eig = eig_hermitian(&generic, 1e-8)?;
    let scale = 1.0 + eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    for range in eig.clusters(CLUSTER_TOL * scale) {
        let q = eig.subspace(range.clone());
        let values: Vec<f64> = ops
            .iter()
            .map(|h| (q.adjoint() * h * &q).trace().re / range.len() as f64)
            .collect();
        out.push(WeightSpace {
            values,
            multiplicity: range.len(),
            basis: q,
        });
    }
    Ok(out)
}

/// Weights rounded to integers, with multiplicities, sorted.
pub fn integral_weights(spaces: &[WeightSpace], tol: f64) -> Result<Vec<(Weight, usize)>> {
    let mut acc: HashMap<Weight, usize> = HashMap::new();
    for s in spaces {
        let w = s.weight(tol).ok_or_else(|| {
            Error::InvalidRepresentation(format!("non-integral weight {:?}", s.values))
        })?;
        *acc.entry(w).or_default() += s.multiplicity;
    }
    let mut out: Vec<(Weight, usize)> = acc.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Whether to look for the weight killed by lowering or by raising
/// operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremity {
    Lowest,
    Highest,
}

/// The lowest (or highest) weight of an irreducible representation relative
/// to the positive system of `rd`.
pub fn extremal_weight(rep: &Representation, rd: &RootDatum, direction: Extremity) -> Result<Weight> {
    let n = rd.n;
    let mut stacked: Vec<CMatrix> = Vec::new();
    for root in rd.positive_roots() {
        let z = match direction {
            Extremity::Lowest => root.root_vector(n).transpose(),
            Extremity::Highest => root.root_vector(n),
        };
        stacked.push(rep.eval_matrix(&z)?);
    }
    let d = rep.dim;
    let mut big = CMatrix::zeros(stacked.len() * d, d);
    for (k, m) in stacked.iter().enumerate() {
        big.view_mut((k * d, 0), (d, d)).copy_from(m);
    }
    let kernel = if stacked.is_empty() {
        identity(d)
    } else {
        null_space(&big, DEFAULT_RANK_TOL)?
    };
    if kernel.ncols() != 1 {
        return Err(Error::NotIrreducible(format!(
            "extremal weight space has dimension {}",
            kernel.ncols()
        )));
    }
    let v = kernel.column(0).into_owned();
    let values: Vec<f64> = rd
        .cartan
        .iter()
        .map(|h| {
            let m = rep.eval_matrix(h)? * c64(0.0, -1.0);
            Ok(v.dotc(&(m * &v)).re)
        })
        .collect::<Result<_>>()?;
    Weight::from_reals(&values, 1e-6)
        .ok_or_else(|| Error::InvalidRepresentation(format!("non-integral weight {values:?}")))
}

/// Decomposes a representation into isotypic classes, returning one
/// irreducible representative per class with its multiplicity.
pub fn decompose(rep: &Representation, tol: f64) -> Result<Vec<(Representation, usize)>> {
    if rep.dim == 0 {
        return Ok(vec![]);
    }
    let mut pieces: Vec<CMatrix> = Vec::new();
    split_irreducible(rep, &identity(rep.dim), tol, &mut pieces, 0)?;

    // equivalent pieces are linked by a nonzero intertwiner from the commutant
    let commutant = commutant_basis(rep.dim, &rep.dpi, tol)?;
    let count = pieces.len();
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for a in 0..count {
        for b in a + 1..count {
            if pieces[a].ncols() != pieces[b].ncols() {
                continue;
            }
            let linked = commutant
                .basis
                .iter()
                .any(|x| frobenius(&(pieces[a].adjoint() * x * &pieces[b])) > 1e-6);
            if linked {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[rb] = ra;
            }
        }
    }
    let mut classes: Vec<(usize, usize)> = Vec::new();
    for k in 0..count {
        let root = find(&mut parent, k);
        match classes.iter_mut().find(|(r, _)| *r == root) {
            Some((_, m)) => *m += 1,
            None => classes.push((root, 1)),
        }
    }
    Ok(classes
        .into_iter()
        .map(|(root, mult)| (rep.compress(&pieces[root]), mult))
        .collect())
}

fn split_irreducible(
    rep: &Representation,
    frame: &CMatrix,
    tol: f64,
    out: &mut Vec<CMatrix>,
    depth: usize,
) -> Result<()> {
    let local = rep.compress(frame);
    let commutant = commutant_basis(local.dim, &local.dpi, tol)?;
    if commutant.dimension() <= 1 {
        out.push(frame.clone());
        return Ok(());
    }
    if depth > 16 {
        return Err(Error::ConvergenceFailure("irreducible splitting did not terminate".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(WEIGHT_SEED ^ depth as u64);
    let mut h = CMatrix::zeros(local.dim, local.dim);
    for x in &commutant.basis {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        h += (x + x.adjoint()).scale(a) + (x - x.adjoint()) * c64(0.0, b);
    }
    let eig = eig_hermitian(&h, 1e-8)?;
    let scale = 1.0 + eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let clusters = eig.clusters(CLUSTER_TOL * scale);
    if clusters.len() == 1 {
        return Err(Error::ConvergenceFailure("generic commutant element is scalar".into()));
    }
    for range in clusters {
        let sub = frame * eig.subspace(range);
        split_irreducible(rep, &sub, tol, out, depth + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::root_datum;

    fn w(v: &[i64]) -> Weight {
        Weight::new(v.to_vec())
    }

    #[test]
    fn defining_rep_from_weight() {
        let r = irrep_un(2, &w(&[1, 0])).unwrap();
        assert_eq!(r.dim, 2);
        let def = Representation::defining(r.algebra.clone()).unwrap();
        let a = integral_weights(&weights_of(&r, &standard_cartan(2), 1e-8).unwrap(), 1e-8).unwrap();
        let b = integral_weights(&weights_of(&def, &standard_cartan(2), 1e-8).unwrap(), 1e-8).unwrap();
        assert_eq!(a, b);
    }

    fn standard_cartan(n: usize) -> Vec<CMatrix> {
        (0..n).map(|k| crate::matcore::matrix_unit(n, k, k) * crate::matcore::I).collect()
    }

    #[test]
    fn small_dimensions() {
        assert_eq!(irrep_un(3, &w(&[1, 1, 0])).unwrap().dim, 3);
        assert_eq!(irrep_un(2, &w(&[2, 0])).unwrap().dim, 3);
        assert_eq!(irrep_un(3, &w(&[0, 0, 0])).unwrap().dim, 1);
        assert_eq!(irrep_un(3, &w(&[2, 0, -2])).unwrap().dim, 27);
    }

    #[test]
    fn rejects_non_dominant() {
        assert!(matches!(irrep_un(2, &w(&[0, 1])), Err(Error::NotDominant(_))));
    }

    #[test]
    fn sym2_weights() {
        let r = irrep_un(2, &w(&[2, 0])).unwrap();
        let ws = integral_weights(&weights_of(&r, &standard_cartan(2), 1e-8).unwrap(), 1e-8).unwrap();
        assert_eq!(ws, vec![(w(&[0, 2]), 1), (w(&[1, 1]), 1), (w(&[2, 0]), 1)]);
    }

    #[test]
    fn su2_adjoint_weights() {
        let r = irrep_sun(2, &w(&[1, -1])).unwrap();
        let g = r.algebra.clone();
        let h = g.basis[0].clone();
        let ws = integral_weights(&weights_of(&r, &[h], 1e-8).unwrap(), 1e-8).unwrap();
        assert_eq!(ws, vec![(w(&[-2]), 1), (w(&[0]), 1), (w(&[2]), 1)]);
    }

    #[test]
    fn determinant_shift() {
        let r = irrep_un(2, &w(&[-1, -1])).unwrap();
        assert_eq!(r.dim, 1);
        let ws = integral_weights(&weights_of(&r, &standard_cartan(2), 1e-8).unwrap(), 1e-8).unwrap();
        assert_eq!(ws, vec![(w(&[-1, -1]), 1)]);
    }

    #[test]
    fn lowest_weights() {
        let g = Arc::new(build_algebra(AlgebraKind::Unitary(2)).unwrap());
        let d = g.diagonal_element(&[1.0, 0.0]).unwrap();
        let rd = root_datum(&g, &d, 1e-9).unwrap();
        let def = Representation::defining(g.clone()).unwrap();
        assert_eq!(extremal_weight(&def, &rd, Extremity::Lowest).unwrap(), w(&[0, 1]));
        assert_eq!(extremal_weight(&def, &rd, Extremity::Highest).unwrap(), w(&[1, 0]));
        let triv = Representation::trivial(g, 1);
        assert_eq!(extremal_weight(&triv, &rd, Extremity::Lowest).unwrap(), w(&[0, 0]));

        let r = irrep_un(3, &w(&[1, 1, 0])).unwrap();
        let d3 = r.algebra.diagonal_element(&[2.0, 1.0, 0.0]).unwrap();
        let rd3 = root_datum(&r.algebra, &d3, 1e-9).unwrap();
        assert_eq!(extremal_weight(&r, &rd3, Extremity::Lowest).unwrap(), w(&[0, 1, 1]));
    }

    #[test]
    fn extremal_weight_of_reducible_fails() {
        let g = Arc::new(build_algebra(AlgebraKind::Unitary(2)).unwrap());
        let d = g.diagonal_element(&[1.0, 0.0]).unwrap();
        let rd = root_datum(&g, &d, 1e-9).unwrap();
        let def = Representation::defining(g).unwrap();
        let two = Representation::direct_sum(&[def.clone(), def]).unwrap();
        assert!(matches!(
            extremal_weight(&two, &rd, Extremity::Lowest),
            Err(Error::NotIrreducible(_))
        ));
    }

    #[test]
    fn decompose_examples() {
        let g = Arc::new(build_algebra(AlgebraKind::Unitary(2)).unwrap());
        let def = Representation::defining(g.clone()).unwrap();
        let two = Representation::direct_sum(&[def.clone(), def.clone()]).unwrap();
        let parts = decompose(&two, 1e-9).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].1, 2);
        assert_eq!(parts[0].0.dim, 2);

        let sq = def.tensor(&def);
        let mut dims: Vec<(usize, usize)> = decompose(&sq, 1e-9)
            .unwrap()
            .iter()
            .map(|(r, m)| (r.dim, *m))
            .collect();
        dims.sort();
        assert_eq!(dims, vec![(1, 1), (3, 1)]);

        let triv = Representation::trivial(g, 1);
        let parts = decompose(&triv, 1e-9).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].1, 1);
    }

    #[test]
    fn block_irrep_of_levi() {
        let g = Arc::new(build_algebra(AlgebraKind::Unitary(3)).unwrap());
        let d = g.diagonal_element(&[1.0, 0.0, 0.0]).unwrap();
        let (h, _) = crate::liealg::fixed_subalgebra(&g, &crate::liealg::Derivation::Inner(d), 1e-9).unwrap();
        let blocks = level_blocks(&[1.0, 0.0, 0.0], 1e-9);
        assert_eq!(blocks, vec![vec![0], vec![1, 2]]);
        let r = block_irrep(Arc::new(h), &blocks, &w(&[0, 2, 1])).unwrap();
        assert_eq!(r.dim, 2);
        assert!(r.homomorphism_residual() < 1e-10);
    }

    #[test]
    fn weyl_dimension_values() {
        assert_eq!(weyl_dimension(&[1, 0, 0]), 3);
        assert_eq!(weyl_dimension(&[2, 1, 0]), 8);
        assert_eq!(weyl_dimension(&[3, 0]), 4);
    }
}
