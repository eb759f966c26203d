//! Matrix Lie algebras, derivations and their eigenspace splittings, root
//! data for the unitary algebras, and finite-dimensional spectral subspaces.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    c64, commutator, complexify, eig_hermitian, frobenius, matrix_unit, null_space, rank,
    real_null_space, CMatrix, CVector, CLUSTER_TOL, DEFAULT_RANK_TOL, I,
};

/// Real coefficient vector of an element of a Lie algebra.
pub type RealVec = DVector<f64>;

/// Tolerance on bracket closure and Jacobi residuals of built algebras.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// The algebra families that can be built by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum AlgebraKind {
    /// `u(n)`
    Unitary(usize),
    /// `su(n)`
    SpecialUnitary(usize),
    /// `u(p, q)`
    IndefiniteUnitary(usize, usize),
    /// `su(p, q)`
    IndefiniteSpecialUnitary(usize, usize),
    /// Heisenberg algebra on a symplectic space of dimension `2k`, labelled by `2k`.
    Heisenberg(usize),
    /// Abelian algebra `R^n`.
    Abelian(usize),
}

impl AlgebraKind {
    pub fn is_compact(&self) -> bool {
        matches!(self, AlgebraKind::Unitary(_) | AlgebraKind::SpecialUnitary(_))
    }

    /// Matrix size `n` of the unitary families.
    pub fn unitary_rank(&self) -> Option<usize> {
        match *self {
            AlgebraKind::Unitary(n) | AlgebraKind::SpecialUnitary(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraKind::Unitary(n) => write!(f, "u({n})"),
            AlgebraKind::SpecialUnitary(n) => write!(f, "su({n})"),
            AlgebraKind::IndefiniteUnitary(p, q) => write!(f, "u({p},{q})"),
            AlgebraKind::IndefiniteSpecialUnitary(p, q) => write!(f, "su({p},{q})"),
            AlgebraKind::Heisenberg(m) => write!(f, "heis({m})"),
            AlgebraKind::Abelian(n) => write!(f, "abelian({n})"),
        }
    }
}

impl From<AlgebraKind> for String {
    fn from(k: AlgebraKind) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for AlgebraKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for AlgebraKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace(' ', "");
        let unsupported = || Error::UnsupportedKind(s.clone());
        let open = s.find('(').ok_or_else(unsupported)?;
        if !s.ends_with(')') {
            return Err(unsupported());
        }
        let head = &s[..open];
        let args: Vec<usize> = s[open + 1..s.len() - 1]
            .split(',')
            .map(|a| a.parse::<usize>().map_err(|_| unsupported()))
            .collect::<Result<_>>()?;
        let kind = match (head, args.as_slice()) {
            ("u", [n]) => AlgebraKind::Unitary(*n),
            ("su", [n]) => AlgebraKind::SpecialUnitary(*n),
            ("u", [p, q]) => AlgebraKind::IndefiniteUnitary(*p, *q),
            ("su", [p, q]) => AlgebraKind::IndefiniteSpecialUnitary(*p, *q),
            ("heis", [m]) => AlgebraKind::Heisenberg(*m),
            ("abelian", [n]) => AlgebraKind::Abelian(*n),
            _ => return Err(unsupported()),
        };
        Ok(kind)
    }
}

/// A real Lie algebra realised by a basis of complex matrices.
#[derive(Debug, Clone)]
pub struct MatrixLieAlgebra {
    pub name: String,
    pub kind: Option<AlgebraKind>,
    /// Matrix size.
    pub n: usize,
    pub basis: Vec<CMatrix>,
    /// `c[i][j][k]` with `[x_i, x_j] = sum_k c[i][j][k] x_k`.
    pub structure_constants: Vec<Vec<Vec<f64>>>,
    /// Every basis matrix is anti-Hermitian.
    pub compact: bool,
    /// Left inverse of the basis frame, mapping `vec(Z)` to complex coordinates.
    coord_map: CMatrix,
}

impl MatrixLieAlgebra {
    /// Builds an algebra from a real basis of matrices, computing and
    /// verifying its structure constants.
    pub fn from_basis(name: impl Into<String>, basis: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let name = name.into();
        let n = basis.first().map(|b| b.nrows()).unwrap_or(0);
        for b in &basis {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::InvalidAlgebra(format!(
                    "{name}: basis matrices must all be {n}x{n}"
                )));
            }
        }
        let dim = basis.len();
        let mut frame = CMatrix::zeros(n * n, dim);
        for (k, b) in basis.iter().enumerate() {
            frame.set_column(k, &CVector::from_iterator(n * n, b.iter().copied()));
        }
        if rank(&frame, DEFAULT_RANK_TOL)? != dim {
            return Err(Error::InvalidAlgebra(format!(
                "{name}: basis is not linearly independent over C"
            )));
        }
        let gram = frame.adjoint() * &frame;
        let gram_inv = gram
            .try_inverse()
            .ok_or_else(|| Error::InvalidAlgebra(format!("{name}: singular Gram matrix")))?;
        let coord_map = gram_inv * frame.adjoint();
        let compact = basis.iter().all(|b| frobenius(&(b + b.adjoint())) <= tol * (1.0 + frobenius(b)));

        let mut alg = MatrixLieAlgebra {
            name,
            kind: None,
            n,
            basis,
            structure_constants: vec![],
            compact,
            coord_map,
        };
        let mut sc = vec![vec![vec![0.0; dim]; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let br = commutator(&alg.basis[i], &alg.basis[j]);
                let coords = alg.real_coords(&br, tol).map_err(|e| {
                    Error::InvalidAlgebra(format!(
                        "{}: bracket of basis elements {i},{j} leaves the span ({e})",
                        alg.name
                    ))
                })?;
                sc[i][j] = coords.iter().copied().collect();
            }
        }
        alg.structure_constants = sc;
        let jac = alg.jacobi_residual();
        if jac > tol {
            return Err(Error::InvalidAlgebra(format!(
                "{}: Jacobi residual {jac:.3e}",
                alg.name
            )));
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The matrix `sum_k c_k x_k` for real coefficients.
    pub fn matrix_of(&self, coeffs: &RealVec) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != 0.0 {
                m += b.scale(*c);
            }
        }
        m
    }

    /// The matrix `sum_k c_k x_k` for complex coefficients (an element of `g_C`).
    pub fn matrix_of_complex(&self, coeffs: &CVector) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            m += b * *c;
        }
        m
    }

    /// Complex coordinates of `z` together with the relative residual of the
    /// least-squares fit.
    pub fn complex_coords_with_residual(&self, z: &CMatrix) -> (CVector, f64) {
        let v = CVector::from_iterator(z.len(), z.iter().copied());
        let c = &self.coord_map * &v;
        let back = self.matrix_of_complex(&c);
        let scale = v.norm();
        let res = if scale == 0.0 { 0.0 } else { frobenius(&(back - z)) / scale };
        (c, res)
    }

    /// Complex coordinates of an element of `g_C`.
    pub fn complex_coords(&self, z: &CMatrix, tol: f64) -> Result<CVector> {
        if z.nrows() != self.n || z.ncols() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} acts on C^{}, got a {}x{} matrix",
                self.name,
                self.n,
                z.nrows(),
                z.ncols()
            )));
        }
        let (c, res) = self.complex_coords_with_residual(z);
        if res > tol {
            return Err(Error::NotInAlgebra(res));
        }
        Ok(c)
    }

    /// Real coordinates of an element of `g`.
    pub fn real_coords(&self, x: &CMatrix, tol: f64) -> Result<RealVec> {
        let c = self.complex_coords(x, tol)?;
        let scale = c.norm().max(1.0);
        let imag = c.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if imag > tol * scale {
            return Err(Error::NotInAlgebra(imag / scale));
        }
        Ok(RealVec::from_iterator(c.len(), c.iter().map(|z| z.re)))
    }

    /// The conjugate-linear involution of `g_C` fixing `-g`: for `z = sum c_k x_k`,
    /// `z* = sum -conj(c_k) x_k`.
    pub fn star(&self, z: &CVector) -> CVector {
        z.map(|c| -c.conj())
    }

    /// `[x, y]` on complex coefficient vectors via the structure constants.
    pub fn bracket(&self, x: &CVector, y: &CVector) -> CVector {
        let dim = self.dim();
        let mut out = CVector::zeros(dim);
        for i in 0..dim {
            if x[i] == c64(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                let xy = x[i] * y[j];
                if xy == c64(0.0, 0.0) {
                    continue;
                }
                for k in 0..dim {
                    out[k] += xy * self.structure_constants[i][j][k];
                }
            }
        }
        out
    }

    /// Matrix of `ad x` in the basis, with column `j` the coordinates of `[x, x_j]`.
    pub fn ad(&self, x: &RealVec) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..dim {
                for k in 0..dim {
                    m[(k, j)] += x[i] * self.structure_constants[i][j][k];
                }
            }
        }
        m
    }

    /// Largest relative residual of `[x_i, x_j]` against its expansion.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let br = commutator(&self.basis[i], &self.basis[j]);
                let c = RealVec::from_vec(self.structure_constants[i][j].clone());
                let diff = frobenius(&(self.matrix_of(&c) - &br));
                worst = worst.max(diff / (1.0 + frobenius(&br)));
            }
        }
        worst
    }

    /// Largest Jacobi residual over basis triples, computed from the
    /// structure constants.
    pub fn jacobi_residual(&self) -> f64 {
        let dim = self.dim();
        let c = &self.structure_constants;
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for m in 0..dim {
                        let mut s = 0.0;
                        for l in 0..dim {
                            s += c[j][k][l] * c[i][l][m]
                                + c[k][i][l] * c[j][l][m]
                                + c[i][j][l] * c[k][l][m];
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Real coordinates of `i * diag(entries)`.
    pub fn diagonal_element(&self, entries: &[f64]) -> Result<RealVec> {
        if entries.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: entries.len(),
            });
        }
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            self.n,
            entries.iter().map(|&t| c64(0.0, t)),
        ));
        self.real_coords(&m, 1e-9)
    }

    /// Subalgebra spanned by the given real coefficient vectors.
    pub fn subalgebra(&self, name: impl Into<String>, elements: &[RealVec]) -> Result<Self> {
        let mats = elements.iter().map(|e| self.matrix_of(e)).collect();
        MatrixLieAlgebra::from_basis(name, mats, 1e-8)
    }
}

/// Builds one of the named algebras.
pub fn build_algebra(kind: AlgebraKind) -> Result<MatrixLieAlgebra> {
    let basis = match kind {
        AlgebraKind::Unitary(n) if n >= 1 => unitary_basis(n, false),
        AlgebraKind::SpecialUnitary(n) if n >= 2 => unitary_basis(n, true),
        AlgebraKind::IndefiniteUnitary(p, q) if p + q >= 1 => indefinite_basis(p, q, false),
        AlgebraKind::IndefiniteSpecialUnitary(p, q) if p + q >= 2 => indefinite_basis(p, q, true),
        AlgebraKind::Heisenberg(m) if m >= 2 && m % 2 == 0 => heisenberg_basis(m / 2),
        AlgebraKind::Abelian(n) if n >= 1 => (0..n).map(|k| matrix_unit(n, k, k)).collect(),
        other => return Err(Error::UnsupportedKind(other.to_string())),
    };
    let mut alg = MatrixLieAlgebra::from_basis(kind.to_string(), basis, STRUCTURE_TOL)?;
    alg.kind = Some(kind);
    Ok(alg)
}

/// `i E_kk`, then `E_jk - E_kj` and `i (E_jk + E_kj)` for `j < k`. The traceless
/// variant replaces the diagonal part by `i (E_kk - E_{k+1,k+1})`.
fn unitary_basis(n: usize, traceless: bool) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    if traceless {
        for k in 0..n - 1 {
            basis.push((matrix_unit(n, k, k) - matrix_unit(n, k + 1, k + 1)) * I);
        }
    } else {
        for k in 0..n {
            basis.push(matrix_unit(n, k, k) * I);
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            basis.push(matrix_unit(n, j, k) - matrix_unit(n, k, j));
            basis.push((matrix_unit(n, j, k) + matrix_unit(n, k, j)) * I);
        }
    }
    basis
}

/// `J * u(n)` with `J = diag(1_p, -1_q)`; the traceless variant uses the
/// diagonal traceless elements unchanged.
fn indefinite_basis(p: usize, q: usize, traceless: bool) -> Vec<CMatrix> {
    let n = p + q;
    let j = CMatrix::from_diagonal(&CVector::from_iterator(
        n,
        (0..n).map(|k| if k < p { c64(1.0, 0.0) } else { c64(-1.0, 0.0) }),
    ));
    let compact = unitary_basis(n, traceless);
    let diag_count = if traceless { n - 1 } else { n };
    compact
        .into_iter()
        .enumerate()
        .map(|(idx, b)| if idx < diag_count { b } else { &j * b })
        .collect()
}

/// Strictly upper triangular realisation on `C^(k+2)`: `p_i = E_{0,i}`,
/// `q_i = E_{i,k+1}`, `c = E_{0,k+1}`, so `[p_i, q_j] = delta_ij c`.
fn heisenberg_basis(k: usize) -> Vec<CMatrix> {
    let n = k + 2;
    let mut basis = Vec::with_capacity(2 * k + 1);
    for i in 1..=k {
        basis.push(matrix_unit(n, 0, i));
    }
    for i in 1..=k {
        basis.push(matrix_unit(n, i, k + 1));
    }
    basis.push(matrix_unit(n, 0, k + 1));
    basis
}

/// A derivation of a Lie algebra: inner (`ad d`) or given by its matrix.
#[derive(Debug, Clone)]
pub enum Derivation {
    Inner(RealVec),
    Outer(DMatrix<f64>),
}

impl Derivation {
    /// Validates that `m` is a derivation of `g`.
    pub fn outer(g: &MatrixLieAlgebra, m: DMatrix<f64>, tol: f64) -> Result<Self> {
        let dim = g.dim();
        if m.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "derivation of a {dim}-dimensional algebra must be {dim}x{dim}"
            )));
        }
        let mc = complexify(&m);
        for i in 0..dim {
            for j in 0..dim {
                let ei = CVector::from_fn(dim, |r, _| c64(if r == i { 1.0 } else { 0.0 }, 0.0));
                let ej = CVector::from_fn(dim, |r, _| c64(if r == j { 1.0 } else { 0.0 }, 0.0));
                let lhs = &mc * g.bracket(&ei, &ej);
                let rhs = g.bracket(&(&mc * &ei), &ej) + g.bracket(&ei, &(&mc * &ej));
                let res = (lhs - rhs).norm();
                if res > tol * (1.0 + m.norm()) {
                    return Err(Error::InvalidAlgebra(format!(
                        "matrix is not a derivation (residual {res:.3e} on pair {i},{j})"
                    )));
                }
            }
        }
        Ok(Derivation::Outer(m))
    }

    /// Matrix of the derivation in the basis of `g`.
    pub fn matrix(&self, g: &MatrixLieAlgebra) -> DMatrix<f64> {
        match self {
            Derivation::Inner(d) => g.ad(d),
            Derivation::Outer(m) => m.clone(),
        }
    }

    pub fn element(&self) -> Option<&RealVec> {
        match self {
            Derivation::Inner(d) => Some(d),
            Derivation::Outer(_) => None,
        }
    }
}

/// One (generalised) eigenspace of `-i D` on `g_C`.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub lambda: Complex64,
    /// Orthonormal coefficient vectors, as columns.
    pub basis: CMatrix,
    pub algebraic_multiplicity: usize,
    /// True when `basis` spans the generalised eigenspace because the
    /// ordinary one is too small.
    pub generalized: bool,
}

impl Eigenspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.lambda.im.abs() <= tol
    }
}

/// Eigendata of `-i D` on `g_C`.
#[derive(Debug, Clone)]
pub struct DerivationData {
    pub d: Option<RealVec>,
    /// Real matrix of `D` in the basis.
    pub add: DMatrix<f64>,
    /// Distinct eigenvalues of `-i D`, real parts, ascending.
    pub spectrum: Vec<f64>,
    pub eigenspaces: Vec<Eigenspace>,
    pub diagonalizable: bool,
    /// All eigenvalues of `-i D` are real.
    pub real_spectrum: bool,
}

impl DerivationData {
    /// Eigenspaces with real eigenvalue above `tol`.
    pub fn positive(&self, tol: f64) -> Vec<&Eigenspace> {
        self.eigenspaces
            .iter()
            .filter(|e| e.is_real(tol) && e.lambda.re > tol)
            .collect()
    }

    pub fn negative(&self, tol: f64) -> Vec<&Eigenspace> {
        self.eigenspaces
            .iter()
            .filter(|e| e.is_real(tol) && e.lambda.re < -tol)
            .collect()
    }

    pub fn zero(&self, tol: f64) -> Option<&Eigenspace> {
        self.eigenspaces.iter().find(|e| e.lambda.norm() <= tol)
    }

    /// Columns spanning the sum of the given eigenspaces.
    pub fn span_of(spaces: &[&Eigenspace], dim: usize) -> CMatrix {
        let cols: usize = spaces.iter().map(|e| e.dim()).sum();
        let mut out = CMatrix::zeros(dim, cols);
        let mut off = 0;
        for e in spaces {
            out.view_mut((0, off), (dim, e.dim())).copy_from(&e.basis);
            off += e.dim();
        }
        out
    }

    /// `g_C^+`, the sum of eigenspaces with positive eigenvalue.
    pub fn plus_part(&self, tol: f64) -> CMatrix {
        let dim = self.add.nrows();
        Self::span_of(&self.positive(tol), dim)
    }

    pub fn minus_part(&self, tol: f64) -> CMatrix {
        let dim = self.add.nrows();
        Self::span_of(&self.negative(tol), dim)
    }

    pub fn zero_part(&self, tol: f64) -> CMatrix {
        let dim = self.add.nrows();
        Self::span_of(&self.zero(tol).into_iter().collect::<Vec<_>>(), dim)
    }

    /// Eigenvalue of the given coefficient vector, if it is an eigenvector
    /// within `tol`.
    pub fn eigenvalue_of(&self, z: &CVector, tol: f64) -> Option<f64> {
        let a = complexify(&self.add) * c64(0.0, -1.0);
        let az = &a * z;
        let n2 = z.norm_squared();
        if n2 == 0.0 {
            return None;
        }
        let lam = z.dotc(&az) / n2;
        if (az - z * lam).norm() <= tol * z.norm().max(1.0) && lam.im.abs() <= tol {
            Some(lam.re)
        } else {
            None
        }
    }
}

/// Eigendata of `-i ad(d)` for an element `d` of `g`.
pub fn spectral_split(g: &MatrixLieAlgebra, d: &RealVec) -> Result<DerivationData> {
    let mut data = derivation_split(g, &Derivation::Inner(d.clone()))?;
    data.d = Some(d.clone());
    Ok(data)
}

/// Eigendata of `-i D` for an arbitrary derivation.
pub fn derivation_split(g: &MatrixLieAlgebra, der: &Derivation) -> Result<DerivationData> {
    let add = der.matrix(g);
    let dim = g.dim();
    let a = complexify(&add) * c64(0.0, -1.0);
    let scale = 1.0 + a.norm();
    let tol = CLUSTER_TOL * scale;

    let eigenvalues: Vec<Complex64> = if dim == 0 {
        vec![]
    } else if add.iter().all(|&x| x == 0.0) {
        vec![c64(0.0, 0.0); dim]
    } else {
        let schur = Schur::try_new(a.clone(), f64::EPSILON, 100_000)
            .ok_or_else(|| Error::ConvergenceFailure("Schur decomposition of -i D".into()))?;
        let (_, t) = schur.unpack();
        (0..dim).map(|k| t[(k, k)]).collect()
    };

    // Cluster eigenvalues; defective eigenvalues scatter by up to eps^(1/m).
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    let mut sorted = eigenvalues.clone();
    sorted.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let loose = (f64::EPSILON.sqrt() * scale).max(tol);
    for lam in sorted {
        match clusters.iter_mut().find(|(c, _)| (*c - lam).norm() <= loose) {
            Some((c, count)) => {
                *c = (*c * (*count as f64) + lam) / (*count as f64 + 1.0);
                *count += 1;
            }
            None => clusters.push((lam, 1)),
        }
    }
    for (c, _) in clusters.iter_mut() {
        if c.re.abs() <= tol {
            c.re = 0.0;
        }
        if c.im.abs() <= tol {
            c.im = 0.0;
        }
    }

    let mut eigenspaces = Vec::with_capacity(clusters.len());
    let mut diagonalizable = true;
    for (lam, mult) in clusters {
        let shifted = &a - CMatrix::identity(dim, dim) * lam;
        let mut basis = null_space(&shifted, 1e-7)?;
        let mut generalized = false;
        if basis.ncols() < mult {
            diagonalizable = false;
            generalized = true;
            let mut power = shifted.clone();
            for _ in 1..mult {
                power = &power * &shifted;
            }
            basis = null_space(&power, 1e-7)?;
        }
        eigenspaces.push(Eigenspace {
            lambda: lam,
            basis,
            algebraic_multiplicity: mult,
            generalized,
        });
    }
    eigenspaces.sort_by(|x, y| x.lambda.re.total_cmp(&y.lambda.re).then(x.lambda.im.total_cmp(&y.lambda.im)));
    let real_spectrum = eigenspaces.iter().all(|e| e.is_real(tol));
    let mut spectrum: Vec<f64> = eigenspaces.iter().map(|e| e.lambda.re).collect();
    spectrum.dedup();
    Ok(DerivationData {
        d: der.element().cloned(),
        add,
        spectrum,
        eigenspaces,
        diagonalizable,
        real_spectrum,
    })
}

/// `ad(d)` diagonalisable over C with purely imaginary spectrum.
pub fn is_elliptic(g: &MatrixLieAlgebra, der: &Derivation) -> Result<bool> {
    let data = derivation_split(g, der)?;
    Ok(data.diagonalizable && data.real_spectrum)
}

/// `ker D^2 = ker D`, decided by comparing ranks.
pub fn check_l4(g: &MatrixLieAlgebra, der: &Derivation, tol: f64) -> Result<bool> {
    let m = complexify(&der.matrix(g));
    let sq = &m * &m;
    Ok(rank(&m, tol)? == rank(&sq, tol)?)
}

/// Real basis of the centraliser `g^0 = ker D`, as coefficient vectors.
///
/// Basis elements of `g` that already lie in the kernel are used whenever
/// they span it.
pub fn fixed_points(g: &MatrixLieAlgebra, der: &Derivation, tol: f64) -> Result<Vec<RealVec>> {
    let m = der.matrix(g);
    let kernel = real_null_space(&m, tol)?;
    let scale = 1.0 + m.norm();
    let direct: Vec<RealVec> = (0..g.dim())
        .filter(|&j| m.column(j).norm() <= CLUSTER_TOL * scale)
        .map(|j| RealVec::from_fn(g.dim(), |r, _| if r == j { 1.0 } else { 0.0 }))
        .collect();
    if direct.len() == kernel.ncols() {
        return Ok(direct);
    }
    Ok((0..kernel.ncols()).map(|k| kernel.column(k).into_owned()).collect())
}

/// The subalgebra `g^0 = ker D` as a matrix Lie algebra, with the coefficient
/// vectors of its basis inside `g`.
pub fn fixed_subalgebra(
    g: &MatrixLieAlgebra,
    der: &Derivation,
    tol: f64,
) -> Result<(MatrixLieAlgebra, Vec<RealVec>)> {
    let elems = fixed_points(g, der, tol)?;
    if elems.is_empty() {
        return Err(Error::InvalidAlgebra("fixed-point algebra is zero".into()));
    }
    let sub = g.subalgebra(format!("{}^0", g.name), &elems)?;
    Ok((sub, elems))
}

/// A root `e_i - e_j` of a unitary algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub i: usize,
    pub j: usize,
    /// `t_i - t_j` as an integer vector of length `n`.
    pub vector: Vec<i64>,
    /// Value of the root on `-i d`.
    pub height: f64,
}

impl Root {
    /// Root vector `E_ij`.
    pub fn root_vector(&self, n: usize) -> CMatrix {
        matrix_unit(n, self.i, self.j)
    }

    /// Coroot `E_ii - E_jj` in `t_C`; `i` times it lies in `g`.
    pub fn coroot(&self, n: usize) -> CMatrix {
        matrix_unit(n, self.i, self.i) - matrix_unit(n, self.j, self.j)
    }
}

/// Root data of `u(n)` or `su(n)` relative to a diagonal element `d`.
#[derive(Debug, Clone)]
pub struct RootDatum {
    pub n: usize,
    pub kind: AlgebraKind,
    /// Diagonal anti-Hermitian matrices spanning `t`.
    pub cartan: Vec<CMatrix>,
    pub roots: Vec<Root>,
    /// Indices into `roots`.
    pub delta_plus_plus: Vec<usize>,
    pub delta_zero: Vec<usize>,
    pub delta_plus: Vec<usize>,
    /// Entries `d_k` of `d = i diag(d_k)`.
    pub d_entries: Vec<f64>,
}

impl RootDatum {
    pub fn root(&self, i: usize, j: usize) -> Option<&Root> {
        self.roots.iter().find(|r| r.i == i && r.j == j)
    }

    pub fn positive_roots(&self) -> impl Iterator<Item = &Root> {
        self.delta_plus.iter().map(move |&k| &self.roots[k])
    }

    pub fn strictly_positive_roots(&self) -> impl Iterator<Item = &Root> {
        self.delta_plus_plus.iter().map(move |&k| &self.roots[k])
    }
}

/// Roots `e_i - e_j` with root vectors `E_ij`, split by the sign of
/// `d_i - d_j`. The positive system orders indices by `d` descending with
/// ties broken by index.
pub fn root_datum(g: &MatrixLieAlgebra, d: &RealVec, tol: f64) -> Result<RootDatum> {
    let kind = g
        .kind
        .filter(|k| k.is_compact())
        .ok_or_else(|| Error::UnsupportedKind(format!("root data need u(n) or su(n), got {}", g.name)))?;
    let n = g.n;
    let dm = g.matrix_of(d);
    let mut off = dm.clone();
    for k in 0..n {
        off[(k, k)] = c64(0.0, 0.0);
    }
    if frobenius(&off) > tol * (1.0 + frobenius(&dm)) {
        return Err(Error::NotDiagonal);
    }
    let d_entries: Vec<f64> = (0..n).map(|k| dm[(k, k)].im).collect();
    let cartan: Vec<CMatrix> = match kind {
        AlgebraKind::Unitary(_) => (0..n).map(|k| matrix_unit(n, k, k) * I).collect(),
        _ => (0..n - 1)
            .map(|k| (matrix_unit(n, k, k) - matrix_unit(n, k + 1, k + 1)) * I)
            .collect(),
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d_entries[b].total_cmp(&d_entries[a]).then(a.cmp(&b)));
    let mut position = vec![0; n];
    for (p, &k) in order.iter().enumerate() {
        position[k] = p;
    }

    let mut roots = Vec::new();
    let (mut dpp, mut d0, mut dp) = (vec![], vec![], vec![]);
    let scale = 1.0 + d_entries.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut vector = vec![0i64; n];
            vector[i] = 1;
            vector[j] = -1;
            let height = d_entries[i] - d_entries[j];
            let idx = roots.len();
            if height > CLUSTER_TOL * scale {
                dpp.push(idx);
            } else if height.abs() <= CLUSTER_TOL * scale {
                d0.push(idx);
            }
            if position[i] < position[j] {
                dp.push(idx);
            }
            roots.push(Root { i, j, vector, height });
        }
    }
    Ok(RootDatum {
        n,
        kind,
        cartan,
        roots,
        delta_plus_plus: dpp,
        delta_zero: d0,
        delta_plus: dp,
        d_entries,
    })
}

/// A finite union of closed intervals of the real line; endpoints may be
/// infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet(pub Vec<(f64, f64)>);

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet(vec![])
    }

    pub fn all() -> Self {
        IntervalSet(vec![(f64::NEG_INFINITY, f64::INFINITY)])
    }

    pub fn point(x: f64) -> Self {
        IntervalSet(vec![(x, x)])
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.0.iter().any(|&(lo, hi)| x >= lo - tol && x <= hi + tol)
    }

    /// Closure of the Minkowski sum.
    pub fn sum(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for &(a, b) in &self.0 {
            for &(c, d) in &other.0 {
                out.push((a + c, b + d));
            }
        }
        IntervalSet(out)
    }
}

/// Span of the eigenvectors of a Hermitian matrix with eigenvalue in `set`.
pub fn spectral_subspace(a: &CMatrix, set: &IntervalSet, tol: f64) -> Result<CMatrix> {
    let eig = eig_hermitian(a, 1e-8)?;
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&k| set.contains(eig.values[k], tol))
        .collect();
    let mut out = CMatrix::zeros(a.nrows(), keep.len());
    for (dst, &k) in keep.iter().enumerate() {
        out.set_column(dst, &eig.vectors.column(k));
    }
    Ok(out)
}

/// Span in `g_C` (coefficient vectors) of the eigenspaces of `-i D` with real
/// eigenvalue in `set`.
pub fn spectral_subspace_of_derivation(data: &DerivationData, set: &IntervalSet, tol: f64) -> CMatrix {
    let spaces: Vec<&Eigenspace> = data
        .eigenspaces
        .iter()
        .filter(|e| e.is_real(tol) && set.contains(e.lambda.re, tol))
        .collect();
    DerivationData::span_of(&spaces, data.add.nrows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::residual_outside;

    fn alg(s: &str) -> MatrixLieAlgebra {
        build_algebra(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(alg("u(2)").dim(), 4);
        assert_eq!(alg("su(3)").dim(), 8);
        let h = alg("heis(2)");
        assert_eq!(h.dim(), 3);
        // x is central iff ad(e_j) x = 0 for every basis element e_j
        let mut stacked = DMatrix::zeros(9, 3);
        for j in 0..3 {
            let e = RealVec::from_fn(3, |r, _| if r == j { 1.0 } else { 0.0 });
            stacked.view_mut((3 * j, 0), (3, 3)).copy_from(&h.ad(&e));
        }
        let centre = real_null_space(&stacked, 1e-9).unwrap();
        assert_eq!(centre.ncols(), 1);
    }

    #[test]
    fn residuals_small() {
        for s in ["u(1)", "u(2)", "u(3)", "su(2)", "su(3)", "heis(2)", "heis(4)", "su(1,2)", "u(1,2)"] {
            let g = alg(s);
            assert!(g.closure_residual() <= 1e-10, "{s}");
            assert!(g.jacobi_residual() <= 1e-10, "{s}");
        }
    }

    #[test]
    fn compact_flags() {
        assert!(alg("u(3)").compact);
        assert!(!alg("su(1,2)").compact);
        assert!(!alg("heis(2)").compact);
    }

    #[test]
    fn rejects_bad_kinds() {
        assert!(build_algebra(AlgebraKind::Heisenberg(3)).is_err());
        assert!(build_algebra(AlgebraKind::Unitary(0)).is_err());
        assert!("so(3)".parse::<AlgebraKind>().is_err());
    }

    #[test]
    fn split_u3() {
        let g = alg("u(3)");
        let d = g.diagonal_element(&[1.0, 0.0, 0.0]).unwrap();
        let data = spectral_split(&g, &d).unwrap();
        assert!(data.diagonalizable && data.real_spectrum);
        assert_eq!(data.spectrum.len(), 3);
        assert!((data.spectrum[0] + 1.0).abs() < 1e-12 && (data.spectrum[2] - 1.0).abs() < 1e-12);
        let plus = data.plus_part(1e-8);
        assert_eq!(plus.ncols(), 2);
        assert_eq!(data.zero_part(1e-8).ncols(), 5);
        // E_12 and E_13 span g_C^+
        let frame = plus.clone();
        for j in [1, 2] {
            let e = g.complex_coords(&matrix_unit(3, 0, j), 1e-10).unwrap();
            assert!(residual_outside(&orth(&frame), &e) < 1e-10);
        }
    }

    fn orth(m: &CMatrix) -> CMatrix {
        crate::matcore::orthonormal_columns(m, 1e-9).unwrap()
    }

    #[test]
    fn split_zero() {
        let g = alg("u(2)");
        let data = spectral_split(&g, &RealVec::zeros(4)).unwrap();
        assert_eq!(data.spectrum, vec![0.0]);
        assert_eq!(data.zero_part(1e-8).ncols(), 4);
    }

    #[test]
    fn heisenberg_rotation() {
        let g = alg("heis(2)");
        // D p = q, D q = -p, D c = 0
        let m = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let der = Derivation::outer(&g, m, 1e-10).unwrap();
        let data = derivation_split(&g, &der).unwrap();
        assert_eq!(data.spectrum.len(), 3);
        assert!((data.spectrum[0] + 1.0).abs() < 1e-12);
        let zero = data.zero_part(1e-8);
        assert_eq!(zero.ncols(), 1);
        assert!(zero[(2, 0)].norm() > 1.0 - 1e-12);
        assert!(is_elliptic(&g, &der).unwrap());
    }

    #[test]
    fn nilpotent_derivation_not_elliptic() {
        let g = alg("abelian(2)");
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let der = Derivation::outer(&g, m, 1e-10).unwrap();
        assert!(!is_elliptic(&g, &der).unwrap());
        assert!(!check_l4(&g, &der, 1e-9).unwrap());
    }

    #[test]
    fn elliptic_and_l4_in_u3() {
        let g = alg("u(3)");
        for d in [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [0.3, -2.0, 1.5]] {
            let der = Derivation::Inner(g.diagonal_element(&d).unwrap());
            assert!(is_elliptic(&g, &der).unwrap());
            assert!(check_l4(&g, &der, 1e-9).unwrap());
        }
    }

    #[test]
    fn roots_u3() {
        let g = alg("u(3)");
        let d = g.diagonal_element(&[1.0, 0.0, 0.0]).unwrap();
        let rd = root_datum(&g, &d, 1e-9).unwrap();
        let pp: Vec<(usize, usize)> = rd.strictly_positive_roots().map(|r| (r.i, r.j)).collect();
        assert_eq!(pp, vec![(0, 1), (0, 2)]);
        let zero: Vec<(usize, usize)> = rd.delta_zero.iter().map(|&k| (rd.roots[k].i, rd.roots[k].j)).collect();
        assert_eq!(zero, vec![(1, 2), (2, 1)]);
        assert_eq!(rd.delta_plus.len(), 3);

        let d = g.diagonal_element(&[1.0, 1.0, 0.0]).unwrap();
        let rd = root_datum(&g, &d, 1e-9).unwrap();
        let pp: Vec<(usize, usize)> = rd.strictly_positive_roots().map(|r| (r.i, r.j)).collect();
        assert_eq!(pp, vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn roots_su2_regular() {
        let g = alg("su(2)");
        let d = g.diagonal_element(&[0.5, -0.5]).unwrap();
        let rd = root_datum(&g, &d, 1e-9).unwrap();
        assert_eq!(rd.delta_plus_plus.len(), 1);
        assert_eq!(rd.roots[rd.delta_plus_plus[0]].vector, vec![1, -1]);
    }

    #[test]
    fn root_datum_rejects_off_diagonal() {
        let g = alg("u(2)");
        let mut d = RealVec::zeros(4);
        d[2] = 1.0;
        assert!(matches!(root_datum(&g, &d, 1e-9), Err(Error::NotDiagonal)));
    }

    #[test]
    fn spectral_subspace_examples() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1., 0.), c64(0., 0.), c64(0., 0.)]));
        assert_eq!(spectral_subspace(&a, &IntervalSet::point(0.0), 1e-9).unwrap().ncols(), 2);
        assert_eq!(spectral_subspace(&a, &IntervalSet::all(), 1e-9).unwrap().ncols(), 3);
        assert_eq!(spectral_subspace(&a, &IntervalSet::empty(), 1e-9).unwrap().ncols(), 0);
        let s = spectral_subspace(&a, &IntervalSet(vec![(0.5, f64::INFINITY)]), 1e-9).unwrap();
        assert_eq!(s.ncols(), 1);
        assert!(s[(0, 0)].norm() > 1.0 - 1e-12);
    }

    #[test]
    fn star_is_conjugate_transpose_for_compact() {
        let g = alg("u(2)");
        let z = g.complex_coords(&matrix_unit(2, 0, 1), 1e-10).unwrap();
        let zs = g.matrix_of_complex(&g.star(&z));
        assert!(frobenius(&(zs - matrix_unit(2, 1, 0))) < 1e-12);
    }

    #[test]
    fn kind_round_trip() {
        for s in ["u(3)", "su(2)", "su(1,2)", "heis(4)", "abelian(2)"] {
            assert_eq!(s.parse::<AlgebraKind>().unwrap().to_string(), s);
        }
    }
}
