//! Truncated bosonic Fock space, Weyl operators, second quantization and the
//! factorization check for ground state representations of Heisenberg
//! groups.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irreps::Representation;
use crate::liealg::{AlgebraKind, RealVec};
use crate::matcore::{
    c64, eig_hermitian, expm_anti_hermitian, frobenius, hermitian_residual, identity, kron,
    null_space, operator_norm, orthonormal_columns, CMatrix, CVector, DEFAULT_RANK_TOL,
};

/// Occupation tuple of a Fock basis vector.
pub type Occupation = Vec<usize>;

/// Fock space over `C^modes`, truncated at total particle number `cutoff`.
///
/// Basis vectors are ordered by total particle number, then
/// lexicographically, so the vacuum has index 0 and each sector
/// `{total <= M}` is a prefix.
#[derive(Debug, Clone)]
pub struct FockTruncation {
    modes: usize,
    cutoff: usize,
    occupations: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Occupation>) {
    if parts == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// `C(n, k)` as `usize`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

impl FockTruncation {
    pub fn new(modes: usize, cutoff: usize) -> Self {
        let mut occupations = Vec::with_capacity(binomial(cutoff + modes, modes));
        for total in 0..=cutoff {
            compositions(total, modes, &mut Vec::with_capacity(modes), &mut occupations);
            if modes == 0 {
                break;
            }
        }
        let index = occupations
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i))
            .collect();
        FockTruncation {
            modes,
            cutoff,
            occupations,
            index,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.occupations.len()
    }

    pub fn occupation(&self, i: usize) -> &[usize] {
        &self.occupations[i]
    }

    pub fn index_of(&self, occ: &[usize]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Total particle number of basis vector `i`.
    pub fn sector(&self, i: usize) -> usize {
        self.occupations[i].iter().sum()
    }

    /// Number of basis vectors with total particle number `<= m`.
    pub fn sector_dim(&self, m: usize) -> usize {
        if self.modes == 0 {
            return 1;
        }
        binomial(m.min(self.cutoff) + self.modes, self.modes)
    }

    /// The vacuum `Ω`.
    pub fn vacuum(&self) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[0] = c64(1.0, 0.0);
        v
    }

    /// Truncated creation operator `a_j^*`; states at the cutoff are sent to 0.
    pub fn creation(&self, j: usize) -> CMatrix {
        let n = self.dim();
        let mut a = CMatrix::zeros(n, n);
        for (col, occ) in self.occupations.iter().enumerate() {
            let mut up = occ.clone();
            up[j] += 1;
            if let Some(row) = self.index_of(&up) {
                a[(row, col)] = c64((up[j] as f64).sqrt(), 0.0);
            }
        }
        a
    }

    /// Truncated annihilation operator `a_j`.
    pub fn annihilation(&self, j: usize) -> CMatrix {
        self.creation(j).adjoint()
    }

    /// `a^*(x) - a(x)` with `a^*(x) = Σ x_j a_j^*`.
    pub fn displacement_generator(&self, x: &CVector) -> CMatrix {
        let n = self.dim();
        let mut g = CMatrix::zeros(n, n);
        for j in 0..self.modes {
            let up = self.creation(j);
            g += &up * x[j] - up.adjoint() * x[j].conj();
        }
        g
    }
}

/// `U_x = exp(a^*(x) - a(x))` on the truncation.
pub fn displacement_op(ft: &FockTruncation, x: &CVector) -> Result<CMatrix> {
    check_modes(ft, x.len())?;
    expm_anti_hermitian(&ft.displacement_generator(x))
}

/// Weyl operator `W(v) = U_{iv/√2}`.
pub fn weyl_op(ft: &FockTruncation, v: &CVector) -> Result<CMatrix> {
    displacement_op(ft, &weyl_argument(v))
}

fn weyl_argument(v: &CVector) -> CVector {
    v * c64(0.0, std::f64::consts::FRAC_1_SQRT_2)
}

fn check_modes(ft: &FockTruncation, len: usize) -> Result<()> {
    if len != ft.modes() {
        return Err(Error::LengthMismatch {
            expected: ft.modes(),
            got: len,
        });
    }
    Ok(())
}

/// Default test sector `⌊N/2⌋`.
pub fn default_sector(ft: &FockTruncation) -> usize {
    ft.cutoff() / 2
}

/// Operator norm of the first `sector_dim(m)` columns of `op`.
pub fn low_sector_norm(ft: &FockTruncation, op: &CMatrix, m: usize) -> f64 {
    let cols = ft.sector_dim(m);
    operator_norm(&op.columns(0, cols).into_owned())
}

/// `||(W(v)W(w) - e^{-i Im<v,w>/2} W(v+w)) Π_M||`; `m` is clamped to the cutoff.
pub fn weyl_relation_residual(ft: &FockTruncation, v: &CVector, w: &CVector, m: usize) -> Result<f64> {
    check_modes(ft, v.len())?;
    check_modes(ft, w.len())?;
    let wv = weyl_op(ft, v)?;
    let ww = weyl_op(ft, w)?;
    let wvw = weyl_op(ft, &(v + w))?;
    let phase = Complex64::from_polar(1.0, -v.dotc(w).im / 2.0);
    let diff = &wv * &ww - wvw * phase;
    Ok(low_sector_norm(ft, &diff, m.min(ft.cutoff())))
}

/// Truncated exponential vector `Exp(v) = Σ v^{⊗n} / √(n!)` in the
/// occupation basis.
pub fn exp_vector(ft: &FockTruncation, v: &CVector) -> Result<CVector> {
    check_modes(ft, v.len())?;
    let mut out = CVector::zeros(ft.dim());
    for i in 0..ft.dim() {
        let mut coeff = c64(1.0, 0.0);
        for (j, &n) in ft.occupation(i).iter().enumerate() {
            let mut fact = 1.0;
            for t in 1..=n {
                fact *= t as f64;
            }
            coeff *= v[j].powu(n as u32) / fact.sqrt();
        }
        out[i] = coeff;
    }
    Ok(out)
}

/// `dΓ(D) = Σ D_ij a_i^* a_j` for Hermitian `D ⪰ 0`.
pub fn second_quantize(ft: &FockTruncation, d: &CMatrix, tol: f64) -> Result<CMatrix> {
    let k = ft.modes();
    if d.nrows() != k || d.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "one-particle operator is {}x{}, truncation has {k} modes",
            d.nrows(),
            d.ncols()
        )));
    }
    let scale = 1.0 + frobenius(d);
    let residual = hermitian_residual(d);
    if residual > tol * scale {
        return Err(Error::NotHermitian { residual });
    }
    if k > 0 {
        let eig = eig_hermitian(d, 1e-8)?;
        let low = eig.values[0];
        if low < -tol * scale {
            return Err(Error::NotPsd(low));
        }
    }
    let n = ft.dim();
    let mut out = CMatrix::zeros(n, n);
    for col in 0..n {
        let occ = ft.occupation(col);
        for j in 0..k {
            if occ[j] == 0 {
                continue;
            }
            let down = (occ[j] as f64).sqrt();
            for i in 0..k {
                if d[(i, j)] == c64(0.0, 0.0) {
                    continue;
                }
                let mut moved = occ.to_vec();
                moved[j] -= 1;
                moved[i] += 1;
                let up = (moved[i] as f64).sqrt();
                let row = ft.index_of(&moved).expect("particle number is preserved");
                out[(row, col)] += d[(i, j)] * (up * down);
            }
        }
    }
    Ok(out)
}

/// Dimension of the truncation of `F_+(C^r)` at cutoff `n`.
pub fn truncated_fock_dim(r: usize, n: usize) -> usize {
    binomial(n + r, r)
}

/// `V = R^{2k} ≅ C^k` (coordinates `(x, y) ↔ x + iy`) with
/// `σ(v, w) = 2 Im<v, w>` and the derivation `D_V = -iD` for a Hermitian `D`.
#[derive(Debug, Clone)]
pub struct SymplecticSetup {
    /// Hermitian one-particle operator.
    pub d: CMatrix,
    /// `D_V` as a real `2k × 2k` matrix.
    pub d_v: DMatrix<f64>,
    /// Orthonormal complex basis of `V^β = ker D_V`.
    pub kernel: CMatrix,
    /// Orthonormal complex basis of `V_eff`, the range of `D_V`.
    pub effective: CMatrix,
}

/// Real form `[[Re M, -Im M], [Im M, Re M]]` of a complex matrix.
pub fn realify(m: &CMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + c)] = z.re;
        }
    }
    out
}

/// `(x, y) ↦ x + iy`.
pub fn to_complex(v: &RealVec) -> CVector {
    let k = v.len() / 2;
    CVector::from_iterator(k, (0..k).map(|j| c64(v[j], v[j + k])))
}

/// `x + iy ↦ (x, y)`.
pub fn to_real(z: &CVector) -> RealVec {
    let k = z.len();
    RealVec::from_iterator(2 * k, (0..2 * k).map(|j| if j < k { z[j].re } else { z[j - k].im }))
}

/// `σ(v, w) = 2 Im<v, w>` on `R^{2k}`.
pub fn sigma(v: &RealVec, w: &RealVec) -> f64 {
    2.0 * to_complex(v).dotc(&to_complex(w)).im
}

impl SymplecticSetup {
    pub fn from_hermitian(d: CMatrix, tol: f64) -> Result<Self> {
        if !d.is_square() {
            return Err(Error::SplitInvalid("one-particle operator is not square".into()));
        }
        let residual = hermitian_residual(&d);
        if residual > tol * (1.0 + frobenius(&d)) {
            return Err(Error::SplitInvalid(format!(
                "one-particle operator is not Hermitian (residual {residual:.3e})"
            )));
        }
        let k = d.nrows();
        let kernel = null_space(&d, DEFAULT_RANK_TOL)?;
        let effective = if kernel.ncols() == k {
            CMatrix::zeros(k, 0)
        } else {
            orthonormal_columns(&d, DEFAULT_RANK_TOL)?
        };
        let d_v = realify(&(&d * c64(0.0, -1.0)));
        Ok(SymplecticSetup {
            d,
            d_v,
            kernel,
            effective,
        })
    }

    /// Accepts a real derivation `D_V`; it must commute with the complex
    /// structure and leave `σ` infinitesimally invariant.
    pub fn from_real(d_v: &DMatrix<f64>, tol: f64) -> Result<Self> {
        let n = d_v.nrows();
        if !n.is_multiple_of(2) || d_v.ncols() != n {
            return Err(Error::SplitInvalid(format!(
                "D_V must be square of even size, got {}x{}",
                d_v.nrows(),
                d_v.ncols()
            )));
        }
        let k = n / 2;
        let a = d_v.view((0, 0), (k, k));
        let b = d_v.view((k, 0), (k, k));
        let linear = (d_v.view((0, k), (k, k)) + b).norm() + (d_v.view((k, k), (k, k)) - a).norm();
        if linear > tol * (1.0 + d_v.norm()) {
            return Err(Error::SplitInvalid(format!(
                "D_V is not complex linear (residual {linear:.3e})"
            )));
        }
        let m = CMatrix::from_fn(k, k, |i, j| c64(a[(i, j)], b[(i, j)]));
        let d = &m * c64(0.0, 1.0);
        if hermitian_residual(&d) > tol * (1.0 + frobenius(&d)) {
            return Err(Error::SplitInvalid("D_V is not in sp(V, σ)".into()));
        }
        Self::from_hermitian(d, tol)
    }

    /// Complex dimension of `V`.
    pub fn k(&self) -> usize {
        self.d.nrows()
    }

    pub fn beta_dim(&self) -> usize {
        self.kernel.ncols()
    }

    pub fn eff_dim(&self) -> usize {
        self.effective.ncols()
    }

    /// `D` compressed to `V_eff`.
    pub fn d_eff(&self) -> CMatrix {
        self.effective.adjoint() * &self.d * &self.effective
    }

    /// Real basis of `V^β`.
    pub fn v_beta(&self) -> DMatrix<f64> {
        real_basis(&self.kernel)
    }

    /// Real basis of `V_eff`.
    pub fn v_eff(&self) -> DMatrix<f64> {
        real_basis(&self.effective)
    }

    /// `max |σ(D_V v, w) + σ(v, D_V w)|` over the standard basis.
    pub fn symplectic_residual(&self) -> f64 {
        let n = self.d_v.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v = RealVec::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
                let w = RealVec::from_fn(n, |r, _| if r == j { 1.0 } else { 0.0 });
                let s = sigma(&(&self.d_v * &v), &w) + sigma(&v, &(&self.d_v * &w));
                worst = worst.max(s.abs());
            }
        }
        worst
    }

    /// `σ(D_V v, v)`.
    pub fn energy(&self, v: &RealVec) -> f64 {
        sigma(&(&self.d_v * v), v)
    }

    /// `max |σ(v, w)|` for `v ∈ V^β`, `w ∈ V_eff`.
    pub fn orthogonality_residual(&self) -> f64 {
        let a = self.v_beta();
        let b = self.v_eff();
        let mut worst: f64 = 0.0;
        for i in 0..a.ncols() {
            for j in 0..b.ncols() {
                worst = worst.max(sigma(&a.column(i).into_owned(), &b.column(j).into_owned()).abs());
            }
        }
        worst
    }
}

fn real_basis(q: &CMatrix) -> DMatrix<f64> {
    let k = q.nrows();
    let r = q.ncols();
    let mut out = DMatrix::zeros(2 * k, 2 * r);
    for j in 0..r {
        let col = q.column(j).into_owned();
        out.set_column(2 * j, &to_real(&col));
        out.set_column(2 * j + 1, &to_real(&(col * c64(0.0, 1.0))));
    }
    out
}

/// Verdict of [`factorization_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorizationVerdict {
    pub holds: bool,
    /// Largest deviation from `A ⊗ 1` (for `V^β`) or `1 ⊗ B` (for `V_eff`)
    /// on the test sector.
    pub block_residual: f64,
    /// Dimension of the minimal energy space of `dΓ(D_eff)`.
    pub vacuum_space_dim: usize,
    /// `|<Ω, Ψ>|` for the normalised minimal energy vector.
    pub vacuum_overlap: f64,
    /// Largest deviation of `<Ω, W(x)Ω>` from `e^{-|x|^2/4}`.
    pub coefficient_residual: f64,
    pub tol: f64,
}

/// Explicit tensor model `K ⊗ F_+(V_eff)` for a Heisenberg ground state
/// representation.
#[derive(Debug, Clone)]
pub struct TensorModel<'a> {
    pub setup: &'a SymplecticSetup,
    /// Representation of `heis(V^β)` on `K`; `None` means `K = C` (only
    /// when `V^β = 0`).
    pub rep0: Option<&'a Representation>,
    pub ft: &'a FockTruncation,
    /// Strength of an injected `C ⊗ G_F` coupling; zero for the genuine model.
    pub coupling: f64,
}

impl<'a> TensorModel<'a> {
    pub fn new(
        setup: &'a SymplecticSetup,
        rep0: Option<&'a Representation>,
        ft: &'a FockTruncation,
    ) -> Result<Self> {
        if ft.modes() != setup.eff_dim() {
            return Err(Error::SplitInvalid(format!(
                "Fock truncation has {} modes, V_eff has complex dimension {}",
                ft.modes(),
                setup.eff_dim()
            )));
        }
        let r = setup.beta_dim();
        match rep0 {
            None if r > 0 => {
                return Err(Error::SplitInvalid(
                    "V^β is nonzero but no representation of its Heisenberg algebra was given".into(),
                ))
            }
            Some(rep) if r == 0 || rep.algebra.kind != Some(AlgebraKind::Heisenberg(2 * r)) => {
                return Err(Error::SplitInvalid(format!(
                    "expected a representation of heis({}), got one of {}",
                    2 * r,
                    rep.algebra.name
                )))
            }
            _ => {}
        }
        Ok(TensorModel {
            setup,
            rep0,
            ft,
            coupling: 0.0,
        })
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn k_dim(&self) -> usize {
        self.rep0.map_or(1, |r| r.dim)
    }

    fn k_generator(&self, z0: &CVector) -> CMatrix {
        match self.rep0 {
            None => CMatrix::zeros(1, 1),
            Some(rep) => {
                let r = z0.len();
                let mut x = RealVec::zeros(2 * r + 1);
                for i in 0..r {
                    x[i] = z0[i].re;
                    x[i + r] = z0[i].im;
                }
                rep.eval(&x)
            }
        }
    }

    /// Weyl operator of `v ∈ C^k` on `K ⊗ F`.
    pub fn weyl(&self, v: &CVector) -> Result<CMatrix> {
        if v.len() != self.setup.k() {
            return Err(Error::LengthMismatch {
                expected: self.setup.k(),
                got: v.len(),
            });
        }
        let z0 = self.setup.kernel.adjoint() * v;
        let z1 = self.setup.effective.adjoint() * v;
        let gk = self.k_generator(&z0);
        let gf = self.ft.displacement_generator(&weyl_argument(&z1));
        let kd = self.k_dim();
        let mut g = kron(&gk, &identity(self.ft.dim())) + kron(&identity(kd), &gf);
        if self.coupling != 0.0 {
            let c = CMatrix::from_diagonal(&CVector::from_iterator(kd, (0..kd).map(|i| c64(i as f64, 0.0))));
            g += kron(&c, &gf) * c64(self.coupling, 0.0);
        }
        expm_anti_hermitian(&g)
    }

    fn low_columns(&self, m: usize) -> Vec<usize> {
        let f = self.ft.dim();
        let s = self.ft.sector_dim(m);
        (0..self.k_dim()).flat_map(|k| (0..s).map(move |j| k * f + j)).collect()
    }

    fn restricted_norm(&self, op: &CMatrix, m: usize) -> f64 {
        operator_norm(&op.select_columns(&self.low_columns(m)))
    }

    /// `||(W - A ⊗ 1) Π_M||` with `A` read off the vacuum block.
    pub fn left_residual(&self, w: &CMatrix, m: usize) -> f64 {
        let f = self.ft.dim();
        let kd = self.k_dim();
        let a = CMatrix::from_fn(kd, kd, |i, j| w[(i * f, j * f)]);
        self.restricted_norm(&(w - kron(&a, &identity(f))), m)
    }

    /// `||(W - 1 ⊗ B) Π_M||` with `B` the normalised partial trace over `K`.
    pub fn right_residual(&self, w: &CMatrix, m: usize) -> f64 {
        let f = self.ft.dim();
        let kd = self.k_dim();
        let mut b = CMatrix::zeros(f, f);
        for k in 0..kd {
            b += w.view((k * f, k * f), (f, f));
        }
        b /= c64(kd as f64, 0.0);
        self.restricted_norm(&(w - kron(&identity(kd), &b)), m)
    }
}

/// Test vectors `s·b` and `s·i·b` for the columns `b` of `q`, plus their sum.
fn probe_vectors(q: &CMatrix, s: f64) -> Vec<CVector> {
    let mut out = Vec::new();
    let mut sum = CVector::zeros(q.nrows());
    for j in 0..q.ncols() {
        let b = q.column(j).into_owned() * c64(s, 0.0);
        sum += &b * c64(0.5, 0.5);
        out.push(b.clone());
        out.push(b * c64(0.0, 1.0));
    }
    if q.ncols() > 0 {
        out.push(sum);
    }
    out
}

/// Builds the tensor model and checks block structure on the test sector
/// `m`, uniqueness of the vacuum of `dΓ(D_eff)` and the vacuum matrix
/// coefficients `e^{-|x|^2/4}` for `x ∈ V_eff`.
pub fn factorization_check(
    setup: &SymplecticSetup,
    rep0: Option<&Representation>,
    ft: &FockTruncation,
    m: usize,
    tol: f64,
) -> Result<FactorizationVerdict> {
    let model = TensorModel::new(setup, rep0, ft)?;
    model_check(&model, m, tol)
}

/// [`factorization_check`] on an already assembled (possibly perturbed) model.
pub fn model_check(model: &TensorModel<'_>, m: usize, tol: f64) -> Result<FactorizationVerdict> {
    let setup = model.setup;
    let ft = model.ft;
    let m = m.min(ft.cutoff());
    let mut block_residual: f64 = 0.0;
    for v in probe_vectors(&setup.kernel, 0.8) {
        let w = model.weyl(&v)?;
        block_residual = block_residual.max(model.left_residual(&w, m));
    }
    let eff_probes = probe_vectors(&setup.effective, 0.8);
    let mut coefficient_residual: f64 = 0.0;
    for v in &eff_probes {
        let w = model.weyl(v)?;
        block_residual = block_residual.max(model.right_residual(&w, m));
        let expected = (-v.norm_squared() / 4.0).exp();
        coefficient_residual = coefficient_residual.max((w[(0, 0)] - c64(expected, 0.0)).norm());
    }

    let dgamma = second_quantize(ft, &setup.d_eff(), 1e-8)?;
    let eig = eig_hermitian(&dgamma, 1e-8)?;
    let scale = 1.0 + eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let ground = eig.clusters(1e-8 * scale).into_iter().next().unwrap_or(0..0);
    let vacuum_space_dim = if eig.values.get(ground.start).is_some_and(|v| v.abs() <= 1e-8 * scale) {
        ground.len()
    } else {
        0
    };
    let vacuum_overlap = if vacuum_space_dim == 1 {
        eig.vectors[(0, ground.start)].norm()
    } else {
        0.0
    };

    let holds = block_residual <= tol
        && vacuum_space_dim == 1
        && (vacuum_overlap - 1.0).abs() <= tol
        && coefficient_residual <= tol;
    Ok(FactorizationVerdict {
        holds,
        block_residual,
        vacuum_space_dim,
        vacuum_overlap,
        coefficient_residual,
        tol,
    })
}

/// Representation of `heis(2)` on `C^2` by two characters: `dπ(p) = i·diag(a)`,
/// `dπ(q) = i·diag(b)`, `dπ(c) = 0`.
pub fn character_pair(a: [f64; 2], b: [f64; 2]) -> Result<Representation> {
    use crate::liealg::build_algebra;
    use std::sync::Arc;
    let g = Arc::new(build_algebra(AlgebraKind::Heisenberg(2))?);
    let diag = |x: [f64; 2]| CMatrix::from_diagonal(&CVector::from_vec(vec![c64(0.0, x[0]), c64(0.0, x[1])]));
    Representation::new(g, vec![diag(a), diag(b), CMatrix::zeros(2, 2)], 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(xs: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(xs.len(), xs.iter().map(|&(a, b)| c64(a, b)))
    }

    #[test]
    fn truncation_indexing() {
        let ft = FockTruncation::new(2, 3);
        assert_eq!(ft.dim(), 10);
        assert_eq!(ft.occupation(0), &[0, 0]);
        for i in 0..ft.dim() {
            assert_eq!(ft.index_of(ft.occupation(i)), Some(i));
        }
        assert_eq!(ft.sector_dim(1), 3);
        assert_eq!(FockTruncation::new(0, 5).dim(), 1);
    }

    #[test]
    fn weyl_zero_is_identity() {
        let ft = FockTruncation::new(2, 6);
        let w = weyl_op(&ft, &CVector::zeros(2)).unwrap();
        assert!((w - identity(ft.dim())).norm() < 1e-12);
    }

    #[test]
    fn vacuum_coefficients() {
        let ft = FockTruncation::new(1, 40);
        let v = cv(&[(0.6, -0.8)]);
        let w = weyl_op(&ft, &v).unwrap();
        assert!((w[(0, 0)] - c64((-0.25f64).exp(), 0.0)).norm() < 1e-10);
        let u = displacement_op(&ft, &cv(&[(0.3, 0.4)])).unwrap();
        assert!((u[(0, 0)] - c64((-0.125f64).exp(), 0.0)).norm() < 1e-10);
    }

    #[test]
    fn weyl_relations() {
        let ft = FockTruncation::new(1, 40);
        assert!(weyl_relation_residual(&ft, &CVector::zeros(1), &CVector::zeros(1), 20).unwrap() < 1e-12);
        let (v, w) = (cv(&[(1.0, 0.0)]), cv(&[(0.0, 1.0)]));
        let r = weyl_relation_residual(&ft, &v, &w, 20).unwrap();
        assert!(r > 1e-6 && r < 1e-5, "{r}");
        let r = weyl_relation_residual(&FockTruncation::new(1, 50), &v, &w, 20).unwrap();
        assert!(r < 1e-10, "{r}");
        let v = cv(&[(0.5, 0.5)]);
        let r = weyl_relation_residual(&ft, &v, &(&v * c64(1.5, 0.0)), 20).unwrap();
        assert!(r <= 1e-6, "{r}");
    }

    #[test]
    fn displacement_on_exponential_vectors() {
        let ft = FockTruncation::new(1, 40);
        let x = cv(&[(0.3, -0.2)]);
        let v = cv(&[(0.1, 0.4)]);
        let lhs = displacement_op(&ft, &x).unwrap() * exp_vector(&ft, &v).unwrap();
        let factor = (-x.dotc(&v) - c64(x.norm_squared() / 2.0, 0.0)).exp();
        let rhs = exp_vector(&ft, &(&v + &x)).unwrap() * factor;
        let s = ft.sector_dim(15);
        assert!((lhs.rows(0, s) - rhs.rows(0, s)).norm() < 1e-8);
    }

    #[test]
    fn second_quantization_examples() {
        let ft = FockTruncation::new(1, 3);
        let n = second_quantize(&ft, &CMatrix::from_element(1, 1, c64(1.0, 0.0)), 1e-9).unwrap();
        let expected = CMatrix::from_diagonal(&cv(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]));
        assert!((n - expected).norm() < 1e-12);

        let ft2 = FockTruncation::new(2, 4);
        let zero = second_quantize(&ft2, &CMatrix::zeros(2, 2), 1e-9).unwrap();
        assert!(zero.norm() == 0.0);
        let d = CMatrix::from_diagonal(&cv(&[(0.0, 0.0), (1.0, 0.0)]));
        let dg = second_quantize(&ft2, &d, 1e-9).unwrap();
        let kernel = null_space(&dg, 1e-9).unwrap();
        assert_eq!(kernel.ncols(), truncated_fock_dim(1, 4));
        for j in 0..kernel.ncols() {
            for i in 0..ft2.dim() {
                if ft2.occupation(i)[1] != 0 {
                    assert!(kernel[(i, j)].norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn second_quantize_rejects_negative() {
        let ft = FockTruncation::new(1, 3);
        let d = CMatrix::from_element(1, 1, c64(-1.0, 0.0));
        assert!(matches!(second_quantize(&ft, &d, 1e-9), Err(Error::NotPsd(_))));
    }

    #[test]
    fn setup_split() {
        let d = CMatrix::from_diagonal(&cv(&[(0.0, 0.0), (1.0, 0.0)]));
        let s = SymplecticSetup::from_hermitian(d, 1e-10).unwrap();
        assert_eq!((s.beta_dim(), s.eff_dim()), (1, 1));
        assert!(s.symplectic_residual() < 1e-12);
        assert!(s.orthogonality_residual() < 1e-12);
        let again = SymplecticSetup::from_real(&s.d_v, 1e-10).unwrap();
        assert!((again.d - &s.d).norm() < 1e-12);
        // σ(D_V v, v) = 2<Dz, z>
        let v = RealVec::from_vec(vec![0.3, -1.0, 0.5, 2.0]);
        let z = to_complex(&v);
        assert!((s.energy(&v) - 2.0 * z.dotc(&(&s.d * &z)).re).abs() < 1e-12);
    }

    #[test]
    fn from_real_rejects_non_linear() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = 1.0;
        assert!(matches!(SymplecticSetup::from_real(&m, 1e-10), Err(Error::SplitInvalid(_))));
    }

    #[test]
    fn factorization_examples() {
        let d = CMatrix::from_element(1, 1, c64(1.0, 0.0));
        let s = SymplecticSetup::from_hermitian(d, 1e-10).unwrap();
        let ft = FockTruncation::new(1, 30);
        assert!(factorization_check(&s, None, &ft, 10, 1e-5).unwrap().holds);

        let d = CMatrix::from_diagonal(&cv(&[(0.0, 0.0), (1.0, 0.0)]));
        let s = SymplecticSetup::from_hermitian(d, 1e-10).unwrap();
        let rep0 = character_pair([1.0, -0.5], [0.25, 2.0]).unwrap();
        let v = factorization_check(&s, Some(&rep0), &ft, 10, 1e-5).unwrap();
        assert!(v.holds, "{v:?}");

        let bad = TensorModel::new(&s, Some(&rep0), &ft).unwrap().with_coupling(0.3);
        let v = model_check(&bad, 10, 1e-5).unwrap();
        assert!(!v.holds && v.block_residual > 1e-2);
    }

    #[test]
    fn trivial_effective_part() {
        let s = SymplecticSetup::from_hermitian(CMatrix::zeros(1, 1), 1e-10).unwrap();
        let rep0 = character_pair([1.0, 0.0], [0.0, 1.0]).unwrap();
        let ft = FockTruncation::new(0, 30);
        assert!(factorization_check(&s, Some(&rep0), &ft, 10, 1e-5).unwrap().holds);
        let wrong = FockTruncation::new(1, 30);
        assert!(matches!(
            factorization_check(&s, Some(&rep0), &wrong, 10, 1e-5),
            Err(Error::SplitInvalid(_))
        ));
    }
}
