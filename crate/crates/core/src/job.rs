//! Job specifications, dispatch to the analysis modules, sweeps and reports.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cache::{irrep, IrrepCache, JsonIntervals, JsonMatrix};
use crate::cones::{
    calpha_generators, calpha_subset_cpi0, coroot_condition, su12_cone_check, su12_cone_condition,
    su12_hw_unitarizable, DEFAULT_SAMPLES, PSD_TOL,
};
use crate::dirlim::{
    calpha_level_generators, character_cone_check, generators_agree, level_consistency, that_d_membership,
    DirectLimitSpec,
};
use crate::error::{Error, Result};
use crate::groundstate::{analyze, moore_check, nonstrict_fixture, spectral_translation_check, Tolerances};
use crate::heisenfock::{
    character_pair, factorization_check, model_check, second_quantize, truncated_fock_dim, weyl_op,
    weyl_relation_residual, FockTruncation, SymplecticSetup, TensorModel,
};
use crate::irreps::{block_irrep, extremal_weight, level_blocks, Extremity, Representation, Weight};
use crate::liealg::{
    build_algebra, fixed_subalgebra, root_datum, spectral_split, AlgebraKind, Derivation, MatrixLieAlgebra,
    RealVec,
};
use crate::matcore::{c64, null_space, CMatrix, CVector};

/// Version of the report layout.
pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Classify,
    ConeCheck,
    Fock,
    Dirlim,
    Sweep,
}

/// The element `d`: either diagonal entries of `i·diag(…)` or a coefficient
/// vector in the algebra basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DSpec {
    Diagonal { diag: Vec<f64> },
    Coefficients(Vec<f64>),
}

impl DSpec {
    pub fn resolve(&self, g: &MatrixLieAlgebra) -> Result<RealVec> {
        match self {
            DSpec::Diagonal { diag } => g.diagonal_element(diag),
            DSpec::Coefficients(c) => {
                if c.len() != g.dim() {
                    return Err(Error::LengthMismatch {
                        expected: g.dim(),
                        got: c.len(),
                    });
                }
                Ok(RealVec::from_vec(c.clone()))
            }
        }
    }

    /// Plain list read as diagonal entries, as used by direct-limit jobs.
    pub fn entries(&self) -> &[f64] {
        match self {
            DSpec::Diagonal { diag } => diag,
            DSpec::Coefficients(c) => c,
        }
    }
}

/// Tolerances of a job; every verdict records the one it was decided under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobTolerances {
    pub rank: f64,
    pub cluster: f64,
    pub subspace: f64,
    pub psd: f64,
    pub residual: f64,
}

impl Default for JobTolerances {
    fn default() -> Self {
        let t = Tolerances::default();
        JobTolerances {
            rank: t.rank,
            cluster: t.cluster,
            subspace: t.subspace,
            psd: PSD_TOL,
            residual: 1e-6,
        }
    }
}

impl JobTolerances {
    pub fn analysis(&self) -> Tolerances {
        Tolerances {
            rank: self.rank,
            cluster: self.cluster,
            subspace: self.subspace,
        }
    }

    /// Sets every tolerance to `tol`.
    pub fn uniform(tol: f64) -> Self {
        JobTolerances {
            rank: tol,
            cluster: tol,
            subspace: tol,
            psd: tol,
            residual: tol,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank", self.rank),
            ("cluster", self.cluster),
            ("subspace", self.subspace),
            ("psd", self.psd),
            ("residual", self.residual),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Schema(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Complex vector as `[[re, im], …]`.
pub type JsonVector = Vec<[f64; 2]>;

fn to_cvector(v: &JsonVector) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|p| c64(p[0], p[1])))
}

/// Parameters of a factorization check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorizationParams {
    /// Characters `(a, b)` of the two-dimensional representation of
    /// `heis(V^β)` when `V^β` has complex dimension one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characters: Option<[[f64; 2]; 2]>,
    /// Strength of an injected cross coupling.
    #[serde(default)]
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockParams {
    pub modes: usize,
    pub cutoff: usize,
    /// Test sector; `⌊N/2⌋` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<JsonVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<JsonVector>,
    /// Cutoffs for a residual table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<Vec<usize>>,
    /// Hermitian one-particle operator `D`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub one_particle: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factorization: Option<FactorizationParams>,
}

/// Spectral translation request for `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationParams {
    pub e: JsonIntervals,
    pub f: JsonIntervals,
}

/// Named built-in fixtures for `analyze`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fixture {
    /// Commuting two-dimensional representation of `heis(2)` with `d = p`.
    HeisCommuting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SweepSpec {
    /// Every irrep with highest weight entries in `[lo, hi]`, every `d`.
    GroundState {
        groups: Vec<AlgebraKind>,
        lo: i64,
        hi: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d_list: Option<Vec<Vec<f64>>>,
        /// Also analyse pairwise direct sums of the first few irreps.
        #[serde(default)]
        direct_sums: bool,
    },
    /// Antidominant weights against lowest weights of irreps over a box.
    Classification { group: AlgebraKind, d: Vec<f64>, bound: i64 },
    /// Cone test against the coroot test for irreps of `g^0`.
    ConeEquivalence {
        groups: Vec<AlgebraKind>,
        lo: i64,
        hi: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d_list: Option<Vec<Vec<f64>>>,
    },
    /// Weyl relation residual table over cutoffs.
    FockConvergence {
        cutoffs: Vec<usize>,
        v: JsonVector,
        w: JsonVector,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sector: Option<usize>,
    },
    /// Random `(λ, d, N)` triples for level consistency.
    Dirlim {
        cases: usize,
        max_level: usize,
        entry_bound: i64,
    },
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<AlgebraKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<DSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Vec<i64>>,
    /// Summands of a direct sum, for `analyze`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<Fixture>,
    /// Half-width of the weight box for `classify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<TranslationParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock: Option<FockParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub tolerances: JobTolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        JobSpec {
            command,
            group: None,
            d: None,
            weight: None,
            weights: vec![],
            fixture: None,
            bound: None,
            translation: None,
            fock: None,
            sweep: None,
            tolerances: JobTolerances::default(),
            seed: 0,
            samples: DEFAULT_SAMPLES,
            cache_dir: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let job: JobSpec = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        job.validate()?;
        Ok(job)
    }

    fn need<T>(&self, field: Option<T>, name: &str) -> Result<T> {
        let cmd = serde_json::to_value(self.command).unwrap_or(Value::Null);
        field.ok_or_else(|| Error::Schema(format!("command {cmd} needs field `{name}`")))
    }

    /// Checks the fields required by the command.
    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        match self.command {
            Command::Analyze => {
                if self.fixture.is_none() {
                    self.need(self.group.as_ref(), "group")?;
                    self.need(self.d.as_ref(), "d")?;
                    if self.weight.is_none() && self.weights.is_empty() {
                        return Err(Error::Schema("command \"analyze\" needs `weight` or `weights`".into()));
                    }
                }
            }
            Command::Classify => {
                self.need(self.group.as_ref(), "group")?;
                self.need(self.d.as_ref(), "d")?;
                if self.weight.is_none() && self.bound.is_none() {
                    return Err(Error::Schema("command \"classify\" needs `weight` or `bound`".into()));
                }
            }
            Command::ConeCheck => {
                let g = self.need(self.group.as_ref(), "group")?;
                self.need(self.weight.as_ref(), "weight")?;
                if !matches!(g, AlgebraKind::IndefiniteSpecialUnitary(1, 2)) {
                    self.need(self.d.as_ref(), "d")?;
                }
            }
            Command::Fock => {
                self.need(self.fock.as_ref(), "fock")?;
            }
            Command::Dirlim => {
                self.need(self.weight.as_ref(), "weight")?;
                self.need(self.d.as_ref(), "d")?;
            }
            Command::Sweep => {
                self.need(self.sweep.as_ref(), "sweep")?;
            }
        }
        Ok(())
    }
}

/// A boolean outcome with the tolerance it was decided under and the
/// statement it checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: bool,
    pub tol: f64,
    pub statement: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampled: Option<bool>,
}

impl Verdict {
    pub fn new(value: bool, tol: f64, statement: impl Into<String>) -> Self {
        Verdict {
            value,
            tol,
            statement: statement.into(),
            sampled: None,
        }
    }

    fn sampled(mut self, sampled: bool) -> Self {
        self.sampled = Some(sampled);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub package: String,
    pub version: String,
    pub report_version: String,
    pub modules: BTreeMap<String, String>,
    pub tolerances: JobTolerances,
    pub seed: u64,
    pub samples: usize,
}

impl Provenance {
    fn for_job(job: &JobSpec, modules: &[&str]) -> Self {
        let version = env!("CARGO_PKG_VERSION").to_string();
        Provenance {
            package: env!("CARGO_PKG_NAME").to_string(),
            version: version.clone(),
            report_version: REPORT_VERSION.into(),
            modules: modules.iter().map(|m| (m.to_string(), version.clone())).collect(),
            tolerances: job.tolerances,
            seed: job.seed,
            samples: job.samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub job: JobSpec,
    pub verdicts: BTreeMap<String, Verdict>,
    pub tables: BTreeMap<String, Value>,
    pub provenance: Provenance,
}

impl Report {
    fn new(job: &JobSpec, modules: &[&str]) -> Self {
        Report {
            job: job.clone(),
            verdicts: BTreeMap::new(),
            tables: BTreeMap::new(),
            provenance: Provenance::for_job(job, modules),
        }
    }

    fn verdict(&mut self, key: &str, v: Verdict) {
        self.verdicts.insert(key.into(), v);
    }

    fn table(&mut self, key: &str, v: Value) {
        self.tables.insert(key.into(), v);
    }

    pub fn value(&self, key: &str) -> Option<bool> {
        self.verdicts.get(key).map(|v| v.value)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs a job. The cache is taken from `cache`, else from `job.cache_dir`.
pub fn run(job: &JobSpec, cache: Option<&IrrepCache>) -> Result<Report> {
    job.validate()?;
    let owned;
    let cache = match (cache, &job.cache_dir) {
        (Some(c), _) => Some(c),
        (None, Some(dir)) => {
            owned = IrrepCache::new(dir)?;
            Some(&owned)
        }
        (None, None) => None,
    };
    match job.command {
        Command::Analyze => run_analyze(job, cache),
        Command::Classify => run_classify(job, cache),
        Command::ConeCheck => run_cone_check(job, cache),
        Command::Fock => run_fock(job),
        Command::Dirlim => run_dirlim(job),
        Command::Sweep => sweep(job, cache),
    }
}

fn weight_of(v: &[i64]) -> Weight {
    Weight::new(v.to_vec())
}

fn rep_for(kind: AlgebraKind, w: &[i64], cache: Option<&IrrepCache>) -> Result<Representation> {
    irrep(kind, &weight_of(w), cache)
}

fn run_analyze(job: &JobSpec, cache: Option<&IrrepCache>) -> Result<Report> {
    let mut report = Report::new(job, &["liealg", "irreps", "groundstate", "matcore"]);
    let (pi, d) = match job.fixture {
        Some(Fixture::HeisCommuting) => nonstrict_fixture()?,
        None => {
            let kind = *job.group.as_ref().expect("validated");
            let mut summands = Vec::new();
            if let Some(w) = &job.weight {
                summands.push(rep_for(kind, w, cache)?);
            }
            for w in &job.weights {
                summands.push(rep_for(kind, w, cache)?);
            }
            let pi = if summands.len() == 1 {
                summands.pop().expect("one summand")
            } else {
                Representation::direct_sum(&summands)?
            };
            let d = job.d.as_ref().expect("validated").resolve(&pi.algebra)?;
            (pi, d)
        }
    };
    let tol = job.tolerances;
    let r = analyze(&pi, &d, tol.analysis())?;
    report.table("m", json!(r.m));
    report.table("dim", json!(pi.dim));
    report.table("h0_dim", json!(r.h0_dim()));
    report.table("spectrum", json!(r.spectrum));
    report.table("minimal_shift", json!(r.minimal_shift));
    report.table("commutant_dims", serde_json::to_value(r.commutant_dims)?);
    report.table("strictness_distance", json!(finite_or_null(r.strictness_distance)));
    report.verdict("cyclic", Verdict::new(r.cyclic, tol.rank, "H0 generates H under pi(G)"));
    report.verdict(
        "ground_state",
        Verdict::new(r.ground_state, tol.cluster, "H - m >= 0 and its kernel H0 is cyclic"),
    );
    report.verdict(
        "strict",
        Verdict::new(r.strict, tol.subspace, "P0 pi(G)'' P0 equals pi0(G0)''"),
    );
    report.verdict(
        "pi0_irreducible",
        Verdict::new(r.commutant_dims.ground == 1, tol.rank, "commutant of pi0(G0) is one-dimensional"),
    );
    match moore_check(&pi, &d, tol.rank) {
        Ok(m) => {
            report.verdict(
                "moore_implication",
                Verdict::new(m.implication_holds, tol.rank, "eigenvector of -i dpi(d) implies ad d elliptic"),
            );
            report.table("moore", serde_json::to_value(m)?);
        }
        Err(e) => report.table("moore", json!({"skipped": e.code(), "message": e.to_string()})),
    }
    if let Some(tr) = &job.translation {
        let e = tr.e.to_set()?;
        let f = tr.f.to_set()?;
        let v = spectral_translation_check(&pi, &d, &e, &f, tol.residual)?;
        report.verdict(
            "spectral_translation",
            Verdict::new(v.holds, tol.residual, "dpi(g_C(E)) H(F) lies in H(E + F)"),
        );
        report.table("spectral_translation", serde_json::to_value(v)?);
    }
    Ok(report)
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn compact_kind(job: &JobSpec) -> Result<AlgebraKind> {
    let kind = *job.group.as_ref().expect("validated");
    match kind {
        AlgebraKind::Unitary(_) | AlgebraKind::SpecialUnitary(_) => Ok(kind),
        other => Err(Error::UnsupportedKind(format!("{other} is not u(n) or su(n)"))),
    }
}

/// Lowest weight of the irrep with highest weight `mu` relative to the
/// positive system of `d`.
fn lowest_weight(kind: AlgebraKind, mu: &[i64], d: &[f64], cache: Option<&IrrepCache>) -> Result<Weight> {
    let pi = rep_for(kind, mu, cache)?;
    let dv = pi.algebra.diagonal_element(d)?;
    let rd = root_datum(&pi.algebra, &dv, 1e-9)?;
    extremal_weight(&pi, &rd, Extremity::Lowest)
}

/// `λ(α∨) <= 0` for every positive root of `d`.
pub fn is_antidominant(lam: &[i64], d: &[f64]) -> Result<bool> {
    let g = build_algebra(AlgebraKind::Unitary(d.len()))?;
    let rd = root_datum(&g, &g.diagonal_element(d)?, 1e-9)?;
    let anti = rd.positive_roots().all(|r| lam[r.i] - lam[r.j] <= 0);
    Ok(anti)
}

/// Weights with entries in `[lo, hi]`, lexicographic.
pub fn box_weights(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (lo..=hi).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Dominant (non-increasing) weights with entries in `[lo, hi]`.
pub fn dominant_weights(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    box_weights(n, lo, hi)
        .into_iter()
        .filter(|w| w.windows(2).all(|p| p[0] >= p[1]))
        .collect()
}

/// Result of comparing antidominant weights with lowest weights of irreps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub antidominant: Vec<Vec<i64>>,
    pub lowest: Vec<Vec<i64>>,
    pub irreps: usize,
    pub injective: bool,
    pub equal: bool,
}

/// Antidominant weights in `[-bound, bound]^n` against the lowest weights of
/// the irreps of `u(n)` whose highest weights lie in the same box; `d` must
/// be regular.
pub fn classify_box(n: usize, d: &[f64], bound: i64, cache: Option<&IrrepCache>) -> Result<Classification> {
    if d.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: d.len(),
        });
    }
    if level_blocks(d, 0.0).len() != n {
        return Err(Error::Schema("classification needs a regular d (distinct entries)".into()));
    }
    let mut antidominant = BTreeSet::new();
    for lam in box_weights(n, -bound, bound) {
        if is_antidominant(&lam, d)? {
            antidominant.insert(lam);
        }
    }
    let mut lowest = BTreeSet::new();
    let highest = dominant_weights(n, -bound, bound);
    for mu in &highest {
        lowest.insert(lowest_weight(AlgebraKind::Unitary(n), mu, d, cache)?.0);
    }
    Ok(Classification {
        injective: lowest.len() == highest.len(),
        equal: antidominant == lowest,
        irreps: highest.len(),
        antidominant: antidominant.into_iter().collect(),
        lowest: lowest.into_iter().collect(),
    })
}

fn run_classify(job: &JobSpec, cache: Option<&IrrepCache>) -> Result<Report> {
    let mut report = Report::new(job, &["liealg", "irreps", "groundstate", "cones"]);
    let kind = compact_kind(job)?;
    let AlgebraKind::Unitary(n) = kind else {
        return Err(Error::UnsupportedKind(format!("classification is implemented for u(n), got {kind}")));
    };
    let d = job.d.as_ref().expect("validated").entries().to_vec();
    if let Some(w) = &job.weight {
        let pi = rep_for(kind, w, cache)?;
        let dv = pi.algebra.diagonal_element(&d)?;
        let rd = root_datum(&pi.algebra, &dv, 1e-9)?;
        let low = extremal_weight(&pi, &rd, Extremity::Lowest)?;
        let anti = is_antidominant(low.entries(), &d)?;
        let r = analyze(&pi, &dv, job.tolerances.analysis())?;
        report.table("lowest_weight", json!(low.0));
        report.verdict("lowest_antidominant", Verdict::new(anti, 0.0, "lowest weight is antidominant"));
        report.verdict("ground_state", Verdict::new(r.ground_state, job.tolerances.cluster, "ground state"));
        report.verdict("strict", Verdict::new(r.strict, job.tolerances.subspace, "strict ground state"));
    }
    if let Some(bound) = job.bound {
        let c = classify_box(n, &d, bound, cache)?;
        report.verdict(
            "bijection",
            Verdict::new(
                c.equal && c.injective,
                0.0,
                "antidominant weights in the box are exactly the lowest weights of irreps over the box",
            ),
        );
        report.table("classification", serde_json::to_value(&c)?);
    }
    Ok(report)
}

fn run_cone_check(job: &JobSpec, cache: Option<&IrrepCache>) -> Result<Report> {
    let mut report = Report::new(job, &["liealg", "irreps", "cones"]);
    let kind = *job.group.as_ref().expect("validated");
    let w = job.weight.as_ref().expect("validated");
    let tol = job.tolerances.psd;
    if kind == AlgebraKind::IndefiniteSpecialUnitary(1, 2) {
        if let Some(d) = &job.d {
            if d.entries() != [1.0, -1.0, -1.0] {
                return Err(Error::Schema("the su(1,2) check is defined for d = i·diag(1,-1,-1)".into()));
            }
        }
        let lam: [i64; 3] = w
            .as_slice()
            .try_into()
            .map_err(|_| Error::LengthMismatch { expected: 3, got: w.len() })?;
        let numeric = su12_cone_check(lam, tol, job.samples, job.seed)?;
        report.verdict(
            "cone",
            Verdict::new(numeric.holds, tol, "C_alpha lies in C_pi0").sampled(numeric.sampled),
        );
        report.verdict(
            "cone_predicate",
            Verdict::new(su12_cone_condition(lam), 0.0, "integer form of the cone condition"),
        );
        report.verdict(
            "hw_unitarizable",
            Verdict::new(su12_hw_unitarizable(lam), 0.0, "unitary highest weight representation exists"),
        );
        report.table("cone", serde_json::to_value(&numeric)?);
        return Ok(report);
    }
    let kind = compact_kind(job)?;
    let pi = rep_for(kind, w, cache)?;
    let d = job.d.as_ref().expect("validated").resolve(&pi.algebra)?;
    let r = analyze(&pi, &d, job.tolerances.analysis())?;
    let dd = spectral_split(&pi.algebra, &d)?;
    let cone = calpha_subset_cpi0(&pi.algebra, &dd, &r.pi0, tol, job.samples, job.seed)?;
    let rd = root_datum(&pi.algebra, &d, 1e-9)?;
    let coroot = coroot_condition(&r.pi0, &rd, tol)?;
    report.verdict(
        "cone",
        Verdict::new(cone.holds, tol, "C_alpha lies in C_pi0").sampled(cone.sampled),
    );
    report.verdict("coroot", Verdict::new(coroot.holds, tol, "dpi0(coroot) <= 0 on strictly positive roots"));
    report.verdict(
        "agree",
        Verdict::new(cone.holds == coroot.holds, tol, "cone test agrees with the coroot test"),
    );
    report.table("cone", serde_json::to_value(&cone)?);
    report.table("coroot", serde_json::to_value(&coroot)?);
    report.table("generators", json!(calpha_generators(&pi.algebra, &dd)?.len()));
    Ok(report)
}

/// One row of a Weyl relation residual table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub n: usize,
    pub m: usize,
    pub residual: f64,
}

/// Round-off floor allowed in monotonicity comparisons.
pub const MONOTONE_FLOOR: f64 = 1e-12;

/// Weyl relation residuals for each cutoff; the sector is `sector` or
/// `⌊N/2⌋`.
pub fn residual_table(cutoffs: &[usize], v: &CVector, w: &CVector, sector: Option<usize>) -> Result<Vec<ResidualRow>> {
    let modes = v.len();
    cutoffs
        .iter()
        .map(|&n| {
            let ft = FockTruncation::new(modes, n);
            let m = sector.unwrap_or(n / 2).min(n);
            Ok(ResidualRow {
                n,
                m,
                residual: weyl_relation_residual(&ft, v, w, m)?,
            })
        })
        .collect()
}

/// Whether residuals are non-increasing along the table, up to
/// [`MONOTONE_FLOOR`].
pub fn is_monotone(rows: &[ResidualRow]) -> bool {
    rows.windows(2).all(|p| p[1].residual <= p[0].residual + MONOTONE_FLOOR)
}

fn run_fock(job: &JobSpec) -> Result<Report> {
    let mut report = Report::new(job, &["heisenfock", "matcore"]);
    let p = job.fock.as_ref().expect("validated");
    let tol = job.tolerances.residual;
    let ft = FockTruncation::new(p.modes, p.cutoff);
    let m = p.sector.unwrap_or(p.cutoff / 2);
    report.table("dim", json!(ft.dim()));
    if let Some(v) = &p.v {
        let v = to_cvector(v);
        let wv = weyl_op(&ft, &v)?;
        let expected = (-v.norm_squared() / 4.0).exp();
        let err = (wv[(0, 0)] - c64(expected, 0.0)).norm();
        report.verdict(
            "vacuum_coefficient",
            Verdict::new(err <= tol, tol, "<Omega, W(v) Omega> = exp(-|v|^2/4)"),
        );
        report.table("vacuum_coefficient", json!({"value": [wv[(0, 0)].re, wv[(0, 0)].im], "expected": expected, "error": err}));
        if let Some(w) = &p.w {
            let w = to_cvector(w);
            let r = weyl_relation_residual(&ft, &v, &w, m)?;
            report.verdict(
                "weyl_relation",
                Verdict::new(r <= tol, tol, "W(v)W(w) = exp(-i Im<v,w>/2) W(v+w) on the test sector"),
            );
            report.table("weyl_relation", json!({"n": p.cutoff, "m": m, "residual": r}));
            if let Some(cutoffs) = &p.cutoffs {
                let rows = residual_table(cutoffs, &v, &w, p.sector)?;
                report.verdict(
                    "monotone",
                    Verdict::new(is_monotone(&rows), MONOTONE_FLOOR, "residual non-increasing in N"),
                );
                report.table("residuals", serde_json::to_value(rows)?);
            }
        }
    }
    if let Some(d) = &p.one_particle {
        let d = &d.0;
        let dg = second_quantize(&ft, d, job.tolerances.psd)?;
        let kernel = null_space(&dg, job.tolerances.rank)?.ncols();
        let kd = null_space(d, job.tolerances.rank)?.ncols();
        let expected = truncated_fock_dim(kd, p.cutoff);
        report.verdict(
            "kernel_count",
            Verdict::new(kernel == expected, job.tolerances.rank, "ker dGamma(D) is the truncation of F+(ker D)"),
        );
        report.table("kernel", json!({"dim": kernel, "expected": expected}));
        if let Some(fp) = &p.factorization {
            let setup = SymplecticSetup::from_hermitian(d.clone(), 1e-10)?;
            let eff = FockTruncation::new(setup.eff_dim(), p.cutoff);
            let rep0 = match (setup.beta_dim(), fp.characters) {
                (0, _) => None,
                (1, Some([a, b])) => Some(character_pair(a, b)?),
                (1, None) => Some(character_pair([1.0, -0.5], [0.25, 2.0])?),
                (r, _) => {
                    return Err(Error::UnsupportedKind(format!(
                        "factorization jobs support dim V^beta <= 1, got {r}"
                    )))
                }
            };
            let model = TensorModel::new(&setup, rep0.as_ref(), &eff)?.with_coupling(fp.coupling);
            let v = if fp.coupling == 0.0 {
                factorization_check(&setup, rep0.as_ref(), &eff, m, tol)?
            } else {
                model_check(&model, m, tol)?
            };
            report.verdict(
                "factorization",
                Verdict::new(v.holds, tol, "H = K (x) F+(V_eff) with block-diagonal Weyl operators"),
            );
            report.table("factorization", serde_json::to_value(v)?);
        }
    }
    Ok(report)
}

fn run_dirlim(job: &JobSpec) -> Result<Report> {
    let mut report = Report::new(job, &["dirlim", "cones"]);
    let spec = DirectLimitSpec::new(job.d.as_ref().expect("validated").entries().to_vec())?;
    let lam = job.weight.as_ref().expect("validated");
    let member = that_d_membership(lam, &spec)?;
    report.verdict("member", Verdict::new(member, 0.0, "lambda_n >= lambda_m whenever d_n > d_m"));
    let gens = calpha_level_generators(&spec)?;
    report.table("generators", json!(gens.len()));
    let consistent = (1..spec.level()).map(|n| level_consistency(lam, &spec, n)).collect::<Result<Vec<_>>>()?;
    report.verdict(
        "level_consistency",
        Verdict::new(consistent.iter().all(|&b| b), 0.0, "membership restricts to every lower level"),
    );
    if spec.level() > 0 {
        let check = character_cone_check(&spec, lam, job.tolerances.psd, job.samples, job.seed)?;
        report.verdict(
            "character_cone",
            Verdict::new(check.cone.holds, job.tolerances.psd, "C_alpha lies in the positive cone of the character"),
        );
        report.verdict(
            "agree",
            Verdict::new(check.cone.holds == member, job.tolerances.psd, "cone test agrees with membership"),
        );
        report.verdict(
            "generators_agree",
            Verdict::new(generators_agree(&spec, 1e-8)?, 1e-8, "level generators agree with the eigenspace construction"),
        );
        report.table("cone", serde_json::to_value(&check.cone)?);
    }
    Ok(report)
}

/// The six diagonal elements used by the compact sweeps: zero, singular and
/// regular. For `su(n)` the trace is removed.
pub fn standard_d_list(kind: AlgebraKind) -> Vec<Vec<f64>> {
    let n = kind.unitary_rank().unwrap_or(0);
    let raw: Vec<Vec<f64>> = match n {
        2 => vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            vec![2.0, -1.0],
            vec![-0.5, 0.7],
        ],
        3 => vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![3.0, 1.0, 0.0],
            vec![0.3, -1.0, 2.0],
        ],
        _ => {
            let regular: Vec<f64> = (0..n).map(|k| (n - k) as f64).collect();
            let mut single = vec![0.0; n];
            if n > 0 {
                single[0] = 1.0;
            }
            vec![vec![0.0; n], single, regular]
        }
    };
    match kind {
        AlgebraKind::SpecialUnitary(_) => raw
            .into_iter()
            .map(|d| {
                let mean = d.iter().sum::<f64>() / n as f64;
                d.into_iter().map(|x| x - mean).collect()
            })
            .collect(),
        _ => raw,
    }
}

/// Per-fixture record of the ground state sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateCase {
    pub group: AlgebraKind,
    pub weight: Vec<i64>,
    pub d: Vec<f64>,
    pub ground_state: bool,
    pub strict: bool,
    pub cone: bool,
    pub coroot: bool,
}

/// Runs `analyze`, the cone test on `pi0` and the coroot test for one irrep.
pub fn ground_state_case(
    kind: AlgebraKind,
    weight: &[i64],
    d: &[f64],
    tol: &JobTolerances,
    samples: usize,
    seed: u64,
    cache: Option<&IrrepCache>,
) -> Result<GroundStateCase> {
    let pi = rep_for(kind, weight, cache)?;
    let dv = pi.algebra.diagonal_element(d)?;
    let r = analyze(&pi, &dv, tol.analysis())?;
    let dd = spectral_split(&pi.algebra, &dv)?;
    let cone = calpha_subset_cpi0(&pi.algebra, &dd, &r.pi0, tol.psd, samples, seed)?;
    let rd = root_datum(&pi.algebra, &dv, 1e-9)?;
    let coroot = coroot_condition(&r.pi0, &rd, tol.psd)?;
    Ok(GroundStateCase {
        group: kind,
        weight: weight.to_vec(),
        d: d.to_vec(),
        ground_state: r.ground_state,
        strict: r.strict,
        cone: cone.holds,
        coroot: coroot.holds,
    })
}

/// Per-fixture record of the cone equivalence sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeCase {
    pub group: AlgebraKind,
    pub weight: Vec<i64>,
    pub d: Vec<f64>,
    pub cone: bool,
    pub coroot: bool,
    pub witness: bool,
    pub sampled: bool,
}

/// Irreps of `g^0` for diagonal `d`: weights in `[lo, hi]^n` dominant on each
/// block of equal entries of `d`.
pub fn levi_weights(d: &[f64], lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let blocks = level_blocks(d, 1e-12);
    box_weights(d.len(), lo, hi)
        .into_iter()
        .filter(|w| blocks.iter().all(|b| b.windows(2).all(|p| w[p[0]] >= w[p[1]])))
        .collect()
}

/// Cone test against the coroot test for every irrep of `g^0` with weight
/// entries in `[lo, hi]`.
pub fn cone_cases(kind: AlgebraKind, d: &[f64], lo: i64, hi: i64, tol: f64, samples: usize, seed: u64) -> Result<Vec<ConeCase>> {
    let g = build_algebra(kind)?;
    let dv = g.diagonal_element(d)?;
    let dd = spectral_split(&g, &dv)?;
    let rd = root_datum(&g, &dv, 1e-9)?;
    let (g0, _) = fixed_subalgebra(&g, &Derivation::Inner(dv.clone()), 1e-9)?;
    let g0 = Arc::new(g0);
    let blocks = level_blocks(d, 1e-12);
    let mut out = Vec::new();
    for w in levi_weights(d, lo, hi) {
        let pi0 = block_irrep(g0.clone(), &blocks, &weight_of(&w))?;
        let cone = calpha_subset_cpi0(&g, &dd, &pi0, tol, samples, seed)?;
        let coroot = coroot_condition(&pi0, &rd, tol)?;
        out.push(ConeCase {
            group: kind,
            weight: w,
            d: d.to_vec(),
            cone: cone.holds,
            coroot: coroot.holds,
            witness: cone.witness.is_some(),
            sampled: cone.sampled,
        });
    }
    Ok(out)
}

/// Random level-consistency triples `(λ, d, N)`.
pub fn dirlim_cases(cases: usize, max_level: usize, entry_bound: i64, seed: u64) -> Result<(usize, Vec<Value>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut checked = 0;
    while checked < cases {
        let level = rng.gen_range(2..=max_level.max(2));
        let mut d: Vec<f64> = (0..level).map(|_| rng.gen_range(-10.0..10.0)).collect();
        d.iter_mut().for_each(|x| *x = (*x * 8.0).round() / 8.0);
        let Ok(spec) = DirectLimitSpec::new(d.clone()) else {
            continue;
        };
        let lam: Vec<i64> = (0..level).map(|_| rng.gen_range(-entry_bound..=entry_bound)).collect();
        let n = rng.gen_range(1..level);
        if !level_consistency(&lam, &spec, n)? {
            failures.push(json!({"weight": lam, "d": d, "n": n}));
        }
        checked += 1;
    }
    Ok((checked, failures))
}

fn counts(cases: usize, failures: usize) -> Value {
    json!({"cases": cases, "passed": cases - failures, "failed": failures})
}

fn replay_job(kind: AlgebraKind, weight: &[i64], d: &[f64], command: Command, job: &JobSpec) -> JobSpec {
    let mut r = JobSpec::new(command);
    r.group = Some(kind);
    r.weight = Some(weight.to_vec());
    r.d = Some(DSpec::Diagonal { diag: d.to_vec() });
    r.tolerances = job.tolerances;
    r.seed = job.seed;
    r.samples = job.samples;
    r
}

/// Runs the sweep of a job and aggregates pass/fail counts; failures carry
/// a replayable job.
pub fn sweep(job: &JobSpec, cache: Option<&IrrepCache>) -> Result<Report> {
    let spec = job.sweep.as_ref().expect("validated");
    let tol = job.tolerances;
    match spec {
        SweepSpec::GroundState {
            groups,
            lo,
            hi,
            d_list,
            direct_sums,
        } => {
            let mut report = Report::new(job, &["irreps", "groundstate", "cones"]);
            let mut cases = 0;
            let mut failures = Vec::new();
            let mut strict_count = 0;
            let mut sum_pairs = 0;
            let mut sum_strict = 0;
            for &kind in groups {
                let n = kind
                    .unitary_rank()
                    .ok_or_else(|| Error::UnsupportedKind(format!("{kind} is not u(n) or su(n)")))?;
                let ds = d_list.clone().unwrap_or_else(|| standard_d_list(kind));
                let weights = dominant_weights(n, *lo, *hi);
                for d in &ds {
                    for w in &weights {
                        let c = ground_state_case(kind, w, d, &tol, job.samples, job.seed, cache)?;
                        cases += 1;
                        strict_count += c.strict as usize;
                        if !(c.ground_state && c.strict && c.cone && c.coroot) {
                            failures.push(json!({"case": c, "replay": replay_job(kind, w, d, Command::Analyze, job)}));
                        }
                    }
                    if *direct_sums {
                        let firsts: Vec<&Vec<i64>> = weights.iter().take(4).collect();
                        for i in 0..firsts.len() {
                            for j in i..firsts.len() {
                                let reps = [rep_for(kind, firsts[i], cache)?, rep_for(kind, firsts[j], cache)?];
                                let sum = Representation::direct_sum(&reps)?;
                                let dv = sum.algebra.diagonal_element(d)?;
                                let r = analyze(&sum, &dv, tol.analysis())?;
                                if r.ground_state {
                                    sum_pairs += 1;
                                    sum_strict += r.strict as usize;
                                }
                            }
                        }
                    }
                }
            }
            report.verdict(
                "all_pass",
                Verdict::new(failures.is_empty(), tol.subspace, "every irrep is a strict ground state representation passing the cone and coroot tests"),
            );
            report.table("counts", counts(cases, failures.len()));
            report.table("strict", json!({"fixtures": cases, "strict": strict_count}));
            if *direct_sums {
                report.table("direct_sums", json!({"ground_state_pairs": sum_pairs, "strict": sum_strict}));
            }
            report.table("failures", Value::Array(failures));
            Ok(report)
        }
        SweepSpec::Classification { group, d, bound } => {
            let AlgebraKind::Unitary(n) = *group else {
                return Err(Error::UnsupportedKind(format!("classification is implemented for u(n), got {group}")));
            };
            let mut report = Report::new(job, &["irreps", "liealg"]);
            let c = classify_box(n, d, *bound, cache)?;
            let failures = c.antidominant.iter().filter(|w| !c.lowest.contains(w)).count()
                + c.lowest.iter().filter(|w| !c.antidominant.contains(w)).count()
                + usize::from(!c.injective);
            report.verdict(
                "bijection",
                Verdict::new(failures == 0, 0.0, "antidominant weights in the box are exactly the lowest weights of irreps over the box"),
            );
            report.table("counts", counts(c.antidominant.len().max(c.irreps), failures));
            report.table("classification", serde_json::to_value(&c)?);
            Ok(report)
        }
        SweepSpec::ConeEquivalence { groups, lo, hi, d_list } => {
            let mut report = Report::new(job, &["cones", "irreps", "liealg"]);
            let mut cases = 0;
            let mut failures = Vec::new();
            for &kind in groups {
                let ds = d_list.clone().unwrap_or_else(|| standard_d_list(kind));
                for d in &ds {
                    for c in cone_cases(kind, d, *lo, *hi, tol.psd, job.samples, job.seed)? {
                        cases += 1;
                        if c.cone != c.coroot || (!c.cone && !c.witness) {
                            failures.push(json!({"case": c}));
                        }
                    }
                }
            }
            report.verdict(
                "equivalent",
                Verdict::new(failures.is_empty(), tol.psd, "cone test agrees with the coroot test; failures carry a witness"),
            );
            report.table("counts", counts(cases, failures.len()));
            report.table("failures", Value::Array(failures));
            Ok(report)
        }
        SweepSpec::FockConvergence { cutoffs, v, w, sector } => {
            let mut report = Report::new(job, &["heisenfock"]);
            let rows = residual_table(cutoffs, &to_cvector(v), &to_cvector(w), *sector)?;
            let mono = is_monotone(&rows);
            report.verdict("monotone", Verdict::new(mono, MONOTONE_FLOOR, "residual non-increasing in N"));
            report.table("counts", counts(rows.len().saturating_sub(1), usize::from(!mono)));
            report.table("residuals", serde_json::to_value(rows)?);
            Ok(report)
        }
        SweepSpec::Dirlim {
            cases,
            max_level,
            entry_bound,
        } => {
            let mut report = Report::new(job, &["dirlim"]);
            let (checked, failures) = dirlim_cases(*cases, *max_level, *entry_bound, job.seed)?;
            report.verdict(
                "consistent",
                Verdict::new(failures.is_empty(), 0.0, "membership restricts to every lower level"),
            );
            report.table("counts", counts(checked, failures.len()));
            report.table("failures", Value::Array(failures));
            Ok(report)
        }
    }
}

/// Matrix helper for jobs given as real diagonal one-particle operators.
pub fn diagonal_one_particle(entries: &[f64]) -> JsonMatrix {
    JsonMatrix(CMatrix::from_diagonal(&CVector::from_iterator(
        entries.len(),
        entries.iter().map(|&x| c64(x, 0.0)),
    )))
}
