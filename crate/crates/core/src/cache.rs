//! JSON encodings shared by reports and the on-disk irrep cache.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::irreps::{irrep_sun, irrep_un, Representation, Weight};
use crate::liealg::{build_algebra, AlgebraKind, IntervalSet};
use crate::matcore::{c64, CMatrix};

/// Version tag mixed into cache keys; bump when the construction changes.
pub const CACHE_FORMAT: &str = "gsrep-irrep-v1";

/// Row-major `[[[re, im], …], …]` encoding of a complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct JsonMatrix(pub CMatrix);

impl Serialize for JsonMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.0;
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for JsonMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(JsonMatrix(CMatrix::from_fn(r, c, |i, j| c64(rows[i][j][0], rows[i][j][1]))))
    }
}

/// Interval endpoint: a number or one of the sentinels `"inf"`, `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint(pub f64);

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Endpoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Endpoint(x)),
            Raw::Text(t) if t == "inf" || t == "+inf" => Ok(Endpoint(f64::INFINITY)),
            Raw::Text(t) if t == "-inf" => Ok(Endpoint(f64::NEG_INFINITY)),
            Raw::Text(t) => Err(D::Error::custom(format!("invalid interval endpoint {t:?}"))),
        }
    }
}

/// Union of closed intervals as `[[lo, hi], …]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JsonIntervals(pub Vec<[Endpoint; 2]>);

impl JsonIntervals {
    pub fn to_set(&self) -> Result<IntervalSet> {
        for [lo, hi] in &self.0 {
            if lo.0 > hi.0 || lo.0.is_nan() || hi.0.is_nan() {
                return Err(Error::Schema(format!("invalid interval [{}, {}]", lo.0, hi.0)));
            }
        }
        Ok(IntervalSet(self.0.iter().map(|[a, b]| (a.0, b.0)).collect()))
    }

    pub fn from_set(set: &IntervalSet) -> Self {
        JsonIntervals(set.0.iter().map(|&(a, b)| [Endpoint(a), Endpoint(b)]).collect())
    }
}

/// Serialized irrep as stored in the cache.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CachedIrrep {
    pub format: String,
    pub algebra: AlgebraKind,
    pub weight: Weight,
    pub dim: usize,
    pub dpi: Vec<JsonMatrix>,
}

/// Directory of irreps keyed by a SHA-256 digest of `(format, algebra, weight)`.
#[derive(Debug, Clone)]
pub struct IrrepCache {
    dir: PathBuf,
}

impl IrrepCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(IrrepCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(kind: AlgebraKind, weight: &Weight) -> String {
        let mut h = Sha256::new();
        h.update(CACHE_FORMAT.as_bytes());
        h.update(b"\0");
        h.update(kind.to_string().as_bytes());
        h.update(b"\0");
        h.update(weight.to_string().as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, kind: AlgebraKind, weight: &Weight) -> PathBuf {
        self.dir.join(format!("{}.json", Self::key(kind, weight)))
    }

    /// Reads a cached irrep, `None` when absent.
    pub fn load(&self, kind: AlgebraKind, weight: &Weight) -> Result<Option<Representation>> {
        let path = self.path(kind, weight);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let stored: CachedIrrep = serde_json::from_str(&text)?;
        if stored.format != CACHE_FORMAT || stored.algebra != kind || &stored.weight != weight {
            return Err(Error::Schema(format!("cache entry {} does not match its key", path.display())));
        }
        let algebra = Arc::new(build_algebra(kind)?);
        let dpi: Vec<CMatrix> = stored.dpi.into_iter().map(|m| m.0).collect();
        if dpi.iter().any(|m| m.nrows() != stored.dim || m.ncols() != stored.dim) {
            return Err(Error::Schema(format!("cache entry {} has inconsistent sizes", path.display())));
        }
        Ok(Some(Representation::new(algebra, dpi, 1e-8)?.with_label(weight.clone())))
    }

    /// Writes through a temporary file and a rename, so concurrent writers of
    /// the same key leave one complete entry.
    pub fn store(&self, kind: AlgebraKind, weight: &Weight, rep: &Representation) -> Result<()> {
        let entry = CachedIrrep {
            format: CACHE_FORMAT.into(),
            algebra: kind,
            weight: weight.clone(),
            dim: rep.dim,
            dpi: rep.dpi.iter().cloned().map(JsonMatrix).collect(),
        };
        let path = self.path(kind, weight);
        let tmp = self
            .dir
            .join(format!(".{}.{}.tmp", Self::key(kind, weight), std::process::id()));
        fs::write(&tmp, serde_json::to_vec(&entry)?)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}

/// The irrep of `u(n)` or `su(n)` with highest weight `weight`, read from or
/// written to `cache` when one is given.
pub fn irrep(kind: AlgebraKind, weight: &Weight, cache: Option<&IrrepCache>) -> Result<Representation> {
    if let Some(c) = cache {
        if let Some(rep) = c.load(kind, weight)? {
            return Ok(rep);
        }
    }
    let rep = match kind {
        AlgebraKind::Unitary(n) => irrep_un(n, weight)?,
        AlgebraKind::SpecialUnitary(n) => irrep_sun(n, weight)?,
        other => return Err(Error::UnsupportedKind(format!("no irrep construction for {other}"))),
    };
    if let Some(c) = cache {
        c.store(kind, weight, &rep)?;
    }
    Ok(rep)
}
