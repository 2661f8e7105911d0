//! Persistence: JSON artifacts with exact `"num/den"` rationals, CSV
//! emission, and the checksummed on-disk cache for the expensive exact
//! computations.

use crate::analysis::BoundSequence;
use crate::arith::{rational_from_string, rational_to_string, Partition, Rational};
use crate::engine::{code_version, MomentTable, OperatorSpec};
use crate::runpoly::RunPolynomial;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "QMOMENTS_CACHE_DIR";

/// JSON schema of a moment table: rationals as `"num/den"` strings, which
/// round-trip bit-exactly.
#[derive(Serialize, Deserialize)]
pub struct MomentTableJson {
    pub operator: String,
    pub p: u32,
    pub weights: Vec<(String, u32)>,
    pub connected: Vec<String>,
    pub full: Vec<String>,
}

impl MomentTableJson {
    pub fn from_table(t: &MomentTable) -> Self {
        MomentTableJson {
            operator: t.spec().name().to_string(),
            p: t.spec().p(),
            weights: t
                .spec()
                .weights()
                .iter()
                .map(|(w, m)| (rational_to_string(w), *m))
                .collect(),
            connected: t.connected().iter().map(rational_to_string).collect(),
            full: t.full().iter().map(rational_to_string).collect(),
        }
    }

    pub fn to_table(&self) -> crate::Result<MomentTable> {
        let weights = self
            .weights
            .iter()
            .map(|(w, m)| Ok((rational_from_string(w)?, *m)))
            .collect::<crate::Result<Vec<_>>>()?;
        let spec = OperatorSpec::custom(&self.operator, self.p, weights)?;
        let connected = self
            .connected
            .iter()
            .map(|s| rational_from_string(s))
            .collect::<crate::Result<Vec<_>>>()?;
        let full = self
            .full
            .iter()
            .map(|s| rational_from_string(s))
            .collect::<crate::Result<Vec<_>>>()?;
        if connected.len() != full.len() || connected.is_empty() {
            return Err(crate::Error::Cache("inconsistent moment table lengths".into()));
        }
        Ok(MomentTable::from_parts(spec, connected, full))
    }
}

/// JSON schema of a run-structure polynomial: partitions as comma-joined
/// descending parts, coefficients as `"num/den"`.
#[derive(Serialize, Deserialize)]
pub struct RunPolynomialJson {
    pub n: u32,
    pub terms: Vec<(String, String)>,
}

impl RunPolynomialJson {
    pub fn from_poly(p: &RunPolynomial) -> Self {
        RunPolynomialJson {
            n: p.n(),
            terms: p
                .terms()
                .iter()
                .map(|(part, coeff)| {
                    let parts: Vec<String> =
                        part.parts().iter().map(|v| v.to_string()).collect();
                    (parts.join(","), rational_to_string(coeff))
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> crate::Result<RunPolynomial> {
        let mut terms = BTreeMap::new();
        for (part_str, coeff_str) in &self.terms {
            let parts = part_str
                .split(',')
                .map(|s| {
                    s.trim().parse::<u32>().map_err(|e| {
                        crate::Error::Cache(format!("bad partition part {s:?}: {e}"))
                    })
                })
                .collect::<crate::Result<Vec<u32>>>()?;
            terms.insert(Partition::new(parts), rational_from_string(coeff_str)?);
        }
        Ok(RunPolynomial::from_terms(self.n, terms))
    }
}

/// CSV of a bound sequence: `N,y_N` with `digits` decimal places.
pub fn bound_sequence_csv(seq: &BoundSequence) -> String {
    let mut out = String::from("N,y_N\n");
    for (n, y) in &seq.values {
        out.push_str(&format!("{},{}\n", n, y.format_fixed(seq.digits)));
    }
    out
}

/// CSV of exact moments: `n,connected,full` as `"num/den"` strings.
pub fn moments_csv(table: &MomentTable) -> String {
    let mut out = String::from("n,connected,full\n");
    for n in 0..=table.n_max() {
        out.push_str(&format!(
            "{},{},{}\n",
            n,
            rational_to_string(table.c(n)),
            rational_to_string(table.a(n))
        ));
    }
    out
}

/// Checksummed JSON envelope written by the cache.
#[derive(Serialize, Deserialize)]
struct Envelope {
    checksum: String,
    payload: serde_json::Value,
}

fn sha256_hex(data: &str) -> String {
    let mut h = Sha256::new();
    h.update(data.as_bytes());
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// On-disk cache for base connected moments and finished tables, keyed by
/// `(kind, p or operator, n_max, code version)` with a content checksum.
/// A checksum mismatch is treated as a miss, so corrupt entries are
/// silently recomputed.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// Cache directory from the environment, if configured.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).map(|d| Cache::new(PathBuf::from(d)))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write_envelope<T: Serialize>(&self, name: &str, value: &T) -> crate::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let payload = serde_json::to_value(value)?;
        let body = serde_json::to_string(&payload)?;
        let env = Envelope { checksum: sha256_hex(&body), payload };
        std::fs::write(self.path(name), serde_json::to_string(&env)?)?;
        Ok(())
    }

    fn read_envelope<T: for<'de> Deserialize<'de>>(&self, name: &str) -> Option<T> {
        let text = std::fs::read_to_string(self.path(name)).ok()?;
        let env: Envelope = serde_json::from_str(&text).ok()?;
        let body = serde_json::to_string(&env.payload).ok()?;
        if sha256_hex(&body) != env.checksum {
            return None; // corrupt: recompute
        }
        serde_json::from_value(env.payload).ok()
    }

    fn base_name(p: u32, n_max: usize) -> String {
        format!("base_conn_p{}_n{}_v{}.json", p, n_max, code_version())
    }

    pub fn store_base_moments(
        &self,
        p: u32,
        n_max: usize,
        moments: &[Rational],
    ) -> crate::Result<()> {
        let strings: Vec<String> = moments.iter().map(rational_to_string).collect();
        self.write_envelope(&Self::base_name(p, n_max), &strings)
    }

    pub fn load_base_moments(&self, p: u32, n_max: usize) -> Option<Vec<Rational>> {
        let strings: Vec<String> = self.read_envelope(&Self::base_name(p, n_max))?;
        strings.iter().map(|s| rational_from_string(s).ok()).collect()
    }

    fn table_name(op: &str, n_max: usize) -> String {
        format!("table_{}_n{}_v{}.json", op, n_max, code_version())
    }

    pub fn store_table(&self, t: &MomentTable) -> crate::Result<()> {
        self.write_envelope(
            &Self::table_name(t.spec().name(), t.n_max()),
            &MomentTableJson::from_table(t),
        )
    }

    pub fn load_table(&self, op: &str, n_max: usize) -> Option<MomentTable> {
        let json: MomentTableJson = self.read_envelope(&Self::table_name(op, n_max))?;
        json.to_table().ok()
    }

    fn kpoly_name(n: u32) -> String {
        format!("kpoly_n{}_v{}.json", n, code_version())
    }

    pub fn store_run_polynomial(&self, p: &RunPolynomial) -> crate::Result<()> {
        self.write_envelope(&Self::kpoly_name(p.n()), &RunPolynomialJson::from_poly(p))
    }

    pub fn load_run_polynomial(&self, n: u32) -> Option<RunPolynomial> {
        let json: RunPolynomialJson = self.read_envelope(&Self::kpoly_name(n))?;
        json.to_poly().ok()
    }
}
