//! Parallel sweeps over prime ranges with a resumable CSV results cache, and
//! the summary report (fixed-point distribution and interval means).

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    analyze_prime, histogram, summarize, AggregateSummary, PrimeRow, RandomMapBaseline, U0Policy,
};
use crate::error::{FqError, Result};
use crate::sieve::odd_primes_in;

pub const CACHE_SCHEMA_VERSION: u32 = 1;
const CACHE_HEADER: [&str; 9] = [
    "p",
    "F_excl0",
    "M",
    "C",
    "rho",
    "mu",
    "u0",
    "policy",
    "schema_version",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub lo: u64,
    pub hi: u64,
    pub jobs: usize,
    pub u0_policy: U0Policy,
    pub cache_path: Option<PathBuf>,
    /// Width of the report sub-intervals `[lo + i w, lo + (i+1) w)`.
    pub interval_width: Option<u64>,
}

impl SweepConfig {
    pub fn new(lo: u64, hi: u64, u0_policy: U0Policy) -> Self {
        SweepConfig {
            lo,
            hi,
            jobs: 1,
            u0_policy,
            cache_path: None,
            interval_width: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo > self.hi {
            return Err(FqError::BadParameter(format!(
                "empty range {}:{}",
                self.lo, self.hi
            )));
        }
        if self.jobs == 0 {
            return Err(FqError::BadParameter("jobs must be at least 1".into()));
        }
        if self.interval_width == Some(0) {
            return Err(FqError::BadParameter(
                "interval width must be positive".into(),
            ));
        }
        if let U0Policy::Fixed(u) = self.u0_policy {
            if u >= self.lo.max(3) {
                return Err(FqError::BadParameter(format!(
                    "fixed start {u} is not below every prime in the range"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheRecord {
    p: u64,
    #[serde(rename = "F_excl0")]
    fixed_points_excl0: u64,
    #[serde(rename = "M")]
    image_size: u64,
    #[serde(rename = "C")]
    cyclic_count: u64,
    rho: u64,
    mu: u64,
    u0: u64,
    policy: String,
    schema_version: u32,
}

/// Append-only CSV of per-prime rows, keyed by `(p, policy)`.
#[derive(Clone, Debug)]
pub struct ResultsCache {
    path: PathBuf,
}

impl ResultsCache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        ResultsCache { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Rows stored for `policy`, sorted by `p`. A missing file reads as empty.
    pub fn read(&self, policy: U0Policy) -> Result<BTreeMap<u64, PrimeRow>> {
        let mut out = BTreeMap::new();
        if !self.path.exists() {
            return Ok(out);
        }
        let mut reader = csv::Reader::from_path(&self.path)?;
        let header = reader.headers()?.clone();
        if header.iter().ne(CACHE_HEADER.iter().copied()) {
            return Err(FqError::CacheCorrupt(format!(
                "unexpected header {:?}",
                header.iter().collect::<Vec<_>>()
            )));
        }
        let tag = policy.tag();
        for record in reader.deserialize() {
            let rec: CacheRecord = record?;
            if rec.schema_version != CACHE_SCHEMA_VERSION {
                return Err(FqError::CacheCorrupt(format!(
                    "schema version {} (expected {CACHE_SCHEMA_VERSION})",
                    rec.schema_version
                )));
            }
            if U0Policy::parse_tag(&rec.policy).is_none() {
                return Err(FqError::CacheCorrupt(format!(
                    "unknown policy {:?}",
                    rec.policy
                )));
            }
            if rec.policy != tag {
                continue;
            }
            out.insert(
                rec.p,
                PrimeRow {
                    p: rec.p,
                    fixed_points_excl0: rec.fixed_points_excl0,
                    image_size: rec.image_size,
                    cyclic_count: rec.cyclic_count,
                    rho: rec.rho,
                    mu: rec.mu,
                    u0: rec.u0,
                },
            );
        }
        Ok(out)
    }

    fn open_append(&self) -> Result<csv::Writer<BufWriter<File>>> {
        let fresh = !self.path.exists() || std::fs::metadata(&self.path)?.len() == 0;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(BufWriter::new(file));
        if fresh {
            w.write_record(CACHE_HEADER)?;
        }
        Ok(w)
    }

    /// Appends rows for `policy`.
    pub fn append(&self, policy: U0Policy, rows: &[PrimeRow]) -> Result<()> {
        let mut w = self.open_append()?;
        for r in rows {
            w.serialize(record(r, policy))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn record(r: &PrimeRow, policy: U0Policy) -> CacheRecord {
    CacheRecord {
        p: r.p,
        fixed_points_excl0: r.fixed_points_excl0,
        image_size: r.image_size,
        cyclic_count: r.cyclic_count,
        rho: r.rho,
        mu: r.mu,
        u0: r.u0,
        policy: policy.tag(),
        schema_version: CACHE_SCHEMA_VERSION,
    }
}

/// Writes per-prime rows as CSV (`p,F_excl0,M,C,rho_u0,mu_u0,u0`).
pub fn write_rows_csv<W: Write>(rows: &[PrimeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "F_excl0", "M", "C", "rho_u0", "mu_u0", "u0"])?;
    for r in rows {
        w.write_record(
            [
                r.p,
                r.fixed_points_excl0,
                r.image_size,
                r.cyclic_count,
                r.rho,
                r.mu,
                r.u0,
            ]
            .map(|v| v.to_string()),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// One row of the fixed-point table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRow {
    pub k: u64,
    pub count: u64,
    /// `count / prime_count`, 3 significant figures.
    pub proportion: String,
    /// `1 / (e k!)`, 3 significant figures.
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub lo: u64,
    pub hi: u64,
    #[serde(flatten)]
    pub summary: AggregateSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub lo: u64,
    pub hi: u64,
    pub policy: String,
    pub prime_count: u64,
    pub fixed_points: Vec<FixedPointRow>,
    pub intervals: Vec<IntervalReport>,
    pub whole: AggregateSummary,
    pub baseline: BaselineReport,
    /// Primes computed in this run (0 on a fully warm cache).
    pub computed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub rho_over_sqrt: f64,
    pub mu_over_sqrt: f64,
    pub image_fraction: f64,
    pub cyclic_over_sqrt: f64,
}

/// Formats `x` with three significant figures in plain decimal notation.
pub fn three_sig_figs(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Builds the report from rows sorted by `p`.
pub fn build_report(config: &SweepConfig, rows: &[PrimeRow], computed: u64) -> SweepReport {
    let n = rows.len() as u64;
    let dist = histogram(rows.iter().map(|r| r.fixed_points_excl0));
    let k_max = dist.keys().next_back().copied().unwrap_or(0).max(6);
    let fixed_points = (0..=k_max)
        .map(|k| {
            let count = dist.get(&k).copied().unwrap_or(0);
            FixedPointRow {
                k,
                count,
                proportion: three_sig_figs(if n == 0 { 0.0 } else { count as f64 / n as f64 }),
                expected: three_sig_figs(RandomMapBaseline::fixpoint_law(k as u32)),
            }
        })
        .collect();

    let mut intervals = Vec::new();
    if let Some(width) = config.interval_width {
        let mut start = config.lo;
        while start <= config.hi {
            let end = start.saturating_add(width);
            // The last interval is closed at `hi`.
            let last = end >= config.hi;
            let slice: Vec<PrimeRow> = rows
                .iter()
                .filter(|r| r.p >= start && (r.p < end || (last && r.p <= config.hi)))
                .copied()
                .collect();
            intervals.push(IntervalReport {
                lo: start,
                hi: if last { config.hi } else { end },
                summary: summarize(&slice),
            });
            if last {
                break;
            }
            start = end;
        }
    }

    SweepReport {
        lo: config.lo,
        hi: config.hi,
        policy: config.u0_policy.tag(),
        prime_count: n,
        fixed_points,
        intervals,
        whole: summarize(rows),
        baseline: BaselineReport {
            rho_over_sqrt: RandomMapBaseline::rho_over_sqrt(),
            mu_over_sqrt: RandomMapBaseline::mu_over_sqrt(),
            image_fraction: RandomMapBaseline::image_fraction(),
            cyclic_over_sqrt: RandomMapBaseline::cyclic_over_sqrt(),
        },
        computed,
    }
}

/// Computes every prime in the range that the cache does not already hold,
/// streaming new rows to the cache through a single writer thread, and
/// returns all rows for the range sorted by `p`.
pub fn sweep_rows(config: &SweepConfig) -> Result<(Vec<PrimeRow>, u64)> {
    config.validate()?;
    let policy = config.u0_policy;
    let cache = config.cache_path.as_ref().map(ResultsCache::new);
    let mut known = match &cache {
        Some(c) => c.read(policy)?,
        None => BTreeMap::new(),
    };
    let primes = odd_primes_in(config.lo, config.hi);
    let missing: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|p| !known.contains_key(p))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| FqError::BadParameter(e.to_string()))?;

    let fresh: Vec<PrimeRow> = match &cache {
        Some(c) => {
            let (tx, rx) = mpsc::channel::<PrimeRow>();
            let mut writer = c.open_append()?;
            let handle = thread::spawn(move || -> Result<()> {
                for row in rx {
                    writer.serialize(record(&row, policy))?;
                }
                writer.flush()?;
                Ok(())
            });
            let computed: Result<Vec<PrimeRow>> = pool.install(|| {
                missing
                    .par_iter()
                    .map_with(tx, |tx, &p| {
                        let row = analyze_prime(p, policy)?;
                        // The writer only stops early on an I/O error, which
                        // is reported from join below.
                        let _ = tx.send(row);
                        Ok(row)
                    })
                    .collect()
            });
            handle.join().expect("cache writer panicked")?;
            computed?
        }
        None => pool.install(|| {
            missing
                .par_iter()
                .map(|&p| analyze_prime(p, policy))
                .collect::<Result<Vec<_>>>()
        })?,
    };
    let computed = fresh.len() as u64;
    for row in fresh {
        known.insert(row.p, row);
    }
    let rows = primes.iter().map(|p| known[p]).collect();
    Ok((rows, computed))
}

pub fn run_sweep(config: &SweepConfig) -> Result<(SweepReport, Vec<PrimeRow>)> {
    let (rows, computed) = sweep_rows(config)?;
    Ok((build_report(config, &rows, computed), rows))
}
