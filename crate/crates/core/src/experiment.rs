//! Seeded sweeps over (size, seed) cells with CSV output.
//!
//! A sweep is described by a line-oriented `key=value` file:
//!
//! ```text
//! family=kuw-hard
//! sizes=64,216,512
//! seeds=0..20
//! algorithm=partition
//! ```

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::baseline::kuw_find_basis;
use crate::element::ElementSet;
use crate::error::{Error, Result};
use crate::general::{general_find_basis, GeneralConfig};
use crate::generate::{Family, FamilySpec};
use crate::instance::MatroidInstance;
use crate::partition::{partition_find_basis, PartitionConfig};
use crate::session::QuerySession;
use crate::view::MatroidView;

pub const CSV_HEADER: &str = "family,n,seed,algorithm,rounds,queries,basis_size,rank,valid,wall_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Kuw,
    Partition,
    General,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Kuw, Algorithm::Partition, Algorithm::General];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Kuw => "kuw",
            Algorithm::Partition => "partition",
            Algorithm::General => "general",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown algorithm `{s}`")))
    }
}

/// Solver settings shared by every cell of a sweep.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverConfig {
    pub partition: PartitionConfig,
    pub general: GeneralConfig,
}

impl SolverConfig {
    /// Sample count for both the partition solver and the circuit ensembles.
    pub fn set_samples(&mut self, samples: usize) {
        self.partition.samples = Some(samples);
        self.general.decomp.samples = Some(samples);
    }

    pub fn set_epsilon(&mut self, epsilon: Ratio<u64>) {
        self.general.decomp.epsilon = epsilon;
    }

    /// Size bound for small parts (partition solver) and small circuits
    /// (general solver).
    pub fn set_budget_threshold(&mut self, threshold: usize) {
        self.partition.threshold = threshold;
        self.general.decomp.small_circuit_threshold = threshold;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub family: FamilySpec,
    /// Ascending.
    pub sizes: Vec<usize>,
    /// Non-empty.
    pub seeds: Vec<u64>,
    pub algorithm: Algorithm,
    pub config: SolverConfig,
    /// When false, `wall_ms` is left empty so that output is reproducible.
    pub timing: bool,
}

impl ExperimentSpec {
    pub fn new(family: FamilySpec, sizes: Vec<usize>, seeds: Vec<u64>, algorithm: Algorithm) -> Result<Self> {
        let spec = ExperimentSpec {
            family,
            sizes,
            seeds,
            algorithm,
            config: SolverConfig::default(),
            timing: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::InvalidParams("an experiment needs at least one seed".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::InvalidParams("an experiment needs at least one size".into()));
        }
        if self.sizes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParams("sizes must be sorted ascending".into()));
        }
        Ok(())
    }

    /// Parses a `key=value` config. Recognised keys: `family`, `sizes`,
    /// `seeds`, `algorithm`, `samples`, `epsilon`, `budget_threshold`,
    /// `timing`, and the family parameters `rank`, `parts`, `budget`,
    /// `vertices`, `rows`, `prime`. `-` and `_` are interchangeable in keys.
    pub fn parse(text: &str) -> Result<Self> {
        let mut family = None;
        let mut sizes = None;
        let mut seeds = None;
        let mut algorithm = None;
        let mut rest = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected `key=value`, found `{line}`")))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            let wrap = |e: Error| Error::parse(i + 1, e.to_string());
            match key.as_str() {
                "family" => family = Some(value.parse::<Family>().map_err(wrap)?),
                "sizes" => sizes = Some(parse_list(value).map_err(wrap)?),
                "seeds" => seeds = Some(parse_list(value).map_err(wrap)?),
                "algorithm" => algorithm = Some(value.parse::<Algorithm>().map_err(wrap)?),
                _ => rest.push((i + 1, key, value.to_string())),
            }
        }
        let missing = |what: &str| Error::parse(1, format!("config is missing `{what}=`"));
        let mut spec = ExperimentSpec {
            family: FamilySpec::new(family.ok_or_else(|| missing("family"))?),
            sizes: sizes.ok_or_else(|| missing("sizes"))?,
            seeds: seeds.ok_or_else(|| missing("seeds"))?,
            algorithm: algorithm.ok_or_else(|| missing("algorithm"))?,
            config: SolverConfig::default(),
            timing: true,
        };
        for (line, key, value) in rest {
            spec.set(&key, &value).map_err(|e| Error::parse(line, e.to_string()))?;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Applies one override; used by the config parser and the CLI flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let f = &mut self.family;
        match key.replace('-', "_").as_str() {
            "family" => f.family = value.parse()?,
            "sizes" => self.sizes = parse_list(value)?,
            "seeds" => self.seeds = parse_list(value)?,
            "algorithm" => self.algorithm = value.parse()?,
            "samples" => self.config.set_samples(parse_num(value)?),
            "epsilon" => self.config.set_epsilon(parse_ratio(value)?),
            "budget_threshold" => self.config.set_budget_threshold(parse_num(value)?),
            "timing" => {
                self.timing = match value {
                    "on" | "true" | "1" => true,
                    "off" | "false" | "0" => false,
                    other => return Err(Error::InvalidParams(format!("timing must be on or off, found `{other}`"))),
                }
            }
            "rank" => f.rank = Some(parse_num(value)?),
            "parts" => f.parts = Some(parse_num(value)?),
            "budget" => f.budget = Some(value.parse()?),
            "vertices" => f.vertices = Some(parse_num(value)?),
            "rows" => f.rows = Some(parse_num(value)?),
            "prime" => f.prime = Some(parse_num(value)?),
            other => return Err(Error::InvalidParams(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParams(format!("expected a non-negative integer, found `{value}`")))
}

/// `a,b,c`, with `lo..hi` (exclusive) ranges allowed as items.
pub fn parse_list<T>(value: &str) -> Result<Vec<T>>
where
    T: FromStr + TryFrom<u64>,
{
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, hi)) = item.split_once("..") {
            let lo: u64 = parse_num(lo.trim())?;
            let hi: u64 = parse_num(hi.trim())?;
            for x in lo..hi {
                out.push(T::try_from(x).map_err(|_| Error::InvalidParams(format!("{x} is out of range")))?);
            }
        } else {
            out.push(parse_num(item)?);
        }
    }
    Ok(out)
}

/// `p/q`, an integer, or an exact decimal such as `0.015625`.
pub fn parse_ratio(value: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidParams(format!("expected a fraction or decimal, found `{value}`"));
    let r = if let Some((p, q)) = value.split_once('/') {
        let q: u64 = parse_num(q.trim())?;
        if q == 0 {
            return Err(bad());
        }
        Ratio::new(parse_num(p.trim())?, q)
    } else if let Some((whole, frac)) = value.split_once('.') {
        if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let denom = 10u64.pow(frac.len() as u32);
        let whole: u64 = if whole.is_empty() { 0 } else { parse_num(whole)? };
        let frac: u64 = if frac.is_empty() { 0 } else { parse_num(frac)? };
        Ratio::new(whole.checked_mul(denom).and_then(|w| w.checked_add(frac)).ok_or_else(bad)?, denom)
    } else {
        Ratio::from_integer(parse_num(value)?)
    };
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    /// Flush count of the run's session.
    pub rounds: u64,
    pub total_queries: u64,
    pub basis_size: usize,
    pub rank: usize,
    /// The output is a basis of size `rank`.
    pub valid: bool,
    pub wall_ms: Option<f64>,
    /// Generation or solver failure; such records are never valid.
    pub error: Option<String>,
    pub basis: Option<ElementSet>,
}

impl ExperimentRecord {
    pub fn csv_row(&self) -> String {
        let wall = self.wall_ms.map(|w| format!("{w:.3}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.seed,
            self.algorithm,
            self.rounds,
            self.total_queries,
            self.basis_size,
            self.rank,
            self.valid,
            wall
        )
    }
}

pub fn to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

/// Runs `algorithm` on `instance` in a fresh session seeded with `seed` and
/// checks the result against the greedy rank.
pub fn solve_instance(
    instance: Arc<MatroidInstance>,
    algorithm: Algorithm,
    config: &SolverConfig,
    seed: u64,
) -> (Result<ElementSet>, QuerySession) {
    let view = MatroidView::new(instance);
    let mut session = QuerySession::new(view.universe(), seed);
    let basis = match algorithm {
        Algorithm::Kuw => kuw_find_basis(&view, &mut session),
        Algorithm::Partition => partition_find_basis(&view, &mut session, &config.partition),
        Algorithm::General => general_find_basis(&view, &mut session, &config.general),
    };
    (basis, session)
}

fn run_cell(spec: &ExperimentSpec, n: usize, seed: u64) -> ExperimentRecord {
    let start = Instant::now();
    let mut record = ExperimentRecord {
        family: spec.family.family.name().to_string(),
        n,
        seed,
        algorithm: spec.algorithm,
        rounds: 0,
        total_queries: 0,
        basis_size: 0,
        rank: 0,
        valid: false,
        wall_ms: None,
        error: None,
        basis: None,
    };
    match spec.family.generate(n, seed) {
        Err(e) => record.error = Some(e.to_string()),
        Ok(instance) => {
            let instance = Arc::new(instance);
            let (result, session) = solve_instance(instance.clone(), spec.algorithm, &spec.config, seed);
            record.rounds = session.rounds();
            record.total_queries = session.total_queries();
            let view = MatroidView::new(instance);
            record.rank = view.rank_greedy();
            match result {
                Err(e) => record.error = Some(e.to_string()),
                Ok(basis) => {
                    record.basis_size = basis.len();
                    record.valid = view.is_basis(&basis).unwrap_or(false) && basis.len() == record.rank;
                    record.basis = Some(basis);
                }
            }
        }
    }
    if spec.timing {
        record.wall_ms = Some(start.elapsed().as_secs_f64() * 1000.0);
    }
    record
}

/// One record per `(n, seed)` cell, sizes outer and seeds inner. Cells run
/// in parallel, each with its own session.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRecord>> {
    spec.validate()?;
    let cells: Vec<(usize, u64)> = spec
        .sizes
        .iter()
        .flat_map(|&n| spec.seeds.iter().map(move |&s| (n, s)))
        .collect();
    Ok(cells.into_par_iter().map(|(n, seed)| run_cell(spec, n, seed)).collect())
}
