//! Seeded instance generators.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::MatroidInstance;

/// Partition matroid with `m` parts of `m^2` elements; part `i` (1-based)
/// has budget `i * m`. Elements are assigned to parts uniformly at random.
pub fn kuw_hard<R: Rng>(m: usize, rng: &mut R) -> Result<MatroidInstance> {
    if m == 0 {
        return Err(Error::InvalidParams("kuw-hard needs m >= 1".into()));
    }
    let n = m * m * m;
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let parts: Vec<Vec<usize>> = ids.chunks(m * m).map(<[usize]>::to_vec).collect();
    let budgets = (1..=m).map(|i| i * m).collect();
    MatroidInstance::partition(n, parts, budgets)
}

/// How budgets of a random partition are drawn from a part's size `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetLaw {
    /// Uniform on `0..=s`.
    Uniform,
    /// `floor(s / 2)`.
    Half,
    /// `min(b, s)`.
    Fixed(usize),
}

/// `parts` non-empty parts with uniformly random membership.
pub fn random_partition<R: Rng>(n: usize, parts: usize, law: BudgetLaw, rng: &mut R) -> Result<MatroidInstance> {
    if parts == 0 || parts > n {
        return Err(Error::InvalidParams(format!("cannot split {n} elements into {parts} non-empty parts")));
    }
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut members: Vec<Vec<usize>> = ids[..parts].iter().map(|&e| vec![e]).collect();
    for &e in &ids[parts..] {
        members[rng.gen_range(0..parts)].push(e);
    }
    let budgets = members
        .iter()
        .map(|p| match law {
            BudgetLaw::Uniform => rng.gen_range(0..=p.len()),
            BudgetLaw::Half => p.len() / 2,
            BudgetLaw::Fixed(b) => b.min(p.len()),
        })
        .collect();
    MatroidInstance::partition(n, members, budgets)
}

/// Multigraph with `edges` edges whose endpoints are drawn independently and
/// uniformly, so loops and parallel edges occur.
pub fn random_graph<R: Rng>(vertices: usize, edges: usize, rng: &mut R) -> Result<MatroidInstance> {
    if vertices == 0 && edges > 0 {
        return Err(Error::InvalidParams("edges need at least one vertex".into()));
    }
    let list = (0..edges)
        .map(|_| (rng.gen_range(0..vertices), rng.gen_range(0..vertices)))
        .collect();
    MatroidInstance::graphic(vertices, list)
}

/// `rows x n` matrix over `GF(prime)` with uniform entries.
pub fn random_linear<R: Rng>(n: usize, rows: usize, prime: u32, rng: &mut R) -> Result<MatroidInstance> {
    let columns = (0..n).map(|_| (0..rows).map(|_| rng.gen_range(0..prime)).collect()).collect();
    MatroidInstance::linear(prime, rows, columns)
}

/// Instance families addressable by name and ground-set size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `n` must be a cube `m^3`.
    KuwHard,
    /// Rank `n / 2`.
    Uniform,
    /// About `sqrt(n)` parts, uniform budgets.
    RandomPartition,
    /// `n` edges on `n / 2 + 1` vertices.
    RandomGraph,
    /// `n` columns of height `n / 2` over `GF(7)`.
    RandomLinear,
    /// Direct sum of one of each of the families above, about `n / 4` each.
    Mixed,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::KuwHard,
        Family::Uniform,
        Family::RandomPartition,
        Family::RandomGraph,
        Family::RandomLinear,
        Family::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::KuwHard => "kuw-hard",
            Family::Uniform => "uniform",
            Family::RandomPartition => "random-partition",
            Family::RandomGraph => "random-graph",
            Family::RandomLinear => "random-linear",
            Family::Mixed => "mixed",
        }
    }

    /// Deterministic in `(self, n, seed)`.
    pub fn generate(self, n: usize, seed: u64) -> Result<MatroidInstance> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.generate_with(n, &mut rng)
    }

    fn generate_with(self, n: usize, rng: &mut ChaCha8Rng) -> Result<MatroidInstance> {
        match self {
            Family::KuwHard => {
                let m = cube_root(n)
                    .ok_or_else(|| Error::InvalidParams(format!("kuw-hard needs a cube size, got {n}")))?;
                kuw_hard(m, rng)
            }
            Family::Uniform => MatroidInstance::uniform(n, n / 2),
            Family::RandomPartition => {
                let parts = ((n as f64).sqrt().ceil() as usize).clamp(1, n.max(1));
                if n == 0 {
                    return MatroidInstance::partition(0, Vec::new(), Vec::new());
                }
                random_partition(n, parts, BudgetLaw::Uniform, rng)
            }
            Family::RandomGraph => random_graph(n / 2 + 1, n, rng),
            Family::RandomLinear => random_linear(n, n / 2, 7, rng),
            Family::Mixed => {
                if n < 4 {
                    return Err(Error::InvalidParams(format!("mixed family needs n >= 4, got {n}")));
                }
                let quarter = n / 4;
                let sizes = [quarter, quarter, quarter, n - 3 * quarter];
                let components = vec![
                    Family::RandomPartition.generate_with(sizes[0], rng)?,
                    Family::RandomGraph.generate_with(sizes[1], rng)?,
                    Family::RandomLinear.generate_with(sizes[2], rng)?,
                    Family::Uniform.generate_with(sizes[3], rng)?,
                ];
                MatroidInstance::direct_sum(components)
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown family `{s}`")))
    }
}

/// A family together with optional overrides of its size-derived defaults.
/// Parameters that do not apply to the family are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    /// Uniform rank.
    pub rank: Option<usize>,
    /// Random-partition part count.
    pub parts: Option<usize>,
    /// Random-partition budget law.
    pub budget: Option<BudgetLaw>,
    /// Random-graph vertex count.
    pub vertices: Option<usize>,
    /// Random-linear row count.
    pub rows: Option<usize>,
    /// Random-linear field modulus.
    pub prime: Option<u32>,
}

impl FamilySpec {
    pub fn new(family: Family) -> Self {
        FamilySpec {
            family,
            rank: None,
            parts: None,
            budget: None,
            vertices: None,
            rows: None,
            prime: None,
        }
    }

    pub fn has_overrides(&self) -> bool {
        *self != FamilySpec::new(self.family)
    }

    /// Deterministic in `(self, n, seed)`; equals [`Family::generate`] when
    /// nothing is overridden.
    pub fn generate(&self, n: usize, seed: u64) -> Result<MatroidInstance> {
        if !self.has_overrides() {
            return self.family.generate(n, seed);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self.family {
            Family::Uniform => MatroidInstance::uniform(n, self.rank.unwrap_or(n / 2)),
            Family::RandomPartition => {
                let parts = self.parts.unwrap_or(((n as f64).sqrt().ceil() as usize).clamp(1, n.max(1)));
                random_partition(n, parts, self.budget.unwrap_or(BudgetLaw::Uniform), &mut rng)
            }
            Family::RandomGraph => random_graph(self.vertices.unwrap_or(n / 2 + 1), n, &mut rng),
            Family::RandomLinear => random_linear(n, self.rows.unwrap_or(n / 2), self.prime.unwrap_or(7), &mut rng),
            Family::KuwHard | Family::Mixed => self.family.generate_with(n, &mut rng),
        }
    }
}

impl FromStr for BudgetLaw {
    type Err = Error;

    /// `uniform`, `half`, or a fixed integer budget.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(BudgetLaw::Uniform),
            "half" => Ok(BudgetLaw::Half),
            other => other
                .parse()
                .map(BudgetLaw::Fixed)
                .map_err(|_| Error::InvalidParams(format!("unknown budget law `{other}`"))),
        }
    }
}

/// Exact integer cube root, if any.
pub fn cube_root(n: usize) -> Option<usize> {
    let guess = (n as f64).cbrt().round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&m| m * m * m == n)
}
