//! Greedily-optimal sets: a set holding almost all first-circuit mass in
//! which every element is needed to hold it.
//!
//! With `theta(m) = 1 - epsilon + H(m) / c_log`, a set `S` qualifies when
//! `q(S) >= theta(|S|)` and `q(S - x) < theta(|S| - 1)` for every `x` in it.
//! Starting from the whole alive set, the lowest element whose removal keeps
//! the first inequality is removed until none is left. Everything is
//! compared exactly on counts.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use super::circuits::{q_hat, sample_ensemble, CircuitEnsemble};
use super::{log_n, DecompConfig};
use crate::element::ElementSet;
use crate::error::Result;
use crate::session::QuerySession;
use crate::view::MatroidView;

/// Exact thresholds `theta(m)` for `m` up to some bound.
#[derive(Debug, Clone)]
pub struct Thresholds {
    base: BigRational,
    c_log: BigRational,
    harmonic: Vec<BigRational>,
}

fn big(r: Ratio<u64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

impl Thresholds {
    pub fn new(epsilon: Ratio<u64>, c_log: Ratio<u64>, max_size: usize) -> Self {
        let mut harmonic = Vec::with_capacity(max_size + 1);
        harmonic.push(BigRational::zero());
        for m in 1..=max_size {
            let next = &harmonic[m - 1] + BigRational::new(BigInt::one(), BigInt::from(m));
            harmonic.push(next);
        }
        Thresholds {
            base: BigRational::one() - big(epsilon),
            c_log: big(c_log),
            harmonic,
        }
    }

    pub fn theta(&self, m: usize) -> BigRational {
        &self.base + &self.harmonic[m] / &self.c_log
    }

    /// Least circuit count `c` with `c / total >= theta(m)`.
    pub fn need(&self, m: usize, total: usize) -> usize {
        let scaled = self.theta(m) * BigInt::from(total);
        scaled.ceil().to_integer().to_usize().unwrap_or(usize::MAX)
    }
}

#[derive(Debug, Clone)]
pub struct GreedyOptimalSet {
    pub members: ElementSet,
    pub q_hat: Ratio<u64>,
    pub epsilon: Ratio<u64>,
    pub c_log: Ratio<u64>,
    /// The `log n` used in `c_log`.
    pub log_n: u32,
    /// The samples the set was whittled against.
    pub ensemble: CircuitEnsemble,
}

impl GreedyOptimalSet {
    /// Both defining inequalities, rechecked against the ensemble.
    pub fn certify(&self) -> bool {
        let total = self.ensemble.circuit_count();
        let m = self.members.len();
        let th = Thresholds::new(self.epsilon, self.c_log, m);
        if self.ensemble.count_within(&self.members) < th.need(m, total) {
            return false;
        }
        let below = th.need(m.saturating_sub(1), total);
        self.members.iter().all(|x| {
            let mut rest = self.members.clone();
            rest.remove(x);
            self.ensemble.count_within(&rest) < below
        })
    }
}

/// Whittles the alive set of `view` against `ensemble`. `None` if the
/// ensemble holds no circuit.
pub fn whittle(view: &MatroidView, ensemble: CircuitEnsemble, cfg: &DecompConfig) -> Option<GreedyOptimalSet> {
    let total = ensemble.circuit_count();
    if total == 0 {
        return None;
    }
    let alive = view.alive_len();
    let log_n = log_n(alive);
    let c_log = Ratio::from_integer(cfg.c_log_multiplier * u64::from(log_n));
    let th = Thresholds::new(cfg.epsilon, c_log, alive);

    let universe = view.universe();
    let circuits: Vec<Vec<usize>> = ensemble
        .circuits()
        .map(|c| c.circuit.iter().map(|e| e.index()).collect())
        .collect();
    let mut by_element = vec![Vec::new(); universe];
    let mut contains = vec![0usize; universe];
    for (i, c) in circuits.iter().enumerate() {
        for &e in c {
            by_element[e].push(i);
            contains[e] += 1;
        }
    }
    let mut inside = vec![true; circuits.len()];
    let mut count = total;
    let mut members = view.alive().clone();
    let mut m = alive;
    while m > 0 {
        let need = th.need(m - 1, total);
        let Some(x) = members.iter().find(|x| count - contains[x.index()] >= need) else {
            break;
        };
        members.remove(x);
        m -= 1;
        for &i in &by_element[x.index()] {
            if inside[i] {
                inside[i] = false;
                count -= 1;
                for &e in &circuits[i] {
                    contains[e] -= 1;
                }
            }
        }
    }
    Some(GreedyOptimalSet {
        q_hat: q_hat(&ensemble, &members),
        members,
        epsilon: cfg.epsilon,
        c_log,
        log_n,
        ensemble,
    })
}

/// One round: samples an ensemble and whittles it offline. `None` if the
/// view is independent.
pub fn find_greedily_optimal(
    view: &MatroidView,
    session: &mut QuerySession,
    cfg: &DecompConfig,
) -> Result<Option<GreedyOptimalSet>> {
    if view.alive().is_empty() {
        return Ok(None);
    }
    let ensemble = sample_ensemble(view, session, cfg.samples_for(view.alive_len()))?;
    Ok(whittle(view, ensemble, cfg))
}
