//! Circuit sampling and the peeling decompositions of general matroids.
//!
//! A peel samples first circuits, whittles the alive set down to a
//! greedily-optimal set and deletes it. Repeating this splits the matroid
//! into sets `S_1, S_2, ...`, each tagged with an estimate of how many of
//! its random elements it takes to meet a dependence.

mod circuits;
mod whittle;

use std::fmt::Write as _;

use num_rational::Ratio;

pub use circuits::{
    alpha_estimate, find_circuit, q_hat, sample_ensemble, AlphaEstimate, AlphaPlan, CircuitEnsemble, CircuitSample,
    EnsemblePlan,
};
pub use whittle::{find_greedily_optimal, whittle, GreedyOptimalSet, Thresholds};

use crate::element::{join_ids, ElementSet};
use crate::error::Result;
use crate::instance::CircuitClass;
use crate::session::{QuerySession, Ticket};
use crate::view::MatroidView;

/// `floor(log2 n) + 1`, at least 1. This keeps `theta(n) <= 1`, so the
/// whole alive set always starts out qualifying.
pub fn log_n(n: usize) -> u32 {
    (usize::BITS - n.leading_zeros()).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompConfig {
    /// Ensemble size; `None` means `max(256, ceil(8 n ln n))`.
    pub samples: Option<usize>,
    /// Orders per `alpha` estimate.
    pub alpha_samples: usize,
    pub epsilon: Ratio<u64>,
    /// `c_log = c_log_multiplier * log n`.
    pub c_log_multiplier: u64,
    /// Circuits up to this size are cleared before decomposing.
    pub small_circuit_threshold: usize,
    /// A set stops the early-stop decomposition once
    /// `alpha >= large_alpha_c * |S| / log n`.
    pub large_alpha_c: Ratio<u64>,
}

impl Default for DecompConfig {
    fn default() -> Self {
        DecompConfig {
            samples: None,
            alpha_samples: 256,
            epsilon: Ratio::new(1, 64),
            c_log_multiplier: 64,
            small_circuit_threshold: 2,
            large_alpha_c: Ratio::new(1, 100),
        }
    }
}

impl DecompConfig {
    pub fn samples_for(&self, n: usize) -> usize {
        self.samples.unwrap_or_else(|| {
            let nf = n.max(2) as f64;
            256usize.max((8.0 * nf * nf.ln()).ceil() as usize)
        })
    }

    /// `alpha >= large_alpha_c * size / log2(alive)`, exactly.
    pub fn is_large_alpha(&self, alpha: usize, size: usize, alive: usize) -> bool {
        let c = self.large_alpha_c;
        (alpha as u128) * u128::from(log_n(alive)) * u128::from(*c.denom()) >= u128::from(*c.numer()) * size as u128
    }
}

/// Elements whose deletion clears every circuit of `classes`: the lowest id
/// of each circuit.
pub fn small_circuit_minima(view: &MatroidView, classes: &[CircuitClass]) -> ElementSet {
    let mut out = view.empty_set();
    for class in classes {
        // In a class every `size`-subset is a circuit, so the minima are all
        // members with at least `size - 1` larger members.
        let keep = class.ground.len() + 1 - class.size;
        for e in class.ground.iter().take(keep) {
            out.insert(e);
        }
    }
    out
}

#[derive(Debug)]
pub struct SmallCircuitPlan {
    ticket: Ticket<Vec<CircuitClass>>,
}

impl SmallCircuitPlan {
    pub fn submit(view: &MatroidView, session: &mut QuerySession, threshold: usize) -> Result<Self> {
        Ok(SmallCircuitPlan {
            ticket: session.submit_small_circuits(view, threshold)?,
        })
    }

    /// The elements to delete.
    pub fn resolve(self, view: &MatroidView, session: &mut QuerySession) -> Result<ElementSet> {
        let classes = session.redeem(self.ticket)?;
        Ok(small_circuit_minima(view, &classes))
    }
}

/// One round: deletes the lowest element of every circuit of size at most
/// `threshold`. The rank is unchanged, since the largest deleted element
/// is spanned by larger survivors, and so on downward.
pub fn remove_small_circuits(view: &MatroidView, session: &mut QuerySession, threshold: usize) -> Result<MatroidView> {
    let plan = SmallCircuitPlan::submit(view, session, threshold)?;
    session.flush();
    let doomed = plan.resolve(view, session)?;
    view.delete_redundant(&doomed)
}

/// Finds a greedily-optimal set and deletes it. `None` if the view is
/// independent.
pub fn peel(
    view: &MatroidView,
    session: &mut QuerySession,
    cfg: &DecompConfig,
) -> Result<Option<(GreedyOptimalSet, MatroidView)>> {
    let Some(g) = find_greedily_optimal(view, session, cfg)? else {
        return Ok(None);
    };
    let rest = view.delete(&g.members)?;
    Ok(Some((g, rest)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Nothing alive, or the rest is independent.
    Exhausted,
    /// Fewer than half the starting elements remain.
    HalfConsumed,
    /// The last set has a large `alpha`.
    LargeAlpha,
    /// The last set holds more than half the starting elements.
    OversizedSet,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Exhausted => "exhausted",
            StopReason::HalfConsumed => "half_consumed",
            StopReason::LargeAlpha => "large_alpha",
            StopReason::OversizedSet => "oversized_set",
        }
    }
}

/// A set dropped by the early-stop decomposition, kept for the caller.
#[derive(Debug, Clone)]
pub struct DiscardedSet {
    pub members: ElementSet,
    pub alpha: AlphaEstimate,
    /// The view the set was peeled from.
    pub pre_peel_view: MatroidView,
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    /// `S_1, ..., S_k` in peel order.
    pub sets: Vec<ElementSet>,
    pub alphas: Vec<AlphaEstimate>,
    pub stop_reason: StopReason,
    /// The view left after the last peel (a discarded set is deleted too).
    pub residual_view: MatroidView,
    /// The view each set was peeled from.
    pub pre_peel_views: Vec<MatroidView>,
    pub discarded: Option<DiscardedSet>,
    pub initial_alive: usize,
}

impl DecompositionResult {
    pub fn k(&self) -> usize {
        self.sets.len()
    }

    /// One `set <i> alpha=<v> size=<s> members=<ids>` line per set, then a
    /// `stop <reason>` line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, (s, a)) in self.sets.iter().zip(&self.alphas).enumerate() {
            let _ = writeln!(
                out,
                "set {} alpha={} size={} members={}",
                i + 1,
                a.value,
                s.len(),
                join_ids(s.iter())
            );
        }
        let _ = writeln!(out, "stop {}", self.stop_reason.name());
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Iterative,
    EarlyStop,
}

/// Peels until nothing dependent is left, a set's `alpha` is large, or a
/// set holds more than half the starting elements. Each set's `alpha`
/// estimate rides along with the next peel's ensemble.
pub fn iterative_peel(view: &MatroidView, session: &mut QuerySession, cfg: &DecompConfig) -> Result<DecompositionResult> {
    decompose(view, session, cfg, Mode::Iterative)
}

/// Peels while at least half the starting elements are alive. A set with
/// large `alpha` ends the run and is reported as discarded rather than
/// kept.
pub fn early_stop_decomposition(
    view: &MatroidView,
    session: &mut QuerySession,
    cfg: &DecompConfig,
) -> Result<DecompositionResult> {
    decompose(view, session, cfg, Mode::EarlyStop)
}

fn decompose(view: &MatroidView, session: &mut QuerySession, cfg: &DecompConfig, mode: Mode) -> Result<DecompositionResult> {
    let n = view.alive_len();
    let mut res = DecompositionResult {
        sets: Vec::new(),
        alphas: Vec::new(),
        stop_reason: StopReason::Exhausted,
        residual_view: view.clone(),
        pre_peel_views: Vec::new(),
        discarded: None,
        initial_alive: n,
    };
    let mut pending: Option<AlphaPlan> = None;
    loop {
        let current = res.residual_view.clone();
        let guard = mode == Mode::Iterative || 2 * current.alive_len() >= n;
        let oversized = mode == Mode::Iterative && res.sets.last().is_some_and(|s| 2 * s.len() > n);
        let ensemble = if guard && !oversized && !current.alive().is_empty() {
            Some(EnsemblePlan::submit(&current, session, cfg.samples_for(current.alive_len()))?)
        } else {
            None
        };
        session.flush();

        if let Some(plan) = pending.take() {
            let alpha = plan.resolve(session)?;
            let set = res.sets.last().expect("an estimate follows a peel");
            let from = res.pre_peel_views.last().expect("an estimate follows a peel");
            if cfg.is_large_alpha(alpha.value, set.len(), from.alive_len()) {
                res.stop_reason = StopReason::LargeAlpha;
                if mode == Mode::EarlyStop {
                    res.discarded = Some(DiscardedSet {
                        members: res.sets.pop().expect("checked above"),
                        alpha,
                        pre_peel_view: res.pre_peel_views.pop().expect("checked above"),
                    });
                } else {
                    res.alphas.push(alpha);
                }
                return Ok(res);
            }
            res.alphas.push(alpha);
        }
        if oversized {
            res.stop_reason = StopReason::OversizedSet;
            return Ok(res);
        }
        let Some(plan) = ensemble else {
            res.stop_reason = if guard { StopReason::Exhausted } else { StopReason::HalfConsumed };
            return Ok(res);
        };
        let Some(g) = whittle(&current, plan.resolve(&current, session)?, cfg) else {
            res.stop_reason = StopReason::Exhausted;
            return Ok(res);
        };
        pending = Some(AlphaPlan::submit(&current, &g.members, session, cfg.alpha_samples)?);
        res.residual_view = current.delete(&g.members)?;
        res.pre_peel_views.push(current);
        res.sets.push(g.members);
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::instance::MatroidInstance;

    fn view(inst: MatroidInstance) -> MatroidView {
        MatroidView::new(Arc::new(inst))
    }

    fn set(n: usize, v: &[usize]) -> ElementSet {
        ElementSet::from_ids(n, v.iter().copied())
    }

    fn never_large() -> DecompConfig {
        DecompConfig {
            large_alpha_c: Ratio::from_integer(1000),
            ..DecompConfig::default()
        }
    }


    #[test]
    fn log_n_examples() {
        assert_eq!(log_n(0), 1);
        assert_eq!(log_n(1), 1);
        assert_eq!(log_n(2), 2);
        assert_eq!(log_n(512), 10);
        assert_eq!(log_n(511), 9);
    }

    #[test]
    fn small_circuit_examples() {
        let g = view(MatroidInstance::graphic(3, vec![(0, 1), (0, 1), (1, 2)]).unwrap());
        let mut s = QuerySession::new(3, 0);
        let r = remove_small_circuits(&g, &mut s, 2).unwrap();
        assert_eq!(r.alive(), &set(3, &[1, 2]));
        assert_eq!(r.rank_greedy(), g.rank_greedy());
        assert_eq!(s.rounds(), 1);

        let looped = view(MatroidInstance::graphic(2, vec![(0, 1), (1, 1)]).unwrap());
        assert_eq!(remove_small_circuits(&looped, &mut s, 1).unwrap().alive(), &set(2, &[0]));

        let u = view(MatroidInstance::uniform(10, 5).unwrap());
        assert_eq!(remove_small_circuits(&u, &mut s, 3).unwrap().alive(), u.alive());

        // all pairs of a rank-1 class: keep only the largest
        let p = view(MatroidInstance::partition(4, vec![vec![0, 1, 2], vec![3]], vec![1, 1]).unwrap());
        let r = remove_small_circuits(&p, &mut s, 2).unwrap();
        assert_eq!(r.alive(), &set(4, &[2, 3]));
        assert_eq!(r.rank_greedy(), 2);
    }

    #[test]
    fn peel_examples() {
        let free = view(MatroidInstance::uniform(4, 4).unwrap());
        assert!(peel(&free, &mut QuerySession::new(4, 0), &DecompConfig::default()).unwrap().is_none());

        let tri = view(MatroidInstance::graphic(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap());
        let (g, rest) = peel(&tri, &mut QuerySession::new(3, 0), &DecompConfig::default()).unwrap().unwrap();
        assert_eq!(g.members, ElementSet::full(3));
        assert!(rest.alive().is_empty());
    }

    #[test]
    fn peels_parts_in_budget_order() {
        // Lowest-id whittling strips the high ids first, so the part that
        // should come out first sits at the top.
        let parts: Vec<Vec<usize>> = vec![(16..24).collect(), (8..16).collect(), (0..8).collect()];
        let p = view(MatroidInstance::partition(24, parts.clone(), vec![1, 2, 3]).unwrap());
        let cfg = DecompConfig {
            epsilon: Ratio::new(2, 5),
            ..never_large()
        };
        for seed in 0..5 {
            let mut s = QuerySession::new(24, seed);
            let r = iterative_peel(&p, &mut s, &cfg).unwrap();
            assert_eq!(r.k(), 3, "{}", r.dump());
            for (got, want) in r.sets.iter().zip(&parts) {
                assert_eq!(got, &ElementSet::from_ids(24, want.iter().copied()));
            }
            assert_eq!(r.stop_reason, StopReason::Exhausted);
            assert_eq!(r.alphas.iter().map(|a| a.value).collect::<Vec<_>>(), vec![2, 3, 4]);
            // three ensembles, the last estimate alone
            assert_eq!(s.rounds(), 4);
        }
    }

    #[test]
    fn default_constants_keep_every_heavy_element() {
        let parts: Vec<Vec<usize>> = vec![(0..8).collect(), (8..16).collect(), (16..24).collect()];
        let p = view(MatroidInstance::partition(24, parts, vec![1, 2, 3]).unwrap());
        let r = iterative_peel(&p, &mut QuerySession::new(24, 0), &never_large()).unwrap();
        assert_eq!(r.k(), 1);
        assert_eq!(r.sets[0].len(), 24);
        assert_eq!(r.stop_reason, StopReason::OversizedSet);
    }

    #[test]
    fn trivial_decompositions() {
        let free = view(MatroidInstance::uniform(6, 6).unwrap());
        let r = iterative_peel(&free, &mut QuerySession::new(6, 0), &DecompConfig::default()).unwrap();
        assert_eq!((r.k(), r.stop_reason), (0, StopReason::Exhausted));

        let empty = free.delete(&ElementSet::full(6)).unwrap();
        let r = early_stop_decomposition(&empty, &mut QuerySession::new(6, 0), &DecompConfig::default()).unwrap();
        assert_eq!((r.k(), r.stop_reason), (0, StopReason::Exhausted));
    }

    #[test]
    fn early_stop_examples() {
        let u = view(MatroidInstance::uniform(64, 16).unwrap());
        let r = early_stop_decomposition(&u, &mut QuerySession::new(64, 0), &DecompConfig::default()).unwrap();
        assert_eq!(r.stop_reason, StopReason::LargeAlpha);
        assert_eq!(r.k(), 0);
        let d = r.discarded.expect("the first set is discarded");
        assert_eq!(&d.members, u.alive());
        assert_eq!(d.alpha.value, 17);

        let parts: Vec<Vec<usize>> = (0..16).map(|i| vec![2 * i, 2 * i + 1]).collect();
        let p = view(MatroidInstance::partition(32, parts, vec![1; 16]).unwrap());
        let r = early_stop_decomposition(&p, &mut QuerySession::new(32, 0), &never_large()).unwrap();
        assert_eq!(r.stop_reason, StopReason::HalfConsumed);
        assert!(r.residual_view.alive_len() * 2 < 32);
        assert!(r.k() >= 1);
    }

    #[test]
    fn dump_format() {
        let parts: Vec<Vec<usize>> = vec![vec![0, 1], vec![2, 3, 4]];
        let p = view(MatroidInstance::partition(5, parts, vec![1, 3]).unwrap());
        let r = iterative_peel(&p, &mut QuerySession::new(5, 0), &never_large()).unwrap();
        assert_eq!(r.dump(), "set 1 alpha=2 size=2 members=0 1\nstop exhausted\n");
    }
}
