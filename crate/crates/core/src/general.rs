//! The general basis algorithm.
//!
//! Each outer iteration clears small circuits, runs the early-stop
//! decomposition and then makes progress one of five ways: contract a long
//! random prefix (when some peeled set has a large `alpha`), or pick among
//! four subroutines by their predicted progress per round. If the chosen
//! subroutine comes back empty, one round of the baseline algorithm runs
//! instead, so every iteration shrinks the alive set.

use std::fmt;

use num_rational::Ratio;

use crate::baseline::{kuw_round, run_merged, KuwRun, RoundOutcome};
use crate::decomposition::{
    early_stop_decomposition, log_n, DecompConfig, DecompositionResult, SmallCircuitPlan, StopReason,
};
use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::session::{QuerySession, SpanHit, Ticket};
use crate::view::MatroidView;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralConfig {
    pub decomp: DecompConfig,
    /// Random prefixes tried by each contraction step.
    pub contract_samples: usize,
    /// `t = ceil(t_mult * log n * alpha)` in redundant-element recovery.
    pub t_mult: Ratio<u64>,
    /// Redundant-element recovery needs `alpha <= |S| / (small_alpha_c * log n)`.
    pub small_alpha_c: Ratio<u64>,
}

impl Default for GeneralConfig {
    fn default() -> Self {
        GeneralConfig {
            decomp: DecompConfig::default(),
            contract_samples: 64,
            t_mult: Ratio::from_integer(1),
            small_alpha_c: Ratio::from_integer(1),
        }
    }
}

/// Tries `cfg.contract_samples` random prefixes of length
/// `ceil(alpha * alive / (10 |s|))` of `view_before_peel` in one round and
/// returns the first independent one. Empty means every prefix was
/// dependent.
pub fn contract_large_alpha(
    view_before_peel: &MatroidView,
    s: &ElementSet,
    alpha: usize,
    session: &mut QuerySession,
    cfg: &GeneralConfig,
) -> Result<ElementSet> {
    let alive = view_before_peel.alive_len();
    if s.is_empty() || alive == 0 {
        return Ok(view_before_peel.empty_set());
    }
    let len = (alpha * alive).div_ceil(10 * s.len()).min(alive);
    let mut tickets = Vec::with_capacity(cfg.contract_samples);
    for _ in 0..cfg.contract_samples {
        let (_, order) = session.permutation(view_before_peel.alive());
        let prefix = ElementSet::from_ids(view_before_peel.universe(), order[..len].iter().copied());
        tickets.push((session.submit_independent(view_before_peel, &prefix)?, prefix));
    }
    session.flush();
    let mut found = None;
    for (t, prefix) in tickets {
        if session.redeem(t)? && found.is_none() {
            found = Some(prefix);
        }
    }
    Ok(found.unwrap_or_else(|| view_before_peel.empty_set()))
}

/// Submitted redundant-element probes for one set.
#[derive(Debug)]
pub struct RedundantPlan {
    samples: Vec<(ElementSet, Vec<ElementId>, Ticket<SpanHit>)>,
}

impl RedundantPlan {
    /// `ell = floor(|s| / 4t)` random `t`-prefixes `A_i` of `s`, each probed
    /// against every alive element outside it.
    pub fn submit(
        view: &MatroidView,
        s: &ElementSet,
        alpha: usize,
        session: &mut QuerySession,
        cfg: &GeneralConfig,
    ) -> Result<Self> {
        view.check_subset(s)?;
        let log = u64::from(log_n(view.alive_len()));
        let c = cfg.small_alpha_c;
        if (alpha as u128) * u128::from(log) * u128::from(*c.numer()) > (s.len() as u128) * u128::from(*c.denom()) {
            return Err(Error::Precondition(format!(
                "alpha {alpha} is too large for a set of {} elements",
                s.len()
            )));
        }
        let t = (cfg.t_mult * (log * alpha as u64)).ceil().to_integer() as usize;
        let ell = if t == 0 { 0 } else { s.len() / (4 * t) };
        if ell == 0 {
            return Err(Error::Precondition(format!(
                "no samples: |S| = {} is below 4t = {}",
                s.len(),
                4 * t
            )));
        }
        let mut samples = Vec::with_capacity(ell);
        for _ in 0..ell {
            let (_, order) = session.permutation(s);
            let prefix = order[..t.min(order.len())].to_vec();
            let a = ElementSet::from_ids(view.universe(), prefix.iter().copied());
            let candidates = view.alive().difference(&a).to_vec();
            let ticket = session.submit_prefix_span(view, prefix, candidates.clone())?;
            samples.push((a, candidates, ticket));
        }
        Ok(RedundantPlan { samples })
    }

    /// Adds this plan's `A_i` and `B_i` to the running unions.
    pub fn resolve(self, session: &mut QuerySession, a_union: &mut ElementSet, b_union: &mut ElementSet) -> Result<()> {
        for (a, candidates, ticket) in self.samples {
            let hit = session.redeem(ticket)?;
            a_union.union_with(&a);
            for (x, spanned) in candidates.into_iter().zip(hit.spanned) {
                if spanned {
                    b_union.insert(x);
                }
            }
        }
        Ok(())
    }
}

/// One round: elements that close a circuit with an independent prefix of
/// a random `t`-subset of `s`, minus every sampled subset. Everything
/// returned lies in the span of the sampled subsets, so deleting it keeps
/// the rank.
pub fn recover_redundant_elements(
    view: &MatroidView,
    s: &ElementSet,
    alpha: usize,
    session: &mut QuerySession,
    cfg: &GeneralConfig,
) -> Result<ElementSet> {
    let plan = RedundantPlan::submit(view, s, alpha, session, cfg)?;
    session.flush();
    let mut a = view.empty_set();
    let mut b = view.empty_set();
    plan.resolve(session, &mut a, &mut b)?;
    Ok(b.difference(&a))
}

/// Redundant-element recovery on several sets in one shared round. Each set
/// is probed in the view it was peeled from; sets failing the preconditions
/// are skipped. `None` if every set was skipped.
pub fn recover_redundant_merged(
    items: &[(&MatroidView, &ElementSet, usize)],
    session: &mut QuerySession,
    cfg: &GeneralConfig,
) -> Result<Option<ElementSet>> {
    let mut plans = Vec::new();
    for &(view, s, alpha) in items {
        match RedundantPlan::submit(view, s, alpha, session, cfg) {
            Ok(p) => plans.push(p),
            Err(Error::Precondition(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let Some(&(first, ..)) = items.first() else {
        return Ok(None);
    };
    if plans.is_empty() {
        return Ok(None);
    }
    session.flush();
    let mut a = first.empty_set();
    let mut b = first.empty_set();
    for p in plans {
        p.resolve(session, &mut a, &mut b)?;
    }
    Ok(Some(b.difference(&a)))
}

/// Runs the baseline on every bucketed set at once (rounds are the longest
/// run) and returns each set minus the basis found in it.
pub fn explicit_solve_bucket(view: &MatroidView, bucket: &[ElementSet], session: &mut QuerySession) -> Result<ElementSet> {
    let mut runs = bucket
        .iter()
        .map(|t| Ok(KuwRun::new(view.restrict(t)?)))
        .collect::<Result<Vec<_>>>()?;
    run_merged(&mut runs, session)?;
    let mut out = view.empty_set();
    for (t, run) in bucket.iter().zip(runs) {
        out.union_with(&t.difference(run.basis()));
    }
    Ok(out)
}

/// Summary statistics of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressParams {
    pub tau: usize,
    pub beta: Ratio<u64>,
    pub gamma: usize,
    /// Indices into the decomposition's sets with `tau <= |S_i| < 2 tau`.
    pub bucket: Vec<usize>,
    /// Index maximizing `alpha_i / |S_i|` (lowest on ties).
    pub i_star: usize,
}

/// Parameters from set sizes and `alpha` estimates.
pub fn progress_params_from(sizes: &[usize], alphas: &[usize]) -> Result<ProgressParams> {
    if sizes.is_empty() || sizes.len() != alphas.len() || sizes.contains(&0) {
        return Err(Error::Precondition(
            "progress parameters need a non-empty decomposition".into(),
        ));
    }
    let level = |s: usize| s.ilog2();
    let top = sizes.iter().map(|&s| level(s)).max().expect("non-empty");
    let (best_level, gamma) = (0..=top)
        .map(|l| (l, sizes.iter().filter(|&&s| level(s) == l).count()))
        .fold((0, 0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let bucket = (0..sizes.len()).filter(|&i| level(sizes[i]) == best_level).collect();
    let ratio = |i: usize| Ratio::new(alphas[i] as u64, sizes[i] as u64);
    let i_star = (0..sizes.len())
        .fold(0, |best, i| if ratio(i) > ratio(best) { i } else { best });
    let tau = 1usize << best_level;
    Ok(ProgressParams {
        tau,
        beta: ratio(i_star) * tau as u64,
        gamma,
        bucket,
        i_star,
    })
}

pub fn compute_progress_params(d: &DecompositionResult) -> Result<ProgressParams> {
    let sizes: Vec<usize> = d.sets.iter().map(ElementSet::len).collect();
    let alphas: Vec<usize> = d.alphas.iter().map(|a| a.value).collect();
    progress_params_from(&sizes, &alphas)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subroutine {
    ContractBetaTau,
    ExplicitSolve,
    RedundantBucket,
    RedundantAll,
}

impl Subroutine {
    pub const ALL: [Subroutine; 4] = [
        Subroutine::ContractBetaTau,
        Subroutine::ExplicitSolve,
        Subroutine::RedundantBucket,
        Subroutine::RedundantAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subroutine::ContractBetaTau => "contract_beta_tau",
            Subroutine::ExplicitSolve => "explicit_solve",
            Subroutine::RedundantBucket => "redundant_bucket",
            Subroutine::RedundantAll => "redundant_all",
        }
    }

    /// Predicted (progress, rounds), polylog factors dropped.
    pub fn predict(self, n: usize, p: &ProgressParams) -> (f64, f64) {
        let n = n as f64;
        let tau = p.tau as f64;
        let gamma = p.gamma as f64;
        let beta = *p.beta.numer() as f64 / *p.beta.denom() as f64;
        let quad = tau * tau / (beta * beta);
        match self {
            Subroutine::ContractBetaTau => (n * beta / tau, gamma),
            Subroutine::ExplicitSolve => (gamma * tau, gamma + tau.sqrt()),
            Subroutine::RedundantBucket => (gamma * tau.min(quad), gamma),
            Subroutine::RedundantAll => (n.min(quad), gamma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubroutineChoice {
    pub which: Subroutine,
    pub predicted_progress: f64,
    pub predicted_rounds: f64,
}

/// The subroutine with the best predicted progress per round; the first in
/// table order on ties.
pub fn choose_subroutine(n: usize, p: &ProgressParams) -> SubroutineChoice {
    let mut best: Option<(f64, SubroutineChoice)> = None;
    for which in Subroutine::ALL {
        let (progress, rounds) = which.predict(n, p);
        let ratio = progress / rounds;
        if best.as_ref().map_or(true, |(r, _)| ratio > *r) {
            best = Some((
                ratio,
                SubroutineChoice {
                    which,
                    predicted_progress: progress,
                    predicted_rounds: rounds,
                },
            ));
        }
    }
    best.expect("four candidates").1
}

/// One outer iteration of the general solver.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    pub iter: usize,
    /// Alive elements at the start of the iteration.
    pub alive: usize,
    pub action: String,
    /// Elements contracted or deleted, small-circuit deletions included.
    pub progress: usize,
    pub rounds: u64,
    /// What the selector expected, when it ran.
    pub predicted_progress: Option<f64>,
    pub fell_back: bool,
}

impl fmt::Display for IterationLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iter={} n={} action={} progress={} rounds={}",
            self.iter, self.alive, self.action, self.progress, self.rounds
        )
    }
}

#[derive(Debug, Clone)]
pub struct GeneralOutcome {
    pub basis: ElementSet,
    pub log: Vec<IterationLog>,
}

impl GeneralOutcome {
    pub fn run_log(&self) -> String {
        self.log.iter().map(|l| format!("{l}\n")).collect()
    }
}

pub fn general_find_basis(view: &MatroidView, session: &mut QuerySession, cfg: &GeneralConfig) -> Result<ElementSet> {
    general_find_basis_with_log(view, session, cfg).map(|o| o.basis)
}

enum Step {
    Contract(ElementSet),
    Delete(ElementSet),
}

pub fn general_find_basis_with_log(
    view: &MatroidView,
    session: &mut QuerySession,
    cfg: &GeneralConfig,
) -> Result<GeneralOutcome> {
    let mut current = view.clone();
    let mut log = Vec::new();
    while !current.alive().is_empty() {
        let start_rounds = session.rounds();
        let start_alive = current.alive_len();
        let mut entry = IterationLog {
            iter: log.len() + 1,
            alive: start_alive,
            action: String::new(),
            progress: 0,
            rounds: 0,
            predicted_progress: None,
            fell_back: false,
        };

        let small = SmallCircuitPlan::submit(&current, session, cfg.decomp.small_circuit_threshold)?;
        let whole = session.submit_independent(&current, current.alive())?;
        session.flush();
        let doomed = small.resolve(&current, session)?;
        if session.redeem(whole)? {
            let all = current.alive().clone();
            current = current.contract(&all)?;
            entry.action = "contract_all".into();
        } else {
            current = current.delete_redundant(&doomed)?;
            let step = if current.alive().is_empty() {
                entry.action = "small_circuits".into();
                None
            } else {
                let d = early_stop_decomposition(&current, session, &cfg.decomp)?;
                progress_step(&current, &d, session, cfg, &mut entry)?
            };
            let moved = match step {
                Some(Step::Contract(c)) if !c.is_empty() => {
                    current = current.contract(&c)?;
                    true
                }
                Some(Step::Delete(d)) if !d.is_empty() => {
                    current = current.delete_redundant(&d)?;
                    true
                }
                None => true,
                _ => false,
            };
            if !moved && !current.alive().is_empty() {
                entry.fell_back = true;
                entry.action.push_str("+kuw_fallback");
                current = match kuw_round(&current, session)? {
                    RoundOutcome::Contracted(c) => current.contract(&c)?,
                    RoundOutcome::Deleted(d) => current.delete_redundant(&d)?,
                };
            }
        }
        entry.progress = start_alive - current.alive_len();
        entry.rounds = session.rounds() - start_rounds;
        log.push(entry);
    }
    Ok(GeneralOutcome {
        basis: current.contracted().difference(view.contracted()),
        log,
    })
}

/// Picks and runs the progress step for one decomposition.
fn progress_step(
    current: &MatroidView,
    d: &DecompositionResult,
    session: &mut QuerySession,
    cfg: &GeneralConfig,
    entry: &mut IterationLog,
) -> Result<Option<Step>> {
    if d.stop_reason == StopReason::LargeAlpha {
        let discarded = d.discarded.as_ref().expect("large alpha keeps the last set");
        entry.action = "contract_large_alpha".into();
        let c = contract_large_alpha(
            &discarded.pre_peel_view,
            &discarded.members,
            discarded.alpha.value,
            session,
            cfg,
        )?;
        return Ok(Some(Step::Contract(c)));
    }
    if d.sets.is_empty() {
        // No sampled order met a circuit, so the alive set is independent.
        entry.action = "contract_all".into();
        return Ok(Some(Step::Contract(current.alive().clone())));
    }
    let params = compute_progress_params(d)?;
    let choice = choose_subroutine(current.alive_len(), &params);
    entry.action = choice.which.name().into();
    entry.predicted_progress = Some(choice.predicted_progress);
    let with_alpha = |i: usize| (&d.pre_peel_views[i], &d.sets[i], d.alphas[i].value);
    Ok(Some(match choice.which {
        Subroutine::ContractBetaTau => {
            let i = params.i_star;
            Step::Contract(contract_large_alpha(
                &d.pre_peel_views[i],
                &d.sets[i],
                d.alphas[i].value,
                session,
                cfg,
            )?)
        }
        Subroutine::ExplicitSolve => {
            let bucket: Vec<ElementSet> = params.bucket.iter().map(|&i| d.sets[i].clone()).collect();
            Step::Delete(explicit_solve_bucket(current, &bucket, session)?)
        }
        Subroutine::RedundantBucket => {
            let items: Vec<_> = params.bucket.iter().map(|&i| with_alpha(i)).collect();
            Step::Delete(recover_redundant_merged(&items, session, cfg)?.unwrap_or_else(|| current.empty_set()))
        }
        Subroutine::RedundantAll => {
            let items: Vec<_> = (0..d.sets.len()).map(with_alpha).collect();
            Step::Delete(recover_redundant_merged(&items, session, cfg)?.unwrap_or_else(|| current.empty_set()))
        }
    }))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::instance::MatroidInstance;

    fn view(inst: MatroidInstance) -> MatroidView {
        MatroidView::new(Arc::new(inst))
    }

    fn set(n: usize, v: impl IntoIterator<Item = usize>) -> ElementSet {
        ElementSet::from_ids(n, v)
    }

    /// One budget-1 part on `0..part`, free elements after it.
    fn part_in_free(part: usize, free: usize) -> MatroidView {
        let n = part + free;
        let mut parts = vec![(0..part).collect::<Vec<_>>()];
        let mut budgets = vec![1];
        for e in part..n {
            parts.push(vec![e]);
            budgets.push(1);
        }
        view(MatroidInstance::partition(n, parts, budgets).unwrap())
    }

    #[test]
    fn params_examples() {
        let p = progress_params_from(&[8, 9, 15, 40], &[3, 4, 5, 6]).unwrap();
        assert_eq!((p.tau, p.gamma, p.i_star), (8, 3, 1));
        assert_eq!(p.bucket, vec![0, 1, 2]);
        assert_eq!(p.beta, Ratio::new(32, 9));

        let p = progress_params_from(&[10], &[2]).unwrap();
        assert_eq!((p.tau, p.gamma), (8, 1));
        assert_eq!(p.beta, Ratio::new(8, 5));

        let p = progress_params_from(&[16, 16, 16, 16], &[2, 3, 2, 3]).unwrap();
        assert_eq!((p.gamma, p.i_star), (4, 1));

        assert!(progress_params_from(&[], &[]).is_err());
    }

    #[test]
    fn selector_examples() {
        let p = ProgressParams {
            tau: 8,
            beta: Ratio::from_integer(3),
            gamma: 3,
            bucket: vec![0, 1, 2],
            i_star: 0,
        };
        let c = choose_subroutine(4096, &p);
        assert_eq!(c.which, Subroutine::ContractBetaTau);
        assert_eq!(c.predicted_progress, 512.0 * 3.0);

        let saturated = ProgressParams {
            tau: 16,
            beta: Ratio::from_integer(16),
            gamma: 2,
            bucket: vec![0, 1],
            i_star: 0,
        };
        assert_ne!(choose_subroutine(64, &saturated).which, Subroutine::RedundantBucket);

        let wide = ProgressParams {
            tau: 2048,
            beta: Ratio::from_integer(1),
            gamma: 1,
            bucket: vec![0],
            i_star: 0,
        };
        let which = choose_subroutine(4096, &wide).which;
        assert!(matches!(which, Subroutine::RedundantBucket | Subroutine::RedundantAll | Subroutine::ExplicitSolve));
    }

    #[test]
    fn contraction_examples() {
        let u = view(MatroidInstance::uniform(40, 20).unwrap());
        let mut s = QuerySession::new(40, 0);
        let c = contract_large_alpha(&u, u.alive(), 20, &mut s, &GeneralConfig::default()).unwrap();
        assert_eq!(c.len(), 2);
        assert!(u.is_independent(&c).unwrap());
        assert_eq!(s.rounds(), 1);

        let zero = view(MatroidInstance::uniform(10, 0).unwrap());
        let c = contract_large_alpha(&zero, zero.alive(), 1, &mut s, &GeneralConfig::default()).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn redundant_recovery_examples() {
        let v = part_in_free(16, 16);
        let part = set(32, 0..16);
        let mut s = QuerySession::new(32, 4);
        let cfg = GeneralConfig {
            t_mult: Ratio::new(1, 4),
            ..GeneralConfig::default()
        };
        // t = ceil(6 * 2 / 4) = 3, ell = 1
        let d = recover_redundant_elements(&v, &part, 2, &mut s, &cfg).unwrap();
        assert_eq!(d.len(), 13);
        assert!(d.is_subset(&part));
        assert_eq!(v.delete(&d).unwrap().rank_greedy(), v.rank_greedy());
        assert_eq!(s.rounds(), 1);

        let u = view(MatroidInstance::uniform(32, 8).unwrap());
        let err = recover_redundant_elements(&u, u.alive(), 9, &mut s, &GeneralConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));

        // a 4-cycle among 12 coloops, t = 4: at most the one cycle edge
        // left outside the sample can be recovered
        let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
        edges.extend((4..16).map(|v| (0, v)));
        let g = view(MatroidInstance::graphic(16, edges).unwrap());
        let cfg = GeneralConfig {
            t_mult: Ratio::new(4, 5),
            ..GeneralConfig::default()
        };
        for seed in 0..20 {
            let mut s = QuerySession::new(16, seed);
            let d = recover_redundant_elements(&g, g.alive(), 1, &mut s, &cfg).unwrap();
            assert!(d.len() <= 1 && d.is_subset(&set(16, 0..4)));
            assert_eq!(g.delete(&d).unwrap().rank_greedy(), 15);
        }
    }

    #[test]
    fn explicit_solve_examples() {
        let parts: Vec<Vec<usize>> = (0..3).map(|i| (16 * i..16 * i + 16).collect()).collect();
        let v = view(MatroidInstance::partition(48, parts.clone(), vec![2, 2, 2]).unwrap());
        let bucket: Vec<ElementSet> = parts.iter().map(|p| set(48, p.iter().copied())).collect();
        let mut s = QuerySession::new(48, 0);
        let d = explicit_solve_bucket(&v, &bucket, &mut s).unwrap();
        assert_eq!(d.len(), 42);
        assert_eq!(v.delete(&d).unwrap().rank_greedy(), 6);

        assert!(explicit_solve_bucket(&v, &[], &mut s).unwrap().is_empty());

        let zero = view(MatroidInstance::uniform(8, 0).unwrap());
        let d = explicit_solve_bucket(&zero, &[ElementSet::full(8)], &mut s).unwrap();
        assert_eq!(d.len(), 8);
    }

    #[test]
    fn solver_examples() {
        let cfg = GeneralConfig::default();
        let free = view(MatroidInstance::uniform(20, 20).unwrap());
        let mut s = QuerySession::new(20, 0);
        let out = general_find_basis_with_log(&free, &mut s, &cfg).unwrap();
        assert_eq!(out.basis.len(), 20);
        assert!(s.rounds() <= 3);

        let zero = view(MatroidInstance::uniform(20, 0).unwrap());
        let mut s = QuerySession::new(20, 0);
        assert!(general_find_basis(&zero, &mut s, &cfg).unwrap().is_empty());
        assert_eq!(s.rounds(), 1);

        for seed in 0..3 {
            let v = part_in_free(24, 24);
            let mut s = QuerySession::new(48, seed);
            let out = general_find_basis_with_log(&v, &mut s, &cfg).unwrap();
            assert!(v.is_basis(&out.basis).unwrap(), "{}", out.run_log());
            assert!(out.log.iter().all(|l| l.progress > 0));
        }
    }

    #[test]
    fn log_line_format() {
        let l = IterationLog {
            iter: 2,
            alive: 30,
            action: "redundant_all".into(),
            progress: 7,
            rounds: 4,
            predicted_progress: None,
            fell_back: false,
        };
        assert_eq!(l.to_string(), "iter=2 n=30 action=redundant_all progress=7 rounds=4");
    }
}
