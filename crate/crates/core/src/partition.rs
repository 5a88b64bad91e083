//! Basis finding for partition matroids in roughly `n^{1/3} log n` rounds.
//!
//! The solver only talks to the oracle; it never looks at the hidden parts.
//! Its core step: add elements along a random order until the first
//! dependence. In a partition matroid exactly one part has just overflowed,
//! and two rounds suffice to read off that whole part and its budget. Many
//! random orders run side by side, so one iteration peels every part that
//! is likely to overflow first.

use num_rational::Ratio;

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::instance::CircuitClass;
use crate::session::{CircuitHit, QuerySession, Ticket};
use crate::view::MatroidView;

/// A part read back from the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveredPart {
    pub members: ElementSet,
    pub budget: usize,
}

impl RecoveredPart {
    /// The `budget` lowest-indexed members.
    pub fn kept(&self) -> ElementSet {
        ElementSet::from_ids(self.members.universe(), self.members.iter().take(self.budget))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionConfig {
    /// Parts with budget at most this are removed by exhaustive small-set queries.
    pub threshold: usize,
    /// Random orders per iteration; `None` means `max(64, ceil(4 n ln n))`.
    pub samples: Option<usize>,
    /// Length of the contraction probe, as a fraction of the alive set.
    pub contract_fraction: Ratio<usize>,
    /// `C` in the round cap `C * n^{1/3} * log2 n`.
    pub round_cap_constant: f64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            threshold: 2,
            samples: None,
            contract_fraction: Ratio::new(1, 8),
            round_cap_constant: 2.0,
        }
    }
}

impl PartitionConfig {
    pub fn samples_for(&self, n: usize) -> usize {
        self.samples.unwrap_or_else(|| {
            let nf = n.max(2) as f64;
            64usize.max((4.0 * nf * nf.ln()).ceil() as usize)
        })
    }

    pub fn prefix_len(&self, alive: usize) -> usize {
        (self.contract_fraction * alive).to_integer().max(1)
    }

    /// Round budget the solver is expected to stay within on `n` elements.
    pub fn round_cap(&self, n: usize) -> u64 {
        let nf = n.max(2) as f64;
        (self.round_cap_constant * nf.cbrt() * nf.log2()).ceil() as u64
    }
}

/// Counters from one solve.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartitionStats {
    /// While-iterations that ended by recovering parts.
    pub iterations: usize,
    /// Calls of the multi-part routine.
    pub calls: usize,
    /// Calls that ended by contracting an independent prefix.
    pub early_contractions: usize,
    /// Parts recovered by sampling, in order, with the iteration they came from.
    pub recovered: Vec<(usize, RecoveredPart)>,
}

fn circuit_to_part(view: &MatroidView, hit: &CircuitHit, candidates: &[ElementId], dependent: &[bool]) -> RecoveredPart {
    let mut members = ElementSet::from_ids(view.universe(), hit.circuit.iter().copied());
    for (&y, &dep) in candidates.iter().zip(dependent) {
        if dep {
            members.insert(y);
        }
    }
    RecoveredPart {
        members,
        budget: hit.circuit.len() - 1,
    }
}

/// Second round: which candidates close a circuit with `C - trigger`.
fn submit_membership(
    view: &MatroidView,
    session: &mut QuerySession,
    hit: &CircuitHit,
    trigger: ElementId,
    candidates: Vec<ElementId>,
) -> Result<Ticket<Vec<bool>>> {
    let independent: Vec<ElementId> = hit.circuit.iter().copied().filter(|&e| e != trigger).collect();
    session.submit_span_members(view, independent, candidates)
}

/// Recovers the part holding the first dependence along `pi`, in two
/// rounds. `None` if the view is independent.
pub fn recover_single_part(
    view: &MatroidView,
    pi: &[ElementId],
    session: &mut QuerySession,
) -> Result<Option<RecoveredPart>> {
    if pi.len() != view.alive_len() {
        return Err(Error::InvalidParams(format!(
            "order has {} elements but the view has {} alive",
            pi.len(),
            view.alive_len()
        )));
    }
    let t = session.submit_first_circuit(view, pi.to_vec())?;
    session.flush();
    let Some(hit) = session.redeem(t)? else {
        return Ok(None);
    };
    let later = pi[hit.trigger_index..].to_vec();
    let t = submit_membership(view, session, &hit, pi[hit.trigger_index - 1], later.clone())?;
    session.flush();
    let dependent = session.redeem(t)?;
    Ok(Some(circuit_to_part(view, &hit, &later, &dependent)))
}

/// `size`-subset `set` holds a circuit from `classes`.
fn table_dependent(classes: &[CircuitClass], set: &ElementSet) -> bool {
    classes.iter().any(|c| set.intersection_count(&c.ground) >= c.size)
}

struct SmallPartsPlan {
    ticket: Ticket<Vec<CircuitClass>>,
}

impl SmallPartsPlan {
    fn submit(view: &MatroidView, session: &mut QuerySession, threshold: usize) -> Result<Self> {
        Ok(SmallPartsPlan {
            ticket: session.submit_small_circuits(view, threshold + 1)?,
        })
    }

    /// Contracts the kept elements of every small part and deletes the rest.
    fn resolve(self, view: &MatroidView, session: &mut QuerySession) -> Result<(MatroidView, ElementSet)> {
        let mut classes = session.redeem(self.ticket)?;
        // Loops close a circuit with any set, so they must leave first.
        classes.sort_by_key(|c| c.size);
        let mut removed = view.empty_set();
        let mut kept = view.empty_set();
        for class in &classes {
            if !class.ground.is_disjoint(&removed) {
                continue;
            }
            let circuit = class.first_circuit();
            let independent: Vec<ElementId> = circuit.iter().take(class.size - 1).collect();
            let mut part = circuit.clone();
            let mut probe = ElementSet::from_ids(view.universe(), independent.iter().copied());
            for y in view.alive().iter() {
                if part.contains(y) || removed.contains(y) {
                    continue;
                }
                let fresh = probe.insert(y);
                if table_dependent(&classes, &probe) {
                    part.insert(y);
                }
                if fresh {
                    probe.remove(y);
                }
            }
            let recovered = RecoveredPart {
                members: part,
                budget: independent.len(),
            };
            kept.union_with(&recovered.kept());
            removed.union_with(&recovered.members);
        }
        let next = view.contract(&kept)?.delete_redundant(&removed.difference(&kept))?;
        Ok((next, kept))
    }
}

/// Removes every part of budget at most `threshold` in one round. Returns
/// the reduced view and the elements kept from the removed parts, which
/// the reduced view has contracted.
pub fn remove_small_parts(
    view: &MatroidView,
    session: &mut QuerySession,
    threshold: usize,
) -> Result<(MatroidView, ElementSet)> {
    let plan = SmallPartsPlan::submit(view, session, threshold)?;
    session.flush();
    plan.resolve(view, session)
}

/// Result of one multi-part call.
#[derive(Debug, Clone)]
pub struct MultiPartOutcome {
    pub view: MatroidView,
    /// Elements added to the basis by this call (all contracted in `view`).
    pub basis: ElementSet,
    /// The call ended by contracting an independent prefix.
    pub contracted_early: bool,
}

/// Removes small parts, then repeatedly recovers the parts hit first by
/// many random orders, until the view is exhausted or a random prefix
/// turns out independent (which is then contracted).
pub fn recover_multiple_parts(
    view: &MatroidView,
    session: &mut QuerySession,
    cfg: &PartitionConfig,
) -> Result<MultiPartOutcome> {
    let mut stats = PartitionStats::default();
    recover_multiple_parts_inner(view, session, cfg, &mut stats)
}

fn recover_multiple_parts_inner(
    view: &MatroidView,
    session: &mut QuerySession,
    cfg: &PartitionConfig,
    stats: &mut PartitionStats,
) -> Result<MultiPartOutcome> {
    stats.calls += 1;
    let start = view.contracted().clone();
    let finish = |view: MatroidView, early: bool| MultiPartOutcome {
        basis: view.contracted().difference(&start),
        view,
        contracted_early: early,
    };
    let mut view = view.clone();
    let mut small = Some(());
    while !view.alive().is_empty() {
        // The small-part query shares its round with the first batch of
        // probes. Parts are independent components, so the probes stay
        // valid once the removed parts are filtered out of them.
        let plan = match small.take() {
            Some(()) => Some(SmallPartsPlan::submit(&view, session, cfg.threshold)?),
            None => None,
        };
        let alive = view.alive_len();
        let prefix_len = cfg.prefix_len(alive);
        let whole = session.submit_independent(&view, view.alive())?;
        let mut probes = Vec::new();
        for _ in 0..cfg.samples_for(alive) {
            let (seed, order) = session.permutation(view.alive());
            let circuit = session.submit_first_circuit_seeded(&view, seed)?;
            probes.push((order, circuit));
        }
        session.flush();

        let mut removed = view.empty_set();
        if let Some(plan) = plan {
            let (next, _) = plan.resolve(&view, session)?;
            removed = view.alive().difference(next.alive());
            view = next;
        }
        if session.redeem(whole)? {
            let all = view.alive().clone();
            return Ok(finish(view.contract(&all)?, false));
        }
        // The prefix queries behind each first circuit already answer
        // whether the first `prefix_len` elements are independent.
        let mut escape = None;
        let mut hits = Vec::with_capacity(probes.len());
        for (order, circuit) in probes {
            let hit = session.redeem(circuit)?.expect("a dependent view has a first circuit");
            if escape.is_none() && hit.trigger_index > prefix_len {
                escape = Some(ElementSet::from_ids(view.universe(), order[..prefix_len].iter().copied()));
            }
            hits.push((order, hit));
        }
        if view.alive().is_empty() {
            break;
        }
        if let Some(prefix) = escape {
            stats.early_contractions += 1;
            return Ok(finish(view.contract(&prefix.difference(&removed))?, true));
        }
        hits.retain(|(_, hit)| hit.circuit.iter().all(|&e| !removed.contains(e)));
        if hits.is_empty() {
            continue;
        }

        let mut asked = Vec::with_capacity(hits.len());
        for (order, hit) in &hits {
            let t = hit.trigger_index;
            let later: Vec<ElementId> = order[t..].iter().copied().filter(|&e| !removed.contains(e)).collect();
            let ticket = submit_membership(&view, session, hit, order[t - 1], later.clone())?;
            asked.push((hit, later, ticket));
        }
        session.flush();
        stats.iterations += 1;
        let mut parts: Vec<RecoveredPart> = Vec::new();
        let mut covered = view.empty_set();
        for (hit, later, ticket) in asked {
            let dependent = session.redeem(ticket)?;
            let part = circuit_to_part(&view, hit, &later, &dependent);
            if parts.iter().any(|p| p.members == part.members) || !part.members.is_disjoint(&covered) {
                continue;
            }
            covered.union_with(&part.members);
            parts.push(part);
        }
        let mut kept = view.empty_set();
        for p in &parts {
            kept.union_with(&p.kept());
        }
        view = view.contract(&kept)?.delete_redundant(&covered.difference(&kept))?;
        stats
            .recovered
            .extend(parts.into_iter().map(|p| (stats.iterations, p)));
    }
    Ok(finish(view, false))
}

/// A basis of a partition matroid view, found through the oracle only.
pub fn partition_find_basis(view: &MatroidView, session: &mut QuerySession, cfg: &PartitionConfig) -> Result<ElementSet> {
    partition_find_basis_with_stats(view, session, cfg).map(|(b, _)| b)
}

pub fn partition_find_basis_with_stats(
    view: &MatroidView,
    session: &mut QuerySession,
    cfg: &PartitionConfig,
) -> Result<(ElementSet, PartitionStats)> {
    let mut stats = PartitionStats::default();
    let mut current = view.clone();
    while !current.alive().is_empty() {
        current = recover_multiple_parts_inner(&current, session, cfg, &mut stats)?.view;
    }
    Ok((current.contracted().difference(view.contracted()), stats))
}
