//! The classic `O(sqrt n)`-round basis algorithm.
//!
//! Each round splits the alive elements into about `sqrt(alive)` groups of
//! consecutive ids and queries every prefix of every group. If some group
//! is independent it is contracted; otherwise the element at which each
//! group's prefix first turns dependent is spanned by the elements before
//! it, so all of those elements are deleted together.

use crate::element::ElementSet;
use crate::error::{Error, Result};
use crate::session::{QuerySession, Ticket};
use crate::view::MatroidView;

/// What one round decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundOutcome {
    Contracted(ElementSet),
    Deleted(ElementSet),
}

impl RoundOutcome {
    pub fn apply(&self, view: &MatroidView) -> Result<MatroidView> {
        match self {
            RoundOutcome::Contracted(c) => view.contract(c),
            RoundOutcome::Deleted(d) => view.delete_redundant(d),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            RoundOutcome::Contracted(s) | RoundOutcome::Deleted(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `ceil(sqrt(n))`.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// Groups of `ceil(sqrt(alive))` consecutive alive ids.
#[derive(Debug)]
pub struct PrefixGroupPlan {
    pub groups: Vec<ElementSet>,
    tickets: Vec<Ticket<Option<usize>>>,
}

impl PrefixGroupPlan {
    /// Splits the alive set and submits every group's prefixes.
    pub fn submit(view: &MatroidView, session: &mut QuerySession) -> Result<Self> {
        let alive = view.alive().to_vec();
        if alive.is_empty() {
            return Err(Error::Precondition("no alive elements".into()));
        }
        let size = ceil_sqrt(alive.len());
        let mut groups = Vec::new();
        let mut tickets = Vec::new();
        for chunk in alive.chunks(size) {
            groups.push(ElementSet::from_ids(view.universe(), chunk.iter().copied()));
            tickets.push(session.submit_prefix_scan(view, chunk.to_vec())?);
        }
        Ok(PrefixGroupPlan { groups, tickets })
    }

    /// Reads the answers after a flush.
    pub fn resolve(self, view: &MatroidView, session: &mut QuerySession) -> Result<RoundOutcome> {
        let mut deleted = view.empty_set();
        let mut independent = None;
        for (group, ticket) in self.groups.into_iter().zip(self.tickets) {
            match session.redeem(ticket)? {
                None if independent.is_none() => independent = Some(group),
                None => {}
                Some(t) => {
                    let trigger = group.iter().nth(t - 1).expect("trigger lies in its group");
                    deleted.insert(trigger);
                }
            }
        }
        Ok(match independent {
            Some(g) => RoundOutcome::Contracted(g),
            None => RoundOutcome::Deleted(deleted),
        })
    }
}

/// One round: contract the first independent group, or delete every
/// group's first prefix-breaking element.
pub fn kuw_round(view: &MatroidView, session: &mut QuerySession) -> Result<RoundOutcome> {
    let plan = PrefixGroupPlan::submit(view, session)?;
    session.flush();
    plan.resolve(view, session)
}

/// A run of the algorithm that can share rounds with other runs.
#[derive(Debug)]
pub struct KuwRun {
    view: MatroidView,
    basis: ElementSet,
    plan: Option<PrefixGroupPlan>,
}

impl KuwRun {
    pub fn new(view: MatroidView) -> Self {
        let basis = view.empty_set();
        KuwRun {
            view,
            basis,
            plan: None,
        }
    }

    pub fn is_done(&self) -> bool {
        self.view.alive().is_empty()
    }

    /// Submits this run's next round, if any remains.
    pub fn submit(&mut self, session: &mut QuerySession) -> Result<()> {
        if !self.is_done() && self.plan.is_none() {
            self.plan = Some(PrefixGroupPlan::submit(&self.view, session)?);
        }
        Ok(())
    }

    /// Consumes the answers of the last flush.
    pub fn advance(&mut self, session: &mut QuerySession) -> Result<()> {
        if let Some(plan) = self.plan.take() {
            let outcome = plan.resolve(&self.view, session)?;
            self.view = outcome.apply(&self.view)?;
            if let RoundOutcome::Contracted(c) = outcome {
                self.basis.union_with(&c);
            }
        }
        Ok(())
    }

    pub fn view(&self) -> &MatroidView {
        &self.view
    }

    pub fn basis(&self) -> &ElementSet {
        &self.basis
    }

    pub fn into_basis(self) -> ElementSet {
        self.basis
    }
}

/// Drives several runs in lockstep: every round of the merged schedule holds
/// one round of each unfinished run, so the cost is the longest run.
pub fn run_merged(runs: &mut [KuwRun], session: &mut QuerySession) -> Result<()> {
    while runs.iter().any(|r| !r.is_done()) {
        for r in runs.iter_mut() {
            r.submit(session)?;
        }
        session.flush();
        for r in runs.iter_mut() {
            r.advance(session)?;
        }
    }
    Ok(())
}

/// A basis of `view` (relative to its contraction).
pub fn kuw_find_basis(view: &MatroidView, session: &mut QuerySession) -> Result<ElementSet> {
    let mut runs = [KuwRun::new(view.clone())];
    run_merged(&mut runs, session)?;
    let [run] = runs;
    Ok(run.into_basis())
}
