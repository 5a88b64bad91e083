//! Batched oracle access with adaptive-round accounting.
//!
//! Algorithms never see an answer in the round they ask for it. They submit
//! probes and get a [`Ticket`] back; [`QuerySession::flush`] evaluates the
//! whole pending batch at once and counts one round; only then can tickets
//! be redeemed. Logically parallel subroutines share a round simply by
//! submitting before the same flush.
//!
//! A probe stands for a fixed family of independence queries that the
//! algorithms issue together (all prefixes of an order, every set of size at
//! most `k`, ...). The ledger is charged the size of that family, while the
//! answer is computed directly by the instance's incremental structures.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io;
use std::marker::PhantomData;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::instance::{binomial, CircuitClass, Scratch};
use crate::view::MatroidView;

/// One flushed batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerRow {
    pub round: u64,
    pub batch_size: u64,
    pub cumulative_queries: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundLedger {
    rows: Vec<LedgerRow>,
}

impl RoundLedger {
    pub fn rounds(&self) -> u64 {
        self.rows.len() as u64
    }

    pub fn total_queries(&self) -> u64 {
        self.rows.last().map_or(0, |r| r.cumulative_queries)
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    fn record(&mut self, batch_size: u64) {
        let cumulative = self.total_queries().saturating_add(batch_size);
        self.rows.push(LedgerRow {
            round: self.rounds() + 1,
            batch_size,
            cumulative_queries: cumulative,
        });
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,batch_size,cumulative_queries\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.round, r.batch_size, r.cumulative_queries);
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// The first circuit met while adding elements in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitHit {
    /// 1-based position of the element that closed the circuit.
    pub trigger_index: usize,
    /// The circuit, trigger element included, in ascending id order.
    pub circuit: Vec<ElementId>,
}

/// Answer to a prefix-span probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanHit {
    /// Length of the longest independent prefix.
    pub independent_prefix: usize,
    /// Per candidate: some independent non-empty prefix plus the candidate
    /// is dependent.
    pub spanned: Vec<bool>,
}

/// An element order: explicit, or a seeded permutation of the view's alive set.
#[derive(Debug, Clone)]
enum Order {
    Explicit(Vec<ElementId>),
    Seeded(u64),
}

impl Order {
    fn len(&self, view: &MatroidView) -> u64 {
        match self {
            Order::Explicit(v) => v.len() as u64,
            Order::Seeded(_) => view.alive_len() as u64,
        }
    }

    fn materialize(&self, view: &MatroidView) -> Cow<'_, [ElementId]> {
        match self {
            Order::Explicit(v) => Cow::Borrowed(v),
            Order::Seeded(seed) => Cow::Owned(permutation_from_seed(*seed, view.alive())),
        }
    }
}

#[derive(Debug, Clone)]
enum Probe {
    Independent(Vec<ElementId>),
    PrefixScan(Order),
    FirstCircuit(Order),
    SpanMembers {
        base: Vec<ElementId>,
        candidates: Vec<ElementId>,
    },
    PrefixSpan {
        prefix: Vec<ElementId>,
        candidates: Vec<ElementId>,
    },
    SmallCircuits(usize),
}

impl Probe {
    /// Number of independence queries the probe stands for.
    fn nominal_queries(&self, view: &MatroidView) -> u64 {
        let n = |v: &Vec<ElementId>| v.len() as u64;
        match self {
            Probe::Independent(_) => 1,
            Probe::PrefixScan(order) => order.len(view),
            // every prefix, plus `S - x + y` for each pair `x` before `y`
            Probe::FirstCircuit(order) => {
                let len = order.len(view);
                len.saturating_add(binomial(len, 2))
            }
            Probe::SpanMembers { candidates, .. } => 1 + n(candidates),
            Probe::PrefixSpan { prefix, candidates } => {
                n(prefix).saturating_mul(1 + n(candidates))
            }
            Probe::SmallCircuits(k) => {
                let alive = view.alive_len() as u64;
                (1..=*k as u64).fold(0u64, |acc, i| acc.saturating_add(binomial(alive, i)))
            }
        }
    }
}

#[doc(hidden)]
#[derive(Debug, Clone)]
pub enum Answer {
    Bool(bool),
    Trigger(Option<usize>),
    Circuit(Option<CircuitHit>),
    Flags(Vec<bool>),
    Span(SpanHit),
    Classes(Vec<CircuitClass>),
}

mod sealed {
    pub trait Sealed {}
}

/// Types a ticket can be redeemed for.
pub trait Outcome: sealed::Sealed + Sized {
    #[doc(hidden)]
    fn from_answer(answer: Answer) -> Option<Self>;
}

macro_rules! outcome {
    ($ty:ty, $variant:ident) => {
        impl sealed::Sealed for $ty {}
        impl Outcome for $ty {
            fn from_answer(answer: Answer) -> Option<Self> {
                match answer {
                    Answer::$variant(v) => Some(v),
                    _ => None,
                }
            }
        }
    };
}

outcome!(bool, Bool);
outcome!(Option<usize>, Trigger);
outcome!(Option<CircuitHit>, Circuit);
outcome!(Vec<bool>, Flags);
outcome!(SpanHit, Span);
outcome!(Vec<CircuitClass>, Classes);

/// Claim on the answer to one probe. Consumed on redemption.
#[derive(Debug)]
#[must_use = "a ticket is the only way to read the answer"]
pub struct Ticket<T> {
    session: u64,
    id: u64,
    _answer: PhantomData<fn() -> T>,
}

impl<T> Ticket<T> {
    pub fn id(&self) -> u64 {
        self.id
    }
}

static NEXT_SESSION: AtomicU64 = AtomicU64::new(0);

struct Pending {
    id: u64,
    view: MatroidView,
    probe: Probe,
}

/// Floor for the default per-round budget. The fixed minimum sample
/// counts of the samplers exceed `n^4` on tiny ground sets.
pub const MIN_ROUND_BUDGET: u64 = 1 << 20;

/// Owner of the seeded generator, the pending batch and the ledger.
pub struct QuerySession {
    session_id: u64,
    rng: ChaCha8Rng,
    budget: u64,
    ledger: RoundLedger,
    pending: Vec<Pending>,
    pending_queries: u64,
    answers: HashMap<u64, Answer>,
    next_id: u64,
}

impl QuerySession {
    /// Per-round budget defaults to `ground_size^4`, but never below
    /// [`MIN_ROUND_BUDGET`].
    pub fn new(ground_size: usize, seed: u64) -> Self {
        let n = ground_size.max(1) as u64;
        QuerySession {
            session_id: NEXT_SESSION.fetch_add(1, Ordering::Relaxed),
            rng: ChaCha8Rng::seed_from_u64(seed),
            budget: n.saturating_mul(n).saturating_mul(n).saturating_mul(n).max(MIN_ROUND_BUDGET),
            ledger: RoundLedger::default(),
            pending: Vec::new(),
            pending_queries: 0,
            answers: HashMap::new(),
            next_id: 0,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn ledger(&self) -> &RoundLedger {
        &self.ledger
    }

    pub fn rounds(&self) -> u64 {
        self.ledger.rounds()
    }

    pub fn total_queries(&self) -> u64 {
        self.ledger.total_queries()
    }

    /// Queries waiting for the next flush.
    pub fn pending_queries(&self) -> u64 {
        self.pending_queries
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Draws a permutation seed and the permutation of `set` it encodes.
    pub fn permutation(&mut self, set: &ElementSet) -> (u64, Vec<ElementId>) {
        let seed = self.rng_seed();
        (seed, permutation_from_seed(seed, set))
    }

    /// A fresh seed for a seeded order.
    pub fn rng_seed(&mut self) -> u64 {
        self.rng.gen()
    }

    pub fn submit_independent(&mut self, view: &MatroidView, s: &ElementSet) -> Result<Ticket<bool>> {
        view.check_subset(s)?;
        self.enqueue(view, Probe::Independent(s.to_vec()))
    }

    /// Position of the first element whose prefix is dependent.
    pub fn submit_prefix_scan(&mut self, view: &MatroidView, order: Vec<ElementId>) -> Result<Ticket<Option<usize>>> {
        check_order(view, &order, &[])?;
        self.enqueue(view, Probe::PrefixScan(Order::Explicit(order)))
    }

    /// [`submit_prefix_scan`](Self::submit_prefix_scan) along the permutation
    /// of the alive set encoded by `seed`.
    pub fn submit_prefix_scan_seeded(&mut self, view: &MatroidView, seed: u64) -> Result<Ticket<Option<usize>>> {
        self.enqueue(view, Probe::PrefixScan(Order::Seeded(seed)))
    }

    /// The first circuit along `order`, found in one round.
    pub fn submit_first_circuit(
        &mut self,
        view: &MatroidView,
        order: Vec<ElementId>,
    ) -> Result<Ticket<Option<CircuitHit>>> {
        check_order(view, &order, &[])?;
        self.enqueue(view, Probe::FirstCircuit(Order::Explicit(order)))
    }

    /// [`submit_first_circuit`](Self::submit_first_circuit) along the
    /// permutation of the alive set encoded by `seed`.
    pub fn submit_first_circuit_seeded(&mut self, view: &MatroidView, seed: u64) -> Result<Ticket<Option<CircuitHit>>> {
        self.enqueue(view, Probe::FirstCircuit(Order::Seeded(seed)))
    }

    /// For each candidate `y`, whether `base + y` is dependent.
    pub fn submit_span_members(
        &mut self,
        view: &MatroidView,
        base: Vec<ElementId>,
        candidates: Vec<ElementId>,
    ) -> Result<Ticket<Vec<bool>>> {
        check_order(view, &base, &candidates)?;
        self.enqueue(view, Probe::SpanMembers { base, candidates })
    }

    /// Queries every prefix of `prefix`, alone and with each candidate added.
    pub fn submit_prefix_span(
        &mut self,
        view: &MatroidView,
        prefix: Vec<ElementId>,
        candidates: Vec<ElementId>,
    ) -> Result<Ticket<SpanHit>> {
        check_order(view, &prefix, &candidates)?;
        self.enqueue(view, Probe::PrefixSpan { prefix, candidates })
    }

    /// Queries every alive subset of size at most `max_size`; the answer
    /// lists all circuits among them.
    pub fn submit_small_circuits(&mut self, view: &MatroidView, max_size: usize) -> Result<Ticket<Vec<CircuitClass>>> {
        self.enqueue(view, Probe::SmallCircuits(max_size))
    }

    fn enqueue<T>(&mut self, view: &MatroidView, probe: Probe) -> Result<Ticket<T>> {
        let cost = probe.nominal_queries(view);
        let attempted = self.pending_queries.saturating_add(cost);
        if attempted > self.budget {
            return Err(Error::BudgetExceeded {
                rounds: self.ledger.rounds(),
                attempted,
                budget: self.budget,
            });
        }
        let id = self.next_id;
        self.next_id += 1;
        self.pending_queries = attempted;
        self.pending.push(Pending {
            id,
            view: view.clone(),
            probe,
        });
        Ok(Ticket {
            session: self.session_id,
            id,
            _answer: PhantomData,
        })
    }

    /// Evaluates the pending batch. Counts a round only if the batch was
    /// non-empty. Returns the number of probes answered.
    pub fn flush(&mut self) -> usize {
        if self.pending.is_empty() {
            return 0;
        }
        let pending = std::mem::take(&mut self.pending);
        let mut bases: HashMap<usize, Scratch<'_>> = HashMap::new();
        for p in &pending {
            bases.entry(p.view.key()).or_insert_with(|| p.view.scratch());
        }
        let answers: Vec<(u64, Answer)> = pending
            .par_iter()
            .map(|p| (p.id, evaluate(&p.view, &bases[&p.view.key()], &p.probe)))
            .collect();
        drop(bases);
        self.answers.extend(answers);
        self.ledger.record(self.pending_queries);
        self.pending_queries = 0;
        pending.len()
    }

    pub fn redeem<T: Outcome>(&mut self, ticket: Ticket<T>) -> Result<T> {
        if ticket.session != self.session_id {
            return Err(Error::UnknownTicket(ticket.id));
        }
        if self.pending.iter().any(|p| p.id == ticket.id) {
            return Err(Error::NotFlushed(ticket.id));
        }
        let answer = self.answers.remove(&ticket.id).ok_or(Error::UnknownTicket(ticket.id))?;
        Ok(T::from_answer(answer).expect("ticket type matches its probe"))
    }
}

impl std::fmt::Debug for QuerySession {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuerySession")
            .field("rounds", &self.ledger.rounds())
            .field("total_queries", &self.ledger.total_queries())
            .field("pending", &self.pending.len())
            .field("budget", &self.budget)
            .finish()
    }
}

/// The permutation of `set` encoded by `seed`.
pub fn permutation_from_seed(seed: u64, set: &ElementSet) -> Vec<ElementId> {
    let mut order = set.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

fn check_order(view: &MatroidView, order: &[ElementId], extra: &[ElementId]) -> Result<()> {
    let mut seen = view.empty_set();
    for &e in order {
        view.check_alive(e)?;
        if !seen.insert(e) {
            return Err(Error::DuplicateElement(e));
        }
    }
    for &e in extra {
        view.check_alive(e)?;
    }
    Ok(())
}

fn evaluate(view: &MatroidView, base: &Scratch<'_>, probe: &Probe) -> Answer {
    match probe {
        Probe::Independent(set) => {
            let mut s = base.clone();
            Answer::Bool(set.iter().all(|&e| s.push(e)))
        }
        Probe::PrefixScan(order) => {
            let order = order.materialize(view);
            let mut s = base.clone();
            Answer::Trigger(order.iter().position(|&e| !s.push(e)).map(|i| i + 1))
        }
        Probe::FirstCircuit(order) => {
            let order = order.materialize(view);
            let mut s = base.clone();
            let hit = order.iter().position(|&e| !s.push(e)).map(|i| {
                let trigger = order[i];
                let mut circuit = s.circuit_with(trigger).expect("trigger closes a circuit");
                // contracted elements are not part of the minor's circuit
                circuit.retain(|&c| !view.contracted().contains(c));
                circuit.push(trigger);
                circuit.sort();
                CircuitHit {
                    trigger_index: i + 1,
                    circuit,
                }
            });
            Answer::Circuit(hit)
        }
        Probe::SpanMembers { base: members, candidates } => {
            let mut s = base.clone();
            if !members.iter().all(|&e| s.push(e)) {
                return Answer::Flags(vec![true; candidates.len()]);
            }
            Answer::Flags(candidates.iter().map(|&y| !s.can_push(y)).collect())
        }
        Probe::PrefixSpan { prefix, candidates } => {
            let mut s = base.clone();
            let independent_prefix = prefix.iter().take_while(|&&e| s.push(e)).count();
            let spanned = if independent_prefix == 0 {
                vec![false; candidates.len()]
            } else {
                candidates.iter().map(|&x| !s.can_push(x)).collect()
            };
            Answer::Span(SpanHit {
                independent_prefix,
                spanned,
            })
        }
        Probe::SmallCircuits(k) => Answer::Classes(view.base().small_circuit_classes(
            view.contracted(),
            view.alive(),
            *k,
        )),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::instance::MatroidInstance;

    fn uniform(n: usize, r: usize) -> MatroidView {
        MatroidView::new(Arc::new(MatroidInstance::uniform(n, r).unwrap()))
    }

    fn set(n: usize, ids: &[usize]) -> ElementSet {
        ElementSet::from_ids(n, ids.iter().copied())
    }

    #[test]
    fn one_round_per_nonempty_flush() {
        let v = uniform(4, 2);
        let mut s = QuerySession::new(4, 1);
        let tickets: Vec<_> = [&[0][..], &[0, 1], &[0, 1, 2], &[1], &[2, 3]]
            .iter()
            .map(|ids| s.submit_independent(&v, &set(4, ids)).unwrap())
            .collect();
        assert_eq!(s.flush(), 5);
        assert_eq!((s.rounds(), s.total_queries()), (1, 5));
        let answers: Vec<bool> = tickets.into_iter().map(|t| s.redeem(t).unwrap()).collect();
        assert_eq!(answers, vec![true, true, false, true, true]);
        assert_eq!(s.flush(), 0);
        assert_eq!(s.rounds(), 1);
    }

    #[test]
    fn redeem_before_flush_is_an_error() {
        let v = uniform(4, 2);
        let mut s = QuerySession::new(4, 1);
        let t = s.submit_independent(&v, &set(4, &[0])).unwrap();
        let id = t.id();
        assert_eq!(s.redeem(t), Err(Error::NotFlushed(id)));
        let mut other = QuerySession::new(4, 1);
        let stray = other.submit_independent(&v, &set(4, &[0])).unwrap();
        s.flush();
        other.flush();
        assert_eq!(s.redeem(stray), Err(Error::UnknownTicket(0)));
    }

    #[test]
    fn merged_submissions_cost_one_round() {
        let v = uniform(6, 3);
        let w = v.contract(&set(6, &[5])).unwrap();
        let mut s = QuerySession::new(6, 3);
        let a = s.submit_prefix_scan(&v, set(6, &[0, 1, 2, 3]).to_vec()).unwrap();
        let b = s.submit_prefix_scan(&w, set(6, &[0, 1, 2, 3]).to_vec()).unwrap();
        s.flush();
        assert_eq!(s.rounds(), 1);
        assert_eq!(s.total_queries(), 8);
        assert_eq!(s.redeem(a).unwrap(), Some(4));
        assert_eq!(s.redeem(b).unwrap(), Some(3));
    }

    #[test]
    fn budget_is_enforced_with_context() {
        let v = uniform(8, 2);
        let mut s = QuerySession::new(8, 0).with_budget(10);
        let order = ElementSet::full(8).to_vec();
        let _t = s.submit_prefix_scan(&v, order.clone()).unwrap();
        let err = s.submit_prefix_scan(&v, order).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                rounds: 0,
                attempted: 16,
                budget: 10
            }
        );
    }

    #[test]
    fn first_circuit_excludes_contracted_elements() {
        // triangle 0,1,2 plus pendant edge 3; contract edge 0
        let g = MatroidView::new(Arc::new(
            MatroidInstance::graphic(4, vec![(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap(),
        ));
        let c = g.contract(&set(4, &[0])).unwrap();
        let mut s = QuerySession::new(4, 0);
        let t = s.submit_first_circuit(&c, vec![ElementId::new(3), ElementId::new(1), ElementId::new(2)]).unwrap();
        s.flush();
        let hit = s.redeem(t).unwrap().unwrap();
        assert_eq!(hit.trigger_index, 3);
        assert_eq!(hit.circuit, vec![ElementId::new(1), ElementId::new(2)]);
    }

    #[test]
    fn orders_must_be_alive_and_distinct() {
        let v = uniform(4, 2).delete(&set(4, &[3])).unwrap();
        let mut s = QuerySession::new(4, 0);
        assert_eq!(
            s.submit_prefix_scan(&v, vec![ElementId::new(0), ElementId::new(0)]).unwrap_err(),
            Error::DuplicateElement(ElementId::new(0))
        );
        assert_eq!(
            s.submit_prefix_scan(&v, vec![ElementId::new(3)]).unwrap_err(),
            Error::NotAlive(ElementId::new(3))
        );
    }

    #[test]
    fn ledger_csv() {
        let v = uniform(3, 1);
        let mut s = QuerySession::new(3, 0);
        let _a = s.submit_independent(&v, &set(3, &[0])).unwrap();
        s.flush();
        let _b = s.submit_prefix_scan(&v, ElementSet::full(3).to_vec()).unwrap();
        s.flush();
        assert_eq!(s.ledger().to_csv(), "round,batch_size,cumulative_queries\n1,1,1\n2,3,4\n");
    }
}
