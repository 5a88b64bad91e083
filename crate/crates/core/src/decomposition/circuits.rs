//! First-circuit sampling and the estimators built on it.

use num_rational::Ratio;

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::session::{CircuitHit, QuerySession, Ticket};
use crate::view::MatroidView;

/// The first circuit met when adding alive elements in some order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitSample {
    pub circuit: ElementSet,
    /// 1-based position of the element that closed the circuit.
    pub trigger_index: usize,
    /// Seed of the order, when it was drawn by the session.
    pub permutation_seed: Option<u64>,
}

impl CircuitSample {
    fn from_hit(view: &MatroidView, hit: CircuitHit, seed: Option<u64>) -> Self {
        CircuitSample {
            circuit: ElementSet::from_ids(view.universe(), hit.circuit),
            trigger_index: hit.trigger_index,
            permutation_seed: seed,
        }
    }
}

/// One round: the first circuit along `pi`, or `None` if the view is
/// independent.
pub fn find_circuit(view: &MatroidView, pi: &[ElementId], session: &mut QuerySession) -> Result<Option<CircuitSample>> {
    if pi.len() != view.alive_len() {
        return Err(Error::InvalidParams(format!(
            "order has {} elements but the view has {} alive",
            pi.len(),
            view.alive_len()
        )));
    }
    let t = session.submit_first_circuit(view, pi.to_vec())?;
    session.flush();
    Ok(session.redeem(t)?.map(|hit| CircuitSample::from_hit(view, hit, None)))
}

/// Independent first-circuit runs on one view. `None` marks a run that
/// found no circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitEnsemble {
    pub runs: Vec<Option<CircuitSample>>,
}

impl CircuitEnsemble {
    pub fn sample_count(&self) -> usize {
        self.runs.len()
    }

    pub fn circuits(&self) -> impl Iterator<Item = &CircuitSample> {
        self.runs.iter().flatten()
    }

    pub fn circuit_count(&self) -> usize {
        self.circuits().count()
    }

    /// Circuits lying inside `s`.
    pub fn count_within(&self, s: &ElementSet) -> usize {
        self.circuits().filter(|c| c.circuit.is_subset(s)).count()
    }
}

/// Submitted ensemble waiting for its round.
#[derive(Debug)]
pub struct EnsemblePlan {
    tickets: Vec<(u64, Ticket<Option<CircuitHit>>)>,
}

impl EnsemblePlan {
    pub fn submit(view: &MatroidView, session: &mut QuerySession, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Precondition("an ensemble needs at least one sample".into()));
        }
        let tickets = (0..count)
            .map(|_| {
                let seed = session.rng_seed();
                Ok((seed, session.submit_first_circuit_seeded(view, seed)?))
            })
            .collect::<Result<_>>()?;
        Ok(EnsemblePlan { tickets })
    }

    pub fn resolve(self, view: &MatroidView, session: &mut QuerySession) -> Result<CircuitEnsemble> {
        let runs = self
            .tickets
            .into_iter()
            .map(|(seed, t)| Ok(session.redeem(t)?.map(|hit| CircuitSample::from_hit(view, hit, Some(seed)))))
            .collect::<Result<_>>()?;
        Ok(CircuitEnsemble { runs })
    }
}

/// `count` first-circuit runs on uniformly random orders, in one round.
pub fn sample_ensemble(view: &MatroidView, session: &mut QuerySession, count: usize) -> Result<CircuitEnsemble> {
    let plan = EnsemblePlan::submit(view, session, count)?;
    session.flush();
    plan.resolve(view, session)
}

/// Fraction of the ensemble's circuits that lie inside `s`; zero when the
/// ensemble holds no circuit.
pub fn q_hat(ensemble: &CircuitEnsemble, s: &ElementSet) -> Ratio<u64> {
    let total = ensemble.circuit_count() as u64;
    if total == 0 {
        return Ratio::from_integer(0);
    }
    Ratio::new(ensemble.count_within(s) as u64, total)
}

/// Median position of the first dependence when `S` is shuffled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaEstimate {
    pub value: usize,
    pub sample_count: usize,
}

/// Lower median of `values`, which must be non-empty.
pub(crate) fn lower_median(mut values: Vec<usize>) -> usize {
    values.sort_unstable();
    values[values.len().div_ceil(2) - 1]
}

#[derive(Debug)]
pub struct AlphaPlan {
    size: usize,
    tickets: Vec<Ticket<Option<usize>>>,
}

impl AlphaPlan {
    pub fn submit(view: &MatroidView, s: &ElementSet, session: &mut QuerySession, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Precondition("an estimate needs at least one sample".into()));
        }
        let restricted = view.restrict(s)?;
        let tickets = (0..count)
            .map(|_| {
                let seed = session.rng_seed();
                session.submit_prefix_scan_seeded(&restricted, seed)
            })
            .collect::<Result<_>>()?;
        Ok(AlphaPlan { size: s.len(), tickets })
    }

    pub fn resolve(self, session: &mut QuerySession) -> Result<AlphaEstimate> {
        let sample_count = self.tickets.len();
        let values = self
            .tickets
            .into_iter()
            .map(|t| Ok(session.redeem(t)?.unwrap_or(self.size + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(AlphaEstimate {
            value: lower_median(values),
            sample_count,
        })
    }
}

/// Median trigger position over `count` random orders of `s` (runs without
/// a circuit count as `|s| + 1`), in one round.
pub fn alpha_estimate(
    view: &MatroidView,
    s: &ElementSet,
    session: &mut QuerySession,
    count: usize,
) -> Result<AlphaEstimate> {
    let plan = AlphaPlan::submit(view, s, session, count)?;
    session.flush();
    plan.resolve(session)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::instance::MatroidInstance;

    fn view(inst: MatroidInstance) -> MatroidView {
        MatroidView::new(Arc::new(inst))
    }

    fn ids(v: &[usize]) -> Vec<ElementId> {
        v.iter().map(|&i| ElementId::new(i)).collect()
    }

    fn set(n: usize, v: &[usize]) -> ElementSet {
        ElementSet::from_ids(n, v.iter().copied())
    }

    #[test]
    fn find_circuit_examples() {
        let u = view(MatroidInstance::uniform(4, 2).unwrap());
        let mut s = QuerySession::new(4, 0);
        let c = find_circuit(&u, &ids(&[0, 1, 2, 3]), &mut s).unwrap().unwrap();
        assert_eq!((c.circuit, c.trigger_index), (set(4, &[0, 1, 2]), 3));
        assert_eq!(s.rounds(), 1);

        let tri = view(MatroidInstance::graphic(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap());
        let c = find_circuit(&tri, &ids(&[2, 0, 1]), &mut s).unwrap().unwrap();
        assert_eq!(c.circuit, ElementSet::full(3));

        let p = view(MatroidInstance::partition(5, vec![vec![0, 1, 2], vec![3, 4]], vec![1, 2]).unwrap());
        let c = find_circuit(&p, &ids(&[3, 0, 4, 1, 2]), &mut s).unwrap().unwrap();
        assert_eq!((c.circuit, c.trigger_index), (set(5, &[0, 1]), 4));

        let free = view(MatroidInstance::uniform(3, 3).unwrap());
        assert_eq!(find_circuit(&free, &ids(&[0, 1, 2]), &mut s).unwrap(), None);
    }

    #[test]
    fn ensemble_examples() {
        let u = view(MatroidInstance::uniform(10, 2).unwrap());
        let mut s = QuerySession::new(10, 1);
        let e = sample_ensemble(&u, &mut s, 100).unwrap();
        assert_eq!(e.sample_count(), 100);
        assert!(e.circuits().all(|c| c.circuit.len() == 3 && c.trigger_index == 3));
        assert_eq!(s.rounds(), 1);
        assert_eq!(q_hat(&e, u.alive()), Ratio::from_integer(1));
        assert_eq!(q_hat(&e, &u.empty_set()), Ratio::from_integer(0));

        assert!(matches!(sample_ensemble(&u, &mut s, 0), Err(Error::Precondition(_))));

        let free = view(MatroidInstance::uniform(6, 6).unwrap());
        let e = sample_ensemble(&free, &mut s, 20).unwrap();
        assert!(e.runs.iter().all(Option::is_none));
        assert_eq!(q_hat(&e, free.alive()), Ratio::from_integer(0));
    }

    #[test]
    fn alpha_of_known_sets() {
        let u = view(MatroidInstance::uniform(12, 4).unwrap());
        let mut s = QuerySession::new(12, 2);
        let some = set(12, &[0, 2, 4, 6, 8, 10]);
        let a = alpha_estimate(&u, &some, &mut s, 64).unwrap();
        assert_eq!(a, AlphaEstimate { value: 5, sample_count: 64 });

        let p = view(MatroidInstance::partition(8, vec![(0..5).collect(), (5..8).collect()], vec![2, 3]).unwrap());
        assert_eq!(alpha_estimate(&p, &set(8, &[0, 1, 2, 3, 4]), &mut s, 32).unwrap().value, 3);
        assert_eq!(alpha_estimate(&p, &set(8, &[5, 6, 7]), &mut s, 32).unwrap().value, 4);
    }

    #[test]
    fn lower_median_picks_the_lower_middle() {
        assert_eq!(lower_median(vec![4, 1, 3, 2]), 2);
        assert_eq!(lower_median(vec![5, 1, 3]), 3);
        assert_eq!(lower_median(vec![7]), 7);
    }
}
