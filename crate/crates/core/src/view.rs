//! Deletion/contraction lenses over an immutable instance.

use std::fmt;
use std::sync::Arc;

use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};
use crate::instance::{MatroidInstance, Scratch};

/// The minor `(M / contracted) \ deleted` of a base instance.
///
/// Cloning is cheap. Operations that change the minor return a new view and
/// leave the receiver untouched.
#[derive(Clone)]
pub struct MatroidView {
    state: Arc<ViewState>,
}

struct ViewState {
    base: Arc<MatroidInstance>,
    contracted: ElementSet,
    deleted: ElementSet,
    alive: ElementSet,
}

impl MatroidView {
    /// The identity view: nothing contracted or deleted.
    pub fn new(base: Arc<MatroidInstance>) -> Self {
        let n = base.ground_size();
        MatroidView {
            state: Arc::new(ViewState {
                base,
                contracted: ElementSet::empty(n),
                deleted: ElementSet::empty(n),
                alive: ElementSet::full(n),
            }),
        }
    }

    pub fn base(&self) -> &Arc<MatroidInstance> {
        &self.state.base
    }

    pub fn contracted(&self) -> &ElementSet {
        &self.state.contracted
    }

    pub fn deleted(&self) -> &ElementSet {
        &self.state.deleted
    }

    pub fn alive(&self) -> &ElementSet {
        &self.state.alive
    }

    /// Size of the base ground set (the universe of every set in this view).
    pub fn universe(&self) -> usize {
        self.state.alive.universe()
    }

    pub fn alive_len(&self) -> usize {
        self.state.alive.len()
    }

    /// Identity of the underlying state, used to share work between queries
    /// against the same view.
    pub(crate) fn key(&self) -> usize {
        Arc::as_ptr(&self.state) as usize
    }

    /// An empty set over this view's universe.
    pub fn empty_set(&self) -> ElementSet {
        ElementSet::empty(self.universe())
    }

    pub fn check_alive(&self, e: ElementId) -> Result<()> {
        if e.index() >= self.universe() {
            return Err(Error::OutOfRange {
                element: e.index(),
                ground_size: self.universe(),
            });
        }
        if self.state.alive.contains(e) {
            Ok(())
        } else {
            Err(Error::NotAlive(e))
        }
    }

    pub fn check_subset(&self, s: &ElementSet) -> Result<()> {
        if s.universe() != self.universe() {
            return Err(Error::InvalidParams(format!(
                "set over a universe of {} used with a view over {}",
                s.universe(),
                self.universe()
            )));
        }
        if s.is_subset(&self.state.alive) {
            return Ok(());
        }
        let bad = s.iter().find(|&e| !self.state.alive.contains(e)).unwrap();
        Err(Error::NotAlive(bad))
    }

    /// An independent set holding exactly the contracted elements.
    pub fn scratch(&self) -> Scratch<'_> {
        let mut s = self.state.base.scratch();
        for c in self.state.contracted.iter() {
            let added = s.push(c);
            debug_assert!(added, "contracted set must be independent");
        }
        s
    }

    /// Independence in the minor, bypassing any ledger.
    pub fn is_independent(&self, s: &ElementSet) -> Result<bool> {
        self.check_subset(s)?;
        Ok(self.independent_unchecked(s.iter()))
    }

    pub(crate) fn independent_unchecked<I: IntoIterator<Item = ElementId>>(&self, ids: I) -> bool {
        let mut scratch = self.scratch();
        ids.into_iter().all(|e| scratch.push(e))
    }

    pub fn contract(&self, c: &ElementSet) -> Result<MatroidView> {
        self.check_subset(c)?;
        if !self.independent_unchecked(c.iter()) {
            return Err(Error::DependentContraction);
        }
        let st = &self.state;
        Ok(MatroidView {
            state: Arc::new(ViewState {
                base: Arc::clone(&st.base),
                contracted: st.contracted.union(c),
                deleted: st.deleted.clone(),
                alive: st.alive.difference(c),
            }),
        })
    }

    pub fn delete(&self, d: &ElementSet) -> Result<MatroidView> {
        if let Some(e) = d.iter().find(|&e| self.state.contracted.contains(e)) {
            return Err(Error::Contracted(e));
        }
        self.check_subset(d)?;
        if d.is_empty() {
            return Ok(self.clone());
        }
        let st = &self.state;
        Ok(MatroidView {
            state: Arc::new(ViewState {
                base: Arc::clone(&st.base),
                contracted: st.contracted.clone(),
                deleted: st.deleted.union(d),
                alive: st.alive.difference(d),
            }),
        })
    }

    /// Deletes a set the caller claims is redundant. Debug builds verify
    /// that the rank of the minor is unchanged.
    pub fn delete_redundant(&self, d: &ElementSet) -> Result<MatroidView> {
        let next = self.delete(d)?;
        debug_assert_eq!(
            next.rank_greedy(),
            self.rank_greedy(),
            "deleting {} elements changed the rank",
            d.len()
        );
        Ok(next)
    }

    /// Deletes every alive element outside `keep`.
    pub fn restrict(&self, keep: &ElementSet) -> Result<MatroidView> {
        self.check_subset(keep)?;
        self.delete(&self.state.alive.difference(keep))
    }

    /// Greedy basis in ascending id order. Sequential, ledger-free.
    pub fn greedy_basis(&self) -> ElementSet {
        let mut scratch = self.scratch();
        let mut out = self.empty_set();
        for e in self.state.alive.iter() {
            if scratch.push(e) {
                out.insert(e);
            }
        }
        out
    }

    pub fn rank_greedy(&self) -> usize {
        self.greedy_basis().len()
    }

    /// `b` is independent and every other alive element closes a circuit.
    pub fn is_basis(&self, b: &ElementSet) -> Result<bool> {
        self.check_subset(b)?;
        let mut scratch = self.scratch();
        if !b.iter().all(|e| scratch.push(e)) {
            return Ok(false);
        }
        Ok(self.state.alive.iter().filter(|&e| !b.contains(e)).all(|e| !scratch.can_push(e)))
    }
}

impl fmt::Debug for MatroidView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatroidView")
            .field("family", &self.state.base.variant_name())
            .field("contracted", &self.state.contracted)
            .field("deleted", &self.state.deleted)
            .field("alive", &self.state.alive.len())
            .finish()
    }
}
