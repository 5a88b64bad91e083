//! Ground-set elements and dense element sets.
//!
//! Element ids are indices into the ground set of a [`MatroidInstance`] and
//! stay valid for the lifetime of that instance. Views never re-index, they
//! only filter, so a set computed against one view can be intersected with
//! sets from any other view over the same instance.
//!
//! [`MatroidInstance`]: crate::instance::MatroidInstance

use std::fmt;

use fixedbitset::FixedBitSet;

/// Index of an element of the ground set.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(u32);

impl ElementId {
    pub fn new(index: usize) -> Self {
        ElementId(u32::try_from(index).expect("element index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for ElementId {
    fn from(index: usize) -> Self {
        ElementId::new(index)
    }
}

impl fmt::Debug for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A subset of a ground set of fixed size, stored as a bit vector.
///
/// Iteration is always in ascending id order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    bits: FixedBitSet,
}

impl ElementSet {
    pub fn empty(universe: usize) -> Self {
        ElementSet {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        ElementSet { bits }
    }

    /// Builds a set from ids. Panics if an id is outside the universe.
    pub fn from_ids<I>(universe: usize, ids: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<ElementId>,
    {
        let mut set = ElementSet::empty(universe);
        for id in ids {
            set.insert(id.into());
        }
        set
    }

    /// Size of the ground set this set lives in.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    #[inline]
    pub fn contains(&self, id: ElementId) -> bool {
        self.bits.contains(id.index())
    }

    /// Returns true if the element was not already present.
    pub fn insert(&mut self, id: ElementId) -> bool {
        !self.bits.put(id.index())
    }

    /// Returns true if the element was present.
    pub fn remove(&mut self, id: ElementId) -> bool {
        let was = self.bits.contains(id.index());
        self.bits.set(id.index(), false);
        was
    }

    pub fn iter(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.bits.ones().map(ElementId::new)
    }

    pub fn to_vec(&self) -> Vec<ElementId> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<ElementId> {
        self.bits.minimum().map(ElementId::new)
    }

    pub fn union_with(&mut self, other: &ElementSet) {
        self.check_universe(other);
        self.bits.union_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &ElementSet) {
        self.check_universe(other);
        self.bits.difference_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &ElementSet) {
        self.check_universe(other);
        self.bits.intersect_with(&other.bits);
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn difference(&self, other: &ElementSet) -> ElementSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.check_universe(other);
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &ElementSet) -> bool {
        self.check_universe(other);
        self.bits.is_disjoint(&other.bits)
    }

    pub fn intersection_count(&self, other: &ElementSet) -> usize {
        self.check_universe(other);
        self.bits.intersection_count(&other.bits)
    }

    fn check_universe(&self, other: &ElementSet) {
        debug_assert_eq!(
            self.universe(),
            other.universe(),
            "element sets from different ground sets"
        );
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|e| e.0)).finish()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Formats ids space-separated, the way the text dumps write member lists.
pub(crate) fn join_ids<I: IntoIterator<Item = ElementId>>(ids: I) -> String {
    let mut out = String::new();
    for (i, id) in ids.into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&id.to_string());
    }
    out
}
