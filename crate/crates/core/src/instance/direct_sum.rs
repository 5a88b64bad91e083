use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};

use super::{CircuitClass, MatroidInstance, Scratch};

/// Disjoint union of matroids. Component `c` owns the id range
/// `offsets[c]..offsets[c + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectSum {
    components: Vec<MatroidInstance>,
    offsets: Vec<usize>,
}

impl DirectSum {
    pub fn new(components: Vec<MatroidInstance>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInstance("direct sum needs at least one component".into()));
        }
        let mut offsets = Vec::with_capacity(components.len() + 1);
        offsets.push(0);
        for c in &components {
            offsets.push(offsets.last().unwrap() + c.ground_size());
        }
        Ok(DirectSum { components, offsets })
    }

    pub fn ground_size(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn components(&self) -> &[MatroidInstance] {
        &self.components
    }

    /// First global id of each component.
    pub fn offset(&self, component: usize) -> usize {
        self.offsets[component]
    }

    /// Component index and local id of a global id.
    pub fn locate(&self, e: ElementId) -> (usize, ElementId) {
        let c = self.offsets.partition_point(|&o| o <= e.index()) - 1;
        (c, ElementId::new(e.index() - self.offsets[c]))
    }

    fn project(&self, set: &ElementSet, c: usize) -> ElementSet {
        let (lo, hi) = (self.offsets[c], self.offsets[c + 1]);
        ElementSet::from_ids(
            hi - lo,
            set.iter().filter(|e| (lo..hi).contains(&e.index())).map(|e| e.index() - lo),
        )
    }

    pub(crate) fn scratch(&self) -> DirectSumScratch<'_> {
        DirectSumScratch {
            sum: self,
            parts: self.components.iter().map(MatroidInstance::scratch).collect(),
        }
    }

    pub(crate) fn small_circuit_classes(
        &self,
        contracted: &ElementSet,
        alive: &ElementSet,
        max_size: usize,
    ) -> Vec<CircuitClass> {
        let universe = self.ground_size();
        let mut out = Vec::new();
        for (c, component) in self.components.iter().enumerate() {
            let local_alive = self.project(alive, c);
            if local_alive.is_empty() {
                continue;
            }
            let local_contracted = self.project(contracted, c);
            let offset = self.offsets[c];
            for class in component.small_circuit_classes(&local_contracted, &local_alive, max_size) {
                out.push(CircuitClass {
                    ground: ElementSet::from_ids(universe, class.ground.iter().map(|e| e.index() + offset)),
                    size: class.size,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct DirectSumScratch<'a> {
    sum: &'a DirectSum,
    parts: Vec<Scratch<'a>>,
}

impl DirectSumScratch<'_> {
    pub fn push(&mut self, e: ElementId) -> bool {
        let (c, local) = self.sum.locate(e);
        self.parts[c].push(local)
    }

    pub fn can_push(&self, e: ElementId) -> bool {
        let (c, local) = self.sum.locate(e);
        self.parts[c].can_push(local)
    }

    pub fn circuit_with(&self, e: ElementId) -> Option<Vec<ElementId>> {
        let (c, local) = self.sum.locate(e);
        let offset = self.sum.offsets[c];
        self.parts[c]
            .circuit_with(local)
            .map(|ids| ids.into_iter().map(|x| ElementId::new(x.index() + offset)).collect())
    }

    pub fn len(&self) -> usize {
        self.parts.iter().map(Scratch::len).sum()
    }
}
