use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};

use super::CircuitClass;

/// Ground set split into disjoint parts `A_i` with budgets `b_i`; a set is
/// independent iff it holds at most `b_i` elements of every `A_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMatroid {
    parts: Vec<Vec<ElementId>>,
    budgets: Vec<usize>,
    part_of: Vec<u32>,
}

impl PartitionMatroid {
    pub fn new(ground_size: usize, parts: Vec<Vec<usize>>, budgets: Vec<usize>) -> Result<Self> {
        if parts.len() != budgets.len() {
            return Err(Error::InvalidInstance(format!(
                "{} parts but {} budgets",
                parts.len(),
                budgets.len()
            )));
        }
        let mut part_of = vec![u32::MAX; ground_size];
        let mut sorted_parts = Vec::with_capacity(parts.len());
        for (i, (part, &budget)) in parts.iter().zip(&budgets).enumerate() {
            if budget > part.len() {
                return Err(Error::InvalidInstance(format!(
                    "part {i} has budget {budget} but only {} elements",
                    part.len()
                )));
            }
            let mut ids = Vec::with_capacity(part.len());
            for &e in part {
                if e >= ground_size {
                    return Err(Error::InvalidInstance(format!(
                        "part {i} names element {e} outside ground size {ground_size}"
                    )));
                }
                if part_of[e] != u32::MAX {
                    return Err(Error::InvalidInstance(format!(
                        "element {e} appears in more than one part"
                    )));
                }
                part_of[e] = i as u32;
                ids.push(ElementId::new(e));
            }
            ids.sort();
            sorted_parts.push(ids);
        }
        if let Some(missing) = part_of.iter().position(|&p| p == u32::MAX) {
            return Err(Error::InvalidInstance(format!(
                "element {missing} is not covered by any part"
            )));
        }
        Ok(PartitionMatroid {
            parts: sorted_parts,
            budgets,
            part_of,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.part_of.len()
    }

    pub fn parts(&self) -> &[Vec<ElementId>] {
        &self.parts
    }

    pub fn budgets(&self) -> &[usize] {
        &self.budgets
    }

    pub fn part_of(&self, e: ElementId) -> usize {
        self.part_of[e.index()] as usize
    }

    /// `sum_i min(b_i, |A_i|)`.
    pub fn rank(&self) -> usize {
        self.parts
            .iter()
            .zip(&self.budgets)
            .map(|(p, &b)| b.min(p.len()))
            .sum()
    }

    pub(crate) fn scratch(&self) -> PartitionScratch<'_> {
        PartitionScratch {
            matroid: self,
            counts: vec![0; self.parts.len()],
            members: Vec::new(),
        }
    }

    pub(crate) fn small_circuit_classes(
        &self,
        contracted: &ElementSet,
        alive: &ElementSet,
        max_size: usize,
    ) -> Vec<CircuitClass> {
        let universe = alive.universe();
        let mut out = Vec::new();
        for (part, &budget) in self.parts.iter().zip(&self.budgets) {
            let used = part.iter().filter(|&&e| contracted.contains(e)).count();
            let size = budget.saturating_sub(used) + 1;
            if size > max_size {
                continue;
            }
            let ground = ElementSet::from_ids(universe, part.iter().copied().filter(|&e| alive.contains(e)));
            if ground.len() >= size {
                out.push(CircuitClass { ground, size });
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct PartitionScratch<'a> {
    matroid: &'a PartitionMatroid,
    counts: Vec<u32>,
    members: Vec<ElementId>,
}

impl PartitionScratch<'_> {
    fn has_room(&self, part: usize) -> bool {
        (self.counts[part] as usize) < self.matroid.budgets[part]
    }

    pub fn push(&mut self, e: ElementId) -> bool {
        let part = self.matroid.part_of(e);
        if self.has_room(part) {
            self.counts[part] += 1;
            self.members.push(e);
            true
        } else {
            false
        }
    }

    pub fn can_push(&self, e: ElementId) -> bool {
        self.has_room(self.matroid.part_of(e))
    }

    pub fn circuit_with(&self, e: ElementId) -> Option<Vec<ElementId>> {
        let part = self.matroid.part_of(e);
        if self.has_room(part) {
            return None;
        }
        Some(
            self.members
                .iter()
                .copied()
                .filter(|&m| self.matroid.part_of(m) == part)
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
}
