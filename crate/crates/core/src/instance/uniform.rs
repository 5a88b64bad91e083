use crate::element::{ElementId, ElementSet};
use crate::error::{Error, Result};

use super::CircuitClass;

/// `U(r, n)`: a set is independent iff it has at most `r` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformMatroid {
    ground_size: usize,
    rank: usize,
}

impl UniformMatroid {
    pub fn new(ground_size: usize, rank: usize) -> Result<Self> {
        if rank > ground_size {
            return Err(Error::InvalidInstance(format!(
                "uniform rank {rank} exceeds ground size {ground_size}"
            )));
        }
        Ok(UniformMatroid { ground_size, rank })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub(crate) fn scratch(&self) -> UniformScratch {
        UniformScratch {
            rank: self.rank,
            members: Vec::new(),
        }
    }

    pub(crate) fn small_circuit_classes(
        &self,
        contracted: &ElementSet,
        alive: &ElementSet,
        max_size: usize,
    ) -> Vec<CircuitClass> {
        let size = self.rank.saturating_sub(contracted.len()) + 1;
        if size <= max_size && alive.len() >= size {
            vec![CircuitClass {
                ground: alive.clone(),
                size,
            }]
        } else {
            Vec::new()
        }
    }
}

#[derive(Debug, Clone)]
pub struct UniformScratch {
    rank: usize,
    members: Vec<ElementId>,
}

impl UniformScratch {
    pub fn push(&mut self, e: ElementId) -> bool {
        if self.members.len() < self.rank {
            self.members.push(e);
            true
        } else {
            false
        }
    }

    pub fn can_push(&self, _e: ElementId) -> bool {
        self.members.len() < self.rank
    }

    pub fn circuit_with(&self, _e: ElementId) -> Option<Vec<ElementId>> {
        if self.members.len() < self.rank {
            None
        } else {
            Some(self.members.clone())
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
}
