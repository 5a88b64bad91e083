//! Concrete matroids that answer independence queries.
//!
//! Every family exposes the same incremental interface, [`Scratch`]: start
//! from an independent set, try to extend it one element at a time, and ask
//! for the unique circuit an element would close. Whole-set independence is
//! the special case of pushing every element of the set.

mod direct_sum;
mod graphic;
mod linear;
mod partition;
mod uniform;

pub use direct_sum::DirectSum;
pub use graphic::GraphicMatroid;
pub use linear::LinearMatroid;
pub use partition::PartitionMatroid;
pub use uniform::UniformMatroid;

use crate::element::{ElementId, ElementSet};
use crate::error::Result;

/// A concrete matroid. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatroidInstance {
    Uniform(UniformMatroid),
    Partition(PartitionMatroid),
    Graphic(GraphicMatroid),
    Linear(LinearMatroid),
    DirectSum(DirectSum),
}

impl MatroidInstance {
    pub fn uniform(ground_size: usize, rank: usize) -> Result<Self> {
        UniformMatroid::new(ground_size, rank).map(MatroidInstance::Uniform)
    }

    pub fn partition(ground_size: usize, parts: Vec<Vec<usize>>, budgets: Vec<usize>) -> Result<Self> {
        PartitionMatroid::new(ground_size, parts, budgets).map(MatroidInstance::Partition)
    }

    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        GraphicMatroid::new(vertices, edges).map(MatroidInstance::Graphic)
    }

    pub fn linear(prime: u32, rows: usize, columns: Vec<Vec<u32>>) -> Result<Self> {
        LinearMatroid::new(prime, rows, columns).map(MatroidInstance::Linear)
    }

    pub fn direct_sum(components: Vec<MatroidInstance>) -> Result<Self> {
        DirectSum::new(components).map(MatroidInstance::DirectSum)
    }

    pub fn ground_size(&self) -> usize {
        match self {
            MatroidInstance::Uniform(m) => m.ground_size(),
            MatroidInstance::Partition(m) => m.ground_size(),
            MatroidInstance::Graphic(m) => m.ground_size(),
            MatroidInstance::Linear(m) => m.ground_size(),
            MatroidInstance::DirectSum(m) => m.ground_size(),
        }
    }

    /// Short family name, as used in instance files.
    pub fn variant_name(&self) -> &'static str {
        match self {
            MatroidInstance::Uniform(_) => "uniform",
            MatroidInstance::Partition(_) => "partition",
            MatroidInstance::Graphic(_) => "graphic",
            MatroidInstance::Linear(_) => "linear",
            MatroidInstance::DirectSum(_) => "direct-sum",
        }
    }

    /// An empty independent set ready to be extended.
    pub fn scratch(&self) -> Scratch<'_> {
        match self {
            MatroidInstance::Uniform(m) => Scratch::Uniform(m.scratch()),
            MatroidInstance::Partition(m) => Scratch::Partition(m.scratch()),
            MatroidInstance::Graphic(m) => Scratch::Graphic(m.scratch()),
            MatroidInstance::Linear(m) => Scratch::Linear(m.scratch()),
            MatroidInstance::DirectSum(m) => Scratch::DirectSum(m.scratch()),
        }
    }

    /// Independence of an arbitrary set of ids. Panics on out-of-range ids.
    pub fn is_independent<I: IntoIterator<Item = ElementId>>(&self, set: I) -> bool {
        let mut scratch = self.scratch();
        set.into_iter().all(|e| scratch.push(e))
    }

    /// All circuits of size at most `max_size` of the minor obtained by
    /// contracting `contracted` and restricting to `alive`.
    ///
    /// Circuits come grouped into [`CircuitClass`]es. Families whose small
    /// circuits have closed form (uniform, partition) report them directly;
    /// the others enumerate subsets against the oracle.
    pub fn small_circuit_classes(
        &self,
        contracted: &ElementSet,
        alive: &ElementSet,
        max_size: usize,
    ) -> Vec<CircuitClass> {
        match self {
            MatroidInstance::Uniform(m) => m.small_circuit_classes(contracted, alive, max_size),
            MatroidInstance::Partition(m) => m.small_circuit_classes(contracted, alive, max_size),
            MatroidInstance::DirectSum(m) => m.small_circuit_classes(contracted, alive, max_size),
            _ => enumerate_small_circuits(self, contracted, alive, max_size),
        }
    }
}

/// Every `size`-element subset of `ground` is a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitClass {
    pub ground: ElementSet,
    pub size: usize,
}

impl CircuitClass {
    pub fn single(circuit: ElementSet) -> Self {
        let size = circuit.len();
        CircuitClass {
            ground: circuit,
            size,
        }
    }

    /// Number of circuits in the class, saturating.
    pub fn count(&self) -> u64 {
        binomial(self.ground.len() as u64, self.size as u64)
    }

    /// The lowest-indexed circuit of the class.
    pub fn first_circuit(&self) -> ElementSet {
        ElementSet::from_ids(self.ground.universe(), self.ground.iter().take(self.size))
    }
}

/// Brute-force circuit enumeration over subsets of `alive` of size at most
/// `max_size`, using only independence tests.
pub(crate) fn enumerate_small_circuits(
    instance: &MatroidInstance,
    contracted: &ElementSet,
    alive: &ElementSet,
    max_size: usize,
) -> Vec<CircuitClass> {
    let mut base = instance.scratch();
    for c in contracted.iter() {
        base.push(c);
    }
    let ids = alive.to_vec();
    let universe = alive.universe();
    let independent = |set: &[ElementId]| {
        let mut s = base.clone();
        set.iter().all(|&e| s.push(e))
    };
    let mut out = Vec::new();
    let mut combo = Vec::with_capacity(max_size);
    let mut sub = Vec::with_capacity(max_size);
    for size in 1..=max_size.min(ids.len()) {
        for_each_combination(ids.len(), size, &mut |idx| {
            combo.clear();
            combo.extend(idx.iter().map(|&i| ids[i]));
            if independent(&combo) {
                return;
            }
            let minimal = (0..size).all(|skip| {
                sub.clear();
                sub.extend(combo.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &e)| e));
                independent(&sub)
            });
            if minimal {
                out.push(CircuitClass::single(ElementSet::from_ids(universe, combo.iter().copied())));
            }
        });
    }
    out
}

/// Calls `f` with every strictly increasing index tuple of length `k` drawn
/// from `0..n`, in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// An independent set under construction.
///
/// `push` only ever keeps the set independent; `circuit_with` exposes the
/// fundamental circuit an element closes with the current members.
#[derive(Debug, Clone)]
pub enum Scratch<'a> {
    Uniform(uniform::UniformScratch),
    Partition(partition::PartitionScratch<'a>),
    Graphic(graphic::GraphicScratch<'a>),
    Linear(linear::LinearScratch<'a>),
    DirectSum(direct_sum::DirectSumScratch<'a>),
}

impl Scratch<'_> {
    /// Adds `e` if the result stays independent. Returns whether it was added.
    pub fn push(&mut self, e: ElementId) -> bool {
        match self {
            Scratch::Uniform(s) => s.push(e),
            Scratch::Partition(s) => s.push(e),
            Scratch::Graphic(s) => s.push(e),
            Scratch::Linear(s) => s.push(e),
            Scratch::DirectSum(s) => s.push(e),
        }
    }

    /// Whether `members + e` is independent, without modifying the set.
    pub fn can_push(&self, e: ElementId) -> bool {
        match self {
            Scratch::Uniform(s) => s.can_push(e),
            Scratch::Partition(s) => s.can_push(e),
            Scratch::Graphic(s) => s.can_push(e),
            Scratch::Linear(s) => s.can_push(e),
            Scratch::DirectSum(s) => s.can_push(e),
        }
    }

    /// If `members + e` is dependent, the members `y` for which
    /// `members - y + e` is independent (the unique circuit minus `e`).
    /// `None` if `e` can be added.
    pub fn circuit_with(&self, e: ElementId) -> Option<Vec<ElementId>> {
        match self {
            Scratch::Uniform(s) => s.circuit_with(e),
            Scratch::Partition(s) => s.circuit_with(e),
            Scratch::Graphic(s) => s.circuit_with(e),
            Scratch::Linear(s) => s.circuit_with(e),
            Scratch::DirectSum(s) => s.circuit_with(e),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Scratch::Uniform(s) => s.len(),
            Scratch::Partition(s) => s.len(),
            Scratch::Graphic(s) => s.len(),
            Scratch::Linear(s) => s.len(),
            Scratch::DirectSum(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
