//! Fixtures shared by the criterion benches.

use std::sync::Arc;

use parbasis::{Family, MatroidView};

/// A fresh view of `family` at size `n`, generated from `seed`.
pub fn fixture(family: Family, n: usize, seed: u64) -> MatroidView {
    let instance = family.generate(n, seed).expect("bench fixtures use valid sizes");
    MatroidView::new(Arc::new(instance))
}
