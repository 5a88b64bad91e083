use crate::element::ElementId;
use crate::error::{Error, Result};

/// Largest field modulus accepted: `2^16`.
pub const MAX_MODULUS: u32 = 1 << 16;

/// Column matroid of a matrix over the prime field `GF(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMatroid {
    prime: u32,
    rows: usize,
    columns: usize,
    /// Column-major: column `e` occupies `data[e * rows..(e + 1) * rows]`.
    data: Vec<u32>,
}

impl LinearMatroid {
    pub fn new(prime: u32, rows: usize, columns: Vec<Vec<u32>>) -> Result<Self> {
        if !is_prime(prime) || prime > MAX_MODULUS {
            return Err(Error::InvalidInstance(format!(
                "field modulus {prime} must be a prime no larger than {MAX_MODULUS}"
            )));
        }
        let mut data = Vec::with_capacity(rows * columns.len());
        for (i, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::InvalidInstance(format!(
                    "column {i} has {} entries, expected {rows}",
                    col.len()
                )));
            }
            data.extend(col.iter().map(|&x| x % prime));
        }
        Ok(LinearMatroid {
            prime,
            rows,
            columns: columns.len(),
            data,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.columns
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn column(&self, e: ElementId) -> &[u32] {
        &self.data[e.index() * self.rows..(e.index() + 1) * self.rows]
    }

    pub(crate) fn scratch(&self) -> LinearScratch<'_> {
        LinearScratch {
            matroid: self,
            basis: Vec::new(),
            pivots: Vec::new(),
            combos: Vec::new(),
            members: Vec::new(),
        }
    }
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn inverse(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p.
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// Incremental Gaussian elimination. Each basis row remembers how it was
/// built from the member columns, so a dependent column can be written as a
/// combination of members and its circuit read off the support.
#[derive(Debug, Clone)]
pub struct LinearScratch<'a> {
    matroid: &'a LinearMatroid,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    /// `combos[i][j]`: coefficient of member `j` in basis row `i`.
    combos: Vec<Vec<u32>>,
    members: Vec<ElementId>,
}

impl LinearScratch<'_> {
    fn p(&self) -> u64 {
        u64::from(self.matroid.prime)
    }

    /// Reduces column `e` against the basis; returns the residual and the
    /// multiplier used for each basis row.
    fn reduce(&self, e: ElementId) -> (Vec<u32>, Vec<u32>) {
        let p = self.p();
        let mut v: Vec<u32> = self.matroid.column(e).to_vec();
        let mut factors = Vec::with_capacity(self.basis.len());
        for (row, &pivot) in self.basis.iter().zip(&self.pivots) {
            let f = u64::from(v[pivot]);
            factors.push(f as u32);
            if f == 0 {
                continue;
            }
            for (x, &b) in v.iter_mut().zip(row) {
                if b != 0 {
                    *x = ((u64::from(*x) + p - f * u64::from(b) % p) % p) as u32;
                }
            }
        }
        (v, factors)
    }

    fn is_zero_after_reduce(&self, e: ElementId) -> bool {
        self.reduce(e).0.iter().all(|&x| x == 0)
    }

    /// Coefficients `c_j` with `col(e) - residual = sum_j c_j col(member_j)`.
    fn member_coefficients(&self, factors: &[u32]) -> Vec<u64> {
        let p = self.p();
        let mut coef = vec![0u64; self.members.len()];
        for (combo, &f) in self.combos.iter().zip(factors) {
            if f == 0 {
                continue;
            }
            for (c, &x) in coef.iter_mut().zip(combo) {
                *c = (*c + u64::from(f) * u64::from(x)) % p;
            }
        }
        coef
    }

    pub fn push(&mut self, e: ElementId) -> bool {
        let (v, factors) = self.reduce(e);
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = self.p();
        let inv = inverse(u64::from(v[pivot]), p);
        let row: Vec<u32> = v.iter().map(|&x| (u64::from(x) * inv % p) as u32).collect();
        let coef = self.member_coefficients(&factors);
        let mut combo: Vec<u32> = coef.iter().map(|&c| ((p - c) % p * inv % p) as u32).collect();
        combo.push(inv as u32);
        self.basis.push(row);
        self.pivots.push(pivot);
        self.combos.push(combo);
        self.members.push(e);
        true
    }

    pub fn can_push(&self, e: ElementId) -> bool {
        !self.is_zero_after_reduce(e)
    }

    pub fn circuit_with(&self, e: ElementId) -> Option<Vec<ElementId>> {
        let (v, factors) = self.reduce(e);
        if v.iter().any(|&x| x != 0) {
            return None;
        }
        let coef = self.member_coefficients(&factors);
        Some(
            self.members
                .iter()
                .zip(&coef)
                .filter(|&(_, &c)| c != 0)
                .map(|(&m, _)| m)
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
}
