//! Brute-force reference implementations, written without the crate's
//! incremental structures. Only suitable for tiny ground sets.

#![allow(dead_code)]

use std::collections::VecDeque;

use parbasis::instance::MatroidInstance;
use parbasis::{ElementId, ElementSet};

/// Independence straight from each family's definition.
pub fn independent(m: &MatroidInstance, set: &[usize]) -> bool {
    match m {
        MatroidInstance::Uniform(u) => set.len() <= u.rank(),
        MatroidInstance::Partition(p) => p.parts().iter().zip(p.budgets()).all(|(part, &b)| {
            set.iter()
                .filter(|&&e| part.contains(&ElementId::new(e)))
                .count()
                <= b
        }),
        MatroidInstance::Graphic(g) => forest(g.vertices(), set.iter().map(|&e| g.edge(ElementId::new(e)))),
        MatroidInstance::Linear(l) => {
            let cols: Vec<Vec<u64>> = set
                .iter()
                .map(|&e| l.column(ElementId::new(e)).iter().map(|&x| u64::from(x)).collect())
                .collect();
            rank_mod_p(cols, u64::from(l.prime())) == set.len()
        }
        MatroidInstance::DirectSum(d) => d.components().iter().enumerate().all(|(i, c)| {
            let lo = d.offset(i);
            let hi = lo + c.ground_size();
            let local: Vec<usize> = set.iter().filter(|&&e| e >= lo && e < hi).map(|&e| e - lo).collect();
            independent(c, &local)
        }),
    }
}

/// Edges form a forest iff every connected component of the subgraph they
/// span has exactly one fewer edge than vertices.
fn forest(vertices: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    let edges: Vec<(usize, usize)> = edges.collect();
    let mut adj = vec![Vec::new(); vertices];
    for &(u, v) in &edges {
        if u == v {
            return false;
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; vertices];
    let mut components = 0;
    let touched: Vec<usize> = (0..vertices).filter(|&v| !adj[v].is_empty()).collect();
    for &s in &touched {
        if seen[s] {
            continue;
        }
        components += 1;
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    edges.len() == touched.len() - components
}

/// Rank of a list of vectors over GF(p) by row reduction from scratch.
fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] % p != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = pow_mod(rows[rank][col] % p, p - 2, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] % p != 0 {
                let f = rows[r][col] % p * inv % p;
                for c in 0..width {
                    rows[r][c] = (rows[r][c] + p * p - f * rows[rank][c] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Independence in the minor `M / contracted` (restricted to anything).
pub fn independent_minor(m: &MatroidInstance, contracted: &[usize], set: &[usize]) -> bool {
    let mut all = contracted.to_vec();
    all.extend_from_slice(set);
    independent(m, &all)
}

/// Size of the largest independent subset of `ground` in `M / contracted`,
/// by exhaustive search over subsets.
pub fn brute_rank(m: &MatroidInstance, contracted: &[usize], ground: &[usize]) -> usize {
    assert!(ground.len() <= 16, "brute_rank is exponential");
    let mut best = 0;
    for mask in 0u32..(1 << ground.len()) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let subset: Vec<usize> = (0..ground.len()).filter(|&i| mask >> i & 1 == 1).map(|i| ground[i]).collect();
        if independent_minor(m, contracted, &subset) {
            best = size;
        }
    }
    best
}

/// First circuit along `order`: the shortest dependent prefix, then the
/// unique subset of it that contains the last element and is minimally
/// dependent, found by enumerating all subsets. Also returns the 1-based
/// trigger position.
pub fn first_circuit(m: &MatroidInstance, order: &[usize]) -> Option<(usize, Vec<usize>)> {
    let k = (1..=order.len()).find(|&k| !independent(m, &order[..k]))?;
    let trigger = order[k - 1];
    let rest = &order[..k - 1];
    let mut circuits = Vec::new();
    for mask in 0u64..(1 << rest.len()) {
        let mut c: Vec<usize> = (0..rest.len()).filter(|&i| mask >> i & 1 == 1).map(|i| rest[i]).collect();
        c.push(trigger);
        if independent(m, &c) {
            continue;
        }
        let minimal = (0..c.len()).all(|i| {
            let mut smaller = c.clone();
            smaller.remove(i);
            independent(m, &smaller)
        });
        if minimal {
            c.sort_unstable();
            circuits.push(c);
        }
    }
    assert_eq!(circuits.len(), 1, "a minimal dependent prefix holds exactly one circuit through its last element");
    Some((k, circuits.pop().unwrap()))
}

/// Every permutation of `items`, in lexicographic order of positions.
pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Exact `q(S)` over all orders of the ground set, as (hits, dependent orders).
pub fn exact_q(m: &MatroidInstance, s: &[usize]) -> (u64, u64) {
    let ground: Vec<usize> = (0..m.ground_size()).collect();
    let mut hits = 0;
    let mut total = 0;
    for order in permutations(&ground) {
        if let Some((_, c)) = first_circuit(m, &order) {
            total += 1;
            if c.iter().all(|e| s.contains(e)) {
                hits += 1;
            }
        }
    }
    (hits, total)
}

/// Distribution of the trigger position over all orders of `s`; orders
/// with no circuit count as `|s| + 1`. Index `k` holds the number of
/// orders with trigger `k`.
pub fn trigger_distribution(m: &MatroidInstance, s: &[usize]) -> Vec<u64> {
    let mut counts = vec![0u64; s.len() + 2];
    for order in permutations(s) {
        let k = (1..=order.len())
            .find(|&k| !independent(m, &order[..k]))
            .unwrap_or(s.len() + 1);
        counts[k] += 1;
    }
    counts
}

/// Lower median of a count distribution.
pub fn lower_median(counts: &[u64]) -> usize {
    let total: u64 = counts.iter().sum();
    let need = total.div_ceil(2);
    let mut acc = 0;
    for (k, &c) in counts.iter().enumerate() {
        acc += c;
        if acc >= need {
            return k;
        }
    }
    unreachable!("counts are non-empty")
}

pub fn ids(set: &ElementSet) -> Vec<usize> {
    set.iter().map(ElementId::index).collect()
}

pub fn set(universe: usize, ids: &[usize]) -> ElementSet {
    ElementSet::from_ids(universe, ids.iter().map(|&i| ElementId::new(i)))
}

/// A small instance of one of seven shapes, fully determined by the inputs.
pub fn small_instance(kind: u8, n: usize, seed: u64) -> MatroidInstance {
    use parbasis::generate::{random_graph, random_linear, random_partition, BudgetLaw};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = n.max(2);
    match kind % 7 {
        0 => MatroidInstance::uniform(n, (seed as usize) % (n + 1)).unwrap(),
        1 => random_partition(n, 1 + (seed as usize) % n.min(4), BudgetLaw::Uniform, &mut rng).unwrap(),
        2 => random_graph(1 + n / 2 + (seed as usize) % 3, n, &mut rng).unwrap(),
        3 => random_linear(n, 1 + (seed as usize) % n.min(5), 3, &mut rng).unwrap(),
        4 => random_linear(n, 2 + (seed as usize) % 3, 2, &mut rng).unwrap(),
        5 => MatroidInstance::direct_sum(vec![
            random_graph(3, n / 2, &mut rng).unwrap(),
            random_partition(n - n / 2, 1, BudgetLaw::Half, &mut rng).unwrap(),
        ])
        .unwrap(),
        _ => random_partition(n, 1 + (seed as usize) % n.min(3), BudgetLaw::Half, &mut rng).unwrap(),
    }
}
