//! Permutations of small vertex sets and relabelled graphs.
//!
//! Graphs on `m` vertices are edge bitmasks: bit `pair_index(i, j)` is set
//! when `{i, j}` is an edge, with pairs `i < j` enumerated lexicographically.

pub const MAX_VERTICES: usize = 8;

pub fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

pub fn edge_slots(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Position of the unordered pair `{i, j}` in lexicographic order.
pub fn pair_index(m: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    // pairs (a, b) with a < i come first: sum_{a<i} (m - 1 - a)
    i * (2 * m - i - 1) / 2 + (j - i - 1)
}

/// Permutation of `0..m` with Lehmer rank `rank` (`rank < m!`).
pub fn permutation_from_rank(m: usize, mut rank: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..m).collect();
    let mut out = Vec::with_capacity(m);
    for k in (0..m).rev() {
        let f = factorial(k);
        let digit = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(digit));
    }
    out
}

/// Image of the edge set under the vertex map `v -> perm[v]`.
pub fn relabel(m: usize, edges: u64, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    for i in 0..m {
        for j in (i + 1)..m {
            if edges >> pair_index(m, i, j) & 1 == 1 {
                out |= 1 << pair_index(m, perm[i], perm[j]);
            }
        }
    }
    out
}

/// Adjacency bits of the graph relabelled by the permutation of rank
/// `index mod m!`.
pub fn relabel_by_index(m: usize, edges: u64, index: u64) -> u64 {
    let perm = permutation_from_rank(m, index % factorial(m));
    relabel(m, edges, &perm)
}

pub fn isomorphic(m: usize, g0: u64, g1: u64) -> bool {
    if g0.count_ones() != g1.count_ones() {
        return false;
    }
    (0..factorial(m)).any(|r| relabel(m, g0, &permutation_from_rank(m, r)) == g1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn lehmer_ranks_enumerate_all_permutations() {
        let all: BTreeSet<Vec<usize>> = (0..24).map(|r| permutation_from_rank(4, r)).collect();
        assert_eq!(all.len(), 24);
        assert_eq!(permutation_from_rank(4, 0), vec![0, 1, 2, 3]);
        assert_eq!(permutation_from_rank(4, 23), vec![3, 2, 1, 0]);
    }

    #[test]
    fn pair_indices_are_dense() {
        let m = 5;
        let idx: BTreeSet<usize> = (0..m)
            .flat_map(|i| ((i + 1)..m).map(move |j| pair_index(m, i, j)))
            .collect();
        assert_eq!(idx, (0..edge_slots(m)).collect());
    }

    #[test]
    fn path_and_star_are_not_isomorphic() {
        let m = 4;
        let path =
            (1 << pair_index(m, 0, 1)) | (1 << pair_index(m, 1, 2)) | (1 << pair_index(m, 2, 3));
        let star =
            (1 << pair_index(m, 0, 1)) | (1 << pair_index(m, 0, 2)) | (1 << pair_index(m, 0, 3));
        assert!(!isomorphic(m, path, star));
        let relabelled = relabel(m, path, &[2, 0, 3, 1]);
        assert!(isomorphic(m, path, relabelled));
    }
}
