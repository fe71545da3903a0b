//! Exact minimum-cost assignment (Hungarian algorithm with potentials),
//! `O(n^3)`, used for the Wasserstein distance between equal-size subsets.

/// Solves the square assignment problem on a row-major `n x n` cost matrix.
/// Returns the assigned column for each row.
pub fn min_cost_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    // 1-indexed potentials; p[j] is the row matched to column j
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] != 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Assignment cost summed in row order, the canonical accumulation.
pub fn assignment_cost(cost: &[f64], n: usize, assignment: &[usize]) -> f64 {
    let mut acc = 0.0;
    for (i, &j) in assignment.iter().enumerate() {
        acc += cost[i * n + j];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force_min(cost: &[f64], n: usize) -> f64 {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut perm, 0, cost, n, &mut best);
        best
    }

    fn permute(perm: &mut Vec<usize>, at: usize, cost: &[f64], n: usize, best: &mut f64) {
        if at == n {
            let c = assignment_cost(cost, n, perm);
            if c < *best {
                *best = c;
            }
            return;
        }
        for i in at..n {
            perm.swap(at, i);
            permute(perm, at + 1, cost, n, best);
            perm.swap(at, i);
        }
    }

    #[test]
    fn known_small_case() {
        // classic 3x3 with optimum 5 (1+3+1? -> rows pick 2,0,1)
        let cost = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
        let a = min_cost_assignment(&cost, 3);
        assert_eq!(assignment_cost(&cost, 3, &a), 5.0);
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            let n = 2 + rng.gen_range(0..4);
            let cost: Vec<f64> = (0..n * n).map(|_| rng.gen::<f64>()).collect();
            let a = min_cost_assignment(&cost, n);
            // the assignment is a permutation
            let mut seen = vec![false; n];
            for &j in &a {
                assert!(!seen[j]);
                seen[j] = true;
            }
            let exact = brute_force_min(&cost, n);
            assert_eq!(assignment_cost(&cost, n, &a), exact);
        }
    }
}
