//! Exact landscape measures over a complete fitness table: optima, plateaus,
//! basins of attraction, neutrality, ruggedness, fitness-distance
//! correlation, and cross-indicator rank correlations.
//!
//! Every measure is a reduction over fixed-size rank chunks merged in chunk
//! order, so results are identical for any worker count.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rayon::prelude::*;

use crate::assignment::{assignment_cost, min_cost_assignment};
use crate::error::{Error, Result};
use crate::pointset::Point;
use crate::stats::{average_ranks, spearman, PearsonAccumulator};
use crate::subsetspace::{ComboSpace, FitnessTable, Subset, CHUNK};

/// Tolerance-based comparison of canonical fitness values.
///
/// `equal(a,b)` holds when `|a-b| <= max(tol_abs, tol_rel * max(|a|,|b|))`;
/// `better(a,b)` means strictly lower and not equal. The defaults absorb the
/// floating-point noise between symmetric subsets without merging genuinely
/// distinct values.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Comparator {
    pub tol_rel: f64,
    pub tol_abs: f64,
}

impl Default for Comparator {
    fn default() -> Self {
        Comparator {
            tol_rel: 1e-9,
            tol_abs: 1e-12,
        }
    }
}

impl Comparator {
    #[inline]
    pub fn equal(&self, a: f64, b: f64) -> bool {
        if a == b {
            return true;
        }
        (a - b).abs() <= self.tol_abs.max(self.tol_rel * a.abs().max(b.abs()))
    }

    #[inline]
    pub fn better(&self, a: f64, b: f64) -> bool {
        a < b && !self.equal(a, b)
    }
}

/// Output of the single neighbor-scan pass shared by several measures.
#[derive(Debug, Clone)]
pub struct NeighborScan {
    /// One flag per rank: no neighbor is strictly better.
    pub is_local_optimum: Vec<bool>,
    /// Steepest-descent target per rank: the best strictly-improving
    /// neighbor (exact-value ties broken by lowest rank), or self.
    pub steepest: Vec<u32>,
    /// Ordered neighbor pairs with comparator-equal fitness.
    pub neutral_pairs: u64,
    /// Average fraction of equal-fitness neighbors per solution.
    pub neutrality: f64,
    /// Spearman correlation of fitness between all ordered neighbor pairs;
    /// `None` when the table is constant.
    pub ruggedness: Option<f64>,
}

/// One pass over every solution and its `k(n-k)` neighbors.
pub fn neighbor_scan(space: &ComboSpace, values: &[f64], cmp: &Comparator) -> NeighborScan {
    let count = space.count();
    assert_eq!(values.len() as u64, count);
    let ranks = average_ranks(values);
    let mean_rank = (count as f64 + 1.0) / 2.0;
    let nbhd = space.neighborhood_size() as f64;

    let mut is_local = vec![false; count as usize];
    let mut steepest = vec![0u32; count as usize];

    let partials: Vec<(PearsonAccumulator, u64)> = is_local
        .par_chunks_mut(CHUNK as usize)
        .zip(steepest.par_chunks_mut(CHUNK as usize))
        .enumerate()
        .map(|(ci, (local_chunk, steep_chunk))| {
            let start = ci as u64 * CHUNK;
            let mut indices = Vec::with_capacity(space.k());
            let mut scratch = Vec::with_capacity(space.k());
            space.unrank_indices(start, &mut indices);
            let mut acc = PearsonAccumulator::default();
            let mut neutral = 0u64;
            for offset in 0..local_chunk.len() {
                let rx = start + offset as u64;
                let fx = values[rx as usize];
                let u = ranks[rx as usize] - mean_rank;
                let mut best_val = f64::INFINITY;
                let mut best_rank = rx;
                let mut improving = false;
                space.for_each_neighbor_rank(&indices, &mut scratch, |_, _, ry| {
                    let fy = values[ry as usize];
                    acc.push(u, ranks[ry as usize] - mean_rank);
                    if cmp.better(fy, fx) {
                        if !improving || fy < best_val || (fy == best_val && ry < best_rank) {
                            best_val = fy;
                            best_rank = ry;
                        }
                        improving = true;
                    } else if cmp.equal(fx, fy) {
                        neutral += 1;
                    }
                });
                local_chunk[offset] = !improving;
                steep_chunk[offset] = best_rank as u32;
                if !space.next_indices(&mut indices) {
                    break;
                }
            }
            (acc, neutral)
        })
        .collect();

    let mut acc = PearsonAccumulator::default();
    let mut neutral_pairs = 0u64;
    for (a, n) in &partials {
        acc.merge(a);
        neutral_pairs += n;
    }
    NeighborScan {
        is_local_optimum: is_local,
        steepest,
        neutral_pairs,
        neutrality: neutral_pairs as f64 / (count as f64 * nbhd),
        ruggedness: acc.correlation(),
    }
}

/// Global/local optima and their plateau structure.
#[derive(Debug, Clone)]
pub struct OptimaReport {
    /// Ranks of global optima, ascending. Always a subset of `local_optima`.
    pub global_optima: Vec<u64>,
    /// Ranks of local optima, ascending.
    pub local_optima: Vec<u64>,
    /// Number of equal-fitness connected components containing a global optimum.
    pub global_plateaus: usize,
    /// Number of equal-fitness connected components containing a local optimum.
    pub local_plateaus: usize,
    /// Component id per member rank, for components of size >= 2 only.
    pub plateau_membership: BTreeMap<u64, u32>,
}

/// Identifies optima and flood-fills the plateaus that contain them.
///
/// A solution is a local optimum iff no neighbor is `better` under the
/// comparator; global optima are the local optima `equal` to the table
/// minimum. A plateau is a connected component of the graph joining
/// neighboring solutions with `equal` fitness; singletons count.
pub fn find_optima(
    space: &ComboSpace,
    values: &[f64],
    cmp: &Comparator,
    scan: &NeighborScan,
) -> OptimaReport {
    let local_optima: Vec<u64> = scan
        .is_local_optimum
        .iter()
        .enumerate()
        .filter_map(|(r, &is)| is.then_some(r as u64))
        .collect();
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    let global_optima: Vec<u64> = local_optima
        .iter()
        .copied()
        .filter(|&r| cmp.equal(values[r as usize], vmin))
        .collect();
    let global_set: HashSet<u64> = global_optima.iter().copied().collect();

    let mut visited: HashSet<u64> = HashSet::new();
    let mut membership = BTreeMap::new();
    let mut global_plateaus = 0usize;
    let mut local_plateaus = 0usize;
    let mut plateau_id = 0u32;
    let mut indices = Vec::with_capacity(space.k());
    let mut scratch = Vec::with_capacity(space.k());

    for &start in &local_optima {
        if visited.contains(&start) {
            continue;
        }
        let mut component = Vec::new();
        let mut queue = VecDeque::new();
        visited.insert(start);
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            component.push(x);
            let fx = values[x as usize];
            space.unrank_indices(x, &mut indices);
            let mut equal_neighbors = Vec::new();
            space.for_each_neighbor_rank(&indices, &mut scratch, |_, _, ry| {
                if cmp.equal(fx, values[ry as usize]) {
                    equal_neighbors.push(ry);
                }
            });
            for y in equal_neighbors {
                if visited.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        local_plateaus += 1;
        if component.iter().any(|r| global_set.contains(r)) {
            global_plateaus += 1;
        }
        if component.len() >= 2 {
            for &r in &component {
                membership.insert(r, plateau_id);
            }
        }
        plateau_id += 1;
    }

    OptimaReport {
        global_optima,
        local_optima,
        global_plateaus,
        local_plateaus,
        plateau_membership: membership,
    }
}

/// Basins of attraction of the deterministic steepest-descent map.
#[derive(Debug, Clone)]
pub struct BasinMap {
    /// Attractor rank per solution rank.
    pub attractor: Vec<u32>,
    /// Basin size per local-optimum rank.
    pub basin_sizes: BTreeMap<u64, u64>,
}

/// Resolves the steepest-descent map to its fixpoints with path compression.
pub fn compute_basins(scan: &NeighborScan) -> BasinMap {
    let n = scan.steepest.len();
    let mut attractor = vec![u32::MAX; n];
    let mut path = Vec::new();
    for x in 0..n {
        if attractor[x] != u32::MAX {
            continue;
        }
        let mut cur = x as u32;
        path.clear();
        let root = loop {
            if attractor[cur as usize] != u32::MAX {
                break attractor[cur as usize];
            }
            let next = scan.steepest[cur as usize];
            if next == cur {
                break cur;
            }
            path.push(cur);
            cur = next;
        };
        attractor[cur as usize] = root;
        for &p in &path {
            attractor[p as usize] = root;
        }
    }
    let mut basin_sizes = BTreeMap::new();
    for &a in &attractor {
        *basin_sizes.entry(a as u64).or_insert(0u64) += 1;
    }
    BasinMap {
        attractor,
        basin_sizes,
    }
}

/// Average proportion of equal-fitness neighbors, in `[0,1]`.
pub fn neutrality(space: &ComboSpace, values: &[f64], cmp: &Comparator) -> f64 {
    neighbor_scan(space, values, cmp).neutrality
}

/// Spearman correlation between the fitness of all ordered neighbor pairs.
/// `None` when every solution has the same fitness.
pub fn ruggedness(space: &ComboSpace, values: &[f64]) -> Option<f64> {
    neighbor_scan(space, values, &Comparator::default()).ruggedness
}

/// Sampled variant: `m` seeded random ordered neighbor pairs.
pub fn ruggedness_sampled(space: &ComboSpace, values: &[f64], m: u64, seed: u64) -> Option<f64> {
    use rand::{Rng, SeedableRng};
    let ranks = average_ranks(values);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut acc = PearsonAccumulator::default();
    let mut indices = Vec::with_capacity(space.k());
    let mut scratch = Vec::with_capacity(space.k());
    let nbhd = space.neighborhood_size();
    for _ in 0..m {
        let rx = rng.gen_range(0..space.count());
        let pick = rng.gen_range(0..nbhd);
        space.unrank_indices(rx, &mut indices);
        let mut at = 0usize;
        let mut ry = rx;
        space.for_each_neighbor_rank(&indices, &mut scratch, |_, _, r| {
            if at == pick {
                ry = r;
            }
            at += 1;
        });
        acc.push(ranks[rx as usize], ranks[ry as usize]);
    }
    acc.correlation()
}

// ---------------------------------------------------------------------------
// Distances and FDC
// ---------------------------------------------------------------------------

/// Hamming distance between two subsets: popcount of the XOR.
pub fn hamming_distance(a: &Subset, b: &Subset) -> usize {
    a.hamming_distance(b)
}

/// Precomputed pairwise Euclidean distances between the instance points.
#[derive(Debug, Clone)]
pub struct PointDistances {
    n: usize,
    dist: Vec<f64>,
}

impl PointDistances {
    pub fn new(points: &[Point]) -> PointDistances {
        let n = points.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = points[i].euclidean_distance(&points[j]);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        PointDistances { n, dist }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }
}

/// Exact 1-Wasserstein distance between two equal-size member-index sets:
/// the minimum over bijections of the summed Euclidean point distances,
/// solved by the `O(k^3)` assignment algorithm.
pub fn wasserstein_distance(dists: &PointDistances, a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let k = a.len();
    let mut cost = vec![0.0; k * k];
    for (i, &pi) in a.iter().enumerate() {
        for (j, &pj) in b.iter().enumerate() {
            cost[i * k + j] = dists.get(pi, pj);
        }
    }
    let assignment = min_cost_assignment(&cost, k);
    assignment_cost(&cost, k, &assignment)
}

/// Convenience wrapper over subsets of one point set.
pub fn wasserstein_between(points: &[Point], a: &Subset, b: &Subset) -> f64 {
    let dists = PointDistances::new(points);
    wasserstein_distance(&dists, &a.indices(), &b.indices())
}

/// Distance metric for FDC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdcMetric {
    Hamming,
    Wasserstein,
}

/// Fitness-distance correlation: Spearman rank correlation between each
/// solution's distance to the nearest global optimum and its canonical
/// fitness, over the whole space. `None` when degenerate.
pub fn fdc(
    space: &ComboSpace,
    values: &[f64],
    global_optima: &[u64],
    metric: FdcMetric,
    dists: Option<&PointDistances>,
) -> Result<Option<f64>> {
    if global_optima.is_empty() {
        return Err(Error::InvalidParameter(
            "FDC requires at least one global optimum".to_string(),
        ));
    }
    let count = space.count();
    let optima_indices: Vec<Vec<usize>> = global_optima
        .iter()
        .map(|&r| {
            let mut idx = Vec::new();
            space.unrank_indices(r, &mut idx);
            idx
        })
        .collect();
    let words = space.n().div_ceil(64);
    let optima_words: Vec<Vec<u64>> = optima_indices
        .iter()
        .map(|idx| {
            let mut w = vec![0u64; words];
            for &i in idx {
                w[i / 64] |= 1 << (i % 64);
            }
            w
        })
        .collect();

    let mut distance = vec![0.0f64; count as usize];
    distance
        .par_chunks_mut(CHUNK as usize)
        .enumerate()
        .for_each(|(ci, out)| {
            let start = ci as u64 * CHUNK;
            let mut indices = Vec::with_capacity(space.k());
            space.unrank_indices(start, &mut indices);
            let mut xwords = vec![0u64; words];
            for slot in out.iter_mut() {
                *slot = match metric {
                    FdcMetric::Hamming => {
                        xwords.iter_mut().for_each(|w| *w = 0);
                        for &i in &indices {
                            xwords[i / 64] |= 1 << (i % 64);
                        }
                        optima_words
                            .iter()
                            .map(|ow| {
                                ow.iter()
                                    .zip(&xwords)
                                    .map(|(a, b)| (a ^ b).count_ones() as u64)
                                    .sum::<u64>()
                            })
                            .min()
                            .unwrap() as f64
                    }
                    FdcMetric::Wasserstein => {
                        let d = dists.expect("wasserstein FDC needs point distances");
                        optima_indices
                            .iter()
                            .map(|o| wasserstein_distance(d, &indices, o))
                            .fold(f64::INFINITY, f64::min)
                    }
                };
                if !space.next_indices(&mut indices) {
                    break;
                }
            }
        });

    Ok(spearman(&distance, values))
}

/// Spearman correlation between the subset rankings of two tables over the
/// same instance. `None` when a table is constant.
pub fn rank_correlation(a: &FitnessTable, b: &FitnessTable) -> Result<Option<f64>> {
    if a.n != b.n || a.k != b.k {
        return Err(Error::InvalidParameter(format!(
            "tables cover different spaces: ({}, {}) vs ({}, {})",
            a.n, a.k, b.n, b.k
        )));
    }
    Ok(spearman(&a.values, &b.values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy_space() -> ComboSpace {
        ComboSpace::new(6, 2).unwrap()
    }

    fn random_values(space: &ComboSpace, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..space.count()).map(|_| rng.gen::<f64>()).collect()
    }

    #[test]
    fn constant_table_is_one_big_plateau() {
        let space = toy_space();
        let values = vec![0.5; space.count() as usize];
        let cmp = Comparator::default();
        let scan = neighbor_scan(&space, &values, &cmp);
        assert_eq!(scan.neutrality, 1.0);
        assert!(scan.ruggedness.is_none());
        assert!(scan.is_local_optimum.iter().all(|&b| b));
        let report = find_optima(&space, &values, &cmp, &scan);
        assert_eq!(report.local_plateaus, 1);
        assert_eq!(report.global_plateaus, 1);
        assert_eq!(report.local_optima.len(), space.count() as usize);
        assert_eq!(report.plateau_membership.len(), space.count() as usize);
    }

    #[test]
    fn distinct_values_have_zero_neutrality() {
        let space = toy_space();
        let values: Vec<f64> = (0..space.count()).map(|i| i as f64).collect();
        let scan = neighbor_scan(&space, &values, &Comparator::default());
        assert_eq!(scan.neutrality, 0.0);
        assert_eq!(scan.neutral_pairs, 0);
    }

    #[test]
    fn local_optima_match_brute_force() {
        let space = toy_space();
        let values = random_values(&space, 3);
        let cmp = Comparator::default();
        let scan = neighbor_scan(&space, &values, &cmp);
        for r in 0..space.count() {
            let subset = space.unrank(r).unwrap();
            let is_opt = space
                .neighbors(&subset)
                .unwrap()
                .iter()
                .all(|y| !cmp.better(values[space.rank(y).unwrap() as usize], values[r as usize]));
            assert_eq!(scan.is_local_optimum[r as usize], is_opt, "rank {r}");
        }
    }

    #[test]
    fn basins_partition_the_space_and_fix_optima() {
        let space = ComboSpace::new(8, 3).unwrap();
        let values = random_values(&space, 5);
        let cmp = Comparator::default();
        let scan = neighbor_scan(&space, &values, &cmp);
        let basins = compute_basins(&scan);
        let total: u64 = basins.basin_sizes.values().sum();
        assert_eq!(total, space.count());
        let report = find_optima(&space, &values, &cmp, &scan);
        for &opt in &report.local_optima {
            assert_eq!(basins.attractor[opt as usize] as u64, opt);
        }
        // every attractor is a local optimum
        for &a in basins.basin_sizes.keys() {
            assert!(report.local_optima.contains(&a));
        }
    }

    #[test]
    fn basins_match_explicit_best_improvement_search() {
        let space = toy_space();
        let values = random_values(&space, 11);
        let cmp = Comparator::default();
        let scan = neighbor_scan(&space, &values, &cmp);
        let basins = compute_basins(&scan);
        for start in 0..space.count() {
            // explicit steepest-descent walk
            let mut cur = start;
            loop {
                let subset = space.unrank(cur).unwrap();
                let mut best = cur;
                let mut best_val = f64::INFINITY;
                let mut improving = false;
                for y in space.neighbors(&subset).unwrap() {
                    let ry = space.rank(&y).unwrap();
                    let fy = values[ry as usize];
                    if cmp.better(fy, values[cur as usize])
                        && (!improving || fy < best_val || (fy == best_val && ry < best))
                    {
                        best = ry;
                        best_val = fy;
                        improving = true;
                    }
                }
                if !improving {
                    break;
                }
                cur = best;
            }
            assert_eq!(basins.attractor[start as usize] as u64, cur);
        }
    }

    #[test]
    fn ruggedness_matches_materialized_pairs() {
        let space = ComboSpace::new(8, 3).unwrap();
        let values = random_values(&space, 7);
        let fast = ruggedness(&space, &values).unwrap();
        // oracle: materialize all ordered neighbor pairs
        let ranks = average_ranks(&values);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for r in 0..space.count() {
            let subset = space.unrank(r).unwrap();
            for y in space.neighbors(&subset).unwrap() {
                xs.push(ranks[r as usize]);
                ys.push(ranks[space.rank(&y).unwrap() as usize]);
            }
        }
        let oracle = crate::stats::pearson(&xs, &ys).unwrap();
        assert!((fast - oracle).abs() < 1e-12);
    }

    #[test]
    fn wasserstein_identical_subsets_is_zero() {
        let points: Vec<Point> = (0..6)
            .map(|i| Point::new(vec![i as f64 / 6.0, 1.0 - i as f64 / 6.0]))
            .collect();
        let a = Subset::from_indices(6, &[0, 2, 4]).unwrap();
        assert_eq!(wasserstein_between(&points, &a, &a), 0.0);
    }

    #[test]
    fn wasserstein_matches_permutation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let points: Vec<Point> = (0..12)
            .map(|_| Point::new(vec![rng.gen(), rng.gen(), rng.gen()]))
            .collect();
        let dists = PointDistances::new(&points);
        for _ in 0..100 {
            let mut pool: Vec<usize> = (0..12).collect();
            for i in 0..5 {
                let j = rng.gen_range(i..12);
                pool.swap(i, j);
            }
            let a: Vec<usize> = pool[..5].to_vec();
            for i in 0..5 {
                let j = rng.gen_range(i..12);
                pool.swap(i, j);
            }
            let b: Vec<usize> = pool[..5].to_vec();
            let fast = wasserstein_distance(&dists, &a, &b);
            // brute force over all 120 bijections
            let mut perm: Vec<usize> = (0..5).collect();
            let mut best = f64::INFINITY;
            permute_min(&mut perm, 0, &a, &b, &dists, &mut best);
            assert_eq!(fast, best);
        }
    }

    fn permute_min(
        perm: &mut Vec<usize>,
        at: usize,
        a: &[usize],
        b: &[usize],
        dists: &PointDistances,
        best: &mut f64,
    ) {
        if at == a.len() {
            let mut c = 0.0;
            for (i, &j) in perm.iter().enumerate() {
                c += dists.get(a[i], b[j]);
            }
            if c < *best {
                *best = c;
            }
            return;
        }
        for i in at..perm.len() {
            perm.swap(at, i);
            permute_min(perm, at + 1, a, b, dists, best);
            perm.swap(at, i);
        }
    }

    #[test]
    fn fdc_is_one_when_fitness_tracks_distance() {
        let space = toy_space();
        let optimum = 7u64;
        let opt_subset = space.unrank(optimum).unwrap();
        let values: Vec<f64> = (0..space.count())
            .map(|r| space.unrank(r).unwrap().hamming_distance(&opt_subset) as f64)
            .collect();
        let v = fdc(&space, &values, &[optimum], FdcMetric::Hamming, None)
            .unwrap()
            .unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fdc_matches_materialized_oracle() {
        let space = ComboSpace::new(8, 3).unwrap();
        let values = random_values(&space, 19);
        let cmp = Comparator::default();
        let scan = neighbor_scan(&space, &values, &cmp);
        let report = find_optima(&space, &values, &cmp, &scan);
        let fast = fdc(&space, &values, &report.global_optima, FdcMetric::Hamming, None)
            .unwrap()
            .unwrap();
        let opt_subsets: Vec<Subset> = report
            .global_optima
            .iter()
            .map(|&r| space.unrank(r).unwrap())
            .collect();
        let distances: Vec<f64> = (0..space.count())
            .map(|r| {
                let s = space.unrank(r).unwrap();
                opt_subsets
                    .iter()
                    .map(|o| s.hamming_distance(o))
                    .min()
                    .unwrap() as f64
            })
            .collect();
        let oracle = spearman(&distances, &values).unwrap();
        assert!((fast - oracle).abs() < 1e-12);
    }

    #[test]
    fn rank_correlation_trivial_cases() {
        let space = ComboSpace::new(7, 3).unwrap();
        let values = random_values(&space, 23);
        let mk = |v: Vec<f64>| FitnessTable {
            n: 7,
            k: 3,
            d: 3,
            kind: crate::subsetspace::IndicatorKind::Igd,
            instance_hash: [0; 32],
            values: v,
        };
        let a = mk(values.clone());
        let same = rank_correlation(&a, &mk(values.clone())).unwrap().unwrap();
        assert!((same - 1.0).abs() < 1e-12);
        let neg = rank_correlation(&a, &mk(values.iter().map(|v| -v).collect()))
            .unwrap()
            .unwrap();
        assert!((neg + 1.0).abs() < 1e-12);
        let constant = rank_correlation(&a, &mk(vec![1.0; values.len()])).unwrap();
        assert!(constant.is_none());
    }

    #[test]
    fn neutrality_is_monotone_in_tolerance() {
        let space = ComboSpace::new(8, 3).unwrap();
        // quantized values so tolerance levels actually matter
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let values: Vec<f64> = (0..space.count())
            .map(|_| (rng.gen::<f64>() * 20.0).round() / 20.0 + rng.gen::<f64>() * 1e-7)
            .collect();
        let mut last = -1.0;
        for tol in [1e-12, 1e-6, 1e-1] {
            let cmp = Comparator {
                tol_rel: tol,
                tol_abs: 1e-15,
            };
            let v = neutrality(&space, &values, &cmp);
            assert!(v >= last, "neutrality decreased at tol {tol}");
            last = v;
        }
    }

    #[test]
    fn spearman_measures_invariant_under_monotone_transform() {
        let space = ComboSpace::new(8, 3).unwrap();
        let values = random_values(&space, 31);
        let transformed: Vec<f64> = values.iter().map(|v| v.exp()).collect();
        let r1 = ruggedness(&space, &values).unwrap();
        let r2 = ruggedness(&space, &transformed).unwrap();
        assert!((r1 - r2).abs() < 1e-12);
        let cmp = Comparator::default();
        let scan = neighbor_scan(&space, &values, &cmp);
        let report = find_optima(&space, &values, &cmp, &scan);
        let f1 = fdc(&space, &values, &report.global_optima, FdcMetric::Hamming, None)
            .unwrap()
            .unwrap();
        let f2 = fdc(
            &space,
            &transformed,
            &report.global_optima,
            FdcMetric::Hamming,
            None,
        )
        .unwrap()
        .unwrap();
        assert!((f1 - f2).abs() < 1e-12);
    }

    #[test]
    fn sampled_ruggedness_is_close_on_smooth_tables() {
        let space = ComboSpace::new(10, 4).unwrap();
        // smooth synthetic fitness: sum of member indices
        let mut values = Vec::new();
        let mut idx = Vec::new();
        for r in 0..space.count() {
            space.unrank_indices(r, &mut idx);
            values.push(idx.iter().sum::<usize>() as f64);
        }
        let exact = ruggedness(&space, &values).unwrap();
        let sampled = ruggedness_sampled(&space, &values, 20_000, 1).unwrap();
        assert!((exact - sampled).abs() < 0.05, "{exact} vs {sampled}");
    }
}
