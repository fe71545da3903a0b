//! Exact local optima networks with escape edges, plus GraphML, DOT, and
//! JSON exports.
//!
//! An escape edge `(i, j)` counts the solutions within Hamming distance `D`
//! of optimum `i` whose steepest-descent attractor is optimum `j`; weights
//! are normalized by the ball size so outgoing weights sum to 1.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::BasinMap;
use crate::subsetspace::{ComboSpace, IndicatorKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LonNode {
    /// Combinadic rank of the local optimum.
    pub rank: u64,
    /// Canonical fitness (lower is better).
    pub fitness: f64,
    /// Fitness min-max normalized over all local optima; 0 is best.
    pub normalized_fitness: f64,
    pub basin_size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LonEdge {
    /// Source node index into `nodes`.
    pub source: usize,
    /// Target node index into `nodes`.
    pub target: usize,
    /// Transition probability in `(0, 1]`.
    pub weight: f64,
    /// Raw tally behind the weight.
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LonParams {
    /// Escape distance `D` (even, `>= 2`).
    pub escape_distance: usize,
    pub metric: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LonGraph {
    pub n: usize,
    pub k: usize,
    pub indicator: IndicatorKind,
    pub params: LonParams,
    pub nodes: Vec<LonNode>,
    pub edges: Vec<LonEdge>,
}

/// Number of valid solutions within Hamming distance `d_max` of any solution:
/// `sum_m C(k,m) C(n-k,m)` over swap counts `m <= d_max/2`.
pub fn escape_ball_size(space: &ComboSpace, d_max: usize) -> u64 {
    let mut total = 0u64;
    for m in 0..=(d_max / 2) {
        total += space.binom(space.k(), m) * space.binom(space.n() - space.k(), m);
    }
    total
}

fn for_each_combination<F: FnMut(&[usize])>(pool: usize, m: usize, mut f: F) {
    if m == 0 {
        f(&[]);
        return;
    }
    if m > pool {
        return;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        f(&idx);
        // lexicographic successor
        let mut t = m;
        loop {
            if t == 0 {
                return;
            }
            t -= 1;
            if idx[t] + 1 <= pool - (m - t) {
                idx[t] += 1;
                for u in (t + 1)..m {
                    idx[u] = idx[u - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Builds the exact LON from the table, local optima, and basin map.
///
/// The attractor map from [`crate::landscape::compute_basins`] plays the
/// role of local search, so the network is deterministic. Self-loops are
/// kept in the data model; exports can drop them.
pub fn build_lon(
    space: &ComboSpace,
    table: &crate::subsetspace::FitnessTable,
    local_optima: &[u64],
    basins: &BasinMap,
    escape_distance: usize,
) -> Result<LonGraph> {
    let values = &table.values;
    if escape_distance < 2 || escape_distance % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "escape distance must be even and >= 2 (valid solutions sit at even \
             Hamming distances), got {escape_distance}"
        )));
    }
    let node_of: HashMap<u64, usize> = local_optima
        .iter()
        .enumerate()
        .map(|(i, &r)| (r, i))
        .collect();
    let ball = escape_ball_size(space, escape_distance);

    let per_node: Vec<BTreeMap<usize, u64>> = local_optima
        .par_iter()
        .map(|&opt| {
            let mut members = Vec::new();
            space.unrank_indices(opt, &mut members);
            let nonmembers: Vec<usize> = (0..space.n()).filter(|i| !members.contains(i)).collect();
            let mut tally: BTreeMap<usize, u64> = BTreeMap::new();
            let mut candidate = Vec::with_capacity(space.k());
            for m in 0..=(escape_distance / 2) {
                for_each_combination(space.k(), m, |rem| {
                    for_each_combination(nonmembers.len(), m, |add| {
                        // merge kept members with added nonmembers, both sorted
                        candidate.clear();
                        let mut r = 0usize;
                        let mut kept = members
                            .iter()
                            .enumerate()
                            .filter(|(pos, _)| {
                                if r < rem.len() && rem[r] == *pos {
                                    r += 1;
                                    false
                                } else {
                                    true
                                }
                            })
                            .map(|(_, &v)| v)
                            .peekable();
                        let mut adds = add.iter().map(|&ai| nonmembers[ai]).peekable();
                        loop {
                            match (kept.peek(), adds.peek()) {
                                (Some(&x), Some(&y)) => {
                                    if x < y {
                                        candidate.push(x);
                                        kept.next();
                                    } else {
                                        candidate.push(y);
                                        adds.next();
                                    }
                                }
                                (Some(&x), None) => {
                                    candidate.push(x);
                                    kept.next();
                                }
                                (None, Some(&y)) => {
                                    candidate.push(y);
                                    adds.next();
                                }
                                (None, None) => break,
                            }
                        }
                        let rank = space.rank_indices(&candidate);
                        let attractor = basins.attractor[rank as usize] as u64;
                        let node = node_of[&attractor];
                        *tally.entry(node).or_insert(0) += 1;
                    });
                });
            }
            debug_assert_eq!(tally.values().sum::<u64>(), ball);
            tally
        })
        .collect();

    let fmin = local_optima
        .iter()
        .map(|&r| values[r as usize])
        .fold(f64::INFINITY, f64::min);
    let fmax = local_optima
        .iter()
        .map(|&r| values[r as usize])
        .fold(f64::NEG_INFINITY, f64::max);
    let span = fmax - fmin;

    let nodes: Vec<LonNode> = local_optima
        .iter()
        .map(|&r| LonNode {
            rank: r,
            fitness: values[r as usize],
            normalized_fitness: if span > 0.0 {
                (values[r as usize] - fmin) / span
            } else {
                0.0
            },
            basin_size: basins.basin_sizes.get(&r).copied().unwrap_or(0),
        })
        .collect();

    let mut edges = Vec::new();
    for (source, tally) in per_node.into_iter().enumerate() {
        for (target, count) in tally {
            edges.push(LonEdge {
                source,
                target,
                weight: count as f64 / ball as f64,
                count,
            });
        }
    }

    Ok(LonGraph {
        n: space.n(),
        k: space.k(),
        indicator: table.kind,
        params: LonParams {
            escape_distance,
            metric: "hamming".to_string(),
        },
        nodes,
        edges,
    })
}

impl LonGraph {
    fn edges_for_export(&self, drop_self_loops: bool) -> impl Iterator<Item = &LonEdge> {
        self.edges
            .iter()
            .filter(move |e| !(drop_self_loops && e.source == e.target))
    }

    pub fn to_graphml(&self, drop_self_loops: bool) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str(
            "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
             xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
             xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
             http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
        );
        s.push_str("  <key id=\"fitness\" for=\"node\" attr.name=\"fitness\" attr.type=\"double\"/>\n");
        s.push_str("  <key id=\"normalized_fitness\" for=\"node\" attr.name=\"normalized_fitness\" attr.type=\"double\"/>\n");
        s.push_str("  <key id=\"basin_size\" for=\"node\" attr.name=\"basin_size\" attr.type=\"long\"/>\n");
        s.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
        s.push_str("  <graph id=\"lon\" edgedefault=\"directed\">\n");
        for (i, node) in self.nodes.iter().enumerate() {
            s.push_str(&format!(
                "    <node id=\"n{i}\">\n      <data key=\"fitness\">{}</data>\n      \
                 <data key=\"normalized_fitness\">{}</data>\n      \
                 <data key=\"basin_size\">{}</data>\n    </node>\n",
                node.fitness, node.normalized_fitness, node.basin_size
            ));
        }
        for e in self.edges_for_export(drop_self_loops) {
            s.push_str(&format!(
                "    <edge source=\"n{}\" target=\"n{}\">\n      \
                 <data key=\"weight\">{}</data>\n    </edge>\n",
                e.source, e.target, e.weight
            ));
        }
        s.push_str("  </graph>\n</graphml>\n");
        s
    }

    /// DOT with node width proportional to basin size and grayscale fill by
    /// normalized fitness; darker means better.
    pub fn to_dot(&self, drop_self_loops: bool) -> String {
        let max_basin = self.nodes.iter().map(|n| n.basin_size).max().unwrap_or(1).max(1);
        let mut s = String::new();
        s.push_str("digraph lon {\n");
        s.push_str("  node [shape=circle style=filled fixedsize=true];\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let width = 0.2 + 1.3 * (node.basin_size as f64 / max_basin as f64).sqrt();
            let gray = 10 + (node.normalized_fitness * 80.0).round() as u32;
            s.push_str(&format!(
                "  n{i} [width={width:.3} fillcolor=\"gray{gray}\" label=\"\" \
                 tooltip=\"rank {} fitness {}\"];\n",
                node.rank, node.fitness
            ));
        }
        for e in self.edges_for_export(drop_self_loops) {
            let penwidth = 0.3 + 4.0 * e.weight;
            s.push_str(&format!(
                "  n{} -> n{} [penwidth={penwidth:.3} weight={}];\n",
                e.source, e.target, e.weight
            ));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lon graph serializes")
    }

    pub fn from_json(data: &str) -> Result<LonGraph> {
        serde_json::from_str(data).map_err(|e| Error::Validation(format!("bad LON JSON: {e}")))
    }

    pub fn export_graphml(&self, path: &Path, drop_self_loops: bool) -> Result<()> {
        std::fs::write(path, self.to_graphml(drop_self_loops)).map_err(|e| Error::io(path, e))
    }

    pub fn export_dot(&self, path: &Path, drop_self_loops: bool) -> Result<()> {
        std::fs::write(path, self.to_dot(drop_self_loops)).map_err(|e| Error::io(path, e))
    }

    pub fn export_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{compute_basins, find_optima, neighbor_scan, Comparator};
    use crate::subsetspace::FitnessTable;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table_for(space: &ComboSpace, values: Vec<f64>) -> FitnessTable {
        FitnessTable {
            n: space.n(),
            k: space.k(),
            d: 3,
            kind: IndicatorKind::Se,
            instance_hash: [0; 32],
            values,
        }
    }

    fn lon_for(space: &ComboSpace, values: &[f64], d_max: usize) -> LonGraph {
        let cmp = Comparator::default();
        let scan = neighbor_scan(space, values, &cmp);
        let report = find_optima(space, values, &cmp, &scan);
        let basins = compute_basins(&scan);
        let table = table_for(space, values.to_vec());
        build_lon(space, &table, &report.local_optima, &basins, d_max).unwrap()
    }

    #[test]
    fn unimodal_table_gives_single_self_loop() {
        let space = ComboSpace::new(6, 2).unwrap();
        // fitness strictly decreasing toward rank 0 via index sum
        let mut values = Vec::new();
        let mut idx = Vec::new();
        for r in 0..space.count() {
            space.unrank_indices(r, &mut idx);
            values.push(idx.iter().sum::<usize>() as f64);
        }
        let lon = lon_for(&space, &values, 4);
        assert_eq!(lon.nodes.len(), 1);
        assert_eq!(lon.edges.len(), 1);
        assert_eq!(lon.edges[0].source, lon.edges[0].target);
        assert_eq!(lon.edges[0].weight, 1.0);
    }

    #[test]
    fn ball_size_formula_n50_k5() {
        let space = ComboSpace::new(50, 5).unwrap();
        assert_eq!(escape_ball_size(&space, 4), 10_126);
        assert_eq!(escape_ball_size(&space, 2), 226);
    }

    #[test]
    fn odd_escape_distance_rejected() {
        let space = ComboSpace::new(8, 3).unwrap();
        let values = vec![0.0; space.count() as usize];
        let cmp = Comparator::default();
        let scan = neighbor_scan(&space, &values, &cmp);
        let basins = compute_basins(&scan);
        let table = table_for(&space, values);
        assert!(build_lon(&space, &table, &[0], &basins, 3).is_err());
        assert!(build_lon(&space, &table, &[0], &basins, 0).is_err());
    }

    #[test]
    fn edge_weights_match_materialized_ball_oracle() {
        let space = ComboSpace::new(8, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..space.count()).map(|_| rng.gen()).collect();
        let cmp = Comparator::default();
        let scan = neighbor_scan(&space, &values, &cmp);
        let report = find_optima(&space, &values, &cmp, &scan);
        let basins = compute_basins(&scan);
        let table = table_for(&space, values.clone());
        let lon = build_lon(&space, &table, &report.local_optima, &basins, 4).unwrap();

        // oracle: scan the whole space for ball membership per optimum
        for (i, &opt) in report.local_optima.iter().enumerate() {
            let opt_subset = space.unrank(opt).unwrap();
            let mut tallies: BTreeMap<usize, u64> = BTreeMap::new();
            let mut ball = 0u64;
            for r in 0..space.count() {
                let s = space.unrank(r).unwrap();
                if opt_subset.hamming_distance(&s) <= 4 {
                    ball += 1;
                    let attractor = basins.attractor[r as usize] as u64;
                    let node = report
                        .local_optima
                        .iter()
                        .position(|&o| o == attractor)
                        .unwrap();
                    *tallies.entry(node).or_insert(0) += 1;
                }
            }
            assert_eq!(ball, escape_ball_size(&space, 4));
            let mine: BTreeMap<usize, u64> = lon
                .edges
                .iter()
                .filter(|e| e.source == i)
                .map(|e| (e.target, e.count))
                .collect();
            assert_eq!(mine, tallies, "optimum {opt}");
        }
    }

    #[test]
    fn out_weights_sum_to_one_and_edges_grow_with_distance() {
        let space = ComboSpace::new(9, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let values: Vec<f64> = (0..space.count()).map(|_| rng.gen()).collect();
        let lon2 = lon_for(&space, &values, 2);
        let lon4 = lon_for(&space, &values, 4);
        for (i, _) in lon4.nodes.iter().enumerate() {
            let total: f64 = lon4
                .edges
                .iter()
                .filter(|e| e.source == i)
                .map(|e| e.weight)
                .sum();
            assert!((total - 1.0).abs() <= 1e-12);
        }
        let set2: std::collections::HashSet<(usize, usize)> =
            lon2.edges.iter().map(|e| (e.source, e.target)).collect();
        let set4: std::collections::HashSet<(usize, usize)> =
            lon4.edges.iter().map(|e| (e.source, e.target)).collect();
        assert!(set2.is_subset(&set4));
        // every node is its own attractor and every edge endpoint is a node
        for e in &lon4.edges {
            assert!(e.source < lon4.nodes.len() && e.target < lon4.nodes.len());
        }
    }

    #[test]
    fn json_roundtrip_and_export_formats() {
        let space = ComboSpace::new(8, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..space.count()).map(|_| rng.gen()).collect();
        let lon = lon_for(&space, &values, 4);
        assert_eq!(lon.indicator, IndicatorKind::Se);
        let back = LonGraph::from_json(&lon.to_json()).unwrap();
        assert_eq!(lon, back);

        let xml = lon.to_graphml(false);
        assert!(xml.contains("<graphml"));
        assert_eq!(xml.matches("<node ").count(), lon.nodes.len());
        assert_eq!(xml.matches("<edge ").count(), lon.edges.len());

        let dot = lon.to_dot(true);
        assert!(dot.starts_with("digraph lon {"));
        assert!(dot.trim_end().ends_with('}'));
        let self_loops = lon.edges.iter().filter(|e| e.source == e.target).count();
        assert_eq!(
            dot.matches(" -> ").count(),
            lon.edges.len() - self_loops
        );
    }
}
