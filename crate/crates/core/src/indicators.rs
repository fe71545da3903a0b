//! The seven quality indicators and their subset evaluators.
//!
//! HV and NR2 are maximized; the rest are minimized. Every comparison in
//! the landscape and solver code uses the *canonical* value, which negates
//! maximized indicators so that lower is always better.
//!
//! Evaluation is order-canonical: member indices are processed ascending and
//! reference rows outer-to-inner, so a cached evaluation reproduces the
//! direct formula bit for bit.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::pointset::{Point, PointSet};
pub use crate::subsetspace::IndicatorKind;

/// Weight components are clamped to this floor before any division or
/// product, so boundary simplex weights stay usable.
pub const WEIGHT_CLAMP: f64 = 1e-6;

/// Point-count limit for the inclusion-exclusion hypervolume.
pub const HV_MAX_POINTS: usize = 25;

/// An indicator value in raw and canonical (lower-is-better) form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorValue {
    pub raw: f64,
    pub canonical: f64,
}

impl IndicatorValue {
    fn from_raw(kind: IndicatorKind, raw: f64) -> IndicatorValue {
        let canonical = if kind.is_maximized() { -raw } else { raw };
        IndicatorValue { raw, canonical }
    }

    /// The empty-set sentinel: canonically worst, so greedy forward search
    /// starts from a well-defined value for every indicator.
    fn empty(kind: IndicatorKind) -> IndicatorValue {
        let raw = if kind.is_maximized() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
        IndicatorValue {
            raw,
            canonical: f64::INFINITY,
        }
    }
}

/// Full configuration of one indicator on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorConfig {
    pub kind: IndicatorKind,
    /// Reference point `r` for HV and NR2.
    pub ref_point: Vec<f64>,
    /// Reference set `R` for IGD, IGD+, and epsilon.
    pub ref_set: Vec<Point>,
    /// Weight vector set `W` for R2 and NR2.
    pub weights: Vec<Vec<f64>>,
    /// Energy exponent `s` for SE.
    pub energy_exponent: f64,
    /// Utopian point `z*` for R2.
    pub utopian: Vec<f64>,
}

impl IndicatorConfig {
    /// The paper's setup: `r = (1.1, ..., 1.1)`, `R = P`, `W` a set of `n`
    /// uniformly distributed weight vectors, `s = d`, `z* = 0`.
    pub fn paper_default(kind: IndicatorKind, points: &PointSet) -> Result<IndicatorConfig> {
        let d = points.d;
        let weights = uniform_weights(points.len(), d, points.seed)?;
        Ok(IndicatorConfig {
            kind,
            ref_point: vec![1.1; d],
            ref_set: points.points.clone(),
            weights,
            energy_exponent: d as f64,
            utopian: vec![0.0; d],
        })
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.ref_point.len() != d || self.utopian.len() != d {
            return Err(Error::InvalidParameter(
                "reference and utopian points must have dimension d".to_string(),
            ));
        }
        if matches!(
            self.kind,
            IndicatorKind::Igd | IndicatorKind::IgdPlus | IndicatorKind::Epsilon
        ) && self.ref_set.is_empty()
        {
            return Err(Error::InvalidParameter(format!(
                "{} requires a non-empty reference set",
                self.kind
            )));
        }
        if matches!(self.kind, IndicatorKind::R2 | IndicatorKind::Nr2) {
            if self.weights.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "{} requires a non-empty weight set",
                    self.kind
                )));
            }
            for w in &self.weights {
                if w.len() != d {
                    return Err(Error::InvalidParameter(
                        "every weight vector must have dimension d".to_string(),
                    ));
                }
                if w.iter().any(|&x| x < 0.0) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidParameter(
                        "weight vectors must be nonnegative and sum to 1".to_string(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// `count` uniformly distributed weight vectors on the simplex, generated
/// with the same lattice-plus-energy construction as the linear front.
pub fn uniform_weights(count: usize, d: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let set = crate::pointset::generate_simplex_points(count, d, seed)?;
    Ok(set.points.into_iter().map(|p| p.coords).collect())
}

// ---------------------------------------------------------------------------
// Raw indicator formulas
// ---------------------------------------------------------------------------

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// IGD+ distance: shifts only where the point is worse than the reference.
#[inline]
fn dplus(p: &[f64], r: &[f64]) -> f64 {
    p.iter()
        .zip(r)
        .map(|(x, y)| (x - y).max(0.0).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Additive shift needed for `p` to weakly dominate `r`.
#[inline]
fn eps_shift(p: &[f64], r: &[f64]) -> f64 {
    p.iter()
        .zip(r)
        .map(|(x, y)| x - y)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Weighted Tchebycheff utility with clamped weights.
#[inline]
fn tchebycheff(p: &[f64], w: &[f64], z: &[f64]) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for i in 0..p.len() {
        let v = w[i].max(WEIGHT_CLAMP) * (p[i] - z[i]).abs();
        if v > m {
            m = v;
        }
    }
    m
}

/// Minimum weighted slack to the reference point, used by NR2.
#[inline]
fn nr2_slack(p: &[f64], w: &[f64], r: &[f64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..p.len() {
        let v = (r[i] - p[i]) / w[i].max(WEIGHT_CLAMP);
        if v < m {
            m = v;
        }
    }
    m
}

#[inline]
fn inv_pow_dist(a: &[f64], b: &[f64], s: f64) -> f64 {
    euclidean(a, b).powf(-s)
}

/// Exact hypervolume of the union of boxes `[p, r]` by inclusion-exclusion.
///
/// Points not dominating `r` contribute only their clipped box. Term order
/// is the ascending bitmask over the member list, so the result is
/// reproducible bit for bit. Refuses more than [`HV_MAX_POINTS`] points.
pub fn hypervolume(points: &[Point], r: &[f64]) -> Result<f64> {
    let m = points.len();
    if m == 0 {
        return Ok(0.0);
    }
    if m > HV_MAX_POINTS {
        return Err(Error::Refused(format!(
            "inclusion-exclusion hypervolume supports at most {HV_MAX_POINTS} points, got {m}; \
             an exact sweep backend would be needed for larger sets"
        )));
    }
    let d = r.len();
    let mut total = 0.0;
    for mask in 1u32..(1u32 << m) {
        let mut volume = 1.0;
        for a in 0..d {
            let mut worst = f64::NEG_INFINITY;
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                if points[i].coords[a] > worst {
                    worst = points[i].coords[a];
                }
                bits &= bits - 1;
            }
            volume *= (r[a] - worst).max(0.0);
        }
        if mask.count_ones() % 2 == 1 {
            total += volume;
        } else {
            total -= volume;
        }
    }
    Ok(total)
}

/// Inverted generational distance: mean over `R` of the distance to the
/// nearest subset member. Empty subsets evaluate to the +inf sentinel.
pub fn igd(subset: &[Point], reference: &[Point]) -> f64 {
    if subset.is_empty() {
        return f64::INFINITY;
    }
    let mut acc = 0.0;
    for r in reference {
        let mut best = f64::INFINITY;
        for p in subset {
            let v = euclidean(&r.coords, &p.coords);
            if v < best {
                best = v;
            }
        }
        acc += best;
    }
    acc / reference.len() as f64
}

/// IGD+, identical to IGD except for the dominance-aware distance.
pub fn igd_plus(subset: &[Point], reference: &[Point]) -> f64 {
    if subset.is_empty() {
        return f64::INFINITY;
    }
    let mut acc = 0.0;
    for r in reference {
        let mut best = f64::INFINITY;
        for p in subset {
            let v = dplus(&p.coords, &r.coords);
            if v < best {
                best = v;
            }
        }
        acc += best;
    }
    acc / reference.len() as f64
}

/// Unary additive epsilon: `max_r min_p max_i (p_i - r_i)`.
pub fn epsilon(subset: &[Point], reference: &[Point]) -> f64 {
    if subset.is_empty() {
        return f64::INFINITY;
    }
    let mut worst = f64::NEG_INFINITY;
    for r in reference {
        let mut best = f64::INFINITY;
        for p in subset {
            let v = eps_shift(&p.coords, &r.coords);
            if v < best {
                best = v;
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

/// R2: mean over weights of the minimum weighted Tchebycheff value.
pub fn r2(subset: &[Point], weights: &[Vec<f64>], utopian: &[f64]) -> f64 {
    if subset.is_empty() {
        return f64::INFINITY;
    }
    let mut acc = 0.0;
    for w in weights {
        let mut best = f64::INFINITY;
        for p in subset {
            let v = tchebycheff(&p.coords, w, utopian);
            if v < best {
                best = v;
            }
        }
        acc += best;
    }
    acc / weights.len() as f64
}

/// NR2, the R2-based hypervolume approximation (maximized):
/// mean over weights of `max_p min_i ((r_i - p_i)/w_i)` clamped at 0 and
/// raised to the d-th power.
pub fn nr2(subset: &[Point], weights: &[Vec<f64>], ref_point: &[f64]) -> f64 {
    if subset.is_empty() {
        return f64::NEG_INFINITY;
    }
    let d = ref_point.len() as i32;
    let mut acc = 0.0;
    for w in weights {
        let mut best = f64::NEG_INFINITY;
        for p in subset {
            let v = nr2_slack(&p.coords, w, ref_point);
            if v > best {
                best = v;
            }
        }
        acc += best.max(0.0).powi(d);
    }
    acc / weights.len() as f64
}

/// s-energy: sum over unordered pairs of `dist^{-s}`. A singleton is 0;
/// coincident points produce the +inf sentinel rather than a silent value.
pub fn s_energy(subset: &[Point], s: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..subset.len() {
        for j in (i + 1)..subset.len() {
            acc += inv_pow_dist(&subset[i].coords, &subset[j].coords, s);
        }
    }
    acc
}

/// Evaluates a subset of points directly from the configuration, without a
/// cache. Accumulation order matches the cached evaluator exactly.
pub fn evaluate_points(config: &IndicatorConfig, subset: &[Point]) -> Result<IndicatorValue> {
    if subset.is_empty() {
        return Ok(IndicatorValue::empty(config.kind));
    }
    let raw = match config.kind {
        IndicatorKind::Hv => hypervolume(subset, &config.ref_point)?,
        IndicatorKind::Igd => igd(subset, &config.ref_set),
        IndicatorKind::IgdPlus => igd_plus(subset, &config.ref_set),
        IndicatorKind::Epsilon => epsilon(subset, &config.ref_set),
        IndicatorKind::R2 => r2(subset, &config.weights, &config.utopian),
        IndicatorKind::Nr2 => nr2(subset, &config.weights, &config.ref_point),
        IndicatorKind::Se => s_energy(subset, config.energy_exponent),
    };
    Ok(IndicatorValue::from_raw(config.kind, raw))
}

// ---------------------------------------------------------------------------
// Cached subset evaluator
// ---------------------------------------------------------------------------

/// How one cached row aggregates over subset members.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowAgg {
    Min,
    Max,
}

/// How the per-row values fold into the final raw value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowFold {
    Mean,
    Max,
    /// NR2: clamp each row at 0, raise to the d-th power, then average.
    MeanClampPow(i32),
}

enum Cache {
    /// One row per reference/weight vector, one column per point.
    Rows {
        rows: Vec<Vec<f64>>,
        agg: RowAgg,
        fold: RowFold,
    },
    /// Symmetric pair table of `dist^{-s}`, row-major `n x n`.
    Pairs { inv_dist: Vec<f64>, n: usize },
    /// Hypervolume evaluates directly from coordinates.
    Direct,
}

/// Precomputed per-(reference, point) quantities for O(rows * k) subset
/// evaluation, bit-identical to the direct formulas.
pub struct Evaluator<'a> {
    points: &'a [Point],
    config: &'a IndicatorConfig,
    cache: Cache,
}

impl<'a> Evaluator<'a> {
    pub fn new(points: &'a [Point], config: &'a IndicatorConfig) -> Result<Evaluator<'a>> {
        let d = points.first().map_or(0, Point::dim);
        config.validate(d)?;
        let cache = match config.kind {
            IndicatorKind::Hv => Cache::Direct,
            IndicatorKind::Igd => Cache::Rows {
                rows: build_rows(&config.ref_set, points, |r, p| euclidean(&r.coords, &p.coords)),
                agg: RowAgg::Min,
                fold: RowFold::Mean,
            },
            IndicatorKind::IgdPlus => Cache::Rows {
                rows: build_rows(&config.ref_set, points, |r, p| dplus(&p.coords, &r.coords)),
                agg: RowAgg::Min,
                fold: RowFold::Mean,
            },
            IndicatorKind::Epsilon => Cache::Rows {
                rows: build_rows(&config.ref_set, points, |r, p| {
                    eps_shift(&p.coords, &r.coords)
                }),
                agg: RowAgg::Min,
                fold: RowFold::Max,
            },
            IndicatorKind::R2 => Cache::Rows {
                rows: config
                    .weights
                    .iter()
                    .map(|w| {
                        points
                            .iter()
                            .map(|p| tchebycheff(&p.coords, w, &config.utopian))
                            .collect()
                    })
                    .collect(),
                agg: RowAgg::Min,
                fold: RowFold::Mean,
            },
            IndicatorKind::Nr2 => Cache::Rows {
                rows: config
                    .weights
                    .iter()
                    .map(|w| {
                        points
                            .iter()
                            .map(|p| nr2_slack(&p.coords, w, &config.ref_point))
                            .collect()
                    })
                    .collect(),
                agg: RowAgg::Max,
                fold: RowFold::MeanClampPow(d as i32),
            },
            IndicatorKind::Se => {
                let n = points.len();
                let mut inv_dist = vec![0.0; n * n];
                for i in 0..n {
                    for j in (i + 1)..n {
                        let v =
                            inv_pow_dist(&points[i].coords, &points[j].coords, config.energy_exponent);
                        inv_dist[i * n + j] = v;
                        inv_dist[j * n + i] = v;
                    }
                }
                Cache::Pairs { inv_dist, n }
            }
        };
        Ok(Evaluator {
            points,
            config,
            cache,
        })
    }

    pub fn kind(&self) -> IndicatorKind {
        self.config.kind
    }

    pub fn config(&self) -> &IndicatorConfig {
        self.config
    }

    pub fn points(&self) -> &[Point] {
        self.points
    }

    /// Number of cached entries, for budget accounting and tests.
    pub fn cache_entries(&self) -> usize {
        match &self.cache {
            Cache::Rows { rows, .. } => rows.iter().map(Vec::len).sum(),
            Cache::Pairs { inv_dist, .. } => inv_dist.len(),
            Cache::Direct => 0,
        }
    }

    pub(crate) fn row_cache(&self) -> Option<(&[Vec<f64>], RowAgg, RowFold)> {
        match &self.cache {
            Cache::Rows { rows, agg, fold } => Some((rows, *agg, *fold)),
            _ => None,
        }
    }

    #[allow(dead_code)]
    pub(crate) fn pair_cache(&self) -> Option<(&[f64], usize)> {
        match &self.cache {
            Cache::Pairs { inv_dist, n } => Some((inv_dist, *n)),
            _ => None,
        }
    }

    /// Evaluates the subset given by member indices. Indices are sorted
    /// ascending internally, so any input ordering produces the identical
    /// value.
    pub fn evaluate_indices(&self, indices: &[usize]) -> Result<IndicatorValue> {
        if indices.is_empty() {
            return Ok(IndicatorValue::empty(self.config.kind));
        }
        if indices.windows(2).all(|w| w[0] < w[1]) {
            return self.evaluate_sorted(indices);
        }
        let mut sorted: SmallVec<[usize; 16]> = SmallVec::from_slice(indices);
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSolution("repeated member index".to_string()));
        }
        self.evaluate_sorted(&sorted)
    }

    fn evaluate_sorted(&self, indices: &[usize]) -> Result<IndicatorValue> {
        let raw = match &self.cache {
            Cache::Rows { rows, agg, fold } => {
                fold_rows(rows, indices, *agg, *fold)
            }
            Cache::Pairs { inv_dist, n } => {
                let mut acc = 0.0;
                for (a, &i) in indices.iter().enumerate() {
                    for &j in &indices[a + 1..] {
                        acc += inv_dist[i * n + j];
                    }
                }
                acc
            }
            Cache::Direct => {
                let members: Vec<Point> =
                    indices.iter().map(|&i| self.points[i].clone()).collect();
                hypervolume(&members, &self.config.ref_point)?
            }
        };
        Ok(IndicatorValue::from_raw(self.config.kind, raw))
    }

    /// Canonical fitness of the subset, for table builds.
    pub fn canonical(&self, indices: &[usize]) -> Result<f64> {
        Ok(self.evaluate_indices(indices)?.canonical)
    }
}

fn build_rows<F: Fn(&Point, &Point) -> f64>(
    reference: &[Point],
    points: &[Point],
    entry: F,
) -> Vec<Vec<f64>> {
    reference
        .iter()
        .map(|r| points.iter().map(|p| entry(r, p)).collect())
        .collect()
}

#[inline]
pub(crate) fn row_value(row: &[f64], indices: &[usize], agg: RowAgg) -> f64 {
    match agg {
        RowAgg::Min => {
            let mut m = f64::INFINITY;
            for &i in indices {
                if row[i] < m {
                    m = row[i];
                }
            }
            m
        }
        RowAgg::Max => {
            let mut m = f64::NEG_INFINITY;
            for &i in indices {
                if row[i] > m {
                    m = row[i];
                }
            }
            m
        }
    }
}

#[inline]
pub(crate) fn fold_rows(rows: &[Vec<f64>], indices: &[usize], agg: RowAgg, fold: RowFold) -> f64 {
    match fold {
        RowFold::Mean => {
            let mut acc = 0.0;
            for row in rows {
                acc += row_value(row, indices, agg);
            }
            acc / rows.len() as f64
        }
        RowFold::Max => {
            let mut worst = f64::NEG_INFINITY;
            for row in rows {
                let v = row_value(row, indices, agg);
                if v > worst {
                    worst = v;
                }
            }
            worst
        }
        RowFold::MeanClampPow(d) => {
            let mut acc = 0.0;
            for row in rows {
                acc += row_value(row, indices, agg).max(0.0).powi(d);
            }
            acc / rows.len() as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec())
    }

    fn random_points(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
        (0..n)
            .map(|_| Point::new((0..d).map(|_| rng.gen::<f64>()).collect()))
            .collect()
    }

    #[test]
    fn hv_single_box() {
        let v = hypervolume(&[pt(&[0.0, 0.0, 0.0])], &[1.1, 1.1, 1.1]).unwrap();
        assert!((v - 1.331).abs() < 1e-12);
    }

    #[test]
    fn hv_contained_box_adds_nothing() {
        let v = hypervolume(
            &[pt(&[0.0, 0.0, 0.0]), pt(&[0.5, 0.5, 0.5])],
            &[1.1, 1.1, 1.1],
        )
        .unwrap();
        assert!((v - 1.331).abs() < 1e-12);
    }

    #[test]
    fn hv_refuses_large_sets() {
        let points: Vec<Point> = (0..26)
            .map(|i| pt(&[i as f64 / 26.0, 1.0 - i as f64 / 26.0]))
            .collect();
        assert!(matches!(
            hypervolume(&points, &[1.1, 1.1]),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn hv_clips_points_beyond_reference() {
        // the second point does not dominate r on axis 0; only its clipped
        // (empty) box contributes
        let v = hypervolume(&[pt(&[0.6, 0.6]), pt(&[1.3, 0.0])], &[1.1, 1.1]).unwrap();
        let expect = 0.5 * 0.5 + 0.0;
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn igd_345_triangle() {
        let r = [pt(&[0.0, 0.0])];
        let s = [pt(&[3.0, 4.0])];
        assert!((igd(&s, &r) - 5.0).abs() < 1e-12);
        assert!((igd_plus(&s, &r) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn igd_plus_clamps_dominating_points() {
        let r = [pt(&[1.0, 1.0])];
        let s = [pt(&[0.0, 0.0])];
        assert!((igd(&s, &r) - 2.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(igd_plus(&s, &r), 0.0);
    }

    #[test]
    fn igd_of_the_reference_itself_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = random_points(6, 3, &mut rng);
        assert_eq!(igd(&r, &r), 0.0);
        assert_eq!(igd_plus(&r, &r), 0.0);
    }

    #[test]
    fn epsilon_examples() {
        let r = [pt(&[0.0, 0.0])];
        let s = [pt(&[0.3, 0.1])];
        assert!((epsilon(&s, &r) - 0.3).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let set = random_points(5, 3, &mut rng);
        assert_eq!(epsilon(&set, &set), 0.0);
    }

    #[test]
    fn epsilon_matches_triple_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = random_points(1 + rng.gen_range(0..5), 3, &mut rng);
            let r = random_points(1 + rng.gen_range(0..5), 3, &mut rng);
            // oracle: explicit loops over (r, p, axis)
            let mut worst = f64::NEG_INFINITY;
            for rp in &r {
                let mut best = f64::INFINITY;
                for p in &s {
                    let mut shift = f64::NEG_INFINITY;
                    for a in 0..3 {
                        shift = shift.max(p.coords[a] - rp.coords[a]);
                    }
                    best = best.min(shift);
                }
                worst = worst.max(best);
            }
            assert_eq!(epsilon(&s, &r), worst);
        }
    }

    #[test]
    fn r2_examples() {
        let z = [0.0, 0.0, 0.0];
        assert_eq!(r2(&[pt(&[0.0, 0.0, 0.0])], &[vec![1.0, 0.0, 0.0]], &z), 0.0);
        let v = r2(&[pt(&[0.5, 1.0, 1.0])], &[vec![1.0, 0.0, 0.0]], &z);
        assert!((v - 0.5).abs() < 1e-5, "{v}");
    }

    #[test]
    fn r2_matches_double_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let s = random_points(1 + rng.gen_range(0..5), 3, &mut rng);
            let mut weights = Vec::new();
            for _ in 0..4 {
                let mut w: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();
                let sum: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= sum);
                weights.push(w);
            }
            let z = [0.0; 3];
            let mut acc = 0.0;
            for w in &weights {
                let mut best = f64::INFINITY;
                for p in &s {
                    let mut t = f64::NEG_INFINITY;
                    for a in 0..3 {
                        t = t.max(w[a].max(WEIGHT_CLAMP) * (p.coords[a] - z[a]).abs());
                    }
                    best = best.min(t);
                }
                acc += best;
            }
            assert_eq!(r2(&s, &weights, &z), acc / weights.len() as f64);
        }
    }

    #[test]
    fn nr2_zero_slack_and_1d_hv() {
        let r = [1.1, 1.1];
        assert_eq!(nr2(&[pt(&[1.1, 1.1])], &[vec![0.5, 0.5]], &r), 0.0);
        // in one dimension NR2 reduces to HV
        let v = nr2(&[pt(&[0.0])], &[vec![1.0]], &[1.1]);
        assert!((v - 1.1).abs() < 1e-12);
    }

    #[test]
    fn se_examples() {
        assert_eq!(s_energy(&[pt(&[0.3, 0.4])], 1.0), 0.0);
        assert_eq!(s_energy(&[pt(&[0.0, 0.0]), pt(&[1.0, 0.0])], 1.0), 1.0);
        let v = s_energy(
            &[pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[2.0, 0.0])],
            1.0,
        );
        assert!((v - 2.5).abs() < 1e-15);
        // coincident points surface as +inf, never a silent finite value
        assert_eq!(
            s_energy(&[pt(&[0.5, 0.5]), pt(&[0.5, 0.5])], 2.0),
            f64::INFINITY
        );
    }

    #[test]
    fn canonical_negates_only_maximized_kinds() {
        let v = IndicatorValue::from_raw(IndicatorKind::Hv, 1.331);
        assert_eq!(v.canonical, -1.331);
        let v = IndicatorValue::from_raw(IndicatorKind::Igd, 0.2);
        assert_eq!(v.canonical, 0.2);
    }

    #[test]
    fn empty_set_sentinel() {
        for kind in IndicatorKind::ALL {
            let points = vec![pt(&[0.2, 0.3]), pt(&[0.3, 0.2])];
            let config = IndicatorConfig {
                kind,
                ref_point: vec![1.1, 1.1],
                ref_set: points.clone(),
                weights: vec![vec![0.5, 0.5]],
                energy_exponent: 2.0,
                utopian: vec![0.0, 0.0],
            };
            let ev = Evaluator::new(&points, &config).unwrap();
            assert_eq!(ev.evaluate_indices(&[]).unwrap().canonical, f64::INFINITY);
        }
    }

    fn toy_config(kind: IndicatorKind, points: &[Point], seed: u64) -> IndicatorConfig {
        let d = points[0].dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        for _ in 0..6 {
            let mut w: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() + 0.01).collect();
            let sum: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= sum);
            weights.push(w);
        }
        IndicatorConfig {
            kind,
            ref_point: vec![1.1; d],
            ref_set: points.to_vec(),
            weights,
            energy_exponent: d as f64,
            utopian: vec![0.0; d],
        }
    }

    #[test]
    fn cached_equals_direct_bitwise_on_random_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let points = random_points(12, 3, &mut rng);
        for kind in IndicatorKind::ALL {
            let config = toy_config(kind, &points, 101);
            let ev = Evaluator::new(&points, &config).unwrap();
            for _ in 0..1000 {
                let k = 1 + rng.gen_range(0..5);
                let mut idx: Vec<usize> = (0..12).collect();
                for i in 0..k {
                    let j = rng.gen_range(i..12);
                    idx.swap(i, j);
                }
                let mut members: Vec<usize> = idx[..k].to_vec();
                members.sort_unstable();
                let subset: Vec<Point> = members.iter().map(|&i| points[i].clone()).collect();
                let cached = ev.evaluate_indices(&members).unwrap();
                let direct = evaluate_points(&config, &subset).unwrap();
                assert_eq!(cached.canonical.to_bits(), direct.canonical.to_bits(), "{kind}");
            }
        }
    }

    #[test]
    fn cache_size_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let points = random_points(10, 3, &mut rng);
        let config = toy_config(IndicatorKind::Igd, &points, 7);
        let ev = Evaluator::new(&points, &config).unwrap();
        assert_eq!(ev.cache_entries(), 10 * 10); // |R| x n with R = P

        let se_config = toy_config(IndicatorKind::Se, &points, 7);
        let se = Evaluator::new(&points, &se_config).unwrap();
        let (pairs, n) = se.pair_cache().unwrap();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(pairs[i * n + j].to_bits(), pairs[j * n + i].to_bits());
            }
        }
    }

    #[test]
    fn evaluation_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let points = random_points(9, 3, &mut rng);
        for kind in IndicatorKind::ALL {
            let config = toy_config(kind, &points, 3);
            let ev = Evaluator::new(&points, &config).unwrap();
            let a = ev.evaluate_indices(&[1, 4, 7]).unwrap();
            let b = ev.evaluate_indices(&[7, 1, 4]).unwrap();
            assert_eq!(a.canonical.to_bits(), b.canonical.to_bits());
        }
    }

    #[test]
    fn hv_monotone_under_containment() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let points = random_points(8, 3, &mut rng);
            let small: Vec<Point> = points[..4].to_vec();
            let hv_small = hypervolume(&small, &[1.1; 3]).unwrap();
            let hv_big = hypervolume(&points, &[1.1; 3]).unwrap();
            assert!(hv_big >= hv_small - 1e-12);
        }
    }

    #[test]
    fn hv_respects_weak_dominance_between_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..100 {
            let s1 = random_points(5, 3, &mut rng);
            // s2: each point of s1 worsened by a nonnegative shift
            let s2: Vec<Point> = s1
                .iter()
                .map(|p| {
                    Point::new(
                        p.coords
                            .iter()
                            .map(|c| (c + rng.gen::<f64>() * 0.1).min(1.09))
                            .collect(),
                    )
                })
                .collect();
            let h1 = hypervolume(&s1, &[1.1; 3]).unwrap();
            let h2 = hypervolume(&s2, &[1.1; 3]).unwrap();
            assert!(h1 >= h2 - 1e-12);
        }
    }

    #[test]
    fn igd_family_nonincreasing_under_addition() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let reference = random_points(10, 3, &mut rng);
        for _ in 0..50 {
            let base = random_points(4, 3, &mut rng);
            let mut extended = base.clone();
            extended.push(Point::new(vec![rng.gen(), rng.gen(), rng.gen()]));
            for f in [igd, igd_plus, epsilon] {
                assert!(f(&extended, &reference) <= f(&base, &reference) + 1e-15);
            }
        }
    }
}
