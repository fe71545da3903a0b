//! Point sets on parametric Pareto-front shapes.
//!
//! Seven front shapes are supported: the linear simplex front, the
//! nonconvex (spherical) and convex fronts derived from it, their three
//! inverted counterparts, and a discontinuous front sampled from a grid.
//! All generated sets are mutually non-dominated, duplicate-free, and
//! normalized into `[0,1]^d`.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum coordinate difference under which two points count as duplicates.
pub const DUPLICATE_TOL: f64 = 1e-12;

/// A point in objective space, coordinates in `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn euclidean_distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    fn max_coord_diff(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `p` dominates `q`: no worse in every objective, better in at least one.
pub fn dominates(p: &Point, q: &Point) -> bool {
    let mut strict = false;
    for (a, b) in p.coords.iter().zip(&q.coords) {
        if a > b {
            return false;
        }
        if a < b {
            strict = true;
        }
    }
    strict
}

/// `p` weakly dominates `q`: no worse in every objective.
pub fn weakly_dominates(p: &Point, q: &Point) -> bool {
    p.coords.iter().zip(&q.coords).all(|(a, b)| a <= b)
}

/// The seven Pareto-front shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Linear,
    Convex,
    Nonconvex,
    InvLinear,
    InvConvex,
    InvNonconvex,
    Discontinuous,
}

impl Shape {
    pub const ALL: [Shape; 7] = [
        Shape::Linear,
        Shape::Convex,
        Shape::Nonconvex,
        Shape::InvLinear,
        Shape::InvConvex,
        Shape::InvNonconvex,
        Shape::Discontinuous,
    ];

    /// The six continuous shapes, in the paper-figure order.
    pub const CONTINUOUS: [Shape; 6] = [
        Shape::Linear,
        Shape::Convex,
        Shape::Nonconvex,
        Shape::InvLinear,
        Shape::InvConvex,
        Shape::InvNonconvex,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Shape::Linear => "linear",
            Shape::Convex => "convex",
            Shape::Nonconvex => "nonconvex",
            Shape::InvLinear => "inv-linear",
            Shape::InvConvex => "inv-convex",
            Shape::InvNonconvex => "inv-nonconvex",
            Shape::Discontinuous => "discontinuous",
        }
    }

    pub fn parse(s: &str) -> Result<Shape> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Shape::Linear),
            "convex" => Ok(Shape::Convex),
            "nonconvex" | "concave" => Ok(Shape::Nonconvex),
            "inv-linear" | "invlinear" => Ok(Shape::InvLinear),
            "inv-convex" | "invconvex" => Ok(Shape::InvConvex),
            "inv-nonconvex" | "invnonconvex" => Ok(Shape::InvNonconvex),
            "discontinuous" => Ok(Shape::Discontinuous),
            other => Err(Error::InvalidParameter(format!("unknown shape `{other}`"))),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An ordered, non-dominated point set on one of the seven shapes.
///
/// The point order is fixed and persisted: point index `i` defines bit `i`
/// of every subset built over this set.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub shape: Shape,
    pub d: usize,
    pub seed: u64,
}

/// Issues found while validating a loaded point set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PointSetWarnings {
    /// Some point dominates another.
    pub dominated_pair: bool,
    /// Two points coincide within [`DUPLICATE_TOL`].
    pub duplicate_pair: bool,
    /// Some coordinate lies outside `[0,1]`.
    pub out_of_range: bool,
}

impl PointSetWarnings {
    pub fn clean(&self) -> bool {
        !self.dominated_pair && !self.duplicate_pair && !self.out_of_range
    }
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinates flattened row-major, for hashing and cache building.
    pub fn flat_coords(&self) -> Vec<f64> {
        self.points
            .iter()
            .flat_map(|p| p.coords.iter().copied())
            .collect()
    }
}

/// True iff no point of the set dominates another. `O(n^2 d)`.
pub fn is_nondominated_set(points: &[Point]) -> bool {
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i != j && dominates(p, q) {
                return false;
            }
        }
    }
    true
}

/// Full pairwise validation: dominance, duplicates, coordinate range.
pub fn validate_point_set(points: &[Point]) -> PointSetWarnings {
    let mut w = PointSetWarnings::default();
    for (i, p) in points.iter().enumerate() {
        if p.coords.iter().any(|c| !(0.0..=1.0).contains(c)) {
            w.out_of_range = true;
        }
        for q in points.iter().skip(i + 1) {
            if p.max_coord_diff(q) < DUPLICATE_TOL {
                w.duplicate_pair = true;
            } else if dominates(p, q) || dominates(q, p) {
                w.dominated_pair = true;
            }
        }
    }
    w
}

// ---------------------------------------------------------------------------
// Linear front: Das-Dennis lattice + Riesz s-energy descent
// ---------------------------------------------------------------------------

fn das_dennis_count(partitions: usize, d: usize) -> usize {
    // C(partitions + d - 1, d - 1), small values only
    let mut c: u128 = 1;
    for i in 0..(d - 1) {
        c = c * (partitions + i + 1) as u128 / (i + 1) as u128;
    }
    c as usize
}

fn das_dennis_recurse(out: &mut Vec<Vec<f64>>, cur: &mut Vec<usize>, left: usize, h: usize, d: usize) {
    if cur.len() == d - 1 {
        let mut p: Vec<f64> = cur.iter().map(|&v| v as f64 / h as f64).collect();
        p.push(left as f64 / h as f64);
        out.push(p);
        return;
    }
    for v in 0..=left {
        cur.push(v);
        das_dennis_recurse(out, cur, left - v, h, d);
        cur.pop();
    }
}

/// The Das-Dennis simplex lattice with `partitions` divisions per axis.
pub fn das_dennis_lattice(partitions: usize, d: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(das_dennis_count(partitions, d));
    das_dennis_recurse(&mut out, &mut Vec::new(), partitions, partitions, d);
    out.into_iter().map(Point::new).collect()
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let d = v.len();
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate().take(d) {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

fn riesz_energy(points: &[Vec<f64>], s: f64) -> f64 {
    let mut e = 0.0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let r2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            e += r2.max(1e-30).powf(-s / 2.0);
        }
    }
    e
}

fn riesz_gradient(points: &[Vec<f64>], s: f64, grad: &mut [Vec<f64>]) {
    let d = points[0].len();
    for g in grad.iter_mut() {
        g.iter_mut().for_each(|x| *x = 0.0);
    }
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let r2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let r2 = r2.max(1e-30);
            // d/dp_i of r^{-s} = -s (p_i - p_j) r^{-(s+2)}
            let coef = -s * r2.powf(-(s + 2.0) / 2.0);
            for a in 0..d {
                let diff = points[i][a] - points[j][a];
                grad[i][a] += coef * diff;
                grad[j][a] -= coef * diff;
            }
        }
    }
}

/// Generates `n` well-spaced points on the unit simplex (the linear front).
///
/// Starts from the largest Das-Dennis lattice of size at most `n`, fills up
/// with random simplex points, then runs projected gradient descent on the
/// Riesz s-energy (`s = 2d`) with the `d` extreme vertices frozen. The step
/// is halved whenever the energy increases; the iteration budget is fixed at
/// 1000, so the result is deterministic for a given `(n, d, seed)`.
pub fn generate_simplex_points(n: usize, d: usize, seed: u64) -> Result<PointSet> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d must be >= 2, got {d}")));
    }
    if n < d {
        return Err(Error::InvalidParameter(format!(
            "n must be >= d (need the {d} extreme vertices), got n={n}"
        )));
    }

    // Largest lattice that fits within n.
    let mut partitions = 1;
    while das_dennis_count(partitions + 1, d) <= n {
        partitions += 1;
    }
    let mut pts: Vec<Vec<f64>> = das_dennis_lattice(partitions, d)
        .into_iter()
        .map(|p| p.coords)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while pts.len() < n {
        let cand = random_simplex_point(d, &mut rng);
        let too_close = pts.iter().any(|p| {
            p.iter()
                .zip(&cand)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                < 1e-6
        });
        if !too_close {
            pts.push(cand);
        }
    }

    // Freeze the extreme vertices so the front keeps its full spread.
    let frozen: Vec<bool> = pts
        .iter()
        .map(|p| p.iter().any(|&c| c == 1.0))
        .collect();

    let s = 2.0 * d as f64;
    let mut grad = vec![vec![0.0; d]; n];
    let mut energy = riesz_energy(&pts, s);
    riesz_gradient(&pts, s, &mut grad);
    let gmax = grad
        .iter()
        .zip(&frozen)
        .filter(|(_, &f)| !f)
        .flat_map(|(g, _)| g.iter().map(|x| x.abs()))
        .fold(0.0, f64::max);
    let min_dist = min_pairwise_distance(&pts);
    let mut step = if gmax > 0.0 { 0.05 * min_dist / gmax } else { 0.0 };

    for _ in 0..1000 {
        if step <= 0.0 || !step.is_finite() {
            break;
        }
        let mut trial = pts.clone();
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            for a in 0..d {
                trial[i][a] -= step * grad[i][a];
            }
            project_simplex(&mut trial[i]);
        }
        let trial_energy = riesz_energy(&trial, s);
        if trial_energy < energy {
            pts = trial;
            energy = trial_energy;
            riesz_gradient(&pts, s, &mut grad);
            step *= 1.05;
        } else {
            step *= 0.5;
        }
    }

    // Tighten the simplex constraint after projection round-off.
    for p in pts.iter_mut() {
        let sum: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= sum);
    }

    let points: Vec<Point> = pts.into_iter().map(Point::new).collect();
    let set = PointSet {
        points,
        shape: Shape::Linear,
        d,
        seed,
    };
    check_generated(&set)?;
    Ok(set)
}

fn random_simplex_point(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // Dirichlet(1,...,1) via normalized exponentials
    let mut p: Vec<f64> = (0..d)
        .map(|_| -(rng.gen::<f64>().max(f64::MIN_POSITIVE)).ln())
        .collect();
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= sum);
    p
}

fn min_pairwise_distance(pts: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let r2: f64 = pts[i]
                .iter()
                .zip(&pts[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            best = best.min(r2.sqrt());
        }
    }
    best
}

fn check_generated(set: &PointSet) -> Result<()> {
    let w = validate_point_set(&set.points);
    if w.duplicate_pair {
        return Err(Error::Validation(format!(
            "generated {} set contains duplicate points",
            set.shape
        )));
    }
    if w.dominated_pair {
        return Err(Error::Validation(format!(
            "generated {} set contains a dominated point",
            set.shape
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Shape transforms
// ---------------------------------------------------------------------------

/// Translates a linear-front set onto another shape, preserving point order.
///
/// Nonconvex projects onto the unit sphere; convex additionally applies the
/// convDTLZ2 mapping (`q_i = c_i^4` for `i < d`, `q_d = c_d^2`) followed by a
/// per-axis min-max normalization; inverted shapes are `1 - q` of the
/// corresponding conventional shape.
pub fn transform(base: &PointSet, shape: Shape) -> Result<PointSet> {
    if base.shape != Shape::Linear {
        return Err(Error::InvalidParameter(format!(
            "transform expects a linear base set, got {}",
            base.shape
        )));
    }
    let d = base.d;
    let points = match shape {
        Shape::Linear => base.points.clone(),
        Shape::Nonconvex => to_sphere(&base.points),
        Shape::Convex => to_convex(&base.points, d),
        Shape::InvLinear => invert(&base.points),
        Shape::InvNonconvex => invert(&to_sphere(&base.points)),
        Shape::InvConvex => invert(&to_convex(&base.points, d)),
        Shape::Discontinuous => {
            return Err(Error::InvalidParameter(
                "the discontinuous front is not a transform of the linear one; \
                 use generate_discontinuous"
                    .to_string(),
            ))
        }
    };
    let set = PointSet {
        points,
        shape,
        d,
        seed: base.seed,
    };
    check_generated(&set)?;
    Ok(set)
}

fn to_sphere(points: &[Point]) -> Vec<Point> {
    points
        .iter()
        .map(|p| {
            let norm = p.coords.iter().map(|c| c * c).sum::<f64>().sqrt();
            Point::new(p.coords.iter().map(|c| c / norm).collect())
        })
        .collect()
}

fn to_convex(points: &[Point], d: usize) -> Vec<Point> {
    let sphere = to_sphere(points);
    let mapped: Vec<Vec<f64>> = sphere
        .iter()
        .map(|c| {
            let mut q: Vec<f64> = c.coords[..d - 1].iter().map(|x| x.powi(4)).collect();
            q.push(c.coords[d - 1].powi(2));
            q
        })
        .collect();
    min_max_normalize(mapped).into_iter().map(Point::new).collect()
}

fn invert(points: &[Point]) -> Vec<Point> {
    points
        .iter()
        .map(|p| Point::new(p.coords.iter().map(|c| 1.0 - c).collect()))
        .collect()
}

fn min_max_normalize(mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return rows;
    }
    let d = rows[0].len();
    for a in 0..d {
        let min = rows.iter().map(|r| r[a]).fold(f64::INFINITY, f64::min);
        let max = rows.iter().map(|r| r[a]).fold(f64::NEG_INFINITY, f64::max);
        let span = max - min;
        if span > 0.0 {
            for r in rows.iter_mut() {
                r[a] = (r[a] - min) / span;
            }
        } else {
            for r in rows.iter_mut() {
                r[a] = 0.0;
            }
        }
    }
    rows
}

// ---------------------------------------------------------------------------
// Discontinuous front (DTLZ7 family)
// ---------------------------------------------------------------------------

/// Non-dominated, normalized points of the DTLZ7-family front sampled on a
/// `grid`-per-axis lattice over the first `d-1` objectives.
pub fn discontinuous_grid_points(d: usize, grid: usize) -> Vec<Point> {
    assert!(d >= 2 && grid >= 2);
    let mut cells: Vec<Vec<f64>> = Vec::new();
    let mut idx = vec![0usize; d - 1];
    loop {
        let f: Vec<f64> = idx.iter().map(|&i| i as f64 / (grid - 1) as f64).collect();
        let tail: f64 = f
            .iter()
            .map(|&fi| fi / 2.0 * (1.0 + (3.0 * std::f64::consts::PI * fi).sin()))
            .sum();
        let mut row = f;
        row.push(2.0 * (d as f64 - tail));
        cells.push(row);
        // odometer over the (d-1)-dimensional grid
        let mut axis = 0;
        loop {
            idx[axis] += 1;
            if idx[axis] < grid {
                break;
            }
            idx[axis] = 0;
            axis += 1;
            if axis == d - 1 {
                let pts: Vec<Point> = cells.into_iter().map(Point::new).collect();
                let nd = nondominated_filter(pts);
                let rows = min_max_normalize(nd.into_iter().map(|p| p.coords).collect());
                return rows.into_iter().map(Point::new).collect();
            }
        }
    }
}

fn nondominated_filter(points: Vec<Point>) -> Vec<Point> {
    let keep: Vec<bool> = points
        .iter()
        .map(|p| !points.iter().any(|q| dominates(q, p)))
        .collect();
    points
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

/// Generates a discontinuous front with exactly `n` points when possible.
///
/// Grid resolutions are searched in ascending order and the smallest one
/// whose non-dominated count equals `n` is used. If no resolution matches,
/// the closest count `>= n` is truncated by repeatedly dropping the point
/// with the smallest nearest-neighbor distance.
pub fn generate_discontinuous(d: usize, n: usize, seed: u64) -> Result<PointSet> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d must be >= 2, got {d}")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    let mut best: Option<Vec<Point>> = None;
    for grid in 3..=40usize {
        // keep the candidate grid tractable in higher dimensions
        if (grid as f64).powi(d as i32 - 1) > 2e5 {
            break;
        }
        let pts = discontinuous_grid_points(d, grid);
        if pts.len() == n {
            best = Some(pts);
            break;
        }
        if pts.len() > n {
            let better = match &best {
                None => true,
                Some(b) => pts.len() < b.len(),
            };
            if better {
                best = Some(pts);
            }
        }
    }
    let mut pts = best.ok_or_else(|| {
        Error::InvalidParameter(format!(
            "no grid resolution yields at least n={n} non-dominated points for d={d}"
        ))
    })?;
    while pts.len() > n {
        pts.remove(most_crowded_index(&pts));
    }
    let set = PointSet {
        points: pts,
        shape: Shape::Discontinuous,
        d,
        seed,
    };
    check_generated(&set)?;
    Ok(set)
}

fn most_crowded_index(points: &[Point]) -> usize {
    let mut best_idx = 0;
    let mut best_dist = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let nn = points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| p.euclidean_distance(q))
            .fold(f64::INFINITY, f64::min);
        if nn < best_dist {
            best_dist = nn;
            best_idx = i;
        }
    }
    best_idx
}

/// Generates a point set of any shape with the paper's construction:
/// a common linear base per seed, transformed per shape.
pub fn generate(shape: Shape, n: usize, d: usize, seed: u64) -> Result<PointSet> {
    match shape {
        Shape::Discontinuous => generate_discontinuous(d, n, seed),
        Shape::Linear => generate_simplex_points(n, d, seed),
        other => {
            let base = generate_simplex_points(n, d, seed)?;
            transform(&base, other)
        }
    }
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PointSetFile {
    schema: String,
    shape: Shape,
    d: usize,
    n: usize,
    seed: u64,
    points: Vec<Vec<f64>>,
}

pub const POINTSET_SCHEMA: &str = "issp-pointset/1";

impl PointSet {
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = PointSetFile {
            schema: POINTSET_SCHEMA.to_string(),
            shape: self.shape,
            d: self.d,
            n: self.points.len(),
            seed: self.seed,
            points: self.points.iter().map(|p| p.coords.clone()).collect(),
        };
        let json = serde_json::to_string_pretty(&file)
            .map_err(|e| Error::parse(path, e.to_string()))?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    /// Loads a point set, returning validation warnings alongside it.
    pub fn load(path: &Path) -> Result<(PointSet, PointSetWarnings)> {
        let data = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: PointSetFile =
            serde_json::from_str(&data).map_err(|e| Error::parse(path, e.to_string()))?;
        if file.schema != POINTSET_SCHEMA {
            return Err(Error::parse(
                path,
                format!("unsupported schema `{}`", file.schema),
            ));
        }
        if file.d < 2 {
            return Err(Error::parse(path, format!("d must be >= 2, got {}", file.d)));
        }
        if file.points.len() != file.n {
            return Err(Error::parse(
                path,
                format!("n={} but {} points present", file.n, file.points.len()),
            ));
        }
        for (i, row) in file.points.iter().enumerate() {
            if row.len() != file.d {
                return Err(Error::parse(
                    path,
                    format!("point {} has {} coordinates, expected d={}", i, row.len(), file.d),
                ));
            }
            if row.iter().any(|c| !c.is_finite()) {
                return Err(Error::parse(path, format!("point {i} has a non-finite coordinate")));
            }
        }
        let points: Vec<Point> = file.points.into_iter().map(Point::new).collect();
        let warnings = validate_point_set(&points);
        Ok((
            PointSet {
                points,
                shape: file.shape,
                d: file.d,
                seed: file.seed,
            },
            warnings,
        ))
    }
}
