//! Baseline subset-selection methods: forward greedy (GS-F), backward
//! greedy (GS-B), and best-improvement local search (LS), with seeded
//! randomized tie-breaking and multi-run orchestration.
//!
//! Candidate values are exactly the canonical values the fitness table
//! stores: the row-cache incremental screening uses only exact min/max
//! combines, and SE/HV candidates are evaluated on the canonical path.
//! Ties are detected by exact value equality, and the tie-break generator
//! is consulted only when a tie actually occurs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::{Evaluator, IndicatorValue};
use crate::instance::IsspInstance;
use crate::indicators::{RowAgg, RowFold};
use crate::subsetspace::{FitnessTable, Subset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    GsF,
    GsB,
    Ls,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::GsF, Method::GsB, Method::Ls];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::GsF => "gsf",
            Method::GsB => "gsb",
            Method::Ls => "ls",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        match s.to_ascii_lowercase().as_str() {
            "gsf" | "gs-f" | "greedy-forward" => Ok(Method::GsF),
            "gsb" | "gs-b" | "greedy-backward" => Ok(Method::GsB),
            "ls" | "local-search" => Ok(Method::Ls),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of one solver run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub method: Method,
    pub seed: u64,
    pub best_subset: Subset,
    pub best_value: IndicatorValue,
    /// Min-max normalized canonical value; present when a full table was
    /// supplied to [`run_experiment`].
    pub normalized_value: Option<f64>,
    pub evaluations: u64,
    pub trajectory: Option<Vec<(usize, f64)>>,
}

/// Outcome of a single search, before experiment-level decoration.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best_subset: Subset,
    pub best_value: IndicatorValue,
    pub evaluations: u64,
    pub moves: usize,
    pub trajectory: Option<Vec<(usize, f64)>>,
}

// ---------------------------------------------------------------------------
// Incremental candidate evaluation
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct RowState {
    /// Aggregate over current members (min or max by the row agg).
    v1: f64,
    /// First member index attaining `v1` in ascending order.
    i1: usize,
    /// Aggregate over members excluding `i1`.
    v2: f64,
}

struct CandidateEval<'e, 'a> {
    ev: &'e Evaluator<'a>,
    members: Vec<usize>,
    rows: Option<Vec<RowState>>,
}

impl<'e, 'a> CandidateEval<'e, 'a> {
    fn new(ev: &'e Evaluator<'a>) -> Self {
        CandidateEval {
            ev,
            members: Vec::new(),
            rows: None,
        }
    }

    fn members(&self) -> &[usize] {
        &self.members
    }

    fn set_members(&mut self, members: Vec<usize>) {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        self.members = members;
        self.rows = self.ev.row_cache().map(|(rows, agg, _)| {
            rows.iter()
                .map(|row| {
                    let mut state = RowState {
                        v1: init_for(agg),
                        i1: usize::MAX,
                        v2: init_for(agg),
                    };
                    for &i in &self.members {
                        let v = row[i];
                        if improves(agg, v, state.v1) {
                            state.v2 = state.v1;
                            state.v1 = v;
                            state.i1 = i;
                        } else if improves(agg, v, state.v2) {
                            state.v2 = v;
                        }
                    }
                    state
                })
                .collect()
        });
    }

    /// Canonical value of `members + {p}`.
    fn value_add(&self, p: usize) -> Result<f64> {
        if let (Some(states), Some((rows, agg, fold))) = (&self.rows, self.ev.row_cache()) {
            let folded = fold_row_values(
                states
                    .iter()
                    .zip(rows)
                    .map(|(s, row)| combine(agg, s.v1, row[p])),
                rows.len(),
                fold,
            );
            return Ok(canonicalize(self.ev, folded));
        }
        self.with_candidate(None, Some(p))
    }

    /// Canonical value of `members - {q}`.
    fn value_remove(&self, q: usize) -> Result<f64> {
        if self.members.len() <= 1 {
            return Ok(f64::INFINITY);
        }
        if let (Some(states), Some((rows, _, fold))) = (&self.rows, self.ev.row_cache()) {
            let folded = fold_row_values(
                states.iter().map(|s| if s.i1 == q { s.v2 } else { s.v1 }),
                rows.len(),
                fold,
            );
            return Ok(canonicalize(self.ev, folded));
        }
        self.with_candidate(Some(q), None)
    }

    /// Canonical value of `members - {q} + {b}`.
    fn value_swap(&self, q: usize, b: usize) -> Result<f64> {
        if let (Some(states), Some((rows, agg, fold))) = (&self.rows, self.ev.row_cache()) {
            let folded = fold_row_values(
                states.iter().zip(rows).map(|(s, row)| {
                    let without = if s.i1 == q { s.v2 } else { s.v1 };
                    combine(agg, without, row[b])
                }),
                rows.len(),
                fold,
            );
            return Ok(canonicalize(self.ev, folded));
        }
        self.with_candidate(Some(q), Some(b))
    }

    fn with_candidate(&self, remove: Option<usize>, add: Option<usize>) -> Result<f64> {
        let mut candidate: smallvec::SmallVec<[usize; 64]> = smallvec::SmallVec::new();
        let mut inserted = add.is_none();
        let add_v = add.unwrap_or(usize::MAX);
        for &m in &self.members {
            if Some(m) == remove {
                continue;
            }
            if !inserted && add_v < m {
                candidate.push(add_v);
                inserted = true;
            }
            candidate.push(m);
        }
        if !inserted {
            candidate.push(add_v);
        }
        Ok(self.ev.evaluate_indices(&candidate)?.canonical)
    }
}

#[inline]
fn init_for(agg: RowAgg) -> f64 {
    match agg {
        RowAgg::Min => f64::INFINITY,
        RowAgg::Max => f64::NEG_INFINITY,
    }
}

#[inline]
fn improves(agg: RowAgg, v: f64, cur: f64) -> bool {
    match agg {
        RowAgg::Min => v < cur,
        RowAgg::Max => v > cur,
    }
}

#[inline]
fn combine(agg: RowAgg, a: f64, b: f64) -> f64 {
    match agg {
        RowAgg::Min => {
            if b < a {
                b
            } else {
                a
            }
        }
        RowAgg::Max => {
            if b > a {
                b
            } else {
                a
            }
        }
    }
}

#[inline]
fn fold_row_values<I: Iterator<Item = f64>>(values: I, rows: usize, fold: RowFold) -> f64 {
    match fold {
        RowFold::Mean => values.sum::<f64>() / rows as f64,
        RowFold::Max => values.fold(f64::NEG_INFINITY, f64::max),
        RowFold::MeanClampPow(d) => {
            values.map(|v| v.max(0.0).powi(d)).sum::<f64>() / rows as f64
        }
    }
}

#[inline]
fn canonicalize(ev: &Evaluator<'_>, raw: f64) -> f64 {
    if ev.kind().is_maximized() {
        -raw
    } else {
        raw
    }
}

fn pick_tied(ties: &[usize], rng: &mut ChaCha8Rng) -> usize {
    if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.gen_range(0..ties.len())]
    }
}

// ---------------------------------------------------------------------------
// The three methods
// ---------------------------------------------------------------------------

/// Forward greedy: from the empty set, repeatedly add the point that gives
/// the best canonical value; exact ties are broken uniformly at random.
pub fn greedy_forward(
    instance: &IsspInstance,
    ev: &Evaluator<'_>,
    rng: &mut ChaCha8Rng,
    record_trajectory: bool,
) -> Result<SearchOutcome> {
    let n = instance.n();
    let k = instance.k;
    let mut cand = CandidateEval::new(ev);
    cand.set_members(Vec::new());
    let mut evaluations = 0u64;
    let mut trajectory = record_trajectory.then(Vec::new);

    for step in 1..=k {
        let mut best: Option<f64> = None;
        let mut ties: Vec<usize> = Vec::new();
        for p in 0..n {
            if cand.members().binary_search(&p).is_ok() {
                continue;
            }
            let v = cand.value_add(p)?;
            evaluations += 1;
            match best {
                Some(b) if v > b => {}
                Some(b) if v == b => ties.push(p),
                _ => {
                    best = Some(v);
                    ties.clear();
                    ties.push(p);
                }
            }
        }
        let chosen = pick_tied(&ties, rng);
        let mut members = cand.members().to_vec();
        let at = members.binary_search(&chosen).unwrap_err();
        members.insert(at, chosen);
        cand.set_members(members);
        if let Some(t) = trajectory.as_mut() {
            t.push((step, best.unwrap()));
        }
    }

    finish(instance, ev, cand.members().to_vec(), evaluations, 0, trajectory)
}

/// Backward greedy: from the full set, repeatedly remove the point whose
/// removal gives the best canonical value; exact ties broken at random.
pub fn greedy_backward(
    instance: &IsspInstance,
    ev: &Evaluator<'_>,
    rng: &mut ChaCha8Rng,
    record_trajectory: bool,
) -> Result<SearchOutcome> {
    let n = instance.n();
    let k = instance.k;
    let mut cand = CandidateEval::new(ev);
    cand.set_members((0..n).collect());
    let mut evaluations = 0u64;
    let mut trajectory = record_trajectory.then(Vec::new);

    let mut step = 0usize;
    while cand.members().len() > k {
        step += 1;
        let mut best: Option<f64> = None;
        let mut ties: Vec<usize> = Vec::new();
        for &q in cand.members() {
            let v = cand.value_remove(q)?;
            evaluations += 1;
            match best {
                Some(b) if v > b => {}
                Some(b) if v == b => ties.push(q),
                _ => {
                    best = Some(v);
                    ties.clear();
                    ties.push(q);
                }
            }
        }
        let chosen = pick_tied(&ties, rng);
        let mut members = cand.members().to_vec();
        members.retain(|&m| m != chosen);
        cand.set_members(members);
        if let Some(t) = trajectory.as_mut() {
            t.push((step, best.unwrap()));
        }
    }

    finish(instance, ev, cand.members().to_vec(), evaluations, 0, trajectory)
}

/// Best-improvement local search under the 2-bit-swap neighborhood.
///
/// Each step evaluates all `k(n-k)` neighbors and moves to the strictly
/// best canonical value; equally best strictly-improving neighbors are
/// chosen among at random. Terminates at a solution with no strictly
/// better neighbor.
pub fn local_search(
    instance: &IsspInstance,
    ev: &Evaluator<'_>,
    x_init: &Subset,
    rng: &mut ChaCha8Rng,
    record_trajectory: bool,
) -> Result<SearchOutcome> {
    let n = instance.n();
    if x_init.n() != n || x_init.popcount() != instance.k {
        return Err(Error::InvalidSolution(format!(
            "initial subset must select k={} of n={n} points",
            instance.k
        )));
    }
    let mut cand = CandidateEval::new(ev);
    cand.set_members(x_init.indices());
    let mut current = ev.evaluate_indices(cand.members())?.canonical;
    let mut evaluations = 1u64;
    let mut moves = 0usize;
    let mut trajectory = record_trajectory.then(|| vec![(0usize, current)]);

    loop {
        let mut best: Option<f64> = None;
        let mut ties: Vec<(usize, usize)> = Vec::new();
        let members = cand.members().to_vec();
        for &q in &members {
            for b in 0..n {
                if members.binary_search(&b).is_ok() {
                    continue;
                }
                let v = cand.value_swap(q, b)?;
                evaluations += 1;
                if v >= current {
                    continue;
                }
                match best {
                    Some(bv) if v > bv => {}
                    Some(bv) if v == bv => ties.push((q, b)),
                    _ => {
                        best = Some(v);
                        ties.clear();
                        ties.push((q, b));
                    }
                }
            }
        }
        let Some(best_val) = best else { break };
        let (q, b) = if ties.len() == 1 {
            ties[0]
        } else {
            ties[rng.gen_range(0..ties.len())]
        };
        let mut next = members;
        next.retain(|&m| m != q);
        let at = next.binary_search(&b).unwrap_err();
        next.insert(at, b);
        cand.set_members(next);
        current = best_val;
        moves += 1;
        if let Some(t) = trajectory.as_mut() {
            t.push((moves, current));
        }
    }

    finish(instance, ev, cand.members().to_vec(), evaluations, moves, trajectory)
}

fn finish(
    instance: &IsspInstance,
    ev: &Evaluator<'_>,
    members: Vec<usize>,
    evaluations: u64,
    moves: usize,
    trajectory: Option<Vec<(usize, f64)>>,
) -> Result<SearchOutcome> {
    let best_value = ev.evaluate_indices(&members)?;
    let best_subset = Subset::from_indices(instance.n(), &members)?;
    Ok(SearchOutcome {
        best_subset,
        best_value,
        evaluations,
        moves,
        trajectory,
    })
}

/// Uniform-random k-subset from the generator.
pub fn random_subset(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Subset {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    let mut chosen = pool[..k].to_vec();
    chosen.sort_unstable();
    Subset::from_indices(n, &chosen).expect("indices valid by construction")
}

/// Runs `runs` independent seeded runs of one method; run `i` uses seed
/// `base_seed + i`. When a full fitness table is supplied, results carry
/// min-max normalized values.
pub fn run_experiment(
    instance: &IsspInstance,
    method: Method,
    runs: usize,
    base_seed: u64,
    table: Option<&FitnessTable>,
    record_trajectory: bool,
) -> Result<Vec<RunResult>> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".to_string()));
    }
    let ev = instance.evaluator()?;
    let norm = table.map(|t| t.min_max());
    (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed + i;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let outcome = match method {
                Method::GsF => greedy_forward(instance, &ev, &mut rng, record_trajectory)?,
                Method::GsB => greedy_backward(instance, &ev, &mut rng, record_trajectory)?,
                Method::Ls => {
                    let start = random_subset(instance.n(), instance.k, &mut rng);
                    local_search(instance, &ev, &start, &mut rng, record_trajectory)?
                }
            };
            let normalized_value = norm.map(|(min, max)| {
                if max > min {
                    (outcome.best_value.canonical - min) / (max - min)
                } else {
                    0.0
                }
            });
            Ok(RunResult {
                method,
                seed,
                best_subset: outcome.best_subset,
                best_value: outcome.best_value,
                normalized_value,
                evaluations: outcome.evaluations,
                trajectory: outcome.trajectory,
            })
        })
        .collect()
}
