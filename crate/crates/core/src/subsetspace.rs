//! The k-of-n subset space: bit-vector subsets, combinadic ranking,
//! enumeration, 2-bit-swap neighborhoods, and the dense fitness table.
//!
//! Subsets are ordered by ascending bitmask value (colexicographic on the
//! selected indices), which is the order produced by the next-bit-permutation
//! successor. The combinadic rank of a subset with sorted indices
//! `c_0 < ... < c_{k-1}` is `sum_j C(c_j, j+1)`; the smallest combination
//! `{0..k-1}` has rank 0 and `{n-k..n-1}` has rank `C(n,k)-1`.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Default cap on dense-table length: 2^28 entries (2 GiB of doubles).
pub const DEFAULT_TABLE_BUDGET: u64 = 1 << 28;

/// Hard upper bound on the number of points a subset can draw from.
pub const MAX_POINTS: usize = 512;

const WORD_BITS: usize = 64;

/// A k-of-n subset encoded as a bit vector (point `i` selected iff bit `i`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    n: usize,
    words: SmallVec<[u64; 1]>,
}

impl Subset {
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Subset> {
        let mut words = SmallVec::from_elem(0u64, n.div_ceil(WORD_BITS));
        for &i in indices {
            if i >= n {
                return Err(Error::InvalidSolution(format!("index {i} out of range for n={n}")));
            }
            if words[i / WORD_BITS] & (1 << (i % WORD_BITS)) != 0 {
                return Err(Error::InvalidSolution(format!("index {i} repeated")));
            }
            words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
        }
        Ok(Subset { n, words })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / WORD_BITS] & (1 << (i % WORD_BITS)) != 0
    }

    /// Selected indices in ascending order.
    pub fn indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.popcount());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                out.push(wi * WORD_BITS + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    pub fn hamming_distance(&self, other: &Subset) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// The single-word mask; only valid for `n <= 64`.
    pub fn as_mask(&self) -> u64 {
        debug_assert!(self.n <= WORD_BITS);
        self.words[0]
    }
}

fn binomial_table(n: usize, k: usize) -> Option<Vec<Vec<u64>>> {
    // binom[i][j] = C(i, j) for j <= k; None on u64 overflow
    let mut t = vec![vec![0u64; k + 1]; n + 1];
    t[0][0] = 1;
    for i in 1..=n {
        t[i][0] = 1;
        for j in 1..=k {
            let up = t[i - 1][j];
            let upleft = t[i - 1][j - 1];
            t[i][j] = up.checked_add(upleft)?;
        }
    }
    Some(t)
}

/// The space of all k-of-n subsets with combinadic indexing.
#[derive(Debug, Clone)]
pub struct ComboSpace {
    n: usize,
    k: usize,
    binom: Vec<Vec<u64>>,
    count: u64,
}

impl ComboSpace {
    pub fn new(n: usize, k: usize) -> Result<ComboSpace> {
        if k == 0 || k >= n {
            return Err(Error::InvalidParameter(format!(
                "need 0 < k < n, got n={n}, k={k}"
            )));
        }
        if n > MAX_POINTS {
            return Err(Error::InvalidParameter(format!(
                "n={n} exceeds the supported maximum {MAX_POINTS}"
            )));
        }
        let binom = binomial_table(n, k).ok_or_else(|| {
            Error::InvalidParameter(format!("C({n},{k}) does not fit in 64 bits"))
        })?;
        let count = binom[n][k];
        Ok(ComboSpace { n, k, binom, count })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `C(n, k)`: the number of solutions.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// The 2-bit-swap neighborhood size `k (n - k)`.
    pub fn neighborhood_size(&self) -> usize {
        self.k * (self.n - self.k)
    }

    #[inline]
    pub fn binom(&self, n: usize, k: usize) -> u64 {
        if k > self.k || n > self.n {
            return 0;
        }
        self.binom[n][k]
    }

    /// Combinadic rank of sorted indices.
    #[inline]
    pub fn rank_indices(&self, indices: &[usize]) -> u64 {
        debug_assert_eq!(indices.len(), self.k);
        let mut r = 0u64;
        for (j, &c) in indices.iter().enumerate() {
            r += self.binom[c][j + 1];
        }
        r
    }

    pub fn rank(&self, subset: &Subset) -> Result<u64> {
        if subset.n() != self.n {
            return Err(Error::InvalidSolution(format!(
                "subset over n={} does not match space n={}",
                subset.n(),
                self.n
            )));
        }
        if subset.popcount() != self.k {
            return Err(Error::InvalidSolution(format!(
                "subset has popcount {}, expected k={}",
                subset.popcount(),
                self.k
            )));
        }
        Ok(self.rank_indices(&subset.indices()))
    }

    /// Writes the sorted indices of the subset with the given rank.
    pub fn unrank_indices(&self, rank: u64, out: &mut Vec<usize>) {
        debug_assert!(rank < self.count);
        out.clear();
        out.resize(self.k, 0);
        let mut r = rank;
        let mut c = self.n;
        for j in (0..self.k).rev() {
            // largest c with C(c, j+1) <= r
            while self.binom[c - 1][j + 1] > r {
                c -= 1;
            }
            c -= 1;
            out[j] = c;
            r -= self.binom[c][j + 1];
        }
    }

    pub fn unrank(&self, rank: u64) -> Result<Subset> {
        if rank >= self.count {
            return Err(Error::InvalidSolution(format!(
                "rank {rank} out of range [0, {})",
                self.count
            )));
        }
        let mut idx = Vec::new();
        self.unrank_indices(rank, &mut idx);
        Subset::from_indices(self.n, &idx)
    }

    /// Advances sorted indices to the colex successor. Returns false at the end.
    #[inline]
    pub fn next_indices(&self, indices: &mut [usize]) -> bool {
        let k = self.k;
        for t in 0..k {
            let limit = if t + 1 < k { indices[t + 1] } else { self.n };
            if indices[t] + 1 < limit {
                indices[t] += 1;
                for (v, slot) in indices.iter_mut().enumerate().take(t) {
                    *slot = v;
                }
                return true;
            }
        }
        false
    }

    /// Iterates every subset exactly once in ascending rank order.
    pub fn enumerate(&self) -> EnumerateIter<'_> {
        EnumerateIter {
            space: self,
            indices: (0..self.k).collect(),
            done: false,
        }
    }

    /// All 2-bit-swap neighbors in deterministic order:
    /// cleared-bit index ascending, then set-bit index ascending.
    pub fn neighbors(&self, subset: &Subset) -> Result<Vec<Subset>> {
        if subset.popcount() != self.k || subset.n() != self.n {
            return Err(Error::InvalidSolution(
                "neighbors requires a valid k-of-n subset".to_string(),
            ));
        }
        let indices = subset.indices();
        let mut out = Vec::with_capacity(self.neighborhood_size());
        for &clear in &indices {
            for set_bit in 0..self.n {
                if !subset.contains(set_bit) {
                    let mut s = subset.clone();
                    s.words[clear / WORD_BITS] &= !(1 << (clear % WORD_BITS));
                    s.words[set_bit / WORD_BITS] |= 1 << (set_bit % WORD_BITS);
                    out.push(s);
                }
            }
        }
        Ok(out)
    }

    /// Calls `visit(cleared_position, new_index, neighbor_rank)` for every
    /// neighbor of the subset with sorted indices `indices`. `scratch` is a
    /// k-length buffer reused across calls.
    #[inline]
    pub fn for_each_neighbor_rank<F: FnMut(usize, usize, u64)>(
        &self,
        indices: &[usize],
        scratch: &mut Vec<usize>,
        mut visit: F,
    ) {
        let k = self.k;
        for t in 0..k {
            // build the k-1 remaining indices once per cleared position
            scratch.clear();
            scratch.extend_from_slice(&indices[..t]);
            scratch.extend_from_slice(&indices[t + 1..]);
            let mut b = 0usize;
            let mut member = 0usize; // next index of `indices` to skip
            while b < self.n {
                if member < k && indices[member] == b {
                    member += 1;
                    b += 1;
                    continue;
                }
                // rank of scratch with b inserted in sorted position
                let mut r = 0u64;
                let mut j = 0usize;
                let mut placed = false;
                for &c in scratch.iter() {
                    if !placed && b < c {
                        r += self.binom[b][j + 1];
                        j += 1;
                        placed = true;
                    }
                    r += self.binom[c][j + 1];
                    j += 1;
                }
                if !placed {
                    r += self.binom[b][j + 1];
                }
                visit(t, b, r);
                b += 1;
            }
        }
    }
}

/// Iterator over all subsets in ascending rank order.
pub struct EnumerateIter<'a> {
    space: &'a ComboSpace,
    indices: Vec<usize>,
    done: bool,
}

impl Iterator for EnumerateIter<'_> {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        if self.done {
            return None;
        }
        let item = Subset::from_indices(self.space.n, &self.indices).expect("valid by construction");
        if !self.space.next_indices(&mut self.indices) {
            self.done = true;
        }
        Some(item)
    }
}

// ---------------------------------------------------------------------------
// Fitness table
// ---------------------------------------------------------------------------

/// Indicator kinds, numbered for the table-file header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndicatorKind {
    Hv = 0,
    Igd = 1,
    IgdPlus = 2,
    Epsilon = 3,
    R2 = 4,
    Nr2 = 5,
    Se = 6,
}

impl IndicatorKind {
    pub const ALL: [IndicatorKind; 7] = [
        IndicatorKind::Hv,
        IndicatorKind::Igd,
        IndicatorKind::IgdPlus,
        IndicatorKind::Epsilon,
        IndicatorKind::R2,
        IndicatorKind::Nr2,
        IndicatorKind::Se,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            IndicatorKind::Hv => "hv",
            IndicatorKind::Igd => "igd",
            IndicatorKind::IgdPlus => "igdplus",
            IndicatorKind::Epsilon => "epsilon",
            IndicatorKind::R2 => "r2",
            IndicatorKind::Nr2 => "nr2",
            IndicatorKind::Se => "se",
        }
    }

    pub fn parse(s: &str) -> Result<IndicatorKind> {
        match s.to_ascii_lowercase().as_str() {
            "hv" => Ok(IndicatorKind::Hv),
            "igd" => Ok(IndicatorKind::Igd),
            "igdplus" | "igd-plus" | "igd+" => Ok(IndicatorKind::IgdPlus),
            "epsilon" | "eps" => Ok(IndicatorKind::Epsilon),
            "r2" => Ok(IndicatorKind::R2),
            "nr2" => Ok(IndicatorKind::Nr2),
            "se" => Ok(IndicatorKind::Se),
            other => Err(Error::InvalidParameter(format!("unknown indicator `{other}`"))),
        }
    }

    fn from_u32(v: u32) -> Result<IndicatorKind> {
        IndicatorKind::ALL
            .into_iter()
            .find(|k| *k as u32 == v)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown indicator id {v}")))
    }

    /// HV and NR2 are maximized; all other indicators are minimized.
    pub fn is_maximized(&self) -> bool {
        matches!(self, IndicatorKind::Hv | IndicatorKind::Nr2)
    }
}

impl std::fmt::Display for IndicatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dense array of canonical indicator values indexed by combinadic rank.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessTable {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub kind: IndicatorKind,
    /// SHA-256 of the instance this table was built from.
    pub instance_hash: [u8; 32],
    /// Canonical values (lower is better) in rank order; length `C(n,k)`.
    pub values: Vec<f64>,
}

/// Rank-range chunk length for parallel builds and scans. Fixed so results
/// do not depend on the worker count.
pub const CHUNK: u64 = 1 << 16;

/// Builds the dense table by evaluating every subset in rank order.
///
/// `eval` receives the sorted member indices of one subset and returns its
/// canonical fitness. Chunks of the rank space are evaluated independently,
/// so the result is identical for any degree of parallelism.
pub fn build_table<F>(
    space: &ComboSpace,
    d: usize,
    kind: IndicatorKind,
    instance_hash: [u8; 32],
    budget: u64,
    eval: F,
) -> Result<FitnessTable>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    let count = space.count();
    if count > budget {
        return Err(Error::Refused(format!(
            "fitness table needs {count} entries ({} MiB), over the budget of {budget} entries",
            count * 8 / (1 << 20)
        )));
    }
    let n_chunks = count.div_ceil(CHUNK);
    let chunks: Vec<Vec<f64>> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let start = ci * CHUNK;
            let len = CHUNK.min(count - start) as usize;
            let mut indices = Vec::with_capacity(space.k());
            space.unrank_indices(start, &mut indices);
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                out.push(eval(&indices));
                if !space.next_indices(&mut indices) {
                    break;
                }
            }
            out
        })
        .collect();
    let mut values = Vec::with_capacity(count as usize);
    for c in chunks {
        values.extend_from_slice(&c);
    }
    debug_assert_eq!(values.len() as u64, count);
    Ok(FitnessTable {
        n: space.n(),
        k: space.k(),
        d,
        kind,
        instance_hash,
        values,
    })
}

const TABLE_MAGIC: &[u8; 8] = b"ISSPFT1\0";

impl FitnessTable {
    pub fn min_max(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in &self.values {
            if v < min {
                min = v;
            }
            if v > max {
                max = v;
            }
        }
        (min, max)
    }

    /// Serializes the table: magic, n, k, d, kind (u32 LE each), the 32-byte
    /// instance hash, then `C(n,k)` little-endian doubles in rank order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(8 + 16 + 32 + self.values.len() * 8);
        buf.extend_from_slice(TABLE_MAGIC);
        for v in [self.n as u32, self.k as u32, self.d as u32, self.kind as u32] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        buf.extend_from_slice(&self.instance_hash);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        buf
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<FitnessTable> {
        let mut f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut header = [0u8; 8 + 16 + 32];
        f.read_exact(&mut header).map_err(|e| Error::io(path, e))?;
        if &header[..8] != TABLE_MAGIC {
            return Err(Error::parse(path, "bad magic, not a fitness-table file"));
        }
        let field = |i: usize| {
            u32::from_le_bytes(header[8 + 4 * i..12 + 4 * i].try_into().unwrap()) as usize
        };
        let (n, k, d) = (field(0), field(1), field(2));
        let kind = IndicatorKind::from_u32(field(3) as u32)?;
        let mut instance_hash = [0u8; 32];
        instance_hash.copy_from_slice(&header[24..56]);
        let space = ComboSpace::new(n, k)?;
        let count = space.count() as usize;
        let mut data = Vec::new();
        f.read_to_end(&mut data).map_err(|e| Error::io(path, e))?;
        if data.len() != count * 8 {
            return Err(Error::parse(
                path,
                format!("expected {} value bytes, found {}", count * 8, data.len()),
            ));
        }
        let values = data
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(FitnessTable {
            n,
            k,
            d,
            kind,
            instance_hash,
            values,
        })
    }
}
