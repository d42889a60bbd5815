//! Kostant pictures: multisets of loops over the Dynkin diagram of type
//! A_{n-1}, drawn on `n` columns.
//!
//! A loop `[l, r]` encloses the dots `l..r-1` and passes through the columns
//! `l..=r`. Identical intervals are told apart by a copy ordinal; copy 0 is the
//! innermost. Pictures are stored sorted by `(left, right, copy)`, so
//! structural equality is equality of multisets.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loop {
    pub left: usize,
    pub right: usize,
    pub copy: usize,
}

impl Loop {
    pub fn new(left: usize, right: usize, copy: usize) -> Self {
        Loop { left, right, copy }
    }

    /// Number of enclosed dots.
    pub fn length(&self) -> usize {
        self.right - self.left
    }

    pub fn interval(&self) -> (usize, usize) {
        (self.left, self.right)
    }

    pub fn passes_through(&self, column: usize) -> bool {
        self.left <= column && column <= self.right
    }

    /// Strict encirclement: `other` is drawn inside `self`.
    pub fn encircles(&self, other: &Loop) -> bool {
        let contains = self.left <= other.left && other.right <= self.right;
        if self.interval() == other.interval() {
            other.copy < self.copy
        } else {
            contains
        }
    }

    pub fn label(&self) -> String {
        format!("[{},{}]#{}", self.left, self.right, self.copy)
    }
}

impl fmt::Display for Loop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.left, self.right)?;
        if self.copy > 0 {
            write!(f, "#{}", self.copy)?;
        }
        Ok(())
    }
}

/// Integer vector indexed by columns `1..=n`, stored zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coweight(pub Vec<i64>);

impl Coweight {
    pub fn zero(n: usize) -> Self {
        Coweight(vec![0; n])
    }

    /// Unit vector `e_i` (1-based column).
    pub fn unit(n: usize, column: usize) -> Self {
        let mut v = vec![0; n];
        v[column - 1] = 1;
        Coweight(v)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Entry at 1-based column.
    pub fn at(&self, column: usize) -> i64 {
        self.0[column - 1]
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Membership in the SL coweight lattice.
    pub fn is_sl(&self) -> bool {
        self.total() == 0
    }

    pub fn plus(&self, other: &Coweight) -> Coweight {
        Coweight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &Coweight) -> Coweight {
        Coweight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Parses `"2,0,-1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Ok(Coweight(Vec::new()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Coweight)
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Coefficients over the simple roots `alpha_1..alpha_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootCombination(pub Vec<i64>);

impl RootCombination {
    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Writes `alpha - beta` in simple-root coordinates. `None` unless the
    /// difference lies in the root lattice (entries summing to zero).
    pub fn from_coweight_difference(alpha: &Coweight, beta: &Coweight) -> Option<Self> {
        if alpha.n() != beta.n() {
            return None;
        }
        let diff = alpha.minus(beta);
        if diff.total() != 0 {
            return None;
        }
        let mut acc = 0;
        let coeffs = diff.0[..diff.n().saturating_sub(1)]
            .iter()
            .map(|d| {
                acc += d;
                acc
            })
            .collect();
        Some(RootCombination(coeffs))
    }

    /// The coweight `sum_d c_d (e_d - e_{d+1})`.
    pub fn to_coweight(&self) -> Coweight {
        let n = self.0.len() + 1;
        let mut v = vec![0; n];
        for (d, &c) in self.0.iter().enumerate() {
            v[d] += c;
            v[d + 1] -= c;
        }
        Coweight(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KostantPicture {
    n: usize,
    loops: Vec<Loop>,
}

impl KostantPicture {
    pub fn empty(n: usize) -> Self {
        KostantPicture { n, loops: Vec::new() }
    }

    /// Builds a picture from intervals; copy ordinals follow input order among
    /// equal intervals.
    pub fn new<I>(n: usize, intervals: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut loops = Vec::new();
        for (left, right) in intervals {
            if left < 1 || left >= right || right > n {
                return Err(Error::InvalidLoop { left, right, n });
            }
            let copy = seen.entry((left, right)).or_insert(0);
            loops.push(Loop::new(left, right, *copy));
            *copy += 1;
        }
        loops.sort();
        Ok(KostantPicture { n, loops })
    }

    /// Builds a picture from loops with explicit copies; the copies of each
    /// interval must be exactly `0..m`.
    pub fn from_loops(n: usize, mut loops: Vec<Loop>) -> Result<Self> {
        loops.sort();
        for (k, l) in loops.iter().enumerate() {
            if l.left < 1 || l.left >= l.right || l.right > n {
                return Err(Error::InvalidLoop {
                    left: l.left,
                    right: l.right,
                    n,
                });
            }
            let expected = if k > 0 && loops[k - 1].interval() == l.interval() {
                loops[k - 1].copy + 1
            } else {
                0
            };
            if l.copy != expected {
                return Err(Error::Parse(format!(
                    "copy ordinals of {:?} are not 0..m",
                    l.interval()
                )));
            }
        }
        Ok(KostantPicture { n, loops })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn loops(&self) -> &[Loop] {
        &self.loops
    }

    pub fn intervals(&self) -> Vec<(usize, usize)> {
        self.loops.iter().map(Loop::interval).collect()
    }

    /// `|p|`, the number of loops.
    pub fn num_loops(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    /// `len(p)`, the sum of loop lengths.
    pub fn total_length(&self) -> usize {
        self.loops.iter().map(Loop::length).sum()
    }

    pub fn contains(&self, l: &Loop) -> bool {
        self.loops.binary_search(l).is_ok()
    }

    /// Loops of the picture strictly inside `l`.
    pub fn encircled_by(&self, l: &Loop) -> impl Iterator<Item = &Loop> + '_ {
        let outer = *l;
        self.loops.iter().filter(move |m| outer.encircles(m))
    }

    /// Loops ordered so that every loop comes after all loops it encircles.
    pub fn inner_first(&self) -> Vec<Loop> {
        let mut v = self.loops.clone();
        v.sort_by_key(|l| (l.length(), l.copy, l.left));
        v
    }

    pub fn picture_weight(&self) -> RootCombination {
        let mut c = vec![0i64; self.n.saturating_sub(1)];
        for l in &self.loops {
            for d in l.left..l.right {
                c[d - 1] += 1;
            }
        }
        RootCombination(c)
    }

    /// `(l, r)`: number of loops with left (resp. right) end at each column.
    pub fn side_counts(&self) -> (Coweight, Coweight) {
        let mut l = vec![0i64; self.n];
        let mut r = vec![0i64; self.n];
        for lp in &self.loops {
            l[lp.left - 1] += 1;
            r[lp.right - 1] += 1;
        }
        (Coweight(l), Coweight(r))
    }

    pub fn check_column(&self, column: usize) -> Result<()> {
        if column < 1 || column > self.n {
            Err(Error::ColumnOutOfRange {
                column,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Loops through `column`, grouped by level of encirclement (level 1
    /// first); each level is sorted left to right.
    pub fn levels_through_column(&self, column: usize) -> Result<Vec<Vec<Loop>>> {
        self.check_column(column)?;
        let mut q: Vec<Loop> = self
            .loops
            .iter()
            .copied()
            .filter(|l| l.passes_through(column))
            .collect();
        // anything a loop encircles is strictly smaller in this order
        q.sort_by_key(|l| (l.length(), l.copy));
        let mut level = vec![0usize; q.len()];
        for a in 0..q.len() {
            let below = (0..a)
                .filter(|&b| q[a].encircles(&q[b]))
                .map(|b| level[b])
                .max()
                .unwrap_or(0);
            level[a] = below + 1;
        }
        let depth = level.iter().copied().max().unwrap_or(0);
        let mut levels = vec![Vec::new(); depth];
        for (l, lv) in q.into_iter().zip(level) {
            levels[lv - 1].push(l);
        }
        for lv in &mut levels {
            lv.sort_by_key(|l| l.left);
            debug_assert!(lv.windows(2).all(|w| w[0].left < w[1].left && w[0].right < w[1].right));
        }
        Ok(levels)
    }

    /// Same picture with the given loop removed (copies re-canonicalized).
    pub fn without(&self, l: &Loop) -> KostantPicture {
        let intervals = self
            .loops
            .iter()
            .filter(|m| *m != l)
            .map(Loop::interval)
            .collect::<Vec<_>>();
        KostantPicture::new(self.n, intervals).expect("subset of a valid picture")
    }

    /// Compact label such as `{[1,2],[1,3],[3,4]x2}`.
    pub fn describe(&self) -> String {
        let mut out = String::from("{");
        let mut k = 0;
        while k < self.loops.len() {
            let iv = self.loops[k].interval();
            let mut m = 1;
            while k + m < self.loops.len() && self.loops[k + m].interval() == iv {
                m += 1;
            }
            if k > 0 {
                out.push(',');
            }
            out.push_str(&format!("[{},{}]", iv.0, iv.1));
            if m > 1 {
                out.push_str(&format!("x{m}"));
            }
            k += m;
        }
        out.push('}');
        out
    }

    /// Inverse of [`describe`](Self::describe): `"{[1,2]x3,[2,3]}"`; the
    /// braces are optional and `"{}"` is the empty picture.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad picture {s:?}"));
        let body = s.trim();
        let body = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .unwrap_or(body)
            .trim();
        let mut intervals = Vec::new();
        let mut rest = body;
        while !rest.is_empty() {
            rest = rest.strip_prefix('[').ok_or_else(bad)?;
            let close = rest.find(']').ok_or_else(bad)?;
            let (l, r) = rest[..close].split_once(',').ok_or_else(bad)?;
            let l: usize = l.trim().parse().map_err(|_| bad())?;
            let r: usize = r.trim().parse().map_err(|_| bad())?;
            rest = rest[close + 1..].trim_start();
            let mut m = 1;
            if let Some(after) = rest.strip_prefix('x') {
                let end = after.find(|c: char| !c.is_ascii_digit()).unwrap_or(after.len());
                m = after[..end].parse().map_err(|_| bad())?;
                rest = after[end..].trim_start();
            }
            intervals.extend(std::iter::repeat_n((l, r), m));
            if let Some(after) = rest.strip_prefix(',') {
                rest = after.trim_start();
                if rest.is_empty() {
                    return Err(bad());
                }
            } else if !rest.is_empty() {
                return Err(bad());
            }
        }
        KostantPicture::new(n, intervals)
    }
}

impl fmt::Display for KostantPicture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} {}", self.n, self.describe())
    }
}

/// All intervals `[l, r]` with `1 <= l < r <= n`, lexicographic.
pub fn all_intervals(n: usize) -> Vec<(usize, usize)> {
    (1..=n)
        .flat_map(|l| (l + 1..=n).map(move |r| (l, r)))
        .collect()
}

/// Every picture on `n` columns whose weight is `weight`, each exactly once,
/// in lexicographic order of multiplicity vectors.
pub fn enumerate_pictures(n: usize, weight: &RootCombination) -> Vec<KostantPicture> {
    if n == 0 || weight.0.len() != n - 1 || !weight.is_nonnegative() {
        return Vec::new();
    }
    let intervals = all_intervals(n);
    let mut remaining = weight.0.clone();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut out = Vec::new();
    enumerate_rec(n, &intervals, 0, &mut remaining, &mut chosen, &mut out);
    out
}

fn enumerate_rec(
    n: usize,
    intervals: &[(usize, usize)],
    idx: usize,
    remaining: &mut Vec<i64>,
    chosen: &mut Vec<(usize, usize)>,
    out: &mut Vec<KostantPicture>,
) {
    if idx == intervals.len() {
        if remaining.iter().all(|&c| c == 0) {
            out.push(KostantPicture::new(n, chosen.iter().copied()).expect("valid intervals"));
        }
        return;
    }
    let (l, r) = intervals[idx];
    // dot l-1 can no longer be covered once all loops starting at l-1 are placed
    if idx > 0 && intervals[idx - 1].0 != l && l >= 2 && remaining[l - 2] != 0 {
        return;
    }
    let bound = (l..r).map(|d| remaining[d - 1]).min().unwrap_or(0);
    for mult in 0..=bound {
        for d in l..r {
            remaining[d - 1] -= mult;
        }
        for _ in 0..mult {
            chosen.push((l, r));
        }
        enumerate_rec(n, intervals, idx + 1, remaining, chosen, out);
        for _ in 0..mult {
            chosen.pop();
        }
        for d in l..r {
            remaining[d - 1] += mult;
        }
    }
}

/// Kostant partition function of type A_{n-1}, by recursion on the rank:
/// the coefficient of `alpha_1` is split among the roots `alpha_{1r}`, and the
/// rest is a partition problem on the dots `2..n-1`.
pub fn kostant_count(n: usize, weight: &RootCombination) -> u64 {
    if n == 0 || weight.0.len() != n - 1 || !weight.is_nonnegative() {
        return 0;
    }
    let mut memo = HashMap::new();
    partition_count(&weight.0, &mut memo)
}

fn partition_count(w: &[i64], memo: &mut HashMap<Vec<i64>, u64>) -> u64 {
    if w.iter().any(|&c| c < 0) {
        return 0;
    }
    if w.is_empty() || w.iter().all(|&c| c == 0) {
        return 1;
    }
    if let Some(&v) = memo.get(w) {
        return v;
    }
    // parts[k] = multiplicity of the root alpha_1 + ... + alpha_{k+1}
    let rest = &w[1..];
    let mut total = 0;
    let mut parts = vec![0i64; w.len()];
    split_first_dot(w[0], 0, &mut parts, rest, memo, &mut total);
    memo.insert(w.to_vec(), total);
    total
}

fn split_first_dot(
    left: i64,
    k: usize,
    parts: &mut Vec<i64>,
    rest: &[i64],
    memo: &mut HashMap<Vec<i64>, u64>,
    total: &mut u64,
) {
    if k + 1 == parts.len() {
        parts[k] = left;
        let mut reduced = rest.to_vec();
        // the root ending after dot k+1 also covers dots 2..=k+1
        for (j, &m) in parts.iter().enumerate() {
            for r in &mut reduced[..j] {
                *r -= m;
            }
        }
        *total += partition_count(&reduced, memo);
        return;
    }
    for m in 0..=left {
        parts[k] = m;
        split_first_dot(left - m, k + 1, parts, rest, memo, total);
    }
}

#[cfg(test)]
pub(crate) use tests::p_star;
