//! Permutations of `{1..n}` in one-line notation.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(one_line: Vec<usize>) -> Result<Self> {
        let n = one_line.len();
        let mut seen = vec![false; n + 1];
        for &v in &one_line {
            if v < 1 || v > n || seen[v] {
                return Err(Error::InvalidPermutation(one_line));
            }
            seen[v] = true;
        }
        Ok(Permutation(one_line))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    /// The order-reversing permutation `w0`.
    pub fn longest(n: usize) -> Self {
        Permutation((1..=n).rev().collect())
    }

    /// Parses `"346512"` (n <= 9) or `"3,4,6,5,1,2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let v: Result<Vec<usize>> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad permutation {s:?}"))))
                .collect()
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Parse(format!("bad permutation {s:?}")))
                })
                .collect()
        };
        Permutation::new(v?)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn one_line(&self) -> &[usize] {
        &self.0
    }

    /// `w(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (k, &v) in self.0.iter().enumerate() {
            inv[v - 1] = k + 1;
        }
        Permutation(inv)
    }

    /// One-line notation without separators when every entry is one digit.
    pub fn key(&self) -> String {
        if self.n() <= 9 {
            self.0.iter().map(|v| v.to_string()).collect()
        } else {
            self.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// All permutations of `{1..n}` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut cur: Vec<usize> = (1..=n).collect();
    let mut out = vec![Permutation(cur.clone())];
    // standard next-permutation
    loop {
        let Some(k) = (0..n.saturating_sub(1)).rev().find(|&k| cur[k] < cur[k + 1]) else {
            return out;
        };
        let l = (k + 1..n).rev().find(|&l| cur[k] < cur[l]).expect("successor exists");
        cur.swap(k, l);
        cur[k + 1..].reverse();
        out.push(Permutation(cur.clone()));
    }
}

/// The sets `{w(1)..w(k)}`, as bitmasks over columns (bit `i` for column `i`),
/// for `k = 1..n-1`.
pub fn prefix_masks(w: &Permutation) -> Vec<u64> {
    let mut m = 0u64;
    w.0[..w.n().saturating_sub(1)]
        .iter()
        .map(|&c| {
            m |= 1 << c;
            m
        })
        .collect()
}
