//! Dense subspaces of a finite degree window of `X = F((t))^n`.
//!
//! A [`Sub`] over the window `[lo, hi)` stands for the subspace spanned by its
//! rows together with the implicit tail `t^hi V_S`, where `S` is the support
//! column set. Coordinate `(j, i)` lives at index `(j - lo) * n + (i - 1)`,
//! so index order is (degree, column) order.

use crate::field::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub n: usize,
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(n: usize, lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty window [{lo}, {hi})");
        Window { n, lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.n * (self.hi - self.lo) as usize
    }

    pub fn contains(&self, deg: i64) -> bool {
        self.lo <= deg && deg < self.hi
    }

    pub fn index(&self, deg: i64, col: usize) -> usize {
        debug_assert!(self.contains(deg) && (1..=self.n).contains(&col));
        (deg - self.lo) as usize * self.n + (col - 1)
    }

    pub fn coord(&self, idx: usize) -> (i64, usize) {
        (self.lo + (idx / self.n) as i64, idx % self.n + 1)
    }
}

/// Bit mask of columns (bit `i` for column `i`).
pub fn all_columns(n: usize) -> u64 {
    ((1u64 << n) - 1) << 1
}

pub fn has_column(mask: u64, col: usize) -> bool {
    mask & (1 << col) != 0
}

/// Reduced row echelon form; rows are pivoted on their first nonzero entry.
/// Returns the nonzero rows and their pivot indices.
pub fn rref<F: Field>(mut rows: Vec<Vec<F>>) -> (Vec<Vec<F>>, Vec<usize>) {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv();
        if !inv.is_one() {
            for v in rows[r][c..].iter_mut() {
                *v = v.mul_ref(&inv);
            }
        }
        let (head, tail) = rows.split_at_mut(r);
        let (prow, rest) = tail.split_first_mut().expect("pivot row");
        for row in head.iter_mut().chain(rest.iter_mut()) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row[c..].iter_mut().zip(&prow[c..]) {
                if !pv.is_zero() {
                    v.sub_mul_assign(&f, pv);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// [`rref`] with columns visited in the order given by `order` (a permutation
/// of the indices). Pivots are reported as original indices.
pub fn rref_ordered<F: Field>(rows: Vec<Vec<F>>, order: &[usize]) -> (Vec<Vec<F>>, Vec<usize>) {
    let permuted: Vec<Vec<F>> = rows
        .into_iter()
        .map(|r| order.iter().map(|&k| r[k].clone()).collect())
        .collect();
    let (reduced, pivots) = rref(permuted);
    let width = order.len();
    let back = reduced
        .into_iter()
        .map(|r| {
            let mut v = vec![F::zero(); width];
            for (pos, x) in r.into_iter().enumerate() {
                v[order[pos]] = x;
            }
            v
        })
        .collect();
    (back, pivots.into_iter().map(|p| order[p]).collect())
}

/// Reduces `v` by reduced rows with the given pivots.
pub fn reduce_by<F: Field>(rows: &[Vec<F>], pivots: &[usize], v: &[F]) -> Vec<F> {
    let mut v = v.to_vec();
    for (row, &p) in rows.iter().zip(pivots) {
        if v[p].is_zero() {
            continue;
        }
        let f = v[p].clone();
        for (x, r) in v.iter_mut().zip(row) {
            if !r.is_zero() {
                x.sub_mul_assign(&f, r);
            }
        }
    }
    v
}

/// Coefficients `c` with `target - sum c_k vectors[k]` in the span of
/// `modulo`, if any exist.
pub fn express<F: Field>(target: &[F], vectors: &[Vec<F>], modulo: &[Vec<F>]) -> Option<Vec<F>> {
    let m = vectors.len();
    let aug = |v: &[F], tag: Option<usize>| {
        let mut r = v.to_vec();
        r.extend((0..m).map(|k| if Some(k) == tag { F::one() } else { F::zero() }));
        r
    };
    let rows: Vec<Vec<F>> = modulo
        .iter()
        .map(|v| aug(v, None))
        .chain(vectors.iter().enumerate().map(|(k, v)| aug(v, Some(k))))
        .collect();
    let (rows, pivots) = rref(rows);
    let width = target.len();
    let keep: Vec<usize> = (0..rows.len()).filter(|&k| pivots[k] < width).collect();
    let rows: Vec<Vec<F>> = keep.iter().map(|&k| rows[k].clone()).collect();
    let pivots: Vec<usize> = keep.iter().map(|&k| pivots[k]).collect();
    let r = reduce_by(&rows, &pivots, &aug(target, None));
    if r[..width].iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(r[width..].iter().map(|x| -x.clone()).collect())
}

/// Left kernel: all `c` with `sum c_k rows[k] = 0`, as a basis.
pub fn left_kernel<F: Field>(rows: &[Vec<F>]) -> Vec<Vec<F>> {
    let m = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let aug: Vec<Vec<F>> = rows
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mut v = r.clone();
            v.extend((0..m).map(|j| if j == k { F::one() } else { F::zero() }));
            v
        })
        .collect();
    let (red, pivots) = rref(aug);
    red.into_iter()
        .zip(pivots)
        .filter(|(_, p)| *p >= width)
        .map(|(mut r, _)| r.split_off(width))
        .collect()
}

pub fn rank<F: Field>(rows: Vec<Vec<F>>) -> usize {
    rref(rows).0.len()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sub<F: Field> {
    pub win: Window,
    pub supp: u64,
    rows: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Sub<F> {
    pub fn new(win: Window, supp: u64, vectors: Vec<Vec<F>>) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == win.dim()));
        let (rows, pivots) = rref(vectors);
        Sub {
            win,
            supp,
            rows,
            pivots,
        }
    }

    pub fn zero(win: Window) -> Self {
        Sub::new(win, 0, Vec::new())
    }

    /// Span of `t^j e_i` for `j >= depth[i]` over the columns of `supp`.
    pub fn monomial_tail(win: Window, supp: u64, depth: &[i64]) -> Self {
        let mut vecs = Vec::new();
        for col in 1..=win.n {
            if !has_column(supp, col) {
                continue;
            }
            for deg in depth[col - 1].max(win.lo)..win.hi {
                vecs.push(unit(win, deg, col));
            }
        }
        Sub::new(win, supp, vecs)
    }

    pub fn rows(&self) -> &[Vec<F>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Dimension of the explicit part, i.e. modulo the tail `t^hi V_S`.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v[p..].iter_mut().zip(&row[p..]) {
                if !r.is_zero() {
                    x.sub_mul_assign(&f, r);
                }
            }
        }
        v
    }

    /// Membership of a window vector supported in the support columns.
    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains_sub(&self, other: &Sub<F>) -> bool {
        assert_eq!(self.win, other.win);
        other.supp & !self.supp == 0 && other.rows.iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &Sub<F>) -> Sub<F> {
        assert_eq!(self.win, other.win);
        let vecs = self.rows.iter().chain(&other.rows).cloned().collect();
        Sub::new(self.win, self.supp | other.supp, vecs)
    }

    /// Intersection, by the Zassenhaus algorithm.
    pub fn intersect(&self, other: &Sub<F>) -> Sub<F> {
        assert_eq!(self.win, other.win);
        let d = self.win.dim();
        let mut vecs = Vec::with_capacity(self.rank() + other.rank());
        for r in &self.rows {
            let mut v = r.clone();
            v.extend(r.iter().cloned());
            vecs.push(v);
        }
        for r in &other.rows {
            let mut v = r.clone();
            v.extend(std::iter::repeat_n(F::zero(), d));
            vecs.push(v);
        }
        let (rows, pivots) = rref(vecs);
        let inter = rows
            .into_iter()
            .zip(pivots)
            .filter(|(_, p)| *p >= d)
            .map(|(mut r, _)| r.split_off(d))
            .collect();
        Sub::new(self.win, self.supp & other.supp, inter)
    }

    /// Intersection with `V_I` for the column mask `cols`.
    pub fn restrict_columns(&self, cols: u64) -> Sub<F> {
        let win = self.win;
        let (outside, inside): (Vec<usize>, Vec<usize>) =
            (0..win.dim()).partition(|&k| !has_column(cols, win.coord(k).1));
        let boundary = outside.len();
        let order: Vec<usize> = outside.into_iter().chain(inside).collect();
        let (rows, pivots) = rref_ordered(self.rows.clone(), &order);
        let pos: Vec<usize> = {
            let mut pos = vec![0; order.len()];
            for (k, &o) in order.iter().enumerate() {
                pos[o] = k;
            }
            pos
        };
        let kept = rows
            .into_iter()
            .zip(pivots)
            .filter(|(_, p)| pos[*p] >= boundary)
            .map(|(r, _)| r)
            .collect();
        Sub::new(win, self.supp & cols, kept)
    }

    /// `t^{-1}` applied to the subspace: the window moves down by one.
    pub fn t_inverse(&self) -> Sub<F> {
        Sub {
            win: Window::new(self.win.n, self.win.lo - 1, self.win.hi - 1),
            supp: self.supp,
            rows: self.rows.clone(),
            pivots: self.pivots.clone(),
        }
    }

    /// The same subspace over a wider window `[lo, hi)`; rows below the old
    /// `lo` must be zero when shrinking from below.
    pub fn rewindow(&self, lo: i64, hi: i64) -> Sub<F> {
        assert!(hi >= self.win.hi, "cannot lower the tail of a subspace");
        let win = Window::new(self.win.n, lo, hi);
        let mut vecs: Vec<Vec<F>> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![F::zero(); win.dim()];
                for (k, x) in r.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let (deg, col) = self.win.coord(k);
                    assert!(win.contains(deg), "nonzero entry below the new window");
                    v[win.index(deg, col)] = x.clone();
                }
                v
            })
            .collect();
        for deg in self.win.hi..hi {
            for col in 1..=win.n {
                if has_column(self.supp, col) {
                    vecs.push(unit(win, deg, col));
                }
            }
        }
        Sub::new(win, self.supp, vecs)
    }

    /// Least degree at which column `col` appears in the subspace (the tail
    /// counts), or `None` if the subspace misses the column entirely.
    pub fn min_degree(&self, col: usize) -> Option<i64> {
        let win = self.win;
        let explicit = (win.lo..win.hi).find(|&deg| {
            let k = win.index(deg, col);
            self.rows.iter().any(|r| !r[k].is_zero())
        });
        explicit.or(has_column(self.supp, col).then_some(win.hi))
    }

    /// Whether `t * self` is contained in `self`.
    pub fn is_t_stable(&self) -> bool {
        self.rows.iter().all(|r| self.contains(&times_t(self.win, r)))
    }
}

use num::Zero;

pub fn unit<F: Field>(win: Window, deg: i64, col: usize) -> Vec<F> {
    let mut v = vec![F::zero(); win.dim()];
    v[win.index(deg, col)] = F::one();
    v
}

/// `t * v`, dropping what falls into the tail.
pub fn times_t<F: Field>(win: Window, v: &[F]) -> Vec<F> {
    let n = win.n;
    let mut out = vec![F::zero(); v.len()];
    out[n..].clone_from_slice(&v[..v.len() - n]);
    out
}
