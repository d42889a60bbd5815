//! Lattices in `X = F((t))^n`: t-stable subspaces squeezed between two
//! shifts of `X_0`.
//!
//! A [`Lattice`] is stored canonically as its column depths `delta` (so the
//! monomial part `Y_0` is the span of `t^j e_i`, `j >= -delta_i`) together
//! with the reduced echelon basis of `Y / Y_0` over the gap monomials
//! `t^j e_i`, `j < -delta_i`, in (degree, column) order. Structural equality
//! is lattice equality.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::kostant::{Coweight, KostantPicture};
use crate::linalg::{all_columns, has_column, rank, rref, rref_ordered, Sub, Window};
use crate::par::Exec;
use crate::perm::{all_permutations, Permutation};
use crate::polytope::MvPolytope;

/// A finite sum `sum c t^j e_i`, sorted by (degree, column), without zero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermVector<F: Field = Q>(Vec<(i64, usize, F)>);

impl<F: Field> TermVector<F> {
    pub fn new(terms: impl IntoIterator<Item = (F, i64, usize)>) -> Self {
        let mut acc: BTreeMap<(i64, usize), F> = BTreeMap::new();
        for (c, deg, col) in terms {
            let e = acc.entry((deg, col)).or_insert_with(F::zero);
            *e = e.clone() + c;
        }
        TermVector(
            acc.into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((d, i), c)| (d, i, c))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        TermVector(Vec::new())
    }

    pub fn monomial(deg: i64, col: usize) -> Self {
        TermVector(vec![(deg, col, F::one())])
    }

    /// Terms as `(degree, column, coefficient)`.
    pub fn terms(&self) -> &[(i64, usize, F)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.0.iter().map(|t| t.0).min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.0.iter().map(|t| t.0).max()
    }

    pub fn max_column(&self) -> usize {
        self.0.iter().map(|t| t.1).max().unwrap_or(0)
    }

    /// `t^k` times the vector.
    pub fn shift_degree(&self, k: i64) -> Self {
        TermVector(self.0.iter().map(|(d, i, c)| (d + k, *i, c.clone())).collect())
    }

    pub fn scale(&self, a: &F) -> Self {
        TermVector::new(self.0.iter().map(|(d, i, c)| (c.mul_ref(a), *d, *i)))
    }

    pub fn add(&self, other: &Self) -> Self {
        TermVector::new(
            self.0
                .iter()
                .chain(&other.0)
                .map(|(d, i, c)| (c.clone(), *d, *i)),
        )
    }

    /// Part of the vector living in column `col`.
    pub fn column_part(&self, col: usize) -> Self {
        TermVector(self.0.iter().filter(|t| t.1 == col).cloned().collect())
    }

    pub fn to_dense(&self, win: Window) -> Vec<F> {
        let mut v = vec![F::zero(); win.dim()];
        for (d, i, c) in &self.0 {
            if win.contains(*d) {
                v[win.index(*d, *i)] = c.clone();
            }
        }
        v
    }

    pub fn from_dense(win: Window, v: &[F]) -> Self {
        TermVector(
            v.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| {
                    let (d, i) = win.coord(k);
                    (d, i, c.clone())
                })
                .collect(),
        )
    }

    /// Parses sums such as `t^-2e1+3e2+4e3`, `-te3+6te5` or `1/2t^2e1`.
    pub fn parse(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || Error::Parse(format!("bad term vector {s:?}"));
        if s == "0" {
            return Ok(TermVector::zero());
        }
        let b = s.as_bytes();
        let mut pos = 0;
        let mut terms = Vec::new();
        let int = |pos: &mut usize, signed: bool| -> Option<i64> {
            let start = *pos;
            if signed && *pos < b.len() && b[*pos] == b'-' {
                *pos += 1;
            }
            while *pos < b.len() && b[*pos].is_ascii_digit() {
                *pos += 1;
            }
            s[start..*pos].parse().ok()
        };
        while pos < b.len() {
            let mut sign = 1i64;
            if b[pos] == b'+' || b[pos] == b'-' {
                if b[pos] == b'-' {
                    sign = -1;
                }
                pos += 1;
            } else if pos > 0 {
                return Err(err());
            }
            let (mut num, mut den) = (1i64, 1i64);
            if pos < b.len() && b[pos].is_ascii_digit() {
                num = int(&mut pos, false).ok_or_else(err)?;
                if pos < b.len() && b[pos] == b'/' {
                    pos += 1;
                    den = int(&mut pos, false).ok_or_else(err)?;
                    if den == 0 {
                        return Err(err());
                    }
                }
                if pos < b.len() && b[pos] == b'*' {
                    pos += 1;
                }
            }
            let mut deg = 0;
            if pos < b.len() && b[pos] == b't' {
                pos += 1;
                deg = 1;
                if pos < b.len() && b[pos] == b'^' {
                    pos += 1;
                    deg = int(&mut pos, true).ok_or_else(err)?;
                }
            }
            if pos >= b.len() || b[pos] != b'e' {
                return Err(err());
            }
            pos += 1;
            let col = int(&mut pos, false).ok_or_else(err)?;
            if col < 1 {
                return Err(err());
            }
            let c = F::from_ratio(&BigInt::from(sign * num), &BigInt::from(den));
            terms.push((c, deg, col as usize));
        }
        Ok(TermVector::new(terms))
    }
}

impl<F: Field> fmt::Display for TermVector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (d, i, c)) in self.0.iter().enumerate() {
            let (num, den) = c.to_ratio();
            let neg = num < BigInt::zero();
            let num = if neg { -num } else { num };
            if neg {
                write!(f, "-")?;
            } else if k > 0 {
                write!(f, "+")?;
            }
            if !den.is_one() {
                write!(f, "{num}/{den}")?;
            } else if !num.is_one() {
                write!(f, "{num}")?;
            }
            match d {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{d}")?,
            }
            write!(f, "e{i}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice<F: Field = Q> {
    n: usize,
    support: u64,
    delta: Vec<i64>,
    basis: Vec<TermVector<F>>,
}


impl<F: Field> Lattice<F> {
    /// The torus fixed point `underline(lambda)`.
    pub fn fixed_point(lambda: &Coweight) -> Self {
        Lattice {
            n: lambda.n(),
            support: all_columns(lambda.n()),
            delta: lambda.0.clone(),
            basis: Vec::new(),
        }
    }

    /// The smallest lattice containing `gens` and `t^hi X_0`; `hi` defaults
    /// to one more than the largest degree in the generators.
    pub fn from_generators(n: usize, gens: &[TermVector<F>], hi: Option<i64>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        for g in gens {
            if let Some(&(_, col, _)) = g.terms().iter().find(|t| t.1 == 0 || t.1 > n) {
                return Err(Error::ColumnOutOfRange { column: col, n });
            }
        }
        let max_deg = gens.iter().filter_map(TermVector::max_degree).max();
        let hi = hi.unwrap_or(max_deg.map_or(0, |d| d + 1));
        let lo = gens
            .iter()
            .filter_map(TermVector::min_degree)
            .min()
            .map_or(hi, |d| d.min(hi));
        let win = Window::new(n, lo, hi);
        let mut vecs = Vec::new();
        for g in gens {
            for m in 0..(hi - lo) {
                let v = g.shift_degree(m).to_dense(win);
                if v.iter().any(|c| !c.is_zero()) {
                    vecs.push(v);
                }
            }
        }
        Lattice::from_sub(&Sub::new(win, all_columns(n), vecs))
    }

    /// Canonical form of a t-stable window subspace.
    pub fn from_sub(sub: &Sub<F>) -> Result<Self> {
        if !sub.is_t_stable() {
            return Err(Error::Inconsistent("subspace is not t-stable".into()));
        }
        let win = sub.win;
        let mut delta = vec![0; win.n];
        for col in 1..=win.n {
            if !has_column(sub.supp, col) {
                continue;
            }
            // least k with t^k e_col in the subspace; k = hi always qualifies
            let (mut a, mut b) = (win.lo, win.hi);
            while a < b {
                let mid = a + (b - a) / 2;
                if sub.contains(&crate::linalg::unit(win, mid, col)) {
                    b = mid;
                } else {
                    a = mid + 1;
                }
            }
            delta[col - 1] = -a;
        }
        let gap = |k: usize| {
            let (d, i) = win.coord(k);
            has_column(sub.supp, i) && d < -delta[i - 1]
        };
        let rows: Vec<Vec<F>> = sub
            .rows()
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(k, c)| if gap(k) { c.clone() } else { F::zero() })
                    .collect()
            })
            .collect();
        let (rows, _) = rref(rows);
        Ok(Lattice {
            n: win.n,
            support: sub.supp,
            delta,
            basis: rows.iter().map(|r| TermVector::from_dense(win, r)).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Column mask (bit `i` for column `i`) of the ambient `V_I`.
    pub fn support(&self) -> u64 {
        self.support
    }

    pub fn is_full(&self) -> bool {
        self.support == all_columns(self.n)
    }

    /// Reduced echelon basis of `Y / Y_0` over the gap monomials.
    pub fn basis(&self) -> &[TermVector<F>] {
        &self.basis
    }

    /// `delta_i(Y)`, the largest `j` with `t^{-j} e_i` in `Y`; entries of
    /// columns outside the support read 0.
    pub fn delta(&self) -> Coweight {
        Coweight(self.delta.clone())
    }

    pub fn delta_at(&self, col: usize) -> Option<i64> {
        has_column(self.support, col).then(|| self.delta[col - 1])
    }

    pub fn dim0(&self) -> usize {
        self.basis.len()
    }

    pub fn relative_dimension(&self) -> i64 {
        self.columns().map(|i| self.delta[i - 1]).sum::<i64>() + self.dim0() as i64
    }

    fn columns(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.n).filter(|&i| has_column(self.support, i))
    }

    /// Smallest window `[lo, hi)` holding the canonical data.
    pub fn window(&self) -> Window {
        let depths: Vec<i64> = self.columns().map(|i| -self.delta[i - 1]).collect();
        let hi = depths.iter().copied().max().unwrap_or(0);
        let lo = self
            .basis
            .iter()
            .filter_map(TermVector::min_degree)
            .chain(depths)
            .min()
            .unwrap_or(hi);
        Window::new(self.n, lo, hi)
    }

    /// The lattice as a window subspace over `[lo, hi)`, which must contain
    /// [`Lattice::window`].
    pub fn to_sub_in(&self, lo: i64, hi: i64) -> Sub<F> {
        let own = self.window();
        assert!(lo <= own.lo && hi >= own.hi, "window too small");
        let win = Window::new(self.n, lo, hi);
        let mut vecs: Vec<Vec<F>> = self.basis.iter().map(|b| b.to_dense(win)).collect();
        for i in self.columns() {
            for d in -self.delta[i - 1]..hi {
                vecs.push(crate::linalg::unit(win, d, i));
            }
        }
        Sub::new(win, self.support, vecs)
    }

    pub fn to_sub(&self) -> Sub<F> {
        let w = self.window();
        self.to_sub_in(w.lo, w.hi)
    }

    /// Generators of the lattice as a `F[t]`-module: the monomials
    /// `t^{-delta_i} e_i` followed by the reduced basis.
    pub fn generators(&self) -> Vec<TermVector<F>> {
        self.columns()
            .map(|i| TermVector::monomial(-self.delta[i - 1], i))
            .chain(self.basis.iter().cloned())
            .collect()
    }

    pub fn member(&self, v: &TermVector<F>) -> bool {
        let mut rest: BTreeMap<(i64, usize), F> = BTreeMap::new();
        for (d, i, c) in v.terms() {
            if *i == 0 || *i > self.n || !has_column(self.support, *i) {
                return false;
            }
            if *d < -self.delta[i - 1] {
                rest.insert((*d, *i), c.clone());
            }
        }
        for row in &self.basis {
            let (pd, pi, _) = &row.terms()[0];
            let Some(f) = rest.get(&(*pd, *pi)).cloned() else {
                continue;
            };
            for (d, i, c) in row.terms() {
                let e = rest.entry((*d, *i)).or_insert_with(F::zero);
                e.sub_mul_assign(&f, c);
            }
            rest.retain(|_, c| !c.is_zero());
        }
        rest.is_empty()
    }

    /// Coordinates of `Y / Y_0` over all gap monomials of the window, with
    /// one extra degree below it.
    pub(crate) fn gap_model(&self) -> GapModel<F> {
        let lo = self.window().lo - 1;
        let mut coords: Vec<(i64, usize)> = self
            .columns()
            .flat_map(|i| (lo..-self.delta[i - 1]).map(move |d| (d, i)))
            .collect();
        coords.sort_unstable();
        let index: HashMap<(i64, usize), usize> =
            coords.iter().enumerate().map(|(k, c)| (*c, k)).collect();
        let basis = self
            .basis
            .iter()
            .map(|b| {
                let mut v = vec![F::zero(); coords.len()];
                for (d, i, c) in b.terms() {
                    v[index[&(*d, *i)]] = c.clone();
                }
                v
            })
            .collect();
        GapModel {
            coords,
            index,
            basis,
            delta: self.delta.clone(),
            support: self.support,
        }
    }

    /// `Y cap V_I` for the column mask `cols`, on the same ambient space.
    pub fn intersect_columns_mask(&self, cols: u64) -> Lattice<F> {
        let gm = self.gap_model();
        let kept = gm.kernel_rows(cols);
        let (kept, _) = rref(kept);
        let basis = kept.iter().map(|r| gm.to_terms(r)).collect();
        let support = self.support & cols;
        let delta = (1..=self.n)
            .map(|i| if has_column(support, i) { self.delta[i - 1] } else { 0 })
            .collect();
        Lattice {
            n: self.n,
            support,
            delta,
            basis,
        }
    }

    pub fn intersect_columns(&self, columns: &[usize]) -> Result<Lattice<F>> {
        Ok(self.intersect_columns_mask(self.mask_of(columns)?))
    }

    fn mask_of(&self, columns: &[usize]) -> Result<u64> {
        let mut m = 0;
        for &c in columns {
            if c == 0 || c > self.n {
                return Err(Error::ColumnOutOfRange { column: c, n: self.n });
            }
            m |= 1 << c;
        }
        Ok(m)
    }

    /// `d_I(Y) = dim_0(Y cap V_I)` for the column mask `cols`.
    pub fn d_mask(&self, cols: u64) -> usize {
        self.gap_model().d(cols)
    }

    pub fn d(&self, columns: &[usize]) -> Result<usize> {
        Ok(self.d_mask(self.mask_of(columns)?))
    }

    fn require_full(&self) -> Result<()> {
        if self.is_full() {
            Ok(())
        } else {
            Err(Error::Inconsistent("operation needs a lattice of the full space".into()))
        }
    }

    /// The Kostant picture `p(Y)`, by inclusion-exclusion over the
    /// intersections with interval columns.
    #[allow(clippy::needless_range_loop)]
    pub fn picture_of(&self) -> Result<KostantPicture> {
        self.require_full()?;
        let n = self.n;
        let gm = self.gap_model();
        let interval = |l: usize, r: usize| -> u64 { (l..=r).fold(0, |m, c| m | (1 << c)) };
        // d over intervals; empty and single columns contribute nothing
        let mut d = vec![vec![0i64; n + 2]; n + 2];
        for l in 1..=n {
            for r in l + 1..=n {
                d[l][r] = gm.d(interval(l, r)) as i64;
            }
        }
        let at = |l: usize, r: usize| if l < r { d[l][r] } else { 0 };
        let mut intervals = Vec::new();
        for l in 1..=n {
            for r in l + 1..=n {
                let m = at(l, r) - at(l + 1, r) - at(l, r - 1) + at(l + 1, r - 1);
                if m < 0 {
                    return Err(Error::Inconsistent(format!(
                        "negative multiplicity {m} for [{l},{r}]"
                    )));
                }
                intervals.extend(std::iter::repeat_n((l, r), m as usize));
            }
        }
        let p = KostantPicture::new(n, intervals)?;
        if p.num_loops() != self.dim0() {
            return Err(Error::Inconsistent("picture size differs from dim0".into()));
        }
        Ok(p)
    }

    /// `lambda(Y) = delta(Y) + l(p(Y))`.
    pub fn lambda_of(&self) -> Result<Coweight> {
        let (l, _) = self.picture_of()?.side_counts();
        Ok(self.delta().plus(&l))
    }

    /// `mu^w(Y)`, computed from the `d_I` differences and from the projection
    /// description; the two must agree.
    pub fn mu(&self, w: &Permutation) -> Result<Coweight> {
        self.require_full()?;
        if w.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: w.n(),
            });
        }
        let table = MuTable::build(self, suffix_masks(w), Exec::Sequential)?;
        Ok(table.mu(w))
    }

    /// Moment polytope of the torus orbit closure: vertices `mu^w(Y)` for all
    /// `w`, with facet bounds checked against `delta` and `d_I`.
    pub fn orbit_polytope(&self, exec: Exec) -> Result<MvPolytope> {
        self.require_full()?;
        let n = self.n;
        let masks: Vec<u64> = (1u64..(1 << n)).map(|k| k << 1).collect();
        let table = MuTable::build(self, masks, exec)?;
        let perms = all_permutations(n);
        let map: BTreeMap<Permutation, Coweight> = perms
            .into_iter()
            .map(|w| {
                let mu = table.mu(&w);
                (w, mu)
            })
            .collect();
        let lambda = map[&Permutation::identity(n)].clone();
        let poly = MvPolytope::from_vertex_map(n, lambda, map)?;
        let total = self.relative_dimension();
        let full = all_columns(n);
        for (cols, &c) in &poly.facets {
            let mask = cols.iter().fold(0u64, |m, &i| m | (1 << i));
            let rest = full & !mask;
            let lower: i64 = crate::polytope::mask_columns(rest)
                .iter()
                .map(|&i| self.delta[i - 1])
                .sum::<i64>()
                + table.d[&rest] as i64;
            if c != total - lower {
                return Err(Error::Inconsistent(format!(
                    "facet bound {c} for {cols:?} differs from {}",
                    total - lower
                )));
            }
        }
        Ok(poly)
    }

    /// `Y cap V_{complement of I}` with the remaining columns renumbered
    /// `1..n-|I|`.
    pub fn collapse_lattice(&self, removed: &[usize]) -> Result<Lattice<F>> {
        self.require_full()?;
        let gone = self.mask_of(removed)?;
        let keep = all_columns(self.n) & !gone;
        let m = keep.count_ones() as usize;
        if m == 0 {
            return Err(Error::TooFewColumns { n: 0, min: 1 });
        }
        let inter = self.intersect_columns_mask(keep);
        let mut renumber = vec![0; self.n + 1];
        let mut next = 0;
        for (i, slot) in renumber.iter_mut().enumerate().skip(1) {
            if has_column(keep, i) {
                next += 1;
                *slot = next;
            }
        }
        // renumbering preserves the (degree, column) order, so the basis
        // stays reduced
        let basis = inter
            .basis
            .iter()
            .map(|b| TermVector(b.0.iter().map(|(d, i, c)| (*d, renumber[*i], c.clone())).collect()))
            .collect();
        let delta = (1..=self.n)
            .filter(|&i| has_column(keep, i))
            .map(|i| self.delta[i - 1])
            .collect();
        Ok(Lattice {
            n: m,
            support: all_columns(m),
            delta,
            basis,
        })
    }

    /// Multiplies column `i` by `t^{-mu_i}`.
    pub fn shift(&self, mu: &Coweight) -> Result<Lattice<F>> {
        if mu.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: mu.n(),
            });
        }
        let moved: Vec<TermVector<F>> = self
            .basis
            .iter()
            .map(|b| TermVector::new(b.0.iter().map(|(d, i, c)| (c.clone(), d - mu.at(*i), *i))))
            .collect();
        let delta: Vec<i64> = (1..=self.n)
            .map(|i| {
                if has_column(self.support, i) {
                    self.delta[i - 1] + mu.at(i)
                } else {
                    0
                }
            })
            .collect();
        let mut out = Lattice {
            n: self.n,
            support: self.support,
            delta,
            basis: moved,
        };
        out.basis = out.reduced_basis();
        Ok(out)
    }

    fn reduced_basis(&self) -> Vec<TermVector<F>> {
        let gm = self.gap_model();
        let (rows, _) = rref(gm.basis.clone());
        rows.iter().map(|r| gm.to_terms(r)).collect()
    }

    /// Limit of the torus orbit in the chamber of `w`: echelonize with the
    /// columns ordered by position in `w`, then keep the pivot-column part of
    /// each row. The result must be the fixed point `underline(mu^w(Y))`.
    pub fn degenerate(&self, w: &Permutation) -> Result<Lattice<F>> {
        self.require_full()?;
        let n = self.n;
        let gm = self.gap_model();
        let winv = w.inverse();
        let mut order: Vec<usize> = (0..gm.coords.len()).collect();
        order.sort_by_key(|&k| (winv.apply(gm.coords[k].1), gm.coords[k].0));
        let (rows, pivots) = rref_ordered(gm.basis.clone(), &order);
        let win = self.window();
        let mut vecs = Vec::new();
        for (r, p) in rows.iter().zip(pivots) {
            let col = gm.coords[p].1;
            let part: Vec<(F, i64, usize)> = r
                .iter()
                .enumerate()
                .filter(|(k, c)| !c.is_zero() && gm.coords[*k].1 == col)
                .map(|(k, c)| (c.clone(), gm.coords[k].0, col))
                .collect();
            vecs.push(TermVector::new(part).to_dense(win));
        }
        for i in 1..=n {
            for d in -self.delta[i - 1]..win.hi {
                vecs.push(crate::linalg::unit(win, d, i));
            }
        }
        let limit = Sub::new(win, all_columns(n), vecs);
        let mu = self.mu(w)?;
        let expected: Lattice<F> = Lattice::fixed_point(&mu);
        let ew = expected.window();
        let lo = win.lo.min(ew.lo);
        let hi = win.hi.max(ew.hi);
        if limit.rewindow(lo, hi) != expected.to_sub_in(lo, hi) {
            return Err(Error::Inconsistent(format!(
                "degeneration along {w} is not the fixed point {mu}"
            )));
        }
        Lattice::from_sub(&limit)
    }
}

/// `Y / Y_0` in coordinates: one slot per gap monomial `t^j e_i`,
/// `j < -delta_i`. Every subspace between `Y_0` and `Y` is determined by
/// its image here, and `t` acts by shifting degrees and forgetting what
/// lands in `Y_0`.
#[derive(Clone, Debug)]
pub(crate) struct GapModel<F: Field> {
    pub coords: Vec<(i64, usize)>,
    index: HashMap<(i64, usize), usize>,
    /// Reduced basis of `Y / Y_0`.
    pub basis: Vec<Vec<F>>,
    delta: Vec<i64>,
    support: u64,
}

impl<F: Field> GapModel<F> {
    pub fn width(&self) -> usize {
        self.coords.len()
    }

    pub fn is_gap(&self, deg: i64, col: usize) -> bool {
        has_column(self.support, col) && deg < -self.delta[col - 1]
    }

    /// Image of `v` modulo `Y_0`; `None` if `v` has a term outside the
    /// support or a gap term below the model.
    pub fn image(&self, v: &TermVector<F>) -> Option<Vec<F>> {
        let mut out = vec![F::zero(); self.width()];
        for (d, i, c) in v.terms() {
            if !has_column(self.support, *i) {
                return None;
            }
            if self.is_gap(*d, *i) {
                out[*self.index.get(&(*d, *i))?] = c.clone();
            }
        }
        Some(out)
    }

    pub fn to_terms(&self, v: &[F]) -> TermVector<F> {
        TermVector(
            v.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (self.coords[k].0, self.coords[k].1, c.clone()))
                .collect(),
        )
    }

    /// `t` acting on `X / Y_0`.
    pub fn times_t(&self, v: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.width()];
        for (k, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (d, i) = self.coords[k];
            if let Some(&j) = self.index.get(&(d + 1, i)) {
                out[j] = c.clone();
            }
        }
        out
    }

    /// Basis rows of `(Y cap V_J) / (Y_0 cap V_J)` for the column mask `cols`.
    pub fn kernel_rows(&self, cols: u64) -> Vec<Vec<F>> {
        let (outside, inside): (Vec<usize>, Vec<usize>) =
            (0..self.width()).partition(|&k| !has_column(cols, self.coords[k].1));
        let boundary = outside.len();
        let order: Vec<usize> = outside.iter().chain(&inside).copied().collect();
        let (rows, pivots) = rref_ordered(self.basis.clone(), &order);
        let mut is_outside = vec![false; self.width()];
        for &k in &order[..boundary] {
            is_outside[k] = true;
        }
        rows.into_iter()
            .zip(pivots)
            .filter(|(_, p)| !is_outside[*p])
            .map(|(r, _)| r)
            .collect()
    }

    /// `dim_0(Y cap V_J)` for the column mask `cols`.
    pub fn d(&self, cols: u64) -> usize {
        let projected: Vec<Vec<F>> = self
            .basis
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&self.coords)
                    .filter(|(_, c)| !has_column(cols, c.1))
                    .map(|(x, _)| x.clone())
                    .collect()
            })
            .collect();
        self.basis.len() - rank(projected)
    }

    /// Least degree of column `col` among the rows, if any.
    pub fn min_degree(&self, rows: &[Vec<F>], col: usize) -> Option<i64> {
        rows.iter()
            .flat_map(|r| {
                r.iter()
                    .zip(&self.coords)
                    .filter(move |(x, k)| k.1 == col && !x.is_zero())
                    .map(|(_, k)| k.0)
            })
            .min()
    }
}

/// Suffix sets `{w(i)..w(n)}` for `i = 1..n`, as column masks.
fn suffix_masks(w: &Permutation) -> Vec<u64> {
    let mut m = 0u64;
    let mut out: Vec<u64> = w.one_line().iter().rev().map(|&c| {
        m |= 1 << c;
        m
    }).collect();
    out.reverse();
    out
}

/// `d_J` and the projection depths of `Y cap V_J` for a family of masks.
struct MuTable {
    delta: Vec<i64>,
    d: HashMap<u64, usize>,
    /// Least degree of column `c` over `(Y cap V_J) / Y_0`, if any.
    proj: HashMap<(u64, usize), Option<i64>>,
}

impl MuTable {
    fn build<F: Field>(y: &Lattice<F>, masks: Vec<u64>, exec: Exec) -> Result<Self> {
        let gm = y.gap_model();
        let mut all = masks.clone();
        for &m in &masks {
            for c in crate::polytope::mask_columns(m) {
                all.push(m & !(1 << c));
            }
        }
        all.sort_unstable();
        all.dedup();
        let rows = exec.map(&all, |&m| {
            let d = gm.d(m);
            let kernel = gm.kernel_rows(m);
            let proj: Vec<(usize, Option<i64>)> = crate::polytope::mask_columns(m)
                .into_iter()
                .map(|c| (c, gm.min_degree(&kernel, c)))
                .collect();
            (m, d, proj)
        });
        let mut table = MuTable {
            delta: y.delta.clone(),
            d: HashMap::new(),
            proj: HashMap::new(),
        };
        for (m, d, proj) in rows {
            table.d.insert(m, d);
            for (c, deg) in proj {
                table.proj.insert((m, c), deg);
            }
        }
        for &m in &masks {
            for c in crate::polytope::mask_columns(m) {
                let by_d = table.delta[c - 1] + table.d[&m] as i64 - table.d[&(m & !(1 << c))] as i64;
                let by_proj = table.by_projection(m, c);
                if by_d != by_proj {
                    return Err(Error::Inconsistent(format!(
                        "mu formulas disagree at column {c} of {:?}: {by_d} vs {by_proj}",
                        crate::polytope::mask_columns(m)
                    )));
                }
            }
        }
        Ok(table)
    }

    fn by_projection(&self, m: u64, c: usize) -> i64 {
        let depth = -self.delta[c - 1];
        -self.proj[&(m, c)].map_or(depth, |k| k.min(depth))
    }

    fn mu(&self, w: &Permutation) -> Coweight {
        let masks = suffix_masks(w);
        let mut out = vec![0; self.delta.len()];
        for (k, &m) in masks.iter().enumerate() {
            let c = w.apply(k + 1);
            let rest = m & !(1 << c);
            out[c - 1] = self.delta[c - 1] + self.d[&m] as i64 - self.d[&rest] as i64;
        }
        Coweight(out)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::field::{q, Fp};

    pub(crate) fn lat(n: usize, gens: &[&str]) -> Lattice {
        let gens: Vec<TermVector> = gens.iter().map(|g| TermVector::parse(g).unwrap()).collect();
        Lattice::from_generators(n, &gens, None).unwrap()
    }

    pub(crate) fn left() -> Lattice {
        lat(6, &["t^-2e1", "e2", "t^2e3", "e4", "te5", "t^2e6"])
    }

    pub(crate) fn middle() -> Lattice {
        lat(
            6,
            &["t^-2e1+3e2+4e3", "3te2+4te3", "-te3+6te5", "t^2e4+2te5-te6", "t^2e5", "t^2e6"],
        )
    }

    pub(crate) fn right() -> Lattice {
        lat(
            6,
            &[
                "e2+2e3+3e4+2e5+t^-2e6",
                "t^2e1+t^2e2+te2+2te3+3te4",
                "te5+t^-1e6",
                "e6",
                "t^3e2",
                "t^3e3",
            ],
        )
    }

    fn tv(s: &str) -> TermVector {
        TermVector::parse(s).unwrap()
    }

    fn pic(n: usize, iv: &[(usize, usize)]) -> KostantPicture {
        KostantPicture::new(n, iv.iter().copied()).unwrap()
    }

    #[test]
    fn term_vector_parse_and_display() {
        let v = tv("t^-2e1 + 3e2 + 4e3");
        assert_eq!(v.terms().len(), 3);
        assert_eq!(v.to_string(), "t^-2e1+3e2+4e3");
        let w = tv("-te3+6te5-1/2t^2e1");
        assert_eq!(w.to_string(), "-te3+6te5-1/2t^2e1");
        assert_eq!(TermVector::<Q>::parse(&w.to_string()).unwrap(), w);
        assert!(TermVector::<Q>::parse("t^e1").is_err());
        assert!(TermVector::<Q>::parse("3").is_err());
        assert!(tv("e1-e1").is_zero());
    }

    #[test]
    fn generator_errors() {
        assert_eq!(Lattice::<Q>::from_generators(2, &[], None), Err(Error::EmptyGenerators));
        assert_eq!(
            Lattice::<Q>::from_generators(2, &[tv("e3")], None),
            Err(Error::ColumnOutOfRange { column: 3, n: 2 })
        );
    }

    #[test]
    fn worked_lattices_relative_dimensions() {
        assert_eq!(left().relative_dimension(), -3);
        assert_eq!(middle().relative_dimension(), -6);
        assert_eq!(right().relative_dimension(), -9);
    }

    #[test]
    fn fixed_point_from_monomials() {
        let y = left();
        let lambda = Coweight(vec![2, 0, -2, 0, -1, -2]);
        assert_eq!(y, Lattice::fixed_point(&lambda));
        assert_eq!(y.delta(), lambda);
        assert_eq!(y.dim0(), 0);
        assert!(y.picture_of().unwrap().is_empty());
        assert_eq!(y.lambda_of().unwrap(), lambda);
        assert_eq!(y.mu(&Permutation::identity(6)).unwrap(), lambda);
    }

    #[test]
    fn worked_lattice_pictures() {
        let m = middle();
        assert_eq!(m.dim0(), 4);
        assert_eq!(m.picture_of().unwrap(), pic(6, &[(2, 3), (1, 3), (3, 5), (4, 6)]));
        let r = right();
        assert_eq!(r.dim0(), 5);
        assert_eq!(
            r.picture_of().unwrap(),
            pic(6, &[(5, 6), (2, 4), (1, 4), (2, 5), (2, 6)])
        );
        assert_eq!(m.d(&[1, 2, 3]).unwrap(), 2);
        assert_eq!(m.d(&[1, 2, 3, 4, 5, 6]).unwrap(), 4);
        assert_eq!(m.d(&[4]).unwrap(), 0);
    }

    #[test]
    fn middle_lambda_is_delta_plus_left_ends() {
        let m = middle();
        let l = Coweight(vec![1, 1, 1, 1, 0, 0]);
        assert_eq!(m.lambda_of().unwrap(), m.delta().plus(&l));
        assert_eq!(
            m.lambda_of().unwrap().total() - m.delta().total(),
            m.dim0() as i64
        );
    }

    #[test]
    fn membership_and_delta() {
        for y in [middle(), right()] {
            let d = y.delta();
            for g in y.generators() {
                assert!(y.member(&g));
                assert!(y.member(&g.shift_degree(1)));
            }
            for i in 1..=6 {
                assert!(y.member(&TermVector::monomial(-d.at(i), i)));
                assert!(!y.member(&TermVector::monomial(-d.at(i) - 1, i)));
            }
        }
        assert!(middle().member(&tv("t^2e3")));
        assert!(!middle().member(&tv("t^-3e1")));
        assert!(middle().member(&tv("t^-1e1")));
    }

    #[test]
    fn window_extension_is_invisible() {
        let gens: Vec<TermVector> = ["t^-2e1+3e2+4e3", "3te2+4te3", "-te3+6te5", "t^2e4+2te5-te6", "t^2e5", "t^2e6"]
            .iter()
            .map(|s| tv(s))
            .collect();
        let wide = Lattice::from_generators(6, &gens, Some(6)).unwrap();
        assert_eq!(wide, middle());
        let sub = middle().to_sub_in(-5, 7);
        assert_eq!(Lattice::from_sub(&sub).unwrap(), middle());
    }

    #[test]
    fn right_lattice_collapse_along_four() {
        let r = right();
        let inter = r.intersect_columns(&[1, 2, 3, 5, 6]).unwrap();
        assert!(inter.member(&tv("te5+t^-1e6")));
        assert!(inter.member(&tv("t^2e1+t^2e2-te5")));
        let hat = r.collapse_lattice(&[4]).unwrap();
        assert_eq!(hat.n(), 5);
        assert!(hat.member(&tv("te4+t^-1e5")));
        assert!(hat.member(&tv("t^2e1+t^2e2-te4")));
        assert_eq!(hat.dim0(), 2);
        assert_eq!(hat.picture_of().unwrap().num_loops(), 2);
    }

    #[test]
    fn collapse_of_nothing_is_identity() {
        assert_eq!(right().collapse_lattice(&[]).unwrap(), right());
        let lambda = Coweight(vec![2, 0, -2, 0, -1, -2]);
        let fp: Lattice = Lattice::fixed_point(&lambda);
        assert_eq!(
            fp.collapse_lattice(&[2, 5]).unwrap(),
            Lattice::fixed_point(&Coweight(vec![2, -2, 0, -2]))
        );
    }

    #[test]
    fn single_column_intersection_is_monomial() {
        let r = right();
        for i in 1..=6 {
            let y = r.intersect_columns(&[i]).unwrap();
            assert_eq!(y.dim0(), 0);
            assert_eq!(y.delta_at(i), Some(r.delta().at(i)));
            assert_eq!(r.d(&[i]).unwrap(), 0);
        }
    }

    #[test]
    fn shifts() {
        let lambda = Coweight(vec![1, -1, 0]);
        let mu = Coweight(vec![2, 0, -3]);
        let fp: Lattice = Lattice::fixed_point(&lambda);
        assert_eq!(fp.shift(&mu).unwrap(), Lattice::fixed_point(&lambda.plus(&mu)));
        let r = right();
        let mu6 = Coweight(vec![1, -2, 0, 3, 0, -1]);
        let s = r.shift(&mu6).unwrap();
        assert_eq!(s.delta(), r.delta().plus(&mu6));
        assert_eq!(s.picture_of().unwrap(), r.picture_of().unwrap());
        assert_eq!(s.shift(&Coweight(mu6.0.iter().map(|x| -x).collect())).unwrap(), r);
        assert_eq!(r.shift(&Coweight::zero(6)).unwrap(), r);
    }

    #[test]
    fn mu_extremes() {
        for y in [middle(), right()] {
            let p = y.picture_of().unwrap();
            let lambda = y.lambda_of().unwrap();
            assert_eq!(y.mu(&Permutation::identity(6)).unwrap(), lambda);
            assert_eq!(
                y.mu(&Permutation::longest(6)).unwrap(),
                crate::polytope::lowest_vertex(&p, &lambda)
            );
        }
    }

    #[test]
    fn degeneration_hits_fixed_points() {
        let r = right();
        for w in all_permutations(4) {
            let mut full = w.one_line().to_vec();
            full.extend([5, 6]);
            let w6 = Permutation::new(full).unwrap();
            let lim = r.degenerate(&w6).unwrap();
            assert_eq!(lim, Lattice::fixed_point(&r.mu(&w6).unwrap()));
        }
    }

    #[test]
    fn orbit_polytope_of_fixed_point_is_a_point() {
        let fp: Lattice = Lattice::fixed_point(&Coweight(vec![1, 0, -1]));
        let poly = fp.orbit_polytope(Exec::Sequential).unwrap();
        assert_eq!(poly.vertices.len(), 1);
    }

    #[test]
    fn right_lattice_orbit_polytope_is_smaller() {
        let r = right();
        let poly = r.orbit_polytope(Exec::Parallel).unwrap();
        let p = r.picture_of().unwrap();
        let mv = crate::polytope::mv_polytope(&p, &r.lambda_of().unwrap()).unwrap();
        assert_ne!(poly.vertex_by_perm, mv.vertex_by_perm);
        assert_eq!(poly, r.orbit_polytope(Exec::Sequential).unwrap());
        for v in &poly.vertices {
            assert!(mv.contains_coweight(v));
        }
    }

    #[test]
    fn modular_mode_agrees_on_worked_lattices() {
        let gens: Vec<TermVector<Fp>> = ["e2+2e3+3e4+2e5+t^-2e6", "t^2e1+t^2e2+te2+2te3+3te4", "te5+t^-1e6", "e6", "t^3e2", "t^3e3"]
            .iter()
            .map(|s| TermVector::parse(s).unwrap())
            .collect();
        let y = Lattice::from_generators(6, &gens, None).unwrap();
        assert_eq!(y.picture_of().unwrap(), right().picture_of().unwrap());
        assert_eq!(y.delta(), right().delta());
        assert_eq!(q(1, 1), Q::one());
    }
}
