//! p-flags, the three compatibility grades, and the parametrization of
//! lattices by flag points.
//!
//! All subspaces handled here sit between `Y_0` and `Y`, so they are stored
//! by their images in `Y / Y_0` (see the gap model of [`Lattice`]).

use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::collapse::collapse_column;
use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::kostant::{Coweight, KostantPicture, Loop};
use crate::lattice::{GapModel, Lattice, TermVector};
use crate::linalg::{express, left_kernel, reduce_by, rref};
use crate::par::Exec;
use crate::polytope::mask_columns;

fn loop_mask(l: &Loop) -> u64 {
    (l.left..=l.right).fold(0, |m, c| m | (1 << c))
}

#[derive(Clone, Debug)]
struct Span<F: Field> {
    rows: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Span<F> {
    fn new(vectors: Vec<Vec<F>>) -> Self {
        let (rows, pivots) = rref(vectors);
        Span { rows, pivots }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[F]) -> Vec<F> {
        reduce_by(&self.rows, &self.pivots, v)
    }

    fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
}

/// The p-flag `{Y_L}` of a lattice, with the spaces `Y_L°` below each step.
#[derive(Clone, Debug)]
pub struct PFlag<F: Field = Q> {
    picture: KostantPicture,
    model: GapModel<F>,
    spaces: BTreeMap<Loop, Span<F>>,
    inner: BTreeMap<Loop, Span<F>>,
}

impl<F: Field> PFlag<F> {
    pub fn picture(&self) -> &KostantPicture {
        &self.picture
    }

    /// `dim_0(Y_L)`.
    pub fn dim0(&self, l: &Loop) -> usize {
        self.spaces[l].dim()
    }

    /// `dim(Y_L / Y_L°)`.
    pub fn quotient_dim(&self, l: &Loop) -> usize {
        self.spaces[l].dim() - self.inner[l].dim()
    }

    /// Basis of `Y_L` modulo `Y_0`.
    pub fn basis(&self, l: &Loop) -> Vec<TermVector<F>> {
        self.spaces[l].rows.iter().map(|r| self.model.to_terms(r)).collect()
    }

    /// Whether `Proj_{V_i}(Y_L)` is strictly larger than `Proj_{V_i}(Y_L°)`.
    /// Both projections are monomial tails, so it is enough to compare their
    /// least degrees; the common `Y_0` part never wins.
    pub fn projection_grows(&self, l: &Loop, column: usize) -> bool {
        let outer = self.model.min_degree(&self.spaces[l].rows, column);
        let inner = self.model.min_degree(&self.inner[l].rows, column);
        match (outer, inner) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            (None, _) => false,
        }
    }

    /// Condition (i): growth at both ends of every loop.
    pub fn ends_condition(&self) -> bool {
        self.picture
            .loops()
            .iter()
            .all(|l| self.projection_grows(l, l.left) && self.projection_grows(l, l.right))
    }

    /// Condition (i'): growth at every column each loop passes through.
    pub fn columns_condition(&self) -> bool {
        self.first_column_failure().is_none()
    }

    /// First `(loop, column)` where (i') fails.
    pub fn first_column_failure(&self) -> Option<(Loop, usize)> {
        self.picture.loops().iter().find_map(|l| {
            (l.left..=l.right)
                .find(|&c| !self.projection_grows(l, c))
                .map(|c| (*l, c))
        })
    }
}

/// The p-flag of `y` for its own picture.
pub fn build_p_flag<F: Field>(y: &Lattice<F>) -> Result<PFlag<F>> {
    let p = y.picture_of()?;
    let order = p.inner_first();
    build_p_flag_in_order(y, &p, &order)
}

/// Builds `Y_L = Y cap t^{-1} Y_L°` loop by loop in the given order, which
/// must list every loop after the loops it encircles.
pub fn build_p_flag_in_order<F: Field>(
    y: &Lattice<F>,
    p: &KostantPicture,
    order: &[Loop],
) -> Result<PFlag<F>> {
    if p.n() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: y.n(),
            got: p.n(),
        });
    }
    let mut sorted = order.to_vec();
    sorted.sort();
    if sorted != p.loops() {
        return Err(Error::Inconsistent("flag order is not a listing of the picture".into()));
    }
    let model = y.gap_model();
    let mut spaces: BTreeMap<Loop, Span<F>> = BTreeMap::new();
    let mut inner: BTreeMap<Loop, Span<F>> = BTreeMap::new();
    for l in order {
        let mut below = Vec::new();
        for m in p.encircled_by(l) {
            let Some(s) = spaces.get(m) else {
                return Err(Error::Inconsistent(format!(
                    "loop {} processed before {}",
                    l.label(),
                    m.label()
                )));
            };
            below.extend(s.rows.iter().cloned());
        }
        let below = Span::new(below);
        let candidates = model.kernel_rows(loop_mask(l));
        let images: Vec<Vec<F>> = candidates
            .iter()
            .map(|g| below.reduce(&model.times_t(g)))
            .collect();
        let vectors: Vec<Vec<F>> = left_kernel(&images)
            .into_iter()
            .map(|c| {
                let mut v = vec![F::zero(); model.width()];
                for (ck, g) in c.iter().zip(&candidates) {
                    if ck.is_zero() {
                        continue;
                    }
                    for (x, gx) in v.iter_mut().zip(g) {
                        *x = x.clone() + ck.mul_ref(gx);
                    }
                }
                v
            })
            .collect();
        let space = Span::new(vectors);
        if !below.rows.iter().all(|r| space.contains(r)) {
            return Err(Error::Inconsistent(format!(
                "Y_L does not contain the spaces below it at {}",
                l.label()
            )));
        }
        let dim = space.dim() - below.dim();
        if dim != 1 {
            return Err(Error::FlagFailure {
                left: l.left,
                right: l.right,
                copy: l.copy,
                dim,
            });
        }
        spaces.insert(*l, space);
        inner.insert(*l, below);
    }
    Ok(PFlag {
        picture: p.clone(),
        model,
        spaces,
        inner,
    })
}

/// `p(Y) = p`; when it holds, the flag is built and condition (i) is
/// checked as a second path to the same verdict.
pub fn is_weakly_compatible<F: Field>(y: &Lattice<F>, p: &KostantPicture) -> Result<bool> {
    Ok(weak_check(y, p)?.is_some())
}

fn weak_check<F: Field>(y: &Lattice<F>, p: &KostantPicture) -> Result<Option<PFlag<F>>> {
    if p.n() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: y.n(),
            got: p.n(),
        });
    }
    if y.picture_of()? != *p {
        return Ok(None);
    }
    let flag = build_p_flag_in_order(y, p, &p.inner_first())?;
    if !flag.ends_condition() {
        return Err(Error::Inconsistent(
            "picture matches but condition (i) fails".into(),
        ));
    }
    Ok(Some(flag))
}

fn weak_flag<F: Field>(y: &Lattice<F>, p: &KostantPicture) -> Result<PFlag<F>> {
    weak_check(y, p)?.ok_or(Error::NotWeaklyCompatible)
}

pub fn is_compatible<F: Field>(y: &Lattice<F>, p: &KostantPicture) -> Result<bool> {
    Ok(weak_flag(y, p)?.columns_condition())
}

/// Compatibility of every collapse `Y_{complement of I}` with the picture
/// collapsed along `I`, for all `I` leaving at least two columns.
pub fn is_strongly_compatible<F: Field>(y: &Lattice<F>, p: &KostantPicture) -> Result<bool> {
    is_strongly_compatible_with(y, p, Exec::Sequential)
}

pub fn is_strongly_compatible_with<F: Field>(
    y: &Lattice<F>,
    p: &KostantPicture,
    exec: Exec,
) -> Result<bool> {
    if !weak_flag(y, p)?.columns_condition() {
        return Ok(false);
    }
    let n = y.n();
    // subsets of removed columns, level by level
    let mut level: BTreeMap<u64, KostantPicture> = BTreeMap::new();
    level.insert(0, p.clone());
    for size in 1..=n.saturating_sub(2) {
        let mut next: BTreeMap<u64, KostantPicture> = BTreeMap::new();
        for (&mask, pic) in &level {
            let remaining: Vec<usize> = (1..=n).filter(|c| mask & (1 << c) == 0).collect();
            for (pos, &c) in remaining.iter().enumerate() {
                let child = collapse_column(pic, pos + 1)?.picture;
                let key = mask | (1 << c);
                match next.get(&key) {
                    Some(prev) if *prev != child => {
                        return Err(Error::Inconsistent(format!(
                            "collapse along {:?} depends on the order",
                            mask_columns(key)
                        )))
                    }
                    Some(_) => {}
                    None => {
                        next.insert(key, child);
                    }
                }
            }
        }
        debug_assert!(next.keys().all(|m| m.count_ones() as usize == size));
        let items: Vec<(u64, KostantPicture)> = next.iter().map(|(m, p)| (*m, p.clone())).collect();
        let verdicts = exec.map(&items, |(mask, pic)| -> Result<bool> {
            let hat = y.collapse_lattice(&mask_columns(*mask))?;
            if hat.picture_of()? != *pic {
                return Err(Error::Inconsistent(format!(
                    "collapse along {:?} of a compatible lattice is not weakly compatible",
                    mask_columns(*mask)
                )));
            }
            is_compatible(&hat, pic)
        });
        for v in verdicts {
            if !v? {
                return Ok(false);
            }
        }
        level = next;
    }
    Ok(true)
}

/// Coefficients `(a_l = 1, a_{l+1}, .., a_r)` of the line chosen for every
/// loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagPoint<F: Field = Q> {
    pub coeffs: BTreeMap<Loop, Vec<F>>,
}

impl<F: Field> FlagPoint<F> {
    /// Number of free coefficients, `sum (r_L - l_L)`.
    pub fn degrees_of_freedom(&self) -> usize {
        self.coeffs.values().map(|a| a.len() - 1).sum()
    }

    pub fn validate(&self, p: &KostantPicture) -> Result<()> {
        let keys: Vec<Loop> = self.coeffs.keys().copied().collect();
        if keys != p.loops() {
            return Err(Error::InvalidFlagPoint("loops differ from the picture".into()));
        }
        for (l, a) in &self.coeffs {
            if a.len() != l.length() + 1 {
                return Err(Error::InvalidFlagPoint(format!(
                    "{} needs {} coefficients, got {}",
                    l.label(),
                    l.length() + 1,
                    a.len()
                )));
            }
            if !a[0].is_one() {
                return Err(Error::InvalidFlagPoint(format!("{}: a_l must be 1", l.label())));
            }
            let m = anchor(p, l);
            if a[m - l.left].is_zero() {
                return Err(Error::InvalidFlagPoint(format!(
                    "{}: a_{m} must be nonzero",
                    l.label()
                )));
            }
        }
        Ok(())
    }
}

/// Left end of the largest loop inside `l` with the same right end, or the
/// right end itself.
fn anchor(p: &KostantPicture, l: &Loop) -> usize {
    p.encircled_by(l)
        .filter(|m| m.right == l.right)
        .max_by_key(|m| (std::cmp::Reverse(m.left), m.copy))
        .map_or(l.right, |m| m.left)
}

/// `y_k` for loop `l`: the vector of the largest loop inside `l` with left
/// end `k`, else the deepest monomial of column `k` in `Y_0`.
fn y_for<F: Field>(
    p: &KostantPicture,
    l: &Loop,
    k: usize,
    ys: &BTreeMap<Loop, TermVector<F>>,
    depth: &Coweight,
) -> TermVector<F> {
    p.encircled_by(l)
        .filter(|m| m.left == k)
        .max_by_key(|m| (m.right, m.copy))
        .map_or_else(|| TermVector::monomial(-depth.at(k), k), |m| ys[m].clone())
}

fn base_depth(p: &KostantPicture, lambda: &Coweight) -> Coweight {
    lambda.minus(&p.side_counts().0)
}

/// The lattice `Y_0 + span{t^m y_L}` with `Y_0 = underline(lambda - l)` and
/// `y_L = t^{-1}(y_l + sum a_k y_k)`.
pub fn construct<F: Field>(
    p: &KostantPicture,
    lambda: &Coweight,
    point: &FlagPoint<F>,
) -> Result<Lattice<F>> {
    if lambda.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: lambda.n(),
        });
    }
    point.validate(p)?;
    let depth = base_depth(p, lambda);
    let mut ys: BTreeMap<Loop, TermVector<F>> = BTreeMap::new();
    for l in p.inner_first() {
        let a = &point.coeffs[&l];
        let mut v = TermVector::zero();
        for (k, ak) in (l.left..=l.right).zip(a) {
            v = v.add(&y_for(p, &l, k, &ys, &depth).scale(ak));
        }
        ys.insert(l, v.shift_degree(-1));
    }
    let n = p.n();
    let hi = (1..=n).map(|k| -depth.at(k)).max().unwrap_or(0);
    let gens: Vec<TermVector<F>> = (1..=n)
        .map(|k| TermVector::monomial(-depth.at(k), k))
        .chain(ys.into_values())
        .collect();
    let y = Lattice::from_generators(n, &gens, Some(hi))?;
    if y.picture_of()? != *p || y.lambda_of()? != *lambda {
        return Err(Error::Inconsistent("constructed lattice has the wrong parameters".into()));
    }
    Ok(y)
}

/// Inverse of [`construct`]: reads the normalized line of every loop off the
/// p-flag.
pub fn point_of<F: Field>(y: &Lattice<F>) -> Result<FlagPoint<F>> {
    let p = y.picture_of()?;
    let flag = weak_flag(y, &p)?;
    let depth = y.delta();
    let model = &flag.model;
    let image = |v: &TermVector<F>| {
        model
            .image(v)
            .ok_or_else(|| Error::Inconsistent(format!("{v} is outside the gap model")))
    };
    let mut ys: BTreeMap<Loop, TermVector<F>> = BTreeMap::new();
    let mut coeffs = BTreeMap::new();
    for l in p.inner_first() {
        let space = &flag.spaces[&l];
        let below = &flag.inner[&l];
        let z = space
            .rows
            .iter()
            .find(|r| !below.contains(r))
            .ok_or(Error::FlagFailure {
                left: l.left,
                right: l.right,
                copy: l.copy,
                dim: 0,
            })?;
        let lifts: Vec<TermVector<F>> = (l.left..=l.right)
            .map(|k| y_for(&p, &l, k, &ys, &depth).shift_degree(-1))
            .collect();
        let images = lifts.iter().map(image).collect::<Result<Vec<_>>>()?;
        let c = express(z, &images, &below.rows)
            .ok_or_else(|| Error::Inconsistent(format!("no line found for {}", l.label())))?;
        if c[0].is_zero() {
            return Err(Error::Inconsistent(format!(
                "line of {} misses its left end",
                l.label()
            )));
        }
        let inv = c[0].inv();
        let a: Vec<F> = c.iter().map(|x| x.mul_ref(&inv)).collect();
        let mut v = TermVector::zero();
        for (lift, ak) in lifts.iter().zip(&a) {
            v = v.add(&lift.scale(ak));
        }
        if !space.contains(&image(&v)?) {
            return Err(Error::Inconsistent(format!("y_L of {} is not in Y_L", l.label())));
        }
        ys.insert(l, v);
        coeffs.insert(l, a);
    }
    let point = FlagPoint { coeffs };
    point.validate(&p)?;
    Ok(point)
}

/// A sampled lattice together with its flag point and the number of draws
/// it took.
#[derive(Clone, Debug)]
pub struct Sample<F: Field = Q> {
    pub lattice: Lattice<F>,
    pub point: FlagPoint<F>,
    pub draws: usize,
}

pub const DEFAULT_MAX_DRAWS: usize = 10;

/// Coefficients from `{-7..7} \ {0}`, with `a_l = 1`.
pub fn random_point<F: Field, R: Rng + ?Sized>(p: &KostantPicture, rng: &mut R) -> FlagPoint<F> {
    let coeffs = p
        .loops()
        .iter()
        .map(|l| {
            let a = std::iter::once(F::one())
                .chain((0..l.length()).map(|_| {
                    let v: i64 = rng.gen_range(1..=7);
                    F::from_i64(if rng.gen_bool(0.5) { v } else { -v })
                }))
                .collect();
            (*l, a)
        })
        .collect();
    FlagPoint { coeffs }
}

/// Draws flag points until the lattice is strongly compatible to `p`.
pub fn sample<F: Field, R: Rng + ?Sized>(
    p: &KostantPicture,
    lambda: &Coweight,
    rng: &mut R,
    max_draws: usize,
) -> Result<Sample<F>> {
    for draws in 1..=max_draws {
        let point = random_point(p, rng);
        let lattice = construct(p, lambda, &point)?;
        if is_strongly_compatible(&lattice, p)? {
            return Ok(Sample {
                lattice,
                point,
                draws,
            });
        }
    }
    Err(Error::RetriesExhausted(max_draws))
}

/// Parses a flag point keyed by loop labels such as `[1,5]#0`.
pub fn flag_point_from_labels<F: Field>(
    p: &KostantPicture,
    coeffs: &HashMap<String, Vec<F>>,
) -> Result<FlagPoint<F>> {
    let mut out = BTreeMap::new();
    for l in p.loops() {
        let a = coeffs
            .get(&l.label())
            .ok_or_else(|| Error::InvalidFlagPoint(format!("missing {}", l.label())))?;
        out.insert(*l, a.clone());
    }
    if coeffs.len() != out.len() {
        return Err(Error::InvalidFlagPoint("unknown loop labels".into()));
    }
    let point = FlagPoint { coeffs: out };
    point.validate(p)?;
    Ok(point)
}
