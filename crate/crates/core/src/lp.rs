//! Exact linear algebra and feasibility over the rationals.

use num::{One, Signed, Zero};

use crate::field::Q;

/// Decides whether `A x = b, x >= 0` has a solution, by phase one of the
/// simplex method with Bland's rule. All arithmetic is exact.
///
/// `a` is given row-major with `a.len() == b.len()`.
pub fn feasible(a: &[Vec<Q>], b: &[Q]) -> bool {
    let m = a.len();
    if m == 0 {
        return true;
    }
    let k = a[0].len();
    // tableau columns: k originals, m artificials, rhs
    let width = k + m + 1;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    for (row, rhs) in a.iter().zip(b) {
        let flip = rhs.is_negative();
        let mut r = Vec::with_capacity(width);
        for v in row {
            r.push(if flip { -v.clone() } else { v.clone() });
        }
        r.extend(std::iter::repeat_n(Q::zero(), m));
        r.push(if flip { -rhs.clone() } else { rhs.clone() });
        t.push(r);
    }
    for (i, r) in t.iter_mut().enumerate() {
        r[k + i] = Q::one();
    }
    let mut basis: Vec<usize> = (k..k + m).collect();

    // objective row: minimize the sum of artificials, in reduced form
    let mut obj = vec![Q::zero(); width];
    for r in &t {
        for (o, v) in obj.iter_mut().zip(r) {
            *o -= v;
        }
    }
    for o in obj.iter_mut().skip(k).take(m) {
        *o = Q::zero();
    }

    while let Some(enter) = (0..k + m).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, Q)> = None;
        for (i, r) in t.iter().enumerate() {
            if r[enter].is_positive() {
                let ratio = &r[width - 1] / &r[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            // unbounded cannot happen for a sum of nonnegative artificials
            break;
        };
        pivot(&mut t, &mut obj, pr, enter);
        basis[pr] = enter;
    }
    obj[width - 1].is_zero()
}

fn pivot(t: &mut [Vec<Q>], obj: &mut [Q], pr: usize, pc: usize) {
    let inv = t[pr][pc].recip();
    for v in t[pr].iter_mut() {
        *v *= &inv;
    }
    let prow = t[pr].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i != pr && !r[pc].is_zero() {
            let f = r[pc].clone();
            for (v, p) in r.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
    }
    if !obj[pc].is_zero() {
        let f = obj[pc].clone();
        for (v, p) in obj.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
    }
}

/// Whether `point` lies in the convex hull of `points`.
pub fn in_convex_hull(point: &[Q], points: &[Vec<Q>]) -> bool {
    if points.is_empty() {
        return false;
    }
    let d = point.len();
    let mut a: Vec<Vec<Q>> = (0..d)
        .map(|i| points.iter().map(|p| p[i].clone()).collect())
        .collect();
    a.push(vec![Q::one(); points.len()]);
    let mut b: Vec<Q> = point.to_vec();
    b.push(Q::one());
    feasible(&a, &b)
}

/// Solves the square system `m x = rhs`; `None` if singular.
pub fn solve(m: &[Vec<Q>], rhs: &[Q]) -> Option<Vec<Q>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .zip(rhs)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(v.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        let prow = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &f * pv;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().expect("augmented column")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;

    fn v(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| q(x, 1)).collect()
    }

    #[test]
    fn hull_membership() {
        let tri = vec![v(&[1, 0, -1]), v(&[0, 1, -1]), v(&[0, 0, 0])];
        assert!(in_convex_hull(&[q(1, 3), q(1, 3), q(-2, 3)], &tri));
        assert!(in_convex_hull(&v(&[0, 0, 0]), &tri));
        assert!(!in_convex_hull(&v(&[1, 1, -2]), &tri));
        assert!(!in_convex_hull(&v(&[0, 1, -1]), &[v(&[1, 0, -1]), v(&[0, 0, 0])]));
        assert!(in_convex_hull(&[q(1, 2), q(0, 1), q(-1, 2)], &[v(&[1, 0, -1]), v(&[0, 0, 0])]));
    }

    #[test]
    fn feasibility_with_negative_rhs() {
        // x1 - x2 = -3, x >= 0
        assert!(feasible(&[v(&[1, -1])], &v(&[-3])));
        // x1 + x2 = -1 has no nonnegative solution
        assert!(!feasible(&[v(&[1, 1])], &v(&[-1])));
    }

    #[test]
    fn linear_solve() {
        let m = vec![v(&[2, 1]), v(&[1, 3])];
        assert_eq!(solve(&m, &v(&[3, 5])).unwrap(), vec![q(4, 5), q(7, 5)]);
        assert!(solve(&[v(&[1, 2]), v(&[2, 4])], &v(&[1, 1])).is_none());
    }
}
