//! MV-polytopes: the vertex map `w -> nu(w)`, facet bounds and exact
//! convexity checks.

use std::collections::BTreeMap;

use num::{BigInt, Zero};

use crate::collapse::collapse_sequence;
use crate::error::{Error, Result};
use crate::field::Q;
use crate::kostant::{enumerate_pictures, Coweight, KostantPicture, RootCombination};
use crate::lp;
use crate::par::Exec;
use crate::perm::{all_permutations, Permutation};

/// Columns of a subset given as a bitmask (bit `i` for column `i`).
pub fn mask_columns(mask: u64) -> Vec<usize> {
    (1..64).filter(|&i| mask & (1 << i) != 0).collect()
}

pub fn columns_mask(columns: &[usize]) -> u64 {
    columns.iter().fold(0, |m, &c| m | (1 << c))
}

/// Proper nonempty subsets of `{1..n}` as bitmasks, in increasing order.
pub fn proper_subsets(n: usize) -> impl Iterator<Item = u64> {
    let full = ((1u64 << n) - 1) << 1;
    (1u64..(1 << n) - 1).map(move |k| (k << 1) & full)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MvPolytope {
    pub n: usize,
    pub lambda: Coweight,
    pub vertex_by_perm: BTreeMap<Permutation, Coweight>,
    /// Distinct vertices, sorted.
    pub vertices: Vec<Coweight>,
    /// Upper bounds `c_I` on `sum_{i in I} x_i`, keyed by sorted column list.
    pub facets: BTreeMap<Vec<usize>, i64>,
}

impl MvPolytope {
    /// Assembles a polytope from a complete vertex map; the facet bounds must
    /// be well defined.
    pub fn from_vertex_map(
        n: usize,
        lambda: Coweight,
        vertex_by_perm: BTreeMap<Permutation, Coweight>,
    ) -> Result<Self> {
        if vertex_by_perm.len() != (1..=n).product::<usize>() {
            return Err(Error::Inconsistent(format!(
                "vertex map has {} entries for n = {n}",
                vertex_by_perm.len()
            )));
        }
        let facets = facet_bounds(n, &vertex_by_perm)?;
        let mut vertices: Vec<Coweight> = vertex_by_perm.values().cloned().collect();
        vertices.sort();
        vertices.dedup();
        Ok(MvPolytope {
            n,
            lambda,
            vertex_by_perm,
            vertices,
            facets,
        })
    }

    pub fn total(&self) -> i64 {
        self.lambda.total()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        if x.len() != self.n {
            return false;
        }
        let sum: Q = x.iter().cloned().sum();
        if sum != Q::from_integer(BigInt::from(self.total())) {
            return false;
        }
        self.facets.iter().all(|(cols, &c)| {
            let s: Q = cols.iter().map(|&i| x[i - 1].clone()).sum();
            s <= Q::from_integer(BigInt::from(c))
        })
    }

    pub fn contains_coweight(&self, x: &Coweight) -> bool {
        let v: Vec<Q> = x.0.iter().map(|&a| Q::from_integer(a.into())).collect();
        self.contains(&v)
    }

    /// The polytope moved by `mu`.
    pub fn translate(&self, mu: &Coweight) -> MvPolytope {
        let vertex_by_perm = self
            .vertex_by_perm
            .iter()
            .map(|(w, v)| (w.clone(), v.plus(mu)))
            .collect();
        let mut vertices: Vec<Coweight> = self.vertices.iter().map(|v| v.plus(mu)).collect();
        vertices.sort();
        let facets = self
            .facets
            .iter()
            .map(|(cols, c)| (cols.clone(), c + cols.iter().map(|&i| mu.at(i)).sum::<i64>()))
            .collect();
        MvPolytope {
            n: self.n,
            lambda: self.lambda.plus(mu),
            vertex_by_perm,
            vertices,
            facets,
        }
    }

    /// Rational barycenter of the distinct vertices.
    pub fn barycenter(&self) -> Vec<Q> {
        let k = Q::from_integer(BigInt::from(self.vertices.len()));
        (0..self.n)
            .map(|i| {
                let s: Q = self
                    .vertices
                    .iter()
                    .map(|v| Q::from_integer(v.0[i].into()))
                    .sum();
                s / &k
            })
            .collect()
    }

    /// Whether `c_I` is submodular; with well-defined bounds this makes the
    /// vertices of the H-representation exactly the greedy points `nu(w)`.
    pub fn is_submodular(&self) -> bool {
        let n = self.n;
        let full = ((1u64 << n) - 1) << 1;
        let c = |m: u64| -> i64 {
            if m == 0 {
                0
            } else if m == full {
                self.total()
            } else {
                self.facets[&mask_columns(m)]
            }
        };
        (0..1u64 << n).all(|a| {
            let a = a << 1;
            (1..=n).all(|i| {
                (i + 1..=n).all(|j| {
                    let (bi, bj) = (1u64 << i, 1u64 << j);
                    if a & (bi | bj) != 0 {
                        return true;
                    }
                    c(a | bi) + c(a | bj) >= c(a | bi | bj) + c(a)
                })
            })
        })
    }

    /// Vertices of the H-representation, by brute force over `n - 1` tight
    /// facets at a time. Exponential; meant for `n <= 5`.
    pub fn hrep_vertices(&self) -> Vec<Vec<Q>> {
        let n = self.n;
        let rows: Vec<(Vec<Q>, Q)> = self
            .facets
            .iter()
            .map(|(cols, &c)| {
                let mut r = vec![Q::zero(); n];
                for &i in cols {
                    r[i - 1] = Q::from_integer(1.into());
                }
                (r, Q::from_integer(c.into()))
            })
            .collect();
        let sum_row = (vec![Q::from_integer(1.into()); n], Q::from_integer(self.total().into()));
        let mut found: Vec<Vec<Q>> = Vec::new();
        let mut pick = Vec::with_capacity(n - 1);
        choose(rows.len(), n - 1, 0, &mut pick, &mut |idx| {
            let mut m: Vec<Vec<Q>> = idx.iter().map(|&k| rows[k].0.clone()).collect();
            let mut rhs: Vec<Q> = idx.iter().map(|&k| rows[k].1.clone()).collect();
            m.push(sum_row.0.clone());
            rhs.push(sum_row.1.clone());
            if let Some(x) = lp::solve(&m, &rhs) {
                if self.contains(&x) && !found.contains(&x) {
                    found.push(x);
                }
            }
        });
        found.sort();
        found
    }
}

fn choose(total: usize, k: usize, start: usize, pick: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in start..total {
        if total - i < k - pick.len() {
            break;
        }
        pick.push(i);
        choose(total, k, i + 1, pick, f);
        pick.pop();
    }
}

fn check_lambda(p: &KostantPicture, lambda: &Coweight) -> Result<()> {
    if lambda.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: lambda.n(),
        });
    }
    Ok(())
}

/// `nu(w)`: collapse along `w(1), ..., w(n)` and set
/// `nu_i = lambda_i - l_i + N_i` where `N_{w(k)}` is the k-th removed count.
pub fn vertex(p: &KostantPicture, lambda: &Coweight, w: &Permutation) -> Result<Coweight> {
    check_lambda(p, lambda)?;
    if w.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: w.n(),
        });
    }
    let trace = collapse_sequence(p, w.one_line())?;
    let (l, _) = p.side_counts();
    let mut nu = lambda.minus(&l);
    for (k, s) in trace.steps.iter().enumerate() {
        nu.0[w.apply(k + 1) - 1] += s.removed as i64;
    }
    Ok(nu)
}

/// `lambda - l + r`.
pub fn lowest_vertex(p: &KostantPicture, lambda: &Coweight) -> Coweight {
    let (l, r) = p.side_counts();
    lambda.minus(&l).plus(&r)
}

/// `nu(w)` for every permutation, sharing collapse prefixes.
pub fn vertex_map(
    p: &KostantPicture,
    lambda: &Coweight,
    exec: Exec,
) -> Result<BTreeMap<Permutation, Coweight>> {
    check_lambda(p, lambda)?;
    let n = p.n();
    let (l, _) = p.side_counts();
    let base = lambda.minus(&l);
    // fan out over ordered column pairs, then walk the trie below each
    let depth = n.min(2);
    let roots: Vec<Vec<usize>> = all_permutations(n)
        .into_iter()
        .map(|w| w.one_line()[..depth].to_vec())
        .fold(Vec::new(), |mut acc, pre| {
            if acc.last() != Some(&pre) {
                acc.push(pre);
            }
            acc
        });
    let chunks = exec.map(&roots, |prefix| -> Result<Vec<(Permutation, Coweight)>> {
        let trace = collapse_sequence(p, prefix)?;
        let mut nu = base.clone();
        for (k, s) in trace.steps.iter().enumerate() {
            nu.0[prefix[k] - 1] += s.removed as i64;
        }
        let columns: Vec<usize> = (1..=n).filter(|c| !prefix.contains(c)).collect();
        let mut out = Vec::new();
        let mut order = prefix.clone();
        walk_vertices(trace.picture(), &columns, &mut order, &mut nu, &mut out);
        Ok(out)
    });
    let mut map = BTreeMap::new();
    for chunk in chunks {
        map.extend(chunk?);
    }
    Ok(map)
}

fn walk_vertices(
    pic: &KostantPicture,
    columns: &[usize],
    order: &mut Vec<usize>,
    nu: &mut Coweight,
    out: &mut Vec<(Permutation, Coweight)>,
) {
    if columns.is_empty() {
        out.push((
            Permutation::new(order.clone()).expect("complete order"),
            nu.clone(),
        ));
        return;
    }
    for (pos, &c) in columns.iter().enumerate() {
        let (next, removed) = if pic.n() >= 2 {
            let r = crate::collapse::collapse_column(pic, pos + 1).expect("column in range");
            (r.picture, r.removed)
        } else {
            (KostantPicture::empty(0), 0)
        };
        let rest: Vec<usize> = columns.iter().copied().filter(|&d| d != c).collect();
        order.push(c);
        nu.0[c - 1] += removed as i64;
        walk_vertices(&next, &rest, order, nu, out);
        nu.0[c - 1] -= removed as i64;
        order.pop();
    }
}

pub fn mv_polytope(p: &KostantPicture, lambda: &Coweight) -> Result<MvPolytope> {
    mv_polytope_with(p, lambda, Exec::default())
}

pub fn mv_polytope_with(p: &KostantPicture, lambda: &Coweight, exec: Exec) -> Result<MvPolytope> {
    let map = vertex_map(p, lambda, exec)?;
    let poly = MvPolytope::from_vertex_map(p.n(), lambda.clone(), map)?;
    let id = Permutation::identity(p.n());
    if poly.vertex_by_perm[&id] != *lambda {
        return Err(Error::Inconsistent("nu(identity) differs from lambda".into()));
    }
    if let Some(v) = poly.vertices.iter().find(|v| v.total() != lambda.total()) {
        return Err(Error::Inconsistent(format!("vertex {v} is off the hyperplane")));
    }
    Ok(poly)
}

/// `c_I = sum_{i in I} nu(w)_i` for any `w` with `w({1..|I|}) = I`; errors
/// if two representatives disagree.
pub fn facet_bounds(
    n: usize,
    vertex_by_perm: &BTreeMap<Permutation, Coweight>,
) -> Result<BTreeMap<Vec<usize>, i64>> {
    let mut by_mask: BTreeMap<u64, i64> = BTreeMap::new();
    for (w, nu) in vertex_by_perm {
        let mut mask = 0u64;
        let mut sum = 0i64;
        for k in 1..n {
            let c = w.apply(k);
            mask |= 1 << c;
            sum += nu.at(c);
            match by_mask.get(&mask) {
                Some(&prev) if prev != sum => {
                    return Err(Error::FacetMismatch {
                        subset: mask_columns(mask),
                        first: prev,
                        second: sum,
                    })
                }
                Some(_) => {}
                None => {
                    by_mask.insert(mask, sum);
                }
            }
        }
    }
    Ok(by_mask
        .into_iter()
        .map(|(m, c)| (mask_columns(m), c))
        .collect())
}

/// Whether `point` is not in the convex hull of the other points of
/// `vertices`. Exact.
pub fn is_vertex(point: &Coweight, vertices: &[Coweight]) -> bool {
    let others: Vec<Vec<Q>> = vertices
        .iter()
        .filter(|v| *v != point)
        .map(|v| v.0.iter().map(|&a| Q::from_integer(a.into())).collect())
        .collect();
    let x: Vec<Q> = point.0.iter().map(|&a| Q::from_integer(a.into())).collect();
    !lp::in_convex_hull(&x, &others)
}

/// Pictures of the MV-cycles with highest coweight `alpha` and lowest
/// coweight `beta`.
pub fn enumerate_mv_cycles(alpha: &Coweight, beta: &Coweight) -> Vec<KostantPicture> {
    match RootCombination::from_coweight_difference(alpha, beta) {
        Some(w) if w.is_nonnegative() => enumerate_pictures(alpha.n(), &w),
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;
    use crate::kostant::p_star;

    fn cw(v: &[i64]) -> Coweight {
        Coweight(v.to_vec())
    }

    fn lambda_star() -> Coweight {
        cw(&[2, 0, 1, 0, -1, -2])
    }

    fn triangle() -> MvPolytope {
        let p = KostantPicture::new(3, [(1, 3)]).unwrap();
        mv_polytope(&p, &cw(&[1, 0, -1])).unwrap()
    }

    #[test]
    fn golden_vertex() {
        let w = Permutation::parse("346512").unwrap();
        assert_eq!(vertex(&p_star(), &lambda_star(), &w).unwrap(), cw(&[-1, -2, 2, 2, -2, 1]));
        let id = Permutation::identity(6);
        assert_eq!(vertex(&p_star(), &lambda_star(), &id).unwrap(), lambda_star());
    }

    #[test]
    fn single_long_loop() {
        let n = 4;
        let p = KostantPicture::new(n, [(1, n)]).unwrap();
        let lambda = cw(&[3, 1, 0, -2]);
        for w in all_permutations(n) {
            let expect = lambda.minus(&Coweight::unit(n, 1)).plus(&Coweight::unit(n, w.apply(1)));
            assert_eq!(vertex(&p, &lambda, &w).unwrap(), expect);
        }
    }

    #[test]
    fn lowest_vertex_matches_w0() {
        let lv = lowest_vertex(&p_star(), &lambda_star());
        assert_eq!(lv, cw(&[-2, -1, -1, 1, 0, 3]));
        assert_eq!(vertex(&p_star(), &lambda_star(), &Permutation::longest(6)).unwrap(), lv);
        let p = KostantPicture::new(3, [(1, 3)]).unwrap();
        assert_eq!(lowest_vertex(&p, &cw(&[1, 0, -1])), cw(&[0, 0, 0]));
        assert_eq!(lowest_vertex(&KostantPicture::empty(3), &cw(&[1, 0, -1])), cw(&[1, 0, -1]));
    }

    #[test]
    fn triangle_polytope() {
        let t = triangle();
        assert_eq!(t.vertices, vec![cw(&[0, 0, 0]), cw(&[0, 1, -1]), cw(&[1, 0, -1])]);
        assert_eq!(t.facets[&vec![1]], 1);
        assert_eq!(t.facets[&vec![3]], 0);
        assert_eq!(t.facets[&vec![1, 3]], 0);
        assert!(is_vertex(&cw(&[0, 1, -1]), &t.vertices));
        assert!(t.contains(&t.barycenter()));
        assert!(!t.contains_coweight(&cw(&[2, 0, -1])));
        for v in t.vertex_by_perm.values() {
            assert!(t.contains_coweight(v));
        }
    }

    #[test]
    fn empty_picture_is_a_point() {
        let lambda = cw(&[1, 0, -1]);
        let poly = mv_polytope(&KostantPicture::empty(3), &lambda).unwrap();
        assert_eq!(poly.vertices, vec![lambda.clone()]);
        assert_eq!(poly.facets[&vec![2, 3]], -1);
        assert!(is_vertex(&lambda, &poly.vertices));
    }

    #[test]
    fn midpoint_is_not_a_vertex() {
        let pts = vec![cw(&[2, 0, -2]), cw(&[0, 0, 0]), cw(&[1, 0, -1])];
        assert!(!is_vertex(&cw(&[1, 0, -1]), &pts));
        assert!(is_vertex(&cw(&[2, 0, -2]), &pts));
    }

    #[test]
    fn p_star_polytope() {
        let poly = mv_polytope(&p_star(), &lambda_star()).unwrap();
        assert!(poly.vertices.contains(&cw(&[-1, -2, 2, 2, -2, 1])));
        assert_eq!(poly.facets.len(), 62);
        assert!(poly.is_submodular());
        assert_eq!(
            poly,
            mv_polytope_with(&p_star(), &lambda_star(), Exec::Sequential).unwrap()
        );
    }

    #[test]
    fn hexagon_hrep_duality() {
        let p = KostantPicture::new(3, [(1, 2), (1, 2), (1, 2), (2, 3), (2, 3), (1, 3)]).unwrap();
        let poly = mv_polytope(&p, &cw(&[2, 0, -2])).unwrap();
        assert_eq!(poly.vertices.len(), 6);
        let h: Vec<Vec<Q>> = poly.hrep_vertices();
        let v: Vec<Vec<Q>> = poly
            .vertices
            .iter()
            .map(|c| c.0.iter().map(|&a| q(a, 1)).collect())
            .collect();
        assert_eq!(h, {
            let mut v = v;
            v.sort();
            v
        });
    }

    #[test]
    fn shift_equivariance() {
        let mu = cw(&[1, -3, 0, 2, 5, -1]);
        let a = mv_polytope(&p_star(), &lambda_star()).unwrap().translate(&mu);
        let b = mv_polytope(&p_star(), &lambda_star().plus(&mu)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mv_cycles() {
        let a = cw(&[1, 0, -1]);
        assert_eq!(enumerate_mv_cycles(&a, &a), vec![KostantPicture::empty(3)]);
        let cycles = enumerate_mv_cycles(&a, &cw(&[-1, 0, 1]));
        assert_eq!(cycles.len(), 3);
        for p in &cycles {
            assert_eq!(p.total_length(), 4);
            assert_eq!(lowest_vertex(p, &a), cw(&[-1, 0, 1]));
        }
        assert!(enumerate_mv_cycles(&cw(&[-1, 0, 1]), &a).is_empty());
    }

    #[test]
    fn subset_helpers() {
        assert_eq!(proper_subsets(3).count(), 6);
        assert_eq!(mask_columns(columns_mask(&[1, 3])), vec![1, 3]);
    }
}
