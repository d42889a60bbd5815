//! Batch checks with machine-readable reports.
//!
//! Every sweep is deterministic in its inputs and seed: random instance `k`
//! draws from its own ChaCha stream, and results are merged in index order.
//! Failures carry a JSON reproduction that the CLI accepts.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::collapse::{sweep_orders, verify_ancestry_claims, verify_commutativity};
use crate::compat::{construct, is_strongly_compatible, random_point, FlagPoint};
use crate::error::Result;
use crate::field::{Field, Q};
use crate::io::{flag_point_value, lattice_value, picture_value};
use crate::kostant::{all_intervals, enumerate_pictures, kostant_count, Coweight, KostantPicture, RootCombination};
use crate::lattice::Lattice;
use crate::par::Exec;
use crate::perm::{all_permutations, Permutation};
use crate::polytope::{enumerate_mv_cycles, is_vertex, lowest_vertex, mask_columns, mv_polytope_with, MvPolytope};

#[derive(Clone, Debug)]
pub struct Report {
    pub name: String,
    pub instances: usize,
    /// Individual assertions evaluated (orders, permutations, ...).
    pub checks: usize,
    /// Instances dropped by the wall-clock budget.
    pub skipped: usize,
    pub failures: Vec<Value>,
    pub wall: Duration,
}

impl Report {
    fn new(name: &str) -> Self {
        Report {
            name: name.to_string(),
            instances: 0,
            checks: 0,
            skipped: 0,
            failures: Vec::new(),
            wall: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// JSON form; the wall time is left out unless asked for, so that equal
    /// inputs give equal bytes.
    pub fn to_value(&self, timings: bool) -> Value {
        let mut v = json!({
            "name": self.name,
            "passed": self.passed(),
            "instances": self.instances,
            "checks": self.checks,
            "skipped": self.skipped,
            "failures": self.failures,
        });
        if timings {
            v["wall_ms"] = json!(self.wall.as_millis() as u64);
        }
        v
    }

    pub fn table_row(&self, timings: bool) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut row = format!(
            "{:<14} {status}  instances={:<7} checks={:<9} failures={}",
            self.name,
            self.instances,
            self.checks,
            self.failures.len()
        );
        if self.skipped > 0 {
            row.push_str(&format!(" skipped={}", self.skipped));
        }
        if timings {
            row.push_str(&format!(" wall={}ms", self.wall.as_millis()));
        }
        row
    }
}

/// Instance caps for the random part of a sweep, and an optional
/// wall-clock cap after which remaining instances are skipped.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub random: usize,
    pub seconds: Option<u64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            random: 1000,
            seconds: None,
        }
    }
}

fn deadline(budget: &Budget) -> Option<Instant> {
    budget.seconds.map(|s| Instant::now() + Duration::from_secs(s))
}

fn expired(d: Option<Instant>) -> bool {
    d.is_some_and(|d| Instant::now() > d)
}

/// Generator for instance `index` of a seeded sweep.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// All root combinations on `n` columns with height at most `max`.
pub fn weights_up_to(n: usize, max: usize) -> Vec<RootCombination> {
    fn rec(k: usize, left: usize, cur: &mut Vec<i64>, out: &mut Vec<RootCombination>) {
        if k == 0 {
            out.push(RootCombination(cur.clone()));
            return;
        }
        for c in 0..=left {
            cur.push(c as i64);
            rec(k - 1, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n.saturating_sub(1), max, &mut Vec::new(), &mut out);
    out
}

/// Every Kostant picture with `2 <= n <= n_max` columns and length at most
/// `len_max`.
pub fn all_pictures(n_max: usize, len_max: usize) -> Vec<KostantPicture> {
    (2..=n_max)
        .flat_map(|n| {
            weights_up_to(n, len_max)
                .into_iter()
                .flat_map(move |w| enumerate_pictures(n, &w))
        })
        .collect()
}

/// A random picture of length at most `len_max`: loops are added while they
/// fit in a length drawn uniformly from `0..=len_max`.
pub fn random_picture<R: Rng + ?Sized>(n: usize, len_max: usize, rng: &mut R) -> KostantPicture {
    let target = rng.gen_range(0..=len_max);
    let intervals = all_intervals(n);
    let mut chosen = Vec::new();
    let mut total = 0;
    loop {
        let fits: Vec<&(usize, usize)> =
            intervals.iter().filter(|(l, r)| total + r - l <= target).collect();
        if fits.is_empty() {
            break;
        }
        let &(l, r) = fits[rng.gen_range(0..fits.len())];
        chosen.push((l, r));
        total += r - l;
    }
    KostantPicture::new(n, chosen).expect("intervals are valid")
}

pub fn random_coweight<R: Rng + ?Sized>(n: usize, range: i64, rng: &mut R) -> Coweight {
    Coweight((0..n).map(|_| rng.gen_range(-range..=range)).collect())
}

/// Greedily deletes loops while the failure persists.
pub fn shrink_picture(p: &KostantPicture, fails: impl Fn(&KostantPicture) -> bool) -> KostantPicture {
    let mut cur = p.clone();
    'outer: loop {
        for l in cur.loops().to_vec() {
            let smaller = cur.without(&l);
            if fails(&smaller) {
                cur = smaller;
                continue 'outer;
            }
        }
        return cur;
    }
}

/// Greedily replaces free flag coefficients by 1 while the failure persists.
pub fn shrink_point(
    p: &KostantPicture,
    lambda: &Coweight,
    point: &FlagPoint,
    fails: impl Fn(&Lattice) -> bool,
) -> FlagPoint {
    let mut cur = point.clone();
    let one = Q::from_i64(1);
    for l in p.loops() {
        for k in 1..cur.coeffs[l].len() {
            if cur.coeffs[l][k] == one {
                continue;
            }
            let mut trial = cur.clone();
            trial.coeffs.get_mut(l).expect("loop")[k] = one.clone();
            if let Ok(y) = construct(p, lambda, &trial) {
                if fails(&y) {
                    cur = trial;
                }
            }
        }
    }
    cur
}

fn error_value(e: &crate::error::Error) -> Value {
    json!(e.to_string())
}

/// Collapse commutativity and the ancestry claims over all small pictures and
/// `budget.random` random ones on `3..=random_n` columns with length at most
/// `random_len`. Returns the two reports.
pub fn sweep_collapse(
    n_max: usize,
    len_max: usize,
    random_n: usize,
    random_len: usize,
    budget: Budget,
    seed: u64,
    exec: Exec,
) -> (Report, Report) {
    let start = Instant::now();
    let end = deadline(&budget);
    let mut pictures = all_pictures(n_max, len_max);
    let exhaustive = pictures.len();
    for k in 0..budget.random {
        let mut rng = instance_rng(seed, k as u64);
        let n = rng.gen_range(3..=random_n.max(3));
        pictures.push(random_picture(n, random_len, &mut rng));
    }
    let results = exec.map(&pictures, |p| {
        if expired(end) {
            return None;
        }
        Some(sweep_orders(p))
    });
    let mut comm = Report::new("commutativity");
    let mut anc = Report::new("ancestry");
    for (k, (p, r)) in pictures.iter().zip(results).enumerate() {
        let Some(r) = r else {
            comm.skipped += 1;
            anc.skipped += 1;
            continue;
        };
        comm.instances += 1;
        anc.instances += 1;
        comm.checks += r.orders;
        anc.checks += r.orders;
        let origin = if k < exhaustive {
            json!("exhaustive")
        } else {
            json!({"seed": seed, "stream": k - exhaustive})
        };
        if let Some(m) = r.mismatches.first() {
            let small = shrink_picture(p, |q| !verify_commutativity(q).is_empty());
            comm.failures.push(json!({
                "picture": picture_value(p),
                "shrunk": picture_value(&small),
                "first": m.first,
                "second": m.second,
                "origin": origin,
            }));
        }
        if let Some(f) = r.ancestry_failures.first() {
            let order = f.order.clone();
            let small = shrink_picture(p, |q| {
                order.iter().all(|&c| c <= q.n())
                    && verify_ancestry_claims(q, &order).is_ok_and(|v| !v.is_empty())
            });
            anc.failures.push(json!({
                "picture": picture_value(p),
                "shrunk": picture_value(&small),
                "order": f.order,
                "loop": f.target.label(),
                "reason": f.reason,
                "origin": origin,
            }));
        }
    }
    comm.wall = start.elapsed();
    anc.wall = start.elapsed();
    (comm, anc)
}

pub fn sweep_commutativity(
    n_max: usize,
    len_max: usize,
    budget: Budget,
    seed: u64,
    exec: Exec,
) -> Report {
    sweep_collapse(n_max, len_max, 6, 12, budget, seed, exec).0
}

pub fn sweep_ancestry(n_max: usize, len_max: usize, budget: Budget, seed: u64, exec: Exec) -> Report {
    sweep_collapse(n_max, len_max, 6, 12, budget, seed, exec).1
}

/// Enumeration against the partition-function recursion, plus weight and
/// distinctness of every enumerated picture.
pub fn sweep_kostant(n_max: usize, height_max: usize, exec: Exec) -> Report {
    let start = Instant::now();
    let cases: Vec<(usize, RootCombination)> = (2..=n_max)
        .flat_map(|n| weights_up_to(n, height_max).into_iter().map(move |w| (n, w)))
        .collect();
    let results = exec.map(&cases, |(n, w)| {
        let pics = enumerate_pictures(*n, w);
        let expected = kostant_count(*n, w);
        let mut bad = pics.iter().any(|p| p.picture_weight() != *w);
        bad |= pics.windows(2).any(|ab| ab[0] == ab[1]);
        (pics.len() as u64, expected, bad)
    });
    let mut r = Report::new("kostant");
    for ((n, w), (got, expected, bad)) in cases.iter().zip(results) {
        r.instances += 1;
        r.checks += got as usize;
        if got != expected || bad {
            r.failures.push(json!({
                "n": n,
                "weight": w.0,
                "enumerated": got,
                "recursion": expected,
                "bad_pictures": bad,
            }));
        }
    }
    r.wall = start.elapsed();
    r
}

/// Lattices drawn for one strong-moment instance.
#[derive(Clone, Debug)]
pub struct Drawn {
    pub strong: Option<Lattice>,
    pub rejected: Vec<Lattice>,
}

/// Forward and backward checks of the polytope criterion for strong
/// compatibility. For each case and sample, flag points are drawn until a
/// strongly compatible lattice appears (at most `max_draws`). Strongly
/// compatible lattices must have the full MV-polytope as orbit polytope;
/// rejected draws and the `witnesses` must have a different one.
pub fn sweep_strong_moment(
    cases: &[(KostantPicture, Coweight)],
    samples: usize,
    seed: u64,
    max_draws: usize,
    witnesses: &[Lattice],
    exec: Exec,
) -> (Report, Vec<Vec<Drawn>>) {
    let start = Instant::now();
    let mut r = Report::new("strong-moment");
    let polys: Vec<Result<MvPolytope>> = cases
        .iter()
        .map(|(p, l)| mv_polytope_with(p, l, exec))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..cases.len())
        .flat_map(|c| (0..samples).map(move |k| (c, k)))
        .collect();
    let results = exec.map(&jobs, |&(c, k)| -> Result<(Drawn, Vec<Value>, usize)> {
        let (p, lambda) = &cases[c];
        let mv = polys[c].as_ref().map_err(Clone::clone)?;
        let stream = (c as u64) << 32 | k as u64;
        let mut rng = instance_rng(seed, stream);
        let mut drawn = Drawn {
            strong: None,
            rejected: Vec::new(),
        };
        let mut failures = Vec::new();
        let mut checks = 0;
        for _ in 0..max_draws {
            let point: FlagPoint = random_point(p, &mut rng);
            let y = construct(p, lambda, &point)?;
            let strong = is_strongly_compatible(&y, p)?;
            let orbit = y.orbit_polytope(Exec::Sequential)?;
            checks += orbit.vertex_by_perm.len();
            let equal = orbit.vertex_by_perm == mv.vertex_by_perm;
            if equal != strong {
                let small = shrink_point(p, lambda, &point, |z| {
                    let s = is_strongly_compatible(z, p).unwrap_or(false);
                    let e = z
                        .orbit_polytope(Exec::Sequential)
                        .is_ok_and(|o| o.vertex_by_perm == mv.vertex_by_perm);
                    s != e
                });
                failures.push(json!({
                    "picture": picture_value(p),
                    "lambda": lambda.0,
                    "seed": seed,
                    "stream": stream,
                    "strongly_compatible": strong,
                    "lattice": lattice_value(&y),
                    "point": flag_point_value(&small),
                }));
            }
            if strong {
                drawn.strong = Some(y);
                break;
            }
            drawn.rejected.push(y);
        }
        if drawn.strong.is_none() {
            failures.push(json!({
                "picture": picture_value(p),
                "lambda": lambda.0,
                "seed": seed,
                "stream": stream,
                "error": format!("no strongly compatible lattice in {max_draws} draws"),
            }));
        }
        Ok((drawn, failures, checks))
    });
    let mut drawn: Vec<Vec<Drawn>> = vec![Vec::new(); cases.len()];
    for ((c, k), res) in jobs.iter().zip(results) {
        r.instances += 1;
        match res {
            Ok((d, f, checks)) => {
                r.checks += checks;
                r.failures.extend(f);
                drawn[*c].push(d);
            }
            Err(e) => r.failures.push(json!({
                "picture": picture_value(&cases[*c].0),
                "lambda": cases[*c].1.0,
                "sample": k,
                "error": error_value(&e),
            })),
        }
    }
    for y in witnesses {
        r.instances += 1;
        let verdict = (|| -> Result<(bool, bool)> {
            let p = y.picture_of()?;
            let lambda = y.lambda_of()?;
            let mv = mv_polytope_with(&p, &lambda, exec)?;
            let orbit = y.orbit_polytope(exec)?;
            Ok((is_strongly_compatible(y, &p)?, orbit.vertex_by_perm == mv.vertex_by_perm))
        })();
        match verdict {
            Ok((strong, equal)) if strong == equal => r.checks += 1,
            Ok((strong, equal)) => r.failures.push(json!({
                "lattice": lattice_value(y),
                "strongly_compatible": strong,
                "same_polytope": equal,
            })),
            Err(e) => r.failures.push(json!({"lattice": lattice_value(y), "error": error_value(&e)})),
        }
    }
    r.wall = start.elapsed();
    (r, drawn)
}

/// Facets well defined, every `nu(w)` an extreme point, the H-representation
/// vertex set equal to the `nu(w)`, and for strongly compatible lattices of
/// the same parameters `c_J = |Y| - sum_{i not in J} delta_i - d_{not J}`
/// and `min_nu sum_{i in J} nu_i = sum_{i in J} delta_i + d_J`.
///
/// For `n <= 5` the H-vertices are enumerated by brute force; beyond that
/// the bound function is checked to be submodular, which makes the
/// H-vertices exactly the greedy points, i.e. the `nu(w)`.
pub fn sweep_hrep(p: &KostantPicture, lambda: &Coweight, lattices: &[Lattice], exec: Exec) -> Report {
    let start = Instant::now();
    let mut r = Report::new("hrep");
    r.instances = 1 + lattices.len();
    let repro = || json!({"picture": picture_value(p), "lambda": lambda.0});
    let poly = match mv_polytope_with(p, lambda, exec) {
        Ok(poly) => poly,
        Err(e) => {
            let mut f = repro();
            f["error"] = error_value(&e);
            r.failures.push(f);
            r.wall = start.elapsed();
            return r;
        }
    };
    let extreme = exec.map(&poly.vertices, |v| is_vertex(v, &poly.vertices));
    r.checks += extreme.len();
    for (v, ok) in poly.vertices.iter().zip(extreme) {
        if !ok {
            let mut f = repro();
            f["not_extreme"] = json!(v.0);
            r.failures.push(f);
        }
    }
    let nu: Vec<Vec<Q>> = poly
        .vertices
        .iter()
        .map(|v| v.0.iter().map(|&a| Q::from_i64(a)).collect())
        .collect();
    if !poly.is_submodular() {
        let mut f = repro();
        f["error"] = json!("facet bounds are not submodular");
        r.failures.push(f);
    }
    if p.n() <= 5 {
        r.checks += 1;
        if poly.hrep_vertices() != nu {
            let mut f = repro();
            f["error"] = json!("H-representation vertices differ from nu(w)");
            r.failures.push(f);
        }
    }
    for y in lattices {
        let total = y.relative_dimension();
        let full = crate::linalg::all_columns(p.n());
        for (cols, &c) in &poly.facets {
            r.checks += 1;
            let rest = cols.iter().fold(full, |m, &i| m & !(1u64 << i));
            let outside: i64 = mask_columns(rest).iter().map(|&i| y.delta().at(i)).sum();
            let expect = total - outside - y.d_mask(rest) as i64;
            // the same data read as a lower bound on the columns themselves
            let mask = cols.iter().fold(0u64, |m, &i| m | 1u64 << i);
            let lower = poly
                .vertices
                .iter()
                .map(|v| cols.iter().map(|&i| v.at(i)).sum::<i64>())
                .min()
                .unwrap_or(0);
            let inside: i64 = cols.iter().map(|&i| y.delta().at(i)).sum();
            let expect_lower = inside + y.d_mask(mask) as i64;
            if c != expect || lower != expect_lower {
                let mut f = repro();
                f["lattice"] = lattice_value(y);
                f["columns"] = json!(cols);
                f["bound"] = json!(c);
                f["from_lattice"] = json!(expect);
                f["lower"] = json!(lower);
                f["lower_from_lattice"] = json!(expect_lower);
                r.failures.push(f);
            }
        }
    }
    r.wall = start.elapsed();
    r
}

/// Random `(alpha, beta)` with `alpha - beta` a nonnegative root combination
/// of height at most `height_max`.
pub fn random_pairs(count: usize, seed: u64, n_max: usize, height_max: usize) -> Vec<(Coweight, Coweight)> {
    (0..count)
        .map(|k| {
            let mut rng = instance_rng(seed, k as u64);
            let n = rng.gen_range(2..=n_max.max(2));
            let beta = random_coweight(n, 2, &mut rng);
            let h = rng.gen_range(0..=height_max);
            let mut w = vec![0i64; n - 1];
            for _ in 0..h {
                w[rng.gen_range(0..n - 1)] += 1;
            }
            let alpha = beta.plus(&RootCombination(w).to_coweight());
            (alpha, beta)
        })
        .collect()
}

/// Every cycle between `alpha` and `beta` has length `height(alpha - beta)`,
/// lowest vertex `beta`, and a flag-point family with that many free
/// coefficients.
pub fn sweep_purity(pairs: &[(Coweight, Coweight)], exec: Exec) -> Report {
    let start = Instant::now();
    let results = exec.map(pairs, |(alpha, beta)| {
        let mut fails = Vec::new();
        let Some(w) = RootCombination::from_coweight_difference(alpha, beta) else {
            fails.push(json!({"alpha": alpha.0, "beta": beta.0, "error": "not comparable"}));
            return (0, fails);
        };
        let height = w.height() as usize;
        let pics = enumerate_mv_cycles(alpha, beta);
        if pics.is_empty() {
            fails.push(json!({"alpha": alpha.0, "beta": beta.0, "error": "no cycles"}));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for p in &pics {
            let dof = random_point::<Q, _>(p, &mut rng).degrees_of_freedom();
            if p.total_length() != height || lowest_vertex(p, alpha) != *beta || dof != height {
                fails.push(json!({
                    "alpha": alpha.0,
                    "beta": beta.0,
                    "picture": picture_value(p),
                    "length": p.total_length(),
                    "degrees_of_freedom": dof,
                    "lowest_vertex": lowest_vertex(p, alpha).0,
                }));
            }
        }
        (pics.len(), fails)
    });
    let mut r = Report::new("purity");
    for (checks, fails) in results {
        r.instances += 1;
        r.checks += checks;
        r.failures.extend(fails);
    }
    r.wall = start.elapsed();
    r
}

/// Torus-orbit limits: for `count` lattices built from random pictures and
/// flag points on `n` columns, `degenerate(Y, w)` is the fixed point of
/// `mu^w(Y)` for every `w`; also `mu^id = lambda(Y)` and `mu^{w0}` is the
/// lowest vertex.
pub fn sweep_degeneration(count: usize, seed: u64, n: usize, len_max: usize, exec: Exec) -> Report {
    let start = Instant::now();
    let perms = all_permutations(n);
    let idx: Vec<usize> = (0..count).collect();
    let results = exec.map(&idx, |&k| {
        let mut rng = instance_rng(seed, k as u64);
        let p = random_picture(n, len_max, &mut rng);
        let lambda = random_coweight(n, 2, &mut rng);
        let point: FlagPoint = random_point(&p, &mut rng);
        let mut fails = Vec::new();
        let y = match construct(&p, &lambda, &point) {
            Ok(y) => y,
            Err(e) => {
                fails.push(json!({"picture": picture_value(&p), "lambda": lambda.0, "error": error_value(&e)}));
                return (0, fails);
            }
        };
        let check = |w: &Permutation| -> Result<bool> {
            let mu = y.mu(w)?;
            Ok(y.degenerate(w)? == Lattice::fixed_point(&mu))
        };
        for w in &perms {
            match check(w) {
                Ok(true) => {}
                Ok(false) => fails.push(json!({"lattice": lattice_value(&y), "w": w.key()})),
                Err(e) => fails.push(json!({
                    "lattice": lattice_value(&y),
                    "w": w.key(),
                    "error": error_value(&e),
                })),
            }
        }
        let ends = (|| -> Result<bool> {
            Ok(y.mu(&Permutation::identity(n))? == lambda
                && y.mu(&Permutation::longest(n))? == lowest_vertex(&p, &lambda))
        })();
        if !matches!(ends, Ok(true)) {
            fails.push(json!({"lattice": lattice_value(&y), "error": "extreme vertices"}));
        }
        (perms.len(), fails)
    });
    let mut r = Report::new("degeneration");
    for (checks, fails) in results {
        r.instances += 1;
        r.checks += checks;
        r.failures.extend(fails);
    }
    r.wall = start.elapsed();
    r
}
