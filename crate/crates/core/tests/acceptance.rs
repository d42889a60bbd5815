//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//! Seeds and time limits are pinned here.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use mvcycles::collapse::collapse_sequence;
use mvcycles::compat::{
    construct, is_compatible, is_strongly_compatible, is_weakly_compatible, point_of, random_point,
    FlagPoint,
};
use mvcycles::io::{
    lattice_from_json, lattice_to_json, picture_from_json, picture_to_json, polytope_from_json,
    polytope_to_json,
};
use mvcycles::lattice::{Lattice, TermVector};
use mvcycles::polytope::{mv_polytope_with, vertex};
use mvcycles::verify::{self, instance_rng, random_coweight, random_picture, Budget, Report};
use mvcycles::{Coweight, Exec, KostantPicture, Permutation};

const SEED: u64 = 20_240_601;
const GOLDEN_LIMIT: Duration = Duration::from_millis(1);
const COLLAPSE_LIMIT: Duration = Duration::from_secs(60);
const MOMENT_LIMIT: Duration = Duration::from_secs(120);

fn p_star() -> KostantPicture {
    KostantPicture::parse(6, "[1,2],[1,3],[1,4],[1,5],[2,5],[2,6],[3,4]x2,[3,6],[4,6]x2,[5,6]").unwrap()
}

fn p_star_lambda() -> Coweight {
    Coweight(vec![2, 0, 1, 0, -1, -2])
}

fn lattice(gens: &[&str]) -> Lattice {
    let gens: Vec<TermVector> = gens.iter().map(|g| TermVector::parse(g).unwrap()).collect();
    Lattice::from_generators(6, &gens, None).unwrap()
}

fn right_lattice(extra: Option<i64>) -> Lattice {
    let g1 = match extra {
        None => "e2+2e3+3e4+2e5+t^-2e6".to_string(),
        Some(c) => format!("e2+2e3+3e4+2e5+t^-2e6{c:+}te3"),
    };
    lattice(&[
        &g1,
        "t^2e1+t^2e2+te2+2te3+3te4",
        "te5+t^-1e6",
        "e6",
        "t^3e2",
        "t^3e3",
    ])
}

struct Line {
    ok: bool,
    detail: String,
}

fn line(ok: bool, detail: impl Into<String>) -> Line {
    Line {
        ok,
        detail: detail.into(),
    }
}

fn failures(r: &Report) -> String {
    match r.failures.first() {
        None => String::new(),
        Some(f) => format!("; first failure {f}"),
    }
}

fn golden() -> Line {
    let p = p_star();
    let lambda = p_star_lambda();
    let w = Permutation::parse("346512").unwrap();
    let trace = collapse_sequence(&p, w.one_line()).unwrap();
    let n: Vec<usize> = trace.steps.iter().map(|s| s.removed).collect();
    let nu = vertex(&p, &lambda, &w).unwrap();
    let mut times: Vec<Duration> = (0..21)
        .map(|_| {
            let t = Instant::now();
            let v = vertex(&p, &lambda, &w).unwrap();
            let e = t.elapsed();
            assert_eq!(v, nu);
            e
        })
        .collect();
    times.sort();
    let median = times[10];
    let ok = n == [4, 4, 3, 0, 1, 0] && nu == Coweight(vec![-1, -2, 2, 2, -2, 1]) && median < GOLDEN_LIMIT;
    line(ok, format!("N={n:?} nu={nu} median {median:?} (limit {GOLDEN_LIMIT:?})"))
}

fn collapse_sweeps() -> (Line, Line) {
    let t = Instant::now();
    let budget = Budget {
        random: 1000,
        seconds: None,
    };
    let (comm, anc) = verify::sweep_collapse(4, 6, 6, 12, budget, SEED, Exec::Parallel);
    let e = t.elapsed();
    let c = line(
        comm.passed() && comm.skipped == 0 && e < COLLAPSE_LIMIT,
        format!(
            "{} pictures ({} orderings), {} mismatches, {e:.2?} (limit {COLLAPSE_LIMIT:?}){}",
            comm.instances,
            comm.checks,
            comm.failures.len(),
            failures(&comm)
        ),
    );
    let a = line(
        anc.passed() && anc.skipped == 0,
        format!(
            "{} pictures ({} orderings), {} failures{}",
            anc.instances,
            anc.checks,
            anc.failures.len(),
            failures(&anc)
        ),
    );
    (c, a)
}

fn kostant() -> Line {
    let r = verify::sweep_kostant(5, 10, Exec::Parallel);
    line(
        r.passed(),
        format!(
            "{} weights, {} pictures, {} mismatches{}",
            r.instances,
            r.checks,
            r.failures.len(),
            failures(&r)
        ),
    )
}

fn paper_lattices() -> Line {
    let left = lattice(&["t^-2e1", "e2", "t^2e3", "e4", "te5", "t^2e6"]);
    let middle = lattice(&[
        "t^-2e1+3e2+4e3",
        "3te2+4te3",
        "-te3+6te5",
        "t^2e4+2te5-te6",
        "t^2e5",
        "t^2e6",
    ]);
    let right = right_lattice(None);
    let dims = [left.relative_dimension(), middle.relative_dimension(), right.relative_dimension()];
    let pics: Vec<String> = [&left, &middle, &right]
        .iter()
        .map(|y| y.picture_of().unwrap().describe())
        .collect();
    let grades = |y: &Lattice| {
        let p = y.picture_of().unwrap();
        let weak = is_weakly_compatible(y, &p).unwrap();
        let comp = weak && is_compatible(y, &p).unwrap();
        let strong = comp && is_strongly_compatible(y, &p).unwrap();
        (weak, comp, strong)
    };
    let (gm, gr) = (grades(&middle), grades(&right));
    let perturbed: Vec<bool> = [1, -3, 5]
        .iter()
        .map(|&c| {
            let y = right_lattice(Some(c));
            let p = y.picture_of().unwrap();
            p == right.picture_of().unwrap() && is_strongly_compatible(&y, &p).unwrap()
        })
        .collect();
    let ok = dims == [-3, -6, -9]
        && pics == ["{}", "{[1,3],[2,3],[3,5],[4,6]}", "{[1,4],[2,4],[2,5],[2,6],[5,6]}"]
        && gm == (true, false, false)
        && gr == (true, true, false)
        && perturbed.iter().all(|&b| b);
    line(
        ok,
        format!(
            "dims {dims:?}; pictures {pics:?}; middle (weak,compat,strong)={gm:?}; right={gr:?}; perturbed c=1,-3,5 strong={perturbed:?}"
        ),
    )
}

/// p* and five random pictures on at most five columns, with coweights.
fn moment_cases() -> Vec<(KostantPicture, Coweight)> {
    let mut cases = vec![(p_star(), p_star_lambda())];
    let mut k = 0;
    while cases.len() < 6 {
        let mut rng = instance_rng(SEED ^ 0x6d6f6d, k);
        k += 1;
        let n = rng.gen_range(3..=5);
        let p = random_picture(n, 8, &mut rng);
        if p.num_loops() < 2 {
            continue;
        }
        cases.push((p, random_coweight(n, 2, &mut rng)));
    }
    cases
}

fn moment_and_geometry() -> (Line, Line) {
    let cases = moment_cases();
    let t = Instant::now();
    let right = right_lattice(None);
    let (r, drawn) = verify::sweep_strong_moment(&cases, 20, SEED, 10, std::slice::from_ref(&right), Exec::Parallel);
    let e = t.elapsed();

    let p = right.picture_of().unwrap();
    let mv = mv_polytope_with(&p, &right.lambda_of().unwrap(), Exec::Parallel).unwrap();
    let orbit = right.orbit_polytope(Exec::Parallel).unwrap();
    let differing = mv
        .vertex_by_perm
        .iter()
        .filter(|(w, v)| orbit.vertex_by_perm[*w] != **v)
        .count();
    let samples: usize = drawn.iter().map(|d| d.iter().filter(|s| s.strong.is_some()).count()).sum();
    let draws: usize = drawn.iter().flatten().map(|d| d.rejected.len() + usize::from(d.strong.is_some())).sum();
    let pictures: Vec<String> = cases.iter().map(|(p, _)| format!("n={} {}", p.n(), p.describe())).collect();
    let forward = line(
        r.passed() && samples == 120 && differing > 0 && e < MOMENT_LIMIT,
        format!(
            "{samples} strongly compatible samples from {draws} draws over {pictures:?}; {} vertex checks, {} failures; \
             witness differs at {differing}/720 permutations; {e:.2?} (limit {MOMENT_LIMIT:?}){}",
            r.checks,
            r.failures.len(),
            failures(&r)
        ),
    );

    let mut geometry_ok = true;
    let mut checks = 0;
    let mut first = String::new();
    for ((p, lambda), d) in cases.iter().zip(&drawn) {
        let lattices: Vec<Lattice> = d.iter().filter_map(|s| s.strong.clone()).collect();
        let h = verify::sweep_hrep(p, lambda, &lattices, Exec::Parallel);
        checks += h.checks;
        if !h.passed() && geometry_ok {
            first = failures(&h);
        }
        geometry_ok &= h.passed();
    }
    let geometry = line(
        geometry_ok,
        format!("6 polytopes, {checks} checks (facets, is_vertex, H-vertices, lattice bounds){first}"),
    );
    (forward, geometry)
}

fn degeneration() -> Line {
    let a = verify::sweep_degeneration(50, SEED, 4, 6, Exec::Parallel);
    let b = verify::sweep_degeneration(10, SEED, 5, 6, Exec::Parallel);
    line(
        a.passed() && b.passed(),
        format!(
            "S4: {} lattices x 24, {} failures; S5: {} lattices x 120, {} failures{}{}",
            a.instances,
            a.failures.len(),
            b.instances,
            b.failures.len(),
            failures(&a),
            failures(&b)
        ),
    )
}

fn purity() -> Line {
    let pairs = verify::random_pairs(20, SEED, 5, 8);
    let r = verify::sweep_purity(&pairs, Exec::Parallel);
    line(
        r.passed() && r.instances == 20,
        format!(
            "{} pairs, {} cycles, {} failures{}",
            r.instances,
            r.checks,
            r.failures.len(),
            failures(&r)
        ),
    )
}

fn round_trips() -> Line {
    let mut bad = Vec::new();
    let mut json_checks = 0;
    for k in 0..500u64 {
        let mut rng = instance_rng(SEED ^ 0x7274, k);
        let n = rng.gen_range(2..=5);
        let p = random_picture(n, 8, &mut rng);
        let lambda = random_coweight(n, 2, &mut rng);
        let point: FlagPoint = random_point(&p, &mut rng);
        let y = construct(&p, &lambda, &point).unwrap();
        if point_of(&y).unwrap() != point {
            bad.push(format!("point_of on stream {k}"));
        }
        if k % 10 == 0 {
            json_checks += 3;
            let s = picture_to_json(&p);
            if picture_to_json(&picture_from_json(&s).unwrap()) != s {
                bad.push(format!("picture json on stream {k}"));
            }
            let s = lattice_to_json(&y);
            let back: Lattice = lattice_from_json(&s).unwrap();
            if lattice_to_json(&back) != s || back != y {
                bad.push(format!("lattice json on stream {k}"));
            }
            let poly = mv_polytope_with(&p, &lambda, Exec::Parallel).unwrap();
            let s = polytope_to_json(&poly);
            if polytope_to_json(&polytope_from_json(&s).unwrap()) != s {
                bad.push(format!("polytope json on stream {k}"));
            }
        }
    }
    line(
        bad.is_empty(),
        format!("500 flag points, {json_checks} JSON round trips, failures {bad:?}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let (c2, c3) = collapse_sweeps();
    let (c6, c7) = moment_and_geometry();
    let lines = [
        ("1 golden vertex", golden()),
        ("2 collapse commutativity", c2),
        ("3 ancestry claims", c3),
        ("4 kostant counts", kostant()),
        ("5 worked lattices", paper_lattices()),
        ("6 polytope criterion", c6),
        ("7 geometry consistency", c7),
        ("8 degeneration", degeneration()),
        ("9 purity", purity()),
        ("10 round trips", round_trips()),
    ];
    println!();
    for (name, l) in &lines {
        println!("{} {name}: {}", if l.ok { "PASS" } else { "FAIL" }, l.detail);
    }
    let passed = lines.iter().filter(|(_, l)| l.ok).count();
    println!("acceptance: {passed}/{} passed in {:.2?}", lines.len(), start.elapsed());
    if passed == lines.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
