use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mvcycles::collapse::{collapse_sequence, verify_commutativity};
use mvcycles::compat::{construct, is_strongly_compatible, point_of, random_point, FlagPoint};
use mvcycles::io::{
    lattice_from_json, lattice_to_json, picture_from_json, picture_to_json, polytope_from_json,
    polytope_to_json,
};
use mvcycles::kostant::{enumerate_pictures, kostant_count};
use mvcycles::lattice::Lattice;
use mvcycles::perm::all_permutations;
use mvcycles::polytope::{lowest_vertex, mv_polytope};
use mvcycles::{Coweight, KostantPicture, RootCombination};

fn intervals(n: usize, max_loops: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((1..n, 1..n), 0..=max_loops).prop_map(move |v| {
        v.into_iter()
            .map(|(a, b)| {
                let (l, r) = (a.min(b), a.max(b) + 1);
                (l, r.min(n))
            })
            .filter(|(l, r)| l < r)
            .collect()
    })
}

fn picture(max_n: usize, max_loops: usize) -> impl Strategy<Value = KostantPicture> {
    (2..=max_n).prop_flat_map(move |n| {
        intervals(n, max_loops).prop_map(move |iv| KostantPicture::new(n, iv).unwrap())
    })
}

fn picture_and_lambda(max_n: usize, max_loops: usize) -> impl Strategy<Value = (KostantPicture, Coweight)> {
    picture(max_n, max_loops).prop_flat_map(|p| {
        let n = p.n();
        (Just(p), prop::collection::vec(-3i64..=3, n).prop_map(Coweight))
    })
}

fn lattice_case(max_n: usize, max_loops: usize) -> impl Strategy<Value = (KostantPicture, Coweight, u64)> {
    (picture_and_lambda(max_n, max_loops), any::<u64>()).prop_map(|((p, l), s)| (p, l, s))
}

fn build(p: &KostantPicture, lambda: &Coweight, seed: u64) -> (FlagPoint, Lattice) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point: FlagPoint = random_point(p, &mut rng);
    let y = construct(p, lambda, &point).expect("construct");
    (point, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn input_order_does_not_matter(iv in intervals(5, 8), rot in 0usize..8) {
        let mut other = iv.clone();
        if !other.is_empty() {
            let k = rot % other.len();
            other.rotate_left(k);
            other.reverse();
        }
        let a = KostantPicture::new(5, iv).unwrap();
        let b = KostantPicture::new(5, other).unwrap();
        prop_assert_eq!(&a, &b);
        let lambda = Coweight(vec![1, 0, 0, -1, 2]);
        prop_assert_eq!(mv_polytope(&a, &lambda).unwrap(), mv_polytope(&b, &lambda).unwrap());
    }

    #[test]
    fn collapse_orders_commute(p in picture(6, 7)) {
        prop_assert!(verify_commutativity(&p).is_empty());
    }

    #[test]
    fn collapsing_everything_but_two_columns_keeps_a_valid_picture(p in picture(6, 7)) {
        let n = p.n();
        if n > 2 {
            let order: Vec<usize> = (2..n).collect();
            let t = collapse_sequence(&p, &order).unwrap();
            prop_assert_eq!(t.picture().n(), 2);
            prop_assert!(t.picture().total_length() <= p.total_length());
        }
    }

    #[test]
    fn polytope_translates_with_lambda((p, lambda) in picture_and_lambda(5, 6), k in -2i64..=2) {
        let mu = Coweight((0..p.n() as i64).map(|i| k * (i - 1)).collect());
        let a = mv_polytope(&p, &lambda).unwrap().translate(&mu);
        let b = mv_polytope(&p, &lambda.plus(&mu)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn polytope_extremes((p, lambda) in picture_and_lambda(5, 6)) {
        let poly = mv_polytope(&p, &lambda).unwrap();
        let id = mvcycles::Permutation::identity(p.n());
        let w0 = mvcycles::Permutation::longest(p.n());
        prop_assert_eq!(&poly.vertex_by_perm[&id], &lambda);
        prop_assert_eq!(&poly.vertex_by_perm[&w0], &lowest_vertex(&p, &lambda));
        for v in &poly.vertices {
            prop_assert!(poly.contains_coweight(v));
            prop_assert_eq!(v.total(), lambda.total());
        }
    }

    #[test]
    fn picture_json_round_trip(p in picture(6, 8)) {
        let s = picture_to_json(&p);
        let back = picture_from_json(&s).unwrap();
        prop_assert_eq!(picture_to_json(&back), s);
        prop_assert_eq!(back, p);
    }

    #[test]
    fn polytope_json_round_trip((p, lambda) in picture_and_lambda(4, 6)) {
        let poly = mv_polytope(&p, &lambda).unwrap();
        let s = polytope_to_json(&poly);
        let back = polytope_from_json(&s).unwrap();
        prop_assert_eq!(polytope_to_json(&back), s);
        prop_assert_eq!(back, poly);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn construct_point_of_round_trip((p, lambda, seed) in lattice_case(5, 6)) {
        let (point, y) = build(&p, &lambda, seed);
        prop_assert_eq!(y.picture_of().unwrap(), p.clone());
        prop_assert_eq!(y.lambda_of().unwrap(), lambda);
        prop_assert_eq!(point_of(&y).unwrap(), point);
    }

    #[test]
    fn lattice_json_round_trip((p, lambda, seed) in lattice_case(5, 6)) {
        let (_, y) = build(&p, &lambda, seed);
        let s = lattice_to_json(&y);
        let back: Lattice = lattice_from_json(&s).unwrap();
        prop_assert_eq!(lattice_to_json(&back), s);
        prop_assert_eq!(back, y);
    }

    #[test]
    fn shift_is_equivariant((p, lambda, seed) in lattice_case(4, 5), mu in prop::collection::vec(-2i64..=2, 4)) {
        let (_, y) = build(&p, &lambda, seed);
        let mu = Coweight(mu[..p.n()].to_vec());
        let s = y.shift(&mu).unwrap();
        prop_assert_eq!(s.picture_of().unwrap(), p.clone());
        prop_assert_eq!(s.lambda_of().unwrap(), lambda.plus(&mu));
        prop_assert_eq!(s.relative_dimension(), y.relative_dimension() + mu.total());
        for w in all_permutations(p.n()) {
            prop_assert_eq!(s.mu(&w).unwrap(), y.mu(&w).unwrap().plus(&mu));
        }
        prop_assert_eq!(
            is_strongly_compatible(&s, &p).unwrap(),
            is_strongly_compatible(&y, &p).unwrap()
        );
    }

    #[test]
    fn orbit_polytope_sits_inside_the_mv_polytope((p, lambda, seed) in lattice_case(4, 5)) {
        let (_, y) = build(&p, &lambda, seed);
        let mv = mv_polytope(&p, &lambda).unwrap();
        let orbit = y.orbit_polytope(mvcycles::Exec::Sequential).unwrap();
        for v in &orbit.vertices {
            prop_assert!(mv.contains_coweight(v), "{v} outside");
        }
    }
}

#[test]
fn enumeration_matches_recursion_on_a_grid() {
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let w = RootCombination(vec![a, b, c]);
                assert_eq!(enumerate_pictures(4, &w).len() as u64, kostant_count(4, &w));
            }
        }
    }
}
