mod common;

use peacekit::dsatur::dsatur;
use peacekit::graph::{format_graph, parse_graph, random_regular};
use peacekit::oneshot::oneshot_colour;
use peacekit::oracle::{certify_no_peaceful, min_peacefulness_exact, min_peacefulness_with, OracleOptions};
use peacekit::peace::disturbed_by_definition;
use peacekit::rng::rng_from_seed;
use peacekit::{
    greedy_complete, greedy_extend, is_p_peaceful, peace_report, OneShotParamsExact, OneShotParamsF64, PartialColouring, Rational,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn neighbourhood_identity(seed in any::<u64>(), n in 1usize..50, max_deg in 0usize..10, skip in 0.0f64..0.9) {
        let mut rng = rng_from_seed(seed);
        let g = common::random_bounded_graph(&mut rng, n, max_deg);
        let f = common::random_proper_colouring(&mut rng, &g, g.max_degree() + 3, skip);
        let r = peace_report(&g, &f).unwrap();
        for v in 0..n {
            prop_assert_eq!(r.undisturbed[v] + r.disturbed[v] + r.uncoloured_neighbours[v], g.degree(v));
        }
        prop_assert_eq!(&disturbed_by_definition(&g, &f), &r.disturbed);
        prop_assert_eq!(r.peacefulness, r.disturbed.iter().copied().max().unwrap_or(0));
    }

    #[test]
    fn greedy_completion_keeps_its_promise(seed in any::<u64>(), n in 1usize..40, max_deg in 1usize..8, skip in 0.0f64..1.0, p in 0i64..8) {
        let mut rng = rng_from_seed(seed);
        let g = common::random_bounded_graph(&mut rng, n, max_deg);
        let f = common::random_proper_colouring(&mut rng, &g, g.max_degree() + 1, skip);
        let p = Rational::from_integer(p);
        if let Ok(full) = greedy_complete(&g, &f, p, &[]) {
            prop_assert!(full.validate_total(&g).is_ok());
            prop_assert!(is_p_peaceful(&g, &full, p).unwrap());
            for v in 0..n {
                if let Some(c) = f.get(v) {
                    prop_assert_eq!(full.get(v), Some(c));
                }
            }
        }
    }

    #[test]
    fn oracle_matches_brute_force(seed in any::<u64>(), n in 1usize..7, max_deg in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let g = common::random_bounded_graph(&mut rng, n, max_deg);
        let c = g.max_degree() + 1;
        let exact = min_peacefulness_exact(&g, c).unwrap();
        let plain = min_peacefulness_with(&g, c, OracleOptions { symmetry_breaking: false, ..Default::default() }).unwrap();
        prop_assert_eq!(exact.p_star, common::brute_force_p_star(&g, c));
        prop_assert_eq!(exact.p_star, plain.p_star);
        let p = exact.p_star as i64;
        prop_assert!(certify_no_peaceful(&g, c, Rational::from_integer(p - 1)).unwrap());
        prop_assert!(!certify_no_peaceful(&g, c, Rational::from_integer(p)).unwrap());
        prop_assert!(!certify_no_peaceful(&g, c, p as f64 + 0.5).unwrap());
    }

    #[test]
    fn oneshot_is_total_and_proper(seed in 0u64..1000, half_n in 10usize..40, delta in 3usize..9) {
        let g = random_regular(2 * half_n, delta, seed).unwrap();
        let (f, stats) = oneshot_colour(&g, &OneShotParamsF64::new(0.5, seed)).unwrap();
        prop_assert!(f.validate_total(&g).is_ok());
        prop_assert_eq!(stats.peacefulness, peace_report(&g, &f).unwrap().peacefulness);
        let (h, _) = oneshot_colour(&g, &OneShotParamsExact::new(Rational::new(1, 2), seed)).unwrap();
        prop_assert_eq!(f.palette, h.palette);
    }

    #[test]
    fn exact_and_float_thresholds_agree(seed in any::<u64>(), n in 1usize..40, p in 0i64..6) {
        let mut rng = rng_from_seed(seed);
        let g = common::random_bounded_graph(&mut rng, n, 6);
        let partial = common::random_proper_colouring(&mut rng, &g, 7, 0.1);
        let f = greedy_extend(&g, &partial).unwrap();
        prop_assert_eq!(
            is_p_peaceful(&g, &f, p as f64).unwrap(),
            is_p_peaceful(&g, &f, Rational::from_integer(p)).unwrap()
        );
        prop_assert_eq!(
            is_p_peaceful(&g, &f, p as f32 + 0.5).unwrap(),
            is_p_peaceful(&g, &f, Rational::new(2 * p + 1, 2)).unwrap()
        );
    }

    #[test]
    fn dsatur_extends_properly(seed in any::<u64>(), n in 1usize..60, max_deg in 0usize..10, skip in 0.3f64..1.0) {
        let mut rng = rng_from_seed(seed);
        let g = common::random_bounded_graph(&mut rng, n, max_deg);
        let palette = g.max_degree() + 1;
        let base = common::random_proper_colouring(&mut rng, &g, palette, skip);
        let out = dsatur(&g, &base, 0..palette).unwrap();
        prop_assert!(out.validate_total(&g).is_ok());
        for v in 0..n {
            if let Some(c) = base.get(v) {
                prop_assert_eq!(out.get(v), Some(c));
            }
        }
    }

    #[test]
    fn text_and_json_round_trip(seed in any::<u64>(), n in 0usize..60, max_deg in 0usize..12) {
        let mut rng = rng_from_seed(seed);
        let g = common::random_bounded_graph(&mut rng, n, max_deg);
        let text = format_graph(&g);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(format_graph(&back), text);
        let f = common::random_proper_colouring(&mut rng, &g, max_deg + 2, 0.3);
        prop_assert_eq!(PartialColouring::from_json(&f.to_json()).unwrap(), f);
    }
}
