//! Metric characterizations and parameter bounds on certified instances.

use helly_core::generators::GenSpec;
use helly_core::graph::Graph;
use helly_core::oracles::{
    all_ecc_bruteforce, center_formula_check, center_isometry_check, helly_check_equal_radii,
    helly_check_subsets, hyperbolicity_exact, parameter_report, subset_ecc, unimodality_check,
    Caps, DistanceMatrix, HellyVerdict,
};
use proptest::prelude::*;

fn gen(text: &str) -> Graph {
    text.parse::<GenSpec>().unwrap().generate().unwrap().graph
}

fn arb_small_spec() -> impl Strategy<Value = GenSpec> {
    let seed = any::<u64>();
    prop_oneof![
        (1usize..15).prop_map(|n| GenSpec::Path { n }),
        (1usize..15, seed).prop_map(|(n, seed)| GenSpec::RandomTree { n, seed }),
        (1usize..15, seed).prop_map(|(n, seed)| GenSpec::BlockGraph { n, seed }),
        (1usize..4, 1usize..5).prop_map(|(w, h)| GenSpec::KingGrid { w, h }),
        (1usize..12, seed)
            .prop_map(|(n, seed)| GenSpec::Cone(Box::new(GenSpec::BlockGraph { n, seed }))),
        (1usize..5, seed, 1usize..4).prop_map(|(n, seed, p)| GenSpec::StrongProduct(
            Box::new(GenSpec::RandomTree { n, seed }),
            Box::new(GenSpec::Path { n: p }),
        )),
        (2usize..13, seed).prop_map(|(n, seed)| GenSpec::RandomHellySmall { n, seed }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flagged_families_are_helly_and_obey_the_characterizations(spec in arb_small_spec()) {
        let built = spec.generate().unwrap();
        let g = &built.graph;
        prop_assert!(built.meta.expected_helly);
        prop_assert_eq!(helly_check_subsets(g, 16).unwrap(), HellyVerdict::Helly);

        let t = all_ecc_bruteforce(g);
        prop_assert_eq!(t.rad, t.diam.div_ceil(2));
        prop_assert!(t.diam + 1 >= 2 * t.rad && t.diam <= 2 * t.rad);
        prop_assert!(unimodality_check(g, &t).passed());
        prop_assert!(center_formula_check(g, &t).passed());
        prop_assert!(center_isometry_check(g, &t).passed());
        for k in 1..=t.diam {
            prop_assert!(helly_check_equal_radii(g, k, 16).unwrap().passed());
        }

        let report = parameter_report(g, &Caps::default()).unwrap();
        let violations: Vec<_> = report.violations().collect();
        prop_assert!(violations.is_empty(), "{:?}", violations);
    }

    #[test]
    fn delta_witness_reproduces_delta(spec in arb_small_spec()) {
        let g = spec.generate().unwrap().graph;
        let h = hyperbolicity_exact(&g, 150).unwrap();
        match h.witness {
            None => prop_assert!(g.n() < 4),
            Some([a, b, c, d]) => {
                let dm = DistanceMatrix::new(&g);
                let mut sums = [
                    dm.get(a, b) + dm.get(c, d),
                    dm.get(a, c) + dm.get(b, d),
                    dm.get(a, d) + dm.get(b, c),
                ];
                prop_assert_eq!(Some(sums), h.sums);
                sums.sort_unstable();
                prop_assert_eq!(sums[2] - sums[1], h.delta.half_units());
            }
        }
    }

    #[test]
    fn seeds_fix_the_edge_list(spec in arb_small_spec()) {
        let a = spec.generate().unwrap().graph.to_edge_list();
        let b = spec.generate().unwrap().graph.to_edge_list();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn random_trees_are_trees(n in 1usize..500, seed in any::<u64>()) {
        let g = GenSpec::RandomTree { n, seed }.generate().unwrap().graph;
        prop_assert_eq!(g.m(), n - 1);
        prop_assert!(g.bfs(0).as_slice().iter().all(|&d| d < n as u32));
    }
}

#[test]
fn rectilinear_grids_are_not_helly() {
    for (w, h) in [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4)] {
        let built = GenSpec::RectGrid { w, h }.generate().unwrap();
        assert!(!built.meta.expected_helly);
        assert!(
            !helly_check_subsets(&built.graph, 16).unwrap().is_helly(),
            "{w}x{h}"
        );
    }
    let c4 = gen("rect-grid(2,2)");
    match helly_check_subsets(&c4, 16).unwrap() {
        HellyVerdict::NotHelly {
            witness,
            rad_m,
            diam_m,
        } => {
            assert_eq!((rad_m, diam_m), (2, 2));
            let report = subset_ecc(&witness, &DistanceMatrix::new(&c4)).unwrap();
            assert_ne!(report.rad, report.diam.div_ceil(2));
        }
        HellyVerdict::Helly => panic!("C4 is not Helly"),
    }
}
