use mlst_core::heuristics::COMPOSITE_FULL_LIMIT;
use mlst_core::netgen::{er_probability, gen_er, gen_micro, rng_from_seed, GenSpec, GraphModel, Tsm};
use mlst_core::ratio::{pricing_best_q, pricing_exhaustive};
use mlst_core::{
    bottom_up, composite_full, guaranteed_composite, parse_instance, top_down, write_instance, Graph, Instance,
    Scalar, SteinerMode,
};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = GraphModel> {
    prop_oneof![
        (0.2f64..2.0).prop_map(|epsilon| GraphModel::Er { epsilon }),
        (1usize..=3, 0.0f64..=1.0).prop_map(|(h, beta)| GraphModel::Ws { k: 2 * h, beta }),
        (3usize..=6, 1usize..=3).prop_map(|(m0, m)| GraphModel::Ba { m0, m: m.min(m0) }),
    ]
}

fn tsm() -> impl Strategy<Value = Tsm> {
    prop_oneof![Just(Tsm::Linear), Just(Tsm::Exponential)]
}

fn spec() -> impl Strategy<Value = GenSpec> {
    (model(), 8usize..=24, 1usize..=3, tsm(), any::<u64>()).prop_map(|(model, n, ell, tsm, seed)| GenSpec {
        model,
        n,
        ell,
        tsm,
        seed,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_are_valid_and_reproducible(spec in spec()) {
        let a: Instance = spec.generate().unwrap();
        prop_assert!(a.graph().is_connected());
        for i in 1..a.levels() {
            let (lo, hi) = (a.terminals(i), a.terminals(i + 1));
            prop_assert!(hi.iter().all(|v| lo.binary_search(v).is_ok()));
        }
        let sizes: Vec<usize> = (1..=a.levels()).map(|i| a.terminals(i).len()).collect();
        prop_assert_eq!(sizes, spec.tsm.sizes(spec.n, spec.ell));
        let text = write_instance(&a);
        prop_assert_eq!(&text, &write_instance(&spec.generate::<f64>().unwrap()));
        let back: Instance = parse_instance(&text).unwrap();
        prop_assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn heuristic_invariants(seed in any::<u64>(), ell in 1usize..=4, exact in any::<bool>()) {
        let mode = if exact { SteinerMode::Exact } else { SteinerMode::Approx2 };
        let spec = GenSpec { model: GraphModel::Ba { m0: 4, m: 2 }, n: 16, ell, tsm: Tsm::Linear, seed };
        let inst: Instance = spec.generate().unwrap();
        let bu = bottom_up(&inst, mode).unwrap();
        let td = top_down(&inst, mode).unwrap();
        let cmp = composite_full(&inst, mode).unwrap();
        let cmps = guaranteed_composite(&inst, mode).unwrap();
        for run in [&bu, &td, &cmp, &cmps] {
            for i in 1..=ell {
                prop_assert!(inst.graph().connects(run.solution.level(i), inst.terminals(i)));
                prop_assert!(inst.graph().is_tree(run.solution.level(i)) || run.solution.level(i).is_empty());
                if i > 1 {
                    prop_assert!(run.solution.level(i).is_subset(run.solution.level(i - 1)));
                }
            }
        }
        prop_assert!(!bu.cost.definitely_lt(&cmp.cost));
        prop_assert!(!td.cost.definitely_lt(&cmp.cost));
        prop_assert_eq!(bu.stp_calls, 1);
        prop_assert_eq!(td.stp_calls, ell);
        let q = cmps.subset_used.clone().unwrap();
        prop_assert_eq!(cmps.stp_calls, ell + q.len());
        prop_assert!(cmps.stp_calls <= 2 * ell);
        prop_assert!(ell <= COMPOSITE_FULL_LIMIT);
    }

    #[test]
    fn pricing_matches_exhaustive(ys in prop::collection::vec(0.0f64..1.0, 1..=12)) {
        let mut y = ys;
        y.sort_by(|a, b| b.total_cmp(a));
        let (_, fast) = pricing_best_q(&y).unwrap();
        let (_, slow) = pricing_exhaustive(&y).unwrap();
        prop_assert!((fast - slow).abs() < 1e-12);
    }

    #[test]
    fn micro_generator_respects_limits(seed in any::<u64>(), n in 4usize..=8, extra in 0usize..=3) {
        let m = (n - 1 + extra).min(10);
        let inst: Instance = gen_micro(n, m, 2, Tsm::Linear, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(inst.graph().edge_count(), m);
        prop_assert!(inst.graph().edges().iter().all(|e| e.cost >= 1.0 && e.cost <= 10.0));
    }
}

#[test]
fn er_density_within_three_sigma() {
    // conditioning on connectivity nudges density up slightly; at n = 40
    // and epsilon = 1 almost every draw is connected
    let (n, eps, samples) = (40usize, 1.0, 200);
    let p = er_probability(n, eps);
    let pairs = (n * (n - 1) / 2) as f64;
    let mut rng = rng_from_seed(2024);
    let total: usize = (0..samples)
        .map(|_| gen_er::<f64>(n, eps, &mut rng).unwrap().edge_count())
        .sum();
    let mean = total as f64 / samples as f64;
    let sigma = (pairs * p * (1.0 - p) / samples as f64).sqrt();
    assert!((mean - p * pairs).abs() <= 3.0 * sigma, "mean {mean}, expected {}", p * pairs);
}

#[test]
fn graph_alias_is_f64() {
    let g: Graph = gen_er(10, 1.0, &mut rng_from_seed(1)).unwrap();
    assert!(g.edges().iter().all(|e| e.cost.is_positive_beyond_eps()));
}
