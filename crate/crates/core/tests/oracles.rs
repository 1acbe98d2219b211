mod common;

use scanplan::sampler::{plan_viewpoints, SamplerConfig};
use scanplan::sequencer::{solve_tsp_sa, AnnealConfig};

#[test]
fn annealing_matches_enumeration_on_small_tours() {
    let cfg = AnnealConfig::default();
    let mut exact = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..30 {
        let m = 3 + (seed as usize % 6);
        let tm = common::random_time_matrix(m, 100 + seed);
        let best = common::brute_force_tour(&tm);
        let sa = solve_tsp_sa(&tm, &cfg, seed);
        assert!(sa.total >= best - 1e-9, "annealing beat enumeration");
        if sa.total - best < 1e-9 {
            exact += 1;
        }
        worst = worst.max(sa.total / best - 1.0);
    }
    assert!(exact >= 28, "{exact}/30 exact");
    assert!(worst <= 0.02, "worst excess {worst}");
}

#[test]
fn brute_force_tour_agrees_with_hand_count() {
    // home legs 1, 2, 3; chain 0-1-2 with legs 1 and 1; scan 5 each
    let tm = scanplan::sequencer::TimeMatrix::new(
        vec![vec![0.0, 1.0, 10.0], vec![1.0, 0.0, 1.0], vec![10.0, 1.0, 0.0]],
        vec![1.0, 2.0, 3.0],
        5.0,
    )
    .unwrap();
    assert!((common::brute_force_tour(&tm) - (1.0 + 1.0 + 1.0 + 3.0 + 15.0)).abs() < 1e-12);
}

#[test]
fn more_iterations_do_not_raise_the_median_objective() {
    let median = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        0.5 * (v[9] + v[10])
    };
    for inst in 0..3 {
        let (cs, n, home) = common::small_instance(inst, 80.0);
        let run = |i_max| {
            let cfg = SamplerConfig { max_iterations: i_max, ..SamplerConfig::default() };
            (0..20)
                .map(|seed| {
                    let r = plan_viewpoints(&cs, n, home, &cfg, 160.0, seed).unwrap();
                    // an incomplete search has no objective yet
                    if r.is_complete() {
                        r.graph.objective(cfg.beta1, cfg.gamma1).unwrap()
                    } else {
                        f64::INFINITY
                    }
                })
                .collect::<Vec<_>>()
        };
        assert!(median(run(2000)) <= median(run(200)), "instance {inst}");
    }
}

#[test]
fn exhaustive_optimum_is_a_lower_bound_for_the_sampler() {
    for inst in 0..5 {
        let (cs, n, home) = common::small_instance(inst, 80.0);
        let cfg = SamplerConfig { max_iterations: 2000, ..SamplerConfig::default() };
        let opt = common::optimal_objective(&cs, n, cfg.beta1, cfg.gamma1);
        for seed in 0..10 {
            let r = plan_viewpoints(&cs, n, home, &cfg, 160.0, seed).unwrap();
            if r.is_complete() {
                assert!(r.graph.objective(cfg.beta1, cfg.gamma1).unwrap() >= opt - 1e-12);
            }
        }
    }
}
