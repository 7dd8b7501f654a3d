use gridrecov_core::graph::{count_saps, expansion_constant};
use gridrecov_core::inference::{
    gamma, map_full_scored, marginal_predict, marginals, max_agreement_edges, max_agreement_exhaustive,
};
use gridrecov_core::noise::sample_observations;
use gridrecov_core::oracles::{
    brute_force_marginals, brute_force_max, check_expander_bound, check_filled_in_lemma, check_flipping_lemma,
    check_sign_symmetry, polyomino_census,
};
use gridrecov_core::{build_grid, FirstStageResult, Graph, Labeling, NoiseParams};

#[test]
fn solvers_match_brute_force() {
    for (rows, cols) in [(2, 2), (2, 5), (3, 3), (3, 4)] {
        let grid = build_grid(rows, cols).unwrap();
        for (k, (p, q)) in [(0.1, 0.1), (0.1, 0.3), (0.3, 0.1), (0.3, 0.3)].into_iter().enumerate() {
            let params = NoiseParams::new(p, q).unwrap();
            let w = gamma(p, q).unwrap();
            for seed in 0..10u64 {
                let seed = seed * 4 + k as u64;
                let truth = Labeling::random(grid.n(), seed);
                let obs = sample_observations(&grid, &truth, &params, seed).unwrap();
                let s = obs.signals();

                let (edge_best, _) = brute_force_max(&grid, s, 0.0).unwrap();
                assert_eq!(max_agreement_edges(&grid, s).unwrap().score as f64, edge_best);

                let (full_best, _) = brute_force_max(&grid, s, w.value()).unwrap();
                let (full, _) = map_full_scored(&grid, s, w).unwrap();
                assert!((full - full_best).abs() < 1e-9, "{full} vs {full_best}");

                let exact = marginals(&grid, s, p, q).unwrap();
                let brute = brute_force_marginals(&grid, s, p, q).unwrap();
                for v in 0..grid.n() {
                    assert!((exact.get(v) - brute.get(v)).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn flipping_lemmas_hold_at_optimum() {
    let grid = build_grid(5, 5).unwrap();
    for p in [0.05, 0.15] {
        let params = NoiseParams::new(p, 0.4).unwrap();
        for seed in 0..100 {
            let truth = Labeling::all_plus(grid.n());
            let obs = sample_observations(&grid, &truth, &params, seed).unwrap();
            let first = max_agreement_edges(&grid, obs.signals()).unwrap();
            let flip = check_flipping_lemma(&grid, &obs, &truth, &first).unwrap();
            assert!(flip.pass, "{}", flip.to_json_line());
            let filled = check_filled_in_lemma(&grid, &obs, &truth, &first).unwrap();
            assert!(filled.pass, "{}", filled.to_json_line());
        }
    }
}

#[test]
fn flipping_lemma_negative_control() {
    let grid = build_grid(4, 4).unwrap();
    let truth = Labeling::all_plus(grid.n());
    let obs = sample_observations(&grid, &truth, &NoiseParams::new(0.0, 0.0).unwrap(), 0).unwrap();
    let optimum = max_agreement_edges(&grid, obs.signals()).unwrap();
    assert!(check_flipping_lemma(&grid, &obs, &truth, &optimum).unwrap().pass);

    let mut values = truth.values().to_vec();
    values[5] = -1;
    let corrupted = FirstStageResult::uncertified(&grid, obs.signals(), Labeling::new(values).unwrap()).unwrap();
    let report = check_flipping_lemma(&grid, &obs, &truth, &corrupted).unwrap();
    assert!(!report.pass);
    assert_eq!(report.oracle_value, 0.0);
    assert!(!check_filled_in_lemma(&grid, &obs, &truth, &corrupted).unwrap().pass);
}

#[test]
fn expander_bound_on_random_cubic_graphs() {
    for graph_seed in 0..10 {
        let g = Graph::random_regular(14, 3, graph_seed).unwrap();
        let c = expansion_constant(&g).unwrap();
        for trial in 0..5 {
            let seed = graph_seed * 100 + trial;
            let truth = Labeling::random(g.n(), seed);
            let obs = sample_observations(&g, &truth, &NoiseParams::new(0.08, 0.3).unwrap(), seed).unwrap();
            let first = max_agreement_exhaustive(&g, obs.signals()).unwrap();
            let report = check_expander_bound(&g, &obs, &truth, &first, c, 3).unwrap();
            assert!(!report.applicable || report.pass, "{}", report.to_json_line());
        }
        let truth = Labeling::all_plus(g.n());
        let obs = sample_observations(&g, &truth, &NoiseParams::new(0.0, 0.5).unwrap(), graph_seed).unwrap();
        let first = max_agreement_exhaustive(&g, obs.signals()).unwrap();
        let report = check_expander_bound(&g, &obs, &truth, &first, c, 3).unwrap();
        assert!(report.pass && report.candidate_value == 0.0);
    }
}

#[test]
fn marginal_prediction_is_sign_symmetric() {
    let grid = build_grid(3, 3).unwrap();
    for seed in 0..100 {
        let (p, q) = ([0.1, 0.3][seed as usize % 2], [0.2, 0.4][seed as usize / 2 % 2]);
        let truth = Labeling::random(grid.n(), seed);
        let obs = sample_observations(&grid, &truth, &NoiseParams::new(p, q).unwrap(), seed).unwrap();
        let report =
            check_sign_symmetry(&grid, &obs, &truth, |s| Ok(marginal_predict(&marginals(&grid, s, p, q)?))).unwrap();
        assert!(report.pass, "{}", report.to_json_line());
    }
}

#[test]
fn polygon_census_matches_polyomino_growth() {
    assert_eq!(count_saps(12).unwrap(), polyomino_census(12).unwrap());
}
