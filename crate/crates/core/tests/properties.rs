mod common;

use common::{labels, max_abs_diff, power_series, random_connected_graph, random_graph, random_points};
use graphsom::clustering::{
    kernel_kmeans, kmeans, partition_stats, q_modularity, q_modularity_unweighted, spectral_clustering,
};
use graphsom::graph::{connected_components, load_edge_list, summary_graph, LoadOptions};
use graphsom::layout::{
    constrained_full_layout, edge_widths, force_directed_layout, glyph_radii, render_svg, Frame, SvgOptions,
};
use graphsom::linalg::{eigendecompose_symmetric, heat_kernel, KernelMatrix};
use graphsom::som::{
    batch_kernel_som, batch_som, random_gamma, train_observed, u_matrix, SomData, SomGrid, SomInit, SomOptions,
    SomSchedule,
};
use graphsom::{laplacian, Partition, WeightedGraph};
use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn random_partition(n: usize, k: usize, seed: u64) -> Partition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    Partition::from_raw(&raw, "random")
}

/// Random graph with weighted degree at most 3, so that β·λ_max ≤ 6 for
/// β ≤ 1 and the 30-term series truncates below 2e-10.
fn series_graph(n: usize, seed: u64) -> WeightedGraph {
    let g = random_graph(n, 0.5, seed);
    let max_degree = g.degrees().into_iter().fold(0.0, f64::max);
    if max_degree > 3.0 {
        g.scaled(3.0 / max_degree).unwrap()
    } else {
        g
    }
}

fn random_kernel(n: usize, seed: u64) -> KernelMatrix {
    let x = random_points(n, 4, seed);
    KernelMatrix::gram(x.view()).unwrap()
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn loaded_graphs_are_symmetric_without_loops(
        edges in prop::collection::vec((0usize..12, 0usize..12, 0.0f64..5.0), 1..40)
    ) {
        let mut text = String::new();
        for (a, b, w) in &edges {
            text.push_str(&format!("n{a}\tn{b}\t{w}\n"));
        }
        let g = load_edge_list(text.as_bytes(), LoadOptions::default()).unwrap();
        let w = g.weights();
        for i in 0..g.order() {
            prop_assert_eq!(w[[i, i]], 0.0);
            for j in 0..g.order() {
                prop_assert_eq!(w[[i, j]], w[[j, i]]);
            }
        }
    }

    #[test]
    fn laplacian_rows_sum_to_zero(n in 2usize..40, density in 0.05f64..0.9, seed in any::<u64>()) {
        let g = random_graph(n, density, seed);
        let l = laplacian(&g);
        let max_degree = g.degrees().into_iter().fold(0.0, f64::max);
        let ones = Array1::<f64>::ones(n);
        let residual = l.as_array().dot(&ones).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(residual <= 1e-12 * max_degree.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn zero_eigenvalues_count_components(n in 2usize..25, density in 0.0f64..0.3, seed in any::<u64>()) {
        let g = random_graph(n, density, seed);
        let eig = eigendecompose_symmetric(&laplacian(&g)).unwrap();
        let lambda = eig.eigenvalues();
        let lmax = lambda.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = if lmax > 0.0 { 1e-8 * lmax } else { 1e-12 };
        let zeros = lambda.iter().filter(|v| v.abs() <= tol).count();
        prop_assert_eq!(zeros, connected_components(&g).k());
        prop_assert!(lambda[0] >= -1e-10 * lmax);
    }

    #[test]
    fn summary_graph_conserves_weight(n in 2usize..30, k in 1usize..6, seed in any::<u64>()) {
        let g = random_graph(n, 0.3, seed);
        let p = random_partition(n, k, seed ^ 1);
        let sg = summary_graph(&g, &p).unwrap();
        prop_assert!((sg.total_weight() - g.total_weight()).abs() <= 1e-9 * g.total_weight().max(1.0));
        prop_assert_eq!(sg.nodes.iter().map(|n| n.vertex_count).sum::<usize>(), n);
        prop_assert!(sg.edges.iter().all(|e| e.a < e.b && e.inter_weight > 0.0));
    }

    #[test]
    fn heat_semigroup(n in 2usize..10, b1 in 0.0f64..1.0, b2 in 0.0f64..1.0, seed in any::<u64>()) {
        let l = laplacian(&random_graph(n, 0.5, seed));
        let k1 = heat_kernel(&l, b1).unwrap();
        let k2 = heat_kernel(&l, b2).unwrap();
        let k12 = heat_kernel(&l, b1 + b2).unwrap();
        let product = k1.as_array().dot(k2.as_array());
        prop_assert!(max_abs_diff(&product, k12.as_array()) <= 1e-8);
    }

    #[test]
    fn heat_trace_decreases_on_connected_graphs(n in 2usize..12, b1 in 0.01f64..1.0, gap in 0.01f64..1.0, seed in any::<u64>()) {
        let l = laplacian(&random_connected_graph(n, 0.3, seed));
        let trace = |beta: f64| heat_kernel(&l, beta).unwrap().as_array().diag().sum();
        prop_assert!(trace(b1 + gap) < trace(b1));
    }

    #[test]
    fn heat_kernel_matches_power_series(n in 1usize..=10, beta in 0.0f64..=1.0, seed in any::<u64>()) {
        let l = laplacian(&series_graph(n, seed));
        let k = heat_kernel(&l, beta).unwrap();
        let oracle = power_series(l.as_array(), beta, 30);
        prop_assert!(max_abs_diff(k.as_array(), &oracle) <= 1e-8);
    }

    #[test]
    fn modularity_bounds_and_scaling(n in 3usize..30, k in 1usize..6, seed in any::<u64>(), c in 0.01f64..100.0) {
        let g = random_graph(n, 0.4, seed);
        prop_assume!(g.edge_count() > 0);
        let p = random_partition(n, k, seed ^ 2);
        let q = q_modularity(&g, &p).unwrap();
        prop_assert!(q <= 1.0);
        prop_assert!(q_modularity_unweighted(&g, &p).unwrap() <= 1.0);
        prop_assert_eq!(q_modularity(&g, &Partition::single_cluster(n, "one")).unwrap(), 0.0);
        let scaled = q_modularity(&g.scaled(c).unwrap(), &p).unwrap();
        prop_assert!((scaled - q).abs() <= 1e-12);
    }

    #[test]
    fn compaction_leaves_no_gaps(raw in prop::collection::vec(0usize..50, 1..60)) {
        let p = Partition::from_raw(&raw, "raw");
        let mut ids: Vec<usize> = p.assignment().to_vec();
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(ids, (0..p.k()).collect::<Vec<_>>());
        for i in 0..raw.len() {
            for j in 0..raw.len() {
                prop_assert_eq!(raw[i] == raw[j], p.cluster_of(i) == p.cluster_of(j));
            }
        }
    }

    #[test]
    fn kernel_and_explicit_kmeans_agree(n in 2usize..=30, k in 1usize..6, seed in any::<u64>()) {
        let k = k.min(n);
        let x = random_points(n, 3, seed);
        let kernel = KernelMatrix::gram(x.view()).unwrap();
        let explicit = kmeans(x.view(), k, seed, 3).unwrap();
        let implicit = kernel_kmeans(&kernel, k, seed, 3).unwrap();
        prop_assert_eq!(explicit.partition.assignment(), implicit.partition.assignment());
        prop_assert!((explicit.within_energy - implicit.within_energy).abs() <= 1e-6);
    }

    #[test]
    fn lloyd_energy_never_increases(n in 2usize..40, k in 1usize..8, seed in any::<u64>()) {
        let k = k.min(n);
        let x = random_points(n, 2, seed);
        let kernel = KernelMatrix::gram(x.view()).unwrap();
        for trace in [kmeans(x.view(), k, seed, 2).unwrap().energy_trace, kernel_kmeans(&kernel, k, seed, 2).unwrap().energy_trace] {
            for w in trace.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn clustering_is_deterministic(n in 4usize..20, seed in any::<u64>()) {
        let g = random_connected_graph(n, 0.3, seed);
        let a = spectral_clustering(&g, 3, 3, seed, 4).unwrap();
        let b = spectral_clustering(&g, 3, 3, seed, 4).unwrap();
        prop_assert_eq!(serde_json::to_string(&a.partition).unwrap(), serde_json::to_string(&b.partition).unwrap());
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn gamma_stays_convex_every_epoch(n in 2usize..25, rows in 1usize..4, cols in 1usize..4, seed in any::<u64>()) {
        let kernel = random_kernel(n, seed);
        let grid = SomGrid::new(rows, cols).unwrap();
        let options = SomOptions::new(SomSchedule { epochs: 20, ..SomSchedule::default_for(&grid) }, seed)
            .with_init(SomInit::Dirichlet);
        let mut worst = (0.0f64, 0.0f64);
        train_observed(SomData::Kernel(&kernel), grid, &options, |state| {
            for row in state.gamma.rows() {
                worst.0 = worst.0.min(row.iter().copied().fold(f64::INFINITY, f64::min));
                worst.1 = worst.1.max((row.sum() - 1.0).abs());
            }
        }).unwrap();
        prop_assert!(worst.0 >= -1e-12 && worst.1 <= 1e-10);
    }

    #[test]
    fn frozen_radius_energy_never_increases(n in 3usize..25, sigma in 0.3f64..2.0, seed in any::<u64>()) {
        let kernel = random_kernel(n, seed);
        let grid = SomGrid::new(2, 3).unwrap();
        let options = SomOptions::new(SomSchedule::frozen(30, sigma), seed).with_init(SomInit::Dirichlet);
        let model = batch_kernel_som(&kernel, grid, &options).unwrap();
        for w in model.energy_trace.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn kernel_som_matches_explicit_som(n in 2usize..=30, seed in any::<u64>()) {
        let x = random_points(n, 3, seed);
        let kernel = KernelMatrix::gram(x.view()).unwrap();
        let grid = SomGrid::new(2, 2).unwrap();
        let options = SomOptions::new(SomSchedule { epochs: 30, ..SomSchedule::default_for(&grid) }, seed);
        let a = batch_kernel_som(&kernel, grid, &options).unwrap();
        let b = batch_som(x.view(), grid, &options).unwrap();
        prop_assert_eq!(&a.assignment, &b.assignment);
        for (ea, eb) in a.energy_trace.iter().zip(&b.energy_trace) {
            prop_assert!((ea - eb).abs() <= 1e-6);
        }
    }

    #[test]
    fn relabeling_permutes_assignments(n in 3usize..20, seed in any::<u64>()) {
        let x = random_points(n, 3, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 9);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let xp = Array2::from_shape_fn((n, 3), |(i, j)| x[[order[i], j]]);
        let grid = SomGrid::new(2, 2).unwrap();
        let gamma = random_gamma(grid.units(), n, seed);
        let gamma_p = Array2::from_shape_fn(gamma.dim(), |(m, i)| gamma[[m, order[i]]]);
        let schedule = SomSchedule { epochs: 25, ..SomSchedule::default_for(&grid) };
        let a = batch_kernel_som(&KernelMatrix::gram(x.view()).unwrap(), grid,
            &SomOptions::new(schedule, seed).with_init(SomInit::Gamma(gamma))).unwrap();
        let b = batch_kernel_som(&KernelMatrix::gram(xp.view()).unwrap(), grid,
            &SomOptions::new(schedule, seed).with_init(SomInit::Gamma(gamma_p))).unwrap();
        for (i, &o) in order.iter().enumerate() {
            prop_assert_eq!(b.assignment[i], a.assignment[o]);
        }
    }

    #[test]
    fn umatrix_neighbor_distances_are_symmetric(n in 3usize..20, seed in any::<u64>()) {
        // On a 1×2 map each unit has the other as its only neighbor.
        let kernel = random_kernel(n, seed);
        let grid = SomGrid::new(1, 2).unwrap();
        let model = batch_kernel_som(&kernel, grid, &SomOptions::default_for(&grid, seed)).unwrap();
        let um = u_matrix(&model, SomData::Kernel(&kernel)).unwrap();
        prop_assert_eq!(um.values[0], um.values[1]);
    }
}

fn layout_graph(n: usize, seed: u64) -> (WeightedGraph, Partition) {
    let g = random_graph(n, 0.2, seed);
    let p = random_partition(n, 5, seed ^ 3);
    (g, p)
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn summary_layouts_stay_in_frame(n in 2usize..40, seed in any::<u64>(), w in 50.0f64..2000.0, h in 50.0f64..2000.0) {
        let (g, p) = layout_graph(n, seed);
        let sg = summary_graph(&g, &p).unwrap();
        let frame = Frame::new(-10.0, 5.0, w, h).unwrap();
        let scene = force_directed_layout(&sg, 80, frame, seed).unwrap();
        prop_assert!(scene.nodes.iter().all(|n| n.position.iter().all(|v| v.is_finite())));
        prop_assert!(scene.containment_violations().is_empty());
        let again = force_directed_layout(&sg, 80, frame, seed).unwrap();
        prop_assert_eq!(render_svg(&scene, &SvgOptions::default()), render_svg(&again, &SvgOptions::default()));
    }

    #[test]
    fn radius_and_width_ratios(counts in prop::collection::vec(1usize..500, 2..10), weights in prop::collection::vec(0.01f64..50.0, 2..10)) {
        let radii = glyph_radii(&counts, 40.0);
        for i in 0..counts.len() {
            for j in 0..counts.len() {
                let expected = (counts[i] as f64 / counts[j] as f64).sqrt();
                prop_assert!((radii[i] / radii[j] - expected).abs() <= 1e-9 * expected);
            }
        }
        let widths = edge_widths(&weights, 6.0);
        for i in 0..weights.len() {
            let expected = weights[i] / weights[0];
            prop_assert!((widths[i] / widths[0] - expected).abs() <= 1e-9 * expected);
        }
    }

    #[test]
    fn doubling_the_frame_scales_positions(n in 2usize..25, seed in any::<u64>()) {
        let (g, p) = layout_graph(n, seed);
        let sg = summary_graph(&g, &p).unwrap();
        let (x0, y0) = (3.0, -7.0);
        let small = force_directed_layout(&sg, 60, Frame::new(x0, y0, 300.0, 200.0).unwrap(), seed).unwrap();
        let big = force_directed_layout(&sg, 60, Frame::new(x0, y0, 600.0, 400.0).unwrap(), seed).unwrap();
        for (a, b) in small.nodes.iter().zip(&big.nodes) {
            prop_assert!((x0 + 2.0 * (a.position[0] - x0) - b.position[0]).abs() <= 1e-6);
            prop_assert!((y0 + 2.0 * (a.position[1] - y0) - b.position[1]).abs() <= 1e-6);
        }
    }

    #[test]
    fn constrained_layout_keeps_every_vertex_in_its_cell(n in 2usize..60, rows in 1usize..4, cols in 1usize..4, seed in any::<u64>()) {
        let g = random_graph(n, 0.15, seed);
        let grid = SomGrid::new(rows, cols).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = graphsom::som::SomModel {
            grid,
            gamma: random_gamma(grid.units(), n, seed),
            assignment: (0..n).map(|_| rng.random_range(0..grid.units())).collect(),
            energy_trace: vec![0.0],
            schedule: SomSchedule::frozen(1, 1.0),
            seed,
        };
        let scene = constrained_full_layout(&g, &model, Frame::new(0.0, 0.0, 500.0, 400.0).unwrap(), 60, seed).unwrap();
        prop_assert!(scene.containment_violations().is_empty());
        prop_assert!(scene.nodes.iter().all(|n| n.position.iter().all(|v| v.is_finite())));
    }
}

#[test]
fn stats_follow_partition_sizes() {
    let g = WeightedGraph::from_edges(labels(6), [(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0)]).unwrap();
    let stats = partition_stats(&g, &Partition::from_raw(&[0, 1, 2, 2, 2, 2], "p")).unwrap();
    assert_eq!((stats.num_clusters, stats.num_singletons, stats.max_size), (3, 2, 4));
    assert_eq!(stats.median_size, 1.0);
    assert_eq!(stats.third_quartile_size, 2.5);
}
