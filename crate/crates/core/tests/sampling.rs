use graph_coreset::coreset::{tho_sample, tho_sample_best};
use graph_coreset::evaluation::{empirical_error, uniform_baseline};
use graph_coreset::graph::synth::random_connected;
use graph_coreset::theory_lab::{gen_lowerbound_instance, VertexRole};
use graph_coreset::{brute_force_kmedian, cost, BicriteriaConfig, CenterSet, WeightedPointSet};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn as_centers(f: &WeightedPointSet) -> CenterSet {
    CenterSet::new(f.support()).unwrap()
}

#[test]
fn oversampler_beats_best_single_center() {
    let g = random_connected(100, 200, 4);
    let x = WeightedPointSet::unit(0..100).unwrap();
    let (_, one_median) = brute_force_kmedian(&g, &x, 1).unwrap();
    for seed in 0..20 {
        let f = tho_sample(&g, &x, 5, 7, 5, seed).unwrap();
        assert!(
            cost(&g, &x, &as_centers(&f)).unwrap() <= one_median,
            "seed {seed}"
        );
    }
}

#[test]
fn more_repetitions_do_not_hurt() {
    let g = random_connected(200, 400, 9);
    let x = WeightedPointSet::unit(0..200).unwrap();
    let cfg = BicriteriaConfig::default();
    let run = |m: usize| -> f64 {
        median(
            (0..20)
                .map(|s| {
                    cost(
                        &g,
                        &x,
                        &as_centers(&tho_sample_best(&g, &x, 5, m, &cfg, s).unwrap()),
                    )
                    .unwrap()
                })
                .collect(),
        )
    };
    assert!(run(10) <= run(1));
}

/// Small uniform samples miss most right-hand vertices of the lower-bound
/// graph; centering on a missed singleton exposes the gap.
#[test]
fn uniform_samples_fail_on_lower_bound_instances() {
    for (k, eps, t) in [(1, 0.5, 2), (1, 0.25, 3), (2, 0.5, 3)] {
        let inst = gen_lowerbound_instance(k, eps, t).unwrap();
        let x = WeightedPointSet::unit(0..inst.graph.vertex_count()).unwrap();
        let rights: Vec<usize> = (0..inst.roles.len())
            .filter(|&v| matches!(inst.roles[v], VertexRole::Right { .. }))
            .collect();
        let size = (inst.m * t / 4).max(1);
        let mut worst: f64 = 0.0;
        for seed in 0..10 {
            let d = uniform_baseline(&x, size, seed).unwrap();
            for chunk in rights.chunks(k) {
                if chunk.len() < k {
                    continue;
                }
                let c = CenterSet::new(chunk.to_vec()).unwrap();
                worst = worst.max(empirical_error(&inst.graph, &x, &d, &c).unwrap());
            }
        }
        assert!(worst >= eps / 4.0, "k={k} eps={eps} t={t}: {worst}");
    }
}
