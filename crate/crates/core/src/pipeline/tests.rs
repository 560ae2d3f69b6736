use super::*;
use crate::nn::Network;

fn digits(count: usize, split: Split) -> ImageDataset {
    synthetic_digits(count, 28, 28, split, 5).unwrap()
}

#[test]
fn synthetic_digits_are_seeded_and_in_range() {
    let a = digits(30, Split::Train);
    assert_eq!(a, digits(30, Split::Train));
    assert_eq!(a.images.rows(), 30);
    assert!(a.images.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(a.images.row_sums().iter().all(|&s| s > 10.0));
    // Item i does not depend on the count.
    assert_eq!(digits(10, Split::Train).images.row(7), a.images.row(7));
    assert_ne!(digits(10, Split::Test).images.row(7), a.images.row(7));
}

#[test]
fn zero_strength_is_bit_identical() {
    let ds = digits(12, Split::Train);
    let aug = build_augmented_dataset(&ds, &AugmentationPolicy::new(0.0, 3).unwrap(), 9).unwrap();
    assert_eq!(aug.len(), 36);
    for (r, prov) in aug.provenance.iter().enumerate() {
        assert_eq!(aug.images.row(r), ds.images.row(prov.item));
        assert_eq!(aug.labels[r], ds.labels[prov.item]);
        assert!(aug.params[r].is_identity());
    }
}

#[test]
fn augmentation_is_deterministic_and_commutes_with_subsets() {
    let ds = digits(20, Split::Train);
    let policy = AugmentationPolicy::new(0.6, 4).unwrap();
    let full = build_augmented_dataset(&ds, &policy, 3).unwrap();
    assert_eq!(full, build_augmented_dataset(&ds, &policy, 3).unwrap());
    assert_ne!(full.images, build_augmented_dataset(&ds, &policy, 4).unwrap().images);
    let picks = [17, 2, 9];
    let sub = build_augmented_dataset(&ds.subset(&picks).unwrap(), &policy, 3).unwrap();
    for (k, &i) in picks.iter().enumerate() {
        for j in 0..4 {
            assert_eq!(sub.images.row(k * 4 + j), full.images.row(i * 4 + j));
            assert_eq!(sub.params[k * 4 + j], full.params[i * 4 + j]);
            assert_eq!(sub.provenance[k * 4 + j].id, full.provenance[i * 4 + j].id);
        }
    }
}

#[test]
fn gap_zero_when_sets_coincide() {
    let ds = digits(40, Split::Train);
    let loss = LossSpec::clipped_cross_entropy(10.0).unwrap();
    let net = Network::new(&[784, 16, 10], Head::Softmax, 1).unwrap();
    let g = empirical_gap(&net, &ds.images, &ds.labels, &ds.images, &ds.labels, &loss).unwrap();
    assert_eq!(g.gap, 0.0);
}

#[test]
fn untrained_gap_is_small_and_order_free() {
    let loss = LossSpec::clipped_cross_entropy(10.0).unwrap();
    let train_set = digits(300, Split::Train);
    let test_set = digits(300, Split::Test);
    for seed in 0..5 {
        let net = Network::new(&[784, 32, 10], Head::Softmax, seed).unwrap();
        let g = empirical_gap(&net, &train_set.images, &train_set.labels, &test_set.images, &test_set.labels, &loss)
            .unwrap();
        assert!(g.gap.abs() < 0.1 * 10.0, "{g:?}");
        let rev: Vec<usize> = (0..300).rev().collect();
        let shuffled = train_set.subset(&rev).unwrap();
        let h = empirical_gap(&net, &shuffled.images, &shuffled.labels, &test_set.images, &test_set.labels, &loss)
            .unwrap();
        assert!((g.gap - h.gap).abs() < 1e-12);
    }
}

fn tiny_config() -> ExperimentConfig {
    ExperimentConfig {
        train_subset_size: 60,
        test_size: 60,
        strengths: vec![0.0, 1.0],
        n_augment: 2,
        hidden_sizes: vec![8],
        train: TrainConfig { epochs: 2, batch_size: 32, ..TrainConfig::default() },
        mine: MineConfig { hidden_units: 16, hidden_layers: 1, steps: 50, ..MineConfig::default() },
        num_seeds: 1,
        num_model_runs: 20,
        probe_samples: 50,
        kl_samples: 100,
        param_projection_dim: 8,
        image_projection_dim: 16,
        ..ExperimentConfig::default()
    }
}

#[test]
fn cell_runs_and_summarizes_consistently() {
    let cfg = tiny_config();
    let pool = digits(150, Split::Train);
    let test = digits(60, Split::Test);
    let sizes = cfg.layer_sizes(784, 10);
    let params = Network::new(&sizes, Head::Softmax, 0).unwrap().num_params();
    let proj = Projections::new(&cfg, 784, params).unwrap();
    let cells: Vec<CellRecord> = cfg.strengths.iter().map(|&s| run_cell(&cfg, &pool, &test, &proj, s, 0).unwrap()).collect();
    assert_eq!(cells[0], run_cell(&cfg, &pool, &test, &proj, 0.0, 0).unwrap());
    assert!(cells[0].kl_hat.abs() < 0.05, "{}", cells[0].kl_hat);
    assert!(cells[1].kl_hat > cells[0].kl_hat);
    for c in &cells {
        assert_eq!(c.bound.recompute_thm4().unwrap(), c.bound);
        assert!((c.bound.r - 5.0).abs() < 1e-15);
    }
    let summary = summarize(&cfg, &cells).unwrap();
    assert_eq!(summary.records.len(), 2);
    assert_eq!(summary.seeds, vec![0]);
    for r in &summary.records {
        assert_eq!(r.bound.recompute_thm4().unwrap(), r.bound);
    }
}

#[test]
fn config_rejects_bad_values() {
    let mut cfg = ExperimentConfig::default();
    assert!(cfg.validate().is_ok());
    cfg.strengths = vec![1.5];
    assert!(cfg.validate().is_err());
    let cfg = ExperimentConfig { num_seeds: 0, ..ExperimentConfig::default() };
    assert!(cfg.validate().is_err());
}
