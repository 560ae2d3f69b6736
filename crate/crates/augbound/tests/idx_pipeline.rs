use std::path::Path;
use std::process::Command;

use augbound::idx::{dataset_to_idx, load_image_dataset, write_idx};
use augbound_core::pipeline::{synthetic_digits, Split};

fn write_pair(dir: &Path, stem: &str, count: usize, split: Split) {
    let ds = synthetic_digits(count, 14, 14, split, 5).unwrap();
    let (images, labels) = dataset_to_idx(&ds).unwrap();
    write_idx(&dir.join(format!("{stem}-images.idx")), &images).unwrap();
    write_idx(&dir.join(format!("{stem}-labels.idx")), &labels).unwrap();
}

fn tiny_config(dir: &Path) -> String {
    let p = |name: &str| dir.join(name).to_str().unwrap().to_owned();
    serde_json::json!({
        "pipeline": {
            "data": {
                "source": "idx",
                "train_images": p("train-images.idx"),
                "train_labels": p("train-labels.idx"),
                "test_images": p("test-images.idx"),
                "test_labels": p("test-labels.idx"),
            },
            "experiment": {
                "train_subset_size": 60,
                "test_size": 60,
                "strengths": [0.0, 1.0],
                "n_augment": 2,
                "hidden_sizes": [8],
                "train": { "epochs": 1, "batch_size": 32 },
                "mine": { "hidden_units": 16, "hidden_layers": 1, "steps": 30 },
                "discriminator": { "epochs": 5 },
                "num_seeds": 2,
                "num_model_runs": 20,
                "probe_samples": 50,
                "kl_samples": 100,
                "image_projection_dim": 16,
                "param_projection_dim": 8
            },
            "cache_dir": p("cache")
        }
    })
    .to_string()
}

#[test]
fn idx_round_trip_preserves_quantized_images() {
    let dir = tempfile::tempdir().unwrap();
    write_pair(dir.path(), "train", 30, Split::Train);
    let original = synthetic_digits(30, 14, 14, Split::Train, 5).unwrap();
    let loaded = load_image_dataset(
        &dir.path().join("train-images.idx"),
        &dir.path().join("train-labels.idx"),
        "idx",
        Split::Train,
    )
    .unwrap();
    assert_eq!((loaded.len(), loaded.height, loaded.width), (30, 14, 14));
    assert_eq!(loaded.labels, original.labels);
    for (a, b) in loaded.images.as_slice().iter().zip(original.images.as_slice()) {
        assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
    }
}

#[test]
fn image_bound_on_idx_files_regenerates_from_cache() {
    let dir = tempfile::tempdir().unwrap();
    write_pair(dir.path(), "train", 200, Split::Train);
    write_pair(dir.path(), "test", 60, Split::Test);
    let config = dir.path().join("config.json");
    std::fs::write(&config, tiny_config(dir.path())).unwrap();

    let run = |out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_augbound"))
            .args(["image-bound", "--config", config.to_str().unwrap(), "--jobs", "2", "--out"])
            .arg(dir.path().join(out))
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run("first");
    let cached = std::fs::read_dir(dir.path().join("cache")).unwrap().count();
    assert_eq!(cached, 4);
    run("second");
    for name in ["report.json", "sweep.csv", "figure.svg"] {
        let a = std::fs::read(dir.path().join("first").join(name)).unwrap();
        assert_eq!(a, std::fs::read(dir.path().join("second").join(name)).unwrap(), "{name}");
    }
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("first/report.json")).unwrap()).unwrap();
    assert_eq!(report["dataset"], "idx");
    assert_eq!(report["strengths"].as_array().unwrap().len(), 2);
    assert_eq!(report["seeds"].as_array().unwrap().len(), 2);
}
