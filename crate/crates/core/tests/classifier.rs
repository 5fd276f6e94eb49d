use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use texbank_core::classify::*;

fn blobs(seed: u64, per_class: usize) -> LabeledDataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [[0.0, 0.0, 0.0], [2.0, 0.5, -1.0], [-1.5, 2.0, 1.0]];
    let mut samples = Vec::new();
    for (c, center) in centers.iter().enumerate() {
        for i in 0..per_class {
            let values = center.iter().map(|&m| Normal::new(m, 1.0).unwrap().sample(&mut rng)).collect();
            samples.push(Sample {
                id: format!("c{c}_{i}"),
                case_id: format!("c{c}_case{}", i / 3),
                label: format!("c{c}"),
                values,
            });
        }
    }
    LabeledDataset::new(vec!["a".into(), "b".into(), "c".into()], samples).unwrap()
}

fn affine(data: &LabeledDataset<f64>, scale: [f64; 3], shift: [f64; 3]) -> LabeledDataset<f64> {
    let samples = data
        .samples()
        .iter()
        .map(|s| Sample {
            values: s.values.iter().zip(scale).zip(shift).map(|((v, a), b)| a * v + b).collect(),
            ..s.clone()
        })
        .collect();
    LabeledDataset::new(data.feature_names().to_vec(), samples).unwrap()
}

#[test]
fn loocv_is_deterministic() {
    let data = blobs(1, 12);
    let first = loocv(&data).unwrap();
    let second = loocv(&data).unwrap();
    assert_eq!(first, second);
    assert!(first.total_accuracy().unwrap() > 0.6);
}

#[test]
fn per_feature_affine_maps_do_not_change_labels() {
    let data = blobs(2, 10);
    let moved = affine(&data, [1e3, -0.01, 7.0], [-5e4, 3.0, 0.25]);
    assert_eq!(loocv(&data).unwrap().counts(), loocv(&moved).unwrap().counts());
}

#[test]
fn posteriors_normalize_and_favor_nearest_class() {
    let data = blobs(3, 15);
    let (scaler, scaled) = standardize_fit(&data);
    let model = fit(&scaled).unwrap();
    for s in data.samples().iter().take(20) {
        let p = model.predict_values(&scaler.transform(&s.values));
        assert!((p.posteriors.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert_eq!(p.label, model.classes[p.class_index]);
    }
    let centered = model.predict_values(&scaler.transform(&[2.0, 0.5, -1.0]));
    assert_eq!(centered.label, "c1");
}

#[test]
fn confusion_rows_sum_to_class_sizes() {
    let data = blobs(4, 8);
    let cm = loocv(&data).unwrap();
    for c in 0..3 {
        assert_eq!(cm.row_total(c), 8);
        assert_eq!(cm.counts()[c].iter().sum::<u64>(), 8);
    }
    assert_eq!(cm.total(), 24);
    let trace: u64 = (0..3).map(|c| cm.counts()[c][c]).sum();
    assert_eq!(cm.total_accuracy().unwrap(), trace as f64 / 24.0);
}

#[test]
fn printed_example_row_renders() {
    let classes: Vec<String> = ["class_a", "class_b", "class_c", "class_d"].map(String::from).into();
    let correct = [75u64, 66, 77, 68];
    let counts = correct
        .iter()
        .enumerate()
        .map(|(c, &k)| (0..4).map(|j| if j == c { k } else if j == (c + 1) % 4 { 80 - k } else { 0 }).collect())
        .collect();
    let cm = ConfusionMatrix::from_counts(classes, counts).unwrap();
    let (per_class, total) = cm.accuracy_row();
    assert_eq!(per_class, ["93.75", "82.50", "96.25", "85.00"]);
    assert_eq!(total, "89.38");
    let table = cm.render_table("G(E)");
    assert!(table.contains("Total Accuracy"));
    assert!(table.contains("89.38%"));
}
