use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use texbank_core::fixed_res::*;
use texbank_core::image::GrayImage;
use texbank_core::synth::{fbm_field, SynthKind, SynthSpec};

fn fbm(hurst: f64, seed: u64) -> GrayImage<f64> {
    SynthSpec::new(SynthKind::Fbm { hurst }, 512, seed).generate().unwrap()
}

fn random_image(rng: &mut ChaCha8Rng) -> GrayImage<f64> {
    let w = rng.random_range(2..40);
    let h = rng.random_range(2..40);
    GrayImage::from_fn(w, h, |_, _| rng.random_range(0.0..255.0)).unwrap()
}

#[test]
fn fbm_dimension_tracks_hurst() {
    for seed in [7u64, 8] {
        let fds: Vec<f64> =
            [0.2, 0.5, 0.8].iter().map(|&h| fractal_dimension(&fbm(h, seed)).unwrap()).collect();
        for (fd, h) in fds.iter().zip([0.2, 0.5, 0.8]) {
            assert!((fd - (3.0 - h)).abs() <= 0.15, "seed {seed} H {h}: {fd}");
        }
        assert!(fds[0] > fds[1] && fds[1] > fds[2], "{fds:?}");
    }
}

#[test]
fn box_counting_is_monotone_and_bounded() {
    let fds: Vec<f64> = [0.2, 0.5, 0.8]
        .iter()
        .map(|&h| fractal_dimension_with(&fbm(h, 3), FdEstimator::BoxCounting).unwrap())
        .collect();
    assert!(fds[0] > fds[1] && fds[1] > fds[2], "{fds:?}");
    assert!(fds.iter().all(|fd| (2.0..=3.0).contains(fd)));
}

#[test]
fn rougher_surfaces_have_larger_increments() {
    let roughness = |img: &GrayImage<f64>| {
        let n = img.width();
        let mut acc = 0.0;
        for y in 0..n {
            for x in 0..n - 1 {
                acc += (img.get(x + 1, y) - img.get(x, y)).abs();
            }
        }
        acc / (n * (n - 1)) as f64
    };
    assert!(roughness(&fbm(0.8, 11)) < roughness(&fbm(0.2, 11)));
}

#[test]
fn fbm_field_is_real() {
    for h in [0.2, 0.5, 0.8] {
        let (_, residue) = fbm_field(h, 256, 5).unwrap();
        assert!(residue < 1e-9, "{residue}");
    }
}

#[test]
fn gmrf_on_white_noise_is_near_zero() {
    for seed in 0..5u64 {
        let img = SynthSpec::new(SynthKind::Noise, 256, seed).generate().unwrap();
        let fit = gmrf_fit(&img).unwrap();
        for (b, se) in fit.interactions.iter().zip(fit.standard_errors) {
            assert!(b.abs() <= 3.0 * se, "seed {seed}: {b} vs se {se}");
        }
        assert!((fit.residual_variance - 1.0).abs() < 0.05);
    }
}

#[test]
fn gmrf_recovers_known_interaction() {
    let spec = SynthSpec::new(SynthKind::GrfTexture { interactions: [0.4, 0.0, 0.0, 0.0] }, 256, 17);
    let fit = gmrf_fit(&spec.generate().unwrap()).unwrap();
    let [bh, bv, bd1, bd2] = fit.interactions;
    assert!((bh - 0.4).abs() <= 0.05, "{bh}");
    for b in [bv, bd1, bd2] {
        assert!(b.abs() <= 0.05, "{b}");
    }
}

#[test]
fn glcm_identities_on_random_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let img = random_image(&mut rng);
        let levels = rng.random_range(2..20);
        let q = quantize(&img, levels).unwrap();
        let distance = 1;
        let m: Glcm<f64> = glcm(&q, distance, &Direction::ALL).unwrap();
        let sum: f64 = m.probabilities().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12);
        for i in 0..levels {
            for j in 0..levels {
                assert_eq!(m.p(i, j), m.p(j, i));
            }
        }
        // both orders of every in-bounds pair, in each direction
        let (w, h) = (q.width() as u64, q.height() as u64);
        let expected = 2 * (h * (w - 1) + (w - 1) * (h - 1) + w * (h - 1) + (w - 1) * (h - 1));
        assert_eq!(m.pair_count(), expected);
    }
}

#[test]
fn run_lengths_conserve_pixels_on_random_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..100 {
        let img = random_image(&mut rng);
        let q = quantize(&img, rng.random_range(2..6)).unwrap();
        let pixels = (q.width() * q.height()) as u64;
        for dir in Direction::ALL {
            let m = run_length_matrix(&q, dir);
            assert_eq!(m.weighted_run_sum(), pixels, "{dir:?}");
            let by_cell: u64 = (0..m.levels())
                .flat_map(|g| (1..=m.max_run()).map(move |l| (g, l)))
                .map(|(g, l)| l as u64 * m.count(g, l))
                .sum();
            assert_eq!(by_cell, pixels);
        }
        let f = rlm_features::<f64>(&q, &Direction::ALL).unwrap();
        let rp = f.get("rlm_rp").unwrap();
        assert!(rp > 0.0 && rp <= 1.0);
    }
}
