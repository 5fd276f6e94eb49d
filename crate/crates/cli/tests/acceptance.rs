//! Acceptance run: one PASS/FAIL line per criterion with the measured value
//! and wall time. Exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::time::{Duration, Instant};

use texbank::config::Extractor;
use texbank::{cmd_classify, cmd_extract, cmd_synth, RunConfig, SynthRequest};
use texbank_core::classify::{fit, loocv, standardize_fit, ConfusionMatrix};
use texbank_core::fft::Fft2;
use texbank_core::fixed_res::*;
use texbank_core::gabor::*;
use texbank_core::image::{subtract_mean, GrayImage};
use texbank_core::synth::{SynthKind, SynthSpec};

type Check = Result<String, String>;

// mpmath, 40 digits
const SIGMA_X_AT_0_1: f64 = 5.621718753878327412677924;
const SIGMA_Y_AT_0_1: f64 = 4.524009886486744523463673;

const CORPUS_SEED: u64 = 2024;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn default_bank(n: usize) -> BankConfig<f64> {
    plan_bank(n, &BankParams::default()).unwrap()
}

fn noise_image(side: usize, seed: u64) -> GrayImage<f64> {
    SynthSpec::new(SynthKind::Noise, side, seed).generate().unwrap()
}

fn grating(frequency: f64, orientation: f64, side: usize) -> GrayImage<f64> {
    let kind = SynthKind::Grating { frequency, orientation, phase: 0.3, noise_sigma: 0.0 };
    SynthSpec::new(kind, side, 0).generate().unwrap()
}

fn bank_structure() -> Check {
    let t = Instant::now();
    let bank = default_bank(512);
    let elapsed = t.elapsed();
    ensure(bank.len() == 24, format!("{} filters", bank.len()))?;
    let expected: Vec<f64> = (2..=7).map(|k| f64::from(1u32 << k) * SQRT_2).collect();
    ensure(bank.radial_frequencies == expected, format!("frequencies {:?}", bank.radial_frequencies))?;
    let degrees: Vec<f64> = (0..4).map(|o| bank.orientation_degrees(o)).collect();
    ensure(degrees == [0.0, 45.0, 90.0, 135.0], format!("orientations {degrees:?}"))?;
    ensure(elapsed < Duration::from_millis(1), format!("planning took {elapsed:?}"))?;
    Ok(format!("24 filters, 4√2…128√2 x 0/45/90/135, planned in {elapsed:?}"))
}

fn envelope_sigmas() -> Check {
    let (sx, sy) = compute_envelope_sigmas(0.1, 1.0, FRAC_PI_4).map_err(|e| e.to_string())?;
    let err = (sx - SIGMA_X_AT_0_1).abs().max((sy - SIGMA_Y_AT_0_1).abs());
    ensure(err < 1e-3, format!("({sx}, {sy})"))?;
    Ok(format!("({sx:.6}, {sy:.6}) px, max |err| {err:.1e}"))
}

fn fourier_pair() -> Check {
    let n = 512;
    let bank = default_bank(n);
    let fft = Fft2::<f64>::new(n, n);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for spec in bank.filters.iter().filter(|f| f.frequency <= 64.0 * SQRT_2 / 512.0 + 1e-12) {
        let dft = fft.forward_real(&sample_impulse_response(spec, n));
        let grid = transfer_grid(spec, n);
        let peak = grid.iter().fold(0.0f64, |m, &v| m.max(v));
        let err = dft.iter().zip(&grid).map(|(c, &h)| (2.0 * c.re - h).hypot(2.0 * c.im)).fold(0.0, f64::max);
        worst = worst.max(err / peak);
        checked += 1;
    }
    ensure(checked == 20, format!("{checked} filters in range"))?;
    ensure(worst < 1e-2, format!("relative L∞ {worst:.3e}"))?;
    Ok(format!("{checked} filters, worst relative L∞ {worst:.2e}"))
}

fn parseval() -> Check {
    let n = 512;
    let filterer = GaborFilterer::new(default_bank(n));
    let fft = Fft2::<f64>::new(n, n);
    let mut worst = 0.0f64;
    for seed in 0..5 {
        let img = subtract_mean(&noise_image(n, 100 + seed));
        let spectrum = fft.forward_real(img.values());
        let spatial = filterer.energies(&img, EnergyNorm::L2).map_err(|e| e.to_string())?;
        for (i, e) in spatial.iter().enumerate() {
            let freq: f64 = spectrum.iter().zip(filterer.transfer(i)).map(|(c, &h)| (c * h).norm_sqr()).sum::<f64>()
                / ((n * n) as f64).powi(2);
            worst = worst.max((e - freq).abs() / freq);
        }
    }
    ensure(worst <= 1e-9, format!("relative error {worst:.3e}"))?;
    Ok(format!("5 images x 24 filters, worst relative error {worst:.2e}"))
}

fn selectivity() -> Check {
    let n = 512;
    let bank = default_bank(n);
    let filterer = GaborFilterer::new(bank.clone());
    let a = bank.orientation_count;
    let mut worst = f64::INFINITY;
    for i in 0..bank.len() {
        let (f, o) = bank.grid_position(i);
        let img = subtract_mean(&grating(bank.radial_frequencies[f], bank.orientations[o], n));
        let e = filterer.energies(&img, EnergyNorm::L1).map_err(|e| e.to_string())?;
        for j in 0..bank.len() {
            let (g, p) = bank.grid_position(j);
            let d_o = (o + a - p) % a;
            let adjacent = f.abs_diff(g) <= 1 && (d_o <= 1 || d_o == a - 1);
            if !adjacent {
                worst = worst.min(e[i] / e[j]);
            }
        }
    }
    ensure(worst >= 10.0, format!("smallest matched/non-adjacent ratio {worst:.2}"))?;
    Ok(format!("smallest matched/non-adjacent E1 ratio {worst:.3e}"))
}

fn orientation_permutation() -> Check {
    let n = 256;
    let bank = default_bank(n);
    let filterer = GaborFilterer::new(bank.clone());
    let a = bank.orientation_count;
    let mut worst = 0.0f64;
    let mut worst_floor = 0.0f64;
    let mut compared = 0;
    let cases = [(16.0 * SQRT_2, 0.0, 0.0), (8.0 * SQRT_2, 45.0, 0.0), (32.0, 30.0, 0.0), (45.0, 120.0, 0.0), (32.0, 60.0, 20.0)];
    for (frequency, deg, noise_sigma) in cases {
        let kind = SynthKind::Grating { frequency, orientation: f64::to_radians(deg), phase: 0.3, noise_sigma };
        let img = SynthSpec::new(kind, n, 9).generate().unwrap();
        let base = filterer.energies(&subtract_mean(&img), EnergyNorm::L1).map_err(|e| e.to_string())?;
        let turned = filterer.energies(&subtract_mean(&img.rotate_quarter()), EnergyNorm::L1).map_err(|e| e.to_string())?;
        let peak = base.iter().copied().fold(0.0, f64::max);
        for f in 0..bank.radial_frequencies.len() {
            for o in 0..a {
                let want = base[bank.filter_index(f, o)];
                let got = turned[bank.filter_index(f, (o + a / 2) % a)];
                // energies below 1e-9 of the peak are FFT round-off of an
                // analytically zero response; they are bounded absolutely
                if want >= 1e-9 * peak {
                    worst = worst.max((got - want).abs() / want);
                    compared += 1;
                } else {
                    worst_floor = worst_floor.max((got - want).abs() / peak);
                }
            }
        }
    }
    ensure(worst <= 0.01, format!("relative error {worst:.3e}"))?;
    ensure(worst_floor <= 1e-12, format!("sub-floor energies differ by {worst_floor:.3e} of peak"))?;
    Ok(format!(
        "5 gratings, {compared} resolvable energies within {worst:.2e} relative, rest within {worst_floor:.1e} of peak"
    ))
}

fn fractal_oracle() -> Check {
    let mut fds = Vec::new();
    for h in [0.2, 0.5, 0.8] {
        let img = SynthSpec::new(SynthKind::Fbm { hurst: h }, 512, 7).generate().unwrap();
        let fd = fractal_dimension(&img).map_err(|e| e.to_string())?;
        ensure((fd - (3.0 - h)).abs() <= 0.15, format!("H={h}: FD {fd:.3}"))?;
        fds.push(fd);
    }
    ensure(fds[0] > fds[1] && fds[1] > fds[2], format!("not decreasing {fds:?}"))?;
    let flat = fractal_dimension(&GrayImage::constant(64, 64, 9.0).unwrap()).map_err(|e| e.to_string())?;
    ensure(flat == 2.0, format!("constant FD {flat}"))?;
    Ok(format!("FD {:.3} / {:.3} / {:.3} for H 0.2 / 0.5 / 0.8, constant 2.0", fds[0], fds[1], fds[2]))
}

fn glcm_rlm_identities() -> Check {
    for seed in 0..100u64 {
        let side = 8 + (seed as usize % 5) * 8;
        let img = noise_image(side.next_power_of_two(), 500 + seed);
        let levels = 2 + seed as usize % 30;
        let q = quantize(&img, levels).map_err(|e| e.to_string())?;
        let m: Glcm<f64> = glcm(&q, 1, &Direction::ALL).map_err(|e| e.to_string())?;
        let sum: f64 = m.probabilities().iter().sum();
        ensure((sum - 1.0).abs() <= 1e-12, format!("seed {seed}: GLCM sum {sum}"))?;
        for i in 0..levels {
            for j in 0..i {
                ensure(m.p(i, j) == m.p(j, i), format!("seed {seed}: asymmetric at ({i},{j})"))?;
            }
        }
        for dir in Direction::ALL {
            let runs = run_length_matrix(&q, dir).weighted_run_sum();
            ensure(runs == (q.width() * q.height()) as u64, format!("seed {seed} {dir:?}: {runs} pixels"))?;
        }
    }
    Ok("100 images: sums within 1e-12, symmetric, run pixels conserved".into())
}

fn gmrf_sanity() -> Check {
    let noise = gmrf_fit(&noise_image(256, 31)).map_err(|e| e.to_string())?;
    let z = noise.interactions.iter().zip(noise.standard_errors).map(|(b, se)| b.abs() / se).fold(0.0, f64::max);
    ensure(z <= 3.0, format!("white noise max |β|/se {z:.2}"))?;
    let spec = SynthSpec::new(SynthKind::GrfTexture { interactions: [0.4, 0.0, 0.0, 0.0] }, 256, 17);
    let fit = gmrf_fit(&spec.generate().unwrap()).map_err(|e| e.to_string())?;
    let err = fit.interactions.iter().zip([0.4, 0.0, 0.0, 0.0]).map(|(b, t)| (b - t).abs()).fold(0.0, f64::max);
    ensure(err <= 0.05, format!("recovery error {err:.3} for {:?}", fit.interactions))?;
    Ok(format!("white noise max |β|/se {z:.2}; β_h = 0.4 recovered within {err:.3}"))
}

struct EndToEnd {
    gabor: ConfusionMatrix,
    fused: ConfusionMatrix,
    report: String,
    features: std::path::PathBuf,
    _dir: tempfile::TempDir,
}

fn run_corpus() -> Result<EndToEnd, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("corpus");
    cmd_synth(&SynthRequest::Corpus { seed: CORPUS_SEED, per_class: 20, side: 512 }, &corpus).map_err(|e| e.to_string())?;
    let manifest = corpus.join("manifest.csv");
    let gabor_csv = dir.path().join("gabor.csv");
    let fused_csv = dir.path().join("gabor_fd.csv");
    let config = RunConfig::default();
    cmd_extract(&manifest, &config, &gabor_csv, None).map_err(|e| e.to_string())?;
    let fused_config = RunConfig { fusion: vec![Extractor::Gabor, Extractor::Fd], ..config };
    cmd_extract(&manifest, &fused_config, &fused_csv, None).map_err(|e| e.to_string())?;
    let g = cmd_classify(&gabor_csv, &dir.path().join("gabor"), None).map_err(|e| e.to_string())?;
    let f = cmd_classify(&fused_csv, &dir.path().join("gabor_fd"), None).map_err(|e| e.to_string())?;
    Ok(EndToEnd { gabor: g.confusion, fused: f.confusion, report: g.text, features: gabor_csv, _dir: dir })
}

fn end_to_end(run: &Result<EndToEnd, String>, elapsed: Duration) -> Check {
    let run = run.as_ref().map_err(Clone::clone)?;
    ensure(elapsed <= Duration::from_secs(300), format!("pipeline took {elapsed:.2?}, limit 300s"))?;
    let g = run.gabor.total_accuracy().unwrap();
    let f = run.fused.total_accuracy().unwrap();
    ensure(run.gabor.total() == 80, format!("{} samples", run.gabor.total()))?;
    ensure(g >= 0.95, format!("Gabor-24 accuracy {:.2}%", 100.0 * g))?;
    ensure(f >= g, format!("fusion lowered accuracy {:.2}% -> {:.2}%", 100.0 * g, 100.0 * f))?;
    Ok(format!("80 images: G_f(E) {:.2}%, G_f(E & FD) {:.2}%", 100.0 * g, 100.0 * f))
}

fn classifier_identities(run: &Result<EndToEnd, String>) -> Check {
    let run = run.as_ref().map_err(Clone::clone)?;
    let data = texbank::FeatureTable::read(&run.features)
        .and_then(|t| t.into_dataset())
        .map_err(|e| e.to_string())?;
    for cm in [&run.gabor, &run.fused] {
        let k = cm.classes().len();
        let trace: u64 = (0..k).map(|c| cm.counts()[c][c]).sum();
        ensure(cm.correct() == trace, "correct != trace")?;
        ensure(cm.total_accuracy() == Some(trace as f64 / cm.total() as f64), "accuracy != trace/total")?;
        for c in 0..k {
            ensure(cm.row_total(c) == 20 && cm.counts()[c].iter().sum::<u64>() == 20, "row sum")?;
        }
    }
    let (scaler, scaled) = standardize_fit(&data);
    let model = fit(&scaled).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for s in data.samples() {
        let p = model.predict_values(&scaler.transform(&s.values));
        worst = worst.max((p.posteriors.iter().sum::<f64>() - 1.0).abs());
    }
    ensure(worst <= 1e-12, format!("posterior sum off by {worst:.2e}"))?;
    let first = loocv(&data).map_err(|e| e.to_string())?;
    let second = loocv(&data).map_err(|e| e.to_string())?;
    ensure(first == second && first == run.gabor, "LOOCV not deterministic")?;
    Ok(format!("trace/total and row sums exact, posterior sums within {worst:.1e}, LOOCV repeatable"))
}

fn report_format(run: &Result<EndToEnd, String>) -> Check {
    let classes: Vec<String> =
        ["class_a", "class_b", "class_c", "class_d"].iter().map(|s| s.to_string()).collect();
    let correct = [75u64, 66, 77, 68];
    let counts = correct
        .iter()
        .enumerate()
        .map(|(c, &k)| (0..4).map(|j| if j == c { k } else if j == (c + 1) % 4 { 80 - k } else { 0 }).collect())
        .collect();
    let cm = ConfusionMatrix::from_counts(classes, counts).map_err(|e| e.to_string())?;
    let table = cm.render_table("G_f(E)");
    let row = table.lines().nth(1).unwrap_or("");
    let cells: Vec<&str> = row.split_whitespace().collect();
    ensure(cells[1..] == ["93.75", "82.50", "96.25", "85.00", "89.38%"], format!("row `{row}`"))?;
    let header = table.lines().next().unwrap_or("");
    ensure(header.starts_with("Configuration") && header.ends_with("Total Accuracy"), format!("header `{header}`"))?;

    let run = run.as_ref().map_err(Clone::clone)?;
    let first = run.report.lines().next().unwrap_or("");
    ensure(first.split_whitespace().count() == 1 + 4 + 2, format!("corpus report header `{first}`"))?;
    Ok("93.75 82.50 96.25 85.00 -> 89.38%; corpus report has 4 class columns + total".into())
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, name: &str, budget: Option<Duration>, f: &mut dyn FnMut() -> Check| {
        let t = Instant::now();
        let mut outcome = f();
        let elapsed = t.elapsed();
        if let (Ok(detail), Some(limit)) = (&outcome, budget) {
            if elapsed > limit {
                outcome = Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        let limit = budget.map(|b| format!(" / limit {b:?}")).unwrap_or_default();
        match outcome {
            Ok(detail) => println!("PASS {n:>2} {name}: {detail} [{elapsed:.2?}{limit}]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {n:>2} {name}: {detail} [{elapsed:.2?}{limit}]");
            }
        }
    };
    let secs = |s| Some(Duration::from_secs(s));

    report(1, "bank structure", None, &mut bank_structure);
    report(2, "envelope sigmas", None, &mut envelope_sigmas);
    report(3, "Fourier pair", secs(10), &mut fourier_pair);
    report(4, "Parseval", secs(30), &mut parseval);
    report(5, "selectivity", secs(60), &mut selectivity);
    report(6, "orientation permutation", None, &mut orientation_permutation);
    report(7, "fractal dimension oracle", secs(20), &mut fractal_oracle);
    report(8, "GLCM/RLM identities", None, &mut glcm_rlm_identities);
    report(9, "GMRF sanity", None, &mut gmrf_sanity);
    let t = Instant::now();
    let run = run_corpus();
    let corpus_time = t.elapsed();
    report(10, "end-to-end corpus", None, &mut || {
        end_to_end(&run, corpus_time).map(|d| format!("{d}, synth+extract+classify {corpus_time:.2?}"))
    });
    report(11, "classifier identities", None, &mut || classifier_identities(&run));
    report(12, "report format", None, &mut || report_format(&run));

    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
