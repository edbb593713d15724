//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line (run with `--nocapture` to see them on success).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uaqa_core::eval;
use uaqa_core::image::{BinaryMask, GrayImage, Point, RasterImage};
use uaqa_core::inpaint;
use uaqa_core::loss::{
    faster_rcnn_loss, total_loss, total_loss_gradient, LossConfig, RoiBatch, RoiPrediction,
    RoiTruth,
};
use uaqa_core::probe::{self, GateCandidate, ProbeConfig, ProbeError, ProbeLocation};
use uaqa_core::spectrum::{self, Clarity, SpectrumConfig};
use uaqa_core::synth::{gen_detection_scene, gen_spectrum, gen_wedge, SpectrumSpec, WedgeSpec};
use uaqa_core::walker::{self, SeedPolicy};

fn report(name: &str, failures: Vec<String>) {
    let verdict = if failures.is_empty() { "pass" } else { "fail" };
    println!("acceptance: {name} ... {verdict}");
    if !failures.is_empty() {
        for f in &failures {
            eprintln!("  {f}");
        }
        panic!("{name}: {} check(s) failed", failures.len());
    }
}

// ---------------------------------------------------------------- loss math

fn random_batch(rng: &mut ChaCha8Rng) -> (RoiBatch, LossConfig) {
    let n = rng.gen_range(1..=6);
    let mut preds = Vec::with_capacity(n);
    let mut truths = Vec::with_capacity(n);
    // residuals sampled away from the smooth-L1 kink so that both the
    // analytic gradient and the finite-difference stencil stay one-sided
    let resid = |rng: &mut ChaCha8Rng| -> f64 {
        loop {
            let r: f64 = rng.gen_range(-3.0..3.0);
            if (r.abs() - 1.0).abs() > 1e-3 {
                return r;
            }
        }
    };
    for _ in 0..n {
        let p_star = u8::from(rng.gen_bool(0.5));
        let t_star = [0.0; 4].map(|_| rng.gen_range(-2.0..2.0));
        let a_star = rng.gen_range(0.0..180.0);
        let t = [0, 1, 2, 3].map(|k| t_star[k] + resid(rng));
        let a = a_star + resid(rng);
        preds.push(RoiPrediction {
            p: rng.gen_range(0.05..0.95),
            t,
            a,
        });
        truths.push(RoiTruth { p_star, t_star, a_star });
    }
    let cfg = LossConfig {
        lambda: rng.gen_range(0.5..2.0),
        mu: rng.gen_range(0.0..20.0),
        n_cls: rng.gen_range(1..=8),
        n_reg: rng.gen_range(1..=8),
    };
    (RoiBatch::new(preds, truths).unwrap(), cfg)
}

#[test]
fn criterion_loss_math() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let h = 1e-5;
    let rel = |a: f64, f: f64| (a - f).abs() / a.abs().max(1.0);

    for batch_idx in 0..200 {
        let (batch, cfg) = random_batch(&mut rng);
        let grad = match total_loss_gradient(&batch, &cfg) {
            Ok(g) => g,
            Err(e) => {
                failures.push(format!("batch {batch_idx}: gradient errored: {e}"));
                continue;
            }
        };
        for i in 0..batch.predictions.len() {
            let mut check = |analytic: f64, perturb: &dyn Fn(&mut RoiBatch, f64), what: &str| {
                let mut plus = batch.clone();
                perturb(&mut plus, h);
                let mut minus = batch.clone();
                perturb(&mut minus, -h);
                let fd = (total_loss(&plus, &cfg).unwrap() - total_loss(&minus, &cfg).unwrap())
                    / (2.0 * h);
                if rel(analytic, fd) >= 1e-5 {
                    failures.push(format!(
                        "batch {batch_idx} roi {i} {what}: analytic {analytic} vs fd {fd}"
                    ));
                }
            };
            check(grad.d_p[i], &|b, d| b.predictions[i].p += d, "d_p");
            for k in 0..4 {
                check(grad.d_t[i][k], &|b, d| b.predictions[i].t[k] += d, "d_t");
            }
            check(grad.d_a[i], &|b, d| b.predictions[i].a += d, "d_a");
        }
    }

    // hand-computed fixtures
    let single = |p, p_star, t: [f64; 4], a| {
        RoiBatch::new(
            vec![RoiPrediction { p, t, a }],
            vec![RoiTruth {
                p_star,
                t_star: [0.0; 4],
                a_star: 0.0,
            }],
        )
        .unwrap()
    };
    let cfg = LossConfig::default();
    let fixtures = [
        // (batch, expected total loss)
        (single(0.5, 1, [0.5, 0.0, 0.0, 0.0], 0.0), std::f64::consts::LN_2 + 0.125),
        (single(0.5, 1, [0.0; 4], 3.0), std::f64::consts::LN_2 + 25.0),
        (single(1.0, 1, [0.0; 4], 0.0), 0.0),
    ];
    for (i, (b, expect)) in fixtures.iter().enumerate() {
        let v = total_loss(b, &cfg).unwrap();
        if (v - expect).abs() > 1e-12 {
            failures.push(format!("hand fixture {i}: {v} vs {expect}"));
        }
    }

    // μ = 0 reduces the full objective to the two-term base loss exactly
    for _ in 0..50 {
        let (batch, mut cfg) = random_batch(&mut rng);
        cfg.mu = 0.0;
        if total_loss(&batch, &cfg).unwrap() != faster_rcnn_loss(&batch, &cfg).unwrap() {
            failures.push("mu=0 reduction not bit-exact".into());
            break;
        }
    }

    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 5.0 {
        failures.push(format!("runtime {elapsed:?} exceeds 5 s"));
    }
    report("loss gradients vs finite differences", failures);
}

// ------------------------------------------------------- probe localization

fn wedge_specs() -> Vec<WedgeSpec> {
    (0..50)
        .map(|i| WedgeSpec {
            apex: Point::new(
                150.0 + (i * 17 % 120) as f64,
                -80.0 + (i * 11 % 60) as f64,
            ),
            half_angle_deg: 15.0 + 30.0 * i as f64 / 49.0,
            radii: (60.0, 240.0),
            image_size: (420, 320),
            noise_salt_prob: 0.0,
            edge_thickness: 11.0,
            draw_arcs: i % 2 == 0,
            seed: i as u64,
        })
        .collect()
}

#[test]
fn criterion_probe_localization() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let cfg = ProbeConfig::default();

    for (i, spec) in wedge_specs().into_iter().enumerate() {
        let (img, truth) = gen_wedge(&spec).unwrap();
        match probe::locate_probe(&img, &cfg) {
            Ok(loc) => {
                let err = loc.apex.distance(&truth.apex);
                if err > 3.0 {
                    failures.push(format!("wedge {i}: noiseless apex error {err:.2} px"));
                }
                if spec.draw_arcs && !loc.verified {
                    failures.push(format!("wedge {i}: arcs drawn but not verified"));
                }
            }
            Err(e) => failures.push(format!("wedge {i}: noiseless failed: {e}")),
        }

        let salted = WedgeSpec {
            noise_salt_prob: 0.01,
            ..spec
        };
        let (img, truth) = gen_wedge(&salted).unwrap();
        match probe::locate_probe(&img, &cfg) {
            Ok(loc) => {
                let err = loc.apex.distance(&truth.apex);
                if err > 10.0 {
                    failures.push(format!("wedge {i}: salted apex error {err:.2} px"));
                }
            }
            Err(e) => failures.push(format!("wedge {i}: salted failed: {e}")),
        }
    }

    // rectangular (linear-probe) box: the two dominant edges are parallel
    let mut rect = RasterImage::filled(320, 120, 3, 10);
    for x in 20..300usize {
        for t in 0..7usize {
            rect.pixel_mut(x, 20 + t).copy_from_slice(&[0, 220, 0]);
            rect.pixel_mut(x, 94 + t).copy_from_slice(&[0, 220, 0]);
        }
    }
    match probe::locate_probe(&rect, &cfg) {
        Err(ProbeError::DegenerateIntersection) => {}
        other => failures.push(format!("rectangle: expected degenerate intersection, got {other:?}")),
    }

    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 60.0 {
        failures.push(format!("runtime {elapsed:?} exceeds 60 s"));
    }
    report("probe apex localization on synthetic wedges", failures);
}

// --------------------------------------------------------- insonation angle

fn probe_at(x: f64, y: f64) -> ProbeLocation {
    use uaqa_core::hough::PolarLine;
    ProbeLocation {
        apex: Point::new(x, y),
        edge_lines: [
            PolarLine { rho: 0.0, theta: 0.0 },
            PolarLine {
                rho: 0.0,
                theta: std::f64::consts::FRAC_PI_2,
            },
        ],
        verified: true,
        arcs: vec![],
    }
}

fn gate_at(c: Point, angle_deg: f64) -> GateCandidate {
    GateCandidate {
        box_min: Point::new(c.x - 8.0, c.y - 8.0),
        box_max: Point::new(c.x + 8.0, c.y + 8.0),
        vessel_angle_deg: angle_deg,
        score: 1.0,
    }
}

#[test]
fn criterion_insonation_angle() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(303);

    // collinear configurations: gate centroid displaced from the apex along
    // the vessel direction itself
    for i in 0..100 {
        let apex = Point::new(rng.gen_range(-200.0..800.0), rng.gen_range(-400.0..200.0));
        let angle: f64 = rng.gen_range(0.0..180.0);
        let dist = rng.gen_range(40.0..600.0);
        let (s, c) = angle.to_radians().sin_cos();
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let centroid = Point::new(apex.x + sign * dist * c, apex.y + sign * dist * s);
        let r = probe::insonation_angle(&probe_at(apex.x, apex.y), &gate_at(centroid, angle)).unwrap();
        if r.angle_deg.abs() > 1e-6 {
            failures.push(format!("collinear config {i}: angle {}", r.angle_deg));
        }
    }

    // arbitrary configurations: range and 180° vessel-flip invariance
    for i in 0..100 {
        let apex = Point::new(rng.gen_range(-200.0..800.0), rng.gen_range(-400.0..200.0));
        let centroid = Point::new(rng.gen_range(0.0..600.0), rng.gen_range(0.0..600.0));
        if centroid.distance(&apex) < 1.0 {
            continue;
        }
        let angle = rng.gen_range(0.0..180.0);
        let p = probe_at(apex.x, apex.y);
        let r1 = probe::insonation_angle(&p, &gate_at(centroid, angle)).unwrap();
        let r2 = probe::insonation_angle(&p, &gate_at(centroid, angle + 180.0)).unwrap();
        if !(0.0..=90.0).contains(&r1.angle_deg) {
            failures.push(format!("config {i}: angle {} outside [0,90]", r1.angle_deg));
        }
        if (r1.angle_deg - r2.angle_deg).abs() > 1e-9 {
            failures.push(format!(
                "config {i}: flip changed angle by {}",
                (r1.angle_deg - r2.angle_deg).abs()
            ));
        }
        let norm = (r1.beam_vector[0].powi(2) + r1.beam_vector[1].powi(2)).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            failures.push(format!("config {i}: beam vector norm {norm}"));
        }
    }

    report("insonation angle properties", failures);
}

// --------------------------------------------------------------- inpainting

#[test]
fn criterion_inpainting() {
    let mut failures = Vec::new();

    let (w, h) = (48, 36);
    let mut hole = BinaryMask::new(w, h);
    for y in 10..24 {
        for x in 14..34 {
            hole.set(x, y, true);
        }
    }

    // constant field restored exactly
    let mut constant = GrayImage::zeros(w, h);
    constant.data.fill(0.37);
    let restored = inpaint::inpaint_biharmonic(&constant, &hole).unwrap();
    let worst = restored
        .data
        .iter()
        .map(|v| (v - 0.37).abs())
        .fold(0.0f64, f64::max);
    if worst > 1e-6 {
        failures.push(format!("constant restoration error {worst:e}"));
    }

    // linear ramp restored inside an interior hole
    let mut ramp = GrayImage::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            ramp.set(x, y, 0.1 + 0.01 * x as f64 + 0.008 * y as f64);
        }
    }
    let restored = inpaint::inpaint_biharmonic(&ramp, &hole).unwrap();
    let mut worst = 0.0f64;
    for y in 0..h {
        for x in 0..w {
            if hole.get(x, y) {
                worst = worst.max((restored.get(x, y) - ramp.get(x, y)).abs());
            } else if restored.get(x, y).to_bits() != ramp.get(x, y).to_bits() {
                failures.push(format!("unmasked pixel ({x},{y}) changed"));
            }
        }
    }
    if worst > 1e-3 {
        failures.push(format!("ramp restoration error {worst:e}"));
    }

    report("biharmonic inpainting restoration", failures);
}

// ------------------------------------------------------------ random walker

#[test]
fn criterion_random_walker() {
    let mut failures = Vec::new();
    let (w, h) = (40, 28);
    let mut gray = GrayImage::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            gray.set(x, y, if x < w / 2 { 0.62 } else { 0.38 });
        }
    }
    let mut fg = BinaryMask::new(w, h);
    fg.set(3, h / 2, true);
    let mut bg = BinaryMask::new(w, h);
    bg.set(w - 4, h / 2, true);

    let fwd = walker::random_walker(&gray, walker::DEFAULT_BETA, &fg, &bg).unwrap();
    // oracle: threshold the piecewise-constant image itself
    let mut inter = 0usize;
    let mut total = 0usize;
    for y in 0..h {
        for x in 0..w {
            let oracle = x < w / 2;
            if oracle {
                total += 1;
            }
            if fwd.mask.get(x, y) {
                total += 1;
                if oracle {
                    inter += 1;
                }
            }
        }
    }
    let dice = 2.0 * inter as f64 / total as f64;
    if dice <= 0.99 {
        failures.push(format!("Dice {dice:.4} not above 0.99"));
    }

    let rev = walker::random_walker(&gray, walker::DEFAULT_BETA, &bg, &fg).unwrap();
    let worst = (0..w * h)
        .map(|i| (fwd.probability[i] + rev.probability[i] - 1.0).abs())
        .fold(0.0f64, f64::max);
    if worst > 1e-5 {
        failures.push(format!("class probabilities sum violation {worst:e}"));
    }
    for &p in &fwd.probability {
        if !(0.0..=1.0 + 1e-9).contains(&p) {
            failures.push(format!("probability {p} outside [0,1]"));
            break;
        }
    }

    report("random walker vs threshold oracle", failures);
}

// ------------------------------------------------------ spectrum end-to-end

#[test]
fn criterion_spectrum_end_to_end() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let axis_row = 80usize;
    let cfg = SpectrumConfig {
        // generated lobes span the full intensity range down to 0.25, which
        // the default foreground-seed threshold would miss
        seed_policy: SeedPolicy {
            fg_min_gray: 0.2,
            ..SeedPolicy::default()
        },
        min_peak_distance: 40,
        ..SpectrumConfig::default()
    };
    // intensities at least 0.05 from both clarity thresholds (0.56 / 0.36)
    let intensities = [0.8, 0.45, 0.25, 0.8, 0.8];

    for k in 2..=12usize {
        let heights: Vec<f64> = (0..k)
            .map(|j| {
                if k == 2 {
                    0.6 * axis_row as f64 // keep every lobe below 75 %
                } else {
                    axis_row as f64 * if j % 2 == 0 { 0.62 } else { 0.85 }
                }
            })
            .collect();
        let intensity: Vec<f64> = (0..k).map(|j| intensities[j % intensities.len()]).collect();
        let spec = SpectrumSpec {
            n_waveforms: k,
            period: 60,
            peak_heights: heights.clone(),
            axis_row,
            intensity: intensity.clone(),
            noise_sigma: 0.02,
            overlay_lines: Vec::new(),
            seed: 1000 + k as u64,
        };
        let (img, truth) = gen_spectrum(&spec).unwrap();
        let analysis = match spectrum::assess(&img, &cfg) {
            Ok(a) => a,
            Err(e) => {
                failures.push(format!("K={k}: assess failed: {e}"));
                continue;
            }
        };
        let verdict = &analysis.verdict;
        if verdict.n_waveforms != k {
            failures.push(format!("K={k}: detected {} waveforms", verdict.n_waveforms));
            continue;
        }
        for (j, wf) in verdict.waveforms.iter().enumerate() {
            if wf.clarity != truth.clarity[j] {
                failures.push(format!(
                    "K={k} waveform {j}: clarity {:?} vs generated {:?} (intensity {})",
                    wf.clarity, truth.clarity[j], intensity[j]
                ));
            }
            let truth_pct = 100.0 * truth.heights_px[j] / axis_row as f64;
            if (wf.height_pct - truth_pct).abs() > 2.0 {
                failures.push(format!(
                    "K={k} waveform {j}: height {:.2}% vs generated {:.2}%",
                    wf.height_pct, truth_pct
                ));
            }
        }
        // verdict booleans recomputed from ground truth alone
        let sweep_expect = (3..=10).contains(&k);
        let range_expect = truth
            .heights_px
            .iter()
            .any(|&hp| 100.0 * hp / axis_row as f64 > 75.0);
        let mut best_run = 0usize;
        let mut run = 0usize;
        for &c in &truth.clarity {
            run = if c != Clarity::Poor { run + 1 } else { 0 };
            best_run = best_run.max(run);
        }
        let clarity_expect = best_run >= 3;
        if verdict.sweep_pass != sweep_expect
            || verdict.range_pass != range_expect
            || verdict.clarity_pass != clarity_expect
        {
            failures.push(format!(
                "K={k}: verdict (sweep {}, range {}, clarity {}) vs truth ({}, {}, {})",
                verdict.sweep_pass,
                verdict.range_pass,
                verdict.clarity_pass,
                sweep_expect,
                range_expect,
                clarity_expect
            ));
        }
    }

    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 120.0 {
        failures.push(format!("runtime {elapsed:?} exceeds 120 s"));
    }
    report("spectrum pipeline on generated panels", failures);
}

// ------------------------------------------------------------- eval harness

/// Independent oracle: full distance table, minimum by (distance, index).
fn oracle_match(gts: &[GateCandidate], preds: &[GateCandidate]) -> Vec<(usize, usize, f64)> {
    let mut pairs = Vec::new();
    for (gi, gt) in gts.iter().enumerate() {
        let table: Vec<(f64, usize)> = preds
            .iter()
            .enumerate()
            .map(|(pi, p)| (gt.centroid().distance(&p.centroid()), pi))
            .collect();
        if let Some(&(d, pi)) = table
            .iter()
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)))
        {
            pairs.push((gi, pi, d));
        }
    }
    pairs
}

#[test]
fn criterion_eval_harness() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let grid = [0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0];

    for i in 0..10_000 {
        let n_gt = rng.gen_range(1..=8);
        let n_pred = rng.gen_range(0..=8);
        let mut make = |n: usize| -> Vec<GateCandidate> {
            (0..n)
                .map(|_| {
                    gate_at(
                        Point::new(rng.gen_range(0.0..500.0), rng.gen_range(0.0..500.0)),
                        rng.gen_range(0.0..180.0),
                    )
                })
                .collect()
        };
        let gts = make(n_gt);
        let preds = make(n_pred);
        let ms = eval::match_candidates(&gts, &preds);
        let oracle = oracle_match(&gts, &preds);
        if ms.pairs != oracle {
            failures.push(format!("instance {i}: match set diverges from oracle"));
            break;
        }
        let mut prev = -1.0;
        for &n in &grid {
            let s = eval::sensitivity(&ms, gts.len(), n).unwrap();
            if s < prev {
                failures.push(format!("instance {i}: sensitivity not monotone at n={n}"));
                break;
            }
            prev = s;
        }
    }

    // exact-displacement fixtures: sensitivity steps from 0 to 100 at the
    // jitter radius, and the angle error is exactly zero above the step
    for &radius in &[3.0, 7.0, 15.0] {
        let (gts, preds) = gen_detection_scene(50, radius, 0.0, 42);
        let curve =
            eval::sweep(&gts, &preds, &[radius - 0.5, radius + 0.5], false).unwrap();
        if curve.sensitivity != vec![0.0, 100.0] {
            failures.push(format!(
                "jitter {radius}: sensitivity {:?} not the predicted step",
                curve.sensitivity
            ));
        }
        if curve.mean_angle_err != vec![None, Some(0.0)] {
            failures.push(format!(
                "jitter {radius}: angle-error column {:?}",
                curve.mean_angle_err
            ));
        }
    }

    report("evaluation matching vs exhaustive oracle", failures);
}
