//! Pulsed-Doppler spectrum quality assessment: confounder removal, spectrum
//! segmentation, envelope extraction, waveform identification, and the
//! quantitative ISUOG verdicts (clarity, sweep speed, dynamic range).

use thiserror::Error;

use crate::image::{BinaryMask, GrayImage, ImageError, RasterImage};
use crate::inpaint::{self, InpaintError};
use crate::smooth::gaussian_smooth_1d;
use crate::solver::SolveError;
use crate::walker::{self, SeedPolicy, WalkerError};

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("no near-horizontal axis line found")]
    AxisNotFound,
    #[error("waveform spans zero foreground pixels")]
    EmptyWaveform,
    #[error(transparent)]
    Walker(#[from] WalkerError),
    #[error(transparent)]
    Inpaint(#[from] InpaintError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// All tunables of the spectrum pipeline.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Channel-std threshold flagging colored overlay pixels, on [0,1].
    pub overlay_std_threshold: f64,
    /// Dilation applied to the overlay mask to cover anti-aliased fringes.
    pub overlay_dilation: usize,
    pub beta: f64,
    pub seed_policy: SeedPolicy,
    /// Minimum gray level counted as axis-line evidence.
    pub axis_bright_min: f64,
    /// Axis vote floor as a fraction of the image width.
    pub axis_vote_frac: f64,
    /// Envelope smoothing sigma in columns.
    pub envelope_sigma: f64,
    /// Minimum distance between detected peaks (and between valleys).
    pub min_peak_distance: usize,
    /// (good, poor) mean-intensity thresholds.
    pub clarity_thresholds: (f64, f64),
    /// Mean intensity over mask-foreground pixels only (true) or over all
    /// pixels in the waveform's columns above the axis (false).
    pub intensity_foreground_only: bool,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            overlay_std_threshold: 12.0 / 255.0,
            overlay_dilation: 2,
            beta: walker::DEFAULT_BETA,
            seed_policy: SeedPolicy::default(),
            axis_bright_min: 0.9,
            axis_vote_frac: 0.3,
            envelope_sigma: 8.0,
            min_peak_distance: 70,
            clarity_thresholds: (0.56, 0.36),
            intensity_foreground_only: true,
        }
    }
}

/// Per-column upper boundary of the segmented spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    /// Smallest foreground row per column; `axis_y` for empty columns.
    pub top_y: Vec<f64>,
    pub axis_y: usize,
    /// `axis_y - top_y`, in pixels, >= 0.
    pub velocity: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clarity {
    Good,
    Moderate,
    Poor,
}

/// One cardiac cycle: valley → peak → valley.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Waveform {
    pub start_col: usize,
    pub peak_col: usize,
    pub end_col: usize,
    pub mean_intensity: f64,
    pub clarity: Clarity,
    /// Peak height as percent of the positive y-axis (axis row to panel top).
    pub height_pct: f64,
}

/// ISUOG verdict booleans plus the scored waveforms behind them.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QaVerdict {
    pub n_waveforms: usize,
    pub clarity_pass: bool,
    pub sweep_pass: bool,
    pub range_pass: bool,
    pub waveforms: Vec<Waveform>,
}

/// Everything the pipeline produced for one image, for reporting and overlay
/// rendering.
#[derive(Debug, Clone)]
pub struct SpectrumAnalysis {
    pub axis_y: usize,
    pub mask: BinaryMask,
    pub envelope: Envelope,
    pub peaks: Vec<usize>,
    pub valleys: Vec<usize>,
    pub verdict: QaVerdict,
}

/// Mask of colored (non-gray) pixels: channel standard deviation above the
/// threshold, dilated to cover anti-aliased fringes.
pub fn detect_overlays(
    raster: &RasterImage,
    std_threshold: f64,
    dilation: usize,
) -> Result<BinaryMask, SpectrumError> {
    if raster.channels != 3 {
        return Err(ImageError::ChannelMismatch {
            expected: 3,
            got: raster.channels,
        }
        .into());
    }
    let mut mask = BinaryMask::new(raster.width, raster.height);
    for (i, bit) in mask.bits.iter_mut().enumerate() {
        let p = &raster.data[i * 3..i * 3 + 3];
        let (r, g, b) = (p[0] as f64, p[1] as f64, p[2] as f64);
        let mean = (r + g + b) / 3.0;
        let var = ((r - mean).powi(2) + (g - mean).powi(2) + (b - mean).powi(2)) / 3.0;
        *bit = var.sqrt() / 255.0 > std_threshold;
    }
    Ok(mask.dilate(dilation))
}

/// Row of the strongest near-horizontal bright line (θ within ±2° of
/// horizontal), evaluated at the image's center column.
pub fn detect_x_axis(gray: &GrayImage, cfg: &SpectrumConfig) -> Result<usize, SpectrumError> {
    let (w, h) = (gray.width, gray.height);
    let diag = ((w * w + h * h) as f64).sqrt();
    // θ from 88° to 92° in 0.5° steps
    let thetas: Vec<f64> = (0..=8).map(|k| (88.0 + 0.5 * k as f64).to_radians()).collect();
    let n_rho = 2 * diag.ceil() as usize + 1;
    let mut acc = vec![0u32; thetas.len() * n_rho];
    for y in 0..h {
        for x in 0..w {
            if gray.get(x, y) < cfg.axis_bright_min {
                continue;
            }
            for (t, th) in thetas.iter().enumerate() {
                let rho = x as f64 * th.cos() + y as f64 * th.sin();
                let r = (rho + diag).round() as usize;
                if r < n_rho {
                    acc[t * n_rho + r] += 1;
                }
            }
        }
    }
    let floor = ((cfg.axis_vote_frac * w as f64) as u32).max(1);
    let mut best: Option<(usize, u32)> = None;
    for (i, &v) in acc.iter().enumerate() {
        if v >= floor && best.is_none_or(|(_, bv)| v > bv) {
            best = Some((i, v));
        }
    }
    let (idx, _) = best.ok_or(SpectrumError::AxisNotFound)?;
    let (t, r) = (idx / n_rho, idx % n_rho);
    let theta = thetas[t];
    let rho = r as f64 - diag;
    let xc = w as f64 / 2.0;
    let row = (rho - xc * theta.cos()) / theta.sin();
    if row < 0.0 || row >= h as f64 {
        return Err(SpectrumError::AxisNotFound);
    }
    Ok(row.round() as usize)
}

/// Clear every row below the axis and fill interior holes above it
/// (background components not reaching the image border).
pub fn clean_with_axis(mask: &BinaryMask, axis_y: usize) -> BinaryMask {
    assert!(axis_y < mask.height);
    let mut out = mask.clone();
    for y in axis_y + 1..out.height {
        for x in 0..out.width {
            out.set(x, y, false);
        }
    }
    let reachable = out.background_reachable_from_border();
    for y in 0..axis_y {
        for x in 0..out.width {
            if !out.get(x, y) && !reachable.get(x, y) {
                out.set(x, y, true);
            }
        }
    }
    out
}

/// Per-column envelope of a cleaned mask. Columns without foreground get
/// velocity 0.
pub fn extract_envelope(mask: &BinaryMask, axis_y: usize) -> Envelope {
    let w = mask.width;
    let mut top_y = vec![axis_y as f64; w];
    let mut velocity = vec![0.0; w];
    for x in 0..w {
        for y in 0..=axis_y.min(mask.height - 1) {
            if mask.get(x, y) {
                top_y[x] = y as f64;
                velocity[x] = axis_y as f64 - y as f64;
                break;
            }
        }
    }
    Envelope {
        top_y,
        axis_y,
        velocity,
    }
}

/// Local maxima/minima of the Gaussian-smoothed velocity, each class forced
/// `min_distance` apart (the more extreme sample wins a conflict, ties keep
/// the leftmost), then cleaned so peaks and valleys strictly alternate.
pub fn detect_peaks_valleys(
    env: &Envelope,
    sigma: f64,
    min_distance: usize,
) -> (Vec<usize>, Vec<usize>) {
    assert!(min_distance >= 1);
    let v = gaussian_smooth_1d(&env.velocity, sigma);
    let peaks = local_extrema(&v, true);
    let valleys = local_extrema(&v, false);
    let peaks = suppress(&v, peaks, min_distance, true);
    let valleys = suppress(&v, valleys, min_distance, false);
    alternate(&v, peaks, valleys)
}

/// Candidate extrema with plateau handling; plateaus report their center.
fn local_extrema(v: &[f64], maxima: bool) -> Vec<usize> {
    let n = v.len();
    let mut out = Vec::new();
    let better = |a: f64, b: f64| if maxima { a > b } else { a < b };
    let mut i = 1;
    while i + 1 < n {
        if v[i] == v[i - 1] {
            i += 1;
            continue;
        }
        if !better(v[i], v[i - 1]) {
            i += 1;
            continue;
        }
        // rising (for maxima) into i; scan the plateau
        let start = i;
        let mut j = i;
        while j + 1 < n && v[j + 1] == v[j] {
            j += 1;
        }
        if j + 1 < n && better(v[j], v[j + 1]) {
            out.push((start + j) / 2);
        }
        i = j + 1;
    }
    out
}

fn suppress(v: &[f64], mut cands: Vec<usize>, min_distance: usize, maxima: bool) -> Vec<usize> {
    // most extreme first, leftmost on ties
    cands.sort_by(|&a, &b| {
        let ord = v[a].partial_cmp(&v[b]).unwrap();
        (if maxima { ord.reverse() } else { ord }).then(a.cmp(&b))
    });
    let mut kept: Vec<usize> = Vec::new();
    for c in cands {
        if kept.iter().all(|&k| c.abs_diff(k) >= min_distance) {
            kept.push(c);
        }
    }
    kept.sort_unstable();
    kept
}

/// Drop same-class runs so the merged sequence strictly alternates; within a
/// run the more extreme sample survives (ties keep the leftmost).
fn alternate(v: &[f64], peaks: Vec<usize>, valleys: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
    #[derive(Clone, Copy)]
    struct Ev {
        col: usize,
        is_peak: bool,
    }
    let mut events: Vec<Ev> = peaks
        .iter()
        .map(|&c| Ev { col: c, is_peak: true })
        .chain(valleys.iter().map(|&c| Ev { col: c, is_peak: false }))
        .collect();
    events.sort_by_key(|e| e.col);
    let mut cleaned: Vec<Ev> = Vec::new();
    for e in events {
        match cleaned.last() {
            Some(last) if last.is_peak == e.is_peak => {
                let keep_new = if e.is_peak {
                    v[e.col] > v[last.col]
                } else {
                    v[e.col] < v[last.col]
                };
                if keep_new {
                    cleaned.pop();
                    cleaned.push(e);
                }
            }
            _ => cleaned.push(e),
        }
    }
    let mut p = Vec::new();
    let mut vl = Vec::new();
    for e in cleaned {
        if e.is_peak {
            p.push(e.col);
        } else {
            vl.push(e.col);
        }
    }
    (p, vl)
}

/// A waveform is a consecutive valley pair with exactly one peak between.
pub fn identify_waveforms(peaks: &[usize], valleys: &[usize]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for pair in valleys.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let between: Vec<usize> = peaks.iter().copied().filter(|&p| p > a && p < b).collect();
        if between.len() == 1 {
            out.push((a, between[0], b));
        }
    }
    out
}

/// Score one waveform: mean gray intensity over its pixels, clarity class,
/// and peak height as a percentage of the positive y-axis.
pub fn score_waveform(
    gray: &GrayImage,
    mask: &BinaryMask,
    env: &Envelope,
    wf: (usize, usize, usize),
    cfg: &SpectrumConfig,
) -> Result<Waveform, SpectrumError> {
    let (start, peak, end) = wf;
    let (good_thr, poor_thr) = cfg.clarity_thresholds;
    let mut sum = 0.0;
    let mut count = 0usize;
    for x in start..=end.min(gray.width - 1) {
        for y in 0..env.axis_y.min(gray.height) {
            if !cfg.intensity_foreground_only || mask.get(x, y) {
                sum += gray.get(x, y);
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(SpectrumError::EmptyWaveform);
    }
    let mean_intensity = sum / count as f64;
    let clarity = classify_clarity(mean_intensity, good_thr, poor_thr);
    let height_pct = 100.0 * env.velocity[peak] / env.axis_y as f64;
    Ok(Waveform {
        start_col: start,
        peak_col: peak,
        end_col: end,
        mean_intensity,
        clarity,
        height_pct,
    })
}

/// Strict thresholds; values exactly at a threshold fall to Moderate.
pub fn classify_clarity(mean_intensity: f64, good_thr: f64, poor_thr: f64) -> Clarity {
    if mean_intensity > good_thr {
        Clarity::Good
    } else if mean_intensity < poor_thr {
        Clarity::Poor
    } else {
        Clarity::Moderate
    }
}

/// Verdict booleans from scored waveforms: sweep speed wants 3-10 waveforms,
/// dynamic range wants one above 75% of the y-axis, clarity wants a run of
/// at least 3 consecutive waveforms of at least moderate clarity.
pub fn verdict_from_waveforms(waveforms: Vec<Waveform>) -> QaVerdict {
    let n = waveforms.len();
    let sweep_pass = (3..=10).contains(&n);
    let range_pass = waveforms.iter().any(|w| w.height_pct > 75.0);
    let mut best_run = 0usize;
    let mut run = 0usize;
    for w in &waveforms {
        if w.clarity != Clarity::Poor {
            run += 1;
            best_run = best_run.max(run);
        } else {
            run = 0;
        }
    }
    QaVerdict {
        n_waveforms: n,
        clarity_pass: best_run >= 3,
        sweep_pass,
        range_pass,
        waveforms,
    }
}

/// Full pipeline for one spectrum crop.
pub fn assess(raster: &RasterImage, cfg: &SpectrumConfig) -> Result<SpectrumAnalysis, SpectrumError> {
    let overlays = detect_overlays(raster, cfg.overlay_std_threshold, cfg.overlay_dilation)?;
    let gray = raster.to_gray();
    let gray = if overlays.is_empty() {
        gray
    } else {
        inpaint::inpaint_biharmonic(&gray, &overlays)?
    };

    let axis_y = detect_x_axis(&gray, cfg)?;
    let (fg_seeds, bg_seeds) = walker::derive_seeds(&gray, axis_y, &cfg.seed_policy);
    let walk = walker::random_walker(&gray, cfg.beta, &fg_seeds, &bg_seeds)?;
    let mask = clean_with_axis(&walk.mask, axis_y);
    let envelope = extract_envelope(&mask, axis_y);
    let (peaks, valleys) = detect_peaks_valleys(&envelope, cfg.envelope_sigma, cfg.min_peak_distance);
    let triples = identify_waveforms(&peaks, &valleys);
    let mut waveforms = Vec::with_capacity(triples.len());
    for wf in triples {
        waveforms.push(score_waveform(&gray, &mask, &envelope, wf, cfg)?);
    }
    let verdict = verdict_from_waveforms(waveforms);
    Ok(SpectrumAnalysis {
        axis_y,
        mask,
        envelope,
        peaks,
        valleys,
        verdict,
    })
}

/// Annotated overlay: waveform regions tinted green/yellow/red by clarity,
/// with a dotted envelope boundary over waveforms not reaching 75% height.
pub fn render_overlay(raster: &RasterImage, analysis: &SpectrumAnalysis) -> RasterImage {
    let mut out = raster.clone();
    if out.channels != 3 {
        return out;
    }
    for w in &analysis.verdict.waveforms {
        let tint: [f64; 3] = match w.clarity {
            Clarity::Good => [0.0, 255.0, 0.0],
            Clarity::Moderate => [255.0, 255.0, 0.0],
            Clarity::Poor => [255.0, 0.0, 0.0],
        };
        for x in w.start_col..=w.end_col.min(out.width - 1) {
            for y in 0..analysis.axis_y {
                if analysis.mask.get(x, y) {
                    let px = out.pixel_mut(x, y);
                    for c in 0..3 {
                        px[c] = (0.5 * px[c] as f64 + 0.5 * tint[c]) as u8;
                    }
                }
            }
        }
        if w.height_pct <= 75.0 {
            // dotted boundary along the envelope
            for x in (w.start_col..=w.end_col.min(out.width - 1)).step_by(4) {
                let y = analysis.envelope.top_y[x] as usize;
                if y < out.height {
                    let px = out.pixel_mut(x, y);
                    px.copy_from_slice(&[255, 255, 255]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_pixel_not_overlay() {
        let img = RasterImage::filled(4, 4, 3, 120);
        let m = detect_overlays(&img, 12.0 / 255.0, 0).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn yellow_trace_is_overlay() {
        let mut img = RasterImage::filled(8, 8, 3, 120);
        let px = img.pixel_mut(4, 4);
        px.copy_from_slice(&[255, 255, 0]);
        let m = detect_overlays(&img, 12.0 / 255.0, 2).unwrap();
        assert!(m.get(4, 4));
        assert!(m.get(6, 4)); // dilation by 2
        assert!(!m.get(0, 0));
    }

    #[test]
    fn axis_found_at_drawn_row() {
        let mut gray = GrayImage::zeros(200, 500);
        for x in 0..200 {
            gray.set(x, 400, 0.95);
        }
        let row = detect_x_axis(&gray, &SpectrumConfig::default()).unwrap();
        assert!((row as isize - 400).unsigned_abs() <= 1);
    }

    #[test]
    fn blank_image_axis_not_found() {
        let gray = GrayImage::zeros(100, 100);
        assert!(matches!(
            detect_x_axis(&gray, &SpectrumConfig::default()),
            Err(SpectrumError::AxisNotFound)
        ));
    }

    #[test]
    fn longer_line_wins_vote_ordering() {
        let mut gray = GrayImage::zeros(300, 500);
        for x in 0..300 {
            gray.set(x, 400, 0.95);
        }
        for x in 100..160 {
            gray.set(x, 100, 0.92);
        }
        let row = detect_x_axis(&gray, &SpectrumConfig::default()).unwrap();
        assert!((row as isize - 400).unsigned_abs() <= 1);
    }

    #[test]
    fn clean_removes_below_axis_and_fills_holes() {
        let mut mask = BinaryMask::new(20, 20);
        // blob below axis
        mask.set(5, 15, true);
        // solid region with interior hole above axis
        for y in 2..9 {
            for x in 2..12 {
                mask.set(x, y, true);
            }
        }
        mask.set(6, 5, false);
        let out = clean_with_axis(&mask, 10);
        assert!(!out.get(5, 15));
        assert!(out.get(6, 5));
    }

    #[test]
    fn border_touching_background_not_filled() {
        let mut mask = BinaryMask::new(20, 20);
        // C-shape open to the top border
        for y in 2..9 {
            mask.set(3, y, true);
            mask.set(9, y, true);
        }
        for x in 3..10 {
            mask.set(x, 8, true);
        }
        let out = clean_with_axis(&mask, 12);
        assert!(!out.get(6, 4), "open cavity must stay background");
    }

    #[test]
    fn envelope_definition() {
        let mut mask = BinaryMask::new(3, 450);
        for y in 100..=200 {
            mask.set(1, y, true);
        }
        let env = extract_envelope(&mask, 400);
        assert_eq!(env.top_y[1], 100.0);
        assert_eq!(env.velocity[1], 300.0);
        assert_eq!(env.velocity[0], 0.0);
    }

    #[test]
    fn sine_peaks_and_valleys() {
        let n = 600;
        let velocity: Vec<f64> = (0..n)
            .map(|x| 50.0 + 40.0 * (std::f64::consts::TAU * x as f64 / 200.0).sin())
            .collect();
        let env = Envelope {
            top_y: vec![0.0; n],
            axis_y: 400,
            velocity,
        };
        let (peaks, valleys) = detect_peaks_valleys(&env, 8.0, 70);
        assert_eq!(peaks.len(), 3, "{peaks:?}");
        assert_eq!(valleys.len(), 3, "{valleys:?}");
        for (got, expect) in peaks.iter().zip([50, 250, 450]) {
            assert!((*got as isize - expect).unsigned_abs() <= 2, "{peaks:?}");
        }
        for (got, expect) in valleys.iter().zip([150, 350, 550]) {
            assert!((*got as isize - expect).unsigned_abs() <= 2, "{valleys:?}");
        }
    }

    #[test]
    fn constant_velocity_no_extrema() {
        let env = Envelope {
            top_y: vec![0.0; 300],
            axis_y: 100,
            velocity: vec![42.0; 300],
        };
        let (peaks, valleys) = detect_peaks_valleys(&env, 8.0, 70);
        assert!(peaks.is_empty() && valleys.is_empty());
    }

    #[test]
    fn close_peaks_suppressed_keeping_taller() {
        // two bumps 40 columns apart, second taller
        let n = 300;
        let mut velocity = vec![10.0; n];
        for (center, height) in [(120usize, 30.0f64), (160, 50.0)] {
            for (x, v) in velocity.iter_mut().enumerate() {
                let d = (x as f64 - center as f64).abs();
                if d < 18.0 {
                    *v = f64::max(*v, 10.0 + height * (1.0 - d / 18.0));
                }
            }
        }
        let env = Envelope {
            top_y: vec![0.0; n],
            axis_y: 100,
            velocity,
        };
        let (peaks, _) = detect_peaks_valleys(&env, 3.0, 70);
        assert_eq!(peaks.len(), 1, "{peaks:?}");
        assert!((peaks[0] as isize - 160).unsigned_abs() <= 3, "{peaks:?}");
    }

    #[test]
    fn waveform_rule() {
        assert_eq!(
            identify_waveforms(&[250, 450], &[150, 350, 550]),
            vec![(150, 250, 350), (350, 450, 550)]
        );
        assert!(identify_waveforms(&[10], &[]).is_empty());
        assert!(identify_waveforms(&[200, 400], &[0, 600]).is_empty());
    }

    #[test]
    fn clarity_thresholds() {
        assert_eq!(classify_clarity(0.70, 0.56, 0.36), Clarity::Good);
        assert_eq!(classify_clarity(0.45, 0.56, 0.36), Clarity::Moderate);
        assert_eq!(classify_clarity(0.30, 0.56, 0.36), Clarity::Poor);
        // exact threshold values fall to moderate
        assert_eq!(classify_clarity(0.56, 0.56, 0.36), Clarity::Moderate);
        assert_eq!(classify_clarity(0.36, 0.56, 0.36), Clarity::Moderate);
    }

    #[test]
    fn verdict_rules() {
        let wf = |h: f64, c: Clarity| Waveform {
            start_col: 0,
            peak_col: 1,
            end_col: 2,
            mean_intensity: 0.5,
            clarity: c,
            height_pct: h,
        };
        let v = verdict_from_waveforms(vec![
            wf(85.0, Clarity::Good),
            wf(60.0, Clarity::Moderate),
            wf(70.0, Clarity::Good),
            wf(50.0, Clarity::Good),
            wf(40.0, Clarity::Poor),
        ]);
        assert!(v.sweep_pass && v.range_pass && v.clarity_pass);

        let v2 = verdict_from_waveforms(vec![wf(85.0, Clarity::Good), wf(80.0, Clarity::Good)]);
        assert!(!v2.sweep_pass);
        assert!(!v2.clarity_pass);

        let v3 = verdict_from_waveforms(vec![
            wf(70.0, Clarity::Good),
            wf(70.0, Clarity::Good),
            wf(70.0, Clarity::Good),
        ]);
        assert!(!v3.range_pass);
    }

    #[test]
    fn height_pct_by_hand() {
        let mut mask = BinaryMask::new(3, 450);
        for y in 80..400 {
            mask.set(1, y, true);
        }
        let env = extract_envelope(&mask, 400);
        let cfg = SpectrumConfig::default();
        let mut gray = GrayImage::zeros(3, 450);
        for y in 80..400 {
            gray.set(1, y, 0.7);
        }
        let w = score_waveform(&gray, &mask, &env, (0, 1, 2), &cfg).unwrap();
        assert!((w.height_pct - 80.0).abs() < 1e-9);
        assert_eq!(w.clarity, Clarity::Good);
    }

    #[test]
    fn empty_waveform_errors() {
        let mask = BinaryMask::new(10, 10);
        let env = extract_envelope(&mask, 8);
        let gray = GrayImage::zeros(10, 10);
        assert!(matches!(
            score_waveform(&gray, &mask, &env, (0, 3, 6), &SpectrumConfig::default()),
            Err(SpectrumError::EmptyWaveform)
        ));
    }
}
