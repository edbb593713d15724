//! Deterministic synthetic fixtures with exact ground truth: green Doppler
//! wedges, spectrum panels, and detection scenes. Everything is a pure
//! function of (spec, seed) so fixtures are reproducible byte-for-byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hough::{CircleArc, PolarLine};
use crate::image::{Point, RasterImage};
use crate::probe::{GateCandidate, ProbeLocation};
use crate::spectrum::{classify_clarity, Clarity};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("wedge lies entirely outside the image")]
    OffCanvas,
    #[error("waveform heights exceed the axis row")]
    Clipped,
}

/// Green Doppler wedge geometry. The wedge opens downward from the apex;
/// `half_angle_deg` is measured from the vertical axis to each edge.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WedgeSpec {
    pub apex: Point,
    pub half_angle_deg: f64,
    /// (inner, outer) arc radii in pixels.
    pub radii: (f64, f64),
    pub image_size: (usize, usize),
    /// Per-pixel probability of a green salt speck outside the wedge.
    pub noise_salt_prob: f64,
    pub edge_thickness: f64,
    /// Render the bounding arcs (off to exercise unverified localization).
    pub draw_arcs: bool,
    pub seed: u64,
}

impl Default for WedgeSpec {
    fn default() -> Self {
        Self {
            apex: Point::new(256.0, -80.0),
            half_angle_deg: 30.0,
            radii: (150.0, 400.0),
            image_size: (512, 400),
            noise_salt_prob: 0.0,
            // wide enough that a 3-step marker erosion keeps a centerline at
            // any stroke orientation
            edge_thickness: 11.0,
            draw_arcs: true,
            seed: 0,
        }
    }
}

const GREEN: [u8; 3] = [0, 220, 0];

fn stamp_disc(img: &mut RasterImage, cx: f64, cy: f64, radius: f64, color: [u8; 3]) {
    let r = radius.ceil() as isize;
    for dy in -r..=r {
        for dx in -r..=r {
            if (dx * dx + dy * dy) as f64 > radius * radius {
                continue;
            }
            let x = cx.round() as isize + dx;
            let y = cy.round() as isize + dy;
            if x >= 0 && y >= 0 && (x as usize) < img.width && (y as usize) < img.height {
                img.pixel_mut(x as usize, y as usize).copy_from_slice(&color);
            }
        }
    }
}

/// Render a wedge and return it with the analytically exact probe location.
pub fn gen_wedge(spec: &WedgeSpec) -> Result<(RasterImage, ProbeLocation), SynthError> {
    if !(spec.half_angle_deg > 0.0 && spec.half_angle_deg < 90.0) {
        return Err(SynthError::InvalidSpec(format!(
            "half_angle_deg {} outside (0, 90)",
            spec.half_angle_deg
        )));
    }
    if spec.radii.0 >= spec.radii.1 {
        return Err(SynthError::InvalidSpec("inner radius must be below outer".into()));
    }
    let (w, h) = spec.image_size;
    let mut img = RasterImage::filled(w, h, 3, 10);

    let half = spec.half_angle_deg.to_radians();
    // edge directions, wedge opening downward (+y)
    let dirs = [
        (half.sin(), half.cos()),
        (-half.sin(), half.cos()),
    ];
    let mut any_inside = false;
    let stroke = spec.edge_thickness / 2.0;
    for &(dx, dy) in &dirs {
        let mut t = spec.radii.0;
        while t <= spec.radii.1 {
            let x = spec.apex.x + t * dx;
            let y = spec.apex.y + t * dy;
            if x >= 0.0 && y >= 0.0 && x < w as f64 && y < h as f64 {
                any_inside = true;
            }
            stamp_disc(&mut img, x, y, stroke, GREEN);
            t += 0.5;
        }
    }
    // arcs spanning the wedge opening
    if spec.draw_arcs {
        for &radius in &[spec.radii.0, spec.radii.1] {
            let span = 2.0 * half;
            let steps = (span * radius * 2.0).ceil() as usize + 1;
            for i in 0..=steps {
                let phi = std::f64::consts::FRAC_PI_2 - half + span * i as f64 / steps as f64;
                let x = spec.apex.x + radius * phi.cos();
                let y = spec.apex.y + radius * phi.sin();
                if x >= 0.0 && y >= 0.0 && x < w as f64 && y < h as f64 {
                    any_inside = true;
                }
                stamp_disc(&mut img, x, y, stroke, GREEN);
            }
        }
    }
    if !any_inside {
        return Err(SynthError::OffCanvas);
    }

    if spec.noise_salt_prob > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        for y in 0..h {
            for x in 0..w {
                if rng.gen::<f64>() < spec.noise_salt_prob && img.pixel(x, y) != GREEN {
                    img.pixel_mut(x, y).copy_from_slice(&GREEN);
                }
            }
        }
    }

    // analytic edge lines in normal form: normal is the edge direction
    // rotated 90°, rho from the apex
    let edge_lines: [PolarLine; 2] = [
        edge_line(spec.apex, dirs[0]),
        edge_line(spec.apex, dirs[1]),
    ];
    let arcs = if spec.draw_arcs {
        vec![
            CircleArc {
                center: spec.apex,
                radius: spec.radii.0,
                support: (2.0 * half * spec.radii.0) as u32,
            },
            CircleArc {
                center: spec.apex,
                radius: spec.radii.1,
                support: (2.0 * half * spec.radii.1) as u32,
            },
        ]
    } else {
        Vec::new()
    };
    let truth = ProbeLocation {
        apex: spec.apex,
        edge_lines,
        verified: spec.draw_arcs,
        arcs,
    };
    Ok((img, truth))
}

fn edge_line(apex: Point, dir: (f64, f64)) -> PolarLine {
    let (nx, ny) = (-dir.1, dir.0);
    PolarLine {
        rho: apex.x * nx + apex.y * ny,
        theta: ny.atan2(nx),
    }
    .normalized()
}

/// A colored measurement overlay to be inpainted away by the pipeline.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OverlayLine {
    pub start: (f64, f64),
    pub end: (f64, f64),
    pub color: [u8; 3],
    pub thickness: f64,
}

/// Spectrum panel: `n_waveforms` lobes of given peak heights and fill
/// intensities over a bright baseline axis.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSpec {
    pub n_waveforms: usize,
    /// Valley-to-valley width of one lobe, in columns.
    pub period: usize,
    /// Peak height per waveform, pixels above the axis.
    pub peak_heights: Vec<f64>,
    pub axis_row: usize,
    /// Fill intensity per waveform in [0,1].
    pub intensity: Vec<f64>,
    pub noise_sigma: f64,
    pub overlay_lines: Vec<OverlayLine>,
    pub seed: u64,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        Self {
            n_waveforms: 5,
            period: 160,
            peak_heights: vec![320.0; 5],
            axis_row: 400,
            intensity: vec![0.8; 5],
            noise_sigma: 0.0,
            overlay_lines: Vec::new(),
            seed: 0,
        }
    }
}

/// Exact ground truth of a generated spectrum.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpectrumTruth {
    pub peak_cols: Vec<usize>,
    pub valley_cols: Vec<usize>,
    pub heights_px: Vec<f64>,
    pub clarity: Vec<Clarity>,
    pub axis_row: usize,
}

/// Height of the envelope floor between lobes, as a fraction of the
/// smallest peak height.
const BASELINE_FRAC: f64 = 0.25;

pub fn gen_spectrum(spec: &SpectrumSpec) -> Result<(RasterImage, SpectrumTruth), SynthError> {
    let k = spec.n_waveforms;
    if spec.peak_heights.len() != k || spec.intensity.len() != k {
        return Err(SynthError::InvalidSpec(
            "peak_heights and intensity must have n_waveforms entries".into(),
        ));
    }
    if spec.period < 4 {
        return Err(SynthError::InvalidSpec("period too small".into()));
    }
    if spec.peak_heights.iter().any(|&h| h >= spec.axis_row as f64) {
        return Err(SynthError::Clipped);
    }

    let width = (k + 1) * spec.period;
    let height = spec.axis_row + 30;
    let mut img = RasterImage::filled(width, height, 3, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let h_min = spec
        .peak_heights
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
        .min(spec.axis_row as f64);
    let baseline = BASELINE_FRAC * h_min;
    let period = spec.period as f64;
    // valleys at period/2 + j*period for j = 0..=k
    let valley = |j: usize| period / 2.0 + j as f64 * period;

    let envelope_and_lobe = |x: f64| -> (f64, usize) {
        if k == 0 {
            return (baseline, 0);
        }
        if x < valley(0) {
            let h_edge = baseline + 0.6 * (spec.peak_heights[0] - baseline);
            let e = baseline + (h_edge - baseline) * (std::f64::consts::PI * x / period).cos().max(0.0);
            return (e, 0);
        }
        if x >= valley(k) {
            let h_edge = baseline + 0.6 * (spec.peak_heights[k - 1] - baseline);
            let t = x - valley(k);
            let e = baseline
                + (h_edge - baseline) * (std::f64::consts::PI * (period / 2.0 - t) / period)
                    .sin()
                    .max(0.0);
            return (e, k - 1);
        }
        let j = (((x - valley(0)) / period).floor() as usize).min(k - 1);
        let t = x - valley(j);
        let e = baseline
            + (spec.peak_heights[j] - baseline) * (std::f64::consts::PI * t / period).sin().max(0.0);
        (e, j)
    };

    for x in 0..width {
        let (env, lobe) = envelope_and_lobe(x as f64);
        let top = (spec.axis_row as f64 - env).max(0.0) as usize;
        for y in top..spec.axis_row {
            let mut v = spec.intensity[lobe];
            if spec.noise_sigma > 0.0 {
                v += spec.noise_sigma * gauss(&mut rng);
            }
            let g = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
            img.pixel_mut(x, y).copy_from_slice(&[g, g, g]);
        }
    }
    // axis baseline, 2 px, bright
    for y in spec.axis_row..(spec.axis_row + 2).min(height) {
        for x in 0..width {
            img.pixel_mut(x, y).copy_from_slice(&[242, 242, 242]);
        }
    }
    for line in &spec.overlay_lines {
        draw_line(&mut img, line);
    }

    let truth = SpectrumTruth {
        peak_cols: (0..k).map(|j| (valley(j) + period / 2.0).round() as usize).collect(),
        valley_cols: (0..=k).map(|j| valley(j).round() as usize).collect(),
        heights_px: spec.peak_heights.clone(),
        clarity: spec
            .intensity
            .iter()
            .map(|&i| classify_clarity(i, 0.56, 0.36))
            .collect(),
        axis_row: spec.axis_row,
    };
    Ok((img, truth))
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn draw_line(img: &mut RasterImage, line: &OverlayLine) {
    let (x0, y0) = line.start;
    let (x1, y1) = line.end;
    let len = (x1 - x0).hypot(y1 - y0).max(1.0);
    let steps = (len * 2.0) as usize;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        stamp_disc(
            img,
            x0 + t * (x1 - x0),
            y0 + t * (y1 - y0),
            line.thickness / 2.0,
            line.color,
        );
    }
}

/// Random ground-truth gates plus predictions displaced by exactly
/// `jitter_radius` with angles perturbed uniformly within ±`angle_noise_deg`.
pub fn gen_detection_scene(
    n_gt: usize,
    jitter_radius: f64,
    angle_noise_deg: f64,
    seed: u64,
) -> (Vec<GateCandidate>, Vec<GateCandidate>) {
    assert!(n_gt >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gts = Vec::with_capacity(n_gt);
    let mut preds = Vec::with_capacity(n_gt);
    for _ in 0..n_gt {
        let cx = rng.gen_range(50.0..950.0);
        let cy = rng.gen_range(50.0..750.0);
        let hw = rng.gen_range(10.0..30.0);
        let hh = rng.gen_range(10.0..30.0);
        let angle = rng.gen_range(0.0..180.0);
        gts.push(GateCandidate {
            box_min: Point::new(cx - hw, cy - hh),
            box_max: Point::new(cx + hw, cy + hh),
            vessel_angle_deg: angle,
            score: 1.0,
        });
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let da = if angle_noise_deg > 0.0 {
            rng.gen_range(-angle_noise_deg..angle_noise_deg)
        } else {
            0.0
        };
        let (px, py) = (cx + jitter_radius * phi.cos(), cy + jitter_radius * phi.sin());
        preds.push(GateCandidate {
            box_min: Point::new(px - hw, py - hh),
            box_max: Point::new(px + hw, py + hh),
            vessel_angle_deg: (angle + da).rem_euclid(180.0),
            score: rng.gen_range(0.0..1.0),
        });
    }
    (gts, preds)
}
