//! Probe localization from the green Doppler wedge and insonation-angle
//! computation for candidate gate locations.

use thiserror::Error;

use crate::hough::{self, CircleArc, PolarLine};
use crate::image::{ImageError, Point, RasterImage};
use crate::threshold::{self, ChannelBounds};
use crate::watershed::{self, WatershedError};

#[derive(Debug, Error, PartialEq)]
pub enum ProbeError {
    #[error("green Doppler wedge not found (fewer than 2 edge lines)")]
    WedgeNotFound,
    #[error("edge lines are near-parallel; no usable intersection")]
    DegenerateIntersection,
    #[error("query pixel coincides with the probe apex")]
    AtApex,
    #[error(transparent)]
    Watershed(#[from] WatershedError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Probe apex with the supporting wedge-edge lines and arc verification.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProbeLocation {
    /// Apex of the beam wedge; may lie outside image bounds.
    pub apex: Point,
    pub edge_lines: [PolarLine; 2],
    pub verified: bool,
    pub arcs: Vec<CircleArc>,
}

/// Candidate gate: bounding box, undirected vessel angle, validity score.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GateCandidate {
    /// (min corner, max corner) in pixels.
    pub box_min: Point,
    pub box_max: Point,
    /// Degrees from the +x axis, y down, in [0, 180).
    pub vessel_angle_deg: f64,
    pub score: f64,
}

impl GateCandidate {
    pub fn centroid(&self) -> Point {
        Point::new(
            (self.box_min.x + self.box_max.x) / 2.0,
            (self.box_min.y + self.box_max.y) / 2.0,
        )
    }
}

/// ISUOG angle-of-insonation verdict.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct InsonationResult {
    /// Folded to [0, 90] since the vessel line is undirected.
    pub angle_deg: f64,
    /// Unit vector from the gate centroid toward the apex.
    pub beam_vector: [f64; 2],
    /// Strictly less than 30 degrees passes.
    pub passes_isuog: bool,
}

/// ISUOG threshold: the insonation angle must be strictly below 30 degrees.
pub const ISUOG_MAX_ANGLE_DEG: f64 = 30.0;

/// Two coarse lines closer than this in θ are treated as parallel.
pub const PARALLEL_REJECT_DEG: f64 = 2.0;

/// Minimum orientation difference for the second coarse line. Suppression
/// survivors along one thick stroke sit within the ±5° window, so candidates
/// closer than this are treated as the same physical edge.
pub const LINE_DISTINCT_DEG: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub bounds: ChannelBounds,
    pub marker_erosion: usize,
    pub angle_bins: usize,
    pub rho_resolution: f64,
    /// Vote floor as a fraction of the longest mask run; 0 = use absolute.
    pub min_votes_frac: f64,
    /// Band around the coarse Hough line used for least-squares refinement.
    pub refine_band_px: f64,
    /// Radius search range for arc verification, as fractions of the
    /// image diagonal.
    pub arc_radius_frac: (f64, f64),
    /// Minimum arc support for `verified = true`.
    pub arc_min_votes: u32,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            bounds: ChannelBounds::green_doppler(),
            marker_erosion: watershed::DEFAULT_MARKER_EROSION,
            angle_bins: 180,
            rho_resolution: 1.0,
            min_votes_frac: 0.3,
            refine_band_px: 8.0,
            arc_radius_frac: (0.05, 1.5),
            arc_min_votes: 30,
        }
    }
}

/// Intersection of two lines in normal form, via homogeneous coordinates.
fn intersect(l1: &PolarLine, l2: &PolarLine) -> Option<Point> {
    let (c1, s1) = (l1.theta.cos(), l1.theta.sin());
    let (c2, s2) = (l2.theta.cos(), l2.theta.sin());
    let det = c1 * s2 - s1 * c2;
    if det.abs() < 1e-12 {
        return None;
    }
    Some(Point::new(
        (l1.rho * s2 - l2.rho * s1) / det,
        (c1 * l2.rho - c2 * l1.rho) / det,
    ))
}

/// Locate the probe apex: threshold the green wedge, refine it with a
/// watershed, find the two radial edges with the Hough transform, intersect
/// them, and verify the wedge arcs around the intersection.
pub fn locate_probe(img: &RasterImage, cfg: &ProbeConfig) -> Result<ProbeLocation, ProbeError> {
    let raw = threshold::threshold_rgb(img, &cfg.bounds)?;
    if raw.is_empty() {
        return Err(ProbeError::WedgeNotFound);
    }
    let mask = watershed::watershed_refine(&raw, img, cfg.marker_erosion)
        .map_err(|e| match e {
            WatershedError::NoForeground => ProbeError::WedgeNotFound,
            other => other.into(),
        })?;

    let min_votes = (cfg.min_votes_frac * hough::longest_run(&mask) as f64).round() as u32;
    let lines = hough::hough_lines(&mask, min_votes.max(1), cfg.angle_bins, cfg.rho_resolution);
    if lines.len() < 2 {
        return Err(ProbeError::WedgeNotFound);
    }
    let coarse_a = lines[0].0;
    // strongest line whose orientation differs from the first; a thick stroke
    // can leave several suppressed-peak survivors along its own width
    let coarse_b = lines[1..]
        .iter()
        .map(|&(l, _)| l)
        .find(|l| {
            angular_separation(coarse_a.theta, l.theta) >= LINE_DISTINCT_DEG.to_radians()
        })
        .ok_or(ProbeError::DegenerateIntersection)?;

    let line_a = hough::refine_line_tls(&mask, &coarse_a, cfg.refine_band_px);
    let line_b = hough::refine_line_tls(&mask, &coarse_b, cfg.refine_band_px);
    if angular_separation(line_a.theta, line_b.theta) < PARALLEL_REJECT_DEG.to_radians() {
        return Err(ProbeError::DegenerateIntersection);
    }
    let apex = intersect(&line_a, &line_b).ok_or(ProbeError::DegenerateIntersection)?;

    let diag = ((img.width * img.width + img.height * img.height) as f64).sqrt();
    let radius_range = (cfg.arc_radius_frac.0 * diag, cfg.arc_radius_frac.1 * diag);
    let arcs = hough::hough_circles_fixed_center(&mask, apex, radius_range, cfg.arc_min_votes);
    let verified = arcs.iter().any(|a| a.support >= cfg.arc_min_votes);

    Ok(ProbeLocation {
        apex,
        edge_lines: [line_a, line_b],
        verified,
        arcs,
    })
}

/// Smallest angle between two undirected line orientations, in radians.
fn angular_separation(t1: f64, t2: f64) -> f64 {
    let d = (t1 - t2).abs() % std::f64::consts::PI;
    d.min(std::f64::consts::PI - d)
}

/// Unit vector pointing from `pixel` toward the probe apex.
pub fn beam_direction_at(probe: &ProbeLocation, pixel: Point) -> Result<[f64; 2], ProbeError> {
    let dx = probe.apex.x - pixel.x;
    let dy = probe.apex.y - pixel.y;
    let norm = dx.hypot(dy);
    if norm < 1e-9 {
        return Err(ProbeError::AtApex);
    }
    Ok([dx / norm, dy / norm])
}

/// Angle of insonation at a gate, folded to [0, 90] because the vessel line
/// is undirected, with the ISUOG strict 30-degree verdict.
pub fn insonation_angle(
    probe: &ProbeLocation,
    gate: &GateCandidate,
) -> Result<InsonationResult, ProbeError> {
    let u = beam_direction_at(probe, gate.centroid())?;
    let a = gate.vessel_angle_deg.to_radians();
    let v = [a.cos(), a.sin()];
    let dot = (u[0] * v[0] + u[1] * v[1]).abs();
    let cross = (u[0] * v[1] - u[1] * v[0]).abs();
    // atan2 keeps full precision near 0° and 90°, unlike acos of the dot
    let angle_deg = cross.atan2(dot).to_degrees();
    Ok(InsonationResult {
        angle_deg,
        beam_vector: u,
        passes_isuog: angle_deg < ISUOG_MAX_ANGLE_DEG,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe_at(x: f64, y: f64) -> ProbeLocation {
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

    fn gate_at(x: f64, y: f64, angle: f64) -> GateCandidate {
        GateCandidate {
            box_min: Point::new(x - 5.0, y - 5.0),
            box_max: Point::new(x + 5.0, y + 5.0),
            vessel_angle_deg: angle,
            score: 1.0,
        }
    }

    #[test]
    fn beam_direction_straight_above() {
        let p = probe_at(0.0, 0.0);
        let v = beam_direction_at(&p, Point::new(0.0, 5.0)).unwrap();
        assert!((v[0]).abs() < 1e-12 && (v[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn beam_direction_345_triangle() {
        let p = probe_at(0.0, 0.0);
        let v = beam_direction_at(&p, Point::new(3.0, 4.0)).unwrap();
        assert!((v[0] + 0.6).abs() < 1e-12 && (v[1] + 0.8).abs() < 1e-12);
    }

    #[test]
    fn beam_direction_at_apex_errors() {
        let p = probe_at(10.0, 10.0);
        assert!(matches!(
            beam_direction_at(&p, Point::new(10.0, 10.0)),
            Err(ProbeError::AtApex)
        ));
    }

    #[test]
    fn collinear_vertical_gate_passes() {
        let p = probe_at(50.0, 0.0);
        let r = insonation_angle(&p, &gate_at(50.0, 100.0, 90.0)).unwrap();
        assert!(r.angle_deg.abs() < 1e-9);
        assert!(r.passes_isuog);
    }

    #[test]
    fn orthogonal_gate_fails() {
        let p = probe_at(0.0, 0.0);
        let r = insonation_angle(&p, &gate_at(100.0, 100.0, 135.0)).unwrap();
        assert!((r.angle_deg - 90.0).abs() < 1e-9);
        assert!(!r.passes_isuog);
    }

    #[test]
    fn collinear_diagonal_gate_passes() {
        let p = probe_at(0.0, 0.0);
        let r = insonation_angle(&p, &gate_at(100.0, 100.0, 45.0)).unwrap();
        assert!(r.angle_deg.abs() < 1e-6);
        assert!(r.passes_isuog);
    }

    #[test]
    fn exact_30_degrees_fails_strictly() {
        let p = probe_at(0.0, -1e9); // beam effectively vertical
        let r = insonation_angle(&p, &gate_at(0.0, 0.0, 60.0)).unwrap();
        assert!((r.angle_deg - 30.0).abs() < 1e-6);
        assert!(!r.passes_isuog);
    }

    #[test]
    fn vessel_flip_invariance() {
        let p = probe_at(37.0, -80.0);
        for k in 0..50 {
            let ang = k as f64 * 3.7 % 180.0;
            let g1 = gate_at(200.0, 300.0, ang);
            let g2 = gate_at(200.0, 300.0, (ang + 180.0) % 360.0 % 180.0);
            let r1 = insonation_angle(&p, &g1).unwrap();
            let r2 = insonation_angle(&p, &g2).unwrap();
            assert!((r1.angle_deg - r2.angle_deg).abs() < 1e-9);
            assert!((0.0..=90.0).contains(&r1.angle_deg));
        }
    }

    #[test]
    fn no_green_pixels_is_wedge_not_found() {
        let img = RasterImage::filled(64, 64, 3, 10);
        assert!(matches!(
            locate_probe(&img, &ProbeConfig::default()),
            Err(ProbeError::WedgeNotFound)
        ));
    }
}
