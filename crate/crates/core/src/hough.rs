//! Hough transforms: straight lines in (ρ, θ) normal form and circle arcs
//! with a fixed center (1-D radius accumulator).

use crate::image::{BinaryMask, Point};

/// Line in normal form: a point (x, y) lies on it iff x·cosθ + y·sinθ = ρ.
/// θ ∈ [0, π), ρ signed.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PolarLine {
    pub rho: f64,
    pub theta: f64,
}

impl PolarLine {
    /// Signed distance from the point to the line.
    pub fn distance_to(&self, p: Point) -> f64 {
        p.x * self.theta.cos() + p.y * self.theta.sin() - self.rho
    }

    /// Canonical form with θ ∈ [0, π), flipping ρ's sign as needed.
    pub fn normalized(mut self) -> PolarLine {
        while self.theta < 0.0 {
            self.theta += std::f64::consts::PI;
            self.rho = -self.rho;
        }
        while self.theta >= std::f64::consts::PI {
            self.theta -= std::f64::consts::PI;
            self.rho = -self.rho;
        }
        self
    }
}

/// Circle arc evidence around a known center.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CircleArc {
    pub center: Point,
    pub radius: f64,
    pub support: u32,
}

/// Non-maximum suppression window: ±5 px in ρ, ±5° in θ.
pub const NMS_RHO_PX: f64 = 5.0;
pub const NMS_THETA_DEG: f64 = 5.0;

/// Longest horizontal or vertical run of foreground pixels; 0.3× this is the
/// default line vote floor.
pub fn longest_run(mask: &BinaryMask) -> usize {
    let (w, h) = (mask.width, mask.height);
    let mut best = 0usize;
    for y in 0..h {
        let mut run = 0;
        for x in 0..w {
            run = if mask.get(x, y) { run + 1 } else { 0 };
            best = best.max(run);
        }
    }
    for x in 0..w {
        let mut run = 0;
        for y in 0..h {
            run = if mask.get(x, y) { run + 1 } else { 0 };
            best = best.max(run);
        }
    }
    best
}

pub fn default_min_votes(mask: &BinaryMask) -> u32 {
    (0.3 * longest_run(mask) as f64).round() as u32
}

/// Detect straight lines; returns (line, votes) sorted by descending votes,
/// non-maximum suppressed over a (±5 px, ±5°) window with θ wraparound.
pub fn hough_lines(
    mask: &BinaryMask,
    min_votes: u32,
    angle_bins: usize,
    rho_resolution: f64,
) -> Vec<(PolarLine, u32)> {
    assert!(angle_bins >= 1 && rho_resolution > 0.0);
    let (w, h) = (mask.width, mask.height);
    let diag = ((w * w + h * h) as f64).sqrt();
    let n_rho = (2.0 * diag / rho_resolution).round() as usize + 1;
    let dtheta = std::f64::consts::PI / angle_bins as f64;

    let trig: Vec<(f64, f64)> = (0..angle_bins)
        .map(|t| {
            let th = t as f64 * dtheta;
            (th.cos(), th.sin())
        })
        .collect();

    let mut acc = vec![0u32; angle_bins * n_rho];
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            for (t, &(c, s)) in trig.iter().enumerate() {
                let rho = x as f64 * c + y as f64 * s;
                let r = ((rho + diag) / rho_resolution).round() as isize;
                if r >= 0 && (r as usize) < n_rho {
                    acc[t * n_rho + r as usize] += 1;
                }
            }
        }
    }

    let wt = (NMS_THETA_DEG.to_radians() / dtheta).ceil() as isize;
    let wr = (NMS_RHO_PX / rho_resolution).ceil() as isize;
    let rho_flip = (2.0 * diag / rho_resolution).round() as isize;

    let mut peaks = Vec::new();
    for t in 0..angle_bins as isize {
        for r in 0..n_rho as isize {
            let v = acc[t as usize * n_rho + r as usize];
            if v < min_votes || v == 0 {
                continue;
            }
            let mut is_peak = true;
            'win: for dt in -wt..=wt {
                for dr in -wr..=wr {
                    if dt == 0 && dr == 0 {
                        continue;
                    }
                    let (mut nt, mut nr) = (t + dt, r + dr);
                    // θ wraps with ρ sign flip
                    if nt < 0 {
                        nt += angle_bins as isize;
                        nr = rho_flip - nr;
                    } else if nt >= angle_bins as isize {
                        nt -= angle_bins as isize;
                        nr = rho_flip - nr;
                    }
                    if nr < 0 || nr >= n_rho as isize {
                        continue;
                    }
                    let nv = acc[nt as usize * n_rho + nr as usize];
                    if nv > v || (nv == v && (nt, nr) < (t, r)) {
                        is_peak = false;
                        break 'win;
                    }
                }
            }
            if is_peak {
                let line = PolarLine {
                    rho: r as f64 * rho_resolution - diag,
                    theta: t as f64 * dtheta,
                };
                peaks.push((line, v));
            }
        }
    }
    peaks.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.rho.partial_cmp(&b.0.rho).unwrap()));
    peaks
}

/// Circle detection with the center fixed: a 1-D vote histogram over radius.
/// Returns arcs sorted by descending support, suppressed over ±3 px in radius.
pub fn hough_circles_fixed_center(
    mask: &BinaryMask,
    center: Point,
    radius_range: (f64, f64),
    min_votes: u32,
) -> Vec<CircleArc> {
    let (r_lo, r_hi) = radius_range;
    assert!(r_lo <= r_hi && r_lo >= 0.0, "radius range must be non-empty");
    let n_bins = (r_hi - r_lo).floor() as usize + 1;
    let mut acc = vec![0u32; n_bins];
    for y in 0..mask.height {
        for x in 0..mask.width {
            if !mask.get(x, y) {
                continue;
            }
            let r = center.distance(&Point::new(x as f64, y as f64));
            let bin = (r - r_lo).round();
            if bin >= 0.0 && (bin as usize) < n_bins {
                acc[bin as usize] += 1;
            }
        }
    }
    let window = 3isize;
    let mut arcs = Vec::new();
    for b in 0..n_bins as isize {
        let v = acc[b as usize];
        if v < min_votes || v == 0 {
            continue;
        }
        let mut is_peak = true;
        for db in -window..=window {
            let nb = b + db;
            if db == 0 || nb < 0 || nb >= n_bins as isize {
                continue;
            }
            let nv = acc[nb as usize];
            if nv > v || (nv == v && nb < b) {
                is_peak = false;
                break;
            }
        }
        if is_peak {
            arcs.push(CircleArc {
                center,
                radius: r_lo + b as f64,
                support: v,
            });
        }
    }
    arcs.sort_by(|a, b| b.support.cmp(&a.support).then(a.radius.partial_cmp(&b.radius).unwrap()));
    arcs
}

/// Refine a coarse Hough line by total-least-squares over the mask pixels
/// within `band` px of it, iterated so the inlier band follows the fit.
/// Falls back to the input when the inliers are degenerate.
pub fn refine_line_tls(mask: &BinaryMask, coarse: &PolarLine, band: f64) -> PolarLine {
    let mut line = *coarse;
    for _ in 0..3 {
        line = refine_line_tls_once(mask, &line, band);
    }
    line
}

fn refine_line_tls_once(mask: &BinaryMask, coarse: &PolarLine, band: f64) -> PolarLine {
    let mut pts = Vec::new();
    for y in 0..mask.height {
        for x in 0..mask.width {
            if mask.get(x, y) {
                let p = Point::new(x as f64, y as f64);
                if coarse.distance_to(p).abs() <= band {
                    pts.push(p);
                }
            }
        }
    }
    if pts.len() < 2 {
        return *coarse;
    }
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &pts {
        let dx = p.x - cx;
        let dy = p.y - cy;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // normal of the best-fit line = eigenvector of the smaller eigenvalue
    let tr = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let lam_min = tr / 2.0 - (tr * tr / 4.0 - det).max(0.0).sqrt();
    let (nx, ny) = if sxy.abs() > 1e-12 {
        (lam_min - syy, sxy)
    } else if sxx <= syy {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let norm = (nx * nx + ny * ny).sqrt();
    if norm < 1e-12 {
        return *coarse;
    }
    let (nx, ny) = (nx / norm, ny / norm);
    let line = PolarLine {
        rho: cx * nx + cy * ny,
        theta: ny.atan2(nx),
    };
    line.normalized()
}
