//! Random-walker segmentation (Grady-style): unseeded pixels take the label
//! whose seeds a random walk, biased by intensity similarity, reaches first.
//! The arrival probabilities solve a graph-Laplacian linear system.

use thiserror::Error;

use crate::image::{BinaryMask, GrayImage};
use crate::solver::{self, CsrMatrix, SolveError};

#[derive(Debug, Error, PartialEq)]
pub enum WalkerError {
    #[error("seed policy produced no {0} seeds")]
    NoSeeds(&'static str),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Edge-weight sharpness β in w = exp(−β·(gᵢ−gⱼ)²), on [0,1] intensities.
pub const DEFAULT_BETA: f64 = 130.0;

/// Small additive weight keeping the graph connected across hard edges.
const WEIGHT_FLOOR: f64 = 1e-6;

/// How seeds are derived from a spectrum image.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedPolicy {
    /// Foreground seeds: pixels brighter than this, above the x-axis row.
    pub fg_min_gray: f64,
    /// Background seeds: pixels in the top rows fraction darker than this.
    pub bg_top_rows_frac: f64,
    pub bg_top_max_gray: f64,
    /// Background seeds: border pixels darker than this.
    pub bg_border_max_gray: f64,
}

impl Default for SeedPolicy {
    fn default() -> Self {
        Self {
            fg_min_gray: 0.6,
            bg_top_rows_frac: 0.10,
            bg_top_max_gray: 0.08,
            bg_border_max_gray: 0.05,
        }
    }
}

/// Seeds for the spectrum foreground/background, derived per `policy`.
/// `axis_y` bounds the foreground search from below.
pub fn derive_seeds(
    gray: &GrayImage,
    axis_y: usize,
    policy: &SeedPolicy,
) -> (BinaryMask, BinaryMask) {
    let (w, h) = (gray.width, gray.height);
    let mut fg = BinaryMask::new(w, h);
    let mut bg = BinaryMask::new(w, h);
    let top_rows = ((h as f64 * policy.bg_top_rows_frac).ceil() as usize).max(1);
    for y in 0..h {
        for x in 0..w {
            let v = gray.get(x, y);
            if y < axis_y && v > policy.fg_min_gray {
                fg.set(x, y, true);
            }
            let on_border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            if (y < top_rows && v < policy.bg_top_max_gray)
                || (on_border && v < policy.bg_border_max_gray)
            {
                bg.set(x, y, true);
            }
        }
    }
    // a pixel cannot seed both classes; foreground wins
    for i in 0..w * h {
        if fg.bits[i] {
            bg.bits[i] = false;
        }
    }
    (fg, bg)
}

/// Output of [`random_walker`]: the label mask plus the per-pixel
/// foreground-arrival probability (seeds carry 0/1 exactly).
#[derive(Debug, Clone)]
pub struct WalkerResult {
    pub mask: BinaryMask,
    pub probability: Vec<f64>,
}

/// Two-label random walker over the 4-connected pixel graph with Gaussian
/// intensity weights. Label = foreground where the arrival probability
/// exceeds 0.5.
pub fn random_walker(
    gray: &GrayImage,
    beta: f64,
    fg_seeds: &BinaryMask,
    bg_seeds: &BinaryMask,
) -> Result<WalkerResult, WalkerError> {
    if fg_seeds.is_empty() {
        return Err(WalkerError::NoSeeds("foreground"));
    }
    if bg_seeds.is_empty() {
        return Err(WalkerError::NoSeeds("background"));
    }
    let (w, h) = (gray.width, gray.height);
    let n_px = w * h;

    let weight = |a: f64, b: f64| (-beta * (a - b) * (a - b)).exp() + WEIGHT_FLOOR;

    // unknown indices
    let mut index = vec![usize::MAX; n_px];
    let mut unknowns = Vec::new();
    for (i, slot) in index.iter_mut().enumerate() {
        if !fg_seeds.bits[i] && !bg_seeds.bits[i] {
            *slot = unknowns.len();
            unknowns.push(i);
        }
    }

    let mut probability = vec![0.0; n_px];
    for (p, &seeded) in probability.iter_mut().zip(&fg_seeds.bits) {
        if seeded {
            *p = 1.0;
        }
    }

    if !unknowns.is_empty() {
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(unknowns.len());
        let mut rhs = vec![0.0; unknowns.len()];
        for (u, &px) in unknowns.iter().enumerate() {
            let (x, y) = (px % w, px / w);
            let g = gray.get(x, y);
            let mut row = Vec::with_capacity(5);
            let mut degree = 0.0;
            let mut nbs = [(0usize, 0usize); 4];
            let mut n = 0;
            if x > 0 {
                nbs[n] = (x - 1, y);
                n += 1;
            }
            if x + 1 < w {
                nbs[n] = (x + 1, y);
                n += 1;
            }
            if y > 0 {
                nbs[n] = (x, y - 1);
                n += 1;
            }
            if y + 1 < h {
                nbs[n] = (x, y + 1);
                n += 1;
            }
            for &(nx, ny) in &nbs[..n] {
                let ni = ny * w + nx;
                let wgt = weight(g, gray.get(nx, ny));
                degree += wgt;
                if index[ni] != usize::MAX {
                    row.push((index[ni], -wgt));
                } else if fg_seeds.bits[ni] {
                    rhs[u] += wgt; // seed value 1
                }
            }
            row.push((u, degree));
            rows.push(row);
        }
        let lap = CsrMatrix::from_rows(rows);
        let diag = lap.diagonal();
        let x = solver::conjugate_gradient(&lap, &rhs, &diag, solver::DEFAULT_TOLERANCE)?;
        for (u, &px) in unknowns.iter().enumerate() {
            probability[px] = x[u];
        }
    }

    let mut mask = BinaryMask::new(w, h);
    for (bit, &p) in mask.bits.iter_mut().zip(&probability) {
        *bit = p > 0.5;
    }
    Ok(WalkerResult { mask, probability })
}
