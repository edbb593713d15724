//! Biharmonic hole filling: the overlay pixels flagged by the confounder
//! detector are replaced by the solution of Δ²u = 0 with the surrounding
//! known pixels as boundary data.
//!
//! The bilaplacian is the 13-point stencil obtained by composing the 5-point
//! Laplacian with itself; neighbors falling outside the image are clamped,
//! which makes the composed operator symmetric and the restricted system SPD.

use thiserror::Error;

use crate::image::{BinaryMask, GrayImage};
use crate::solver::{self, SolveError, SymOp};

#[derive(Debug, Error, PartialEq)]
pub enum InpaintError {
    #[error("hole covers the entire image; no boundary data")]
    NoBoundary,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

struct Bilaplacian<'a> {
    width: usize,
    height: usize,
    unknowns: &'a [usize],
}

impl Bilaplacian<'_> {
    /// 5-point Laplacian with out-of-bounds neighbors clamped (they drop out).
    fn laplacian(&self, src: &[f64], dst: &mut [f64]) {
        let (w, h) = (self.width, self.height);
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                let mut acc = 0.0;
                let mut deg = 0.0;
                if x > 0 {
                    acc += src[i - 1];
                    deg += 1.0;
                }
                if x + 1 < w {
                    acc += src[i + 1];
                    deg += 1.0;
                }
                if y > 0 {
                    acc += src[i - w];
                    deg += 1.0;
                }
                if y + 1 < h {
                    acc += src[i + w];
                    deg += 1.0;
                }
                dst[i] = deg * src[i] - acc;
            }
        }
    }

    fn apply_full(&self, full: &[f64], out: &mut [f64]) {
        let mut tmp = vec![0.0; full.len()];
        self.laplacian(full, &mut tmp);
        self.laplacian(&tmp, out);
    }
}

impl SymOp for Bilaplacian<'_> {
    fn dim(&self) -> usize {
        self.unknowns.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n_px = self.width * self.height;
        let mut full = vec![0.0; n_px];
        for (u, &px) in self.unknowns.iter().enumerate() {
            full[px] = x[u];
        }
        let mut out = vec![0.0; n_px];
        self.apply_full(&full, &mut out);
        for (u, &px) in self.unknowns.iter().enumerate() {
            y[u] = out[px];
        }
    }
}

/// Fill `hole` pixels of `gray` so they satisfy the discrete biharmonic
/// equation; pixels outside the hole are returned bit-identical.
pub fn inpaint_biharmonic(gray: &GrayImage, hole: &BinaryMask) -> Result<GrayImage, InpaintError> {
    assert_eq!(gray.width, hole.width);
    assert_eq!(gray.height, hole.height);
    let n_px = gray.width * gray.height;
    let n_hole = hole.count();
    if n_hole == 0 {
        return Ok(gray.clone());
    }
    if n_hole == n_px {
        return Err(InpaintError::NoBoundary);
    }

    let mut unknowns = Vec::with_capacity(n_hole);
    for i in 0..n_px {
        if hole.bits[i] {
            unknowns.push(i);
        }
    }

    let op = Bilaplacian {
        width: gray.width,
        height: gray.height,
        unknowns: &unknowns,
    };

    // rhs = -L²(known extension) restricted to the hole
    let known: Vec<f64> = gray
        .data
        .iter()
        .zip(&hole.bits)
        .map(|(&g, &in_hole)| if in_hole { 0.0 } else { g })
        .collect();
    let mut lk = vec![0.0; n_px];
    op.apply_full(&known, &mut lk);
    let b: Vec<f64> = unknowns.iter().map(|&px| -lk[px]).collect();

    // exact diagonal of L²: deg² + deg per pixel
    let diag: Vec<f64> = unknowns
        .iter()
        .map(|&px| {
            let (x, y) = (px % gray.width, px / gray.width);
            let mut deg = 0.0;
            if x > 0 {
                deg += 1.0;
            }
            if x + 1 < gray.width {
                deg += 1.0;
            }
            if y > 0 {
                deg += 1.0;
            }
            if y + 1 < gray.height {
                deg += 1.0;
            }
            deg * deg + deg
        })
        .collect();

    let x = solver::conjugate_gradient(&op, &b, &diag, solver::DEFAULT_TOLERANCE)?;

    let mut out = gray.clone();
    for (u, &px) in unknowns.iter().enumerate() {
        out.data[px] = x[u];
    }
    Ok(out)
}
