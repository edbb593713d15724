//! Marker-based watershed used to clean up the thresholded Doppler-box mask.
//!
//! Markers are the input foreground eroded by a few pixels (certain wedge)
//! and the background eroded by the same amount (certain non-wedge). The
//! flood runs over the Sobel gradient magnitude of the guide image's green
//! channel, so region fronts meet at intensity edges. Isolated specks thinner
//! than the erosion radius lose their markers and get flooded from the
//! background.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::image::{BinaryMask, GrayImage, ImageError, RasterImage};

#[derive(Debug, Error, PartialEq)]
pub enum WatershedError {
    #[error("mask has no foreground markers after erosion")]
    NoForeground,
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Marker erosion radius in pixels.
pub const DEFAULT_MARKER_EROSION: usize = 3;

/// Refine `mask` by flooding the gradient of `guide`'s green channel from
/// eroded foreground/background markers.
pub fn watershed_refine(
    mask: &BinaryMask,
    guide: &RasterImage,
    marker_erosion: usize,
) -> Result<BinaryMask, WatershedError> {
    if mask.width != guide.width || mask.height != guide.height {
        return Err(ImageError::DimensionMismatch(mask.width, mask.height, guide.width, guide.height).into());
    }
    if mask.is_empty() {
        return Err(WatershedError::NoForeground);
    }

    let green = green_channel(guide);
    let grad = green.gradient_magnitude();

    let fg = mask.erode(marker_erosion);
    if fg.is_empty() {
        return Err(WatershedError::NoForeground);
    }
    let bg = mask.invert().erode(marker_erosion);

    let (w, h) = (mask.width, mask.height);
    const UNLABELED: u8 = 0;
    const FG: u8 = 1;
    const BG: u8 = 2;
    let mut labels = vec![UNLABELED; w * h];

    // (priority, insertion order, index, label); lowest gradient pops first,
    // insertion order breaks ties deterministically
    let mut heap: BinaryHeap<Reverse<(u64, u64, usize, u8)>> = BinaryHeap::new();
    let mut order: u64 = 0;
    let prio = |g: f64| (g * 1e9) as u64;

    for ((label, &f), &b) in labels.iter_mut().zip(&fg.bits).zip(&bg.bits) {
        if f {
            *label = FG;
        } else if b {
            *label = BG;
        }
    }
    for (i, &label) in labels.iter().enumerate() {
        if label != UNLABELED {
            heap.push(Reverse((prio(grad.data[i]), order, i, label)));
            order += 1;
        }
    }

    while let Some(Reverse((_, _, i, label))) = heap.pop() {
        let (x, y) = (i % w, i / w);
        let visit = |nx: usize, ny: usize, heap: &mut BinaryHeap<_>, labels: &mut Vec<u8>, order: &mut u64| {
            let ni = ny * w + nx;
            if labels[ni] == UNLABELED {
                labels[ni] = label;
                heap.push(Reverse((prio(grad.data[ni]), *order, ni, label)));
                *order += 1;
            }
        };
        if x > 0 {
            visit(x - 1, y, &mut heap, &mut labels, &mut order);
        }
        if x + 1 < w {
            visit(x + 1, y, &mut heap, &mut labels, &mut order);
        }
        if y > 0 {
            visit(x, y - 1, &mut heap, &mut labels, &mut order);
        }
        if y + 1 < h {
            visit(x, y + 1, &mut heap, &mut labels, &mut order);
        }
    }

    let mut out = BinaryMask::new(w, h);
    for (bit, &label) in out.bits.iter_mut().zip(&labels) {
        *bit = label == FG;
    }
    Ok(out)
}

fn green_channel(img: &RasterImage) -> GrayImage {
    let mut g = GrayImage::zeros(img.width, img.height);
    match img.channels {
        1 => {
            for (o, &v) in g.data.iter_mut().zip(&img.data) {
                *o = v as f64 / 255.0;
            }
        }
        _ => {
            for (i, o) in g.data.iter_mut().enumerate() {
                *o = img.data[i * 3 + 1] as f64 / 255.0;
            }
        }
    }
    g
}
