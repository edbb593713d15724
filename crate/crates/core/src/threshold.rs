//! Per-channel RGB thresholding, used to pull the green Doppler wedge out of
//! a color-Doppler frame.

use crate::image::{BinaryMask, ImageError, RasterImage};

/// Inclusive per-channel bounds. A pixel passes iff every channel lies within
/// its `[min, max]` range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelBounds {
    pub r: (u8, u8),
    pub g: (u8, u8),
    pub b: (u8, u8),
}

impl Default for ChannelBounds {
    fn default() -> Self {
        Self::green_doppler()
    }
}

impl ChannelBounds {
    /// Default "large green, low red and blue" rule: G >= 180, R <= 100, B <= 100.
    pub fn green_doppler() -> Self {
        Self {
            r: (0, 100),
            g: (180, 255),
            b: (0, 100),
        }
    }

    #[inline]
    pub fn accepts(&self, rgb: &[u8]) -> bool {
        let inside = |v: u8, (lo, hi): (u8, u8)| v >= lo && v <= hi;
        inside(rgb[0], self.r) && inside(rgb[1], self.g) && inside(rgb[2], self.b)
    }
}

/// Mask of pixels whose channels all satisfy `rule`.
pub fn threshold_rgb(img: &RasterImage, rule: &ChannelBounds) -> Result<BinaryMask, ImageError> {
    if img.channels != 3 {
        return Err(ImageError::ChannelMismatch {
            expected: 3,
            got: img.channels,
        });
    }
    let mut mask = BinaryMask::new(img.width, img.height);
    for (i, bit) in mask.bits.iter_mut().enumerate() {
        *bit = rule.accepts(&img.data[i * 3..i * 3 + 3]);
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_green_passes() {
        let rule = ChannelBounds::green_doppler();
        assert!(rule.accepts(&[0, 255, 0]));
    }

    #[test]
    fn white_fails() {
        let rule = ChannelBounds::green_doppler();
        assert!(!rule.accepts(&[255, 255, 255]));
    }

    #[test]
    fn uniform_image_all_true() {
        let mut img = RasterImage::filled(8, 4, 3, 0);
        for i in 0..img.width * img.height {
            img.data[i * 3] = 20;
            img.data[i * 3 + 1] = 200;
            img.data[i * 3 + 2] = 30;
        }
        let mask = threshold_rgb(&img, &ChannelBounds::green_doppler()).unwrap();
        assert_eq!(mask.count(), 32);
    }

    #[test]
    fn grayscale_rejected() {
        let img = RasterImage::filled(4, 4, 1, 0);
        assert!(threshold_rgb(&img, &ChannelBounds::green_doppler()).is_err());
    }

    #[test]
    fn rethreshold_of_rendered_mask_is_identity() {
        // render an arbitrary mask as pure green on black, re-apply the rule
        let mut mask = BinaryMask::new(6, 6);
        mask.set(1, 2, true);
        mask.set(4, 4, true);
        let mut img = RasterImage::filled(6, 6, 3, 0);
        for y in 0..6 {
            for x in 0..6 {
                if mask.get(x, y) {
                    img.pixel_mut(x, y)[1] = 255;
                }
            }
        }
        let again = threshold_rgb(&img, &ChannelBounds::green_doppler()).unwrap();
        assert_eq!(again, mask);
    }
}
