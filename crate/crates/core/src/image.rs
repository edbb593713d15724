//! Pixel containers and the small set of raster operations shared by the
//! probe-geometry and spectrum pipelines.
//!
//! Coordinate convention used throughout the crate: origin at the top-left
//! corner, `x` grows rightwards, `y` grows downwards. Angles of undirected
//! lines are degrees from the +x axis in `[0, 180)`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("expected {expected} channels, got {got}")]
    ChannelMismatch { expected: u8, got: u8 },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("data length {len} does not match {width}x{height}x{channels}")]
    BadLength {
        len: usize,
        width: usize,
        height: usize,
        channels: u8,
    },
}

/// 8-bit raster image, row-major, 1 or 3 channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub channels: u8,
    pub data: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: u8, data: Vec<u8>) -> Result<Self, ImageError> {
        if data.len() != width * height * channels as usize {
            return Err(ImageError::BadLength {
                len: data.len(),
                width,
                height,
                channels,
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, channels: u8, value: u8) -> Self {
        Self {
            width,
            height,
            channels,
            data: vec![value; width * height * channels as usize],
        }
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let c = self.channels as usize;
        let i = (y * self.width + x) * c;
        &self.data[i..i + c]
    }

    #[inline]
    pub fn pixel_mut(&mut self, x: usize, y: usize) -> &mut [u8] {
        let c = self.channels as usize;
        let i = (y * self.width + x) * c;
        &mut self.data[i..i + c]
    }

    /// ITU-R 601 luma, rescaled to `[0,1]`.
    pub fn to_gray(&self) -> GrayImage {
        let mut out = GrayImage::zeros(self.width, self.height);
        match self.channels {
            1 => {
                for (o, &v) in out.data.iter_mut().zip(&self.data) {
                    *o = v as f64 / 255.0;
                }
            }
            _ => {
                for (i, o) in out.data.iter_mut().enumerate() {
                    let p = &self.data[i * 3..i * 3 + 3];
                    let luma = 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64;
                    *o = luma / 255.0;
                }
            }
        }
        out
    }
}

/// Single-channel real-valued image in `[0,1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl GrayImage {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Sobel gradient magnitude with clamped borders.
    pub fn gradient_magnitude(&self) -> GrayImage {
        let (w, h) = (self.width, self.height);
        let mut out = GrayImage::zeros(w, h);
        let at = |x: isize, y: isize| -> f64 {
            let xc = x.clamp(0, w as isize - 1) as usize;
            let yc = y.clamp(0, h as isize - 1) as usize;
            self.get(xc, yc)
        };
        for y in 0..h as isize {
            for x in 0..w as isize {
                let gx = at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)
                    - at(x - 1, y - 1)
                    - 2.0 * at(x - 1, y)
                    - at(x - 1, y + 1);
                let gy = at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)
                    - at(x - 1, y - 1)
                    - 2.0 * at(x, y - 1)
                    - at(x + 1, y - 1);
                out.set(x as usize, y as usize, (gx * gx + gy * gy).sqrt());
            }
        }
        out
    }
}

/// Boolean per-pixel mask with the same dimensions as the image it derives from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn invert(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    /// One step of 8-neighborhood erosion; pixels on the image border erode.
    fn erode_step(&self) -> BinaryMask {
        let (w, h) = (self.width, self.height);
        let mut out = BinaryMask::new(w, h);
        for y in 0..h {
            for x in 0..w {
                if !self.get(x, y) {
                    continue;
                }
                let mut keep = x > 0 && y > 0 && x + 1 < w && y + 1 < h;
                if keep {
                    'nb: for dy in -1isize..=1 {
                        for dx in -1isize..=1 {
                            if !self.get((x as isize + dx) as usize, (y as isize + dy) as usize) {
                                keep = false;
                                break 'nb;
                            }
                        }
                    }
                }
                out.set(x, y, keep);
            }
        }
        out
    }

    fn dilate_step(&self) -> BinaryMask {
        let (w, h) = (self.width, self.height);
        let mut out = BinaryMask::new(w, h);
        for y in 0..h {
            for x in 0..w {
                if !self.get(x, y) {
                    continue;
                }
                for dy in -1isize..=1 {
                    for dx in -1isize..=1 {
                        let nx = x as isize + dx;
                        let ny = y as isize + dy;
                        if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                            out.set(nx as usize, ny as usize, true);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn erode(&self, radius: usize) -> BinaryMask {
        let mut m = self.clone();
        for _ in 0..radius {
            m = m.erode_step();
        }
        m
    }

    pub fn dilate(&self, radius: usize) -> BinaryMask {
        let mut m = self.clone();
        for _ in 0..radius {
            m = m.dilate_step();
        }
        m
    }

    /// 4-connected flood fill over `false` pixels starting from every border
    /// pixel; returns the set of reached background pixels.
    pub fn background_reachable_from_border(&self) -> BinaryMask {
        let (w, h) = (self.width, self.height);
        let mut seen = BinaryMask::new(w, h);
        let mut stack = Vec::new();
        let push = |x: usize, y: usize, seen: &mut BinaryMask, stack: &mut Vec<(usize, usize)>| {
            if !self.get(x, y) && !seen.get(x, y) {
                seen.set(x, y, true);
                stack.push((x, y));
            }
        };
        for x in 0..w {
            push(x, 0, &mut seen, &mut stack);
            push(x, h - 1, &mut seen, &mut stack);
        }
        for y in 0..h {
            push(0, y, &mut seen, &mut stack);
            push(w - 1, y, &mut seen, &mut stack);
        }
        while let Some((x, y)) = stack.pop() {
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
                push(nx, ny, &mut seen, &mut stack);
            }
        }
        seen
    }
}

/// Real-valued 2-D point in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}
