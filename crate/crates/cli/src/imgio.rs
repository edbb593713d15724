//! PNG input/output and overlay drawing.

use std::path::Path;

use uaqa_core::image::RasterImage;
use uaqa_core::probe::ProbeLocation;

pub fn read_rgb(path: &Path) -> Result<RasterImage, String> {
    let img = image::open(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    RasterImage::new(w, h, 3, rgb.into_raw()).map_err(|e| e.to_string())
}

pub fn write_png(path: &Path, raster: &RasterImage) -> Result<(), String> {
    assert_eq!(raster.channels, 3, "overlay images are RGB");
    let buf = image::RgbImage::from_raw(
        raster.width as u32,
        raster.height as u32,
        raster.data.clone(),
    )
    .expect("buffer length matches dimensions");
    buf.save(path)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn paint(img: &mut RasterImage, x: f64, y: f64, color: [u8; 3]) {
    if x >= 0.0 && y >= 0.0 && (x as usize) < img.width && (y as usize) < img.height {
        img.pixel_mut(x as usize, y as usize).copy_from_slice(&color);
    }
}

/// One-pixel-wide segment between two points, clipped to the image.
pub fn draw_segment(img: &mut RasterImage, a: (f64, f64), b: (f64, f64), color: [u8; 3]) {
    let len = (b.0 - a.0).hypot(b.1 - a.1);
    let steps = (len * 2.0).ceil() as usize + 1;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        paint(img, a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1), color);
    }
}

/// Detected edge lines in red, verification arcs in blue.
pub fn draw_probe_overlay(base: &RasterImage, loc: &ProbeLocation) -> RasterImage {
    let mut out = base.clone();
    let diag = ((out.width * out.width + out.height * out.height) as f64).sqrt();
    for line in &loc.edge_lines {
        let (c, s) = (line.theta.cos(), line.theta.sin());
        let (px, py) = (line.rho * c, line.rho * s);
        let mut t = -diag;
        while t <= diag {
            paint(&mut out, px - t * s, py + t * c, [255, 0, 0]);
            t += 0.5;
        }
    }
    for arc in &loc.arcs {
        let steps = (std::f64::consts::TAU * arc.radius * 2.0).ceil() as usize + 1;
        for i in 0..steps {
            let phi = std::f64::consts::TAU * i as f64 / steps as f64;
            paint(
                &mut out,
                arc.center.x + arc.radius * phi.cos(),
                arc.center.y + arc.radius * phi.sin(),
                [0, 0, 255],
            );
        }
    }
    out
}
