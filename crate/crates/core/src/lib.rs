//! Automatic guidance and quality assessment for umbilical-artery Doppler imaging.
//!
//! The crate is organized around three pipelines plus their shared primitives:
//!
//! 1. **Probe geometry** — locate the ultrasound probe apex from the green
//!    color-Doppler wedge ([`probe::locate_probe`]) and compute the angle of
//!    insonation for candidate gate locations ([`probe::insonation_angle`]).
//! 2. **Spectrum quality assessment** — segment a pulsed-Doppler spectrum,
//!    extract its envelope, identify individual waveforms, and score them
//!    against the ISUOG criteria ([`spectrum::assess`]).
//! 3. **Evaluation** — sensitivity and mean-L1 angle error of gate predictions
//!    against ground truth under a nearest-centroid matching protocol
//!    ([`eval`]).
//!
//! [`synth`] generates deterministic synthetic fixtures with exact ground
//! truth for all three pipelines; [`loss`] implements the angle-augmented
//! detection loss as standalone, gradient-checked math.

pub mod annotations;
pub mod batch;
pub mod eval;
pub mod hough;
pub mod image;
pub mod inpaint;
pub mod loss;
pub mod probe;
pub mod smooth;
pub mod solver;
pub mod spectrum;
pub mod synth;
pub mod threshold;
pub mod walker;
pub mod watershed;

pub use crate::image::{BinaryMask, GrayImage, RasterImage};
pub use crate::probe::{GateCandidate, InsonationResult, ProbeLocation};
