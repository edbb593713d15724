//! Run configuration: JSON file with per-module sections, CLI flags override.

use std::path::Path;

use serde::{Deserialize, Serialize};
use uaqa_core::probe::ProbeConfig;
use uaqa_core::spectrum::SpectrumConfig;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    /// Fold angle residuals to [0, 90] before averaging.
    pub fold: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub probe: ProbeConfig,
    pub spectrum: SpectrumConfig,
    pub eval: EvalSection,
    /// Worker count for batches: 1 = sequential, 0 = all cores.
    pub jobs: usize,
    /// Emit overlay images next to the reports.
    pub overlay: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            probe: ProbeConfig::default(),
            spectrum: SpectrumConfig::default(),
            eval: EvalSection::default(),
            jobs: 1,
            overlay: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let cfg = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                serde_json::from_str(&text)
                    .map_err(|e| format!("invalid config {}: {e}", p.display()))?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        let p = &self.probe;
        if !(0.0..=1.0).contains(&p.min_votes_frac) {
            return Err(format!("probe.min_votes_frac {} outside [0,1]", p.min_votes_frac));
        }
        if p.angle_bins == 0 {
            return Err("probe.angle_bins must be at least 1".into());
        }
        if p.rho_resolution <= 0.0 {
            return Err(format!("probe.rho_resolution {} must be positive", p.rho_resolution));
        }
        if p.refine_band_px <= 0.0 {
            return Err(format!("probe.refine_band_px {} must be positive", p.refine_band_px));
        }
        if p.arc_radius_frac.0 < 0.0 || p.arc_radius_frac.0 >= p.arc_radius_frac.1 {
            return Err(format!(
                "probe.arc_radius_frac ({}, {}) must be an increasing non-negative pair",
                p.arc_radius_frac.0, p.arc_radius_frac.1
            ));
        }
        let s = &self.spectrum;
        if !(0.0..=1.0).contains(&s.overlay_std_threshold) {
            return Err(format!(
                "spectrum.overlay_std_threshold {} outside [0,1]",
                s.overlay_std_threshold
            ));
        }
        if s.beta <= 0.0 {
            return Err(format!("spectrum.beta {} must be positive", s.beta));
        }
        if s.envelope_sigma < 0.0 {
            return Err(format!("spectrum.envelope_sigma {} must be non-negative", s.envelope_sigma));
        }
        if s.min_peak_distance == 0 {
            return Err("spectrum.min_peak_distance must be at least 1".into());
        }
        let (good, poor) = s.clarity_thresholds;
        if !(0.0..=1.0).contains(&good) || !(0.0..=1.0).contains(&poor) || good < poor {
            return Err(format!(
                "spectrum.clarity_thresholds ({good}, {poor}) must satisfy 0 <= poor <= good <= 1"
            ));
        }
        for (name, v) in [
            ("fg_min_gray", s.seed_policy.fg_min_gray),
            ("bg_top_rows_frac", s.seed_policy.bg_top_rows_frac),
            ("bg_top_max_gray", s.seed_policy.bg_top_max_gray),
            ("bg_border_max_gray", s.seed_policy.bg_border_max_gray),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("spectrum.seed_policy.{name} {v} outside [0,1]"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        let cfg: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg.jobs, 1);
        assert_eq!(cfg.probe.angle_bins, ProbeConfig::default().angle_bins);
    }

    #[test]
    fn partial_nested_override() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"spectrum": {"seed_policy": {"fg_min_gray": 0.2}}}"#).unwrap();
        assert_eq!(cfg.spectrum.seed_policy.fg_min_gray, 0.2);
        assert_eq!(cfg.spectrum.beta, SpectrumConfig::default().beta);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"probes": {}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"probe": {"bogus": 1}}"#).is_err());
    }

    #[test]
    fn out_of_range_rejected() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"probe": {"min_votes_frac": 1.5}}"#).unwrap();
        assert!(cfg.validate().is_err());
    }
}
