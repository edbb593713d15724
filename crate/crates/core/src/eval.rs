//! Sensitivity-based evaluation of gate predictions: nearest-centroid
//! matching, sensitivity(n), mean L1 angle error, and the threshold sweep.

use thiserror::Error;

use crate::probe::GateCandidate;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("no ground-truth boxes")]
    NoGroundTruth,
    #[error("no matched pairs within the threshold")]
    NoMatches,
}

/// Nearest-prediction assignment. Predictions may repeat (many-to-one);
/// every ground truth appears exactly once across `pairs` and `unmatched_gt`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchSet {
    /// (gt index, pred index, Euclidean centroid distance)
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_gt: Vec<usize>,
}

/// Sensitivity and mean angle error as functions of the match threshold n.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalCurve {
    pub n_values: Vec<f64>,
    pub sensitivity: Vec<f64>,
    /// `None` marks thresholds with no qualifying pairs.
    pub mean_angle_err: Vec<Option<f64>>,
}

/// For each ground truth, the prediction with the smallest centroid distance;
/// ties break toward the lower prediction index.
pub fn match_candidates(gts: &[GateCandidate], preds: &[GateCandidate]) -> MatchSet {
    let mut pairs = Vec::new();
    let mut unmatched_gt = Vec::new();
    for (gi, gt) in gts.iter().enumerate() {
        let gc = gt.centroid();
        let mut best: Option<(usize, f64)> = None;
        for (pi, pred) in preds.iter().enumerate() {
            let d = gc.distance(&pred.centroid());
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((pi, d));
            }
        }
        match best {
            Some((pi, d)) => pairs.push((gi, pi, d)),
            None => unmatched_gt.push(gi),
        }
    }
    MatchSet { pairs, unmatched_gt }
}

/// Percentage of ground truths whose nearest prediction is strictly closer
/// than `n` pixels.
pub fn sensitivity(match_set: &MatchSet, n_gts: usize, n: f64) -> Result<f64, EvalError> {
    if n_gts == 0 {
        return Err(EvalError::NoGroundTruth);
    }
    let hit = match_set.pairs.iter().filter(|&&(_, _, d)| d < n).count();
    Ok(100.0 * hit as f64 / n_gts as f64)
}

/// Fold an absolute angle difference to [0, 90] for undirected lines.
fn fold_residual(d: f64) -> f64 {
    let m = d.abs() % 180.0;
    m.min(180.0 - m)
}

/// Mean |a* − a| over matched pairs with distance < n. With `fold`, each
/// residual maps to [0, 90].
pub fn mean_angle_error(
    gts: &[GateCandidate],
    preds: &[GateCandidate],
    match_set: &MatchSet,
    n: f64,
    fold: bool,
) -> Result<f64, EvalError> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for &(gi, pi, d) in &match_set.pairs {
        if d < n {
            let resid = (gts[gi].vessel_angle_deg - preds[pi].vessel_angle_deg).abs();
            sum += if fold { fold_residual(resid) } else { resid };
            count += 1;
        }
    }
    if count == 0 {
        return Err(EvalError::NoMatches);
    }
    Ok(sum / count as f64)
}

/// Evaluate sensitivity and mean angle error over a sweep of thresholds.
pub fn sweep(
    gts: &[GateCandidate],
    preds: &[GateCandidate],
    n_range: &[f64],
    fold: bool,
) -> Result<EvalCurve, EvalError> {
    let ms = match_candidates(gts, preds);
    let mut curve = EvalCurve {
        n_values: n_range.to_vec(),
        sensitivity: Vec::with_capacity(n_range.len()),
        mean_angle_err: Vec::with_capacity(n_range.len()),
    };
    for &n in n_range {
        curve.sensitivity.push(sensitivity(&ms, gts.len(), n)?);
        curve
            .mean_angle_err
            .push(mean_angle_error(gts, preds, &ms, n, fold).ok());
    }
    Ok(curve)
}
