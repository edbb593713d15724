//! Detection-loss mathematics: the two-term classification + box-regression
//! objective and its angle-regression extension, with hand-derived gradients.
//!
//! Kept free of any network machinery so the objective itself can be
//! verified against finite differences.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LossError {
    #[error("probability {p} with label {p_star} is outside the admissible domain")]
    Domain { p: f64, p_star: u8 },
    #[error("residual component {value} sits at the smooth-L1 kink (|x| = 1)")]
    Kink { value: f64 },
    #[error("predictions ({preds}) and truths ({truths}) differ in length")]
    LengthMismatch { preds: usize, truths: usize },
}

/// One proposed region: validity probability, 4 box parameters, vessel angle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RoiPrediction {
    pub p: f64,
    pub t: [f64; 4],
    pub a: f64,
}

/// Ground truth for one region; `p_star` is 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RoiTruth {
    pub p_star: u8,
    pub t_star: [f64; 4],
    pub a_star: f64,
}

/// Index-aligned predictions and truths.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiBatch {
    pub predictions: Vec<RoiPrediction>,
    pub truths: Vec<RoiTruth>,
}

impl RoiBatch {
    pub fn new(predictions: Vec<RoiPrediction>, truths: Vec<RoiTruth>) -> Result<Self, LossError> {
        if predictions.len() != truths.len() {
            return Err(LossError::LengthMismatch {
                preds: predictions.len(),
                truths: truths.len(),
            });
        }
        Ok(Self { predictions, truths })
    }
}

/// λ weights the box term, μ the angle term; the classification sum is
/// normalized by `n_cls` and both regression sums by `n_reg`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LossConfig {
    pub lambda: f64,
    pub mu: f64,
    pub n_cls: usize,
    pub n_reg: usize,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            mu: 10.0,
            n_cls: 1,
            n_reg: 1,
        }
    }
}

/// 0.5x² for |x| < 1, |x| − 0.5 otherwise.
pub fn smooth_l1(x: f64) -> f64 {
    if x.abs() < 1.0 {
        0.5 * x * x
    } else {
        x.abs() - 0.5
    }
}

fn smooth_l1_grad(x: f64) -> Result<f64, LossError> {
    if (x.abs() - 1.0).abs() < 1e-9 {
        return Err(LossError::Kink { value: x });
    }
    Ok(if x.abs() < 1.0 { x } else { x.signum() })
}

/// Binary log loss −[p*·ln p + (1−p*)·ln(1−p)].
pub fn cls_loss(p: f64, p_star: u8) -> Result<f64, LossError> {
    match p_star {
        1 if p > 0.0 && p <= 1.0 => Ok(-p.ln()),
        0 if (0.0..1.0).contains(&p) => Ok(-(1.0 - p).ln()),
        _ => Err(LossError::Domain { p, p_star }),
    }
}

fn reg_term(pred: &[f64], truth: &[f64], gate: u8) -> f64 {
    if gate == 0 {
        return 0.0;
    }
    pred.iter().zip(truth).map(|(a, b)| smooth_l1(a - b)).sum()
}

/// Classification + gated box regression.
pub fn faster_rcnn_loss(batch: &RoiBatch, cfg: &LossConfig) -> Result<f64, LossError> {
    let mut cls = 0.0;
    let mut reg = 0.0;
    for (pred, truth) in batch.predictions.iter().zip(&batch.truths) {
        cls += cls_loss(pred.p, truth.p_star)?;
        reg += reg_term(&pred.t, &truth.t_star, truth.p_star);
    }
    Ok(cls / cfg.n_cls as f64 + cfg.lambda * reg / cfg.n_reg as f64)
}

/// Full objective: classification + box regression + gated angle regression.
pub fn total_loss(batch: &RoiBatch, cfg: &LossConfig) -> Result<f64, LossError> {
    let base = faster_rcnn_loss(batch, cfg)?;
    let mut ang = 0.0;
    for (pred, truth) in batch.predictions.iter().zip(&batch.truths) {
        if truth.p_star != 0 {
            ang += smooth_l1(pred.a - truth.a_star);
        }
    }
    Ok(base + cfg.mu * ang / cfg.n_reg as f64)
}

/// Analytic partial derivatives of [`total_loss`], index-aligned with the
/// batch. Errors if any gated residual sits at the smooth-L1 kink.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGradient {
    pub d_p: Vec<f64>,
    pub d_t: Vec<[f64; 4]>,
    pub d_a: Vec<f64>,
}

pub fn total_loss_gradient(batch: &RoiBatch, cfg: &LossConfig) -> Result<LossGradient, LossError> {
    let n = batch.predictions.len();
    let mut grad = LossGradient {
        d_p: vec![0.0; n],
        d_t: vec![[0.0; 4]; n],
        d_a: vec![0.0; n],
    };
    let n_cls = cfg.n_cls as f64;
    let n_reg = cfg.n_reg as f64;
    for (i, (pred, truth)) in batch.predictions.iter().zip(&batch.truths).enumerate() {
        // validate domain like the forward pass
        cls_loss(pred.p, truth.p_star)?;
        grad.d_p[i] = match truth.p_star {
            1 => -1.0 / (pred.p * n_cls),
            _ => 1.0 / ((1.0 - pred.p) * n_cls),
        };
        if truth.p_star != 0 {
            for k in 0..4 {
                grad.d_t[i][k] =
                    cfg.lambda * smooth_l1_grad(pred.t[k] - truth.t_star[k])? / n_reg;
            }
            grad.d_a[i] = cfg.mu * smooth_l1_grad(pred.a - truth.a_star)? / n_reg;
        }
    }
    Ok(grad)
}
