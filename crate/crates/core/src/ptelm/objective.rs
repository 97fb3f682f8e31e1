//! Objective values and stationarity residuals of the joint problem
//!
//! ```text
//! L(βs, M) = ½‖Ht·M·βs − Yt‖² + (λ1/2)‖Hs·βs − Ys‖² + (λ2/2)‖βs‖₂,₁ + (λ3/2)‖M·βs‖²
//! ```
//!
//! together with the ε-smoothed variant that the reweighted inner solver
//! decreases monotonically.

use super::PtelmHyperparams;
use crate::error::{Error, Result};
use crate::numerics::{frobenius_norm, l21_norm, DenseMatrix};

pub(crate) fn check_shapes(
    h_s: &DenseMatrix,
    y_s: &DenseMatrix,
    h_t: &DenseMatrix,
    y_t: &DenseMatrix,
    beta_s: Option<&DenseMatrix>,
    m: Option<&DenseMatrix>,
) -> Result<()> {
    let l = h_s.cols();
    let c = y_s.cols();
    if h_s.rows() != y_s.rows() {
        return Err(Error::dims("ptelm", format!("Y_s with {} rows", h_s.rows()), y_s.rows()));
    }
    if h_t.rows() != y_t.rows() {
        return Err(Error::dims("ptelm", format!("Y_t with {} rows", h_t.rows()), y_t.rows()));
    }
    if h_t.cols() != l {
        return Err(Error::dims("ptelm", format!("H_t with {l} cols"), h_t.cols()));
    }
    if y_t.cols() != c {
        return Err(Error::dims("ptelm", format!("Y_t with {c} cols"), y_t.cols()));
    }
    if let Some(b) = beta_s {
        if b.shape() != (l, c) {
            return Err(Error::dims("ptelm", format!("beta_s {l}x{c}"), format!("{:?}", b.shape())));
        }
    }
    if let Some(m) = m {
        if m.shape() != (l, l) {
            return Err(Error::dims("ptelm", format!("M {l}x{l}"), format!("{:?}", m.shape())));
        }
    }
    Ok(())
}

/// The four terms of the objective, before weighting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveTerms {
    /// `‖Ht·M·βs − Yt‖²`
    pub target_loss: f64,
    /// `‖Hs·βs − Ys‖²`
    pub source_loss: f64,
    /// `‖βs‖₂,₁`
    pub row_sparsity: f64,
    /// `‖M·βs‖²`
    pub target_weight_norm: f64,
}

impl ObjectiveTerms {
    pub fn weighted(&self, hp: &PtelmHyperparams) -> f64 {
        0.5 * self.target_loss
            + 0.5 * hp.lambda1 * self.source_loss
            + 0.5 * hp.lambda2 * self.row_sparsity
            + 0.5 * hp.lambda3 * self.target_weight_norm
    }
}

pub fn objective_terms(
    h_s: &DenseMatrix,
    y_s: &DenseMatrix,
    h_t: &DenseMatrix,
    y_t: &DenseMatrix,
    beta_s: &DenseMatrix,
    m: &DenseMatrix,
) -> Result<ObjectiveTerms> {
    check_shapes(h_s, y_s, h_t, y_t, Some(beta_s), Some(m))?;
    let beta_t = m.matmul(beta_s)?;
    Ok(ObjectiveTerms {
        target_loss: frobenius_norm(&h_t.matmul(&beta_t)?.sub(y_t)?).powi(2),
        source_loss: frobenius_norm(&h_s.matmul(beta_s)?.sub(y_s)?).powi(2),
        row_sparsity: l21_norm(beta_s),
        target_weight_norm: frobenius_norm(&beta_t).powi(2),
    })
}

/// Joint objective `L(βs, M)`.
pub fn objective(
    h_s: &DenseMatrix,
    y_s: &DenseMatrix,
    h_t: &DenseMatrix,
    y_t: &DenseMatrix,
    beta_s: &DenseMatrix,
    m: &DenseMatrix,
    hp: &PtelmHyperparams,
) -> Result<f64> {
    Ok(objective_terms(h_s, y_s, h_t, y_t, beta_s, m)?.weighted(hp))
}

/// Objective written as a transform of the target hidden features,
/// `½‖H̃t·β − Yt‖² + (λ1/2)‖Hs·β − Ys‖² + (λ2/2)‖β‖₂,₁` with `H̃t = Ht·M`.
///
/// Equals [`objective`] when `λ3 = 0`; the `λ3` term is dropped here.
pub fn transformed_objective(
    h_s: &DenseMatrix,
    y_s: &DenseMatrix,
    h_t: &DenseMatrix,
    y_t: &DenseMatrix,
    beta: &DenseMatrix,
    m: &DenseMatrix,
    hp: &PtelmHyperparams,
) -> Result<f64> {
    check_shapes(h_s, y_s, h_t, y_t, Some(beta), Some(m))?;
    let h_t_tilde = h_t.matmul(m)?;
    let target = frobenius_norm(&h_t_tilde.matmul(beta)?.sub(y_t)?).powi(2);
    let source = frobenius_norm(&h_s.matmul(beta)?.sub(y_s)?).powi(2);
    Ok(0.5 * target + 0.5 * hp.lambda1 * source + 0.5 * hp.lambda2 * l21_norm(beta))
}

/// Smoothed row penalty `φε(r) = r − (ε/2)·ln(1 + 2r/ε)`.
///
/// `φε'(r)/(2r) = 1/(2r + ε)` is exactly the reweighting entry, which makes
/// each reweighted solve a majorize-minimize step on the smoothed objective.
pub fn smoothed_row_penalty(r: f64, epsilon: f64) -> f64 {
    r - 0.5 * epsilon * (2.0 * r / epsilon).ln_1p()
}

/// Objective with `‖βs‖₂,₁` replaced by `Σᵢ φε(‖βsⁱ‖)`; the quantity the
/// inner reweighted loop never increases.
pub fn smoothed_objective(
    h_s: &DenseMatrix,
    y_s: &DenseMatrix,
    h_t: &DenseMatrix,
    y_t: &DenseMatrix,
    beta_s: &DenseMatrix,
    m: &DenseMatrix,
    hp: &PtelmHyperparams,
) -> Result<f64> {
    let terms = objective_terms(h_s, y_s, h_t, y_t, beta_s, m)?;
    let smooth: f64 = beta_s
        .row_norms()
        .iter()
        .map(|&r| smoothed_row_penalty(r, hp.epsilon))
        .sum();
    Ok(ObjectiveTerms {
        row_sparsity: smooth,
        ..terms
    }
    .weighted(hp))
}

/// Norm of `MᵀHtᵀ(Ht·M·βs − Yt) + λ1·Hsᵀ(Hs·βs − Ys) + λ2·D·βs + λ3·MᵀM·βs`,
/// the βs-gradient with the ℓ2,1 term linearized through `D`.
#[allow(clippy::too_many_arguments)]
pub fn beta_stationarity_residual(
    h_s: &DenseMatrix,
    y_s: &DenseMatrix,
    h_t: &DenseMatrix,
    y_t: &DenseMatrix,
    beta_s: &DenseMatrix,
    m: &DenseMatrix,
    d: &DenseMatrix,
    hp: &PtelmHyperparams,
) -> Result<f64> {
    check_shapes(h_s, y_s, h_t, y_t, Some(beta_s), Some(m))?;
    let beta_t = m.matmul(beta_s)?;
    let target = m.t_matmul(&h_t.t_matmul(&h_t.matmul(&beta_t)?.sub(y_t)?)?)?;
    let source = h_s.t_matmul(&h_s.matmul(beta_s)?.sub(y_s)?)?.scale(hp.lambda1);
    let sparsity = d.matmul(beta_s)?.scale(hp.lambda2);
    let weight = m.t_matmul(&beta_t)?.scale(hp.lambda3);
    let grad = target.add(&source)?.add(&sparsity)?.add(&weight)?;
    Ok(frobenius_norm(&grad))
}

/// Norm of `Htᵀ(Ht·M·βs − Yt)·βsᵀ + λ3·M·βs·βsᵀ + δ·(HtᵀHt + λ3·I)·M`, the
/// M-gradient of the objective plus `(δ/2)·tr(Mᵀ(HtᵀHt + λ3·I)M)`.
pub fn m_stationarity_residual(
    h_t: &DenseMatrix,
    y_t: &DenseMatrix,
    beta_s: &DenseMatrix,
    m: &DenseMatrix,
    lambda3: f64,
    delta: f64,
) -> Result<f64> {
    let resid = h_t.matmul(&m.matmul(beta_s)?)?.sub(y_t)?;
    let loss = h_t.t_matmul(&resid)?.matmul_t(beta_s)?;
    let weight = m.matmul(&beta_s.matmul_t(beta_s)?)?.scale(lambda3);
    let reg_op = h_t.gram().add_scaled_identity(lambda3)?;
    let reg = reg_op.matmul(m)?.scale(delta);
    Ok(frobenius_norm(&loss.add(&weight)?.add(&reg)?))
}
