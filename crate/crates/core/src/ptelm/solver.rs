//! Block updates: the reweighted βs solve and the closed-form M update.

use super::objective::{check_shapes, smoothed_objective};
use super::PtelmHyperparams;
use crate::error::{Error, Result};
use crate::numerics::{frobenius_norm, solve_spd, DenseMatrix};

/// Diagonal reweighting matrix with `D[i,i] = 1 / (2‖βsⁱ‖ + ε)`.
pub fn subgradient_d(beta_s: &DenseMatrix, epsilon: f64) -> DenseMatrix {
    DenseMatrix::from_diagonal(&reweighting(beta_s, epsilon))
}

fn reweighting(beta_s: &DenseMatrix, epsilon: f64) -> Vec<f64> {
    beta_s.row_norms().iter().map(|r| 1.0 / (2.0 * r + epsilon)).collect()
}

/// Quantities that stay fixed while the inner loop only changes `D`.
pub(crate) struct BetaSystem {
    /// `λ1·HsᵀHs + MᵀHtᵀHt·M + λ3·MᵀM`
    base: DenseMatrix,
    /// `λ1·HsᵀYs + MᵀHtᵀYt`
    rhs: DenseMatrix,
    lambda2: f64,
}

impl BetaSystem {
    pub(crate) fn new(
        h_s: &DenseMatrix,
        h_t: &DenseMatrix,
        m: &DenseMatrix,
        y_s: &DenseMatrix,
        y_t: &DenseMatrix,
        hp: &PtelmHyperparams,
    ) -> Result<Self> {
        check_shapes(h_s, y_s, h_t, y_t, None, Some(m))?;
        let ht_m = h_t.matmul(m)?;
        let mut base = h_s.gram().scale(hp.lambda1).add(&ht_m.gram())?;
        if hp.lambda3 != 0.0 {
            base = base.add(&m.gram().scale(hp.lambda3))?;
        }
        let rhs = h_s.t_matmul(y_s)?.scale(hp.lambda1).add(&ht_m.t_matmul(y_t)?)?;
        Ok(Self {
            base,
            rhs,
            lambda2: hp.lambda2,
        })
    }

    pub(crate) fn solve(&self, d_diag: &[f64]) -> Result<DenseMatrix> {
        let scaled: Vec<f64> = d_diag.iter().map(|d| self.lambda2 * d).collect();
        let mut lhs = self.base.clone();
        if self.lambda2 != 0.0 {
            lhs = lhs.add(&DenseMatrix::from_diagonal(&scaled))?;
        }
        solve_spd(&lhs, &self.rhs)
    }
}

/// One closed-form βs update for a fixed reweighting matrix `D`:
/// `(λ1·HsᵀHs + MᵀHtᵀHt·M + λ2·D + λ3·MᵀM)⁻¹ (λ1·HsᵀYs + MᵀHtᵀYt)`.
pub fn update_beta_s(
    h_s: &DenseMatrix,
    h_t: &DenseMatrix,
    m: &DenseMatrix,
    y_s: &DenseMatrix,
    y_t: &DenseMatrix,
    d: &DenseMatrix,
    hp: &PtelmHyperparams,
) -> Result<DenseMatrix> {
    let l = h_s.cols();
    if d.shape() != (l, l) {
        return Err(Error::dims("update_beta_s", format!("D {l}x{l}"), format!("{:?}", d.shape())));
    }
    BetaSystem::new(h_s, h_t, m, y_s, y_t, hp)?.solve(&d.diagonal())
}

/// Output of the reweighted βs solve.
#[derive(Debug, Clone)]
pub struct InnerSolve {
    pub beta_s: DenseMatrix,
    /// Smoothed objective after each βs update.
    pub surrogate_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Reweighted solve for βs with `M` fixed, starting from `D = I`.
///
/// Alternates the closed-form update with a fresh `D` until the relative
/// change `‖βᵗ⁺¹ − βᵗ‖ / (1 + ‖βᵗ‖)` drops below `inner_tol` or
/// `inner_max_iters` updates have run.
pub fn solve_beta_s(
    h_s: &DenseMatrix,
    h_t: &DenseMatrix,
    m: &DenseMatrix,
    y_s: &DenseMatrix,
    y_t: &DenseMatrix,
    hp: &PtelmHyperparams,
) -> Result<DenseMatrix> {
    Ok(solve_beta_s_traced(h_s, h_t, m, y_s, y_t, hp)?.beta_s)
}

pub fn solve_beta_s_traced(
    h_s: &DenseMatrix,
    h_t: &DenseMatrix,
    m: &DenseMatrix,
    y_s: &DenseMatrix,
    y_t: &DenseMatrix,
    hp: &PtelmHyperparams,
) -> Result<InnerSolve> {
    let start = vec![1.0; h_s.cols()];
    reweighted_solve(h_s, h_t, m, y_s, y_t, hp, start)
}

/// Reweighted solve whose first update uses `D = subgradient_d(warm)`.
///
/// Every update then minimizes a quadratic majorizer of the smoothed
/// objective at the previous iterate, so the smoothed objective never rises
/// above its value at `warm`, however early the loop stops.
pub fn solve_beta_s_warm(
    h_s: &DenseMatrix,
    h_t: &DenseMatrix,
    m: &DenseMatrix,
    y_s: &DenseMatrix,
    y_t: &DenseMatrix,
    warm: &DenseMatrix,
    hp: &PtelmHyperparams,
) -> Result<InnerSolve> {
    check_shapes(h_s, y_s, h_t, y_t, Some(warm), Some(m))?;
    reweighted_solve(h_s, h_t, m, y_s, y_t, hp, reweighting(warm, hp.epsilon))
}

fn reweighted_solve(
    h_s: &DenseMatrix,
    h_t: &DenseMatrix,
    m: &DenseMatrix,
    y_s: &DenseMatrix,
    y_t: &DenseMatrix,
    hp: &PtelmHyperparams,
    mut d: Vec<f64>,
) -> Result<InnerSolve> {
    let system = BetaSystem::new(h_s, h_t, m, y_s, y_t, hp)?;
    let mut beta = system.solve(&d)?;
    let mut trace = vec![smoothed_objective(h_s, y_s, h_t, y_t, &beta, m, hp)?];
    let mut iterations = 1;
    // without the ℓ2,1 term D has no effect and one solve is exact
    let mut converged = hp.lambda2 == 0.0;
    while !converged && iterations < hp.inner_max_iters {
        d = reweighting(&beta, hp.epsilon);
        let next = system.solve(&d)?;
        iterations += 1;
        let change = frobenius_norm(&next.sub(&beta)?) / (1.0 + frobenius_norm(&beta));
        beta = next;
        trace.push(smoothed_objective(h_s, y_s, h_t, y_t, &beta, m, hp)?);
        if change < hp.inner_tol {
            converged = true;
            break;
        }
    }
    Ok(InnerSolve {
        beta_s: beta,
        surrogate_trace: trace,
        iterations,
        converged,
    })
}

/// Scale-aware Gram regularization `δ = rel·tr(βs·βsᵀ)/L`.
pub fn gram_delta(beta_s: &DenseMatrix, rel: f64) -> f64 {
    rel * frobenius_norm(beta_s).powi(2) / beta_s.rows() as f64
}

/// Closed-form projection update
/// `M = (HtᵀHt + λ3·I)⁻¹ HtᵀYt·βsᵀ (βs·βsᵀ + δ·I)⁻¹`.
///
/// `βs·βsᵀ` is `L×L` with rank at most `c`, so `δ` keeps the inverse defined.
/// The right factor is evaluated as `βs(βsᵀβs + δ·I)⁻¹`, a `c×c` solve that
/// is algebraically identical and stays defined at `δ = 0` whenever `βs` has
/// full column rank.
pub fn update_m(h_t: &DenseMatrix, y_t: &DenseMatrix, beta_s: &DenseMatrix, lambda3: f64, delta: f64) -> Result<DenseMatrix> {
    let l = beta_s.rows();
    let c = beta_s.cols();
    if h_t.cols() != l {
        return Err(Error::dims("update_m", format!("H_t with {l} cols"), h_t.cols()));
    }
    if y_t.shape() != (h_t.rows(), c) {
        return Err(Error::dims(
            "update_m",
            format!("Y_t {}x{c}", h_t.rows()),
            format!("{:?}", y_t.shape()),
        ));
    }
    if beta_s.max_abs() == 0.0 {
        return Err(Error::InvalidDimension("update_m needs a nonzero beta_s".into()));
    }
    // K = (HtᵀHt + λ3·I)⁻¹ HtᵀYt, L×c
    let k = solve_spd(&h_t.gram().add_scaled_identity(lambda3)?, &h_t.t_matmul(y_t)?)?;
    // R = (βsᵀβs + δ·I)⁻¹ βsᵀ, c×L
    let r = solve_spd(&beta_s.gram().add_scaled_identity(delta)?, &beta_s.transpose())?;
    k.matmul(&r)
}
