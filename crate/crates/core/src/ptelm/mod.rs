//! Parameter-transfer ELM.
//!
//! A source classifier `βs` and a projection `M` are learned jointly, and the
//! target classifier is `βt = M·βs`. `βs` carries an ℓ2,1 penalty, so whole
//! hidden nodes are switched off for the source model. Training alternates
//! two exact block updates:
//!
//! 1. `βs` for fixed `M`, by reweighted least squares ([`solve_beta_s`]);
//! 2. `M` for fixed `βs`, in closed form ([`update_m`]).

mod objective;
mod solver;

pub use objective::{
    beta_stationarity_residual, m_stationarity_residual, objective, objective_terms, smoothed_objective,
    smoothed_row_penalty, transformed_objective, ObjectiveTerms,
};
pub use solver::{gram_delta, solve_beta_s, solve_beta_s_traced, solve_beta_s_warm, subgradient_d, update_beta_s, update_m, InnerSolve};

use serde::{Deserialize, Serialize};

use crate::elm::{hidden_map, init_hidden_layer, one_hot, predict, Activation, HiddenLayer};
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Offset applied to the seed of an independent target hidden layer.
pub const TARGET_LAYER_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtelmHyperparams {
    /// Weight of the source loss.
    pub lambda1: f64,
    /// Weight of the ℓ2,1 penalty on `βs`.
    pub lambda2: f64,
    /// Weight of `‖M·βs‖²`.
    pub lambda3: f64,
    pub hidden_nodes: usize,
    pub activation: Activation,
    /// Floor inside the reweighting entries `1 / (2‖βsⁱ‖ + ε)`.
    pub epsilon: f64,
    /// Relative Gram regularization for the M update; the absolute value is
    /// `delta · tr(βs·βsᵀ) / L` (see [`gram_delta`]).
    pub delta: f64,
    pub inner_max_iters: usize,
    pub inner_tol: f64,
    pub outer_max_iters: usize,
    pub outer_tol: f64,
}

impl Default for PtelmHyperparams {
    fn default() -> Self {
        Self {
            lambda1: 1.0,
            lambda2: 30.0,
            lambda3: 10.0,
            hidden_nodes: 500,
            activation: Activation::Sigmoid,
            epsilon: 1e-8,
            delta: 1e-8,
            inner_max_iters: 30,
            inner_tol: 1e-5,
            outer_max_iters: 10,
            outer_tol: 1e-6,
        }
    }
}

impl PtelmHyperparams {
    /// `λ1` and the tolerances must be positive; `λ2`, `λ3` and `delta` may
    /// be zero to express the degenerate reductions of the model.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda1", self.lambda1),
            ("epsilon", self.epsilon),
            ("inner_tol", self.inner_tol),
            ("outer_tol", self.outer_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be a positive real, got {v}")));
            }
        }
        for (name, v) in [("lambda2", self.lambda2), ("lambda3", self.lambda3), ("delta", self.delta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be a nonnegative real, got {v}")));
            }
        }
        if self.hidden_nodes == 0 || self.inner_max_iters == 0 || self.outer_max_iters == 0 {
            return Err(Error::Config("hidden_nodes and iteration caps must be at least 1".into()));
        }
        Ok(())
    }
}

/// A trained transfer model. `βt` is always recomputed as `M·βs`.
#[derive(Debug, Clone)]
pub struct PtelmModel {
    source_layer: HiddenLayer,
    /// `None` when the target shares the source layer.
    target_layer: Option<HiddenLayer>,
    beta_s: DenseMatrix,
    m: DenseMatrix,
    hyperparams: PtelmHyperparams,
    class_count: usize,
    objective_trace: Vec<f64>,
    inner_iterations: Vec<usize>,
}

impl PtelmModel {
    pub fn source_layer(&self) -> &HiddenLayer {
        &self.source_layer
    }

    pub fn target_layer(&self) -> &HiddenLayer {
        self.target_layer.as_ref().unwrap_or(&self.source_layer)
    }

    pub fn shares_layer(&self) -> bool {
        self.target_layer.is_none()
    }

    pub fn beta_s(&self) -> &DenseMatrix {
        &self.beta_s
    }

    pub fn projection(&self) -> &DenseMatrix {
        &self.m
    }

    /// `M·βs`.
    pub fn beta_t(&self) -> DenseMatrix {
        self.m.matmul(&self.beta_s).expect("M and beta_s shapes are checked at training")
    }

    pub fn hyperparams(&self) -> &PtelmHyperparams {
        &self.hyperparams
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Objective value after each outer iteration.
    pub fn objective_trace(&self) -> &[f64] {
        &self.objective_trace
    }

    /// Reweighted updates run inside each outer iteration.
    pub fn inner_iterations(&self) -> &[usize] {
        &self.inner_iterations
    }
}

/// Hidden-space quantities of a training problem, computed once.
#[derive(Debug, Clone)]
pub struct HiddenProblem {
    pub h_s: DenseMatrix,
    pub y_s: DenseMatrix,
    pub h_t: DenseMatrix,
    pub y_t: DenseMatrix,
}

/// Fitted hidden-space parameters plus per-iteration diagnostics.
#[derive(Debug, Clone)]
pub struct HiddenFit {
    pub beta_s: DenseMatrix,
    pub m: DenseMatrix,
    pub objective_trace: Vec<f64>,
    pub inner: Vec<InnerSolve>,
}

/// Outer alternation on precomputed hidden outputs, starting from `M = I`.
///
/// The first βs solve starts from `D = I`; later ones start from the
/// reweighting of the previous βs, so each block step is a descent step on
/// the objective even when the inner loop stops at its iteration cap.
///
/// Stops when the relative objective decrease falls below `outer_tol` or
/// after `outer_max_iters` rounds.
pub fn fit_hidden(problem: &HiddenProblem, hp: &PtelmHyperparams) -> Result<HiddenFit> {
    hp.validate()?;
    let HiddenProblem { h_s, y_s, h_t, y_t } = problem;
    let mut m = DenseMatrix::identity(h_s.cols());
    let mut beta_s: Option<DenseMatrix> = None;
    let mut trace: Vec<f64> = Vec::with_capacity(hp.outer_max_iters);
    let mut inner = Vec::with_capacity(hp.outer_max_iters);
    for _ in 0..hp.outer_max_iters {
        let solve = match &beta_s {
            None => solve_beta_s_traced(h_s, h_t, &m, y_s, y_t, hp)?,
            Some(prev) => solve_beta_s_warm(h_s, h_t, &m, y_s, y_t, prev, hp)?,
        };
        let delta = gram_delta(&solve.beta_s, hp.delta);
        m = update_m(h_t, y_t, &solve.beta_s, hp.lambda3, delta)?;
        let value = objective(h_s, y_s, h_t, y_t, &solve.beta_s, &m, hp)?;
        beta_s = Some(solve.beta_s.clone());
        inner.push(solve);
        let done = trace
            .last()
            .is_some_and(|&prev| (prev - value) / prev.abs().max(f64::MIN_POSITIVE) < hp.outer_tol);
        trace.push(value);
        if done {
            break;
        }
    }
    Ok(HiddenFit {
        beta_s: beta_s.expect("outer_max_iters >= 1"),
        m,
        objective_trace: trace,
        inner,
    })
}

fn class_count(y_s: &[usize], y_t: &[usize]) -> Result<usize> {
    let c = y_s.iter().chain(y_t).copied().max().map_or(0, |m| m + 1);
    let mut present = vec![false; c];
    for &y in y_s {
        present[y] = true;
    }
    if let Some(missing) = present.iter().position(|p| !p) {
        return Err(Error::ClassMismatch(format!(
            "class {missing} appears in the target labels but not in the source"
        )));
    }
    Ok(c)
}

/// Trains a transfer model from raw labeled source and target samples.
///
/// When both domains have the same feature dimension they share one hidden
/// layer drawn from `seed`; otherwise the target layer is drawn from
/// `seed + TARGET_LAYER_SEED_OFFSET`.
pub fn train_ptelm(
    x_s: &DenseMatrix,
    y_s: &[usize],
    x_t: &DenseMatrix,
    y_t: &[usize],
    hp: &PtelmHyperparams,
    seed: u64,
) -> Result<PtelmModel> {
    hp.validate()?;
    if x_s.rows() == 0 {
        return Err(Error::EmptyDomain("source"));
    }
    if x_t.rows() == 0 {
        return Err(Error::EmptyDomain("target"));
    }
    if x_s.rows() != y_s.len() {
        return Err(Error::dims("train_ptelm", format!("{} source labels", x_s.rows()), y_s.len()));
    }
    if x_t.rows() != y_t.len() {
        return Err(Error::dims("train_ptelm", format!("{} target labels", x_t.rows()), y_t.len()));
    }
    let c = class_count(y_s, y_t)?;

    let source_layer = init_hidden_layer(x_s.cols(), hp.hidden_nodes, hp.activation, seed)?;
    let target_layer = if x_t.cols() == x_s.cols() {
        None
    } else {
        Some(init_hidden_layer(
            x_t.cols(),
            hp.hidden_nodes,
            hp.activation,
            seed.wrapping_add(TARGET_LAYER_SEED_OFFSET),
        )?)
    };
    let problem = HiddenProblem {
        h_s: hidden_map(&source_layer, x_s)?,
        y_s: one_hot(y_s, c)?,
        h_t: hidden_map(target_layer.as_ref().unwrap_or(&source_layer), x_t)?,
        y_t: one_hot(y_t, c)?,
    };
    let fit = fit_hidden(&problem, hp)?;
    Ok(PtelmModel {
        source_layer,
        target_layer,
        beta_s: fit.beta_s,
        m: fit.m,
        hyperparams: hp.clone(),
        class_count: c,
        objective_trace: fit.objective_trace,
        inner_iterations: fit.inner.iter().map(|s| s.iterations).collect(),
    })
}

/// Target-domain labels `argmax(Ht·βt)`.
pub fn predict_target(model: &PtelmModel, x: &DenseMatrix) -> Result<Vec<usize>> {
    predict(model.target_layer(), &model.beta_t(), x)
}
