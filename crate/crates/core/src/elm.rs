//! Regularized extreme learning machine: a frozen random hidden layer
//! followed by closed-form ridge output weights.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::rng::{uniform_matrix_on_stream, STREAM_BIASES, STREAM_WEIGHTS};
use crate::numerics::{frobenius_norm, solve_spd, DenseMatrix};

/// Hidden-node activation `g(·)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Sigmoid,
    Tanh,
    Relu,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
        })
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            other => Err(Error::Config(format!("unknown activation '{other}'"))),
        }
    }
}

/// Random input weights and biases, fixed after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenLayer {
    weights: DenseMatrix,
    biases: Vec<f64>,
    activation: Activation,
}

impl HiddenLayer {
    pub fn new(weights: DenseMatrix, biases: Vec<f64>, activation: Activation) -> Result<Self> {
        if weights.cols() != biases.len() {
            return Err(Error::dims("HiddenLayer::new", format!("{} biases", weights.cols()), biases.len()));
        }
        if weights.rows() == 0 {
            return Err(Error::InvalidDimension("hidden layer needs at least one input feature".into()));
        }
        Ok(Self {
            weights,
            biases,
            activation,
        })
    }

    /// Input weights, `n_features × L`.
    pub fn weights(&self) -> &DenseMatrix {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.weights.rows()
    }

    /// Number of hidden nodes `L`.
    pub fn hidden_nodes(&self) -> usize {
        self.weights.cols()
    }
}

/// Draws a hidden layer with weights and biases uniform in `[-1, 1)`.
///
/// Weights come from stream 0 and biases from stream 1 of `seed`.
pub fn init_hidden_layer(n_features: usize, hidden_nodes: usize, activation: Activation, seed: u64) -> Result<HiddenLayer> {
    if n_features == 0 || hidden_nodes == 0 {
        return Err(Error::InvalidDimension(format!(
            "hidden layer {n_features} inputs x {hidden_nodes} nodes"
        )));
    }
    let weights = uniform_matrix_on_stream(n_features, hidden_nodes, seed, STREAM_WEIGHTS, -1.0, 1.0)?;
    let biases = uniform_matrix_on_stream(1, hidden_nodes, seed, STREAM_BIASES, -1.0, 1.0)?.to_row_major();
    HiddenLayer::new(weights, biases, activation)
}

/// `H[i,j] = g(W[:,j]·X[i,:] + b[j])`.
pub fn hidden_map(layer: &HiddenLayer, x: &DenseMatrix) -> Result<DenseMatrix> {
    if x.cols() != layer.input_dim() {
        return Err(Error::dims(
            "hidden_map",
            format!("{} feature columns", layer.input_dim()),
            format!("{} columns", x.cols()),
        ));
    }
    let z = x.matmul(&layer.weights)?;
    let g = layer.activation;
    let h = DenseMatrix::from_fn(z.rows(), z.cols(), |i, j| g.apply(z[(i, j)] + layer.biases[j]));
    if !h.all_finite() {
        return Err(Error::NonFinite("hidden_map"));
    }
    Ok(h)
}

/// Ridge output weights `β = (HᵀH + I/λ)⁻¹ HᵀY`.
pub fn train_elm(h: &DenseMatrix, y: &DenseMatrix, lambda: f64) -> Result<DenseMatrix> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidRange { lo: lambda, hi: f64::INFINITY });
    }
    if h.rows() != y.rows() {
        return Err(Error::dims("train_elm", format!("Y with {} rows", h.rows()), y.rows()));
    }
    let lhs = h.gram().add_scaled_identity(1.0 / lambda)?;
    let rhs = h.t_matmul(y)?;
    solve_spd(&lhs, &rhs)
}

/// `½‖β‖²_F + (λ/2)‖Hβ − Y‖²_F`.
pub fn elm_objective(h: &DenseMatrix, y: &DenseMatrix, beta: &DenseMatrix, lambda: f64) -> Result<f64> {
    let resid = h.matmul(beta)?.sub(y)?;
    Ok(0.5 * frobenius_norm(beta).powi(2) + 0.5 * lambda * frobenius_norm(&resid).powi(2))
}

/// Norm of the objective gradient `β + λHᵀ(Hβ − Y)`; zero at the optimum.
pub fn elm_stationarity_residual(h: &DenseMatrix, y: &DenseMatrix, beta: &DenseMatrix, lambda: f64) -> Result<f64> {
    let resid = h.matmul(beta)?.sub(y)?;
    let grad = beta.add(&h.t_matmul(&resid)?.scale(lambda))?;
    Ok(frobenius_norm(&grad))
}

/// `{0,1}` one-hot coding of class labels.
pub fn one_hot(labels: &[usize], classes: usize) -> Result<DenseMatrix> {
    if classes == 0 {
        return Err(Error::InvalidDimension("one_hot needs at least one class".into()));
    }
    if let Some(&label) = labels.iter().find(|&&l| l >= classes) {
        return Err(Error::LabelOutOfRange { label, classes });
    }
    Ok(DenseMatrix::from_fn(labels.len(), classes, |i, j| {
        if labels[i] == j {
            1.0
        } else {
            0.0
        }
    }))
}

/// Row-wise argmax; ties go to the lowest column index.
pub fn argmax_rows(scores: &DenseMatrix) -> Vec<usize> {
    (0..scores.rows())
        .map(|i| {
            let mut best = 0;
            for j in 1..scores.cols() {
                if scores[(i, j)] > scores[(i, best)] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Class labels `argmax(g(XW + b)·β)`.
pub fn predict(layer: &HiddenLayer, beta: &DenseMatrix, x: &DenseMatrix) -> Result<Vec<usize>> {
    let h = hidden_map(layer, x)?;
    if beta.rows() != layer.hidden_nodes() {
        return Err(Error::dims("predict", format!("beta with {} rows", layer.hidden_nodes()), beta.rows()));
    }
    Ok(argmax_rows(&h.matmul(beta)?))
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::dims("accuracy", truth.len(), pred.len()));
    }
    if truth.is_empty() {
        return Err(Error::InvalidDimension("accuracy of an empty set".into()));
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// A trained single-domain ELM classifier.
#[derive(Debug, Clone)]
pub struct ElmModel {
    pub layer: HiddenLayer,
    pub beta: DenseMatrix,
    pub lambda: f64,
    pub class_count: usize,
}

impl ElmModel {
    /// Trains on raw features with an already-drawn hidden layer.
    pub fn fit(layer: HiddenLayer, x: &DenseMatrix, labels: &[usize], class_count: usize, lambda: f64) -> Result<Self> {
        if labels.len() != x.rows() {
            return Err(Error::dims("ElmModel::fit", format!("{} labels", x.rows()), labels.len()));
        }
        let h = hidden_map(&layer, x)?;
        let y = one_hot(labels, class_count)?;
        let beta = train_elm(&h, &y, lambda)?;
        Ok(Self {
            layer,
            beta,
            lambda,
            class_count,
        })
    }

    pub fn predict(&self, x: &DenseMatrix) -> Result<Vec<usize>> {
        predict(&self.layer, &self.beta, x)
    }
}
