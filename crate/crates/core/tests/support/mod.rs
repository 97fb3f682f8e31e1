//! Shared instance generators and independent oracles for integration tests.
#![allow(dead_code)]

use ptelm::elm::one_hot;
use ptelm::numerics::{random_uniform_matrix, DenseMatrix, SeededRng};
use ptelm::ptelm::PtelmHyperparams;

pub struct Instance {
    pub h_s: DenseMatrix,
    pub y_s: DenseMatrix,
    pub h_t: DenseMatrix,
    pub y_t: DenseMatrix,
}

pub fn labels(n: usize, c: usize, rng: &mut SeededRng) -> Vec<usize> {
    (0..n).map(|i| if i < c { i } else { rng.below(c) }).collect()
}

/// Hidden outputs uniform in `[0, 1)` (the sigmoid range) with one-hot labels.
pub fn instance(m: usize, n: usize, l: usize, c: usize, seed: u64) -> Instance {
    let mut rng = SeededRng::new(seed ^ 0x5eed);
    let h_t = if n == 0 {
        DenseMatrix::zeros(0, l)
    } else {
        random_uniform_matrix(n, l, seed + 2, 0.0, 1.0).unwrap()
    };
    let y_t = if n == 0 {
        DenseMatrix::zeros(0, c)
    } else {
        one_hot(&labels(n, c, &mut rng), c).unwrap()
    };
    Instance {
        h_s: random_uniform_matrix(m, l, seed + 1, 0.0, 1.0).unwrap(),
        y_s: one_hot(&labels(m, c, &mut rng), c).unwrap(),
        h_t,
        y_t,
    }
}

pub fn hp(lambda1: f64, lambda2: f64, lambda3: f64) -> PtelmHyperparams {
    PtelmHyperparams {
        lambda1,
        lambda2,
        lambda3,
        ..PtelmHyperparams::default()
    }
}

pub fn fro(a: &DenseMatrix) -> f64 {
    a.to_row_major().iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    fro(&a.sub(b).unwrap()) / fro(b).max(1e-300)
}

fn row_norm(a: &DenseMatrix, i: usize) -> f64 {
    (0..a.cols()).map(|j| a[(i, j)] * a[(i, j)]).sum::<f64>().sqrt()
}

pub fn l21(a: &DenseMatrix) -> f64 {
    (0..a.rows()).map(|i| row_norm(a, i)).sum()
}

/// The joint objective evaluated term by term.
pub fn objective(p: &Instance, beta: &DenseMatrix, m: &DenseMatrix, hp: &PtelmHyperparams) -> f64 {
    let bt = m.matmul(beta).unwrap();
    let target = fro(&p.h_t.matmul(&bt).unwrap().sub(&p.y_t).unwrap()).powi(2);
    let source = fro(&p.h_s.matmul(beta).unwrap().sub(&p.y_s).unwrap()).powi(2);
    0.5 * target + 0.5 * hp.lambda1 * source + 0.5 * hp.lambda2 * l21(beta) + 0.5 * hp.lambda3 * fro(&bt).powi(2)
}

/// Quadratic part `A = λ1·HsᵀHs + MᵀHtᵀHt·M + λ3·MᵀM` and `B = λ1·HsᵀYs + MᵀHtᵀYt`,
/// so the smooth gradient is `Aβ − B`.
fn quadratic(p: &Instance, m: &DenseMatrix, hp: &PtelmHyperparams) -> (DenseMatrix, DenseMatrix) {
    let htm = p.h_t.matmul(m).unwrap();
    let a = p
        .h_s
        .transpose()
        .matmul(&p.h_s)
        .unwrap()
        .scale(hp.lambda1)
        .add(&htm.transpose().matmul(&htm).unwrap())
        .unwrap()
        .add(&m.transpose().matmul(m).unwrap().scale(hp.lambda3))
        .unwrap();
    let b = p
        .h_s
        .transpose()
        .matmul(&p.y_s)
        .unwrap()
        .scale(hp.lambda1)
        .add(&htm.transpose().matmul(&p.y_t).unwrap())
        .unwrap();
    (a, b)
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
fn spectral_radius(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut v = DenseMatrix::from_fn(n, 1, |i, _| 1.0 + i as f64 * 1e-3);
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w = a.matmul(&v).unwrap();
        let norm = fro(&w);
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm / fro(&v);
        v = w.scale(1.0 / norm);
    }
    lambda * 1.001
}

/// Proximal operator of `t·‖·‖₂,₁`: shrinks every row toward zero by `t`.
fn group_shrink(x: &DenseMatrix, t: f64) -> DenseMatrix {
    let mut rows = x.to_rows();
    for (i, row) in rows.iter_mut().enumerate() {
        let r = row_norm(x, i);
        let s = if r > t { 1.0 - t / r } else { 0.0 };
        row.iter_mut().for_each(|v| *v *= s);
    }
    DenseMatrix::from_rows(&rows).unwrap()
}

/// Accelerated proximal gradient for `min_β L(β, M)` with `M` fixed, from
/// `starts` random initial points. Returns the lowest objective found and
/// its minimizer.
pub fn proximal_oracle(
    p: &Instance,
    m: &DenseMatrix,
    hp: &PtelmHyperparams,
    starts: usize,
    iters: usize,
    seed: u64,
) -> (f64, DenseMatrix) {
    let (a, b) = quadratic(p, m, hp);
    let step = 1.0 / spectral_radius(&a);
    let (l, c) = (p.h_s.cols(), p.y_s.cols());
    let mut best = (f64::INFINITY, DenseMatrix::zeros(l, c));
    for s in 0..starts {
        let mut x = random_uniform_matrix(l, c, seed + s as u64, -1.0, 1.0).unwrap();
        let mut z = x.clone();
        let mut t = 1.0f64;
        for _ in 0..iters {
            let grad = a.matmul(&z).unwrap().sub(&b).unwrap();
            let next = group_shrink(&z.sub(&grad.scale(step)).unwrap(), step * hp.lambda2 / 2.0);
            let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            z = next.add(&next.sub(&x).unwrap().scale((t - 1.0) / t_next)).unwrap();
            x = next;
            t = t_next;
        }
        let value = objective(p, &x, m, hp);
        if value < best.0 {
            best = (value, x);
        }
    }
    best
}

/// `‖β + λHᵀ(Hβ − Y)‖`
pub fn elm_residual(h: &DenseMatrix, y: &DenseMatrix, beta: &DenseMatrix, lambda: f64) -> f64 {
    let resid = h.matmul(beta).unwrap().sub(y).unwrap();
    fro(&beta.add(&h.transpose().matmul(&resid).unwrap().scale(lambda)).unwrap())
}

/// βs gradient with the ℓ2,1 term linearized through the diagonal `d`.
pub fn beta_residual(p: &Instance, beta: &DenseMatrix, m: &DenseMatrix, d: &[f64], hp: &PtelmHyperparams) -> f64 {
    let (a, b) = quadratic(p, m, hp);
    let db = DenseMatrix::from_fn(beta.rows(), beta.cols(), |i, j| hp.lambda2 * d[i] * beta[(i, j)]);
    fro(&a.matmul(beta).unwrap().sub(&b).unwrap().add(&db).unwrap())
}

/// M gradient of the objective plus `(δ/2)·tr(Mᵀ(HtᵀHt + λ3·I)M)`.
pub fn m_residual(p: &Instance, beta: &DenseMatrix, m: &DenseMatrix, lambda3: f64, delta: f64) -> f64 {
    let htt = p.h_t.transpose();
    let resid = p.h_t.matmul(&m.matmul(beta).unwrap()).unwrap().sub(&p.y_t).unwrap();
    let bbt = beta.matmul(&beta.transpose()).unwrap();
    let loss = htt.matmul(&resid).unwrap().matmul(&beta.transpose()).unwrap();
    let weight = m.matmul(&bbt).unwrap().scale(lambda3);
    let op = htt.matmul(&p.h_t).unwrap().add(&DenseMatrix::identity(m.rows()).scale(lambda3)).unwrap();
    let reg = op.matmul(m).unwrap().scale(delta);
    fro(&loss.add(&weight).unwrap().add(&reg).unwrap())
}

/// `1 / (2‖βⁱ‖ + ε)` per row.
pub fn reweighting(beta: &DenseMatrix, epsilon: f64) -> Vec<f64> {
    (0..beta.rows()).map(|i| 1.0 / (2.0 * row_norm(beta, i) + epsilon)).collect()
}
