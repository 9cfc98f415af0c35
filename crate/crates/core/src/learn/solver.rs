//! Dual coordinate descent for the L2-regularized, L2-loss linear SVM.
//!
//! Primal: `min_w ½‖w‖² + Σ_i C_i max(0, 1 − y_i wᵀx_i)²`.
//!
//! Dual: `min_α ½ αᵀ(Q + D)α − Σ α_i` subject to `α_i ≥ 0`, where
//! `Q_ij = y_i y_j x_iᵀx_j` and `D_ii = 1 / (2 C_i)`. The primal solution is
//! `w = Σ α_i y_i x_i`. We report the dual as a maximization,
//! `Σ α_i − ½‖w‖² − Σ α_i² / (4 C_i)`, so weak duality reads dual ≤ primal.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type SparseRow = Vec<(u32, f64)>;

#[derive(Debug, Clone, Copy)]
pub struct SolverParams {
    /// Stop once `(primal − dual) / |primal|` falls below this.
    pub tolerance: f64,
    /// Maximum number of passes over the active examples.
    pub max_epochs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    pub epoch: usize,
    pub primal: f64,
    pub dual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    pub alpha: Vec<f64>,
    pub weights: Vec<f64>,
    pub primal: f64,
    pub dual: f64,
    pub epochs: usize,
    pub converged: bool,
    /// Objective values after every epoch.
    pub trace: Vec<GapCheck>,
}

impl SolverState {
    pub fn relative_gap(&self) -> f64 {
        relative_gap(self.primal, self.dual)
    }
}

fn relative_gap(primal: f64, dual: f64) -> f64 {
    (primal - dual) / primal.abs().max(f64::MIN_POSITIVE)
}

fn dot(w: &[f64], x: &[(u32, f64)]) -> f64 {
    x.iter().map(|&(j, v)| w[j as usize] * v).sum()
}

fn objectives(rows: &[SparseRow], y: &[f64], cost: &[f64], alpha: &[f64], w: &[f64]) -> (f64, f64) {
    let half_norm = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let mut loss = 0.0;
    let mut dual = 0.0;
    for i in 0..rows.len() {
        let margin = 1.0 - y[i] * dot(w, &rows[i]);
        if margin > 0.0 {
            loss += cost[i] * margin * margin;
        }
        dual += alpha[i] - alpha[i] * alpha[i] / (4.0 * cost[i]);
    }
    (half_norm + loss, dual - half_norm)
}

fn weights_from_alpha(rows: &[SparseRow], y: &[f64], alpha: &[f64], dim: usize) -> Vec<f64> {
    let mut w = vec![0.0; dim];
    for i in 0..rows.len() {
        if alpha[i] != 0.0 {
            for &(j, v) in &rows[i] {
                w[j as usize] += alpha[i] * y[i] * v;
            }
        }
    }
    w
}

/// Solve for `dim`-dimensional weights. `y` holds ±1 labels, `cost` the
/// per-example penalty `C_i > 0`.
pub fn solve(rows: &[SparseRow], y: &[f64], cost: &[f64], dim: usize, params: SolverParams) -> SolverState {
    let n = rows.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let diag: Vec<f64> = cost.iter().map(|c| 0.5 / c).collect();
    let qd: Vec<f64> = rows
        .iter()
        .zip(&diag)
        .map(|(x, d)| x.iter().map(|&(_, v)| v * v).sum::<f64>() + d)
        .collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; dim];
    let mut active: Vec<usize> = (0..n).collect();
    let mut pg_max_old = f64::INFINITY;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut epochs = 0;
    let (mut primal, mut dual) = objectives(rows, y, cost, &alpha, &w);

    while epochs < params.max_epochs {
        epochs += 1;
        active.shuffle(&mut rng);
        let mut pg_max_new = f64::NEG_INFINITY;
        let mut pg_min_new = f64::INFINITY;
        let mut s = 0;
        while s < active.len() {
            let i = active[s];
            let g = y[i] * dot(&w, &rows[i]) - 1.0 + diag[i] * alpha[i];
            let pg = if alpha[i] == 0.0 {
                if g > pg_max_old {
                    // Bound variable that is unlikely to move; drop it from the active set.
                    active.swap_remove(s);
                    continue;
                }
                g.min(0.0)
            } else {
                g
            };
            pg_max_new = pg_max_new.max(pg);
            pg_min_new = pg_min_new.min(pg);
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).max(0.0);
                let step = (alpha[i] - old) * y[i];
                for &(j, v) in &rows[i] {
                    w[j as usize] += step * v;
                }
            }
            s += 1;
        }

        w = weights_from_alpha(rows, y, &alpha, dim);
        (primal, dual) = objectives(rows, y, cost, &alpha, &w);
        trace.push(GapCheck { epoch: epochs, primal, dual });
        if relative_gap(primal, dual) < params.tolerance {
            converged = true;
            break;
        }

        let active_settled = pg_max_new - pg_min_new <= 1e-12 || active.is_empty();
        if active_settled || active.len() < n && epochs % 10 == 0 {
            active = (0..n).collect();
            pg_max_old = f64::INFINITY;
            continue;
        }
        pg_max_old = if pg_max_new <= 0.0 { f64::INFINITY } else { pg_max_new };
    }

    SolverState {
        alpha,
        weights: w,
        primal,
        dual,
        epochs,
        converged,
        trace,
    }
}
