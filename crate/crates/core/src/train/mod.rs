//! Training loops: cutting plane for the convex surrogates, CCCP for the
//! non-convex hinge surrogate, and grid selection of `C`.

mod cccp;
mod cutting_plane;
mod cv;

pub use cccp::train_cccp;
pub use cutting_plane::train_cutting_plane;
pub use cv::{cross_validate_c, default_grid, CvResult, CvRow, Split};

use serde::Serialize;

use crate::data::{Algo, Dataset, FprInterval, Model, Positions};
use crate::error::{PaucError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub c: f64,
    pub epsilon: f64,
    pub tau: f64,
    pub interval: FprInterval,
    pub algo: Algo,
    /// Cutting-plane iteration cap.
    pub max_iters: usize,
    /// CCCP outer iteration cap.
    pub max_outer_iters: usize,
    pub qp_tol: f64,
}

impl TrainConfig {
    pub fn new(algo: Algo, interval: FprInterval, c: f64) -> Self {
        Self {
            c,
            epsilon: 1e-4,
            tau: 1e-3,
            interval,
            algo,
            max_iters: 1000,
            max_outer_iters: 50,
            qp_tol: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.c) {
            return Err(PaucError::InvalidConfig(format!("C must be positive, got {}", self.c)));
        }
        if !positive(self.epsilon) || !positive(self.tau) || !positive(self.qp_tol) {
            return Err(PaucError::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_iters == 0 || self.max_outer_iters == 0 {
            return Err(PaucError::InvalidConfig("iteration caps must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of a training run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainReport {
    #[serde(skip)]
    pub model: Model,
    pub algo: Algo,
    #[serde(rename = "C")]
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub positions: Positions,
    /// Cutting-plane iterations, or CCCP outer iterations.
    pub outer_iterations: usize,
    /// Cutting-plane iterations summed over all inner solves.
    pub inner_iterations: usize,
    /// Trained surrogate at the returned model.
    pub surrogate_value: f64,
    /// `0.5 |w|^2 + C * surrogate_value`.
    pub objective: f64,
    /// Restricted QP objective per cutting-plane iteration, or the regularized
    /// hinge objective per CCCP iterate.
    pub objective_trace: Vec<f64>,
    /// Violation of a fresh most-violated constraint at exit.
    pub final_violation: f64,
    /// Slack of the final restricted QP.
    pub final_slack: f64,
    pub epsilon: f64,
    pub converged: bool,
}

impl TrainReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        let map = v.as_object_mut().expect("report is an object");
        map.insert("format".into(), serde_json::json!(crate::data::FORMAT_VERSION));
        map.insert("weights".into(), serde_json::json!(self.model.weights));
        map.insert(
            "certificate".into(),
            serde_json::json!(self.final_violation <= self.final_slack + self.epsilon),
        );
        v
    }
}

/// Trains with the algorithm named in `config`.
pub fn train(data: &Dataset, config: &TrainConfig) -> Result<TrainReport> {
    match config.algo {
        Algo::Auc | Algo::PaucStruct => train_cutting_plane(data, config),
        Algo::PaucDc => train_cccp(data, config),
    }
}

pub(crate) fn half_sq_norm(w: &[f64]) -> f64 {
    0.5 * w.iter().map(|x| x * x).sum::<f64>()
}
