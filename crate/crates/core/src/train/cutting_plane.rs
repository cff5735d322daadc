use crate::data::{Algo, Dataset, Model, Positions};
use crate::error::{PaucError, Result};
use crate::mvc::{mvc_auc, mvc_positions, MostViolated};
use crate::qp::WorkingSet;

use super::{half_sq_norm, TrainConfig, TrainReport};

pub(crate) struct InnerRun {
    pub w: Vec<f64>,
    pub xi: f64,
    pub violation: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
    pub converged: bool,
}

/// Which most-violated-constraint search the loop calls.
#[derive(Clone, Copy)]
pub(crate) enum Oracle {
    Auc,
    Window(Positions),
}

impl Oracle {
    pub fn search(self, w: &[f64], data: &Dataset) -> Result<MostViolated> {
        match self {
            Oracle::Auc => mvc_auc(w, data),
            Oracle::Window(p) => mvc_positions(w, data, p),
        }
    }
}

/// Grows `ws` until a fresh constraint is violated by at most `xi + epsilon`.
pub(crate) fn run(
    data: &Dataset,
    oracle: Oracle,
    c: f64,
    v: Option<&[f64]>,
    ws: &mut WorkingSet,
    config: &TrainConfig,
) -> Result<InnerRun> {
    let dim = data.dim();
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        let sol = ws.solve(c, v, dim, config.qp_tol)?;
        trace.push(sol.primal_objective);
        let mv = oracle.search(&sol.w, data)?;
        log::debug!(
            "cutting plane iter {iterations}: |W| = {}, xi = {:.6e}, H = {:.6e}",
            ws.len(),
            sol.xi,
            mv.h
        );
        let done = mv.h <= sol.xi + config.epsilon;
        if done || iterations >= config.max_iters {
            return Ok(InnerRun {
                w: sol.w,
                xi: sol.xi,
                violation: mv.h,
                iterations,
                trace,
                converged: done,
            });
        }
        ws.push(mv.constraint(data)?)?;
        iterations += 1;
    }
}

/// Minimizes `0.5 |w|^2 + C R(w)` for the full AUC or a `[0, beta]` / `[alpha, beta]`
/// structural surrogate.
pub fn train_cutting_plane(data: &Dataset, config: &TrainConfig) -> Result<TrainReport> {
    config.validate()?;
    let n = data.num_negatives();
    let (oracle, positions) = match config.algo {
        Algo::Auc => (Oracle::Auc, Positions { j_alpha: 0, j_beta: n }),
        Algo::PaucStruct => {
            let p = config.interval.positions(n)?;
            (Oracle::Window(p), p)
        }
        Algo::PaucDc => {
            return Err(PaucError::InvalidConfig("the DC objective is trained by CCCP".into()));
        }
    };
    let mut ws = WorkingSet::new();
    let inner = run(data, oracle, config.c, None, &mut ws, config)?;
    let interval = if config.algo == Algo::Auc {
        crate::data::FprInterval::full()
    } else {
        config.interval
    };
    let mut model = Model::new(inner.w.clone())?;
    model.trained_interval = Some(interval);
    model.trained_algo = Some(config.algo);
    model.c = Some(config.c);
    let report = TrainReport {
        objective: half_sq_norm(&inner.w) + config.c * inner.violation,
        model,
        algo: config.algo,
        c: config.c,
        alpha: interval.alpha(),
        beta: interval.beta(),
        positions,
        outer_iterations: inner.iterations,
        inner_iterations: inner.iterations,
        surrogate_value: inner.violation,
        objective_trace: inner.trace,
        final_violation: inner.violation,
        final_slack: inner.xi,
        epsilon: config.epsilon,
        converged: inner.converged,
    };
    if !report.converged {
        return Err(PaucError::NotConverged {
            iterations: report.outer_iterations,
            report: Box::new(report),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FprInterval;
    use crate::metrics::pauc_risk;

    fn separable() -> Dataset {
        Dataset::from_dense(
            &[vec![2.0, 1.0], vec![1.5, 2.0], vec![3.0, 0.5]],
            &[vec![-1.0, 0.0], vec![0.0, -1.5], vec![-2.0, -1.0], vec![0.5, -0.5]],
        )
        .unwrap()
    }

    #[test]
    fn separable_sample_is_ranked_perfectly() {
        let d = separable();
        let mut cfg = TrainConfig::new(Algo::PaucStruct, FprInterval::new(0.0, 0.5).unwrap(), 1e4);
        cfg.max_iters = 1000;
        let r = train_cutting_plane(&d, &cfg).unwrap();
        assert!(r.final_violation <= r.final_slack + cfg.epsilon);
        let (p, q) = d.scores(&r.model.weights);
        assert_eq!(pauc_risk(&p, &q, &cfg.interval).unwrap(), 0.0);
        assert!(r.surrogate_value <= cfg.epsilon + r.final_slack);
    }

    #[test]
    fn tiny_c_gives_tiny_model() {
        let d = separable();
        let cfg = TrainConfig::new(Algo::Auc, FprInterval::full(), 1e-8);
        let r = train_cutting_plane(&d, &cfg).unwrap();
        assert!(r.model.weights.iter().all(|w| w.abs() < 1e-6));
        assert!((r.surrogate_value - 1.0).abs() < 1e-4);
    }

    #[test]
    fn full_interval_matches_auc_run() {
        let d = separable();
        let a = train_cutting_plane(&d, &TrainConfig::new(Algo::Auc, FprInterval::full(), 1.0)).unwrap();
        let b = train_cutting_plane(&d, &TrainConfig::new(Algo::PaucStruct, FprInterval::full(), 1.0)).unwrap();
        assert_eq!(a.model.weights, b.model.weights);
        assert_eq!(a.objective_trace, b.objective_trace);
    }

    #[test]
    fn cap_reports_partial_model() {
        let d = Dataset::from_dense(
            &[vec![1.0, 0.2], vec![-0.3, 0.4]],
            &[vec![0.5, 0.5], vec![-1.0, 0.3], vec![0.2, -0.1]],
        )
        .unwrap();
        let mut cfg = TrainConfig::new(Algo::Auc, FprInterval::full(), 1e3);
        cfg.max_iters = 1;
        match train_cutting_plane(&d, &cfg) {
            Err(PaucError::NotConverged { iterations, report }) => {
                assert_eq!(iterations, 1);
                assert!(!report.converged);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn dc_algo_is_rejected() {
        let cfg = TrainConfig::new(Algo::PaucDc, FprInterval::new(0.25, 0.5).unwrap(), 1.0);
        assert!(train_cutting_plane(&separable(), &cfg).is_err());
    }
}
