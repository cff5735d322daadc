use crate::data::{Algo, Dataset, Model, Positions};
use crate::error::{PaucError, Result};
use crate::mvc::mvc_positions;
use crate::qp::WorkingSet;
use crate::surrogate::hinge_pauc_at;

use super::cutting_plane::{run, Oracle};
use super::{half_sq_norm, TrainConfig, TrainReport};

/// Minimizes `0.5 |w|^2 + C * hinge_[alpha, beta](w)` by the concave-convex procedure.
///
/// The hinge surrogate is written as `(j_beta R_[0,beta] - j_alpha R_[0,alpha]) / (j_beta - j_alpha)`.
/// Each step replaces `R_[0,alpha]` by its active linear piece at the current
/// iterate and minimizes the resulting convex bound with the `[0, beta]` cutting plane.
pub fn train_cccp(data: &Dataset, config: &TrainConfig) -> Result<TrainReport> {
    config.validate()?;
    if config.algo != Algo::PaucDc {
        return Err(PaucError::InvalidConfig(format!(
            "CCCP trains pauc_dc, not {}",
            config.algo
        )));
    }
    let p = config.interval.positions(data.num_negatives())?;
    if p.j_alpha == 0 {
        return Err(PaucError::InvalidConfig(
            "the DC objective needs j_alpha >= 1; use pauc_struct for [0, beta]".into(),
        ));
    }
    let head = Positions {
        j_alpha: 0,
        j_beta: p.j_alpha,
    };
    let tail = Oracle::Window(Positions {
        j_alpha: 0,
        j_beta: p.j_beta,
    });
    let width = p.width() as f64;
    let c_eff = config.c * p.j_beta as f64 / width;
    let v_scale = config.c * p.j_alpha as f64 / width;
    let objective = |w: &[f64]| half_sq_norm(w) + config.c * hinge_pauc_at(w, data, p);

    let mut w = vec![0.0; data.dim()];
    let mut f = objective(&w);
    let mut trace = vec![f];
    let mut ws = WorkingSet::new();
    let mut outer = 0;
    let mut inner_total = 0;
    let mut last = (0.0, 0.0);
    let mut converged = false;
    while outer < config.max_outer_iters {
        outer += 1;
        let linear = mvc_positions(&w, data, head)?.constraint(data)?;
        let v: Vec<f64> = linear.dphi.iter().map(|d| v_scale * d).collect();
        let inner = run(data, tail, c_eff, Some(&v), &mut ws, config)?;
        inner_total += inner.iterations;
        if !inner.converged {
            let report = report(
                data,
                config,
                p,
                &w,
                outer,
                inner_total,
                trace,
                (inner.violation, inner.xi),
                false,
            )?;
            return Err(PaucError::NotConverged {
                iterations: report.inner_iterations,
                report: Box::new(report),
            });
        }
        let f_new = objective(&inner.w);
        log::debug!("cccp iter {outer}: objective {f:.6e} -> {f_new:.6e}");
        last = (inner.violation, inner.xi);
        if f_new > f {
            // The inexact inner solve overshot; keep the better iterate.
            converged = true;
            break;
        }
        let decrease = f - f_new;
        w = inner.w;
        f = f_new;
        trace.push(f);
        if decrease <= config.tau {
            converged = true;
            break;
        }
    }
    let report = report(data, config, p, &w, outer, inner_total, trace, last, converged)?;
    if !converged {
        return Err(PaucError::NotConverged {
            iterations: outer,
            report: Box::new(report),
        });
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn report(
    data: &Dataset,
    config: &TrainConfig,
    p: Positions,
    w: &[f64],
    outer: usize,
    inner: usize,
    trace: Vec<f64>,
    (violation, slack): (f64, f64),
    converged: bool,
) -> Result<TrainReport> {
    let mut model = Model::new(w.to_vec())?;
    model.trained_interval = Some(config.interval);
    model.trained_algo = Some(Algo::PaucDc);
    model.c = Some(config.c);
    let surrogate = hinge_pauc_at(w, data, p);
    Ok(TrainReport {
        model,
        algo: Algo::PaucDc,
        c: config.c,
        alpha: config.interval.alpha(),
        beta: config.interval.beta(),
        positions: p,
        outer_iterations: outer,
        inner_iterations: inner,
        surrogate_value: surrogate,
        objective: half_sq_norm(w) + config.c * surrogate,
        objective_trace: trace,
        final_violation: violation,
        final_slack: slack,
        epsilon: config.epsilon,
        converged,
    })
}
