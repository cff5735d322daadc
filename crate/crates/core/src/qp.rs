//! One-slack working-set QP:
//! minimize `0.5 |w|^2 + w . v + C xi` subject to `xi >= loss_t - w . dphi_t` and `xi >= 0`.
//!
//! Solved in the dual `max sum_t l_t loss_t - 0.5 |sum_t l_t dphi_t - v|^2`
//! over `{l >= 0, sum l <= C}` by pairwise coordinate ascent. An implicit
//! null constraint with zero loss and zero features absorbs the unused budget,
//! so the feasible set is a scaled simplex.

use crate::error::{PaucError, Result};
use crate::ordering::{dot, Constraint};

#[derive(Clone, Debug, PartialEq)]
pub struct QpSolution {
    pub w: Vec<f64>,
    pub xi: f64,
    /// One multiplier per constraint.
    pub dual: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub steps: usize,
    pub converged: bool,
}

impl QpSolution {
    /// Largest violation of dual feasibility, complementary slackness and the slack definition.
    pub fn kkt_residual(&self, constraints: &[Constraint], c: f64) -> f64 {
        let g: Vec<f64> = constraints.iter().map(|k| k.h(&self.w)).collect();
        let gmax = g.iter().copied().fold(0.0, f64::max);
        let mut r = (self.xi - gmax).abs();
        let total: f64 = self.dual.iter().sum();
        r = r.max((total - c).max(0.0));
        for (&l, &gt) in self.dual.iter().zip(&g) {
            r = r.max((-l).max(0.0));
            // Positive multipliers sit on the active face.
            r = r.max(l.min(1.0) * (gmax - gt));
        }
        // Unused budget requires no positive slack.
        r.max(((c - total) / c).min(1.0) * gmax)
    }
}

/// A growing constraint set with cached Gram matrix and warm-start multipliers.
#[derive(Clone, Debug, Default)]
pub struct WorkingSet {
    constraints: Vec<Constraint>,
    gram: Vec<Vec<f64>>,
    dual: Vec<f64>,
}

impl WorkingSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn push(&mut self, c: Constraint) -> Result<()> {
        if !c.loss.is_finite() || c.dphi.iter().any(|v| !v.is_finite()) {
            return Err(PaucError::NonFinite("constraint"));
        }
        let row: Vec<f64> = self.constraints.iter().map(|o| dot(&o.dphi, &c.dphi)).collect();
        for (g, &v) in self.gram.iter_mut().zip(&row) {
            g.push(v);
        }
        let mut row = row;
        row.push(dot(&c.dphi, &c.dphi));
        self.gram.push(row);
        self.constraints.push(c);
        self.dual.push(0.0);
        Ok(())
    }

    /// Solves the restricted problem, starting from the previous multipliers.
    pub fn solve(&mut self, c: f64, v: Option<&[f64]>, dim: usize, tol: f64) -> Result<QpSolution> {
        if !(c.is_finite() && c > 0.0) {
            return Err(PaucError::InvalidConfig(format!("C must be positive, got {c}")));
        }
        if let Some(v) = v {
            if v.len() != dim {
                return Err(PaucError::Dimension {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(PaucError::NonFinite("linear term"));
            }
        }
        let t = self.len();
        // Rescale a warm start that no longer fits the budget.
        let total: f64 = self.dual.iter().sum();
        if total > c {
            let s = c / total;
            self.dual.iter_mut().for_each(|l| *l *= s);
        }
        let dphi_v: Vec<f64> = match v {
            Some(v) => self.constraints.iter().map(|k| dot(&k.dphi, v)).collect(),
            None => vec![0.0; t],
        };
        // Index t is the null constraint.
        let mut lam = self.dual.clone();
        lam.push(c - lam.iter().sum::<f64>());
        let kern = |a: usize, b: usize| if a == t || b == t { 0.0 } else { self.gram[a][b] };
        let mut g: Vec<f64> = (0..t)
            .map(|u| self.constraints[u].loss + dphi_v[u] - (0..t).map(|s| lam[s] * self.gram[u][s]).sum::<f64>())
            .collect();
        g.push(0.0);

        let max_steps = 1000 + 100 * (t + 1) * (t + 1);
        let mut steps = 0;
        let mut converged = false;
        while steps < max_steps {
            let up = argmax(&g, |_| true);
            let down = argmin(&g, |s| lam[s] > 0.0);
            let (Some(up), Some(down)) = (up, down) else {
                converged = true;
                break;
            };
            let gap = g[up] - g[down];
            if gap <= tol {
                converged = true;
                break;
            }
            let curv = kern(up, up) + kern(down, down) - 2.0 * kern(up, down);
            let delta = if curv > 1e-300 {
                (gap / curv).min(lam[down])
            } else {
                lam[down]
            };
            if delta <= 0.0 {
                converged = true;
                break;
            }
            lam[up] += delta;
            lam[down] -= delta;
            if lam[down] < 1e-300 {
                lam[down] = 0.0;
            }
            for (u, gu) in g.iter_mut().enumerate() {
                *gu -= delta * (kern(u, up) - kern(u, down));
            }
            steps += 1;
        }
        if !converged {
            log::debug!("qp: step cap {max_steps} reached with {t} constraints");
        }

        self.dual.copy_from_slice(&lam[..t]);
        let mut w = match v {
            Some(v) => v.iter().map(|x| -x).collect(),
            None => vec![0.0; dim],
        };
        for (k, &l) in self.constraints.iter().zip(&self.dual) {
            if l != 0.0 {
                for (wd, d) in w.iter_mut().zip(&k.dphi) {
                    *wd += l * d;
                }
            }
        }
        let xi = self.constraints.iter().map(|k| k.h(&w)).fold(0.0, f64::max);
        let wv = v.map_or(0.0, |v| dot(&w, v));
        let ww = dot(&w, &w);
        let primal_objective = 0.5 * ww + wv + c * xi;
        let dual_objective = self
            .constraints
            .iter()
            .zip(&self.dual)
            .map(|(k, l)| l * k.loss)
            .sum::<f64>()
            - 0.5 * ww;
        Ok(QpSolution {
            w,
            xi,
            dual: self.dual.clone(),
            primal_objective,
            dual_objective,
            steps,
            converged,
        })
    }
}

fn argmax(g: &[f64], ok: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (u, &x) in g.iter().enumerate() {
        if ok(u) && best.is_none_or(|b| x > g[b]) {
            best = Some(u);
        }
    }
    best
}

fn argmin(g: &[f64], ok: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (u, &x) in g.iter().enumerate() {
        if ok(u) && best.is_none_or(|b| x < g[b]) {
            best = Some(u);
        }
    }
    best
}

/// Solves the QP for a fixed constraint list from a cold start.
pub fn solve(constraints: &[Constraint], c: f64, v: Option<&[f64]>, dim: usize, tol: f64) -> Result<QpSolution> {
    let mut ws = WorkingSet::new();
    for k in constraints {
        if k.dphi.len() != dim {
            return Err(PaucError::Dimension {
                expected: dim,
                found: k.dphi.len(),
            });
        }
        ws.push(k.clone())?;
    }
    ws.solve(c, v, dim, tol)
}
