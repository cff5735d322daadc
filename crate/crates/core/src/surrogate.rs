//! Surrogate risks of a fixed model.

use crate::data::{Dataset, FprInterval, Positions};
use crate::error::Result;
use crate::metrics::rank_descending;
use crate::mvc::{mvc_auc, mvc_positions};

fn hinge(x: f64) -> f64 {
    x.max(0.0)
}

/// Scores of positives and of negatives sorted descending.
fn ranked_scores(w: &[f64], data: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let (pos, neg) = data.scores(w);
    let sorted = rank_descending(&neg).into_iter().map(|j| neg[j]).collect();
    (pos, sorted)
}

/// Pairwise hinge surrogate of the full AUC risk.
pub fn hinge_auc(w: &[f64], data: &Dataset) -> f64 {
    let (pos, neg) = data.scores(w);
    let total: f64 = pos
        .iter()
        .map(|&s| neg.iter().map(|&z| hinge(1.0 - (s - z))).sum::<f64>())
        .sum();
    total / (pos.len() * neg.len()) as f64
}

/// Pairwise hinge surrogate over negatives ranked `j_alpha + 1 ..= j_beta` by `w`.
pub fn hinge_pauc(w: &[f64], data: &Dataset, interval: &FprInterval) -> Result<f64> {
    let p = interval.positions(data.num_negatives())?;
    Ok(hinge_pauc_at(w, data, p))
}

pub fn hinge_pauc_at(w: &[f64], data: &Dataset, p: Positions) -> f64 {
    let (pos, neg) = ranked_scores(w, data);
    let window = &neg[p.j_alpha..p.j_beta];
    let total: f64 = pos
        .iter()
        .map(|&s| window.iter().map(|&z| hinge(1.0 - (s - z))).sum::<f64>())
        .sum();
    total / (pos.len() * p.width()) as f64
}

/// Structural surrogate of the full AUC risk.
pub fn struct_auc(w: &[f64], data: &Dataset) -> Result<f64> {
    Ok(mvc_auc(w, data)?.h)
}

/// Tight structural surrogate of the partial AUC risk in `interval`.
pub fn tight_pauc(w: &[f64], data: &Dataset, interval: &FprInterval) -> Result<f64> {
    let p = interval.positions(data.num_negatives())?;
    Ok(mvc_positions(w, data, p)?.h)
}

/// Zero-margin hinge on the head negatives `1 ..= j_alpha`.
pub fn eta_head(w: &[f64], data: &Dataset, interval: &FprInterval) -> Result<f64> {
    let p = interval.positions(data.num_negatives())?;
    let (pos, neg) = ranked_scores(w, data);
    Ok(head_terms(&pos, &neg, p, |_| true))
}

/// Lower and upper bounds sandwiching the tight structural surrogate.
///
/// The upper bound is the hinge surrogate plus the head term. The lower bound
/// restricts both terms to positives scoring strictly below the negative at
/// position `j_alpha`.
pub fn tight_bounds(w: &[f64], data: &Dataset, interval: &FprInterval) -> Result<(f64, f64)> {
    let p = interval.positions(data.num_negatives())?;
    let (pos, neg) = ranked_scores(w, data);
    let n = (pos.len() * p.width()) as f64;
    let upper = hinge_pauc_at(w, data, p) + head_terms(&pos, &neg, p, |_| true);
    let lower = if p.j_alpha == 0 {
        upper
    } else {
        let pivot = neg[p.j_alpha - 1];
        let eta_plus = head_terms(&pos, &neg, p, |s| s < pivot);
        let tail: f64 = pos
            .iter()
            .filter(|&&s| s < pivot)
            .map(|&s| {
                neg[p.j_alpha..p.j_beta]
                    .iter()
                    .map(|&z| hinge(1.0 - (s - z)))
                    .sum::<f64>()
            })
            .sum();
        eta_plus + tail / n
    };
    Ok((lower, upper))
}

fn head_terms(pos: &[f64], neg: &[f64], p: Positions, keep: impl Fn(f64) -> bool) -> f64 {
    let head = &neg[..p.j_alpha];
    let total: f64 = pos
        .iter()
        .filter(|&&s| keep(s))
        .map(|&s| head.iter().map(|&z| hinge(z - s)).sum::<f64>())
        .sum();
    total / (pos.len() * p.width()) as f64
}
