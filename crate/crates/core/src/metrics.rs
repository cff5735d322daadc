//! Ranking metrics of a fixed scorer: AUC, partial AUC, ROC curve, TPR at an FPR budget.
//!
//! A positive scoring exactly as high as a negative counts as a misranking.
//! Negatives are ranked by descending score with ties broken by original index.

use std::cmp::Ordering;

use crate::data::{FprInterval, Positions};
use crate::error::{PaucError, Result};

fn check_nonempty(pos: &[f64], neg: &[f64]) -> Result<()> {
    if pos.is_empty() || neg.is_empty() {
        return Err(PaucError::EmptyClass {
            positives: pos.len(),
            negatives: neg.len(),
        });
    }
    if pos.iter().chain(neg).any(|s| !s.is_finite()) {
        return Err(PaucError::NonFinite("scores"));
    }
    Ok(())
}

/// Indices of `scores` in descending order, ties by index.
pub fn rank_descending(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

fn sorted_ascending(scores: &[f64]) -> Vec<f64> {
    let mut v = scores.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

/// Number of `(i, j)` pairs with `pos[i] > neg_window[j]`.
fn count_correct(sorted_pos: &[f64], neg: impl Iterator<Item = f64>) -> usize {
    neg.map(|s| sorted_pos.len() - sorted_pos.partition_point(|&p| p <= s))
        .sum()
}

/// Fraction of positive-negative pairs ranked strictly correctly.
pub fn empirical_auc(pos: &[f64], neg: &[f64]) -> Result<f64> {
    check_nonempty(pos, neg)?;
    let sorted_pos = sorted_ascending(pos);
    let correct = count_correct(&sorted_pos, neg.iter().copied());
    Ok(correct as f64 / (pos.len() * neg.len()) as f64)
}

/// Normalized partial AUC over negatives ranked `j_alpha + 1 ..= j_beta`.
pub fn empirical_pauc(pos: &[f64], neg: &[f64], interval: &FprInterval) -> Result<f64> {
    check_nonempty(pos, neg)?;
    let positions = interval.positions(neg.len())?;
    Ok(pauc_at_positions(pos, neg, positions))
}

pub(crate) fn pauc_at_positions(pos: &[f64], neg: &[f64], p: Positions) -> f64 {
    let order = rank_descending(neg);
    let sorted_pos = sorted_ascending(pos);
    let window = order[p.j_alpha..p.j_beta].iter().map(|&j| neg[j]);
    count_correct(&sorted_pos, window) as f64 / (pos.len() * p.width()) as f64
}

/// Partial AUC risk: the fraction of window pairs with `pos <= neg`.
pub fn pauc_risk(pos: &[f64], neg: &[f64], interval: &FprInterval) -> Result<f64> {
    check_nonempty(pos, neg)?;
    let positions = interval.positions(neg.len())?;
    Ok(pauc_risk_at_positions(pos, neg, positions))
}

pub(crate) fn pauc_risk_at_positions(pos: &[f64], neg: &[f64], p: Positions) -> f64 {
    let order = rank_descending(neg);
    let sorted_pos = sorted_ascending(pos);
    let wrong: usize = order[p.j_alpha..p.j_beta]
        .iter()
        .map(|&j| sorted_pos.partition_point(|&s| s <= neg[j]))
        .sum();
    wrong as f64 / (pos.len() * p.width()) as f64
}

/// Empirical ROC curve as a list of `(fpr, tpr)` points, from `(0, 0)` to `(1, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    points: Vec<(f64, f64)>,
}

impl RocCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Trapezoidal area under the curve.
    pub fn area(&self) -> f64 {
        self.area_between(0.0, 1.0)
    }

    /// Area under the piecewise-linear curve restricted to `lo <= fpr <= hi`.
    pub fn area_between(&self, lo: f64, hi: f64) -> f64 {
        let mut area = 0.0;
        for seg in self.points.windows(2) {
            let ((x0, y0), (x1, y1)) = (seg[0], seg[1]);
            if x1 <= x0 {
                continue;
            }
            let a = x0.max(lo);
            let b = x1.min(hi);
            if b <= a {
                continue;
            }
            let at = |x: f64| y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            area += 0.5 * (at(a) + at(b)) * (b - a);
        }
        area
    }

    /// Two-column `fpr,tpr` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fpr,tpr\n");
        for &(f, t) in &self.points {
            out.push_str(&format!("{f},{t}\n"));
        }
        out
    }
}

/// Staircase ROC curve with one threshold per distinct score.
pub fn roc_curve(pos: &[f64], neg: &[f64]) -> Result<RocCurve> {
    check_nonempty(pos, neg)?;
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));

    let (m, n) = (pos.len() as f64, neg.len() as f64);
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = 0;
    while k < all.len() {
        let threshold = all[k].0;
        while k < all.len() && all[k].0 == threshold {
            if all[k].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        points.push((fp as f64 / n, tp as f64 / m));
    }
    Ok(RocCurve { points })
}

/// TPR of `score > t` at the smallest threshold `t` whose empirical FPR is within `fpr_limit`.
pub fn tpr_at_fpr(pos: &[f64], neg: &[f64], fpr_limit: f64) -> Result<f64> {
    check_nonempty(pos, neg)?;
    if !(0.0..=1.0).contains(&fpr_limit) {
        return Err(PaucError::InvalidConfig(format!(
            "FPR limit {fpr_limit} outside [0, 1]"
        )));
    }
    let n = neg.len();
    let allowed = ((n as f64 * fpr_limit + 1e-9).floor() as usize).min(n);
    if allowed == n {
        return Ok(1.0);
    }
    let order = rank_descending(neg);
    let threshold = neg[order[allowed]];
    let above = pos.iter().filter(|&&s| s > threshold).count();
    Ok(above as f64 / pos.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Score table with two scorers on 4 positives and 5 negatives.
    const F1_POS: [f64; 4] = [9.1, 6.8, 6.1, 5.7];
    const F1_NEG: [f64; 5] = [8.5, 8.1, 4.2, 3.6, 2.3];
    const F2_POS: [f64; 4] = [9.9, 8.7, 3.3, 2.1];
    const F2_NEG: [f64; 5] = [7.6, 5.3, 4.9, 4.4, 0.8];

    fn pair_count_auc(pos: &[f64], neg: &[f64]) -> f64 {
        let mut c = 0;
        for p in pos {
            for q in neg {
                if p > q {
                    c += 1;
                }
            }
        }
        c as f64 / (pos.len() * neg.len()) as f64
    }

    #[test]
    fn auc_of_score_table() {
        assert_eq!(pair_count_auc(&F1_POS, &F1_NEG), 14.0 / 20.0);
        assert_eq!(pair_count_auc(&F2_POS, &F2_NEG), 12.0 / 20.0);
        assert_eq!(empirical_auc(&F1_POS, &F1_NEG).unwrap(), 0.7);
        assert_eq!(empirical_auc(&F2_POS, &F2_NEG).unwrap(), 0.6);
        assert_eq!(empirical_auc(&[3.0, 4.0], &[1.0, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn ties_count_as_misranking() {
        assert_eq!(empirical_auc(&[1.0], &[1.0]).unwrap(), 0.0);
        let full = FprInterval::full();
        assert_eq!(pauc_risk(&[1.0], &[1.0], &full).unwrap(), 1.0);
    }

    #[test]
    fn empty_lists_are_errors() {
        assert!(empirical_auc(&[], &[1.0]).is_err());
        assert!(roc_curve(&[1.0], &[]).is_err());
    }

    #[test]
    fn pauc_of_score_table() {
        let i = FprInterval::new(0.1, 0.2).unwrap();
        assert_eq!(empirical_pauc(&F1_POS, &F1_NEG, &i).unwrap(), 0.25);
        assert_eq!(empirical_pauc(&F2_POS, &F2_NEG, &i).unwrap(), 0.5);
        assert_eq!(pauc_risk(&F1_POS, &F1_NEG, &i).unwrap(), 0.75);
    }

    #[test]
    fn full_interval_pauc_is_auc() {
        let full = FprInterval::full();
        assert_eq!(
            empirical_pauc(&F1_POS, &F1_NEG, &full).unwrap(),
            empirical_auc(&F1_POS, &F1_NEG).unwrap()
        );
    }

    #[test]
    fn risk_extremes() {
        let i = FprInterval::new(0.0, 0.5).unwrap();
        assert_eq!(pauc_risk(&[5.0, 6.0], &[1.0, 2.0, 3.0], &i).unwrap(), 0.0);
        assert_eq!(pauc_risk(&[0.0, -1.0], &[1.0, 2.0, 3.0], &i).unwrap(), 1.0);
    }

    #[test]
    fn roc_single_pair() {
        assert_eq!(
            roc_curve(&[2.0], &[1.0]).unwrap().points(),
            &[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
        );
        assert_eq!(
            roc_curve(&[1.0], &[2.0]).unwrap().points(),
            &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]
        );
    }

    #[test]
    fn roc_partial_area_matches_pauc() {
        let roc = roc_curve(&F1_POS, &F1_NEG).unwrap();
        let i = FprInterval::new(0.1, 0.2).unwrap();
        let pauc = empirical_pauc(&F1_POS, &F1_NEG, &i).unwrap();
        assert!((roc.area_between(0.1, 0.2) - pauc * 0.1).abs() < 1e-12);
        // Over the position grid the match is exact by construction.
        assert!((roc.area_between(0.0, 0.2) - pauc * 0.2).abs() < 1e-12);
        assert!((roc.area() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn tpr_at_fpr_cases() {
        assert_eq!(tpr_at_fpr(&F2_POS, &F2_NEG, 0.2).unwrap(), 0.5);
        assert_eq!(tpr_at_fpr(&[3.0, 4.0], &[1.0, 2.0], 0.0).unwrap(), 1.0);
        assert_eq!(tpr_at_fpr(&[1.0, 2.0], &[3.0, 4.0], 0.0).unwrap(), 0.0);
        assert_eq!(tpr_at_fpr(&[1.0, 2.0], &[3.0, 4.0], 1.0).unwrap(), 1.0);
    }

    #[test]
    fn csv_has_header() {
        let csv = roc_curve(&[2.0], &[1.0]).unwrap().to_csv();
        assert_eq!(csv, "fpr,tpr\n0,0\n0,1\n1,1\n");
    }
}
