//! Relative orderings of positives against a tracked list of negatives.
//!
//! An ordering matrix `pi` has `pi[i][j] = 1` when positive `i` is ranked below
//! negative `j`. It is stored compactly as two count vectors: `a_plus[i]` is the
//! number of tracked negatives ranked below positive `i`, and `a_minus[j]` is the
//! number of positives ranked above negative `j`. Tracked negatives are always
//! kept in descending order of the current model score.

use crate::data::{FeatureVector, Positions};
use crate::error::{PaucError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingCounts {
    a_plus: Vec<usize>,
    a_minus: Vec<usize>,
}

impl OrderingCounts {
    pub fn new(a_plus: Vec<usize>, a_minus: Vec<usize>) -> Result<Self> {
        let (m, k) = (a_plus.len(), a_minus.len());
        if m == 0 || k == 0 {
            return Err(PaucError::InvalidConfig(
                "ordering needs at least one positive and one negative".into(),
            ));
        }
        if a_plus.iter().any(|&a| a > k) || a_minus.iter().any(|&a| a > m) {
            return Err(PaucError::InvalidConfig("ordering count out of range".into()));
        }
        if a_plus.iter().sum::<usize>() != a_minus.iter().sum::<usize>() {
            return Err(PaucError::InvalidConfig("ordering counts do not balance".into()));
        }
        Ok(Self { a_plus, a_minus })
    }

    /// The all-correct ordering: every positive above every negative.
    pub fn perfect(m: usize, k: usize) -> Self {
        Self {
            a_plus: vec![k; m],
            a_minus: vec![m; k],
        }
    }

    /// The fully reversed ordering.
    pub fn reversed(m: usize, k: usize) -> Self {
        Self {
            a_plus: vec![0; m],
            a_minus: vec![0; k],
        }
    }

    /// Counts of an explicit 0/1 matrix (`true` = positive below negative).
    pub fn from_matrix(pi: &[Vec<bool>]) -> Result<Self> {
        let m = pi.len();
        let k = pi.first().map_or(0, Vec::len);
        if let Some(row) = pi.iter().find(|r| r.len() != k) {
            return Err(PaucError::Dimension {
                expected: k,
                found: row.len(),
            });
        }
        let mut a_plus = vec![0; m];
        let mut a_minus = vec![0; k];
        for (i, row) in pi.iter().enumerate() {
            for (j, &below) in row.iter().enumerate() {
                if !below {
                    a_plus[i] += 1;
                    a_minus[j] += 1;
                }
            }
        }
        Self::new(a_plus, a_minus)
    }

    /// Counts of a matrix whose row `i` is `r_i` ones followed by zeros.
    pub fn from_cuts(cuts: &[usize], k: usize) -> Result<Self> {
        if cuts.iter().any(|&r| r > k) {
            return Err(PaucError::InvalidConfig("row cut exceeds number of negatives".into()));
        }
        let a_plus = cuts.iter().map(|&r| k - r).collect();
        let mut starts = vec![0usize; k + 1];
        for &r in cuts {
            starts[r] += 1;
        }
        // a_minus[j] = #{i : r_i <= j}
        let mut a_minus = Vec::with_capacity(k);
        let mut acc = 0;
        for &s in &starts[..k] {
            acc += s;
            a_minus.push(acc);
        }
        Self::new(a_plus, a_minus)
    }

    pub fn m(&self) -> usize {
        self.a_plus.len()
    }

    pub fn k(&self) -> usize {
        self.a_minus.len()
    }

    pub fn a_plus(&self) -> &[usize] {
        &self.a_plus
    }

    pub fn a_minus(&self) -> &[usize] {
        &self.a_minus
    }

    /// Number of pairs with the positive ranked below the negative.
    pub fn misranked_pairs(&self) -> usize {
        self.m() * self.k() - self.a_plus.iter().sum::<usize>()
    }
}

/// Joint feature map `(1/(mk)) (sum_i a_plus[i] x_i - sum_j a_minus[j] z_j)`.
pub fn joint_feature_map(
    positives: &[FeatureVector],
    z: &[&FeatureVector],
    counts: &OrderingCounts,
    dim: usize,
) -> Result<Vec<f64>> {
    check_shape(positives, z, counts)?;
    let scale = 1.0 / (counts.m() * counts.k()) as f64;
    let mut out = vec![0.0; dim];
    for (x, &a) in positives.iter().zip(counts.a_plus()) {
        check_dim(x, dim)?;
        x.add_scaled_to(&mut out, a as f64 * scale);
    }
    for (x, &a) in z.iter().zip(counts.a_minus()) {
        check_dim(x, dim)?;
        x.add_scaled_to(&mut out, -(a as f64) * scale);
    }
    Ok(out)
}

/// Full AUC loss: the fraction of misranked pairs.
pub fn delta_auc(counts: &OrderingCounts) -> f64 {
    let m = counts.m();
    let wrong: usize = counts.a_minus().iter().map(|&a| m - a).sum();
    wrong as f64 / (m * counts.k()) as f64
}

/// Truncated partial AUC loss over tracked positions `j_alpha + 1 ..= j_beta`.
pub fn delta_pauc_tr(counts: &OrderingCounts, positions: Positions) -> Result<f64> {
    if positions.j_beta > counts.k() || positions.j_alpha >= positions.j_beta {
        return Err(PaucError::InvalidConfig(format!(
            "positions ({}, {}) do not fit {} tracked negatives",
            positions.j_alpha,
            positions.j_beta,
            counts.k()
        )));
    }
    let m = counts.m();
    let wrong: usize = counts.a_minus()[positions.j_alpha..positions.j_beta]
        .iter()
        .map(|&a| m - a)
        .sum();
    Ok(wrong as f64 / (m * positions.width()) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossKind {
    Auc,
    /// Truncated loss on a list of `j_beta` tracked negatives.
    PaucTr(Positions),
}

/// One cutting-plane constraint: `xi >= loss - w . dphi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub loss: f64,
    pub dphi: Vec<f64>,
}

impl Constraint {
    pub fn zero(dim: usize) -> Self {
        Self {
            loss: 0.0,
            dphi: vec![0.0; dim],
        }
    }

    /// Violation `loss - w . dphi`.
    pub fn h(&self, w: &[f64]) -> f64 {
        self.loss - dot(w, &self.dphi)
    }
}

/// Builds the constraint for ordering `counts` of `positives` against tracked list `z`.
///
/// For the truncated loss the feature difference carries the same
/// `1/(m (j_beta - j_alpha))` normalizer as the loss, so that the margin
/// per pair is one.
pub fn build_constraint(
    positives: &[FeatureVector],
    z: &[&FeatureVector],
    counts: &OrderingCounts,
    kind: LossKind,
    dim: usize,
) -> Result<Constraint> {
    check_shape(positives, z, counts)?;
    let (m, k) = (counts.m(), counts.k());
    let (loss, norm) = match kind {
        LossKind::Auc => (delta_auc(counts), (m * k) as f64),
        LossKind::PaucTr(p) => {
            if p.j_beta != k {
                return Err(PaucError::InvalidConfig(format!(
                    "truncated loss expects {} tracked negatives, found {k}",
                    p.j_beta
                )));
            }
            (delta_pauc_tr(counts, p)?, (m * p.width()) as f64)
        }
    };
    let mut dphi = vec![0.0; dim];
    for (x, &a) in positives.iter().zip(counts.a_plus()) {
        check_dim(x, dim)?;
        if a < k {
            x.add_scaled_to(&mut dphi, (k - a) as f64 / norm);
        }
    }
    for (x, &a) in z.iter().zip(counts.a_minus()) {
        check_dim(x, dim)?;
        if a < m {
            x.add_scaled_to(&mut dphi, -((m - a) as f64) / norm);
        }
    }
    Ok(Constraint { loss, dphi })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_shape(positives: &[FeatureVector], z: &[&FeatureVector], counts: &OrderingCounts) -> Result<()> {
    if positives.len() != counts.m() {
        return Err(PaucError::Dimension {
            expected: counts.m(),
            found: positives.len(),
        });
    }
    if z.len() != counts.k() {
        return Err(PaucError::Dimension {
            expected: counts.k(),
            found: z.len(),
        });
    }
    Ok(())
}

fn check_dim(x: &FeatureVector, dim: usize) -> Result<()> {
    if x.dim() > dim {
        return Err(PaucError::Dimension {
            expected: dim,
            found: x.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::dense(v).unwrap()
    }

    fn direct_phi(pos: &[FeatureVector], neg: &[FeatureVector], pi: &[Vec<bool>], dim: usize) -> Vec<f64> {
        let (m, k) = (pos.len(), neg.len());
        let mut out = vec![0.0; dim];
        for i in 0..m {
            for j in 0..k {
                if !pi[i][j] {
                    let (a, b) = (pos[i].to_dense(), neg[j].to_dense());
                    for (d, o) in out.iter_mut().enumerate() {
                        *o += (a.get(d).unwrap_or(&0.0) - b.get(d).unwrap_or(&0.0)) / (m * k) as f64;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn counts_of_small_matrices() {
        let c = OrderingCounts::from_matrix(&[vec![false; 3], vec![false; 3]]).unwrap();
        assert_eq!((c.a_plus(), c.a_minus()), (&[3, 3][..], &[2, 2, 2][..]));
        let c = OrderingCounts::from_matrix(&[vec![true; 3], vec![true; 3]]).unwrap();
        assert_eq!((c.a_plus(), c.a_minus()), (&[0, 0][..], &[0, 0, 0][..]));
        let c = OrderingCounts::from_matrix(&[vec![false, true], vec![false, false]]).unwrap();
        assert_eq!((c.a_plus(), c.a_minus()), (&[1, 2][..], &[2, 1][..]));
    }

    #[test]
    fn ragged_matrix_is_rejected() {
        assert!(OrderingCounts::from_matrix(&[vec![false, true], vec![false]]).is_err());
    }

    #[test]
    fn cuts_match_matrix() {
        let cuts = [0, 2, 3, 1];
        let k = 3;
        let pi: Vec<Vec<bool>> = cuts.iter().map(|&r| (0..k).map(|j| j < r).collect()).collect();
        assert_eq!(
            OrderingCounts::from_cuts(&cuts, k).unwrap(),
            OrderingCounts::from_matrix(&pi).unwrap()
        );
    }

    #[test]
    fn losses() {
        let mixed = OrderingCounts::from_matrix(&[vec![false, true], vec![false, false]]).unwrap();
        assert_eq!(delta_auc(&OrderingCounts::perfect(2, 3)), 0.0);
        assert_eq!(delta_auc(&OrderingCounts::reversed(2, 3)), 1.0);
        assert_eq!(delta_auc(&mixed), 0.25);
        let p = Positions::new(1, 2).unwrap();
        assert_eq!(delta_pauc_tr(&mixed, p).unwrap(), 0.5);
        assert_eq!(delta_pauc_tr(&OrderingCounts::perfect(2, 2), p).unwrap(), 0.0);
        assert_eq!(delta_pauc_tr(&OrderingCounts::reversed(2, 2), p).unwrap(), 1.0);
        assert!(delta_pauc_tr(&mixed, Positions { j_alpha: 1, j_beta: 3 }).is_err());
    }

    #[test]
    fn feature_map_matches_double_sum() {
        let pos = vec![fv(&[1.0, 2.0]), fv(&[-0.5, 0.3])];
        let neg = vec![fv(&[0.2, -1.0]), fv(&[3.0, 0.0])];
        let z: Vec<&FeatureVector> = neg.iter().collect();
        for bits in 0u32..16 {
            let pi: Vec<Vec<bool>> = (0..2)
                .map(|i| (0..2).map(|j| bits >> (2 * i + j) & 1 == 1).collect())
                .collect();
            let counts = OrderingCounts::from_matrix(&pi).unwrap();
            let got = joint_feature_map(&pos, &z, &counts, 2).unwrap();
            let want = direct_phi(&pos, &neg, &pi, 2);
            for d in 0..2 {
                assert!((got[d] - want[d]).abs() < 1e-12);
            }
        }
        let zero = joint_feature_map(&pos, &z, &OrderingCounts::reversed(2, 2), 2).unwrap();
        assert_eq!(zero, vec![0.0, 0.0]);
    }

    #[test]
    fn perfect_ordering_gives_zero_constraint() {
        let pos = vec![fv(&[1.0, 2.0])];
        let neg = [fv(&[0.0, 1.0]), fv(&[2.0, 0.5])];
        let z: Vec<&FeatureVector> = neg.iter().collect();
        let c = build_constraint(&pos, &z, &OrderingCounts::perfect(1, 2), LossKind::Auc, 2).unwrap();
        assert_eq!(c, Constraint::zero(2));
        assert_eq!(c.h(&[5.0, -3.0]), 0.0);

        let rev = build_constraint(&pos, &z, &OrderingCounts::reversed(1, 2), LossKind::Auc, 2).unwrap();
        let phi_star = joint_feature_map(&pos, &z, &OrderingCounts::perfect(1, 2), 2).unwrap();
        assert_eq!(rev.loss, 1.0);
        assert_eq!(rev.dphi, phi_star);
    }

    #[test]
    fn truncated_constraint_is_rescaled() {
        let pos = vec![fv(&[1.0])];
        let neg = [fv(&[3.0]), fv(&[2.0])];
        let z: Vec<&FeatureVector> = neg.iter().collect();
        let p = Positions::new(1, 2).unwrap();
        let c = build_constraint(&pos, &z, &OrderingCounts::reversed(1, 2), LossKind::PaucTr(p), 1).unwrap();
        // Both pairs reversed: dphi = (2 x - z1 - z2) / (m (j_beta - j_alpha)).
        assert_eq!(c.loss, 1.0);
        assert_eq!(c.dphi, vec![2.0 - 5.0]);
        assert!(build_constraint(&pos, &z[..1], &OrderingCounts::reversed(1, 1), LossKind::PaucTr(p), 1).is_err());
    }
}
