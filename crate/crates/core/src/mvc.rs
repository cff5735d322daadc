//! Most-violated-constraint search for the full AUC and partial AUC surrogates.

use crate::data::{Dataset, FeatureVector, FprInterval, Positions};
use crate::error::{PaucError, Result};
use crate::metrics::rank_descending;
use crate::ordering::{build_constraint, Constraint, LossKind, OrderingCounts};

/// A maximizing (subset, ordering) pair together with its objective value.
#[derive(Clone, Debug, PartialEq)]
pub struct MostViolated {
    /// Indices of tracked negatives in descending score order.
    pub z: Vec<usize>,
    /// Row `i` of the ordering is `cuts[i]` ones followed by zeros.
    pub cuts: Vec<usize>,
    pub counts: OrderingCounts,
    pub h: f64,
    pub kind: LossKind,
}

impl MostViolated {
    /// The explicit 0/1 ordering matrix over the tracked negatives.
    pub fn rows(&self) -> Vec<Vec<bool>> {
        let k = self.z.len();
        self.cuts.iter().map(|&r| (0..k).map(|j| j < r).collect()).collect()
    }

    pub fn constraint(&self, data: &Dataset) -> Result<Constraint> {
        let z: Vec<&FeatureVector> = self.z.iter().map(|&j| &data.negatives()[j]).collect();
        build_constraint(data.positives(), &z, &self.counts, self.kind, data.dim())
    }
}

/// Indices of the `k` highest-scoring negatives, descending, ties by index.
pub fn top_k_negatives(w: &[f64], negatives: &[FeatureVector], k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > negatives.len() {
        return Err(PaucError::InvalidConfig(format!(
            "cannot take top {k} of {} negatives",
            negatives.len()
        )));
    }
    let scores: Vec<f64> = negatives.iter().map(|x| x.dot(w)).collect();
    let mut order = rank_descending(&scores);
    order.truncate(k);
    Ok(order)
}

/// Maximizer over all orderings of all positives against all negatives.
pub fn mvc_auc(w: &[f64], data: &Dataset) -> Result<MostViolated> {
    let n = data.num_negatives();
    let mut out = mvc_prefix(w, data, n)?;
    out.kind = LossKind::Auc;
    Ok(out)
}

/// Maximizer for an interval `[0, beta]`.
pub fn mvc_pauc_0beta(w: &[f64], data: &Dataset, interval: &FprInterval) -> Result<MostViolated> {
    let p = interval.positions(data.num_negatives())?;
    if p.j_alpha != 0 {
        return Err(PaucError::InvalidConfig(format!(
            "interval starts at position {}; expected 0",
            p.j_alpha
        )));
    }
    mvc_prefix(w, data, p.j_beta)
}

/// Maximizer for an interval `[alpha, beta]` with `j_alpha >= 1`.
pub fn mvc_pauc_general(w: &[f64], data: &Dataset, interval: &FprInterval) -> Result<MostViolated> {
    let p = interval.positions(data.num_negatives())?;
    if p.j_alpha == 0 {
        return Err(PaucError::InvalidConfig(
            "interval starts at position 0; use the [0, beta] search".into(),
        ));
    }
    mvc_positions(w, data, p)
}

/// Dispatches on the positions: prefix search when `j_alpha == 0`, row search otherwise.
pub fn mvc_positions(w: &[f64], data: &Dataset, p: Positions) -> Result<MostViolated> {
    if p.j_beta > data.num_negatives() {
        return Err(PaucError::InvalidConfig(format!(
            "position {} exceeds {} negatives",
            p.j_beta,
            data.num_negatives()
        )));
    }
    if p.j_alpha == 0 {
        return mvc_prefix(w, data, p.j_beta);
    }
    let z = top_k_negatives(w, data.negatives(), p.j_beta)?;
    let zs: Vec<f64> = z.iter().map(|&j| data.negatives()[j].dot(w)).collect();
    let (ja, jb) = (p.j_alpha, p.j_beta);

    let mut cuts = Vec::with_capacity(data.num_positives());
    let mut total = 0.0;
    for x in data.positives() {
        let s = x.dot(w);
        // Candidate with r <= j_alpha: include head negatives scoring at least s.
        let r0 = zs[..ja].partition_point(|&z| s - z <= 0.0);
        let h0: f64 = zs[..r0].iter().map(|&z| z - s).sum();
        // Candidate with r >= j_alpha: full head, then tail negatives within margin.
        let r1 = ja.max(zs.partition_point(|&z| s - z <= 1.0));
        let h1: f64 =
            zs[..ja].iter().map(|&z| z - s).sum::<f64>() + zs[ja..r1].iter().map(|&z| 1.0 - s + z).sum::<f64>();
        if h0 >= h1 {
            cuts.push(r0);
            total += h0;
        } else {
            cuts.push(r1);
            total += h1;
        }
    }
    let counts = OrderingCounts::from_cuts(&cuts, jb)?;
    let h = total / (data.num_positives() * p.width()) as f64;
    Ok(MostViolated {
        z,
        cuts,
        counts,
        h,
        kind: LossKind::PaucTr(p),
    })
}

fn mvc_prefix(w: &[f64], data: &Dataset, k: usize) -> Result<MostViolated> {
    let z = top_k_negatives(w, data.negatives(), k)?;
    let zs: Vec<f64> = z.iter().map(|&j| data.negatives()[j].dot(w)).collect();
    let mut prefix = Vec::with_capacity(k + 1);
    prefix.push(0.0);
    for &s in &zs {
        prefix.push(prefix.last().unwrap() + s);
    }
    let mut cuts = Vec::with_capacity(data.num_positives());
    let mut total = 0.0;
    for x in data.positives() {
        let s = x.dot(w);
        let r = zs.partition_point(|&z| s - z <= 1.0);
        total += r as f64 * (1.0 - s) + prefix[r];
        cuts.push(r);
    }
    let counts = OrderingCounts::from_cuts(&cuts, k)?;
    let h = total / (data.num_positives() * k) as f64;
    Ok(MostViolated {
        z,
        cuts,
        counts,
        h,
        kind: LossKind::PaucTr(Positions { j_alpha: 0, j_beta: k }),
    })
}
