//! Exhaustive reference implementations for tiny instances.
//!
//! Everything here enumerates orderings explicitly and evaluates objectives
//! from their defining double sums, sharing no code with the fast paths.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::{Dataset, Positions};
use crate::error::{PaucError, Result};
use crate::ordering::LossKind;

/// Largest number of (negative permutation, slot assignment) pairs enumerated.
pub const ENUMERATION_LIMIT: usize = 5_000_000;

/// A realizable ordering matrix with one strict total order that produces it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidOrdering {
    /// `pi[i][j]` is true when positive `i` is ranked below negative `j`.
    pub pi: Vec<Vec<bool>>,
    /// Negative indices from highest to lowest ranked in the witness order.
    pub negative_order: Vec<usize>,
    /// For each positive, how many negatives precede it in the witness order.
    pub slots: Vec<usize>,
}

impl ValidOrdering {
    /// Re-derives the matrix from the witness order.
    pub fn witness_matrix(&self) -> Vec<Vec<bool>> {
        let k = self.negative_order.len();
        self.slots
            .iter()
            .map(|&s| {
                let mut row = vec![false; k];
                for &j in &self.negative_order[..s] {
                    row[j] = true;
                }
                row
            })
            .collect()
    }
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                go(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::with_capacity(factorial(k));
    go(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

/// Every distinct ordering matrix of `m` positives against `k` negatives that
/// some strict total order of the `m + k` items realizes.
///
/// A total order is fixed, as far as the matrix is concerned, by the order of
/// the negatives and by how many negatives precede each positive.
pub fn enumerate_valid_orderings(m: usize, k: usize) -> Result<Vec<ValidOrdering>> {
    if m == 0 || k == 0 {
        return Err(PaucError::InvalidConfig("need at least one item of each class".into()));
    }
    let work = factorial(k).saturating_mul((k + 1).saturating_pow(m as u32));
    if work > ENUMERATION_LIMIT {
        return Err(PaucError::SizeGuard(format!("{m} positives x {k} negatives")));
    }
    let mut seen: BTreeMap<Vec<Vec<bool>>, ValidOrdering> = BTreeMap::new();
    for order in permutations(k) {
        let mut slots = vec![0usize; m];
        loop {
            let candidate = ValidOrdering {
                pi: Vec::new(),
                negative_order: order.clone(),
                slots: slots.clone(),
            };
            let pi = candidate.witness_matrix();
            seen.entry(pi.clone()).or_insert(ValidOrdering { pi, ..candidate });
            // Odometer over slot assignments.
            let mut i = 0;
            while i < m && slots[i] == k {
                slots[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
            slots[i] += 1;
        }
    }
    Ok(seen.into_values().collect())
}

/// Exhaustive maximizer over subsets and orderings.
#[derive(Clone, Debug, PartialEq)]
pub struct BruteMvc {
    /// Chosen negatives, ascending index.
    pub z: Vec<usize>,
    /// Ordering over `z`, columns in the order of `z`.
    pub pi: Vec<Vec<bool>>,
    pub h: f64,
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            if n - j < size - cur.len() {
                break;
            }
            cur.push(j);
            go(j + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Objective of one (subset, ordering) pair from its defining double sums.
///
/// Loss and margin terms share the normalizer `m k` for the full AUC loss and
/// `m (j_beta - j_alpha)` for the truncated loss, where `j`-th ranked
/// negatives are read off the witness order.
pub fn direct_h(w: &[f64], data: &Dataset, z: &[usize], ordering: &ValidOrdering, kind: LossKind) -> f64 {
    let m = data.num_positives();
    let k = z.len();
    let pos: Vec<f64> = data.positives().iter().map(|x| x.dot(w)).collect();
    let neg: Vec<f64> = z.iter().map(|&j| data.negatives()[j].dot(w)).collect();
    let (window, norm) = match kind {
        LossKind::Auc => ((0, k), (m * k) as f64),
        LossKind::PaucTr(p) => ((p.j_alpha, p.j_beta), (m * p.width()) as f64),
    };
    let mut loss = 0.0;
    let mut margin = 0.0;
    for (row, s) in ordering.pi.iter().zip(&pos) {
        for &j in &ordering.negative_order[window.0..window.1] {
            if row[j] {
                loss += 1.0;
            }
        }
        for (&below, z) in row.iter().zip(&neg) {
            if below {
                margin += s - z;
            }
        }
    }
    (loss - margin) / norm
}

/// Maximizes over every subset of `j_beta` negatives (all negatives for the
/// full AUC loss) and every valid ordering of it.
pub fn brute_mvc(w: &[f64], data: &Dataset, kind: LossKind) -> Result<BruteMvc> {
    let n = data.num_negatives();
    let k = match kind {
        LossKind::Auc => n,
        LossKind::PaucTr(p) => {
            if p.j_beta > n || p.j_alpha >= p.j_beta {
                return Err(PaucError::InvalidConfig("positions do not fit the sample".into()));
            }
            p.j_beta
        }
    };
    let orderings = enumerate_valid_orderings(data.num_positives(), k)?;
    let mut best: Option<BruteMvc> = None;
    for z in subsets(n, k) {
        for o in &orderings {
            let h = direct_h(w, data, &z, o, kind);
            if best.as_ref().is_none_or(|b| h > b.h) {
                best = Some(BruteMvc {
                    z: z.clone(),
                    pi: o.pi.clone(),
                    h,
                });
            }
        }
    }
    Ok(best.expect("at least one subset and ordering"))
}

/// Structural surrogate built directly on all `n` negatives with the partial
/// AUC loss over ranks `j_alpha + 1 ..= j_beta`.
pub fn naive_struct_surrogate(w: &[f64], data: &Dataset, positions: Positions) -> Result<f64> {
    let n = data.num_negatives();
    if positions.j_beta > n || positions.j_alpha >= positions.j_beta {
        return Err(PaucError::InvalidConfig("positions do not fit the sample".into()));
    }
    let all: Vec<usize> = (0..n).collect();
    let orderings = enumerate_valid_orderings(data.num_positives(), n)?;
    Ok(orderings
        .iter()
        .map(|o| direct_h(w, data, &all, o, LossKind::PaucTr(positions)))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Largest convexity gap `f(l w1 + (1-l) w2) - l f(w1) - (1-l) f(w2)` over `lambdas`.
pub fn convexity_probe(f: impl Fn(&[f64]) -> f64, w1: &[f64], w2: &[f64], lambdas: &[f64]) -> f64 {
    let (f1, f2) = (f(w1), f(w2));
    lambdas
        .iter()
        .map(|&l| {
            let mix: Vec<f64> = w1.iter().zip(w2).map(|(a, b)| l * a + (1.0 - l) * b).collect();
            f(&mix) - l * f1 - (1.0 - l) * f2
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Dataset with standard normal features.
pub fn random_dataset(rng: &mut impl Rng, m: usize, n: usize, dim: usize) -> Dataset {
    let mut draw = |count: usize| -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
            .collect()
    };
    let pos = draw(m);
    let neg = draw(n);
    Dataset::from_dense(&pos, &neg).expect("normal draws are finite")
}

/// Standard normal weight vector.
pub fn random_weights(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Rescales `w` so that every positive-negative score gap has magnitude at least one.
///
/// Returns `None` when some gap is zero.
pub fn with_unit_gaps(w: &[f64], data: &Dataset) -> Option<Vec<f64>> {
    let (pos, neg) = data.scores(w);
    let min_gap = pos
        .iter()
        .flat_map(|s| neg.iter().map(move |z| (s - z).abs()))
        .fold(f64::INFINITY, f64::min);
    if min_gap < 1e-9 {
        return None;
    }
    // Slightly above one so rounding cannot land a gap just under the threshold.
    let scale = (1.0 + 1e-9) / min_gap;
    Some(w.iter().map(|x| x * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ordering_counts() {
        assert_eq!(enumerate_valid_orderings(1, 1).unwrap().len(), 2);
        assert_eq!(enumerate_valid_orderings(1, 2).unwrap().len(), 4);
        // Two positives against two negatives: 14 of the 16 matrices are realizable.
        assert_eq!(enumerate_valid_orderings(2, 2).unwrap().len(), 14);
        assert!(enumerate_valid_orderings(8, 8).is_err());
    }

    #[test]
    fn witnesses_reproduce_matrices() {
        for o in enumerate_valid_orderings(2, 3).unwrap() {
            assert_eq!(o.witness_matrix(), o.pi);
        }
    }

    #[test]
    fn separated_sample_has_zero_brute_value() {
        let d = Dataset::from_dense(&[vec![5.0], vec![6.0]], &[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let r = brute_mvc(&[1.0], &d, LossKind::PaucTr(Positions::new(1, 2).unwrap())).unwrap();
        assert_eq!(r.h, 0.0);
        assert_eq!(
            naive_struct_surrogate(&[1.0], &d, Positions::new(0, 2).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn probe_on_linear_function_is_flat() {
        let f = |w: &[f64]| 2.0 * w[0] - w[1];
        let gap = convexity_probe(f, &[1.0, 0.0], &[0.0, 1.0], &[0.25, 0.5, 0.75]);
        assert!(gap.abs() < 1e-12);
    }

    #[test]
    fn unit_gap_rescaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = random_dataset(&mut rng, 3, 4, 2);
        let w = with_unit_gaps(&random_weights(&mut rng, 2), &d).unwrap();
        let (p, q) = d.scores(&w);
        assert!(p.iter().all(|s| q.iter().all(|z| (s - z).abs() >= 1.0)));
    }
}
