use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{Algo, Dataset};
use crate::error::{PaucError, Result};
use crate::metrics::empirical_pauc;

use super::{train, TrainConfig};

/// How to hold out validation data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Split {
    /// Stratified k-fold.
    Folds(usize),
    /// A single stratified split with this fraction of each class held out.
    Holdout(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvRow {
    #[serde(rename = "C")]
    pub c: f64,
    pub mean_pauc: f64,
    pub fold_pauc: Vec<f64>,
    /// False when some fold hit an iteration cap; its partial model was scored.
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvResult {
    pub chosen_c: f64,
    pub table: Vec<CvRow>,
}

/// Decades `10^-5 .. 10^4`, or `10^-2 .. 10^4` for the DC trainer.
pub fn default_grid(algo: Algo) -> Vec<f64> {
    let lo = if algo == Algo::PaucDc { -2 } else { -5 };
    (lo..=4).map(|e| 10f64.powi(e)).collect()
}

/// Picks the `C` with the best mean held-out partial AUC; ties go to the earlier grid entry.
pub fn cross_validate_c(
    data: &Dataset,
    config: &TrainConfig,
    grid: &[f64],
    split: Split,
    seed: u64,
) -> Result<CvResult> {
    if grid.is_empty() {
        return Err(PaucError::InvalidConfig("empty C grid".into()));
    }
    let folds = make_folds(data, split, seed)?;
    let mut table = Vec::with_capacity(grid.len());
    for &c in grid {
        let cfg = TrainConfig { c, ..config.clone() };
        let mut fold_pauc = Vec::with_capacity(folds.len());
        let mut converged = true;
        for (train_set, valid_set) in &folds {
            let model = match train(train_set, &cfg) {
                Ok(r) => r.model,
                Err(PaucError::NotConverged { report, .. }) => {
                    converged = false;
                    report.model
                }
                Err(e) => return Err(e),
            };
            let (p, q) = valid_set.scores(&model.weights);
            fold_pauc.push(empirical_pauc(&p, &q, &cfg.interval)?);
        }
        let mean_pauc = fold_pauc.iter().sum::<f64>() / fold_pauc.len() as f64;
        log::info!("cv: C = {c:e}, mean pAUC = {mean_pauc:.6}");
        table.push(CvRow {
            c,
            mean_pauc,
            fold_pauc,
            converged,
        });
    }
    let best = table
        .iter()
        .enumerate()
        .fold(0, |b, (i, row)| if row.mean_pauc > table[b].mean_pauc { i } else { b });
    Ok(CvResult {
        chosen_c: table[best].c,
        table,
    })
}

fn make_folds(data: &Dataset, split: Split, seed: u64) -> Result<Vec<(Dataset, Dataset)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<usize> = (0..data.num_positives()).collect();
    let mut neg: Vec<usize> = (0..data.num_negatives()).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    // Each class is assigned to validation groups independently.
    let assign = |idx: &[usize], group: &dyn Fn(usize, usize) -> bool| -> (Vec<usize>, Vec<usize>) {
        let (mut train, mut valid) = (Vec::new(), Vec::new());
        for (rank, &i) in idx.iter().enumerate() {
            if group(rank, idx.len()) {
                valid.push(i);
            } else {
                train.push(i);
            }
        }
        (train, valid)
    };
    let groups: Vec<Box<dyn Fn(usize, usize) -> bool>> = match split {
        Split::Folds(k) => {
            if k < 2 {
                return Err(PaucError::InvalidConfig(format!("need at least 2 folds, got {k}")));
            }
            (0..k)
                .map(|f| Box::new(move |rank: usize, _| rank % k == f) as Box<dyn Fn(usize, usize) -> bool>)
                .collect()
        }
        Split::Holdout(frac) => {
            if !(frac > 0.0 && frac < 1.0) {
                return Err(PaucError::InvalidConfig(format!(
                    "holdout fraction must lie in (0, 1), got {frac}"
                )));
            }
            vec![Box::new(move |rank: usize, len: usize| {
                rank < ((len as f64 * frac).round() as usize).max(1)
            })]
        }
    };
    let mut out = Vec::with_capacity(groups.len());
    for group in &groups {
        let (pt, pv) = assign(&pos, group.as_ref());
        let (nt, nv) = assign(&neg, group.as_ref());
        if pt.is_empty() || pv.is_empty() || nt.is_empty() || nv.is_empty() {
            return Err(PaucError::EmptyClass {
                positives: pt.len().min(pv.len()),
                negatives: nt.len().min(nv.len()),
            });
        }
        out.push((data.subset(&pt, &nt)?, data.subset(&pv, &nv)?));
    }
    Ok(out)
}
