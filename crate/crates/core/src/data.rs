//! Domain types and dataset ingestion.
//!
//! Datasets are read from svmlight-style text: one instance per line,
//! `<label> <idx>:<val> ...`, labels `+1`/`1` for positives and `-1` for
//! negatives, 1-based feature indices, `#` starting a comment.

use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{PaucError, Result};

/// Slack used when turning `n * alpha` and `n * beta` into integer positions,
/// so that e.g. `10 * 0.7 = 7.000000000000001` still maps to position 7.
const POSITION_SLACK: f64 = 1e-9;

/// A sparse real feature vector with strictly increasing 0-based indices.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    entries: Vec<(usize, f64)>,
    dim: usize,
}

impl FeatureVector {
    pub fn new(entries: Vec<(usize, f64)>, dim: usize) -> Result<Self> {
        let mut prev: Option<usize> = None;
        for &(idx, val) in &entries {
            if !val.is_finite() {
                return Err(PaucError::NonFinite("feature value"));
            }
            if prev.is_some_and(|p| idx <= p) {
                return Err(PaucError::InvalidConfig(format!(
                    "feature indices must be strictly increasing (saw {idx} after {})",
                    prev.unwrap()
                )));
            }
            if idx >= dim {
                return Err(PaucError::Dimension {
                    expected: dim,
                    found: idx + 1,
                });
            }
            prev = Some(idx);
        }
        Ok(Self { entries, dim })
    }

    /// Dense constructor; every coordinate becomes an entry.
    pub fn dense(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().copied().enumerate().collect(), values.len().max(1))
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sparse dot product. `weights` must cover every stored index.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| weights[i] * v).sum()
    }

    /// `acc += scale * self`.
    pub fn add_scaled_to(&self, acc: &mut [f64], scale: f64) {
        for &(i, v) in &self.entries {
            acc[i] += scale * v;
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.add_scaled_to(&mut out, 1.0);
        out
    }

    fn with_dim(mut self, dim: usize) -> Self {
        debug_assert!(self.entries.last().is_none_or(|&(i, _)| i < dim));
        self.dim = dim;
        self
    }
}

/// A labelled sample: `m >= 1` positives and `n >= 1` negatives of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    positives: Vec<FeatureVector>,
    negatives: Vec<FeatureVector>,
    dim: usize,
}

impl Dataset {
    pub fn new(positives: Vec<FeatureVector>, negatives: Vec<FeatureVector>, dim: usize) -> Result<Self> {
        if positives.is_empty() || negatives.is_empty() {
            return Err(PaucError::EmptyClass {
                positives: positives.len(),
                negatives: negatives.len(),
            });
        }
        if dim == 0 {
            return Err(PaucError::InvalidConfig("dimension must be positive".into()));
        }
        let fix = |v: FeatureVector| -> Result<FeatureVector> {
            if let Some(&(i, _)) = v.entries.last() {
                if i >= dim {
                    return Err(PaucError::Dimension {
                        expected: dim,
                        found: i + 1,
                    });
                }
            }
            Ok(v.with_dim(dim))
        };
        let positives = positives.into_iter().map(fix).collect::<Result<Vec<_>>>()?;
        let negatives = negatives.into_iter().map(fix).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            positives,
            negatives,
            dim,
        })
    }

    /// Builds a dataset from dense rows.
    pub fn from_dense(positives: &[Vec<f64>], negatives: &[Vec<f64>]) -> Result<Self> {
        let dim = positives
            .iter()
            .chain(negatives)
            .map(Vec::len)
            .max()
            .unwrap_or(0)
            .max(1);
        let conv = |rows: &[Vec<f64>]| {
            rows.iter()
                .map(|r| FeatureVector::new(r.iter().copied().enumerate().collect(), dim))
                .collect::<Result<Vec<_>>>()
        };
        Self::new(conv(positives)?, conv(negatives)?, dim)
    }

    pub fn positives(&self) -> &[FeatureVector] {
        &self.positives
    }

    pub fn negatives(&self) -> &[FeatureVector] {
        &self.negatives
    }

    pub fn num_positives(&self) -> usize {
        self.positives.len()
    }

    pub fn num_negatives(&self) -> usize {
        self.negatives.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Scores of positives and negatives under the linear scorer `w`.
    pub fn scores(&self, w: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert!(w.len() >= self.dim, "weight vector shorter than dataset dimension");
        (
            self.positives.iter().map(|x| x.dot(w)).collect(),
            self.negatives.iter().map(|x| x.dot(w)).collect(),
        )
    }

    /// Selects a sub-sample by class-local indices.
    pub fn subset(&self, positives: &[usize], negatives: &[usize]) -> Result<Self> {
        Self::new(
            positives.iter().map(|&i| self.positives[i].clone()).collect(),
            negatives.iter().map(|&j| self.negatives[j].clone()).collect(),
            self.dim,
        )
    }
}

/// A false-positive-rate range `[alpha, beta]` with `0 <= alpha < beta <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FprInterval {
    alpha: f64,
    beta: f64,
}

impl FprInterval {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let bad = |reason: &str| PaucError::InvalidInterval {
            alpha,
            beta,
            reason: reason.to_string(),
        };
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(bad("bounds must be finite"));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(bad("alpha must lie in [0, 1)"));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(bad("beta must lie in (0, 1]"));
        }
        if alpha >= beta {
            return Err(bad("alpha must be smaller than beta"));
        }
        Ok(Self { alpha, beta })
    }

    /// The full range `[0, 1]`.
    pub fn full() -> Self {
        Self { alpha: 0.0, beta: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Multiplies both bounds by `scale` (FROC-style rescaling of the FPR axis).
    pub fn scaled(&self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(PaucError::InvalidConfig(format!(
                "FPR scale must be positive, got {scale}"
            )));
        }
        Self::new(self.alpha * scale, (self.beta * scale).min(1.0))
    }

    /// `floor(n * alpha)`.
    pub fn j_alpha(&self, n: usize) -> usize {
        ((n as f64 * self.alpha + POSITION_SLACK).floor() as usize).min(n)
    }

    /// `ceil(n * beta)`.
    pub fn j_beta(&self, n: usize) -> usize {
        ((n as f64 * self.beta - POSITION_SLACK).ceil().max(0.0) as usize).min(n)
    }

    /// Integer positions for `n` negatives, rejecting degenerate intervals.
    pub fn positions(&self, n: usize) -> Result<Positions> {
        let (j_alpha, j_beta) = (self.j_alpha(n), self.j_beta(n));
        if j_alpha >= j_beta {
            return Err(PaucError::DegenerateInterval {
                alpha: self.alpha,
                beta: self.beta,
                n,
                j_alpha,
                j_beta,
            });
        }
        Ok(Positions { j_alpha, j_beta })
    }
}

/// Negative-rank window `j_alpha + 1 ..= j_beta` (1-based), `j_alpha < j_beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Positions {
    pub j_alpha: usize,
    pub j_beta: usize,
}

impl Positions {
    pub fn new(j_alpha: usize, j_beta: usize) -> Result<Self> {
        if j_alpha >= j_beta {
            return Err(PaucError::InvalidConfig(format!(
                "j_alpha ({j_alpha}) must be smaller than j_beta ({j_beta})"
            )));
        }
        Ok(Self { j_alpha, j_beta })
    }

    pub fn width(&self) -> usize {
        self.j_beta - self.j_alpha
    }
}

/// Which objective a model was trained for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Auc,
    PaucStruct,
    PaucDc,
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algo::Auc => "auc",
            Algo::PaucStruct => "pauc_struct",
            Algo::PaucDc => "pauc_dc",
        })
    }
}

/// A linear scorer `x -> w.x` (no intercept).
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub weights: Vec<f64>,
    pub trained_interval: Option<FprInterval>,
    pub trained_algo: Option<Algo>,
    pub c: Option<f64>,
}

/// On-disk model layout.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: u32,
    dim: usize,
    weights: Vec<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    algo: Option<Algo>,
    #[serde(rename = "C")]
    c: Option<f64>,
}

pub const FORMAT_VERSION: u32 = 1;

impl Model {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(PaucError::NonFinite("model weights"));
        }
        Ok(Self {
            weights,
            trained_interval: None,
            trained_algo: None,
            c: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// `w.x`; fails if `x` lives in a larger space than the model.
    pub fn score(&self, x: &FeatureVector) -> Result<f64> {
        if x.dim() > self.weights.len() {
            return Err(PaucError::Dimension {
                expected: self.weights.len(),
                found: x.dim(),
            });
        }
        Ok(x.dot(&self.weights))
    }

    /// Scores a whole dataset as `(positive scores, negative scores)`.
    pub fn score_dataset(&self, data: &Dataset) -> Result<(Vec<f64>, Vec<f64>)> {
        if data.dim() > self.weights.len() {
            return Err(PaucError::Dimension {
                expected: self.weights.len(),
                found: data.dim(),
            });
        }
        Ok(data.scores(&self.weights))
    }

    /// JSON value with sorted keys and a `format` tag.
    pub fn to_json(&self) -> serde_json::Value {
        let file = ModelFile {
            format: FORMAT_VERSION,
            dim: self.weights.len(),
            weights: self.weights.clone(),
            alpha: self.trained_interval.map(|i| i.alpha()),
            beta: self.trained_interval.map(|i| i.beta()),
            algo: self.trained_algo,
            c: self.c,
        };
        // serde_json's default map is ordered, so this sorts the keys.
        serde_json::to_value(file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != FORMAT_VERSION {
            return Err(PaucError::InvalidConfig(format!(
                "unsupported model format {}",
                file.format
            )));
        }
        if file.weights.len() != file.dim {
            return Err(PaucError::Dimension {
                expected: file.dim,
                found: file.weights.len(),
            });
        }
        let trained_interval = match (file.alpha, file.beta) {
            (Some(a), Some(b)) => Some(FprInterval::new(a, b)?),
            _ => None,
        };
        let mut model = Model::new(file.weights)?;
        model.trained_interval = trained_interval;
        model.trained_algo = file.algo;
        model.c = file.c;
        Ok(model)
    }
}

/// Reads an svmlight-format dataset.
pub fn parse_svmlight<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    let mut max_index: Option<usize> = None;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = lineno + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| PaucError::Parse { line: line_no, message };
        let mut tokens = content.split_whitespace();
        let label = tokens.next().expect("non-empty line has a token");
        let is_positive = match label {
            "+1" | "1" => true,
            "-1" => false,
            other => return Err(err(format!("unsupported label '{other}'"))),
        };
        let mut entries = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected <index>:<value>, found '{tok}'")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("bad feature index '{idx}'")))?;
            if idx == 0 {
                return Err(err("feature indices are 1-based".into()));
            }
            let val: f64 = val.parse().map_err(|_| err(format!("bad feature value '{val}'")))?;
            if !val.is_finite() {
                return Err(err(format!("non-finite feature value '{val}'")));
            }
            let idx = idx - 1;
            if let Some(&(prev, _)) = entries.last() {
                if idx <= prev {
                    return Err(err("feature indices must be strictly increasing".into()));
                }
            }
            entries.push((idx, val));
        }
        if let Some(&(last, _)) = entries.last() {
            max_index = Some(max_index.map_or(last, |m| m.max(last)));
        }
        if is_positive {
            positives.push(entries);
        } else {
            negatives.push(entries);
        }
    }

    let dim = max_index.map_or(1, |m| m + 1);
    let build = |rows: Vec<Vec<(usize, f64)>>| -> Vec<FeatureVector> {
        rows.into_iter().map(|entries| FeatureVector { entries, dim }).collect()
    };
    Dataset::new(build(positives), build(negatives), dim)
}

pub fn parse_svmlight_str(text: &str) -> Result<Dataset> {
    parse_svmlight(text.as_bytes())
}

/// Writes positives (label `+1`) followed by negatives (label `-1`).
pub fn write_svmlight(data: &Dataset) -> String {
    let mut out = String::new();
    let mut emit = |label: &str, x: &FeatureVector| {
        out.push_str(label);
        for &(i, v) in x.entries() {
            // Shortest round-trip formatting keeps the value bit-exact.
            let _ = write!(out, " {}:{}", i + 1, v);
        }
        out.push('\n');
    };
    for x in data.positives() {
        emit("+1", x);
    }
    for x in data.negatives() {
        emit("-1", x);
    }
    out
}

/// Per-feature z-score statistics. Constant features carry a standard deviation of 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl NormStats {
    /// Column statistics over all `m + n` instances (population variance).
    pub fn fit(data: &Dataset) -> Self {
        let dim = data.dim();
        let total = (data.num_positives() + data.num_negatives()) as f64;
        let all = || data.positives().iter().chain(data.negatives());

        let mut means = vec![0.0; dim];
        for x in all() {
            x.add_scaled_to(&mut means, 1.0);
        }
        means.iter_mut().for_each(|m| *m /= total);

        // Two-pass variance; implicit zeros contribute mean^2 each.
        let mut sq = vec![0.0; dim];
        let mut present = vec![0usize; dim];
        for x in all() {
            for &(i, v) in x.entries() {
                sq[i] += (v - means[i]).powi(2);
                present[i] += 1;
            }
        }
        let stds = (0..dim)
            .map(|i| {
                let missing = total - present[i] as f64;
                let var = (sq[i] + missing * means[i] * means[i]) / total;
                let sd = var.sqrt();
                if sd > 1e-12 * (1.0 + means[i].abs()) {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { means, stds }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn apply_vector(&self, x: &FeatureVector) -> Result<FeatureVector> {
        if x.dim() > self.dim() {
            return Err(PaucError::Dimension {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let mut dense = vec![0.0; self.dim()];
        x.add_scaled_to(&mut dense, 1.0);
        let entries = dense
            .into_iter()
            .enumerate()
            .map(|(i, v)| (i, (v - self.means[i]) / self.stds[i]))
            .collect();
        Ok(FeatureVector {
            entries,
            dim: self.dim(),
        })
    }

    /// Replays the transform on another dataset (e.g. a test split).
    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        let conv = |xs: &[FeatureVector]| xs.iter().map(|x| self.apply_vector(x)).collect::<Result<Vec<_>>>();
        Dataset::new(conv(data.positives())?, conv(data.negatives())?, self.dim())
    }
}

/// Normalizes every feature to zero mean and unit variance over the whole sample.
pub fn normalize_zscore(data: &Dataset) -> (Dataset, NormStats) {
    let stats = NormStats::fit(data);
    let out = stats.apply(data).expect("statistics fitted on the same data");
    (out, stats)
}
