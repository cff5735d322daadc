//! Linear scorers trained to maximize the partial area under the ROC curve
//! over a false-positive-rate range `[alpha, beta]`.
//!
//! Three trainers are provided: a cutting-plane structural SVM for the full
//! AUC and for partial AUC (convex surrogates), and a concave-convex procedure
//! for the non-convex pairwise hinge surrogate over `[alpha, beta]`.

pub mod data;
pub mod error;
pub mod metrics;
pub mod mvc;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod ordering;
pub mod qp;
pub mod surrogate;
pub mod train;

pub use data::{
    normalize_zscore, parse_svmlight, parse_svmlight_str, write_svmlight, Algo, Dataset, FeatureVector, FprInterval,
    Model, NormStats, Positions,
};
pub use error::{PaucError, Result};
pub use metrics::{empirical_auc, empirical_pauc, pauc_risk, roc_curve, tpr_at_fpr, RocCurve};
pub use ordering::{Constraint, LossKind, OrderingCounts};
pub use train::{cross_validate_c, train, train_cccp, train_cutting_plane, TrainConfig, TrainReport};
