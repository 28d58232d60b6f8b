//! Evaluation against expert judgments: similarity buckets, per-pair and
//! per-domain error, and a small classification report.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// The five similarity degrees experts assign, with their score intervals.
/// All intervals are half-open except the last, which includes 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bucket {
    Dissimilar,
    LittleSimilar,
    AveragelySimilar,
    VerySimilar,
    Identic,
}

impl Bucket {
    pub const ALL: [Bucket; 5] = [
        Bucket::Dissimilar,
        Bucket::LittleSimilar,
        Bucket::AveragelySimilar,
        Bucket::VerySimilar,
        Bucket::Identic,
    ];

    /// The score interval `[lo, hi)` assigned to this degree (`[lo, hi]`
    /// for [`Bucket::Identic`]).
    pub fn bounds<F: Scalar>(self) -> (F, F) {
        let r = |n: usize, d: usize| F::from_ratio(n, d);
        match self {
            Bucket::Dissimilar => (F::zero(), r(2, 10)),
            Bucket::LittleSimilar => (r(2, 10), r(5, 10)),
            Bucket::AveragelySimilar => (r(5, 10), r(7, 10)),
            Bucket::VerySimilar => (r(7, 10), r(9, 10)),
            Bucket::Identic => (r(9, 10), F::one()),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bucket::Dissimilar => "dissimilar",
            Bucket::LittleSimilar => "little_similar",
            Bucket::AveragelySimilar => "averagely_similar",
            Bucket::VerySimilar => "very_similar",
            Bucket::Identic => "identic",
        }
    }

    /// Parses an expert label, tolerating case and separator variations
    /// ("Very Similar", "very_similar", "verysimilar").
    pub fn from_label(label: &str) -> Option<Self> {
        let folded: String = label
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_lowercase();
        match folded.as_str() {
            "dissimilar" => Some(Bucket::Dissimilar),
            "littlesimilar" => Some(Bucket::LittleSimilar),
            "averagelysimilar" => Some(Bucket::AveragelySimilar),
            "verysimilar" => Some(Bucket::VerySimilar),
            "identic" | "identical" => Some(Bucket::Identic),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad csv record: {0}")]
    Csv(#[from] csv::Error),
    #[error("score {score} is outside [0, 1]")]
    OutOfRange { score: f64 },
    #[error("cannot evaluate an empty pair list")]
    EmptyList,
    #[error("duplicate expert judgment for pair {a:?} / {b:?}")]
    DuplicatePair { a: String, b: String },
    #[error("unknown expert label {label:?}")]
    UnknownLabel { label: String },
    #[error("labels reference unknown service {id:?}")]
    UnknownServiceId { id: String },
}

/// Maps a score in `[0, 1]` to its bucket.
pub fn bucketize<F: Scalar>(score: F) -> Result<Bucket, EvalError> {
    if !(score >= F::zero() && score <= F::one()) {
        return Err(EvalError::OutOfRange {
            score: score.to_f64().unwrap_or(f64::NAN),
        });
    }
    for bucket in Bucket::ALL {
        let (lo, hi) = bucket.bounds::<F>();
        if score >= lo && (score < hi || bucket == Bucket::Identic) {
            return Ok(bucket);
        }
    }
    unreachable!("buckets cover [0, 1]");
}

/// Distance from a score to the expert's interval: zero inside the interval
/// (endpoints included), otherwise the gap to the nearer endpoint.
pub fn pair_error<F: Scalar>(score: F, expert: Bucket) -> F {
    let (lo, hi) = expert.bounds::<F>();
    if score < lo {
        lo - score
    } else if score > hi {
        score - hi
    } else {
        F::zero()
    }
}

/// Mean pair error over a domain's judged pairs.
pub fn domain_error<F: Scalar>(pairs: &[(F, Bucket)]) -> Result<F, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyList);
    }
    let mut total = F::zero();
    for &(score, expert) in pairs {
        total = total + pair_error(score, expert);
    }
    Ok(total / F::from_usize(pairs.len()).expect("pair count"))
}

/// An expert judgment for an unordered service pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPair {
    pub service_a: String,
    pub service_b: String,
    pub expert: Bucket,
}

/// A judged pair together with the score under evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair<F> {
    pub service_a: String,
    pub service_b: String,
    pub score: F,
    pub expert: Bucket,
}

/// Expert judgments keyed by unordered pair.
#[derive(Debug, Clone, Default)]
pub struct ExpertLabelSet {
    pairs: Vec<LabeledPair>,
}

impl ExpertLabelSet {
    /// Loads judgments from a CSV file with a `service_a,service_b,label`
    /// header. The same unordered pair may not be judged twice.
    pub fn from_csv(path: &Path) -> Result<Self, EvalError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.kind() {
                csv::ErrorKind::Io(_) => EvalError::Io {
                    path: path.display().to_string(),
                    source: std::io::Error::other(e.to_string()),
                },
                _ => EvalError::Csv(e),
            })?;
        let mut pairs = Vec::new();
        let mut seen: HashMap<(String, String), ()> = HashMap::new();
        for record in reader.deserialize() {
            let row: LabelRow = record?;
            let expert = Bucket::from_label(&row.label).ok_or_else(|| EvalError::UnknownLabel {
                label: row.label.clone(),
            })?;
            let key = unordered_key(&row.service_a, &row.service_b);
            if seen.insert(key, ()).is_some() {
                return Err(EvalError::DuplicatePair {
                    a: row.service_a,
                    b: row.service_b,
                });
            }
            pairs.push(LabeledPair {
                service_a: row.service_a,
                service_b: row.service_b,
                expert,
            });
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[LabeledPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn unordered_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Deserialize)]
struct LabelRow {
    service_a: String,
    service_b: String,
    label: String,
}

#[derive(Deserialize)]
struct ReplayRow {
    service_a: String,
    service_b: String,
    score: f64,
    label: String,
}

/// Loads previously recorded scores with their judgments from a CSV file
/// with a `service_a,service_b,score,label` header.
pub fn load_replay<F: Scalar>(path: &Path) -> Result<Vec<ScoredPair<F>>, EvalError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => EvalError::Io {
                path: path.display().to_string(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => EvalError::Csv(e),
        })?;
    let mut out = Vec::new();
    for record in reader.deserialize() {
        let row: ReplayRow = record?;
        let expert = Bucket::from_label(&row.label).ok_or_else(|| EvalError::UnknownLabel {
            label: row.label.clone(),
        })?;
        out.push(ScoredPair {
            service_a: row.service_a,
            service_b: row.service_b,
            score: F::from_config(row.score),
            expert,
        });
    }
    Ok(out)
}

/// One evaluated pair in a report.
#[derive(Debug, Clone, Serialize)]
pub struct PairReport<F> {
    pub service_a: String,
    pub service_b: String,
    pub score: F,
    pub expert: Bucket,
    pub predicted: Bucket,
    pub error: F,
}

/// Aggregate evaluation results for one set of judged pairs.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport<F> {
    pub per_pair: Vec<PairReport<F>>,
    /// Mean distance between scores and expert intervals.
    pub domain_error: F,
    /// Fraction of pairs whose score lands in the expert's bucket.
    pub bucket_accuracy: F,
    /// Of the pairs scored at or above the relevance threshold, the
    /// fraction the experts consider relevant. Absent when nothing was
    /// retrieved.
    pub precision: Option<F>,
    /// Of the pairs the experts consider relevant, the fraction scored at
    /// or above the relevance threshold. Absent when nothing is relevant.
    pub recall: Option<F>,
    pub relevance_threshold: F,
}

/// Buckets counting as "relevant" for precision/recall: a pair the experts
/// judged at least averagely similar.
fn relevant(bucket: Bucket) -> bool {
    matches!(
        bucket,
        Bucket::AveragelySimilar | Bucket::VerySimilar | Bucket::Identic
    )
}

/// Builds the full report for a list of scored pairs. `relevance_threshold`
/// is the score at or above which a pair counts as retrieved (0.5 matches
/// the lower edge of the averagely-similar interval).
pub fn classification_report<F: Scalar>(
    scored: &[ScoredPair<F>],
    relevance_threshold: F,
) -> Result<EvalReport<F>, EvalError> {
    if scored.is_empty() {
        return Err(EvalError::EmptyList);
    }
    let mut per_pair = Vec::with_capacity(scored.len());
    let mut error_total = F::zero();
    let mut hits = 0usize;
    let mut retrieved = 0usize;
    let mut relevant_count = 0usize;
    let mut true_positives = 0usize;
    for pair in scored {
        let predicted = bucketize(pair.score)?;
        let error = pair_error(pair.score, pair.expert);
        error_total = error_total + error;
        if predicted == pair.expert {
            hits += 1;
        }
        let is_retrieved = pair.score >= relevance_threshold;
        let is_relevant = relevant(pair.expert);
        retrieved += usize::from(is_retrieved);
        relevant_count += usize::from(is_relevant);
        true_positives += usize::from(is_retrieved && is_relevant);
        per_pair.push(PairReport {
            service_a: pair.service_a.clone(),
            service_b: pair.service_b.clone(),
            score: pair.score,
            expert: pair.expert,
            predicted,
            error,
        });
    }
    let n = scored.len();
    Ok(EvalReport {
        per_pair,
        domain_error: error_total / F::from_usize(n).expect("pair count"),
        bucket_accuracy: F::from_ratio(hits, n),
        precision: (retrieved > 0).then(|| F::from_ratio(true_positives, retrieved)),
        recall: (relevant_count > 0).then(|| F::from_ratio(true_positives, relevant_count)),
        relevance_threshold,
    })
}
