//! Scoring: the LEA metric, slice reports, and four-class pronoun-resolution
//! accuracy with confidence intervals.
//!
//! All metric arithmetic is exact (rational numbers); decimal values are
//! rendered only at the reporting edge.

mod lea;
mod map;
mod slices;

pub use lea::{corpus_lea, lea};
pub use map::{
    classify_map_instance, map_accuracy, parse_map_instances, serialize_map_instances,
    wilson_interval, Label, MapAccuracyReport, MapInstance, MapParseError,
};
pub use slices::{cluster_kind, corpus_slices, score_slices, ClusterKind, SliceScore, SliceSpec, Slicer};

use num::{BigRational, ToPrimitive, Zero};

/// Errors raised by scoring operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScoreError {
    /// Gold and system documents disagree on the token sequence.
    #[error("gold and system versions of '{id}' differ in their token sequences")]
    TokenMismatch { id: String },
    /// A document required for scoring is absent from one corpus.
    #[error("document '{id}' is present in only one of the two corpora")]
    MissingDocument { id: String },
    /// Accuracy over zero instances is undefined.
    #[error("no instances to score")]
    EmptyInstanceSet,
}

/// Exact precision/recall/F1 report.
///
/// The four stored parts are the exact numerators and denominators of recall
/// and precision; reports from several documents micro-average by summing
/// parts. The degenerate conventions are: a side with an empty denominator
/// scores 1 when the other side is also empty (two empty clusterings are
/// identical) and 0 otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreReport {
    recall_num: BigRational,
    recall_den: BigRational,
    precision_num: BigRational,
    precision_den: BigRational,
}

impl ScoreReport {
    pub(crate) fn from_parts(
        recall_num: BigRational,
        recall_den: BigRational,
        precision_num: BigRational,
        precision_den: BigRational,
    ) -> Self {
        ScoreReport {
            recall_num,
            recall_den,
            precision_num,
            precision_den,
        }
    }

    /// The all-zero report, identity for [`ScoreReport::merge`].
    pub fn zero() -> Self {
        ScoreReport {
            recall_num: BigRational::zero(),
            recall_den: BigRational::zero(),
            precision_num: BigRational::zero(),
            precision_den: BigRational::zero(),
        }
    }

    /// Accumulate another report (micro-average over documents).
    pub fn merge(&mut self, other: &ScoreReport) {
        self.recall_num += &other.recall_num;
        self.recall_den += &other.recall_den;
        self.precision_num += &other.precision_num;
        self.precision_den += &other.precision_den;
    }

    fn ratio(num: &BigRational, den: &BigRational, other_den: &BigRational) -> BigRational {
        if den.is_zero() {
            if other_den.is_zero() {
                BigRational::from_integer(1.into())
            } else {
                BigRational::zero()
            }
        } else {
            num / den
        }
    }

    /// Exact recall.
    pub fn recall(&self) -> BigRational {
        Self::ratio(&self.recall_num, &self.recall_den, &self.precision_den)
    }

    /// Exact precision.
    pub fn precision(&self) -> BigRational {
        Self::ratio(&self.precision_num, &self.precision_den, &self.recall_den)
    }

    /// Exact F1: harmonic mean of precision and recall, 0 when both are 0.
    pub fn f1(&self) -> BigRational {
        let p = self.precision();
        let r = self.recall();
        let sum = &p + &r;
        if sum.is_zero() {
            BigRational::zero()
        } else {
            BigRational::from_integer(2.into()) * p * r / sum
        }
    }

    /// Exact numerator and denominator of recall.
    pub fn recall_parts(&self) -> (&BigRational, &BigRational) {
        (&self.recall_num, &self.recall_den)
    }

    /// Exact numerator and denominator of precision.
    pub fn precision_parts(&self) -> (&BigRational, &BigRational) {
        (&self.precision_num, &self.precision_den)
    }
}

/// Decimal rendering of an exact rational.
pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Shorthand for an exact rational from an integer pair, for tests.
#[cfg(test)]
pub(crate) fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f1_is_the_harmonic_mean() {
        let report = ScoreReport::from_parts(ratio(1, 1), ratio(2, 1), ratio(1, 1), ratio(1, 1));
        assert_eq!(report.recall(), ratio(1, 2));
        assert_eq!(report.precision(), ratio(1, 1));
        assert_eq!(report.f1(), ratio(2, 3));
    }

    #[test]
    fn empty_sides_follow_the_conventions() {
        // Both sides empty: identical clusterings.
        let both = ScoreReport::from_parts(ratio(0, 1), ratio(0, 1), ratio(0, 1), ratio(0, 1));
        assert_eq!(both.precision(), ratio(1, 1));
        assert_eq!(both.recall(), ratio(1, 1));
        assert_eq!(both.f1(), ratio(1, 1));
        // Only the system side empty: precision 0 by convention, recall 0.
        let sys_empty = ScoreReport::from_parts(ratio(0, 1), ratio(3, 1), ratio(0, 1), ratio(0, 1));
        assert_eq!(sys_empty.precision(), ratio(0, 1));
        assert_eq!(sys_empty.recall(), ratio(0, 1));
        assert_eq!(sys_empty.f1(), ratio(0, 1));
    }

    #[test]
    fn merge_sums_parts() {
        let mut total = ScoreReport::zero();
        total.merge(&ScoreReport::from_parts(ratio(1, 1), ratio(2, 1), ratio(1, 1), ratio(2, 1)));
        total.merge(&ScoreReport::from_parts(ratio(1, 1), ratio(1, 1), ratio(0, 1), ratio(1, 1)));
        assert_eq!(total.recall(), ratio(2, 3));
        assert_eq!(total.precision(), ratio(1, 3));
    }
}
