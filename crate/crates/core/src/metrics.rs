//! Scores computed from a [`ConfusionMatrix`].
//!
//! With C indexed truth-by-test and background at index 0 on both axes:
//!
//! * `|S ∩ T|` is the sum of `C[r][c]` over `r >= 1, c >= 1`;
//! * `|S ∪ T|` is the total minus `C[0][0]`;
//! * `|S|` sums columns `c >= 1`, `|T|` sums rows `r >= 1`;
//! * `I` is the best one-to-one assignment total over the region block.
//!
//! Object and subset-matched scores are kept as integer ratios and only
//! converted to `f64` at the end, so a score is a single correctly-rounded
//! division. When both images are entirely background every score is 1.

use std::fmt;

use crate::assignment::max_assignment_total;
use crate::confusion::{build_confusion, ConfusionError, ConfusionMatrix, LabelSource};

/// An exact non-negative ratio of pixel counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub numerator: u64,
    pub denominator: u64,
}

impl Ratio {
    pub const ONE: Ratio = Ratio {
        numerator: 1,
        denominator: 1,
    };

    /// `numerator / denominator`, or 1 when the denominator is zero (the
    /// empty-versus-empty case).
    fn or_one(numerator: u64, denominator: u64) -> Ratio {
        if denominator == 0 {
            Ratio::ONE
        } else {
            Ratio {
                numerator,
                denominator,
            }
        }
    }

    pub fn value(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Exact comparison against `num / den`.
    pub fn equals(self, num: u64, den: u64) -> bool {
        u128::from(self.numerator) * u128::from(den)
            == u128::from(num) * u128::from(self.denominator)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Pixel-set sizes read off the matrix margins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetSizes {
    /// |S|: non-background pixels of the test image.
    pub test: u64,
    /// |T|: non-background pixels of the truth image.
    pub truth: u64,
    pub intersection: u64,
    pub union: u64,
}

impl SetSizes {
    pub fn from_confusion(c: &ConfusionMatrix) -> SetSizes {
        let total = c.total();
        let truth_background = c.row_sum(0);
        let test_background = c.col_sum(0);
        let intersection = (1..c.rows())
            .map(|r| c.row(r)[1..].iter().sum::<u64>())
            .sum();
        SetSizes {
            test: total - test_background,
            truth: total - truth_background,
            intersection,
            union: total - c.get(0, 0),
        }
    }
}

/// (truth regions, test regions, truth minus test).
///
/// A negative difference means the test image is over-segmented.
pub fn region_counts(c: &ConfusionMatrix) -> (usize, usize, i64) {
    let truth = c.truth_index().region_count();
    let test = c.test_index().region_count();
    (truth, test, truth as i64 - test as i64)
}

/// `I`: the maximum overlap of a one-to-one region matching.
pub fn matched_intersection(c: &ConfusionMatrix) -> u64 {
    max_assignment_total(&c.region_submatrix()).total
}

pub fn object_jaccard(c: &ConfusionMatrix) -> Ratio {
    let s = SetSizes::from_confusion(c);
    Ratio::or_one(s.intersection, s.union)
}

pub fn subset_matched_jaccard(c: &ConfusionMatrix) -> Ratio {
    let s = SetSizes::from_confusion(c);
    Ratio::or_one(matched_intersection(c), s.union)
}

pub fn object_dice(c: &ConfusionMatrix) -> Ratio {
    let s = SetSizes::from_confusion(c);
    Ratio::or_one(2 * s.intersection, s.test + s.truth)
}

pub fn subset_matched_dice(c: &ConfusionMatrix) -> Ratio {
    let s = SetSizes::from_confusion(c);
    Ratio::or_one(2 * matched_intersection(c), s.test + s.truth)
}

/// Mean over truth regions of the best Dice against any test region,
/// with regions of both images restricted to non-background labels.
fn best_dice_rows(c: &ConfusionMatrix, row_sizes: &[u64], col_sizes: &[u64]) -> f64 {
    let mut sum = 0.0;
    for (r, &row_size) in row_sizes.iter().enumerate().skip(1) {
        let best = c.row(r)[1..]
            .iter()
            .zip(&col_sizes[1..])
            .filter(|&(&overlap, _)| overlap > 0)
            .map(|(&overlap, &col_size)| (2 * overlap) as f64 / (row_size + col_size) as f64)
            .fold(0.0f64, f64::max);
        sum += best;
    }
    sum / (c.rows() - 1) as f64
}

/// LSC-style symmetric best Dice: the worse of the two directional
/// best-Dice means. 1 when neither image has regions, 0 when only one does.
pub fn symmetric_best_dice(c: &ConfusionMatrix) -> f64 {
    let (truth_regions, test_regions, _) = region_counts(c);
    match (truth_regions, test_regions) {
        (0, 0) => return 1.0,
        (0, _) | (_, 0) => return 0.0,
        _ => {}
    }
    let row_sizes: Vec<u64> = (0..c.rows()).map(|r| c.row_sum(r)).collect();
    let col_sizes: Vec<u64> = (0..c.cols()).map(|col| c.col_sum(col)).collect();
    let truth_to_test = best_dice_rows(c, &row_sizes, &col_sizes);
    let test_to_truth = best_dice_rows(&c.transpose(), &col_sizes, &row_sizes);
    truth_to_test.min(test_to_truth)
}

/// Every per-pair score for one object comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub test_region_count: usize,
    pub truth_region_count: usize,
    /// truth regions minus test regions; negative means over-segmented.
    pub count_difference: i64,
    pub object_jaccard: f64,
    pub subset_jaccard: f64,
    pub object_dice: f64,
    pub subset_dice: f64,
    pub symmetric_best_dice: f64,
}

/// The exact ratios behind a [`MetricsReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactScores {
    pub object_jaccard: Ratio,
    pub subset_jaccard: Ratio,
    pub object_dice: Ratio,
    pub subset_dice: Ratio,
}

impl ExactScores {
    pub fn from_confusion(c: &ConfusionMatrix) -> ExactScores {
        let s = SetSizes::from_confusion(c);
        let matched = matched_intersection(c);
        ExactScores {
            object_jaccard: Ratio::or_one(s.intersection, s.union),
            subset_jaccard: Ratio::or_one(matched, s.union),
            object_dice: Ratio::or_one(2 * s.intersection, s.test + s.truth),
            subset_dice: Ratio::or_one(2 * matched, s.test + s.truth),
        }
    }
}

impl MetricsReport {
    pub fn from_confusion(c: &ConfusionMatrix) -> MetricsReport {
        let (truth_region_count, test_region_count, count_difference) = region_counts(c);
        let exact = ExactScores::from_confusion(c);
        MetricsReport {
            test_region_count,
            truth_region_count,
            count_difference,
            object_jaccard: exact.object_jaccard.value(),
            subset_jaccard: exact.subset_jaccard.value(),
            object_dice: exact.object_dice.value(),
            subset_dice: exact.subset_dice.value(),
            symmetric_best_dice: symmetric_best_dice(c),
        }
    }

    /// The five similarity scores in report column order.
    pub fn scores(&self) -> [f64; 5] {
        [
            self.object_jaccard,
            self.subset_jaccard,
            self.object_dice,
            self.subset_dice,
            self.symmetric_best_dice,
        ]
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "test_region_count    {}", self.test_region_count)?;
        writeln!(f, "truth_region_count   {}", self.truth_region_count)?;
        writeln!(f, "count_difference     {}", self.count_difference)?;
        writeln!(f, "object_jaccard       {:.6}", self.object_jaccard)?;
        writeln!(f, "subset_jaccard       {:.6}", self.subset_jaccard)?;
        writeln!(f, "object_dice          {:.6}", self.object_dice)?;
        writeln!(f, "subset_dice          {:.6}", self.subset_dice)?;
        write!(f, "symmetric_best_dice  {:.6}", self.symmetric_best_dice)
    }
}

/// Builds the confusion matrix once and derives every score from it.
pub fn evaluate_pair<S: LabelSource + ?Sized>(
    truth: &S,
    test: &S,
) -> Result<MetricsReport, ConfusionError> {
    Ok(MetricsReport::from_confusion(&build_confusion(
        truth, test,
    )?))
}
