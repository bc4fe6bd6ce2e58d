//! Pixel confusion matrix between a truth label map (rows) and a test label
//! map (columns). Index 0 in both directions is the background label.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::assignment::WeightMatrix;
use crate::label_io::LabelImage;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfusionError {
    #[error("image dimensions differ: truth is {truth_width}x{truth_height}, test is {test_width}x{test_height}")]
    DimensionMismatch {
        truth_width: u32,
        truth_height: u32,
        test_width: u32,
        test_height: u32,
    },
    #[error("background labels differ: truth uses {truth:#08x}, test uses {test:#08x}")]
    BackgroundMismatch { truth: u32, test: u32 },
}

/// Anything that can be scanned pixel by pixel in row-major order.
///
/// Confusion construction calls [`LabelSource::scan`] exactly twice per
/// image: once to collect the distinct labels, once for the paired count.
pub trait LabelSource {
    fn dimensions(&self) -> (u32, u32);
    fn background(&self) -> u32;
    fn scan(&self) -> impl Iterator<Item = u32> + '_;
}

impl LabelSource for LabelImage {
    fn dimensions(&self) -> (u32, u32) {
        LabelImage::dimensions(self)
    }

    fn background(&self) -> u32 {
        LabelImage::background(self)
    }

    fn scan(&self) -> impl Iterator<Item = u32> + '_ {
        self.labels().iter().copied()
    }
}

/// Distinct labels of one image: background first, the rest ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionIndex {
    labels: Vec<u32>,
}

impl RegionIndex {
    /// Builds an index from any label iterator. The background is always
    /// present at position 0, even when no pixel carries it.
    pub fn from_labels(background: u32, labels: impl IntoIterator<Item = u32>) -> Self {
        let mut seen: HashSet<u32> = HashSet::new();
        let mut last = background;
        for label in labels {
            // runs of equal labels are the common case in label maps
            if label != last {
                seen.insert(label);
                last = label;
            }
        }
        seen.remove(&background);
        let mut rest: Vec<u32> = seen.into_iter().collect();
        rest.sort_unstable();
        let mut labels = Vec::with_capacity(rest.len() + 1);
        labels.push(background);
        labels.extend(rest);
        RegionIndex { labels }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn background(&self) -> u32 {
        self.labels[0]
    }

    /// Number of entries including background.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false; the background entry is mandatory.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn region_count(&self) -> usize {
        self.labels.len() - 1
    }

    fn positions(&self) -> HashMap<u32, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i))
            .collect()
    }
}

pub fn build_region_index<S: LabelSource + ?Sized>(image: &S) -> RegionIndex {
    RegionIndex::from_labels(image.background(), image.scan())
}

/// `counts[r][c]` is the number of pixels labelled `truth_index[r]` in the
/// truth image and `test_index[c]` in the test image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    truth_index: RegionIndex,
    test_index: RegionIndex,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    /// Assembles a matrix from explicit parts. `counts` is row-major,
    /// `truth_index.len()` rows by `test_index.len()` columns.
    pub fn from_parts(truth_index: RegionIndex, test_index: RegionIndex, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), truth_index.len() * test_index.len());
        ConfusionMatrix {
            truth_index,
            test_index,
            counts,
        }
    }

    pub fn truth_index(&self) -> &RegionIndex {
        &self.truth_index
    }

    pub fn test_index(&self) -> &RegionIndex {
        &self.test_index
    }

    /// m: truth labels including background.
    pub fn rows(&self) -> usize {
        self.truth_index.len()
    }

    /// n: test labels including background.
    pub fn cols(&self) -> usize {
        self.test_index.len()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols() + col]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn row(&self, row: usize) -> &[u64] {
        let n = self.cols();
        &self.counts[row * n..(row + 1) * n]
    }

    pub fn row_sum(&self, row: usize) -> u64 {
        self.row(row).iter().sum()
    }

    pub fn col_sum(&self, col: usize) -> u64 {
        (0..self.rows()).map(|r| self.get(r, col)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// The same comparison with truth and test swapped.
    pub fn transpose(&self) -> ConfusionMatrix {
        let (m, n) = (self.rows(), self.cols());
        let mut counts = vec![0; m * n];
        for r in 0..m {
            for c in 0..n {
                counts[c * m + r] = self.get(r, c);
            }
        }
        ConfusionMatrix {
            truth_index: self.test_index.clone(),
            test_index: self.truth_index.clone(),
            counts,
        }
    }

    /// Counts with row 0 and column 0 removed: overlaps between
    /// non-background truth regions and non-background test regions.
    pub fn region_submatrix(&self) -> WeightMatrix {
        let (m, n) = (self.rows(), self.cols());
        let mut data = Vec::with_capacity((m - 1) * (n - 1));
        for r in 1..m {
            data.extend_from_slice(&self.row(r)[1..]);
        }
        WeightMatrix::new(m - 1, n - 1, data)
    }
}

/// Builds C in two scans per image: one for each region index, then one
/// joint scan over both images to fill the counts.
pub fn build_confusion<S: LabelSource + ?Sized>(
    truth: &S,
    test: &S,
) -> Result<ConfusionMatrix, ConfusionError> {
    let (tw, th) = truth.dimensions();
    let (sw, sh) = test.dimensions();
    if (tw, th) != (sw, sh) {
        return Err(ConfusionError::DimensionMismatch {
            truth_width: tw,
            truth_height: th,
            test_width: sw,
            test_height: sh,
        });
    }
    if truth.background() != test.background() {
        return Err(ConfusionError::BackgroundMismatch {
            truth: truth.background(),
            test: test.background(),
        });
    }

    let truth_index = build_region_index(truth);
    let test_index = build_region_index(test);
    let (m, n) = (truth_index.len(), test_index.len());
    let truth_pos = truth_index.positions();
    let test_pos = test_index.positions();

    let mut counts = vec![0u64; m * n];
    // cache the previous lookup; neighbouring pixels usually share labels
    let (mut last_t, mut last_r) = (truth_index.background(), 0usize);
    let (mut last_s, mut last_c) = (test_index.background(), 0usize);
    for (t, s) in truth.scan().zip(test.scan()) {
        if t != last_t {
            last_t = t;
            last_r = truth_pos[&t];
        }
        if s != last_s {
            last_s = s;
            last_c = test_pos[&s];
        }
        counts[last_r * n + last_c] += 1;
    }

    Ok(ConfusionMatrix {
        truth_index,
        test_index,
        counts,
    })
}
