//! Full and summary CSV result files for grids of objects.
//!
//! Over- and under-segmentation amounts are only populated for the objects
//! they apply to, and their means are taken over populated cells alone, so
//! an object over-segmented by one and another under-segmented by one do
//! not cancel out.

use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::metrics::MetricsReport;

pub const FULL_HEADER: [&str; 12] = [
    "cell_id",
    "test_region_count",
    "truth_region_count",
    "count_difference",
    "object_jaccard",
    "subset_jaccard",
    "object_dice",
    "subset_dice",
    "symmetric_best_dice",
    "counts_agree",
    "over_segmentation",
    "under_segmentation",
];

pub const SUMMARY_HEADER: [&str; 11] = [
    "object_count",
    "agree_count",
    "over_count",
    "under_count",
    "mean_over",
    "mean_under",
    "mean_object_jaccard",
    "mean_subset_jaccard",
    "mean_object_dice",
    "mean_subset_dice",
    "mean_symmetric_best_dice",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot summarise an empty set of results")]
    Empty,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed row {row}: {message}")]
    Malformed { row: usize, message: String },
}

/// One object's line in the full results file.
#[derive(Debug, Clone, PartialEq)]
pub struct FullRow {
    pub cell_id: String,
    pub metrics: MetricsReport,
    pub counts_agree: bool,
    /// Test regions minus truth regions, when positive.
    pub over_segmentation: Option<u64>,
    /// Truth regions minus test regions, when positive.
    pub under_segmentation: Option<u64>,
}

impl FullRow {
    pub fn new(cell_id: impl Into<String>, metrics: MetricsReport) -> FullRow {
        let diff = metrics.count_difference;
        FullRow {
            cell_id: cell_id.into(),
            metrics,
            counts_agree: diff == 0,
            over_segmentation: (diff < 0).then(|| diff.unsigned_abs()),
            under_segmentation: (diff > 0).then_some(diff as u64),
        }
    }

    fn to_record(&self) -> Vec<String> {
        let m = &self.metrics;
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut record = vec![
            self.cell_id.clone(),
            m.test_region_count.to_string(),
            m.truth_region_count.to_string(),
            m.count_difference.to_string(),
        ];
        record.extend(m.scores().iter().map(|s| format_ratio(*s)));
        record.push(if self.counts_agree {
            "1".into()
        } else {
            String::new()
        });
        record.push(opt(self.over_segmentation));
        record.push(opt(self.under_segmentation));
        record
    }
}

/// Rows numbered by position, for a single image or a row-major grid.
pub fn make_full_rows(reports: &[MetricsReport]) -> Vec<FullRow> {
    reports
        .iter()
        .enumerate()
        .map(|(i, r)| FullRow::new(i.to_string(), *r))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryReport {
    pub object_count: usize,
    pub agree_count: usize,
    pub over_count: usize,
    pub under_count: usize,
    /// Mean over-segmentation among over-segmented objects only.
    pub mean_over: Option<f64>,
    /// Mean under-segmentation among under-segmented objects only.
    pub mean_under: Option<f64>,
    pub mean_object_jaccard: f64,
    pub mean_subset_jaccard: f64,
    pub mean_object_dice: f64,
    pub mean_subset_dice: f64,
    pub mean_symmetric_best_dice: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Score means include every row, all-background cells among them.
pub fn summarize(rows: &[FullRow]) -> Result<SummaryReport, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::Empty);
    }
    let score_mean = |i: usize| mean(rows.iter().map(|r| r.metrics.scores()[i])).unwrap();
    Ok(SummaryReport {
        object_count: rows.len(),
        agree_count: rows.iter().filter(|r| r.counts_agree).count(),
        over_count: rows
            .iter()
            .filter(|r| r.over_segmentation.is_some())
            .count(),
        under_count: rows
            .iter()
            .filter(|r| r.under_segmentation.is_some())
            .count(),
        mean_over: mean(
            rows.iter()
                .filter_map(|r| r.over_segmentation)
                .map(|v| v as f64),
        ),
        mean_under: mean(
            rows.iter()
                .filter_map(|r| r.under_segmentation)
                .map(|v| v as f64),
        ),
        mean_object_jaccard: score_mean(0),
        mean_subset_jaccard: score_mean(1),
        mean_object_dice: score_mean(2),
        mean_subset_dice: score_mean(3),
        mean_symmetric_best_dice: score_mean(4),
    })
}

impl SummaryReport {
    fn to_record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(format_ratio).unwrap_or_default();
        vec![
            self.object_count.to_string(),
            self.agree_count.to_string(),
            self.over_count.to_string(),
            self.under_count.to_string(),
            opt(self.mean_over),
            opt(self.mean_under),
            format_ratio(self.mean_object_jaccard),
            format_ratio(self.mean_subset_jaccard),
            format_ratio(self.mean_object_dice),
            format_ratio(self.mean_subset_dice),
            format_ratio(self.mean_symmetric_best_dice),
        ]
    }
}

pub fn format_ratio(v: f64) -> String {
    format!("{v:.6}")
}

pub fn write_full<W: Write>(rows: &[FullRow], out: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FULL_HEADER)?;
    for row in rows {
        w.write_record(row.to_record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_summary<W: Write>(summary: &SummaryReport, out: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    w.write_record(summary.to_record())?;
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn create(path: &Path) -> Result<std::fs::File, ReportError> {
    std::fs::File::create(path).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_full_csv(rows: &[FullRow], path: &Path) -> Result<(), ReportError> {
    write_full(rows, create(path)?)
}

pub fn write_summary_csv(summary: &SummaryReport, path: &Path) -> Result<(), ReportError> {
    write_summary(summary, create(path)?)
}

/// Parses a full results file back into rows. Scores come back at the
/// six-decimal precision they were written with.
pub fn read_full<R: Read>(input: R) -> Result<Vec<FullRow>, ReportError> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(FULL_HEADER) {
        return Err(ReportError::Malformed {
            row: 0,
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let bad = |field: &str| ReportError::Malformed {
            row,
            message: format!("bad {field} value"),
        };
        let field = |k: usize| record.get(k).unwrap_or("");
        let num = |k: usize| -> Result<f64, ReportError> {
            field(k).parse().map_err(|_| bad(FULL_HEADER[k]))
        };
        let opt = |k: usize| -> Result<Option<u64>, ReportError> {
            match field(k) {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(FULL_HEADER[k])),
            }
        };
        let metrics = MetricsReport {
            test_region_count: field(1).parse().map_err(|_| bad(FULL_HEADER[1]))?,
            truth_region_count: field(2).parse().map_err(|_| bad(FULL_HEADER[2]))?,
            count_difference: field(3).parse().map_err(|_| bad(FULL_HEADER[3]))?,
            object_jaccard: num(4)?,
            subset_jaccard: num(5)?,
            object_dice: num(6)?,
            subset_dice: num(7)?,
            symmetric_best_dice: num(8)?,
        };
        let counts_agree = match field(9) {
            "1" => true,
            "" => false,
            _ => return Err(bad(FULL_HEADER[9])),
        };
        rows.push(FullRow {
            cell_id: field(0).to_string(),
            metrics,
            counts_agree,
            over_segmentation: opt(10)?,
            under_segmentation: opt(11)?,
        });
    }
    Ok(rows)
}

pub fn read_full_csv(path: &Path) -> Result<Vec<FullRow>, ReportError> {
    let file = std::fs::File::open(path).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_full(file)
}
