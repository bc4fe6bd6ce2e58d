//! Region-level evaluation of label-map segmentations.
//!
//! A test segmentation and a ground-truth annotation are reduced to a pixel
//! confusion matrix, from which every score is read:
//!
//! * region counts and their signed difference;
//! * object-level Jaccard and Dice over the non-background masks;
//! * subset-matched Jaccard and Dice, where each region in either image may
//!   be paired with at most one region in the other and the pairing that
//!   maximises total overlap is used;
//! * the LSC symmetric best Dice, for comparison.
//!
//! Multi-object images can be split into a regular grid and reported as
//! full and summary CSV files.

pub mod assignment;
pub mod cli;
pub mod confusion;
pub mod label_io;
pub mod metrics;
pub mod report;

pub use assignment::{
    brute_force_assignment_total, max_assignment_total, AssignmentResult, WeightMatrix,
};
pub use confusion::{
    build_confusion, build_region_index, ConfusionMatrix, LabelSource, RegionIndex,
};
pub use label_io::{crop_grid, load_label_image, save_label_image, GridSpec, LabelImage, Rgb};
pub use metrics::{evaluate_pair, MetricsReport, Ratio};
pub use report::{make_full_rows, summarize, FullRow, SummaryReport};
