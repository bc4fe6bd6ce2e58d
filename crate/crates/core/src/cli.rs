//! Command-line driver.
//!
//! Three modes, chosen from the inputs:
//!
//! * two files: evaluate one pair and print the scores;
//! * two files with `--grid`: crop both into the same grid and write one
//!   row per cell plus a summary;
//! * two directories: pair PNGs by identical filename, one object per pair
//!   (or one grid per pair with `--grid`).
//!
//! In grid and directory modes, a result file without an output path goes
//! to standard output.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Parser;
use rayon::prelude::*;

use crate::label_io::{crop_grid, load_label_image, GridSpec, Rgb};
use crate::metrics::{evaluate_pair, MetricsReport};
use crate::report::{self, FullRow};

#[derive(Debug, Parser)]
#[command(
    name = "segeval",
    version,
    about = "Evaluate a label-map segmentation against ground truth"
)]
pub struct Args {
    /// Ground-truth label map (PNG) or directory of them.
    #[arg(long, value_name = "PATH")]
    pub truth: PathBuf,
    /// Segmentation under test (PNG) or directory of them.
    #[arg(long, value_name = "PATH")]
    pub test: PathBuf,
    /// Split each image into DOWNxACROSS cells, one object per cell.
    #[arg(long, value_name = "RxC")]
    pub grid: Option<GridSpec>,
    /// Background colour as RRGGBB hex.
    #[arg(long, value_name = "RRGGBB", default_value = "000000")]
    pub background: Rgb,
    /// Write per-object results here.
    #[arg(long, value_name = "PATH")]
    pub full: Option<PathBuf>,
    /// Write the aggregate summary here.
    #[arg(long, value_name = "PATH")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub truth: PathBuf,
    pub test: PathBuf,
    pub grid: Option<GridSpec>,
    pub background: Rgb,
    pub full: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

impl From<Args> for RunConfig {
    fn from(a: Args) -> Self {
        RunConfig {
            truth: a.truth,
            test: a.test,
            grid: a.grid,
            background: a.background,
            full: a.full,
            summary: a.summary,
        }
    }
}

impl RunConfig {
    pub fn single(truth: impl Into<PathBuf>, test: impl Into<PathBuf>) -> Self {
        RunConfig {
            truth: truth.into(),
            test: test.into(),
            grid: None,
            background: Rgb::BLACK,
            full: None,
            summary: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let inputs = [&self.truth, &self.test];
        for out in [&self.full, &self.summary].into_iter().flatten() {
            if inputs.iter().any(|i| same_path(i, out)) {
                bail!("output {} would overwrite an input", out.display());
            }
        }
        if let (Some(f), Some(s)) = (&self.full, &self.summary) {
            if same_path(f, s) {
                bail!("--full and --summary both point at {}", f.display());
            }
        }
        Ok(())
    }
}

fn same_path(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

/// Parses arguments, runs, and maps errors to a diagnostic and exit code 1.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&args.into(), stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}

pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    config.validate()?;
    let truth_dir = config.truth.is_dir();
    let test_dir = config.test.is_dir();
    match (truth_dir, test_dir) {
        (false, false) => match config.grid {
            None => run_single(config, stdout),
            Some(grid) => {
                let rows = evaluate_grid(config, &config.truth, &config.test, grid, None)?;
                emit(config, &rows, stdout)
            }
        },
        (true, true) => run_directories(config, stdout),
        _ => bail!(
            "--truth {} and --test {} must both be files or both be directories",
            config.truth.display(),
            config.test.display()
        ),
    }
}

fn evaluate_files(config: &RunConfig, truth: &Path, test: &Path) -> Result<MetricsReport> {
    let (t, s) = load_pair(config, truth, test)?;
    evaluate_pair(&t, &s)
        .with_context(|| format!("comparing {} with {}", truth.display(), test.display()))
}

fn load_pair(
    config: &RunConfig,
    truth: &Path,
    test: &Path,
) -> Result<(crate::LabelImage, crate::LabelImage)> {
    let (t, s) = rayon::join(
        || load_label_image(truth, config.background),
        || load_label_image(test, config.background),
    );
    Ok((t?, s?))
}

fn run_single(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let metrics = evaluate_files(config, &config.truth, &config.test)?;
    writeln!(stdout, "{metrics}")?;
    let rows = report::make_full_rows(&[metrics]);
    if let Some(path) = &config.full {
        report::write_full_csv(&rows, path)?;
    }
    if let Some(path) = &config.summary {
        report::write_summary_csv(&report::summarize(&rows)?, path)?;
    }
    Ok(())
}

fn evaluate_grid(
    config: &RunConfig,
    truth: &Path,
    test: &Path,
    grid: GridSpec,
    prefix: Option<&str>,
) -> Result<Vec<FullRow>> {
    let (t, s) = load_pair(config, truth, test)?;
    if t.dimensions() != s.dimensions() {
        bail!(
            "image dimensions differ: truth {} is {}x{}, test {} is {}x{}",
            truth.display(),
            t.width(),
            t.height(),
            test.display(),
            s.width(),
            s.height()
        );
    }
    let truth_cells =
        crop_grid(&t, grid).with_context(|| format!("cropping {}", truth.display()))?;
    let test_cells = crop_grid(&s, grid).with_context(|| format!("cropping {}", test.display()))?;
    let reports = truth_cells
        .par_iter()
        .zip(test_cells.par_iter())
        .map(|(a, b)| evaluate_pair(a, b))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(reports
        .into_iter()
        .enumerate()
        .map(|(i, m)| match prefix {
            Some(p) => FullRow::new(format!("{p}:{i}"), m),
            None => FullRow::new(i.to_string(), m),
        })
        .collect())
}

fn png_names(dir: &Path) -> Result<BTreeSet<String>> {
    let mut names = BTreeSet::new();
    for entry in
        std::fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))?
    {
        let entry = entry?;
        let path = entry.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png && path.is_file() {
            names.insert(entry.file_name().to_string_lossy().into_owned());
        }
    }
    Ok(names)
}

fn run_directories(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let truth_names = png_names(&config.truth)?;
    let test_names = png_names(&config.test)?;
    if let Some(name) = truth_names.symmetric_difference(&test_names).next() {
        let (dir, other) = if truth_names.contains(name) {
            (&config.truth, &config.test)
        } else {
            (&config.test, &config.truth)
        };
        bail!(
            "{} has no counterpart in {}",
            dir.join(name).display(),
            other.display()
        );
    }
    if truth_names.is_empty() {
        bail!("no PNG files in {}", config.truth.display());
    }

    let names: Vec<&String> = truth_names.iter().collect();
    let per_file = names
        .par_iter()
        .map(|name| -> Result<Vec<FullRow>> {
            let truth = config.truth.join(name);
            let test = config.test.join(name);
            match config.grid {
                Some(grid) => evaluate_grid(config, &truth, &test, grid, Some(name)),
                None => Ok(vec![FullRow::new(
                    name.as_str(),
                    evaluate_files(config, &truth, &test)?,
                )]),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<FullRow> = per_file.into_iter().flatten().collect();
    emit(config, &rows, stdout)
}

fn emit(config: &RunConfig, rows: &[FullRow], stdout: &mut dyn Write) -> Result<()> {
    let summary = report::summarize(rows)?;
    match &config.full {
        Some(path) => report::write_full_csv(rows, path)?,
        None => report::write_full(rows, &mut *stdout)?,
    }
    match &config.summary {
        Some(path) => report::write_summary_csv(&summary, path)?,
        None => {
            if config.full.is_none() {
                writeln!(stdout)?;
            }
            report::write_summary(&summary, &mut *stdout)?;
        }
    }
    Ok(())
}
