//! Label-map decoding and grid cropping.
//!
//! Every pixel colour is packed into a single `u32` label. RGB colours pack
//! as `R << 16 | G << 8 | B` with alpha ignored; grayscale values are used
//! as-is and paletted images are resolved to their RGB entries first.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use image::{DynamicImage, RgbImage};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabelIoError {
    #[error("failed to read {path}: {source}")]
    Decode {
        path: String,
        #[source]
        source: image::ImageError,
    },
    #[error("{path}: unsupported pixel format {format} (only 8-bit grayscale, RGB, RGBA and paletted PNGs are accepted)")]
    UnsupportedBitDepth { path: String, format: String },
    #[error("image has zero size ({width}x{height})")]
    EmptyImage { width: u32, height: u32 },
    #[error("label grid has {actual} entries, expected {width}x{height}")]
    LengthMismatch {
        width: u32,
        height: u32,
        actual: usize,
    },
    #[error("background colour {0} is not a gray level and cannot match a grayscale image")]
    BackgroundNotGray(Rgb),
    #[error("invalid grid {0:?}: expected DOWNxACROSS with both counts >= 1")]
    BadGridSyntax(String),
    #[error("grid {grid} does not fit a {width}x{height} image")]
    GridTooLarge {
        grid: GridSpec,
        width: u32,
        height: u32,
    },
    #[error("label {label:#x} exceeds 24-bit RGB range")]
    LabelOutOfRange { label: u32 },
    #[error("failed to write {path}: {source}")]
    Encode {
        path: String,
        #[source]
        source: image::ImageError,
    },
}

/// An 8-bit RGB colour, used to name the background of a label map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const BLACK: Rgb = Rgb([0, 0, 0]);

    pub fn packed(self) -> u32 {
        pack_rgb(self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02x}{:02x}{:02x}", self.0[0], self.0[1], self.0[2])
    }
}

impl FromStr for Rgb {
    type Err = String;

    /// Parses `RRGGBB` hex, with an optional leading `#`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let hex = s.strip_prefix('#').unwrap_or(s);
        if hex.len() != 6 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(format!("expected RRGGBB hex colour, got {s:?}"));
        }
        let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).unwrap();
        Ok(Rgb([channel(0), channel(2), channel(4)]))
    }
}

#[inline]
pub fn pack_rgb(r: u8, g: u8, b: u8) -> u32 {
    (u32::from(r) << 16) | (u32::from(g) << 8) | u32::from(b)
}

#[inline]
pub fn unpack_rgb(label: u32) -> [u8; 3] {
    [(label >> 16) as u8, (label >> 8) as u8, label as u8]
}

/// A decoded label map: one integer region label per pixel, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelImage {
    width: u32,
    height: u32,
    labels: Vec<u32>,
    background: u32,
}

impl LabelImage {
    pub fn new(
        width: u32,
        height: u32,
        labels: Vec<u32>,
        background: u32,
    ) -> Result<Self, LabelIoError> {
        if width == 0 || height == 0 {
            return Err(LabelIoError::EmptyImage { width, height });
        }
        if labels.len() != width as usize * height as usize {
            return Err(LabelIoError::LengthMismatch {
                width,
                height,
                actual: labels.len(),
            });
        }
        Ok(LabelImage {
            width,
            height,
            labels,
            background,
        })
    }

    /// A `width`x`height` image filled with a single label.
    pub fn filled(
        width: u32,
        height: u32,
        label: u32,
        background: u32,
    ) -> Result<Self, LabelIoError> {
        Self::new(
            width,
            height,
            vec![label; width as usize * height as usize],
            background,
        )
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixel_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn background(&self) -> u32 {
        self.background
    }

    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    pub fn is_all_background(&self) -> bool {
        self.labels.iter().all(|&l| l == self.background)
    }

    /// Copies the rectangle `[x0, x1) x [y0, y1)` into a new image.
    fn sub_image(&self, x0: u32, x1: u32, y0: u32, y1: u32) -> LabelImage {
        let w = self.width as usize;
        let mut labels = Vec::with_capacity((x1 - x0) as usize * (y1 - y0) as usize);
        for y in y0 as usize..y1 as usize {
            labels.extend_from_slice(&self.labels[y * w + x0 as usize..y * w + x1 as usize]);
        }
        LabelImage {
            width: x1 - x0,
            height: y1 - y0,
            labels,
            background: self.background,
        }
    }

    /// Encodes labels back to RGB colours. Fails if a label needs more than 24 bits.
    pub fn to_rgb_image(&self) -> Result<RgbImage, LabelIoError> {
        let mut raw = Vec::with_capacity(self.labels.len() * 3);
        for &label in &self.labels {
            if label > 0x00ff_ffff {
                return Err(LabelIoError::LabelOutOfRange { label });
            }
            raw.extend_from_slice(&unpack_rgb(label));
        }
        Ok(RgbImage::from_raw(self.width, self.height, raw).expect("buffer sized from dimensions"))
    }
}

/// Number of cells across and down a multi-object image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub cells_across: u32,
    pub cells_down: u32,
}

impl GridSpec {
    pub fn new(cells_across: u32, cells_down: u32) -> Self {
        GridSpec {
            cells_across,
            cells_down,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cells_across as usize * self.cells_down as usize
    }

    pub fn fits(&self, width: u32, height: u32) -> bool {
        self.cells_across >= 1
            && self.cells_down >= 1
            && self.cells_across <= width
            && self.cells_down <= height
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.cells_down, self.cells_across)
    }
}

impl FromStr for GridSpec {
    type Err = LabelIoError;

    /// Parses `DOWNxACROSS`, e.g. `5x4` is five rows of four cells.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LabelIoError::BadGridSyntax(s.to_string());
        let (down, across) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let down: u32 = down.trim().parse().map_err(|_| bad())?;
        let across: u32 = across.trim().parse().map_err(|_| bad())?;
        if down == 0 || across == 0 {
            return Err(bad());
        }
        Ok(GridSpec::new(across, down))
    }
}

/// Decodes a PNG label map.
///
/// `background` names the background colour; for grayscale images it must
/// be a gray level `(v, v, v)` and the background label is then `v`.
pub fn load_label_image(path: &Path, background: Rgb) -> Result<LabelImage, LabelIoError> {
    let display = path.display().to_string();
    let decoded = image::ImageReader::open(path)
        .map_err(|e| LabelIoError::Decode {
            path: display.clone(),
            source: image::ImageError::IoError(e),
        })?
        .with_guessed_format()
        .map_err(|e| LabelIoError::Decode {
            path: display.clone(),
            source: image::ImageError::IoError(e),
        })?
        .decode()
        .map_err(|source| LabelIoError::Decode {
            path: display.clone(),
            source,
        })?;
    labels_from_dynamic(decoded, background).map_err(|e| match e {
        LabelIoError::UnsupportedBitDepth { format, .. } => LabelIoError::UnsupportedBitDepth {
            path: display,
            format,
        },
        other => other,
    })
}

/// Packs an already-decoded image into labels.
pub fn labels_from_dynamic(
    image: DynamicImage,
    background: Rgb,
) -> Result<LabelImage, LabelIoError> {
    let (width, height) = (image.width(), image.height());
    if width == 0 || height == 0 {
        return Err(LabelIoError::EmptyImage { width, height });
    }
    let gray_background = || {
        let [r, g, b] = background.0;
        if r == g && g == b {
            Ok(u32::from(r))
        } else {
            Err(LabelIoError::BackgroundNotGray(background))
        }
    };
    let (labels, bg) = match image {
        DynamicImage::ImageLuma8(buf) => (
            buf.into_raw().into_iter().map(u32::from).collect(),
            gray_background()?,
        ),
        DynamicImage::ImageLumaA8(buf) => (
            buf.into_raw()
                .chunks_exact(2)
                .map(|p| u32::from(p[0]))
                .collect(),
            gray_background()?,
        ),
        DynamicImage::ImageRgb8(buf) => (
            buf.into_raw()
                .chunks_exact(3)
                .map(|p| pack_rgb(p[0], p[1], p[2]))
                .collect(),
            background.packed(),
        ),
        DynamicImage::ImageRgba8(buf) => (
            buf.into_raw()
                .chunks_exact(4)
                .map(|p| pack_rgb(p[0], p[1], p[2]))
                .collect(),
            background.packed(),
        ),
        other => {
            return Err(LabelIoError::UnsupportedBitDepth {
                path: String::new(),
                format: format!("{:?}", other.color()),
            })
        }
    };
    LabelImage::new(width, height, labels, bg)
}

/// Writes labels as an RGB PNG using the inverse of the packing rule.
pub fn save_label_image(image: &LabelImage, path: &Path) -> Result<(), LabelIoError> {
    image
        .to_rgb_image()?
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| LabelIoError::Encode {
            path: path.display().to_string(),
            source,
        })
}

/// Splits an image into `cells_down` rows of `cells_across` cells, row-major.
///
/// Cell boundaries are `floor(i * extent / count)`, so the cells tile the
/// image with no gaps or overlap.
pub fn crop_grid(image: &LabelImage, grid: GridSpec) -> Result<Vec<LabelImage>, LabelIoError> {
    if !grid.fits(image.width, image.height) {
        return Err(LabelIoError::GridTooLarge {
            grid,
            width: image.width,
            height: image.height,
        });
    }
    let bound = |i: u32, extent: u32, count: u32| -> u32 {
        (u64::from(i) * u64::from(extent) / u64::from(count)) as u32
    };
    let mut cells = Vec::with_capacity(grid.cell_count());
    for r in 0..grid.cells_down {
        let y0 = bound(r, image.height, grid.cells_down);
        let y1 = bound(r + 1, image.height, grid.cells_down);
        for c in 0..grid.cells_across {
            let x0 = bound(c, image.width, grid.cells_across);
            let x1 = bound(c + 1, image.width, grid.cells_across);
            cells.push(image.sub_image(x0, x1, y0, y1));
        }
    }
    Ok(cells)
}
