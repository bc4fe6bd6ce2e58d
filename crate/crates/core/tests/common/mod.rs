#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segeval::LabelImage;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Paints up to `max_regions` random rectangles of distinct non-zero
/// labels over a black background. Later rectangles overwrite earlier
/// ones, so regions can be irregular or vanish entirely.
pub fn random_image(rng: &mut impl Rng, width: u32, height: u32, max_regions: usize) -> LabelImage {
    let mut labels = vec![0u32; (width * height) as usize];
    let regions = rng.random_range(0..=max_regions);
    let mut palette: Vec<u32> = Vec::new();
    while palette.len() < regions {
        let l = rng.random_range(1..0x00ff_ffff);
        if !palette.contains(&l) {
            palette.push(l);
        }
    }
    for &label in &palette {
        let x0 = rng.random_range(0..width);
        let y0 = rng.random_range(0..height);
        let x1 = rng.random_range(x0..width) + 1;
        let y1 = rng.random_range(y0..height) + 1;
        for y in y0..y1 {
            for x in x0..x1 {
                labels[(y * width + x) as usize] = label;
            }
        }
    }
    LabelImage::new(width, height, labels, 0).unwrap()
}

/// A test image derived from `truth` by splitting, merging, shifting and
/// dropping regions, so pairs overlap in realistic ways.
pub fn perturbed(rng: &mut impl Rng, truth: &LabelImage, max_regions: usize) -> LabelImage {
    let (w, h) = truth.dimensions();
    match rng.random_range(0..4) {
        0 => random_image(rng, w, h, max_regions),
        _ => {
            let dx = rng.random_range(0..3) as i64 - 1;
            let dy = rng.random_range(0..3) as i64 - 1;
            let split_at = rng.random_range(0..w.max(1));
            let merge: bool = rng.random_bool(0.3);
            let mut out = vec![0u32; (w * h) as usize];
            for y in 0..h as i64 {
                for x in 0..w as i64 {
                    let (sx, sy) = (x - dx, y - dy);
                    if sx < 0 || sy < 0 || sx >= w as i64 || sy >= h as i64 {
                        continue;
                    }
                    let mut l = truth.get(sx as u32, sy as u32);
                    if l != 0 {
                        if merge {
                            l = (l % 3) + 1;
                        } else if (x as u32) >= split_at {
                            l ^= 0x00_8000;
                        }
                    }
                    out[(y * w as i64 + x) as usize] = l;
                }
            }
            // sprinkle some noise
            for _ in 0..rng.random_range(0..=(w * h / 8)) {
                let i = rng.random_range(0..(w * h)) as usize;
                out[i] = rng.random_range(0..4);
            }
            LabelImage::new(w, h, out, 0).unwrap()
        }
    }
}

/// Applies an injective map to non-background labels.
pub fn relabel(image: &LabelImage, rng: &mut impl Rng) -> LabelImage {
    let distinct: HashSet<u32> = image
        .labels()
        .iter()
        .copied()
        .filter(|&l| l != image.background())
        .collect();
    let mut map = HashMap::new();
    let mut used = HashSet::new();
    let mut ordered: Vec<u32> = distinct.into_iter().collect();
    ordered.sort_unstable();
    for l in ordered {
        loop {
            let candidate = rng.random_range(1..u32::MAX);
            if candidate != image.background() && used.insert(candidate) {
                map.insert(l, candidate);
                break;
            }
        }
    }
    let labels = image
        .labels()
        .iter()
        .map(|l| *map.get(l).unwrap_or(l))
        .collect();
    LabelImage::new(image.width(), image.height(), labels, image.background()).unwrap()
}

/// Nearest-neighbour upscale by an integer factor.
pub fn upscale(image: &LabelImage, factor: u32) -> LabelImage {
    let (w, h) = image.dimensions();
    let mut labels = Vec::with_capacity((w * h * factor * factor) as usize);
    for y in 0..h * factor {
        for x in 0..w * factor {
            labels.push(image.get(x / factor, y / factor));
        }
    }
    LabelImage::new(w * factor, h * factor, labels, image.background()).unwrap()
}

/// Scores computed straight from pixel sets, with no confusion matrix.
#[derive(Debug, Clone, Copy)]
pub struct SetScores {
    pub object_jaccard: f64,
    pub subset_jaccard: f64,
    pub object_dice: f64,
    pub subset_dice: f64,
    pub symmetric_best_dice: f64,
}

impl SetScores {
    pub fn as_array(&self) -> [f64; 5] {
        [
            self.object_jaccard,
            self.subset_jaccard,
            self.object_dice,
            self.subset_dice,
            self.symmetric_best_dice,
        ]
    }
}

fn regions(image: &LabelImage) -> Vec<HashSet<usize>> {
    let mut by_label: BTreeMap<u32, HashSet<usize>> = BTreeMap::new();
    for (i, &l) in image.labels().iter().enumerate() {
        if l != image.background() {
            by_label.entry(l).or_default().insert(i);
        }
    }
    by_label.into_values().collect()
}

/// Best total over all partial one-to-one matchings, each truth region
/// either skipped or paired with an unused test region.
fn exhaustive_matching(overlap: &[Vec<u64>], row: usize, used: &mut Vec<bool>) -> u64 {
    if row == overlap.len() {
        return 0;
    }
    let mut best = exhaustive_matching(overlap, row + 1, used);
    for c in 0..used.len() {
        if !used[c] {
            used[c] = true;
            best = best.max(overlap[row][c] + exhaustive_matching(overlap, row + 1, used));
            used[c] = false;
        }
    }
    best
}

fn best_dice(from: &[HashSet<usize>], to: &[HashSet<usize>]) -> f64 {
    let total: f64 = from
        .iter()
        .map(|a| {
            to.iter()
                .map(|b| 2.0 * a.intersection(b).count() as f64 / (a.len() + b.len()) as f64)
                .fold(0.0, f64::max)
        })
        .sum();
    total / from.len() as f64
}

pub fn set_oracle(truth: &LabelImage, test: &LabelImage) -> SetScores {
    let t: HashSet<usize> = (0..truth.pixel_count())
        .filter(|&i| truth.labels()[i] != truth.background())
        .collect();
    let s: HashSet<usize> = (0..test.pixel_count())
        .filter(|&i| test.labels()[i] != test.background())
        .collect();
    let inter = t.intersection(&s).count() as f64;
    let union = t.union(&s).count() as f64;

    let tr = regions(truth);
    let sr = regions(test);
    let overlap: Vec<Vec<u64>> = tr
        .iter()
        .map(|a| {
            sr.iter()
                .map(|b| a.intersection(b).count() as u64)
                .collect()
        })
        .collect();
    let matched = exhaustive_matching(&overlap, 0, &mut vec![false; sr.len()]) as f64;

    let ratio = |num: f64, den: f64| if den == 0.0 { 1.0 } else { num / den };
    let sizes = (t.len() + s.len()) as f64;
    let sbd = match (tr.is_empty(), sr.is_empty()) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => best_dice(&tr, &sr).min(best_dice(&sr, &tr)),
    };
    SetScores {
        object_jaccard: ratio(inter, union),
        subset_jaccard: ratio(matched, union),
        object_dice: ratio(2.0 * inter, sizes),
        subset_dice: ratio(2.0 * matched, sizes),
        symmetric_best_dice: sbd,
    }
}
