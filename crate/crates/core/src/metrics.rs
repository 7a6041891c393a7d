//! Variability, accuracy and segmentation metrics over sets of reconstructions.

use crate::error::{Error, Result};
use crate::raster::ImageGrid;

/// Labelled reconstructions of the same slice.
#[derive(Clone, Debug, Default)]
pub struct ReconSet {
    members: Vec<(String, ImageGrid)>,
}

impl ReconSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_members(members: Vec<(String, ImageGrid)>) -> Result<Self> {
        let mut set = Self::new();
        for (label, image) in members {
            set.push(label, image)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, label: impl Into<String>, image: ImageGrid) -> Result<()> {
        if let Some((_, first)) = self.members.first() {
            if first.n() != image.n() {
                return Err(Error::invalid(format!(
                    "set member is {0}x{0}, expected {1}x{1}",
                    image.n(),
                    first.n()
                )));
            }
        }
        self.members.push((label.into(), image));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[(String, ImageGrid)] {
        &self.members
    }

    pub fn get(&self, label: &str) -> Option<&ImageGrid> {
        self.members.iter().find(|(l, _)| l == label).map(|(_, im)| im)
    }

    pub fn n(&self) -> Option<usize> {
        self.members.first().map(|(_, im)| im.n())
    }

    /// Pixelwise mean of the members.
    pub fn mean(&self) -> Result<ImageGrid> {
        let n = self.n().ok_or_else(|| Error::invalid("empty reconstruction set"))?;
        let mut acc = vec![0.0; n * n];
        for (_, im) in &self.members {
            for (a, v) in acc.iter_mut().zip(im.values()) {
                *a += v;
            }
        }
        let k = self.members.len() as f64;
        acc.iter_mut().for_each(|a| *a /= k);
        ImageGrid::from_values(n, acc)
    }
}

fn same_size(a: &ImageGrid, b: &ImageGrid) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::invalid(format!(
            "image sizes differ: {} vs {}",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

/// Population standard deviation of every pixel across the set.
pub fn pixelwise_std(s: &ReconSet) -> Result<ImageGrid> {
    if s.len() < 2 {
        return Err(Error::invalid("pixelwise std needs at least two members"));
    }
    let mean = s.mean()?;
    let mut acc = vec![0.0; mean.values().len()];
    for (_, im) in s.members() {
        for ((a, v), m) in acc.iter_mut().zip(im.values()).zip(mean.values()) {
            *a += (v - m) * (v - m);
        }
    }
    let k = s.len() as f64;
    ImageGrid::from_values(mean.n(), acc.into_iter().map(|a| (a / k).sqrt()).collect())
}

pub fn mean_std(sigma: &ImageGrid) -> f64 {
    let v = sigma.values();
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn rmse(r: &ImageGrid, gt: &ImageGrid) -> Result<f64> {
    same_size(r, gt)?;
    let sum: f64 = r
        .values()
        .iter()
        .zip(gt.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((sum / r.values().len() as f64).sqrt())
}

/// `(mean(set) - gt)^2` per pixel and its slice average.
pub fn squared_bias(s: &ReconSet, gt: &ImageGrid) -> Result<(ImageGrid, f64)> {
    let mean = s.mean()?;
    same_size(&mean, gt)?;
    let map: Vec<f64> = mean
        .values()
        .iter()
        .zip(gt.values())
        .map(|(m, g)| (m - g) * (m - g))
        .collect();
    let avg = map.iter().sum::<f64>() / map.len() as f64;
    Ok((ImageGrid::from_values(gt.n(), map)?, avg))
}

pub const OTSU_BINS: usize = 256;

/// Otsu threshold on a 256-bin histogram spanning `[min, max]`; returns the
/// centre of the winning bin, the lowest one on ties.
pub fn otsu_threshold(r: &ImageGrid) -> Result<f64> {
    let (lo, hi) = r.min_max();
    if hi <= lo {
        return Err(Error::Degenerate("Otsu threshold of a constant image".into()));
    }
    let width = (hi - lo) / OTSU_BINS as f64;
    let mut counts = [0u64; OTSU_BINS];
    for &v in r.values() {
        let b = (((v - lo) / width) as usize).min(OTSU_BINS - 1);
        counts[b] += 1;
    }
    let centre = |b: usize| lo + (b as f64 + 0.5) * width;
    let total: u64 = counts.iter().sum();
    let total_sum: f64 = counts.iter().enumerate().map(|(b, &c)| c as f64 * centre(b)).sum();
    let (mut w0, mut sum0) = (0u64, 0.0);
    let (mut best, mut best_bin) = (f64::NEG_INFINITY, 0);
    for (b, &c) in counts.iter().enumerate() {
        w0 += c;
        sum0 += c as f64 * centre(b);
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (total_sum - sum0) / w1 as f64;
        let between = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
        if between > best {
            best = between;
            best_bin = b;
        }
    }
    Ok(centre(best_bin))
}

/// Binary image of pixels strictly above `t`.
pub fn segment(r: &ImageGrid, t: f64) -> ImageGrid {
    r.map(|v| if v > t { 1.0 } else { 0.0 })
}

/// F1 score and Jaccard index of two binary images.
pub fn f1_jaccard(seg: &ImageGrid, gt: &ImageGrid) -> Result<(f64, f64)> {
    same_size(seg, gt)?;
    let (mut tp, mut fp, mut fne) = (0u64, 0u64, 0u64);
    for (&a, &b) in seg.values().iter().zip(gt.values()) {
        if (a != 0.0 && a != 1.0) || (b != 0.0 && b != 1.0) {
            return Err(Error::invalid("segmentations must be {0,1}-valued"));
        }
        match (a == 1.0, b == 1.0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fne += 1,
            (false, false) => {}
        }
    }
    let union = tp + fp + fne;
    if union == 0 {
        return Ok((1.0, 1.0));
    }
    let f1 = tp as f64 / (tp as f64 + 0.5 * (fp + fne) as f64);
    let j = tp as f64 / union as f64;
    Ok((f1, j))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Index of the most populated bin, the lowest one on ties.
    pub fn mode_bin(&self) -> usize {
        let mut best = 0;
        for (b, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = b;
            }
        }
        best
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Uniform histogram over `[0, max]`, bins half-open except the last.
pub fn std_histogram(sigma: &ImageGrid, n_bins: usize) -> Result<Histogram> {
    let max = sigma.values().iter().copied().fold(0.0, f64::max);
    histogram_range(sigma, n_bins, max)
}

/// Uniform histogram over `[0, upper]`; values above `upper` land in the last bin.
pub fn histogram_range(sigma: &ImageGrid, n_bins: usize, upper: f64) -> Result<Histogram> {
    if n_bins == 0 {
        return Err(Error::invalid("histogram needs at least one bin"));
    }
    if !(upper >= 0.0 && upper.is_finite()) {
        return Err(Error::invalid("histogram range must be finite and non-negative"));
    }
    // a zero range still needs increasing edges
    let span = if upper > 0.0 { upper } else { 1.0 };
    let width = span / n_bins as f64;
    let bin_edges = (0..=n_bins).map(|b| b as f64 * width).collect();
    let mut counts = vec![0u64; n_bins];
    for &v in sigma.values() {
        let b = if v <= 0.0 {
            0
        } else {
            ((v / width) as usize).min(n_bins - 1)
        };
        counts[b] += 1;
    }
    Ok(Histogram { bin_edges, counts })
}
