//! Acquisition geometry, sinogram and image rasters, and their on-disk format.
//!
//! Coordinate conventions used by every kernel in the crate:
//!
//! * detector pixel `k` has its center at `t_k = k - (n_det - 1) / 2`;
//! * image pixel `(i, j)` has its center at `x = j - (n - 1) / 2`,
//!   `y = (n - 1) / 2 - i`;
//! * image pixels and detector pixels both have unit size.
//!
//! On disk a raster is a pair of files: `<name>.f32` holding little-endian
//! binary32 values in row-major order, and a `<name>.json` sidecar.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parallel-beam acquisition description shared by projectors and reconstructors.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    n_det: usize,
    angles: Vec<f64>,
    det_spacing: f64,
    vol_size: usize,
}

impl Geometry {
    /// Uniform angles `i * pi / n_angles` over `[0, pi)`.
    pub fn new(n_angles: usize, n_det: usize, vol_size: usize) -> Result<Self> {
        if n_angles == 0 {
            return Err(Error::invalid("n_angles must be at least 1"));
        }
        let angles = (0..n_angles)
            .map(|i| i as f64 * PI / n_angles as f64)
            .collect();
        Self::with_angles(angles, n_det, vol_size)
    }

    /// Explicit angle list; angles must be strictly increasing inside `[0, pi)`.
    pub fn with_angles(angles: Vec<f64>, n_det: usize, vol_size: usize) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::invalid("angle list is empty"));
        }
        if n_det == 0 || vol_size == 0 {
            return Err(Error::invalid("n_det and vol_size must be at least 1"));
        }
        if n_det < vol_size {
            return Err(Error::invalid(format!(
                "detector ({n_det} pixels) narrower than the volume ({vol_size} pixels)"
            )));
        }
        for (i, &a) in angles.iter().enumerate() {
            if !(0.0..PI).contains(&a) {
                return Err(Error::invalid(format!("angle {i} = {a} outside [0, pi)")));
            }
            if i > 0 && a <= angles[i - 1] {
                return Err(Error::invalid(format!(
                    "angles not strictly increasing at index {i}"
                )));
            }
        }
        Ok(Self {
            n_det,
            angles,
            det_spacing: 1.0,
            vol_size,
        })
    }

    pub fn n_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn n_det(&self) -> usize {
        self.n_det
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Detector pitch. Always 1.0: lengths throughout the crate are in pixels.
    pub fn det_spacing(&self) -> f64 {
        self.det_spacing
    }

    pub fn vol_size(&self) -> usize {
        self.vol_size
    }

    /// Total number of projection samples, `n_angles * n_det`.
    pub fn n_proj(&self) -> usize {
        self.n_angles() * self.n_det
    }

    /// Detector coordinate of the center of pixel `k`.
    pub fn det_coord(&self, k: usize) -> f64 {
        k as f64 - (self.n_det as f64 - 1.0) / 2.0
    }

    /// Geometry keeping every `m`-th angle starting at index 0.
    pub fn subsample(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("angle subsampling interval must be >= 1"));
        }
        let angles = self.angles.iter().step_by(m).copied().collect();
        Self::with_angles(angles, self.n_det, self.vol_size)
    }

    pub(crate) fn check_image(&self, image: &ImageGrid) -> Result<()> {
        if image.n() != self.vol_size {
            return Err(Error::invalid(format!(
                "image is {0}x{0} but geometry volume is {1}x{1}",
                image.n(),
                self.vol_size
            )));
        }
        Ok(())
    }

    pub(crate) fn check_sinogram(&self, sino: &Sinogram) -> Result<()> {
        if sino.geometry() != self {
            return Err(Error::invalid(format!(
                "sinogram geometry ({}x{}) does not match reconstructor geometry ({}x{})",
                sino.geometry().n_angles(),
                sino.geometry().n_det(),
                self.n_angles(),
                self.n_det
            )));
        }
        Ok(())
    }
}

/// Projection data, one row per angle.
#[derive(Clone, Debug, PartialEq)]
pub struct Sinogram {
    geometry: Geometry,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn zeros(geometry: Geometry) -> Self {
        let values = vec![0.0; geometry.n_proj()];
        Self { geometry, values }
    }

    pub fn from_values(geometry: Geometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geometry.n_proj() {
            return Err(Error::invalid(format!(
                "expected {} sinogram values, got {}",
                geometry.n_proj(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sinogram value at {i}")));
        }
        Ok(Self { geometry, values })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn n_angles(&self) -> usize {
        self.geometry.n_angles()
    }

    pub fn n_det(&self) -> usize {
        self.geometry.n_det()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, angle: usize) -> &[f64] {
        let n = self.n_det();
        &self.values[angle * n..(angle + 1) * n]
    }

    pub fn get(&self, angle: usize, det: usize) -> f64 {
        self.values[angle * self.n_det() + det]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Keep every `m`-th projection, starting with the first.
    pub fn subsample_angles(&self, m: usize) -> Result<Self> {
        let geometry = self.geometry.subsample(m)?;
        let n = self.n_det();
        let values = self
            .values
            .chunks(n)
            .step_by(m)
            .flatten()
            .copied()
            .collect();
        Ok(Self { geometry, values })
    }

    /// Mirror the detector axis (`t -> -t`) of every row.
    pub fn flip_detector(&self) -> Self {
        let n = self.n_det();
        let values = self
            .values
            .chunks(n)
            .flat_map(|row| row.iter().rev().copied())
            .collect();
        Self {
            geometry: self.geometry.clone(),
            values,
        }
    }
}

/// Square reconstruction raster, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid {
    n: usize,
    values: Vec<f64>,
}

impl ImageGrid {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![0.0; n * n],
        }
    }

    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("image side must be at least 1"));
        }
        if values.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} image values, got {}",
                n * n,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite image value at {i}")));
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.n + j] = v;
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// Elementwise map into a new image.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Either kind of raster, as returned by [`read_raster`].
#[derive(Clone, Debug, PartialEq)]
pub enum Raster {
    Image(ImageGrid),
    Sinogram(Sinogram),
}

impl From<ImageGrid> for Raster {
    fn from(v: ImageGrid) -> Self {
        Raster::Image(v)
    }
}

impl From<Sinogram> for Raster {
    fn from(v: Sinogram) -> Self {
        Raster::Sinogram(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RasterKind {
    Image,
    Sinogram,
}

/// Contents of the `<name>.json` sidecar.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub kind: RasterKind,
    pub rows: usize,
    pub cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vol_size: Option<usize>,
    /// Min/max used to scale the PGM preview, when one was written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preview_scaling: Option<[f64; 2]>,
}

/// Decimal representation with 17 significant digits (round-trips any f64).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn parse_f64(path: &Path, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::format(path, format!("`{s}` is not a decimal number")))
}

/// Data and sidecar paths for a raster stem; any extension on `path` is replaced.
pub fn raster_paths(path: &Path) -> (PathBuf, PathBuf) {
    (path.with_extension("f32"), path.with_extension("json"))
}

/// Write bytes to a temporary sibling and rename it into place.
pub(crate) fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "parent directory missing"),
            ));
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn encode_f32(values: &[f64]) -> Result<Vec<u8>> {
    let mut bytes = Vec::with_capacity(values.len() * 4);
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::invalid(format!("cannot write non-finite value at {i}")));
        }
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    Ok(bytes)
}

/// Write `<stem>.f32` and `<stem>.json`.
pub fn write_raster(path: &Path, raster: &Raster) -> Result<()> {
    write_raster_with_preview(path, raster, None)
}

/// [`write_raster`] recording the min/max used for a PGM preview in the sidecar.
pub fn write_raster_scaled(path: &Path, raster: &Raster, scaling: [f64; 2]) -> Result<()> {
    write_raster_with_preview(path, raster, Some(scaling))
}

pub(crate) fn write_raster_with_preview(
    path: &Path,
    raster: &Raster,
    preview_scaling: Option<[f64; 2]>,
) -> Result<()> {
    let (data_path, meta_path) = raster_paths(path);
    let (sidecar, values) = match raster {
        Raster::Image(img) => (
            Sidecar {
                kind: RasterKind::Image,
                rows: img.n(),
                cols: img.n(),
                angles: None,
                vol_size: None,
                preview_scaling,
            },
            img.values(),
        ),
        Raster::Sinogram(s) => (
            Sidecar {
                kind: RasterKind::Sinogram,
                rows: s.n_angles(),
                cols: s.n_det(),
                angles: Some(s.geometry().angles().iter().map(|&a| fmt_f64(a)).collect()),
                vol_size: Some(s.geometry().vol_size()),
                preview_scaling,
            },
            s.values(),
        ),
    };
    let bytes = encode_f32(values)?;
    let meta = serde_json::to_vec_pretty(&sidecar)
        .map_err(|e| Error::format(&meta_path, e.to_string()))?;
    atomic_write(&data_path, &bytes)?;
    atomic_write(&meta_path, &meta)
}

/// Read a raster written by [`write_raster`].
pub fn read_raster(path: &Path) -> Result<Raster> {
    let (data_path, meta_path) = raster_paths(path);
    let meta = fs::read(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let sidecar: Sidecar =
        serde_json::from_slice(&meta).map_err(|e| Error::format(&meta_path, e.to_string()))?;
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    let expected = sidecar.rows * sidecar.cols * 4;
    if bytes.len() != expected {
        return Err(Error::format(
            &data_path,
            format!(
                "sidecar declares {}x{} ({} bytes) but file has {} bytes",
                sidecar.rows,
                sidecar.cols,
                expected,
                bytes.len()
            ),
        ));
    }
    let mut values = Vec::with_capacity(sidecar.rows * sidecar.cols);
    for (i, chunk) in bytes.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
        if !v.is_finite() {
            return Err(Error::format(&data_path, format!("non-finite value at {i}")));
        }
        values.push(v as f64);
    }
    match sidecar.kind {
        RasterKind::Image => {
            if sidecar.rows != sidecar.cols {
                return Err(Error::format(&meta_path, "image raster must be square"));
            }
            ImageGrid::from_values(sidecar.rows, values)
                .map(Raster::Image)
                .map_err(|e| Error::format(&data_path, e.to_string()))
        }
        RasterKind::Sinogram => {
            let angles = sidecar
                .angles
                .as_ref()
                .ok_or_else(|| Error::format(&meta_path, "sinogram sidecar lacks `angles`"))?
                .iter()
                .map(|s| parse_f64(&meta_path, s))
                .collect::<Result<Vec<_>>>()?;
            if angles.len() != sidecar.rows {
                return Err(Error::format(
                    &meta_path,
                    format!("{} angles for {} rows", angles.len(), sidecar.rows),
                ));
            }
            let vol_size = sidecar.vol_size.unwrap_or(sidecar.cols);
            let geometry = Geometry::with_angles(angles, sidecar.cols, vol_size)
                .map_err(|e| Error::format(&meta_path, e.to_string()))?;
            Sinogram::from_values(geometry, values)
                .map(Raster::Sinogram)
                .map_err(|e| Error::format(&data_path, e.to_string()))
        }
    }
}

pub fn read_sinogram(path: &Path) -> Result<Sinogram> {
    match read_raster(path)? {
        Raster::Sinogram(s) => Ok(s),
        Raster::Image(_) => Err(Error::format(path, "expected a sinogram, found an image")),
    }
}

pub fn read_image(path: &Path) -> Result<ImageGrid> {
    match read_raster(path)? {
        Raster::Image(img) => Ok(img),
        Raster::Sinogram(_) => Err(Error::format(path, "expected an image, found a sinogram")),
    }
}

/// 16-bit binary PGM with global min-max scaling; returns the `[min, max]` used.
pub fn write_pgm16(path: &Path, image: &ImageGrid) -> Result<[f64; 2]> {
    let (lo, hi) = image.min_max();
    let span = if hi > lo { hi - lo } else { 1.0 };
    let n = image.n();
    let mut bytes = format!("P5\n{n} {n}\n65535\n").into_bytes();
    for &v in image.values() {
        let level = (((v - lo) / span) * 65535.0).round().clamp(0.0, 65535.0) as u16;
        bytes.extend_from_slice(&level.to_be_bytes());
    }
    atomic_write(path, &bytes)?;
    Ok([lo, hi])
}
