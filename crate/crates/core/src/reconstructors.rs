//! The fixed strip forward projector and five reconstruction implementations
//! that take already-filtered sinograms.
//!
//! The four real-space backprojectors differ only in how a pixel's
//! contribution to a detector bin is weighted (its "footprint"). Each is
//! evaluated pixel-driven: for every pixel and angle the pixel center is
//! projected onto the detector at `s = x cos(theta) + y sin(theta)` and every
//! detector bin within the footprint support is visited.
//!
//! | kind        | weight for the bin centered at `t_k`                         |
//! |-------------|---------------------------------------------------------------|
//! | strip       | area of pixel inside the unit-width strip around `t_k`        |
//! | line        | length of the line `t = t_k` inside the pixel                 |
//! | joseph      | linear interpolation along the ray's major axis               |
//! | pixel       | 8-bit-quantized linear interpolation between detector bins   |
//!
//! `FourierGrid` grids polar Fourier samples of each row onto a Cartesian
//! grid with bilinear weights and inverts with a 2D FFT.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::filterbank::{apply_filter, FilterSpec};
use crate::raster::{Geometry, ImageGrid, Sinogram};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelKind {
    Strip,
    Line,
    Joseph,
    PixelDriven,
    FourierGrid,
}

impl KernelKind {
    pub const ALL: [KernelKind; 5] = [
        KernelKind::Strip,
        KernelKind::Line,
        KernelKind::Joseph,
        KernelKind::PixelDriven,
        KernelKind::FourierGrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Strip => "strip",
            KernelKind::Line => "line",
            KernelKind::Joseph => "joseph",
            KernelKind::PixelDriven => "pixel",
            KernelKind::FourierGrid => "fouriergrid",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::invalid(format!("unknown implementation `{name}`")))
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReconConventions {
    /// Drop the zero-frequency component of every row (Fourier reconstructor only).
    pub zero_dc: bool,
    /// Oversampling of the Fourier grid, 1 or 2.
    pub grid_pad: usize,
}

impl Default for ReconConventions {
    fn default() -> Self {
        Self {
            zero_dc: false,
            grid_pad: 2,
        }
    }
}

impl ReconConventions {
    /// Defaults for a kind: the Fourier reconstructor discards the DC term.
    pub fn for_kind(kind: KernelKind) -> Self {
        Self {
            zero_dc: kind == KernelKind::FourierGrid,
            grid_pad: 2,
        }
    }
}

/// A reconstruction routine used as a black box: filtered sinogram in, image out.
///
/// Filter computation only ever calls [`Implementation::reconstruct`]; anything
/// implementing this trait can have a filter adapted to it.
pub trait Implementation: Sync {
    fn geometry(&self) -> &Geometry;

    fn reconstruct(&self, q_filtered: &Sinogram) -> Result<ImageGrid>;

    fn label(&self) -> String;

    /// Whether the implementation ignores the filter's zero-frequency term.
    fn zero_dc(&self) -> bool {
        false
    }
}

#[derive(Clone)]
pub struct Reconstructor {
    kind: KernelKind,
    geometry: Geometry,
    conventions: ReconConventions,
    grid: Option<Arc<FourierGridPlan>>,
}

impl fmt::Debug for Reconstructor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Reconstructor")
            .field("kind", &self.kind)
            .field("geometry", &self.geometry)
            .field("conventions", &self.conventions)
            .finish()
    }
}

impl Reconstructor {
    /// Reconstructor with the kind's default conventions.
    pub fn new(kind: KernelKind, geometry: Geometry) -> Result<Self> {
        Self::with_conventions(kind, geometry, ReconConventions::for_kind(kind))
    }

    pub fn with_conventions(
        kind: KernelKind,
        geometry: Geometry,
        conventions: ReconConventions,
    ) -> Result<Self> {
        if !(1..=2).contains(&conventions.grid_pad) {
            return Err(Error::invalid(format!(
                "grid_pad must be 1 or 2, got {}",
                conventions.grid_pad
            )));
        }
        if conventions.zero_dc && kind != KernelKind::FourierGrid {
            return Err(Error::invalid("zero_dc applies to the Fourier reconstructor only"));
        }
        let grid = (kind == KernelKind::FourierGrid)
            .then(|| Arc::new(FourierGridPlan::new(&geometry, conventions)));
        Ok(Self {
            kind,
            geometry,
            conventions,
            grid,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn conventions(&self) -> ReconConventions {
        self.conventions
    }
}

impl Implementation for Reconstructor {
    fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    fn reconstruct(&self, q_filtered: &Sinogram) -> Result<ImageGrid> {
        self.geometry.check_sinogram(q_filtered)?;
        match &self.grid {
            Some(plan) => Ok(plan.reconstruct(q_filtered)),
            None => backproject(self.kind, q_filtered),
        }
    }

    fn label(&self) -> String {
        self.kind.name().to_string()
    }

    fn zero_dc(&self) -> bool {
        self.conventions.zero_dc
    }
}

/// Filter with `h` (honoring the implementation's DC convention), then reconstruct.
pub fn fbp(rec: &dyn Implementation, p: &Sinogram, h: &FilterSpec) -> Result<ImageGrid> {
    if h.n_det() != rec.geometry().n_det() {
        return Err(Error::invalid(format!(
            "filter built for {} detector pixels, geometry has {}",
            h.n_det(),
            rec.geometry().n_det()
        )));
    }
    let h = if rec.zero_dc() && !h.zero_dc_applied() {
        h.clone().with_zero_dc(true)
    } else {
        h.clone()
    };
    rec.reconstruct(&apply_filter(p, &h)?)
}

// ---------------------------------------------------------------------------
// footprints

/// Projection of a unit square onto the detector axis at one angle: a
/// trapezoid with half-width `a`, half plateau `b` and height `1 / (a + b)`.
#[derive(Clone, Copy, Debug)]
struct Trapezoid {
    a: f64,
    b: f64,
    height: f64,
}

impl Trapezoid {
    fn new(cos: f64, sin: f64) -> Self {
        let (c, s) = (cos.abs(), sin.abs());
        let a = 0.5 * (c + s);
        let b = 0.5 * (c - s).abs();
        Self {
            a,
            b,
            height: 1.0 / (a + b),
        }
    }

    /// Chord length of the line at offset `u` from the pixel center.
    #[inline]
    fn density(&self, u: f64) -> f64 {
        let u = u.abs();
        if u <= self.b {
            self.height
        } else if u < self.a {
            self.height * (self.a - u) / (self.a - self.b)
        } else {
            0.0
        }
    }

    /// Pixel area on the side `t < u` of the line at offset `u`.
    #[inline]
    fn cdf(&self, u: f64) -> f64 {
        let (a, b, h) = (self.a, self.b, self.height);
        if u <= -a {
            0.0
        } else if u >= a {
            1.0
        } else if u < -b {
            h * (u + a) * (u + a) / (2.0 * (a - b))
        } else if u <= b {
            h * (a - b) / 2.0 + h * (u + b)
        } else {
            1.0 - h * (a - u) * (a - u) / (2.0 * (a - b))
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Footprint {
    Strip(Trapezoid),
    Line(Trapezoid),
    Joseph { half: f64 },
    Pixel,
}

/// Fractional interpolation positions are snapped to 1/256, as texture units do.
const TEXTURE_STEPS: f64 = 256.0;

impl Footprint {
    fn new(kind: KernelKind, cos: f64, sin: f64) -> Self {
        match kind {
            KernelKind::Strip => Footprint::Strip(Trapezoid::new(cos, sin)),
            KernelKind::Line => Footprint::Line(Trapezoid::new(cos, sin)),
            KernelKind::Joseph => Footprint::Joseph {
                half: cos.abs().max(sin.abs()),
            },
            KernelKind::PixelDriven => Footprint::Pixel,
            KernelKind::FourierGrid => unreachable!("no real-space footprint"),
        }
    }
}

#[inline]
fn joseph_weight(half: f64, delta: f64) -> f64 {
    let d = delta.abs();
    if d < half {
        (half - d) / (half * half)
    } else {
        0.0
    }
}

#[inline]
fn pixel_weight(delta: f64) -> f64 {
    if delta <= 0.0 {
        if delta > -1.0 {
            1.0 - quantize(-delta)
        } else {
            0.0
        }
    } else if delta < 1.0 {
        quantize(1.0 - delta)
    } else {
        0.0
    }
}

/// Nearest multiple of 1/256 for `x >= 0`.
#[inline]
fn quantize(x: f64) -> f64 {
    floor_i(x * TEXTURE_STEPS + 0.5) as f64 / TEXTURE_STEPS
}

#[inline]
fn floor_i(x: f64) -> i64 {
    let i = x as i64;
    if i as f64 > x {
        i - 1
    } else {
        i
    }
}

#[inline]
fn ceil_i(x: f64) -> i64 {
    let i = x as i64;
    if (i as f64) < x {
        i + 1
    } else {
        i
    }
}

/// Detector bins touched by a pixel whose center projects to fractional bin
/// index `u`, with their weights.
trait Bins: Copy {
    fn visit(self, u: f64, n_det: usize, f: impl FnMut(usize, f64));
}

#[inline(always)]
fn bin_range(u: f64, hw: f64, n_det: usize) -> (i64, i64) {
    (ceil_i(u - hw).max(0), floor_i(u + hw).min(n_det as i64 - 1))
}

/// Strip overlaps as differences of the footprint CDF; neighbouring bins
/// share a boundary evaluation.
#[derive(Clone, Copy)]
struct StripBins(Trapezoid);

impl Bins for StripBins {
    #[inline(always)]
    fn visit(self, u: f64, n_det: usize, mut f: impl FnMut(usize, f64)) {
        let t = self.0;
        let (lo, hi) = bin_range(u, t.a + 0.5, n_det);
        if hi < lo {
            return;
        }
        let mut left = t.cdf(lo as f64 - u - 0.5);
        for k in lo..=hi {
            let right = t.cdf(k as f64 - u + 0.5);
            let w = right - left;
            left = right;
            if w != 0.0 {
                f(k as usize, w);
            }
        }
    }
}

#[derive(Clone, Copy)]
struct KernelBins<W> {
    hw: f64,
    weight: W,
}

impl<W: Fn(f64) -> f64 + Copy> Bins for KernelBins<W> {
    #[inline(always)]
    fn visit(self, u: f64, n_det: usize, mut f: impl FnMut(usize, f64)) {
        let (lo, hi) = bin_range(u, self.hw, n_det);
        for k in lo..=hi {
            let w = (self.weight)(k as f64 - u);
            if w != 0.0 {
                f(k as usize, w);
            }
        }
    }
}

/// Evaluate `$body` with `$bins` bound to the footprint's [`Bins`],
/// monomorphised per kernel.
macro_rules! with_bins {
    ($fp:expr, |$bins:ident| $body:expr) => {
        match $fp {
            Footprint::Strip(t) => {
                let $bins = StripBins(t);
                $body
            }
            Footprint::Line(t) => {
                let $bins = KernelBins {
                    hw: t.a,
                    weight: move |d: f64| t.density(d),
                };
                $body
            }
            Footprint::Joseph { half } => {
                let $bins = KernelBins {
                    hw: half,
                    weight: move |d: f64| joseph_weight(half, d),
                };
                $body
            }
            Footprint::Pixel => {
                let $bins = KernelBins {
                    hw: 1.0,
                    weight: pixel_weight,
                };
                $body
            }
        }
    };
}

/// Per-angle constants for the pixel-driven loops.
struct AngleSetup {
    cos: f64,
    sin: f64,
    footprint: Footprint,
}

fn angle_setups(kind: KernelKind, g: &Geometry) -> Vec<AngleSetup> {
    g.angles()
        .iter()
        .map(|&theta| {
            let (sin, cos) = theta.sin_cos();
            AngleSetup {
                cos,
                sin,
                footprint: Footprint::new(kind, cos, sin),
            }
        })
        .collect()
}

#[inline]
fn pixel_x(n: usize, j: usize) -> f64 {
    j as f64 - (n as f64 - 1.0) / 2.0
}

#[inline]
fn pixel_y(n: usize, i: usize) -> f64 {
    (n as f64 - 1.0) / 2.0 - i as f64
}

/// Transpose of the kernel's projection, unscaled.
fn gather(kind: KernelKind, q: &Sinogram) -> ImageGrid {
    let g = q.geometry();
    let n = g.vol_size();
    let n_det = g.n_det();
    let center = (n_det as f64 - 1.0) / 2.0;
    let setups = angle_setups(kind, g);
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let y = pixel_y(n, i);
        for (a, st) in setups.iter().enumerate() {
            let qrow = q.row(a);
            let u0 = pixel_x(n, 0) * st.cos + y * st.sin + center;
            with_bins!(st.footprint, |bins| {
                for (j, px) in row.iter_mut().enumerate() {
                    let u = u0 + j as f64 * st.cos;
                    let mut acc = 0.0;
                    bins.visit(u, n_det, |k, w| acc += w * qrow[k]);
                    *px += acc;
                }
            })
        }
    });
    ImageGrid::from_values(n, out).expect("finite backprojection")
}

/// Real-space backprojection with angular weight `pi / n_angles`.
pub fn backproject(kind: KernelKind, q: &Sinogram) -> Result<ImageGrid> {
    if kind == KernelKind::FourierGrid {
        return Err(Error::invalid(
            "the Fourier reconstructor has no real-space backprojection",
        ));
    }
    let scale = PI / q.n_angles() as f64;
    Ok(gather(kind, q).map(|v| v * scale))
}

/// Strip-kernel transpose without the angular weight.
pub fn strip_transpose(q: &Sinogram) -> ImageGrid {
    gather(KernelKind::Strip, q)
}

/// Exact area-weighted strip integrals: the fixed forward projector.
pub fn forward_project(x: &ImageGrid, g: &Geometry) -> Result<Sinogram> {
    g.check_image(x)?;
    let n = g.vol_size();
    let n_det = g.n_det();
    let center = (n_det as f64 - 1.0) / 2.0;
    let setups = angle_setups(KernelKind::Strip, g);
    let img = x.values();
    let mut values = vec![0.0; g.n_proj()];
    values
        .par_chunks_mut(n_det)
        .zip(setups.par_iter())
        .for_each(|(row, st)| {
            for i in 0..n {
                let y = pixel_y(n, i);
                let u0 = pixel_x(n, 0) * st.cos + y * st.sin + center;
                with_bins!(st.footprint, |bins| {
                    for j in 0..n {
                        let v = img[i * n + j];
                        if v == 0.0 {
                            continue;
                        }
                        let u = u0 + j as f64 * st.cos;
                        bins.visit(u, n_det, |k, w| row[k] += w * v);
                    }
                })
            }
        });
    Sinogram::from_values(g.clone(), values)
}

// ---------------------------------------------------------------------------
// Fourier gridding

struct FourierGridPlan {
    geometry: Geometry,
    size: usize,
    row_fft: Arc<dyn Fft<f64>>,
    inv_fft: Arc<dyn Fft<f64>>,
    /// `1 / (sinc^2(x / M))` for image columns (identical for rows by symmetry).
    deapod: Vec<f64>,
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

impl FourierGridPlan {
    fn new(g: &Geometry, conventions: ReconConventions) -> Self {
        let size = conventions.grid_pad * g.n_det().next_power_of_two();
        let mut planner = FftPlanner::new();
        let row_fft = planner.plan_fft_forward(size);
        let inv_fft = planner.plan_fft_inverse(size);
        let n = g.vol_size();
        let deapod = (0..n)
            .map(|j| 1.0 / sinc(pixel_x(n, j) / size as f64).powi(2))
            .collect();
        Self {
            geometry: g.clone(),
            size,
            row_fft,
            inv_fft,
            deapod,
        }
    }

    fn signed(&self, idx: usize) -> f64 {
        if idx < self.size / 2 {
            idx as f64
        } else {
            idx as f64 - self.size as f64
        }
    }

    fn reconstruct(&self, q: &Sinogram) -> ImageGrid {
        let m = self.size;
        let n_det = self.geometry.n_det();
        let center = (n_det as f64 - 1.0) / 2.0;
        let weight = PI / self.geometry.n_angles() as f64 / m as f64;
        let half = (m / 2) as isize;

        // grid[v * m + u]: u along x-frequency, v along y-frequency
        let mut grid = vec![Complex64::new(0.0, 0.0); m * m];
        let mut row = vec![Complex64::new(0.0, 0.0); m];
        for (a, &theta) in self.geometry.angles().iter().enumerate() {
            row.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            for (k, &v) in q.row(a).iter().enumerate() {
                row[k] = Complex64::new(v, 0.0);
            }
            self.row_fft.process(&mut row);
            let (sin, cos) = theta.sin_cos();
            for f in (1 - half)..half {
                let idx = f.rem_euclid(m as isize) as usize;
                // shift the origin from detector pixel 0 to t = 0
                let phase = Complex64::from_polar(weight, 2.0 * PI * f as f64 * center / m as f64);
                let val = row[idx] * phase;
                let gx = f as f64 * cos;
                let gy = f as f64 * sin;
                let (x0, y0) = (gx.floor(), gy.floor());
                let (fx, fy) = (gx - x0, gy - y0);
                let ux = (x0 as isize).rem_euclid(m as isize) as usize;
                let vy = (y0 as isize).rem_euclid(m as isize) as usize;
                let ux1 = (ux + 1) % m;
                let vy1 = (vy + 1) % m;
                grid[vy * m + ux] += val * ((1.0 - fx) * (1.0 - fy));
                grid[vy * m + ux1] += val * (fx * (1.0 - fy));
                grid[vy1 * m + ux] += val * ((1.0 - fx) * fy);
                grid[vy1 * m + ux1] += val * (fx * fy);
            }
        }

        // Image pixel (i, j) sits at x = n_j + eps, y = -n_i - eps with
        // n_j = j - n/2 (integer division) and eps in {0, 1/2}.
        let n = self.geometry.vol_size();
        let eps = (n / 2) as f64 - (n as f64 - 1.0) / 2.0;
        if eps != 0.0 {
            for v in 0..m {
                let fv = self.signed(v);
                for u in 0..m {
                    let fu = self.signed(u);
                    let ph = 2.0 * PI * eps * (fu - fv) / m as f64;
                    grid[v * m + u] *= Complex64::from_polar(1.0, ph);
                }
            }
        }
        // sum over x-frequencies with e^{+}, then over y-frequencies with e^{-}
        // because y_i = -(i - n/2) - eps
        for r in grid.chunks_mut(m) {
            self.inv_fft.process(r);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        let mut out = vec![0.0; n * n];
        let nh = (n / 2) as isize;
        for j in 0..n {
            let u = (j as isize - nh).rem_euclid(m as isize) as usize;
            for (v, c) in col.iter_mut().enumerate() {
                *c = grid[v * m + u];
            }
            self.row_fft.process(&mut col);
            for i in 0..n {
                let vi = (i as isize - nh).rem_euclid(m as isize) as usize;
                out[i * n + j] = col[vi].re * self.deapod[j] * self.deapod[i];
            }
        }
        ImageGrid::from_values(n, out).expect("finite gridding reconstruction")
    }
}

// ---------------------------------------------------------------------------
// SIRT

/// Strip projector stored as compressed rows, for repeated products.
struct SparseStrip {
    n_rows: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f32>,
}

impl SparseStrip {
    fn build(g: &Geometry) -> Self {
        let n = g.vol_size();
        let n_det = g.n_det();
        let center = (n_det as f64 - 1.0) / 2.0;
        let setups = angle_setups(KernelKind::Strip, g);
        let per_angle: Vec<Vec<Vec<(u32, f32)>>> = setups
            .par_iter()
            .map(|st| {
                let mut rows = vec![Vec::new(); n_det];
                for i in 0..n {
                    let y = pixel_y(n, i);
                    let u0 = pixel_x(n, 0) * st.cos + y * st.sin + center;
                    for j in 0..n {
                        let u = u0 + j as f64 * st.cos;
                        with_bins!(st.footprint, |bins| {
                            bins.visit(u, n_det, |k, w| {
                                rows[k].push(((i * n + j) as u32, w as f32))
                            })
                        });
                    }
                }
                rows
            })
            .collect();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for rows in per_angle {
            for r in rows {
                for (c, v) in r {
                    cols.push(c);
                    vals.push(v);
                }
                row_ptr.push(cols.len());
            }
        }
        Self {
            n_rows: g.n_proj(),
            row_ptr,
            cols,
            vals,
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.par_iter_mut().enumerate().for_each(|(r, o)| {
            let mut acc = 0.0;
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[idx] as f64 * x[self.cols[idx] as usize];
            }
            *o = acc;
        });
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.n_rows {
            let yr = y[r];
            if yr == 0.0 {
                continue;
            }
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[self.cols[idx] as usize] += self.vals[idx] as f64 * yr;
            }
        }
    }
}

/// Simultaneous iterative reconstruction with the strip projector, from `x = 0`.
pub fn sirt(p: &Sinogram, g: &Geometry, iterations: usize) -> Result<ImageGrid> {
    sirt_monitored(p, g, iterations, |_, _| {})
}

/// [`sirt`] reporting `(iteration, ||p - W x_k||_2)` before each update.
pub fn sirt_monitored(
    p: &Sinogram,
    g: &Geometry,
    iterations: usize,
    mut monitor: impl FnMut(usize, f64),
) -> Result<ImageGrid> {
    g.check_sinogram(p)?;
    if iterations == 0 {
        return Err(Error::invalid("SIRT needs at least one iteration"));
    }
    let w = SparseStrip::build(g);
    let n_pix = g.vol_size() * g.vol_size();
    let inv = |v: f64| if v > 0.0 { 1.0 / v } else { 0.0 };

    let mut row_sums = vec![0.0; g.n_proj()];
    w.apply(&vec![1.0; n_pix], &mut row_sums);
    let row_w: Vec<f64> = row_sums.into_iter().map(inv).collect();
    let mut col_sums = vec![0.0; n_pix];
    w.apply_transpose(&vec![1.0; g.n_proj()], &mut col_sums);
    let col_w: Vec<f64> = col_sums.into_iter().map(inv).collect();

    let data = p.values();
    let mut x = vec![0.0; n_pix];
    let mut proj = vec![0.0; g.n_proj()];
    let mut back = vec![0.0; n_pix];
    for it in 0..iterations {
        w.apply(&x, &mut proj);
        let mut norm2 = 0.0;
        for ((r, &d), &rw) in proj.iter_mut().zip(data).zip(&row_w) {
            let res = d - *r;
            norm2 += res * res;
            *r = res * rw;
        }
        monitor(it, norm2.sqrt());
        w.apply_transpose(&proj, &mut back);
        for ((xv, &b), &cw) in x.iter_mut().zip(&back).zip(&col_w) {
            *xv += cw * b;
        }
    }
    ImageGrid::from_values(g.vol_size(), x)
}
