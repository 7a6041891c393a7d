//! Foam phantoms with closed-form sinograms, ground-truth rasters and data
//! corruption models.
//!
//! Phantom coordinates are normalized: a length of 1.0 equals half the width
//! of the reconstruction grid. Rendering into a [`Geometry`] or raster maps
//! them to pixels with the factor `vol_size / 2`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Geometry, ImageGrid, Sinogram};

/// Maximum number of rejected placements before [`generate_foam`] gives up.
pub const PACKING_ATTEMPT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FoamSpec {
    pub n_spheres: usize,
    pub cylinder_radius: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub z_extent: f64,
    pub seed: u64,
}

impl Default for FoamSpec {
    fn default() -> Self {
        Self {
            n_spheres: 1000,
            cylinder_radius: 0.95,
            r_min: 0.005,
            r_max: 0.08,
            z_extent: 0.5,
            seed: 0,
        }
    }
}

impl FoamSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.cylinder_radius > 0.0 && self.cylinder_radius <= 1.0) {
            return Err(Error::invalid("cylinder_radius must lie in (0, 1]"));
        }
        if !(self.r_min > 0.0 && self.r_min <= self.r_max && self.r_max < self.cylinder_radius) {
            return Err(Error::invalid(
                "sphere radii must satisfy 0 < r_min <= r_max < cylinder_radius",
            ));
        }
        if !(self.z_extent > self.r_max) {
            return Err(Error::invalid("z_extent must exceed r_max"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
    pub r: f64,
}

/// A unit-density cylinder with spherical voids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoamPhantom {
    pub spec: FoamSpec,
    pub spheres: Vec<Sphere>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

/// Attenuation `f(x, y)`: 1 on a centered disc, 0 inside the holes and outside.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice2D {
    pub disc_radius: f64,
    pub holes: Vec<Circle>,
}

impl Slice2D {
    pub fn disc(radius: f64) -> Self {
        Self {
            disc_radius: radius,
            holes: Vec::new(),
        }
    }

    /// Whether `(x, y)` (normalized units) is inside the material.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        if x * x + y * y >= self.disc_radius * self.disc_radius {
            return false;
        }
        !self
            .holes
            .iter()
            .any(|h| (x - h.cx).powi(2) + (y - h.cy).powi(2) < h.r * h.r)
    }
}

/// Place `spec.n_spheres` non-overlapping spheres by seeded rejection sampling.
pub fn generate_foam(spec: &FoamSpec) -> Result<FoamPhantom> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut spheres: Vec<Sphere> = Vec::with_capacity(spec.n_spheres);
    let mut attempts = 0u64;
    while spheres.len() < spec.n_spheres {
        let r = if spec.r_max > spec.r_min {
            rng.random_range(spec.r_min..spec.r_max)
        } else {
            spec.r_min
        };
        loop {
            if attempts >= PACKING_ATTEMPT_BUDGET {
                return Err(Error::Packing {
                    attempts,
                    placed: spheres.len(),
                    requested: spec.n_spheres,
                });
            }
            attempts += 1;
            let rho = (spec.cylinder_radius - r) * rng.random::<f64>().sqrt();
            let phi = rng.random::<f64>() * std::f64::consts::TAU;
            let zmax = spec.z_extent - r;
            let cand = Sphere {
                cx: rho * phi.cos(),
                cy: rho * phi.sin(),
                cz: rng.random_range(-zmax..zmax),
                r,
            };
            if cand.cx.hypot(cand.cy) + r >= spec.cylinder_radius {
                continue;
            }
            let clear = spheres.iter().all(|s| {
                let d2 = (s.cx - cand.cx).powi(2) + (s.cy - cand.cy).powi(2) + (s.cz - cand.cz).powi(2);
                d2 >= (s.r + r).powi(2)
            });
            if clear {
                spheres.push(cand);
                break;
            }
        }
    }
    Ok(FoamPhantom {
        spec: spec.clone(),
        spheres,
    })
}

/// Cut the foam at height `z`.
pub fn slice_phantom(foam: &FoamPhantom, z: f64) -> Result<Slice2D> {
    if !(z.abs() < foam.spec.z_extent) {
        return Err(Error::OutOfRange(format!(
            "slice z = {z} outside (-{0}, {0})",
            foam.spec.z_extent
        )));
    }
    let holes = foam
        .spheres
        .iter()
        .filter(|s| (z - s.cz).abs() < s.r)
        .map(|s| Circle {
            cx: s.cx,
            cy: s.cy,
            r: (s.r * s.r - (z - s.cz).powi(2)).sqrt(),
        })
        .collect();
    Ok(Slice2D {
        disc_radius: foam.spec.cylinder_radius,
        holes,
    })
}

#[inline]
fn chord(d: f64, r: f64) -> f64 {
    let h = r * r - d * d;
    if h > 0.0 {
        2.0 * h.sqrt()
    } else {
        0.0
    }
}

/// Exact line integrals of the slice, averaged over `supersampling` sub-rays
/// per detector pixel.
pub fn analytic_sinogram(slice: &Slice2D, g: &Geometry, supersampling: usize) -> Result<Sinogram> {
    if supersampling == 0 {
        return Err(Error::invalid("supersampling must be at least 1"));
    }
    let scale = g.vol_size() as f64 / 2.0;
    let n_det = g.n_det();
    let ss = supersampling;
    let n_sub = n_det * ss;
    // sub-ray u sits at t = sub_t0 + u / ss
    let sub_t0 = g.det_coord(0) + 0.5 / ss as f64 - 0.5;
    let disc_r = slice.disc_radius * scale;
    let holes: Vec<Circle> = slice
        .holes
        .iter()
        .map(|h| Circle {
            cx: h.cx * scale,
            cy: h.cy * scale,
            r: h.r * scale,
        })
        .collect();

    let mut values = Vec::with_capacity(g.n_proj());
    let mut sub = vec![0.0f64; n_sub];
    for &theta in g.angles() {
        let (sin, cos) = theta.sin_cos();
        for (u, v) in sub.iter_mut().enumerate() {
            *v = chord(sub_t0 + u as f64 / ss as f64, disc_r);
        }
        for h in &holes {
            let center = h.cx * cos + h.cy * sin;
            let lo = (((center - h.r - sub_t0) * ss as f64).floor().max(0.0)) as usize;
            let hi = (((center + h.r - sub_t0) * ss as f64).ceil() as isize).min(n_sub as isize - 1);
            if hi < 0 {
                continue;
            }
            for u in lo..=hi as usize {
                let t = sub_t0 + u as f64 / ss as f64;
                sub[u] -= chord(t - center, h.r);
            }
        }
        for k in 0..n_det {
            let s: f64 = sub[k * ss..(k + 1) * ss].iter().sum();
            values.push(s / ss as f64);
        }
    }
    Sinogram::from_values(g.clone(), values)
}

/// Area fraction of material per pixel, by `subpixel x subpixel` midpoint sampling.
pub fn rasterize_slice(slice: &Slice2D, n: usize, subpixel: usize) -> Result<ImageGrid> {
    if n == 0 || subpixel == 0 {
        return Err(Error::invalid("raster size and subpixel factor must be >= 1"));
    }
    let scale = n as f64 / 2.0;
    let m = n * subpixel;
    let step = 1.0 / subpixel as f64;
    // x of sample column c (pixel units, origin at grid center)
    let sample_x = |c: usize| -(n as f64) / 2.0 + (c as f64 + 0.5) * step;
    let mut acc = vec![0u32; n * n];
    let mut line = vec![false; m];
    let disc_r = slice.disc_radius * scale;
    for row in 0..m {
        let y = n as f64 / 2.0 - (row as f64 + 0.5) * step;
        fill_span(&mut line, y, 0.0, 0.0, disc_r, true, &sample_x, step, n);
        for h in &slice.holes {
            fill_span(&mut line, y, h.cx * scale, h.cy * scale, h.r * scale, false, &sample_x, step, n);
        }
        let i = row / subpixel;
        for (c, &inside) in line.iter().enumerate() {
            if inside {
                acc[i * n + c / subpixel] += 1;
            }
        }
    }
    let denom = (subpixel * subpixel) as f64;
    ImageGrid::from_values(n, acc.into_iter().map(|c| c as f64 / denom).collect())
}

/// Set samples of one raster line lying strictly inside a circle. With
/// `reset`, the whole line is first cleared and the circle interior is set.
#[allow(clippy::too_many_arguments)]
fn fill_span(
    line: &mut [bool],
    y: f64,
    cx: f64,
    cy: f64,
    r: f64,
    reset: bool,
    sample_x: &impl Fn(usize) -> f64,
    step: f64,
    n: usize,
) {
    if reset {
        line.iter_mut().for_each(|v| *v = false);
    }
    let dy = y - cy;
    let h2 = r * r - dy * dy;
    if h2 <= 0.0 {
        return;
    }
    let half = h2.sqrt();
    let first = ((cx - half + n as f64 / 2.0) / step - 0.5).floor().max(0.0) as usize;
    let last = (((cx + half + n as f64 / 2.0) / step - 0.5).ceil() as usize).min(line.len() - 1);
    for c in first..=last {
        let dx = sample_x(c) - cx;
        if dx * dx + dy * dy < r * r {
            line[c] = reset;
        }
    }
}

/// An all-zero `n x n` image with a single unit pixel at the center.
pub fn single_pixel_phantom(n: usize) -> Result<ImageGrid> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::invalid(format!("single-pixel phantom needs odd n, got {n}")));
    }
    let mut img = ImageGrid::zeros(n);
    img.set(n / 2, n / 2, 1.0);
    Ok(img)
}

/// Per-pixel random stream keyed by `(seed, row, col)`.
///
/// ChaCha8 with the pixel position as its 64-bit stream id, so each sample is
/// independent of visiting order and thread count.
fn pixel_rng(base: &ChaCha8Rng, row: usize, col: usize) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(((row as u64) << 32) | col as u64);
    rng.set_word_pos(0);
    rng
}

/// Photon-counting noise: `k ~ Poisson(I0 * exp(-p))`, output `-ln(max(k, 1) / I0)`.
pub fn add_poisson_noise(p: &Sinogram, flux: f64, seed: u64) -> Result<Sinogram> {
    if !(flux > 0.0 && flux.is_finite()) {
        return Err(Error::invalid("photon flux must be positive"));
    }
    if let Some(i) = p.values().iter().position(|&v| v < 0.0) {
        return Err(Error::invalid(format!("negative sinogram value at {i}")));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let n_det = p.n_det();
    let mut out = Vec::with_capacity(p.values().len());
    for (idx, &v) in p.values().iter().enumerate() {
        let lambda = flux * (-v).exp();
        let k = if lambda > 0.0 {
            let mut rng = pixel_rng(&base, idx / n_det, idx % n_det);
            Poisson::new(lambda)
                .map_err(|e| Error::Numerical(format!("poisson rate {lambda}: {e}")))?
                .sample(&mut rng)
        } else {
            0.0
        };
        out.push(-(k.max(1.0) / flux).ln());
    }
    Sinogram::from_values(p.geometry().clone(), out)
}

/// [`add_poisson_noise`] applied to `p / max(p)` and scaled back, so the most
/// attenuating ray transmits `1/e` of the flux whatever the sinogram units.
pub fn add_normalized_poisson_noise(p: &Sinogram, flux: f64, seed: u64) -> Result<Sinogram> {
    let scale = p.max();
    if !(scale > 0.0) {
        return add_poisson_noise(p, flux, seed);
    }
    let unit = Sinogram::from_values(p.geometry().clone(), p.values().iter().map(|v| v / scale).collect())?;
    let noisy = add_poisson_noise(&unit, flux, seed)?;
    Sinogram::from_values(p.geometry().clone(), noisy.values().iter().map(|v| v * scale).collect())
}

/// Set `floor(fraction * N_p)` distinct random pixels to `amplitude_factor * max(p)`.
pub fn add_zingers(p: &Sinogram, fraction: f64, amplitude_factor: f64, seed: u64) -> Result<Sinogram> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::invalid(format!("zinger fraction {fraction} outside [0, 1]")));
    }
    if !(amplitude_factor > 1.0) {
        return Err(Error::invalid("zinger amplitude factor must exceed 1"));
    }
    let n_p = p.values().len();
    let count = (fraction * n_p as f64).floor() as usize;
    let level = amplitude_factor * p.max();
    let mut out = p.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in index::sample(&mut rng, n_p, count) {
        out.values_mut()[i] = level;
    }
    Ok(out)
}
