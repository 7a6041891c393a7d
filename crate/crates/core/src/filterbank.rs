//! Detector-space filters, Fourier-domain filtering, the exponential-binning
//! basis and minimum-residual filter computation.
//!
//! Every filter is even-symmetric in real space, so its spectrum is real and a
//! half-spectrum of length `pad / 2 + 1` describes it completely. Rows are
//! zero-padded to `pad = 2 * next_pow2(n_det)` before filtering; with that
//! padding only kernel offsets `0..n_det` can influence the cropped output.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{atomic_write, fmt_f64, parse_f64, ImageGrid, Sinogram};
use crate::reconstructors::{fbp, forward_project, Implementation};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Padded row length used by [`apply_filter`].
pub fn padded_len(n_det: usize) -> usize {
    2 * n_det.next_power_of_two()
}

/// Default number of unit-width bins: `n_det / 16`, at least 2.
pub fn default_n_l(n_det: usize) -> usize {
    (n_det / 16).max(2).min((n_det / 2).max(1))
}

/// How a filter's coefficients map to its real-space kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BasisDescriptor {
    /// One coefficient per exponential bin.
    #[serde(rename = "expbin")]
    ExpBin { n_l: usize },
    /// Kernel value at each offset `0..n_det`.
    Dense,
    /// The half-spectrum itself (`pad / 2 + 1` values).
    Spectral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub implementation: String,
    pub n_angles: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// An even-symmetric detector filter.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterSpec {
    n_det: usize,
    basis: BasisDescriptor,
    coeffs: Vec<f64>,
    zero_dc_applied: bool,
    fourier: Vec<f64>,
    pub provenance: Option<Provenance>,
}

impl FilterSpec {
    pub fn new(n_det: usize, basis: BasisDescriptor, coeffs: Vec<f64>) -> Result<Self> {
        if n_det == 0 {
            return Err(Error::invalid("filter needs at least one detector pixel"));
        }
        let expected = match basis {
            BasisDescriptor::ExpBin { n_l } => expbin_basis(n_det, n_l)?.len(),
            BasisDescriptor::Dense => n_det,
            BasisDescriptor::Spectral => padded_len(n_det) / 2 + 1,
        };
        if coeffs.len() != expected {
            return Err(Error::invalid(format!(
                "{basis:?} filter for {n_det} pixels needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("filter coefficients must be finite"));
        }
        let mut spec = Self {
            n_det,
            basis,
            coeffs,
            zero_dc_applied: false,
            fourier: Vec::new(),
            provenance: None,
        };
        spec.fourier = spec.compute_fourier();
        Ok(spec)
    }

    /// The all-pass filter.
    pub fn identity(n_det: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; n_det];
        if let Some(c) = coeffs.first_mut() {
            *c = 1.0;
        }
        Self::new(n_det, BasisDescriptor::Dense, coeffs)
    }

    pub fn zeros(n_det: usize) -> Result<Self> {
        Self::new(n_det, BasisDescriptor::Dense, vec![0.0; n_det])
    }

    pub fn with_zero_dc(mut self, zero_dc: bool) -> Self {
        self.zero_dc_applied = zero_dc;
        self
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn n_det(&self) -> usize {
        self.n_det
    }

    pub fn basis(&self) -> BasisDescriptor {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn zero_dc_applied(&self) -> bool {
        self.zero_dc_applied
    }

    pub fn pad(&self) -> usize {
        padded_len(self.n_det)
    }

    /// Real half-spectrum at frequencies `k / pad`, `k = 0..=pad/2`.
    pub fn fourier(&self) -> &[f64] {
        &self.fourier
    }

    /// Real-space kernel at offsets `0..n_det` (offsets beyond cannot affect output).
    pub fn kernel(&self) -> Vec<f64> {
        match self.basis {
            BasisDescriptor::Dense => self.coeffs.clone(),
            BasisDescriptor::ExpBin { n_l } => {
                let basis = expbin_basis(self.n_det, n_l).expect("validated at construction");
                let mut k = vec![0.0; self.n_det];
                for (bin, &c) in basis.bins().iter().zip(&self.coeffs) {
                    for d in bin.start..bin.start + bin.width {
                        if d < self.n_det {
                            k[d] = c;
                        }
                    }
                }
                k
            }
            BasisDescriptor::Spectral => {
                let pad = self.pad();
                (0..self.n_det)
                    .map(|d| {
                        let mut acc = 0.0;
                        for (k, &h) in self.coeffs.iter().enumerate() {
                            let w = if k == 0 || k == pad / 2 { 1.0 } else { 2.0 };
                            acc += w * h * (2.0 * PI * (k * d) as f64 / pad as f64).cos();
                        }
                        acc / pad as f64
                    })
                    .collect()
            }
        }
    }

    fn compute_fourier(&self) -> Vec<f64> {
        if self.basis == BasisDescriptor::Spectral {
            return self.coeffs.clone();
        }
        let pad = self.pad();
        let kernel = self.kernel();
        (0..=pad / 2)
            .map(|k| {
                let mut acc = kernel[0];
                for (d, &g) in kernel.iter().enumerate().skip(1) {
                    if g != 0.0 {
                        let phase = 2.0 * PI * ((k * d) % pad) as f64 / pad as f64;
                        acc += 2.0 * g * phase.cos();
                    }
                }
                acc
            })
            .collect()
    }

    /// Linear combination `sum_j alpha_j h_j` of filters sharing a basis.
    pub fn combine(terms: &[(f64, &FilterSpec)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::invalid("empty filter combination"))?;
        let mut coeffs = vec![0.0; first.coeffs.len()];
        for (alpha, h) in terms {
            if h.basis != first.basis || h.n_det != first.n_det {
                return Err(Error::invalid("combined filters must share basis and size"));
            }
            for (c, &v) in coeffs.iter_mut().zip(&h.coeffs) {
                *c += alpha * v;
            }
        }
        Ok(Self::new(first.n_det, first.basis, coeffs)?.with_zero_dc(first.zero_dc_applied))
    }
}

/// Frequencies `k / pad`, `k = 0..=pad/2`, in cycles per detector pixel.
pub fn half_spectrum_freqs(n_det: usize) -> Vec<f64> {
    let pad = padded_len(n_det);
    (0..=pad / 2).map(|k| k as f64 / pad as f64).collect()
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// `"ram-lak"` (|w|) or `"shepp-logan"` (|w| sinc(w / (2 w_N))), given as spectra.
pub fn standard_filter(name: &str, n_det: usize) -> Result<FilterSpec> {
    if n_det < 2 {
        return Err(Error::invalid("standard filters need n_det >= 2"));
    }
    let nyquist = 0.5;
    let freqs = half_spectrum_freqs(n_det);
    let spectrum: Vec<f64> = match name {
        "ram-lak" => freqs.iter().map(|w| w.abs()).collect(),
        "shepp-logan" => freqs
            .iter()
            .map(|w| w.abs() * sinc(w / (2.0 * nyquist)))
            .collect(),
        other => return Err(Error::invalid(format!("unknown standard filter `{other}`"))),
    };
    FilterSpec::new(n_det, BasisDescriptor::Spectral, spectrum)
}

/// Band-limited ramp sampled in real space: `1/4` at 0, `-1/(pi d)^2` at odd `d`.
pub fn ramlak_real_space(n_det: usize) -> Result<FilterSpec> {
    let kernel = (0..n_det)
        .map(|d| {
            if d == 0 {
                0.25
            } else if d % 2 == 1 {
                -1.0 / (PI * PI * (d * d) as f64)
            } else {
                0.0
            }
        })
        .collect();
    FilterSpec::new(n_det, BasisDescriptor::Dense, kernel)
}

/// Zero-pad, multiply by the half-spectrum, transform back and crop, per row.
pub fn apply_filter(p: &Sinogram, h: &FilterSpec) -> Result<Sinogram> {
    if h.n_det() != p.n_det() {
        return Err(Error::invalid(format!(
            "filter length {} does not match detector width {}",
            h.n_det(),
            p.n_det()
        )));
    }
    let n_det = p.n_det();
    let pad = h.pad();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(pad);
    let inv = planner.plan_fft_inverse(pad);
    let mut spectrum = h.fourier().to_vec();
    if h.zero_dc_applied() {
        spectrum[0] = 0.0;
    }
    let mut out = vec![0.0; p.values().len()];
    out.par_chunks_mut(n_det)
        .zip(p.values().par_chunks(n_det))
        .for_each(|(dst, src)| {
            let mut buf = vec![Complex64::new(0.0, 0.0); pad];
            for (b, &v) in buf.iter_mut().zip(src) {
                b.re = v;
            }
            fwd.process(&mut buf);
            for (k, b) in buf.iter_mut().enumerate() {
                *b *= spectrum[k.min(pad - k)];
            }
            inv.process(&mut buf);
            for (d, b) in dst.iter_mut().zip(&buf) {
                *d = b.re / pad as f64;
            }
        });
    Sinogram::from_values(p.geometry().clone(), out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bin {
    pub start: usize,
    pub width: usize,
}

/// Exponentially widening bins over kernel offsets `0..=n_det/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSet {
    n_det: usize,
    n_l: usize,
    bins: Vec<Bin>,
}

impl BasisSet {
    pub fn n_det(&self) -> usize {
        self.n_det
    }

    pub fn n_l(&self) -> usize {
        self.n_l
    }

    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Symmetric indicator of bin `j` as a filter.
    pub fn basis_filter(&self, j: usize) -> FilterSpec {
        let mut coeffs = vec![0.0; self.len()];
        coeffs[j] = 1.0;
        self.filter(coeffs).expect("basis filter shape")
    }

    pub fn filter(&self, coeffs: Vec<f64>) -> Result<FilterSpec> {
        FilterSpec::new(self.n_det, BasisDescriptor::ExpBin { n_l: self.n_l }, coeffs)
    }
}

/// Bin widths 1 for the first `n_l + 1` bins, then doubling; the last bin is
/// truncated at offset `n_det / 2`.
pub fn expbin_basis(n_det: usize, n_l: usize) -> Result<BasisSet> {
    if n_l == 0 || n_l > n_det / 2 {
        return Err(Error::invalid(format!(
            "n_l = {n_l} outside [1, {}] for {n_det} detector pixels",
            n_det / 2
        )));
    }
    let last = n_det / 2;
    let mut bins = Vec::new();
    let mut start = 0;
    let mut i = 0usize;
    while start <= last {
        let w = if i < n_l { 1 } else { 1usize << (i - n_l).min(62) };
        let width = w.min(last - start + 1);
        bins.push(Bin { start, width });
        start += width;
        i += 1;
    }
    Ok(BasisSet { n_det, n_l, bins })
}

/// The least-squares system of a filter computation: `F c ~ target`.
#[derive(Clone, Debug)]
pub struct FilterSystem {
    pub matrix: DMatrix<f64>,
    pub target: DVector<f64>,
}

impl FilterSystem {
    pub fn residual_norm(&self, coeffs: &[f64]) -> f64 {
        let c = DVector::from_column_slice(coeffs);
        (&self.target - &self.matrix * c).norm()
    }
}

fn basis_for(rec: &dyn Implementation, basis: &BasisSet, j: usize) -> FilterSpec {
    basis.basis_filter(j).with_zero_dc(rec.zero_dc())
}

fn assemble(columns: Vec<Result<Vec<f64>>>, target: Vec<f64>) -> Result<FilterSystem> {
    let columns = columns.into_iter().collect::<Result<Vec<_>>>()?;
    for (j, col) in columns.iter().enumerate() {
        if let Some(i) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "column {j} of the filter system has a non-finite entry at row {i}"
            )));
        }
    }
    let rows = target.len();
    let matrix = DMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i]);
    Ok(FilterSystem {
        matrix,
        target: DVector::from_vec(target),
    })
}

fn check_basis(p: &Sinogram, rec: &dyn Implementation, basis: &BasisSet) -> Result<()> {
    rec.geometry().check_sinogram(p)?;
    if basis.n_det() != p.n_det() {
        return Err(Error::invalid(format!(
            "basis built for {} detector pixels, data has {}",
            basis.n_det(),
            p.n_det()
        )));
    }
    Ok(())
}

/// Columns `f_j = flatten(W r_I(b_j, p))` and target `p`.
pub fn projection_system(
    p: &Sinogram,
    rec: &dyn Implementation,
    basis: &BasisSet,
) -> Result<FilterSystem> {
    check_basis(p, rec, basis)?;
    let g = rec.geometry();
    let columns: Vec<Result<Vec<f64>>> = (0..basis.len())
        .into_par_iter()
        .map(|j| {
            let r = fbp(rec, p, &basis_for(rec, basis, j))?;
            Ok(forward_project(&r, g)?.into_values())
        })
        .collect();
    assemble(columns, p.values().to_vec())
}

/// Columns `flatten(r_I(b_j, p))` and target `r_ref`.
pub fn reference_system(
    p: &Sinogram,
    rec: &dyn Implementation,
    r_ref: &ImageGrid,
    basis: &BasisSet,
) -> Result<FilterSystem> {
    check_basis(p, rec, basis)?;
    rec.geometry().check_image(r_ref)?;
    let columns: Vec<Result<Vec<f64>>> = (0..basis.len())
        .into_par_iter()
        .map(|j| Ok(fbp(rec, p, &basis_for(rec, basis, j))?.into_values()))
        .collect();
    assemble(columns, r_ref.values().to_vec())
}

/// Minimum-norm solution of `min ||target - F c||^2 + ridge ||c||^2`.
///
/// `F` is reduced by Householder QR and the small triangular factor is solved
/// through its SVD, discarding singular values below [`RANK_TOLERANCE`]
/// times the largest.
pub fn solve_least_squares(system: &FilterSystem, ridge: f64) -> Result<Vec<f64>> {
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::invalid("ridge weight must be a non-negative number"));
    }
    let n = system.matrix.ncols();
    let (a, b) = if ridge > 0.0 {
        let m = system.matrix.nrows();
        let mut a = DMatrix::zeros(m + n, n);
        a.rows_mut(0, m).copy_from(&system.matrix);
        for j in 0..n {
            a[(m + j, j)] = ridge.sqrt();
        }
        let mut b = DVector::zeros(m + n);
        b.rows_mut(0, m).copy_from(&system.target);
        (a, b)
    } else {
        (system.matrix.clone(), system.target.clone())
    };
    if a.nrows() < n {
        let svd = a.svd(true, true);
        return pinv_solve(svd, &b, n);
    }
    let qr = a.qr();
    let mut qtb = b;
    qr.q_tr_mul(&mut qtb);
    let rhs = qtb.rows(0, n).into_owned();
    let r = qr.r();
    pinv_solve(r.svd(true, true), &rhs, n)
}

fn pinv_solve(svd: nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>, b: &DVector<f64>, n: usize) -> Result<Vec<f64>> {
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if !smax.is_finite() {
        return Err(Error::Numerical("non-finite singular value".into()));
    }
    if smax == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let x = svd
        .solve(b, RANK_TOLERANCE * smax)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(x.iter().copied().collect())
}

fn provenance_of(rec: &dyn Implementation) -> Provenance {
    Provenance {
        implementation: rec.label(),
        n_angles: rec.geometry().n_angles(),
        seed: None,
    }
}

/// Minimum-residual filter for `rec` on data `p` within the span of `basis`.
pub fn compute_adapted_filter(
    p: &Sinogram,
    rec: &dyn Implementation,
    basis: &BasisSet,
    ridge: f64,
) -> Result<FilterSpec> {
    let system = projection_system(p, rec, basis)?;
    let coeffs = solve_least_squares(&system, ridge)?;
    Ok(basis
        .filter(coeffs)?
        .with_zero_dc(rec.zero_dc())
        .with_provenance(provenance_of(rec)))
}

/// Filter bringing `rec`'s reconstruction of `p` closest to `r_ref`.
pub fn compute_reference_filter(
    p: &Sinogram,
    rec: &dyn Implementation,
    r_ref: &ImageGrid,
    basis: &BasisSet,
) -> Result<FilterSpec> {
    let system = reference_system(p, rec, r_ref, basis)?;
    let coeffs = solve_least_squares(&system, 0.0)?;
    Ok(basis
        .filter(coeffs)?
        .with_zero_dc(rec.zero_dc())
        .with_provenance(provenance_of(rec)))
}

/// `||p - W r_I(h, p)||_2`.
pub fn projection_residual(p: &Sinogram, rec: &dyn Implementation, h: &FilterSpec) -> Result<f64> {
    let r = fbp(rec, p, h)?;
    let fp = forward_project(&r, rec.geometry())?;
    Ok(p.values()
        .iter()
        .zip(fp.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

// ---------------------------------------------------------------------------
// file format

#[derive(Serialize, Deserialize)]
struct FilterFile {
    n_det: usize,
    basis: BasisDescriptor,
    coeffs: Vec<String>,
    zero_dc: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

pub fn write_filter(path: &Path, h: &FilterSpec) -> Result<()> {
    let file = FilterFile {
        n_det: h.n_det,
        basis: h.basis,
        coeffs: h.coeffs.iter().map(|&c| fmt_f64(c)).collect(),
        zero_dc: h.zero_dc_applied,
        provenance: h.provenance.clone(),
    };
    let bytes = serde_json::to_vec_pretty(&file).map_err(|e| Error::format(path, e.to_string()))?;
    atomic_write(path, &bytes)
}

pub fn read_filter(path: &Path) -> Result<FilterSpec> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let file: FilterFile =
        serde_json::from_slice(&bytes).map_err(|e| Error::format(path, e.to_string()))?;
    let coeffs = file
        .coeffs
        .iter()
        .map(|s| parse_f64(path, s))
        .collect::<Result<Vec<_>>>()?;
    let mut h = FilterSpec::new(file.n_det, file.basis, coeffs)
        .map_err(|e| Error::format(path, e.to_string()))?
        .with_zero_dc(file.zero_dc);
    h.provenance = file.provenance;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Geometry;

    #[test]
    fn ramlak_dc_is_zero() {
        let h = standard_filter("ram-lak", 64).unwrap();
        assert_eq!(h.fourier()[0], 0.0);
        assert_eq!(h.fourier().len(), 65);
    }

    #[test]
    fn shepp_logan_ratio_at_nyquist() {
        let rl = standard_filter("ram-lak", 64).unwrap();
        let sl = standard_filter("shepp-logan", 64).unwrap();
        let last = rl.fourier().len() - 1;
        let ratio = sl.fourier()[last] / rl.fourier()[last];
        assert!((ratio - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn unknown_standard_filter() {
        assert!(standard_filter("hann", 64).is_err());
        assert!(standard_filter("ram-lak", 1).is_err());
    }

    #[test]
    fn small_expbin_enumeration() {
        let b = expbin_basis(8, 4).unwrap();
        let starts: Vec<_> = b.bins().iter().map(|b| (b.start, b.width)).collect();
        assert_eq!(starts, vec![(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)]);
        assert!(expbin_basis(8, 5).is_err());
        assert!(expbin_basis(8, 0).is_err());
    }

    #[test]
    fn expbin_widths_for_256() {
        let b = expbin_basis(256, 16).unwrap();
        let widths: Vec<_> = b.bins().iter().map(|b| b.width).collect();
        let mut want = vec![1; 17];
        want.extend([2, 4, 8, 16, 32, 50]);
        assert_eq!(widths, want);
        assert_eq!(b.len(), 23);
    }

    #[test]
    fn dense_identity_spectrum_is_flat() {
        let h = FilterSpec::identity(10).unwrap();
        assert!(h.fourier().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn combine_is_linear_in_coeffs() {
        let b = expbin_basis(16, 2).unwrap();
        let h1 = b.basis_filter(0);
        let h2 = b.basis_filter(3);
        let c = FilterSpec::combine(&[(2.0, &h1), (-0.5, &h2)]).unwrap();
        assert_eq!(c.coeffs()[0], 2.0);
        assert_eq!(c.coeffs()[3], -0.5);
        for k in 0..c.fourier().len() {
            let want = 2.0 * h1.fourier()[k] - 0.5 * h2.fourier()[k];
            assert!((c.fourier()[k] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_kernel_matches_spectrum() {
        // a Spectral filter built from a Dense one's spectrum has the same kernel
        let dense = FilterSpec::new(8, BasisDescriptor::Dense, vec![0.3, -0.1, 0.05, 0.0, 0.02, 0.0, 0.0, 0.01]).unwrap();
        let spectral = FilterSpec::new(8, BasisDescriptor::Spectral, dense.fourier().to_vec()).unwrap();
        for (a, b) in dense.kernel().iter().zip(spectral.kernel()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let g = Geometry::new(2, 8, 8).unwrap();
        let p = Sinogram::zeros(g);
        assert!(apply_filter(&p, &FilterSpec::identity(9).unwrap()).is_err());
    }

    #[test]
    fn ridge_must_be_nonnegative() {
        let system = FilterSystem {
            matrix: DMatrix::identity(3, 2),
            target: DVector::from_vec(vec![1.0, 2.0, 3.0]),
        };
        assert!(solve_least_squares(&system, -1.0).is_err());
        let c = solve_least_squares(&system, 0.0).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-14 && (c[1] - 2.0).abs() < 1e-14);
        // ridge shrinks towards zero: c = b / (1 + ridge)
        let c = solve_least_squares(&system, 1.0).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-14 && (c[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_gives_minimum_norm() {
        // two identical columns: minimum-norm splits the weight evenly
        let system = FilterSystem {
            matrix: DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0]),
            target: DVector::from_vec(vec![2.0, 2.0, 0.0]),
        };
        let c = solve_least_squares(&system, 0.0).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12);
    }
}
