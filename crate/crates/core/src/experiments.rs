//! Config-driven experiment runs: simulation, per-family comparison, filter
//! transfer across slices and the zinger study, plus their file outputs.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::filterbank::{
    compute_adapted_filter, compute_reference_filter, default_n_l, expbin_basis,
    projection_residual, standard_filter, write_filter, BasisSet, FilterSpec, Provenance,
};
use crate::metrics::{
    f1_jaccard, histogram_range, mean_std, otsu_threshold, pixelwise_std, rmse, segment,
    squared_bias, Histogram, ReconSet,
};
use crate::phantoms::{
    add_normalized_poisson_noise, add_zingers, analytic_sinogram, generate_foam, rasterize_slice,
    single_pixel_phantom, slice_phantom, FoamSpec,
};
use crate::raster::{atomic_write, raster_paths, write_pgm16, write_raster_with_preview};
use crate::raster::{Geometry, ImageGrid, Raster, Sinogram};
use crate::reconstructors::{fbp, forward_project, sirt, Implementation, KernelKind, Reconstructor};

pub const DEFAULT_SUPERSAMPLING: usize = 4;
pub const GROUND_TRUTH_SUBPIXEL: usize = 8;
pub const HISTOGRAM_BINS: usize = 64;
pub const DEFAULT_SIRT_ITERATIONS: usize = 800;
pub const DEFAULT_ZINGER_FRACTION: f64 = 1e-3;
pub const DEFAULT_ZINGER_AMPLITUDE: f64 = 3.0;
/// Photon counts of the noise sweep.
pub const FLUX_GRID: [f64; 4] = [1e3, 1e4, 1e5, 1e6];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhantomConfig {
    Named(String),
    Foam(FoamSpec),
}

impl Default for PhantomConfig {
    fn default() -> Self {
        PhantomConfig::Foam(FoamSpec::default())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub n_angles: usize,
    pub n_det: usize,
    pub vol_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub flux: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZingerConfig {
    pub fraction: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude_factor: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_amplitude() -> f64 {
    DEFAULT_ZINGER_AMPLITUDE
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    #[serde(default)]
    pub n_l: Option<usize>,
}

fn default_slices() -> Vec<f64> {
    vec![0.0]
}

fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

fn default_supersampling() -> usize {
    DEFAULT_SUPERSAMPLING
}

fn default_sirt() -> usize {
    DEFAULT_SIRT_ITERATIONS
}

/// One JSON document describing a run; all randomness comes from its seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub phantom: PhantomConfig,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub zingers: Option<ZingerConfig>,
    pub implementations: Vec<String>,
    pub filters: Vec<String>,
    #[serde(default)]
    pub basis: BasisConfig,
    #[serde(default = "default_slices")]
    pub slice_z: Vec<f64>,
    #[serde(default)]
    pub angle_subsample: Option<usize>,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    #[serde(default = "default_supersampling")]
    pub supersampling: usize,
    #[serde(default)]
    pub ridge: f64,
    #[serde(default = "default_sirt")]
    pub sirt_iterations: usize,
}

impl ExperimentConfig {
    /// Foam, no noise, every implementation, the three main families.
    pub fn foam(n_angles: usize, n: usize) -> Self {
        Self {
            phantom: PhantomConfig::default(),
            geometry: GeometryConfig {
                n_angles,
                n_det: n,
                vol_size: n,
            },
            noise: None,
            zingers: None,
            implementations: KernelKind::ALL.iter().map(|k| k.name().to_string()).collect(),
            filters: ["ram-lak", "shepp-logan", "adapted"].map(String::from).to_vec(),
            basis: BasisConfig::default(),
            slice_z: default_slices(),
            angle_subsample: None,
            outputs: default_outputs(),
            supersampling: DEFAULT_SUPERSAMPLING,
            ridge: 0.0,
            sirt_iterations: DEFAULT_SIRT_ITERATIONS,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Replace every seed in the config.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let PhantomConfig::Foam(spec) = &mut self.phantom {
            spec.seed = seed;
        }
        if let Some(n) = &mut self.noise {
            n.seed = seed;
        }
        if let Some(z) = &mut self.zingers {
            z.seed = seed;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        if g.n_angles == 0 {
            return Err(Error::config("geometry.n_angles", "must be at least 1"));
        }
        if g.vol_size == 0 {
            return Err(Error::config("geometry.vol_size", "must be at least 1"));
        }
        if g.n_det < g.vol_size {
            return Err(Error::config("geometry.n_det", "must be at least vol_size"));
        }
        if g.n_det < 2 {
            return Err(Error::config("geometry.n_det", "must be at least 2"));
        }
        match &self.phantom {
            PhantomConfig::Named(name) if name == "single-pixel" => {
                if g.vol_size % 2 == 0 {
                    return Err(Error::config("geometry.vol_size", "single-pixel phantom needs an odd size"));
                }
            }
            PhantomConfig::Named(name) => {
                return Err(Error::config("phantom", format!("unknown phantom `{name}`")));
            }
            PhantomConfig::Foam(spec) => {
                spec.validate().map_err(|e| Error::config("phantom", e.to_string()))?;
                for (i, &z) in self.slice_z.iter().enumerate() {
                    if !(z.abs() < spec.z_extent) {
                        return Err(Error::config(format!("slice_z[{i}]"), "outside the foam"));
                    }
                }
            }
        }
        if self.implementations.is_empty() {
            return Err(Error::config("implementations", "at least one is required"));
        }
        for (i, name) in self.implementations.iter().enumerate() {
            KernelKind::from_name(name)
                .map_err(|e| Error::config(format!("implementations[{i}]"), e.to_string()))?;
        }
        if self.filters.is_empty() {
            return Err(Error::config("filters", "at least one is required"));
        }
        for (i, name) in self.filters.iter().enumerate() {
            FilterFamily::parse(name)
                .map_err(|e| Error::config(format!("filters[{i}]"), e.to_string()))?;
        }
        if let Some(n_l) = self.basis.n_l {
            if n_l == 0 || n_l > g.n_det / 2 {
                return Err(Error::config("basis.n_l", format!("must lie in [1, {}]", g.n_det / 2)));
            }
        }
        if self.angle_subsample == Some(0) {
            return Err(Error::config("angle_subsample", "must be at least 1"));
        }
        if let Some(m) = self.angle_subsample {
            if m > g.n_angles {
                return Err(Error::config("angle_subsample", "larger than the number of angles"));
            }
        }
        if let Some(n) = &self.noise {
            if !(n.flux > 0.0 && n.flux.is_finite()) {
                return Err(Error::config("noise.flux", "must be positive"));
            }
        }
        if let Some(z) = &self.zingers {
            if !(0.0..=1.0).contains(&z.fraction) {
                return Err(Error::config("zingers.fraction", "must lie in [0, 1]"));
            }
            if !(z.amplitude_factor > 1.0) {
                return Err(Error::config("zingers.amplitude_factor", "must exceed 1"));
            }
        }
        if self.supersampling == 0 {
            return Err(Error::config("supersampling", "must be at least 1"));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::config("ridge", "must be non-negative"));
        }
        if self.sirt_iterations == 0 {
            return Err(Error::config("sirt_iterations", "must be at least 1"));
        }
        Ok(())
    }

    /// Acquisition geometry after angle subsampling.
    pub fn geometry(&self) -> Result<Geometry> {
        let g = &self.geometry;
        let full = Geometry::new(g.n_angles, g.n_det, g.vol_size)?;
        match self.angle_subsample {
            Some(m) => full.subsample(m),
            None => Ok(full),
        }
    }

    pub fn kinds(&self) -> Result<Vec<KernelKind>> {
        self.implementations.iter().map(|n| KernelKind::from_name(n)).collect()
    }

    pub fn families(&self) -> Result<Vec<FilterFamily>> {
        self.filters.iter().map(|n| FilterFamily::parse(n)).collect()
    }

    pub fn basis_set(&self) -> Result<BasisSet> {
        let n_det = self.geometry.n_det;
        expbin_basis(n_det, self.basis.n_l.unwrap_or_else(|| default_n_l(n_det)))
    }

    pub fn reconstructors(&self) -> Result<Vec<Reconstructor>> {
        let g = self.geometry()?;
        self.kinds()?
            .into_iter()
            .map(|k| Reconstructor::new(k, g.clone()))
            .collect()
    }
}

/// How the filter of each set member is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterFamily {
    RamLak,
    SheppLogan,
    Adapted,
    /// Fitted to the given implementation's Shepp-Logan reconstruction.
    Reference(KernelKind),
}

impl FilterFamily {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "ram-lak" => Ok(Self::RamLak),
            "shepp-logan" => Ok(Self::SheppLogan),
            "adapted" => Ok(Self::Adapted),
            other => match other.strip_prefix("reference:") {
                Some(label) => Ok(Self::Reference(KernelKind::from_name(label)?)),
                None => Err(Error::invalid(format!("unknown filter family `{other}`"))),
            },
        }
    }

    pub fn name(self) -> String {
        match self {
            Self::RamLak => "ram-lak".into(),
            Self::SheppLogan => "shepp-logan".into(),
            Self::Adapted => "adapted".into(),
            Self::Reference(k) => format!("reference:{}", k.name()),
        }
    }

    fn file_tag(self) -> String {
        self.name().replace(':', "-")
    }
}

impl fmt::Display for FilterFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

// ---------------------------------------------------------------------------
// simulation

#[derive(Clone, Debug)]
pub struct SimulatedSlice {
    pub index: usize,
    pub z: f64,
    pub sinogram: Sinogram,
    pub ground_truth: ImageGrid,
}

/// Ground truth as a {0,1} mask of the material.
pub fn material_mask(gt: &ImageGrid) -> ImageGrid {
    gt.map(|v| if v > 0.5 { 1.0 } else { 0.0 })
}

/// Sinograms and ground truths for every configured slice.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Vec<SimulatedSlice>> {
    cfg.validate()?;
    let full = Geometry::new(cfg.geometry.n_angles, cfg.geometry.n_det, cfg.geometry.vol_size)?;
    let n = cfg.geometry.vol_size;
    let clean: Vec<(f64, Sinogram, ImageGrid)> = match &cfg.phantom {
        PhantomConfig::Named(_) => {
            let gt = single_pixel_phantom(n)?;
            let p = forward_project(&gt, &full)?;
            vec![(0.0, p, gt)]
        }
        PhantomConfig::Foam(spec) => {
            let foam = generate_foam(spec)?;
            cfg.slice_z
                .par_iter()
                .map(|&z| {
                    let slice = slice_phantom(&foam, z)?;
                    let p = analytic_sinogram(&slice, &full, cfg.supersampling)?;
                    let gt = rasterize_slice(&slice, n, GROUND_TRUTH_SUBPIXEL)?;
                    Ok((z, p, gt))
                })
                .collect::<Result<_>>()?
        }
    };
    clean
        .into_iter()
        .enumerate()
        .map(|(index, (z, p, gt))| {
            let mut p = match cfg.angle_subsample {
                Some(m) => p.subsample_angles(m)?,
                None => p,
            };
            if let Some(noise) = &cfg.noise {
                p = add_normalized_poisson_noise(&p, noise.flux, noise.seed.wrapping_add(index as u64))?;
            }
            if let Some(z) = &cfg.zingers {
                p = add_zingers(&p, z.fraction, z.amplitude_factor, z.seed.wrapping_add(index as u64))?;
            }
            Ok(SimulatedSlice {
                index,
                z,
                sinogram: p,
                ground_truth: gt,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// per-family reconstruction sets

/// Filter that `family` assigns to `rec` for data `p`.
pub fn family_filter(
    family: FilterFamily,
    rec: &Reconstructor,
    p: &Sinogram,
    basis: &BasisSet,
    ridge: f64,
) -> Result<FilterSpec> {
    let n_det = p.n_det();
    match family {
        FilterFamily::RamLak => standard_filter("ram-lak", n_det),
        FilterFamily::SheppLogan => standard_filter("shepp-logan", n_det),
        FilterFamily::Adapted => compute_adapted_filter(p, rec, basis, ridge),
        FilterFamily::Reference(kind) => {
            let target = Reconstructor::new(kind, p.geometry().clone())?;
            let r_ref = fbp(&target, p, &standard_filter("shepp-logan", n_det)?)?;
            compute_reference_filter(p, rec, &r_ref, basis)
        }
    }
}

/// Reconstructions of one slice by every implementation with one family.
#[derive(Clone, Debug)]
pub struct FamilyRun {
    pub family: FilterFamily,
    pub filters: Vec<FilterSpec>,
    pub set: ReconSet,
    /// `||p - W r||` per member.
    pub residuals: Vec<f64>,
}

impl FamilyRun {
    pub fn labels(&self) -> Vec<&str> {
        self.set.members().iter().map(|(l, _)| l.as_str()).collect()
    }
}

/// Reconstruct `p` with every implementation, filters chosen by `family`.
pub fn run_family(
    family: FilterFamily,
    recs: &[Reconstructor],
    p: &Sinogram,
    basis: &BasisSet,
    ridge: f64,
) -> Result<FamilyRun> {
    let members: Vec<(FilterSpec, ImageGrid, f64)> = recs
        .par_iter()
        .map(|rec| {
            let h = family_filter(family, rec, p, basis, ridge)?;
            let r = fbp(rec, p, &h)?;
            let fp = forward_project(&r, rec.geometry())?;
            let res = p
                .values()
                .iter()
                .zip(fp.values())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            Ok((h, r, res))
        })
        .collect::<Result<_>>()?;
    let mut set = ReconSet::new();
    let mut filters = Vec::new();
    let mut residuals = Vec::new();
    for (rec, (h, r, res)) in recs.iter().zip(members) {
        set.push(rec.label(), r)?;
        filters.push(h);
        residuals.push(res);
    }
    Ok(FamilyRun {
        family,
        filters,
        set,
        residuals,
    })
}

/// Otsu threshold, F1 and Jaccard of one member against a material mask.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segmentation {
    pub threshold: f64,
    pub f1: f64,
    pub jaccard: f64,
}

pub fn segmentation_scores(r: &ImageGrid, mask: &ImageGrid) -> Result<Segmentation> {
    let threshold = otsu_threshold(r)?;
    let (f1, jaccard) = f1_jaccard(&segment(r, threshold), mask)?;
    Ok(Segmentation {
        threshold,
        f1,
        jaccard,
    })
}

/// Summary metrics of a family's set on one slice.
#[derive(Clone, Debug)]
pub struct FamilySummary {
    pub run: FamilyRun,
    pub sigma: Option<ImageGrid>,
    pub mean_std: Option<f64>,
    pub max_std: Option<f64>,
    pub rmse: Vec<f64>,
    pub mean_squared_bias: f64,
    pub segmentation: Vec<Option<Segmentation>>,
}

impl FamilySummary {
    pub fn mean_rmse(&self) -> f64 {
        self.rmse.iter().sum::<f64>() / self.rmse.len() as f64
    }
}

pub fn summarize(run: FamilyRun, gt: &ImageGrid) -> Result<FamilySummary> {
    let sigma = if run.set.len() >= 2 {
        Some(pixelwise_std(&run.set)?)
    } else {
        None
    };
    let mean_std_value = sigma.as_ref().map(mean_std);
    let max_std = sigma
        .as_ref()
        .map(|s| s.values().iter().copied().fold(0.0, f64::max));
    let rmse_values = run
        .set
        .members()
        .iter()
        .map(|(_, r)| rmse(r, gt))
        .collect::<Result<Vec<_>>>()?;
    let (_, mean_squared_bias) = squared_bias(&run.set, gt)?;
    let mask = material_mask(gt);
    let segmentation = run
        .set
        .members()
        .iter()
        .map(|(_, r)| segmentation_scores(r, &mask).ok())
        .collect();
    Ok(FamilySummary {
        run,
        sigma,
        mean_std: mean_std_value,
        max_std,
        rmse: rmse_values,
        mean_squared_bias,
        segmentation,
    })
}

/// Fail when an adapted filter projects worse than Shepp-Logan for any member.
pub fn check_adapted_residuals(runs: &[FamilyRun]) -> Result<()> {
    let find = |f: FilterFamily| runs.iter().find(|r| r.family == f);
    if let (Some(a), Some(s)) = (find(FilterFamily::Adapted), find(FilterFamily::SheppLogan)) {
        for ((label, ra), rs) in a.labels().iter().zip(&a.residuals).zip(&s.residuals) {
            if *ra > rs * (1.0 + 1e-9) {
                return Err(Error::Numerical(format!(
                    "adapted residual {ra} exceeds Shepp-Logan residual {rs} for {label}"
                )));
            }
        }
    }
    Ok(())
}

/// All configured families on one simulated slice.
pub fn compare_slice(cfg: &ExperimentConfig, slice: &SimulatedSlice) -> Result<Vec<FamilySummary>> {
    let recs = cfg.reconstructors()?;
    let basis = cfg.basis_set()?;
    let runs = cfg
        .families()?
        .into_iter()
        .map(|f| run_family(f, &recs, &slice.sinogram, &basis, cfg.ridge))
        .collect::<Result<Vec<_>>>()?;
    check_adapted_residuals(&runs)?;
    runs.into_iter()
        .map(|r| summarize(r, &slice.ground_truth))
        .collect()
}

// ---------------------------------------------------------------------------
// filter transfer

#[derive(Clone, Debug)]
pub struct TransferOutcome {
    pub central_index: usize,
    /// Per slice: σ maps with slice-specific, central-slice and Shepp-Logan filters.
    pub sigma_specific: Vec<ImageGrid>,
    pub sigma_central: Vec<ImageGrid>,
    pub sigma_shepp: Vec<ImageGrid>,
}

/// Least-squares line `y = slope x + intercept`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

impl TransferOutcome {
    pub fn pairs(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let flat = |v: &[ImageGrid]| v.iter().flat_map(|s| s.values().iter().copied()).collect::<Vec<_>>();
        (
            flat(&self.sigma_specific),
            flat(&self.sigma_central),
            flat(&self.sigma_shepp),
        )
    }

    /// Slope and intercept of central-filter σ against slice-specific σ.
    pub fn regression(&self) -> (f64, f64) {
        let (x, y, _) = self.pairs();
        fit_line(&x, &y)
    }

    /// Fraction of pixels where Shepp-Logan σ is at least the slice-specific σ.
    pub fn shepp_dominance(&self) -> f64 {
        let (x, _, s) = self.pairs();
        x.iter().zip(&s).filter(|(a, b)| b >= a).count() as f64 / x.len() as f64
    }

    pub fn max_sigma(&self) -> f64 {
        let (x, y, _) = self.pairs();
        x.iter().chain(&y).copied().fold(0.0, f64::max)
    }
}

/// Reconstruct every slice with its own filters, with the central slice's
/// filters, and with Shepp-Logan.
pub fn transfer_study(cfg: &ExperimentConfig, slices: &[SimulatedSlice]) -> Result<TransferOutcome> {
    if slices.len() < 3 {
        return Err(Error::config("slice_z", "filter transfer needs at least 3 slices"));
    }
    let recs = cfg.reconstructors()?;
    if recs.len() < 2 {
        return Err(Error::config("implementations", "at least two are required"));
    }
    let basis = cfg.basis_set()?;
    let central_index = slices.len() / 2;
    let central = run_family(FilterFamily::Adapted, &recs, &slices[central_index].sinogram, &basis, cfg.ridge)?;
    let shepp = standard_filter("shepp-logan", cfg.geometry.n_det)?;
    let mut out = TransferOutcome {
        central_index,
        sigma_specific: Vec::new(),
        sigma_central: Vec::new(),
        sigma_shepp: Vec::new(),
    };
    for slice in slices {
        let p = &slice.sinogram;
        let specific = run_family(FilterFamily::Adapted, &recs, p, &basis, cfg.ridge)?;
        let transferred = recs
            .par_iter()
            .zip(&central.filters)
            .map(|(rec, h)| Ok((rec.label(), fbp(rec, p, h)?)))
            .collect::<Result<Vec<_>>>()?;
        let standard = recs
            .par_iter()
            .map(|rec| Ok((rec.label(), fbp(rec, p, &shepp)?)))
            .collect::<Result<Vec<_>>>()?;
        out.sigma_specific.push(pixelwise_std(&specific.set)?);
        out.sigma_central.push(pixelwise_std(&ReconSet::from_members(transferred)?)?);
        out.sigma_shepp.push(pixelwise_std(&ReconSet::from_members(standard)?)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// zinger study

#[derive(Clone, Debug)]
pub struct ZingerOutcome {
    pub shepp: ImageGrid,
    pub adapted: ImageGrid,
    pub sirt: ImageGrid,
    pub scores: [Segmentation; 3],
}

pub const ZINGER_LABELS: [&str; 3] = ["strip+shepp-logan", "strip+adapted", "sirt"];

/// Strip with Shepp-Logan, strip with an adapted filter, and SIRT on `p`.
pub fn zinger_study(
    p: &Sinogram,
    gt: &ImageGrid,
    basis: &BasisSet,
    sirt_iterations: usize,
) -> Result<ZingerOutcome> {
    let g = p.geometry();
    let rec = Reconstructor::new(KernelKind::Strip, g.clone())?;
    let shepp = fbp(&rec, p, &standard_filter("shepp-logan", p.n_det())?)?;
    let h = compute_adapted_filter(p, &rec, basis, 0.0)?;
    let adapted = fbp(&rec, p, &h)?;
    let iterative = sirt(p, g, sirt_iterations)?;
    let mask = material_mask(gt);
    let scores = [
        segmentation_scores(&shepp, &mask)?,
        segmentation_scores(&adapted, &mask)?,
        segmentation_scores(&iterative, &mask)?,
    ];
    Ok(ZingerOutcome {
        shepp,
        adapted,
        sirt: iterative,
        scores,
    })
}

// ---------------------------------------------------------------------------
// outputs

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub experiment: String,
    pub slice: String,
    pub implementation: String,
    pub filter_family: String,
    pub metric: String,
    pub value: f64,
}

pub const CSV_HEADER: &str = "experiment,slice,implementation,filter_family,metric,value";

/// Collects written files and metric rows for one command.
pub struct OutputDir {
    root: PathBuf,
    experiment: String,
    entries: Vec<ManifestEntry>,
    rows: Vec<MetricRow>,
}

impl OutputDir {
    pub fn create(root: &Path, experiment: &str) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            experiment: experiment.to_string(),
            entries: Vec::new(),
            rows: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn record(&mut self, path: &Path, kind: &str) -> Result<()> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let rel = path.strip_prefix(&self.root).unwrap_or(path);
        self.entries.push(ManifestEntry {
            path: rel.to_string_lossy().into_owned(),
            sha256: hex::encode(Sha256::digest(&bytes)),
            kind: kind.to_string(),
        });
        Ok(())
    }

    pub fn bytes(&mut self, name: &str, bytes: &[u8], kind: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        atomic_write(&path, bytes)?;
        self.record(&path, kind)?;
        Ok(path)
    }

    pub fn sinogram(&mut self, stem: &str, p: &Sinogram) -> Result<()> {
        let path = self.root.join(stem);
        write_raster_with_preview(&path, &Raster::Sinogram(p.clone()), None)?;
        let (data, meta) = raster_paths(&path);
        self.record(&data, "sinogram")?;
        self.record(&meta, "sidecar")
    }

    /// Image raster with a 16-bit PGM preview.
    pub fn image(&mut self, stem: &str, r: &ImageGrid) -> Result<()> {
        let path = self.root.join(stem);
        let preview = path.with_extension("pgm");
        let scaling = write_pgm16(&preview, r)?;
        write_raster_with_preview(&path, &Raster::Image(r.clone()), Some(scaling))?;
        let (data, meta) = raster_paths(&path);
        self.record(&data, "image")?;
        self.record(&meta, "sidecar")?;
        self.record(&preview, "preview")
    }

    pub fn filter(&mut self, name: &str, h: &FilterSpec) -> Result<()> {
        let path = self.root.join(name);
        write_filter(&path, h)?;
        self.record(&path, "filter")
    }

    pub fn histogram(&mut self, name: &str, h: &Histogram) -> Result<()> {
        let mut text = String::from("bin_lo,bin_hi,count\n");
        for (b, c) in h.counts.iter().enumerate() {
            text += &format!("{},{},{}\n", h.bin_edges[b], h.bin_edges[b + 1], c);
        }
        self.bytes(name, text.as_bytes(), "csv")?;
        Ok(())
    }

    pub fn metric(&mut self, slice: &str, implementation: &str, family: &str, metric: &str, value: f64) {
        self.rows.push(MetricRow {
            experiment: self.experiment.clone(),
            slice: slice.to_string(),
            implementation: implementation.to_string(),
            filter_family: family.to_string(),
            metric: metric.to_string(),
            value,
        });
    }

    pub fn rows(&self) -> &[MetricRow] {
        &self.rows
    }

    /// Write `metrics.csv` (when any rows exist) and `manifest.json`.
    pub fn finish(mut self) -> Result<Vec<ManifestEntry>> {
        if !self.rows.is_empty() {
            let mut text = format!("{CSV_HEADER}\n");
            for r in &self.rows {
                text += &format!(
                    "{},{},{},{},{},{}\n",
                    r.experiment, r.slice, r.implementation, r.filter_family, r.metric, r.value
                );
            }
            self.bytes("metrics.csv", text.as_bytes(), "csv")?;
        }
        let manifest = serde_json::to_vec_pretty(&self.entries)
            .map_err(|e| Error::format(self.root.join("manifest.json"), e.to_string()))?;
        atomic_write(&self.root.join("manifest.json"), &manifest)?;
        Ok(self.entries)
    }
}

fn slice_tag(index: usize) -> String {
    format!("s{index:03}")
}

/// Write sinograms and ground truths for every configured slice.
pub fn cmd_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<ManifestEntry>> {
    cfg.validate()?;
    let mut dir = OutputDir::create(out, "simulate")?;
    if cfg.slice_z.is_empty() {
        eprintln!("warning: no slices configured, nothing simulated");
        return dir.finish();
    }
    for s in simulate(cfg)? {
        let tag = slice_tag(s.index);
        dir.sinogram(&format!("sinogram_{tag}"), &s.sinogram)?;
        dir.image(&format!("ground_truth_{tag}"), &s.ground_truth)?;
        dir.metric(&tag, "-", "-", "z", s.z);
    }
    dir.finish()
}

/// Residuals of the standard filters and of the computed one.
#[derive(Clone, Debug)]
pub struct FilterReport {
    pub filter: FilterSpec,
    pub residual_ram_lak: f64,
    pub residual_shepp_logan: f64,
    pub residual_adapted: f64,
    /// RMSE against the reference before and after, in reference mode.
    pub reference_rmse: Option<(f64, f64)>,
}

/// Adapted filter for `kind` on `p`, or the reference-mode filter when `r_ref` is given.
pub fn cmd_compute_filter(
    kind: KernelKind,
    p: &Sinogram,
    r_ref: Option<&ImageGrid>,
    basis: &BasisSet,
    ridge: f64,
    out: &Path,
) -> Result<FilterReport> {
    let rec = Reconstructor::new(kind, p.geometry().clone())?;
    let rl = standard_filter("ram-lak", p.n_det())?;
    let sl = standard_filter("shepp-logan", p.n_det())?;
    let filter = match r_ref {
        Some(r) => compute_reference_filter(p, &rec, r, basis)?,
        None => compute_adapted_filter(p, &rec, basis, ridge)?,
    };
    let reference_rmse = match r_ref {
        Some(r) => Some((rmse(&fbp(&rec, p, &sl)?, r)?, rmse(&fbp(&rec, p, &filter)?, r)?)),
        None => None,
    };
    let report = FilterReport {
        residual_ram_lak: projection_residual(p, &rec, &rl)?,
        residual_shepp_logan: projection_residual(p, &rec, &sl)?,
        residual_adapted: projection_residual(p, &rec, &filter)?,
        filter,
        reference_rmse,
    };
    if r_ref.is_none() && report.residual_adapted > report.residual_shepp_logan * (1.0 + 1e-9) {
        return Err(Error::Numerical(format!(
            "adapted residual {} exceeds Shepp-Logan residual {}",
            report.residual_adapted, report.residual_shepp_logan
        )));
    }
    let filter = report.filter.clone().with_provenance(Provenance {
        implementation: kind.name().to_string(),
        n_angles: p.n_angles(),
        seed: None,
    });
    write_filter(out, &filter)?;
    Ok(report)
}

/// Every family with every implementation on every slice, with metrics and maps.
pub fn cmd_compare(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<ManifestEntry>> {
    cfg.validate()?;
    if cfg.implementations.len() < 2 {
        return Err(Error::config("implementations", "comparison needs at least two"));
    }
    let mut dir = OutputDir::create(out, "compare")?;
    for slice in simulate(cfg)? {
        let tag = slice_tag(slice.index);
        let summaries = compare_slice(cfg, &slice)?;
        // one histogram range per slice so mode bins are comparable across families
        let upper = summaries
            .iter()
            .filter_map(|s| s.max_std)
            .fold(0.0, f64::max);
        for s in &summaries {
            let fam = s.run.family.name();
            let ftag = s.run.family.file_tag();
            let strip = s.run.set.get(KernelKind::Strip.name()).cloned();
            for (m, (label, r)) in s.run.set.members().iter().enumerate() {
                dir.image(&format!("recon_{ftag}_{label}_{tag}"), r)?;
                if let Some(strip) = &strip {
                    if label != KernelKind::Strip.name() {
                        let diff = ImageGrid::from_values(
                            r.n(),
                            r.values().iter().zip(strip.values()).map(|(a, b)| (a - b).abs()).collect(),
                        )?;
                        dir.image(&format!("absdiff_{ftag}_{label}_{tag}"), &diff)?;
                    }
                }
                if matches!(s.run.family, FilterFamily::Adapted | FilterFamily::Reference(_)) {
                    dir.filter(&format!("filter_{ftag}_{label}_{tag}.json"), &s.run.filters[m])?;
                }
                dir.metric(&tag, label, &fam, "residual", s.run.residuals[m]);
                dir.metric(&tag, label, &fam, "rmse", s.rmse[m]);
                if let Some(seg) = &s.segmentation[m] {
                    dir.metric(&tag, label, &fam, "otsu_threshold", seg.threshold);
                    dir.metric(&tag, label, &fam, "f1", seg.f1);
                    dir.metric(&tag, label, &fam, "jaccard", seg.jaccard);
                }
            }
            dir.metric(&tag, "set", &fam, "mean_squared_bias", s.mean_squared_bias);
            if let (Some(sigma), Some(ms), Some(mx)) = (&s.sigma, s.mean_std, s.max_std) {
                dir.image(&format!("std_{ftag}_{tag}"), sigma)?;
                let hist = histogram_range(sigma, HISTOGRAM_BINS, upper)?;
                dir.histogram(&format!("std_histogram_{ftag}_{tag}.csv"), &hist)?;
                dir.metric(&tag, "set", &fam, "mean_std", ms);
                dir.metric(&tag, "set", &fam, "max_std", mx);
                dir.metric(&tag, "set", &fam, "std_mode_bin", hist.mode_bin() as f64);
            }
        }
    }
    dir.finish()
}

/// Slice-specific versus central-slice filters across a stack of slices.
pub fn cmd_transfer(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<ManifestEntry>> {
    cfg.validate()?;
    if cfg.slice_z.len() < 3 {
        return Err(Error::config("slice_z", "filter transfer needs at least 3 slices"));
    }
    let slices = simulate(cfg)?;
    let outcome = transfer_study(cfg, &slices)?;
    let mut dir = OutputDir::create(out, "transfer")?;
    let mut text = String::from("slice,pixel,std_slice_specific,std_central,std_shepp_logan\n");
    for (s, ((a, b), c)) in outcome
        .sigma_specific
        .iter()
        .zip(&outcome.sigma_central)
        .zip(&outcome.sigma_shepp)
        .enumerate()
    {
        let tag = slice_tag(s);
        for (px, ((x, y), z)) in a.values().iter().zip(b.values()).zip(c.values()).enumerate() {
            text += &format!("{s},{px},{x},{y},{z}\n");
        }
        dir.metric(&tag, "set", "adapted", "mean_std", mean_std(a));
        dir.metric(&tag, "set", "adapted-central", "mean_std", mean_std(b));
        dir.metric(&tag, "set", "shepp-logan", "mean_std", mean_std(c));
    }
    dir.bytes("transfer_pixels.csv", text.as_bytes(), "csv")?;
    let (slope, intercept) = outcome.regression();
    dir.metric("all", "set", "adapted-central", "slope", slope);
    dir.metric("all", "set", "adapted-central", "intercept", intercept);
    dir.metric("all", "set", "adapted", "max_std", outcome.max_sigma());
    dir.metric("all", "set", "shepp-logan", "fraction_ge_specific", outcome.shepp_dominance());
    dir.metric("all", "-", "-", "central_slice", outcome.central_index as f64);
    dir.finish()
}

/// Zinger-corrupted data next to a clean control run.
pub fn cmd_zinger_demo(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<ManifestEntry>> {
    cfg.validate()?;
    let zingers = cfg.zingers.unwrap_or(ZingerConfig {
        fraction: DEFAULT_ZINGER_FRACTION,
        amplitude_factor: DEFAULT_ZINGER_AMPLITUDE,
        seed: 0,
    });
    let mut clean_cfg = cfg.clone();
    clean_cfg.zingers = None;
    let basis = cfg.basis_set()?;
    let mut dir = OutputDir::create(out, "zinger-demo")?;
    for slice in simulate(&clean_cfg)? {
        let tag = slice_tag(slice.index);
        let corrupted = add_zingers(
            &slice.sinogram,
            zingers.fraction,
            zingers.amplitude_factor,
            zingers.seed.wrapping_add(slice.index as u64),
        )?;
        dir.sinogram(&format!("sinogram_zingers_{tag}"), &corrupted)?;
        for (run, p) in [("zingers", &corrupted), ("clean", &slice.sinogram)] {
            let outcome = zinger_study(p, &slice.ground_truth, &basis, cfg.sirt_iterations)?;
            let images = [&outcome.shepp, &outcome.adapted, &outcome.sirt];
            for ((label, r), seg) in ZINGER_LABELS.iter().zip(images).zip(&outcome.scores) {
                let stem = label.replace('+', "_");
                dir.image(&format!("recon_{run}_{stem}_{tag}"), r)?;
                dir.image(&format!("segmentation_{run}_{stem}_{tag}"), &segment(r, seg.threshold))?;
                dir.metric(&tag, label, run, "otsu_threshold", seg.threshold);
                dir.metric(&tag, label, run, "f1", seg.f1);
                dir.metric(&tag, label, run, "jaccard", seg.jaccard);
            }
        }
    }
    dir.finish()
}
