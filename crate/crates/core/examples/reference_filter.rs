//! Fit filters so other implementations match a strip + Shepp-Logan reference.
//!
//! `cargo run --release --example reference_filter`

use adapted_filters::experiments::{simulate, ExperimentConfig};
use adapted_filters::filterbank::{compute_reference_filter, standard_filter};
use adapted_filters::metrics::rmse;
use adapted_filters::{fbp, KernelKind, Reconstructor};

fn main() -> adapted_filters::Result<()> {
    let mut cfg = ExperimentConfig::foam(32, 256);
    cfg.slice_z = vec![0.0, 0.1];
    let slices = simulate(&cfg)?;
    let g = cfg.geometry()?;
    let basis = cfg.basis_set()?;
    let sl = standard_filter("shepp-logan", g.n_det())?;
    let strip = Reconstructor::new(KernelKind::Strip, g.clone())?;
    let refs = slices
        .iter()
        .map(|s| fbp(&strip, &s.sinogram, &sl))
        .collect::<adapted_filters::Result<Vec<_>>>()?;
    println!("filters fitted on z = {}, evaluated on every slice", slices[0].z);
    for kind in [KernelKind::Line, KernelKind::Joseph, KernelKind::PixelDriven, KernelKind::FourierGrid] {
        let rec = Reconstructor::new(kind, g.clone())?;
        let h = compute_reference_filter(&slices[0].sinogram, &rec, &refs[0], &basis)?;
        for (s, r_ref) in slices.iter().zip(&refs) {
            let before = rmse(&fbp(&rec, &s.sinogram, &sl)?, r_ref)?;
            let after = rmse(&fbp(&rec, &s.sinogram, &h)?, r_ref)?;
            println!("  {:<12} z = {:>4}: RMSE to reference {before:.4} -> {after:.4}", kind.name(), s.z);
        }
    }
    Ok(())
}
