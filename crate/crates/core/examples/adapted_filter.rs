//! Compute an implementation-adapted filter for every reconstructor.
//!
//! `cargo run --release --example adapted_filter [FILTER_DIR]`

use std::path::PathBuf;

use adapted_filters::experiments::{simulate, ExperimentConfig};
use adapted_filters::filterbank::{compute_adapted_filter, projection_residual, standard_filter, write_filter};
use adapted_filters::{KernelKind, Reconstructor};

fn main() -> adapted_filters::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    if let Some(dir) = &out {
        std::fs::create_dir_all(dir).map_err(|e| adapted_filters::Error::Io { path: dir.clone(), source: e })?;
    }
    let cfg = ExperimentConfig::foam(32, 256);
    let slice = simulate(&cfg)?.remove(0);
    let p = &slice.sinogram;
    let basis = cfg.basis_set()?;
    println!("{} basis functions, widths {:?}", basis.len(), basis.bins().iter().map(|b| b.width).collect::<Vec<_>>());
    let rl = standard_filter("ram-lak", 256)?;
    let sl = standard_filter("shepp-logan", 256)?;
    println!("\n{:<12} {:>10} {:>12} {:>10}", "impl", "ram-lak", "shepp-logan", "adapted");
    for kind in KernelKind::ALL {
        let rec = Reconstructor::new(kind, p.geometry().clone())?;
        let h = compute_adapted_filter(p, &rec, &basis, 0.0)?;
        println!(
            "{:<12} {:>10.2} {:>12.2} {:>10.2}",
            kind.name(),
            projection_residual(p, &rec, &rl)?,
            projection_residual(p, &rec, &sl)?,
            projection_residual(p, &rec, &h)?
        );
        if let Some(dir) = &out {
            write_filter(&dir.join(format!("{}.json", kind.name())), &h)?;
        }
    }
    Ok(())
}
