//! Generate a foam phantom, cut a slice and simulate its sinogram.
//!
//! `cargo run --release --example foam_phantom [OUT_DIR]`

use std::path::PathBuf;

use adapted_filters::phantoms::{
    add_normalized_poisson_noise, analytic_sinogram, generate_foam, rasterize_slice, slice_phantom, FoamSpec,
};
use adapted_filters::raster::{write_raster, Raster};
use adapted_filters::Geometry;

fn main() -> adapted_filters::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let spec = FoamSpec { seed: 42, ..FoamSpec::default() };
    let foam = generate_foam(&spec)?;
    let slice = slice_phantom(&foam, 0.0)?;
    println!("{} spheres, {} holes in the central slice", foam.spheres.len(), slice.holes.len());

    let g = Geometry::new(32, 256, 256)?;
    let p = analytic_sinogram(&slice, &g, 4)?;
    let gt = rasterize_slice(&slice, 256, 8)?;
    let material: f64 = gt.values().iter().sum::<f64>() / (256.0 * 256.0);
    println!("sinogram {}x{}, max chord {:.2} px", p.n_angles(), p.n_det(), p.max());
    println!("material fraction of the grid: {material:.3}");

    let noisy = add_normalized_poisson_noise(&p, 1e4, 1)?;
    let err = p.values().iter().zip(noisy.values()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        / p.values().iter().map(|a| a * a).sum::<f64>().sqrt();
    println!("relative noise at I0 = 1e4: {err:.4}");

    if let Some(dir) = out {
        std::fs::create_dir_all(&dir).map_err(|e| adapted_filters::Error::Io { path: dir.clone(), source: e })?;
        write_raster(&dir.join("sinogram"), &Raster::Sinogram(p))?;
        write_raster(&dir.join("ground_truth"), &Raster::Image(gt))?;
        std::fs::write(dir.join("foam.json"), serde_json::to_string_pretty(&foam).expect("serializable"))
            .map_err(|e| adapted_filters::Error::Io { path: dir.clone(), source: e })?;
        println!("rasters written to {}", dir.display());
    }
    Ok(())
}
