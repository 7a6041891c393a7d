//! Five reconstructors, one single-pixel sinogram: how far apart are they?
//!
//! `cargo run --release --example discrepancy [OUT_DIR]` also writes PGM previews.

use std::path::PathBuf;

use adapted_filters::filterbank::{ramlak_real_space, standard_filter};
use adapted_filters::phantoms::single_pixel_phantom;
use adapted_filters::raster::write_pgm16;
use adapted_filters::reconstructors::backproject;
use adapted_filters::{fbp, forward_project, Geometry, ImageGrid, KernelKind, Reconstructor};

fn max_abs_diff(a: &ImageGrid, b: &ImageGrid) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn main() -> adapted_filters::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let g = Geometry::new(8, 33, 33)?;
    let phantom = single_pixel_phantom(33)?;
    let p = forward_project(&phantom, &g)?;

    let line = backproject(KernelKind::Line, &p)?;
    let pixel = backproject(KernelKind::PixelDriven, &p)?;
    println!("unfiltered line vs pixel-driven: max |diff| = {:.4e}", max_abs_diff(&line, &pixel));

    let ramp = standard_filter("ram-lak", 33)?;
    let recs: Vec<(KernelKind, ImageGrid)> = KernelKind::ALL
        .iter()
        .map(|&k| Ok((k, fbp(&Reconstructor::new(k, g.clone())?, &p, &ramp)?)))
        .collect::<adapted_filters::Result<_>>()?;
    println!("\nRam-Lak FBP, pairwise max |diff|:");
    for (i, (ka, ra)) in recs.iter().enumerate() {
        for (kb, rb) in &recs[i + 1..] {
            println!("  {ka:>11} vs {kb:<11} {:.4e}", max_abs_diff(ra, rb));
        }
    }

    let rec = Reconstructor::new(KernelKind::PixelDriven, g.clone())?;
    let real = fbp(&rec, &p, &ramlak_real_space(33)?)?;
    let fourier = fbp(&rec, &p, &ramp)?;
    println!(
        "\npixel-driven FBP, real-space Ram-Lak vs sampled Fourier ramp: max |diff| = {:.4e}",
        max_abs_diff(&real, &fourier)
    );

    if let Some(dir) = out {
        std::fs::create_dir_all(&dir).map_err(|e| adapted_filters::Error::Io { path: dir.clone(), source: e })?;
        write_pgm16(&dir.join("phantom.pgm"), &phantom)?;
        write_pgm16(&dir.join("backprojection_line.pgm"), &line)?;
        write_pgm16(&dir.join("backprojection_pixel.pgm"), &pixel)?;
        let diff = ImageGrid::from_values(33, line.values().iter().zip(pixel.values()).map(|(a, b)| (a - b).abs()).collect())?;
        write_pgm16(&dir.join("backprojection_absdiff.pgm"), &diff)?;
        println!("previews written to {}", dir.display());
    }
    Ok(())
}
