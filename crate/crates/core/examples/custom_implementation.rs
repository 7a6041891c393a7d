//! Adapt a filter to a reconstructor the library knows nothing about.
//!
//! Any type implementing `Implementation` can be handed to the filter
//! computation; it is only ever called through `reconstruct`.
//!
//! `cargo run --release --example custom_implementation`

use adapted_filters::experiments::{simulate, ExperimentConfig};
use adapted_filters::filterbank::{compute_adapted_filter, projection_residual, standard_filter};
use adapted_filters::reconstructors::backproject;
use adapted_filters::{Geometry, ImageGrid, Implementation, KernelKind, Result, Sinogram};

/// Joseph backprojection followed by a 3x3 box blur, as some packages smooth their output.
struct BlurredJoseph {
    geometry: Geometry,
}

impl Implementation for BlurredJoseph {
    fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    fn reconstruct(&self, q: &Sinogram) -> Result<ImageGrid> {
        let r = backproject(KernelKind::Joseph, q)?;
        let n = r.n();
        let mut out = ImageGrid::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                let mut count = 0.0;
                for di in i.saturating_sub(1)..=(i + 1).min(n - 1) {
                    for dj in j.saturating_sub(1)..=(j + 1).min(n - 1) {
                        acc += r.get(di, dj);
                        count += 1.0;
                    }
                }
                out.set(i, j, acc / count);
            }
        }
        Ok(out)
    }

    fn label(&self) -> String {
        "blurred-joseph".into()
    }
}

fn main() -> Result<()> {
    let cfg = ExperimentConfig::foam(64, 256);
    let slice = simulate(&cfg)?.remove(0);
    let p = &slice.sinogram;
    let rec = BlurredJoseph { geometry: p.geometry().clone() };
    let basis = cfg.basis_set()?;
    let h = compute_adapted_filter(p, &rec, &basis, 0.0)?;
    println!("residual with Shepp-Logan: {:.2}", projection_residual(p, &rec, &standard_filter("shepp-logan", 256)?)?);
    println!("residual with adapted:     {:.2}", projection_residual(p, &rec, &h)?);
    let spectrum = h.fourier();
    let step = spectrum.len() / 8;
    println!("adapted spectrum, every {step} frequencies: {:?}", spectrum.iter().step_by(step).map(|v| format!("{v:.3}")).collect::<Vec<_>>());
    Ok(())
}
