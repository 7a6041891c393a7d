//! Mean σ, bias and RMSE as the angle count and photon flux vary.
//!
//! `cargo run --release --example sweep [angles|flux]`

use adapted_filters::experiments::{compare_slice, simulate, ExperimentConfig, FilterFamily, NoiseConfig, FLUX_GRID};

fn main() -> adapted_filters::Result<()> {
    let which = std::env::args().nth(1).unwrap_or_else(|| "both".into());
    let mut points: Vec<(usize, Option<f64>)> = Vec::new();
    if which != "flux" {
        points.extend([16, 32, 64, 128, 256].map(|a| (a, None)));
    }
    if which != "angles" {
        points.extend(FLUX_GRID.map(|f| (64, Some(f))));
    }
    println!("{:>5} {:>8} {:<12} {:>9} {:>10} {:>9}", "N_θ", "I0", "family", "mean σ", "bias²", "rmse");
    for (n_angles, flux) in points {
        let mut cfg = ExperimentConfig::foam(n_angles, 256);
        cfg.noise = flux.map(|flux| NoiseConfig { flux, seed: 0 });
        let slice = simulate(&cfg)?.remove(0);
        for s in compare_slice(&cfg, &slice)? {
            let flux_text = flux.map_or("-".to_string(), |f| format!("{f:.0e}"));
            let marker = if s.run.family == FilterFamily::Adapted { "*" } else { "" };
            println!(
                "{n_angles:>5} {flux_text:>8} {:<12} {:>9.4} {:>10.2e} {:>9.4}",
                format!("{}{marker}", s.run.family.name()),
                s.mean_std.unwrap_or(0.0),
                s.mean_squared_bias,
                s.mean_rmse()
            );
        }
    }
    Ok(())
}
