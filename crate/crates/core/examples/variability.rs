//! Pixelwise spread across implementations for each filter family.
//!
//! `cargo run --release --example variability [N_ANGLES]`

use adapted_filters::experiments::{compare_slice, simulate, ExperimentConfig, HISTOGRAM_BINS};
use adapted_filters::metrics::histogram_range;

fn main() -> adapted_filters::Result<()> {
    let n_angles = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(32);
    let cfg = ExperimentConfig::foam(n_angles, 256);
    let slice = simulate(&cfg)?.remove(0);
    let summaries = compare_slice(&cfg, &slice)?;
    let upper = summaries.iter().filter_map(|s| s.max_std).fold(0.0, f64::max);
    println!("N_θ = {n_angles}, σ histogram over [0, {upper:.4}] in {HISTOGRAM_BINS} bins");
    println!("{:<12} {:>9} {:>9} {:>9} {:>10} {:>10}", "family", "mean σ", "max σ", "mode bin", "mean rmse", "bias²");
    for s in &summaries {
        let sigma = s.sigma.as_ref().expect("several implementations");
        let hist = histogram_range(sigma, HISTOGRAM_BINS, upper)?;
        println!(
            "{:<12} {:>9.4} {:>9.4} {:>9} {:>10.4} {:>10.2e}",
            s.run.family.name(),
            s.mean_std.unwrap_or(0.0),
            s.max_std.unwrap_or(0.0),
            hist.mode_bin(),
            s.mean_rmse(),
            s.mean_squared_bias
        );
    }
    Ok(())
}
