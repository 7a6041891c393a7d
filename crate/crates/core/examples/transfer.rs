//! Reuse the central slice's filters on every other slice of the stack.
//!
//! `cargo run --release --example transfer [N_SLICES]`

use adapted_filters::experiments::{simulate, transfer_study, ExperimentConfig};
use adapted_filters::metrics::mean_std;

fn main() -> adapted_filters::Result<()> {
    let n_slices: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(9);
    let mut cfg = ExperimentConfig::foam(32, 128);
    cfg.slice_z = (0..n_slices).map(|s| -0.5 + (s as f64 + 0.5) / n_slices as f64).collect();
    let slices = simulate(&cfg)?;
    let out = transfer_study(&cfg, &slices)?;
    println!("{:>6} {:>10} {:>10} {:>10}", "z", "specific", "central", "shepp");
    for (s, slice) in slices.iter().enumerate() {
        println!(
            "{:>6.3} {:>10.4} {:>10.4} {:>10.4}",
            slice.z,
            mean_std(&out.sigma_specific[s]),
            mean_std(&out.sigma_central[s]),
            mean_std(&out.sigma_shepp[s])
        );
    }
    let (slope, intercept) = out.regression();
    println!("\ncentral σ = {slope:.4} · specific σ + {intercept:.2e}  (max σ {:.4})", out.max_sigma());
    println!("pixels with σ_shepp >= σ_specific: {:.1}%", 100.0 * out.shepp_dominance());
    Ok(())
}
