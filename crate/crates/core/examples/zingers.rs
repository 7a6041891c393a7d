//! Bright outliers in the sinogram: Shepp-Logan, adapted filter and SIRT.
//!
//! `cargo run --release --example zingers [N] [SIRT_ITERATIONS]`

use adapted_filters::experiments::{simulate, zinger_study, ExperimentConfig, DEFAULT_ZINGER_AMPLITUDE, ZINGER_LABELS};
use adapted_filters::phantoms::add_zingers;

fn main() -> adapted_filters::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(128);
    let iterations: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(800);
    let mut cfg = ExperimentConfig::foam(512, n);
    cfg.implementations = vec!["strip".into()];
    let slice = simulate(&cfg)?.remove(0);
    let basis = cfg.basis_set()?;
    for fraction in [1e-3, 0.0] {
        let p = add_zingers(&slice.sinogram, fraction, DEFAULT_ZINGER_AMPLITUDE, 0)?;
        let outcome = zinger_study(&p, &slice.ground_truth, &basis, iterations)?;
        println!("zinger fraction {fraction}");
        for (label, s) in ZINGER_LABELS.iter().zip(&outcome.scores) {
            println!("  {label:<18} t = {:.4}  F1 = {:.4}  J = {:.4}", s.threshold, s.f1, s.jaccard);
        }
    }
    Ok(())
}
