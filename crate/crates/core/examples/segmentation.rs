//! Otsu thresholds and segmentation scores per implementation and family.
//!
//! `cargo run --release --example segmentation`

use adapted_filters::experiments::{compare_slice, simulate, ExperimentConfig};

fn main() -> adapted_filters::Result<()> {
    let cfg = ExperimentConfig::foam(32, 256);
    let slice = simulate(&cfg)?.remove(0);
    for s in compare_slice(&cfg, &slice)? {
        println!("{}", s.run.family.name());
        for (label, seg) in s.run.labels().iter().zip(&s.segmentation) {
            match seg {
                Some(x) => println!("  {label:<12} t = {:.4}  F1 = {:.4}  J = {:.4}", x.threshold, x.f1, x.jaccard),
                None => println!("  {label:<12} (constant image)"),
            }
        }
    }
    Ok(())
}
