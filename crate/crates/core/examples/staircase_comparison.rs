//! Coupled layer model against the lattice-only staircase model of the circle.

use fembae::harness::{run_staircase_comparison, CaseConfig, ExperimentConfig};

fn main() -> fembae::Result<()> {
    let cfg = ExperimentConfig {
        base: CaseConfig { radius: 10.0, exterior_radius: 11.0, ..Default::default() },
        kh_sweep: vec![1.0, 0.8, 0.5, 0.3],
        out_dir: None,
    };
    for row in run_staircase_comparison(&cfg)? {
        let (c, s) = (row.coupled.error().unwrap_or(f64::NAN), row.staircase.error().unwrap_or(f64::NAN));
        println!("K·h={:<4} coupled {c:.4e}  staircase {s:.4e}  ratio {:.1}", row.kh, s / c);
    }
    Ok(())
}
