//! Sensitivity of the error to the outer radius of the element layer.

use fembae::harness::{run_truncation_study, CaseConfig, ExperimentConfig};

fn main() -> fembae::Result<()> {
    let cfg = ExperimentConfig {
        base: CaseConfig { radius: 10.0, ..Default::default() },
        kh_sweep: vec![0.8, 0.5, 0.3],
        out_dir: None,
    };
    let study = run_truncation_study(&cfg, &[11.0, 15.0, 20.0])?;
    for row in &study.rows {
        println!("Rext={:<4} K·h={:<4} error={:.4e}", row.config.exterior_radius, row.config.kh, row.error().unwrap_or(f64::NAN));
    }
    println!("largest ratio at equal K·h: {:.3}", study.max_pairwise_ratio);
    Ok(())
}
