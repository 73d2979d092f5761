//! Error against K·h and the fitted convergence slope.

use fembae::harness::{fit_slope, run_convergence, sweep_points, CaseConfig, ExperimentConfig};

fn main() -> fembae::Result<()> {
    for radius in [3.0, 10.0] {
        let cfg = ExperimentConfig {
            base: CaseConfig { radius, exterior_radius: radius + 1.0, ..Default::default() },
            kh_sweep: vec![1.0, 0.7, 0.5, 0.35, 0.25, 0.18, 0.12, 0.1],
            out_dir: None,
        };
        let pts = sweep_points(&run_convergence(&cfg)?);
        let cells: Vec<String> = pts.iter().map(|(k, e)| format!("{k}:{e:.2e}")).collect();
        println!("R={radius}: {}", cells.join(" "));
        println!("  slope on [0.2, 1]: {:.3}", fit_slope(&pts, 0.2, 1.0).unwrap_or(f64::NAN));
    }
    Ok(())
}
