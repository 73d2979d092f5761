//! One coupled solve of the circular benchmark compared with the exact field.

use fembae::harness::{run_case, CaseConfig};

fn main() -> fembae::Result<()> {
    let cfg = CaseConfig { radius: 10.0, exterior_radius: 11.0, kh: 0.5, ..Default::default() };
    let r = run_case(&cfg)?;
    println!("config {}", r.hash);
    println!("{} mesh nodes, {} on the circle, {} on the loop", r.mesh_nodes, r.scatterer_nodes, r.loop_nodes);
    println!("relative error {:.4e}, residual {:.2e}, cond(C) {:.3e}", r.error, r.residual, r.condition_c);
    for (u, e) in r.numerical.iter().zip(&r.exact).take(4) {
        println!("  numerical {u:.5}  exact {e:.5}");
    }
    Ok(())
}
