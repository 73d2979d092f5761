//! Field on a far ring evaluated from the loop trace and flux.

use fembae::harness::{solve_coupled_case, CaseConfig};
use fembae::solve::directivity;

fn main() -> fembae::Result<()> {
    for harmonic in [0, 2] {
        let cfg = CaseConfig { radius: 8.0, exterior_radius: 9.0, kh: 0.5, harmonic, ..Default::default() };
        let mut case = solve_coupled_case(&cfg)?;
        let s = &case.solution;
        let pattern = directivity(&s.u_ex_boundary, &s.h_ex, &mut case.ops, 30.0, case.mesh.centre(), 16)?;
        let row: Vec<String> = pattern.iter().map(|(a, v)| format!("{:.0}°:{v:.2}", a.to_degrees())).collect();
        println!("N={harmonic}: {}", row.join(" "));
    }
    Ok(())
}
