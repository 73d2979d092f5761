//! Condition of C near an interior Dirichlet eigenvalue, with and without the combined form.

use fembae::harness::{run_resonance_study, square_dirichlet_kh, NuMode};
use fembae::greens::GreensSettings;
use fembae::lattice::{build_partition, rectangle_cells, LatticeNode};

fn main() -> fembae::Result<()> {
    let partition = build_partition(&rectangle_cells(LatticeNode(0, 0), 6, 6))?;
    let k0 = square_dirichlet_kh(6, 1)[0];
    println!("lowest Dirichlet K·h of the 6×6 block: {k0:.6}");
    let sweep: Vec<f64> = (0..=8).map(|i| k0 - 0.02 + 0.005 * i as f64).collect();
    let rows = run_resonance_study(&partition, &[NuMode::Kirchhoff, NuMode::Cfie], &sweep, &GreensSettings::default())?;
    for pair in rows.chunks(2) {
        println!("K·h={:.4}  ν=0: {:.3e}  ν=i/K: {:.3e}", pair[0].kh, pair[0].condition_c, pair[1].condition_c);
    }
    Ok(())
}
