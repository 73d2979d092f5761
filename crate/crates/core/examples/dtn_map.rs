//! Boundary operators on a coupling loop and the discrete Dirichlet-to-Neumann map.

use fembae::bae::{condition_1, default_coupling, BoundaryOperators};
use fembae::greens::GreensSettings;
use fembae::lattice::{build_partition, build_stencil, staircase_hull};
use num_complex::Complex64;

fn main() -> fembae::Result<()> {
    let kh = Complex64::new(0.5, 0.0);
    let partition = build_partition(&staircase_hull(4.0, [0.0, 0.0]))?;
    let stencil = build_stencil(kh, 1.0)?;
    for nu in [Complex64::new(0.0, 0.0), default_coupling(kh)] {
        let ops = BoundaryOperators::build(&partition, &stencil, &GreensSettings::default(), nu)?;
        let dtn = ops.dtn()?;
        println!(
            "ν={nu:.3}: loop {} nodes, cond(C)={:.3e}, DtN residual {:.2e}, B[0,0]={:.5}",
            ops.gamma_ex.len(),
            condition_1(&ops.c),
            dtn.residual,
            dtn.matrix[(0, 0)]
        );
    }
    Ok(())
}
