//! Element matrices, interior and exterior assembly and the harmonic load.

use fembae::fem::{assemble_exterior, assemble_force, assemble_interior, triangle_matrix, ForceMode};
use fembae::lattice::build_stencil;
use fembae::mesh::{build_annular_layer_mesh, LayerSpec};
use num_complex::Complex64;

fn main() -> fembae::Result<()> {
    let kh = Complex64::new(0.5, 0.0);
    let m = triangle_matrix([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], kh)?;
    println!("unit right triangle, first row: {:.5} {:.5} {:.5}", m[0][0], m[0][1], m[0][2]);

    let (mesh, partition) = build_annular_layer_mesh(&LayerSpec::new(5.0, 1.0, 6.0))?;
    let interior = assemble_interior(&mesh, kh)?;
    let exterior = assemble_exterior(&partition, &build_stencil(kh, 1.0)?);
    println!("interior: {} rows, {} entries, symmetric {}", interior.row_count(), interior.nnz(), interior.is_symmetric(1e-14));
    println!("exterior: {} rows, {} entries", exterior.row_count(), exterior.nnz());

    for mode in [ForceMode::Nodal, ForceMode::BoundaryMass] {
        let f = assemble_force(&mesh, 2, mode);
        let loaded: Vec<String> = mesh.gamma_in().iter().take(4).map(|&k| format!("{:.4}", f[k].re)).collect();
        println!("{mode:?} load, N=2, first nodes: {}", loaded.join(" "));
    }
    Ok(())
}
