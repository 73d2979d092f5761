//! The uniform bilinear stencil and the interior/boundary split of a staircase hull.

use fembae::lattice::{build_partition, build_stencil, staircase_hull, Offset};
use num_complex::Complex64;

fn main() -> fembae::Result<()> {
    let stencil = build_stencil(Complex64::new(0.5, 0.0), 1.0)?;
    for o in [Offset(0, 0), Offset(1, 0), Offset(1, 1)] {
        println!("β{o:?} = {:.6}", stencil.coefficient(o));
    }
    println!("symbol at ξ = 0: {:.6}", stencil.symbol([0.0, 0.0]));

    let hull = staircase_hull(5.0, [0.0, 0.0]);
    let partition = build_partition(&hull)?;
    println!(
        "radius 5 hull: {} cells, {} interior nodes, {} loop nodes, {} near-exterior nodes",
        hull.len(),
        partition.interior_nodes().len(),
        partition.boundary_nodes().len(),
        partition.near_exterior_nodes().len()
    );
    Ok(())
}
