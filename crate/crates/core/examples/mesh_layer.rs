//! Build the thin triangle layer between a circle and its grid hull.

use fembae::mesh::{build_annular_layer_mesh, validate_interface, LayerSpec};

fn main() -> fembae::Result<()> {
    for (radius, sigma, rext) in [(3.0, 1.0, 4.0), (10.0, 0.5, 11.0), (10.0, 1.0, 15.0)] {
        let (mesh, partition) = build_annular_layer_mesh(&LayerSpec::new(radius, sigma, rext))?;
        let g = mesh.gamma_in();
        let [x0, y0] = mesh.nodes()[g[0]];
        let [x1, y1] = mesh.nodes()[g[1]];
        println!(
            "R={radius} σ={sigma} Rext={rext}: {} nodes, {} triangles, {} on the circle (chord {:.8}), {} on the loop, min quality {:.3}, interface faults {}",
            mesh.nodes().len(),
            mesh.triangles().len(),
            g.len(),
            (x1 - x0).hypot(y1 - y0),
            partition.boundary_nodes().len(),
            mesh.min_quality(),
            validate_interface(&mesh, &partition).len()
        );
    }
    Ok(())
}
