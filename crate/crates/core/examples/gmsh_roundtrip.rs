//! Write a layer mesh as MSH 2.2, read it back and recover the lattice split.
//! Pass a path to keep the file.

use fembae::mesh::{build_annular_layer_mesh, enclosed_partition, parse_gmsh, write_gmsh, LayerSpec};

fn main() -> fembae::Result<()> {
    let (mesh, partition) = build_annular_layer_mesh(&LayerSpec::new(6.0, 1.0, 7.0))?;
    let text = write_gmsh(&mesh);
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, &text)?;
        println!("wrote {path}");
    }
    let back = parse_gmsh(&text)?;
    let recovered = enclosed_partition(&back)?;
    println!("nodes {} -> {}", mesh.nodes().len(), back.nodes().len());
    println!("triangles {} -> {}", mesh.triangles().len(), back.triangles().len());
    println!("same loop: {}", recovered.boundary_nodes() == partition.boundary_nodes());
    Ok(())
}
