//! Tabulate the lattice Green's function and check the stencil equation it solves.

use fembae::greens::{tabulate_greens, GreensSettings};
use fembae::lattice::{build_stencil, Offset};
use num_complex::Complex64;

fn main() -> fembae::Result<()> {
    let stencil = build_stencil(Complex64::new(0.5, 0.0), 1.0)?;
    let offsets: Vec<Offset> = (-6..=6).flat_map(|a| (-6..=6).map(move |b| Offset(a, b))).collect();
    let table = tabulate_greens(&stencil, offsets, &GreensSettings::default())?;
    println!("{} representatives, {} panels", table.len(), table.panels());
    for o in [Offset(0, 0), Offset(1, 0), Offset(3, 2), Offset(6, 0)] {
        println!("G{o:?} = {:.10}", table.get(o)?);
    }
    let mut worst: f64 = 0.0;
    for a in -5..=5 {
        for b in -5..=5 {
            let mut r = Complex64::new(if (a, b) == (0, 0) { -1.0 } else { 0.0 }, 0.0);
            for (s, beta) in stencil.entries() {
                r += beta * table.get(Offset(a + s.0, b + s.1))?;
            }
            worst = worst.max(r.norm());
        }
    }
    println!("max residual of Σβ·G − δ: {worst:.2e}");
    Ok(())
}
