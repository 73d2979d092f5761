//! Direct solution of the coupled and condensed systems and evaluation of
//! the field off the mesh.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::bae::{condition_1, BoundaryOperators, CMatrix, CVector, CoupledSystem, Dtn, Projector};
use crate::error::{Error, Result};
use crate::fem::SparseMatrix;
use crate::lattice::LatticeNode;
use crate::mesh::Mesh;

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledSolution {
    /// Field at every mesh node.
    pub u_in: Vec<Complex64>,
    /// Field on the coupling loop, in loop order.
    pub u_ex_boundary: Vec<Complex64>,
    /// Flux into the exterior on the coupling loop.
    pub h_ex: Vec<Complex64>,
    /// `‖Mx − r‖ / ‖r‖`.
    pub residual: f64,
}

fn lu_solve(m: &CMatrix, rhs: &CVector) -> Result<(CVector, f64)> {
    let x = m.clone().lu().solve(rhs).ok_or_else(|| {
        Error::Solver(format!("singular system (condition estimate {:.3e})", condition_1(m)))
    })?;
    if x.iter().any(|z| !z.is_finite()) {
        return Err(Error::Solver(format!(
            "nonfinite solution (condition estimate {:.3e})",
            condition_1(m)
        )));
    }
    let scale = rhs.norm();
    let residual = if scale > 0.0 { (m * &x - rhs).norm() / scale } else { (m * &x).norm() };
    Ok((x, residual))
}

/// Solve the block system by dense LU.
pub fn solve_coupled(system: &CoupledSystem) -> Result<CoupledSolution> {
    let (x, residual) = lu_solve(&system.matrix, &system.rhs)?;
    let (ng, ni) = (system.boundary_len, system.interior_len);
    Ok(CoupledSolution {
        u_ex_boundary: x.rows(0, ng).iter().copied().collect(),
        u_in: x.rows(ng, ni).iter().copied().collect(),
        h_ex: x.rows(ng + ni, ng).iter().copied().collect(),
        residual,
    })
}

/// Solve `(α^in + ΠᵀBΠ)u = f`.
pub fn solve_reduced(
    alpha_in: &SparseMatrix<usize>,
    b: &CMatrix,
    projector: &Projector,
    force: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = projector.width();
    if force.len() != n || b.shape() != (projector.len(), projector.len()) {
        return Err(Error::Assembly("reduced system dimensions do not match".into()));
    }
    let mut m = CMatrix::zeros(n, n);
    for (r, row) in alpha_in.rows() {
        for (&c, &v) in row {
            m[(r, c)] = v;
        }
    }
    for i in 0..projector.len() {
        for k in 0..projector.len() {
            m[(projector.column(i), projector.column(k))] += b[(i, k)];
        }
    }
    let (x, _) = lu_solve(&m, &CVector::from_column_slice(force))?;
    Ok(x.iter().copied().collect())
}

/// Solve the lattice-only problem with Neumann data on the coupling loop:
/// `Aᵀu = Cᵀf`. Returns the loop values.
pub fn solve_staircase(ops: &BoundaryOperators, force: &[Complex64]) -> Result<Vec<Complex64>> {
    if force.len() != ops.gamma_ex.len() {
        return Err(Error::Assembly("force length differs from the coupling loop".into()));
    }
    let rhs = ops.c.transpose() * CVector::from_column_slice(force);
    let (x, _) = lu_solve(&ops.a.transpose(), &rhs)?;
    Ok(x.iter().copied().collect())
}

/// `u_m = Σ_j (h_j G_{j,m} − u_j b_{j,m})` at each target.
pub fn exterior_field(
    u_boundary: &[Complex64],
    h_ex: &[Complex64],
    ops: &BoundaryOperators,
    targets: &[LatticeNode],
) -> Result<Vec<Complex64>> {
    targets
        .iter()
        .map(|&m| {
            let mut acc = Complex64::default();
            for (k, &j) in ops.gamma_ex.iter().enumerate() {
                acc += h_ex[k] * ops.greens.between(j, m)? - u_boundary[k] * ops.b_value(j, m)?;
            }
            Ok(acc)
        })
        .collect()
}

/// `u_m = Σ_j u_j (Σ_k B_{k,j} G_{k,m} − b_{j,m})` at each target.
pub fn exterior_field_dtn(
    u_boundary: &[Complex64],
    dtn: &Dtn,
    ops: &BoundaryOperators,
    targets: &[LatticeNode],
) -> Result<Vec<Complex64>> {
    let ng = ops.gamma_ex.len();
    targets
        .iter()
        .map(|&m| {
            let g: Vec<Complex64> = ops
                .gamma_ex
                .iter()
                .map(|&k| ops.greens.between(k, m))
                .collect::<Result<_>>()?;
            let mut acc = Complex64::default();
            for (jx, &j) in ops.gamma_ex.iter().enumerate() {
                let mut w = -ops.b_value(j, m)?;
                for (kx, gk) in g.iter().enumerate().take(ng) {
                    w += dtn.matrix[(kx, jx)] * gk;
                }
                acc += u_boundary[jx] * w;
            }
            Ok(acc)
        })
        .collect()
}

/// Lattice nodes nearest `samples` equally spaced points of a ring, without repeats.
pub fn ring_nodes(radius: f64, centre: [f64; 2], samples: usize) -> Vec<LatticeNode> {
    let mut out: Vec<LatticeNode> = Vec::new();
    for k in 0..samples {
        let phi = 2.0 * PI * k as f64 / samples as f64;
        let n = LatticeNode(
            (centre[0] + radius * phi.cos()).round() as i32,
            (centre[1] + radius * phi.sin()).round() as i32,
        );
        if !out.contains(&n) {
            out.push(n);
        }
    }
    out
}

/// `(angle, |u|/max|u|)` on the lattice nodes nearest a ring.
pub fn directivity(
    u_boundary: &[Complex64],
    h_ex: &[Complex64],
    ops: &mut BoundaryOperators,
    radius: f64,
    centre: [f64; 2],
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    let nodes = ring_nodes(radius, centre, samples);
    ops.prepare_targets(&nodes)?;
    let u = exterior_field(u_boundary, h_ex, ops, &nodes)?;
    let max = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(nodes
        .iter()
        .zip(&u)
        .map(|(n, z)| {
            let a = (n.1 as f64 - centre[1]).atan2(n.0 as f64 - centre[0]);
            let a = if a < 0.0 { a + 2.0 * PI } else { a };
            (a, if max > 0.0 { z.norm() / max } else { 0.0 })
        })
        .collect())
}

/// CSV of the mesh solution: `node,x,y,re,im`.
pub fn solution_csv(mesh: &Mesh, u: &[Complex64]) -> String {
    let mut s = String::from("node,x,y,re,im\n");
    for (k, ([x, y], z)) in mesh.nodes().iter().zip(u).enumerate() {
        let _ = writeln!(s, "{k},{x},{y},{:e},{:e}", z.re, z.im);
    }
    s
}

/// CSV of a directivity pattern: `angle,abs_u`.
pub fn directivity_csv(pattern: &[(f64, f64)]) -> String {
    let mut s = String::from("angle,abs_u\n");
    for (a, v) in pattern {
        let _ = writeln!(s, "{a},{v:e}");
    }
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bae::{assemble_coupled, build_projector, default_coupling};
    use crate::fem::{assemble_force, assemble_interior, ForceMode};
    use crate::greens::{GreensSettings, LimitingAbsorption, Quadrature};
    use crate::lattice::build_stencil;
    use crate::mesh::{build_annular_layer_mesh, LayerSpec};

    struct Setup {
        mesh: Mesh,
        ops: BoundaryOperators,
        alpha_in: SparseMatrix<usize>,
        projector: Projector,
    }

    fn setup(k: Complex64, eta: f64) -> Setup {
        let (mesh, partition) = build_annular_layer_mesh(&LayerSpec::new(3.0, 1.0, 4.0)).unwrap();
        let stencil = build_stencil(k, 1.0).unwrap();
        let settings = GreensSettings {
            absorption: eta,
            quadrature: Quadrature::Auto { tolerance: 1e-12 },
            limit: LimitingAbsorption::Exact,
        };
        let keff = k * Complex64::new(1.0, eta);
        let ops = BoundaryOperators::build(&partition, &stencil, &settings, default_coupling(keff)).unwrap();
        let alpha_in = assemble_interior(&mesh, keff).unwrap();
        let projector = build_projector(&mesh, &partition).unwrap();
        Setup {
            mesh,
            ops,
            alpha_in,
            projector,
        }
    }

    #[test]
    fn coupled_and_reduced_paths_agree() {
        let s = setup(Complex64::new(0.7, 0.0), 0.0);
        let f = assemble_force(&s.mesh, 2, ForceMode::Nodal);
        let sys = assemble_coupled(&s.ops.a, &s.ops.c, &s.alpha_in, &s.projector, &f).unwrap();
        let sol = solve_coupled(&sys).unwrap();
        assert!(sol.residual < 1e-10);
        let dtn = s.ops.dtn().unwrap();
        let reduced = solve_reduced(&s.alpha_in, &dtn.matrix, &s.projector, &f).unwrap();
        let scale = sol.u_in.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in sol.u_in.iter().zip(&reduced) {
            assert!((a - b).norm() < 1e-10 * scale);
        }
        // trace continuity and flux–DtN consistency
        for (k, &u) in sol.u_ex_boundary.iter().enumerate() {
            assert!((u - sol.u_in[s.projector.column(k)]).norm() < 1e-10 * scale);
        }
        let bu = &dtn.matrix * CVector::from_column_slice(&sol.u_ex_boundary);
        let h = CVector::from_column_slice(&sol.h_ex);
        assert!((bu - &h).norm() / h.norm() < 1e-8);
    }

    #[test]
    fn zero_force_and_linearity() {
        let s = setup(Complex64::new(0.5, 0.0), 0.0);
        let zero = vec![Complex64::default(); s.mesh.nodes().len()];
        let sys = assemble_coupled(&s.ops.a, &s.ops.c, &s.alpha_in, &s.projector, &zero).unwrap();
        let sol = solve_coupled(&sys).unwrap();
        assert!(sol.u_in.iter().all(|z| z.norm() == 0.0));

        let f = assemble_force(&s.mesh, 1, ForceMode::Nodal);
        let f2: Vec<Complex64> = f.iter().map(|z| z * 2.0).collect();
        let one = solve_coupled(&assemble_coupled(&s.ops.a, &s.ops.c, &s.alpha_in, &s.projector, &f).unwrap()).unwrap();
        let two = solve_coupled(&assemble_coupled(&s.ops.a, &s.ops.c, &s.alpha_in, &s.projector, &f2).unwrap()).unwrap();
        let scale = one.u_in.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in one.u_in.iter().zip(&two.u_in) {
            assert!((2.0 * a - b).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn pure_neumann_when_dtn_vanishes() {
        let k = Complex64::new(0.6, 0.3);
        let s = setup(k, 0.0);
        let f = assemble_force(&s.mesh, 0, ForceMode::Nodal);
        let zero = CMatrix::zeros(s.projector.len(), s.projector.len());
        let u = solve_reduced(&s.alpha_in, &zero, &s.projector, &f).unwrap();
        let n = s.mesh.nodes().len();
        let mut m = CMatrix::zeros(n, n);
        for (r, row) in s.alpha_in.rows() {
            for (&c, &v) in row {
                m[(r, c)] = v;
            }
        }
        let direct = m.lu().solve(&CVector::from_column_slice(&f)).unwrap();
        for (a, b) in u.iter().zip(direct.iter()) {
            assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
        }
    }

    #[test]
    fn representation_forms_agree_and_reproduce_the_trace() {
        let mut s = setup(Complex64::new(0.8, 0.0), 0.0);
        let f = assemble_force(&s.mesh, 1, ForceMode::Nodal);
        let sol = solve_coupled(&assemble_coupled(&s.ops.a, &s.ops.c, &s.alpha_in, &s.projector, &f).unwrap()).unwrap();
        let dtn = s.ops.dtn().unwrap();
        let mut targets = ring_nodes(9.0, [0.0, 0.0], 40);
        targets.extend(s.ops.gamma_ex.iter().copied());
        s.ops.prepare_targets(&targets).unwrap();
        let a = exterior_field(&sol.u_ex_boundary, &sol.h_ex, &s.ops, &targets).unwrap();
        let b = exterior_field_dtn(&sol.u_ex_boundary, &dtn, &s.ops, &targets).unwrap();
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-10 * scale);
        }
        let on = &a[a.len() - s.ops.gamma_ex.len()..];
        for (x, y) in on.iter().zip(&sol.u_ex_boundary) {
            assert!((x - y).norm() < 1e-8 * scale);
        }
    }

    #[test]
    fn csv_headers() {
        let s = setup(Complex64::new(0.5, 0.0), 0.0);
        let u = vec![Complex64::new(1.0, -1.0); s.mesh.nodes().len()];
        let csv = solution_csv(&s.mesh, &u);
        assert!(csv.starts_with("node,x,y,re,im\n0,3,0,1e0,-1e0\n"));
        assert_eq!(directivity_csv(&[(0.0, 1.0)]), "angle,abs_u\n0,1e0\n");
    }
}
