//! Assembly of the interior FEM matrix, the exterior lattice matrix and the
//! scatterer load.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Cell, LatticeNode, NodePartition, UniformStencil};
use crate::mesh::Mesh;

/// Row-major sparse complex matrix indexed by node identifiers.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<I: Ord + Copy> {
    rows: BTreeMap<I, BTreeMap<I, Complex64>>,
}

impl<I: Ord + Copy> Default for SparseMatrix<I> {
    fn default() -> Self {
        SparseMatrix { rows: BTreeMap::new() }
    }
}

impl<I: Ord + Copy> SparseMatrix<I> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Accumulate `v` into entry `(r, c)`.
    pub fn add(&mut self, r: I, c: I, v: Complex64) {
        *self.rows.entry(r).or_default().entry(c).or_default() += v;
    }

    pub fn get(&self, r: I, c: I) -> Complex64 {
        self.rows
            .get(&r)
            .and_then(|row| row.get(&c))
            .copied()
            .unwrap_or_default()
    }

    pub fn row(&self, r: I) -> Option<&BTreeMap<I, Complex64>> {
        self.rows.get(&r)
    }

    pub fn rows(&self) -> impl Iterator<Item = (I, &BTreeMap<I, Complex64>)> {
        self.rows.iter().map(|(&r, row)| (r, row))
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.rows.values().map(BTreeMap::len).sum()
    }

    /// Complex symmetry (`a_jk = a_kj`, no conjugation) over pairs where both rows are stored.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows.iter().all(|(&r, row)| {
            row.iter().all(|(&c, &v)| match self.rows.get(&c) {
                Some(other) => (other.get(&r).copied().unwrap_or_default() - v).norm() <= tol,
                None => true,
            })
        })
    }

    pub fn mul_vec(&self, x: impl Fn(I) -> Complex64) -> BTreeMap<I, Complex64> {
        self.rows
            .iter()
            .map(|(&r, row)| (r, row.iter().map(|(&c, &v)| v * x(c)).sum()))
            .collect()
    }
}

/// `stiffness − (Kh)²·mass` for one linear triangle, coordinates in grid units.
pub fn triangle_matrix(p: [[f64; 2]; 3], kh: Complex64) -> Result<[[Complex64; 3]; 3]> {
    let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
    if area.abs() < 1e-14 {
        return Err(Error::Assembly(format!("degenerate triangle {p:?} (area {area:e})")));
    }
    let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
    let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
    let k2 = kh * kh;
    let a = area.abs();
    let mut m = [[Complex64::default(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let stiff = (b[i] * b[j] + c[i] * c[j]) / (4.0 * a);
            let mass = a / 12.0 * if i == j { 2.0 } else { 1.0 };
            m[i][j] = Complex64::new(stiff, 0.0) - k2 * mass;
        }
    }
    Ok(m)
}

/// `α^in` over the mesh nodes; the Neumann condition on the scatterer is natural.
pub fn assemble_interior(mesh: &Mesh, kh: Complex64) -> Result<SparseMatrix<usize>> {
    let mut out = SparseMatrix::new();
    for t in mesh.triangles() {
        let m = triangle_matrix(t.map(|k| mesh.nodes()[k]), kh)?;
        for i in 0..3 {
            for j in 0..3 {
                out.add(t[i], t[j], m[i][j]);
            }
        }
    }
    Ok(out)
}

/// Uniform bilinear assembly summed over the given cells.
pub fn assemble_cells<'a>(cells: impl IntoIterator<Item = &'a Cell>, stencil: &UniformStencil) -> SparseMatrix<LatticeNode> {
    let e = stencil.element_matrix();
    let mut out = SparseMatrix::new();
    for cell in cells {
        let nodes = cell.nodes();
        for a in 0..4 {
            for b in 0..4 {
                out.add(nodes[a], nodes[b], e[a][b]);
            }
        }
    }
    out
}

/// `α^ex` on the rows of `γ_o`, summed over exterior cells only.
pub fn assemble_exterior(partition: &NodePartition, stencil: &UniformStencil) -> SparseMatrix<LatticeNode> {
    let e = stencil.element_matrix();
    let mut out = SparseMatrix::new();
    for &j in partition.near_exterior_nodes() {
        for cell in j.cells() {
            if partition.is_interior_cell(cell) {
                continue;
            }
            let nodes = cell.nodes();
            let a = nodes.iter().position(|&n| n == j).unwrap();
            for b in 0..4 {
                out.add(j, nodes[b], e[a][b]);
            }
        }
    }
    out
}

/// How the scatterer load is formed from `cos(Nφ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ForceMode {
    /// `f_i = cos(Nφ_i)`.
    #[default]
    Nodal,
    /// Nodal values multiplied by the P1 line mass matrix of the scatterer polygon.
    BoundaryMass,
}

/// Load vector over the mesh nodes, nonzero on the scatterer only.
pub fn assemble_force(mesh: &Mesh, harmonic: u32, mode: ForceMode) -> Vec<Complex64> {
    let mut f = vec![Complex64::default(); mesh.nodes().len()];
    let g = |k: usize| (harmonic as f64 * mesh.polar_angle(k)).cos();
    let loop_ = mesh.gamma_in();
    match mode {
        ForceMode::Nodal => {
            for &k in loop_ {
                f[k] = Complex64::new(g(k), 0.0);
            }
        }
        ForceMode::BoundaryMass => {
            for e in 0..loop_.len() {
                let (a, b) = (loop_[e], loop_[(e + 1) % loop_.len()]);
                let [pa, pb] = [mesh.nodes()[a], mesh.nodes()[b]];
                let len = (pa[0] - pb[0]).hypot(pa[1] - pb[1]);
                f[a] += len / 6.0 * (2.0 * g(a) + g(b));
                f[b] += len / 6.0 * (2.0 * g(b) + g(a));
            }
        }
    }
    f
}
