//! Boundary algebraic equations on the coupling loop: the combined-field
//! operators `A` and `C`, the discrete Dirichlet-to-Neumann matrix and the
//! coupled block system.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::SparseMatrix;
use crate::greens::{compute_b, pair_offsets, GreensSettings, GreensTable};
use crate::lattice::{LatticeNode, NodePartition, UniformStencil};
use crate::mesh::{validate_interface, Mesh};

/// Largest accepted condition estimate of `C`.
pub const CONDITION_LIMIT: f64 = 1e12;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Coupling parameter `ν = i/K`.
pub fn default_coupling(wavenumber: Complex64) -> Complex64 {
    Complex64::i() / wavenumber
}

/// Selects coupling-loop entries of a vector over the mesh nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projector {
    columns: Vec<usize>,
    width: usize,
}

impl Projector {
    pub fn new(columns: Vec<usize>, width: usize) -> Result<Projector> {
        let mut seen = vec![false; width];
        for &c in &columns {
            if c >= width || std::mem::replace(&mut seen[c], true) {
                return Err(Error::Interface(format!("projector column {c} is out of range or repeated")));
            }
        }
        Ok(Projector { columns, width })
    }

    /// Number of coupling-loop rows.
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Number of mesh-node columns.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn column(&self, row: usize) -> usize {
        self.columns[row]
    }

    pub fn apply<T: Copy>(&self, x: &[T]) -> Vec<T> {
        self.columns.iter().map(|&c| x[c]).collect()
    }

    pub fn apply_transpose(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.width];
        for (&c, &v) in self.columns.iter().zip(y) {
            out[c] += v;
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.len(), self.width);
        for (r, &c) in self.columns.iter().enumerate() {
            m[(r, c)] = 1.0;
        }
        m
    }
}

/// Map each coupling-loop node of the partition to its mesh node.
pub fn build_projector(mesh: &Mesh, partition: &NodePartition) -> Result<Projector> {
    let problems = validate_interface(mesh, partition);
    if !problems.is_empty() {
        return Err(Error::Interface(problems.join("; ")));
    }
    Projector::new(mesh.gamma_ex().iter().map(|g| g.node).collect(), mesh.nodes().len())
}

/// `b_{j,n}` for `j` on the coupling loop and `n` in `γ_o`.
#[derive(Clone, Debug)]
pub struct BTable {
    rows: BTreeMap<LatticeNode, usize>,
    cols: BTreeMap<LatticeNode, usize>,
    values: CMatrix,
}

impl BTable {
    pub fn get(&self, j: LatticeNode, n: LatticeNode) -> Result<Complex64> {
        match (self.rows.get(&j), self.cols.get(&n)) {
            (Some(&r), Some(&c)) => Ok(self.values[(r, c)]),
            _ => Err(Error::IncompleteTable(n.0 - j.0, n.1 - j.1)),
        }
    }
}

pub fn tabulate_b(
    table: &GreensTable,
    alpha_ex: &SparseMatrix<LatticeNode>,
    rows: &[LatticeNode],
    cols: &[LatticeNode],
) -> Result<BTable> {
    let mut values = CMatrix::zeros(rows.len(), cols.len());
    for (r, &j) in rows.iter().enumerate() {
        for (c, &n) in cols.iter().enumerate() {
            values[(r, c)] = compute_b(table, alpha_ex, j, n)?;
        }
    }
    Ok(BTable {
        rows: rows.iter().enumerate().map(|(k, &n)| (n, k)).collect(),
        cols: cols.iter().enumerate().map(|(k, &n)| (n, k)).collect(),
        values,
    })
}

/// `A_{j,m} = δ_{j,m} + b_{j,m} + ν Σ_n b_{j,n} α^ex_{n,m}`, sums over `γ_o`.
pub fn build_a(
    b: &BTable,
    alpha_ex: &SparseMatrix<LatticeNode>,
    gamma_ex: &[LatticeNode],
    nu: Complex64,
) -> Result<CMatrix> {
    let mut a = CMatrix::zeros(gamma_ex.len(), gamma_ex.len());
    for (r, &j) in gamma_ex.iter().enumerate() {
        for (c, &m) in gamma_ex.iter().enumerate() {
            let mut v = b.get(j, m)?;
            if r == c {
                v += 1.0;
            }
            for &n in column_support(alpha_ex, m)?.keys() {
                v += nu * b.get(j, n)? * alpha_ex.get(n, m);
            }
            a[(r, c)] = v;
        }
    }
    Ok(a)
}

/// `C_{j,m} = −ν δ_{j,m} + G_{j,m} + ν Σ_n G_{j,n} α^ex_{n,m}`, sums over `γ_o`.
pub fn build_c(
    greens: &GreensTable,
    alpha_ex: &SparseMatrix<LatticeNode>,
    gamma_ex: &[LatticeNode],
    nu: Complex64,
) -> Result<CMatrix> {
    let mut c = CMatrix::zeros(gamma_ex.len(), gamma_ex.len());
    for (r, &j) in gamma_ex.iter().enumerate() {
        for (col, &m) in gamma_ex.iter().enumerate() {
            let mut v = greens.between(j, m)?;
            if r == col {
                v -= nu;
            }
            for &n in column_support(alpha_ex, m)?.keys() {
                v += nu * greens.between(j, n)? * alpha_ex.get(n, m);
            }
            c[(r, col)] = v;
        }
    }
    Ok(c)
}

// α^ex is symmetric, so the nonzero rows of column m are the columns of row m
fn column_support(alpha_ex: &SparseMatrix<LatticeNode>, m: LatticeNode) -> Result<&BTreeMap<LatticeNode, Complex64>> {
    alpha_ex
        .row(m)
        .ok_or_else(|| Error::Assembly(format!("exterior matrix has no row for node {m}")))
}

/// `‖M‖₁`, the largest column sum.
pub fn norm_1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖M‖₁·‖M⁻¹‖₁` from an LU inverse; infinite when singular.
pub fn condition_1(m: &CMatrix) -> f64 {
    match m.clone().lu().try_inverse() {
        Some(inv) => {
            let k = norm_1(m) * norm_1(&inv);
            if k.is_finite() {
                k
            } else {
                f64::INFINITY
            }
        }
        None => f64::INFINITY,
    }
}

/// Discrete Dirichlet-to-Neumann map and diagnostics.
#[derive(Clone, Debug)]
pub struct Dtn {
    pub matrix: CMatrix,
    pub condition: f64,
    /// `‖Cᵀ·B − Aᵀ‖ / ‖Aᵀ‖` in the Frobenius norm.
    pub residual: f64,
}

/// `B = (A C⁻¹)ᵀ`, obtained by solving `Cᵀ·B = Aᵀ`.
pub fn build_dtn(a: &CMatrix, c: &CMatrix) -> Result<Dtn> {
    if a.shape() != c.shape() || !a.is_square() {
        return Err(Error::Assembly(format!("A is {:?} but C is {:?}", a.shape(), c.shape())));
    }
    let condition = condition_1(c);
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::NearSingular { condition });
    }
    let ct = c.transpose();
    let at = a.transpose();
    let matrix = ct
        .clone()
        .lu()
        .solve(&at)
        .ok_or(Error::NearSingular { condition })?;
    let residual = (&ct * &matrix - &at).norm() / at.norm();
    Ok(Dtn {
        matrix,
        condition,
        residual,
    })
}

/// Everything the exterior side contributes for one partition and stencil.
#[derive(Clone, Debug)]
pub struct BoundaryOperators {
    pub gamma_ex: Vec<LatticeNode>,
    pub gamma_o: Vec<LatticeNode>,
    pub alpha_ex: SparseMatrix<LatticeNode>,
    pub greens: GreensTable,
    pub b: BTable,
    pub a: CMatrix,
    pub c: CMatrix,
    pub nu: Complex64,
}

impl BoundaryOperators {
    /// Tabulate `G` and `b` and build `A`, `C` for coupling parameter `ν`.
    pub fn build(
        partition: &NodePartition,
        stencil: &UniformStencil,
        settings: &GreensSettings,
        nu: Complex64,
    ) -> Result<BoundaryOperators> {
        let gamma_o: Vec<LatticeNode> = partition.near_exterior_nodes().iter().copied().collect();
        let offsets = pair_offsets(&gamma_o, &gamma_o);
        let greens = crate::greens::tabulate_with_env_cache(stencil, offsets, settings)?;
        Self::from_table(partition, greens, nu)
    }

    /// As [`BoundaryOperators::build`] with a table covering `γ_o × γ_o`.
    pub fn from_table(
        partition: &NodePartition,
        greens: GreensTable,
        nu: Complex64,
    ) -> Result<BoundaryOperators> {
        let gamma_ex = partition.boundary_nodes().to_vec();
        let gamma_o: Vec<LatticeNode> = partition.near_exterior_nodes().iter().copied().collect();
        let stencil = crate::greens::effective_stencil(greens.stencil(), greens.absorption())?;
        let alpha_ex = crate::fem::assemble_exterior(partition, &stencil);
        let b = tabulate_b(&greens, &alpha_ex, &gamma_ex, &gamma_o)?;
        let a = build_a(&b, &alpha_ex, &gamma_ex, nu)?;
        let c = build_c(&greens, &alpha_ex, &gamma_ex, nu)?;
        Ok(BoundaryOperators {
            gamma_ex,
            gamma_o,
            alpha_ex,
            greens,
            b,
            a,
            c,
            nu,
        })
    }

    pub fn dtn(&self) -> Result<Dtn> {
        build_dtn(&self.a, &self.c)
    }

    /// `b_{j,m}` for a coupling-loop node `j` and any lattice node `m`.
    pub fn b_value(&self, j: LatticeNode, m: LatticeNode) -> Result<Complex64> {
        match self.b.get(j, m) {
            Ok(v) => Ok(v),
            Err(_) => compute_b(&self.greens, &self.alpha_ex, j, m),
        }
    }

    /// Tabulate the extra offsets needed to evaluate the field at `targets`.
    pub fn prepare_targets(&mut self, targets: &[LatticeNode]) -> Result<()> {
        let offsets = pair_offsets(&self.gamma_o, targets);
        self.greens.extend(offsets)
    }
}

/// Block system in the unknowns `(u^ex, u^in, h^ex)`.
#[derive(Clone, Debug)]
pub struct CoupledSystem {
    pub matrix: CMatrix,
    pub rhs: CVector,
    pub boundary_len: usize,
    pub interior_len: usize,
}

/// Rows: `Aᵀu^ex − Cᵀh^ex = 0`, `α^in u^in + Πᵀh^ex = f`, `u^ex − Πu^in = 0`.
pub fn assemble_coupled(
    a: &CMatrix,
    c: &CMatrix,
    alpha_in: &SparseMatrix<usize>,
    projector: &Projector,
    force: &[Complex64],
) -> Result<CoupledSystem> {
    let ng = projector.len();
    let ni = projector.width();
    if a.shape() != (ng, ng) || c.shape() != (ng, ng) {
        return Err(Error::Assembly(format!(
            "boundary blocks {:?}, {:?} do not match {ng} coupling nodes",
            a.shape(),
            c.shape()
        )));
    }
    if force.len() != ni {
        return Err(Error::Assembly(format!("force has {} entries, mesh has {ni} nodes", force.len())));
    }
    let n = 2 * ng + ni;
    let (u_in, h) = (ng, ng + ni);
    let mut m = CMatrix::zeros(n, n);
    for r in 0..ng {
        for col in 0..ng {
            m[(r, col)] = a[(col, r)];
            m[(r, h + col)] = -c[(col, r)];
        }
    }
    for (r, row) in alpha_in.rows() {
        if r >= ni {
            return Err(Error::Assembly(format!("interior matrix row {r} outside {ni} nodes")));
        }
        for (&col, &v) in row {
            m[(u_in + r, u_in + col)] = v;
        }
    }
    for k in 0..ng {
        let col = projector.column(k);
        m[(u_in + col, h + k)] += Complex64::new(1.0, 0.0);
        m[(h + k, k)] = Complex64::new(1.0, 0.0);
        m[(h + k, u_in + col)] = Complex64::new(-1.0, 0.0);
    }
    let mut rhs = CVector::zeros(n);
    for (k, &f) in force.iter().enumerate() {
        rhs[u_in + k] = f;
    }
    Ok(CoupledSystem {
        matrix: m,
        rhs,
        boundary_len: ng,
        interior_len: ni,
    })
}

/// Text dump: a `rows cols` header then one `row col re im` line per nonzero.
pub fn matrix_to_text(m: &CMatrix) -> String {
    let mut s = format!("{} {}\n", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let v = m[(r, c)];
            if v != Complex64::default() {
                let _ = writeln!(s, "{r} {c} {:e} {:e}", v.re, v.im);
            }
        }
    }
    s
}

pub fn dump_matrix(m: &CMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, matrix_to_text(m))?;
    Ok(())
}
