//! The infinite uniform square mesh: bilinear FEM stencil and the
//! classification of lattice cells and nodes into interior, boundary and
//! near-exterior sets.
//!
//! Node `(i, j)` sits at `(i·h, j·h)`. Cell `(i, j)` is the square
//! `[i, i+1] × [j, j+1]` in grid units.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A node of the integer lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeNode(pub i32, pub i32);

/// A unit cell, identified by its lower-left node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell(pub i32, pub i32);

/// Difference of two lattice nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Offset(pub i32, pub i32);

impl LatticeNode {
    pub fn coords(self, grid_spacing: f64) -> [f64; 2] {
        [self.0 as f64 * grid_spacing, self.1 as f64 * grid_spacing]
    }

    /// The four cells sharing this node.
    pub fn cells(self) -> [Cell; 4] {
        let LatticeNode(i, j) = self;
        [Cell(i - 1, j - 1), Cell(i, j - 1), Cell(i, j), Cell(i - 1, j)]
    }

    pub fn offset_to(self, other: LatticeNode) -> Offset {
        Offset(other.0 - self.0, other.1 - self.1)
    }

    pub fn shifted(self, o: Offset) -> LatticeNode {
        LatticeNode(self.0 + o.0, self.1 + o.1)
    }
}

impl fmt::Display for LatticeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

impl Cell {
    /// Corner nodes in counterclockwise order starting at the lower-left.
    pub fn nodes(self) -> [LatticeNode; 4] {
        let Cell(i, j) = self;
        [
            LatticeNode(i, j),
            LatticeNode(i + 1, j),
            LatticeNode(i + 1, j + 1),
            LatticeNode(i, j + 1),
        ]
    }

    fn edge_neighbours(self) -> [Cell; 4] {
        let Cell(i, j) = self;
        [Cell(i, j - 1), Cell(i + 1, j), Cell(i, j + 1), Cell(i - 1, j)]
    }
}

impl std::ops::Neg for Offset {
    type Output = Offset;
    fn neg(self) -> Offset {
        Offset(-self.0, -self.1)
    }
}

impl Offset {
    /// Representative of the orbit under the square's dihedral group:
    /// `(a, b)` with `a ≥ b ≥ 0`.
    pub fn canonical(self) -> Offset {
        let a = self.0.abs();
        let b = self.1.abs();
        if a >= b {
            Offset(a, b)
        } else {
            Offset(b, a)
        }
    }

    /// The eight images of this offset under the dihedral group (with repeats).
    pub fn orbit(self) -> [Offset; 8] {
        let Offset(a, b) = self;
        [
            Offset(a, b),
            Offset(-a, b),
            Offset(a, -b),
            Offset(-a, -b),
            Offset(b, a),
            Offset(-b, a),
            Offset(b, -a),
            Offset(-b, -a),
        ]
    }
}

/// Bilinear element matrices on a square of side `h`, local nodes ordered
/// counterclockwise from the lower-left corner.
fn bilinear_element(wavenumber: Complex64, grid_spacing: f64) -> [[Complex64; 4]; 4] {
    // stiffness is scale free in 2D; mass scales with h²
    const STIFF: [[f64; 4]; 4] = [
        [4.0, -1.0, -2.0, -1.0],
        [-1.0, 4.0, -1.0, -2.0],
        [-2.0, -1.0, 4.0, -1.0],
        [-1.0, -2.0, -1.0, 4.0],
    ];
    const MASS: [[f64; 4]; 4] = [
        [4.0, 2.0, 1.0, 2.0],
        [2.0, 4.0, 2.0, 1.0],
        [1.0, 2.0, 4.0, 2.0],
        [2.0, 1.0, 2.0, 4.0],
    ];
    let k2h2 = wavenumber * wavenumber * grid_spacing * grid_spacing;
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            m[a][b] = Complex64::new(STIFF[a][b] / 6.0, 0.0) - k2h2 * (MASS[a][b] / 36.0);
        }
    }
    m
}

/// Translation-invariant 9-point coefficients of `stiffness − K²·mass` for
/// bilinear quadrilaterals on the uniform square mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformStencil {
    grid_spacing: f64,
    wavenumber: Complex64,
    /// `coefficients[dx + 1][dy + 1]`
    coefficients: [[Complex64; 3]; 3],
    element: [[Complex64; 4]; 4],
}

impl UniformStencil {
    pub fn grid_spacing(&self) -> f64 {
        self.grid_spacing
    }

    pub fn wavenumber(&self) -> Complex64 {
        self.wavenumber
    }

    /// Dimensionless wavenumber `K·h`; the stencil depends on nothing else.
    pub fn kh(&self) -> Complex64 {
        self.wavenumber * self.grid_spacing
    }

    pub fn coefficient(&self, o: Offset) -> Complex64 {
        if o.0.abs() > 1 || o.1.abs() > 1 {
            return Complex64::new(0.0, 0.0);
        }
        self.coefficients[(o.0 + 1) as usize][(o.1 + 1) as usize]
    }

    /// The nine offsets of the stencil with their coefficients.
    pub fn entries(&self) -> impl Iterator<Item = (Offset, Complex64)> + '_ {
        (-1..=1).flat_map(move |dx| {
            (-1..=1).map(move |dy| (Offset(dx, dy), self.coefficient(Offset(dx, dy))))
        })
    }

    /// Element matrix of one cell, local nodes as in [`Cell::nodes`].
    pub fn element_matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.element
    }

    /// `Σ_o β(o)·exp(i·o·ξ)`.
    pub fn symbol(&self, xi: [f64; 2]) -> Complex64 {
        self.entries()
            .map(|(o, c)| c * Complex64::from_polar(1.0, o.0 as f64 * xi[0] + o.1 as f64 * xi[1]))
            .sum()
    }

    /// Bit pattern of the coefficients, used to key cached tables.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        for (_, c) in self.entries() {
            hasher.update(c.re.to_bits().to_le_bytes());
            hasher.update(c.im.to_bits().to_le_bytes());
        }
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Assemble the bilinear stencil for wavenumber `K` and spacing `h`.
pub fn build_stencil(wavenumber: Complex64, grid_spacing: f64) -> Result<UniformStencil> {
    if !(grid_spacing > 0.0) || !grid_spacing.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "grid spacing must be positive, got {grid_spacing}"
        )));
    }
    if !(wavenumber.re > 0.0) || !(wavenumber.im >= 0.0) || !wavenumber.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "wavenumber needs Re(K) > 0 and Im(K) ≥ 0, got {wavenumber}"
        )));
    }
    Ok(stencil_unchecked(wavenumber, grid_spacing))
}

/// Same as [`build_stencil`] but accepts `K = 0` (the pure stiffness stencil).
pub(crate) fn stencil_unchecked(wavenumber: Complex64, grid_spacing: f64) -> UniformStencil {
    let element = bilinear_element(wavenumber, grid_spacing);
    let mut coefficients = [[Complex64::new(0.0, 0.0); 3]; 3];
    // the centre node is local node `l` of the four cells around it
    let centre = LatticeNode(0, 0);
    for cell in centre.cells() {
        let nodes = cell.nodes();
        let l = nodes.iter().position(|&n| n == centre).unwrap();
        for (k, &n) in nodes.iter().enumerate() {
            coefficients[(n.0 + 1) as usize][(n.1 + 1) as usize] += element[l][k];
        }
    }
    UniformStencil {
        grid_spacing,
        wavenumber,
        coefficients,
        element,
    }
}

/// Cells of the uniform mesh split into the interior block and everything else.
#[derive(Clone, Debug, PartialEq)]
pub struct NodePartition {
    interior_cells: BTreeSet<Cell>,
    interior_nodes: BTreeSet<LatticeNode>,
    near_exterior_nodes: BTreeSet<LatticeNode>,
    boundary_nodes: Vec<LatticeNode>,
    boundary_index: BTreeMap<LatticeNode, usize>,
}

impl NodePartition {
    pub fn interior_cells(&self) -> &BTreeSet<Cell> {
        &self.interior_cells
    }

    /// Nodes touching at least one interior cell.
    pub fn interior_nodes(&self) -> &BTreeSet<LatticeNode> {
        &self.interior_nodes
    }

    /// Exterior nodes of the cells that touch the boundary, boundary included.
    pub fn near_exterior_nodes(&self) -> &BTreeSet<LatticeNode> {
        &self.near_exterior_nodes
    }

    /// Boundary loop, counterclockwise from the lexicographically smallest node.
    pub fn boundary_nodes(&self) -> &[LatticeNode] {
        &self.boundary_nodes
    }

    pub fn boundary_position(&self, n: LatticeNode) -> Option<usize> {
        self.boundary_index.get(&n).copied()
    }

    pub fn is_interior_cell(&self, c: Cell) -> bool {
        self.interior_cells.contains(&c)
    }

    /// Node belongs to some exterior cell.
    pub fn is_exterior_node(&self, n: LatticeNode) -> bool {
        n.cells().iter().any(|c| !self.is_interior_cell(*c))
    }

    pub fn is_boundary_node(&self, n: LatticeNode) -> bool {
        self.boundary_index.contains_key(&n)
    }
}

/// Classify the lattice given the set of interior cells.
pub fn build_partition(interior_cells: &BTreeSet<Cell>) -> Result<NodePartition> {
    check_topology(interior_cells)?;

    let interior_nodes: BTreeSet<LatticeNode> =
        interior_cells.iter().flat_map(|c| c.nodes()).collect();
    let is_interior = |c: &Cell| interior_cells.contains(c);

    // directed boundary edges, counterclockwise around the union
    let mut next: BTreeMap<LatticeNode, LatticeNode> = BTreeMap::new();
    for &cell in interior_cells {
        let nodes = cell.nodes();
        for (e, across) in cell.edge_neighbours().iter().enumerate() {
            if !is_interior(across) {
                next.insert(nodes[e], nodes[(e + 1) % 4]);
            }
        }
    }
    let start = *next.keys().next().expect("nonempty cell set has a boundary");
    let mut boundary_nodes = vec![start];
    let mut cur = next[&start];
    while cur != start {
        boundary_nodes.push(cur);
        cur = next[&cur];
        if boundary_nodes.len() > next.len() {
            return Err(Error::Topology("boundary edges do not close into a loop".into()));
        }
    }
    if boundary_nodes.len() != next.len() {
        return Err(Error::Topology(format!(
            "boundary splits into several loops ({} of {} edges on the first)",
            boundary_nodes.len(),
            next.len()
        )));
    }

    let mut near_exterior_nodes = BTreeSet::new();
    for &n in &boundary_nodes {
        for c in n.cells() {
            if !is_interior(&c) {
                near_exterior_nodes.extend(c.nodes());
            }
        }
    }

    let boundary_index = boundary_nodes.iter().enumerate().map(|(k, &n)| (n, k)).collect();
    Ok(NodePartition {
        interior_cells: interior_cells.clone(),
        interior_nodes,
        near_exterior_nodes,
        boundary_nodes,
        boundary_index,
    })
}

fn check_topology(cells: &BTreeSet<Cell>) -> Result<()> {
    let first = match cells.iter().next() {
        Some(c) => *c,
        None => return Err(Error::Topology("interior cell set is empty".into())),
    };

    // edge-connected
    let mut seen = BTreeSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some(c) = queue.pop_front() {
        for n in c.edge_neighbours() {
            if cells.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    if seen.len() != cells.len() {
        return Err(Error::Topology(format!(
            "interior cells are disconnected ({} of {} reachable)",
            seen.len(),
            cells.len()
        )));
    }

    // no two cells meeting only at a corner
    for c in cells {
        for n in c.nodes() {
            let around = n.cells().map(|q| cells.contains(&q));
            let diagonal = (around[0] && around[2] && !around[1] && !around[3])
                || (around[1] && around[3] && !around[0] && !around[2]);
            if diagonal {
                return Err(Error::Topology(format!("cells pinch at node {n}")));
            }
        }
    }

    // complement connected inside a padded bounding box (no holes)
    let (mut i0, mut i1, mut j0, mut j1) = (first.0, first.0, first.1, first.1);
    for c in cells {
        i0 = i0.min(c.0);
        i1 = i1.max(c.0);
        j0 = j0.min(c.1);
        j1 = j1.max(c.1);
    }
    let (i0, i1, j0, j1) = (i0 - 1, i1 + 1, j0 - 1, j1 + 1);
    let in_box = |c: &Cell| c.0 >= i0 && c.0 <= i1 && c.1 >= j0 && c.1 <= j1;
    let total_outside = ((i1 - i0 + 1) as usize) * ((j1 - j0 + 1) as usize) - cells.len();
    let seed = Cell(i0, j0);
    let mut seen = BTreeSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    while let Some(c) = queue.pop_front() {
        for n in c.edge_neighbours() {
            if in_box(&n) && !cells.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    if seen.len() != total_outside {
        return Err(Error::Topology(format!(
            "interior cells enclose {} exterior cell(s)",
            total_outside - seen.len()
        )));
    }
    Ok(())
}

/// Cells meeting the open disk of `radius` (grid units) about `centre`.
///
/// The boundary of the union stays at distance ≥ `radius` from the centre.
pub fn staircase_hull(radius: f64, centre: [f64; 2]) -> BTreeSet<Cell> {
    let reach = radius.ceil() as i32 + 2;
    let (ci, cj) = (centre[0].floor() as i32, centre[1].floor() as i32);
    let mut cells = BTreeSet::new();
    for i in ci - reach..=ci + reach {
        for j in cj - reach..=cj + reach {
            let dx = (centre[0] - centre[0].clamp(i as f64, i as f64 + 1.0)).abs();
            let dy = (centre[1] - centre[1].clamp(j as f64, j as f64 + 1.0)).abs();
            if dx.hypot(dy) < radius {
                cells.insert(Cell(i, j));
            }
        }
    }
    cells
}

/// Cells of the `nx × ny` rectangle with lower-left node `origin`.
pub fn rectangle_cells(origin: LatticeNode, nx: i32, ny: i32) -> BTreeSet<Cell> {
    (0..nx)
        .flat_map(|i| (0..ny).map(move |j| Cell(origin.0 + i, origin.1 + j)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn static_stencil_is_bilinear_laplacian() {
        let s = stencil_unchecked(c(0.0), 1.0);
        assert!((s.coefficient(Offset(0, 0)) - c(8.0 / 3.0)).norm() < 1e-15);
        for o in [Offset(1, 0), Offset(0, 1), Offset(-1, 0), Offset(0, -1)] {
            assert!((s.coefficient(o) - c(-1.0 / 3.0)).norm() < 1e-15);
        }
        for o in [Offset(1, 1), Offset(-1, 1), Offset(1, -1), Offset(-1, -1)] {
            assert!((s.coefficient(o) - c(-1.0 / 3.0)).norm() < 1e-15);
        }
        let total: Complex64 = s.entries().map(|(_, v)| v).sum();
        assert!(total.norm() < 1e-15);
    }

    #[test]
    fn centre_mass_entry() {
        let s = build_stencil(c(1.0), 1.0).unwrap();
        let expected = 8.0 / 3.0 - 4.0 / 9.0;
        assert!((s.coefficient(Offset(0, 0)) - c(expected)).norm() < 1e-15);
        // edge 2·(2/36), corner 1/36
        assert!((s.coefficient(Offset(1, 0)) - c(-1.0 / 3.0 - 4.0 / 36.0)).norm() < 1e-15);
        assert!((s.coefficient(Offset(1, 1)) - c(-1.0 / 3.0 - 1.0 / 36.0)).norm() < 1e-15);
    }

    #[test]
    fn stencil_depends_only_on_kh() {
        let a = build_stencil(c(0.5), 2.0).unwrap();
        let b = build_stencil(c(1.0), 1.0).unwrap();
        for (o, v) in a.entries() {
            assert!((v - b.coefficient(o)).norm() < 1e-15);
        }
    }

    #[test]
    fn stencil_rejects_bad_parameters() {
        assert!(matches!(build_stencil(c(1.0), 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_stencil(c(-1.0), 1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            build_stencil(Complex64::new(1.0, -0.1), 1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn symbol_values() {
        let s = stencil_unchecked(c(0.0), 1.0);
        assert!(s.symbol([0.0, 0.0]).norm() < 1e-15);
        let brute: Complex64 = s
            .entries()
            .map(|(o, v)| v * if (o.0 + o.1) % 2 == 0 { 1.0 } else { -1.0 })
            .sum();
        assert!((s.symbol([PI, PI]) - brute).norm() < 1e-13);
        let k = build_stencil(Complex64::new(0.7, 0.1), 1.0).unwrap();
        let xi = [0.3, -1.2];
        assert!((k.symbol(xi) - k.symbol([-xi[0], -xi[1]])).norm() < 1e-13);
    }

    #[test]
    fn static_symbol_is_positive_away_from_origin() {
        let s = stencil_unchecked(c(0.0), 1.0);
        let n = 41;
        for a in 0..n {
            for b in 0..n {
                let xi = [-PI + 2.0 * PI * a as f64 / (n - 1) as f64, -PI + 2.0 * PI * b as f64 / (n - 1) as f64];
                let v = s.symbol(xi);
                assert!(v.im.abs() < 1e-14);
                if xi[0].abs() + xi[1].abs() > 1e-12 {
                    assert!(v.re > 0.0, "symbol {v} at {xi:?}");
                }
            }
        }
    }

    #[test]
    fn single_cell_partition() {
        let p = build_partition(&BTreeSet::from([Cell(0, 0)])).unwrap();
        assert_eq!(p.boundary_nodes().len(), 4);
        assert_eq!(p.near_exterior_nodes().len(), 16);
        assert_eq!(
            p.boundary_nodes(),
            &[LatticeNode(0, 0), LatticeNode(1, 0), LatticeNode(1, 1), LatticeNode(0, 1)]
        );
    }

    #[test]
    fn block_partition() {
        let p = build_partition(&rectangle_cells(LatticeNode(0, 0), 2, 2)).unwrap();
        assert_eq!(p.boundary_nodes().len(), 8);
        assert_eq!(p.interior_nodes().len(), 9);
        for n in p.boundary_nodes() {
            assert!(p.near_exterior_nodes().contains(n));
            assert!(p.interior_nodes().contains(n));
            assert!(p.is_exterior_node(*n));
        }
        assert!(!p.is_exterior_node(LatticeNode(1, 1)));
    }

    #[test]
    fn topology_errors() {
        let mut ring = rectangle_cells(LatticeNode(0, 0), 3, 3);
        ring.remove(&Cell(1, 1));
        assert!(matches!(build_partition(&ring), Err(Error::Topology(_))));
        let split = BTreeSet::from([Cell(0, 0), Cell(3, 0)]);
        assert!(matches!(build_partition(&split), Err(Error::Topology(_))));
        let pinch = BTreeSet::from([Cell(0, 0), Cell(1, 1)]);
        assert!(matches!(build_partition(&pinch), Err(Error::Topology(_))));
        assert!(matches!(build_partition(&BTreeSet::new()), Err(Error::Topology(_))));
        let l_shape = BTreeSet::from([Cell(0, 0), Cell(1, 0), Cell(0, 1)]);
        assert_eq!(build_partition(&l_shape).unwrap().boundary_nodes().len(), 8);
    }

    #[test]
    fn staircase_hull_of_circle_is_valid_and_outside() {
        for r in [3.0, 4.0, 10.5, 11.0] {
            let cells = staircase_hull(r, [0.0, 0.0]);
            let p = build_partition(&cells).unwrap();
            for n in p.boundary_nodes() {
                let [x, y] = n.coords(1.0);
                assert!(x.hypot(y) >= r - 1e-12);
            }
            // ccw: positive shoelace area equal to the cell count
            let b = p.boundary_nodes();
            let area: i64 = (0..b.len())
                .map(|k| {
                    let (p0, p1) = (b[k], b[(k + 1) % b.len()]);
                    p0.0 as i64 * p1.1 as i64 - p1.0 as i64 * p0.1 as i64
                })
                .sum();
            assert_eq!(area, 2 * cells.len() as i64);
        }
    }
}
