//! Unstructured triangle mesh of the layer between the scatterer curve and
//! the grid-aligned coupling loop.
//!
//! Coordinates are in units of the grid spacing, so the lattice node `(i, j)`
//! sits exactly at `(i, j)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{build_partition, staircase_hull, LatticeNode, NodePartition};

/// Physical tag of the scatterer curve in MSH files.
pub const TAG_GAMMA_IN: i64 = 1;
/// Physical tag of the coupling loop.
pub const TAG_GAMMA_EX: i64 = 2;
/// Physical tag of the triangles.
pub const TAG_SURFACE: i64 = 3;

/// Minimum accepted `2·inradius / circumradius` of the built-in mesher.
pub const MIN_QUALITY: f64 = 0.2;

/// A coupling-loop node of the mesh and the lattice node it sits on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceNode {
    pub node: usize,
    pub lattice: LatticeNode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    gamma_in: Vec<usize>,
    gamma_ex: Vec<InterfaceNode>,
    centre: [f64; 2],
}

impl Mesh {
    /// Assemble a mesh from parts; triangles are reoriented counterclockwise.
    pub fn new(
        nodes: Vec<[f64; 2]>,
        mut triangles: Vec<[usize; 3]>,
        gamma_in: Vec<usize>,
        gamma_ex: Vec<InterfaceNode>,
        centre: [f64; 2],
    ) -> Mesh {
        for t in &mut triangles {
            if signed_area(&nodes, *t) < 0.0 {
                t.swap(1, 2);
            }
        }
        Mesh {
            nodes,
            triangles,
            gamma_in,
            gamma_ex,
            centre,
        }
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Scatterer-curve nodes, counterclockwise about the centre.
    pub fn gamma_in(&self) -> &[usize] {
        &self.gamma_in
    }

    /// Coupling-loop nodes, counterclockwise from the smallest lattice node.
    pub fn gamma_ex(&self) -> &[InterfaceNode] {
        &self.gamma_ex
    }

    pub fn centre(&self) -> [f64; 2] {
        self.centre
    }

    pub fn set_centre(&mut self, centre: [f64; 2]) {
        self.centre = centre;
    }

    /// Polar angle of a node about the scatterer centre, in `[0, 2π)`.
    pub fn polar_angle(&self, node: usize) -> f64 {
        let [x, y] = self.nodes[node];
        let a = (y - self.centre[1]).atan2(x - self.centre[0]);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        signed_area(&self.nodes, self.triangles[t])
    }

    pub fn quality(&self, t: usize) -> f64 {
        quality(&self.nodes, self.triangles[t])
    }

    pub fn min_quality(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.quality(t)).fold(f64::INFINITY, f64::min)
    }

    /// Structural problems: orientation, conformity, loop edges. Empty when valid.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut out = Vec::new();
        for t in 0..self.triangles.len() {
            if !(self.signed_area(t) > 0.0) {
                out.push(format!("triangle {t} has nonpositive area {}", self.signed_area(t)));
            }
        }
        let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *edges.entry(edge_key(t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut loop_edges = BTreeSet::new();
        let in_loop = self.gamma_in.clone();
        let ex_loop: Vec<usize> = self.gamma_ex.iter().map(|g| g.node).collect();
        for lp in [in_loop, ex_loop] {
            for k in 0..lp.len() {
                loop_edges.insert(edge_key(lp[k], lp[(k + 1) % lp.len()]));
            }
        }
        for (e, count) in &edges {
            match count {
                1 if !loop_edges.contains(e) => out.push(format!("boundary edge {e:?} is not on a tagged loop")),
                1 | 2 => {}
                n => out.push(format!("edge {e:?} shared by {n} triangles")),
            }
        }
        for e in &loop_edges {
            if edges.get(e) != Some(&1) {
                out.push(format!("loop edge {e:?} is not a mesh boundary edge"));
            }
        }
        out
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn signed_area(nodes: &[[f64; 2]], t: [usize; 3]) -> f64 {
    let [a, b, c] = t.map(|k| nodes[k]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn quality(nodes: &[[f64; 2]], t: [usize; 3]) -> f64 {
    let [a, b, c] = t.map(|k| nodes[k]);
    let la = (b[0] - c[0]).hypot(b[1] - c[1]);
    let lb = (a[0] - c[0]).hypot(a[1] - c[1]);
    let lc = (a[0] - b[0]).hypot(a[1] - b[1]);
    let area = signed_area(nodes, t).abs();
    let s = 0.5 * (la + lb + lc);
    8.0 * area * area / (s * la * lb * lc)
}

/// Parameters of the built-in layer mesher, lengths in grid units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerSpec {
    pub radius: f64,
    /// Element size factor on the scatterer curve.
    pub sigma: f64,
    pub exterior_radius: f64,
    /// Overrides the node count on the scatterer curve.
    pub inner_nodes: Option<usize>,
}

impl LayerSpec {
    pub fn new(radius: f64, sigma: f64, exterior_radius: f64) -> LayerSpec {
        LayerSpec {
            radius,
            sigma,
            exterior_radius,
            inner_nodes: None,
        }
    }

    /// Nodes on the circle: spacing `σ·h`, rounded up to a multiple of four.
    pub fn inner_node_count(&self) -> usize {
        self.inner_nodes
            .unwrap_or_else(|| 4 * (2.0 * PI * self.radius / (4.0 * self.sigma)).ceil() as usize)
    }
}

/// Mesh the layer between the circle of `radius` and the staircase loop
/// around the disk of `exterior_radius`, both centred on the lattice origin.
pub fn build_annular_layer_mesh(spec: &LayerSpec) -> Result<(Mesh, NodePartition)> {
    let LayerSpec {
        radius,
        sigma,
        exterior_radius,
        ..
    } = *spec;
    if !(radius > 0.0) {
        return Err(Error::Geometry(format!("radius must be positive, got {radius}")));
    }
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::Geometry(format!("sigma must lie in (0, 1], got {sigma}")));
    }
    if !(exterior_radius >= radius + 1.0 - 1e-12) {
        return Err(Error::Geometry(format!(
            "exterior radius {exterior_radius} leaves less than one cell around radius {radius}"
        )));
    }
    let n_in = spec.inner_node_count();
    if n_in < 3 {
        return Err(Error::Geometry(format!("{n_in} nodes cannot describe the scatterer")));
    }

    let partition = build_partition(&staircase_hull(exterior_radius, [0.0, 0.0]))?;
    let mut nodes: Vec<[f64; 2]> = Vec::new();
    let mut rings: Vec<Vec<usize>> = Vec::new();

    let ring_of_circle = |nodes: &mut Vec<[f64; 2]>, r: f64, n: usize| -> Vec<usize> {
        (0..n)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / n as f64;
                nodes.push([r * phi.cos(), r * phi.sin()]);
                nodes.len() - 1
            })
            .collect()
    };
    let gamma_in = ring_of_circle(&mut nodes, radius, n_in);
    rings.push(gamma_in.clone());

    // Steiner rings keep the layer one cell thick between neighbours
    let extra = ((exterior_radius - radius) - 1e-9).ceil() as usize - 1;
    for k in 1..=extra {
        let r = radius + k as f64;
        let n = 4 * (2.0 * PI * r / 4.0).ceil() as usize;
        let ring = ring_of_circle(&mut nodes, r, n);
        rings.push(ring);
    }

    let mut gamma_ex = Vec::with_capacity(partition.boundary_nodes().len());
    for &ln in partition.boundary_nodes() {
        nodes.push(ln.coords(1.0));
        gamma_ex.push(InterfaceNode {
            node: nodes.len() - 1,
            lattice: ln,
        });
    }
    rings.push(gamma_ex.iter().map(|g| g.node).collect());

    let mut triangles = Vec::new();
    for pair in rings.windows(2) {
        zip_rings(&nodes, &pair[0], &pair[1], &mut triangles)?;
    }

    let mut constrained = BTreeSet::new();
    for lp in [&rings[0], rings.last().unwrap()] {
        for k in 0..lp.len() {
            constrained.insert(edge_key(lp[k], lp[(k + 1) % lp.len()]));
        }
    }
    delaunay_flips(&nodes, &mut triangles, &constrained);

    let mesh = Mesh::new(nodes, triangles, gamma_in, gamma_ex, [0.0, 0.0]);

    // triangles must tile the layer exactly
    let loop_area = |lp: &[usize]| -> f64 {
        (0..lp.len())
            .map(|k| {
                let a = mesh.nodes[lp[k]];
                let b = mesh.nodes[lp[(k + 1) % lp.len()]];
                0.5 * (a[0] * b[1] - b[0] * a[1])
            })
            .sum()
    };
    let outer: Vec<usize> = mesh.gamma_ex.iter().map(|g| g.node).collect();
    let layer_area = loop_area(&outer) - loop_area(&mesh.gamma_in);
    let covered: f64 = (0..mesh.triangles.len()).map(|t| mesh.signed_area(t)).sum();
    if (covered - layer_area).abs() > 1e-9 * layer_area {
        return Err(Error::Meshing(format!(
            "triangles cover {covered} of layer area {layer_area}"
        )));
    }
    let problems = mesh.check_invariants();
    if let Some(p) = problems.first() {
        return Err(Error::Meshing(p.clone()));
    }
    let q = mesh.min_quality();
    if q < MIN_QUALITY {
        return Err(Error::Meshing(format!("minimum triangle quality {q:.3} below {MIN_QUALITY}")));
    }
    Ok((mesh, partition))
}

/// Triangulate the band between two counterclockwise star-shaped rings.
fn zip_rings(nodes: &[[f64; 2]], inner: &[usize], outer: &[usize], out: &mut Vec<[usize; 3]>) -> Result<()> {
    let angle = |k: usize| {
        let [x, y] = nodes[k];
        let a = y.atan2(x);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    };
    // both rings start at their smallest angle; unwrap to increasing angles
    let rotate = |ring: &[usize]| -> Vec<usize> {
        let s = (0..ring.len())
            .min_by(|&a, &b| angle(ring[a]).partial_cmp(&angle(ring[b])).unwrap())
            .unwrap();
        (0..ring.len()).map(|k| ring[(s + k) % ring.len()]).collect()
    };
    let a = rotate(inner);
    let b = rotate(outer);
    let (na, nb) = (a.len(), b.len());
    let at = |ring: &[usize], k: usize| ring[k % ring.len()];
    let dist = |p: usize, q: usize| {
        let (u, v) = (nodes[p], nodes[q]);
        (u[0] - v[0]).hypot(u[1] - v[1])
    };
    let quality = |t: [usize; 3]| {
        let a = signed_area(nodes, t);
        if a <= 1e-12 {
            return f64::NEG_INFINITY;
        }
        let s = dist(t[0], t[1]).powi(2) + dist(t[1], t[2]).powi(2) + dist(t[2], t[0]).powi(2);
        4.0 * 3f64.sqrt() * a / s
    };

    // best[i][j]: largest attainable minimum quality from spoke (i, j) to the end
    let width = nb + 1;
    let mut best = vec![f64::NEG_INFINITY; (na + 1) * width];
    let mut step_a = vec![false; (na + 1) * width];
    best[na * width + nb] = f64::INFINITY;
    for i in (0..=na).rev() {
        for j in (0..=nb).rev() {
            if i == na && j == nb {
                continue;
            }
            let via_a = if i < na {
                quality([at(&a, i), at(&b, j), at(&a, i + 1)]).min(best[(i + 1) * width + j])
            } else {
                f64::NEG_INFINITY
            };
            let via_b = if j < nb {
                quality([at(&a, i), at(&b, j), at(&b, j + 1)]).min(best[i * width + j + 1])
            } else {
                f64::NEG_INFINITY
            };
            best[i * width + j] = via_a.max(via_b);
            step_a[i * width + j] = via_a >= via_b;
        }
    }
    if best[0] == f64::NEG_INFINITY {
        return Err(Error::Meshing(format!(
            "no valid band between rings of {na} and {nb} nodes"
        )));
    }
    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        if step_a[i * width + j] {
            out.push([at(&a, i), at(&b, j), at(&a, i + 1)]);
            i += 1;
        } else {
            out.push([at(&a, i), at(&b, j), at(&b, j + 1)]);
            j += 1;
        }
    }
    Ok(())
}

fn in_circumcircle(nodes: &[[f64; 2]], t: [usize; 3], d: usize) -> f64 {
    let p = nodes[d];
    let m: Vec<[f64; 3]> = t
        .iter()
        .map(|&k| {
            let (dx, dy) = (nodes[k][0] - p[0], nodes[k][1] - p[1]);
            [dx, dy, dx * dx + dy * dy]
        })
        .collect();
    m[0][0] * (m[1][1] * m[2][2] - m[2][1] * m[1][2]) - m[0][1] * (m[1][0] * m[2][2] - m[2][0] * m[1][2])
        + m[0][2] * (m[1][0] * m[2][1] - m[2][0] * m[1][1])
}

/// Lawson edge flips until every unconstrained edge is locally Delaunay.
fn delaunay_flips(nodes: &[[f64; 2]], triangles: &mut [[usize; 3]], constrained: &BTreeSet<(usize, usize)>) {
    loop {
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                owner.insert((tri[k], tri[(k + 1) % 3]), t);
            }
        }
        let mut flipped = false;
        'scan: for t1 in 0..triangles.len() {
            for k in 0..3 {
                let tri = triangles[t1];
                let (u, v, a) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
                if constrained.contains(&edge_key(u, v)) {
                    continue;
                }
                let Some(&t2) = owner.get(&(v, u)) else { continue };
                let other = triangles[t2];
                let b = *other.iter().find(|&&x| x != u && x != v).unwrap();
                if in_circumcircle(nodes, [u, v, a], b) <= 1e-10 {
                    continue;
                }
                let n1 = [u, b, a];
                let n2 = [b, v, a];
                if signed_area(nodes, n1) <= 1e-12 || signed_area(nodes, n2) <= 1e-12 {
                    continue;
                }
                triangles[t1] = n1;
                triangles[t2] = n2;
                flipped = true;
                break 'scan;
            }
        }
        if !flipped {
            return;
        }
    }
}

/// Partition whose interior cells are those enclosed by the coupling loop of `mesh`.
pub fn enclosed_partition(mesh: &Mesh) -> Result<NodePartition> {
    let lp: Vec<LatticeNode> = mesh.gamma_ex().iter().map(|g| g.lattice).collect();
    if lp.len() < 4 {
        return Err(Error::Interface("mesh has no coupling loop".into()));
    }
    let (x0, x1) = (lp.iter().map(|n| n.0).min().unwrap(), lp.iter().map(|n| n.0).max().unwrap());
    let (y0, y1) = (lp.iter().map(|n| n.1).min().unwrap(), lp.iter().map(|n| n.1).max().unwrap());
    let mut cells = BTreeSet::new();
    for i in x0..x1 {
        for j in y0..y1 {
            // even-odd rule at the cell centre
            let (px, py) = (i as f64 + 0.5, j as f64 + 0.5);
            let mut inside = false;
            for k in 0..lp.len() {
                let (a, b) = (lp[k], lp[(k + 1) % lp.len()]);
                let (ax, ay, bx, by) = (a.0 as f64, a.1 as f64, b.0 as f64, b.1 as f64);
                if (ay > py) != (by > py) && px < ax + (py - ay) * (bx - ax) / (by - ay) {
                    inside = !inside;
                }
            }
            if inside {
                cells.insert(crate::lattice::Cell(i, j));
            }
        }
    }
    build_partition(&cells)
}

/// Violations of the mesh/lattice interface. Empty when the coupling loop of
/// the mesh and the partition boundary are the same nodes in the same order.
pub fn validate_interface(mesh: &Mesh, partition: &NodePartition) -> Vec<String> {
    let mut out = Vec::new();
    let ex = mesh.gamma_ex();
    let pb = partition.boundary_nodes();
    if ex.len() != pb.len() {
        out.push(format!(
            "count mismatch: mesh has {} coupling nodes, partition has {}",
            ex.len(),
            pb.len()
        ));
    }
    for (k, g) in ex.iter().enumerate() {
        let [x, y] = mesh.nodes()[g.node];
        let [lx, ly] = g.lattice.coords(1.0);
        let d = (x - lx).hypot(y - ly);
        if d > 1e-12 * (1.0 + lx.abs().max(ly.abs())) {
            out.push(format!(
                "coordinate mismatch: mesh node {} at ({x}, {y}) is {d:.3e} from lattice node {}",
                g.node, g.lattice
            ));
        }
        if ex.len() == pb.len() && pb[k] != g.lattice {
            out.push(format!(
                "order mismatch at position {k}: mesh has {}, partition has {}",
                g.lattice, pb[k]
            ));
        }
    }
    out
}

/// Serialize as MSH 2.2 ASCII.
pub fn write_gmsh(mesh: &Mesh) -> String {
    let mut s = String::new();
    s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    s.push_str("$PhysicalNames\n3\n1 1 \"gamma_in\"\n1 2 \"gamma_ex\"\n2 3 \"layer\"\n$EndPhysicalNames\n");
    let _ = writeln!(s, "$Nodes\n{}", mesh.nodes.len());
    for (k, [x, y]) in mesh.nodes.iter().enumerate() {
        let _ = writeln!(s, "{} {x:?} {y:?} 0", k + 1);
    }
    s.push_str("$EndNodes\n");
    let ex: Vec<usize> = mesh.gamma_ex.iter().map(|g| g.node).collect();
    let n_el = mesh.gamma_in.len() + ex.len() + mesh.triangles.len();
    let _ = writeln!(s, "$Elements\n{n_el}");
    let mut id = 1;
    for (tag, lp) in [(TAG_GAMMA_IN, &mesh.gamma_in), (TAG_GAMMA_EX, &ex)] {
        for k in 0..lp.len() {
            let _ = writeln!(s, "{id} 1 2 {tag} {tag} {} {}", lp[k] + 1, lp[(k + 1) % lp.len()] + 1);
            id += 1;
        }
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "{id} 2 2 {TAG_SURFACE} {TAG_SURFACE} {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        id += 1;
    }
    s.push_str("$EndElements\n");
    s
}

/// Parse MSH 2.2 ASCII with physical tags 1 = scatterer curve, 2 = coupling
/// loop, 3 = surface.
pub fn parse_gmsh(text: &str) -> Result<Mesh> {
    let lines: Vec<&str> = text.lines().collect();
    let err = |line: usize, message: String| Error::Parse { line: line + 1, message };
    let mut nodes: Vec<[f64; 2]> = Vec::new();
    let mut node_index: HashMap<i64, usize> = HashMap::new();
    let mut triangles = Vec::new();
    let mut segments: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
    let mut saw_format = false;
    let mut elements_end = 0;

    let mut k = 0;
    while k < lines.len() {
        let head = lines[k].trim();
        match head {
            "" => {}
            "$MeshFormat" => {
                let v = lines.get(k + 1).ok_or_else(|| err(k, "truncated $MeshFormat".into()))?;
                let f: Vec<&str> = v.split_whitespace().collect();
                if f.len() < 2 || !f[0].starts_with("2.2") {
                    return Err(err(k + 1, format!("unsupported MSH version {:?}", f.first())));
                }
                if f[1] != "0" {
                    return Err(err(k + 1, "only ASCII files are supported".into()));
                }
                saw_format = true;
                k += 2;
                expect_end(&lines, k, "$EndMeshFormat")?;
            }
            "$Nodes" => {
                let (count, first) = section_count(&lines, k)?;
                for (r, line) in lines.iter().enumerate().skip(first).take(count) {
                    let f: Vec<&str> = line.split_whitespace().collect();
                    if f.len() < 3 {
                        return Err(err(r, "node line needs id x y".into()));
                    }
                    let id: i64 = f[0].parse().map_err(|_| err(r, format!("bad node id {:?}", f[0])))?;
                    let x: f64 = f[1].parse().map_err(|_| err(r, format!("bad coordinate {:?}", f[1])))?;
                    let y: f64 = f[2].parse().map_err(|_| err(r, format!("bad coordinate {:?}", f[2])))?;
                    if node_index.insert(id, nodes.len()).is_some() {
                        return Err(err(r, format!("duplicate node id {id}")));
                    }
                    nodes.push([x, y]);
                }
                k = first + count;
                expect_end(&lines, k, "$EndNodes")?;
            }
            "$Elements" => {
                let (count, first) = section_count(&lines, k)?;
                for (r, line) in lines.iter().enumerate().skip(first).take(count) {
                    let f: Vec<i64> = line
                        .split_whitespace()
                        .map(|s| s.parse::<i64>().map_err(|_| err(r, format!("bad integer {s:?}"))))
                        .collect::<Result<_>>()?;
                    if f.len() < 3 {
                        return Err(err(r, "element line too short".into()));
                    }
                    let (kind, ntags) = (f[1], f[2] as usize);
                    let physical = if ntags > 0 { f.get(3).copied().unwrap_or(0) } else { 0 };
                    let ids = &f[(3 + ntags).min(f.len())..];
                    let lookup = |id: i64| node_index.get(&id).copied().ok_or_else(|| err(r, format!("unknown node {id}")));
                    match kind {
                        1 => {
                            if ids.len() != 2 {
                                return Err(err(r, "line element needs 2 nodes".into()));
                            }
                            let seg = (lookup(ids[0])?, lookup(ids[1])?);
                            match physical {
                                TAG_GAMMA_IN => segments[0].push(seg),
                                TAG_GAMMA_EX => segments[1].push(seg),
                                _ => {}
                            }
                        }
                        2 => {
                            if ids.len() != 3 {
                                return Err(err(r, "triangle needs 3 nodes".into()));
                            }
                            triangles.push([lookup(ids[0])?, lookup(ids[1])?, lookup(ids[2])?]);
                        }
                        _ => {}
                    }
                }
                k = first + count;
                expect_end(&lines, k, "$EndElements")?;
                elements_end = k;
            }
            s if s.starts_with('$') && !s.starts_with("$End") => {
                // skip unknown sections
                let end = format!("$End{}", &s[1..]);
                while k < lines.len() && lines[k].trim() != end {
                    k += 1;
                }
                if k == lines.len() {
                    return Err(err(k - 1, format!("section {s} is not closed")));
                }
            }
            other => return Err(err(k, format!("unexpected line {other:?}"))),
        }
        k += 1;
    }
    if !saw_format {
        return Err(err(0, "missing $MeshFormat".into()));
    }
    if triangles.is_empty() {
        return Err(err(elements_end, "no triangles".into()));
    }

    let mut tris = triangles;
    for t in &mut tris {
        if signed_area(&nodes, *t) < 0.0 {
            t.swap(1, 2);
        }
    }

    // every mesh boundary edge must carry a boundary tag
    let mut use_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in &tris {
        for e in 0..3 {
            *use_count.entry(edge_key(t[e], t[(e + 1) % 3])).or_default() += 1;
        }
    }
    let tagged: BTreeSet<(usize, usize)> = segments.iter().flatten().map(|&(a, b)| edge_key(a, b)).collect();
    if let Some((e, _)) = use_count.iter().find(|(e, c)| **c == 1 && !tagged.contains(e)) {
        return Err(err(
            elements_end,
            format!("boundary edge between nodes {} and {} has no boundary tag", e.0 + 1, e.1 + 1),
        ));
    }

    let gamma_in_loop = order_loop(&segments[0]).map_err(|m| err(elements_end, format!("scatterer curve: {m}")))?;
    let gamma_ex_loop = order_loop(&segments[1]).map_err(|m| err(elements_end, format!("coupling loop: {m}")))?;

    let centre = if gamma_in_loop.is_empty() {
        [0.0, 0.0]
    } else {
        let n = gamma_in_loop.len() as f64;
        let cx: f64 = gamma_in_loop.iter().map(|&k| nodes[k][0]).sum::<f64>() / n;
        let cy: f64 = gamma_in_loop.iter().map(|&k| nodes[k][1]).sum::<f64>() / n;
        [cx.round(), cy.round()]
    };

    let ccw = |lp: Vec<usize>| -> Vec<usize> {
        let area: f64 = (0..lp.len())
            .map(|k| {
                let a = nodes[lp[k]];
                let b = nodes[lp[(k + 1) % lp.len()]];
                a[0] * b[1] - b[0] * a[1]
            })
            .sum();
        if area < 0.0 {
            lp.into_iter().rev().collect()
        } else {
            lp
        }
    };
    let rotate_to = |lp: Vec<usize>, start: usize| -> Vec<usize> {
        let s = lp.iter().position(|&x| x == start).unwrap_or(0);
        (0..lp.len()).map(|k| lp[(s + k) % lp.len()]).collect()
    };

    let gamma_in = ccw(gamma_in_loop);
    let polar = |k: usize| {
        let a = (nodes[k][1] - centre[1]).atan2(nodes[k][0] - centre[0]);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    };
    let gamma_in = match gamma_in.iter().copied().min_by(|&a, &b| polar(a).partial_cmp(&polar(b)).unwrap()) {
        Some(s) => rotate_to(gamma_in, s),
        None => gamma_in,
    };

    let lattice_of = |k: usize| LatticeNode(nodes[k][0].round() as i32, nodes[k][1].round() as i32);
    let gamma_ex = ccw(gamma_ex_loop);
    let gamma_ex = match gamma_ex.iter().copied().min_by_key(|&k| lattice_of(k)) {
        Some(s) => rotate_to(gamma_ex, s),
        None => gamma_ex,
    };
    let gamma_ex = gamma_ex
        .into_iter()
        .map(|node| InterfaceNode {
            node,
            lattice: lattice_of(node),
        })
        .collect();

    Ok(Mesh {
        nodes,
        triangles: tris,
        gamma_in,
        gamma_ex,
        centre,
    })
}

fn section_count(lines: &[&str], k: usize) -> Result<(usize, usize)> {
    let line = lines.get(k + 1).ok_or(Error::Parse {
        line: k + 1,
        message: "truncated section".into(),
    })?;
    let n = line.trim().parse::<usize>().map_err(|_| Error::Parse {
        line: k + 2,
        message: format!("bad count {line:?}"),
    })?;
    if k + 2 + n > lines.len() {
        return Err(Error::Parse {
            line: lines.len(),
            message: format!("section declares {n} entries but the file ends early"),
        });
    }
    Ok((n, k + 2))
}

fn expect_end(lines: &[&str], k: usize, end: &str) -> Result<()> {
    match lines.get(k) {
        Some(l) if l.trim() == end => Ok(()),
        other => Err(Error::Parse {
            line: k + 1,
            message: format!("expected {end}, found {:?}", other.map(|s| s.trim())),
        }),
    }
}

/// Chain segments into one closed loop; every node must have degree two.
fn order_loop(segments: &[(usize, usize)]) -> std::result::Result<Vec<usize>, String> {
    if segments.is_empty() {
        return Ok(Vec::new());
    }
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in segments {
        if a == b {
            return Err(format!("degenerate segment at node {}", a + 1));
        }
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if let Some((n, nb)) = adj.iter().find(|(_, nb)| nb.len() != 2) {
        return Err(format!("node {} has {} boundary neighbours (non-manifold loop)", n + 1, nb.len()));
    }
    let start = *adj.keys().next().unwrap();
    let mut out = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0];
    while cur != start {
        out.push(cur);
        let nb = &adj[&cur];
        let next = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = next;
        if out.len() > adj.len() {
            return Err("segments do not close".into());
        }
    }
    if out.len() != adj.len() {
        return Err(format!("segments form several loops ({} of {} nodes on the first)", out.len(), adj.len()));
    }
    Ok(out)
}
