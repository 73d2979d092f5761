//! Experiment driver: the circular-scatterer benchmark, parameter sweeps and
//! CSV tables.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::analytic::CircleProblem;
use crate::bae::{assemble_coupled, build_projector, condition_1, default_coupling, BoundaryOperators};
use crate::error::{Error, Result};
use crate::fem::{assemble_force, assemble_interior, ForceMode};
use crate::greens::{GreensSettings, LimitingAbsorption, Quadrature};
use crate::lattice::{build_partition, build_stencil, staircase_hull, LatticeNode, NodePartition};
use crate::mesh::{build_annular_layer_mesh, enclosed_partition, parse_gmsh, LayerSpec, Mesh};
use crate::solve::{solve_coupled, solve_staircase, write_text, CoupledSolution};

/// Version tag of every CSV table.
pub const CSV_SCHEMA: &str = "fembae-csv v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum NuMode {
    /// `ν = i/K`.
    #[default]
    Cfie,
    /// `ν = 0`.
    Kirchhoff,
}

impl NuMode {
    pub fn value(self, wavenumber: Complex64) -> Complex64 {
        match self {
            NuMode::Cfie => default_coupling(wavenumber),
            NuMode::Kirchhoff => Complex64::default(),
        }
    }
}

impl FromStr for NuMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cfie" => Ok(NuMode::Cfie),
            "kirchhoff" => Ok(NuMode::Kirchhoff),
            _ => Err(Error::Unsupported(format!("nu mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// FEM layer coupled to the lattice.
    #[default]
    Coupled,
    /// Lattice only, with the staircase hull of the circle as the scatterer.
    StaircaseOnly,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coupled" => Ok(Mode::Coupled),
            "staircase" => Ok(Mode::StaircaseOnly),
            _ => Err(Error::Unsupported(format!("mode {s:?}"))),
        }
    }
}

/// Nodes at which numerical and exact fields are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Locus {
    /// The lattice nodes of the coupling loop.
    #[default]
    CouplingLoop,
    /// The mesh nodes on the scatterer.
    Scatterer,
}

impl FromStr for Locus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loop" => Ok(Locus::CouplingLoop),
            "scatterer" => Ok(Locus::Scatterer),
            _ => Err(Error::Unsupported(format!("locus {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ErrorNorm {
    /// `√(Σ|d|² / Σ|u|²)`.
    #[default]
    L2,
    /// `√(Σ|d| / Σ|u|)`.
    Printed,
}

impl FromStr for ErrorNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(ErrorNorm::L2),
            "printed" => Ok(ErrorNorm::Printed),
            _ => Err(Error::Unsupported(format!("error norm {s:?}"))),
        }
    }
}

fn parse_force_mode(s: &str) -> Result<ForceMode> {
    match s {
        "nodal" => Ok(ForceMode::Nodal),
        "boundary-mass" => Ok(ForceMode::BoundaryMass),
        _ => Err(Error::Unsupported(format!("force mode {s:?}"))),
    }
}

fn force_mode_name(m: ForceMode) -> &'static str {
    match m {
        ForceMode::Nodal => "nodal",
        ForceMode::BoundaryMass => "boundary-mass",
    }
}

/// Relative ℓ2 error.
pub fn relative_error(numerical: &[Complex64], exact: &[Complex64]) -> Result<f64> {
    relative_error_with(numerical, exact, ErrorNorm::L2)
}

pub fn relative_error_with(numerical: &[Complex64], exact: &[Complex64], norm: ErrorNorm) -> Result<f64> {
    if numerical.len() != exact.len() {
        return Err(Error::InvalidParameter(format!(
            "vectors of length {} and {}",
            numerical.len(),
            exact.len()
        )));
    }
    let p = |z: Complex64| match norm {
        ErrorNorm::L2 => z.norm_sqr(),
        ErrorNorm::Printed => z.norm(),
    };
    let den: f64 = exact.iter().map(|&z| p(z)).sum();
    if den == 0.0 {
        return Err(Error::UndefinedError);
    }
    let num: f64 = numerical.iter().zip(exact).map(|(&a, &b)| p(a - b)).sum();
    Ok((num / den).sqrt())
}

/// One benchmark solve. Lengths are in grid units.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseConfig {
    pub radius: f64,
    pub harmonic: u32,
    pub sigma: f64,
    pub exterior_radius: f64,
    pub kh: f64,
    pub nu_mode: NuMode,
    pub eta: f64,
    pub mode: Mode,
    pub force_mode: ForceMode,
    pub inner_nodes: Option<usize>,
    pub locus: Locus,
    pub norm: ErrorNorm,
    pub quadrature: Quadrature,
    pub mesh_file: Option<PathBuf>,
}

impl Default for CaseConfig {
    fn default() -> Self {
        CaseConfig {
            radius: 10.0,
            harmonic: 0,
            sigma: 1.0,
            exterior_radius: 11.0,
            kh: 0.5,
            nu_mode: NuMode::Cfie,
            eta: 0.0,
            mode: Mode::Coupled,
            force_mode: ForceMode::Nodal,
            inner_nodes: None,
            locus: Locus::CouplingLoop,
            norm: ErrorNorm::L2,
            quadrature: Quadrature::default(),
            mesh_file: None,
        }
    }
}

impl CaseConfig {
    pub fn greens_settings(&self) -> GreensSettings {
        GreensSettings {
            absorption: self.eta,
            quadrature: self.quadrature,
            limit: LimitingAbsorption::Exact,
        }
    }

    /// `K·h` including absorption.
    pub fn effective_kh(&self) -> Complex64 {
        self.kh * Complex64::new(1.0, self.eta)
    }

    /// Canonical `key=value` text of every field.
    pub fn canonical(&self) -> String {
        let quad = match self.quadrature {
            Quadrature::Auto { tolerance } => format!("auto:{tolerance:e}"),
            Quadrature::Fixed { panels } => format!("fixed:{panels}"),
        };
        format!(
            "radius={};harmonic={};sigma={};rext={};kh={};nu={:?};eta={};mode={:?};force={};inner={:?};locus={:?};norm={:?};quadrature={};mesh={:?}",
            self.radius,
            self.harmonic,
            self.sigma,
            self.exterior_radius,
            self.kh,
            self.nu_mode,
            self.eta,
            self.mode,
            force_mode_name(self.force_mode),
            self.inner_nodes,
            self.locus,
            self.norm,
            quad,
            self.mesh_file
        )
    }

    /// First 16 hex digits of the SHA-256 of [`CaseConfig::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("radius", self.radius), ("sigma", self.sigma), ("kh", self.kh)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.eta >= 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be nonnegative, got {}", self.eta)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseResult {
    pub hash: String,
    pub kh: f64,
    pub error: f64,
    pub numerical: Vec<Complex64>,
    pub exact: Vec<Complex64>,
    pub mesh_nodes: usize,
    pub scatterer_nodes: usize,
    pub loop_nodes: usize,
    pub condition_c: f64,
    pub residual: f64,
}

fn polar(x: f64, y: f64, centre: [f64; 2]) -> (f64, f64) {
    let (dx, dy) = (x - centre[0], y - centre[1]);
    (dx.hypot(dy), dy.atan2(dx))
}

/// Exact field for a Neumann load that puts `ds` of scatterer arc on each loaded node.
fn exact_values(problem: &CircleProblem, points: &[[f64; 2]], centre: [f64; 2], ds: f64) -> Result<Vec<Complex64>> {
    // the load is the inward flux: ∂u/∂r = −1/ds per unit nodal value
    let scale = -1.0 / (problem.wavenumber * ds);
    points
        .iter()
        .map(|&[x, y]| {
            let (r, phi) = polar(x, y, centre);
            Ok(scale * problem.field(r.max(problem.radius), phi)?)
        })
        .collect()
}

fn load_mesh(cfg: &CaseConfig) -> Result<(Mesh, NodePartition)> {
    match &cfg.mesh_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let mesh = parse_gmsh(&text)?;
            let partition = enclosed_partition(&mesh)?;
            Ok((mesh, partition))
        }
        None => build_annular_layer_mesh(&LayerSpec {
            radius: cfg.radius,
            sigma: cfg.sigma,
            exterior_radius: cfg.exterior_radius,
            inner_nodes: cfg.inner_nodes,
        }),
    }
}

/// Everything produced by one coupled solve.
pub struct CoupledCase {
    pub mesh: Mesh,
    pub partition: NodePartition,
    pub ops: BoundaryOperators,
    pub solution: CoupledSolution,
}

/// Build and solve the coupled system for `cfg`, ignoring `cfg.mode`.
pub fn solve_coupled_case(cfg: &CaseConfig) -> Result<CoupledCase> {
    cfg.validate()?;
    let keff = cfg.effective_kh();
    let stencil = build_stencil(Complex64::new(cfg.kh, 0.0), 1.0)?;
    let nu = cfg.nu_mode.value(keff);
    let (mesh, partition) = load_mesh(cfg)?;
    let ops = BoundaryOperators::build(&partition, &stencil, &cfg.greens_settings(), nu)?;
    let alpha_in = assemble_interior(&mesh, keff)?;
    let projector = build_projector(&mesh, &partition)?;
    let force = assemble_force(&mesh, cfg.harmonic, cfg.force_mode);
    let system = assemble_coupled(&ops.a, &ops.c, &alpha_in, &projector, &force)?;
    let solution = solve_coupled(&system)?;
    Ok(CoupledCase { mesh, partition, ops, solution })
}

/// Solve one configuration and compare with the exact circle solution.
pub fn run_case(cfg: &CaseConfig) -> Result<CaseResult> {
    cfg.validate()?;
    let keff = cfg.effective_kh();
    let stencil = build_stencil(Complex64::new(cfg.kh, 0.0), 1.0)?;
    let settings = cfg.greens_settings();
    let nu = cfg.nu_mode.value(keff);
    let problem = CircleProblem::new(cfg.radius, keff, cfg.harmonic)?;

    match cfg.mode {
        Mode::Coupled => {
            let CoupledCase { mesh, partition, ops, solution: sol } = solve_coupled_case(cfg)?;
            let ds = match cfg.force_mode {
                ForceMode::Nodal => 2.0 * PI * cfg.radius / mesh.gamma_in().len() as f64,
                ForceMode::BoundaryMass => 1.0,
            };
            let (numerical, points): (Vec<Complex64>, Vec<[f64; 2]>) = match cfg.locus {
                Locus::CouplingLoop => (
                    sol.u_ex_boundary.clone(),
                    partition.boundary_nodes().iter().map(|n| n.coords(1.0)).collect(),
                ),
                Locus::Scatterer => (
                    mesh.gamma_in().iter().map(|&k| sol.u_in[k]).collect(),
                    mesh.gamma_in().iter().map(|&k| mesh.nodes()[k]).collect(),
                ),
            };
            let exact = exact_values(&problem, &points, mesh.centre(), ds)?;
            let error = relative_error_with(&numerical, &exact, cfg.norm)?;
            Ok(CaseResult {
                hash: cfg.hash(),
                kh: cfg.kh,
                error,
                numerical,
                exact,
                mesh_nodes: mesh.nodes().len(),
                scatterer_nodes: mesh.gamma_in().len(),
                loop_nodes: partition.boundary_nodes().len(),
                condition_c: condition_1(&ops.c),
                residual: sol.residual,
            })
        }
        Mode::StaircaseOnly => {
            let centre = [0.0, 0.0];
            let partition = build_partition(&staircase_hull(cfg.radius, centre))?;
            let ops = BoundaryOperators::build(&partition, &stencil, &settings, nu)?;
            let nodes = partition.boundary_nodes();
            let points: Vec<[f64; 2]> = nodes.iter().map(|n| n.coords(1.0)).collect();
            let force: Vec<Complex64> = points
                .iter()
                .map(|&[x, y]| Complex64::new((cfg.harmonic as f64 * polar(x, y, centre).1).cos(), 0.0))
                .collect();
            let numerical = solve_staircase(&ops, &force)?;
            let ds = 2.0 * PI * cfg.radius / nodes.len() as f64;
            let exact = exact_values(&problem, &points, centre, ds)?;
            let error = relative_error_with(&numerical, &exact, cfg.norm)?;
            Ok(CaseResult {
                hash: cfg.hash(),
                kh: cfg.kh,
                error,
                numerical,
                exact,
                mesh_nodes: 0,
                scatterer_nodes: nodes.len(),
                loop_nodes: nodes.len(),
                condition_c: condition_1(&ops.c),
                residual: 0.0,
            })
        }
    }
}

/// Parameters of a sweep over `K·h`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub base: CaseConfig,
    pub kh_sweep: Vec<f64>,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            base: CaseConfig::default(),
            kh_sweep: vec![1.0, 0.7, 0.5, 0.35, 0.25, 0.18, 0.12],
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.kh_sweep.is_empty() || self.kh_sweep.iter().any(|&k| !(k > 0.0) || !k.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad K·h sweep {:?}", self.kh_sweep)));
        }
        Ok(())
    }

    pub fn case(&self, kh: f64) -> CaseConfig {
        CaseConfig { kh, ..self.base.clone() }
    }
}

/// One row of a sweep table.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub config: CaseConfig,
    pub hash: String,
    pub outcome: std::result::Result<CaseResult, String>,
}

impl SweepRow {
    pub fn error(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|r| r.error)
    }
}

fn run_row(config: CaseConfig) -> SweepRow {
    SweepRow {
        hash: config.hash(),
        outcome: run_case(&config).map_err(|e| e.to_string()),
        config,
    }
}

/// Error for each `K·h` of the sweep, in sweep order.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    Ok(cfg.kh_sweep.iter().map(|&kh| run_row(cfg.case(kh))).collect())
}

/// Indices of plateau points: sorted by decreasing `K·h`, a point is flagged
/// when the error of its larger-`K·h` neighbour exceeds its own by less than `threshold`.
pub fn plateau_points(points: &[(f64, f64)], threshold: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[b].0.partial_cmp(&points[a].0).unwrap());
    order
        .windows(2)
        .filter(|w| points[w[0]].1 / points[w[1]].1 < threshold)
        .map(|w| w[1])
        .collect()
}

/// Least-squares slope of `log e` against `log K·h` over `K·h ∈ [lo, hi]`
/// after removing plateau points (adjacent ratio below 1.3).
pub fn fit_slope(points: &[(f64, f64)], lo: f64, hi: f64) -> Option<f64> {
    let plateau = plateau_points(points, 1.3);
    let used: Vec<(f64, f64)> = points
        .iter()
        .enumerate()
        .filter(|(k, p)| !plateau.contains(k) && p.0 >= lo - 1e-12 && p.0 <= hi + 1e-12 && p.1 > 0.0)
        .map(|(_, p)| (p.0.ln(), p.1.ln()))
        .collect();
    if used.len() < 2 {
        return None;
    }
    let n = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / n;
    let my = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn sweep_points(rows: &[SweepRow]) -> Vec<(f64, f64)> {
    rows.iter().filter_map(|r| r.error().map(|e| (r.config.kh, e))).collect()
}

/// Errors for each exterior radius at each `K·h`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationStudy {
    pub rows: Vec<SweepRow>,
    /// Largest ratio between errors at the same `K·h`.
    pub max_pairwise_ratio: f64,
}

pub fn run_truncation_study(cfg: &ExperimentConfig, exterior_radii: &[f64]) -> Result<TruncationStudy> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &rext in exterior_radii {
        // fail fast on impossible geometry
        if !(rext >= cfg.base.radius + 1.0 - 1e-12) {
            return Err(Error::Geometry(format!(
                "exterior radius {rext} leaves less than one cell around radius {}",
                cfg.base.radius
            )));
        }
        for &kh in &cfg.kh_sweep {
            rows.push(run_row(CaseConfig {
                kh,
                exterior_radius: rext,
                ..cfg.base.clone()
            }));
        }
    }
    let mut max_pairwise_ratio: f64 = 1.0;
    for &kh in &cfg.kh_sweep {
        let errs: Vec<f64> = rows.iter().filter(|r| r.config.kh == kh).filter_map(SweepRow::error).collect();
        if let (Some(lo), Some(hi)) = (
            errs.iter().copied().reduce(f64::min),
            errs.iter().copied().reduce(f64::max),
        ) {
            max_pairwise_ratio = max_pairwise_ratio.max(hi / lo);
        }
    }
    Ok(TruncationStudy { rows, max_pairwise_ratio })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaircaseRow {
    pub kh: f64,
    pub coupled: SweepRow,
    pub staircase: SweepRow,
}

pub fn run_staircase_comparison(cfg: &ExperimentConfig) -> Result<Vec<StaircaseRow>> {
    cfg.validate()?;
    Ok(cfg
        .kh_sweep
        .iter()
        .map(|&kh| StaircaseRow {
            kh,
            coupled: run_row(CaseConfig {
                kh,
                mode: Mode::Coupled,
                ..cfg.base.clone()
            }),
            staircase: run_row(CaseConfig {
                kh,
                mode: Mode::StaircaseOnly,
                ..cfg.base.clone()
            }),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceRow {
    pub kh: f64,
    pub nu_mode: NuMode,
    pub nu: Complex64,
    pub condition_c: f64,
}

/// Condition of `C` over a sweep for each coupling mode, on the loop of `partition`.
pub fn run_resonance_study(
    partition: &NodePartition,
    nu_modes: &[NuMode],
    kh_sweep: &[f64],
    settings: &GreensSettings,
) -> Result<Vec<ResonanceRow>> {
    let mut rows = Vec::new();
    for &kh in kh_sweep {
        let stencil = build_stencil(Complex64::new(kh, 0.0), 1.0)?;
        let keff = kh * Complex64::new(1.0, settings.absorption);
        let gamma_o: Vec<LatticeNode> = partition.near_exterior_nodes().iter().copied().collect();
        let table = crate::greens::tabulate_greens(&stencil, crate::greens::pair_offsets(&gamma_o, &gamma_o), settings)?;
        for &mode in nu_modes {
            let nu = mode.value(keff);
            let ops = BoundaryOperators::from_table(partition, table.clone(), nu)?;
            rows.push(ResonanceRow {
                kh,
                nu_mode: mode,
                nu,
                condition_c: condition_1(&ops.c),
            });
        }
    }
    Ok(rows)
}

/// Lowest Dirichlet eigenvalues `K·h` of an `L × L` block of bilinear cells.
pub fn square_dirichlet_kh(cells: u32, count: usize) -> Vec<f64> {
    let lam = |k: u32| {
        let t = PI * k as f64 / cells as f64;
        6.0 * (1.0 - t.cos()) / (2.0 + t.cos())
    };
    let mut v: Vec<f64> = (1..cells)
        .flat_map(|a| (1..cells).map(move |b| (lam(a) + lam(b)).sqrt()))
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v.truncate(count);
    v
}

fn fmt_err(row: &SweepRow) -> (String, String) {
    match &row.outcome {
        Ok(r) => (format!("{:e}", r.error), String::new()),
        Err(e) => (String::new(), e.replace(',', ";")),
    }
}

/// CSV of sweep rows with the full configuration on every line.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("# {CSV_SCHEMA}\nconfig_hash,mode,radius,harmonic,sigma,rext,kh,nu_mode,eta,force,locus,norm,scatterer_nodes,loop_nodes,error,failure\n");
    for r in rows {
        let c = &r.config;
        let (err, fail) = fmt_err(r);
        let (sn, ln) = r
            .outcome
            .as_ref()
            .map(|o| (o.scatterer_nodes.to_string(), o.loop_nodes.to_string()))
            .unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{:?},{},{},{},{},{},{:?},{},{},{:?},{:?},{sn},{ln},{err},{fail}",
            r.hash,
            c.mode,
            c.radius,
            c.harmonic,
            c.sigma,
            c.exterior_radius,
            c.kh,
            c.nu_mode,
            c.eta,
            force_mode_name(c.force_mode),
            c.locus,
            c.norm
        );
    }
    s
}

pub fn resonance_csv(rows: &[ResonanceRow]) -> String {
    let mut s = format!("# {CSV_SCHEMA}\nkh,nu_mode,nu_re,nu_im,condition_c\n");
    for r in rows {
        let _ = writeln!(s, "{},{:?},{},{},{:e}", r.kh, r.nu_mode, r.nu.re, r.nu.im, r.condition_c);
    }
    s
}

/// Write `text` to `dir/name` when a directory is given.
pub fn emit(dir: Option<&Path>, name: &str, text: &str) -> Result<()> {
    match dir {
        Some(d) => write_text(&d.join(name), text),
        None => Ok(()),
    }
}

/// Parse flat `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: k + 1,
            message: format!("expected key = value, found {line:?}"),
        })?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidParameter(format!("bad value {v:?} for {key}")))
}

/// Apply `key = value` settings to an experiment configuration.
pub fn apply_settings(cfg: &mut ExperimentConfig, settings: &BTreeMap<String, String>) -> Result<()> {
    for (key, v) in settings {
        let b = &mut cfg.base;
        match key.as_str() {
            "radius" => b.radius = parse_value(key, v)?,
            "harmonic" => b.harmonic = parse_value(key, v)?,
            "sigma" => b.sigma = parse_value(key, v)?,
            "rext" => b.exterior_radius = parse_value(key, v)?,
            "eta" => b.eta = parse_value(key, v)?,
            "nu-mode" => b.nu_mode = v.parse()?,
            "mode" => b.mode = v.parse()?,
            "locus" => b.locus = v.parse()?,
            "norm" => b.norm = v.parse()?,
            "force" => b.force_mode = parse_force_mode(v)?,
            "inner-nodes" => b.inner_nodes = Some(parse_value(key, v)?),
            "panels" => b.quadrature = Quadrature::Fixed { panels: parse_value(key, v)? },
            "mesh-file" => b.mesh_file = Some(PathBuf::from(v)),
            "kh" => {
                cfg.kh_sweep = v
                    .split(',')
                    .map(|s| parse_value::<f64>(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            "out" => cfg.out_dir = Some(PathBuf::from(v)),
            other => return Err(Error::Unsupported(format!("unknown setting {other:?}"))),
        }
    }
    Ok(())
}
