//! Discrete radiating Green's function of the uniform stencil.
//!
//! `G(o) = (2π)⁻² ∬ exp(i·o·ξ) / S(ξ) dξ` over `[−π, π]²`, with `S` the
//! stencil symbol. Writing `S = P(ξ₁) + Q(ξ₁)·cos ξ₂`, the `ξ₂` integral is a
//! single residue:
//!
//! ```text
//! (2π)⁻¹ ∫ exp(i·n·ξ₂) / (P + Q cos ξ₂) dξ₂ = λ^|n| / w,
//! w = √(P² − Q²),  λ = −Q / (P + w),  |λ| ≤ 1.
//! ```
//!
//! The remaining `ξ₁` integral has inverse square-root endpoints where
//! `P = ±Q`; both are linear in `cos ξ₁`, so the interval is split there and
//! a cosine substitution makes the integrand smooth for composite Gauss rules.
//!
//! With real `K` the outgoing root is selected by the limiting-absorption
//! rule `Im K ↓ 0`, which on the propagating band gives `w = −i√(Q² − P²)`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::SparseMatrix;
use crate::lattice::{build_stencil, LatticeNode, Offset, UniformStencil};

/// Environment variable naming the directory for cached tables.
pub const CACHE_ENV: &str = "FEMBAE_GREENS_CACHE";

const CACHE_VERSION: &str = "fembae-greens v1";

const GAUSS_ORDER: usize = 20;

/// How to obtain the outgoing solution when the effective wavenumber is real.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LimitingAbsorption {
    /// Select the outgoing root in closed form (the `η → 0` limit taken analytically).
    Exact,
    /// Extrapolate values at `η ∈ {0.1, 0.05, 0.025}` to `η = 0`.
    Richardson,
    /// Refuse real wavenumbers.
    Forbid,
}

/// Panel count of the `ξ₁` rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quadrature {
    /// Double the panel count until probe values move by less than `tolerance`.
    Auto { tolerance: f64 },
    Fixed { panels: usize },
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::Auto { tolerance: 1e-11 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreensSettings {
    /// `η`: values are computed at `K·(1 + iη)`.
    pub absorption: f64,
    pub quadrature: Quadrature,
    pub limit: LimitingAbsorption,
}

impl Default for GreensSettings {
    fn default() -> Self {
        GreensSettings {
            absorption: 0.0,
            quadrature: Quadrature::default(),
            limit: LimitingAbsorption::Exact,
        }
    }
}

const MAX_PANELS: usize = 1 << 12;
const RICHARDSON_ETAS: [f64; 3] = [0.1, 0.05, 0.025];

#[derive(Clone, Copy, Debug, PartialEq)]
enum Branch {
    /// `Im K > 0`: the decaying root.
    Decaying,
    /// Real `K`: the outgoing root.
    Outgoing,
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 1..=n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p2) / k as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// The tabulated one-dimensional rule in `ξ₁` together with the residue
/// data `λ`, `1/w` at every node.
struct LineRule {
    xi: Vec<f64>,
    weight: Vec<f64>,
    lambda: Vec<Complex64>,
    inv_w: Vec<Complex64>,
}

/// Points of `(0, π)` where `P = ±Q` for the real part of the stencil.
fn branch_points(stencil: &UniformStencil) -> Vec<f64> {
    let b00 = stencil.coefficient(Offset(0, 0));
    let b10 = stencil.coefficient(Offset(1, 0));
    let b01 = stencil.coefficient(Offset(0, 1));
    let b11 = stencil.coefficient(Offset(1, 1));
    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        let slope = b10 * 2.0 + b11 * (4.0 * sign);
        if slope.norm() < 1e-14 {
            continue;
        }
        let c = (-(b00 + b01 * (2.0 * sign)) / slope).re;
        if c > -1.0 && c < 1.0 {
            out.push(c.acos());
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn line_rule(stencil: &UniformStencil, branch: Branch, panels: usize) -> LineRule {
    let (gx, gw) = gauss_legendre(GAUSS_ORDER);
    let mut breaks = vec![0.0];
    breaks.extend(branch_points(stencil));
    breaks.push(PI);

    let b00 = stencil.coefficient(Offset(0, 0));
    let b10 = stencil.coefficient(Offset(1, 0));
    let b01 = stencil.coefficient(Offset(0, 1));
    let b11 = stencil.coefficient(Offset(1, 1));

    let cap = (breaks.len() - 1) * panels * GAUSS_ORDER;
    let mut rule = LineRule {
        xi: Vec::with_capacity(cap),
        weight: Vec::with_capacity(cap),
        lambda: Vec::with_capacity(cap),
        inv_w: Vec::with_capacity(cap),
    };
    for seg in breaks.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let dt = PI / panels as f64;
        for p in 0..panels {
            let t0 = p as f64 * dt;
            for (x, w) in gx.iter().zip(&gw) {
                let tau = t0 + 0.5 * dt * (x + 1.0);
                let xi = a + 0.5 * (b - a) * (1.0 - tau.cos());
                let jac = 0.5 * (b - a) * tau.sin() * 0.5 * dt;
                let c = xi.cos();
                let p_ = b00 + b10 * (2.0 * c);
                let q_ = (b01 + b11 * (2.0 * c)) * 2.0;
                let disc = p_ * p_ - q_ * q_;
                let root = match branch {
                    Branch::Decaying => {
                        let r = disc.sqrt();
                        if (p_ + r).norm() >= (p_ - r).norm() {
                            r
                        } else {
                            -r
                        }
                    }
                    Branch::Outgoing => {
                        if disc.re >= 0.0 {
                            Complex64::new(disc.re.sqrt() * p_.re.signum(), 0.0)
                        } else {
                            Complex64::new(0.0, -(-disc.re).sqrt())
                        }
                    }
                };
                rule.xi.push(xi);
                rule.weight.push(w * jac / PI);
                rule.lambda.push(-q_ / (p_ + root));
                rule.inv_w.push(root.inv());
            }
        }
    }
    rule
}

impl LineRule {
    /// Values for canonical offsets (any order), returned in input order.
    fn evaluate(&self, offsets: &[Offset]) -> Vec<Complex64> {
        let mut by_power: BTreeMap<i32, Vec<(usize, i32)>> = BTreeMap::new();
        for (k, o) in offsets.iter().enumerate() {
            by_power.entry(o.1.abs()).or_default().push((k, o.0.abs()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); offsets.len()];
        let mut column = vec![Complex64::new(0.0, 0.0); self.xi.len()];
        for (n, items) in by_power {
            for q in 0..self.xi.len() {
                column[q] = self.lambda[q].powu(n as u32) * self.inv_w[q] * self.weight[q];
            }
            for (k, m) in items {
                let mut acc = Complex64::new(0.0, 0.0);
                for q in 0..self.xi.len() {
                    acc += column[q] * (m as f64 * self.xi[q]).cos();
                }
                out[k] = acc;
            }
        }
        out
    }
}

fn probe_offsets(extent: i32) -> Vec<Offset> {
    let m = ((extent.max(1) + 7) / 8) * 8;
    vec![
        Offset(0, 0),
        Offset(1, 0),
        Offset(1, 1),
        Offset(m / 2, m / 4),
        Offset(m, 0),
        Offset(m, m / 2),
        Offset(m, m),
    ]
}

fn select_panels(stencil: &UniformStencil, branch: Branch, quadrature: Quadrature, extent: i32) -> usize {
    match quadrature {
        Quadrature::Fixed { panels } => panels.max(1),
        Quadrature::Auto { tolerance } => {
            let probes = probe_offsets(extent);
            let mut panels = 4;
            let mut prev = line_rule(stencil, branch, panels).evaluate(&probes);
            while panels < MAX_PANELS {
                panels *= 2;
                let cur = line_rule(stencil, branch, panels).evaluate(&probes);
                let diff = prev
                    .iter()
                    .zip(&cur)
                    .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
                    .fold(0.0, f64::max);
                prev = cur;
                if diff < tolerance {
                    break;
                }
            }
            panels
        }
    }
}

/// Stencil actually integrated: `K` replaced by `K·(1 + iη)`.
/// The stencil at `K·(1 + iη)`.
pub fn effective_stencil(stencil: &UniformStencil, absorption: f64) -> Result<UniformStencil> {
    if !(absorption >= 0.0) || !absorption.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "absorption must be nonnegative, got {absorption}"
        )));
    }
    if absorption == 0.0 {
        return Ok(stencil.clone());
    }
    build_stencil(stencil.wavenumber() * Complex64::new(1.0, absorption), stencil.grid_spacing())
}

/// Evaluate plain (non-extrapolated) values; returns the values and the panel count used.
fn evaluate_direct(
    stencil: &UniformStencil,
    offsets: &[Offset],
    absorption: f64,
    quadrature: Quadrature,
    limit: LimitingAbsorption,
) -> Result<(Vec<Complex64>, usize)> {
    let eff = effective_stencil(stencil, absorption)?;
    let branch = if eff.kh().im > 0.0 {
        Branch::Decaying
    } else {
        match limit {
            LimitingAbsorption::Exact => Branch::Outgoing,
            LimitingAbsorption::Forbid | LimitingAbsorption::Richardson => {
                return Err(Error::SingularIntegrand(format!(
                    "real K·h = {} puts poles on the integration path",
                    eff.kh().re
                )))
            }
        }
    };
    let extent = offsets.iter().map(|o| o.0.abs().max(o.1.abs())).max().unwrap_or(0);
    let panels = select_panels(&eff, branch, quadrature, extent);
    let canon: Vec<Offset> = offsets.iter().map(|o| o.canonical()).collect();
    Ok((line_rule(&eff, branch, panels).evaluate(&canon), panels))
}

/// Three-level Richardson extrapolation from `η ∈ {0.1, 0.05, 0.025}`.
///
/// Returns the extrapolated values and, per offset, the magnitudes of the
/// successive first-level extrapolants' differences.
pub fn richardson_limit(
    stencil: &UniformStencil,
    offsets: &[Offset],
    quadrature: Quadrature,
) -> Result<(Vec<Complex64>, Vec<[f64; 2]>)> {
    let mut levels = Vec::new();
    for eta in RICHARDSON_ETAS {
        levels.push(evaluate_direct(stencil, offsets, eta, quadrature, LimitingAbsorption::Forbid)?.0);
    }
    let mut values = Vec::with_capacity(offsets.len());
    let mut diffs = Vec::with_capacity(offsets.len());
    for k in 0..offsets.len() {
        let (g1, g2, g3) = (levels[0][k], levels[1][k], levels[2][k]);
        let r1 = g2 * 2.0 - g1;
        let r2 = g3 * 2.0 - g2;
        values.push((r2 * 4.0 - r1) / 3.0);
        diffs.push([(g2 - g1).norm(), (g3 - g2).norm()]);
    }
    Ok((values, diffs))
}

/// `G(offset)` for the stencil at `K·(1 + iη)`.
pub fn greens_value(stencil: &UniformStencil, offset: Offset, settings: &GreensSettings) -> Result<Complex64> {
    Ok(evaluate(stencil, &[offset], settings)?.0[0])
}

fn evaluate(stencil: &UniformStencil, offsets: &[Offset], settings: &GreensSettings) -> Result<(Vec<Complex64>, usize)> {
    let eff = effective_stencil(stencil, settings.absorption)?;
    if eff.kh().im == 0.0 && settings.limit == LimitingAbsorption::Richardson {
        let (values, _) = richardson_limit(&eff, offsets, settings.quadrature)?;
        return Ok((values, 0));
    }
    evaluate_direct(stencil, offsets, settings.absorption, settings.quadrature, settings.limit)
}

/// Tensor-product trapezoid evaluation of the full two-dimensional integral.
///
/// Only meaningful with absorption; `points` per direction.
pub fn greens_value_trapezoid(stencil: &UniformStencil, offset: Offset, absorption: f64, points: usize) -> Result<Complex64> {
    let eff = effective_stencil(stencil, absorption)?;
    if eff.kh().im <= 0.0 {
        return Err(Error::SingularIntegrand("trapezoid rule needs Im K > 0".into()));
    }
    let step = 2.0 * PI / points as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..points {
        let x = -PI + a as f64 * step;
        for b in 0..points {
            let y = -PI + b as f64 * step;
            let phase = Complex64::from_polar(1.0, offset.0 as f64 * x + offset.1 as f64 * y);
            acc += phase / eff.symbol([x, y]);
        }
    }
    Ok(acc / (points * points) as f64)
}

/// Tabulated `G`, keyed by canonical orbit representative.
#[derive(Clone, Debug, PartialEq)]
pub struct GreensTable {
    stencil: UniformStencil,
    settings: GreensSettings,
    panels: usize,
    entries: BTreeMap<Offset, Complex64>,
}

impl GreensTable {
    pub fn stencil(&self) -> &UniformStencil {
        &self.stencil
    }

    pub fn absorption(&self) -> f64 {
        self.settings.absorption
    }

    pub fn settings(&self) -> &GreensSettings {
        &self.settings
    }

    /// Panel count of the `ξ₁` rule (0 for extrapolated tables).
    pub fn panels(&self) -> usize {
        self.panels
    }

    /// Number of stored orbit representatives.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, o: Offset) -> bool {
        self.entries.contains_key(&o.canonical())
    }

    pub fn get(&self, o: Offset) -> Result<Complex64> {
        self.entries
            .get(&o.canonical())
            .copied()
            .ok_or(Error::IncompleteTable(o.0, o.1))
    }

    /// `G_{a,b}` between two lattice nodes.
    pub fn between(&self, a: LatticeNode, b: LatticeNode) -> Result<Complex64> {
        self.get(a.offset_to(b))
    }

    pub fn representatives(&self) -> impl Iterator<Item = (Offset, Complex64)> + '_ {
        self.entries.iter().map(|(o, v)| (*o, *v))
    }

    /// Add entries for offsets not yet present, at the same quadrature settings.
    pub fn extend(&mut self, offsets: impl IntoIterator<Item = Offset>) -> Result<()> {
        let missing: Vec<Offset> = offsets
            .into_iter()
            .map(|o| o.canonical())
            .filter(|o| !self.entries.contains_key(o))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if missing.is_empty() {
            return Ok(());
        }
        let settings = GreensSettings {
            quadrature: if self.panels > 0 {
                Quadrature::Fixed { panels: self.panels }
            } else {
                self.settings.quadrature
            },
            ..self.settings
        };
        let (values, _) = evaluate(&self.stencil, &missing, &settings)?;
        self.entries.extend(missing.into_iter().zip(values));
        Ok(())
    }
}

/// Tabulate `G` on a set of offsets (closed under the square symmetries internally).
pub fn tabulate_greens(
    stencil: &UniformStencil,
    offsets: impl IntoIterator<Item = Offset>,
    settings: &GreensSettings,
) -> Result<GreensTable> {
    let reps: Vec<Offset> = offsets
        .into_iter()
        .map(|o| o.canonical())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if reps.is_empty() {
        return Ok(GreensTable {
            stencil: stencil.clone(),
            settings: *settings,
            panels: 0,
            entries: BTreeMap::new(),
        });
    }
    let (values, panels) = evaluate(stencil, &reps, settings)?;
    Ok(GreensTable {
        stencil: stencil.clone(),
        settings: *settings,
        panels,
        entries: reps.into_iter().zip(values).collect(),
    })
}

/// `b_{j,m} = Σ_n α^ex_{j,n} G(n − m) − δ_{j,m}`.
pub fn compute_b(
    table: &GreensTable,
    alpha_ex: &SparseMatrix<LatticeNode>,
    j: LatticeNode,
    m: LatticeNode,
) -> Result<Complex64> {
    let row = alpha_ex
        .row(j)
        .ok_or_else(|| Error::Assembly(format!("exterior matrix has no row for node {j}")))?;
    let mut acc = Complex64::new(if j == m { -1.0 } else { 0.0 }, 0.0);
    for (&n, &a) in row {
        acc += a * table.between(n, m)?;
    }
    Ok(acc)
}

/// Offsets `a − b` for all pairs.
pub fn pair_offsets<'a>(
    from: impl IntoIterator<Item = &'a LatticeNode>,
    to: impl IntoIterator<Item = &'a LatticeNode> + Clone,
) -> BTreeSet<Offset> {
    let mut out = BTreeSet::new();
    for a in from {
        for b in to.clone() {
            out.insert(a.offset_to(*b).canonical());
        }
    }
    out
}

fn cache_file(dir: &Path, stencil: &UniformStencil, settings: &GreensSettings, panels: usize) -> PathBuf {
    let limit = match settings.limit {
        LimitingAbsorption::Exact => "exact",
        LimitingAbsorption::Richardson => "richardson",
        LimitingAbsorption::Forbid => "forbid",
    };
    dir.join(format!(
        "greens-{}-eta{:016x}-{}-p{}.csv",
        stencil.fingerprint(),
        settings.absorption.to_bits(),
        limit,
        panels
    ))
}

/// Write a table as CSV with bit-exact hexadecimal values.
pub fn write_table(table: &GreensTable, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# {CACHE_VERSION}\n"));
    let kh = table.stencil.kh();
    out.push_str(&format!(
        "# kh_re={:016x} kh_im={:016x} h={:016x} eta={:016x} panels={} stencil={}\n",
        kh.re.to_bits(),
        kh.im.to_bits(),
        table.stencil.grid_spacing().to_bits(),
        table.settings.absorption.to_bits(),
        table.panels,
        table.stencil.fingerprint()
    ));
    out.push_str("a,b,re,im\n");
    for (o, v) in &table.entries {
        out.push_str(&format!("{},{},{:016x},{:016x}\n", o.0, o.1, v.re.to_bits(), v.im.to_bits()));
    }
    let tmp = path.with_extension("tmp");
    fs::File::create(&tmp)?.write_all(out.as_bytes())?;
    fs::rename(tmp, path)?;
    Ok(())
}

/// Read the entries of a table written by [`write_table`], checking it
/// belongs to `stencil` and `panels`.
pub fn read_table_entries(path: &Path, stencil: &UniformStencil, panels: usize) -> Result<BTreeMap<Offset, Complex64>> {
    let bad = |message: String| Error::Cache {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(&format!("# {CACHE_VERSION}")) {
        return Err(bad("unknown version header".into()));
    }
    let meta = lines.next().ok_or_else(|| bad("missing metadata".into()))?;
    if !meta.contains(&format!("stencil={}", stencil.fingerprint())) || !meta.contains(&format!("panels={panels} ")) {
        return Err(bad("stencil or quadrature mismatch".into()));
    }
    if lines.next() != Some("a,b,re,im") {
        return Err(bad("missing column header".into()));
    }
    let mut entries = BTreeMap::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad(format!("malformed row {line:?}")));
        }
        let parse_i = |s: &str| s.parse::<i32>().map_err(|e| bad(e.to_string()));
        let parse_f = |s: &str| u64::from_str_radix(s, 16).map(f64::from_bits).map_err(|e| bad(e.to_string()));
        entries.insert(
            Offset(parse_i(f[0])?, parse_i(f[1])?),
            Complex64::new(parse_f(f[2])?, parse_f(f[3])?),
        );
    }
    Ok(entries)
}

/// Tabulate through a cache directory: reuse stored entries, compute the
/// rest at the same panel count, write the merged table back.
pub fn tabulate_cached(
    dir: &Path,
    stencil: &UniformStencil,
    offsets: impl IntoIterator<Item = Offset>,
    settings: &GreensSettings,
) -> Result<GreensTable> {
    let reps: BTreeSet<Offset> = offsets.into_iter().map(|o| o.canonical()).collect();
    let eff = effective_stencil(stencil, settings.absorption)?;
    let extrapolated = eff.kh().im == 0.0 && settings.limit == LimitingAbsorption::Richardson;
    if extrapolated || reps.is_empty() {
        return tabulate_greens(stencil, reps, settings);
    }
    let branch = if eff.kh().im > 0.0 { Branch::Decaying } else { Branch::Outgoing };
    let extent = reps.iter().map(|o| o.0).max().unwrap_or(0);
    let panels = select_panels(&eff, branch, settings.quadrature, extent);
    fs::create_dir_all(dir)?;
    let path = cache_file(dir, stencil, settings, panels);
    let entries = if path.exists() {
        read_table_entries(&path, stencil, panels)?
    } else {
        BTreeMap::new()
    };
    let mut table = GreensTable {
        stencil: stencil.clone(),
        settings: *settings,
        panels,
        entries,
    };
    let before = table.len();
    table.extend(reps.iter().copied())?;
    if table.len() != before {
        write_table(&table, &path)?;
    }
    let mut restricted = table.clone();
    restricted.entries.retain(|o, _| reps.contains(o));
    Ok(restricted)
}

/// Tabulate, going through [`CACHE_ENV`] when it is set.
pub fn tabulate_with_env_cache(
    stencil: &UniformStencil,
    offsets: impl IntoIterator<Item = Offset>,
    settings: &GreensSettings,
) -> Result<GreensTable> {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => tabulate_cached(Path::new(&dir), stencil, offsets, settings),
        _ => tabulate_greens(stencil, offsets, settings),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stencil(kh: f64) -> UniformStencil {
        build_stencil(Complex64::new(kh, 0.0), 1.0).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(GAUSS_ORDER);
        for p in 0..(2 * GAUSS_ORDER) {
            let num: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((num - exact).abs() < 1e-14, "degree {p}: {num} vs {exact}");
        }
    }

    #[test]
    fn residue_route_matches_trapezoid_with_absorption() {
        let s = stencil(1.0);
        let settings = GreensSettings {
            absorption: 0.5,
            ..Default::default()
        };
        for o in [Offset(0, 0), Offset(2, 1), Offset(3, 0)] {
            let a = greens_value(&s, o, &settings).unwrap();
            let b = greens_value_trapezoid(&s, o, 0.5, 256).unwrap();
            assert!((a - b).norm() < 1e-10 * b.norm().max(1e-3), "{o:?}: {a} vs {b}");
        }
    }

    #[test]
    fn forbid_mode_rejects_real_wavenumber() {
        let s = stencil(0.5);
        let settings = GreensSettings {
            limit: LimitingAbsorption::Forbid,
            ..Default::default()
        };
        assert!(matches!(greens_value(&s, Offset(0, 0), &settings), Err(Error::SingularIntegrand(_))));
    }

    #[test]
    fn exact_limit_is_the_small_absorption_limit() {
        let s = stencil(0.8);
        let exact = greens_value(&s, Offset(3, 1), &GreensSettings::default()).unwrap();
        let mut last = f64::INFINITY;
        for eta in [1e-2, 1e-3, 1e-4] {
            let g = greens_value(
                &s,
                Offset(3, 1),
                &GreensSettings {
                    absorption: eta,
                    ..Default::default()
                },
            )
            .unwrap();
            let d = (g - exact).norm();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn symmetric_lookup_and_empty_table() {
        let s = stencil(0.5);
        let t = tabulate_greens(&s, Offset(1, 0).orbit(), &GreensSettings::default()).unwrap();
        assert_eq!(t.len(), 1);
        let v = t.get(Offset(1, 0)).unwrap();
        for o in Offset(1, 0).orbit() {
            assert_eq!(t.get(o).unwrap(), v);
        }
        assert!(matches!(t.get(Offset(2, 0)), Err(Error::IncompleteTable(2, 0))));
        let empty = tabulate_greens(&s, std::iter::empty(), &GreensSettings::default()).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn cache_roundtrip_is_bit_identical() {
        let dir = std::env::temp_dir().join(format!("fembae-cache-test-{}", std::process::id()));
        let s = stencil(0.6);
        let settings = GreensSettings::default();
        let offsets: Vec<Offset> = (0..6).flat_map(|a| (0..=a).map(move |b| Offset(a, b))).collect();
        let first = tabulate_cached(&dir, &s, offsets.clone(), &settings).unwrap();
        let again = tabulate_cached(&dir, &s, offsets.clone(), &settings).unwrap();
        assert_eq!(first, again);
        let fresh = tabulate_greens(
            &s,
            offsets,
            &GreensSettings {
                quadrature: Quadrature::Fixed { panels: first.panels() },
                ..settings
            },
        )
        .unwrap();
        for (o, v) in first.representatives() {
            let w = fresh.get(o).unwrap();
            assert_eq!(v.re.to_bits(), w.re.to_bits());
            assert_eq!(v.im.to_bits(), w.im.to_bits());
        }
        fs::remove_dir_all(dir).ok();
    }
}
