use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fembae::harness::{
    apply_settings, emit, fit_slope, parse_config_text, resonance_csv, run_convergence, run_resonance_study,
    run_staircase_comparison, run_truncation_study, solve_coupled_case, square_dirichlet_kh, sweep_csv,
    sweep_points, ExperimentConfig, NuMode,
};
use fembae::lattice::{build_partition, rectangle_cells, LatticeNode};
use fembae::solve::{directivity, directivity_csv, solution_csv};

#[derive(Parser)]
#[command(name = "fembae", version, about = "Circular-scatterer benchmark for the coupled FEM/lattice solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// `key = value` file applied before the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Scatterer radius in grid units (comma list for `convergence`).
    #[arg(long, global = true, value_delimiter = ',')]
    radius: Vec<f64>,
    /// Harmonic of the load (comma list for `convergence`).
    #[arg(long, global = true, value_delimiter = ',')]
    harmonic: Vec<u32>,
    /// Element factor on the scatterer (comma list for `convergence`).
    #[arg(long, global = true, value_delimiter = ',')]
    sigma: Vec<f64>,
    /// Outer radius of the element layer (comma list for `truncation`).
    #[arg(long, global = true, value_delimiter = ',')]
    rext: Vec<f64>,
    /// `K·h` values.
    #[arg(long, global = true, value_delimiter = ',')]
    kh: Vec<f64>,
    #[arg(long, global = true, value_parser = ["cfie", "kirchhoff"])]
    nu_mode: Option<String>,
    /// Absorption used in the Green's function and the element layer.
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[arg(long, global = true)]
    mesh_file: Option<PathBuf>,
    /// Directory for CSV output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["nodal", "boundary-mass"])]
    force: Option<String>,
    #[arg(long, global = true, value_parser = ["loop", "scatterer"])]
    locus: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Error against `K·h` for every radius, harmonic and sigma given.
    Convergence,
    /// Error for several outer layer radii.
    Truncation,
    /// Coupled solver against the lattice-only staircase model.
    Staircase,
    /// Condition of the boundary operator on a square of cells.
    Resonance {
        #[arg(long, default_value_t = 6)]
        cells: i32,
    },
    /// One solve with the mesh solution and a far-field pattern.
    SolveOne {
        #[arg(long, default_value_t = 40.0)]
        ring: f64,
        #[arg(long, default_value_t = 360)]
        samples: usize,
    },
}

fn first<T: ToString>(v: &[T]) -> Option<String> {
    v.first().map(T::to_string)
}

fn experiment(flags: &Flags) -> fembae::Result<(ExperimentConfig, bool)> {
    let mut settings = match &flags.config {
        Some(path) => parse_config_text(&std::fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    let mut set = |key: &str, v: Option<String>| {
        if let Some(v) = v {
            settings.insert(key.to_string(), v);
        }
    };
    set("radius", first(&flags.radius));
    set("harmonic", first(&flags.harmonic));
    set("sigma", first(&flags.sigma));
    set("rext", first(&flags.rext));
    set("eta", flags.eta.map(|v| v.to_string()));
    set("nu-mode", flags.nu_mode.clone());
    set("force", flags.force.clone());
    set("locus", flags.locus.clone());
    set("mesh-file", flags.mesh_file.as_ref().map(|p| p.display().to_string()));
    set("out", flags.out.as_ref().map(|p| p.display().to_string()));
    if !flags.kh.is_empty() {
        let list: Vec<String> = flags.kh.iter().map(f64::to_string).collect();
        set("kh", Some(list.join(",")));
    }
    let explicit_kh = settings.contains_key("kh");
    let mut cfg = ExperimentConfig::default();
    apply_settings(&mut cfg, &settings)?;
    if !settings.contains_key("rext") {
        cfg.base.exterior_radius = cfg.base.radius + 1.0;
    }
    Ok((cfg, explicit_kh))
}

fn or_base<T: Copy>(list: &[T], base: T) -> Vec<T> {
    if list.is_empty() {
        vec![base]
    } else {
        list.to_vec()
    }
}

fn run(cli: Cli) -> fembae::Result<()> {
    let (cfg, explicit_kh) = experiment(&cli.flags)?;
    let out = cfg.out_dir.as_deref();
    match cli.command {
        Command::Convergence => {
            let mut rows = Vec::new();
            for &radius in &or_base(&cli.flags.radius, cfg.base.radius) {
                for &harmonic in &or_base(&cli.flags.harmonic, cfg.base.harmonic) {
                    for &sigma in &or_base(&cli.flags.sigma, cfg.base.sigma) {
                        let mut c = cfg.clone();
                        let rext = c.base.exterior_radius - c.base.radius;
                        c.base.radius = radius;
                        c.base.exterior_radius = radius + rext;
                        c.base.harmonic = harmonic;
                        c.base.sigma = sigma;
                        let part = run_convergence(&c)?;
                        let pts = sweep_points(&part);
                        println!("R={radius} N={harmonic} sigma={sigma}");
                        for row in &part {
                            match &row.outcome {
                                Ok(r) => println!("  kh={:<6} error={:.4e}", row.config.kh, r.error),
                                Err(e) => println!("  kh={:<6} failed: {e}", row.config.kh),
                            }
                        }
                        match fit_slope(&pts, 0.2, 1.0) {
                            Some(s) => println!("  slope={s:.3}"),
                            None => println!("  slope=n/a"),
                        }
                        rows.extend(part);
                    }
                }
            }
            emit(out, "convergence.csv", &sweep_csv(&rows))?;
        }
        Command::Truncation => {
            let r = cfg.base.radius;
            let radii = if cli.flags.rext.len() > 1 { cli.flags.rext.clone() } else { vec![r + 1.0, r + 5.0, r + 10.0] };
            let study = run_truncation_study(&cfg, &radii)?;
            for row in &study.rows {
                println!("rext={:<6} kh={:<6} error={:?}", row.config.exterior_radius, row.config.kh, row.error());
            }
            println!("max pairwise ratio {:.3}", study.max_pairwise_ratio);
            emit(out, "truncation.csv", &sweep_csv(&study.rows))?;
        }
        Command::Staircase => {
            let rows = run_staircase_comparison(&cfg)?;
            let mut all = Vec::new();
            for r in rows {
                println!("kh={:<6} coupled={:?} staircase={:?}", r.kh, r.coupled.error(), r.staircase.error());
                all.push(r.coupled);
                all.push(r.staircase);
            }
            emit(out, "staircase.csv", &sweep_csv(&all))?;
        }
        Command::Resonance { cells } => {
            let partition = build_partition(&rectangle_cells(LatticeNode(0, 0), cells, cells))?;
            let sweep = if explicit_kh {
                cfg.kh_sweep.clone()
            } else {
                let k0 = square_dirichlet_kh(cells as u32, 1)[0];
                (0..=40).map(|i| k0 - 0.05 + 0.0025 * i as f64).collect()
            };
            let rows = run_resonance_study(
                &partition,
                &[NuMode::Kirchhoff, NuMode::Cfie],
                &sweep,
                &cfg.base.greens_settings(),
            )?;
            for r in &rows {
                println!("kh={:.4} {:?} cond={:.3e}", r.kh, r.nu_mode, r.condition_c);
            }
            emit(out, "resonance.csv", &resonance_csv(&rows))?;
        }
        Command::SolveOne { ring, samples } => {
            let case = cfg.case(cfg.kh_sweep[0]);
            let mut solved = solve_coupled_case(&case)?;
            let s = &solved.solution;
            let centre = solved.mesh.centre();
            let pattern = directivity(&s.u_ex_boundary, &s.h_ex, &mut solved.ops, ring, centre, samples)?;
            println!(
                "config {} nodes={} loop={} residual={:.2e}",
                case.hash(),
                solved.mesh.nodes().len(),
                solved.partition.boundary_nodes().len(),
                s.residual
            );
            emit(out, "solution.csv", &solution_csv(&solved.mesh, &s.u_in))?;
            emit(out, "directivity.csv", &directivity_csv(&pattern))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
