//! Command-line driver: scenario runs, the spectral convergence study, the
//! verification suite, and mesh utilities.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swe_dgsem::config::RunConfig;
use swe_dgsem::diagnostics::{compute_totals, l2_error, Quantity};
use swe_dgsem::error::Error;
use swe_dgsem::fluxes::FluxMode;
use swe_dgsem::generator::{generate_structured_mesh, SineWarp, StructuredMeshSpec};
use swe_dgsem::mesh_io::{load_mesh, save_mesh};
use swe_dgsem::operators::operators;
use swe_dgsem::output::{write_diagnostics, write_field};
use swe_dgsem::scenario::{build_scenario, scenario_names, ScenarioOverrides};
use swe_dgsem::time::run_time_loop;
use swe_dgsem::verify;

#[derive(Parser)]
#[command(name = "swe-dgsem", version, about = "Entropy-stable DGSEM solver for the 2D shallow water equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Scenario name (see `run --list`).
    #[arg(long)]
    scenario: Option<String>,
    /// Polynomial order N.
    #[arg(long)]
    n: Option<usize>,
    /// Fixed time step.
    #[arg(long)]
    dt: Option<f64>,
    /// CFL number (overrides dt).
    #[arg(long)]
    cfl: Option<f64>,
    /// Final time.
    #[arg(long)]
    tend: Option<f64>,
    /// Surface flux mode: ec or es.
    #[arg(long)]
    flux: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Diagnostics cadence in steps (0 = first and last only).
    #[arg(long)]
    every: Option<usize>,
    /// Also write initial/final field dumps.
    #[arg(long)]
    fields: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario, optionally configured by a file.
    Run {
        /// Configuration file (flags override its values).
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: RunFlags,
        /// List available scenarios and exit.
        #[arg(long)]
        list: bool,
    },
    /// Spectral convergence study on the manufactured solution.
    Convergence {
        /// Smallest polynomial order.
        #[arg(long, default_value_t = 4)]
        nmin: usize,
        /// Largest polynomial order.
        #[arg(long, default_value_t = 12)]
        nmax: usize,
        /// Fixed time step.
        #[arg(long, default_value_t = 1.0 / 2000.0)]
        dt: f64,
        /// Final time.
        #[arg(long, default_value_t = 0.5)]
        tend: f64,
        /// Output directory for the CSV table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite (all criteria or a single one).
    Verify {
        /// Criterion number (1..=11); all when omitted.
        #[arg(long)]
        criterion: Option<usize>,
    },
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Generate a structured mesh file.
    Gen {
        /// Output path.
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        nx: usize,
        #[arg(long, default_value_t = 4)]
        ny: usize,
        /// Polynomial order of the edge sampling.
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Domain as x0,x1,y0,y1.
        #[arg(long, default_value = "-1,1,-1,1")]
        domain: String,
        /// Sinusoidal warp amplitude (0 = straight elements).
        #[arg(long, default_value_t = 0.0)]
        curved: f64,
        /// Periodic in both directions.
        #[arg(long)]
        periodic: bool,
    },
    /// Load, validate, and report on a mesh file.
    Check { path: PathBuf },
}

fn parse_flux(s: &str) -> Result<FluxMode, Error> {
    s.parse::<FluxMode>()
        .map_err(|m| Error::Config { line: 0, message: m })
}

fn cmd_run(config: Option<PathBuf>, flags: RunFlags, list: bool) -> Result<(), Error> {
    if list {
        for name in scenario_names() {
            println!("{name}");
        }
        return Ok(());
    }
    let mut cfg = match &config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = flags.scenario {
        cfg.scenario = s;
    }
    if cfg.scenario.is_empty() {
        return Err(Error::Config {
            line: 0,
            message: "no scenario given (use --scenario or a config file)".into(),
        });
    }
    if let Some(n) = flags.n {
        cfg.order = Some(n);
    }
    if let Some(dt) = flags.dt {
        cfg.dt = Some(dt);
    }
    if let Some(cfl) = flags.cfl {
        cfg.cfl = Some(cfl);
    }
    if let Some(t) = flags.tend {
        cfg.t_end = Some(t);
    }
    if let Some(f) = flags.flux {
        cfg.flux_mode = Some(parse_flux(&f)?);
    }
    if let Some(out) = flags.out {
        cfg.out_dir = Some(out.to_string_lossy().to_string());
    }
    if let Some(every) = flags.every {
        cfg.output_every = every;
    }
    cfg.dump_fields |= flags.fields;

    let scenario = build_scenario(&cfg.scenario, &cfg.overrides())?;
    let out_dir = PathBuf::from(cfg.out_dir.as_deref().unwrap_or("out"));
    let problem = &scenario.problem;
    let mut field = scenario.initial.clone();
    let mut records = Vec::new();
    let mut time_cfg = scenario.time.clone();
    time_cfg.callback_every = cfg.output_every;

    if cfg.dump_fields {
        write_field(problem, &field, &out_dir.join(format!("{}_initial.dat", cfg.scenario)))?;
    }
    let reference = scenario.reference_h.clone();
    let steps = run_time_loop(problem, &mut field, &time_cfg, |_, f| {
        let mut rec = compute_totals(problem, f)?;
        if let Some(r) = &reference {
            rec.l2_h = Some(l2_error(problem, f, Quantity::TotalHeight, |x, y, t| {
                r(x, y, t)
            }));
        }
        records.push(rec);
        Ok(())
    })?;

    write_diagnostics(&records, &out_dir.join(format!("{}_diagnostics.csv", cfg.scenario)))?;
    if cfg.dump_fields {
        write_field(problem, &field, &out_dir.join(format!("{}_final.dat", cfg.scenario)))?;
    }

    let first = records.first().expect("at least the initial record");
    let last = records.last().unwrap();
    println!(
        "{}: {} steps to t = {:.6}",
        cfg.scenario, steps, last.t
    );
    println!(
        "  mass drift {:.3e}  energy drift {:.3e}  min h {:.6}",
        (last.mass - first.mass).abs(),
        (last.energy - first.energy).abs(),
        last.min_h
    );
    if let Some(l2) = last.l2_h {
        println!("  L2(H) error {l2:.3e}");
    }
    println!("  diagnostics: {}", out_dir.join(format!("{}_diagnostics.csv", cfg.scenario)).display());
    Ok(())
}

fn cmd_convergence(
    nmin: usize,
    nmax: usize,
    dt: f64,
    tend: f64,
    out: Option<PathBuf>,
) -> Result<(), Error> {
    println!("manufactured-solution convergence, dt = {dt}, T = {tend}");
    println!("{:>4} {:>14} {:>14}", "N", "L2(H) EC", "L2(H) ES");
    let mut rows = vec!["n,l2_ec,l2_es".to_string()];
    for n in nmin..=nmax {
        let mut errs = [0.0f64; 2];
        for (slot, mode) in [FluxMode::Ec, FluxMode::Es].iter().enumerate() {
            let ov = ScenarioOverrides {
                order: Some(n),
                flux_mode: Some(*mode),
                dt: Some(dt),
                t_end: Some(tend),
                cfl: None,
            };
            let scenario = build_scenario("manufactured", &ov)?;
            let mut field = scenario.initial.clone();
            run_time_loop(&scenario.problem, &mut field, &scenario.time, |_, _| Ok(()))?;
            let reference = scenario.reference_h.clone().unwrap();
            errs[slot] = l2_error(&scenario.problem, &field, Quantity::TotalHeight, |x, y, t| {
                reference(x, y, t)
            });
        }
        println!("{:>4} {:>14.6e} {:>14.6e}", n, errs[0], errs[1]);
        rows.push(format!("{n},{:e},{:e}", errs[0], errs[1]));
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        let path = dir.join("convergence.csv");
        std::fs::write(&path, rows.join("\n") + "\n")?;
        println!("table: {}", path.display());
    }
    Ok(())
}

fn cmd_verify(criterion: Option<usize>) -> Result<bool, Error> {
    let reports = match criterion {
        Some(id) => vec![verify::run_criterion(id)?],
        None => verify::run_all(),
    };
    let mut all_pass = true;
    for r in &reports {
        println!(
            "criterion {:2} {}: {} — {}",
            r.id,
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
        all_pass &= r.passed;
    }
    Ok(all_pass)
}

fn cmd_mesh(command: MeshCommand) -> Result<(), Error> {
    match command {
        MeshCommand::Gen {
            out,
            nx,
            ny,
            n,
            domain,
            curved,
            periodic,
        } => {
            let parts: Vec<f64> = domain
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::Config {
                    line: 0,
                    message: format!("bad --domain '{domain}'"),
                })?;
            if parts.len() != 4 {
                return Err(Error::Config {
                    line: 0,
                    message: "--domain needs x0,x1,y0,y1".into(),
                });
            }
            let mut spec = StructuredMeshSpec::cartesian(
                nx,
                ny,
                (parts[0], parts[1]),
                (parts[2], parts[3]),
                n,
            );
            if curved != 0.0 {
                spec = spec.with_warp(SineWarp::standard(curved));
            }
            if periodic {
                spec = spec.periodic();
            }
            let mesh = generate_structured_mesh(&spec)?;
            save_mesh(&mesh, &out)?;
            println!(
                "wrote {} ({} elements, {} edges)",
                out.display(),
                mesh.n_elements(),
                mesh.edges.len()
            );
            Ok(())
        }
        MeshCommand::Check { path } => {
            let mesh = load_mesh(&path)?;
            let ops = operators(mesh.order)?;
            let geoms = mesh.geometries(&ops)?;
            let worst_gap = mesh.validate_watertight(&geoms)?;
            let mut worst_metric = 0.0f64;
            let mut min_jac = f64::INFINITY;
            for g in &geoms {
                worst_metric =
                    worst_metric.max(swe_dgsem::geometry::metric_identity_residual(g, &ops));
                min_jac = g.jac.iter().fold(min_jac, |m, &j| m.min(j));
            }
            println!("mesh: {}", path.display());
            println!("  order {}  elements {}  edges {}", mesh.order, mesh.n_elements(), mesh.edges.len());
            println!("  boundary tags: {:?}", mesh.boundary_tags());
            println!("  min Jacobian: {min_jac:.6e}");
            println!("  watertightness gap: {worst_gap:.3e}");
            println!("  metric identity residual: {worst_metric:.3e}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, flags, list } => cmd_run(config, flags, list).map(|_| true),
        Command::Convergence {
            nmin,
            nmax,
            dt,
            tend,
            out,
        } => cmd_convergence(nmin, nmax, dt, tend, out).map(|_| true),
        Command::Verify { criterion } => cmd_verify(criterion),
        Command::Mesh { command } => cmd_mesh(command).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
