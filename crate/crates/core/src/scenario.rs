//! Built-in simulation scenarios: initial conditions, meshes, bathymetries,
//! and boundary conditions for the verification and demonstration problems.

use std::sync::Arc;

use crate::boundary::BoundarySpec;
use crate::error::{Error, Result};
use crate::field::SolutionField;
use crate::fluxes::FluxMode;
use crate::generator::{curved_test_mesh, generate_structured_mesh, parabolic_dam_mesh, StructuredMeshSpec};
use crate::operators::operators;
use crate::physics::{Conserved, PhysicsParams};
use crate::rhs::{
    compute_manufactured_source, manufactured_bottom, manufactured_state, Problem,
};
use crate::time::{StepControl, TimeLoopConfig};

/// A fully configured run: problem, initial field, time controls, and an
/// optional exact reference for error reporting.
pub struct Scenario {
    pub name: String,
    pub problem: Problem,
    pub initial: SolutionField,
    pub time: TimeLoopConfig,
    /// Exact total water height H(x, y, t) when known.
    pub reference_h: Option<Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>>,
}

/// Tunable knobs; every scenario has working defaults matching its source.
#[derive(Debug, Clone, Default)]
pub struct ScenarioOverrides {
    pub order: Option<usize>,
    pub flux_mode: Option<FluxMode>,
    pub dt: Option<f64>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
}

pub fn scenario_names() -> &'static [&'static str] {
    &[
        "manufactured",
        "dam_break_flat",
        "dam_break_bump",
        "lake_at_rest_discontinuous",
        "dam_break_box",
        "gravity_wave",
        "parabolic_lake",
        "parabolic_dam",
    ]
}

/// Discontinuous bump bathymetry: the smooth field restricted to mesh
/// element 5 (0-based; element 6 when counting from one as left-to-right,
/// bottom-to-top on the 4x4 grid).
pub fn bump_bathymetry(x: f64, y: f64, e: usize) -> f64 {
    if e == 5 {
        manufactured_bottom(x, y).0
    } else {
        0.0
    }
}

/// Smooth-top box bathymetry of the big dam-break test.
pub fn box_bathymetry(x: f64, y: f64) -> f64 {
    if (x - 5.0).abs() < 1.0 && (y - 5.0).abs() < 1.0 {
        2.0 - (x - 5.0).powi(2) - (y - 5.0).powi(2)
    } else {
        0.0
    }
}

/// Logarithmic downstream bathymetry of the parabolic-dam tests.
pub fn log_bathymetry(x: f64) -> f64 {
    if x >= 2.25 {
        2.0 + (x - 1.25).ln()
    } else {
        0.0
    }
}

/// Dam curve of the parabolic-dam tests.
pub fn dam_curve(y: f64) -> f64 {
    y * y / 25.0 - 0.25
}

fn control(time_default_dt: f64, ov: &ScenarioOverrides) -> StepControl {
    if let Some(cfl) = ov.cfl {
        StepControl::Cfl(cfl)
    } else {
        StepControl::FixedDt(ov.dt.unwrap_or(time_default_dt))
    }
}

/// Build a named scenario.
pub fn build_scenario(name: &str, ov: &ScenarioOverrides) -> Result<Scenario> {
    let g1 = PhysicsParams::new(1.0);
    match name {
        "manufactured" => {
            let n = ov.order.unwrap_or(6);
            let mode = ov.flux_mode.unwrap_or(FluxMode::Ec);
            // Same warped 4x4 mesh as the periodic tests, but with tagged
            // boundaries: the exact solution is not periodic, so all four
            // sides carry exact Dirichlet states.
            let spec = StructuredMeshSpec::cartesian(4, 4, (-1.0, 1.0), (-1.0, 1.0), n)
                .with_warp(crate::generator::SineWarp::standard(0.05));
            let mesh = generate_structured_mesh(&spec)?;
            let exact: crate::boundary::StateFn = Arc::new(manufactured_state);
            let bc = BoundarySpec::new()
                .dirichlet("left", exact.clone())
                .dirichlet("right", exact.clone())
                .dirichlet("bottom", exact.clone())
                .dirichlet("top", exact);
            let problem = Problem::new(
                mesh,
                operators(n)?,
                bc,
                g1,
                mode,
                |x, y, _| manufactured_bottom(x, y).0,
            )?
            .with_source(Arc::new(move |x, y, t| {
                compute_manufactured_source(x, y, t, &PhysicsParams::new(1.0))
            }));
            let initial = problem.initial_field(|x, y, _| manufactured_state(x, y, 0.0));
            Ok(Scenario {
                name: name.into(),
                problem,
                initial,
                time: TimeLoopConfig {
                    t_end: ov.t_end.unwrap_or(0.5),
                    control: control(1.0 / 2000.0, ov),
                    callback_every: 0,
                },
                reference_h: Some(Arc::new(crate::rhs::manufactured_total_height)),
            })
        }
        "dam_break_flat" | "dam_break_bump" => {
            let n = ov.order.unwrap_or(5);
            let mode = ov.flux_mode.unwrap_or(FluxMode::Ec);
            let mesh = curved_test_mesh(n, 4, 4)?;
            let bumpy = name == "dam_break_bump";
            let problem = Problem::new(
                mesh,
                operators(n)?,
                BoundarySpec::new(),
                g1,
                mode,
                move |x, y, e| if bumpy { bump_bathymetry(x, y, e) } else { 0.0 },
            )?;
            let b = problem.cache.b.clone();
            let order = problem.order();
            let initial = {
                let mut f = SolutionField::zeros(order, problem.mesh.n_elements());
                let np = order + 1;
                for e in 0..problem.mesh.n_elements() {
                    let geom = &problem.geoms[e];
                    let col = e % 4;
                    let surface = if col < 2 { 5.0 } else { 4.0 };
                    for i in 0..np {
                        for j in 0..np {
                            let m = geom.idx(i, j);
                            let h = surface - b[e][m];
                            f.set_scaled(e, i, j, [h * geom.jac[m], 0.0, 0.0]);
                        }
                    }
                }
                f
            };
            Ok(Scenario {
                name: name.into(),
                problem,
                initial,
                time: TimeLoopConfig {
                    t_end: ov.t_end.unwrap_or(1.0),
                    control: control(1.0 / 1000.0, ov),
                    callback_every: 0,
                },
                reference_h: None,
            })
        }
        "lake_at_rest_discontinuous" => {
            let n = ov.order.unwrap_or(4);
            let mode = ov.flux_mode.unwrap_or(FluxMode::Es);
            let mesh = curved_test_mesh(n, 4, 4)?;
            let problem = Problem::new(
                mesh,
                operators(n)?,
                BoundarySpec::new(),
                g1,
                mode,
                bump_bathymetry,
            )?;
            let initial = lake_at_rest_field(&problem, 5.0);
            Ok(Scenario {
                name: name.into(),
                problem,
                initial,
                time: TimeLoopConfig {
                    t_end: ov.t_end.unwrap_or(1.0),
                    control: control(1.0 / 1000.0, ov),
                    callback_every: 0,
                },
                reference_h: Some(Arc::new(|_, _, _| 5.0)),
            })
        }
        "dam_break_box" => {
            let n = ov.order.unwrap_or(4);
            let mode = ov.flux_mode.unwrap_or(FluxMode::Es);
            let spec = StructuredMeshSpec {
                nx: 40,
                ny: 40,
                x_range: (0.0, 10.0),
                y_range: (0.0, 10.0),
                order: n,
                warp: None,
                periodic_x: false,
                periodic_y: true,
            };
            let mesh = generate_structured_mesh(&spec)?;
            let left: crate::boundary::StateFn =
                Arc::new(|_, _, _| Conserved::from_primitives(3.5, 0.0, 0.0));
            let right: crate::boundary::StateFn =
                Arc::new(|_, _, _| Conserved::from_primitives(2.5, 0.0, 0.0));
            let bc = BoundarySpec::new()
                .dirichlet("left", left)
                .dirichlet("right", right);
            let problem = Problem::new(mesh, operators(n)?, bc, g1, mode, |x, y, _| {
                box_bathymetry(x, y)
            })?;
            let b = problem.cache.b.clone();
            let order = problem.order();
            let initial = {
                let mut f = SolutionField::zeros(order, problem.mesh.n_elements());
                let np = order + 1;
                for e in 0..problem.mesh.n_elements() {
                    let geom = &problem.geoms[e];
                    let col = e % 40;
                    let surface = if col < 20 { 3.5 } else { 2.5 };
                    for i in 0..np {
                        for j in 0..np {
                            let m = geom.idx(i, j);
                            let h = surface - b[e][m];
                            f.set_scaled(e, i, j, [h * geom.jac[m], 0.0, 0.0]);
                        }
                    }
                }
                f
            };
            Ok(Scenario {
                name: name.into(),
                problem,
                initial,
                time: TimeLoopConfig {
                    t_end: ov.t_end.unwrap_or(1.0),
                    control: ov
                        .dt
                        .map(StepControl::FixedDt)
                        .unwrap_or(StepControl::Cfl(ov.cfl.unwrap_or(0.1))),
                    callback_every: 0,
                },
                reference_h: None,
            })
        }
        "gravity_wave" => {
            let n = ov.order.unwrap_or(3);
            let mode = ov.flux_mode.unwrap_or(FluxMode::Es);
            // 40,000 degrees of freedom: N = 3 on 50x50.
            let nx = match n {
                1 => 100,
                3 => 50,
                7 => 25,
                _ => (200.0 / (n as f64 + 1.0)).round() as usize,
            };
            let spec = StructuredMeshSpec {
                nx,
                ny: nx,
                x_range: (-0.5, 0.5),
                y_range: (-0.5, 0.5),
                order: n,
                warp: None,
                periodic_x: true,
                periodic_y: false,
            };
            let mesh = generate_structured_mesh(&spec)?;
            let bc = BoundarySpec::new().wall("bottom").wall("top");
            let problem = Problem::new(mesh, operators(n)?, bc, g1, mode, |_, _, _| 0.0)?;
            let (g, a, m, nn) = (1.0f64, 0.1, 2.0, 0.0);
            let k = 2.0 * std::f64::consts::PI * m;
            let l = (2.0 * nn + 1.0) * std::f64::consts::PI;
            let om = (g * (k * k + l * l)).sqrt();
            let initial = problem.initial_field(|x, y, _| {
                let h = 1.0 + a * (l * y).sin() * (k * x).sin();
                let u = -(k * a * g / om) * (l * y).sin() * (k * x).sin();
                let v = (l * a * g / om) * (l * y).cos() * (k * x).cos();
                Conserved::from_primitives(h, u, v)
            });
            Ok(Scenario {
                name: name.into(),
                problem,
                initial,
                time: TimeLoopConfig {
                    t_end: ov.t_end.unwrap_or(2.0),
                    control: ov
                        .dt
                        .map(StepControl::FixedDt)
                        .unwrap_or(StepControl::Cfl(ov.cfl.unwrap_or(0.25))),
                    callback_every: 0,
                },
                reference_h: None,
            })
        }
        "parabolic_lake" | "parabolic_dam" => {
            let n = ov.order.unwrap_or(3);
            let mode = ov.flux_mode.unwrap_or(FluxMode::Es);
            let breach = if name == "parabolic_dam" { 0.5 } else { -1.0 };
            let mesh = parabolic_dam_mesh(n, breach)?;
            let left: crate::boundary::StateFn =
                Arc::new(|_, _, _| Conserved::from_primitives(10.0, 0.0, 0.0));
            let right: crate::boundary::StateFn = Arc::new(|x, _, _| {
                Conserved::from_primitives(5.0 - log_bathymetry(x), 0.0, 0.0)
            });
            let bc = BoundarySpec::new()
                .dirichlet("left", left)
                .dirichlet("right", right)
                .wall("dam");
            let problem = Problem::new(mesh, operators(n)?, bc, g1, mode, |x, _, _| {
                log_bathymetry(x)
            })?;
            let b = problem.cache.b.clone();
            let order = problem.order();
            // Elements left of the fitted dam column have logical column
            // index < 20.
            let initial = {
                let mut f = SolutionField::zeros(order, problem.mesh.n_elements());
                let np = order + 1;
                for e in 0..problem.mesh.n_elements() {
                    let geom = &problem.geoms[e];
                    let col = e % 40;
                    let surface = if col < 20 { 10.0 } else { 5.0 };
                    for i in 0..np {
                        for j in 0..np {
                            let m = geom.idx(i, j);
                            let h = surface - b[e][m];
                            f.set_scaled(e, i, j, [h * geom.jac[m], 0.0, 0.0]);
                        }
                    }
                }
                f
            };
            Ok(Scenario {
                name: name.into(),
                problem,
                initial,
                time: TimeLoopConfig {
                    t_end: ov.t_end.unwrap_or(if name == "parabolic_dam" { 0.5 } else { 1.0 }),
                    control: control(1.0 / 1500.0, ov),
                    callback_every: 0,
                },
                reference_h: if name == "parabolic_lake" {
                    Some(Arc::new(|x: f64, y: f64, _t: f64| {
                        if x < dam_curve(y) {
                            10.0
                        } else {
                            5.0
                        }
                    }))
                } else {
                    None
                },
            })
        }
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

/// Lake-at-rest field: H constant, zero velocity, h collocated as H - b.
pub fn lake_at_rest_field(problem: &Problem, surface: f64) -> SolutionField {
    let order = problem.order();
    let np = order + 1;
    let mut f = SolutionField::zeros(order, problem.mesh.n_elements());
    for e in 0..problem.mesh.n_elements() {
        let geom = &problem.geoms[e];
        for i in 0..np {
            for j in 0..np {
                let m = geom.idx(i, j);
                let h = surface - problem.cache.b[e][m];
                f.set_scaled(e, i, j, [h * geom.jac[m], 0.0, 0.0]);
            }
        }
    }
    f
}
