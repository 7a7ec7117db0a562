//! Low-storage five-stage fourth-order Runge-Kutta time stepping and the
//! CFL-based step-size estimate.

use crate::error::{Error, Result};
use crate::field::SolutionField;
use crate::geometry::ElementGeometry;
use crate::operators::OperatorSet;
use crate::physics::PhysicsParams;
use crate::rhs::{compute_time_derivative, Problem};

/// Coefficients of the 2N-register low-storage RK5(4) scheme
/// (Carpenter & Kennedy). Stored once, to full double precision; the test
/// below recomputes every entry from its integer ratio.
pub const LSRK54_A: [f64; 5] = [
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
];
pub const LSRK54_B: [f64; 5] = [
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
];
pub const LSRK54_C: [f64; 5] = [
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
];

/// Advance one step: exactly five RHS evaluations, one extra register.
pub fn lsrk54_step(problem: &Problem, field: &mut SolutionField, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::InvalidTimeStep(format!("dt = {dt}")));
    }
    let t0 = field.time;
    let mut register = vec![0.0f64; field.data.len()];
    for stage in 0..5 {
        field.time = t0 + LSRK54_C[stage] * dt;
        let k = compute_time_derivative(problem, field)?;
        let a = LSRK54_A[stage];
        let b = LSRK54_B[stage];
        for (r, (u, kv)) in register
            .iter_mut()
            .zip(field.data.iter_mut().zip(k.data.iter()))
        {
            *r = a * *r + dt * kv;
            *u += b * *r;
        }
    }
    field.time = t0 + dt;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    /// Fixed step; the final step is truncated to land exactly on t_end.
    FixedDt(f64),
    /// CFL-driven: dt recomputed from the current field every step.
    Cfl(f64),
}

#[derive(Debug, Clone)]
pub struct TimeLoopConfig {
    pub t_end: f64,
    pub control: StepControl,
    /// Invoke the callback every `cadence` accepted steps (and at the end).
    pub callback_every: usize,
}

/// March to t_end; the callback sees the field after step 0 (initial state)
/// and then per cadence. Returns the number of steps taken.
pub fn run_time_loop(
    problem: &Problem,
    field: &mut SolutionField,
    config: &TimeLoopConfig,
    mut callback: impl FnMut(usize, &SolutionField) -> Result<()>,
) -> Result<usize> {
    callback(0, field)?;
    let mut steps = 0usize;
    let eps = 1e-12 * config.t_end.abs().max(1.0);
    while field.time < config.t_end - eps {
        let dt_raw = match config.control {
            StepControl::FixedDt(dt) => dt,
            StepControl::Cfl(cfl) => {
                estimate_timestep(field, &problem.geoms, &problem.ops, cfl, &problem.params)?
            }
        };
        let dt = dt_raw.min(config.t_end - field.time);
        lsrk54_step(problem, field, dt)?;
        steps += 1;
        if config.callback_every > 0 && steps % config.callback_every == 0 {
            callback(steps, field)?;
        }
        if let Some((e, i, j)) = field.first_non_finite() {
            return Err(Error::NonFinite {
                element: e,
                node: (i, j),
            });
        }
    }
    if steps > 0 && (config.callback_every == 0 || steps % config.callback_every != 0) {
        callback(steps, field)?;
    }
    Ok(steps)
}

/// CFL time-step estimate.
///
/// Per node, the directional wave speeds are contracted with the metric
/// terms, lambda_i = (|Ja^i . u| + c |Ja^i|) / J, and the local admissible
/// step is gap_min / (lambda_1 + lambda_2) with gap_min the smallest LGL
/// node spacing. The returned dt is CFL times the mesh-wide minimum.
pub fn estimate_timestep(
    field: &SolutionField,
    geoms: &[ElementGeometry],
    ops: &OperatorSet,
    cfl: f64,
    params: &PhysicsParams,
) -> Result<f64> {
    if !(cfl > 0.0) {
        return Err(Error::InvalidTimeStep(format!("CFL = {cfl}")));
    }
    let np = ops.n_nodes();
    let gap_min = ops
        .rule
        .nodes
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let mut dt = f64::INFINITY;
    for (e, geom) in geoms.iter().enumerate() {
        for i in 0..np {
            for j in 0..np {
                let m = geom.idx(i, j);
                let w = field.state(geom, e, i, j);
                if w.h <= params.h_min {
                    return Err(Error::DryState {
                        h: w.h,
                        element: Some(e),
                        node: Some((i, j)),
                    });
                }
                let (u, v) = w.velocity();
                let c = (params.g * w.h).sqrt();
                let ja1 = [geom.y_eta[m], -geom.x_eta[m]];
                let ja2 = [-geom.y_xi[m], geom.x_xi[m]];
                let n1 = (ja1[0] * ja1[0] + ja1[1] * ja1[1]).sqrt();
                let n2 = (ja2[0] * ja2[0] + ja2[1] * ja2[1]).sqrt();
                let l1 = ((ja1[0] * u + ja1[1] * v).abs() + c * n1) / geom.jac[m];
                let l2 = ((ja2[0] * u + ja2[1] * v).abs() + c * n2) / geom.jac[m];
                dt = dt.min(gap_min / (l1 + l2));
            }
        }
    }
    Ok(cfl * dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundarySpec;
    use crate::fluxes::FluxMode;
    use crate::generator::{generate_structured_mesh, StructuredMeshSpec};
    use crate::operators::operators;
    use crate::physics::Conserved;
    use crate::rhs::Problem;

    #[test]
    fn coefficients_match_their_integer_ratios() {
        let a_num: [(f64, f64); 5] = [
            (0.0, 1.0),
            (-567301805773.0, 1357537059087.0),
            (-2404267990393.0, 2016746695238.0),
            (-3550918686646.0, 2091501179385.0),
            (-1275806237668.0, 842570457699.0),
        ];
        let b_num: [(f64, f64); 5] = [
            (1432997174477.0, 9575080441755.0),
            (5161836677717.0, 13612068292357.0),
            (1720146321549.0, 2090206949498.0),
            (3134564353537.0, 4481467310338.0),
            (2277821191437.0, 14882151754819.0),
        ];
        let c_num: [(f64, f64); 5] = [
            (0.0, 1.0),
            (1432997174477.0, 9575080441755.0),
            (2526269341429.0, 6820363962896.0),
            (2006345519317.0, 3224310063776.0),
            (2802321613138.0, 2924317926251.0),
        ];
        for s in 0..5 {
            assert_eq!(LSRK54_A[s], a_num[s].0 / a_num[s].1);
            assert_eq!(LSRK54_B[s], b_num[s].0 / b_num[s].1);
            assert_eq!(LSRK54_C[s], c_num[s].0 / c_num[s].1);
        }
        // c2 must equal b1 for this scheme (first-stage consistency).
        assert_eq!(LSRK54_C[1], LSRK54_B[0]);
    }

    /// Scalar ODE harness: y' = lambda y via the same coefficient tables.
    fn scalar_lsrk(lambda: f64, y0: f64, dt: f64, steps: usize) -> f64 {
        let mut y = y0;
        for _ in 0..steps {
            let mut r = 0.0;
            for s in 0..5 {
                r = LSRK54_A[s] * r + dt * lambda * y;
                y += LSRK54_B[s] * r;
            }
        }
        y
    }

    #[test]
    fn exponential_decay_fourth_order() {
        let exact = (-1.0f64).exp();
        let e1 = (scalar_lsrk(-1.0, 1.0, 0.1, 10) - exact).abs();
        assert!(e1 < 1e-6, "error {e1}");
        let e2 = (scalar_lsrk(-1.0, 1.0, 0.05, 20) - exact).abs();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() <= 1.6, "ratio {ratio}");
    }

    #[test]
    fn zero_rhs_keeps_the_field_bitwise() {
        // The register update with a literally zero derivative must not
        // change the state in any bit.
        let y0 = 0.123456789f64;
        assert_eq!(scalar_lsrk(0.0, y0, 0.37, 25), y0);
    }

    #[test]
    fn rest_lake_is_steady_to_round_off() {
        let mesh = generate_structured_mesh(&StructuredMeshSpec::cartesian(
            2,
            2,
            (-1.0, 1.0),
            (-1.0, 1.0),
            3,
        ).periodic())
        .unwrap();
        let ops = operators(3).unwrap();
        let problem = Problem::new(
            mesh,
            ops,
            BoundarySpec::new(),
            crate::physics::PhysicsParams::new(1.0),
            FluxMode::Ec,
            |_, _, _| 0.0,
        )
        .unwrap();
        let field0 = problem.initial_field(|_, _, _| Conserved::from_primitives(2.0, 0.0, 0.0));
        let mut field = field0.clone();
        lsrk54_step(&problem, &mut field, 0.01).unwrap();
        let drift = field
            .data
            .iter()
            .zip(field0.data.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(drift < 1e-15, "drift {drift:.3e}");
    }

    #[test]
    fn temporal_order_on_the_manufactured_problem() {
        // Self-convergence against a 1024-step reference at fixed N isolates
        // the temporal error; exact Dirichlet boundaries keep the run smooth
        // and N = 4 leaves CFL headroom for the coarsest step.
        use crate::scenario::{build_scenario, ScenarioOverrides};
        let t_end = 0.25;
        let make = || {
            build_scenario(
                "manufactured",
                &ScenarioOverrides {
                    order: Some(4),
                    ..Default::default()
                },
            )
            .unwrap()
        };
        let reference = {
            let s = make();
            let mut f = s.initial.clone();
            for _ in 0..1024 {
                lsrk54_step(&s.problem, &mut f, t_end / 1024.0).unwrap();
            }
            f
        };
        let mut errs = Vec::new();
        for steps in [32usize, 64, 128] {
            let s = make();
            let mut f = s.initial.clone();
            for _ in 0..steps {
                lsrk54_step(&s.problem, &mut f, t_end / steps as f64).unwrap();
            }
            let err = f
                .data
                .iter()
                .zip(reference.data.iter())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            errs.push(err);
        }
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        assert!(
            (3.8..=4.2).contains(&order1) && (3.8..=4.2).contains(&order2),
            "orders {order1} {order2} from errors {errs:?}"
        );
    }

    #[test]
    fn empty_run_emits_exactly_one_callback() {
        let s = crate::scenario::build_scenario(
            "lake_at_rest_discontinuous",
            &crate::scenario::ScenarioOverrides {
                order: Some(3),
                t_end: Some(0.0),
                ..Default::default()
            },
        )
        .unwrap();
        let mut field = s.initial.clone();
        let mut calls = 0;
        let steps = run_time_loop(&s.problem, &mut field, &s.time, |_, _| {
            calls += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(steps, 0);
        assert_eq!(calls, 1);
    }

    #[test]
    fn timestep_regression_and_scaling() {
        let mesh = generate_structured_mesh(&StructuredMeshSpec::cartesian(
            1,
            1,
            (-1.0, 1.0),
            (-1.0, 1.0),
            1,
        ).periodic())
        .unwrap();
        let ops = operators(1).unwrap();
        let p = crate::physics::PhysicsParams::new(1.0);
        let problem = Problem::new(mesh, ops, BoundarySpec::new(), p, FluxMode::Ec, |_, _, _| 0.0)
            .unwrap();
        let field = problem.initial_field(|_, _, _| Conserved::from_primitives(1.0, 0.0, 0.0));
        let dt = estimate_timestep(&field, &problem.geoms, &problem.ops, 1.0, &p).unwrap();
        // Locked value of the documented formula: J = 1, |Ja^i| = 1, c = 1,
        // gap_min = 2 at N = 1, so dt = 2 / (1 + 1) = 1.
        assert!((dt - 1.0).abs() < 1e-14, "dt = {dt}");

        // dt scales like 1/sqrt(g h): h quadrupled halves the step.
        let field4 = problem.initial_field(|_, _, _| Conserved::from_primitives(4.0, 0.0, 0.0));
        let dt4 = estimate_timestep(&field4, &problem.geoms, &problem.ops, 1.0, &p).unwrap();
        assert!((dt4 - 0.5).abs() < 1e-14, "dt = {dt4}");

        assert!(matches!(
            estimate_timestep(&field, &problem.geoms, &problem.ops, 0.0, &p),
            Err(Error::InvalidTimeStep(_))
        ));
    }
}
