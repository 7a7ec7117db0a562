//! Two-point numerical fluxes: entropy-conservative volume fluxes for the
//! flux-differencing volume terms, entropy-conservative surface fluxes, and
//! their entropy-stable variant with interface dissipation.
//!
//! All fluxes are built from arithmetic means of the two states. The volume
//! flux pressure term is g<h>^2 - g<h^2>/2 while the surface flux uses
//! g<h^2>/2; keeping the mean-of-squares <h^2> distinct from <h>^2 is what
//! makes the pair entropy conservative. Jumps are taken right minus left in
//! the edge's own frame; the caller orients edges so that "left" sits on the
//! negative side of the face coordinate.

use crate::error::Result;
use crate::physics::{
    self, Conserved, Direction, EigenSystem, NodeState, PhysicsParams,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxPair {
    pub fx: [f64; 3],
    pub fy: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxMode {
    /// Entropy conservative surface coupling.
    Ec,
    /// Entropy stable: EC plus dissipation in the entropy variables.
    Es,
}

impl std::str::FromStr for FluxMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ec" | "EC" => Ok(FluxMode::Ec),
            "es" | "ES" => Ok(FluxMode::Es),
            other => Err(format!("unknown flux mode '{other}' (expected ec or es)")),
        }
    }
}

#[inline]
fn mean(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

/// Entropy-conservative volume flux pair on primitives (hot path).
#[inline]
pub(crate) fn ec_volume_prim(a: &NodeState, b: &NodeState, g: f64) -> FluxPair {
    let h = mean(a.h, b.h);
    let u = mean(a.u, b.u);
    let v = mean(a.v, b.v);
    let hu = mean(a.hu, b.hu);
    let hv = mean(a.hv, b.hv);
    let h2 = mean(a.h2, b.h2);
    let pressure = g * h * h - 0.5 * g * h2;
    FluxPair {
        fx: [hu, hu * u + pressure, hu * v],
        fy: [hv, hv * u, hv * v + pressure],
    }
}

/// Entropy-conservative surface flux pair on primitives (hot path).
#[inline]
pub(crate) fn ec_surface_prim(a: &NodeState, b: &NodeState, g: f64) -> FluxPair {
    let h = mean(a.h, b.h);
    let u = mean(a.u, b.u);
    let v = mean(a.v, b.v);
    let h2 = mean(a.h2, b.h2);
    let pressure = 0.5 * g * h2;
    FluxPair {
        fx: [h * u, h * u * u + pressure, h * u * v],
        fy: [h * v, h * u * v, h * v * v + pressure],
    }
}

/// Jump in entropy variables, right minus left, with the bathymetry entering
/// through q1 = g(h+b) - (u^2+v^2)/2.
#[inline]
pub(crate) fn entropy_jump(
    a: &NodeState,
    b: &NodeState,
    b_left: f64,
    b_right: f64,
    g: f64,
) -> [f64; 3] {
    let q1l = g * (a.h + b_left) - 0.5 * (a.u * a.u + a.v * a.v);
    let q1r = g * (b.h + b_right) - 0.5 * (b.u * b.u + b.v * b.v);
    [q1r - q1l, b.u - a.u, b.v - a.v]
}

/// Dissipation operator of the entropy-stable flux in one direction,
/// evaluated at the arithmetic-mean state of (h, u, v).
#[inline]
pub(crate) fn mean_eigensystem(
    a: &NodeState,
    b: &NodeState,
    direction: Direction,
    g: f64,
) -> EigenSystem {
    let h = mean(a.h, b.h);
    let u = mean(a.u, b.u);
    let v = mean(a.v, b.v);
    let w = Conserved::from_primitives(h, u, v);
    let p = PhysicsParams { g, h_min: 0.0 };
    physics::eigensystem(&w, direction, &p).expect("mean of wet states is wet")
}

/// Per-direction dissipation vectors K_x [[q]] and K_y [[q]] of the
/// entropy-stable flux (hot path). The caller contracts them with the
/// magnitudes of the face metric terms: a signed contraction would turn
/// anti-dissipative wherever a metric component is negative, which destroys
/// the interface entropy estimate on warped meshes.
#[inline]
pub(crate) fn es_dissipation_prim(
    a: &NodeState,
    b: &NodeState,
    b_left: f64,
    b_right: f64,
    g: f64,
) -> ([f64; 3], [f64; 3]) {
    let dq = entropy_jump(a, b, b_left, b_right, g);
    let dx = mean_eigensystem(a, b, Direction::X, g).apply_dissipation(&dq);
    let dy = mean_eigensystem(a, b, Direction::Y, g).apply_dissipation(&dq);
    (dx, dy)
}

/// Entropy-stable surface flux pair on primitives (hot path).
#[inline]
pub(crate) fn es_surface_prim(
    a: &NodeState,
    b: &NodeState,
    b_left: f64,
    b_right: f64,
    g: f64,
) -> FluxPair {
    let mut flux = ec_surface_prim(a, b, g);
    let (dx, dy) = es_dissipation_prim(a, b, b_left, b_right, g);
    for k in 0..3 {
        flux.fx[k] -= 0.5 * dx[k];
        flux.fy[k] -= 0.5 * dy[k];
    }
    flux
}

/// Entropy-conservative two-point volume flux (checked public entry).
pub fn ec_volume_flux(wl: &Conserved, wr: &Conserved, p: &PhysicsParams) -> Result<FluxPair> {
    wl.check_wet(p)?;
    wr.check_wet(p)?;
    Ok(ec_volume_prim(
        &NodeState::from_conserved(wl),
        &NodeState::from_conserved(wr),
        p.g,
    ))
}

/// Entropy-conservative surface flux (checked public entry).
pub fn ec_surface_flux(wl: &Conserved, wr: &Conserved, p: &PhysicsParams) -> Result<FluxPair> {
    wl.check_wet(p)?;
    wr.check_wet(p)?;
    Ok(ec_surface_prim(
        &NodeState::from_conserved(wl),
        &NodeState::from_conserved(wr),
        p.g,
    ))
}

/// Entropy-stable surface flux, both Cartesian components.
pub fn es_surface_flux(
    wl: &Conserved,
    wr: &Conserved,
    b_left: f64,
    b_right: f64,
    p: &PhysicsParams,
) -> Result<FluxPair> {
    wl.check_wet(p)?;
    wr.check_wet(p)?;
    Ok(es_surface_prim(
        &NodeState::from_conserved(wl),
        &NodeState::from_conserved(wr),
        b_left,
        b_right,
        p.g,
    ))
}

/// Entropy-stable surface flux restricted to one Cartesian direction.
pub fn es_surface_flux_dir(
    wl: &Conserved,
    wr: &Conserved,
    b_left: f64,
    b_right: f64,
    direction: Direction,
    p: &PhysicsParams,
) -> Result<[f64; 3]> {
    let pair = es_surface_flux(wl, wr, b_left, b_right, p)?;
    Ok(match direction {
        Direction::X => pair.fx,
        Direction::Y => pair.fy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{entropy_potential, entropy_variables, physical_flux_x, physical_flux_y};
    use crate::verify::rng::XorShift;

    const P1: PhysicsParams = PhysicsParams { g: 1.0, h_min: 1e-10 };

    fn random_wet(rng: &mut XorShift) -> Conserved {
        let h = 0.5 + 4.0 * rng.uniform();
        let u = 2.0 * rng.uniform() - 1.0;
        let v = 2.0 * rng.uniform() - 1.0;
        Conserved::from_primitives(h, u, v)
    }

    #[test]
    fn volume_flux_consistency() {
        let mut rng = XorShift::new(3);
        let p = PhysicsParams::new(9.81);
        for _ in 0..50 {
            let w = random_wet(&mut rng);
            let pair = ec_volume_flux(&w, &w, &p).unwrap();
            let fx = physical_flux_x(&w, &p).unwrap();
            let fy = physical_flux_y(&w, &p).unwrap();
            for k in 0..3 {
                let s = fx[k].abs().max(1.0);
                assert!((pair.fx[k] - fx[k]).abs() / s < 1e-14);
                assert!((pair.fy[k] - fy[k]).abs() / fy[k].abs().max(1.0) < 1e-14);
            }
        }
    }

    #[test]
    fn volume_flux_symmetry_is_exact() {
        let mut rng = XorShift::new(5);
        for _ in 0..50 {
            let a = random_wet(&mut rng);
            let b = random_wet(&mut rng);
            let ab = ec_volume_flux(&a, &b, &P1).unwrap();
            let ba = ec_volume_flux(&b, &a, &P1).unwrap();
            assert_eq!(ab, ba);
        }
    }

    #[test]
    fn surface_flux_symmetry_and_consistency() {
        let mut rng = XorShift::new(9);
        for _ in 0..50 {
            let a = random_wet(&mut rng);
            let b = random_wet(&mut rng);
            assert_eq!(
                ec_surface_flux(&a, &b, &P1).unwrap(),
                ec_surface_flux(&b, &a, &P1).unwrap()
            );
            let pair = ec_surface_flux(&a, &a, &P1).unwrap();
            let fx = physical_flux_x(&a, &P1).unwrap();
            for k in 0..3 {
                assert!((pair.fx[k] - fx[k]).abs() / fx[k].abs().max(1.0) < 1e-14);
            }
        }
    }

    #[test]
    fn volume_flux_entropy_identity_with_bottom_jump() {
        // [[q]] . F_vol_x = [[phi_x]] + g <hu> [[b]] (and the y analogue).
        let mut rng = XorShift::new(17);
        let p = PhysicsParams::new(9.81);
        for _ in 0..500 {
            let a = random_wet(&mut rng);
            let b = random_wet(&mut rng);
            let ba = 2.0 * rng.uniform();
            let bb = 2.0 * rng.uniform();
            let pair = ec_volume_flux(&a, &b, &p).unwrap();
            let qa = entropy_variables(&a, ba, &p).unwrap().as_array();
            let qb = entropy_variables(&b, bb, &p).unwrap().as_array();
            let (pxa, pya) = entropy_potential(&a, &p).unwrap();
            let (pxb, pyb) = entropy_potential(&b, &p).unwrap();
            let db = bb - ba;

            let lhs_x: f64 = (0..3).map(|k| (qb[k] - qa[k]) * pair.fx[k]).sum();
            let rhs_x = (pxb - pxa) + p.g * 0.5 * (a.hu + b.hu) * db;
            assert!((lhs_x - rhs_x).abs() < 1e-11, "{lhs_x} vs {rhs_x}");

            let lhs_y: f64 = (0..3).map(|k| (qb[k] - qa[k]) * pair.fy[k]).sum();
            let rhs_y = (pyb - pya) + p.g * 0.5 * (a.hv + b.hv) * db;
            assert!((lhs_y - rhs_y).abs() < 1e-11, "{lhs_y} vs {rhs_y}");
        }
    }

    #[test]
    fn surface_flux_tadmor_condition_flat_bottom() {
        // [[q]] . F*_x = [[phi_x]] for continuous b.
        let mut rng = XorShift::new(29);
        for _ in 0..500 {
            let a = random_wet(&mut rng);
            let b = random_wet(&mut rng);
            let pair = ec_surface_flux(&a, &b, &P1).unwrap();
            let qa = entropy_variables(&a, 0.0, &P1).unwrap().as_array();
            let qb = entropy_variables(&b, 0.0, &P1).unwrap().as_array();
            let (pxa, pya) = entropy_potential(&a, &P1).unwrap();
            let (pxb, pyb) = entropy_potential(&b, &P1).unwrap();
            let lhs_x: f64 = (0..3).map(|k| (qb[k] - qa[k]) * pair.fx[k]).sum();
            assert!((lhs_x - (pxb - pxa)).abs() < 1e-12);
            let lhs_y: f64 = (0..3).map(|k| (qb[k] - qa[k]) * pair.fy[k]).sum();
            assert!((lhs_y - (pyb - pya)).abs() < 1e-12);
        }
    }

    #[test]
    fn surface_flux_lake_at_rest_pair() {
        // h + b constant, zero velocity, discontinuous b: only the pressure
        // term survives.
        let c = 5.0;
        let (ba, bb) = (1.25, 2.5);
        let a = Conserved::from_primitives(c - ba, 0.0, 0.0);
        let b = Conserved::from_primitives(c - bb, 0.0, 0.0);
        let pair = ec_surface_flux(&a, &b, &P1).unwrap();
        let h2 = 0.5 * (a.h * a.h + b.h * b.h);
        assert_eq!(pair.fx, [0.0, 0.5 * P1.g * h2, 0.0]);
        assert_eq!(pair.fy, [0.0, 0.0, 0.5 * P1.g * h2]);
    }

    #[test]
    fn es_flux_reduces_to_ec_for_equal_states() {
        let w = Conserved::from_primitives(2.3, 0.7, -0.2);
        let ec = ec_surface_flux(&w, &w, &P1).unwrap();
        let es = es_surface_flux(&w, &w, 0.4, 0.4, &P1).unwrap();
        assert_eq!(ec, es);
    }

    #[test]
    fn es_dissipation_vanishes_for_lake_at_rest_jump() {
        // q is continuous across a lake-at-rest interface even when b jumps,
        // so the dissipation term is zero up to round-off in h + b.
        let c = 5.0;
        let (ba, bb) = (0.0, 2.2);
        let a = Conserved::from_primitives(c - ba, 0.0, 0.0);
        let b = Conserved::from_primitives(c - bb, 0.0, 0.0);
        let ec = ec_surface_flux(&a, &b, &P1).unwrap();
        let es = es_surface_flux(&a, &b, ba, bb, &P1).unwrap();
        for k in 0..3 {
            assert!((ec.fx[k] - es.fx[k]).abs() < 1e-13);
            assert!((ec.fy[k] - es.fy[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn es_dissipation_has_the_right_sign() {
        // [[q]] . (F_ec - F_es) = [[q]]^T K [[q]] / 2 >= 0.
        let mut rng = XorShift::new(37);
        let p = PhysicsParams::new(9.81);
        for _ in 0..500 {
            let a = random_wet(&mut rng);
            let b = random_wet(&mut rng);
            let ba = rng.uniform();
            let bb = rng.uniform();
            let ec = ec_surface_flux(&a, &b, &p).unwrap();
            let es = es_surface_flux(&a, &b, ba, bb, &p).unwrap();
            let qa = entropy_variables(&a, ba, &p).unwrap().as_array();
            let qb = entropy_variables(&b, bb, &p).unwrap().as_array();
            let prod_x: f64 = (0..3).map(|k| (qb[k] - qa[k]) * (ec.fx[k] - es.fx[k])).sum();
            let prod_y: f64 = (0..3).map(|k| (qb[k] - qa[k]) * (ec.fy[k] - es.fy[k])).sum();
            assert!(prod_x >= -1e-12, "x-dissipation sign: {prod_x}");
            assert!(prod_y >= -1e-12, "y-dissipation sign: {prod_y}");
        }
    }
}
