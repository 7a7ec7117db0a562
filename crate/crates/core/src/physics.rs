//! Pointwise shallow-water state algebra: conserved/entropy variable maps,
//! physical fluxes, entropy quantities, and entropy-scaled eigensystems.
//!
//! Everything here is a pure function of its arguments. Conserved variables
//! are w = (h, hu, hv); the entropy function is the total energy
//! e = h(u^2+v^2)/2 + g h^2/2 + g h b with entropy variables
//! q = (g(h+b) - (u^2+v^2)/2, u, v).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    /// Gravitational acceleration.
    pub g: f64,
    /// Positivity floor: h <= h_min is treated as a dry state (hard error,
    /// never clipped).
    pub h_min: f64,
}

impl PhysicsParams {
    pub fn new(g: f64) -> Self {
        assert!(g > 0.0, "gravitational acceleration must be positive");
        PhysicsParams { g, h_min: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved {
    pub h: f64,
    pub hu: f64,
    pub hv: f64,
}

impl Conserved {
    pub fn new(h: f64, hu: f64, hv: f64) -> Self {
        Conserved { h, hu, hv }
    }

    pub fn from_primitives(h: f64, u: f64, v: f64) -> Self {
        Conserved {
            h,
            hu: h * u,
            hv: h * v,
        }
    }

    pub fn check_wet(&self, p: &PhysicsParams) -> Result<()> {
        if self.h > p.h_min {
            Ok(())
        } else {
            Err(Error::DryState {
                h: self.h,
                element: None,
                node: None,
            })
        }
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.hu / self.h, self.hv / self.h)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.h, self.hu, self.hv]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyState {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl EntropyState {
    pub fn as_array(&self) -> [f64; 3] {
        [self.q1, self.q2, self.q3]
    }
}

/// Per-node primitive bundle used by the hot flux kernels. Built once per
/// node per right-hand-side evaluation after the wet check.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct NodeState {
    pub h: f64,
    pub u: f64,
    pub v: f64,
    pub hu: f64,
    pub hv: f64,
    pub h2: f64,
}

impl NodeState {
    #[inline]
    pub fn from_conserved(w: &Conserved) -> Self {
        NodeState {
            h: w.h,
            u: w.hu / w.h,
            v: w.hv / w.h,
            hu: w.hu,
            hv: w.hv,
            h2: w.h * w.h,
        }
    }
}

/// x-direction physical flux f = (hu, hu^2 + g h^2/2, huv).
pub fn physical_flux_x(w: &Conserved, p: &PhysicsParams) -> Result<[f64; 3]> {
    w.check_wet(p)?;
    let (u, v) = w.velocity();
    Ok([w.hu, w.hu * u + 0.5 * p.g * w.h * w.h, w.hu * v])
}

/// y-direction physical flux g = (hv, huv, hv^2 + g h^2/2).
pub fn physical_flux_y(w: &Conserved, p: &PhysicsParams) -> Result<[f64; 3]> {
    w.check_wet(p)?;
    let (u, v) = w.velocity();
    Ok([w.hv, w.hv * u, w.hv * v + 0.5 * p.g * w.h * w.h])
}

#[inline]
pub(crate) fn flux_x_prim(s: &NodeState, g: f64) -> [f64; 3] {
    [s.hu, s.hu * s.u + 0.5 * g * s.h2, s.hu * s.v]
}

#[inline]
pub(crate) fn flux_y_prim(s: &NodeState, g: f64) -> [f64; 3] {
    [s.hv, s.hv * s.u, s.hv * s.v + 0.5 * g * s.h2]
}

/// Entropy variables q = de/dw at fixed bathymetry b.
pub fn entropy_variables(w: &Conserved, b: f64, p: &PhysicsParams) -> Result<EntropyState> {
    w.check_wet(p)?;
    let (u, v) = w.velocity();
    Ok(EntropyState {
        q1: p.g * (w.h + b) - 0.5 * (u * u + v * v),
        q2: u,
        q3: v,
    })
}

/// Inverse map: conserved variables from entropy variables at fixed b.
pub fn conserved_from_entropy(q: &EntropyState, b: f64, p: &PhysicsParams) -> Result<Conserved> {
    let h = q.q1 / p.g - b + (q.q2 * q.q2 + q.q3 * q.q3) / (2.0 * p.g);
    if h <= p.h_min {
        return Err(Error::DryState {
            h,
            element: None,
            node: None,
        });
    }
    Ok(Conserved {
        h,
        hu: h * q.q2,
        hv: h * q.q3,
    })
}

/// Total energy e = h(u^2+v^2)/2 + g h^2/2 + g h b (the entropy function).
pub fn total_energy(w: &Conserved, b: f64, p: &PhysicsParams) -> Result<f64> {
    w.check_wet(p)?;
    let (u, v) = w.velocity();
    Ok(0.5 * w.h * (u * u + v * v) + 0.5 * p.g * w.h * w.h + p.g * w.h * b)
}

/// Entropy fluxes (F, G) with F = (hu^3 + huv^2)/2 + g hu (h+b) and the
/// symmetric y-direction analogue.
pub fn entropy_fluxes(w: &Conserved, b: f64, p: &PhysicsParams) -> Result<(f64, f64)> {
    w.check_wet(p)?;
    let (u, v) = w.velocity();
    let k = 0.5 * (u * u + v * v);
    let f = w.hu * k + p.g * w.hu * (w.h + b);
    let g = w.hv * k + p.g * w.hv * (w.h + b);
    Ok((f, g))
}

/// Per-direction entropy potential components (g h^2 u / 2, g h^2 v / 2);
/// their sum is the potential phi = q.(f+g) - (F+G).
pub fn entropy_potential(w: &Conserved, p: &PhysicsParams) -> Result<(f64, f64)> {
    w.check_wet(p)?;
    let (u, v) = w.velocity();
    let c = 0.5 * p.g * w.h * w.h;
    Ok((c * u, c * v))
}

/// Entropy Jacobian H = dw/dq, symmetric positive definite for wet states:
/// H = (1/g) [[1, u, v], [u, gh+u^2, uv], [v, uv, gh+v^2]].
pub fn entropy_jacobian(w: &Conserved, p: &PhysicsParams) -> Result<[[f64; 3]; 3]> {
    w.check_wet(p)?;
    let (u, v) = w.velocity();
    let gi = 1.0 / p.g;
    let gh = p.g * w.h;
    Ok([
        [gi, gi * u, gi * v],
        [gi * u, gi * (gh + u * u), gi * u * v],
        [gi * v, gi * u * v, gi * (gh + v * v)],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

/// Eigendecomposition of the flux Jacobian in one Cartesian direction,
/// with the entropy scaling Z = diag(1/2g, h, 1/2g) that gives R Z R^T = H.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Right eigenvectors, columns ordered (u+c, u, u-c) resp. (v+c, v, v-c).
    pub r: [[f64; 3]; 3],
    pub lambda: [f64; 3],
    pub z: [f64; 3],
    pub direction: Direction,
}

/// Eigensystem of the flux Jacobian at a (typically interface-averaged) state.
pub fn eigensystem(w: &Conserved, direction: Direction, p: &PhysicsParams) -> Result<EigenSystem> {
    w.check_wet(p)?;
    let (u, v) = w.velocity();
    let c = (p.g * w.h).sqrt();
    let (r, lambda) = match direction {
        Direction::X => (
            [[1.0, 0.0, 1.0], [u + c, 0.0, u - c], [v, 1.0, v]],
            [u + c, u, u - c],
        ),
        Direction::Y => (
            [[1.0, 0.0, 1.0], [u, 1.0, u], [v + c, 0.0, v - c]],
            [v + c, v, v - c],
        ),
    };
    Ok(EigenSystem {
        r,
        lambda,
        z: [0.5 / p.g, w.h, 0.5 / p.g],
        direction,
    })
}

impl EigenSystem {
    /// Apply the dissipation matrix R |Lambda| Z R^T to a vector.
    pub fn apply_dissipation(&self, dq: &[f64; 3]) -> [f64; 3] {
        // t = R^T dq, scaled by |lambda_k| z_k, then back through R.
        let mut t = [0.0; 3];
        for k in 0..3 {
            t[k] = (self.r[0][k] * dq[0] + self.r[1][k] * dq[1] + self.r[2][k] * dq[2])
                * self.lambda[k].abs()
                * self.z[k];
        }
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = self.r[i][0] * t[0] + self.r[i][1] * t[1] + self.r[i][2] * t[2];
        }
        out
    }
}
