//! Transfinite element mappings and nodal metric terms.
//!
//! Each quadrilateral element is bounded by four curves, all parameterised
//! over [-1,1] and traversed in the direction of increasing local coordinate:
//!
//!   side 1: eta = -1 (Gamma_1, from corner 1 to corner 2, parameter xi)
//!   side 2: xi  = +1 (Gamma_2, from corner 2 to corner 3, parameter eta)
//!   side 3: eta = +1 (Gamma_3, from corner 4 to corner 3, parameter xi)
//!   side 4: xi  = -1 (Gamma_4, from corner 1 to corner 4, parameter eta)
//!
//! Curves are stored as N+1 samples at the LGL parameter nodes, so the
//! mapping is isoparametric and the discrete metric identities hold.
//! Metric derivatives are always taken in the discrete sense (D from the
//! left for xi, D^T from the right for eta); injecting exact analytic
//! metric terms instead would break free-stream preservation.

use crate::error::{Error, Result};
use crate::operators::{lagrange_interpolate, OperatorSet, QuadratureRule};

/// Polynomial edge curve sampled at the N+1 LGL nodes of its parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub points: Vec<[f64; 2]>,
}

impl BoundaryCurve {
    pub fn first(&self) -> [f64; 2] {
        self.points[0]
    }

    pub fn last(&self) -> [f64; 2] {
        *self.points.last().unwrap()
    }

    /// Straight segment from a to b sampled at the rule's nodes.
    pub fn straight(a: [f64; 2], b: [f64; 2], rule: &QuadratureRule) -> Self {
        let points = rule
            .nodes
            .iter()
            .map(|&z| {
                let t = 0.5 * (z + 1.0);
                [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
            })
            .collect();
        BoundaryCurve { points }
    }

    /// Evaluate the curve at an arbitrary parameter by Lagrange interpolation.
    pub fn eval(&self, rule: &QuadratureRule, z: f64) -> [f64; 2] {
        let xs: Vec<f64> = self.points.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p[1]).collect();
        [
            lagrange_interpolate(rule, &xs, z),
            lagrange_interpolate(rule, &ys, z),
        ]
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        BoundaryCurve { points }
    }
}

/// Check that the four curves agree at the shared corners (to 1e-12).
pub fn check_corner_consistency(curves: &[BoundaryCurve; 4], element: usize) -> Result<()> {
    let pairs = [
        (curves[0].first(), curves[3].first(), "G1(-1) vs G4(-1)"),
        (curves[0].last(), curves[1].first(), "G1(+1) vs G2(-1)"),
        (curves[1].last(), curves[2].last(), "G2(+1) vs G3(+1)"),
        (curves[3].last(), curves[2].first(), "G4(+1) vs G3(-1)"),
    ];
    for (a, b, what) in pairs {
        let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        if d > 1e-12 {
            return Err(Error::CornerMismatch {
                element,
                detail: format!("{what} differ by {d:e}"),
            });
        }
    }
    Ok(())
}

/// Transfinite interpolation with linear blending of the four edge curves.
pub fn transfinite_map(
    curves: &[BoundaryCurve; 4],
    rule: &QuadratureRule,
    xi: f64,
    eta: f64,
) -> [f64; 2] {
    let g1 = curves[0].eval(rule, xi);
    let g2 = curves[1].eval(rule, eta);
    let g3 = curves[2].eval(rule, xi);
    let g4 = curves[3].eval(rule, eta);
    blend(curves, &g1, &g2, &g3, &g4, xi, eta)
}

#[inline]
fn blend(
    curves: &[BoundaryCurve; 4],
    g1: &[f64; 2],
    g2: &[f64; 2],
    g3: &[f64; 2],
    g4: &[f64; 2],
    xi: f64,
    eta: f64,
) -> [f64; 2] {
    let c1 = curves[0].first();
    let c2 = curves[0].last();
    let c4 = curves[2].first();
    let c3 = curves[2].last();
    let (xm, xp) = (1.0 - xi, 1.0 + xi);
    let (em, ep) = (1.0 - eta, 1.0 + eta);
    let mut out = [0.0; 2];
    for d in 0..2 {
        out[d] = 0.5 * (xm * g4[d] + xp * g2[d] + em * g1[d] + ep * g3[d])
            - 0.25
                * (xm * (em * c1[d] + ep * c4[d]) + xp * (em * c2[d] + ep * c3[d]));
    }
    out
}

/// Nodal coordinates, metric terms, and Jacobian of one element.
///
/// Arrays are (N+1)^2, flattened with the xi index i outermost:
/// `idx = i * (N+1) + j`. The volume-weighted contravariant vectors are
/// Ja^1 = (y_eta, -x_eta) and Ja^2 = (-y_xi, x_xi).
#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub n: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub x_xi: Vec<f64>,
    pub x_eta: Vec<f64>,
    pub y_xi: Vec<f64>,
    pub y_eta: Vec<f64>,
    pub jac: Vec<f64>,
}

/// Element side in the fixed convention: 1 = eta=-1, 2 = xi=+1, 3 = eta=+1,
/// 4 = xi=-1.
pub type SideId = u8;

/// Flat node index of face node k on a side (k runs in the local
/// + direction of that side).
#[inline]
pub fn face_node_index(n: usize, side: SideId, k: usize) -> usize {
    let np = n + 1;
    match side {
        1 => k * np,            // (i=k, j=0)
        2 => n * np + k,        // (i=N, j=k)
        3 => k * np + n,        // (i=k, j=N)
        4 => k,                 // (i=0, j=k)
        _ => unreachable!("side id must be 1..=4"),
    }
}

impl ElementGeometry {
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    /// Outward volume-weighted normal at face node k of a side (not unit
    /// length; its magnitude is the surface Jacobian).
    pub fn outward_normal(&self, side: SideId, k: usize) -> [f64; 2] {
        let m = face_node_index(self.n, side, k);
        match side {
            1 => [self.y_xi[m], -self.x_xi[m]],
            2 => [self.y_eta[m], -self.x_eta[m]],
            3 => [-self.y_xi[m], self.x_xi[m]],
            4 => [-self.y_eta[m], self.x_eta[m]],
            _ => unreachable!(),
        }
    }

    /// Unit outward normal and surface Jacobian at face node k.
    pub fn unit_normal(&self, side: SideId, k: usize) -> ([f64; 2], f64) {
        let nvec = self.outward_normal(side, k);
        let s = (nvec[0] * nvec[0] + nvec[1] * nvec[1]).sqrt();
        ([nvec[0] / s, nvec[1] / s], s)
    }
}

/// Build the element geometry from its four boundary curves.
///
/// Nodal coordinates come from the transfinite map collocated at the LGL
/// tensor nodes; metric derivatives are the discrete derivatives of the
/// coordinate arrays. Fails if any nodal Jacobian is non-positive.
pub fn compute_element_geometry(
    curves: &[BoundaryCurve; 4],
    ops: &OperatorSet,
    element: usize,
) -> Result<ElementGeometry> {
    check_corner_consistency(curves, element)?;
    let n = ops.order();
    let np = n + 1;
    assert_eq!(
        curves[0].points.len(),
        np,
        "curve sampling must match the operator order"
    );

    let mut x = vec![0.0; np * np];
    let mut y = vec![0.0; np * np];
    for i in 0..np {
        let xi = ops.rule.nodes[i];
        for j in 0..np {
            let eta = ops.rule.nodes[j];
            // Curves are collocated at the same nodes, so no interpolation.
            let p = blend(
                curves,
                &curves[0].points[i],
                &curves[1].points[j],
                &curves[2].points[i],
                &curves[3].points[j],
                xi,
                eta,
            );
            x[i * np + j] = p[0];
            y[i * np + j] = p[1];
        }
    }

    let dxi = |a: &[f64], i: usize, j: usize| -> f64 {
        (0..np).map(|l| ops.d[i * np + l] * a[l * np + j]).sum()
    };
    let deta = |a: &[f64], i: usize, j: usize| -> f64 {
        (0..np).map(|l| a[i * np + l] * ops.d[j * np + l]).sum()
    };

    let mut g = ElementGeometry {
        n,
        x_xi: vec![0.0; np * np],
        x_eta: vec![0.0; np * np],
        y_xi: vec![0.0; np * np],
        y_eta: vec![0.0; np * np],
        jac: vec![0.0; np * np],
        x,
        y,
    };
    for i in 0..np {
        for j in 0..np {
            let m = i * np + j;
            g.x_xi[m] = dxi(&g.x, i, j);
            g.x_eta[m] = deta(&g.x, i, j);
            g.y_xi[m] = dxi(&g.y, i, j);
            g.y_eta[m] = deta(&g.y, i, j);
            g.jac[m] = g.x_xi[m] * g.y_eta[m] - g.x_eta[m] * g.y_xi[m];
            if !(g.jac[m] > 0.0) {
                return Err(Error::InvertedElement {
                    element,
                    node: (i, j),
                    jacobian: g.jac[m],
                });
            }
        }
    }
    Ok(g)
}

/// Max-norm residual of the discrete metric identities
/// D y_eta - y_xi D^T and -D x_eta + x_xi D^T.
pub fn metric_identity_residual(geom: &ElementGeometry, ops: &OperatorSet) -> f64 {
    let n = geom.n;
    let np = n + 1;
    let mut res: f64 = 0.0;
    for i in 0..np {
        for j in 0..np {
            let mut d_yeta = 0.0;
            let mut d_xeta = 0.0;
            let mut yxi_dt = 0.0;
            let mut xxi_dt = 0.0;
            for l in 0..np {
                d_yeta += ops.d[i * np + l] * geom.y_eta[l * np + j];
                d_xeta += ops.d[i * np + l] * geom.x_eta[l * np + j];
                yxi_dt += geom.y_xi[i * np + l] * ops.d[j * np + l];
                xxi_dt += geom.x_xi[i * np + l] * ops.d[j * np + l];
            }
            res = res.max((d_yeta - yxi_dt).abs());
            res = res.max((-d_xeta + xxi_dt).abs());
        }
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{legendre_gauss_lobatto, operators};

    fn square_curves(rule: &QuadratureRule) -> [BoundaryCurve; 4] {
        [
            BoundaryCurve::straight([0.0, 0.0], [1.0, 0.0], rule),
            BoundaryCurve::straight([1.0, 0.0], [1.0, 1.0], rule),
            BoundaryCurve::straight([0.0, 1.0], [1.0, 1.0], rule),
            BoundaryCurve::straight([0.0, 0.0], [0.0, 1.0], rule),
        ]
    }

    #[test]
    fn unit_square_center_and_corners() {
        let rule = legendre_gauss_lobatto(4).unwrap();
        let curves = square_curves(&rule);
        let c = transfinite_map(&curves, &rule, 0.0, 0.0);
        assert!((c[0] - 0.5).abs() < 1e-14 && (c[1] - 0.5).abs() < 1e-14);
        let p = transfinite_map(&curves, &rule, -1.0, -1.0);
        assert_eq!(p, curves[0].first());
    }

    #[test]
    fn semicircular_edge_midpoint() {
        // Bottom edge is a half circle dipping below y = 0; compare the
        // blending against a direct hand evaluation at xi = 0, eta = -1.
        let n = 8;
        let rule = legendre_gauss_lobatto(n).unwrap();
        let half_circle: Vec<[f64; 2]> = rule
            .nodes
            .iter()
            .map(|&z| {
                let theta = std::f64::consts::PI * (1.0 + z) / 2.0;
                [0.5 - 0.5 * theta.cos(), -0.5 * theta.sin()]
            })
            .collect();
        let curves = [
            BoundaryCurve {
                points: half_circle.clone(),
            },
            BoundaryCurve::straight([1.0, 0.0], [1.0, 1.0], &rule),
            BoundaryCurve::straight([0.0, 1.0], [1.0, 1.0], &rule),
            BoundaryCurve::straight([0.0, 0.0], [0.0, 1.0], &rule),
        ];
        let got = transfinite_map(&curves, &rule, 0.0, -1.0);
        // Independent evaluation of the blend at this point: with eta = -1 the
        // formula collapses to Gamma_1(0) exactly.
        let xs: Vec<f64> = half_circle.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = half_circle.iter().map(|p| p[1]).collect();
        let want = [
            lagrange_interpolate(&rule, &xs, 0.0),
            lagrange_interpolate(&rule, &ys, 0.0),
        ];
        assert!((got[0] - want[0]).abs() < 1e-12);
        assert!((got[1] - want[1]).abs() < 1e-12);
    }

    #[test]
    fn corner_mismatch_is_rejected() {
        let rule = legendre_gauss_lobatto(3).unwrap();
        let mut curves = square_curves(&rule);
        curves[1] = BoundaryCurve::straight([1.0 + 1e-6, 0.0], [1.0, 1.0], &rule);
        let ops = operators(3).unwrap();
        assert!(matches!(
            compute_element_geometry(&curves, &ops, 7),
            Err(Error::CornerMismatch { element: 7, .. })
        ));
    }

    #[test]
    fn unit_square_metrics() {
        let ops = operators(4).unwrap();
        let curves = square_curves(&ops.rule);
        let g = compute_element_geometry(&curves, &ops, 0).unwrap();
        for m in 0..25 {
            assert!((g.jac[m] - 0.25).abs() < 1e-14);
            assert!((g.x_xi[m] - 0.5).abs() < 1e-14);
            assert!((g.y_eta[m] - 0.5).abs() < 1e-14);
            assert!(g.x_eta[m].abs() < 1e-14);
            assert!(g.y_xi[m].abs() < 1e-14);
        }
        assert!(metric_identity_residual(&g, &ops) < 1e-14);
    }

    #[test]
    fn parallelogram_is_affine() {
        let ops = operators(4).unwrap();
        let rule = &ops.rule;
        let (a, b, c, d) = ([0.0, 0.0], [0.8, 0.2], [1.0, 0.8], [0.2, 0.6]);
        let curves = [
            BoundaryCurve::straight(a, b, rule),
            BoundaryCurve::straight(b, c, rule),
            BoundaryCurve::straight(d, c, rule),
            BoundaryCurve::straight(a, d, rule),
        ];
        let g = compute_element_geometry(&curves, &ops, 0).unwrap();
        let j0 = g.jac[0];
        for m in 0..25 {
            assert!((g.jac[m] - j0).abs() < 1e-13);
            assert!((g.x_xi[m] - g.x_xi[0]).abs() < 1e-13);
        }
        assert!(metric_identity_residual(&g, &ops) < 1e-14);
    }

    #[test]
    fn curved_element_satisfies_metric_identities() {
        // Sine-perturbed quad with all four edges curved.
        let n = 7;
        let ops = operators(n).unwrap();
        let rule = &ops.rule;
        let warp = |x: f64, y: f64| -> [f64; 2] {
            [
                x + 0.08 * (std::f64::consts::PI * x).sin() * (2.0 * std::f64::consts::PI * y).sin(),
                y - 0.06 * (2.0 * std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).sin(),
            ]
        };
        let sample = |a: [f64; 2], b: [f64; 2]| -> BoundaryCurve {
            BoundaryCurve {
                points: rule
                    .nodes
                    .iter()
                    .map(|&z| {
                        let t = 0.5 * (z + 1.0);
                        warp(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
                    })
                    .collect(),
            }
        };
        let curves = [
            sample([0.2, 0.1], [0.7, 0.1]),
            sample([0.7, 0.1], [0.7, 0.6]),
            sample([0.2, 0.6], [0.7, 0.6]),
            sample([0.2, 0.1], [0.2, 0.6]),
        ];
        let g = compute_element_geometry(&curves, &ops, 0).unwrap();
        assert!(metric_identity_residual(&g, &ops) <= 1e-12);
    }

    #[test]
    fn analytic_metric_terms_break_the_identities() {
        // Negative control. The discrete metric terms of any nodal coordinate
        // set satisfy the identities because mixed discrete derivatives
        // commute. Sampling the exact analytic derivatives of a
        // super-parametric (trigonometric) map does not.
        let n = 6;
        let ops = operators(n).unwrap();
        let rule = &ops.rule;
        let a = 0.15;
        let pi = std::f64::consts::PI;
        let map = |xi: f64, eta: f64| -> [f64; 2] {
            [
                xi + a * (pi * xi).sin() * (pi * eta).sin(),
                eta - a * (pi * xi).sin() * (pi * eta).sin(),
            ]
        };
        let curves = [
            BoundaryCurve {
                points: rule.nodes.iter().map(|&z| map(z, -1.0)).collect(),
            },
            BoundaryCurve {
                points: rule.nodes.iter().map(|&z| map(1.0, z)).collect(),
            },
            BoundaryCurve {
                points: rule.nodes.iter().map(|&z| map(z, 1.0)).collect(),
            },
            BoundaryCurve {
                points: rule.nodes.iter().map(|&z| map(-1.0, z)).collect(),
            },
        ];
        let mut g = compute_element_geometry(&curves, &ops, 0).unwrap();
        assert!(metric_identity_residual(&g, &ops) <= 1e-12);

        let np = n + 1;
        for i in 0..np {
            for j in 0..np {
                let (xi, eta) = (rule.nodes[i], rule.nodes[j]);
                let m = i * np + j;
                g.x_xi[m] = 1.0 + a * pi * (pi * xi).cos() * (pi * eta).sin();
                g.x_eta[m] = a * pi * (pi * xi).sin() * (pi * eta).cos();
                g.y_xi[m] = -a * pi * (pi * xi).cos() * (pi * eta).sin();
                g.y_eta[m] = 1.0 - a * pi * (pi * xi).sin() * (pi * eta).cos();
            }
        }
        assert!(metric_identity_residual(&g, &ops) > 1e-6);
    }
}
