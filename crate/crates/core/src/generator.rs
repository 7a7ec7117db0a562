//! Structured mesh generation: Cartesian grids, the sinusoidally warped
//! curvilinear test mesh, and the boundary-fitted parabolic-dam mesh.
//!
//! Elements are numbered left to right, then bottom to top. The warp keeps
//! every domain-boundary grid line fixed, so boundary edges stay straight and
//! periodic pairings remain exact translations of each other; for even nx the
//! vertical mid-line of the grid is fixed as well, which keeps dam-break
//! discontinuities on element interfaces.

use crate::error::Result;
use crate::mesh::{BoundaryItem, MeshInput, QuadMesh};
use crate::operators::legendre_gauss_lobatto;

/// Sinusoidal interior-edge warp. Displacement at relative coordinates
/// (X, Y) in [0,1]^2 is amplitude * sin(2 pi kx X) * sin(2 pi ky Y) along
/// (+x, -y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineWarp {
    pub amplitude: f64,
    pub kx: f64,
    pub ky: f64,
}

impl SineWarp {
    /// Default warp used by the curved verification meshes.
    pub fn standard(amplitude: f64) -> Self {
        SineWarp {
            amplitude,
            kx: 1.0,
            ky: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StructuredMeshSpec {
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub order: usize,
    pub warp: Option<SineWarp>,
    pub periodic_x: bool,
    pub periodic_y: bool,
}

impl StructuredMeshSpec {
    pub fn cartesian(nx: usize, ny: usize, x_range: (f64, f64), y_range: (f64, f64), order: usize) -> Self {
        StructuredMeshSpec {
            nx,
            ny,
            x_range,
            y_range,
            order,
            warp: None,
            periodic_x: false,
            periodic_y: false,
        }
    }

    pub fn with_warp(mut self, warp: SineWarp) -> Self {
        self.warp = Some(warp);
        self
    }

    pub fn periodic(mut self) -> Self {
        self.periodic_x = true;
        self.periodic_y = true;
        self
    }
}

fn apply_warp(spec: &StructuredMeshSpec, x: f64, y: f64) -> [f64; 2] {
    match spec.warp {
        None => [x, y],
        Some(w) => {
            let lx = spec.x_range.1 - spec.x_range.0;
            let ly = spec.y_range.1 - spec.y_range.0;
            let rx = (x - spec.x_range.0) / lx;
            let ry = (y - spec.y_range.0) / ly;
            let s = w.amplitude
                * (2.0 * std::f64::consts::PI * w.kx * rx).sin()
                * (2.0 * std::f64::consts::PI * w.ky * ry).sin();
            [x + s, y - s]
        }
    }
}

/// Generate a structured conforming quad mesh. Non-periodic boundaries are
/// tagged "left", "right", "bottom", "top".
pub fn generate_structured_mesh(spec: &StructuredMeshSpec) -> Result<QuadMesh> {
    let rule = legendre_gauss_lobatto(spec.order)?;
    let (nx, ny) = (spec.nx, spec.ny);
    let dx = (spec.x_range.1 - spec.x_range.0) / nx as f64;
    let dy = (spec.y_range.1 - spec.y_range.0) / ny as f64;
    let grid = |ix: usize, iy: usize| -> [f64; 2] {
        [
            spec.x_range.0 + ix as f64 * dx,
            spec.y_range.0 + iy as f64 * dy,
        ]
    };
    let cid = |ix: usize, iy: usize| iy * (nx + 1) + ix;

    let mut corners = Vec::with_capacity((nx + 1) * (ny + 1));
    for iy in 0..=ny {
        for ix in 0..=nx {
            let p = grid(ix, iy);
            corners.push(apply_warp(spec, p[0], p[1]));
        }
    }

    let mut elements = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            elements.push([
                cid(ix, iy),
                cid(ix + 1, iy),
                cid(ix + 1, iy + 1),
                cid(ix, iy + 1),
            ]);
        }
    }

    // Interior edges become sampled curves when a warp is active.
    let mut curves = Vec::new();
    if spec.warp.is_some() {
        let mut add_curve = |a: (usize, usize), b: (usize, usize)| {
            let pa = grid(a.0, a.1);
            let pb = grid(b.0, b.1);
            let pts: Vec<[f64; 2]> = rule
                .nodes
                .iter()
                .map(|&z| {
                    let t = 0.5 * (z + 1.0);
                    apply_warp(
                        spec,
                        pa[0] + t * (pb[0] - pa[0]),
                        pa[1] + t * (pb[1] - pa[1]),
                    )
                })
                .collect();
            curves.push((cid(a.0, a.1), cid(b.0, b.1), pts));
        };
        // Vertical interior grid lines.
        for ix in 1..nx {
            for iy in 0..ny {
                add_curve((ix, iy), (ix, iy + 1));
            }
        }
        // Horizontal interior grid lines.
        for iy in 1..ny {
            for ix in 0..nx {
                add_curve((ix, iy), (ix + 1, iy));
            }
        }
    }

    let mut boundary = Vec::new();
    for iy in 0..ny {
        if spec.periodic_x {
            boundary.push(BoundaryItem::Periodic {
                a: cid(0, iy),
                b: cid(0, iy + 1),
                c: cid(nx, iy),
                d: cid(nx, iy + 1),
            });
        } else {
            boundary.push(BoundaryItem::Tag {
                name: "left".into(),
                a: cid(0, iy),
                b: cid(0, iy + 1),
            });
            boundary.push(BoundaryItem::Tag {
                name: "right".into(),
                a: cid(nx, iy),
                b: cid(nx, iy + 1),
            });
        }
    }
    for ix in 0..nx {
        if spec.periodic_y {
            boundary.push(BoundaryItem::Periodic {
                a: cid(ix, 0),
                b: cid(ix + 1, 0),
                c: cid(ix, ny),
                d: cid(ix + 1, ny),
            });
        } else {
            boundary.push(BoundaryItem::Tag {
                name: "bottom".into(),
                a: cid(ix, 0),
                b: cid(ix + 1, 0),
            });
            boundary.push(BoundaryItem::Tag {
                name: "top".into(),
                a: cid(ix, ny),
                b: cid(ix + 1, ny),
            });
        }
    }

    QuadMesh::build(MeshInput {
        order: spec.order,
        corners,
        elements,
        curves,
        boundary,
    })
}

/// The curved 4x4 periodic verification mesh on [-1,1]^2.
pub fn curved_test_mesh(order: usize, nx: usize, ny: usize) -> Result<QuadMesh> {
    let spec = StructuredMeshSpec::cartesian(nx, ny, (-1.0, 1.0), (-1.0, 1.0), order)
        .with_warp(SineWarp::standard(0.05))
        .periodic();
    generate_structured_mesh(&spec)
}

/// Boundary-fitted 40x40 mesh for the parabolic dam on [-5,5]^2.
///
/// The grid is sheared horizontally so that the logical mid line x = 0 lands
/// exactly on the dam curve x = y^2/25 - 1/4. The shear weight falls linearly
/// to zero at logical x = -2.5 and x = +2.25; both are grid lines of the
/// 0.25-spaced grid, so the bathymetry jump line x = 2.25 stays straight and
/// element-aligned. Vertical edges inside the shear band are quadratic
/// curves (exactly representable for order >= 2), horizontal edges stay
/// straight.
///
/// Boundary tags: "left"/"right" at x = -5/+5, periodic in y, and "dam" walls
/// on the fitted mid line outside the breach |y| <= breach_half_width.
pub fn parabolic_dam_mesh(order: usize, breach_half_width: f64) -> Result<QuadMesh> {
    let nx = 40usize;
    let ny = 40usize;
    let (x0, x1) = (-5.0f64, 5.0f64);
    let (y0, y1) = (-5.0f64, 5.0f64);
    let dxc = (x1 - x0) / nx as f64;
    let dyc = (y1 - y0) / ny as f64;

    // Shear weight: 1 on the dam line, 0 outside [-2.5, 2.25].
    let weight = |s: f64| -> f64 {
        if s <= -2.5 || s >= 2.25 {
            0.0
        } else if s < 0.0 {
            1.0 + s / 2.5
        } else {
            1.0 - s / 2.25
        }
    };
    let dam_offset = |t: f64| t * t / 25.0 - 0.25;
    let map = |s: f64, t: f64| -> [f64; 2] { [s + weight(s) * dam_offset(t), t] };

    let rule = legendre_gauss_lobatto(order)?;
    let cid = |ix: usize, iy: usize| iy * (nx + 1) + ix;
    let sgrid = |ix: usize| x0 + ix as f64 * dxc;
    let tgrid = |iy: usize| y0 + iy as f64 * dyc;

    let mut corners = Vec::with_capacity((nx + 1) * (ny + 1));
    for iy in 0..=ny {
        for ix in 0..=nx {
            corners.push(map(sgrid(ix), tgrid(iy)));
        }
    }
    let mut elements = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            elements.push([
                cid(ix, iy),
                cid(ix + 1, iy),
                cid(ix + 1, iy + 1),
                cid(ix, iy + 1),
            ]);
        }
    }

    // Vertical edges are curved wherever the shear weight is nonzero.
    let mut curves = Vec::new();
    for ix in 0..=nx {
        let s = sgrid(ix);
        if weight(s) == 0.0 {
            continue;
        }
        for iy in 0..ny {
            let (ta, tb) = (tgrid(iy), tgrid(iy + 1));
            let pts: Vec<[f64; 2]> = rule
                .nodes
                .iter()
                .map(|&z| {
                    let t = ta + 0.5 * (z + 1.0) * (tb - ta);
                    map(s, t)
                })
                .collect();
            curves.push((cid(ix, iy), cid(ix, iy + 1), pts));
        }
    }

    let mut boundary = Vec::new();
    for iy in 0..ny {
        boundary.push(BoundaryItem::Tag {
            name: "left".into(),
            a: cid(0, iy),
            b: cid(0, iy + 1),
        });
        boundary.push(BoundaryItem::Tag {
            name: "right".into(),
            a: cid(nx, iy),
            b: cid(nx, iy + 1),
        });
    }
    for ix in 0..nx {
        boundary.push(BoundaryItem::Periodic {
            a: cid(ix, 0),
            b: cid(ix + 1, 0),
            c: cid(ix, ny),
            d: cid(ix + 1, ny),
        });
    }
    // Dam walls: sever the fitted mid-column edges outside the breach.
    let mid = nx / 2;
    for iy in 0..ny {
        let (ta, tb) = (tgrid(iy), tgrid(iy + 1));
        let inside_breach = ta >= -breach_half_width - 1e-12 && tb <= breach_half_width + 1e-12;
        if !inside_breach {
            boundary.push(BoundaryItem::Tag {
                name: "dam".into(),
                a: cid(mid, iy),
                b: cid(mid, iy + 1),
            });
        }
    }

    QuadMesh::build(MeshInput {
        order,
        corners,
        elements,
        curves,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric_identity_residual;
    use crate::mesh::EdgePartner;
    use crate::operators::operators;

    #[test]
    fn single_reference_element() {
        let spec = StructuredMeshSpec::cartesian(1, 1, (-1.0, 1.0), (-1.0, 1.0), 4);
        let mesh = generate_structured_mesh(&spec).unwrap();
        assert_eq!(mesh.n_elements(), 1);
        let ops = operators(4).unwrap();
        let geoms = mesh.geometries(&ops).unwrap();
        for &j in &geoms[0].jac {
            assert!((j - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn warped_mesh_metric_identities() {
        let spec = StructuredMeshSpec::cartesian(2, 2, (-1.0, 1.0), (-1.0, 1.0), 6)
            .with_warp(SineWarp::standard(0.05))
            .periodic();
        let mesh = generate_structured_mesh(&spec).unwrap();
        let ops = operators(6).unwrap();
        let geoms = mesh.geometries(&ops).unwrap();
        for g in &geoms {
            assert!(metric_identity_residual(g, &ops) <= 1e-12);
        }
        mesh.validate_watertight(&geoms).unwrap();
    }

    #[test]
    fn forty_by_forty_element_count() {
        let spec = StructuredMeshSpec::cartesian(40, 40, (0.0, 10.0), (0.0, 10.0), 4);
        let mesh = generate_structured_mesh(&spec).unwrap();
        assert_eq!(mesh.n_elements(), 1600);
    }

    #[test]
    fn curved_mesh_is_watertight_and_valid_up_to_high_order() {
        // The commutator round-off in the identity residual grows like
        // N^2 eps; 1e-12 holds through N = 12 (the range the convergence
        // study uses), N = 16 gets a proportionally looser bound.
        for (n, tol) in [(3, 1e-12), (5, 1e-12), (12, 1e-12), (16, 4e-12)] {
            let mesh = curved_test_mesh(n, 4, 4).unwrap();
            let ops = operators(n).unwrap();
            let geoms = mesh.geometries(&ops).unwrap();
            mesh.validate_watertight(&geoms).unwrap();
            for g in &geoms {
                let res = metric_identity_residual(g, &ops);
                assert!(res <= tol, "N={n}: residual {res:.3e}");
            }
        }
    }

    #[test]
    fn curved_mesh_normals_are_equal_and_opposite() {
        let n = 6;
        let mesh = curved_test_mesh(n, 4, 4).unwrap();
        let ops = operators(n).unwrap();
        let geoms = mesh.geometries(&ops).unwrap();
        for edge in &mesh.edges {
            let EdgePartner::Interior { e2, s2, reversed } = &edge.partner else {
                continue;
            };
            if edge.periodic {
                continue;
            }
            for k in 0..=n {
                let k2 = if *reversed { n - k } else { k };
                let n1 = geoms[edge.e1].outward_normal(edge.s1, k);
                let n2 = geoms[*e2].outward_normal(*s2, k2);
                assert!((n1[0] + n2[0]).abs() <= 1e-12, "{} vs {}", n1[0], n2[0]);
                assert!((n1[1] + n2[1]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn dam_break_interface_line_stays_straight() {
        // The warp must keep the x = 0 grid line fixed so dam-break initial
        // discontinuities sit on element interfaces.
        let mesh = curved_test_mesh(5, 4, 4).unwrap();
        let ops = operators(5).unwrap();
        let geoms = mesh.geometries(&ops).unwrap();
        // Elements in column 1 have their side-2 face on x = 0.
        for row in 0..4 {
            let e = row * 4 + 1;
            let g = &geoms[e];
            for k in 0..6 {
                let m = crate::geometry::face_node_index(5, 2, k);
                assert!(g.x[m].abs() < 1e-13, "x = {}", g.x[m]);
            }
        }
    }

    #[test]
    fn parabolic_dam_mesh_fits_the_dam_curve() {
        let mesh = parabolic_dam_mesh(3, 0.5).unwrap();
        assert_eq!(mesh.n_elements(), 1600);
        let ops = operators(3).unwrap();
        let geoms = mesh.geometries(&ops).unwrap();
        for g in &geoms {
            assert!(metric_identity_residual(g, &ops) <= 1e-12);
        }
        mesh.validate_watertight(&geoms).unwrap();

        // Dam wall edges sit on x = y^2/25 - 1/4.
        let mut dam_edges = 0;
        for edge in &mesh.edges {
            let EdgePartner::Boundary { tag } = &edge.partner else {
                continue;
            };
            if tag != "dam" {
                continue;
            }
            dam_edges += 1;
            let g = &geoms[edge.e1];
            for k in 0..4 {
                let m = crate::geometry::face_node_index(3, edge.s1, k);
                let want = g.y[m] * g.y[m] / 25.0 - 0.25;
                assert!((g.x[m] - want).abs() < 1e-12);
            }
        }
        // 36 severed rows, two boundary records each.
        assert_eq!(dam_edges, 72);

        // The bathymetry jump line x = 2.25 must be a straight grid line:
        // the shear weight vanishes there, so corners on logical column 29
        // all have x = 2.25.
        for iy in 0..=40 {
            let c = mesh.corners[iy * 41 + 29];
            assert!((c[0] - 2.25).abs() < 1e-13);
        }
    }
}
