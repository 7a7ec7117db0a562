//! Bottom-topography storage and the precomputed pieces of its
//! discretisation.
//!
//! The volume part approximates the split form of J grad(b) with the metric
//! identity terms already cancelled:
//!
//!   db2 = y_eta o (D b) - y_xi o (b D^T) + D(y_eta o b) - (y_xi o b) D^T
//!   db3 = -x_eta o (D b) + x_xi o (b D^T) - D(x_eta o b) + (x_xi o b) D^T
//!
//! The right-hand side later multiplies these by (g/2) h. The edge part
//! stores the jump of b across every edge in the edge frame (e2 trace minus
//! e1 trace); b does not depend on time, so both parts are built once.

use crate::error::Result;
use crate::geometry::{face_node_index, ElementGeometry};
use crate::mesh::{EdgePartner, QuadMesh};
use crate::operators::OperatorSet;

#[derive(Debug, Clone)]
pub struct BottomCache {
    /// Nodal bathymetry per element, (N+1)^2 each.
    pub b: Vec<Vec<f64>>,
    /// Volume source arrays per element (components 2 and 3).
    pub db2: Vec<Vec<f64>>,
    pub db3: Vec<Vec<f64>>,
    /// Per edge: jump of b in the edge frame, e2-side minus e1-side;
    /// zero for boundary edges (the ghost mirrors the interior bathymetry).
    pub edge_jump_b: Vec<Vec<f64>>,
}

/// Volume contributions of the source discretisation for one element.
pub fn bottom_volume_contributions(
    b: &[f64],
    geom: &ElementGeometry,
    ops: &OperatorSet,
) -> (Vec<f64>, Vec<f64>) {
    let np = ops.n_nodes();
    let mut db2 = vec![0.0; np * np];
    let mut db3 = vec![0.0; np * np];
    for i in 0..np {
        for j in 0..np {
            let m = i * np + j;
            let mut d_b_xi = 0.0; // (D b)_ij
            let mut d_b_eta = 0.0; // (b D^T)_ij
            let mut d_yeta_b = 0.0; // (D (y_eta o b))_ij
            let mut d_yxi_b = 0.0; // ((y_xi o b) D^T)_ij
            let mut d_xeta_b = 0.0; // (D (x_eta o b))_ij
            let mut d_xxi_b = 0.0; // ((x_xi o b) D^T)_ij
            for l in 0..np {
                let dil = ops.d[i * np + l];
                let djl = ops.d[j * np + l];
                let m_lj = l * np + j;
                let m_il = i * np + l;
                d_b_xi += dil * b[m_lj];
                d_b_eta += b[m_il] * djl;
                d_yeta_b += dil * geom.y_eta[m_lj] * b[m_lj];
                d_yxi_b += geom.y_xi[m_il] * b[m_il] * djl;
                d_xeta_b += dil * geom.x_eta[m_lj] * b[m_lj];
                d_xxi_b += geom.x_xi[m_il] * b[m_il] * djl;
            }
            db2[m] = geom.y_eta[m] * d_b_xi - geom.y_xi[m] * d_b_eta + d_yeta_b - d_yxi_b;
            db3[m] = -geom.x_eta[m] * d_b_xi + geom.x_xi[m] * d_b_eta - d_xeta_b + d_xxi_b;
        }
    }
    (db2, db3)
}

/// Edge source ingredients from face traces already oriented into a common
/// frame: the jump b_right - b_left (shared by both adjacent sides) and the
/// mean water height. The jump side is static and cached; the mean height is
/// refreshed every right-hand-side evaluation.
pub fn edge_bottom_terms(
    b_left: &[f64],
    b_right: &[f64],
    h_left: &[f64],
    h_right: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let jump = b_left
        .iter()
        .zip(b_right)
        .map(|(l, r)| r - l)
        .collect();
    let avg = h_left
        .iter()
        .zip(h_right)
        .map(|(l, r)| 0.5 * (l + r))
        .collect();
    (jump, avg)
}

impl BottomCache {
    /// Evaluate a bathymetry function at the element nodes and precompute
    /// the volume and edge pieces. The function receives the node position
    /// and the element index so bathymetries restricted to single elements
    /// stay discontinuous across the element boundary.
    pub fn build(
        mesh: &QuadMesh,
        geoms: &[ElementGeometry],
        ops: &OperatorSet,
        mut b_fn: impl FnMut(f64, f64, usize) -> f64,
    ) -> Result<BottomCache> {
        let np = ops.n_nodes();
        let mut b = Vec::with_capacity(mesh.n_elements());
        for (e, g) in geoms.iter().enumerate() {
            let mut be = vec![0.0; np * np];
            for m in 0..np * np {
                be[m] = b_fn(g.x[m], g.y[m], e);
            }
            b.push(be);
        }
        Self::from_nodal(mesh, geoms, ops, b)
    }

    /// Build from already collocated nodal values.
    pub fn from_nodal(
        mesh: &QuadMesh,
        geoms: &[ElementGeometry],
        ops: &OperatorSet,
        b: Vec<Vec<f64>>,
    ) -> Result<BottomCache> {
        let np = ops.n_nodes();
        assert_eq!(b.len(), mesh.n_elements());
        let mut db2 = Vec::with_capacity(b.len());
        let mut db3 = Vec::with_capacity(b.len());
        for (e, be) in b.iter().enumerate() {
            let (d2, d3) = bottom_volume_contributions(be, &geoms[e], ops);
            db2.push(d2);
            db3.push(d3);
        }

        let mut edge_jump_b = Vec::with_capacity(mesh.edges.len());
        for edge in &mesh.edges {
            match &edge.partner {
                EdgePartner::Boundary { .. } => edge_jump_b.push(vec![0.0; np]),
                EdgePartner::Interior { e2, s2, reversed } => {
                    let mut jump = vec![0.0; np];
                    for (k, slot) in jump.iter_mut().enumerate() {
                        let k2 = if *reversed { np - 1 - k } else { k };
                        let b1 = b[edge.e1][face_node_index(mesh.order, edge.s1, k)];
                        let b2 = b[*e2][face_node_index(mesh.order, *s2, k2)];
                        *slot = b2 - b1;
                    }
                    edge_jump_b.push(jump);
                }
            }
        }

        Ok(BottomCache {
            b,
            db2,
            db3,
            edge_jump_b,
        })
    }
}
