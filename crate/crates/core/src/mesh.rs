//! Unstructured conforming quadrilateral meshes: corner nodes, elements,
//! edge connectivity with orientation, and boundary tags.
//!
//! Elements list their corners counterclockwise starting at the local
//! (xi,eta) = (-1,-1) corner; side s covers the corner pair
//!
//!   side 1: (c1, c2)   side 2: (c2, c3)   side 3: (c4, c3)   side 4: (c1, c4)
//!
//! each traversed in the direction of increasing local coordinate. Interior
//! edges store the first element as e1 and normalise so that s1 is a
//! "plus side" (2 or 3) whenever possible; jumps across the edge are then
//! e2-trace minus e1-trace, which is the jump in the direction of the face
//! coordinate. Periodic boundary pairs are merged into interior edges at
//! build time and reuse the interior machinery unchanged.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{
    compute_element_geometry, face_node_index, BoundaryCurve, ElementGeometry, SideId,
};
use crate::operators::{legendre_gauss_lobatto, OperatorSet, QuadratureRule};

/// Interior coupling or boundary condition of an edge.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgePartner {
    Interior {
        e2: usize,
        s2: SideId,
        /// Face index k on e2 runs opposite to the edge frame (e1's order).
        reversed: bool,
    },
    Boundary { tag: String },
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub e1: usize,
    pub s1: SideId,
    pub partner: EdgePartner,
    /// Merged periodic pair (the two sides touch only in the quotient
    /// topology, so their coordinates differ by a translation).
    pub periodic: bool,
}

/// Boundary description in mesh inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryItem {
    /// Tag the edge with corner pair (a, b). Tagging an interior corner pair
    /// severs it into two boundary edges (used for internal walls).
    Tag { name: String, a: usize, b: usize },
    /// Periodic pairing: corner a maps to c and b maps to d.
    Periodic { a: usize, b: usize, c: usize, d: usize },
}

/// Raw mesh data before connectivity resolution.
#[derive(Debug, Clone, Default)]
pub struct MeshInput {
    pub order: usize,
    pub corners: Vec<[f64; 2]>,
    pub elements: Vec<[usize; 4]>,
    /// Curved edges: (a, b, samples from a to b at the LGL parameter nodes).
    pub curves: Vec<(usize, usize, Vec<[f64; 2]>)>,
    pub boundary: Vec<BoundaryItem>,
}

#[derive(Debug, Clone)]
pub struct QuadMesh {
    pub order: usize,
    pub rule: QuadratureRule,
    pub corners: Vec<[f64; 2]>,
    pub elements: Vec<[usize; 4]>,
    pub edges: Vec<Edge>,
    /// Per element: edge index for sides 1..4.
    pub element_edges: Vec<[usize; 4]>,
    /// Per element: boundary curves for sides 1..4, in local + direction.
    pub side_curves: Vec<[BoundaryCurve; 4]>,
    /// Original curve records for writing the mesh back out.
    pub curve_records: Vec<(usize, usize, Vec<[f64; 2]>)>,
    pub boundary_records: Vec<BoundaryItem>,
}

/// Corner pair of a side in local + direction.
pub fn side_corner_pair(corners: &[usize; 4], side: SideId) -> (usize, usize) {
    match side {
        1 => (corners[0], corners[1]),
        2 => (corners[1], corners[2]),
        3 => (corners[3], corners[2]),
        4 => (corners[0], corners[3]),
        _ => unreachable!("side id must be 1..=4"),
    }
}

fn is_plus_side(s: SideId) -> bool {
    s == 2 || s == 3
}

struct ProtoEdge {
    claims: Vec<(usize, SideId)>, // elements claiming this corner pair
}

impl QuadMesh {
    pub fn build(input: MeshInput) -> Result<QuadMesh> {
        if input.order < 1 {
            return Err(Error::InvalidOrder(input.order));
        }
        let rule = legendre_gauss_lobatto(input.order)?;
        let np = input.order + 1;

        for (e, corners) in input.elements.iter().enumerate() {
            for &c in corners {
                if c >= input.corners.len() {
                    return Err(Error::NonConforming(format!(
                        "element {e} references corner {c} out of range"
                    )));
                }
            }
        }

        // Curve lookup keyed by ordered corner pair.
        let mut curve_map: HashMap<(usize, usize), Vec<[f64; 2]>> = HashMap::new();
        for (a, b, pts) in &input.curves {
            if pts.len() != np {
                return Err(Error::NonConforming(format!(
                    "curve ({a},{b}) has {} samples, expected {np}",
                    pts.len()
                )));
            }
            let ends_ok = |p: &[f64; 2], c: &[f64; 2]| {
                ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt() <= 1e-12
            };
            if !ends_ok(&pts[0], &input.corners[*a]) || !ends_ok(&pts[np - 1], &input.corners[*b]) {
                return Err(Error::NonConforming(format!(
                    "curve ({a},{b}) endpoints do not match its corners"
                )));
            }
            if curve_map.insert((*a, *b), pts.clone()).is_some() {
                return Err(Error::NonConforming(format!("duplicate curve ({a},{b})")));
            }
        }

        // Group side claims by unordered corner pair.
        let mut proto: HashMap<(usize, usize), ProtoEdge> = HashMap::new();
        for (e, corners) in input.elements.iter().enumerate() {
            for side in 1..=4u8 {
                let (a, b) = side_corner_pair(corners, side);
                if a == b {
                    return Err(Error::NonConforming(format!(
                        "element {e} side {side} is degenerate (corner {a} repeated)"
                    )));
                }
                let key = (a.min(b), a.max(b));
                proto
                    .entry(key)
                    .or_insert_with(|| ProtoEdge { claims: vec![] })
                    .claims
                    .push((e, side));
            }
        }
        for (key, pe) in &proto {
            if pe.claims.len() > 2 {
                return Err(Error::NonConforming(format!(
                    "corner pair {:?} shared by {} element sides",
                    key,
                    pe.claims.len()
                )));
            }
        }

        // Severed pairs (internal walls): a Tag item naming an interior pair.
        let mut severed: HashMap<(usize, usize), String> = HashMap::new();
        let mut tags: HashMap<(usize, usize), String> = HashMap::new();
        let mut periodic_items: Vec<(usize, usize, usize, usize)> = Vec::new();
        let mut periodic_keys: std::collections::HashSet<(usize, usize)> =
            std::collections::HashSet::new();
        for item in &input.boundary {
            match item {
                BoundaryItem::Tag { name, a, b } => {
                    let key = (*a.min(b), *a.max(b));
                    let n_claims = proto.get(&key).map(|p| p.claims.len()).unwrap_or(0);
                    if n_claims == 0 {
                        return Err(Error::NonConforming(format!(
                            "boundary tag '{name}' names corner pair ({a},{b}) that no element uses"
                        )));
                    }
                    if n_claims == 2 {
                        severed.insert(key, name.clone());
                    } else {
                        tags.insert(key, name.clone());
                    }
                }
                BoundaryItem::Periodic { a, b, c, d } => {
                    periodic_items.push((*a, *b, *c, *d));
                    periodic_keys.insert((*a.min(b), *a.max(b)));
                    periodic_keys.insert((*c.min(d), *c.max(d)));
                }
            }
        }

        let mut edges: Vec<Edge> = Vec::new();
        let mut element_edges = vec![[usize::MAX; 4]; input.elements.len()];
        // Remember which edge index carries each boundary corner pair so the
        // periodic merge can find it.
        let mut boundary_edge_of: HashMap<(usize, usize), usize> = HashMap::new();

        let mut keys: Vec<_> = proto.keys().copied().collect();
        keys.sort_unstable();
        for key in keys {
            let pe = &proto[&key];
            match pe.claims.as_slice() {
                [(e, s)] => {
                    // Edges named by a periodic pairing stay untagged here and
                    // are merged below; anything else must carry a tag.
                    let tag = match tags.get(&key) {
                        Some(t) => t.clone(),
                        None if periodic_keys.contains(&key) => String::new(),
                        None => {
                            return Err(Error::NonConforming(format!(
                                "boundary edge {:?} of element {e} (side {s}) has no tag",
                                key
                            )))
                        }
                    };
                    let idx = edges.len();
                    edges.push(Edge {
                        e1: *e,
                        s1: *s,
                        partner: EdgePartner::Boundary { tag },
                        periodic: false,
                    });
                    element_edges[*e][*s as usize - 1] = idx;
                    boundary_edge_of.insert(key, idx);
                }
                [(ea, sa), (eb, sb)] => {
                    if let Some(tag) = severed.get(&key) {
                        for (e, s) in [(ea, sa), (eb, sb)] {
                            let idx = edges.len();
                            edges.push(Edge {
                                e1: *e,
                                s1: *s,
                                partner: EdgePartner::Boundary { tag: clone_tag(tag) },
                                periodic: false,
                            });
                            element_edges[*e][*s as usize - 1] = idx;
                        }
                        continue;
                    }
                    if ea == eb {
                        return Err(Error::NonConforming(format!(
                            "element {ea} shares corner pair {:?} with itself",
                            key
                        )));
                    }
                    // Prefer a plus side as e1.
                    let ((e1, s1), (e2, s2)) = if is_plus_side(*sa) || !is_plus_side(*sb) {
                        ((*ea, *sa), (*eb, *sb))
                    } else {
                        ((*eb, *sb), (*ea, *sa))
                    };
                    if is_plus_side(s1) == is_plus_side(s2) {
                        // The face-coordinate jump direction is single-valued
                        // only when a plus side (2, 3) meets a minus side
                        // (1, 4); locally inverted orientations are out of
                        // scope for the conforming-mesh machinery.
                        return Err(Error::NonConforming(format!(
                            "edge {:?}: element {e1} side {s1} meets element {e2} side {s2}; \
                             neighbouring elements must be consistently oriented",
                            key
                        )));
                    }
                    // Both sides traverse the same corner pair; they run in
                    // opposite directions exactly when their start corners
                    // differ.
                    let (a1, _) = side_corner_pair(&input.elements[e1], s1);
                    let (a2, _) = side_corner_pair(&input.elements[e2], s2);
                    let reversed = a1 != a2;
                    let idx = edges.len();
                    edges.push(Edge {
                        e1,
                        s1,
                        partner: EdgePartner::Interior { e2, s2, reversed },
                        periodic: false,
                    });
                    element_edges[e1][s1 as usize - 1] = idx;
                    element_edges[e2][s2 as usize - 1] = idx;
                }
                _ => unreachable!(),
            }
        }

        // Merge periodic pairs into interior edges.
        for (a, b, c, d) in periodic_items {
            let key1 = (a.min(b), a.max(b));
            let key2 = (c.min(d), c.max(d));
            let i1 = *boundary_edge_of.get(&key1).ok_or_else(|| {
                Error::NonConforming(format!(
                    "periodic pairing names ({a},{b}) which is not an untagged boundary edge"
                ))
            })?;
            let i2 = *boundary_edge_of.get(&key2).ok_or_else(|| {
                Error::NonConforming(format!(
                    "periodic pairing names ({c},{d}) which is not an untagged boundary edge"
                ))
            })?;
            if i1 == i2 {
                return Err(Error::NonConforming(
                    "periodic pairing names the same edge twice".into(),
                ));
            }
            let (edge1, edge2) = (edges[i1].clone(), edges[i2].clone());
            for (i, e) in [(i1, &edge1), (i2, &edge2)] {
                if !matches!(e.partner, EdgePartner::Boundary { .. }) {
                    return Err(Error::NonConforming(format!(
                        "periodic pairing reuses edge {i} which is already paired"
                    )));
                }
            }
            if is_plus_side(edge1.s1) == is_plus_side(edge2.s1) {
                return Err(Error::NonConforming(format!(
                    "periodic pairing ({a},{b})-({c},{d}): both sides have the same \
                     face-coordinate orientation"
                )));
            }
            // Choose e1 so that s1 is a plus side.
            let ((e1, s1, p1), (e2, s2, p2)) =
                if is_plus_side(edge1.s1) {
                    ((edge1.e1, edge1.s1, (a, b)), (edge2.e1, edge2.s1, (c, d)))
                } else {
                    ((edge2.e1, edge2.s1, (c, d)), (edge1.e1, edge1.s1, (a, b)))
                };
            // e1 traverses its side corners (a1 -> b1); the pairing maps its
            // start corner to a partner corner; e2 is reversed when its own
            // traversal starts at the image of e1's end corner.
            let (a1, _b1) = side_corner_pair(&input.elements[e1], s1);
            let (a2, _b2) = side_corner_pair(&input.elements[e2], s2);
            let a1_image = if a1 == p1.0 { p2.0 } else { p2.1 };
            let reversed = a2 != a1_image;
            let merged = Edge {
                e1,
                s1,
                partner: EdgePartner::Interior { e2, s2, reversed },
                periodic: true,
            };
            edges[i1] = merged;
            element_edges[e1][s1 as usize - 1] = i1;
            element_edges[e2][s2 as usize - 1] = i1;
            // Mark the absorbed record; compacted below.
            edges[i2].e1 = usize::MAX;
        }
        // Compact absorbed periodic records.
        let mut remap = vec![usize::MAX; edges.len()];
        let mut compacted = Vec::with_capacity(edges.len());
        for (i, e) in edges.into_iter().enumerate() {
            if e.e1 != usize::MAX {
                remap[i] = compacted.len();
                compacted.push(e);
            }
        }
        for per_elem in element_edges.iter_mut() {
            for slot in per_elem.iter_mut() {
                if *slot == usize::MAX {
                    return Err(Error::NonConforming(
                        "element side without edge record".into(),
                    ));
                }
                *slot = remap[*slot];
            }
        }
        for e in &compacted {
            if matches!(&e.partner, EdgePartner::Boundary { tag } if tag.is_empty()) {
                return Err(Error::NonConforming(format!(
                    "periodic pairing left element {} side {} unpaired",
                    e.e1, e.s1
                )));
            }
        }

        // Assemble per-side boundary curves in local + direction.
        let mut side_curves = Vec::with_capacity(input.elements.len());
        for corners in &input.elements {
            let mut sides: Vec<BoundaryCurve> = Vec::with_capacity(4);
            for side in 1..=4u8 {
                let (a, b) = side_corner_pair(corners, side);
                let curve = if let Some(pts) = curve_map.get(&(a, b)) {
                    BoundaryCurve { points: pts.clone() }
                } else if let Some(pts) = curve_map.get(&(b, a)) {
                    BoundaryCurve { points: pts.clone() }.reversed()
                } else {
                    BoundaryCurve::straight(input.corners[a], input.corners[b], &rule)
                };
                sides.push(curve);
            }
            side_curves.push([
                sides[0].clone(),
                sides[1].clone(),
                sides[2].clone(),
                sides[3].clone(),
            ]);
        }

        let mesh = QuadMesh {
            order: input.order,
            rule,
            corners: input.corners,
            elements: input.elements,
            edges: compacted,
            element_edges,
            side_curves,
            curve_records: input.curves,
            boundary_records: input.boundary,
        };
        mesh.validate_periodic_geometry()?;
        Ok(mesh)
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Boundary curves of one element (sides 1..4).
    pub fn element_curves(&self, e: usize) -> &[BoundaryCurve; 4] {
        &self.side_curves[e]
    }

    /// Compute the geometry of every element.
    pub fn geometries(&self, ops: &OperatorSet) -> Result<Vec<ElementGeometry>> {
        (0..self.n_elements())
            .map(|e| compute_element_geometry(&self.side_curves[e], ops, e))
            .collect()
    }

    /// Distinct boundary tags present in the mesh.
    pub fn boundary_tags(&self) -> Vec<String> {
        let mut tags: Vec<String> = self
            .edges
            .iter()
            .filter_map(|e| match &e.partner {
                EdgePartner::Boundary { tag } => Some(tag.clone()),
                _ => None,
            })
            .collect();
        tags.sort();
        tags.dedup();
        tags
    }

    /// Check that periodic partner curves match under a constant translation.
    fn validate_periodic_geometry(&self) -> Result<()> {
        for (i, edge) in self.edges.iter().enumerate() {
            if !edge.periodic {
                continue;
            }
            let EdgePartner::Interior { e2, s2, reversed } = &edge.partner else {
                continue;
            };
            let c1 = &self.side_curves[edge.e1][edge.s1 as usize - 1];
            let c2 = &self.side_curves[*e2][*s2 as usize - 1];
            let np = self.order + 1;
            let pick = |k: usize| if *reversed { np - 1 - k } else { k };
            let shift = [
                c2.points[pick(0)][0] - c1.points[0][0],
                c2.points[pick(0)][1] - c1.points[0][1],
            ];
            for k in 0..np {
                let p1 = c1.points[k];
                let p2 = c2.points[pick(k)];
                let dx = p2[0] - p1[0] - shift[0];
                let dy = p2[1] - p1[1] - shift[1];
                if (dx * dx + dy * dy).sqrt() > 1e-12 {
                    return Err(Error::NonConforming(format!(
                        "periodic edge {i}: partner curves are not a rigid translation"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Conformity check on computed geometries: both traces of every interior
    /// (non-periodic) edge must visit the same physical points.
    pub fn validate_watertight(&self, geoms: &[ElementGeometry]) -> Result<f64> {
        let np = self.order + 1;
        let mut worst: f64 = 0.0;
        for (i, edge) in self.edges.iter().enumerate() {
            let EdgePartner::Interior { e2, s2, reversed } = &edge.partner else {
                continue;
            };
            if edge.periodic {
                continue;
            }
            let g1 = &geoms[edge.e1];
            let g2 = &geoms[*e2];
            for k in 0..np {
                let k2 = if *reversed { np - 1 - k } else { k };
                let m1 = face_node_index(self.order, edge.s1, k);
                let m2 = face_node_index(self.order, *s2, k2);
                let d = ((g1.x[m1] - g2.x[m2]).powi(2) + (g1.y[m1] - g2.y[m2]).powi(2)).sqrt();
                worst = worst.max(d);
                if d > 1e-12 {
                    return Err(Error::NonConforming(format!(
                        "edge {i}: face traces differ by {d:e} at face node {k}"
                    )));
                }
            }
        }
        Ok(worst)
    }
}

fn clone_tag(tag: &str) -> String {
    tag.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::operators;

    /// Hand-built 2x2 Cartesian mesh on [0,2]^2 with unit elements.
    pub(crate) fn two_by_two(order: usize, periodic: bool) -> MeshInput {
        let mut corners = Vec::new();
        for iy in 0..3 {
            for ix in 0..3 {
                corners.push([ix as f64, iy as f64]);
            }
        }
        let c = |ix: usize, iy: usize| iy * 3 + ix;
        let mut elements = Vec::new();
        for iy in 0..2 {
            for ix in 0..2 {
                elements.push([
                    c(ix, iy),
                    c(ix + 1, iy),
                    c(ix + 1, iy + 1),
                    c(ix, iy + 1),
                ]);
            }
        }
        let mut boundary = Vec::new();
        if periodic {
            for iy in 0..2 {
                boundary.push(BoundaryItem::Periodic {
                    a: c(0, iy),
                    b: c(0, iy + 1),
                    c: c(2, iy),
                    d: c(2, iy + 1),
                });
            }
            for ix in 0..2 {
                boundary.push(BoundaryItem::Periodic {
                    a: c(ix, 0),
                    b: c(ix + 1, 0),
                    c: c(ix, 2),
                    d: c(ix + 1, 2),
                });
            }
        } else {
            for iy in 0..2 {
                boundary.push(BoundaryItem::Tag {
                    name: "left".into(),
                    a: c(0, iy),
                    b: c(0, iy + 1),
                });
                boundary.push(BoundaryItem::Tag {
                    name: "right".into(),
                    a: c(2, iy),
                    b: c(2, iy + 1),
                });
            }
            for ix in 0..2 {
                boundary.push(BoundaryItem::Tag {
                    name: "bottom".into(),
                    a: c(ix, 0),
                    b: c(ix + 1, 0),
                });
                boundary.push(BoundaryItem::Tag {
                    name: "top".into(),
                    a: c(ix, 2),
                    b: c(ix + 1, 2),
                });
            }
        }
        MeshInput {
            order,
            corners,
            elements,
            curves: vec![],
            boundary,
        }
    }

    #[test]
    fn two_by_two_edge_counts() {
        let mesh = QuadMesh::build(two_by_two(3, false)).unwrap();
        assert_eq!(mesh.n_elements(), 4);
        assert_eq!(mesh.edges.len(), 12);
        let interior = mesh
            .edges
            .iter()
            .filter(|e| matches!(e.partner, EdgePartner::Interior { .. }))
            .count();
        assert_eq!(interior, 4);

        let mesh = QuadMesh::build(two_by_two(3, true)).unwrap();
        assert_eq!(mesh.edges.len(), 8);
        assert!(mesh
            .edges
            .iter()
            .all(|e| matches!(e.partner, EdgePartner::Interior { .. })));
        assert_eq!(mesh.edges.iter().filter(|e| e.periodic).count(), 4);
    }

    #[test]
    fn interior_edges_prefer_plus_sides() {
        let mesh = QuadMesh::build(two_by_two(2, true)).unwrap();
        for e in &mesh.edges {
            assert!(e.s1 == 2 || e.s1 == 3, "edge e1 side {}", e.s1);
            if let EdgePartner::Interior { s2, reversed, .. } = &e.partner {
                assert!(*s2 == 1 || *s2 == 4);
                assert!(!reversed);
            }
        }
    }

    #[test]
    fn untagged_boundary_is_an_error() {
        let mut input = two_by_two(2, false);
        input.boundary.pop();
        assert!(matches!(
            QuadMesh::build(input),
            Err(Error::NonConforming(_))
        ));
    }

    #[test]
    fn watertight_on_cartesian_mesh() {
        let mesh = QuadMesh::build(two_by_two(4, false)).unwrap();
        let ops = operators(4).unwrap();
        let geoms = mesh.geometries(&ops).unwrap();
        let worst = mesh.validate_watertight(&geoms).unwrap();
        assert!(worst <= 1e-13);
    }

    #[test]
    fn severing_an_interior_edge_makes_two_walls() {
        let mut input = two_by_two(2, false);
        // Sever the vertical edge between elements 0 and 1.
        input.boundary.push(BoundaryItem::Tag {
            name: "dam".into(),
            a: 1,
            b: 4,
        });
        let mesh = QuadMesh::build(input).unwrap();
        assert_eq!(mesh.edges.len(), 13);
        let dam_edges: Vec<_> = mesh
            .edges
            .iter()
            .filter(|e| matches!(&e.partner, EdgePartner::Boundary { tag } if tag == "dam"))
            .collect();
        assert_eq!(dam_edges.len(), 2);
    }

    #[test]
    fn normals_are_equal_and_opposite_across_interior_edges() {
        let mesh = QuadMesh::build(two_by_two(3, false)).unwrap();
        let ops = operators(3).unwrap();
        let geoms = mesh.geometries(&ops).unwrap();
        let np = 4;
        for edge in &mesh.edges {
            let EdgePartner::Interior { e2, s2, reversed } = &edge.partner else {
                continue;
            };
            for k in 0..np {
                let k2 = if *reversed { np - 1 - k } else { k };
                let n1 = geoms[edge.e1].outward_normal(edge.s1, k);
                let n2 = geoms[*e2].outward_normal(*s2, k2);
                assert!((n1[0] + n2[0]).abs() < 1e-12);
                assert!((n1[1] + n2[1]).abs() < 1e-12);
            }
        }
    }
}
