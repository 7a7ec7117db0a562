//! Boundary conditions: reflecting walls and Dirichlet states. Periodic
//! boundaries never reach this module; they are merged into interior edges
//! when the mesh is built.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::physics::Conserved;

/// Prescribed state as a function of (x, y, t).
pub type StateFn = Arc<dyn Fn(f64, f64, f64) -> Conserved + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryKind {
    /// Reflecting wall: mirror state with the normal velocity negated.
    Wall,
    /// Prescribed exterior state; the bathymetry is mirrored from inside.
    Dirichlet(StateFn),
}

impl std::fmt::Debug for BoundaryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryKind::Wall => write!(f, "Wall"),
            BoundaryKind::Dirichlet(_) => write!(f, "Dirichlet(<fn>)"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BoundarySpec {
    map: HashMap<String, BoundaryKind>,
}

impl BoundarySpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn wall(mut self, tag: &str) -> Self {
        self.map.insert(tag.to_string(), BoundaryKind::Wall);
        self
    }

    pub fn dirichlet(mut self, tag: &str, f: StateFn) -> Self {
        self.map.insert(tag.to_string(), BoundaryKind::Dirichlet(f));
        self
    }

    pub fn get(&self, tag: &str) -> Result<&BoundaryKind> {
        self.map
            .get(tag)
            .ok_or_else(|| Error::UnknownBoundaryTag(tag.to_string()))
    }

    /// Check that every tag of the mesh is covered.
    pub fn validate_tags<'a>(&self, tags: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for tag in tags {
            self.get(tag)?;
        }
        Ok(())
    }
}

/// Ghost (exterior) state and bathymetry for a boundary face node.
///
/// `normal` must be the unit outward normal of the interior element.
pub fn apply_boundary_state(
    kind: &BoundaryKind,
    inner: &Conserved,
    b_inner: f64,
    x: f64,
    y: f64,
    t: f64,
    normal: [f64; 2],
) -> (Conserved, f64) {
    match kind {
        BoundaryKind::Wall => {
            let un = inner.hu * normal[0] + inner.hv * normal[1];
            (
                Conserved {
                    h: inner.h,
                    hu: inner.hu - 2.0 * un * normal[0],
                    hv: inner.hv - 2.0 * un * normal[1],
                },
                b_inner,
            )
        }
        BoundaryKind::Dirichlet(f) => (f(x, y, t), b_inner),
    }
}
