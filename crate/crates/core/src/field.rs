//! Jacobian-scaled nodal solution storage.
//!
//! The time integrator advances J*w directly; division by J happens only
//! where primitive values are needed. Layout is element-major with the xi
//! index outermost inside an element: `((e*(N+1) + i)*(N+1) + j)*3 + comp`.

use crate::geometry::ElementGeometry;
use crate::physics::Conserved;

pub const N_COMP: usize = 3;

#[derive(Debug, Clone)]
pub struct SolutionField {
    pub order: usize,
    pub n_elements: usize,
    pub time: f64,
    /// J-scaled conserved variables at the LGL nodes.
    pub data: Vec<f64>,
}

impl SolutionField {
    pub fn zeros(order: usize, n_elements: usize) -> Self {
        let np = order + 1;
        SolutionField {
            order,
            n_elements,
            time: 0.0,
            data: vec![0.0; n_elements * np * np * N_COMP],
        }
    }

    #[inline]
    pub fn idx(&self, e: usize, i: usize, j: usize) -> usize {
        let np = self.order + 1;
        ((e * np + i) * np + j) * N_COMP
    }

    /// J-scaled state at a node.
    #[inline]
    pub fn get_scaled(&self, e: usize, i: usize, j: usize) -> [f64; 3] {
        let m = self.idx(e, i, j);
        [self.data[m], self.data[m + 1], self.data[m + 2]]
    }

    #[inline]
    pub fn set_scaled(&mut self, e: usize, i: usize, j: usize, v: [f64; 3]) {
        let m = self.idx(e, i, j);
        self.data[m] = v[0];
        self.data[m + 1] = v[1];
        self.data[m + 2] = v[2];
    }

    /// Physical state at a node (divides by the nodal Jacobian).
    pub fn state(&self, geom: &ElementGeometry, e: usize, i: usize, j: usize) -> Conserved {
        let m = self.idx(e, i, j);
        let jac = geom.jac[geom.idx(i, j)];
        Conserved {
            h: self.data[m] / jac,
            hu: self.data[m + 1] / jac,
            hv: self.data[m + 2] / jac,
        }
    }

    /// Collocate an initial condition given in physical variables.
    pub fn set_initial(
        &mut self,
        geoms: &[ElementGeometry],
        mut f: impl FnMut(f64, f64, usize) -> Conserved,
    ) {
        let np = self.order + 1;
        for e in 0..self.n_elements {
            let g = &geoms[e];
            for i in 0..np {
                for j in 0..np {
                    let m = g.idx(i, j);
                    let w = f(g.x[m], g.y[m], e);
                    self.set_scaled(e, i, j, [w.h * g.jac[m], w.hu * g.jac[m], w.hv * g.jac[m]]);
                }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Location of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize, usize)> {
        let np = self.order + 1;
        self.data.iter().position(|x| !x.is_finite()).map(|m| {
            let node = m / N_COMP;
            let j = node % np;
            let i = (node / np) % np;
            let e = node / (np * np);
            (e, i, j)
        })
    }
}
