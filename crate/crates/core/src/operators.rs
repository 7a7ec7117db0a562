//! Legendre-Gauss-Lobatto quadrature, Lagrange interpolation, and the
//! summation-by-parts operator family on the reference interval [-1,1].
//!
//! The one dimensional operators built here drive everything else: the mass
//! matrix M = diag(w), the derivative matrix D with D_ij = l_j'(x_i), the
//! SBP matrix Q = M D satisfying Q + Q^T = B = diag(-1,0,...,0,1), the
//! surface matrix S = diag(1/w_0, 0, ..., 0, -1/w_N) and the weak-form
//! derivative Dhat = -M^{-1} Q^T with D = -S + Dhat.

use crate::error::{Error, Result};

/// LGL nodes, quadrature weights, and barycentric weights for order N.
///
/// Nodes are strictly increasing with nodes[0] = -1 and nodes[N] = +1.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Barycentric interpolation weights 1 / prod_{i != j} (x_j - x_i).
    pub bary: Vec<f64>,
}

/// Dense (N+1)x(N+1) matrices of the nodal DG discretisation.
///
/// All matrices are stored row-major; N stays small so dense storage is fine
/// and flux differencing reads whole rows of `q` anyway.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub rule: QuadratureRule,
    /// Polynomial derivative matrix D_ij = l_j'(x_i).
    pub d: Vec<f64>,
    /// SBP matrix Q = M D.
    pub q: Vec<f64>,
    /// Weak-form derivative matrix Dhat = -M^{-1} Q^T.
    pub dhat: Vec<f64>,
    /// Surface matrix diagonal: s[0] = 1/w_0, s[N] = -1/w_N, zero elsewhere.
    pub s_diag: Vec<f64>,
}

/// Evaluate P_n(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let mut pm1 = 1.0;
            let mut p = x;
            for k in 1..n {
                let kf = k as f64;
                let pp = ((2.0 * kf + 1.0) * x * p - kf * pm1) / (kf + 1.0);
                pm1 = p;
                p = pp;
            }
            p
        }
    }
}

/// Evaluate q(x) = P_{N+1}(x) - P_{N-1}(x) and its derivative q'(x) = (2N+1) P_N(x).
///
/// The interior LGL nodes are the roots of q, which is proportional to
/// (1 - x^2) P_N'(x).
fn q_and_dq(n: usize, x: f64) -> (f64, f64) {
    let q = legendre(n + 1, x) - legendre(n - 1, x);
    let dq = (2.0 * n as f64 + 1.0) * legendre(n, x);
    (q, dq)
}

/// Compute the Legendre-Gauss-Lobatto rule of order N (N+1 nodes).
///
/// Interior nodes come from Newton iteration on (1 - x^2) P_N'(x) seeded with
/// Chebyshev-Gauss-Lobatto points; the tolerance is 4*eps with at most 100
/// iterations. Weights are w_j = 2 / (N (N+1) P_N(x_j)^2). The node set is
/// symmetrised so that nodes[i] = -nodes[N-i] holds exactly.
pub fn legendre_gauss_lobatto(n: usize) -> Result<QuadratureRule> {
    if n < 1 {
        return Err(Error::InvalidOrder(n));
    }
    let np = n + 1;
    let mut nodes = vec![0.0; np];
    let mut weights = vec![0.0; np];
    nodes[0] = -1.0;
    nodes[n] = 1.0;

    let tol = 4.0 * f64::EPSILON;
    // Only the left half; mirror the rest.
    for j in 1..=(n / 2) {
        // Chebyshev-Gauss-Lobatto initial guess, ordered left to right.
        let mut x = -(std::f64::consts::PI * j as f64 / n as f64).cos();
        for _ in 0..100 {
            let (q, dq) = q_and_dq(n, x);
            let dx = -q / dq;
            x += dx;
            if dx.abs() <= tol * x.abs().max(1.0) {
                break;
            }
        }
        nodes[j] = x;
        nodes[n - j] = -x;
    }
    if n % 2 == 0 {
        nodes[n / 2] = 0.0;
    }

    let nn = (n * np) as f64;
    for j in 0..np {
        let p = legendre(n, nodes[j]);
        weights[j] = 2.0 / (nn * p * p);
    }
    // Symmetrise weights exactly.
    for j in 0..np / 2 {
        let w = 0.5 * (weights[j] + weights[n - j]);
        weights[j] = w;
        weights[n - j] = w;
    }

    let bary = barycentric_weights(&nodes);
    Ok(QuadratureRule {
        order: n,
        nodes,
        weights,
        bary,
    })
}

fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let np = nodes.len();
    let mut w = vec![1.0; np];
    for j in 0..np {
        for i in 0..np {
            if i != j {
                w[j] *= nodes[j] - nodes[i];
            }
        }
        w[j] = 1.0 / w[j];
    }
    w
}

/// Value of the Lagrange basis function l_j at x, in barycentric form.
///
/// Hitting a node exactly returns the cardinal value bit-for-bit.
pub fn lagrange_eval(rule: &QuadratureRule, j: usize, x: f64) -> Result<f64> {
    let n = rule.order;
    if j > n {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    for (i, &xi) in rule.nodes.iter().enumerate() {
        if x == xi {
            return Ok(if i == j { 1.0 } else { 0.0 });
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, (&xi, &wi)) in rule.nodes.iter().zip(&rule.bary).enumerate() {
        let t = wi / (x - xi);
        den += t;
        if i == j {
            num = t;
        }
    }
    Ok(num / den)
}

/// Interpolate nodal values to an arbitrary point (barycentric form).
pub fn lagrange_interpolate(rule: &QuadratureRule, values: &[f64], x: f64) -> f64 {
    for (i, &xi) in rule.nodes.iter().enumerate() {
        if x == xi {
            return values[i];
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..rule.nodes.len() {
        let t = rule.bary[i] / (x - rule.nodes[i]);
        num += t * values[i];
        den += t;
    }
    num / den
}

/// Polynomial derivative matrix D_ij = l_j'(x_i), row-major.
///
/// Off-diagonal entries use the barycentric formula; the diagonal is the
/// negative row sum (compensated summation) so constants differentiate to
/// zero at round-off level even for large N.
pub fn derivative_matrix(rule: &QuadratureRule) -> Vec<f64> {
    let np = rule.order + 1;
    let mut d = vec![0.0; np * np];
    for i in 0..np {
        let mut diag = 0.0;
        let mut comp = 0.0; // Kahan compensation
        for j in 0..np {
            if i != j {
                let v = rule.bary[j] / (rule.bary[i] * (rule.nodes[i] - rule.nodes[j]));
                d[i * np + j] = v;
                let y = -v - comp;
                let t = diag + y;
                comp = (t - diag) - y;
                diag = t;
            }
        }
        d[i * np + i] = diag;
    }
    d
}

/// Assemble the SBP operator family from a quadrature rule.
pub fn build_operator_set(rule: QuadratureRule) -> OperatorSet {
    let np = rule.order + 1;
    let d = derivative_matrix(&rule);

    let mut q = vec![0.0; np * np];
    for i in 0..np {
        for j in 0..np {
            q[i * np + j] = rule.weights[i] * d[i * np + j];
        }
    }

    // Dhat = -M^{-1} Q^T
    let mut dhat = vec![0.0; np * np];
    for i in 0..np {
        for j in 0..np {
            dhat[i * np + j] = -q[j * np + i] / rule.weights[i];
        }
    }

    let mut s_diag = vec![0.0; np];
    s_diag[0] = 1.0 / rule.weights[0];
    s_diag[np - 1] = -1.0 / rule.weights[np - 1];

    OperatorSet {
        rule,
        d,
        q,
        dhat,
        s_diag,
    }
}

/// Convenience: build the full operator set for order N.
pub fn operators(n: usize) -> Result<OperatorSet> {
    Ok(build_operator_set(legendre_gauss_lobatto(n)?))
}

impl OperatorSet {
    pub fn order(&self) -> usize {
        self.rule.order
    }

    /// Number of nodes per direction, N+1.
    pub fn n_nodes(&self) -> usize {
        self.rule.order + 1
    }

    #[inline]
    pub fn d_at(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n_nodes() + j]
    }

    #[inline]
    pub fn q_at(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n_nodes() + j]
    }
}
