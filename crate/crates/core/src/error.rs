//! Error type shared across the solver.

use std::fmt;

#[derive(Debug)]
pub enum Error {
    /// Polynomial order outside the supported range (N >= 1).
    InvalidOrder(usize),
    /// Basis function index outside 0..=N.
    IndexOutOfRange { index: usize, max: usize },
    /// Water height at or below the positivity floor.
    DryState {
        h: f64,
        element: Option<usize>,
        node: Option<(usize, usize)>,
    },
    /// Non-positive Jacobian detected while building element geometry.
    InvertedElement {
        element: usize,
        node: (usize, usize),
        jacobian: f64,
    },
    /// Curve endpoints do not match the element corners they connect.
    CornerMismatch { element: usize, detail: String },
    /// Mesh file could not be parsed.
    MeshFormat { line: usize, message: String },
    /// Mesh connectivity violates the conforming-quad assumptions.
    NonConforming(String),
    /// A boundary tag appears in the mesh but not in the boundary map.
    UnknownBoundaryTag(String),
    UnknownScenario(String),
    /// Degenerate time-step request (dt <= 0 or CFL <= 0).
    InvalidTimeStep(String),
    /// NaN or infinity appeared in the solution.
    NonFinite { element: usize, node: (usize, usize) },
    Config { line: usize, message: String },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidOrder(n) => write!(f, "invalid polynomial order N = {n}; need N >= 1"),
            Error::IndexOutOfRange { index, max } => {
                write!(f, "index {index} out of range 0..={max}")
            }
            Error::DryState { h, element, node } => {
                write!(f, "dry state: h = {h:e}")?;
                if let Some(e) = element {
                    write!(f, " in element {e}")?;
                }
                if let Some((i, j)) = node {
                    write!(f, " at node ({i},{j})")?;
                }
                Ok(())
            }
            Error::InvertedElement {
                element,
                node,
                jacobian,
            } => write!(
                f,
                "inverted element {element}: J = {jacobian:e} at node ({},{})",
                node.0, node.1
            ),
            Error::CornerMismatch { element, detail } => {
                write!(f, "element {element}: boundary curves inconsistent: {detail}")
            }
            Error::MeshFormat { line, message } => {
                write!(f, "mesh parse error at line {line}: {message}")
            }
            Error::NonConforming(msg) => write!(f, "non-conforming mesh: {msg}"),
            Error::UnknownBoundaryTag(tag) => write!(f, "unknown boundary tag '{tag}'"),
            Error::UnknownScenario(name) => write!(f, "unknown scenario '{name}'"),
            Error::InvalidTimeStep(msg) => write!(f, "invalid time step request: {msg}"),
            Error::NonFinite { element, node } => write!(
                f,
                "non-finite value in element {element} at node ({},{})",
                node.0, node.1
            ),
            Error::Config { line, message } => {
                write!(f, "config parse error at line {line}: {message}")
            }
            Error::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
