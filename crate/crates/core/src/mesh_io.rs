//! Plain-text mesh format: sections ORDER / NODES / ELEMENTS / CURVES /
//! BOUNDARY.
//!
//! ```text
//! # comment
//! ORDER 5
//! NODES 25
//! <x> <y>                      one corner per line
//! ELEMENTS 16
//! <c1> <c2> <c3> <c4>          counterclockwise corner indices (0-based)
//! CURVES 2
//! <a> <b>                      corner pair, then ORDER+1 sample lines
//! <x> <y>
//! ...
//! BOUNDARY 8
//! <tag> <a> <b>                boundary tag for the edge (a,b)
//! periodic <a> <b> <c> <d>     periodic pairing, a maps to c and b to d
//! ```
//!
//! Straight edges are omitted from CURVES and synthesised from the corner
//! coordinates. Floats are written with 17 significant digits so a
//! write/read round trip reproduces every f64 bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{BoundaryItem, MeshInput, QuadMesh};

/// Format a float with 17 significant digits (lossless f64 round trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            iter: text.lines().enumerate(),
        }
    }

    /// Next non-empty, non-comment line with its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.iter.by_ref() {
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Some((i + 1, t));
            }
        }
        None
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::MeshFormat {
        line,
        message: message.into(),
    }
}

fn expect_section<'a>(
    lines: &mut Lines<'a>,
    name: &str,
) -> Result<(usize, usize)> {
    let (ln, text) = lines
        .next_content()
        .ok_or_else(|| parse_err(0, format!("missing {name} section")))?;
    let mut parts = text.split_whitespace();
    let head = parts.next().unwrap_or("");
    if head != name {
        return Err(parse_err(ln, format!("expected '{name}', found '{head}'")));
    }
    let count: usize = parts
        .next()
        .ok_or_else(|| parse_err(ln, format!("{name} needs a count")))?
        .parse()
        .map_err(|_| parse_err(ln, format!("bad {name} count")))?;
    Ok((ln, count))
}

fn parse_f64(ln: usize, s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| parse_err(ln, format!("bad float '{s}'")))
}

fn parse_usize(ln: usize, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| parse_err(ln, format!("bad index '{s}'")))
}

/// Parse the mesh format from a string.
pub fn parse_mesh(text: &str) -> Result<MeshInput> {
    let mut lines = Lines::new(text);
    let (_, order) = expect_section(&mut lines, "ORDER")?;
    let np = order + 1;

    let (_, n_nodes) = expect_section(&mut lines, "NODES")?;
    let mut corners = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (ln, t) = lines
            .next_content()
            .ok_or_else(|| parse_err(0, "unexpected end of file in NODES"))?;
        let mut p = t.split_whitespace();
        let x = parse_f64(ln, p.next().ok_or_else(|| parse_err(ln, "missing x"))?)?;
        let y = parse_f64(ln, p.next().ok_or_else(|| parse_err(ln, "missing y"))?)?;
        corners.push([x, y]);
    }

    let (_, n_elems) = expect_section(&mut lines, "ELEMENTS")?;
    let mut elements = Vec::with_capacity(n_elems);
    for _ in 0..n_elems {
        let (ln, t) = lines
            .next_content()
            .ok_or_else(|| parse_err(0, "unexpected end of file in ELEMENTS"))?;
        let mut p = t.split_whitespace();
        let mut c = [0usize; 4];
        for slot in &mut c {
            *slot = parse_usize(ln, p.next().ok_or_else(|| parse_err(ln, "need 4 corners"))?)?;
        }
        elements.push(c);
    }

    let (_, n_curves) = expect_section(&mut lines, "CURVES")?;
    let mut curves = Vec::with_capacity(n_curves);
    for _ in 0..n_curves {
        let (ln, t) = lines
            .next_content()
            .ok_or_else(|| parse_err(0, "unexpected end of file in CURVES"))?;
        let mut p = t.split_whitespace();
        let a = parse_usize(ln, p.next().ok_or_else(|| parse_err(ln, "missing corner a"))?)?;
        let b = parse_usize(ln, p.next().ok_or_else(|| parse_err(ln, "missing corner b"))?)?;
        let mut pts = Vec::with_capacity(np);
        for _ in 0..np {
            let (ln2, t2) = lines
                .next_content()
                .ok_or_else(|| parse_err(0, "unexpected end of file in curve samples"))?;
            let mut q = t2.split_whitespace();
            let x = parse_f64(ln2, q.next().ok_or_else(|| parse_err(ln2, "missing x"))?)?;
            let y = parse_f64(ln2, q.next().ok_or_else(|| parse_err(ln2, "missing y"))?)?;
            pts.push([x, y]);
        }
        curves.push((a, b, pts));
    }

    let (_, n_bnd) = expect_section(&mut lines, "BOUNDARY")?;
    let mut boundary = Vec::with_capacity(n_bnd);
    for _ in 0..n_bnd {
        let (ln, t) = lines
            .next_content()
            .ok_or_else(|| parse_err(0, "unexpected end of file in BOUNDARY"))?;
        let mut p = t.split_whitespace();
        let head = p.next().unwrap();
        if head == "periodic" {
            let mut v = [0usize; 4];
            for slot in &mut v {
                *slot = parse_usize(ln, p.next().ok_or_else(|| parse_err(ln, "periodic needs 4 corners"))?)?;
            }
            boundary.push(BoundaryItem::Periodic {
                a: v[0],
                b: v[1],
                c: v[2],
                d: v[3],
            });
        } else {
            let a = parse_usize(ln, p.next().ok_or_else(|| parse_err(ln, "tag needs 2 corners"))?)?;
            let b = parse_usize(ln, p.next().ok_or_else(|| parse_err(ln, "tag needs 2 corners"))?)?;
            boundary.push(BoundaryItem::Tag {
                name: head.to_string(),
                a,
                b,
            });
        }
    }

    Ok(MeshInput {
        order,
        corners,
        elements,
        curves,
        boundary,
    })
}

/// Load and validate a mesh file: connectivity, element validity (positive
/// Jacobians), and watertightness are all checked here so bad meshes fail
/// fast.
pub fn load_mesh(path: &Path) -> Result<QuadMesh> {
    let text = std::fs::read_to_string(path)?;
    let mesh = QuadMesh::build(parse_mesh(&text)?)?;
    let ops = crate::operators::operators(mesh.order)?;
    let geoms = mesh.geometries(&ops)?;
    mesh.validate_watertight(&geoms)?;
    Ok(mesh)
}

/// Serialise a mesh in the same format (17 significant digits).
pub fn mesh_to_string(mesh: &QuadMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# swe-dgsem quadrilateral mesh");
    let _ = writeln!(s, "ORDER {}", mesh.order);
    let _ = writeln!(s, "NODES {}", mesh.corners.len());
    for c in &mesh.corners {
        let _ = writeln!(s, "{} {}", fmt_f64(c[0]), fmt_f64(c[1]));
    }
    let _ = writeln!(s, "ELEMENTS {}", mesh.elements.len());
    for e in &mesh.elements {
        let _ = writeln!(s, "{} {} {} {}", e[0], e[1], e[2], e[3]);
    }
    let _ = writeln!(s, "CURVES {}", mesh.curve_records.len());
    for (a, b, pts) in &mesh.curve_records {
        let _ = writeln!(s, "{a} {b}");
        for p in pts {
            let _ = writeln!(s, "{} {}", fmt_f64(p[0]), fmt_f64(p[1]));
        }
    }
    let _ = writeln!(s, "BOUNDARY {}", mesh.boundary_records.len());
    for item in &mesh.boundary_records {
        match item {
            BoundaryItem::Tag { name, a, b } => {
                let _ = writeln!(s, "{name} {a} {b}");
            }
            BoundaryItem::Periodic { a, b, c, d } => {
                let _ = writeln!(s, "periodic {a} {b} {c} {d}");
            }
        }
    }
    s
}

/// Write a mesh file.
pub fn save_mesh(mesh: &QuadMesh, path: &Path) -> Result<()> {
    std::fs::write(path, mesh_to_string(mesh))?;
    Ok(())
}
