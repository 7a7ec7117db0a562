//! Deterministic text writers: diagnostics CSV and per-element field dumps.
//!
//! Floats are printed with 17 significant digits, so identical runs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::Result;
use crate::field::SolutionField;
use crate::mesh_io::fmt_f64;
use crate::rhs::Problem;

/// CSV header written ahead of the diagnostics rows.
pub const DIAGNOSTICS_HEADER: &str = "t,mass,momx,momy,energy,minh,l2H";

pub fn diagnostics_to_csv(records: &[DiagnosticsRecord]) -> String {
    let mut s = String::from(DIAGNOSTICS_HEADER);
    s.push('\n');
    for r in records {
        let l2 = r.l2_h.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.mass),
            fmt_f64(r.momentum_x),
            fmt_f64(r.momentum_y),
            fmt_f64(r.energy),
            fmt_f64(r.min_h),
            l2
        );
    }
    s
}

pub fn write_diagnostics(records: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, diagnostics_to_csv(records))?;
    Ok(())
}

/// Field dump: per-element blocks of nodal `x y h hu hv b` lines.
///
/// Nodes are written with the xi index outermost (i = 0..N, then j = 0..N
/// inside), matching the solver's storage order.
pub fn field_to_string(problem: &Problem, field: &SolutionField) -> String {
    let np = problem.order() + 1;
    let mut s = String::new();
    let _ = writeln!(s, "# t = {}", fmt_f64(field.time));
    let _ = writeln!(s, "# order = {} elements = {}", problem.order(), problem.mesh.n_elements());
    let _ = writeln!(s, "# columns: x y h hu hv b");
    for e in 0..problem.mesh.n_elements() {
        let geom = &problem.geoms[e];
        let _ = writeln!(s, "ELEMENT {e}");
        for i in 0..np {
            for j in 0..np {
                let m = geom.idx(i, j);
                let w = field.state(geom, e, i, j);
                let _ = writeln!(
                    s,
                    "{} {} {} {} {} {}",
                    fmt_f64(geom.x[m]),
                    fmt_f64(geom.y[m]),
                    fmt_f64(w.h),
                    fmt_f64(w.hu),
                    fmt_f64(w.hv),
                    fmt_f64(problem.cache.b[e][m]),
                );
            }
        }
    }
    s
}

pub fn write_field(problem: &Problem, field: &SolutionField, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, field_to_string(problem, field))?;
    Ok(())
}
