//! Flat key-value run configuration with INI-style sections.
//!
//! ```text
//! [run]
//! scenario = dam_break_flat
//! n = 5
//! flux = ec
//! dt = 1e-3
//! tend = 1.0
//!
//! [output]
//! dir = out
//! every = 100
//! ```
//!
//! CLI flags override file values. The canonical serialisation of a parsed
//! config parses back to an identical value.

use std::path::Path;

use crate::error::{Error, Result};
use crate::fluxes::FluxMode;
use crate::scenario::ScenarioOverrides;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub scenario: String,
    pub order: Option<usize>,
    pub flux_mode: Option<FluxMode>,
    pub dt: Option<f64>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
    pub out_dir: Option<String>,
    /// Diagnostics cadence in steps (0 = only first/last).
    pub output_every: usize,
    /// Write field dumps alongside the diagnostics.
    pub dump_fields: bool,
}

impl RunConfig {
    pub fn overrides(&self) -> ScenarioOverrides {
        ScenarioOverrides {
            order: self.order,
            flux_mode: self.flux_mode,
            dt: self.dt,
            cfl: self.cfl,
            t_end: self.t_end,
        }
    }

    /// Canonical text form; `parse` of this string reproduces the config.
    pub fn to_canonical_string(&self) -> String {
        let mut s = String::from("[run]\n");
        s.push_str(&format!("scenario = {}\n", self.scenario));
        if let Some(n) = self.order {
            s.push_str(&format!("n = {n}\n"));
        }
        if let Some(m) = self.flux_mode {
            s.push_str(&format!(
                "flux = {}\n",
                match m {
                    FluxMode::Ec => "ec",
                    FluxMode::Es => "es",
                }
            ));
        }
        if let Some(dt) = self.dt {
            s.push_str(&format!("dt = {}\n", crate::mesh_io::fmt_f64(dt)));
        }
        if let Some(cfl) = self.cfl {
            s.push_str(&format!("cfl = {}\n", crate::mesh_io::fmt_f64(cfl)));
        }
        if let Some(t) = self.t_end {
            s.push_str(&format!("tend = {}\n", crate::mesh_io::fmt_f64(t)));
        }
        s.push_str("\n[output]\n");
        if let Some(d) = &self.out_dir {
            s.push_str(&format!("dir = {d}\n"));
        }
        s.push_str(&format!("every = {}\n", self.output_every));
        s.push_str(&format!("fields = {}\n", self.dump_fields));
        s
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let mut section = String::from("run");
        for (ln0, raw) in text.lines().enumerate() {
            let ln = ln0 + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(Error::Config {
                        line: ln,
                        message: "unterminated section header".into(),
                    });
                }
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config {
                    line: ln,
                    message: format!("expected key = value, found '{line}'"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let bad = |message: String| Error::Config { line: ln, message };
            match (section.as_str(), key) {
                ("run", "scenario") => cfg.scenario = value.to_string(),
                ("run", "n") => {
                    cfg.order = Some(value.parse().map_err(|_| bad(format!("bad n '{value}'")))?)
                }
                ("run", "flux") => {
                    cfg.flux_mode = Some(value.parse::<FluxMode>().map_err(bad)?)
                }
                ("run", "dt") => {
                    cfg.dt = Some(value.parse().map_err(|_| bad(format!("bad dt '{value}'")))?)
                }
                ("run", "cfl") => {
                    cfg.cfl = Some(value.parse().map_err(|_| bad(format!("bad cfl '{value}'")))?)
                }
                ("run", "tend") => {
                    cfg.t_end =
                        Some(value.parse().map_err(|_| bad(format!("bad tend '{value}'")))?)
                }
                ("output", "dir") => cfg.out_dir = Some(value.to_string()),
                ("output", "every") => {
                    cfg.output_every =
                        value.parse().map_err(|_| bad(format!("bad every '{value}'")))?
                }
                ("output", "fields") => {
                    cfg.dump_fields =
                        value.parse().map_err(|_| bad(format!("bad fields '{value}'")))?
                }
                (sec, k) => {
                    return Err(bad(format!("unknown key '{k}' in section [{sec}]")));
                }
            }
        }
        if cfg.scenario.is_empty() {
            return Err(Error::Config {
                line: 0,
                message: "missing required key 'scenario' in [run]".into(),
            });
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
