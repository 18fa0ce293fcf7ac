//! Structured-text run configuration: `key = value` lines grouped under
//! bracketed sections. Unknown sections or keys are errors, and every value
//! is validated against the owning type's invariants while parsing.

use std::collections::BTreeMap;
use std::path::Path;

use crate::coeff::{form_by_name, CoeffForm};
use crate::fieldio::fmt_g17;
use crate::flow::FlowConfig;
use crate::grid::{Bc, Dim, Grid};
use crate::model::ModelParams;
use crate::profile::ProfileVariant;
use crate::region::Region;
use crate::sweep::{GridSpec, SweepConfig};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub epsilon_set: bool,
    pub grid: Option<GridSection>,
    pub region: Option<Region>,
    pub sweep: Option<SweepSection>,
    pub flow: Option<FlowSection>,
}

#[derive(Debug, Clone, Copy)]
pub struct GridSection {
    pub dim: Dim,
    pub length: [f64; 2],
    pub bc: Bc,
    pub n: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SweepSection {
    pub form: &'static dyn CoeffForm,
    pub eps_list: Vec<f64>,
    pub cells_per_width: usize,
    pub jump_resolution: usize,
    pub kink_resolution: usize,
    pub n_max: Option<usize>,
    pub rel_tol: f64,
    pub profile_variant: ProfileVariant,
    pub diag_cap: f64,
    pub snap_rel: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct FlowSection {
    pub dt_init: f64,
    pub dt_min: f64,
    pub t_end: f64,
    pub save_every: usize,
    pub safety: f64,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| cfg_err(format!("key '{key}': expected a number, got '{v}'")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| cfg_err(format!("key '{key}': expected a non-negative integer, got '{v}'")))
}

/// Splits `s` on top-level commas (commas inside parentheses stay put).
fn split_args(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Parses a shape expression: `interval(a, b)`, `disk(cx, cy, r)`,
/// `rect(x0, y0, x1, y1)`, `halfspace(axis, offset)` or
/// `union(shape, shape, ...)`.
pub fn parse_region(expr: &str) -> Result<Region> {
    let expr = expr.trim();
    let open = expr
        .find('(')
        .ok_or_else(|| cfg_err(format!("region '{expr}': expected name(args)")))?;
    if !expr.ends_with(')') {
        return Err(cfg_err(format!("region '{expr}': missing closing parenthesis")));
    }
    let name = expr[..open].trim();
    let args = split_args(&expr[open + 1..expr.len() - 1]);
    let need = |n: usize| -> Result<()> {
        if args.len() != n {
            Err(cfg_err(format!(
                "region '{name}': expected {n} arguments, got {}",
                args.len()
            )))
        } else {
            Ok(())
        }
    };
    match name {
        "interval" => {
            need(2)?;
            Ok(Region::Interval {
                a: parse_f64("interval.a", &args[0])?,
                b: parse_f64("interval.b", &args[1])?,
            })
        }
        "disk" => {
            need(3)?;
            Ok(Region::Disk {
                center: [
                    parse_f64("disk.cx", &args[0])?,
                    parse_f64("disk.cy", &args[1])?,
                ],
                radius: parse_f64("disk.r", &args[2])?,
            })
        }
        "rect" => {
            need(4)?;
            Ok(Region::Rectangle {
                min: [
                    parse_f64("rect.x0", &args[0])?,
                    parse_f64("rect.y0", &args[1])?,
                ],
                max: [
                    parse_f64("rect.x1", &args[2])?,
                    parse_f64("rect.y1", &args[3])?,
                ],
            })
        }
        "halfspace" => {
            need(2)?;
            let axis = match args[0].as_str() {
                "x" | "0" => 0,
                "y" | "1" => 1,
                other => return Err(cfg_err(format!("halfspace axis '{other}'"))),
            };
            Ok(Region::HalfSpace {
                axis,
                offset: parse_f64("halfspace.offset", &args[1])?,
            })
        }
        "union" => {
            let members: Result<Vec<Region>> = args.iter().map(|a| parse_region(a)).collect();
            Ok(Region::Union(members?))
        }
        other => Err(cfg_err(format!("unknown region shape '{other}'"))),
    }
}

fn region_expr(region: &Region) -> String {
    match region {
        Region::Interval { a, b } => format!("interval({},{})", fmt_g17(*a), fmt_g17(*b)),
        Region::Disk { center, radius } => format!(
            "disk({},{},{})",
            fmt_g17(center[0]),
            fmt_g17(center[1]),
            fmt_g17(*radius)
        ),
        Region::Rectangle { min, max } => format!(
            "rect({},{},{},{})",
            fmt_g17(min[0]),
            fmt_g17(min[1]),
            fmt_g17(max[0]),
            fmt_g17(max[1])
        ),
        Region::HalfSpace { axis, offset } => format!(
            "halfspace({},{})",
            if *axis == 0 { "x" } else { "y" },
            fmt_g17(*offset)
        ),
        Region::Union(members) => {
            let inner: Vec<String> = members.iter().map(region_expr).collect();
            format!("union({})", inner.join(","))
        }
    }
}

type Sections = BTreeMap<String, Vec<(String, String)>>;

fn parse_sections(text: &str) -> Result<Sections> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(cfg_err(format!("line {}: malformed section header", lineno + 1)));
            }
            let name = line[1..line.len() - 1].trim().to_string();
            if sections.contains_key(&name) {
                return Err(cfg_err(format!("line {}: duplicate section [{name}]", lineno + 1)));
            }
            sections.insert(name.clone(), Vec::new());
            current = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| cfg_err(format!("line {}: expected key = value", lineno + 1)))?;
        let section = current
            .clone()
            .ok_or_else(|| cfg_err(format!("line {}: key outside any section", lineno + 1)))?;
        let entries = sections.get_mut(&section).unwrap();
        let key = key.trim().to_string();
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(cfg_err(format!(
                "line {}: duplicate key '{key}' in [{section}]",
                lineno + 1
            )));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(sections)
}

impl RunConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let sections = parse_sections(text)?;
        for name in sections.keys() {
            if !["model", "grid", "region", "sweep", "flow"].contains(&name.as_str()) {
                return Err(cfg_err(format!("unknown section [{name}]")));
            }
        }

        let mut params = ModelParams::default();
        let mut epsilon_set = false;
        if let Some(entries) = sections.get("model") {
            for (k, v) in entries {
                match k.as_str() {
                    "u_minus" => params.u_minus = parse_f64(k, v)?,
                    "u_plus" => params.u_plus = parse_f64(k, v)?,
                    "gamma" => params.gamma = parse_f64(k, v)?,
                    "p" => params.p = parse_f64(k, v)?,
                    "alpha" => params.alpha = parse_f64(k, v)?,
                    "epsilon" => {
                        params.epsilon = parse_f64(k, v)?;
                        epsilon_set = true;
                    }
                    _ => return Err(cfg_err(format!("unknown key '{k}' in [model]"))),
                }
            }
        }
        params.validate()?;

        let grid = match sections.get("grid") {
            None => None,
            Some(entries) => {
                let mut dim = Dim::One;
                let mut length = [1.0, 1.0];
                let mut bc = Bc::Periodic;
                let mut n = None;
                for (k, v) in entries {
                    match k.as_str() {
                        "dim" => {
                            dim = match v.trim() {
                                "1" => Dim::One,
                                "2" => Dim::Two,
                                other => {
                                    return Err(cfg_err(format!("grid dim must be 1 or 2, got '{other}'")))
                                }
                            }
                        }
                        "length" => {
                            let l = parse_f64(k, v)?;
                            length = [l, l];
                        }
                        "bc" => {
                            bc = match v.trim() {
                                "periodic" => Bc::Periodic,
                                "neumann" => Bc::Neumann,
                                other => {
                                    return Err(cfg_err(format!(
                                        "bc must be periodic or neumann, got '{other}'"
                                    )))
                                }
                            }
                        }
                        "n" => n = Some(parse_usize(k, v)?),
                        _ => return Err(cfg_err(format!("unknown key '{k}' in [grid]"))),
                    }
                }
                if length[0] <= 0.0 {
                    return Err(cfg_err("grid length must be positive"));
                }
                if let Some(n) = n {
                    if n < 4 {
                        return Err(cfg_err("grid n must be >= 4"));
                    }
                }
                Some(GridSection { dim, length, bc, n })
            }
        };

        let region = match sections.get("region") {
            None => None,
            Some(entries) => {
                let mut region = None;
                for (k, v) in entries {
                    match k.as_str() {
                        "shape" => region = Some(parse_region(v)?),
                        _ => return Err(cfg_err(format!("unknown key '{k}' in [region]"))),
                    }
                }
                Some(region.ok_or_else(|| cfg_err("[region] needs a shape key"))?)
            }
        };

        let sweep = match sections.get("sweep") {
            None => None,
            Some(entries) => {
                let mut form: &'static dyn CoeffForm = &crate::coeff::SINGULAR_P;
                let mut eps_list = Vec::new();
                let mut cells_per_width = 8usize;
                let mut jump_resolution = 16usize;
                let mut kink_resolution = 20usize;
                let mut n_max = None;
                let mut rel_tol = 0.05;
                let mut profile_variant = ProfileVariant::default();
                let mut diag_cap = 10.0;
                let mut snap_rel = 1.0;
                for (k, v) in entries {
                    match k.as_str() {
                        "form" => {
                            form = form_by_name(v.trim()).ok_or_else(|| {
                                cfg_err(format!("unknown coefficient form '{v}'"))
                            })?
                        }
                        "eps_list" => {
                            eps_list = split_args(v)
                                .iter()
                                .map(|s| parse_f64("eps_list", s))
                                .collect::<Result<Vec<f64>>>()?;
                        }
                        "cells_per_width" => cells_per_width = parse_usize(k, v)?,
                        "jump_resolution" => jump_resolution = parse_usize(k, v)?,
                        "kink_resolution" => kink_resolution = parse_usize(k, v)?,
                        "n_max" => n_max = Some(parse_usize(k, v)?),
                        "rel_tol" => rel_tol = parse_f64(k, v)?,
                        "profile_variant" => {
                            profile_variant = ProfileVariant::by_name(v.trim()).ok_or_else(|| {
                                cfg_err(format!("unknown profile variant '{v}'"))
                            })?
                        }
                        "diag_cap" => diag_cap = parse_f64(k, v)?,
                        "snap_rel" => snap_rel = parse_f64(k, v)?,
                        _ => return Err(cfg_err(format!("unknown key '{k}' in [sweep]"))),
                    }
                }
                if eps_list.is_empty() {
                    return Err(cfg_err("[sweep] needs a non-empty eps_list"));
                }
                if eps_list.iter().any(|&e| e <= 0.0) {
                    return Err(cfg_err("eps_list entries must be positive"));
                }
                if !(rel_tol > 0.0) {
                    return Err(cfg_err("rel_tol must be positive"));
                }
                if !(diag_cap > 0.0) {
                    return Err(cfg_err("diag_cap must be positive"));
                }
                if cells_per_width == 0 || jump_resolution == 0 || kink_resolution == 0 {
                    return Err(cfg_err("resolution knobs must be positive"));
                }
                if !(snap_rel >= 0.0) {
                    return Err(cfg_err("snap_rel must be >= 0"));
                }
                form.validate(&params)?;
                Some(SweepSection {
                    form,
                    eps_list,
                    cells_per_width,
                    jump_resolution,
                    kink_resolution,
                    n_max,
                    rel_tol,
                    profile_variant,
                    diag_cap,
                    snap_rel,
                })
            }
        };

        let flow = match sections.get("flow") {
            None => None,
            Some(entries) => {
                let mut dt_init = None;
                let mut dt_min = 1e-16;
                let mut t_end = None;
                let mut save_every = 100usize;
                let mut safety = 0.9;
                for (k, v) in entries {
                    match k.as_str() {
                        "dt_init" => dt_init = Some(parse_f64(k, v)?),
                        "dt_min" => dt_min = parse_f64(k, v)?,
                        "t_end" => t_end = Some(parse_f64(k, v)?),
                        "save_every" => save_every = parse_usize(k, v)?,
                        "safety" => safety = parse_f64(k, v)?,
                        _ => return Err(cfg_err(format!("unknown key '{k}' in [flow]"))),
                    }
                }
                let dt_init = dt_init.ok_or_else(|| cfg_err("[flow] needs dt_init"))?;
                let t_end = t_end.ok_or_else(|| cfg_err("[flow] needs t_end"))?;
                let section = FlowSection {
                    dt_init,
                    dt_min,
                    t_end,
                    save_every,
                    safety,
                };
                // validate now so a bad flow config fails at parse time
                if !epsilon_set {
                    return Err(cfg_err("[flow] requires [model] epsilon"));
                }
                FlowConfig {
                    params,
                    dt_init,
                    t_end,
                    dt_min,
                    save_every,
                    safety,
                }
                .validate()?;
                Some(section)
            }
        };

        let cfg = RunConfig {
            params,
            epsilon_set,
            grid,
            region,
            sweep,
            flow,
        };
        // cross-section validation when both sides are present
        if let (Some(region), Some(grid)) = (&cfg.region, &cfg.grid) {
            let probe = cfg.build_grid_spec(grid)?.build(4)?;
            region.validate(&probe)?;
        }
        Ok(cfg)
    }

    fn build_grid_spec(&self, g: &GridSection) -> Result<GridSpec> {
        Ok(GridSpec {
            dim: g.dim,
            length: g.length,
            bc: g.bc,
        })
    }

    fn grid_section(&self) -> Result<&GridSection> {
        self.grid
            .as_ref()
            .ok_or_else(|| cfg_err("missing [grid] section"))
    }

    fn region_ref(&self) -> Result<&Region> {
        self.region
            .as_ref()
            .ok_or_else(|| cfg_err("missing [region] section"))
    }

    /// Assembles the sweep configuration; requires the grid, region and
    /// sweep sections.
    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let grid = self.grid_section()?;
        let region = self.region_ref()?.clone();
        let s = self
            .sweep
            .as_ref()
            .ok_or_else(|| cfg_err("missing [sweep] section"))?;
        let spec = self.build_grid_spec(grid)?;
        let mut cfg = SweepConfig::new(region, s.form, self.params, s.eps_list.clone(), spec);
        cfg.cells_per_width = s.cells_per_width;
        cfg.jump_resolution = s.jump_resolution;
        cfg.kink_resolution = s.kink_resolution;
        if let Some(n_max) = s.n_max {
            cfg.n_max = n_max;
        }
        cfg.profile_variant = s.profile_variant;
        cfg.diag_cap = s.diag_cap;
        cfg.snap_rel = s.snap_rel;
        Ok(cfg)
    }

    /// Assembles the flow configuration plus its grid and initial region;
    /// requires the grid (with n), region and flow sections plus a model
    /// epsilon.
    pub fn flow_setup(&self) -> Result<(FlowConfig, Grid, Region)> {
        let gs = self.grid_section()?;
        let n = gs
            .n
            .ok_or_else(|| cfg_err("[grid] needs n for flow runs"))?;
        let grid = match gs.dim {
            Dim::One => Grid::new_1d(n, gs.length[0], gs.bc)?,
            Dim::Two => Grid::new_2d([n, n], gs.length, gs.bc)?,
        };
        let region = self.region_ref()?.clone();
        let f = self
            .flow
            .as_ref()
            .ok_or_else(|| cfg_err("missing [flow] section"))?;
        if !self.epsilon_set {
            return Err(cfg_err("[flow] requires [model] epsilon"));
        }
        let cfg = FlowConfig {
            params: self.params,
            dt_init: f.dt_init,
            t_end: f.t_end,
            dt_min: f.dt_min,
            save_every: f.save_every,
            safety: f.safety,
        };
        cfg.validate()?;
        Ok((cfg, grid, region))
    }

    /// One-line echo of every resolved setting, for output-file headers.
    pub fn resolved_line(&self) -> String {
        let mut parts = vec![
            format!("model.u_minus={}", fmt_g17(self.params.u_minus)),
            format!("model.u_plus={}", fmt_g17(self.params.u_plus)),
            format!("model.gamma={}", fmt_g17(self.params.gamma)),
            format!("model.p={}", fmt_g17(self.params.p)),
            format!("model.alpha={}", fmt_g17(self.params.alpha)),
        ];
        if self.epsilon_set {
            parts.push(format!("model.epsilon={}", fmt_g17(self.params.epsilon)));
        }
        if let Some(g) = &self.grid {
            parts.push(format!(
                "grid.dim={}",
                if g.dim == Dim::One { 1 } else { 2 }
            ));
            parts.push(format!("grid.length={}", fmt_g17(g.length[0])));
            parts.push(format!("grid.bc={}", g.bc.name()));
            if let Some(n) = g.n {
                parts.push(format!("grid.n={n}"));
            }
        }
        if let Some(r) = &self.region {
            parts.push(format!("region.shape={}", region_expr(r)));
        }
        if let Some(s) = &self.sweep {
            parts.push(format!("sweep.form={}", s.form.name()));
            let eps: Vec<String> = s.eps_list.iter().map(|&e| fmt_g17(e)).collect();
            parts.push(format!("sweep.eps_list={}", eps.join(",")));
            parts.push(format!("sweep.cells_per_width={}", s.cells_per_width));
            parts.push(format!("sweep.jump_resolution={}", s.jump_resolution));
            parts.push(format!("sweep.kink_resolution={}", s.kink_resolution));
            if let Some(n_max) = s.n_max {
                parts.push(format!("sweep.n_max={n_max}"));
            }
            parts.push(format!("sweep.rel_tol={}", fmt_g17(s.rel_tol)));
            parts.push(format!("sweep.profile_variant={}", s.profile_variant.name()));
            parts.push(format!("sweep.diag_cap={}", fmt_g17(s.diag_cap)));
            parts.push(format!("sweep.snap_rel={}", fmt_g17(s.snap_rel)));
        }
        if let Some(f) = &self.flow {
            parts.push(format!("flow.dt_init={}", fmt_g17(f.dt_init)));
            parts.push(format!("flow.dt_min={}", fmt_g17(f.dt_min)));
            parts.push(format!("flow.t_end={}", fmt_g17(f.t_end)));
            parts.push(format!("flow.save_every={}", f.save_every));
            parts.push(format!("flow.safety={}", fmt_g17(f.safety)));
        }
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP_CFG: &str = "\
[model]
u_minus = -1
u_plus = 1
gamma = 1
p = 1

[grid]
dim = 1
length = 1.0
bc = periodic

[region]
shape = interval(0.25, 0.75)

[sweep]
form = singular-p
eps_list = 4e-3, 2e-3, 1e-3
rel_tol = 0.02
";

    #[test]
    fn parses_sweep_config() {
        let cfg = RunConfig::parse(SWEEP_CFG).unwrap();
        let sc = cfg.sweep_config().unwrap();
        assert_eq!(sc.eps_list, vec![4e-3, 2e-3, 1e-3]);
        assert_eq!(sc.form.name(), "singular-p");
        assert_eq!(sc.cells_per_width, 8);
        assert_eq!(cfg.sweep.as_ref().unwrap().rel_tol, 0.02);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let bad = SWEEP_CFG.replace("gamma = 1", "gama = 1");
        let err = RunConfig::parse(&bad).unwrap_err();
        assert!(err.to_string().contains("gama"), "{err}");
    }

    #[test]
    fn unknown_section_is_an_error() {
        let bad = format!("{SWEEP_CFG}\n[mystery]\nx = 1\n");
        assert!(RunConfig::parse(&bad).is_err());
    }

    #[test]
    fn invalid_numeric_rejected_at_parse_time() {
        let bad = SWEEP_CFG.replace("u_plus = 1", "u_plus = -2");
        assert!(RunConfig::parse(&bad).is_err());
        let bad = SWEEP_CFG.replace("eps_list = 4e-3, 2e-3, 1e-3", "eps_list = 4e-3, -2e-3");
        assert!(RunConfig::parse(&bad).is_err());
    }

    #[test]
    fn region_expressions() {
        let r = parse_region("union(interval(0.1, 0.2), interval(0.5, 0.9))").unwrap();
        match &r {
            Region::Union(m) => assert_eq!(m.len(), 2),
            _ => panic!("expected union"),
        }
        assert!(parse_region("blob(1,2)").is_err());
        assert!(parse_region("disk(0.5, 0.5)").is_err());
        let d = parse_region("disk(0.5, 0.5, 0.2)").unwrap();
        assert_eq!(
            d,
            Region::Disk {
                center: [0.5, 0.5],
                radius: 0.2
            }
        );
    }

    #[test]
    fn flow_rejects_zero_alpha_at_parse_time() {
        let text = "\
[model]
epsilon = 0.05
alpha = 0.0

[grid]
dim = 1
length = 1.0
bc = periodic
n = 64

[region]
shape = interval(0.2, 0.8)

[flow]
dt_init = 1e-4
t_end = 0.1
";
        let err = RunConfig::parse(text).unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
    }

    #[test]
    fn flow_requires_epsilon() {
        let text = "\
[grid]
dim = 1
length = 1.0
bc = periodic
n = 64

[region]
shape = interval(0.2, 0.8)

[flow]
dt_init = 1e-4
t_end = 0.1
";
        assert!(RunConfig::parse(text).is_err());
    }

    #[test]
    fn region_grid_cross_validation_at_parse() {
        let bad = SWEEP_CFG.replace("interval(0.25, 0.75)", "disk(0.5, 0.5, 0.2)");
        assert!(RunConfig::parse(&bad).is_err()); // 2D shape on a 1D grid
    }

    #[test]
    fn resolved_line_round_trips_values() {
        let cfg = RunConfig::parse(SWEEP_CFG).unwrap();
        let line = cfg.resolved_line();
        assert!(line.contains("sweep.form=singular-p"));
        assert!(line.contains("region.shape=interval(0.25,0.75)"));
    }
}
