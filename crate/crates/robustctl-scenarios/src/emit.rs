//! Writers for trajectories, reports and eigenvalue tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use robustctl::control::MotorcycleGuidance;
use robustctl::models::Trajectory;
use robustctl::numerics::vector;
use robustctl::synthesis::{eig_sweep, SweepRow};
use serde::{Deserialize, Serialize};

use crate::registry::ScenarioId;
use crate::run::{motorcycle_poses, robust_design, RunReport};
use crate::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format `{other}` (expected csv, json or svg)")),
        }
    }
}

/// Scientific notation with 11 significant digits.
fn num(v: f64) -> String {
    format!("{v:.10e}")
}

/// CSV with header `t,x1..xn,u1..um` and one row per recorded sample.
pub fn csv_string(traj: &Trajectory, state_dim: usize, input_dim: usize) -> String {
    let mut out = String::from("t");
    for i in 1..=state_dim {
        let _ = write!(out, ",x{i}");
    }
    for i in 1..=input_dim {
        let _ = write!(out, ",u{i}");
    }
    out.push('\n');
    for ((t, x), u) in traj.times.iter().zip(&traj.states).zip(&traj.inputs) {
        out.push_str(&num(*t));
        for v in x.iter().chain(u.iter()) {
            out.push(',');
            out.push_str(&num(*v));
        }
        out.push('\n');
    }
    out
}

/// Trajectory facts carried next to the report in JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub samples: usize,
    pub steps_taken: usize,
    pub final_time: f64,
    pub state_dim: usize,
    pub input_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonDocument {
    pub report: RunReport,
    pub trajectory: TrajectoryMeta,
}

pub fn json_string(traj: &Trajectory, report: &RunReport) -> Result<String, ScenarioError> {
    let doc = JsonDocument {
        report: report.clone(),
        trajectory: TrajectoryMeta {
            samples: traj.times.len(),
            steps_taken: traj.steps_taken,
            final_time: traj.final_time,
            state_dim: traj.final_state.len(),
            input_dim: traj.inputs.first().map_or(0, |u| u.len()),
        },
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Reads the report back out of [`json_string`] output.
pub fn report_from_json(s: &str) -> Result<RunReport, ScenarioError> {
    Ok(serde_json::from_str::<JsonDocument>(s)?.report)
}

/// Maps data coordinates into one SVG panel.
struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Panel {
    fn new(x0: f64, y0: f64, w: f64, h: f64, xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone, equal: bool) -> Self {
        let range = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            }
        };
        let mut xr = range(&mut xs.clone());
        let mut yr = range(&mut ys.clone());
        if equal {
            let scale = ((xr.1 - xr.0) / w).max((yr.1 - yr.0) / h);
            let (cx, cy) = ((xr.0 + xr.1) / 2.0, (yr.0 + yr.1) / 2.0);
            xr = (cx - scale * w / 2.0, cx + scale * w / 2.0);
            yr = (cy - scale * h / 2.0, cy + scale * h / 2.0);
        }
        Panel { x0, y0, w, h, xr, yr }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.x0 + (x - self.xr.0) / (self.xr.1 - self.xr.0) * self.w,
            self.y0 + self.h - (y - self.yr.0) / (self.yr.1 - self.yr.0) * self.h,
        )
    }

    fn polyline(&self, out: &mut String, pts: impl Iterator<Item = (f64, f64)>, color: &str) {
        let coords: Vec<String> = pts
            .map(|(x, y)| {
                let (px, py) = self.map(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
    }

    fn frame(&self, out: &mut String, title: &str) {
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#999"/>"##,
            self.x0, self.y0, self.w, self.h
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12" font-family="sans-serif">{title}</text>"#, self.x0 + 4.0, self.y0 + 14.0);
    }
}

/// SVG plot in the scenario's natural projection: cart position and angle
/// against time for the pendulums, the x-y path with both guidance lines for
/// the motorcycle, the path and unsafe disk for the planar point.
pub fn svg_string(traj: &Trajectory, report: &RunReport) -> String {
    let (w, h) = (640.0, 480.0);
    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    out.push('\n');
    let st = &traj.states;
    let id = report.scenario;
    match id {
        ScenarioId::MotorcycleSmc => {
            let mut xs: Vec<f64> = st.iter().map(|s| s[0]).collect();
            let mut ys: Vec<f64> = st.iter().map(|s| s[1]).collect();
            let x0 = st.first().map(|s| s.iter().copied().collect::<Vec<_>>()).unwrap_or_else(|| id.defaults().x0);
            let (pi, pd) = motorcycle_poses(&x0);
            let guidance = MotorcycleGuidance::new(pi, pd, 6.0).ok();
            let mut lines = Vec::new();
            if let Some(gd) = &guidance {
                let (xm, ym) = gd.turning_point;
                lines.push([(pi.x, pi.y), (xm, ym)]);
                lines.push([(xm, ym), (pd.x, pd.y)]);
                xs.extend([pi.x, xm, pd.x]);
                ys.extend([pi.y, ym, pd.y]);
            }
            let panel = Panel::new(20.0, 20.0, w - 40.0, h - 40.0, xs.iter().copied(), ys.iter().copied(), true);
            panel.frame(&mut out, "motorcycle path (x, y)");
            for l in lines {
                panel.polyline(&mut out, l.into_iter(), "#3070c0");
            }
            panel.polyline(&mut out, st.iter().map(|s| (s[0], s[1])), "#000");
        }
        ScenarioId::Point2dCbfCase1
        | ScenarioId::Point2dCbfCase2
        | ScenarioId::Point2dClfCbfCase1
        | ScenarioId::Point2dClfCbfCase2 => {
            let (cx, cy, r) = id.unsafe_disk().unwrap_or((0.0, 0.0, 0.0));
            let xs = st.iter().map(|s| s[0]).chain([cx - r, cx + r, 0.0]);
            let ys = st.iter().map(|s| s[1]).chain([cy - r, cy + r, 0.0]);
            let panel = Panel::new(20.0, 20.0, w - 40.0, h - 40.0, xs, ys, true);
            panel.frame(&mut out, "planar point path with unsafe disk");
            let (px, py) = panel.map(cx, cy);
            let pr = r / (panel.xr.1 - panel.xr.0) * panel.w;
            let _ = writeln!(out, r##"<circle cx="{px:.2}" cy="{py:.2}" r="{pr:.2}" fill="#9de" stroke="#39c"/>"##);
            panel.polyline(&mut out, st.iter().map(|s| (s[0], s[1])), "#000");
            let (ox, oy) = panel.map(0.0, 0.0);
            let _ = writeln!(out, r#"<circle cx="{ox:.2}" cy="{oy:.2}" r="3" fill="red"/>"#);
        }
        _ => {
            // Pendulums: cart position is the second-to-last state entry.
            let n = traj.final_state.len();
            let cart = n.saturating_sub(2);
            let t = traj.times.iter().copied();
            let top = Panel::new(20.0, 20.0, w - 40.0, h / 2.0 - 30.0, t.clone(), st.iter().map(|s| s[cart]), false);
            top.frame(&mut out, "cart position vs t");
            top.polyline(&mut out, traj.times.iter().zip(st).map(|(t, s)| (*t, s[cart])), "#000");
            let bottom = Panel::new(20.0, h / 2.0 + 10.0, w - 40.0, h / 2.0 - 30.0, t, st.iter().map(|s| s[0]), false);
            bottom.frame(&mut out, "pendulum angle vs t");
            bottom.polyline(&mut out, traj.times.iter().zip(st).map(|(t, s)| (*t, s[0])), "#c03030");
        }
    }
    out.push_str("</svg>\n");
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), ScenarioError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| ScenarioError::Io { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })
}

/// Writes the run in the requested format to `path`.
pub fn emit(traj: &Trajectory, report: &RunReport, format: Format, path: &Path) -> Result<(), ScenarioError> {
    let body = match format {
        Format::Csv => csv_string(traj, traj.final_state.len(), traj.inputs.first().map_or(1, |u| u.len())),
        Format::Json => json_string(traj, report)?,
        Format::Svg => svg_string(traj, report),
    };
    write_file(path, &body)
}

/// Gain behind table 1 (robust Riccati design) or table 2 (interval
/// polynomial design).
pub fn table_gain(which: u8) -> Result<robustctl::Vector, ScenarioError> {
    match which {
        1 => Ok(robust_design(false)?.gain.k),
        2 => Ok(vector(&[-110.0, -50.0, -10.0])),
        other => Err(ScenarioError::Design(format!("no table {other}; expected 1 or 2"))),
    }
}

/// Sweep rows for `θ = −72°, −71°, …, 72°`.
pub fn table_rows(which: u8) -> Result<Vec<SweepRow>, ScenarioError> {
    let k = table_gain(which)?;
    let thetas: Vec<f64> = (-72..=72).map(|d| (d as f64).to_radians()).collect();
    Ok(eig_sweep(&k, &thetas, 1.0, 10.0)?)
}

pub fn table_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("theta_deg,re1,re2,re3\n");
    for r in rows {
        let _ = write!(out, "{}", r.theta.to_degrees().round() as i64);
        for v in &r.re {
            out.push(',');
            out.push_str(&num(*v));
        }
        out.push('\n');
    }
    out
}

/// Writes table 1 or 2 as CSV.
pub fn emit_table(which: u8, path: &Path) -> Result<(), ScenarioError> {
    write_file(path, &table_csv(&table_rows(which)?))
}
