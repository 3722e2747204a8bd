//! CSV and SVG writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use skewrot::orbit::{arc_winding, OrbitTrace};
use skewrot::{CombinedHamiltonian, PlanarPoint};

use crate::error::HarnessResult;

/// Shortest decimal text that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn ensure_parent(path: &Path) -> HarnessResult<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    Ok(())
}

/// Writes a header row and records to `path`.
pub fn write_csv<R, I>(path: &Path, header: &[&str], rows: I) -> HarnessResult<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const ORBIT_HEADER: [&str; 7] = ["step", "x", "y", "rho", "phi_unwrapped", "H_value", "substep_index"];

/// Orbit CSV: one row per recorded point, with `rho` and the unwrapped angle
/// taken about `reference`. Substeps run `1..=N` within a step; the initial
/// point is step 0, substep N.
pub fn write_orbit_csv(
    path: &Path,
    trace: &OrbitTrace,
    reference: PlanarPoint,
    hamiltonian: &CombinedHamiltonian,
) -> HarnessResult<()> {
    let nf = trace.factors();
    let mut rows: Vec<[String; 7]> = Vec::with_capacity(trace.n * nf + 1);
    let row = |step: usize, z: PlanarPoint, phi: f64, sub: usize| {
        [
            step.to_string(),
            fmt_f64(z.x),
            fmt_f64(z.y),
            fmt_f64(z.distance(reference)),
            fmt_f64(phi),
            fmt_f64(hamiltonian.value(z)),
            sub.to_string(),
        ]
    };
    let mut phi = trace.initial.angle_about(reference);
    rows.push(row(0, trace.initial, phi, nf));
    let mut z = trace.initial;
    for (k, &next) in trace.full_steps.iter().enumerate() {
        for (i, f) in trace.map.factors().iter().enumerate() {
            phi += arc_winding(f, z, reference)?;
            z = f.apply(z)?;
            if trace.half_steps.is_some() || i + 1 == nf {
                rows.push(row(k + 1, z, phi, i + 1));
            }
        }
        // resynchronise with the recorded orbit
        z = next;
    }
    write_csv(path, &ORBIT_HEADER, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dots,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    pub color: &'static str,
}

pub const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f"];

const CANVAS: f64 = 800.0;

/// Minimal SVG: frame, axes through the origin when visible, one path per
/// series. The view covers the data extents plus 5% on every side.
pub fn write_svg(path: &Path, title: &str, series: &[Series]) -> HarnessResult<()> {
    let finite = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let span = if hi > lo { hi - lo } else { 1.0 };
        (lo - 0.05 * span, hi + 0.05 * span)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let sx = |x: f64| (x - x0) / (x1 - x0) * CANVAS;
    let sy = |y: f64| (y1 - y) / (y1 - y0) * CANVAS;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    );
    let _ = writeln!(out, "<title>{}</title>", xml_escape(title));
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{c}" height="{c}" fill="white" stroke="#000" stroke-width="1"/>"##,
        c = CANVAS
    );
    if x0 < 0.0 && x1 > 0.0 {
        let _ = writeln!(out, r##"<path d="M{:.3} 0V{c}" stroke="#bbb" stroke-width="1"/>"##, sx(0.0), c = CANVAS);
    }
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(out, r##"<path d="M0 {:.3}H{c}" stroke="#bbb" stroke-width="1"/>"##, sy(0.0), c = CANVAS);
    }
    for s in series {
        let mut d = String::new();
        let mut pen_up = true;
        for &(x, y) in &s.points {
            if !(x.is_finite() && y.is_finite()) {
                pen_up = true;
                continue;
            }
            match s.style {
                Style::Dots => {
                    let _ = write!(d, "M{:.3} {:.3}h0", sx(x), sy(y));
                }
                Style::Line => {
                    let _ = write!(d, "{}{:.3} {:.3}", if pen_up { "M" } else { "L" }, sx(x), sy(y));
                    pen_up = false;
                }
            }
        }
        if d.is_empty() {
            continue;
        }
        let (width, cap) = match s.style {
            Style::Dots => (2.0, "round"),
            Style::Line => (1.0, "butt"),
        };
        let _ = writeln!(
            out,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="{width}" stroke-linecap="{cap}"/>"#,
            s.color
        );
    }
    let _ = writeln!(out, "</svg>");
    ensure_parent(path)?;
    fs::write(path, out)?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `<prefix>_<name>.<ext>`.
pub fn output_path(prefix: &Path, name: &str, ext: &str) -> PathBuf {
    let stem = prefix.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let file = if stem.is_empty() { format!("{name}.{ext}") } else { format!("{stem}_{name}.{ext}") };
    prefix.with_file_name(file)
}
