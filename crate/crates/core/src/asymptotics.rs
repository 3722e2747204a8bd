//! Numerical checks of the asymptotic structure of skew-rotation products
//! near infinity: correction orders in a foreign inverse-polar frame,
//! concordance of frames, area preservation and the intersection property.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::maps::{wrap_pi, InversePolarFrame, MapProduct, PlanarPoint};
use crate::stats::fit_line;

/// Residuals below this are treated as roundoff and excluded from fits.
pub const RESIDUAL_NOISE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSample {
    pub r: f64,
    pub phi: f64,
    /// `(phi_1 - phi) - (sum h) r`, with the angle difference unwrapped.
    pub angle_residual: f64,
    /// `r_1 - r`.
    pub radius_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualKind {
    Angle,
    Radius,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_range: (f64, f64),
    pub n_samples: usize,
}

/// Pushes each `(r, phi)` pair through `prod` and measures how far the
/// image departs from the pure skew rotation `phi + (sum h) r, r`.
pub fn sample_residuals(
    prod: &MapProduct,
    frame: &InversePolarFrame,
    rs: &[f64],
    phis: &[f64],
) -> Result<Vec<ResidualSample>> {
    if rs.len() != phis.len() {
        return Err(Error::InvalidParameter(format!(
            "{} radii but {} angles",
            rs.len(),
            phis.len()
        )));
    }
    let h = prod.angular_sum();
    rs.iter()
        .zip(phis)
        .map(|(&r, &phi)| {
            let z = frame.from_inverse_polar(r, phi)?;
            let (r1, phi1) = frame.to_inverse_polar(prod.apply(z)?)?;
            let predicted = h * r;
            // pick the branch of phi1 - phi closest to the first-order advance
            let dphi = predicted + wrap_pi(phi1 - phi - predicted);
            Ok(ResidualSample {
                r,
                phi,
                angle_residual: dphi - predicted,
                radius_residual: r1 - r,
            })
        })
        .collect()
}

/// Log-log least squares slope of `|residual|` against `r`.
pub fn fit_order(samples: &[ResidualSample], which: ResidualKind) -> Result<OrderFit> {
    let pairs: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| {
            let v = match which {
                ResidualKind::Angle => s.angle_residual,
                ResidualKind::Radius => s.radius_residual,
            };
            (s.r, v.abs())
        })
        .collect();
    fit_log_log(&pairs)
}

/// Like [`fit_order`], but on the largest `|residual|` at each distinct radius,
/// so that angles where the residual happens to change sign do not bend the fit.
pub fn fit_order_envelope(samples: &[ResidualSample], which: ResidualKind) -> Result<OrderFit> {
    let mut worst: Vec<(f64, f64)> = Vec::new();
    for s in samples {
        let v = match which {
            ResidualKind::Angle => s.angle_residual,
            ResidualKind::Radius => s.radius_residual,
        }
        .abs();
        match worst.iter_mut().find(|w| w.0 == s.r) {
            Some(w) => w.1 = w.1.max(v),
            None => worst.push((s.r, v)),
        }
    }
    fit_log_log(&worst)
}

/// Fits `ln y = slope ln x + intercept` over pairs with `y` above the noise floor.
pub fn fit_log_log(pairs: &[(f64, f64)]) -> Result<OrderFit> {
    let usable: Vec<(f64, f64)> = pairs
        .iter()
        .copied()
        .filter(|&(x, y)| x > 0.0 && y >= RESIDUAL_NOISE_FLOOR && y.is_finite())
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} samples above the {RESIDUAL_NOISE_FLOOR:e} noise floor",
            usable.len()
        )));
    }
    let xs: Vec<f64> = usable.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|p| p.1.ln()).collect();
    let fit = fit_line(&xs, &ys)
        .ok_or_else(|| Error::InsufficientData("all samples share one radius".into()))?;
    let lo = usable.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = usable.iter().map(|p| p.0).fold(0.0, f64::max);
    Ok(OrderFit { slope: fit.slope, intercept: fit.intercept, r_range: (lo, hi), n_samples: usable.len() })
}

/// `n` values spaced geometrically from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Polar grid of points with radius in `[rho_min, rho_max]` about `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusGrid {
    pub center: PlanarPoint,
    pub rho_min: f64,
    pub rho_max: f64,
    pub n_rho: usize,
    pub n_phi: usize,
}

impl AnnulusGrid {
    pub fn points(&self) -> Vec<PlanarPoint> {
        let mut out = Vec::with_capacity(self.n_rho * self.n_phi);
        for i in 0..self.n_rho {
            let t = if self.n_rho == 1 { 0.0 } else { i as f64 / (self.n_rho - 1) as f64 };
            let rho = self.rho_min + (self.rho_max - self.rho_min) * t;
            for k in 0..self.n_phi {
                // offset keeps grid points off the symmetry axis through the centers
                let phi = (k as f64 + 0.37) * TAU / self.n_phi as f64;
                out.push(PlanarPoint::new(
                    self.center.x + rho * phi.cos(),
                    self.center.y + rho * phi.sin(),
                ));
            }
        }
        out
    }
}

/// Central-difference Jacobian determinant of `prod` at `z` with step `step`.
pub fn jacobian_det(prod: &MapProduct, z: PlanarPoint, step: f64) -> Result<f64> {
    let px = prod.apply(PlanarPoint::new(z.x + step, z.y))?;
    let mx = prod.apply(PlanarPoint::new(z.x - step, z.y))?;
    let py = prod.apply(PlanarPoint::new(z.x, z.y + step))?;
    let my = prod.apply(PlanarPoint::new(z.x, z.y - step))?;
    let two = 2.0 * step;
    let (a, c) = ((px.x - mx.x) / two, (px.y - mx.y) / two);
    let (b, d) = ((py.x - my.x) / two, (py.y - my.y) / two);
    Ok(a * d - b * c)
}

/// Maximum of `|det J - 1|` over the grid.
pub fn check_area_preservation(prod: &MapProduct, grid: &AnnulusGrid, fd_step: f64) -> Result<f64> {
    if !(fd_step > 0.0) {
        return Err(Error::InvalidParameter(format!("fd_step must be positive, got {fd_step}")));
    }
    let margin = 10.0 * fd_step;
    let mut worst: f64 = 0.0;
    for z in grid.points() {
        if let Some(f) = prod.factors().iter().find(|f| z.distance(f.center) < margin) {
            return Err(Error::DegenerateCenter { point: z, center: f.center });
        }
        worst = worst.max((jacobian_det(prod, z, fd_step)? - 1.0).abs());
    }
    Ok(worst)
}

/// A simple closed polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    vertices: Vec<PlanarPoint>,
}

impl ClosedCurve {
    pub const MIN_VERTICES: usize = 16;

    pub fn new(vertices: Vec<PlanarPoint>) -> Result<Self> {
        if vertices.len() < Self::MIN_VERTICES {
            return Err(Error::InvalidParameter(format!(
                "closed curve needs at least {} vertices, got {}",
                Self::MIN_VERTICES,
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite curve vertex".into()));
        }
        if !is_simple(&vertices) {
            return Err(Error::InvalidParameter("curve is self-intersecting".into()));
        }
        Ok(Self { vertices })
    }

    pub fn circle(center: PlanarPoint, radius: f64, n: usize) -> Result<Self> {
        let pts = (0..n)
            .map(|k| {
                let t = k as f64 * TAU / n as f64;
                PlanarPoint::new(center.x + radius * t.cos(), center.y + radius * t.sin())
            })
            .collect();
        Self::new(pts)
    }

    pub fn vertices(&self) -> &[PlanarPoint] {
        &self.vertices
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(v[i].distance(v[j]));
            }
        }
        d
    }

    /// Crossing-number test; points on the boundary may go either way.
    pub fn contains(&self, p: PlanarPoint) -> bool {
        point_in_polygon(&self.vertices, p)
    }
}

fn point_in_polygon(poly: &[PlanarPoint], p: PlanarPoint) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn orient(a: PlanarPoint, b: PlanarPoint, c: PlanarPoint) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: PlanarPoint, b: PlanarPoint, p: PlanarPoint) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection, touching and collinear overlap included.
pub fn segments_intersect(p1: PlanarPoint, p2: PlanarPoint, q1: PlanarPoint, q2: PlanarPoint) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn is_simple(v: &[PlanarPoint]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a1, a2) = (v[i], v[(i + 1) % n]);
        for j in i + 1..n {
            // adjacent edges share a vertex
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(a1, a2, v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

fn polygons_intersect(a: &[PlanarPoint], b: &[PlanarPoint]) -> bool {
    let bbox = |p: PlanarPoint, q: PlanarPoint| (p.x.min(q.x), p.x.max(q.x), p.y.min(q.y), p.y.max(q.y));
    let nb = b.len();
    let b_boxes: Vec<_> = (0..nb).map(|j| bbox(b[j], b[(j + 1) % nb])).collect();
    let na = a.len();
    for i in 0..na {
        let (p1, p2) = (a[i], a[(i + 1) % na]);
        let (x0, x1, y0, y1) = bbox(p1, p2);
        for (j, &(u0, u1, v0, v1)) in b_boxes.iter().enumerate() {
            if u1 < x0 || u0 > x1 || v1 < y0 || v0 > y1 {
                continue;
            }
            if segments_intersect(p1, p2, b[j], b[(j + 1) % nb]) {
                return true;
            }
        }
    }
    false
}

/// Vertex cap for adaptive refinement of the image polygon.
pub const REFINEMENT_LIMIT: usize = 1 << 20;

/// Does `prod(curve)` meet `curve`?
///
/// The curve is refined until consecutive image vertices are closer than 1%
/// of the curve diameter. The answer is yes when the image has vertices on
/// both sides of the curve, or when some pair of edges intersects.
pub fn check_intersection_property(prod: &MapProduct, curve: &ClosedCurve) -> Result<bool> {
    let tol = 0.01 * curve.diameter();
    let mut src: Vec<PlanarPoint> = curve.vertices().to_vec();
    let mut img: Vec<PlanarPoint> = src.iter().map(|&z| prod.apply(z)).collect::<Result<_>>()?;
    loop {
        let n = src.len();
        let coarse: Vec<usize> = (0..n).filter(|&i| img[i].distance(img[(i + 1) % n]) > tol).collect();
        if coarse.is_empty() {
            break;
        }
        if n + coarse.len() > REFINEMENT_LIMIT {
            return Err(Error::RefinementLimit { limit: REFINEMENT_LIMIT });
        }
        let mut next_src = Vec::with_capacity(n + coarse.len());
        let mut next_img = Vec::with_capacity(n + coarse.len());
        let mut ci = coarse.iter().peekable();
        for i in 0..n {
            next_src.push(src[i]);
            next_img.push(img[i]);
            if ci.peek() == Some(&&i) {
                ci.next();
                let (a, b) = (src[i], src[(i + 1) % n]);
                let mid = PlanarPoint::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
                next_src.push(mid);
                next_img.push(prod.apply(mid)?);
            }
        }
        src = next_src;
        img = next_img;
    }
    let poly = curve.vertices();
    let mut seen_inside = false;
    let mut seen_outside = false;
    for &w in &img {
        if point_in_polygon(poly, w) {
            seen_inside = true;
        } else {
            seen_outside = true;
        }
        if seen_inside && seen_outside {
            return Ok(true);
        }
    }
    Ok(polygons_intersect(&img, poly))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcordanceRow {
    pub r: f64,
    /// max over sampled angles of `|d phi~ / d phi - 1|`
    pub dphi_dphi_dev: f64,
    /// max over sampled angles of `|d r~ / d r - 1|`
    pub dr_dr_dev: f64,
    /// max over sampled angles of `|d r~ / d phi|`
    pub dr_dphi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcordanceReport {
    pub rows: Vec<ConcordanceRow>,
    pub dphi_dphi_order: Option<OrderFit>,
    pub dr_dr_order: Option<OrderFit>,
    pub dr_dphi_order: Option<OrderFit>,
}

impl ConcordanceReport {
    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.dphi_dphi_dev.max(r.dr_dr_dev).max(r.dr_dphi))
            .fold(0.0, f64::max)
    }
}

pub const CONCORDANCE_ANGLES: usize = 16;
pub const CONCORDANCE_REL_STEP: f64 = 1e-5;

/// Estimates the partial derivatives of the change of frame
/// `(r, phi)_A -> (r~, phi~)_B` by central differences and reports how far
/// they are from `(1, 1, 0)` at each radius.
pub fn check_concordance(
    frame_a: &InversePolarFrame,
    frame_b: &InversePolarFrame,
    rs: &[f64],
) -> Result<ConcordanceReport> {
    if rs.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidParameter("concordance radii must be positive".into()));
    }
    let to_b = |r: f64, phi: f64| -> Result<(f64, f64)> {
        frame_b.to_inverse_polar(frame_a.from_inverse_polar(r, phi)?)
    };
    let mut rows = Vec::with_capacity(rs.len());
    for &r in rs {
        let dr = CONCORDANCE_REL_STEP * r;
        let dphi = CONCORDANCE_REL_STEP;
        let mut row = ConcordanceRow { r, dphi_dphi_dev: 0.0, dr_dr_dev: 0.0, dr_dphi: 0.0 };
        for k in 0..CONCORDANCE_ANGLES {
            let phi = 0.1 + k as f64 * TAU / CONCORDANCE_ANGLES as f64;
            let (rp, pp) = to_b(r, phi + dphi)?;
            let (rm, pm) = to_b(r, phi - dphi)?;
            let (rr_p, _) = to_b(r + dr, phi)?;
            let (rr_m, _) = to_b(r - dr, phi)?;
            let dphit_dphi = wrap_pi(pp - pm) / (2.0 * dphi);
            let drt_dphi = (rp - rm) / (2.0 * dphi);
            let drt_dr = (rr_p - rr_m) / (2.0 * dr);
            row.dphi_dphi_dev = row.dphi_dphi_dev.max((dphit_dphi - 1.0).abs());
            row.dr_dr_dev = row.dr_dr_dev.max((drt_dr - 1.0).abs());
            row.dr_dphi = row.dr_dphi.max(drt_dphi.abs());
        }
        rows.push(row);
    }
    let fit = |f: fn(&ConcordanceRow) -> f64| {
        let pairs: Vec<(f64, f64)> = rows.iter().map(|row| (row.r, f(row))).collect();
        fit_log_log(&pairs).ok()
    };
    Ok(ConcordanceReport {
        dphi_dphi_order: fit(|row| row.dphi_dphi_dev),
        dr_dr_order: fit(|row| row.dr_dr_dev),
        dr_dphi_order: fit(|row| row.dr_dphi),
        rows,
    })
}
