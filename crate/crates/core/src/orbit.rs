//! Long orbits of skew-rotation products and the statistics computed on them.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::maps::{wrap_pi, CombinedHamiltonian, MapProduct, PlanarPoint, SkewRotationMap};
use crate::stats::{batch_means, fit_line};

/// A recorded orbit `T(z0), T^2(z0), ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub map: MapProduct,
    pub initial: PlanarPoint,
    /// `full_steps[k] = T^{k+1}(initial)`.
    pub full_steps: Vec<PlanarPoint>,
    /// Every factor image, `n * map.len()` points; the last image of each
    /// step equals the corresponding full step.
    pub half_steps: Option<Vec<PlanarPoint>>,
    pub n: usize,
}

impl OrbitTrace {
    pub fn factors(&self) -> usize {
        self.map.len()
    }

    /// The image before `half_steps[i]`, i.e. the start of the arc that ends there.
    fn arc_start(&self, half: &[PlanarPoint], i: usize) -> PlanarPoint {
        if i == 0 {
            self.initial
        } else {
            half[i - 1]
        }
    }

    /// Arcs `(factor, start, end)` in traversal order. Needs half-steps.
    pub fn arcs(&self) -> Option<impl Iterator<Item = (&SkewRotationMap, PlanarPoint, PlanarPoint)> + '_> {
        let half = self.half_steps.as_deref()?;
        let n = self.factors();
        Some((0..half.len()).map(move |i| (&self.map.factors()[i % n], self.arc_start(half, i), half[i])))
    }
}

pub fn iterate_orbit(
    prod: &MapProduct,
    z0: PlanarPoint,
    n: usize,
    record_half_steps: bool,
) -> Result<OrbitTrace> {
    if n == 0 {
        return Err(Error::InvalidParameter("orbit length must be at least 1".into()));
    }
    if !z0.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite initial point {z0}")));
    }
    let mut full = Vec::with_capacity(n);
    let mut half = record_half_steps.then(|| Vec::with_capacity(n * prod.len()));
    let mut z = z0;
    for step in 0..n {
        z = match half.as_mut() {
            Some(h) => prod.apply_visiting(z, |_, p| h.push(p)),
            None => prod.apply(z),
        }
        .map_err(|e| match e {
            Error::DegenerateFactor { factor, .. } => Error::DegenerateAtStep { step, factor },
            other => other,
        })?;
        full.push(z);
    }
    Ok(OrbitTrace { map: prod.clone(), initial: z0, full_steps: full, half_steps: half, n })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusEstimate {
    pub center: PlanarPoint,
    pub rho_min: f64,
    pub rho_max: f64,
    pub n: usize,
}

pub fn radial_bounds(trace: &OrbitTrace, center: PlanarPoint) -> AnnulusEstimate {
    let (lo, hi) = trace
        .full_steps
        .iter()
        .map(|z| z.distance(center))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
    AnnulusEstimate { center, rho_min: lo, rho_max: hi, n: trace.full_steps.len() }
}

/// Streaming radial bounds for orbits too long to store.
pub fn radial_bounds_streaming(
    prod: &MapProduct,
    z0: PlanarPoint,
    center: PlanarPoint,
    checkpoints: &[usize],
) -> Result<Vec<AnnulusEstimate>> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let last = checkpoints.iter().copied().max().unwrap_or(0);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut z = z0;
    for step in 1..=last {
        z = prod.apply(z).map_err(|e| match e {
            Error::DegenerateFactor { factor, .. } => Error::DegenerateAtStep { step: step - 1, factor },
            other => other,
        })?;
        let d = z.distance(center);
        lo = lo.min(d);
        hi = hi.max(d);
        if checkpoints.contains(&step) {
            out.push(AnnulusEstimate { center, rho_min: lo, rho_max: hi, n: step });
        }
    }
    Ok(out)
}

/// Curve separating the two sides that an escaping orbit alternates between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Separatrix {
    /// The line `x = 0`.
    ImaginaryAxis,
    /// The level set `|z + 1| - |z - 1| = c`, a hyperbola branch with foci `(+-1, 0)`.
    Hyperbola { c: f64 },
}

impl Separatrix {
    /// The hyperbola branch through `z`.
    pub fn hyperbola_through(z: PlanarPoint) -> Self {
        Separatrix::Hyperbola { c: hyperbola_level(z) }
    }

    fn level(&self, z: PlanarPoint) -> f64 {
        match *self {
            Separatrix::ImaginaryAxis => z.x,
            Separatrix::Hyperbola { c } => hyperbola_level(z) - c,
        }
    }
}

fn hyperbola_level(z: PlanarPoint) -> f64 {
    z.distance(PlanarPoint::new(-1.0, 0.0)) - z.distance(PlanarPoint::new(1.0, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisCrossing {
    pub step: usize,
    pub y_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeReport {
    pub escaped: bool,
    pub first_exit_step: Option<usize>,
    pub axis_crossings: Vec<AxisCrossing>,
    /// Fraction of consecutive crossings with increasing ordinate.
    pub monotone_fraction: f64,
    pub steps: usize,
}

/// Intersections of a circular arc with the separatrix, in traversal order.
///
/// The arc starts at `start` and turns about `center` by the signed angle `sweep`.
pub fn arc_crossings(center: PlanarPoint, start: PlanarPoint, sweep: f64, sep: Separatrix) -> Vec<PlanarPoint> {
    let rho = start.distance(center);
    let theta0 = start.angle_about(center);
    let at = |t: f64| PlanarPoint::new(center.x + rho * (theta0 + t).cos(), center.y + rho * (theta0 + t).sin());
    let mut params: Vec<f64> = Vec::new();
    match sep {
        Separatrix::ImaginaryAxis => {
            // center.x + rho cos(theta) = 0
            let c = -center.x / rho;
            if c.abs() <= 1.0 {
                let base = c.acos();
                let (lo, hi) = if sweep >= 0.0 { (0.0, sweep) } else { (sweep, 0.0) };
                for root in [base, -base] {
                    // all theta0 + t == root (mod 2 pi) with t in the swept range
                    let t0 = root - theta0;
                    let k_lo = ((lo - t0) / (2.0 * PI)).ceil() as i64;
                    let k_hi = ((hi - t0) / (2.0 * PI)).floor() as i64;
                    for k in k_lo..=k_hi {
                        let t = t0 + 2.0 * PI * k as f64;
                        if t > lo && t <= hi || (t == lo && sweep < 0.0) {
                            params.push(t);
                        }
                    }
                    if base == 0.0 || base == PI {
                        break;
                    }
                }
            }
        }
        Separatrix::Hyperbola { .. } => {
            let pieces = ((sweep.abs() / (PI / 32.0)).ceil() as usize).max(8);
            let g = |t: f64| sep.level(at(t));
            let mut t_prev = 0.0;
            let mut g_prev = g(0.0);
            for i in 1..=pieces {
                let t = sweep * i as f64 / pieces as f64;
                let gt = g(t);
                if g_prev == 0.0 && i > 1 {
                    params.push(t_prev);
                } else if (g_prev < 0.0) != (gt < 0.0) && gt != 0.0 {
                    let (mut a, mut b, mut ga) = (t_prev, t, g_prev);
                    for _ in 0..200 {
                        let m = 0.5 * (a + b);
                        if m == a || m == b {
                            break;
                        }
                        let gm = g(m);
                        if (gm < 0.0) == (ga < 0.0) {
                            a = m;
                            ga = gm;
                        } else {
                            b = m;
                        }
                    }
                    params.push(0.5 * (a + b));
                }
                t_prev = t;
                g_prev = gt;
            }
            if g_prev == 0.0 {
                params.push(t_prev);
            }
        }
    }
    params.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    params.into_iter().map(at).collect()
}

/// Incremental escape detection, fed one arc at a time.
#[derive(Debug, Clone)]
pub struct EscapeTracker {
    r_escape: f64,
    separatrix: Separatrix,
    crossings: Vec<AxisCrossing>,
    first_exit: Option<usize>,
    steps: usize,
}

impl EscapeTracker {
    pub fn new(r_escape: f64, separatrix: Separatrix) -> Self {
        Self { r_escape, separatrix, crossings: Vec::new(), first_exit: None, steps: 0 }
    }

    pub fn push_arc(&mut self, step: usize, factor: &SkewRotationMap, start: PlanarPoint) -> Result<()> {
        let sweep = factor.angle_at(start)?;
        for p in arc_crossings(factor.center, start, sweep, self.separatrix) {
            self.crossings.push(AxisCrossing { step, y_star: p.y });
        }
        Ok(())
    }

    pub fn push_full_step(&mut self, step: usize, z: PlanarPoint) {
        self.steps = self.steps.max(step + 1);
        if self.first_exit.is_none() && z.norm() >= self.r_escape {
            self.first_exit = Some(step);
        }
    }

    pub fn escaped(&self) -> bool {
        self.first_exit.is_some()
    }

    pub fn finish(self) -> Result<EscapeReport> {
        if self.crossings.is_empty() {
            return Err(Error::NoCrossings);
        }
        let pairs = self.crossings.len() - 1;
        let up = self.crossings.windows(2).filter(|w| w[1].y_star > w[0].y_star).count();
        let monotone_fraction = if pairs == 0 { 1.0 } else { up as f64 / pairs as f64 };
        Ok(EscapeReport {
            escaped: self.first_exit.is_some(),
            first_exit_step: self.first_exit,
            axis_crossings: self.crossings,
            monotone_fraction,
            steps: self.steps,
        })
    }
}

/// Escape statistics of a recorded trace (half-steps required).
pub fn detect_escape(trace: &OrbitTrace, r_escape: f64, separatrix: Separatrix) -> Result<EscapeReport> {
    let half = trace
        .half_steps
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("escape detection needs half-steps".into()))?;
    let nf = trace.factors();
    let mut tracker = EscapeTracker::new(r_escape, separatrix);
    for (i, (factor, start, _)) in trace.arcs().into_iter().flatten().enumerate() {
        tracker.push_arc(i / nf, factor, start)?;
    }
    for (k, z) in trace.full_steps.iter().enumerate() {
        tracker.push_full_step(k, *z);
    }
    debug_assert_eq!(half.len(), trace.n * nf);
    tracker.finish()
}

/// Iterates without storing the orbit, stopping at the first escape.
pub fn track_escape(
    prod: &MapProduct,
    z0: PlanarPoint,
    max_steps: usize,
    r_escape: f64,
    separatrix: Separatrix,
) -> Result<EscapeReport> {
    let mut tracker = EscapeTracker::new(r_escape, separatrix);
    let mut z = z0;
    for step in 0..max_steps {
        for (i, f) in prod.factors().iter().enumerate() {
            tracker
                .push_arc(step, f, z)
                .map_err(|_| Error::DegenerateAtStep { step, factor: i })?;
            z = f.apply(z).map_err(|_| Error::DegenerateAtStep { step, factor: i })?;
        }
        tracker.push_full_step(step, z);
        if tracker.escaped() {
            break;
        }
    }
    tracker.finish()
}

/// Start point for the escaping orbit of `R_{(-1,0),h} . R_{(1,0),-h}`:
/// the first arc, about `(-1, 0)`, has its midpoint at `(0, y_star)`.
pub fn escape_initial_point(h: f64, y_star: f64) -> PlanarPoint {
    let f1 = PlanarPoint::new(-1.0, 0.0);
    let mid = PlanarPoint::new(0.0, y_star);
    let half_angle = 0.5 * h / mid.distance(f1);
    mid.rotated_about(f1, -half_angle)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationNumberEstimate {
    pub value: f64,
    pub stderr: f64,
}

/// Unwrapped change of `arg(z - reference)` along the arc of `factor` from `start`.
pub fn arc_winding(factor: &SkewRotationMap, start: PlanarPoint, reference: PlanarPoint) -> Result<f64> {
    let sweep = factor.angle_at(start)?;
    if factor.center == reference {
        return Ok(sweep);
    }
    let pieces = ((sweep.abs() / (PI / 16.0)).ceil() as usize).max(1);
    let mut total = 0.0;
    let mut prev = start;
    for i in 1..=pieces {
        let p = start.rotated_about(factor.center, sweep * i as f64 / pieces as f64);
        total += wrap_pi(p.angle_about(reference) - prev.angle_about(reference));
        prev = p;
    }
    Ok(total)
}

/// Unwrapped angular advance about `center` for every step of the trace.
pub fn angular_increments(trace: &OrbitTrace, center: PlanarPoint) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(trace.full_steps.len());
    let mut z = trace.initial;
    for &next in &trace.full_steps {
        let mut step = 0.0;
        let mut p = z;
        for f in trace.map.factors() {
            step += arc_winding(f, p, center)?;
            p = f.apply(p)?;
        }
        out.push(step);
        z = next;
    }
    Ok(out)
}

/// Mean winding per step about `center`, with a 10-batch standard error.
pub fn rotation_number(trace: &OrbitTrace, center: PlanarPoint) -> Result<RotationNumberEstimate> {
    if trace.full_steps.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "rotation number needs at least 100 steps, got {}",
            trace.full_steps.len()
        )));
    }
    let mut radii = trace.full_steps.iter().map(|z| z.distance(center));
    let first = radii.next().unwrap_or(0.0);
    let (lo, hi) = radii.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d)));
    let ratio = hi / lo;
    if !(ratio <= 10.0) {
        return Err(Error::UnboundedOrbit { ratio });
    }
    let inc = angular_increments(trace, center)?;
    let (value, stderr) = batch_means(&inc, 10);
    Ok(RotationNumberEstimate { value, stderr })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OvalSide {
    Above,
    Below,
    On,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OvalSides {
    /// Side of every recorded factor image, in traversal order.
    pub sides: Vec<OvalSide>,
    /// Fraction of consecutive images on opposite sides.
    pub alternation_fraction: f64,
}

fn side_of(v: f64, c: f64) -> OvalSide {
    if v > c {
        OvalSide::Above
    } else if v < c {
        OvalSide::Below
    } else {
        OvalSide::On
    }
}

/// Classifies the factor images of a trace against the oval `H = c`.
///
/// Consecutive images are the endpoints of one rotation arc, so an
/// alternation fraction of one means every arc crosses the oval.
pub fn oval_side_sequence(trace: &OrbitTrace, hamiltonian: &CombinedHamiltonian, c: f64) -> Result<OvalSides> {
    let half = trace
        .half_steps
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("oval sides need half-steps".into()))?;
    let sides: Vec<OvalSide> = half.iter().map(|&z| side_of(hamiltonian.value(z), c)).collect();
    let pairs = sides.len().saturating_sub(1);
    let flips = sides
        .windows(2)
        .filter(|w| matches!((w[0], w[1]), (OvalSide::Above, OvalSide::Below) | (OvalSide::Below, OvalSide::Above)))
        .count();
    let alternation_fraction = if pairs == 0 { 0.0 } else { flips as f64 / pairs as f64 };
    Ok(OvalSides { sides, alternation_fraction })
}

/// Level `c` maximising the alternation fraction of consecutive factor images.
///
/// A consecutive pair alternates exactly when `c` lies strictly between its
/// two H-values, so the optimum is found by sweeping the interval endpoints.
pub fn separating_level(trace: &OrbitTrace, hamiltonian: &CombinedHamiltonian) -> Result<f64> {
    let half = trace
        .half_steps
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("oval sides need half-steps".into()))?;
    let values: Vec<f64> = half.iter().map(|&z| hamiltonian.value(z)).collect();
    if values.len() < 2 {
        return Err(Error::InsufficientData("need at least two factor images".into()));
    }
    // (value, +1 opens an interval / -1 closes one); closings sort first on ties
    let mut events: Vec<(f64, i32)> = values
        .windows(2)
        .filter(|w| w[0] != w[1])
        .flat_map(|w| [(w[0].min(w[1]), 1), (w[0].max(w[1]), -1)])
        .collect();
    if events.is_empty() {
        return Ok(values[0]);
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (mut depth, mut best, mut best_c) = (0i32, -1i32, events[0].0);
    for i in 0..events.len() - 1 {
        depth += events[i].1;
        if depth > best && events[i + 1].0 > events[i].0 {
            best = depth;
            best_c = 0.5 * (events[i].0 + events[i + 1].0);
        }
    }
    Ok(best_c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub exponent: f64,
    pub r_squared: f64,
}

pub const MIN_GROWTH_SAMPLES: usize = 1000;

/// Power-law exponent of `distances[i]` against the step `i + 1`, fitted
/// over the second half of the series.
pub fn estimate_growth_exponent(distances: &[f64]) -> Result<GrowthFit> {
    if distances.len() < MIN_GROWTH_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "growth fit needs at least {MIN_GROWTH_SAMPLES} samples, got {}",
            distances.len()
        )));
    }
    if distances.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return Err(Error::InvalidParameter("distances must be positive and finite".into()));
    }
    let start = distances.len() / 2;
    let tail = &distances[start..];
    if tail.iter().all(|&d| d == tail[0]) {
        return Err(Error::DegenerateSeries);
    }
    let xs: Vec<f64> = (start..distances.len()).map(|i| ((i + 1) as f64).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|d| d.ln()).collect();
    let fit = fit_line(&xs, &ys).ok_or(Error::DegenerateSeries)?;
    Ok(GrowthFit { exponent: fit.slope, r_squared: fit.r_squared })
}
