//! Piecewise-linear analogue: two families of concentric L1 diamonds about
//! `(-1/2, 0)` and `(1/2, 0)`, traversed clockwise, alternating every step.
//!
//! The dynamics are computed twice, by walking the diamonds exactly and by
//! the closed-form recurrence between entries into the strip `|x| < 1/2`.

pub mod geometry;
pub mod rational;
pub mod recurrence;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
pub use geometry::{geometric_step, move_along, EntryWalker, Family, GeometricState, SquarePoint, StripEntry};
pub use rational::{Rational, Scalar};
pub use recurrence::{strip_orbit, strip_recurrence_step, StripState, StripTransition};

/// Per-coordinate step length `a`; the Euclidean step is `a * sqrt 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareConfig<S = Rational> {
    pub a: S,
}

impl<S: Scalar> SquareConfig<S> {
    pub fn new(a: S) -> Result<Self> {
        if !(a > S::zero()) {
            return Err(Error::InvalidParameter(format!("step a = {a} must be positive")));
        }
        Ok(Self { a })
    }

    /// The strip recurrences need `a <= 1`, the width of the strip.
    pub fn check_strip_regime(&self) -> Result<()> {
        if self.a > S::from_i64(1) {
            return Err(Error::InvalidParameter(format!("strip recurrences need a <= 1, got {}", self.a)));
        }
        Ok(())
    }
}

/// Where the strip entry with ordinate `h` lies: the left boundary for `h > 0`.
pub fn entry_point(h: &Rational) -> SquarePoint<Rational> {
    let half = Rational::new(1, 2);
    let x = if h.is_negative() { half } else { -half };
    SquarePoint::new(x, h.clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitClass {
    Periodic { period_steps: u64, period_entries: usize },
    Expanding,
    Unresolved,
}

impl OrbitClass {
    pub fn kind(&self) -> &'static str {
        match self {
            OrbitClass::Periodic { .. } => "periodic",
            OrbitClass::Expanding => "expanding",
            OrbitClass::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub class: OrbitClass,
    pub entries_checked: usize,
    pub steps_checked: u64,
}

/// Entries the expanding heuristic looks back over.
const TREND_WINDOW: usize = 10;

/// Iterates the recurrence from `(h0, a0, alpha0)` until an exact state repeats,
/// the orbit is judged expanding, or `max_entries` transitions have been made.
///
/// Expanding means `|h|` exceeds `|h0| + 10a` and every one of the last ten
/// entries is further out than the entry two before it.
pub fn classify_orbit(
    cfg: &SquareConfig<Rational>,
    h0: &Rational,
    a0: &Rational,
    alpha0: u8,
    max_entries: usize,
) -> Result<Classification> {
    if max_entries == 0 {
        return Err(Error::InvalidParameter("max_entries must be at least 1".into()));
    }
    let threshold = &h0.abs() + &(&Rational::from_integer(10) * &cfg.a);
    let mut seen: HashMap<StripState, (usize, u64)> = HashMap::new();
    let mut radii: Vec<Rational> = Vec::new();
    let mut cur = StripState::new(h0.clone(), a0.clone(), alpha0);
    let mut steps = 0u64;
    for n in 0..=max_entries {
        if let Some(&(i, k)) = seen.get(&cur) {
            return Ok(Classification {
                class: OrbitClass::Periodic { period_steps: steps - k, period_entries: n - i },
                entries_checked: n,
                steps_checked: steps,
            });
        }
        radii.push(cur.h.abs());
        if radii.len() > TREND_WINDOW + 2 && cur.h.abs() > threshold {
            let tail = &radii[radii.len() - TREND_WINDOW - 2..];
            if tail.windows(3).all(|w| w[2] > w[0]) {
                return Ok(Classification { class: OrbitClass::Expanding, entries_checked: n, steps_checked: steps });
            }
        }
        if n == max_entries {
            break;
        }
        seen.insert(cur.clone(), (n, steps));
        let t = strip_recurrence_step(cfg, &cur)?;
        steps += t.steps;
        cur = t.next;
    }
    Ok(Classification { class: OrbitClass::Unresolved, entries_checked: max_entries, steps_checked: steps })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryMismatch {
    pub index: usize,
    /// Entry found by the stepper with its step index, if any was found.
    pub geometric: Option<(StripState, u64)>,
    pub recurrence: (StripState, u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossValidation {
    pub entries_checked: usize,
    pub mismatch: Option<EntryMismatch>,
}

impl CrossValidation {
    pub fn matches(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares the recurrence from `(h0, a, 0)` with the exact stepper started at the entry point.
pub fn cross_validate(cfg: &SquareConfig<Rational>, h0: &Rational, n_entries: usize) -> Result<CrossValidation> {
    cross_validate_from(cfg, &StripState::new(h0.clone(), cfg.a.clone(), 0), n_entries)
}

/// Compares `n_entries` recurrence steps, and the step counts between them,
/// against the entries the exact stepper detects.
///
/// When `a_n < a` the stepper starts `a - a_n` back along the entering
/// diamond, so that its first step produces the given entry.
pub fn cross_validate_from(
    cfg: &SquareConfig<Rational>,
    st0: &StripState,
    n_entries: usize,
) -> Result<CrossValidation> {
    let expected = strip_orbit(cfg, st0, n_entries)?;
    let family = st0.family();
    let mut start = entry_point(&st0.h);
    let lead = &cfg.a - &st0.a_n;
    if !lead.is_zero() {
        start = move_along(&start, family, &-lead)?;
    }
    let mut walker = EntryWalker::new(GeometricState::new(start, family), true);
    let last_step = expected.last().map(|e| e.1).unwrap_or(0);
    for (index, rec) in expected.iter().enumerate() {
        let found = loop {
            if walker.steps > last_step {
                break None;
            }
            let k = walker.steps;
            if let Some(e) = walker.step(cfg)? {
                break Some((StripState::new(e.h, e.remaining, e.family.alpha()), k));
            }
        };
        if found.as_ref() != Some(rec) {
            let mismatch = EntryMismatch { index, geometric: found, recurrence: rec.clone() };
            return Ok(CrossValidation { entries_checked: index, mismatch: Some(mismatch) });
        }
    }
    Ok(CrossValidation { entries_checked: expected.len(), mismatch: None })
}

/// For each map step `1..=n_steps`, `|h|` of the latest strip entry.
pub fn entry_distance_series(cfg: &SquareConfig<Rational>, st0: &StripState, n_steps: u64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_steps as usize);
    let mut cur = st0.clone();
    while (out.len() as u64) < n_steps {
        let t = strip_recurrence_step(cfg, &cur)?;
        let d = cur.h.abs().to_f64();
        let fill = t.steps.min(n_steps - out.len() as u64);
        out.extend(std::iter::repeat_n(d, fill as usize));
        cur = t.next;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkStart {
    /// `(-1/2, h0)` for `h0 > 0`, otherwise `(1/2, h0)`, moving along family 2.
    Strip { h0: f64 },
    /// Uniform on the unit L1 circle `|x| + |y| = 1` by perimeter, moving along family 1.
    Random { seed: u64 },
}

pub fn random_start(seed: u64) -> GeometricState<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s: f64 = rng.gen_range(0.0..4.0);
    let (x, y) = match s {
        s if s < 1.0 => (s, 1.0 - s),
        s if s < 2.0 => (2.0 - s, 1.0 - s),
        s if s < 3.0 => (2.0 - s, s - 3.0),
        s => (s - 4.0, s - 3.0),
    };
    GeometricState::new(SquarePoint::new(x, y), Family::One)
}

/// Floating-point orbit of the diamond map, returning `|z_t|` for `t = 1..=n_steps`.
pub fn random_walk_run(a: f64, start: WalkStart, n_steps: usize) -> Result<Vec<f64>> {
    let cfg = SquareConfig::new(a)?;
    let mut st = match start {
        WalkStart::Strip { h0 } => {
            let x = if h0 < 0.0 { 0.5 } else { -0.5 };
            GeometricState::new(SquarePoint::new(x, h0), Family::Two)
        }
        WalkStart::Random { seed } => random_start(seed),
    };
    let mut out = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        st = geometric_step(&cfg, &st)?;
        out.push(st.position.norm());
    }
    Ok(out)
}
