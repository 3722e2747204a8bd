//! Motion along the two families of L1 diamonds.
//!
//! A diamond `|x - cx| + |y| = R` is parametrised clockwise from its top
//! vertex by `s` in `[0, 4R)`, in per-coordinate units: one unit of `s` moves
//! each coordinate by one, i.e. a Euclidean distance of `sqrt 2`. A map step
//! advances `s` by `a`, which keeps exact inputs exact.

use super::rational::Scalar;
use super::SquareConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Diamonds about `(-1/2, 0)`.
    One,
    /// Diamonds about `(1/2, 0)`.
    Two,
}

impl Family {
    pub fn other(self) -> Family {
        match self {
            Family::One => Family::Two,
            Family::Two => Family::One,
        }
    }

    /// Family number mod 2.
    pub fn alpha(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 0,
        }
    }

    pub fn from_alpha(alpha: u8) -> Family {
        if alpha.is_multiple_of(2) {
            Family::Two
        } else {
            Family::One
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 2,
        }
    }

    pub fn center_x<S: Scalar>(self) -> S {
        match self {
            Family::One => -S::half(),
            Family::Two => S::half(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquarePoint<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> SquarePoint<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.to_f64().hypot(self.y.to_f64())
    }

    pub fn to_f64(&self) -> SquarePoint<f64> {
        SquarePoint::new(self.x.to_f64(), self.y.to_f64())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeometricState<S> {
    pub position: SquarePoint<S>,
    pub next_family: Family,
}

impl<S: Scalar> GeometricState<S> {
    pub fn new(position: SquarePoint<S>, next_family: Family) -> Self {
        Self { position, next_family }
    }
}

/// Direction of travel `(du, dv)` on each side, clockwise from the top vertex.
const SIDE_DIRECTIONS: [(i64, i64); 4] = [(1, -1), (-1, -1), (-1, 1), (1, 1)];

fn radius<S: Scalar>(u: &S, v: &S) -> S {
    u.abs_val() + v.abs_val()
}

/// Perimeter parameter of `(u, v)` on the diamond of radius `r`.
fn perimeter_param<S: Scalar>(u: &S, v: &S, r: &S) -> S {
    let zero = S::zero();
    let three_r = S::from_i64(3) * r.clone();
    if *u >= zero && *v > zero {
        u.clone()
    } else if *u > zero {
        r.clone() - v.clone()
    } else {
        three_r + v.clone()
    }
}

fn perimeter_point<S: Scalar>(s: &S, r: &S) -> (S, S) {
    let side = side_of(s, r);
    let (two_r, three_r, four_r) =
        (S::from_i64(2) * r.clone(), S::from_i64(3) * r.clone(), S::from_i64(4) * r.clone());
    let s = s.clone();
    match side {
        0 => (s.clone(), r.clone() - s),
        1 => (two_r - s.clone(), r.clone() - s),
        2 => (two_r - s.clone(), s - three_r),
        _ => (s.clone() - four_r, s - three_r),
    }
}

fn side_of<S: Scalar>(s: &S, r: &S) -> usize {
    let k = s.div_floor(r).to_f64();
    (k.clamp(0.0, 3.0)) as usize
}

/// Moves `p` by per-coordinate arc length `len` (any sign) along the diamond of `family`.
pub fn move_along<S: Scalar>(p: &SquarePoint<S>, family: Family, len: &S) -> Result<SquarePoint<S>> {
    let cx = family.center_x::<S>();
    let u = p.x.clone() - cx.clone();
    let r = radius(&u, &p.y);
    if r.is_zero_val() {
        return Err(Error::InvalidParameter(format!(
            "point ({}, {}) is the center of family {}",
            p.x,
            p.y,
            family.index()
        )));
    }
    let four_r = S::from_i64(4) * r.clone();
    let s = (perimeter_param(&u, &p.y, &r) + len.clone()).rem_floor(&four_r);
    let (u1, v1) = perimeter_point(&s, &r);
    Ok(SquarePoint::new(cx + u1, v1))
}

/// One map step: move clockwise by `a` along the active family's diamond, then switch family.
pub fn geometric_step<S: Scalar>(cfg: &SquareConfig<S>, st: &GeometricState<S>) -> Result<GeometricState<S>> {
    let position = move_along(&st.position, st.next_family, &cfg.a)?;
    Ok(GeometricState { position, next_family: st.next_family.other() })
}

/// A crossing of `x = -1/2` rightward or `x = 1/2` leftward, coming from outside the strip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripEntry<S> {
    /// Ordinate of the crossing.
    pub h: S,
    /// Per-coordinate length of the step left after the crossing, in `(0, a]`.
    pub remaining: S,
    pub family: Family,
}

/// Geometric stepper that also reports strip entries.
#[derive(Debug, Clone)]
pub struct EntryWalker<S> {
    pub state: GeometricState<S>,
    /// Whether the current position counts as outside the strip. Points on
    /// the boundary inherit this from the side they were reached from.
    pub outside: bool,
    pub steps: u64,
}

impl<S: Scalar> EntryWalker<S> {
    pub fn new(state: GeometricState<S>, outside: bool) -> Self {
        Self { state, outside, steps: 0 }
    }

    /// Performs one map step, returning the entry made during it, if any.
    pub fn step(&mut self, cfg: &SquareConfig<S>) -> Result<Option<StripEntry<S>>> {
        let family = self.state.next_family;
        let cx = family.center_x::<S>();
        let half = S::half();
        let p = &self.state.position;
        let u0 = p.x.clone() - cx.clone();
        let r = radius(&u0, &p.y);
        if r.is_zero_val() {
            return Err(Error::InvalidParameter(format!(
                "point ({}, {}) is the center of family {}",
                p.x,
                p.y,
                family.index()
            )));
        }
        let four_r = S::from_i64(4) * r.clone();
        let mut s = perimeter_param(&u0, &p.y, &r);
        let mut done = S::zero();
        let mut entry = None;
        let (mut x, mut y) = (p.x.clone(), p.y.clone());
        while done < cfg.a {
            let side = side_of(&s, &r);
            let to_corner = S::from_i64(side as i64 + 1) * r.clone() - s.clone();
            if to_corner <= S::zero() {
                // floating-point rounding put s on a corner
                s = (S::from_i64(side as i64 + 1) * r.clone()).rem_floor(&four_r);
                continue;
            }
            let left = cfg.a.clone() - done.clone();
            let len = if to_corner < left { to_corner } else { left };
            let (du, dv) = SIDE_DIRECTIONS[side];
            let x1 = if du > 0 { x.clone() + len.clone() } else { x.clone() - len.clone() };
            let boundary = if du > 0 { -half.clone() } else { half.clone() };
            let crosses = if du > 0 { x <= boundary && boundary < x1 } else { x1 < boundary && boundary <= x };
            if entry.is_none() && crosses && self.outside {
                let t = (boundary.clone() - x.clone()).abs_val();
                let h = if dv > 0 { y.clone() + t.clone() } else { y.clone() - t.clone() };
                entry = Some(StripEntry { h, remaining: cfg.a.clone() - done.clone() - t, family });
            }
            let strictly_out = |v: &S| *v < -half.clone() || *v > half;
            self.outside = if strictly_out(&x1) {
                true
            } else if x1 == -half.clone() || x1 == half {
                strictly_out(&x)
            } else {
                false
            };
            s = (s + len.clone()).rem_floor(&four_r);
            let (u1, v1) = perimeter_point(&s, &r);
            x = cx.clone() + u1;
            y = v1;
            done = done + len;
        }
        self.state = GeometricState { position: SquarePoint::new(x, y), next_family: family.other() };
        self.steps += 1;
        Ok(entry)
    }
}
