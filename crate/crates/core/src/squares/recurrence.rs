//! Closed-form map from one strip entry to the next.

use num_traits::ToPrimitive;

use super::geometry::Family;
use super::rational::{parity, Rational};
use super::SquareConfig;
use crate::error::{Error, Result};

/// Exact state at a strip entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StripState {
    /// Ordinate of the entry point.
    pub h: Rational,
    /// Per-coordinate length of the entering step left inside the strip, in `(0, a]`.
    pub a_n: Rational,
    /// Family of the entering step, mod 2 (family 2 is `0`).
    pub alpha: u8,
}

impl StripState {
    pub fn new(h: Rational, a_n: Rational, alpha: u8) -> Self {
        Self { h, a_n, alpha: alpha % 2 }
    }

    pub fn family(&self) -> Family {
        Family::from_alpha(self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripTransition {
    pub next: StripState,
    /// Map steps from this entry to the next one.
    pub steps: u64,
    pub gamma: u64,
    pub beta: Rational,
}

fn sign_pow(n: u8) -> Rational {
    if n.is_multiple_of(2) {
        Rational::one()
    } else {
        Rational::from_integer(-1)
    }
}

fn out_of_regime(st: &StripState) -> Error {
    Error::OutOfRegime { h: st.h.to_string(), a_n: st.a_n.to_string(), alpha: st.alpha }
}

/// Checks that the zigzag through the strip stays on one side of the axis.
///
/// The path is `a_n`, then `gamma` full steps, then `beta`, alternating
/// families; family 2 moves up and family 1 down. Touching the axis is
/// harmless except at the exit point.
fn check_regime(a: &Rational, st: &StripState, gamma: u64, beta: &Rational) -> Result<()> {
    if st.h.is_zero() {
        return Err(out_of_regime(st));
    }
    let up_side = st.h.is_positive();
    let mut segments: Vec<&Rational> = Vec::with_capacity(gamma as usize + 2);
    segments.push(&st.a_n);
    segments.extend(std::iter::repeat_n(a, gamma as usize));
    if !beta.is_zero() {
        segments.push(beta);
    }
    let mut dist = st.h.abs();
    let mut family = st.family();
    let last = segments.len() - 1;
    for (i, len) in segments.into_iter().enumerate() {
        let moves_up = family == Family::Two;
        if moves_up != up_side {
            dist = &dist - len;
            if dist.is_negative() || (dist.is_zero() && i == last) {
                return Err(out_of_regime(st));
            }
        } else {
            dist = &dist + len;
        }
        family = family.other();
    }
    Ok(())
}

/// Applies the entry-to-entry recurrence exactly.
pub fn strip_recurrence_step(cfg: &SquareConfig<Rational>, st: &StripState) -> Result<StripTransition> {
    cfg.check_strip_regime()?;
    let a = &cfg.a;
    if !st.a_n.is_positive() || st.a_n > *a {
        return Err(Error::InvalidParameter(format!("a_n = {} outside (0, {a}]", st.a_n)));
    }
    let one = Rational::one();
    let gamma_big = ((&one - &st.a_n) / a.clone()).floor();
    let gamma = gamma_big
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter("step count overflow".into()))?;
    let beta = &(&one - &st.a_n) - &(a * &Rational::from(gamma_big.clone()));
    check_regime(a, st, gamma, &beta)?;

    let g_sign = sign_pow(parity(&gamma_big));
    let corner = &(&one - &g_sign) * &(a * &Rational::new(1, 2));
    let inner = &(&st.a_n - &(&g_sign * &beta)) - &corner;
    let h_next = -(&st.h + &(&sign_pow(st.alpha) * &inner));

    let two = Rational::from_integer(2);
    let q = &(&(&two * &h_next.abs()) + &beta) / a;
    let q_floor = q.floor();
    let a_next = a * &(&one - &q.fract());
    let alpha_next = ((st.alpha as u64 + gamma + 1 + parity(&q_floor) as u64) % 2) as u8;
    let steps = gamma
        .checked_add(1)
        .and_then(|g| g.checked_add(q_floor.to_u64()?))
        .ok_or_else(|| Error::InvalidParameter("step count overflow".into()))?;
    Ok(StripTransition { next: StripState::new(h_next, a_next, alpha_next), steps, gamma, beta })
}

/// Entry states `s_0 .. s_n` with the cumulative step index of each entry.
pub fn strip_orbit(cfg: &SquareConfig<Rational>, st0: &StripState, n: usize) -> Result<Vec<(StripState, u64)>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push((st0.clone(), 0));
    let mut cur = st0.clone();
    let mut k = 0u64;
    for _ in 0..n {
        let t = strip_recurrence_step(cfg, &cur)?;
        k += t.steps;
        cur = t.next;
        out.push((cur.clone(), k));
    }
    Ok(out)
}
