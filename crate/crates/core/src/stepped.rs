//! Nondecreasing càdlàg functions made of linear pieces and jumps.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Breakpoint at time `t` with left limit `left` and value `right`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot<T> {
    pub t: T,
    pub left: T,
    pub right: T,
}

/// Piecewise linear nondecreasing function with jumps, linear between
/// `(t_k, right_k)` and `(t_{k+1}, left_{k+1})` and constant after the last
/// knot.
#[derive(Debug, Clone, PartialEq)]
pub struct SteppedProcess<T> {
    knots: Vec<Knot<T>>,
}

impl<T: Real> SteppedProcess<T> {
    /// A process starting at `(t0, value)` with no jump there.
    pub fn starting_at(t0: T, value: T) -> Self {
        Self {
            knots: vec![Knot {
                t: t0,
                left: value,
                right: value,
            }],
        }
    }

    pub fn from_knots(knots: Vec<Knot<T>>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Domain("a stepped process needs at least one knot".into()));
        }
        for (k, kn) in knots.iter().enumerate() {
            if !(kn.left <= kn.right) {
                return Err(Error::Domain(format!("knot {k} jumps downward")));
            }
            if k > 0 {
                let prev = &knots[k - 1];
                if !(kn.t > prev.t) || !(kn.left >= prev.right) {
                    return Err(Error::Domain(format!("knot {k} breaks monotonicity")));
                }
            }
        }
        Ok(Self { knots })
    }

    /// Appends a knot; a knot at the current end time only updates the value.
    pub fn push(&mut self, t: T, left: T, right: T) {
        let last = self.knots.last_mut().expect("nonempty");
        debug_assert!(t >= last.t && left <= right);
        if t == last.t {
            last.right = right;
        } else {
            self.knots.push(Knot { t, left, right });
        }
    }

    /// Continues linearly to `value` at `t`, then jumps by `jump`.
    pub fn ramp_then_jump(&mut self, t: T, value: T, jump: T) {
        self.push(t, value, value + jump);
    }

    /// Continues flat to `t`, then jumps by `jump`.
    pub fn flat_then_jump(&mut self, t: T, jump: T) {
        let v = self.final_value();
        self.push(t, v, v + jump);
    }

    pub fn knots(&self) -> &[Knot<T>] {
        &self.knots
    }

    pub fn t_start(&self) -> T {
        self.knots[0].t
    }

    pub fn t_max(&self) -> T {
        self.knots.last().expect("nonempty").t
    }

    pub fn final_value(&self) -> T {
        self.knots.last().expect("nonempty").right
    }

    // index of the last knot with knot.t <= t
    fn locate(&self, t: T) -> Option<usize> {
        let idx = self.knots.partition_point(|k| k.t <= t);
        idx.checked_sub(1)
    }

    fn interpolate(&self, k: usize, t: T) -> T {
        let a = &self.knots[k];
        match self.knots.get(k + 1) {
            None => a.right,
            Some(b) => {
                if t == a.t {
                    a.right
                } else {
                    a.right + (b.left - a.right) * ((t - a.t) / (b.t - a.t))
                }
            }
        }
    }

    /// Right-continuous value at `t`; the left boundary value before the start.
    pub fn eval(&self, t: T) -> T {
        match self.locate(t) {
            None => self.knots[0].left,
            Some(k) => self.interpolate(k, t),
        }
    }

    /// Left limit at `t`.
    pub fn eval_left(&self, t: T) -> T {
        match self.locate(t) {
            None => self.knots[0].left,
            Some(k) => {
                if self.knots[k].t == t {
                    self.knots[k].left
                } else {
                    self.interpolate(k, t)
                }
            }
        }
    }

    /// Right-continuous inverse `inf{t : F(t) > y}`; `None` when `y` is at or
    /// above the final value.
    pub fn inverse(&self, y: T) -> Option<T> {
        let k = self.knots.partition_point(|kn| kn.right <= y);
        let kn = self.knots.get(k)?;
        if y >= kn.left || k == 0 {
            return Some(kn.t);
        }
        let prev = &self.knots[k - 1];
        let frac = (y - prev.right) / (kn.left - prev.right);
        Some(prev.t + (kn.t - prev.t) * frac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SteppedProcess<f64> {
        // 0 flat to t=1, jump 0→2, flat to t=2, jump 2→5, ramp to 7 at t=4
        let mut p = SteppedProcess::starting_at(0.0, 0.0);
        p.flat_then_jump(1.0, 2.0);
        p.flat_then_jump(2.0, 3.0);
        p.ramp_then_jump(4.0, 7.0, 0.0);
        p
    }

    #[test]
    fn eval_and_left_limits() {
        let p = sample();
        assert_eq!(p.eval(0.5), 0.0);
        assert_eq!(p.eval(1.0), 2.0);
        assert_eq!(p.eval_left(1.0), 0.0);
        assert_eq!(p.eval(1.5), 2.0);
        assert_eq!(p.eval(2.0), 5.0);
        assert_eq!(p.eval(3.0), 6.0);
        assert_eq!(p.eval(10.0), 7.0);
        assert_eq!(p.eval(-1.0), 0.0);
    }

    #[test]
    fn inverse_cases() {
        let p = sample();
        assert_eq!(p.inverse(0.0), Some(1.0));
        assert_eq!(p.inverse(1.9), Some(1.0));
        assert_eq!(p.inverse(2.0), Some(2.0));
        assert_eq!(p.inverse(6.0), Some(3.0));
        assert_eq!(p.inverse(7.0), None);
    }

    #[test]
    fn rejects_non_monotone() {
        let bad = vec![
            Knot {
                t: 0.0,
                left: 0.0,
                right: 1.0,
            },
            Knot {
                t: 1.0,
                left: 0.5,
                right: 0.5,
            },
        ];
        assert!(SteppedProcess::from_knots(bad).is_err());
    }

    #[test]
    fn inverse_of_identity_ramp() {
        let mut p = SteppedProcess::starting_at(0.0, 0.0);
        p.ramp_then_jump(10.0, 10.0, 0.0);
        for k in 0..100 {
            let y = 0.1 * k as f64;
            assert!((p.inverse(y).unwrap() - y).abs() < 1e-12);
        }
    }
}
