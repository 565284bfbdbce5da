//! The Mittag-Leffler function on the completely monotone branch `z ≤ 0`.

use crate::error::{domain, Result};
use crate::scalar::{from_usize, lit, Real};
use crate::special::{integrate, recip_gamma};

const SERIES_RADIUS: f64 = 1.0;
const ASYMPTOTIC_FROM: f64 = 50.0;

/// `E_α(z) = Σ_m z^m / Γ(1 + αm)` for `α ∈ (0, 1]` and `z ≤ 0`.
///
/// The power series is only used for `|z| ≤ 1`: beyond that its terms grow
/// large enough to lose most digits to cancellation. The asymptotic
/// expansion covers `z ≤ -50` and an integral representation the range in
/// between.
pub fn mittag_leffler<T: Real>(alpha: T, z: T) -> Result<T> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return domain(format!("Mittag-Leffler index must lie in (0, 1], got {alpha}"));
    }
    if !(z <= T::zero()) {
        return domain(format!("Mittag-Leffler argument must be nonpositive, got {z}"));
    }
    if z == T::zero() {
        return Ok(T::one());
    }
    if alpha == T::one() {
        return Ok(z.exp());
    }
    let x = -z;
    if x <= lit(SERIES_RADIUS) {
        Ok(series(alpha, z))
    } else if x >= lit(ASYMPTOTIC_FROM) {
        Ok(asymptotic(alpha, z))
    } else {
        Ok(integral(alpha, x))
    }
}

fn series<T: Real>(alpha: T, z: T) -> T {
    // Kahan-compensated partial sums
    let mut sum = T::zero();
    let mut comp = T::zero();
    let mut power = T::one();
    let tiny = lit::<T>(1e-17);
    for k in 0..400 {
        let term = power * recip_gamma(alpha * from_usize::<T>(k) + T::one());
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if k > 2 && term.abs() < tiny {
            break;
        }
        power *= z;
    }
    sum
}

fn asymptotic<T: Real>(alpha: T, z: T) -> T {
    let mut sum = T::zero();
    let mut power = T::one();
    let mut last = T::infinity();
    for k in 1..200 {
        power /= z;
        let term = power * recip_gamma(T::one() - alpha * from_usize::<T>(k));
        let size = term.abs();
        if size > last && size > T::zero() {
            // the expansion diverges past its smallest term
            break;
        }
        if size == T::zero() {
            // Γ(1 - αk) has a pole
            continue;
        }
        sum -= term;
        last = size;
        if size < lit::<T>(1e-18) * sum.abs() {
            break;
        }
    }
    sum
}

/// `E_α(-x) = sin(απ)/(απ) ∫_0^∞ exp(-(xv)^{1/α}) / (v² + 2v cos(απ) + 1) dv`.
fn integral<T: Real>(alpha: T, x: T) -> T {
    let pa = alpha * T::PI();
    let cos = pa.cos();
    let inv = alpha.recip();
    let f = |v: T| (-(x * v).powf(inv)).exp() / (v * v + lit::<T>(2.0) * v * cos + T::one());
    // past v_max the exponential factor is below e^{-50}
    let v_max = lit::<T>(ASYMPTOTIC_FROM).powf(alpha) / x;
    let mut cuts = vec![T::zero(), x.recip()];
    if -cos > T::zero() {
        cuts.push(-cos);
    }
    cuts.retain(|&c| c < v_max);
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    cuts.push(v_max);
    let tol = lit::<T>(1e-14);
    let total = cuts
        .windows(2)
        .fold(T::zero(), |acc, w| acc + integrate(&f, w[0], w[1], tol));
    pa.sin() / pa * total
}
