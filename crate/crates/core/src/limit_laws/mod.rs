//! Long-time limits of occupation times, local time and waiting times: scaling
//! functions, exact samplers and closed-form distribution functions.

mod mittag_leffler;
mod scaling;

pub use mittag_leffler::mittag_leffler;
pub use scaling::{derive_scaling, ClassRole, ClassScaling, ScalingSpec};

use rand_distr::{Beta, Distribution, Poisson};

use crate::error::{domain, Error, Result};
use crate::rng::RngStream;
use crate::scalar::{lit, to_f64, Real};
use crate::special::{gamma, incomplete_beta};
use crate::subordinator::sample_ln_positive_stable;

/// Draws `(β_i^{1/α} T_i / Σ_j β_j^{1/α} T_j)_i` with i.i.d. positive
/// `α`-stable `T_i`; computed in log space so extreme draws cannot overflow.
pub fn sample_occupation_fractions<T: Real>(alpha: T, beta: &[T], rng: &mut RngStream) -> Result<Vec<T>> {
    check_index(alpha)?;
    if beta.is_empty() {
        return domain("fraction weights must be nonempty");
    }
    if beta.iter().any(|&b| !(b > T::zero())) {
        return domain("fraction weights must be positive");
    }
    let total = beta.iter().fold(T::zero(), |acc, &b| acc + b);
    if (total - T::one()).abs() > lit(1e-9) {
        return domain(format!("fraction weights must sum to 1, got {total}"));
    }
    if beta.len() == 1 {
        return Ok(vec![T::one()]);
    }
    let mut logs = Vec::with_capacity(beta.len());
    for &b in beta {
        logs.push(b.ln() / alpha + sample_ln_positive_stable(alpha, rng)?);
    }
    let top = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let weights: Vec<T> = logs.iter().map(|&l| (l - top).exp()).collect();
    let sum = weights.iter().fold(T::zero(), |acc, &w| acc + w);
    Ok(weights.into_iter().map(|w| w / sum).collect())
}

/// One draw of the inverse stable subordinator at time `t`, via
/// `S^{-1}(t) = (t / S_1)^α`.
pub fn sample_inverse_stable<T: Real>(alpha: T, t: T, rng: &mut RngStream) -> Result<T> {
    check_index(alpha)?;
    if !(t >= T::zero()) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    if t == T::zero() {
        return Ok(T::zero());
    }
    let ln_s = sample_ln_positive_stable(alpha, rng)?;
    Ok((alpha * (t.ln() - ln_s)).exp())
}

/// Distribution function of the limit of `G*_t / t`, the Beta(α, 1-α) law.
pub fn dynkin_lamperti_cdf<T: Real>(alpha: T, x: T) -> Result<T> {
    check_index(alpha)?;
    if !(x >= T::zero() && x <= T::one()) {
        return domain(format!("argument must lie in [0, 1], got {x}"));
    }
    Ok(incomplete_beta(alpha, T::one() - alpha, x))
}

/// Distribution function of the limit of `D*_t / t`, using `1/D =law G`.
pub fn next_zero_cdf<T: Real>(alpha: T, d: T) -> Result<T> {
    check_index(alpha)?;
    if !(d >= T::zero()) {
        return domain(format!("argument must be nonnegative, got {d}"));
    }
    if d <= T::one() {
        return Ok(T::zero());
    }
    Ok(T::one() - incomplete_beta(alpha, T::one() - alpha, d.recip()))
}

/// `(2/π) asin √x`, the classical arcsine distribution function.
pub fn arcsine_cdf<T: Real>(x: T) -> T {
    let x = x.max(T::zero()).min(T::one());
    lit::<T>(2.0) / T::PI() * x.sqrt().asin()
}

/// Exact draw of `(G_1, D_1)` for a standard `α`-stable subordinator: `G`
/// is Beta(α, 1-α) and, given `G = g`, `D - g` is Pareto(α) above `1 - g`.
pub fn sample_waiting_times<T: Real>(alpha: T, rng: &mut RngStream) -> Result<(T, T)> {
    check_index(alpha)?;
    let a = to_f64(alpha);
    let beta = Beta::new(a, 1.0 - a).map_err(|e| Error::Domain(e.to_string()))?;
    let g: f64 = beta.sample(rng);
    let u: f64 = rng.uniform_open();
    let d = g + (1.0 - g) * u.powf(-1.0 / a);
    Ok((lit(g), lit(d)))
}

/// Approximate `(G_1, D_1)` from a Lévy–Itô construction of the stable
/// subordinator. The working scale is the smaller of the current level and
/// the remaining gap below 1 (floored at `1e-12`). In each step, jumps above
/// `eps` times that scale are placed exactly (Poisson in number, uniform in
/// time, Pareto in size) and the smaller ones are replaced by their mean
/// rate, with the step length chosen so that this drift covers `eps` times
/// the scale. `G` is the position just before the first jump across 1 and
/// `D` the position just after. Both carry a relative error of order `eps`
/// whatever the index; the step count grows like `log(1e12) / eps`.
pub fn sample_waiting_times_levy_ito<T: Real>(alpha: T, eps: T, rng: &mut RngStream) -> Result<(T, T)> {
    check_index(alpha)?;
    if !(eps > T::zero() && eps < T::one()) {
        return domain(format!("step fraction must lie in (0, 1), got {eps}"));
    }
    let a = to_f64(alpha);
    let eps = to_f64(eps);
    let g1a = gamma(1.0 - a);
    let mut level = 0.0f64;
    let mut times = Vec::new();
    while level < 1.0 {
        let scale = (1.0 - level).min(level.max(1e-12));
        let cut = eps * scale;
        // ν(dx) = α x^{-1-α} dx / Γ(1-α): mean rate of jumps below `cut`, and
        // the rate of those above it
        let drift = a * cut.powf(1.0 - a) / ((1.0 - a) * g1a);
        let dt = cut / drift;
        let rate = cut.powf(-a) / g1a;
        let n = Poisson::new(dt * rate)
            .map_err(|e| Error::Domain(e.to_string()))?
            .sample(rng) as usize;
        times.clear();
        times.extend((0..n).map(|_| rng.uniform_open::<f64>() * dt));
        times.sort_by(f64::total_cmp);
        let mut jumped = 0.0;
        for &t in &times {
            let before = level + drift * t + jumped;
            if before >= 1.0 {
                break;
            }
            let size = cut * rng.uniform_open::<f64>().powf(-1.0 / a);
            if before + size > 1.0 {
                return Ok((lit(before), lit(before + size)));
            }
            jumped += size;
        }
        level += drift * dt + jumped;
    }
    // crept across on the compensating drift, an event of probability O(eps)
    Ok((T::one(), T::one()))
}

fn check_index<T: Real>(alpha: T) -> Result<()> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return domain(format!("stable index must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}
