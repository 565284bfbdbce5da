//! Drift plus one-sided stable subordinators: Laplace exponents and exact
//! increment samplers.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::RngStream;
use crate::scalar::{lit, Real};
use crate::special::gamma;

/// Stable indices at or above this are treated as a pure drift.
pub const STABLE_INDEX_DRIFT_CUTOFF: f64 = 1.0 - 1e-6;

/// Subordinator with Laplace exponent `ψ(q) = drift·q + stable_scale·q^stable_index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSubordinatorSpec<T>", into = "RawSubordinatorSpec<T>")]
#[serde(bound = "T: Real")]
pub struct SubordinatorSpec<T> {
    drift: T,
    stable_scale: T,
    stable_index: T,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct RawSubordinatorSpec<T> {
    #[serde(default)]
    drift: T,
    #[serde(default)]
    stable_scale: T,
    #[serde(default = "one")]
    stable_index: T,
}

fn one<T: Real>() -> T {
    T::one()
}

impl<T: Real> TryFrom<RawSubordinatorSpec<T>> for SubordinatorSpec<T> {
    type Error = Error;

    fn try_from(raw: RawSubordinatorSpec<T>) -> Result<Self> {
        SubordinatorSpec::new(raw.drift, raw.stable_scale, raw.stable_index)
    }
}

impl<T: Real> From<SubordinatorSpec<T>> for RawSubordinatorSpec<T> {
    fn from(spec: SubordinatorSpec<T>) -> Self {
        RawSubordinatorSpec {
            drift: spec.drift,
            stable_scale: spec.stable_scale,
            stable_index: spec.stable_index,
        }
    }
}

impl<T: Real> SubordinatorSpec<T> {
    /// Validates and normalizes a spec. A stable part with index at the
    /// drift cutoff is folded into the drift.
    pub fn new(drift: T, stable_scale: T, stable_index: T) -> Result<Self> {
        if !(drift >= T::zero()) || !drift.is_finite() {
            return domain(format!("drift must be finite and nonnegative, got {drift}"));
        }
        if !(stable_scale >= T::zero()) || !stable_scale.is_finite() {
            return domain(format!(
                "stable scale must be finite and nonnegative, got {stable_scale}"
            ));
        }
        if !(stable_index > T::zero() && stable_index <= T::one()) {
            return domain(format!("stable index must lie in (0, 1], got {stable_index}"));
        }
        let (drift, stable_scale, stable_index) = if stable_index >= lit(STABLE_INDEX_DRIFT_CUTOFF) {
            (drift + stable_scale, T::zero(), T::one())
        } else {
            (drift, stable_scale, stable_index)
        };
        if drift == T::zero() && stable_scale == T::zero() {
            return domain("subordinator must have positive drift or a stable part");
        }
        Ok(Self {
            drift,
            stable_scale,
            stable_index,
        })
    }

    /// Pure drift `q ↦ rate·q`.
    pub fn drift_only(rate: T) -> Result<Self> {
        Self::new(rate, T::zero(), T::one())
    }

    /// Pure stable part `q ↦ scale·q^index`.
    pub fn stable(scale: T, index: T) -> Result<Self> {
        Self::new(T::zero(), scale, index)
    }

    pub fn drift(&self) -> T {
        self.drift
    }

    pub fn stable_scale(&self) -> T {
        self.stable_scale
    }

    pub fn stable_index(&self) -> T {
        self.stable_index
    }

    /// True if the stable part is present (positive scale with index below 1).
    pub fn has_stable_part(&self) -> bool {
        self.stable_scale > T::zero()
    }

    pub fn is_identity(&self) -> bool {
        self.drift == T::one() && !self.has_stable_part()
    }

    /// Lévy tail `ν(x, ∞) = b·x^{-γ}/Γ(1-γ)` of the stable part.
    pub fn levy_tail(&self, x: T) -> T {
        if !self.has_stable_part() {
            return T::zero();
        }
        self.stable_scale * x.powf(-self.stable_index) / gamma(T::one() - self.stable_index)
    }

    pub fn laplace_exponent(&self, q: T) -> Result<T> {
        laplace_exponent(self, q)
    }
}

/// `ψ(q) = a·q + b·q^γ` for `q ≥ 0`.
pub fn laplace_exponent<T: Real>(spec: &SubordinatorSpec<T>, q: T) -> Result<T> {
    if !(q >= T::zero()) {
        return domain(format!("Laplace argument must be nonnegative, got {q}"));
    }
    let mut value = spec.drift * q;
    if spec.has_stable_part() {
        value += spec.stable_scale * q.powf(spec.stable_index);
    }
    Ok(value)
}

/// Kanter's one-shot representation of a positive stable variable with
/// `E[exp(-qS)] = exp(-q^γ)` from a uniform `u ∈ (0,1)` and a standard
/// exponential `e`: `S = (A(πu)/e)^{(1-γ)/γ}` with
/// `A(θ) = [sin(γθ)^γ sin((1-γ)θ)^{1-γ} / sin θ]^{1/(1-γ)}`.
pub fn positive_stable_from_uniforms<T: Real>(index: T, u: T, e: T) -> T {
    ln_positive_stable_from_uniforms(index, u, e).exp()
}

/// Logarithm of [`positive_stable_from_uniforms`], finite even where the
/// variable itself would overflow.
pub fn ln_positive_stable_from_uniforms<T: Real>(index: T, u: T, e: T) -> T {
    let theta = T::PI() * u;
    let co = T::one() - index;
    let ln_a = (index * (index * theta).sin().ln() + co * (co * theta).sin().ln() - theta.sin().ln()) / co;
    (co / index) * (ln_a - e.ln())
}

/// Exact draw of a standard positive stable variable of index `γ ∈ (0, 1)`.
pub fn sample_positive_stable<T: Real>(index: T, rng: &mut RngStream) -> Result<T> {
    if !(index > T::zero() && index < T::one()) {
        return domain(format!("positive stable index must lie in (0, 1), got {index}"));
    }
    if index >= lit(STABLE_INDEX_DRIFT_CUTOFF) {
        return Ok(T::one());
    }
    let u = rng.uniform_open::<T>();
    let e = rng.exponential::<T>();
    Ok(positive_stable_from_uniforms(index, u, e))
}

/// `ln S` for the variable drawn by [`sample_positive_stable`], consuming the
/// same randomness.
pub fn sample_ln_positive_stable<T: Real>(index: T, rng: &mut RngStream) -> Result<T> {
    if !(index > T::zero() && index < T::one()) {
        return domain(format!("positive stable index must lie in (0, 1), got {index}"));
    }
    if index >= lit(STABLE_INDEX_DRIFT_CUTOFF) {
        return Ok(T::zero());
    }
    let u = rng.uniform_open::<T>();
    let e = rng.exponential::<T>();
    Ok(ln_positive_stable_from_uniforms(index, u, e))
}

/// Increment of the subordinator over an interval of length `dt`:
/// `a·dt + (b·dt)^{1/γ}·S`. Consumes no randomness when `dt = 0` or the
/// spec is a pure drift.
pub fn subordinator_increment<T: Real>(spec: &SubordinatorSpec<T>, dt: T, rng: &mut RngStream) -> Result<T> {
    if !(dt >= T::zero()) {
        return domain(format!("time increment must be nonnegative, got {dt}"));
    }
    if dt == T::zero() {
        return Ok(T::zero());
    }
    let mut value = spec.drift * dt;
    if spec.has_stable_part() {
        let s = sample_positive_stable(spec.stable_index, rng)?;
        value += (spec.stable_scale * dt).powf(spec.stable_index.recip()) * s;
    }
    Ok(value)
}
