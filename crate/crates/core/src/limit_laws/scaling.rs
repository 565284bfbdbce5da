//! Tail constants of the transformed excursion lifetimes and the scaling
//! functions built from them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::special::gamma;
use crate::star_chain::{lifetime_mean_measure, StarChainModel};
use crate::time_change::ClassMap;

const INDEX_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassRole {
    /// Tail index equal to the minimum; contributes to the occupation fractions.
    Dominant,
    /// Lighter tail; occupation grows like `g_i(h(λ))`.
    Subdominant,
}

/// Asymptotics of one class's transformed lifetime tail,
/// `n*(ζ > t) ~ constant · t^{-index}`, or a deterministic linear clock
/// (`index = 1`, `constant` the rate) for a drift-only holding class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassScaling<T> {
    pub role: ClassRole,
    pub index: T,
    pub tail_constant: T,
    pub endpoint: bool,
    /// Dominant weight, zero for the other classes.
    pub beta: T,
}

/// Everything the limit experiments need: the dominant index `α`, the
/// weights `β`, the subdominant pairs `(α̃_i, β̃_i)` and the functions `h`, `g`, `g_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSpec<T> {
    pub alpha: T,
    /// Sum of the dominant tail constants.
    pub k_const: T,
    /// Index 0 is the holding class `o`.
    pub classes: Vec<ClassScaling<T>>,
}

/// Tail index and constant of every class, then roles by index comparison.
pub fn derive_scaling<T: Real>(model: &StarChainModel<T>, class_map: &ClassMap<T>) -> Result<ScalingSpec<T>> {
    class_map.check_model(model)?;
    let mut raw = Vec::with_capacity(model.n_classes() + 1);
    let c = model.stagnancy();
    let hold = class_map.spec(0);
    if hold.has_stable_part() {
        let g = hold.stable_index();
        raw.push((g, c * hold.stable_scale() / gamma(T::one() - g), false));
    } else {
        raw.push((T::one(), c * hold.drift(), true));
    }
    for class in 1..=model.n_classes() {
        let spec = class_map.spec(class);
        if !spec.has_stable_part() {
            return Err(Error::Unsupported(format!(
                "class {class} is driven by a pure drift; its finite-mean lifetimes would make index 1 dominate"
            )));
        }
        let g = spec.stable_index();
        let m = lifetime_mean_measure(model, class)?;
        raw.push((g, m * spec.stable_scale() / gamma(T::one() - g), false));
    }
    let alpha = raw.iter().filter(|r| !r.2).map(|r| r.0).fold(T::infinity(), T::min);
    if !(alpha < T::one()) {
        return Err(Error::Unsupported("no class has a heavy transformed tail".into()));
    }
    let is_dominant = |(index, _, endpoint): &(T, T, bool)| !endpoint && (*index - alpha).abs() <= lit(INDEX_TIE);
    let k_const = raw
        .iter()
        .filter(|r| is_dominant(r))
        .fold(T::zero(), |acc, r| acc + r.1);
    let classes = raw
        .iter()
        .map(|r| {
            let dominant = is_dominant(r);
            ClassScaling {
                role: if dominant {
                    ClassRole::Dominant
                } else {
                    ClassRole::Subdominant
                },
                index: r.0,
                tail_constant: r.1,
                endpoint: r.2,
                beta: if dominant { r.1 / k_const } else { T::zero() },
            }
        })
        .collect();
    Ok(ScalingSpec {
        alpha,
        k_const,
        classes,
    })
}

impl<T: Real> ScalingSpec<T> {
    /// `h(x) = x^α / (Γ(1-α) K)`, the scale of the local time at time `x`.
    pub fn h(&self, x: T) -> T {
        x.powf(self.alpha) / (gamma(T::one() - self.alpha) * self.k_const)
    }

    /// Inverse of `h`.
    pub fn g(&self, y: T) -> T {
        (y * gamma(T::one() - self.alpha) * self.k_const).powf(self.alpha.recip())
    }

    /// `g_i(y)`, the scale of the class-`i` cumulative lifetime after local
    /// time `y`: `(y Γ(1-α̃))^{1/α̃}`, or `y` itself at the drift endpoint.
    pub fn g_class(&self, class: usize, y: T) -> T {
        let c = &self.classes[class];
        if c.endpoint {
            y
        } else {
            (y * gamma(T::one() - c.index)).powf(c.index.recip())
        }
    }

    /// `(α̃_i, β̃_i)` for a subdominant class.
    pub fn subdominant(&self, class: usize) -> Option<(T, T)> {
        let c = self.classes.get(class)?;
        (c.role == ClassRole::Subdominant).then_some((c.index, c.tail_constant))
    }

    pub fn dominant_classes(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| self.classes[i].role == ClassRole::Dominant)
            .collect()
    }

    pub fn dominant_betas(&self) -> Vec<T> {
        self.dominant_classes().iter().map(|&i| self.classes[i].beta).collect()
    }
}
