//! Continuous-time Markov chains on a star of finite rays joined at `o`,
//! with exact event-driven simulation and linear-solve oracles for the
//! return time to `o`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::Lu;
use crate::rng::RngStream;
use crate::scalar::Real;

/// A state of the chain: the centre `o` or state `index` of ray `ray`
/// (both zero based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum State {
    Origin,
    Ray { ray: usize, index: usize },
}

impl State {
    /// Excursion class of the state: 0 for `o`, `ray + 1` otherwise.
    pub fn class(&self) -> usize {
        match *self {
            State::Origin => 0,
            State::Ray { ray, .. } => ray + 1,
        }
    }

    pub fn is_origin(&self) -> bool {
        matches!(self, State::Origin)
    }
}

/// One sojourn of a piecewise-constant trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Sojourn<T> {
    pub state: State,
    pub duration: T,
}

/// Piecewise-constant trajectory started at `o`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Path<T> {
    pub sojourns: Vec<Sojourn<T>>,
    /// The last sojourn was cut by a time horizon.
    pub truncated: bool,
}

impl<T: Real> Path<T> {
    pub fn duration(&self) -> T {
        self.sojourns.iter().fold(T::zero(), |acc, s| acc + s.duration)
    }

    pub fn len(&self) -> usize {
        self.sojourns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sojourns.is_empty()
    }
}

/// One ray: its states, internal jump rates, exit rates to `o` and entry
/// rates from `o`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
pub struct RaySpec<T> {
    pub states: Vec<String>,
    pub internal_rates: Vec<Vec<T>>,
    pub exit_rates: Vec<T>,
    pub entry_rates: Vec<T>,
}

impl<T: Real> RaySpec<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Total entry rate `r_i` from `o` into this ray.
    pub fn entry_total(&self) -> T {
        self.entry_rates.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Entrance distribution `μ_i`.
    pub fn entrance_distribution(&self) -> Vec<T> {
        let r = self.entry_total();
        self.entry_rates.iter().map(|&e| e / r).collect()
    }

    /// Total jump rate `q(x)` out of each state.
    pub fn total_rates(&self) -> Vec<T> {
        (0..self.len())
            .map(|x| {
                self.internal_rates[x]
                    .iter()
                    .enumerate()
                    .filter(|&(y, _)| y != x)
                    .fold(self.exit_rates[x], |a, (_, &b)| a + b)
            })
            .collect()
    }

    fn validate(&self, label: usize) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Err(Error::Model(format!("ray {label} has no states")));
        }
        if self.internal_rates.len() != n || self.internal_rates.iter().any(|row| row.len() != n) {
            return Err(Error::Model(format!("ray {label}: internal_rates must be {n}×{n}")));
        }
        if self.exit_rates.len() != n || self.entry_rates.len() != n {
            return Err(Error::Model(format!(
                "ray {label}: exit/entry rate vectors must have length {n}"
            )));
        }
        let finite_nonneg = |v: T| v.is_finite() && v >= T::zero();
        for (x, row) in self.internal_rates.iter().enumerate() {
            for (y, &v) in row.iter().enumerate() {
                if !finite_nonneg(v) {
                    return Err(Error::Model(format!(
                        "ray {label}: rate ({x},{y}) = {v} is not a nonnegative number"
                    )));
                }
                if x == y && v != T::zero() {
                    return Err(Error::Model(format!(
                        "ray {label}: diagonal rate ({x},{x}) must be zero"
                    )));
                }
            }
        }
        if self
            .exit_rates
            .iter()
            .chain(&self.entry_rates)
            .any(|&v| !finite_nonneg(v))
        {
            return Err(Error::Model(format!(
                "ray {label}: exit/entry rates must be nonnegative numbers"
            )));
        }
        if !(self.entry_total() > T::zero()) {
            return Err(Error::Model(format!("ray {label}: total entry rate must be positive")));
        }
        if !self.exit_rates.iter().any(|&v| v > T::zero()) {
            return Err(Error::Model(format!("ray {label}: no state exits to o")));
        }
        // every state must reach an exiting state through internal jumps
        let mut reaches = self.exit_rates.iter().map(|&v| v > T::zero()).collect::<Vec<_>>();
        loop {
            let mut changed = false;
            for x in 0..n {
                if !reaches[x] && (0..n).any(|y| reaches[y] && self.internal_rates[x][y] > T::zero()) {
                    reaches[x] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if let Some(x) = reaches.iter().position(|r| !r) {
            return Err(Error::Model(format!(
                "ray {label}: o is not reachable from state '{}'",
                self.states[x]
            )));
        }
        Ok(())
    }

    /// `M = diag(q + q(x)) - Q_internal`.
    fn resolvent_matrix(&self, q: T) -> Vec<T> {
        let n = self.len();
        let totals = self.total_rates();
        let mut m = vec![T::zero(); n * n];
        for x in 0..n {
            for y in 0..n {
                m[x * n + y] = if x == y {
                    q + totals[x]
                } else {
                    -self.internal_rates[x][y]
                };
            }
        }
        m
    }
}

// Per-ray jump tables used by the simulator.
#[derive(Debug, Clone, PartialEq)]
struct RayTables<T> {
    total: Vec<T>,
    // cumulative weights over internal targets followed by the exit
    cumulative: Vec<Vec<T>>,
}

/// Star of rays communicating only through `o`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel<T>", into = "RawModel<T>", bound = "T: Real")]
pub struct StarChainModel<T> {
    rays: Vec<RaySpec<T>>,
    q_origin: T,
    #[serde(skip)]
    entry_cumulative: Vec<(State, T)>,
    #[serde(skip)]
    tables: Vec<RayTables<T>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct RawModel<T> {
    rays: Vec<RaySpec<T>>,
}

impl<T: Real> TryFrom<RawModel<T>> for StarChainModel<T> {
    type Error = Error;

    fn try_from(raw: RawModel<T>) -> Result<Self> {
        StarChainModel::new(raw.rays)
    }
}

impl<T: Real> From<StarChainModel<T>> for RawModel<T> {
    fn from(model: StarChainModel<T>) -> Self {
        RawModel { rays: model.rays }
    }
}

impl<T: Real> StarChainModel<T> {
    /// Validates the rays eagerly and precomputes jump tables.
    pub fn new(rays: Vec<RaySpec<T>>) -> Result<Self> {
        if rays.is_empty() {
            return Err(Error::Model("model must have at least one ray".into()));
        }
        for (i, ray) in rays.iter().enumerate() {
            ray.validate(i + 1)?;
        }
        let mut entry_cumulative = Vec::new();
        let mut acc = T::zero();
        for (r, ray) in rays.iter().enumerate() {
            for (x, &w) in ray.entry_rates.iter().enumerate() {
                if w > T::zero() {
                    acc += w;
                    entry_cumulative.push((State::Ray { ray: r, index: x }, acc));
                }
            }
        }
        let tables = rays
            .iter()
            .map(|ray| {
                let total = ray.total_rates();
                let cumulative = (0..ray.len())
                    .map(|x| {
                        let mut acc = T::zero();
                        let mut row: Vec<T> = ray.internal_rates[x]
                            .iter()
                            .map(|&w| {
                                acc += w;
                                acc
                            })
                            .collect();
                        row.push(acc + ray.exit_rates[x]);
                        row
                    })
                    .collect();
                RayTables { total, cumulative }
            })
            .collect();
        Ok(Self {
            rays,
            q_origin: acc,
            entry_cumulative,
            tables,
        })
    }

    pub fn rays(&self) -> &[RaySpec<T>] {
        &self.rays
    }

    /// Number of rays `n`; excursion classes are `1..=n`.
    pub fn n_classes(&self) -> usize {
        self.rays.len()
    }

    /// Holding rate `q(o) = Σ r_i`.
    pub fn q_origin(&self) -> T {
        self.q_origin
    }

    /// Local time at `o` is Lebesgue time there, so the stagnancy rate is 1.
    pub fn stagnancy(&self) -> T {
        T::one()
    }

    pub fn ray_for_class(&self, class: usize) -> Result<&RaySpec<T>> {
        if class == 0 || class > self.rays.len() {
            return domain(format!(
                "excursion class must lie in 1..={}, got {class}",
                self.rays.len()
            ));
        }
        Ok(&self.rays[class - 1])
    }

    fn pick_entry(&self, rng: &mut RngStream) -> State {
        let u = rng.uniform_open::<T>() * self.q_origin;
        let idx = self.entry_cumulative.partition_point(|&(_, c)| c <= u);
        self.entry_cumulative[idx.min(self.entry_cumulative.len() - 1)].0
    }

    /// Next state after leaving ray state `(ray, x)`.
    fn pick_jump(&self, ray: usize, x: usize, rng: &mut RngStream) -> State {
        let row = &self.tables[ray].cumulative[x];
        let total = *row.last().expect("nonempty jump row");
        let u = rng.uniform_open::<T>() * total;
        let idx = row.partition_point(|&c| c <= u).min(row.len() - 1);
        if idx == row.len() - 1 {
            State::Origin
        } else {
            State::Ray { ray, index: idx }
        }
    }

    fn holding_rate(&self, state: State) -> T {
        match state {
            State::Origin => self.q_origin,
            State::Ray { ray, index } => self.tables[ray].total[index],
        }
    }

    /// One excursion started from the entrance distribution of `class`,
    /// returned as its sojourns up to the return to `o`.
    pub fn sample_excursion(&self, class: usize, rng: &mut RngStream) -> Result<Vec<Sojourn<T>>> {
        let ray = self.ray_for_class(class)?;
        let r = ray.entry_total();
        let u = rng.uniform_open::<T>() * r;
        let mut acc = T::zero();
        let mut start = ray.len() - 1;
        for (x, &w) in ray.entry_rates.iter().enumerate() {
            acc += w;
            if u < acc {
                start = x;
                break;
            }
        }
        let mut state = State::Ray {
            ray: class - 1,
            index: start,
        };
        let mut out = Vec::new();
        while let State::Ray { ray, index } = state {
            let duration = rng.exponential_rate(self.holding_rate(state));
            out.push(Sojourn { state, duration });
            state = self.pick_jump(ray, index, rng);
        }
        Ok(out)
    }
}

/// Stopping rule for [`simulate_path`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule<T> {
    /// Stop at the return to `o` that completes excursion number `n`.
    Excursions(usize),
    /// Stop at path time `t` (the running sojourn is cut).
    Horizon(T),
    /// Stop when the time spent at `o` (the local time) reaches `s`.
    LocalTime(T),
}

/// Exact event-driven simulation of the chain from `o`.
pub fn simulate_path<T: Real>(model: &StarChainModel<T>, stop: StopRule<T>, rng: &mut RngStream) -> Result<Path<T>> {
    match stop {
        StopRule::Excursions(0) => return domain("number of excursions must be positive"),
        StopRule::Horizon(h) if !(h > T::zero()) => return domain(format!("horizon must be positive, got {h}")),
        StopRule::LocalTime(s) if !(s > T::zero()) => return domain(format!("local time must be positive, got {s}")),
        _ => {}
    }
    let mut path = Path::default();
    let mut state = State::Origin;
    let mut clock = T::zero();
    let mut local = T::zero();
    let mut completed = 0usize;
    loop {
        let mut duration = rng.exponential_rate(model.holding_rate(state));
        let mut stop_now = false;
        if let StopRule::Horizon(h) = stop {
            if clock + duration >= h {
                duration = h - clock;
                stop_now = true;
                path.truncated = true;
            }
        }
        if let (StopRule::LocalTime(s), State::Origin) = (stop, state) {
            if local + duration >= s {
                duration = s - local;
                stop_now = true;
                path.truncated = true;
            }
        }
        if duration > T::zero() || !stop_now {
            path.sojourns.push(Sojourn { state, duration });
        }
        if stop_now {
            return Ok(path);
        }
        clock += duration;
        state = match state {
            State::Origin => {
                local += duration;
                model.pick_entry(rng)
            }
            State::Ray { ray, index } => {
                let next = model.pick_jump(ray, index, rng);
                if next.is_origin() {
                    completed += 1;
                    if stop == StopRule::Excursions(completed) {
                        return Ok(path);
                    }
                }
                next
            }
        };
    }
}

/// `φ(x) = E_x[exp(-q τ_o)]` for every state of the ray.
pub fn hitting_laplace<T: Real>(ray: &RaySpec<T>, q: T) -> Result<Vec<T>> {
    let one_minus = hitting_laplace_complement(ray, q)?;
    Ok(one_minus.into_iter().map(|u| T::one() - u).collect())
}

/// `1 - φ(x)`, obtained directly from `M (1-φ) = q·1` to avoid cancellation
/// at small `q`.
pub fn hitting_laplace_complement<T: Real>(ray: &RaySpec<T>, q: T) -> Result<Vec<T>> {
    if !(q >= T::zero()) {
        return domain(format!("Laplace argument must be nonnegative, got {q}"));
    }
    let n = ray.len();
    if q == T::zero() {
        Lu::factor(n, ray.resolvent_matrix(T::zero()))?;
        return Ok(vec![T::zero(); n]);
    }
    let lu = Lu::factor(n, ray.resolvent_matrix(q))?;
    Ok(lu.solve(&vec![q; n]))
}

/// `E_x[τ_o]` for every state of the ray.
pub fn mean_hitting<T: Real>(ray: &RaySpec<T>) -> Result<Vec<T>> {
    let n = ray.len();
    let lu = Lu::factor(n, ray.resolvent_matrix(T::zero()))?;
    Ok(lu.solve(&vec![T::one(); n]))
}

/// Laplace exponent of the class lifetime measure:
/// `Ψ(q) = r_i Σ_x μ_i(x) (1 - φ_x(q))`.
pub fn class_lifetime_exponent<T: Real>(model: &StarChainModel<T>, class: usize, q: T) -> Result<T> {
    let ray = model.ray_for_class(class)?;
    let u = hitting_laplace_complement(ray, q)?;
    Ok(ray
        .entry_rates
        .iter()
        .zip(&u)
        .fold(T::zero(), |acc, (&w, &v)| acc + w * v))
}

/// Mean lifetime mass `m_i = r_i Σ_x μ_i(x) E_x[τ_o]`.
pub fn lifetime_mean_measure<T: Real>(model: &StarChainModel<T>, class: usize) -> Result<T> {
    let ray = model.ray_for_class(class)?;
    let h = mean_hitting(ray)?;
    Ok(ray
        .entry_rates
        .iter()
        .zip(&h)
        .fold(T::zero(), |acc, (&w, &v)| acc + w * v))
}

/// Survival `P_{μ_i}(τ_o > t)` of the class lifetime, by uniformization.
pub fn lifetime_survival<T: Real>(model: &StarChainModel<T>, class: usize, t: T) -> Result<T> {
    let ray = model.ray_for_class(class)?;
    if !(t >= T::zero()) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    let n = ray.len();
    let totals = ray.total_rates();
    let lambda = totals.iter().fold(T::zero(), |m, &v| m.max(v));
    // substochastic jump matrix of the uniformized chain restricted to the ray
    let mut p = vec![T::zero(); n * n];
    for x in 0..n {
        for y in 0..n {
            p[x * n + y] = if x == y {
                T::one() - totals[x] / lambda
            } else {
                ray.internal_rates[x][y] / lambda
            };
        }
    }
    let mut dist = ray.entrance_distribution();
    let lt = lambda * t;
    let mut weight = (-lt).exp();
    let mut survival = T::zero();
    let mut k = 0usize;
    let mut cumulative_weight = T::zero();
    let tol = T::epsilon();
    loop {
        let mass = dist.iter().fold(T::zero(), |a, &b| a + b);
        survival += weight * mass;
        cumulative_weight += weight;
        if T::one() - cumulative_weight < tol || mass < tol || k > 100_000 {
            break;
        }
        k += 1;
        let mut next = vec![T::zero(); n];
        for x in 0..n {
            if dist[x] != T::zero() {
                for y in 0..n {
                    next[y] += dist[x] * p[x * n + y];
                }
            }
        }
        dist = next;
        weight = weight * lt / T::from_usize(k).expect("index");
    }
    Ok(survival)
}
