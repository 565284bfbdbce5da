//! Time change of a path by per-class subordinators, and the Williams reconstruction.
//!
//! Two routes produce the transformed process. The direct route replaces
//! every sojourn of a path by the increment of the subordinator assigned to
//! its class. The atom route marks each excursion lifetime with one
//! subordinator increment and rebuilds occupation times from the cumulative
//! lifetime processes `Γ^{(i)}` through Williams' inversion formula. Both
//! routes draw from the same per-excursion streams, so they can be compared
//! realization by realization.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::format::g17;
use crate::ledger::ExcursionLedger;
use crate::rng::RngStream;
use crate::scalar::{from_usize, to_f64, Real};
use crate::star_chain::{class_lifetime_exponent, Path, Sojourn, StarChainModel, State};
use crate::stepped::SteppedProcess;
use crate::subordinator::{laplace_exponent, subordinator_increment, SubordinatorSpec};

/// Assignment `f` of classes `0..=n` to subordinator labels, plus the specs.
///
/// Classes sharing a label share one subordinator; since only increments
/// over disjoint occupation intervals are ever drawn, each draw from the
/// label's spec is an increment of that single process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
#[serde(try_from = "RawClassMap<T>", into = "RawClassMap<T>")]
pub struct ClassMap<T> {
    assign: Vec<String>,
    subordinators: BTreeMap<String, SubordinatorSpec<T>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct RawClassMap<T> {
    assign: Vec<String>,
    subordinators: BTreeMap<String, SubordinatorSpec<T>>,
}

impl<T: Real> TryFrom<RawClassMap<T>> for ClassMap<T> {
    type Error = Error;

    fn try_from(raw: RawClassMap<T>) -> Result<Self> {
        ClassMap::new(raw.assign, raw.subordinators)
    }
}

impl<T: Real> From<ClassMap<T>> for RawClassMap<T> {
    fn from(map: ClassMap<T>) -> Self {
        RawClassMap {
            assign: map.assign,
            subordinators: map.subordinators,
        }
    }
}

impl<T: Real> ClassMap<T> {
    /// `assign[i]` is the label of class `i` (class 0 is `o`).
    pub fn new(assign: Vec<String>, subordinators: BTreeMap<String, SubordinatorSpec<T>>) -> Result<Self> {
        if assign.is_empty() {
            return domain("class map must assign class 0");
        }
        if let Some(missing) = assign.iter().find(|l| !subordinators.contains_key(*l)) {
            return domain(format!("label '{missing}' has no subordinator spec"));
        }
        Ok(Self { assign, subordinators })
    }

    /// The same spec for every class `0..=n_classes`.
    pub fn homogeneous(n_classes: usize, spec: SubordinatorSpec<T>) -> Self {
        let mut subordinators = BTreeMap::new();
        subordinators.insert("z".to_string(), spec);
        Self {
            assign: vec!["z".to_string(); n_classes + 1],
            subordinators,
        }
    }

    /// One label per class, `c0, c1, ...`, with the given specs.
    pub fn per_class(specs: Vec<SubordinatorSpec<T>>) -> Self {
        let assign: Vec<String> = (0..specs.len()).map(|i| format!("c{i}")).collect();
        let subordinators = assign.iter().cloned().zip(specs).collect();
        Self { assign, subordinators }
    }

    /// Number of ray classes covered (excluding class 0).
    pub fn n_classes(&self) -> usize {
        self.assign.len() - 1
    }

    pub fn label(&self, class: usize) -> &str {
        &self.assign[class]
    }

    pub fn spec(&self, class: usize) -> &SubordinatorSpec<T> {
        &self.subordinators[&self.assign[class]]
    }

    pub fn subordinators(&self) -> &BTreeMap<String, SubordinatorSpec<T>> {
        &self.subordinators
    }

    /// Checks that the map is total for the model's classes.
    pub fn check_model(&self, model: &StarChainModel<T>) -> Result<()> {
        if self.assign.len() != model.n_classes() + 1 {
            return domain(format!(
                "class map covers {} classes but the model has {} rays",
                self.assign.len() - 1,
                model.n_classes()
            ));
        }
        Ok(())
    }
}

/// Stream used for the holding before atom `k` and for the sojourns of
/// excursion `k`; index `len` covers the trailing holding.
pub fn atom_stream(base: &RngStream, k: usize) -> RngStream {
    base.substream(k as u64)
}

/// Fills `ζ*` and the marked holdings. With retained sojourns the mark is
/// the sum of per-sojourn increments, otherwise one increment over `ζ`.
pub fn mark_lifetimes<T: Real>(
    ledger: &ExcursionLedger<T>,
    class_map: &ClassMap<T>,
    base: &RngStream,
) -> Result<ExcursionLedger<T>> {
    if class_map.n_classes() != ledger.n_classes {
        return domain("class map does not match the ledger's classes");
    }
    let mut marked = ledger.clone();
    let hold_spec = class_map.spec(0);
    for (k, atom) in marked.atoms.iter_mut().enumerate() {
        let mut rng = atom_stream(base, k);
        atom.holding_star = Some(subordinator_increment(hold_spec, atom.holding_before, &mut rng)?);
        let spec = class_map.spec(atom.class);
        let star = match &atom.sojourns {
            Some(parts) => {
                let mut acc = T::zero();
                for &d in parts {
                    acc += subordinator_increment(spec, d, &mut rng)?;
                }
                acc
            }
            None => subordinator_increment(spec, atom.zeta, &mut rng)?,
        };
        atom.zeta_star = Some(star);
    }
    let mut rng = atom_stream(base, marked.atoms.len());
    marked.trailing_star = Some(subordinator_increment(hold_spec, marked.trailing_holding, &mut rng)?);
    Ok(marked)
}

/// Output of the direct path transform.
#[derive(Debug, Clone)]
pub struct Transformed<T> {
    /// `T` over path time, recorded at sojourn boundaries, when requested.
    pub clock: Option<SteppedProcess<T>>,
    /// The transformed path `X* = X∘A`.
    pub path: Path<T>,
}

/// Draws the random clock sojourn by sojourn and returns `X*`, whose
/// sojourns are the clock increments over the sojourns of `X`.
pub fn build_clock_and_transform<T: Real>(
    path: &Path<T>,
    class_map: &ClassMap<T>,
    base: &RngStream,
    keep_clock: bool,
) -> Result<Transformed<T>> {
    let mut clock = keep_clock.then(|| SteppedProcess::starting_at(T::zero(), T::zero()));
    let mut out = Path {
        sojourns: Vec::with_capacity(path.sojourns.len()),
        truncated: path.truncated,
    };
    let mut excursion_index = 0usize;
    let mut rng = atom_stream(base, 0);
    let mut prev_origin = true;
    let mut t = T::zero();
    let mut total = T::zero();
    for soj in &path.sojourns {
        let at_origin = soj.state.is_origin();
        if at_origin && !prev_origin {
            excursion_index += 1;
            rng = atom_stream(base, excursion_index);
        }
        prev_origin = at_origin;
        if soj.state.class() > class_map.n_classes() {
            return domain("path visits a class missing from the class map");
        }
        let inc = subordinator_increment(class_map.spec(soj.state.class()), soj.duration, &mut rng)?;
        t += soj.duration;
        total += inc;
        if let Some(c) = clock.as_mut() {
            c.push(t, total, total);
        }
        out.sojourns.push(Sojourn {
            state: soj.state,
            duration: inc,
        });
    }
    Ok(Transformed { clock, path: out })
}

/// Cumulative marked lifetimes in local time: `Γ^{(0)}` (marked holdings)
/// and `Γ^{(i)}` for every ray class.
#[derive(Debug, Clone)]
pub struct GammaFamily<T> {
    /// Index 0 is `Γ^{(0)}`, index `i` is `Γ^{(i)}`.
    pub processes: Vec<SteppedProcess<T>>,
    /// Ledger indices of the atoms contributing to each class.
    pub atoms_by_class: Vec<Vec<usize>>,
    pub local_time_total: T,
    /// `T(η)` at the end of the sample; the transformed duration.
    pub duration_total: T,
}

pub fn gamma_family<T: Real>(ledger: &ExcursionLedger<T>) -> Result<GammaFamily<T>> {
    if !ledger.is_marked() {
        return Err(Error::State("ledger must be marked before building Γ".into()));
    }
    let n = ledger.n_classes;
    let mut processes: Vec<SteppedProcess<T>> = (0..=n)
        .map(|_| SteppedProcess::starting_at(T::zero(), T::zero()))
        .collect();
    let mut atoms_by_class = vec![Vec::new(); n + 1];
    let mut hold_cum = T::zero();
    let mut total = T::zero();
    for (k, atom) in ledger.atoms.iter().enumerate() {
        let h = atom.holding_star.expect("marked");
        let z = atom.zeta_star.expect("marked");
        hold_cum += h;
        total += h + z;
        processes[0].push(atom.s, hold_cum, hold_cum);
        processes[atom.class].flat_then_jump(atom.s, z);
        atoms_by_class[atom.class].push(k);
    }
    let trailing = ledger.trailing_star.expect("marked");
    hold_cum += trailing;
    total += trailing;
    let s_end = ledger.local_time_total();
    processes[0].push(s_end, hold_cum, hold_cum);
    for p in processes.iter_mut().skip(1) {
        p.flat_then_jump(s_end, T::zero());
    }
    Ok(GammaFamily {
        processes,
        atoms_by_class,
        local_time_total: s_end,
        duration_total: total,
    })
}

impl<T: Real> GammaFamily<T> {
    pub fn n_classes(&self) -> usize {
        self.processes.len() - 1
    }

    /// `Σ_{i=0..n} Γ^{(i)}(s)`, which equals `T(η_s)`.
    pub fn total_at(&self, s: T) -> T {
        self.processes.iter().fold(T::zero(), |acc, p| acc + p.eval(s))
    }

    /// Builds `W(u) = u + Σ_{k≠i} Γ^{(k)}(Λ^{(i)}_u)`, the inverse of the
    /// class-`i` occupation time, with `Λ^{(i)}` the right inverse of `Γ^{(i)}`.
    pub fn williams_inverse_occupation(&self, class: usize) -> Result<SteppedProcess<T>> {
        if class > self.n_classes() {
            return domain(format!("class {class} out of range"));
        }
        let own = &self.processes[class];
        let others_at = |s: T| {
            self.processes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != class)
                .fold(T::zero(), |acc, (_, p)| acc + p.eval(s))
        };
        let others_left = |s: T| {
            self.processes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != class)
                .fold(T::zero(), |acc, (_, p)| acc + p.eval_left(s))
        };
        let lambda = |u: T| own.inverse(u).unwrap_or(self.local_time_total);
        let u_end = own.final_value();
        let mut w = SteppedProcess::starting_at(T::zero(), T::zero());
        if class == 0 {
            // Λ^{(0)} is continuous: W jumps where Γ^{(0)} reaches an atom time
            for knot in own.knots().iter().skip(1) {
                let u = knot.right;
                let s = lambda(u);
                w.push(u, u + others_left(s), u + others_at(s));
            }
            let s = self.local_time_total;
            w.push(u_end, u_end + others_left(s), u_end + others_at(s));
        } else {
            // Γ^{(i)} is pure jump: Λ^{(i)} is a step function jumping at the
            // left limits of Γ^{(i)}'s jumps
            let mut prev: Option<(T, T)> = None;
            for knot in own.knots().iter().filter(|k| k.right > k.left) {
                let u = knot.left;
                let s = lambda(u);
                let left = match prev {
                    None => T::zero(),
                    Some((_, s_prev)) => u + others_at(s_prev),
                };
                w.push(u, left, u + others_at(s));
                prev = Some((u, s));
            }
            let left = match prev {
                None => T::zero(),
                Some((_, s_prev)) => u_end + others_at(s_prev),
            };
            w.push(u_end, left, u_end + others_at(self.local_time_total));
        }
        Ok(w)
    }

    /// `O^{*,(i)}(t)` through Williams' formula.
    pub fn occupation_via_williams(&self, class: usize, t: T) -> Result<T> {
        let w = self.williams_inverse_occupation(class)?;
        invert_williams(&w, t)
    }

    /// `O^{*,(i)}` on a grid, building `W` once.
    pub fn occupation_via_williams_grid(&self, class: usize, grid: &[T]) -> Result<Vec<T>> {
        let w = self.williams_inverse_occupation(class)?;
        grid.iter().map(|&t| invert_williams(&w, t)).collect()
    }
}

fn invert_williams<T: Real>(w: &SteppedProcess<T>, t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    match w.inverse(t) {
        Some(u) => Ok(u),
        None if t <= w.final_value() => Ok(w.t_max()),
        None => Err(Error::Range(format!(
            "time {t} exceeds the transformed duration {} of the sample",
            w.final_value()
        ))),
    }
}

/// Occupation curves `O^{*,(i)}(t)` for `i = 0..=n` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationCurves<T> {
    pub t: Vec<T>,
    /// `by_class[i][k] = O^{*,(i)}(t[k])`.
    pub by_class: Vec<Vec<T>>,
}

impl<T: Real> OccupationCurves<T> {
    /// CSV with columns `t,O0,...,On`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((0..self.by_class.len()).map(|i| format!("O{i}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (k, &t) in self.t.iter().enumerate() {
            let mut row = vec![g17(to_f64(t))];
            row.extend(self.by_class.iter().map(|c| g17(to_f64(c[k]))));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Time spent in each class by the path up to every grid time.
pub fn occupation_from_path<T: Real>(x_star: &Path<T>, n_classes: usize, t_grid: &[T]) -> Result<OccupationCurves<T>> {
    let duration = x_star.duration();
    if let Some(&bad) = t_grid.iter().find(|&&t| !(t >= T::zero() && t <= duration)) {
        return domain(format!("grid time {bad} outside [0, {duration}]"));
    }
    let mut order: Vec<usize> = (0..t_grid.len()).collect();
    order.sort_by(|&a, &b| t_grid[a].partial_cmp(&t_grid[b]).expect("finite grid"));
    let mut by_class = vec![vec![T::zero(); t_grid.len()]; n_classes + 1];
    let mut occupied = vec![T::zero(); n_classes + 1];
    let mut start = T::zero();
    let mut j = 0usize;
    for &g in &order {
        let t = t_grid[g];
        while j < x_star.sojourns.len() && start + x_star.sojourns[j].duration <= t {
            let s = x_star.sojourns[j];
            occupied[s.state.class()] += s.duration;
            start += s.duration;
            j += 1;
        }
        for (c, col) in by_class.iter_mut().enumerate() {
            col[g] = occupied[c];
        }
        if j < x_star.sojourns.len() {
            let c = x_star.sojourns[j].state.class();
            by_class[c][g] += t - start;
        }
    }
    Ok(OccupationCurves {
        t: t_grid.to_vec(),
        by_class,
    })
}

/// `Ψ^{*,(i)}(q) = Ψ^{(i)}(ψ^{(f(i))}(q))`.
pub fn composed_exponent_oracle<T: Real>(
    model: &StarChainModel<T>,
    class_map: &ClassMap<T>,
    class: usize,
    q: T,
) -> Result<T> {
    class_map.check_model(model)?;
    let inner = laplace_exponent(class_map.spec(class), q)?;
    class_lifetime_exponent(model, class, inner)
}

/// Laplace exponent of `T∘η`: `c·ψ^{(f(0))}(q) + Σ_i Ψ^{(i)}(ψ^{(f(i))}(q))`.
pub fn full_clock_exponent_oracle<T: Real>(model: &StarChainModel<T>, class_map: &ClassMap<T>, q: T) -> Result<T> {
    class_map.check_model(model)?;
    let mut value = model.stagnancy() * laplace_exponent(class_map.spec(0), q)?;
    for class in 1..=model.n_classes() {
        value += composed_exponent_oracle(model, class_map, class, q)?;
    }
    Ok(value)
}

/// Monte Carlo estimate of `n^{*,(i)}(ζ > h) = r_i P(Z^{(f(i))}(ζ) > h)`
/// with its standard error.
pub fn transformed_tail_oracle<T: Real>(
    model: &StarChainModel<T>,
    class_map: &ClassMap<T>,
    class: usize,
    h: T,
    n_mc: usize,
    rng: &mut RngStream,
) -> Result<(T, T)> {
    class_map.check_model(model)?;
    let r = model.ray_for_class(class)?.entry_total();
    if !(h >= T::zero()) {
        return domain(format!("threshold must be nonnegative, got {h}"));
    }
    if h == T::zero() {
        return Ok((r, T::zero()));
    }
    if n_mc == 0 {
        return domain("Monte Carlo size must be positive");
    }
    let spec = class_map.spec(class);
    let mut hits = 0usize;
    for _ in 0..n_mc {
        let zeta = model
            .sample_excursion(class, rng)?
            .iter()
            .fold(T::zero(), |acc, s| acc + s.duration);
        if subordinator_increment(spec, zeta, rng)? > h {
            hits += 1;
        }
    }
    let n = from_usize::<T>(n_mc);
    let p = from_usize::<T>(hits) / n;
    Ok((r * p, r * (p * (T::one() - p) / n).sqrt()))
}

/// One piece of a transformed trajectory at excursion resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece<T> {
    /// 0 for a holding at `o`, otherwise the excursion class.
    pub class: usize,
    pub start: T,
    pub duration: T,
    /// Local time accrued during the piece (the original holding time).
    pub local: T,
}

/// Transformed trajectory as alternating holdings and excursions.
#[derive(Debug, Clone, PartialEq)]
pub struct Timeline<T> {
    pub pieces: Vec<Piece<T>>,
    pub n_classes: usize,
    // occupation per class and local time at each piece start
    occupied: Vec<Vec<T>>,
    local_at_start: Vec<T>,
}

/// Simulates `X*` excursion by excursion until its time exceeds `horizon`.
pub fn simulate_timeline<T: Real>(
    model: &StarChainModel<T>,
    class_map: &ClassMap<T>,
    horizon: T,
    rng: &mut RngStream,
) -> Result<Timeline<T>> {
    class_map.check_model(model)?;
    if !(horizon > T::zero()) {
        return domain(format!("horizon must be positive, got {horizon}"));
    }
    let n = model.n_classes();
    let hold_spec = class_map.spec(0);
    let q_o = model.q_origin();
    let rates: Vec<T> = model.rays().iter().map(|r| r.entry_total()).collect();
    let mut tl = Timeline {
        pieces: Vec::new(),
        n_classes: n,
        occupied: Vec::new(),
        local_at_start: Vec::new(),
    };
    while tl.duration() <= horizon {
        let hold = rng.exponential_rate(q_o);
        let hold_star = subordinator_increment(hold_spec, hold, rng)?;
        tl.push(0, hold_star, hold);
        if tl.duration() > horizon {
            break;
        }
        let u = rng.uniform_open::<T>() * q_o;
        let mut acc = T::zero();
        let mut class = n;
        for (i, &r) in rates.iter().enumerate() {
            acc += r;
            if u < acc {
                class = i + 1;
                break;
            }
        }
        let spec = class_map.spec(class);
        let mut zeta_star = T::zero();
        for s in model.sample_excursion(class, rng)? {
            zeta_star += subordinator_increment(spec, s.duration, rng)?;
        }
        tl.push(class, zeta_star, T::zero());
    }
    Ok(tl)
}

impl<T: Real> Timeline<T> {
    fn push(&mut self, class: usize, duration: T, local: T) {
        let (start, occ, local_start) = match self.pieces.last() {
            None => (T::zero(), vec![T::zero(); self.n_classes + 1], T::zero()),
            Some(p) => {
                let mut occ = self.occupied.last().expect("parallel vectors").clone();
                occ[p.class] += p.duration;
                (
                    p.start + p.duration,
                    occ,
                    *self.local_at_start.last().expect("parallel vectors") + p.local,
                )
            }
        };
        self.pieces.push(Piece {
            class,
            start,
            duration,
            local,
        });
        self.occupied.push(occ);
        self.local_at_start.push(local_start);
    }

    pub fn duration(&self) -> T {
        self.pieces.last().map_or(T::zero(), |p| p.start + p.duration)
    }

    fn locate(&self, t: T) -> Result<usize> {
        if !(t >= T::zero() && t < self.duration()) {
            return Err(Error::Range(format!("time {t} outside the simulated span")));
        }
        Ok(self.pieces.partition_point(|p| p.start <= t) - 1)
    }

    /// `O^{*,(i)}(t)` for every class.
    pub fn occupation(&self, t: T) -> Result<Vec<T>> {
        let k = self.locate(t)?;
        let mut occ = self.occupied[k].clone();
        occ[self.pieces[k].class] += t - self.pieces[k].start;
        Ok(occ)
    }

    /// Local time `L(A_t)`, interpolated linearly inside a holding (exact
    /// when class 0 is driven by a pure drift).
    pub fn local_time(&self, t: T) -> Result<T> {
        let k = self.locate(t)?;
        let p = &self.pieces[k];
        let mut l = self.local_at_start[k];
        if p.class == 0 && p.duration > T::zero() {
            l += p.local * (t - p.start) / p.duration;
        }
        Ok(l)
    }

    /// `G*_t`, the last time at or before `t` spent at `o`.
    pub fn last_zero(&self, t: T) -> Result<T> {
        let k = self.locate(t)?;
        let p = &self.pieces[k];
        Ok(if p.class == 0 { t } else { p.start })
    }

    /// `D*_t`, the first time after `t` spent at `o`.
    pub fn next_zero(&self, t: T) -> Result<T> {
        let k = self.locate(t)?;
        let p = &self.pieces[k];
        Ok(if p.class == 0 { t } else { p.start + p.duration })
    }
}

/// Lossless conversion of an excursion-level timeline into a path.
impl<T: Real> From<&Timeline<T>> for Path<T> {
    fn from(tl: &Timeline<T>) -> Self {
        Path {
            sojourns: tl
                .pieces
                .iter()
                .map(|p| Sojourn {
                    state: if p.class == 0 {
                        State::Origin
                    } else {
                        State::Ray {
                            ray: p.class - 1,
                            index: 0,
                        }
                    },
                    duration: p.duration,
                })
                .collect(),
            truncated: true,
        }
    }
}
