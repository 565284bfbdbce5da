//! The excursion point process read off a simulated path.

use std::io::{self, Write};

use crate::error::{domain, Error, Result};
use crate::format::g17;
use crate::scalar::{to_f64, Real};
use crate::star_chain::{Path, StarChainModel};

/// One excursion away from `o`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionAtom<T> {
    /// Local time at the start of the excursion.
    pub s: T,
    /// Excursion class, `1..=n`.
    pub class: usize,
    /// Lifetime.
    pub zeta: T,
    /// Lifetime after the time change, once marked.
    pub zeta_star: Option<T>,
    /// Time spent at `o` immediately before the excursion.
    pub holding_before: T,
    /// Marked (time-changed) duration of that holding.
    pub holding_star: Option<T>,
    /// Sojourn durations inside the excursion, if retained.
    pub sojourns: Option<Vec<T>>,
}

/// Ordered excursion atoms plus the bookkeeping needed to audit totals.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionLedger<T> {
    pub atoms: Vec<ExcursionAtom<T>>,
    /// Time at `o` after the last complete excursion.
    pub trailing_holding: T,
    pub trailing_star: Option<T>,
    /// Stagnancy rate (1 for chains, local time = time at `o`).
    pub stagnancy: T,
    pub n_classes: usize,
    /// Incomplete final excursions dropped from the ledger.
    pub dropped_incomplete: usize,
    pub dropped_duration: T,
}

/// Splits a path into excursion atoms. An excursion cut by the horizon is
/// dropped and counted.
pub fn extract_excursions<T: Real>(
    path: &Path<T>,
    model: &StarChainModel<T>,
    retain_sojourns: bool,
) -> Result<ExcursionLedger<T>> {
    match path.sojourns.first() {
        Some(s) if s.state.is_origin() => {}
        Some(_) => return domain("path must start at o"),
        None => {}
    }
    let mut ledger = ExcursionLedger {
        atoms: Vec::new(),
        trailing_holding: T::zero(),
        trailing_star: None,
        stagnancy: model.stagnancy(),
        n_classes: model.n_classes(),
        dropped_incomplete: 0,
        dropped_duration: T::zero(),
    };
    let mut local = T::zero();
    let mut pending_hold = T::zero();
    let mut k = 0;
    let n = path.sojourns.len();
    while k < n {
        let soj = path.sojourns[k];
        if soj.state.is_origin() {
            pending_hold += soj.duration;
            k += 1;
            continue;
        }
        let class = soj.state.class();
        let mut zeta = T::zero();
        let mut parts = Vec::new();
        while k < n && !path.sojourns[k].state.is_origin() {
            let inner = path.sojourns[k];
            if inner.state.class() != class {
                return Err(Error::Model(format!(
                    "excursion starting in class {class} visits class {} without returning to o",
                    inner.state.class()
                )));
            }
            zeta += inner.duration;
            if retain_sojourns {
                parts.push(inner.duration);
            }
            k += 1;
        }
        if k == n && path.truncated {
            ledger.dropped_incomplete += 1;
            ledger.dropped_duration = zeta;
            break;
        }
        local += pending_hold;
        ledger.atoms.push(ExcursionAtom {
            s: local,
            class,
            zeta,
            zeta_star: None,
            holding_before: pending_hold,
            holding_star: None,
            sojourns: retain_sojourns.then_some(parts),
        });
        pending_hold = T::zero();
    }
    ledger.trailing_holding = pending_hold;
    Ok(ledger)
}

impl<T: Real> ExcursionLedger<T> {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_marked(&self) -> bool {
        self.atoms
            .iter()
            .all(|a| a.zeta_star.is_some() && a.holding_star.is_some())
            && self.trailing_star.is_some()
    }

    /// Total local time of the sample (time spent at `o`).
    pub fn local_time_total(&self) -> T {
        self.atoms.last().map_or(T::zero(), |a| a.s) + self.trailing_holding
    }

    /// Path time accounted for by the ledger, including a dropped tail.
    pub fn total_duration(&self) -> T {
        self.atoms
            .iter()
            .fold(T::zero(), |acc, a| acc + a.holding_before + a.zeta)
            + self.trailing_holding
            + self.dropped_duration
    }

    /// `η_s = c·s + Σ_{s_k ≤ s} ζ_k`.
    pub fn inverse_local_time(&self, s: T) -> T {
        let upto = self.atoms.partition_point(|a| a.s <= s);
        self.atoms[..upto]
            .iter()
            .fold(self.stagnancy * s, |acc, a| acc + a.zeta)
    }

    /// Counts of atoms with lifetime above `h` in each local-time window
    /// `[a, b)`, indexed `[window][class - 1]`.
    pub fn window_counts(&self, windows: &[(T, T)], h: T, use_marked: bool) -> Result<Vec<Vec<u64>>> {
        window_counts(self, windows, h, use_marked)
    }

    /// Writes the ledger as CSV (`index,s,class,zeta,zeta_star,holding_before`).
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,s,class,zeta,zeta_star,holding_before")?;
        for (k, a) in self.atoms.iter().enumerate() {
            let star = a.zeta_star.map(|z| g17(to_f64(z))).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                k,
                g17(to_f64(a.s)),
                a.class,
                g17(to_f64(a.zeta)),
                star,
                g17(to_f64(a.holding_before))
            )?;
        }
        Ok(())
    }
}

pub fn window_counts<T: Real>(
    ledger: &ExcursionLedger<T>,
    windows: &[(T, T)],
    h: T,
    use_marked: bool,
) -> Result<Vec<Vec<u64>>> {
    if !(h >= T::zero()) {
        return domain(format!("lifetime threshold must be nonnegative, got {h}"));
    }
    let mut order: Vec<usize> = (0..windows.len()).collect();
    order.sort_by(|&a, &b| windows[a].0.partial_cmp(&windows[b].0).expect("finite window"));
    for (k, &w) in order.iter().enumerate() {
        let (a, b) = windows[w];
        if !(a <= b) {
            return domain(format!("window {w} has start after end"));
        }
        if k > 0 && windows[order[k - 1]].1 > a {
            return domain("local-time windows overlap");
        }
    }
    if use_marked && ledger.atoms.iter().any(|a| a.zeta_star.is_none()) {
        return Err(Error::State("ledger has not been marked".into()));
    }
    let mut counts = vec![vec![0u64; ledger.n_classes]; windows.len()];
    for (w, &(a, b)) in windows.iter().enumerate() {
        let lo = ledger.atoms.partition_point(|x| x.s < a);
        let hi = ledger.atoms.partition_point(|x| x.s < b);
        for atom in &ledger.atoms[lo..hi] {
            let life = if use_marked {
                atom.zeta_star.expect("checked")
            } else {
                atom.zeta
            };
            if life > h {
                counts[w][atom.class - 1] += 1;
            }
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star_chain::{RaySpec, Sojourn, State};

    fn model() -> StarChainModel<f64> {
        let ray = RaySpec {
            states: vec!["x".into()],
            internal_rates: vec![vec![0.0]],
            exit_rates: vec![1.0],
            entry_rates: vec![1.0],
        };
        StarChainModel::new(vec![ray.clone(), ray]).unwrap()
    }

    fn hand_path(truncated: bool) -> Path<f64> {
        let x = State::Ray { ray: 0, index: 0 };
        let mk = |state, duration| Sojourn { state, duration };
        Path {
            sojourns: vec![mk(State::Origin, 1.0), mk(x, 2.0), mk(State::Origin, 3.0), mk(x, 4.0)],
            truncated,
        }
    }

    #[test]
    fn hand_bookkeeping() {
        let ledger = extract_excursions(&hand_path(false), &model(), false).unwrap();
        assert_eq!(ledger.len(), 2);
        let s: Vec<f64> = ledger.atoms.iter().map(|a| a.s).collect();
        let z: Vec<f64> = ledger.atoms.iter().map(|a| a.zeta).collect();
        assert_eq!(s, vec![1.0, 4.0]);
        assert_eq!(z, vec![2.0, 4.0]);
        assert_eq!(ledger.trailing_holding, 0.0);
        assert_eq!(ledger.total_duration(), 10.0);
        assert_eq!(ledger.inverse_local_time(4.0), 10.0);
        assert_eq!(ledger.inverse_local_time(2.0), 4.0);
    }

    #[test]
    fn incomplete_tail_dropped_and_counted() {
        let ledger = extract_excursions(&hand_path(true), &model(), false).unwrap();
        assert_eq!(ledger.len(), 1);
        assert_eq!(ledger.dropped_incomplete, 1);
        assert_eq!(ledger.trailing_holding, 3.0);
        assert_eq!(ledger.total_duration(), 10.0);
    }

    #[test]
    fn cross_ray_excursion_rejected() {
        let mut path = hand_path(false);
        path.sojourns.insert(
            2,
            Sojourn {
                state: State::Ray { ray: 1, index: 0 },
                duration: 1.0,
            },
        );
        assert!(matches!(
            extract_excursions(&path, &model(), false),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn window_count_edge_cases() {
        let ledger = extract_excursions(&hand_path(false), &model(), true).unwrap();
        let all = ledger.window_counts(&[(0.0, 100.0)], 0.0, false).unwrap();
        assert_eq!(all, vec![vec![2, 0]]);
        let none = ledger.window_counts(&[(0.0, 100.0)], f64::INFINITY, false).unwrap();
        assert_eq!(none, vec![vec![0, 0]]);
        let split = ledger.window_counts(&[(2.0, 5.0), (0.0, 2.0)], 3.0, false).unwrap();
        assert_eq!(split, vec![vec![1, 0], vec![0, 0]]);
        assert!(ledger.window_counts(&[(0.0, 2.0), (1.0, 3.0)], 0.0, false).is_err());
        assert!(matches!(
            ledger.window_counts(&[(0.0, 2.0)], 0.0, true),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let ledger = extract_excursions(&hand_path(false), &model(), false).unwrap();
        let mut buf = Vec::new();
        ledger.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "index,s,class,zeta,zeta_star,holding_before\n0,1,1,2,,1\n1,4,1,4,,3\n"
        );
    }
}
