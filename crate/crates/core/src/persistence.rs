//! Persistence diagrams by standard boundary-matrix reduction over the
//! two-element field.

use std::collections::HashMap;

use crate::complex::symmetric_difference;
use crate::error::{Error, Result};
use crate::filtration::Filtration;

/// A class born at `birth` and dying at `death` (`+∞` for essential classes),
/// repeated `multiplicity` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub degree: usize,
    pub birth: f64,
    pub death: f64,
    pub multiplicity: usize,
}

impl PersistencePair {
    pub fn new(degree: usize, birth: f64, death: f64) -> Self {
        PersistencePair {
            degree,
            birth,
            death,
            multiplicity: 1,
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn lifespan(&self) -> f64 {
        self.death - self.birth
    }
}

/// The reduced diagram: off-diagonal pairs only. The diagonal, with its
/// infinite multiplicity, is added implicitly when diagrams are matched.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates, drops zero-lifespan pairs, merges equal pairs into
    /// multiplicities and sorts by `(degree, birth, death)`.
    pub fn new(pairs: impl IntoIterator<Item = PersistencePair>) -> Result<Self> {
        let mut merged: Vec<PersistencePair> = Vec::new();
        for p in pairs {
            if !p.birth.is_finite() || p.death.is_nan() || p.death == f64::NEG_INFINITY {
                return Err(Error::invalid(format!("invalid pair ({}, {})", p.birth, p.death)));
            }
            if p.birth > p.death {
                return Err(Error::invalid(format!(
                    "birth {} exceeds death {}",
                    p.birth, p.death
                )));
            }
            if p.multiplicity == 0 {
                return Err(Error::invalid("pair multiplicity must be positive"));
            }
            if p.birth == p.death {
                continue;
            }
            merged.push(p);
        }
        merged.sort_by(|a, b| {
            a.degree
                .cmp(&b.degree)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        let mut out: Vec<PersistencePair> = Vec::with_capacity(merged.len());
        for p in merged {
            match out.last_mut() {
                Some(q) if q.degree == p.degree && q.birth == p.birth && q.death == p.death => {
                    q.multiplicity += p.multiplicity;
                }
                _ => out.push(p),
            }
        }
        Ok(PersistenceDiagram { pairs: out })
    }

    /// Always true: stored diagrams never contain diagonal points.
    pub fn is_reduced(&self) -> bool {
        true
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn degree(&self, k: usize) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(move |p| p.degree == k)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.pairs.iter().map(|p| p.degree).max()
    }

    /// Finite `(birth, death)` points of degree `k`, expanded by multiplicity.
    pub fn finite_points(&self, k: usize) -> Vec<(f64, f64)> {
        self.degree(k)
            .filter(|p| !p.is_essential())
            .flat_map(|p| std::iter::repeat_n((p.birth, p.death), p.multiplicity))
            .collect()
    }

    /// Births of essential classes of degree `k`, sorted, with multiplicity.
    pub fn essential_births(&self, k: usize) -> Vec<f64> {
        self.degree(k)
            .filter(|p| p.is_essential())
            .flat_map(|p| std::iter::repeat_n(p.birth, p.multiplicity))
            .collect()
    }

    /// Number of classes of degree `k`, counted with multiplicity.
    pub fn count(&self, k: usize) -> usize {
        self.degree(k).map(|p| p.multiplicity).sum()
    }
}

/// Runs the left-to-right column reduction and returns the raw pairing
/// `(birth index, Some(death index))` or `(birth index, None)` for essential
/// columns, in filtration positions.
pub fn reduce(filt: &Filtration) -> Result<Vec<(usize, Option<usize>)>> {
    filt.check()?;
    let entries = filt.entries();
    let position: HashMap<&_, usize> = entries.iter().enumerate().map(|(i, e)| (&e.simplex, i)).collect();

    let mut low_owner: Vec<Option<usize>> = vec![None; entries.len()];
    let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(entries.len());
    for (j, e) in entries.iter().enumerate() {
        let mut col: Vec<usize> = e.simplex.faces().iter().map(|f| position[f]).collect();
        col.sort_unstable();
        while let Some(&low) = col.last() {
            match low_owner[low] {
                Some(k) => col = symmetric_difference(&col, &reduced[k]),
                None => {
                    low_owner[low] = Some(j);
                    break;
                }
            }
        }
        reduced.push(col);
    }

    let mut pairs = Vec::new();
    for (j, col) in reduced.iter().enumerate() {
        if let Some(&low) = col.last() {
            pairs.push((low, Some(j)));
        } else if low_owner[j].is_none() {
            pairs.push((j, None));
        }
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// Persistence diagram of a filtration. Essential classes get death `+∞`;
/// zero-lifespan pairs are dropped.
pub fn compute_persistence(filt: &Filtration) -> Result<PersistenceDiagram> {
    let entries = filt.entries();
    let pairs = reduce(filt)?.into_iter().map(|(b, d)| {
        let birth = &entries[b];
        PersistencePair::new(
            birth.simplex.dim(),
            birth.level,
            d.map_or(f64::INFINITY, |d| entries[d].level),
        )
    });
    PersistenceDiagram::new(pairs)
}

/// `β_a^b`: classes of degree `k` born at or before `a` and still alive
/// after `b`. For `b = +∞` this counts essential classes born by `a`.
pub fn persistent_betti(d: &PersistenceDiagram, k: usize, a: f64, b: f64) -> Result<usize> {
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::invalid(format!("persistent Betti needs a <= b, got ({a}, {b})")));
    }
    Ok(d.degree(k)
        .filter(|p| p.birth <= a && (p.death > b || (b == f64::INFINITY && p.is_essential())))
        .map(|p| p.multiplicity)
        .sum())
}

/// Distinct finite critical levels of the degree-`k` classes.
fn critical_levels(d: &PersistenceDiagram, k: usize) -> Vec<f64> {
    let mut levels: Vec<f64> = d
        .degree(k)
        .flat_map(|p| [p.birth, p.death])
        .filter(|v| v.is_finite())
        .collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
}

/// `μ_a^b = β_{a+ε}^{b−ε} − β_{a−ε}^{b−ε} − β_{a+ε}^{b+ε} + β_{a−ε}^{b+ε}`,
/// with `ε` half the smallest gap between distinct values among the critical
/// levels of degree `k` together with `a` and `b`. For `b = +∞` the death-side
/// terms coincide and the formula reduces to `β_{a+ε}^{∞} − β_{a−ε}^{∞}`.
pub fn multiplicity(d: &PersistenceDiagram, k: usize, a: f64, b: f64) -> Result<usize> {
    if a.is_nan() || b.is_nan() || a >= b || a == f64::INFINITY {
        return Err(Error::invalid(format!("multiplicity needs a < b, got ({a}, {b})")));
    }
    let mut levels = critical_levels(d, k);
    levels.extend([a, b].into_iter().filter(|v| v.is_finite()));
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let min_gap = levels
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let eps = if min_gap.is_finite() { min_gap / 2.0 } else { 1.0 };
    let beta = |x: f64, y: f64| persistent_betti(d, k, x, y).map(|v| v as i64);
    let mu = if b == f64::INFINITY {
        beta(a + eps, b)? - beta(a - eps, b)?
    } else {
        beta(a + eps, b - eps)? - beta(a - eps, b - eps)? - beta(a + eps, b + eps)?
            + beta(a - eps, b + eps)?
    };
    debug_assert!(mu >= 0);
    Ok(mu.max(0) as usize)
}

/// Euler characteristic and weak Morse inequalities, with simplex counts
/// standing in for critical-point counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseReport {
    pub betti: Vec<usize>,
    pub cells: Vec<usize>,
    pub chi_betti: i64,
    pub chi_cells: i64,
    pub weak_inequalities_hold: bool,
}

impl MorseReport {
    pub fn euler_identity_holds(&self) -> bool {
        self.chi_betti == self.chi_cells
    }
}

fn alternating_sum(xs: &[usize]) -> i64 {
    xs.iter()
        .enumerate()
        .map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) })
        .sum()
}

pub fn euler_morse_check(filt: &Filtration, d: &PersistenceDiagram) -> MorseReport {
    let top = filt
        .entries()
        .iter()
        .map(|e| e.simplex.dim())
        .chain(d.max_degree())
        .max();
    let len = top.map_or(0, |t| t + 1);
    let mut cells = vec![0usize; len];
    for e in filt.entries() {
        cells[e.simplex.dim()] += 1;
    }
    let betti: Vec<usize> = (0..len).map(|k| d.essential_births(k).len()).collect();
    MorseReport {
        chi_betti: alternating_sum(&betti),
        chi_cells: alternating_sum(&cells),
        weak_inequalities_hold: betti.iter().zip(&cells).all(|(b, c)| b <= c),
        betti,
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Simplex, SimplicialComplex};
    use crate::filtration::{lower_star_filtration, FiltrationEntry, VertexField};

    fn simplex(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn entry(v: &[usize], level: f64) -> FiltrationEntry {
        FiltrationEntry { simplex: simplex(v), level }
    }

    #[test]
    fn single_vertex() {
        let f = Filtration::from_entries(vec![entry(&[0], 0.0)]);
        let d = compute_persistence(&f).unwrap();
        assert_eq!(d.pairs(), &[PersistencePair::new(0, 0.0, f64::INFINITY)]);
    }

    #[test]
    fn zero_lifespan_pairs_are_dropped() {
        let f = Filtration::from_entries(vec![entry(&[0], 0.0), entry(&[1], 1.0), entry(&[0, 1], 1.0)]);
        let d = compute_persistence(&f).unwrap();
        assert_eq!(d.pairs(), &[PersistencePair::new(0, 0.0, f64::INFINITY)]);
    }

    #[test]
    fn hollow_triangle_with_late_edges() {
        let f = Filtration::from_entries(vec![
            entry(&[0], 0.0),
            entry(&[1], 0.0),
            entry(&[2], 0.0),
            entry(&[0, 1], 1.0),
            entry(&[0, 2], 1.0),
            entry(&[1, 2], 1.0),
        ]);
        let d = compute_persistence(&f).unwrap();
        let expected = vec![
            PersistencePair { degree: 0, birth: 0.0, death: 1.0, multiplicity: 2 },
            PersistencePair::new(0, 0.0, f64::INFINITY),
            PersistencePair::new(1, 1.0, f64::INFINITY),
        ];
        assert_eq!(d.pairs(), expected.as_slice());
        assert_eq!(persistent_betti(&d, 0, 0.0, 0.5).unwrap(), 3);
        assert_eq!(persistent_betti(&d, 0, 0.0, 1.0).unwrap(), 1);
        assert_eq!(multiplicity(&d, 0, 0.0, 1.0).unwrap(), 2);
        assert_eq!(multiplicity(&d, 1, 1.0, f64::INFINITY).unwrap(), 1);
    }

    #[test]
    fn malformed_filtration_is_rejected() {
        let f = Filtration::from_entries(vec![entry(&[0], 0.0), entry(&[0, 1], 0.0), entry(&[1], 0.0)]);
        assert!(compute_persistence(&f).is_err());
    }

    #[test]
    fn persistent_betti_basics() {
        assert_eq!(persistent_betti(&PersistenceDiagram::empty(), 0, 0.0, 1.0).unwrap(), 0);
        let d = PersistenceDiagram::new([PersistencePair::new(0, 0.0, 2.0)]).unwrap();
        assert_eq!(persistent_betti(&d, 0, 1.0, 1.5).unwrap(), 1);
        assert!(persistent_betti(&d, 0, 2.0, 1.0).is_err());
    }

    #[test]
    fn multiplicity_basics() {
        let d = PersistenceDiagram::new([PersistencePair::new(1, 1.0, 3.0)]).unwrap();
        assert_eq!(multiplicity(&d, 1, 1.0, 3.0).unwrap(), 1);
        assert_eq!(multiplicity(&d, 1, 1.0, 2.0).unwrap(), 0);
        assert_eq!(multiplicity(&d, 1, 0.0, 3.0).unwrap(), 0);
        assert!(multiplicity(&d, 1, 3.0, 3.0).is_err());
    }

    #[test]
    fn diagram_validation_and_merging() {
        assert!(PersistenceDiagram::new([PersistencePair::new(0, 2.0, 1.0)]).is_err());
        assert!(PersistenceDiagram::new([PersistencePair::new(0, f64::INFINITY, f64::INFINITY)]).is_err());
        let d = PersistenceDiagram::new([
            PersistencePair::new(1, 0.5, 1.0),
            PersistencePair::new(0, 0.0, 1.0),
            PersistencePair::new(1, 0.5, 1.0),
            PersistencePair::new(1, 0.7, 0.7),
        ])
        .unwrap();
        assert_eq!(d.pairs().len(), 2);
        assert_eq!(d.pairs()[1].multiplicity, 2);
        assert_eq!(d.finite_points(1), vec![(0.5, 1.0), (0.5, 1.0)]);
    }

    #[test]
    fn morse_report_on_filled_triangle() {
        let c = SimplicialComplex::closure([simplex(&[0, 1, 2])]);
        let field = VertexField::new(&c, vec![0.0, 1.0, 2.0]).unwrap();
        let filt = lower_star_filtration(&field);
        let d = compute_persistence(&filt).unwrap();
        let r = euler_morse_check(&filt, &d);
        assert_eq!(r.betti, vec![1, 0, 0]);
        assert_eq!(r.cells, vec![3, 3, 1]);
        assert_eq!((r.chi_betti, r.chi_cells), (1, 1));
        assert!(r.weak_inequalities_hold);
    }
}
