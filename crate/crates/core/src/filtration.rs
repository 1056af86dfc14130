//! Lower-star filtrations: a simplex enters at the largest value among its
//! vertices, so every prefix is the full subcomplex spanned by the vertices
//! at or below the current level.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};

/// One real value per vertex of a complex.
#[derive(Debug, Clone)]
pub struct VertexField<'a> {
    complex: &'a SimplicialComplex,
    values: Vec<f64>,
}

impl<'a> VertexField<'a> {
    /// The complex's vertices must be exactly `0..values.len()`.
    pub fn new(complex: &'a SimplicialComplex, values: Vec<f64>) -> Result<Self> {
        if values.len() != complex.vertex_count() {
            return Err(Error::invalid(format!(
                "field has {} values for {} vertices",
                values.len(),
                complex.vertex_count()
            )));
        }
        if let Some(s) = complex.simplices(0).iter().find(|s| s.vertices()[0] >= values.len()) {
            return Err(Error::invalid(format!("vertex id {} has no value", s.vertices()[0])));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value at vertex {i}")));
        }
        Ok(VertexField { complex, values })
    }

    pub fn complex(&self) -> &'a SimplicialComplex {
        self.complex
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Lower-star level of a simplex: max over its vertices.
    pub fn level(&self, s: &Simplex) -> f64 {
        s.vertices()
            .iter()
            .map(|&v| self.values[v])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationEntry {
    pub simplex: Simplex,
    pub level: f64,
}

/// An ordered list of simplices with their entry levels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Filtration {
    entries: Vec<FiltrationEntry>,
}

fn entry_order(a: &FiltrationEntry, b: &FiltrationEntry) -> Ordering {
    a.level
        .total_cmp(&b.level)
        .then(a.simplex.dim().cmp(&b.simplex.dim()))
        .then_with(|| a.simplex.cmp(&b.simplex))
}

impl Filtration {
    /// Wraps an arbitrary order without validation; see [`Filtration::check`].
    pub fn from_entries(entries: Vec<FiltrationEntry>) -> Self {
        Filtration { entries }
    }

    pub fn entries(&self) -> &[FiltrationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Verifies non-decreasing levels, finiteness, uniqueness and that every
    /// face precedes its cofaces.
    pub fn check(&self) -> Result<()> {
        let mut seen: HashSet<&Simplex> = HashSet::with_capacity(self.entries.len());
        let mut last = f64::NEG_INFINITY;
        for (i, e) in self.entries.iter().enumerate() {
            if !e.level.is_finite() {
                return Err(Error::invalid(format!("non-finite level at position {i}")));
            }
            if e.level < last {
                return Err(Error::invalid(format!("levels decrease at position {i}")));
            }
            last = e.level;
            for f in e.simplex.faces() {
                if !seen.contains(&f) {
                    return Err(Error::invalid(format!(
                        "face {:?} of {:?} does not precede it",
                        f.vertices(),
                        e.simplex.vertices()
                    )));
                }
            }
            if !seen.insert(&e.simplex) {
                return Err(Error::invalid(format!(
                    "simplex {:?} appears twice",
                    e.simplex.vertices()
                )));
            }
        }
        Ok(())
    }

    /// Simplices with level `<= r`.
    pub fn prefix(&self, r: f64) -> impl Iterator<Item = &Simplex> {
        self.entries.iter().filter(move |e| e.level <= r).map(|e| &e.simplex)
    }

    /// Distinct levels in increasing order.
    pub fn levels(&self) -> Vec<f64> {
        let mut levels: Vec<f64> = self.entries.iter().map(|e| e.level).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        levels
    }
}

/// Orders every simplex of the field's complex by
/// `(level, dimension, lexicographic vertices)`.
pub fn lower_star_filtration(field: &VertexField) -> Filtration {
    let mut entries: Vec<FiltrationEntry> = field
        .complex
        .iter()
        .map(|s| FiltrationEntry {
            level: field.level(s),
            simplex: s.clone(),
        })
        .collect();
    entries.sort_by(entry_order);
    Filtration { entries }
}

/// Full subcomplex on the vertices with value `<= r`.
pub fn sublevel_complex(field: &VertexField, r: f64) -> SimplicialComplex {
    let kept = field.complex.iter().filter(|s| field.level(s) <= r).cloned();
    SimplicialComplex::from_simplices(kept).expect("full subcomplexes are closed under faces")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn order(f: &Filtration) -> Vec<(Vec<usize>, f64)> {
        f.entries().iter().map(|e| (e.simplex.vertices().to_vec(), e.level)).collect()
    }

    #[test]
    fn single_edge() {
        let c = SimplicialComplex::closure([simplex(&[0, 1])]);
        let field = VertexField::new(&c, vec![0.0, 1.0]).unwrap();
        let f = lower_star_filtration(&field);
        assert_eq!(order(&f), vec![(vec![0], 0.0), (vec![1], 1.0), (vec![0, 1], 1.0)]);
        f.check().unwrap();
    }

    #[test]
    fn constant_hollow_triangle_puts_vertices_first() {
        let c = SimplicialComplex::closure([simplex(&[0, 1]), simplex(&[1, 2]), simplex(&[0, 2])]);
        let field = VertexField::new(&c, vec![0.0; 3]).unwrap();
        let f = lower_star_filtration(&field);
        assert_eq!(f.len(), 6);
        assert!(f.entries().iter().all(|e| e.level == 0.0));
        assert!(f.entries()[..3].iter().all(|e| e.simplex.dim() == 0));
    }

    #[test]
    fn path_of_three() {
        // values (0, 2, 1) on the path 0 - 1 - 2
        let c = SimplicialComplex::closure([simplex(&[0, 1]), simplex(&[1, 2])]);
        let field = VertexField::new(&c, vec![0.0, 2.0, 1.0]).unwrap();
        let f = lower_star_filtration(&field);
        assert_eq!(
            order(&f),
            vec![
                (vec![0], 0.0),
                (vec![2], 1.0),
                (vec![1], 2.0),
                (vec![0, 1], 2.0),
                (vec![1, 2], 2.0),
            ]
        );
    }

    #[test]
    fn invalid_fields() {
        let c = SimplicialComplex::closure([simplex(&[0, 1])]);
        assert!(VertexField::new(&c, vec![0.0]).is_err());
        assert!(VertexField::new(&c, vec![0.0, f64::NAN]).is_err());
        assert!(VertexField::new(&c, vec![0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn check_catches_bad_orders() {
        let bad = Filtration::from_entries(vec![
            FiltrationEntry { simplex: simplex(&[0, 1]), level: 0.0 },
            FiltrationEntry { simplex: simplex(&[0]), level: 0.0 },
            FiltrationEntry { simplex: simplex(&[1]), level: 0.0 },
        ]);
        assert!(bad.check().is_err());
        let decreasing = Filtration::from_entries(vec![
            FiltrationEntry { simplex: simplex(&[0]), level: 1.0 },
            FiltrationEntry { simplex: simplex(&[1]), level: 0.0 },
        ]);
        assert!(decreasing.check().is_err());
    }

    #[test]
    fn sublevel_extremes() {
        let c = SimplicialComplex::closure([simplex(&[0, 1, 2])]);
        let field = VertexField::new(&c, vec![0.5, 1.0, 2.0]).unwrap();
        assert!(sublevel_complex(&field, 0.0).is_empty());
        assert_eq!(sublevel_complex(&field, 2.0), c);
        let mid = sublevel_complex(&field, 1.5);
        assert_eq!(mid.len(), 3);
    }
}
