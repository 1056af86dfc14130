//! Simplicial complexes, chains and boundary matrices over the two-element
//! field, and Betti numbers by Gaussian elimination.
//!
//! Orientation signs vanish mod 2, so simplices are stored as strictly
//! increasing vertex lists and chains as sorted index sets.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts the vertices; rejects empty and repeated vertex lists.
    pub fn new(vertices: impl Into<Vec<usize>>) -> Result<Self> {
        let mut v = vertices.into();
        if v.is_empty() {
            return Err(Error::invalid("a simplex needs at least one vertex"));
        }
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("repeated vertex in simplex {v:?}")));
        }
        Ok(Simplex(v))
    }

    pub fn vertex(v: usize) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces, in lexicographic order.
    pub fn faces(&self) -> Vec<Simplex> {
        if self.0.len() == 1 {
            return Vec::new();
        }
        let mut faces: Vec<Simplex> = (0..self.0.len())
            .map(|skip| {
                Simplex(
                    self.0
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect(),
                )
            })
            .collect();
        faces.sort();
        faces
    }
}

/// Boundary of a simplex: the set of its codimension-one faces.
/// Empty for vertices.
pub fn boundary(s: &Simplex) -> Vec<Simplex> {
    s.faces()
}

/// A mod-2 chain: sorted indices of `dim`-simplices in some complex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chain {
    pub dim: usize,
    pub indices: Vec<usize>,
}

impl Chain {
    pub fn is_zero(&self) -> bool {
        self.indices.is_empty()
    }

    /// Sum over the field (symmetric difference).
    pub fn add(&self, other: &Chain) -> Chain {
        Chain {
            dim: self.dim,
            indices: symmetric_difference(&self.indices, &other.indices),
        }
    }
}

pub(crate) fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sparse binary matrix stored as sorted row-index columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    pub nrows: usize,
    pub columns: Vec<Vec<usize>>,
}

impl BinaryMatrix {
    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.columns[col].binary_search(&row).is_ok()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// Product `self * rhs` over the field.
    pub fn mul(&self, rhs: &BinaryMatrix) -> BinaryMatrix {
        assert_eq!(self.ncols(), rhs.nrows, "dimension mismatch in matrix product");
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                col.iter()
                    .fold(Vec::new(), |acc, &k| symmetric_difference(&acc, &self.columns[k]))
            })
            .collect();
        BinaryMatrix {
            nrows: self.nrows,
            columns,
        }
    }

    /// Rank by left-to-right column reduction on lowest nonzero rows.
    pub fn rank(&self) -> usize {
        let mut pivots: HashMap<usize, Vec<usize>> = HashMap::new();
        for col in &self.columns {
            let mut col = col.clone();
            while let Some(&low) = col.last() {
                match pivots.get(&low) {
                    Some(p) => col = symmetric_difference(&col, p),
                    None => {
                        pivots.insert(low, col);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}

/// A finite simplicial complex, closed under taking faces.
///
/// Simplices of each dimension are kept in lexicographic order, which fixes
/// the row/column order of every boundary matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a complex from an explicit simplex list, which must already be
    /// closed under faces. Duplicates are ignored.
    pub fn from_simplices(simplices: impl IntoIterator<Item = Simplex>) -> Result<Self> {
        let set: BTreeSet<Simplex> = simplices.into_iter().collect();
        for s in &set {
            for f in s.faces() {
                if !set.contains(&f) {
                    return Err(Error::invalid(format!(
                        "complex is not closed: face {:?} of {:?} is missing",
                        f.vertices(),
                        s.vertices()
                    )));
                }
            }
        }
        Ok(Self::from_closed_set(set))
    }

    /// Smallest complex containing the given simplices.
    pub fn closure(simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let mut set = BTreeSet::new();
        let mut stack: Vec<Simplex> = simplices.into_iter().collect();
        while let Some(s) = stack.pop() {
            if set.insert(s.clone()) {
                stack.extend(s.faces());
            }
        }
        Self::from_closed_set(set)
    }

    fn from_closed_set(set: BTreeSet<Simplex>) -> Self {
        let mut by_dim: Vec<Vec<Simplex>> = Vec::new();
        for s in set {
            let d = s.dim();
            if by_dim.len() <= d {
                by_dim.resize(d + 1, Vec::new());
            }
            by_dim[d].push(s);
        }
        for level in &mut by_dim {
            level.sort();
        }
        let index = by_dim
            .iter()
            .map(|level| level.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        SimplicialComplex { by_dim, index }
    }

    /// Vertices, edges and triangles of a mesh.
    pub fn from_mesh(mesh: &Mesh) -> Self {
        let mut simplices: Vec<Simplex> = (0..mesh.vertices.len()).map(Simplex::vertex).collect();
        simplices.extend(mesh.edges().into_iter().map(|e| Simplex(e.to_vec())));
        simplices.extend(mesh.triangles.iter().map(|t| {
            let mut t = t.to_vec();
            t.sort_unstable();
            Simplex(t)
        }));
        Self::from_closed_set(simplices.into_iter().collect())
    }

    /// Highest dimension present, `None` for the empty complex.
    pub fn top_dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.count(0)
    }

    /// All simplices, by dimension then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s.dim())?.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Boundary of `s` as a chain of `(dim s − 1)`-simplex indices.
    pub fn boundary_chain(&self, s: &Simplex) -> Result<Chain> {
        if !self.contains(s) {
            return Err(Error::invalid(format!("simplex {:?} not in complex", s.vertices())));
        }
        let mut indices: Vec<usize> = s
            .faces()
            .iter()
            .map(|f| self.index_of(f).expect("complex is closed under faces"))
            .collect();
        indices.sort_unstable();
        Ok(Chain {
            dim: s.dim().saturating_sub(1),
            indices,
        })
    }

    /// Matrix of `∂_k : C_k → C_{k−1}`; rows are `(k−1)`-simplices, columns
    /// `k`-simplices. `k = 0` gives the zero map to the trivial group.
    pub fn boundary_matrix(&self, k: usize) -> BinaryMatrix {
        let nrows = if k == 0 { 0 } else { self.count(k - 1) };
        let columns = self
            .simplices(k)
            .iter()
            .map(|s| {
                if k == 0 {
                    Vec::new()
                } else {
                    self.boundary_chain(s).expect("simplex from this complex").indices
                }
            })
            .collect();
        BinaryMatrix { nrows, columns }
    }

    /// `β_k = dim ker ∂_k − rank ∂_{k+1}` for `k = 0..=top_dim`.
    pub fn betti_numbers(&self) -> Vec<usize> {
        let Some(top) = self.top_dim() else {
            return Vec::new();
        };
        let ranks: Vec<usize> = (0..=top + 1).map(|k| self.boundary_matrix(k).rank()).collect();
        (0..=top).map(|k| self.count(k) - ranks[k] - ranks[k + 1]).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(k, s)| if k % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }
}
