//! Exact linear algebra over Q.
//!
//! Everything downstream (cocycles, coboundaries, quotients, obstruction
//! solves) reduces to the four operations here. Reduction is deterministic:
//! leftmost nonzero column, first nonzero row, pivots scaled to 1, no
//! heuristics, so golden-file tests are stable across platforms.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};
use num::traits::Zero;

/// Fill ratio below which a matrix is kept in sparse storage.
const SPARSE_FILL_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Storage {
    Dense(Vec<Scalar>),
    Sparse(BTreeMap<(usize, usize), Scalar>),
}

/// An exact rational matrix. Entries not stored are zero.
///
/// Coderivation matrices in weight >= 3 are mostly zeros, hence the sparse
/// map; the small cohomology matrices stay dense. The representation is an
/// internal detail: all operations read through `get`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    storage: Storage,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, storage: Storage::Sparse(BTreeMap::new()) }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, scalar::one());
        }
        m
    }

    /// Build from (row, col, value) triplets; later triplets for the same
    /// position accumulate. Picks dense or sparse storage by fill ratio.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Self {
        let mut map: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet index out of bounds");
            let slot = map.entry((r, c)).or_insert_with(scalar::zero);
            *slot += v;
            if slot.is_zero() {
                map.remove(&(r, c));
            }
        }
        let total = rows.saturating_mul(cols);
        if total > 0 && (map.len() as f64) / (total as f64) >= SPARSE_FILL_THRESHOLD {
            let mut data = vec![scalar::zero(); total];
            for ((r, c), v) in map {
                data[r * cols + c] = v;
            }
            Matrix { rows, cols, storage: Storage::Dense(data) }
        } else {
            Matrix { rows, cols, storage: Storage::Sparse(map) }
        }
    }

    pub fn from_rows(rows_data: &[Vec<Scalar>]) -> Self {
        let rows = rows_data.len();
        let cols = rows_data.first().map_or(0, Vec::len);
        Matrix::from_triplets(
            rows,
            cols,
            rows_data.iter().enumerate().flat_map(|(r, row)| {
                assert_eq!(row.len(), cols, "ragged rows");
                row.iter().enumerate().map(move |(c, v)| (r, c, v.clone()))
            }),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, columns: &[Vec<Scalar>]) -> Self {
        Matrix::from_triplets(
            dim,
            columns.len(),
            columns.iter().enumerate().flat_map(|(c, col)| {
                assert_eq!(col.len(), dim, "column of wrong dimension");
                col.iter().enumerate().map(move |(r, v)| (r, c, v.clone()))
            }),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        assert!(r < self.rows && c < self.cols);
        match &self.storage {
            Storage::Dense(data) => data[r * self.cols + c].clone(),
            Storage::Sparse(map) => map.get(&(r, c)).cloned().unwrap_or_else(scalar::zero),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols);
        match &mut self.storage {
            Storage::Dense(data) => data[r * self.cols + c] = v,
            Storage::Sparse(map) => {
                if v.is_zero() {
                    map.remove(&(r, c));
                } else {
                    map.insert((r, c), v);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.storage {
            Storage::Dense(data) => data.iter().all(Zero::is_zero),
            Storage::Sparse(map) => map.is_empty(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_triplets(
            self.cols,
            self.rows,
            self.entries().map(|(r, c, v)| (c, r, v)),
        )
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_triplets(self.rows, self.cols, self.entries().map(|(r, c, v)| (r, c, -v)))
    }

    /// Iterate the nonzero entries in row-major order.
    pub fn entries(&self) -> Box<dyn Iterator<Item = (usize, usize, Scalar)> + '_> {
        match &self.storage {
            Storage::Dense(data) => Box::new(data.iter().enumerate().filter_map(|(i, v)| {
                if v.is_zero() {
                    None
                } else {
                    Some((i / self.cols, i % self.cols, v.clone()))
                }
            })),
            Storage::Sparse(map) => Box::new(map.iter().map(|(&(r, c), v)| (r, c, v.clone()))),
        }
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn mul_vec(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        let mut out = vec![scalar::zero(); self.rows];
        for (r, c, v) in self.entries() {
            out[r] += v * &x[c];
        }
        out
    }
}

/// Row-echelon working form: rows as sparse maps col -> value.
struct Echelon {
    rows: Vec<BTreeMap<usize, Scalar>>,
    /// Pivot column of each used row, in order.
    pivots: Vec<usize>,
}

/// Reduced row echelon form with deterministic pivoting: scan columns left
/// to right, take the first row with a nonzero entry, scale the pivot to 1,
/// clear the column everywhere else.
fn rref(m: &Matrix) -> Echelon {
    let mut rows: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); m.rows()];
    for (r, c, v) in m.entries() {
        rows[r].insert(c, v);
    }
    rref_rows(rows, m.cols())
}

fn rref_rows(mut rows: Vec<BTreeMap<usize, Scalar>>, cols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut next_row = 0usize;
    for col in 0..cols {
        if next_row >= rows.len() {
            break;
        }
        let Some(pivot_row) = (next_row..rows.len()).find(|&r| rows[r].contains_key(&col)) else {
            continue;
        };
        rows.swap(next_row, pivot_row);
        // Scale the pivot row so the pivot entry is 1.
        let pivot_val = rows[next_row][&col].clone();
        if !pivot_val.is_one() {
            let inv = scalar::one() / pivot_val;
            for v in rows[next_row].values_mut() {
                *v *= &inv;
            }
        }
        // Eliminate the column from every other row.
        let pivot_entries: Vec<(usize, Scalar)> =
            rows[next_row].iter().map(|(&c, v)| (c, v.clone())).collect();
        for r in 0..rows.len() {
            if r == next_row {
                continue;
            }
            let Some(factor) = rows[r].get(&col).cloned() else { continue };
            for (c, v) in &pivot_entries {
                let delta = &factor * v;
                let slot = rows[r].entry(*c).or_insert_with(scalar::zero);
                *slot -= delta;
                if slot.is_zero() {
                    rows[r].remove(c);
                }
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    Echelon { rows, pivots }
}

trait IsOne {
    fn is_one(&self) -> bool;
}
impl IsOne for Scalar {
    fn is_one(&self) -> bool {
        *self == scalar::one()
    }
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).pivots.len()
}

/// Basis of the kernel `{x : m x = 0}`.
///
/// One vector per free column of the reduced echelon form, with 1 in the
/// free position and the negated echelon column in the pivot positions;
/// emitted in increasing free-column order.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    let ech = rref(m);
    let pivot_set: BTreeMap<usize, usize> =
        ech.pivots.iter().enumerate().map(|(row, &col)| (col, row)).collect();
    let mut basis = Vec::new();
    for free_col in 0..m.cols() {
        if pivot_set.contains_key(&free_col) {
            continue;
        }
        let mut v = vec![scalar::zero(); m.cols()];
        v[free_col] = scalar::one();
        for (&pivot_col, &row) in &pivot_set {
            if let Some(entry) = ech.rows[row].get(&free_col) {
                v[pivot_col] = -entry.clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// Basis of the column space: the original columns at the pivot positions.
pub fn image_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    let ech = rref(m);
    ech.pivots.iter().map(|&c| m.column(c)).collect()
}

/// Solve `m x = b` exactly.
///
/// Returns `Ok(None)` when the system is inconsistent. The particular
/// solution has zeros in all free-variable positions. A length mismatch
/// between `b` and the row count is a contract violation, not a
/// no-solution answer.
pub fn solve(m: &Matrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: matrix has {} rows, rhs has length {}",
            m.rows(),
            b.len()
        )));
    }
    let mut rows: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); m.rows()];
    for (r, c, v) in m.entries() {
        rows[r].insert(c, v);
    }
    for (r, v) in b.iter().enumerate() {
        if !v.is_zero() {
            rows[r].insert(m.cols(), v.clone());
        }
    }
    let ech = rref_rows(rows, m.cols() + 1);
    if ech.pivots.last() == Some(&m.cols()) {
        return Ok(None);
    }
    let mut x = vec![scalar::zero(); m.cols()];
    for (row, &col) in ech.pivots.iter().enumerate() {
        if let Some(v) = ech.rows[row].get(&m.cols()) {
            x[col] = v.clone();
        }
    }
    Ok(Some(x))
}

/// Solve `m x = b` for many right-hand sides at once (one echelon pass).
pub fn solve_many(m: &Matrix, bs: &[Vec<Scalar>]) -> Result<Vec<Option<Vec<Scalar>>>> {
    for b in bs {
        if b.len() != m.rows() {
            return Err(Error::DimensionMismatch(format!(
                "solve_many: matrix has {} rows, rhs has length {}",
                m.rows(),
                b.len()
            )));
        }
    }
    let k = bs.len();
    let mut rows: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); m.rows()];
    for (r, c, v) in m.entries() {
        rows[r].insert(c, v);
    }
    for (j, b) in bs.iter().enumerate() {
        for (r, v) in b.iter().enumerate() {
            if !v.is_zero() {
                rows[r].insert(m.cols() + j, v.clone());
            }
        }
    }
    // Echelon only over the coefficient columns; the appended columns ride along.
    let ech = {
        let mut pivots = Vec::new();
        let mut next_row = 0usize;
        for col in 0..m.cols() {
            if next_row >= rows.len() {
                break;
            }
            let Some(pivot_row) = (next_row..rows.len()).find(|&r| rows[r].contains_key(&col))
            else {
                continue;
            };
            rows.swap(next_row, pivot_row);
            let pivot_val = rows[next_row][&col].clone();
            if !IsOne::is_one(&pivot_val) {
                let inv = scalar::one() / pivot_val;
                for v in rows[next_row].values_mut() {
                    *v *= &inv;
                }
            }
            let pivot_entries: Vec<(usize, Scalar)> =
                rows[next_row].iter().map(|(&c, v)| (c, v.clone())).collect();
            for r in 0..rows.len() {
                if r == next_row {
                    continue;
                }
                let Some(factor) = rows[r].get(&col).cloned() else { continue };
                for (c, v) in &pivot_entries {
                    let delta = &factor * v;
                    let slot = rows[r].entry(*c).or_insert_with(scalar::zero);
                    *slot -= delta;
                    if slot.is_zero() {
                        rows[r].remove(c);
                    }
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        Echelon { rows, pivots }
    };
    let rank = ech.pivots.len();
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let rhs_col = m.cols() + j;
        // Inconsistent iff some zero-coefficient row still has a rhs entry.
        let inconsistent = ech.rows[rank..].iter().any(|row| row.contains_key(&rhs_col));
        if inconsistent {
            out.push(None);
        } else {
            let mut x = vec![scalar::zero(); m.cols()];
            for (row, &col) in ech.pivots.iter().enumerate() {
                if let Some(v) = ech.rows[row].get(&rhs_col) {
                    x[col] = v.clone();
                }
            }
            out.push(Some(x));
        }
    }
    Ok(out)
}

/// Representatives completing `subspace` to a basis of the ambient space.
///
/// Standard basis vectors chosen greedily in index order: the non-pivot
/// coordinates of the subspace's echelon form. Their classes form a basis
/// of the quotient.
pub fn quotient_representatives(space_dim: usize, subspace: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    for v in subspace {
        assert_eq!(v.len(), space_dim, "subspace vector of wrong dimension");
    }
    let rows: Vec<BTreeMap<usize, Scalar>> = subspace
        .iter()
        .map(|v| {
            v.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect()
        })
        .collect();
    let ech = rref_rows(rows, space_dim);
    let pivot_set: std::collections::BTreeSet<usize> = ech.pivots.iter().copied().collect();
    (0..space_dim)
        .filter(|i| !pivot_set.contains(i))
        .map(|i| {
            let mut v = vec![scalar::zero(); space_dim];
            v[i] = scalar::one();
            v
        })
        .collect()
}

/// Indices of the standard basis vectors returned by
/// [`quotient_representatives`], without materializing the vectors.
pub fn quotient_representative_indices(space_dim: usize, subspace: &[Vec<Scalar>]) -> Vec<usize> {
    let rows: Vec<BTreeMap<usize, Scalar>> = subspace
        .iter()
        .map(|v| {
            assert_eq!(v.len(), space_dim);
            v.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect()
        })
        .collect();
    let ech = rref_rows(rows, space_dim);
    let pivot_set: std::collections::BTreeSet<usize> = ech.pivots.iter().copied().collect();
    (0..space_dim).filter(|i| !pivot_set.contains(i)).collect()
}

/// Echelon basis of the span of the given vectors (reduced, pivots 1,
/// ordered by pivot position). Used wherever a deterministic canonical
/// basis of a subspace is needed.
pub fn echelon_basis(space_dim: usize, vectors: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let rows: Vec<BTreeMap<usize, Scalar>> = vectors
        .iter()
        .map(|v| {
            assert_eq!(v.len(), space_dim);
            v.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect()
        })
        .collect();
    let ech = rref_rows(rows, space_dim);
    ech.rows
        .into_iter()
        .take(ech.pivots.len())
        .map(|row| {
            let mut v = vec![scalar::zero(); space_dim];
            for (c, x) in row {
                v[c] = x;
            }
            v
        })
        .collect()
}
