//! Cohomology of the coderivation complex: Z(L), B(L), H(L) and the
//! order-preserving lift mu.
//!
//! The complex is the truncated total space `T = sum_{n <= cap} L_n`, split
//! by parity, with differential `D = [d, -]`. For a quadratic d the
//! differential maps each weight to the next and everything decomposes per
//! weight; in general only the filtration `F^n = prod_{i >= n} L_i` is
//! respected, so representatives are extracted level by level, deepest
//! first. Each class representative lies in `F^order`, which is exactly the
//! order-preserving right inverse the universal deformation base needs.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::traits::Zero;

use crate::coderiv::{big_d, Coderivation, Mode, MultilinearPart};
use crate::error::{Error, Result};
use crate::graded::{enumerate_words, CoalgebraKind, GradedSpace, Parity, Word};
use crate::linalg::{self, Matrix};
use crate::scalar::{self, Scalar};

fn parity_index(p: Parity) -> usize {
    match p {
        Parity::Even => 0,
        Parity::Odd => 1,
    }
}

/// One coordinate of the cochain space: the single-part coderivation
/// sending `word` to `coeff * w_target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainLabel {
    pub weight: usize,
    pub word: Word,
    pub target: usize,
}

/// Enumerated bases of `L_n = Hom(C^n(W), W)` for all weights up to the cap,
/// split by parity, with conversions between coderivations and coordinate
/// vectors.
#[derive(Debug, Clone)]
pub struct ComplexBasis {
    pub space: Arc<GradedSpace>,
    pub kind: CoalgebraKind,
    pub cap: usize,
    labels: [Vec<CochainLabel>; 2],
    positions: [BTreeMap<(usize, Vec<usize>, usize), usize>; 2],
}

impl ComplexBasis {
    pub fn new(space: Arc<GradedSpace>, kind: CoalgebraKind, cap: usize) -> Self {
        let mut labels: [Vec<CochainLabel>; 2] = [Vec::new(), Vec::new()];
        for weight in 1..=cap {
            for word in enumerate_words(kind, &space, weight) {
                let word_parity = word.parity(&space);
                for target in 0..space.dim() {
                    let part_parity = space.parity(target) + word_parity;
                    labels[parity_index(part_parity)].push(CochainLabel {
                        weight,
                        word: word.clone(),
                        target,
                    });
                }
            }
        }
        let positions = [0, 1].map(|p: usize| {
            labels[p]
                .iter()
                .enumerate()
                .map(|(i, l)| ((l.weight, l.word.letters.clone(), l.target), i))
                .collect()
        });
        ComplexBasis { space, kind, cap, labels, positions }
    }

    pub fn dim(&self, p: Parity) -> usize {
        self.labels[parity_index(p)].len()
    }

    pub fn labels(&self, p: Parity) -> &[CochainLabel] {
        &self.labels[parity_index(p)]
    }

    pub fn position(&self, p: Parity, weight: usize, letters: &[usize], target: usize) -> Option<usize> {
        self.positions[parity_index(p)]
            .get(&(weight, letters.to_vec(), target))
            .copied()
    }

    /// Indices of the parity-p coordinates of weight >= n.
    pub fn indices_with_weight_at_least(&self, p: Parity, n: usize) -> Vec<usize> {
        self.labels[parity_index(p)]
            .iter()
            .enumerate()
            .filter(|(_, l)| l.weight >= n)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn indices_with_weight(&self, p: Parity, n: usize) -> Vec<usize> {
        self.labels[parity_index(p)]
            .iter()
            .enumerate()
            .filter(|(_, l)| l.weight == n)
            .map(|(i, _)| i)
            .collect()
    }

    /// Largest n with the vector in `F^n`; `None` for the zero vector.
    pub fn filtration_degree(&self, p: Parity, v: &[Scalar]) -> Option<usize> {
        self.labels[parity_index(p)]
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(l, _)| l.weight)
            .min()
    }

    pub fn to_vec(&self, c: &Coderivation) -> Result<(Parity, Vec<Scalar>)> {
        if c.kind != self.kind {
            return Err(Error::KindMismatch { expected: self.kind.as_str(), got: c.kind.as_str() });
        }
        let p = c.parity;
        let mut v = vec![scalar::zero(); self.dim(p)];
        for (&weight, part) in c.parts() {
            if weight > self.cap {
                return Err(Error::WeightOutOfRange { weight, cap: self.cap });
            }
            for (letters, value) in part.entries() {
                for (target, coeff) in value.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let pos = self.position(p, weight, letters, target).ok_or_else(|| {
                        Error::InvalidInput("cochain label missing from basis".into())
                    })?;
                    v[pos] = coeff.clone();
                }
            }
        }
        Ok((p, v))
    }

    pub fn from_vec(&self, p: Parity, v: &[Scalar]) -> Result<Coderivation> {
        assert_eq!(v.len(), self.dim(p), "cochain vector length mismatch");
        let mut parts: BTreeMap<usize, MultilinearPart> = BTreeMap::new();
        for (label, coeff) in self.labels[parity_index(p)].iter().zip(v) {
            if coeff.is_zero() {
                continue;
            }
            let part = parts
                .entry(label.weight)
                .or_insert_with(|| MultilinearPart::zero(self.kind, label.weight, p));
            part.add_term(&self.space, &label.word.letters, label.target, coeff.clone())?;
        }
        let mut c = Coderivation::zero(self.space.clone(), self.kind, p, self.cap);
        for (_, part) in parts {
            c.insert_part(part)?;
        }
        Ok(c)
    }

    /// Matrix of `D = [d, -]` from parity-p cochains to parity-(p+1)
    /// cochains, over the enumerated bases.
    pub fn d_matrix(&self, d: &Coderivation, p: Parity) -> Result<Matrix> {
        let target_p = p.flip();
        let rows = self.dim(target_p);
        let cols = self.dim(p);
        let mut triplets = Vec::new();
        for (j, label) in self.labels[parity_index(p)].iter().enumerate() {
            let e = Coderivation::single(
                self.space.clone(),
                self.kind,
                self.cap,
                &label.word.letters,
                label.target,
                scalar::one(),
            )?;
            let de = big_d(d, &e)?;
            let (_, column) = self.to_vec(&de)?;
            for (i, coeff) in column.into_iter().enumerate() {
                if !coeff.is_zero() {
                    triplets.push((i, j, coeff));
                }
            }
        }
        Ok(Matrix::from_triplets(rows, cols, triplets))
    }
}

/// Matrix of D restricted to the weight-n parity-p cochains, expanded over
/// all affected target weights up to the cap.
pub fn cochain_matrix_of_d(d: &Coderivation, n: usize, p: Parity) -> Result<Matrix> {
    if n == 0 || n > d.weight_cap {
        return Err(Error::WeightOutOfRange { weight: n, cap: d.weight_cap });
    }
    let basis = ComplexBasis::new(d.space().clone(), d.kind, d.weight_cap);
    let full = basis.d_matrix(d, p)?;
    let cols = basis.indices_with_weight(p, n);
    Ok(submatrix_cols(&full, &cols))
}

fn submatrix_cols(m: &Matrix, cols: &[usize]) -> Matrix {
    let col_map: BTreeMap<usize, usize> =
        cols.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    Matrix::from_triplets(
        m.rows(),
        cols.len(),
        m.entries()
            .filter_map(|(r, c, v)| col_map.get(&c).map(|&nc| (r, nc, v))),
    )
}

/// Rows of `vectors` restricted to the coordinates with weight < n; used to
/// compute dimensions along the filtration.
fn low_weight_projection(basis: &ComplexBasis, p: Parity, vectors: &[Vec<Scalar>], n: usize) -> Matrix {
    let low: Vec<usize> = basis.labels[parity_index(p)]
        .iter()
        .enumerate()
        .filter(|(_, l)| l.weight < n)
        .map(|(i, _)| i)
        .collect();
    Matrix::from_triplets(
        low.len(),
        vectors.len(),
        vectors.iter().enumerate().flat_map(|(j, v)| {
            low.iter()
                .enumerate()
                .filter(|(_, &i)| !v[i].is_zero())
                .map(move |(r, &i)| (r, j, v[i].clone()))
                .collect::<Vec<_>>()
        }),
    )
}

/// Basis of the intersection of `span(vectors)` with `F^n`.
fn intersect_with_filtration(
    basis: &ComplexBasis,
    p: Parity,
    vectors: &[Vec<Scalar>],
    n: usize,
) -> Vec<Vec<Scalar>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let proj = low_weight_projection(basis, p, vectors, n);
    linalg::kernel_basis(&proj)
        .into_iter()
        .map(|combo| {
            let mut out = vec![scalar::zero(); vectors[0].len()];
            for (j, c) in combo.iter().enumerate() {
                if !c.is_zero() {
                    for (i, x) in vectors[j].iter().enumerate() {
                        if !x.is_zero() {
                            out[i] += x * c;
                        }
                    }
                }
            }
            out
        })
        .collect()
}

/// One cohomology class: parity, filtration order, and a representative
/// cocycle supported in weights >= order.
#[derive(Debug, Clone)]
pub struct CohomClass {
    pub parity: Parity,
    pub order: usize,
    pub representative: Vec<Scalar>,
}

/// Dimension row of the report table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightDims {
    pub weight: usize,
    pub parity: Parity,
    pub cocycles: usize,
    pub boundaries: usize,
    pub cohomology: usize,
}

/// The computed cohomology of a codifferential, with everything downstream
/// needs: bases, an adapted class basis with order-preserving lifts, and
/// decomposition of arbitrary cocycles into class coordinates.
pub struct CohomologyReport {
    pub basis: ComplexBasis,
    pub d: Coderivation,
    d_mat: [Matrix; 2],
    pub z_basis: [Vec<Vec<Scalar>>; 2],
    pub b_basis: [Vec<Vec<Scalar>>; 2],
    pub classes: Vec<CohomClass>,
    pub dims: Vec<WeightDims>,
    /// Per parity: columns [class representatives | boundary basis].
    decomp: [Matrix; 2],
    /// Per parity: global indices of that parity's classes, in decomp order.
    class_index: [Vec<usize>; 2],
}

/// Compute Z, B, H weight by weight and parity by parity for `D = [d, -]`.
/// `d` must be a codifferential (caller-checked, as all engine entry points
/// validate it once).
pub fn cohomology(d: &Coderivation, max_weight: usize) -> Result<CohomologyReport> {
    if max_weight == 0 || max_weight > d.weight_cap {
        return Err(Error::WeightOutOfRange { weight: max_weight, cap: d.weight_cap });
    }
    if d.parity != Parity::Odd {
        return Err(Error::Parity("cohomology requires an odd codifferential".into()));
    }
    let d = d.truncate(max_weight);
    let basis = ComplexBasis::new(d.space().clone(), d.kind, max_weight);
    let d_mat = [
        basis.d_matrix(&d, Parity::Even)?,
        basis.d_matrix(&d, Parity::Odd)?,
    ];

    let mut z_basis: [Vec<Vec<Scalar>>; 2] = [Vec::new(), Vec::new()];
    let mut b_basis: [Vec<Vec<Scalar>>; 2] = [Vec::new(), Vec::new()];
    for p in [Parity::Even, Parity::Odd] {
        let pi = parity_index(p);
        z_basis[pi] = linalg::kernel_basis(&d_mat[pi]);
        b_basis[pi] = linalg::image_basis(&d_mat[parity_index(p.flip())]);
        // D^2 = 0: every boundary must be a cocycle.
        for b in &b_basis[pi] {
            let image = d_mat[pi].mul_vec(b);
            assert!(
                image.iter().all(Zero::is_zero),
                "internal error: D^2 != 0 although d is a codifferential"
            );
        }
    }

    // Adapted class basis, deepest filtration level first. At level n the
    // candidates are a kernel basis of D restricted to weights >= n; the
    // ones kept are the non-pivot quotient representatives modulo
    // (B intersect F^n) + (classes already chosen at deeper levels).
    let mut classes_by_parity: [Vec<(usize, Vec<Scalar>)>; 2] = [Vec::new(), Vec::new()];
    for p in [Parity::Even, Parity::Odd] {
        let pi = parity_index(p);
        for n in (1..=max_weight).rev() {
            let cols = basis.indices_with_weight_at_least(p, n);
            if cols.is_empty() {
                continue;
            }
            let sub = submatrix_cols(&d_mat[pi], &cols);
            let kernel = linalg::kernel_basis(&sub);
            if kernel.is_empty() {
                continue;
            }
            let embedded: Vec<Vec<Scalar>> = kernel
                .iter()
                .map(|k| {
                    let mut v = vec![scalar::zero(); basis.dim(p)];
                    for (restricted, coeff) in k.iter().enumerate() {
                        if !coeff.is_zero() {
                            v[cols[restricted]] = coeff.clone();
                        }
                    }
                    v
                })
                .collect();
            let mut subspace = intersect_with_filtration(&basis, p, &b_basis[pi], n);
            subspace.extend(classes_by_parity[pi].iter().map(|(_, rep)| rep.clone()));
            // Express the subspace in kernel coordinates; everything in it
            // is a cocycle supported in F^n, so this always solves.
            let k_mat = Matrix::from_columns(basis.dim(p), &embedded);
            let in_k: Vec<Vec<Scalar>> = linalg::solve_many(&k_mat, &subspace)?
                .into_iter()
                .map(|sol| sol.expect("subspace lies inside the cocycles of F^n"))
                .collect();
            for i in linalg::quotient_representative_indices(embedded.len(), &in_k) {
                classes_by_parity[pi].push((n, embedded[i].clone()));
            }
        }
    }

    // Flatten ascending by order, even before odd, stable within a level.
    let mut classes: Vec<CohomClass> = Vec::new();
    let mut class_index: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    let mut keyed: Vec<(usize, usize, usize, CohomClass)> = Vec::new();
    for p in [Parity::Even, Parity::Odd] {
        let pi = parity_index(p);
        for (seq, (order, rep)) in classes_by_parity[pi].iter().enumerate() {
            keyed.push((
                *order,
                pi,
                // Deeper levels were found first; within one level keep pick order.
                classes_by_parity[pi].len() - seq,
                CohomClass { parity: p, order: *order, representative: rep.clone() },
            ));
        }
    }
    keyed.sort_by(|a, b| (a.0, a.1, std::cmp::Reverse(a.2)).cmp(&(b.0, b.1, std::cmp::Reverse(b.2))));
    for (_, _, _, class) in keyed {
        let pi = parity_index(class.parity);
        class_index[pi].push(classes.len());
        classes.push(class);
    }

    // Decomposition matrices [representatives | boundaries], per parity.
    let decomp = [Parity::Even, Parity::Odd].map(|p| {
        let pi = parity_index(p);
        let mut columns: Vec<Vec<Scalar>> = class_index[pi]
            .iter()
            .map(|&g| classes[g].representative.clone())
            .collect();
        columns.extend(b_basis[pi].iter().cloned());
        Matrix::from_columns(basis.dim(p), &columns)
    });

    // Dimension table along the filtration; for a quadratic d these are the
    // per-weight block dimensions.
    let mut dims = Vec::new();
    for p in [Parity::Even, Parity::Odd] {
        let pi = parity_index(p);
        let graded_dim = |vectors: &[Vec<Scalar>], n: usize| -> usize {
            if vectors.is_empty() {
                return 0;
            }
            let at = |level: usize| -> usize {
                vectors.len() - linalg::rank(&low_weight_projection(&basis, p, vectors, level))
            };
            at(n) - at(n + 1)
        };
        for weight in 1..=max_weight {
            let z = graded_dim(&z_basis[pi], weight);
            let b = graded_dim(&b_basis[pi], weight);
            let h = classes
                .iter()
                .filter(|c| c.parity == p && c.order == weight)
                .count();
            debug_assert_eq!(z - b, h, "graded rank-nullity failed at weight {weight}");
            dims.push(WeightDims { weight, parity: p, cocycles: z, boundaries: b, cohomology: h });
        }
    }

    Ok(CohomologyReport {
        basis,
        d,
        d_mat,
        z_basis,
        b_basis,
        classes,
        dims,
        decomp,
        class_index,
    })
}

impl CohomologyReport {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// The order-preserving lift: the representative cocycle of a class, as
    /// a coderivation supported in weights >= the class order.
    pub fn lift_mu(&self, class_index: usize) -> Result<Coderivation> {
        let class = self
            .classes
            .get(class_index)
            .ok_or(Error::BadIndex(class_index))?;
        self.basis.from_vec(class.parity, &class.representative)
    }

    /// Class coordinates of a cocycle vector: the vector over all classes
    /// (other-parity entries zero). `None` when the vector is not a cocycle.
    pub fn decompose(&self, p: Parity, v: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        let pi = parity_index(p);
        let image = self.d_mat[pi].mul_vec(v);
        if !image.iter().all(Zero::is_zero) {
            return Ok(None);
        }
        let sol = linalg::solve(&self.decomp[pi], v)?
            .expect("cocycle must decompose over representatives and boundaries");
        let mut coords = vec![scalar::zero(); self.classes.len()];
        for (local, &global) in self.class_index[pi].iter().enumerate() {
            coords[global] = sol[local].clone();
        }
        Ok(Some(coords))
    }

    pub fn decompose_coderivation(&self, c: &Coderivation) -> Result<Option<Vec<Scalar>>> {
        let (p, v) = self.basis.to_vec(c)?;
        self.decompose(p, &v)
    }

    /// Is the vector a coboundary? Returns a witness preimage when it is.
    /// In strict mode the witness is restricted to weight-1 cochains, per
    /// the classical equivalence notion.
    pub fn boundary_witness(
        &self,
        p: Parity,
        v: &[Scalar],
        mode: Mode,
    ) -> Result<Option<Vec<Scalar>>> {
        let source_p = p.flip();
        let spi = parity_index(source_p);
        match mode {
            Mode::Infinity => {
                let sol = linalg::solve(&self.d_mat[spi], v)?;
                Ok(sol)
            }
            Mode::Strict => {
                let cols = self.basis.indices_with_weight(source_p, 1);
                let sub = submatrix_cols(&self.d_mat[spi], &cols);
                match linalg::solve(&sub, v)? {
                    None => Ok(None),
                    Some(x) => {
                        let mut full = vec![scalar::zero(); self.basis.dim(source_p)];
                        for (r, &c) in cols.iter().enumerate() {
                            full[c] = x[r].clone();
                        }
                        Ok(Some(full))
                    }
                }
            }
        }
    }

    /// Matrix of D out of parity-p cochains (columns) into parity-(p+1).
    pub fn d_matrix(&self, p: Parity) -> &Matrix {
        &self.d_mat[parity_index(p)]
    }

    /// Classes that parametrize deformations in the given mode: all of them
    /// for the infinity category, the weight-2 ones for the strict category.
    pub fn parameter_classes(&self, mode: Mode) -> Vec<usize> {
        match mode {
            Mode::Infinity => (0..self.classes.len()).collect(),
            Mode::Strict => self
                .classes
                .iter()
                .enumerate()
                .filter(|(_, c)| c.order == 2)
                .map(|(i, _)| i)
                .collect(),
        }
    }

    pub fn dim_at(&self, weight: usize, parity: Parity) -> usize {
        self.dims
            .iter()
            .find(|d| d.weight == weight && d.parity == parity)
            .map(|d| d.cohomology)
            .unwrap_or(0)
    }
}
