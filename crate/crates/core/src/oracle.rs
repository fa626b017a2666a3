//! Independent reference computations used by the test suites.
//!
//! Everything here works directly with structure constants on V, never
//! through the coderivation calculus, so these routines can sit on the other
//! side of a cross-check: triple-loop Jacobi and associativity defects, and
//! the classical Chevalley-Eilenberg complex in low degrees.

use num::traits::Zero;

use crate::graded::Parity;
use crate::linalg::{self, Matrix};
use crate::scalar::{self, Scalar};
use crate::structure::StructureConstants;

fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Apply the bilinear bracket to (vector, basis) and (basis, vector).
fn bracket_vec_left(sc: &StructureConstants, v: &[Scalar], b: usize) -> Vec<Scalar> {
    let dim = sc.v_space.dim();
    let mut out = vec![scalar::zero(); dim];
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (t, x) in sc.value(&[i, b]).into_iter().enumerate() {
            if !x.is_zero() {
                out[t] += x * c;
            }
        }
    }
    out
}

fn bracket_vec_right(sc: &StructureConstants, a: usize, v: &[Scalar]) -> Vec<Scalar> {
    let dim = sc.v_space.dim();
    let mut out = vec![scalar::zero(); dim];
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (t, x) in sc.value(&[a, i]).into_iter().enumerate() {
            if !x.is_zero() {
                out[t] += x * c;
            }
        }
    }
    out
}

/// First basis triple violating the Z2-graded Jacobi identity
/// `(-1)^{|a||c|}[[a,b],c] + (-1)^{|b||a|}[[b,c],a] + (-1)^{|c||b|}[[c,a],b] = 0`,
/// or `None` when the structure constants define a graded Lie algebra.
pub fn jacobi_defect(sc: &StructureConstants) -> Option<(usize, usize, usize)> {
    let dim = sc.v_space.dim();
    let parity = |i: usize| sc.v_space.parity(i);
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let mut total = vec![scalar::zero(); dim];
                let cyclic = [(a, b, c), (b, c, a), (c, a, b)];
                for (x, y, z) in cyclic {
                    let inner = sc.value(&[x, y]);
                    let term = bracket_vec_left(sc, &inner, z);
                    let sign_odd = parity(x).is_odd() && parity(z).is_odd();
                    for (t, v) in term.into_iter().enumerate() {
                        if sign_odd {
                            total[t] -= v;
                        } else {
                            total[t] += v;
                        }
                    }
                }
                if !is_zero_vec(&total) {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// First basis triple with `(ab)c != a(bc)`, or `None` for an associative
/// structure.
pub fn assoc_defect(sc: &StructureConstants) -> Option<(usize, usize, usize)> {
    let dim = sc.v_space.dim();
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let left = bracket_vec_left(sc, &sc.value(&[a, b]), c);
                let right = bracket_vec_right(sc, a, &sc.value(&[b, c]));
                let difference: Vec<Scalar> =
                    left.into_iter().zip(right).map(|(l, r)| l - r).collect();
                if !is_zero_vec(&difference) {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// Classical Chevalley-Eilenberg complex of an ordinary (all-even) Lie
/// algebra with adjoint coefficients, in degrees 1..3. Returns the matrices
/// of d1 : Hom(V,V) -> Hom(L^2 V, V) and d2 : Hom(L^2 V, V) -> Hom(L^3 V, V)
/// over the standard bases.
pub fn ce_matrices(sc: &StructureConstants) -> (Matrix, Matrix) {
    let dim = sc.v_space.dim();
    assert!(
        (0..dim).all(|i| sc.v_space.parity(i) == Parity::Even),
        "classical CE oracle requires an all-even space"
    );
    let pairs: Vec<(usize, usize)> =
        (0..dim).flat_map(|i| (i + 1..dim).map(move |j| (i, j))).collect();
    let triples: Vec<(usize, usize, usize)> = (0..dim)
        .flat_map(|i| {
            (i + 1..dim).flat_map(move |j| (j + 1..dim).map(move |k| (i, j, k)))
        })
        .collect();

    // d1 psi (x,y) = [x, psi(y)] - [y, psi(x)] - psi([x,y])
    let c1 = dim * dim; // psi_{from -> to}
    let mut d1 = Vec::new();
    for (col, (from, to)) in (0..dim).flat_map(|f| (0..dim).map(move |t| (f, t))).enumerate() {
        // psi(v_from) = v_to
        for (pi, &(x, y)) in pairs.iter().enumerate() {
            let mut val = vec![scalar::zero(); dim];
            if y == from {
                for (t, v) in sc.value(&[x, to]).into_iter().enumerate() {
                    val[t] += v;
                }
            }
            if x == from {
                for (t, v) in sc.value(&[y, to]).into_iter().enumerate() {
                    val[t] -= v;
                }
            }
            let bracket = sc.value(&[x, y]);
            val[to] -= bracket[from].clone();
            for (t, v) in val.into_iter().enumerate() {
                if !v.is_zero() {
                    d1.push((pi * dim + t, col, v));
                }
            }
        }
    }
    let d1 = Matrix::from_triplets(pairs.len() * dim, c1, d1);

    // d2 phi (x,y,z) = [x,phi(y,z)] - [y,phi(x,z)] + [z,phi(x,y)]
    //                  - phi([x,y],z) + phi([x,z],y) - phi([y,z],x)
    let phi_index = |i: usize, j: usize| -> (usize, i64) {
        // index into ordered pairs with antisymmetry sign
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => (pairs.iter().position(|&p| p == (i, j)).unwrap(), 1),
            Ordering::Greater => (pairs.iter().position(|&p| p == (j, i)).unwrap(), -1),
            Ordering::Equal => (usize::MAX, 0),
        }
    };
    let c2 = pairs.len() * dim;
    let mut d2 = Vec::new();
    for (pcol, _) in pairs.iter().enumerate() {
        for target in 0..dim {
            let col = pcol * dim + target;
            // phi(v_i, v_j) = v_target
            for (ti, &(x, y, z)) in triples.iter().enumerate() {
                let mut val = vec![scalar::zero(); dim];
                // [x, phi(y,z)]
                let mut add_outer = |u: usize, v1: usize, v2: usize, sign: i64| {
                    let (pidx, s) = phi_index(v1, v2);
                    if pidx != usize::MAX && pidx == pcol {
                        let total = sign * s;
                        for (t, w) in sc.value(&[u, target]).into_iter().enumerate() {
                            if total > 0 {
                                val[t] += w;
                            } else {
                                val[t] -= w;
                            }
                        }
                    }
                };
                add_outer(x, y, z, 1);
                add_outer(y, x, z, -1);
                add_outer(z, x, y, 1);
                // - phi([x,y],z) + phi([x,z],y) - phi([y,z],x)
                let mut add_inner = |v1: usize, v2: usize, other: usize, sign: i64| {
                    let bracket = sc.value(&[v1, v2]);
                    for (b, coeff) in bracket.iter().enumerate() {
                        if coeff.is_zero() {
                            continue;
                        }
                        let (pidx, s) = phi_index(b, other);
                        if pidx != usize::MAX && pidx == pcol {
                            let c = if sign * s > 0 { coeff.clone() } else { -coeff.clone() };
                            val[target] += c;
                        }
                    }
                };
                add_inner(x, y, z, -1);
                add_inner(x, z, y, 1);
                add_inner(y, z, x, -1);
                for (t, v) in val.into_iter().enumerate() {
                    if !v.is_zero() {
                        d2.push((ti * dim + t, col, v));
                    }
                }
            }
        }
    }
    let d2 = Matrix::from_triplets(triples.len() * dim, c2, d2);
    (d1, d2)
}

/// Dimension of the classical second cohomology H^2(V, V) of an ordinary
/// Lie algebra: alternating 2-cochains modulo coboundaries of linear maps.
pub fn ce_h2_dim(sc: &StructureConstants) -> usize {
    let (d1, d2) = ce_matrices(sc);
    let cocycles = linalg::kernel_basis(&d2).len();
    let coboundaries = linalg::image_basis(&d1).len();
    cocycles - coboundaries
}

/// Dimension of the derivation algebra: kernel of the degree-1 CE map.
pub fn derivation_dim(sc: &StructureConstants) -> usize {
    let (d1, _) = ce_matrices(sc);
    linalg::kernel_basis(&d1).len()
}

/// Harrison's theorem route: for A = K[x]/I presented by relation elements
/// of a truncated free algebra, `dim Ha^2(A, K) = dim I/(m I)`, computed as
/// a rank difference of ideal spans. The ambient truncation must be deep
/// enough to contain m times the relations.
pub fn presented_ha2_dim(
    free: &crate::basealg::BaseAlgebra,
    relations: &[Vec<Scalar>],
) -> usize {
    let mut ideal_span: Vec<Vec<Scalar>> = Vec::new();
    let mut m_ideal_span: Vec<Vec<Scalar>> = Vec::new();
    for rel in relations {
        if rel.iter().all(Zero::is_zero) {
            continue;
        }
        ideal_span.push(rel.clone());
        for u in 0..free.dim() {
            let prod = free.mul(&free.basis_element(u), rel);
            if !prod.iter().all(Zero::is_zero) {
                ideal_span.push(prod.clone());
                m_ideal_span.push(prod);
            }
        }
    }
    let rank = |vectors: &[Vec<Scalar>]| -> usize {
        if vectors.is_empty() {
            0
        } else {
            linalg::echelon_basis(free.dim(), vectors).len()
        }
    };
    rank(&ideal_span) - rank(&m_ideal_span)
}
