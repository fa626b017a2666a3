//! Harrison cochains and cohomology of a base algebra with coefficients in
//! an infinitesimal module, and the universal infinitesimal extension.
//!
//! Only degrees 1 and 2 (plus the degree-3 target of d2) exist here; the
//! deformation machinery uses nothing above d2. Coefficients are computed
//! for the ground field and tensored with the module: for infinitesimal
//! finite-type N one kernel computation serves all modules. The module
//! action vanishes through the augmentation, so the coboundary formulas
//! reduce to their middle terms: `d1 l (m, m') = -l(m m')` and
//! `d2 phi (m, m', m'') = -phi(m m', m'') + phi(m, m' m'')`.

use num::traits::Zero;

use crate::basealg::{BaseAlgebra, Element, Generator};
use crate::error::{Error, Result};
use crate::graded::Parity;
use crate::linalg::{self, Matrix};
use crate::scalar::{self, Scalar};

/// A 1-cochain m -> N: one module vector per monomial of m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarrisonCochain1 {
    module_dim: usize,
    pub values: Vec<Vec<Scalar>>,
}

impl HarrisonCochain1 {
    pub fn zero(base: &BaseAlgebra, module_dim: usize) -> Self {
        HarrisonCochain1 {
            module_dim,
            values: vec![vec![scalar::zero(); module_dim]; base.dim()],
        }
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn get(&self, i: usize) -> &[Scalar] {
        &self.values[i]
    }

    pub fn set(&mut self, i: usize, value: Vec<Scalar>) {
        assert_eq!(value.len(), self.module_dim);
        self.values[i] = value;
    }

    /// Value on an arbitrary element of m, by linearity.
    pub fn apply(&self, el: &Element) -> Vec<Scalar> {
        let mut out = vec![scalar::zero(); self.module_dim];
        for (i, c) in el.iter().enumerate() {
            if !c.is_zero() {
                for (a, v) in self.values[i].iter().enumerate() {
                    out[a] += v * c;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(Zero::is_zero))
    }
}

/// A graded-symmetric 2-cochain m x m -> N, stored densely on ordered pairs
/// with the symmetry maintained by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarrisonCochain2 {
    module_dim: usize,
    values: Vec<Vec<Vec<Scalar>>>,
}

impl HarrisonCochain2 {
    pub fn zero(base: &BaseAlgebra, module_dim: usize) -> Self {
        HarrisonCochain2 {
            module_dim,
            values: vec![vec![vec![scalar::zero(); module_dim]; base.dim()]; base.dim()],
        }
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn get(&self, i: usize, j: usize) -> &[Scalar] {
        &self.values[i][j]
    }

    /// Set phi(i, j) and its graded-symmetric mirror.
    pub fn set_symmetric(
        &mut self,
        base: &BaseAlgebra,
        i: usize,
        j: usize,
        value: Vec<Scalar>,
    ) -> Result<()> {
        assert_eq!(value.len(), self.module_dim);
        let sign_odd = base.monomial_parity(i).is_odd() && base.monomial_parity(j).is_odd();
        if i == j && sign_odd {
            if value.iter().all(Zero::is_zero) {
                return Ok(());
            }
            return Err(Error::InvalidInput(
                "graded symmetry forces phi(a, a) = 0 for odd a".into(),
            ));
        }
        let mirrored: Vec<Scalar> = if sign_odd {
            value.iter().map(|c| -c.clone()).collect()
        } else {
            value.clone()
        };
        self.values[i][j] = value;
        if i != j {
            self.values[j][i] = mirrored;
        }
        Ok(())
    }

    pub fn check_graded_symmetric(&self, base: &BaseAlgebra) -> Result<()> {
        for i in 0..self.values.len() {
            for j in 0..self.values.len() {
                let sign_odd =
                    base.monomial_parity(i).is_odd() && base.monomial_parity(j).is_odd();
                for a in 0..self.module_dim {
                    let mirrored = if sign_odd {
                        -self.values[j][i][a].clone()
                    } else {
                        self.values[j][i][a].clone()
                    };
                    if self.values[i][j][a] != mirrored {
                        return Err(Error::InvalidInput(format!(
                            "2-cochain is not graded symmetric at ({}, {})",
                            base.monomial_display(i),
                            base.monomial_display(j)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Bilinear extension to arbitrary elements of m.
    pub fn apply(&self, a: &Element, b: &Element) -> Vec<Scalar> {
        let mut out = vec![scalar::zero(); self.module_dim];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (z, v) in self.values[i][j].iter().enumerate() {
                    out[z] += v * &xy;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values
            .iter()
            .all(|row| row.iter().all(|v| v.iter().all(Zero::is_zero)))
    }

    /// Nonzero entries (i, j, module vector).
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &Vec<Scalar>)> {
        self.values.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.iter().all(Zero::is_zero))
                .map(move |(j, v)| ((i, j), v))
        })
    }

    /// Is the cochain surjective onto the module (as a linear map from
    /// m x m)? Essential extensions are exactly the surjective ones.
    pub fn is_surjective(&self) -> bool {
        let mut columns: Vec<Vec<Scalar>> = Vec::new();
        for row in &self.values {
            for v in row {
                if !v.iter().all(Zero::is_zero) {
                    columns.push(v.clone());
                }
            }
        }
        if self.module_dim == 0 {
            return true;
        }
        linalg::image_basis(&Matrix::from_columns(self.module_dim, &columns)).len()
            == self.module_dim
    }
}

/// A 3-cochain target of d2; only zero-ness and values are ever inspected.
#[derive(Debug, Clone)]
pub struct HarrisonCochain3 {
    module_dim: usize,
    pub values: Vec<Vec<Vec<Vec<Scalar>>>>,
}

impl HarrisonCochain3 {
    pub fn get(&self, i: usize, j: usize, k: usize) -> &[Scalar] {
        &self.values[i][j][k]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|a| {
            a.iter()
                .all(|b| b.iter().all(|v| v.iter().all(Zero::is_zero)))
        })
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }
}

/// d1 of a 1-cochain with infinitesimal coefficients: the module-action
/// terms vanish, leaving `d1 l (m, m') = -l(m m')`.
pub fn d1(base: &BaseAlgebra, lambda: &HarrisonCochain1) -> HarrisonCochain2 {
    let mut out = HarrisonCochain2::zero(base, lambda.module_dim);
    for i in 0..base.dim() {
        for j in 0..base.dim() {
            let product = base.product_of_basis(i, j);
            let value: Vec<Scalar> = lambda
                .apply(&product)
                .into_iter()
                .map(|c| -c)
                .collect();
            out.values[i][j] = value;
        }
    }
    out
}

/// d2 of a 2-cochain with infinitesimal coefficients:
/// `d2 phi (m, m', m'') = -phi(m m', m'') + phi(m, m' m'')`.
pub fn d2(base: &BaseAlgebra, phi: &HarrisonCochain2) -> Result<HarrisonCochain3> {
    phi.check_graded_symmetric(base)?;
    let dim = base.dim();
    let mut values =
        vec![vec![vec![vec![scalar::zero(); phi.module_dim]; dim]; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let ij = base.product_of_basis(i, j);
            for k in 0..dim {
                let jk = base.product_of_basis(j, k);
                let mut value = vec![scalar::zero(); phi.module_dim];
                for (a, c) in phi.apply(&ij, &base.basis_element(k)).into_iter().enumerate() {
                    value[a] -= c;
                }
                for (a, c) in phi.apply(&base.basis_element(i), &jk).into_iter().enumerate() {
                    value[a] += c;
                }
                values[i][j][k] = value;
            }
        }
    }
    Ok(HarrisonCochain3 { module_dim: phi.module_dim, values })
}

/// Canonical coordinates for graded-symmetric 2-cochains with ground-field
/// coefficients: pairs i <= j, omitting odd diagonal pairs.
pub fn pair_coordinates(base: &BaseAlgebra) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..base.dim() {
        for j in i..base.dim() {
            if i == j && base.monomial_parity(i).is_odd() {
                continue;
            }
            out.push((i, j));
        }
    }
    out
}

#[allow(dead_code)]
fn cochain2_from_coords(
    base: &BaseAlgebra,
    pairs: &[(usize, usize)],
    coords: &[Scalar],
) -> HarrisonCochain2 {
    let mut phi = HarrisonCochain2::zero(base, 1);
    for (&(i, j), c) in pairs.iter().zip(coords) {
        if !c.is_zero() {
            phi.set_symmetric(base, i, j, vec![c.clone()]).expect("canonical pair");
        }
    }
    phi
}

fn cochain2_to_coords(
    pairs: &[(usize, usize)],
    phi: &HarrisonCochain2,
    component: usize,
) -> Vec<Scalar> {
    pairs
        .iter()
        .map(|&(i, j)| phi.get(i, j)[component].clone())
        .collect()
}

/// Matrix of d1 with ground-field coefficients over the canonical bases.
pub fn d1_matrix(base: &BaseAlgebra) -> Matrix {
    let pairs = pair_coordinates(base);
    let mut triplets = Vec::new();
    for col in 0..base.dim() {
        let mut lambda = HarrisonCochain1::zero(base, 1);
        lambda.set(col, vec![scalar::one()]);
        let image = d1(base, &lambda);
        for (row, &(i, j)) in pairs.iter().enumerate() {
            let v = &image.get(i, j)[0];
            if !v.is_zero() {
                triplets.push((row, col, v.clone()));
            }
        }
    }
    Matrix::from_triplets(pairs.len(), base.dim(), triplets)
}

/// Matrix of d2 with ground-field coefficients: rows are ordered triples.
pub fn d2_matrix(base: &BaseAlgebra) -> Matrix {
    let pairs = pair_coordinates(base);
    let dim = base.dim();
    let mut triplets = Vec::new();
    for (col, &(i, j)) in pairs.iter().enumerate() {
        let mut phi = HarrisonCochain2::zero(base, 1);
        phi.set_symmetric(base, i, j, vec![scalar::one()]).expect("canonical pair");
        let image = d2(base, &phi).expect("symmetric by construction");
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let v = &image.get(a, b, c)[0];
                    if !v.is_zero() {
                        triplets.push(((a * dim + b) * dim + c, col, v.clone()));
                    }
                }
            }
        }
    }
    Matrix::from_triplets(dim * dim * dim, pairs.len(), triplets)
}

/// One Ha^2 class with ground-field coefficients.
#[derive(Debug, Clone)]
pub struct Ha2Class {
    pub parity: Parity,
    /// Minimal order sum over the representative's support.
    pub order: usize,
    /// Representative in pair coordinates.
    pub rep: Vec<Scalar>,
}

/// Ha^2(A, K): cocycle and coboundary bases in pair coordinates, class
/// representatives chosen echelon-greedily, and the matrices that produced
/// them.
pub struct Ha2Report {
    pub pairs: Vec<(usize, usize)>,
    pub d1_mat: Matrix,
    pub d2_mat: Matrix,
    pub cocycles: Vec<Vec<Scalar>>,
    pub boundaries: Vec<Vec<Scalar>>,
    pub classes: Vec<Ha2Class>,
}

pub fn ha2_report(base: &BaseAlgebra) -> Result<Ha2Report> {
    let pairs = pair_coordinates(base);
    let d1_mat = d1_matrix(base);
    let d2_mat = d2_matrix(base);
    let cocycles = linalg::kernel_basis(&d2_mat);
    let boundaries = linalg::image_basis(&d1_mat);
    // Boundaries are cocycles: d2 d1 = 0.
    for b in &boundaries {
        assert!(
            d2_mat.mul_vec(b).iter().all(Zero::is_zero),
            "internal error: d2 . d1 != 0"
        );
    }
    let classes = if cocycles.is_empty() {
        Vec::new()
    } else {
        let z_mat = Matrix::from_columns(pairs.len(), &cocycles);
        let b_in_z: Vec<Vec<Scalar>> = linalg::solve_many(&z_mat, &boundaries)?
            .into_iter()
            .map(|s| s.expect("boundaries lie in the cocycle space"))
            .collect();
        linalg::quotient_representative_indices(cocycles.len(), &b_in_z)
            .into_iter()
            .map(|i| {
                let rep = cocycles[i].clone();
                let mut parity = Parity::Even;
                let mut order = usize::MAX;
                for (&(a, b), c) in pairs.iter().zip(&rep) {
                    if c.is_zero() {
                        continue;
                    }
                    parity = base.monomial_parity(a) + base.monomial_parity(b);
                    order = order.min(base.monomial_order(a) + base.monomial_order(b));
                }
                Ha2Class { parity, order, rep }
            })
            .collect()
    };
    Ok(Ha2Report { pairs, d1_mat, d2_mat, cocycles, boundaries, classes })
}

/// Ha^1(A, K) = Der(A, K): kernel of d1; there are no 1-coboundaries.
pub struct Ha1Report {
    pub cocycles: Vec<Vec<Scalar>>,
}

pub fn ha1_report(base: &BaseAlgebra) -> Ha1Report {
    Ha1Report { cocycles: linalg::kernel_basis(&d1_matrix(base)) }
}

/// Dimension of Ha^degree(A, N) for an infinitesimal module of the given
/// dimension, via Ha(A, N) = N tensor Ha(A, K).
pub fn ha_dim(base: &BaseAlgebra, module_dim: usize, degree: u8) -> Result<usize> {
    let k_dim = match degree {
        1 => ha1_report(base).cocycles.len(),
        2 => ha2_report(base)?.classes.len(),
        _ => {
            return Err(Error::InvalidInput(
                "only Harrison degrees 1 and 2 are implemented".into(),
            ))
        }
    };
    Ok(k_dim * module_dim)
}

/// A square-zero extension of `base` by an infinitesimal module, carried
/// together with its materialized total algebra and defining cocycle.
#[derive(Debug, Clone)]
pub struct Extension {
    pub base: BaseAlgebra,
    pub total: BaseAlgebra,
    pub module: Vec<Generator>,
    pub cocycle: HarrisonCochain2,
}

impl Extension {
    pub fn new(
        base: &BaseAlgebra,
        module: Vec<Generator>,
        cocycle: HarrisonCochain2,
    ) -> Result<Extension> {
        let total = base.infinitesimal_extension(&module, &cocycle)?;
        Ok(Extension { base: base.clone(), total, module, cocycle })
    }

    /// Index of a module element inside the total algebra's basis.
    pub fn module_index(&self, a: usize) -> usize {
        self.base.dim() + a
    }

    pub fn module_dim(&self) -> usize {
        self.module.len()
    }

    /// Embed a base-m element into the total algebra.
    pub fn lift(&self, el: &Element) -> Element {
        let mut out = self.total.zero_element();
        out[..el.len()].clone_from_slice(el);
        out
    }

    /// An extension is essential when its cocycle surjects onto the module.
    pub fn is_essential(&self) -> bool {
        self.cocycle.is_surjective()
    }
}

/// The universal infinitesimal extension: the module is Ha^2(A, K)^* and the
/// cocycle is mu^*(m, m') = sum_c (-1)^{(|m|+|m'|)|phi_c|} mu(phi_c)(m, m') n_c
/// over the class representatives mu(phi_c).
pub struct UniversalExtension {
    pub extension: Extension,
    pub report: Ha2Report,
}

pub fn universal_infinitesimal_extension(base: &BaseAlgebra) -> Result<UniversalExtension> {
    let report = ha2_report(base)?;
    let module: Vec<Generator> = report
        .classes
        .iter()
        .enumerate()
        .map(|(c, class)| Generator {
            name: format!("n{}", c + 1),
            parity: class.parity,
            order: if class.order == usize::MAX { 1 } else { class.order },
        })
        .collect();
    let mut mu_star = HarrisonCochain2::zero(base, module.len());
    for (c, class) in report.classes.iter().enumerate() {
        let sign = if class.parity.is_odd() { -scalar::one() } else { scalar::one() };
        for (&(i, j), coeff) in report.pairs.iter().zip(&class.rep) {
            if coeff.is_zero() {
                continue;
            }
            // Fill both orientations through set_symmetric, accumulating
            // one class at a time.
            let mut value = mu_star.get(i, j).to_vec();
            value[c] = &sign * coeff;
            mu_star.set_symmetric(base, i, j, value)?;
        }
    }
    let extension = Extension::new(base, module, mu_star)?;
    Ok(UniversalExtension { extension, report })
}

/// Decompose a module-valued 2-cocycle over the Ha^2 classes: returns
/// per-module-component class coordinates and a 1-cochain witness lambda
/// with `phi = sum g_{c,a} rep_c . n_a + d1 lambda`.
pub fn decompose_cocycle(
    base: &BaseAlgebra,
    report: &Ha2Report,
    phi: &HarrisonCochain2,
) -> Result<(Vec<Vec<Scalar>>, HarrisonCochain1)> {
    phi.check_graded_symmetric(base)?;
    let mut class_coords = Vec::new();
    let mut lambda = HarrisonCochain1::zero(base, phi.module_dim());
    // Solve [class reps | d1] x = phi_a for each module component a.
    let mut columns: Vec<Vec<Scalar>> =
        report.classes.iter().map(|c| c.rep.clone()).collect();
    let n_classes = columns.len();
    for col in 0..base.dim() {
        let mut l = HarrisonCochain1::zero(base, 1);
        l.set(col, vec![scalar::one()]);
        let image = d1(base, &l);
        columns.push(cochain2_to_coords(&report.pairs, &image, 0));
    }
    let solve_mat = Matrix::from_columns(report.pairs.len(), &columns);
    for a in 0..phi.module_dim() {
        let target = cochain2_to_coords(&report.pairs, phi, a);
        // Cocycle check for this component.
        if !report.d2_mat.mul_vec(&target).iter().all(Zero::is_zero) {
            return Err(Error::InvalidInput(
                "cochain component is not a 2-cocycle".into(),
            ));
        }
        let sol = linalg::solve(&solve_mat, &target)?
            .expect("2-cocycles decompose over classes and coboundaries");
        class_coords.push(sol[..n_classes].to_vec());
        for (col, c) in sol[n_classes..].iter().enumerate() {
            if !c.is_zero() {
                let mut v = lambda.values[col].clone();
                v[a] = c.clone();
                lambda.set(col, v);
            }
        }
    }
    Ok((class_coords, lambda))
}

/// The unique extension of `f : A -> A'` to a morphism from the universal
/// infinitesimal extension of A into a given infinitesimal extension of A'.
pub fn extend_morphism(
    universal: &UniversalExtension,
    target: &Extension,
    f: &crate::basealg::AlgebraMorphism,
) -> Result<crate::basealg::AlgebraMorphism> {
    let a = &universal.extension.base;
    if f.source != *a {
        return Err(Error::InvalidInput("morphism source must be the extended base".into()));
    }
    if f.target != target.base {
        return Err(Error::InvalidInput("morphism target must be the extension base".into()));
    }
    // Pull the target cocycle back along f.
    let mut pulled = HarrisonCochain2::zero(a, target.module_dim());
    for i in 0..a.dim() {
        for j in i..a.dim() {
            if i == j && a.monomial_parity(i).is_odd() {
                continue;
            }
            let value = target.cocycle.apply(&f.apply_basis(i), &f.apply_basis(j));
            pulled.set_symmetric(a, i, j, value)?;
        }
    }
    let (class_coords, lambda) = decompose_cocycle(a, &universal.report, &pulled)?;
    // g : M -> N on the module duals, with the mu* sign.
    let module_images: Vec<Vec<Scalar>> = universal
        .report
        .classes
        .iter()
        .enumerate()
        .map(|(c, class)| {
            let sign = if class.parity.is_odd() { -scalar::one() } else { scalar::one() };
            (0..target.module_dim())
                .map(|a_idx| &class_coords[a_idx][c] * &sign)
                .collect()
        })
        .collect();
    // Generator images in the target total algebra: base generators go to
    // f(gen) lifted plus the lambda correction in the module, module
    // elements go to g(module element).
    let mut images = Vec::new();
    for g in 0..a.generators.len() {
        let mut image = match a.generator_monomial(g) {
            Some(i) => {
                let mut v = target.lift(&f.apply_basis(i));
                for (idx, c) in lambda.get(i).iter().enumerate() {
                    v[target.module_index(idx)] += c.clone();
                }
                v
            }
            None => target.total.zero_element(),
        };
        // Parity scrub: zero entries keep homogeneity checks happy.
        if a.generators[g].parity == Parity::Even {
            // nothing to adjust; check() validates
        }
        images.push(std::mem::take(&mut image));
    }
    for n in module_images {
        let mut v = target.total.zero_element();
        for (idx, c) in n.into_iter().enumerate() {
            v[target.module_index(idx)] = c;
        }
        images.push(v);
    }
    crate::basealg::AlgebraMorphism::new(universal.extension.total.clone(), target.total.clone(), images)
}
