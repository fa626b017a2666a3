//! The deformation engine: Maurer-Cartan defects, infinitesimal equivalence,
//! push-outs, the universal infinitesimal deformation, obstruction classes,
//! and the order-by-order miniversal construction.
//!
//! A deformation is an odd codifferential `d + delta` in `L (x) A` projecting
//! to d, stored through the coefficients `delta_u` of `delta = sum delta_u (x) u`
//! over the monomial basis of m. The bracket on `L (x) A` is
//! `[phi (x) a, psi (x) b] = (-1)^{|a||psi|} [phi, psi] (x) ab`, which is where
//! every sign in this module comes from.
//!
//! The miniversal iteration keeps the base presented as F/I for the free
//! graded algebra F on the cohomology parameters: the universal infinitesimal
//! extension of A_k = F/I_k is materialized as C = F_{k+1}/(m I_k) with
//! module M = I_k/(m I_k), so killed obstruction directions lift to honest
//! relation polynomials. The cochain-complex construction of the universal
//! extension lives in `harrison` and the two are cross-checked in tests.

use std::collections::BTreeMap;

use num::traits::Zero;

use crate::basealg::{AlgebraMorphism, BaseAlgebra, Element, Generator, Monomial};
use crate::coderiv::{big_d, Coderivation, Mode};
use crate::cohomology::CohomologyReport;
use crate::error::{Error, Result};
use crate::graded::Parity;
use crate::linalg::{self, Matrix};
use crate::scalar::{self, Scalar};

/// A (candidate) deformation of `d` with base A: coefficients of delta over
/// the monomial basis of m. Whether Maurer-Cartan holds is a property
/// checked through [`Deformation::mc_defect`], so partially built objects
/// can be inspected.
#[derive(Debug, Clone)]
pub struct Deformation {
    pub d: Coderivation,
    pub base: BaseAlgebra,
    pub delta: Vec<Coderivation>,
    pub mode: Mode,
}

impl Deformation {
    pub fn new(
        d: Coderivation,
        base: BaseAlgebra,
        delta: Vec<Coderivation>,
        mode: Mode,
    ) -> Result<Deformation> {
        if delta.len() != base.dim() {
            return Err(Error::DimensionMismatch(
                "one delta coefficient per basis monomial of m".into(),
            ));
        }
        for (u, coeff) in delta.iter().enumerate() {
            if coeff.kind != d.kind || coeff.weight_cap != d.weight_cap {
                return Err(Error::CapMismatch(coeff.weight_cap, d.weight_cap));
            }
            if !coeff.is_zero() {
                let expected = base.monomial_parity(u).flip();
                if coeff.parity != expected {
                    return Err(Error::Parity(format!(
                        "delta coefficient at {} must be {} so the total term is odd",
                        base.monomial_display(u),
                        expected
                    )));
                }
                if mode == Mode::Strict && coeff.support() != vec![2] {
                    return Err(Error::InvalidInput(
                        "strict mode restricts deformations to arity-2 coderivations".into(),
                    ));
                }
            }
        }
        Ok(Deformation { d, base, delta, mode })
    }

    pub fn trivial(d: &Coderivation, base: BaseAlgebra, mode: Mode) -> Deformation {
        let delta = (0..base.dim())
            .map(|u| {
                Coderivation::zero(
                    d.space().clone(),
                    d.kind,
                    base.monomial_parity(u).flip(),
                    d.weight_cap,
                )
            })
            .collect();
        Deformation { d: d.clone(), base, delta, mode }
    }

    /// `D(delta) + 1/2 [delta, delta]`, one coefficient per monomial of m;
    /// all zero exactly when the deformation satisfies Maurer-Cartan.
    pub fn mc_defect(&self) -> Result<Vec<Coderivation>> {
        let mut defect: Vec<Coderivation> = (0..self.base.dim())
            .map(|u| {
                Coderivation::zero(
                    self.d.space().clone(),
                    self.d.kind,
                    self.base.monomial_parity(u),
                    self.d.weight_cap,
                )
            })
            .collect();
        for (u, coeff) in self.delta.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let du = big_d(&self.d, coeff)?;
            defect[u] = defect[u].add(&du)?;
        }
        let half = scalar::half();
        for (u, cu) in self.delta.iter().enumerate() {
            if cu.is_zero() {
                continue;
            }
            for (v, cv) in self.delta.iter().enumerate() {
                if cv.is_zero() {
                    continue;
                }
                let product = self.base.product_of_basis(u, v);
                if product.iter().all(Zero::is_zero) {
                    continue;
                }
                let bracket = cu.bracket(cv)?;
                if bracket.is_zero() {
                    continue;
                }
                // 1/2 (-1)^{|u||delta_v|} [delta_u, delta_v] (x) u v
                let sign = if self.base.monomial_parity(u).is_odd() && cv.parity.is_odd() {
                    -scalar::one()
                } else {
                    scalar::one()
                };
                for (w, c) in product.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let factor = &half * &sign * c;
                    defect[w] = defect[w].add(&bracket.scale(&factor))?;
                }
            }
        }
        Ok(defect)
    }

    pub fn satisfies_mc(&self) -> Result<bool> {
        Ok(self.mc_defect()?.iter().all(Coderivation::is_zero))
    }

    /// Push out along a base morphism: delta' = sum delta_u (x) tau(u).
    /// Maurer-Cartan is re-verified in the target.
    pub fn push_out(&self, tau: &AlgebraMorphism) -> Result<Deformation> {
        if tau.source != self.base {
            return Err(Error::InvalidInput("push-out morphism source mismatch".into()));
        }
        let target = tau.target.clone();
        let mut delta: Vec<Coderivation> = (0..target.dim())
            .map(|w| {
                Coderivation::zero(
                    self.d.space().clone(),
                    self.d.kind,
                    target.monomial_parity(w).flip(),
                    self.d.weight_cap,
                )
            })
            .collect();
        for (u, coeff) in self.delta.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let image = tau.apply_basis(u);
            for (w, c) in image.iter().enumerate() {
                if !c.is_zero() {
                    delta[w] = delta[w].add(&coeff.scale(c))?;
                }
            }
        }
        let out = Deformation::new(self.d.clone(), target, delta, self.mode)?;
        if !out.satisfies_mc()? {
            return Err(Error::InvalidInput(
                "push-out violates Maurer-Cartan: the map is not an algebra morphism".into(),
            ));
        }
        Ok(out)
    }

    /// Apply the equivalence exp(lambda) for an even coderivation
    /// `lambda = sum lambda_u (x) u`: the deformation becomes
    /// `e^{-ad_lambda}(d + delta)`, computed exactly (the base is nilpotent).
    pub fn apply_equivalence(&self, lambda: &[Coderivation]) -> Result<Deformation> {
        assert_eq!(lambda.len(), self.base.dim());
        for (u, l) in lambda.iter().enumerate() {
            if !l.is_zero() && l.parity != self.base.monomial_parity(u) {
                return Err(Error::Parity(
                    "equivalence coderivation must be even in total".into(),
                ));
            }
        }
        // Series terms: x_{j+1} = -[lambda, x_j] / (j+1), starting from
        // x_0 = d + delta; accumulate into the result.
        let mut acc: Vec<Coderivation> = self.delta.clone();
        let mut term_const = Some(self.d.clone());
        let mut term: Vec<Coderivation> = self.delta.clone();
        let mut j = 0usize;
        loop {
            j += 1;
            // next = [lambda, term] with base-product bookkeeping.
            let mut next: Vec<Coderivation> = (0..self.base.dim())
                .map(|w| {
                    Coderivation::zero(
                        self.d.space().clone(),
                        self.d.kind,
                        self.base.monomial_parity(w).flip(),
                        self.d.weight_cap,
                    )
                })
                .collect();
            let mut any = false;
            for (u, lu) in lambda.iter().enumerate() {
                if lu.is_zero() {
                    continue;
                }
                // [lambda_u (x) u, d (x) 1] = (-1)^{|u|} [lambda_u, d] (x) u
                if let Some(dpart) = &term_const {
                    let br = lu.bracket(dpart)?;
                    if !br.is_zero() {
                        let sign = if self.base.monomial_parity(u).is_odd() {
                            -scalar::one()
                        } else {
                            scalar::one()
                        };
                        next[u] = next[u].add(&br.scale(&sign))?;
                        any = true;
                    }
                }
                for (v, tv) in term.iter().enumerate() {
                    if tv.is_zero() {
                        continue;
                    }
                    let product = self.base.product_of_basis(u, v);
                    if product.iter().all(Zero::is_zero) {
                        continue;
                    }
                    let br = lu.bracket(tv)?;
                    if br.is_zero() {
                        continue;
                    }
                    let sign = if self.base.monomial_parity(u).is_odd() && tv.parity.is_odd() {
                        -scalar::one()
                    } else {
                        scalar::one()
                    };
                    for (w, c) in product.iter().enumerate() {
                        if !c.is_zero() {
                            next[w] = next[w].add(&br.scale(&(&sign * c)))?;
                            any = true;
                        }
                    }
                }
            }
            if !any {
                break;
            }
            // term_{j} = (-1)^j / j! ad^j: fold the -1/j factor in stepwise.
            let factor = -scalar::one() / scalar::from_int(j as i64);
            term = next
                .into_iter()
                .map(|c| c.scale(&factor))
                .collect();
            term_const = None;
            for (w, t) in term.iter().enumerate() {
                if !t.is_zero() {
                    acc[w] = acc[w].add(t)?;
                }
            }
            if j > self.base.dim() + 2 {
                panic!("equivalence series failed to terminate on a nilpotent base");
            }
        }
        Deformation::new(self.d.clone(), self.base.clone(), acc, self.mode)
    }

    /// Classes of the order-1 coefficients: the differential of the
    /// deformation, one class vector per base generator.
    pub fn differential(&self, report: &CohomologyReport) -> Result<Vec<Vec<Scalar>>> {
        let mut out = Vec::new();
        for g in 0..self.base.generators.len() {
            match self.base.generator_monomial(g) {
                None => out.push(vec![scalar::zero(); report.class_count()]),
                Some(u) => {
                    let coords = report
                        .decompose_coderivation(&self.delta[u])?
                        .ok_or_else(|| {
                            Error::InvalidInput(
                                "order-1 coefficient of a deformation must be a cocycle".into(),
                            )
                        })?;
                    out.push(coords);
                }
            }
        }
        Ok(out)
    }
}

/// Are two deformations over the same infinitesimal base equivalent? When
/// they are, returns the witness lambda with `delta - delta' = D(lambda)`
/// (weight-1 lambda in strict mode).
pub fn infinitesimal_equivalent(
    def1: &Deformation,
    def2: &Deformation,
    report: &CohomologyReport,
) -> Result<Option<Vec<Coderivation>>> {
    if def1.base != def2.base {
        return Err(Error::InvalidInput("deformations have different bases".into()));
    }
    if !def1.base.is_infinitesimal() {
        return Err(Error::InvalidInput(
            "infinitesimal equivalence requires an infinitesimal base".into(),
        ));
    }
    let mut witness = Vec::new();
    for u in 0..def1.base.dim() {
        let diff = def1.delta[u].sub(&def2.delta[u])?;
        if diff.is_zero() {
            witness.push(Coderivation::zero(
                def1.d.space().clone(),
                def1.d.kind,
                def1.base.monomial_parity(u),
                def1.d.weight_cap,
            ));
            continue;
        }
        let (p, vec) = report.basis.to_vec(&diff)?;
        match report.boundary_witness(p, &vec, def1.mode)? {
            None => return Ok(None),
            Some(lambda_vec) => {
                witness.push(report.basis.from_vec(p.flip(), &lambda_vec)?);
            }
        }
    }
    Ok(Some(witness))
}

/// The universal infinitesimal deformation `d + sum mu_i (x) t^i`, one
/// parameter per relevant cohomology class (all classes in infinity mode,
/// weight-2 classes in strict mode). Parameters carry the flipped parity
/// and the filtration order of their class.
pub struct UniversalInfinitesimal {
    pub deformation: Deformation,
    /// Global class index behind each base generator.
    pub class_of_generator: Vec<usize>,
}

pub fn universal_infinitesimal(
    d: &Coderivation,
    report: &CohomologyReport,
    mode: Mode,
) -> Result<UniversalInfinitesimal> {
    if d.weight_cap != report.basis.cap {
        return Err(Error::CapMismatch(d.weight_cap, report.basis.cap));
    }
    let params = report.parameter_classes(mode);
    let generators: Vec<Generator> = params
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let class = &report.classes[c];
            Generator::new(format!("t{}", i + 1), class.parity.flip(), class.order)
        })
        .collect();
    let base = BaseAlgebra::infinitesimal(generators);
    let mut delta: Vec<Coderivation> = (0..base.dim())
        .map(|u| {
            Coderivation::zero(
                d.space().clone(),
                d.kind,
                base.monomial_parity(u).flip(),
                d.weight_cap,
            )
        })
        .collect();
    for (i, &c) in params.iter().enumerate() {
        let u = base
            .generator_monomial(i)
            .expect("infinitesimal bases keep all generators");
        delta[u] = report.lift_mu(c)?;
    }
    let deformation = Deformation::new(d.clone(), base, delta, mode)?;
    debug_assert!(deformation.satisfies_mc()?);
    Ok(UniversalInfinitesimal { deformation, class_of_generator: params })
}

/// The factorizing morphism of the universal property: for a deformation
/// over an infinitesimal base, the unique map tau with
/// `push_out(universal, tau)` equivalent to it. Read off the class
/// decomposition of the order-1 coefficients.
pub fn factor_infinitesimal(
    universal: &UniversalInfinitesimal,
    def: &Deformation,
    report: &CohomologyReport,
) -> Result<AlgebraMorphism> {
    if !def.base.is_infinitesimal() {
        return Err(Error::InvalidInput("target base must be infinitesimal".into()));
    }
    // Class coordinates of each target coefficient.
    let mut coords_of_monomial = Vec::new();
    for u in 0..def.base.dim() {
        let coords = report
            .decompose_coderivation(&def.delta[u])?
            .ok_or_else(|| {
                Error::InvalidInput("deformation coefficient is not a cocycle".into())
            })?;
        coords_of_monomial.push(coords);
    }
    let images: Vec<Element> = universal
        .class_of_generator
        .iter()
        .map(|&class| {
            (0..def.base.dim())
                .map(|u| coords_of_monomial[u][class].clone())
                .collect()
        })
        .collect();
    AlgebraMorphism::new(
        universal.deformation.base.clone(),
        def.base.clone(),
        images,
    )
}

/// The obstruction class of a deformation across a square-zero extension:
/// the cohomology class of `D(delta) + 1/2 [delta, delta]` computed over the
/// extension total algebra, expressed per module element.
pub struct ObstructionClass {
    pub module_dim: usize,
    /// Per module element: coordinates over the cohomology classes.
    pub components: Vec<Vec<Scalar>>,
}

impl ObstructionClass {
    pub fn is_zero(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.iter().all(Zero::is_zero))
    }
}

pub fn obstruction(
    def: &Deformation,
    extension: &crate::harrison::Extension,
    report: &CohomologyReport,
) -> Result<ObstructionClass> {
    if extension.base != def.base {
        return Err(Error::InvalidInput("extension base mismatch".into()));
    }
    // Lift delta to the total algebra (zero coefficients on the module).
    let total = &extension.total;
    let mut delta = Vec::with_capacity(total.dim());
    for w in 0..total.dim() {
        if w < def.base.dim() {
            delta.push(def.delta[w].clone());
        } else {
            delta.push(Coderivation::zero(
                def.d.space().clone(),
                def.d.kind,
                total.monomial_parity(w).flip(),
                def.d.weight_cap,
            ));
        }
    }
    let lifted = Deformation::new(def.d.clone(), total.clone(), delta, def.mode)?;
    let defect = lifted.mc_defect()?;
    for (w, gamma) in defect.iter().enumerate().take(def.base.dim()) {
        if !gamma.is_zero() {
            return Err(Error::InvalidInput(format!(
                "Maurer-Cartan fails over the base at {} before extending",
                def.base.monomial_display(w)
            )));
        }
    }
    let mut components = Vec::new();
    for a in 0..extension.module_dim() {
        let gamma = &defect[extension.module_index(a)];
        // gamma is a cocycle; anything else is an internal sign error.
        assert!(
            big_d(&def.d, gamma)?.is_zero(),
            "internal error: obstruction component is not a cocycle"
        );
        // Total parity is even: the component pairs an |n_a|-parity module
        // element with an |n_a|-parity coderivation.
        if !gamma.is_zero() {
            assert_eq!(
                gamma.parity,
                extension.module[a].parity,
                "internal error: obstruction component has odd total parity"
            );
        }
        let coords = report
            .decompose_coderivation(gamma)?
            .expect("cocycles decompose over the class basis");
        components.push(coords);
    }
    Ok(ObstructionClass { module_dim: extension.module_dim(), components })
}

/// A relation polynomial in the miniversal parameters, ambient-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    pub terms: BTreeMap<Vec<u32>, Scalar>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn from_element(algebra: &BaseAlgebra, el: &Element) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (i, c) in el.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(algebra.monomial(i).exponents.clone(), c.clone());
            }
        }
        Polynomial { terms }
    }

    /// Materialize in an algebra over the same generators; monomials that
    /// are dead there are dropped (they are zero by truncation).
    pub fn to_element(&self, algebra: &BaseAlgebra) -> Element {
        let mut out = algebra.zero_element();
        for (exponents, c) in &self.terms {
            let padded: Vec<u32> = {
                let mut e = exponents.clone();
                e.resize(algebra.generators.len(), 0);
                e
            };
            if let Some(i) = algebra.monomial_index(&Monomial { exponents: padded }) {
                out[i] = c.clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest order among the terms, under the given generators.
    pub fn leading_order(&self, generators: &[Generator]) -> Option<usize> {
        self.terms
            .keys()
            .map(|e| Monomial { exponents: e.clone() }.order(generators))
            .min()
    }

    pub fn display(&self, generators: &[Generator]) -> String {
        let mut pieces = Vec::new();
        for (exponents, c) in &self.terms {
            let m = Monomial { exponents: exponents.clone() };
            pieces.push(format!("{} {}", scalar::render_signed(c), m.display(generators)));
        }
        if pieces.is_empty() {
            "0".into()
        } else {
            pieces.join(" ").trim_start_matches("+ ").to_string()
        }
    }
}

/// Diagnostics for one order of the miniversal iteration.
#[derive(Debug, Clone)]
pub struct StageDiagnostics {
    /// The stage k that was just completed: the base now satisfies m^k = 0.
    pub stage: usize,
    /// Dimension of the universal extension module of the previous base.
    pub module_dim: usize,
    /// Rank of the obstruction: how many module directions were killed.
    pub obstruction_rank: usize,
    /// Number of relation polynomials after re-reduction.
    pub relations: usize,
    /// Number of nonzero correction coefficients added to delta.
    pub beta_terms: usize,
}

/// State of the miniversal construction at stage k: the base A_k = F_k/I_k
/// presented by relation polynomials, and the deformation over it, with
/// Maurer-Cartan holding exactly.
pub struct MiniversalState {
    pub mode: Mode,
    pub generators: Vec<Generator>,
    pub class_of_generator: Vec<usize>,
    pub stage: usize,
    pub relations: Vec<Polynomial>,
    pub deformation: Deformation,
    pub diagnostics: Vec<StageDiagnostics>,
}

/// Initialize at stage 2 with the universal infinitesimal deformation.
pub fn miniversal_init(
    d: &Coderivation,
    report: &CohomologyReport,
    mode: Mode,
) -> Result<MiniversalState> {
    let universal = universal_infinitesimal(d, report, mode)?;
    Ok(MiniversalState {
        mode,
        generators: universal.deformation.base.generators.clone(),
        class_of_generator: universal.class_of_generator,
        stage: 2,
        relations: Vec::new(),
        deformation: universal.deformation,
        diagnostics: Vec::new(),
    })
}

/// Echelon rows of a list of vectors, keeping a parallel combination
/// record so each surviving row knows its expression in the inputs.
struct LabeledEchelon {
    /// (reduced vector, pivot index, combination over the inputs)
    rows: Vec<(Vec<Scalar>, usize, Vec<Scalar>)>,
}

impl LabeledEchelon {
    fn new() -> Self {
        LabeledEchelon { rows: Vec::new() }
    }

    /// Insert a vector; `None` when it reduces to zero, otherwise the
    /// reduced, pivot-normalized row and its input combination.
    fn insert(
        &mut self,
        mut v: Vec<Scalar>,
        mut combo: Vec<Scalar>,
    ) -> Option<(Vec<Scalar>, Vec<Scalar>)> {
        for (row, pivot, row_combo) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let factor = v[*pivot].clone();
            for (i, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    v[i] -= c * &factor;
                }
            }
            for (i, c) in row_combo.iter().enumerate() {
                if !c.is_zero() {
                    combo[i] -= c * &factor;
                }
            }
        }
        let pivot = v.iter().position(|c| !c.is_zero())?;
        let inv = scalar::one() / v[pivot].clone();
        for c in v.iter_mut() {
            *c *= &inv;
        }
        for c in combo.iter_mut() {
            *c *= &inv;
        }
        self.rows.push((v.clone(), pivot, combo.clone()));
        self.rows.sort_by_key(|(_, p, _)| *p);
        Some((v, combo))
    }
}

impl MiniversalState {
    pub fn base(&self) -> &BaseAlgebra {
        &self.deformation.base
    }

    /// One inductive step: build the universal infinitesimal extension of
    /// A_k through the presentation C = F_{k+1}/(m I_k), compute the
    /// obstruction, quotient away its span, solve D(beta) = -gamma over the
    /// rest, and re-reduce the relation ideal.
    pub fn extend(&mut self, report: &CohomologyReport) -> Result<StageDiagnostics> {
        let k = self.stage;
        let d = self.deformation.d.clone();
        let a_k = self.deformation.base.clone();

        // The free cover at depth k+1 and the ideal data inside it.
        let free = BaseAlgebra::free_adic(self.generators.clone(), k + 1)?;
        let relation_elements: Vec<Element> = self
            .relations
            .iter()
            .map(|p| p.to_element(&free))
            .collect();
        // m . I_k: relations times every monomial of positive letter count.
        let mut m_ideal: Vec<Element> = Vec::new();
        for rel in &relation_elements {
            for u in 0..free.dim() {
                let prod = free.mul(&free.basis_element(u), rel);
                if !prod.iter().all(Zero::is_zero) {
                    m_ideal.push(prod);
                }
            }
        }
        let m_ideal_echelon = linalg::echelon_basis(free.dim(), &m_ideal);
        let (c_algebra, proj_fc) = free.quotient_by_echelon(&m_ideal_echelon)?;

        // Module M = I_k / (m I_k): classes of the relation polynomials and
        // of the k-letter monomials, echelonned with polynomial lifts.
        let mut m_basis = LabeledEchelon::new();
        let mut candidates: Vec<(Element, Polynomial)> = Vec::new();
        for (rel, poly) in relation_elements.iter().zip(&self.relations) {
            candidates.push((proj_fc.apply(rel), poly.clone()));
        }
        for i in 0..free.dim() {
            if free.monomial(i).letters() == k {
                candidates.push((
                    proj_fc.apply(&free.basis_element(i)),
                    Polynomial::from_element(&free, &free.basis_element(i)),
                ));
            }
        }
        let mut module_vectors: Vec<Element> = Vec::new();
        let mut module_lifts: Vec<Polynomial> = Vec::new();
        {
            let n_candidates = candidates.len();
            for (idx, (vector, _)) in candidates.iter().enumerate() {
                let mut combo = vec![scalar::zero(); n_candidates];
                combo[idx] = scalar::one();
                m_basis.insert(vector.clone(), combo);
            }
            for (vector, _, combo) in &m_basis.rows {
                module_vectors.push(vector.clone());
                // The lift follows the same combination of candidate polys.
                let mut lift = Polynomial::zero();
                for (i, c) in combo.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for (e, coeff) in &candidates[i].1.terms {
                        let entry = lift
                            .terms
                            .entry(e.clone())
                            .or_insert_with(scalar::zero);
                        *entry += c * coeff;
                        if entry.is_zero() {
                            lift.terms.remove(e);
                        }
                    }
                }
                module_lifts.push(lift);
            }
        }
        let module_dim = module_vectors.len();
        assert_eq!(
            c_algebra.dim(),
            a_k.dim() + module_dim,
            "internal error: C/M does not recover the stage base"
        );

        // Lift the deformation to C and take its Maurer-Cartan defect.
        let mut lifted_delta = Vec::with_capacity(c_algebra.dim());
        for w in 0..c_algebra.dim() {
            let monomial = c_algebra.monomial(w).clone();
            match a_k.monomial_index(&monomial) {
                Some(u) => lifted_delta.push(self.deformation.delta[u].clone()),
                None => lifted_delta.push(Coderivation::zero(
                    d.space().clone(),
                    d.kind,
                    c_algebra.monomial_parity(w).flip(),
                    d.weight_cap,
                )),
            }
        }
        let lifted = Deformation::new(d.clone(), c_algebra.clone(), lifted_delta, self.mode)?;
        let defect = lifted.mc_defect()?;

        // The defect lies in L (x) M: solve for the coefficients g_a with
        // gamma = sum g_a (x) nu_a, one linear system per cochain coordinate.
        let module_matrix = Matrix::from_columns(c_algebra.dim(), &module_vectors);
        let mut g: Vec<[Vec<Scalar>; 2]> = (0..module_dim)
            .map(|_| {
                [
                    vec![scalar::zero(); report.basis.dim(Parity::Even)],
                    vec![scalar::zero(); report.basis.dim(Parity::Odd)],
                ]
            })
            .collect();
        for p in [Parity::Even, Parity::Odd] {
            let pi = if p == Parity::Even { 0 } else { 1 };
            let dim_p = report.basis.dim(p);
            let mut rhs: Vec<Vec<Scalar>> = Vec::with_capacity(dim_p);
            let mut coords_of_w: Vec<Option<Vec<Scalar>>> = vec![None; c_algebra.dim()];
            for (w, gamma) in defect.iter().enumerate() {
                if !gamma.is_zero() && gamma.parity == p {
                    let (_, vec) = report.basis.to_vec(gamma)?;
                    coords_of_w[w] = Some(vec);
                }
            }
            for coord in 0..dim_p {
                let column: Vec<Scalar> = (0..c_algebra.dim())
                    .map(|w| match &coords_of_w[w] {
                        Some(v) => v[coord].clone(),
                        None => scalar::zero(),
                    })
                    .collect();
                rhs.push(column);
            }
            let solutions = linalg::solve_many(&module_matrix, &rhs)?;
            for (coord, sol) in solutions.into_iter().enumerate() {
                let sol = sol.expect(
                    "internal error: Maurer-Cartan defect escaped the extension module",
                );
                for (a, c) in sol.into_iter().enumerate() {
                    g[a][pi][coord] = c;
                }
            }
        }

        // Obstruction components as coderivations; assert cocycles and
        // project to class coordinates.
        let mut class_rows: Vec<Vec<Scalar>> = Vec::new();
        for (a, parts) in g.iter().enumerate() {
            let even = report.basis.from_vec(Parity::Even, &parts[0])?;
            let odd = report.basis.from_vec(Parity::Odd, &parts[1])?;
            let module_parity = c_algebra.element_parity(&module_vectors[a]);
            for (piece, parity) in [(&even, Parity::Even), (&odd, Parity::Odd)] {
                if !piece.is_zero() {
                    // gamma is even in total: coefficient parity matches the
                    // module direction it multiplies.
                    assert_eq!(
                        Some(parity),
                        module_parity,
                        "internal error: obstruction parity mismatch"
                    );
                    assert!(
                        big_d(&d, piece)?.is_zero(),
                        "internal error: obstruction component is not a cocycle"
                    );
                }
            }
            let mut coords = vec![scalar::zero(); report.class_count()];
            for piece in [&even, &odd] {
                if piece.is_zero() {
                    continue;
                }
                let c = report
                    .decompose_coderivation(piece)?
                    .expect("cocycles decompose");
                for (i, x) in c.into_iter().enumerate() {
                    coords[i] += x;
                }
            }
            class_rows.push(coords);
        }

        // M' = span of the n^i = sum_a coords_a[i] nu_a, echelonned in
        // module coordinates so its pivots align with M's.
        let mut mprime = LabeledEchelon::new();
        for i in 0..report.class_count() {
            let n_i: Vec<Scalar> = (0..module_dim)
                .map(|a| class_rows[a][i].clone())
                .collect();
            if n_i.iter().all(Zero::is_zero) {
                continue;
            }
            let combo = vec![scalar::zero(); 1];
            mprime.insert(n_i, combo);
        }
        let obstruction_rank = mprime.rows.len();

        // Kill M' inside C: translate module coordinates back to C vectors
        // and polynomial lifts.
        let mut killed_vectors: Vec<Element> = Vec::new();
        let mut killed_polys: Vec<Polynomial> = Vec::new();
        for (coords, _, _) in &mprime.rows {
            let mut v = c_algebra.zero_element();
            let mut poly = Polynomial::zero();
            for (a, c) in coords.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (w, x) in module_vectors[a].iter().enumerate() {
                    if !x.is_zero() {
                        v[w] += x * c;
                    }
                }
                for (e, coeff) in &module_lifts[a].terms {
                    let entry = poly.terms.entry(e.clone()).or_insert_with(scalar::zero);
                    *entry += c * coeff;
                    if entry.is_zero() {
                        poly.terms.remove(e);
                    }
                }
            }
            killed_vectors.push(v);
            killed_polys.push(poly);
        }
        let killed_echelon = linalg::echelon_basis(c_algebra.dim(), &killed_vectors);
        let (next_base, _proj_ca) = c_algebra.quotient_by_echelon(&killed_echelon)?;

        // Transport the lifted deformation and solve away the residual
        // defect on the new module monomials.
        let mut next_delta = Vec::with_capacity(next_base.dim());
        for w in 0..next_base.dim() {
            let monomial = next_base.monomial(w).clone();
            match a_k.monomial_index(&monomial) {
                Some(u) => next_delta.push(self.deformation.delta[u].clone()),
                None => next_delta.push(Coderivation::zero(
                    d.space().clone(),
                    d.kind,
                    next_base.monomial_parity(w).flip(),
                    d.weight_cap,
                )),
            }
        }
        let candidate =
            Deformation::new(d.clone(), next_base.clone(), next_delta.clone(), self.mode)?;
        let residual = candidate.mc_defect()?;
        let mut beta_terms = 0usize;
        for (w, gamma) in residual.iter().enumerate() {
            if gamma.is_zero() {
                continue;
            }
            assert!(
                a_k.monomial_index(next_base.monomial(w)).is_none(),
                "internal error: residual defect appears over the previous base"
            );
            let (p, vec) = report.basis.to_vec(gamma)?;
            // Solve D(beta_w) = -gamma_w; in strict mode beta stays in
            // weight 2 so the deformation remains quadratic.
            let neg: Vec<Scalar> = vec.iter().map(|c| -c.clone()).collect();
            let weight_filter = match self.mode {
                Mode::Strict => Some(2),
                Mode::Infinity => None,
            };
            let beta_vec = solve_boundary_weighted(report, p, &neg, weight_filter)?
                .expect("internal error: vanished obstruction left an unsolvable residual");
            let beta = report.basis.from_vec(p.flip(), &beta_vec)?;
            if !beta.is_zero() {
                beta_terms += 1;
                next_delta[w] = next_delta[w].add(&beta)?;
            }
        }
        let next_def = Deformation::new(d.clone(), next_base.clone(), next_delta, self.mode)?;
        let final_defect = next_def.mc_defect()?;
        assert!(
            final_defect.iter().all(Coderivation::is_zero),
            "internal error: Maurer-Cartan defect survives the extension step"
        );

        // Re-reduce the relation ideal: minimal generators of
        // I_{k+1} = m I_k + killed lifts, computed as an echelon basis of
        // the span modulo m I_{k+1}.
        let mut ideal_vectors: Vec<Element> = Vec::new();
        for poly in &killed_polys {
            ideal_vectors.push(poly.to_element(&free));
        }
        ideal_vectors.extend(m_ideal_echelon.iter().cloned());
        let mut m_next_ideal: Vec<Element> = Vec::new();
        for v in &ideal_vectors {
            for u in 0..free.dim() {
                let prod = free.mul(&free.basis_element(u), v);
                if !prod.iter().all(Zero::is_zero) {
                    m_next_ideal.push(prod);
                }
            }
        }
        let m_next_echelon = linalg::echelon_basis(free.dim(), &m_next_ideal);
        let mut reducer = LabeledEchelon::new();
        for row in &m_next_echelon {
            reducer.insert(row.clone(), Vec::new());
        }
        let mut new_relations: Vec<Polynomial> = Vec::new();
        for v in &ideal_vectors {
            if let Some((row, _)) = reducer.insert(v.clone(), Vec::new()) {
                new_relations.push(Polynomial::from_element(&free, &row));
            }
        }
        new_relations.sort_by_key(|p| {
            (
                p.leading_order(&self.generators).unwrap_or(usize::MAX),
                p.terms.keys().next().cloned(),
            )
        });

        let diag = StageDiagnostics {
            stage: k + 1,
            module_dim,
            obstruction_rank,
            relations: new_relations.len(),
            beta_terms,
        };
        self.stage = k + 1;
        self.relations = new_relations;
        self.deformation = next_def;
        self.diagnostics.push(diag.clone());
        Ok(diag)
    }
}

/// Solve `D(x) = v` with the source restricted to a single weight when
/// requested; returns the full-coordinate witness.
fn solve_boundary_weighted(
    report: &CohomologyReport,
    p: Parity,
    v: &[Scalar],
    weight: Option<usize>,
) -> Result<Option<Vec<Scalar>>> {
    match weight {
        None => {
            let source = p.flip();
            let mat = report.d_matrix(source);
            linalg::solve(mat, v)
        }
        Some(n) => {
            let source = p.flip();
            let cols = report.basis.indices_with_weight(source, n);
            let mat = report.d_matrix(source);
            let sub = crate::linalg::Matrix::from_triplets(
                mat.rows(),
                cols.len(),
                mat.entries().filter_map(|(r, c, val)| {
                    cols.iter().position(|&x| x == c).map(|nc| (r, nc, val))
                }),
            );
            match linalg::solve(&sub, v)? {
                None => Ok(None),
                Some(x) => {
                    let mut full = vec![scalar::zero(); report.basis.dim(source)];
                    for (i, &c) in cols.iter().enumerate() {
                        full[c] = x[i].clone();
                    }
                    Ok(Some(full))
                }
            }
        }
    }
}

/// Run the miniversal construction to the requested order: the returned
/// state holds A_{k_max + 1} (defect-free to that stage), the relation
/// polynomials, and per-order diagnostics.
pub fn miniversal(
    d: &Coderivation,
    report: &CohomologyReport,
    mode: Mode,
    k_max: usize,
) -> Result<MiniversalState> {
    if k_max < 1 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    let mut state = miniversal_init(d, report, mode)?;
    while state.stage <= k_max {
        state.extend(report)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::cohomology;
    use crate::graded::GradedSpace;
    use crate::harrison;
    use crate::scalar::{from_frac, from_int};
    use crate::structure::{AlgebraKind, StructureConstants};
    use std::sync::Arc;

    fn even_lie(dim: usize, entries: &[(usize, usize, Vec<i64>)]) -> StructureConstants {
        let v = Arc::new(
            GradedSpace::new(
                (0..dim).map(|i| (format!("e{}", i + 1), Parity::Even)).collect(),
            )
            .unwrap(),
        );
        let mut sc = StructureConstants::new(v, AlgebraKind::Lie);
        for (i, j, out) in entries {
            sc.add_entry(&[*i, *j], out.iter().map(|&x| from_int(x)).collect())
                .unwrap();
        }
        sc
    }

    #[test]
    fn trivial_deformation_has_zero_defect() {
        let sc = even_lie(2, &[(0, 1, vec![0, 1])]);
        let d = sc.to_coderivation(3).unwrap();
        let base = BaseAlgebra::free_truncated(
            vec![Generator::new("t", Parity::Even, 1)],
            3,
        )
        .unwrap();
        let def = Deformation::trivial(&d, base, Mode::Strict);
        assert!(def.satisfies_mc().unwrap());
    }

    #[test]
    fn infinitesimal_base_defect_is_the_cocycle_condition() {
        // Over m^2 = 0 the defect of delta_1 (x) t is exactly D(delta_1).
        let sc = even_lie(2, &[(0, 1, vec![0, 1])]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let base = BaseAlgebra::infinitesimal(vec![Generator::new("t", Parity::Even, 1)]);
        // A non-cocycle arity-2 coderivation: the defect must equal D of it.
        let w = d.space().clone();
        let phi = Coderivation::single(
            w,
            crate::graded::CoalgebraKind::Symmetric,
            3,
            &[0, 1],
            0,
            from_int(1),
        )
        .unwrap();
        let def =
            Deformation::new(d.clone(), base, vec![phi.clone()], Mode::Infinity).unwrap();
        let defect = def.mc_defect().unwrap();
        assert_eq!(defect[0], big_d(&d, &phi).unwrap());
        let _ = report;
    }

    #[test]
    fn universal_infinitesimal_of_abelian_two_dim() {
        // d = 0 on 2-dim V: strict weight-2 classes are 2-dimensional.
        let sc = even_lie(2, &[]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        assert_eq!(universal.deformation.base.generators.len(), 2);
        for g in &universal.deformation.base.generators {
            assert_eq!(g.parity, Parity::Even);
            assert_eq!(g.order, 2);
        }
        assert!(universal.deformation.satisfies_mc().unwrap());
    }

    #[test]
    fn universal_infinitesimal_of_rigid_algebra_is_trivial() {
        let sc = even_lie(
            3,
            &[
                (0, 1, vec![0, 0, 1]),
                (2, 0, vec![2, 0, 0]),
                (2, 1, vec![0, -2, 0]),
            ],
        );
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        assert_eq!(universal.deformation.base.dim(), 0);
    }

    #[test]
    fn push_out_through_augmentation_kills_delta() {
        let sc = even_lie(2, &[]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        let aug = AlgebraMorphism::augmentation(&universal.deformation.base);
        let pushed = universal.deformation.push_out(&aug).unwrap();
        assert_eq!(pushed.base.dim(), 0);
        assert!(pushed.delta.is_empty());
    }

    #[test]
    fn push_out_identity_is_identity() {
        let sc = even_lie(2, &[]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        let id = AlgebraMorphism::identity(&universal.deformation.base);
        let pushed = universal.deformation.push_out(&id).unwrap();
        for (a, b) in pushed.delta.iter().zip(&universal.deformation.delta) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn equivalence_detects_coboundary_shifts() {
        let sc = even_lie(3, &[(0, 1, vec![0, 0, 1])]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        let base = universal.deformation.base.clone();
        // Shift delta by D(lambda) (x) t1 for a random weight-1 lambda.
        let w = d.space().clone();
        let lambda = Coderivation::single(
            w,
            crate::graded::CoalgebraKind::Symmetric,
            3,
            &[0],
            1,
            from_int(1),
        )
        .unwrap();
        let dlambda = big_d(&d, &lambda).unwrap();
        let mut delta2 = universal.deformation.delta.clone();
        delta2[0] = delta2[0].add(&dlambda).unwrap();
        let def2 = Deformation::new(d.clone(), base, delta2, Mode::Strict).unwrap();
        let witness =
            infinitesimal_equivalent(&def2, &universal.deformation, &report).unwrap();
        let witness = witness.expect("coboundary shift is an equivalence");
        // The witness reproduces the shift: D(witness_0) = dlambda.
        assert_eq!(big_d(&d, &witness[0]).unwrap(), dlambda);

        // Shifting by a genuine class is NOT an equivalence.
        if report.class_count() > 0 {
            let class_rep = report.lift_mu(universal.class_of_generator[0]).unwrap();
            let mut delta3 = universal.deformation.delta.clone();
            delta3[0] = delta3[0].add(&class_rep).unwrap();
            let def3 = Deformation::new(
                d.clone(),
                universal.deformation.base.clone(),
                delta3,
                Mode::Strict,
            )
            .unwrap();
            assert!(infinitesimal_equivalent(&def3, &universal.deformation, &report)
                .unwrap()
                .is_none());
        }
    }

    #[test]
    fn apply_equivalence_adds_coboundary_over_infinitesimal_base() {
        let sc = even_lie(3, &[(0, 1, vec![0, 0, 1])]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        let def = &universal.deformation;
        let w = d.space().clone();
        let lambda1 = Coderivation::single(
            w,
            crate::graded::CoalgebraKind::Symmetric,
            3,
            &[2],
            0,
            from_int(2),
        )
        .unwrap();
        let mut lambda = vec![
            Coderivation::zero(
                d.space().clone(),
                d.kind,
                Parity::Even,
                d.weight_cap
            );
            def.base.dim()
        ];
        lambda[0] = lambda1.clone();
        let transformed = def.apply_equivalence(&lambda).unwrap();
        let expected = def.delta[0].add(&big_d(&d, &lambda1).unwrap()).unwrap();
        assert_eq!(transformed.delta[0], expected);
        assert!(transformed.satisfies_mc().unwrap());
    }

    #[test]
    fn obstruction_vanishes_for_square_zero_brackets() {
        // Abelian 2-dim strict: [mu_i, mu_j] lands in weight 3 = Hom(L^3 V, V) = 0.
        let sc = even_lie(2, &[]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        let ext = harrison::universal_infinitesimal_extension(&universal.deformation.base)
            .unwrap();
        let obs = obstruction(&universal.deformation, &ext.extension, &report).unwrap();
        assert!(obs.is_zero());
    }

    #[test]
    fn obstruction_detects_nonexact_self_bracket() {
        // Heisenberg in strict mode has nontrivial weight-2 classes whose
        // brackets are not all exact; the universal extension of the
        // 5-parameter infinitesimal base must see a nonzero obstruction.
        let sc = even_lie(3, &[(0, 1, vec![0, 0, 1])]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        let ext = harrison::universal_infinitesimal_extension(&universal.deformation.base)
            .unwrap();
        let obs = obstruction(&universal.deformation, &ext.extension, &report).unwrap();
        assert!(!obs.is_zero(), "Heisenberg deformations are obstructed");
    }

    #[test]
    fn zero_cocycle_extension_gives_zero_obstruction() {
        let sc = even_lie(3, &[(0, 1, vec![0, 0, 1])]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        let base = universal.deformation.base.clone();
        let split = harrison::Extension::new(
            &base,
            vec![Generator::new("n", Parity::Even, 2)],
            harrison::HarrisonCochain2::zero(&base, 1),
        )
        .unwrap();
        let obs = obstruction(&universal.deformation, &split, &report).unwrap();
        assert!(obs.is_zero());
    }

    #[test]
    fn miniversal_of_rigid_is_ground_field() {
        let sc = even_lie(
            3,
            &[
                (0, 1, vec![0, 0, 1]),
                (2, 0, vec![2, 0, 0]),
                (2, 1, vec![0, -2, 0]),
            ],
        );
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let state = miniversal(&d, &report, Mode::Strict, 3).unwrap();
        assert_eq!(state.base().dim(), 0);
        assert!(state.relations.is_empty());
        assert!(state.deformation.satisfies_mc().unwrap());
    }

    #[test]
    fn miniversal_of_abelian_two_dim_is_free() {
        // All weight-2 structures on a 2-dim space satisfy Jacobi, so the
        // obstructions vanish and the base is the free truncated algebra.
        let sc = even_lie(2, &[]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let state = miniversal(&d, &report, Mode::Strict, 3).unwrap();
        assert!(state.relations.is_empty());
        assert!(state.deformation.satisfies_mc().unwrap());
        // Base = free adic algebra on 2 parameters at depth 4.
        let free = BaseAlgebra::free_adic(state.generators.clone(), 4).unwrap();
        assert_eq!(state.base().dim(), free.dim());
    }

    #[test]
    fn miniversal_of_one_dim_abelian_strict_is_ground_field() {
        let sc = even_lie(1, &[]);
        let d = sc.to_coderivation(2).unwrap();
        let report = cohomology(&d, 2).unwrap();
        let state = miniversal(&d, &report, Mode::Strict, 2).unwrap();
        assert_eq!(state.base().dim(), 0);
    }

    #[test]
    fn miniversal_heisenberg_produces_relations() {
        let sc = even_lie(3, &[(0, 1, vec![0, 0, 1])]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let state = miniversal(&d, &report, Mode::Strict, 2).unwrap();
        assert!(state.deformation.satisfies_mc().unwrap());
        assert!(!state.relations.is_empty(), "obstructed algebra must have relations");
        for rel in &state.relations {
            let order = rel.leading_order(&state.generators).unwrap();
            assert!(order >= 2, "relations lie in order >= 2");
        }
    }

    #[test]
    fn factorization_of_random_infinitesimal_deformations() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let sc = even_lie(2, &[]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        for trial in 0..5 {
            let gens: Vec<Generator> = (0..=(trial % 3))
                .map(|i| Generator::new(format!("s{i}"), Parity::Even, 1))
                .collect();
            let base = BaseAlgebra::infinitesimal(gens);
            // Random cocycle-valued coefficients: combinations of lifts.
            let mut delta = Vec::new();
            for u in 0..base.dim() {
                let mut c = Coderivation::zero(
                    d.space().clone(),
                    d.kind,
                    base.monomial_parity(u).flip(),
                    d.weight_cap,
                );
                for &class in &universal.class_of_generator {
                    if rng.gen_bool(0.7) {
                        let rep = report.lift_mu(class).unwrap();
                        c = c
                            .add(&rep.scale(&from_int(rng.gen_range(-2..=2))))
                            .unwrap();
                    }
                }
                delta.push(c);
            }
            let def = Deformation::new(d.clone(), base, delta, Mode::Strict).unwrap();
            assert!(def.satisfies_mc().unwrap());
            let tau = factor_infinitesimal(&universal, &def, &report).unwrap();
            let pushed = universal.deformation.push_out(&tau).unwrap();
            let witness = infinitesimal_equivalent(&pushed, &def, &report).unwrap();
            assert!(witness.is_some(), "push-out must be equivalent to the target");
        }
    }

    #[test]
    fn different_lifts_give_equivalent_universal_deformations() {
        // Replace each representative by representative + coboundary: the
        // two universal infinitesimal deformations must be equivalent.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(55);
        let sc = even_lie(3, &[(0, 1, vec![0, 0, 1])]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        let mut delta2 = universal.deformation.delta.clone();
        for coeff in delta2.iter_mut() {
            if coeff.is_zero() {
                continue;
            }
            // A random weight-1 cochain of the right parity gives a
            // coboundary shift in weight 2.
            let lambda = {
                let parity = coeff.parity.flip();
                let mut part = crate::coderiv::MultilinearPart::zero(d.kind, 1, parity);
                for word in crate::graded::enumerate_words(d.kind, d.space(), 1) {
                    let out_parity = parity + word.parity(d.space());
                    for target in 0..d.space().dim() {
                        if d.space().parity(target) == out_parity && rng.gen_bool(0.4) {
                            part.add_term(
                                d.space(),
                                &word.letters,
                                target,
                                from_int(rng.gen_range(-2..=2)),
                            )
                            .unwrap();
                        }
                    }
                }
                let mut c =
                    Coderivation::zero(d.space().clone(), d.kind, parity, d.weight_cap);
                c.insert_part(part).unwrap();
                c
            };
            *coeff = coeff.add(&big_d(&d, &lambda).unwrap()).unwrap();
        }
        let def2 = Deformation::new(
            d.clone(),
            universal.deformation.base.clone(),
            delta2,
            Mode::Strict,
        )
        .unwrap();
        assert!(def2.satisfies_mc().unwrap());
        let witness =
            infinitesimal_equivalent(&universal.deformation, &def2, &report).unwrap();
        assert!(witness.is_some(), "lift choice must not change the equivalence class");
    }

    #[test]
    fn obstruction_depends_only_on_the_harrison_class() {
        // Shifting the extension cocycle by d1(lambda) keeps the obstruction
        // class vectors fixed.
        use crate::harrison::{d1, Extension, HarrisonCochain1, HarrisonCochain2};
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(56);
        let sc = even_lie(3, &[(0, 1, vec![0, 0, 1])]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        let base = universal.deformation.base.clone();
        let ha2 = crate::harrison::ha2_report(&base).unwrap();
        assert!(!ha2.classes.is_empty());
        let class = &ha2.classes[0];
        let mut phi = HarrisonCochain2::zero(&base, 1);
        for (&(i, j), c) in ha2.pairs.iter().zip(&class.rep) {
            if !c.is_zero() {
                let mut v = phi.get(i, j).to_vec();
                v[0] = c.clone();
                phi.set_symmetric(&base, i, j, v).unwrap();
            }
        }
        let module = vec![Generator::new("n", class.parity, class.order)];
        let ext = Extension::new(&base, module.clone(), phi.clone()).unwrap();
        let gamma = obstruction(&universal.deformation, &ext, &report).unwrap();
        for _ in 0..5 {
            let mut lambda = HarrisonCochain1::zero(&base, 1);
            for u in 0..base.dim() {
                // The coboundary shift must keep the cochain parity
                // homogeneous with the module: only pair lambda with
                // monomials of the class parity.
                if base.monomial_parity(u) == class.parity {
                    lambda.set(u, vec![from_int(rng.gen_range(-2..=2))]);
                }
            }
            let shift = d1(&base, &lambda);
            let mut phi2 = HarrisonCochain2::zero(&base, 1);
            for i in 0..base.dim() {
                for j in i..base.dim() {
                    if i == j && base.monomial_parity(i).is_odd() {
                        continue;
                    }
                    let v: Vec<Scalar> = phi
                        .get(i, j)
                        .iter()
                        .zip(shift.get(i, j))
                        .map(|(x, y)| x + y)
                        .collect();
                    phi2.set_symmetric(&base, i, j, v).unwrap();
                }
            }
            let ext2 = Extension::new(&base, module.clone(), phi2).unwrap();
            let gamma2 = obstruction(&universal.deformation, &ext2, &report).unwrap();
            assert_eq!(
                gamma.components, gamma2.components,
                "obstruction class moved under a coboundary shift"
            );
        }
    }

    #[test]
    fn differential_of_deformations() {
        let sc = even_lie(2, &[]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        let universal = universal_infinitesimal(&d, &report, Mode::Strict).unwrap();
        // Trivial deformation: differential zero.
        let trivial =
            Deformation::trivial(&d, universal.deformation.base.clone(), Mode::Strict);
        for row in trivial.differential(&report).unwrap() {
            assert!(row.iter().all(Zero::is_zero));
        }
        // Universal infinitesimal: the identity pairing class_i x t^i.
        let rows = universal.deformation.differential(&report).unwrap();
        for (i, row) in rows.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                if c == universal.class_of_generator[i] {
                    assert_eq!(*x, from_int(1));
                } else {
                    assert!(x.is_zero());
                }
            }
        }
        // Push-out along t1 -> 2s, t2 -> s: differential is the pushed one.
        let target = BaseAlgebra::infinitesimal(vec![Generator::new("s", Parity::Even, 1)]);
        let images = vec![
            vec![from_int(2)],
            vec![from_int(1)],
        ];
        let tau = AlgebraMorphism::new(
            universal.deformation.base.clone(),
            target,
            images,
        )
        .unwrap();
        let pushed = universal.deformation.push_out(&tau).unwrap();
        let pushed_rows = pushed.differential(&report).unwrap();
        let mut expected = vec![scalar::zero(); report.class_count()];
        expected[universal.class_of_generator[0]] = from_int(2);
        expected[universal.class_of_generator[1]] = from_int(1);
        assert_eq!(pushed_rows[0], expected);
    }

    #[test]
    fn half_bracket_obstruction_example() {
        // delta = delta_1 t over K[t]/(t^3) with [delta_1, delta_1] nonzero:
        // the defect at t^2 is exactly 1/2 [delta_1, delta_1].
        let sc = even_lie(3, &[(0, 1, vec![0, 0, 1])]);
        let d = sc.to_coderivation(3).unwrap();
        let report = cohomology(&d, 3).unwrap();
        // Find a weight-2 cocycle (a combination of class lifts) with a
        // nonzero self-bracket.
        let params = report.parameter_classes(Mode::Strict);
        let mut found = None;
        'outer: for &i in &params {
            for &j in &params {
                let rep = report
                    .lift_mu(i)
                    .unwrap()
                    .add(&report.lift_mu(j).unwrap().scale(&from_int(if i == j { 0 } else { 1 })))
                    .unwrap();
                let self_bracket = rep.bracket(&rep).unwrap();
                if !self_bracket.is_zero() {
                    found = Some((rep, self_bracket));
                    break 'outer;
                }
            }
        }
        let (rep, self_bracket) = found.expect("Heisenberg has such a cocycle");
        let base = BaseAlgebra::free_truncated(
            vec![Generator::new("t", Parity::Even, 1)],
            3,
        )
        .unwrap();
        let zero = Coderivation::zero(d.space().clone(), d.kind, Parity::Odd, d.weight_cap);
        let def = Deformation::new(
            d.clone(),
            base,
            vec![rep.clone(), zero],
            Mode::Strict,
        )
        .unwrap();
        let defect = def.mc_defect().unwrap();
        assert!(defect[0].is_zero());
        assert_eq!(defect[1], self_bracket.scale(&from_frac(1, 2)));
    }
}
