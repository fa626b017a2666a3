//! Input parsing, report assembly, and deterministic serialization.
//!
//! The input format is line-oriented UTF-8: `kind lie`, `basis e1 even`,
//! `part 2: e1 e2 -> 1 e2`, `weight_cap 3`, `order 3`, with `#` comments.
//! Verification targets add `base_gen s even 1`, `base_relation 1 s^2`, and
//! `deform s : 2 : e1 e2 -> 1 e2` lines. Reports render rationals in lowest
//! terms with positive denominators and order every section canonically, so
//! identical inputs produce byte-identical output.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::traits::Zero;

use crate::basealg::{BaseAlgebra, Generator, Monomial};
use crate::coderiv::{Coderivation, Mode};
use crate::cohomology::{cohomology, WeightDims};
use crate::deform::{miniversal, MiniversalState, Polynomial};
use crate::error::{Error, Result};
use crate::graded::{count_words, GradedSpace, Parity};
use crate::scalar::{self, Scalar};
use crate::structure::{AlgebraKind, StructureConstants};
use crate::versal::{factor_through_miniversal, Factorization};

pub const DEFAULT_WEIGHT_CAP: usize = 3;
pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_MAX_WORDS: usize = 200_000;

/// One structure-constant line: `part k: inputs -> sum of coeff basis`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartEntry {
    pub arity: usize,
    pub inputs: Vec<String>,
    pub output: Vec<(Scalar, String)>,
}

/// A user-supplied formal deformation over a presented base, for the
/// relative verification mode.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TargetInput {
    pub generators: Vec<(String, Parity, usize)>,
    /// Relation polynomials as (coefficient, monomial-string) term lists.
    pub relations: Vec<Vec<(Scalar, String)>>,
    /// Delta coefficients: (monomial-string, structure entry on V).
    pub deform: Vec<(String, PartEntry)>,
}

impl TargetInput {
    fn is_empty(&self) -> bool {
        self.generators.is_empty() && self.relations.is_empty() && self.deform.is_empty()
    }
}

/// Parsed input: the algebra, caps, and an optional verification target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraInput {
    pub kind: AlgebraKind,
    pub basis: Vec<(String, Parity)>,
    pub parts: Vec<PartEntry>,
    pub weight_cap: Option<usize>,
    pub order: Option<usize>,
    pub target: Option<TargetInput>,
}

fn parse_parity(text: &str, line: usize) -> Result<Parity> {
    match text {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        other => Err(Error::Parse { line, msg: format!("expected 'even' or 'odd', got '{other}'") }),
    }
}

fn parse_scalar(text: &str, line: usize) -> Result<Scalar> {
    scalar::parse(text)
        .ok_or_else(|| Error::Parse { line, msg: format!("malformed coefficient '{text}'") })
}

/// Parse `-> c1 b1 c2 b2 ...` tails.
fn parse_combination(tokens: &[&str], line: usize) -> Result<Vec<(Scalar, String)>> {
    if tokens.len() % 2 != 0 {
        return Err(Error::Parse {
            line,
            msg: "output must be coefficient/basis pairs".into(),
        });
    }
    let mut out = Vec::new();
    for chunk in tokens.chunks(2) {
        out.push((parse_scalar(chunk[0], line)?, chunk[1].to_string()));
    }
    Ok(out)
}

fn parse_part_tokens(tokens: &[&str], line: usize) -> Result<PartEntry> {
    // tokens: k ':' in1 ... ink '->' pairs   (the ':' may be glued to k)
    let mut tokens = tokens.to_vec();
    if tokens.is_empty() {
        return Err(Error::Parse { line, msg: "empty part entry".into() });
    }
    let head = tokens[0].trim_end_matches(':');
    let arity: usize = head
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("bad arity '{}'", tokens[0]) })?;
    tokens.remove(0);
    if tokens.first() == Some(&":") {
        tokens.remove(0);
    }
    let arrow = tokens
        .iter()
        .position(|t| *t == "->")
        .ok_or_else(|| Error::Parse { line, msg: "missing '->'".into() })?;
    let inputs: Vec<String> = tokens[..arrow].iter().map(|s| s.to_string()).collect();
    if inputs.len() != arity {
        return Err(Error::Parse {
            line,
            msg: format!("arity {arity} with {} inputs", inputs.len()),
        });
    }
    let output = parse_combination(&tokens[arrow + 1..], line)?;
    Ok(PartEntry { arity, inputs, output })
}

/// Parse the line-oriented input format.
pub fn parse_input(text: &str) -> Result<AlgebraInput> {
    let mut kind = None;
    let mut basis = Vec::new();
    let mut parts = Vec::new();
    let mut weight_cap = None;
    let mut order = None;
    let mut target = TargetInput::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "kind" => {
                if tokens.len() != 2 {
                    return Err(Error::Parse { line, msg: "usage: kind <lie|assoc|linf|ainf>".into() });
                }
                kind = Some(AlgebraKind::parse(tokens[1]).ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("unknown kind '{}'", tokens[1]),
                })?);
            }
            "basis" => {
                if tokens.len() != 3 {
                    return Err(Error::Parse { line, msg: "usage: basis <name> <even|odd>".into() });
                }
                basis.push((tokens[1].to_string(), parse_parity(tokens[2], line)?));
            }
            "part" => {
                parts.push(parse_part_tokens(&tokens[1..], line)?);
            }
            "weight_cap" => {
                if tokens.len() != 2 {
                    return Err(Error::Parse { line, msg: "usage: weight_cap <n>".into() });
                }
                weight_cap = Some(tokens[1].parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad weight cap '{}'", tokens[1]),
                })?);
            }
            "order" => {
                if tokens.len() != 2 {
                    return Err(Error::Parse { line, msg: "usage: order <n>".into() });
                }
                order = Some(tokens[1].parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad order '{}'", tokens[1]),
                })?);
            }
            "base_gen" => {
                if tokens.len() != 4 {
                    return Err(Error::Parse {
                        line,
                        msg: "usage: base_gen <name> <even|odd> <order>".into(),
                    });
                }
                let gen_order: usize = tokens[3].parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad generator order '{}'", tokens[3]),
                })?;
                target
                    .generators
                    .push((tokens[1].to_string(), parse_parity(tokens[2], line)?, gen_order));
            }
            "base_relation" => {
                target.relations.push(parse_combination(&tokens[1..], line)?);
            }
            "deform" => {
                // deform <monomial> : <part tokens>
                if tokens.len() < 3 {
                    return Err(Error::Parse {
                        line,
                        msg: "usage: deform <monomial> : <arity> : <inputs> -> <output>".into(),
                    });
                }
                let monomial = tokens[1].to_string();
                let mut rest = &tokens[2..];
                if rest.first() == Some(&":") {
                    rest = &rest[1..];
                }
                target.deform.push((monomial, parse_part_tokens(rest, line)?));
            }
            other => {
                return Err(Error::Parse { line, msg: format!("unknown directive '{other}'") });
            }
        }
    }
    let kind = kind.ok_or_else(|| Error::Parse { line: 0, msg: "missing 'kind' line".into() })?;
    if basis.is_empty() {
        return Err(Error::Parse { line: 0, msg: "missing 'basis' lines".into() });
    }
    Ok(AlgebraInput {
        kind,
        basis,
        parts,
        weight_cap,
        order,
        target: if target.is_empty() { None } else { Some(target) },
    })
}

/// Canonical writer; `parse_input(serialize_input(x)) == x`.
pub fn serialize_input(input: &AlgebraInput) -> String {
    let mut out = String::new();
    out.push_str(&format!("kind {}\n", input.kind.as_str()));
    for (name, parity) in &input.basis {
        out.push_str(&format!("basis {name} {parity}\n"));
    }
    for part in &input.parts {
        out.push_str(&format!("part {}\n", render_part(part)));
    }
    if let Some(cap) = input.weight_cap {
        out.push_str(&format!("weight_cap {cap}\n"));
    }
    if let Some(order) = input.order {
        out.push_str(&format!("order {order}\n"));
    }
    if let Some(target) = &input.target {
        for (name, parity, order) in &target.generators {
            out.push_str(&format!("base_gen {name} {parity} {order}\n"));
        }
        for relation in &target.relations {
            let terms: Vec<String> = relation
                .iter()
                .map(|(c, m)| format!("{} {m}", scalar::render(c)))
                .collect();
            out.push_str(&format!("base_relation {}\n", terms.join(" ")));
        }
        for (monomial, part) in &target.deform {
            out.push_str(&format!("deform {monomial} : {}\n", render_part(part)));
        }
    }
    out
}

fn render_part(part: &PartEntry) -> String {
    let output: Vec<String> = part
        .output
        .iter()
        .map(|(c, b)| format!("{} {b}", scalar::render(c)))
        .collect();
    format!(
        "{}: {} -> {}",
        part.arity,
        part.inputs.join(" "),
        output.join(" ")
    )
}

/// Resolved run configuration after flag/file merging.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub weight_cap: usize,
    pub order: usize,
    pub mode: Mode,
    pub max_words: usize,
}

impl RunConfig {
    pub fn resolve(
        input: &AlgebraInput,
        cap_flag: Option<usize>,
        order_flag: Option<usize>,
        strict: bool,
    ) -> Result<RunConfig> {
        if strict && !input.kind.is_quadratic_only() {
            return Err(Error::InvalidInput(
                "--strict applies only to 'lie' and 'assoc' inputs".into(),
            ));
        }
        let max_words = std::env::var("CODIFF_MAX_WORDS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_MAX_WORDS);
        Ok(RunConfig {
            weight_cap: cap_flag.or(input.weight_cap).unwrap_or(DEFAULT_WEIGHT_CAP),
            order: order_flag.or(input.order).unwrap_or(DEFAULT_ORDER),
            mode: if strict { Mode::Strict } else { Mode::Infinity },
            max_words,
        })
    }
}

/// The validated structure constants and codifferential of an input.
pub struct PreparedAlgebra {
    pub constants: StructureConstants,
    pub d: Coderivation,
    pub config: RunConfig,
}

/// Parse basis and parts into structure constants and transport to W,
/// enforcing the word-count resource cap.
pub fn prepare(input: &AlgebraInput, config: RunConfig) -> Result<PreparedAlgebra> {
    let v_space = Arc::new(GradedSpace::new(input.basis.clone())?)
        ;
    let mut constants = StructureConstants::new(v_space.clone(), input.kind);
    for part in &input.parts {
        let inputs = resolve_names(&v_space, &part.inputs)?;
        let output = resolve_combination(&v_space, &part.output)?;
        if part.arity > config.weight_cap {
            return Err(Error::WeightOutOfRange {
                weight: part.arity,
                cap: config.weight_cap,
            });
        }
        constants.add_entry(&inputs, output)?;
    }
    let w = v_space.parity_reversion();
    let mut words = 0usize;
    for n in 1..=config.weight_cap {
        words = words.saturating_add(count_words(input.kind.coalgebra_kind(), &w, n));
        if words > config.max_words {
            return Err(Error::ResourceLimit { words, limit: config.max_words });
        }
    }
    let d = constants.to_coderivation(config.weight_cap)?;
    Ok(PreparedAlgebra { constants, d, config })
}

fn resolve_names(space: &GradedSpace, names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| {
            space
                .index_of(n)
                .ok_or_else(|| Error::InvalidInput(format!("unknown basis element '{n}'")))
        })
        .collect()
}

fn resolve_combination(space: &GradedSpace, combo: &[(Scalar, String)]) -> Result<Vec<Scalar>> {
    let mut out = vec![scalar::zero(); space.dim()];
    for (c, name) in combo {
        let i = space
            .index_of(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown basis element '{name}'")))?;
        out[i] += c.clone();
    }
    Ok(out)
}

/// Parse a monomial string like `s`, `s^2`, or `s*t^2` over named generators.
pub fn parse_monomial(generators: &[Generator], text: &str) -> Result<Monomial> {
    let mut exponents = vec![0u32; generators.len()];
    for factor in text.split('*') {
        let (name, exp) = match factor.split_once('^') {
            Some((n, e)) => (
                n,
                e.parse::<u32>().map_err(|_| {
                    Error::InvalidInput(format!("bad exponent in monomial '{text}'"))
                })?,
            ),
            None => (factor, 1),
        };
        let idx = generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown generator '{name}'")))?;
        exponents[idx] += exp;
    }
    Ok(Monomial { exponents })
}

/// The engine's answer object: cohomology table, base presentation,
/// deformed structure, and per-order diagnostics.
pub struct MiniversalReport {
    pub input: AlgebraInput,
    pub config: RunConfig,
    pub dims: Vec<WeightDims>,
    pub generators: Vec<Generator>,
    pub relations: Vec<Polynomial>,
    /// Per base monomial (display, order, entries on the V side).
    pub delta: Vec<(String, usize, Vec<PartEntry>)>,
    pub diagnostics: Vec<crate::deform::StageDiagnostics>,
}

fn delta_rows(
    state: &MiniversalState,
    constants: &StructureConstants,
    kind: AlgebraKind,
) -> Result<Vec<(String, usize, Vec<PartEntry>)>> {
    // Infinity-mode coefficients may carry any arity; report them through
    // the matching infinity kind.
    let report_kind = match (state.mode, kind) {
        (Mode::Strict, k) => k,
        (Mode::Infinity, AlgebraKind::Lie) => AlgebraKind::LInf,
        (Mode::Infinity, AlgebraKind::Assoc) => AlgebraKind::AInf,
        (Mode::Infinity, k) => k,
    };
    let base = state.base();
    let v_space = &constants.v_space;
    let mut rows = Vec::new();
    for u in 0..base.dim() {
        let coeff = &state.deformation.delta[u];
        if coeff.is_zero() {
            continue;
        }
        let back = StructureConstants::from_coderivation(v_space.clone(), report_kind, coeff)?;
        let mut entries = Vec::new();
        for ((arity, inputs), output) in back.entries() {
            let named: Vec<String> =
                inputs.iter().map(|&i| v_space.name(i).to_string()).collect();
            let combo: Vec<(Scalar, String)> = output
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (c.clone(), v_space.name(i).to_string()))
                .collect();
            entries.push(PartEntry { arity: *arity, inputs: named, output: combo });
        }
        rows.push((base.monomial_display(u), base.monomial_order(u), entries));
    }
    // Monomials by order then lexicographic display.
    rows.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    Ok(rows)
}

/// Full pipeline: validate the codifferential, compute cohomology, run the
/// miniversal construction.
pub fn run(input: &AlgebraInput, config: RunConfig) -> Result<MiniversalReport> {
    let prepared = prepare(input, config)?;
    if let Some(weight) = prepared.d.codifferential_defect()? {
        return Err(Error::NotCodifferential { weight });
    }
    let report = cohomology(&prepared.d, config.weight_cap)?;
    let state = miniversal(&prepared.d, &report, config.mode, config.order)?;
    let delta = delta_rows(&state, &prepared.constants, input.kind)?;
    Ok(MiniversalReport {
        input: input.clone(),
        config,
        dims: report.dims.clone(),
        generators: state.generators.clone(),
        relations: state.relations.clone(),
        delta,
        diagnostics: state.diagnostics.clone(),
    })
}

/// Cohomology-only pipeline.
pub fn run_cohomology(input: &AlgebraInput, config: RunConfig) -> Result<Vec<WeightDims>> {
    let prepared = prepare(input, config)?;
    if let Some(weight) = prepared.d.codifferential_defect()? {
        return Err(Error::NotCodifferential { weight });
    }
    let report = cohomology(&prepared.d, config.weight_cap)?;
    Ok(report.dims.clone())
}

/// Codifferential check only: Ok(()) or the failing weight.
pub fn run_check(input: &AlgebraInput, config: RunConfig) -> Result<()> {
    let prepared = prepare(input, config)?;
    match prepared.d.codifferential_defect()? {
        None => Ok(()),
        Some(weight) => Err(Error::NotCodifferential { weight }),
    }
}

/// Outcome of the relative verification mode.
pub struct VerifyReport {
    pub config: RunConfig,
    pub base_display: Vec<String>,
    /// Per miniversal generator: its image polynomial in the target base.
    pub images: Vec<(String, String)>,
    pub equivalence_orders: usize,
}

/// Build the user-described base and deformation and factor it through the
/// miniversal deformation.
pub fn run_verify(input: &AlgebraInput, config: RunConfig) -> Result<VerifyReport> {
    let target_input = input
        .target
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("verify requires base_gen/deform lines".into()))?;
    let prepared = prepare(input, config)?;
    if let Some(weight) = prepared.d.codifferential_defect()? {
        return Err(Error::NotCodifferential { weight });
    }
    let report = cohomology(&prepared.d, config.weight_cap)?;

    let generators: Vec<Generator> = target_input
        .generators
        .iter()
        .map(|(name, parity, order)| Generator::new(name.clone(), *parity, *order))
        .collect();
    let depth = config.order + 1;
    let free = BaseAlgebra::free_adic(generators.clone(), depth)?;
    let relation_elements: Vec<Vec<Scalar>> = target_input
        .relations
        .iter()
        .map(|terms| {
            let mut el = free.zero_element();
            for (c, mono_text) in terms {
                let m = parse_monomial(&generators, mono_text)?;
                if let Some(i) = free.monomial_index(&m) {
                    el[i] += c.clone();
                }
            }
            Ok(el)
        })
        .collect::<Result<_>>()?;
    let (base, projection) = free.quotient(&relation_elements, false)?;

    // Delta coefficients, distributed over the reduced monomial classes.
    let mut delta: Vec<Coderivation> = (0..base.dim())
        .map(|w| {
            Coderivation::zero(
                prepared.d.space().clone(),
                prepared.d.kind,
                base.monomial_parity(w).flip(),
                prepared.d.weight_cap,
            )
        })
        .collect();
    let v_space = &prepared.constants.v_space;
    for (mono_text, entry) in &target_input.deform {
        let m = parse_monomial(&generators, mono_text)?;
        let Some(free_index) = free.monomial_index(&m) else {
            return Err(Error::InvalidInput(format!(
                "deform monomial '{mono_text}' exceeds the truncation depth {depth}"
            )));
        };
        let reduced = projection.apply_basis(free_index);
        let inputs = resolve_names(v_space, &entry.inputs)?;
        let output = resolve_combination(v_space, &entry.output)?;
        let mut piece = StructureConstants::new(v_space.clone(), input.kind);
        piece.add_entry_any_parity(&inputs, output)?;
        let coderivation = piece.to_coderivation(config.weight_cap)?;
        for (w, c) in reduced.iter().enumerate() {
            if !c.is_zero() {
                let scaled = coderivation.scale(c);
                delta[w] = delta[w].add(&scaled)?;
            }
        }
    }
    let target = crate::deform::Deformation::new(
        prepared.d.clone(),
        base.clone(),
        delta,
        config.mode,
    )?;

    let max_letters = (0..base.dim())
        .map(|w| base.monomial(w).letters())
        .max()
        .unwrap_or(0);
    let state = miniversal(&prepared.d, &report, config.mode, max_letters.max(1))?;
    let factorization: Factorization = factor_through_miniversal(&state, &report, &target)?;

    let images = state
        .generators
        .iter()
        .zip(&factorization.morphism.generator_images)
        .map(|(g, img)| (g.name.clone(), base.display_element(img)))
        .collect();
    Ok(VerifyReport {
        config,
        base_display: (0..base.dim()).map(|w| base.monomial_display(w)).collect(),
        images,
        equivalence_orders: factorization.equivalences.len(),
    })
}

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

fn parity_parities(dims: &[WeightDims]) -> Vec<&WeightDims> {
    let mut rows: Vec<&WeightDims> = dims.iter().collect();
    rows.sort_by_key(|r| (r.weight, r.parity));
    rows
}

/// Render the cohomology dimension table.
pub fn render_dims(dims: &[WeightDims], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Machine => {
            out.push_str(&format!("cohomology.rows {}\n", dims.len()));
            for row in parity_parities(dims) {
                out.push_str(&format!(
                    "cohomology weight={} parity={} cocycles={} boundaries={} dim={}\n",
                    row.weight, row.parity, row.cocycles, row.boundaries, row.cohomology
                ));
            }
        }
        Format::Text => {
            out.push_str("cohomology of the coderivation complex (per weight and parity):\n");
            out.push_str("  weight  parity  dim Z  dim B  dim H\n");
            for row in parity_parities(dims) {
                out.push_str(&format!(
                    "  {:>6}  {:>6}  {:>5}  {:>5}  {:>5}\n",
                    row.weight, row.parity, row.cocycles, row.boundaries, row.cohomology
                ));
            }
        }
    }
    out
}

/// Serialize a miniversal report deterministically.
pub fn render_report(report: &MiniversalReport, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Machine => {
            out.push_str("codiff.report 1\n");
            out.push_str(&format!("kind {}\n", report.input.kind.as_str()));
            out.push_str(&format!("mode {}\n", report.config.mode.as_str()));
            out.push_str(&format!("weight_cap {}\n", report.config.weight_cap));
            out.push_str(&format!("order {}\n", report.config.order));
            out.push_str(&render_dims(&report.dims, format));
            out.push_str(&format!("base.generators {}\n", report.generators.len()));
            let mut gens: Vec<&Generator> = report.generators.iter().collect();
            gens.sort_by_key(|g| (g.order, g.name.clone()));
            for g in gens {
                out.push_str(&format!(
                    "base.generator {} parity={} order={}\n",
                    g.name, g.parity, g.order
                ));
            }
            out.push_str(&format!("base.relations {}\n", report.relations.len()));
            for (i, rel) in report.relations.iter().enumerate() {
                out.push_str(&format!(
                    "base.relation {} order={} {}\n",
                    i + 1,
                    rel.leading_order(&report.generators).unwrap_or(0),
                    rel.display(&report.generators)
                ));
            }
            out.push_str(&format!("delta.terms {}\n", report.delta.len()));
            for (monomial, order, entries) in &report.delta {
                for entry in entries {
                    out.push_str(&format!(
                        "delta {monomial} order={order} part {}\n",
                        render_part(entry)
                    ));
                }
            }
            out.push_str(&format!("diagnostics {}\n", report.diagnostics.len()));
            for d in &report.diagnostics {
                out.push_str(&format!(
                    "diagnostic stage={} module_dim={} obstruction_rank={} relations={} beta_terms={}\n",
                    d.stage, d.module_dim, d.obstruction_rank, d.relations, d.beta_terms
                ));
            }
        }
        Format::Text => {
            out.push_str(&format!(
                "miniversal deformation report ({} input, {} mode, weight cap {}, order {})\n\n",
                report.input.kind.as_str(),
                report.config.mode.as_str(),
                report.config.weight_cap,
                report.config.order
            ));
            out.push_str(&render_dims(&report.dims, format));
            out.push('\n');
            if report.generators.is_empty() {
                out.push_str("base: the ground field (the algebra is rigid at this cap)\n");
            } else {
                out.push_str(&format!(
                    "base: {} parameter(s), truncated at total degree {}\n",
                    report.generators.len(),
                    report.config.order
                ));
                for g in &report.generators {
                    out.push_str(&format!(
                        "  {}  parity {}  order {}\n",
                        g.name, g.parity, g.order
                    ));
                }
                if report.relations.is_empty() {
                    out.push_str("relations: none up to this order\n");
                } else {
                    out.push_str(&format!("relations ({}):\n", report.relations.len()));
                    for rel in &report.relations {
                        out.push_str(&format!("  {} = 0\n", rel.display(&report.generators)));
                    }
                }
                out.push_str("deformed structure (delta coefficients on V):\n");
                for (monomial, _, entries) in &report.delta {
                    for entry in entries {
                        out.push_str(&format!("  {monomial} : {}\n", render_part(entry)));
                    }
                }
            }
            if !report.diagnostics.is_empty() {
                out.push_str("per-order diagnostics:\n");
                for d in &report.diagnostics {
                    out.push_str(&format!(
                        "  stage {}: module dim {}, obstruction rank {}, relations {}, beta terms {}\n",
                        d.stage, d.module_dim, d.obstruction_rank, d.relations, d.beta_terms
                    ));
                }
            }
        }
    }
    out
}

pub fn render_verify(report: &VerifyReport, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Machine => {
            out.push_str("codiff.verify 1\n");
            out.push_str("result factors\n");
            for (name, image) in &report.images {
                out.push_str(&format!("morphism {name} -> {image}\n"));
            }
            out.push_str(&format!("equivalence.orders {}\n", report.equivalence_orders));
        }
        Format::Text => {
            out.push_str("the deformation factors through the miniversal deformation\n");
            out.push_str("base morphism on generators:\n");
            for (name, image) in &report.images {
                out.push_str(&format!("  {name} -> {image}\n"));
            }
            if report.equivalence_orders > 0 {
                out.push_str(&format!(
                    "matched after equivalences at {} order(s)\n",
                    report.equivalence_orders
                ));
            }
        }
    }
    out
}

/// Map an error to the documented process exit code: 2 for mathematical
/// rejection, 1 for usage, parse, and resource errors.
pub fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::NotCodifferential { .. } | Error::DoesNotFactor { .. } => 2,
        _ => 1,
    }
}

/// Lookup table for BTreeMap-based deterministic dims; used by tests.
pub fn dims_as_map(dims: &[WeightDims]) -> BTreeMap<(usize, Parity), usize> {
    dims.iter().map(|d| ((d.weight, d.parity), d.cohomology)).collect()
}
