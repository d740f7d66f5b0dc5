//! Enveloping-algebra differential operators: PBW-ordered noncommutative
//! polynomials over an invariant basis, coordinate-mode operators built
//! from the fields, higher-order polarization closure, and the parametric
//! anomaly scan.
//!
//! The central generator `Z` is the vertical field: on equivariant wave
//! functions it acts as multiplication by `i`, and that substitution is
//! applied only at the final obstruction-reading step (`Z_ACTION`). The
//! sign is anchored by the coordinate engine: `X0 = d/dphi` on the
//! `e^{i phi}` prefactor.

use crate::group_model::GroupSpec;
use crate::invariant_calculus::{left_fields, vertical_field, VectorField};
use crate::lie_structure::{
    validate_polarization, AlgebraElement, PolarizationVerdict, StructureTable,
};
use crate::symexpr::{self, Expr, Scope, Zeroness};
use std::collections::BTreeMap;
use thiserror::Error;

/// Input degree cap for higher-order polarizations (every worked case in
/// this domain is second order; intermediate products may exceed it).
pub const HO_DEGREE_LIMIT: usize = 2;

/// Iteration cap for the left-ideal rewriting loop.
const REDUCTION_PASS_LIMIT: usize = 200;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("operator degree {0} exceeds the engine limit {HO_DEGREE_LIMIT}")]
    DegreeBound(usize),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("ideal reduction did not terminate (pass limit {REDUCTION_PASS_LIMIT})")]
    NoTermination,
    #[error("no usable lead generator for polarization element {0}")]
    NoLead(usize),
    #[error("obstruction is not polynomial in `{param}`: {expr}")]
    NonPolynomial { param: String, expr: String },
    #[error("obstruction polynomial of degree {0} exceeds the exact solver (max 2)")]
    SolverDegree(usize),
    #[error("symbolic engine: {0}")]
    Sym(#[from] symexpr::SymError),
}

/// Action of the central generator on equivariant functions.
pub fn z_action() -> Expr {
    Expr::i()
}

// ---------------------------------------------------------------------------
// PBW polynomials
// ---------------------------------------------------------------------------

/// The enveloping algebra of a structure table, with a chosen generator
/// order for the PBW basis. Generator indices `0..n-1` follow the table;
/// index `n` is the central `Z`.
#[derive(Clone, Debug)]
pub struct PbwAlgebra {
    pub table: StructureTable,
    /// rank[idx] = position in the PBW order (lower ranks sort left).
    pub rank: Vec<usize>,
}

/// PBW-ordered noncommutative polynomial: words are generator-index
/// vectors, nondecreasing in the algebra's rank order.
#[derive(Clone, Debug, PartialEq)]
pub struct PbwPoly {
    pub terms: BTreeMap<Vec<usize>, Expr>,
}

impl PbwAlgebra {
    /// Default PBW order: table order with `Z` last.
    pub fn new(table: StructureTable) -> PbwAlgebra {
        let n = table.dim();
        let mut rank = vec![0; n + 1];
        for (k, r) in rank.iter_mut().enumerate() {
            *r = k;
        }
        PbwAlgebra { table, rank }
    }

    pub fn dim(&self) -> usize {
        self.table.dim() + 1
    }

    pub fn z_index(&self) -> usize {
        self.table.dim()
    }

    pub fn gen_name(&self, idx: usize) -> &str {
        if idx == self.z_index() {
            "Z"
        } else {
            &self.table.names[idx]
        }
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        if name == "Z" || name == "X0" {
            return Some(self.z_index());
        }
        self.table.index_of(name)
    }

    /// `[g_a, g_b]` as (generator index, coefficient) pairs, `Z` included.
    fn bracket_terms(&self, a: usize, b: usize) -> Vec<(usize, Expr)> {
        let z = self.z_index();
        if a == z || b == z || a == b {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (k, c) in self.table.c[a][b].iter().enumerate() {
            if !c.is_zero() {
                out.push((k, c.clone()));
            }
        }
        let ch = &self.table.charge[a][b];
        if !ch.is_zero() {
            out.push((z, ch.clone()));
        }
        out
    }

    /// Reorder a raw word into the PBW basis.
    pub fn normalize_word(&self, word: &[usize], coeff: &Expr) -> PbwPoly {
        if coeff.is_zero() {
            return PbwPoly::zero();
        }
        // find the first inversion
        for p in 0..word.len().saturating_sub(1) {
            let (a, b) = (word[p], word[p + 1]);
            if self.rank[a] > self.rank[b] {
                // x_a x_b = x_b x_a + [x_a, x_b]
                let mut swapped = word.to_vec();
                swapped.swap(p, p + 1);
                let mut out = self.normalize_word(&swapped, coeff);
                for (k, c) in self.bracket_terms(a, b) {
                    let mut shorter: Vec<usize> = word[..p].to_vec();
                    shorter.push(k);
                    shorter.extend_from_slice(&word[p + 2..]);
                    out = out.add(&self.normalize_word(&shorter, &coeff.mul(&c)));
                }
                return out;
            }
        }
        let mut terms = BTreeMap::new();
        terms.insert(word.to_vec(), coeff.clone());
        PbwPoly { terms }
    }

    pub fn generator(&self, idx: usize) -> PbwPoly {
        let mut terms = BTreeMap::new();
        terms.insert(vec![idx], Expr::one());
        PbwPoly { terms }
    }

    pub fn scalar(&self, e: Expr) -> PbwPoly {
        PbwPoly::scalar(e)
    }

    pub fn mul(&self, a: &PbwPoly, b: &PbwPoly) -> PbwPoly {
        let mut out = PbwPoly::zero();
        for (wa, ca) in &a.terms {
            for (wb, cb) in &b.terms {
                let word: Vec<usize> = wa.iter().chain(wb.iter()).copied().collect();
                out = out.add(&self.normalize_word(&word, &ca.mul(cb)));
            }
        }
        out
    }

    pub fn commutator(&self, a: &PbwPoly, b: &PbwPoly) -> PbwPoly {
        self.mul(a, b).sub(&self.mul(b, a))
    }

    /// Substitute the central generator by its equivariant action.
    pub fn substitute_z(&self, p: &PbwPoly) -> PbwPoly {
        let z = self.z_index();
        let mut out = PbwPoly::zero();
        for (word, coeff) in &p.terms {
            let zcount = word.iter().filter(|&&g| g == z).count();
            let rest: Vec<usize> = word.iter().copied().filter(|&g| g != z).collect();
            let mut c = coeff.clone();
            for _ in 0..zcount {
                c = c.mul(&z_action());
            }
            out = out.add(&self.normalize_word(&rest, &c));
        }
        out
    }

    pub fn render(&self, p: &PbwPoly) -> String {
        if p.terms.is_empty() {
            return "0".into();
        }
        p.terms
            .iter()
            .map(|(w, c)| {
                if w.is_empty() {
                    format!("({c})")
                } else {
                    let word = w
                        .iter()
                        .map(|&g| self.gen_name(g).to_string())
                        .collect::<Vec<_>>()
                        .join("*");
                    if c.is_one() {
                        word
                    } else {
                        format!("({c})*{word}")
                    }
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parse an operator polynomial in `L_<name>`, `X0`/`Z` keeping the
    /// written (noncommutative) factor order.
    pub fn parse_poly(&self, src: &str) -> Result<PbwPoly, EnvError> {
        let gen_names: Vec<String> = self
            .table
            .names
            .iter()
            .map(|n| format!("L_{n}"))
            .chain(["Z".to_string(), "X0".to_string()])
            .collect();
        let scope = Scope::new(
            gen_names
                .iter()
                .map(|n| symexpr::CoordDecl::new(n))
                .collect(),
            self.table.scope.params.clone(),
        );
        let ast = symexpr::parse_ast(src, &scope)
            .map_err(|e| EnvError::UnknownGenerator(e.to_string()))?;
        self.poly_from_ast(&ast)
    }

    fn poly_from_ast(&self, e: &Expr) -> Result<PbwPoly, EnvError> {
        // Generator-free subtrees are plain scalars.
        if e.free_coords().is_empty() {
            return Ok(PbwPoly::scalar(e.normalize()));
        }
        match e {
            Expr::Sum(ts) => {
                let mut acc = PbwPoly::zero();
                for t in ts {
                    acc = acc.add(&self.poly_from_ast(t)?);
                }
                Ok(acc)
            }
            Expr::Product(fs) => {
                let mut acc = PbwPoly::scalar(Expr::one());
                for f in fs {
                    acc = self.mul(&acc, &self.poly_from_ast(f)?);
                }
                Ok(acc)
            }
            Expr::Power(b, x) => {
                let n = x
                    .as_const()
                    .and_then(|c| c.as_int())
                    .and_then(|c| num_traits::ToPrimitive::to_i64(&c))
                    .filter(|&n| n >= 0)
                    .ok_or_else(|| EnvError::UnknownGenerator(format!("power {x}")))?;
                let base = self.poly_from_ast(b)?;
                let mut acc = PbwPoly::scalar(Expr::one());
                for _ in 0..n {
                    acc = self.mul(&acc, &base);
                }
                Ok(acc)
            }
            Expr::Coord(name) => {
                let idx = self
                    .ident_index(name)
                    .ok_or_else(|| EnvError::UnknownGenerator(name.clone()))?;
                Ok(self.generator(idx))
            }
            other => {
                // scalar subexpression: must involve no generators
                if other.free_coords().is_empty() {
                    Ok(PbwPoly::scalar(other.normalize()))
                } else {
                    Err(EnvError::UnknownGenerator(other.to_string()))
                }
            }
        }
    }

    fn ident_index(&self, ident: &str) -> Option<usize> {
        if ident == "Z" || ident == "X0" {
            return Some(self.z_index());
        }
        ident.strip_prefix("L_").and_then(|n| self.table.index_of(n))
    }
}

impl PbwPoly {
    pub fn zero() -> PbwPoly {
        PbwPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(e: Expr) -> PbwPoly {
        let mut terms = BTreeMap::new();
        if !e.is_zero() {
            terms.insert(Vec::new(), e);
        }
        PbwPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn add(&self, rhs: &PbwPoly) -> PbwPoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            let cur = out.terms.remove(w).unwrap_or_else(Expr::zero);
            let sum = cur.add(c);
            if !sum.is_zero() {
                out.terms.insert(w.clone(), sum);
            }
        }
        out
    }

    pub fn sub(&self, rhs: &PbwPoly) -> PbwPoly {
        self.add(&rhs.scale(&Expr::int(-1)))
    }

    pub fn scale(&self, c: &Expr) -> PbwPoly {
        if c.is_zero() {
            return PbwPoly::zero();
        }
        PbwPoly {
            terms: self
                .terms
                .iter()
                .map(|(w, k)| (w.clone(), k.mul(c)))
                .collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Degree-(0,1) part as a constant-coefficient algebra element.
    pub fn linear_part(&self, dim: usize, z_index: usize) -> AlgebraElement {
        let mut coeffs = vec![Expr::zero(); dim];
        let mut vertical = Expr::zero();
        for (w, c) in &self.terms {
            if w.len() == 1 {
                if w[0] == z_index {
                    vertical = vertical.add(c);
                } else {
                    coeffs[w[0]] = coeffs[w[0]].add(c);
                }
            }
        }
        AlgebraElement { coeffs, vertical }
    }

    /// True when every word is a power of the given generator (pure
    /// polynomial in `Z` when called with the central index).
    pub fn is_poly_in(&self, idx: usize) -> bool {
        !self.is_zero() && self.terms.keys().all(|w| w.iter().all(|&g| g == idx))
    }
}

// ---------------------------------------------------------------------------
// Higher-order polarization closure
// ---------------------------------------------------------------------------

/// One pairwise-closure record: the commutator, its expression over the
/// ideal generators (the `B` witnesses), and the residue after reduction
/// and the `Z -> i` substitution.
#[derive(Clone, Debug)]
pub struct ClosureRecord {
    pub pair: (usize, usize),
    pub commutator: String,
    pub witnesses: Vec<String>,
    pub residue: PbwPoly,
    pub residue_rendered: String,
}

/// Verdict of `check_ho_polarization`.
#[derive(Clone, Debug)]
pub struct HoVerdict {
    pub closes: bool,
    pub records: Vec<ClosureRecord>,
    /// Elements rejected for being polynomials in the vertical generator.
    pub x0_intersections: Vec<usize>,
    /// Degree-1 content of the family and its first-order verdict.
    pub vector_field_content: Vec<AlgebraElement>,
    pub first_order_verdict: Option<PolarizationVerdict>,
}

impl HoVerdict {
    /// Scalar obstruction witnesses (degree-0 residues), if any.
    pub fn central_scalars(&self) -> Vec<Expr> {
        let mut out = Vec::new();
        for r in &self.records {
            if let Some(c) = r.residue.terms.get(&Vec::new()) {
                if !c.is_zero() {
                    out.push(c.clone());
                }
            }
        }
        out
    }
}

/// Reduction context: the ideal generators with their lead generator and
/// rewrite tails.
struct IdealCtx<'a> {
    alg: &'a PbwAlgebra,
    /// lead generator index -> (element index, tail polynomial) with
    /// `g_lead ≡ tail (mod ideal)`.
    leads: BTreeMap<usize, (usize, PbwPoly)>,
}

impl<'a> IdealCtx<'a> {
    /// Reduce modulo the left ideal: rewrite every word whose rightmost
    /// factor is a lead generator. Returns the residue and witness
    /// accumulators per element.
    fn reduce(&self, p: &PbwPoly) -> Result<(PbwPoly, Vec<PbwPoly>), EnvError> {
        let mut cur = p.clone();
        let mut witnesses = vec![PbwPoly::zero(); self.leads.len().max(8)];
        for _pass in 0..REDUCTION_PASS_LIMIT {
            let mut next = PbwPoly::zero();
            let mut changed = false;
            for (word, coeff) in &cur.terms {
                match word.last() {
                    Some(last) if self.leads.contains_key(last) => {
                        let (elem_idx, tail) = &self.leads[last];
                        // prefix * g ≡ prefix * tail, witness += prefix/c.
                        let prefix = &word[..word.len() - 1];
                        let prefix_poly = self.alg.normalize_word(prefix, coeff);
                        next = next.add(&self.alg.mul(&prefix_poly, tail));
                        witnesses[*elem_idx] = witnesses[*elem_idx].add(&prefix_poly);
                        changed = true;
                    }
                    _ => {
                        next = next.add(&PbwPoly {
                            terms: [(word.clone(), coeff.clone())].into_iter().collect(),
                        });
                    }
                }
            }
            cur = next;
            if !changed {
                return Ok((cur, witnesses));
            }
        }
        Err(EnvError::NoTermination)
    }
}

/// Build the reduction order and lead table for a polarization family:
/// every element needs an invertible linear generator; leads rank last so
/// rightmost-reduction sees them.
fn build_ideal<'a>(
    alg: &'a PbwAlgebra,
    elements: &[PbwPoly],
) -> Result<(PbwAlgebra, Vec<PbwPoly>, BTreeMap<usize, usize>), EnvError> {
    let n = alg.table.dim();
    let scope = &alg.table.scope;
    // generators appearing in degree >= 2 words anywhere in the family
    let mut tail_gens = vec![false; n + 1];
    for e in elements {
        for w in e.terms.keys() {
            if w.len() >= 2 {
                for &g in w {
                    tail_gens[g] = true;
                }
            }
        }
    }
    let mut lead_of = BTreeMap::new();
    let mut used = vec![false; n + 1];
    for (ei, e) in elements.iter().enumerate() {
        let mut pick = None;
        for (w, c) in &e.terms {
            if w.len() == 1 && w[0] != alg.z_index() && !used[w[0]] {
                let invertible = matches!(
                    symexpr::zeroness(c, scope),
                    Zeroness::NonZero
                );
                if invertible {
                    let better = match &pick {
                        None => true,
                        Some((g, _)) => tail_gens[*g] && !tail_gens[w[0]],
                    };
                    if better {
                        pick = Some((w[0], c.clone()));
                    }
                }
            }
        }
        let (g, c) = pick.ok_or(EnvError::NoLead(ei))?;
        used[g] = true;
        lead_of.insert(g, ei);
        let _ = c;
    }
    // Reduction order: non-leads first (table order), then leads, Z first.
    let mut rank = vec![0usize; n + 1];
    let mut next = 0usize;
    rank[alg.z_index()] = next;
    next += 1;
    for g in 0..n {
        if !lead_of.contains_key(&g) {
            rank[g] = next;
            next += 1;
        }
    }
    for g in 0..n {
        if lead_of.contains_key(&g) {
            rank[g] = next;
            next += 1;
        }
    }
    let ordered = PbwAlgebra {
        table: alg.table.clone(),
        rank,
    };
    // Renormalize the elements in the new order and build tails:
    // c*g + rest ≡ 0 (mod ideal) => g ≡ -rest/c.
    let renormed: Vec<PbwPoly> = elements
        .iter()
        .map(|e| {
            let mut acc = PbwPoly::zero();
            for (w, c) in &e.terms {
                acc = acc.add(&ordered.normalize_word(w, c));
            }
            acc
        })
        .collect();
    Ok((ordered, renormed, lead_of))
}

/// Check a higher-order polarization family for closure modulo the left
/// ideal it generates, with the equivariance substitution `Z -> i` applied
/// to the residues.
pub fn check_ho_polarization(
    alg: &PbwAlgebra,
    elements: &[PbwPoly],
) -> Result<HoVerdict, EnvError> {
    for e in elements {
        if e.degree() > HO_DEGREE_LIMIT {
            return Err(EnvError::DegreeBound(e.degree()));
        }
    }
    let mut x0_intersections = Vec::new();
    for (k, e) in elements.iter().enumerate() {
        if e.is_poly_in(alg.z_index()) {
            x0_intersections.push(k);
        }
    }
    if !x0_intersections.is_empty() {
        // Definitionally rejected: no closure analysis applies.
        return Ok(HoVerdict {
            closes: false,
            records: Vec::new(),
            x0_intersections,
            vector_field_content: Vec::new(),
            first_order_verdict: None,
        });
    }

    let (ordered, renormed, lead_of) = build_ideal(alg, elements)?;
    let mut leads = BTreeMap::new();
    for (&g, &ei) in &lead_of {
        // g ≡ -(element - c g)/c
        let e = &renormed[ei];
        let c = e
            .terms
            .get(&vec![g])
            .cloned()
            .expect("lead coefficient present");
        let mut rest = e.clone();
        rest.terms.remove(&vec![g]);
        let tail = rest.scale(&Expr::int(-1).div(&c));
        leads.insert(g, (ei, tail));
    }
    let ideal = IdealCtx {
        alg: &ordered,
        leads,
    };

    let mut records = Vec::new();
    let mut closes = x0_intersections.is_empty();
    for i in 0..renormed.len() {
        for j in (i + 1)..renormed.len() {
            let comm = ordered.commutator(&renormed[i], &renormed[j]);
            let (residue_raw, wits) = ideal.reduce(&comm)?;
            let residue = ordered.substitute_z(&residue_raw);
            let ok = residue.is_zero();
            if !ok {
                closes = false;
            }
            records.push(ClosureRecord {
                pair: (i, j),
                commutator: ordered.render(&comm),
                witnesses: wits
                    .iter()
                    .take(renormed.len())
                    .map(|w| ordered.render(w))
                    .collect(),
                residue_rendered: ordered.render(&residue),
                residue,
            });
        }
    }

    // Vector-field content: degree-<=1 members of the family.
    let vector_field_content: Vec<AlgebraElement> = elements
        .iter()
        .filter(|e| e.degree() <= 1)
        .map(|e| e.linear_part(alg.table.dim(), alg.z_index()))
        .collect();
    let first_order_verdict = if vector_field_content.is_empty() {
        None
    } else {
        let sigma = alg.table.sigma_matrix();
        let chars = crate::lie_structure::characteristic_subalgebra(&alg.table, &sigma);
        Some(validate_polarization(
            &alg.table,
            &sigma,
            &chars.basis,
            &vector_field_content,
        ))
    };

    Ok(HoVerdict {
        closes,
        records,
        x0_intersections,
        vector_field_content,
        first_order_verdict,
    })
}

// ---------------------------------------------------------------------------
// Anomaly scan
// ---------------------------------------------------------------------------

/// Result of scanning the closure obstructions over one parameter.
#[derive(Clone, Debug)]
pub enum ScanResult {
    /// Exact roots common to every obstruction coefficient.
    Roots(Vec<Expr>),
    /// The obstructions vanish identically.
    AllValues,
    /// Some obstruction is a nonzero constant in the parameter.
    NoSolution { witness: String },
}

/// Collect every closure obstruction of the template symbolically and
/// solve for the named parameter (exact, degree <= 2).
pub fn anomaly_scan(
    alg: &PbwAlgebra,
    elements: &[PbwPoly],
    param: &str,
) -> Result<ScanResult, EnvError> {
    let verdict = check_ho_polarization(alg, elements)?;
    let mut conditions: Vec<Expr> = Vec::new();
    for r in &verdict.records {
        for c in r.residue.terms.values() {
            if !c.is_zero() {
                conditions.push(c.clone());
            }
        }
    }
    if conditions.is_empty() {
        return Ok(ScanResult::AllValues);
    }
    // Scope without the scanned parameter (it is the unknown).
    let mut outer = alg.table.scope.clone();
    outer.params.retain(|p| p.name != param);

    let mut roots: Option<Vec<Expr>> = None;
    for cond in &conditions {
        let poly = param_polynomial(cond, param)?;
        let degree = poly.len().saturating_sub(1);
        let all_zero = poly.iter().all(|c| c.is_zero());
        if all_zero {
            continue;
        }
        if degree == 0 {
            return Ok(ScanResult::NoSolution {
                witness: cond.to_string(),
            });
        }
        let cond_roots = solve_exact(&poly)?;
        roots = Some(match roots {
            None => cond_roots,
            Some(prev) => prev
                .into_iter()
                .filter(|r| {
                    cond_roots
                        .iter()
                        .any(|s| symexpr::equal(r, s, &outer).unwrap_or(false))
                })
                .collect(),
        });
    }
    match roots {
        None => Ok(ScanResult::AllValues),
        Some(r) if r.is_empty() => Ok(ScanResult::NoSolution {
            witness: "obstruction roots are inconsistent".into(),
        }),
        Some(r) => Ok(ScanResult::Roots(r)),
    }
}

/// Coefficients `[a0, a1, ..]` of an expression as a polynomial in the
/// parameter.
fn param_polynomial(e: &Expr, param: &str) -> Result<Vec<Expr>, EnvError> {
    let nf = e.to_nf();
    let mut coeffs: Vec<Expr> = Vec::new();
    for (mono, c) in &nf.0 {
        let mut deg = 0usize;
        let mut rest = crate::symexpr::NMono::one();
        for (atom, expo) in &mono.0 {
            let is_param = matches!(atom, crate::symexpr::NAtom::Param(n) if n == param);
            if is_param {
                let d = expo
                    .as_int()
                    .filter(|&d| d >= 0)
                    .ok_or_else(|| EnvError::NonPolynomial {
                        param: param.to_string(),
                        expr: e.to_string(),
                    })?;
                deg = d as usize;
            } else {
                let mut check = std::collections::BTreeSet::new();
                let atom_poly = crate::symexpr::NPoly::atom(atom.clone());
                atom_poly.free_params(&mut check);
                expo.free_params(&mut check);
                if check.contains(param) {
                    return Err(EnvError::NonPolynomial {
                        param: param.to_string(),
                        expr: e.to_string(),
                    });
                }
                rest.0.insert(atom.clone(), expo.clone());
            }
        }
        while coeffs.len() <= deg {
            coeffs.push(Expr::zero());
        }
        let mut term = crate::symexpr::NPoly::zero();
        term.0.insert(rest, c.clone());
        coeffs[deg] = coeffs[deg].add(&crate::symexpr::from_nf(&term));
    }
    if coeffs.is_empty() {
        coeffs.push(Expr::zero());
    }
    Ok(coeffs)
}

/// Exact roots of a degree-1 or degree-2 polynomial with expression
/// coefficients (the quadratic route requires the discriminant root to
/// simplify exactly).
fn solve_exact(poly: &[Expr]) -> Result<Vec<Expr>, EnvError> {
    let degree = poly.len() - 1;
    match degree {
        1 => Ok(vec![poly[0].neg().div(&poly[1]).normalize()]),
        2 => {
            let (a, b, c) = (&poly[2], &poly[1], &poly[0]);
            let disc = b.mul(b).sub(&a.mul(c).scale(4, 1));
            let root = disc.pow(&Expr::ratio(1, 2));
            // accept only if the square root folded exactly
            if !root.mul(&root).sub(&disc).is_zero() {
                return Err(EnvError::SolverDegree(2));
            }
            let two_a = a.scale(2, 1);
            Ok(vec![
                b.neg().add(&root).div(&two_a).normalize(),
                b.neg().sub(&root).div(&two_a).normalize(),
            ])
        }
        d => Err(EnvError::SolverDegree(d)),
    }
}

// ---------------------------------------------------------------------------
// Coordinate-mode differential operators
// ---------------------------------------------------------------------------

/// Finite sum of (coefficient, derivative multi-index) terms over the
/// extended chart (the last slot differentiates by the fibre angle).
#[derive(Clone, Debug)]
pub struct DiffOperator {
    pub dim: usize,
    pub terms: Vec<(Expr, Vec<u32>)>,
}

impl DiffOperator {
    pub fn zero(dim: usize) -> DiffOperator {
        DiffOperator {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> DiffOperator {
        DiffOperator {
            dim,
            terms: vec![(Expr::one(), vec![0; dim])],
        }
    }

    pub fn from_field(f: &VectorField) -> DiffOperator {
        let dim = f.coeffs.len() + 1;
        let mut terms = Vec::new();
        for (k, c) in f.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut idx = vec![0; dim];
                idx[k] = 1;
                terms.push((c.clone(), idx));
            }
        }
        if !f.vertical.is_zero() {
            let mut idx = vec![0; dim];
            idx[dim - 1] = 1;
            terms.push((f.vertical.clone(), idx));
        }
        DiffOperator { dim, terms }
    }

    pub fn normalize(&self) -> DiffOperator {
        let mut map: BTreeMap<Vec<u32>, Expr> = BTreeMap::new();
        for (c, idx) in &self.terms {
            let cur = map.remove(idx).unwrap_or_else(Expr::zero);
            let sum = cur.add(c);
            if !sum.is_zero() {
                map.insert(idx.clone(), sum);
            }
        }
        DiffOperator {
            dim: self.dim,
            terms: map.into_iter().map(|(i, c)| (c, i)).collect(),
        }
    }

    pub fn add(&self, rhs: &DiffOperator) -> DiffOperator {
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        DiffOperator {
            dim: self.dim,
            terms,
        }
        .normalize()
    }

    pub fn scale(&self, c: &Expr) -> DiffOperator {
        DiffOperator {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, i)| (k.mul(c), i.clone()))
                .collect(),
        }
        .normalize()
    }

    /// Apply to an expression over the extended chart.
    pub fn apply(&self, names: &[String], e: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (c, idx) in &self.terms {
            let mut d = e.clone();
            for (k, &count) in idx.iter().enumerate() {
                for _ in 0..count {
                    d = d.diff(&names[k]);
                }
            }
            out = out.add(&c.mul(&d));
        }
        out.normalize()
    }

    /// Operator composition by the generalized Leibniz rule.
    pub fn compose(&self, names: &[String], rhs: &DiffOperator) -> DiffOperator {
        let mut out = DiffOperator::zero(self.dim);
        for (a, alpha) in &self.terms {
            for (b, beta) in &rhs.terms {
                // a d^alpha (b d^beta) = a sum_{gamma <= alpha}
                //   C(alpha, gamma) (d^gamma b) d^{alpha - gamma + beta}
                for gamma in sub_indices(alpha) {
                    let mut coeff_b = b.clone();
                    let mut binom = 1i64;
                    for k in 0..self.dim {
                        binom *= binomial(alpha[k], gamma[k]);
                        for _ in 0..gamma[k] {
                            coeff_b = coeff_b.diff(&names[k]);
                        }
                    }
                    if coeff_b.is_zero() {
                        continue;
                    }
                    let mut idx = vec![0u32; self.dim];
                    for k in 0..self.dim {
                        idx[k] = alpha[k] - gamma[k] + beta[k];
                    }
                    out.terms
                        .push((a.mul(&coeff_b).scale(binom, 1), idx));
                }
            }
        }
        out.normalize()
    }

    pub fn commutator(&self, names: &[String], rhs: &DiffOperator) -> DiffOperator {
        self.compose(names, rhs)
            .add(&rhs.compose(names, self).scale(&Expr::int(-1)))
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(c, idx)| {
                let ds: Vec<String> = idx
                    .iter()
                    .enumerate()
                    .filter(|(_, &n)| n > 0)
                    .map(|(k, &n)| {
                        if n == 1 {
                            format!("d/d{}", names[k])
                        } else {
                            format!("d^{}/d{}^{}", n, names[k], n)
                        }
                    })
                    .collect();
                if ds.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c}) {}", ds.join(" "))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let mut out = 1i64;
    for j in 0..k {
        out = out * (n - j) as i64 / (j + 1) as i64;
    }
    out
}

fn sub_indices(alpha: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &a in alpha {
        let mut next = Vec::new();
        for prefix in &out {
            for g in 0..=a {
                let mut p = prefix.clone();
                p.push(g);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Realize a PBW polynomial as a coordinate differential operator over a
/// group spec (generators become left fields, `Z` the vertical field).
pub fn realize(spec: &GroupSpec, alg: &PbwAlgebra, p: &PbwPoly) -> DiffOperator {
    let names: Vec<String> = spec
        .chart
        .names()
        .into_iter()
        .chain([spec.chart.fibre.clone()])
        .collect();
    let fields = left_fields(spec);
    let dim = names.len();
    let mut out = DiffOperator::zero(dim);
    for (word, coeff) in &p.terms {
        let mut acc = DiffOperator::identity(dim).scale(coeff);
        for &g in word {
            let op = if g == alg.z_index() {
                DiffOperator::from_field(&vertical_field(spec))
            } else {
                DiffOperator::from_field(&fields[g])
            };
            acc = acc.compose(&names, &op);
        }
        out = out.add(&acc);
    }
    out
}

// ---------------------------------------------------------------------------
// Casimir
// ---------------------------------------------------------------------------

/// The quadratic Casimir of the harmonic-oscillator group in the left
/// basis: `X_t - (i hbar / 2m) X_x^2 - (i hbar m omega^2 / 2) X_p^2`.
/// (The `omega^2` is forced by the commutation check; see the tests.)
pub fn oscillator_casimir(alg: &PbwAlgebra) -> Result<PbwPoly, EnvError> {
    let it = alg.gen_index("t").ok_or(EnvError::UnknownGenerator("t".into()))?;
    let ix = alg.gen_index("x").ok_or(EnvError::UnknownGenerator("x".into()))?;
    let ip = alg.gen_index("p").ok_or(EnvError::UnknownGenerator("p".into()))?;
    let scope = Scope::new(Vec::new(), alg.table.scope.params.clone());
    let cx = symexpr::parse("-i*hbar/(2*m)", &scope)
        .map_err(|e| EnvError::UnknownGenerator(e.to_string()))?;
    let cp = symexpr::parse("-i*hbar*m*omega^2/2", &scope)
        .map_err(|e| EnvError::UnknownGenerator(e.to_string()))?;
    let x = alg.generator(ix);
    let p = alg.generator(ip);
    let casimir = alg
        .generator(it)
        .add(&alg.mul(&x, &x).scale(&cx))
        .add(&alg.mul(&p, &p).scale(&cp));
    // Verify centrality on equivariant functions.
    for g in [it, ix, ip] {
        let c = alg.substitute_z(&alg.commutator(&casimir, &alg.generator(g)));
        if !c.is_zero() {
            return Err(EnvError::UnknownGenerator(format!(
                "casimir does not commute with {}: {}",
                alg.gen_name(g),
                alg.render(&c)
            )));
        }
    }
    Ok(casimir)
}

/// Does the element commute with every generator after the equivariance
/// substitution?
pub fn is_casimir(alg: &PbwAlgebra, p: &PbwPoly) -> bool {
    (0..alg.table.dim()).all(|g| {
        alg.substitute_z(&alg.commutator(p, &alg.generator(g)))
            .is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_model::{registry_get, RegistryEntry};
    use crate::lie_structure::{structure_constants, table_from_algebra};
    use crate::symexpr::{equal_seeded, parse, ParamAssumption, ParamDomain};
    use num_rational::BigRational;
    use std::collections::BTreeMap;

    fn group(name: &str) -> GroupSpec {
        match registry_get(name).unwrap() {
            RegistryEntry::Group(g) => g,
            _ => panic!(),
        }
    }

    fn schrodinger(kpin: Option<(i64, i64)>) -> PbwAlgebra {
        let alg = match registry_get("schrodinger-algebra").unwrap() {
            RegistryEntry::Algebra(a) => a,
            _ => panic!(),
        };
        let alg = match kpin {
            None => alg,
            Some((n, d)) => {
                let mut pins = BTreeMap::new();
                pins.insert("k".to_string(), BigRational::new(n.into(), d.into()));
                alg.with_pins(&pins)
            }
        };
        PbwAlgebra::new(table_from_algebra(&alg))
    }

    #[test]
    fn pbw_reorders_with_central_charge() {
        // abstract H-W inside the Schrödinger algebra: x v - v x = m Z
        let alg = schrodinger(None);
        let x = alg.parse_poly("L_x").unwrap();
        let v = alg.parse_poly("L_v").unwrap();
        let comm = alg.commutator(&x, &v);
        let want = alg.parse_poly("m*Z").unwrap();
        assert_eq!(alg.render(&comm), alg.render(&want));
        // confluence: the two parenthesizations of the word xvx normalize
        // to the same canonical form
        let xv = alg.mul(&x, &v);
        let vx = alg.mul(&v, &x);
        let a = alg.mul(&xv, &x);
        let b = alg.mul(&x, &vx);
        assert!(a.sub(&b).is_zero());
    }

    #[test]
    fn pbw_normalization_is_idempotent() {
        let alg = schrodinger(None);
        let e = alg.parse_poly("L_t*L_c + L_c*L_t + L_x^2").unwrap();
        let mut renorm = PbwPoly::zero();
        for (w, c) in &e.terms {
            renorm = renorm.add(&alg.normalize_word(w, c));
        }
        assert_eq!(alg.render(&e), alg.render(&renorm));
    }

    #[test]
    fn schrodinger_closure_at_quarter_only() {
        // P^HO = {t, a, x, c + (i/2m) v^2} closes at k = 1/4 ...
        let alg = schrodinger(Some((1, 4)));
        let p = vec![
            alg.parse_poly("L_t").unwrap(),
            alg.parse_poly("L_a").unwrap(),
            alg.parse_poly("L_x").unwrap(),
            alg.parse_poly("L_c + (i/(2*m))*L_v^2").unwrap(),
        ];
        let verdict = check_ho_polarization(&alg, &p).unwrap();
        assert!(verdict.closes, "{:#?}", verdict.records);
        // ... and fails at k = 0 with a scalar witness.
        let alg0 = schrodinger(Some((0, 1)));
        let p0 = vec![
            alg0.parse_poly("L_t").unwrap(),
            alg0.parse_poly("L_a").unwrap(),
            alg0.parse_poly("L_x").unwrap(),
            alg0.parse_poly("L_c + (i/(2*m))*L_v^2").unwrap(),
        ];
        let verdict0 = check_ho_polarization(&alg0, &p0).unwrap();
        assert!(!verdict0.closes);
        let scalars = verdict0.central_scalars();
        assert!(!scalars.is_empty());
        let scope = alg0.table.scope.clone();
        assert!(equal_seeded(&scalars[0], &Expr::ratio(1, 2), &scope, 3).unwrap());
    }

    #[test]
    fn wrong_sign_template_never_closes() {
        // The printed sign c - (i/2m) v^2 leaves a (1 - iZ) v obstruction
        // that no k can repair; the engine is sign-fixed by derivation.
        let alg = schrodinger(Some((1, 4)));
        let p = vec![
            alg.parse_poly("L_t").unwrap(),
            alg.parse_poly("L_a").unwrap(),
            alg.parse_poly("L_x").unwrap(),
            alg.parse_poly("L_c - (i/(2*m))*L_v^2").unwrap(),
        ];
        let verdict = check_ho_polarization(&alg, &p).unwrap();
        assert!(!verdict.closes);
    }

    #[test]
    fn pure_vertical_family_is_rejected() {
        let alg = schrodinger(None);
        let p = vec![alg.parse_poly("Z").unwrap()];
        let verdict = check_ho_polarization(&alg, &p).unwrap();
        assert_eq!(verdict.x0_intersections, vec![0]);
        assert!(!verdict.closes);
    }

    #[test]
    fn anomaly_scan_finds_the_quarter() {
        let alg = schrodinger(None);
        let p = vec![
            alg.parse_poly("L_t").unwrap(),
            alg.parse_poly("L_a").unwrap(),
            alg.parse_poly("L_x").unwrap(),
            alg.parse_poly("L_c + (i/(2*m))*L_v^2").unwrap(),
        ];
        let scan = anomaly_scan(&alg, &p, "k").unwrap();
        match scan {
            ScanResult::Roots(roots) => {
                assert_eq!(roots.len(), 1);
                assert_eq!(roots[0], Expr::ratio(1, 4));
            }
            other => panic!("expected roots, got {other:?}"),
        }
    }

    #[test]
    fn oscillator_template_scan_recovers_prefactor() {
        // {X_t - alpha X_x^2, X_p} closes only at alpha = i hbar / 2m.
        let spec = group("harmonic-oscillator");
        let mut table = structure_constants(&spec, true).unwrap();
        table
            .scope
            .params
            .push(ParamAssumption::new("alpha", ParamDomain::Real));
        let alg = PbwAlgebra::new(table);
        let p = vec![
            alg.parse_poly("L_t - alpha*L_x^2").unwrap(),
            alg.parse_poly("L_p").unwrap(),
        ];
        let scan = anomaly_scan(&alg, &p, "alpha").unwrap();
        let scope = alg.table.scope.clone();
        match scan {
            ScanResult::Roots(roots) => {
                assert_eq!(roots.len(), 1);
                let want = parse("i*hbar/(2*m)", &scope).unwrap();
                assert!(equal_seeded(&roots[0], &want, &scope, 3).unwrap());
            }
            other => panic!("expected roots, got {other:?}"),
        }
    }

    #[test]
    fn identically_closing_template_reports_all_values() {
        let hw = group("heisenberg-weyl");
        let mut table = structure_constants(&hw, true).unwrap();
        table
            .scope
            .params
            .push(ParamAssumption::new("alpha", ParamDomain::Real));
        let alg = PbwAlgebra::new(table);
        let p = vec![
            alg.parse_poly("L_a").unwrap(),
            alg.parse_poly("L_p + alpha*L_a").unwrap(),
        ];
        assert!(matches!(
            anomaly_scan(&alg, &p, "alpha").unwrap(),
            ScanResult::AllValues
        ));
    }

    #[test]
    fn oscillator_ho_polarization_closes() {
        let spec = group("harmonic-oscillator");
        let table = structure_constants(&spec, true).unwrap();
        let alg = PbwAlgebra::new(table);
        let p = vec![
            alg.parse_poly("L_t - (i*hbar/(2*m))*L_x^2").unwrap(),
            alg.parse_poly("L_p").unwrap(),
        ];
        let verdict = check_ho_polarization(&alg, &p).unwrap();
        assert!(verdict.closes, "{:#?}", verdict.records);
        // vector-field content {X_p} validates as a (non-full) first-order
        // polarization: maximal and horizontal, missing G_C = {X_t}.
        let fo = verdict.first_order_verdict.unwrap();
        assert!(fo.horizontal.ok && fo.subalgebra.ok && fo.maximal.ok);
        assert!(!fo.full.ok);
    }

    #[test]
    fn coordinate_and_abstract_commutators_agree() {
        // [(X^L_q)^2, X^L_p] in H-W, coordinate route vs PBW route.
        let spec = group("heisenberg-weyl");
        let names: Vec<String> = spec
            .chart
            .names()
            .into_iter()
            .chain([spec.chart.fibre.clone()])
            .collect();
        let table = structure_constants(&spec, true).unwrap();
        let alg = PbwAlgebra::new(table);
        let q2 = alg.parse_poly("L_q^2").unwrap();
        let p = alg.parse_poly("L_p").unwrap();
        let abstract_comm = alg.commutator(&q2, &p);
        // expected: -(2/hbar) Z q
        let want = alg.parse_poly("-(2/hbar)*Z*L_q").unwrap();
        assert!(abstract_comm.sub(&want).is_zero());
        // realize both routes and apply to an opaque test function
        let realized = realize(&spec, &alg, &abstract_comm);
        let fields = left_fields(&spec);
        let opq = DiffOperator::from_field(&fields[0]);
        let opp = DiffOperator::from_field(&fields[1]);
        let coord_comm = opq
            .compose(&names, &opq)
            .commutator(&names, &opp);
        let scope = spec.extended_scope();
        let test_fn = parse("F(q, p, a, phi)", &scope).unwrap();
        let a = realized.apply(&names, &test_fn);
        let b = coord_comm.apply(&names, &test_fn);
        assert!(equal_seeded(&a, &b, &scope, 17).unwrap());
    }

    #[test]
    fn operator_composition_identities() {
        // (d_q) o (q .) = q d_q + 1
        let spec = group("heisenberg-weyl");
        let names: Vec<String> = spec
            .chart
            .names()
            .into_iter()
            .chain([spec.chart.fibre.clone()])
            .collect();
        let scope = spec.extended_scope();
        let dq = {
            let mut op = DiffOperator::zero(4);
            op.terms.push((Expr::one(), vec![1, 0, 0, 0]));
            op
        };
        let mul_q = {
            let mut op = DiffOperator::zero(4);
            op.terms.push((Expr::coord("q"), vec![0, 0, 0, 0]));
            op
        };
        let comp = dq.compose(&names, &mul_q);
        let test_fn = parse("F(q, p)", &scope).unwrap();
        let got = comp.apply(&names, &test_fn);
        let want = parse("q*D[F(q,p),q,1] + F(q,p)", &scope).unwrap();
        assert!(equal_seeded(&got, &want, &scope, 7).unwrap());
        // associativity on an opaque function
        let a = dq.compose(&names, &mul_q).compose(&names, &dq);
        let b = dq.compose(&names, &mul_q.compose(&names, &dq));
        let fa = a.apply(&names, &test_fn);
        let fb = b.apply(&names, &test_fn);
        assert!(equal_seeded(&fa, &fb, &scope, 7).unwrap());
    }

    #[test]
    fn squared_field_matches_double_application() {
        // (X^L_x)^2 composed as an operator equals applying X^L_x twice.
        let spec = group("harmonic-oscillator");
        let names: Vec<String> = spec
            .chart
            .names()
            .into_iter()
            .chain([spec.chart.fibre.clone()])
            .collect();
        let fields = left_fields(&spec);
        let op = DiffOperator::from_field(&fields[1]);
        let squared = op.compose(&names, &op);
        let scope = spec.extended_scope();
        let f = parse("F(t, x, p, phi)", &scope).unwrap();
        let twice = {
            let once = fields[1].apply(&spec, &f);
            fields[1].apply(&spec, &once)
        };
        let composed = squared.apply(&names, &f);
        assert!(equal_seeded(&composed, &twice, &scope, 21).unwrap());
    }

    #[test]
    fn oscillator_casimir_is_central() {
        let spec = group("harmonic-oscillator");
        let table = structure_constants(&spec, true).unwrap();
        let alg = PbwAlgebra::new(table);
        let c = oscillator_casimir(&alg).unwrap();
        assert!(is_casimir(&alg, &c));
        // in the abelian block of H-W any generator is a Casimir
        let hw = group("heisenberg-weyl");
        let hw_alg = PbwAlgebra::new(structure_constants(&hw, true).unwrap());
        let a = hw_alg.parse_poly("L_a").unwrap();
        assert!(is_casimir(&hw_alg, &a));
        let q = hw_alg.parse_poly("L_q").unwrap();
        assert!(!is_casimir(&hw_alg, &q));
    }

    #[test]
    fn degree_bound_is_enforced() {
        let alg = schrodinger(None);
        let cubic = alg.parse_poly("L_v^3").unwrap();
        assert!(matches!(
            check_ho_polarization(&alg, &[cubic]),
            Err(EnvError::DegreeBound(3))
        ));
    }
}
