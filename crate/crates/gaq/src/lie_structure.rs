//! Structure constants, Jacobi checks, pseudo-extensions, characteristic
//! subalgebras and first-order polarization validation.
//!
//! Everything here works over a [`StructureTable`]: the bracket data of
//! the left-invariant basis plus the central charge column, extracted
//! either from a coordinate [`GroupSpec`] (with a non-closure check) or
//! taken verbatim from an [`AbstractAlgebraSpec`].

use crate::group_model::{AbstractAlgebraSpec, GroupSpec};
use crate::invariant_calculus::{
    self, curvature, dual_forms, field_commutator, kernel_basis, left_fields, right_fields,
    sigma_at_identity, CalcError, KForm, OneForm, VectorField,
};
use crate::symexpr::{self, equal_seeded, zeroness, Expr, Scope, Zeroness};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LieError {
    #[error("bracket [{0}, {1}] does not close on the invariant basis: residue {2}")]
    NonClosure(String, String, String),
    #[error("element mentions unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("element is not a constant-coefficient combination: {0}")]
    NotConstant(String),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error("symbolic engine: {0}")]
    Sym(#[from] symexpr::SymError),
}

/// Bracket table of a finite basis `X_1..X_n` plus central charges:
/// `[X_i, X_j] = sum_k c[i][j][k] X_k + charge[i][j] X0`.
#[derive(Clone, Debug)]
pub struct StructureTable {
    pub names: Vec<String>,
    pub c: Vec<Vec<Vec<Expr>>>,
    pub charge: Vec<Vec<Expr>>,
    pub scope: Scope,
}

impl StructureTable {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Lie-algebra 2-cocycle at the identity: `Sigma(X_i, X_j) =
    /// -theta_hat([X_i, X_j]) = -charge[i][j]`.
    pub fn sigma_matrix(&self) -> Vec<Vec<Expr>> {
        let n = self.dim();
        let mut m = vec![vec![Expr::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                m[i][j] = self.charge[i][j].neg();
            }
        }
        m
    }

    /// Bracket of two constant-coefficient elements.
    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let n = self.dim();
        let mut coeffs = vec![Expr::zero(); n];
        let mut vertical = Expr::zero();
        for i in 0..n {
            if x.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y.coeffs[j].is_zero() {
                    continue;
                }
                let w = x.coeffs[i].mul(&y.coeffs[j]);
                for k in 0..n {
                    if !self.c[i][j][k].is_zero() {
                        coeffs[k] = coeffs[k].add(&w.mul(&self.c[i][j][k]));
                    }
                }
                if !self.charge[i][j].is_zero() {
                    vertical = vertical.add(&w.mul(&self.charge[i][j]));
                }
            }
        }
        AlgebraElement {
            coeffs: coeffs.into_iter().map(|e| e.normalize()).collect(),
            vertical: vertical.normalize(),
        }
    }
}

/// Constant-coefficient element over the left basis plus the vertical
/// generator.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    pub coeffs: Vec<Expr>,
    pub vertical: Expr,
}

impl AlgebraElement {
    pub fn basis(dim: usize, k: usize) -> AlgebraElement {
        let mut coeffs = vec![Expr::zero(); dim];
        coeffs[k] = Expr::one();
        AlgebraElement {
            coeffs,
            vertical: Expr::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vertical.is_zero() && self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Extended coefficient vector (basis slots then the vertical slot).
    pub fn extended(&self) -> Vec<Expr> {
        let mut v = self.coeffs.clone();
        v.push(self.vertical.clone());
        v
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                if c.is_one() {
                    parts.push(format!("X[{}]", names[k]));
                } else {
                    parts.push(format!("({})*X[{}]", c, names[k]));
                }
            }
        }
        if !self.vertical.is_zero() {
            parts.push(format!("({})*X0", self.vertical));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Realize over the coordinate chart as a vector field.
    pub fn realize(&self, spec: &GroupSpec) -> VectorField {
        let lf = left_fields(spec);
        let mut acc = VectorField::zero(spec.chart.dim());
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&lf[k].scale(c));
            }
        }
        if !self.vertical.is_zero() {
            acc = acc.add(&invariant_calculus::vertical_field(spec).scale(&self.vertical));
        }
        acc
    }
}

/// Extract the structure constants of the left (or right) invariant basis
/// of a coordinate spec and verify global closure.
pub fn structure_constants(spec: &GroupSpec, left: bool) -> Result<StructureTable, LieError> {
    let fields = if left {
        left_fields(spec)
    } else {
        right_fields(spec)
    };
    table_from_fields(spec, &fields)
}

fn table_from_fields(spec: &GroupSpec, fields: &[VectorField]) -> Result<StructureTable, LieError> {
    let n = fields.len();
    let scope = spec.extended_scope();
    let names: Vec<String> = fields.iter().map(|f| f.label.clone()).collect();
    let mut c = vec![vec![vec![Expr::zero(); n]; n]; n];
    let mut charge = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let b = field_commutator(spec, &fields[i], &fields[j]);
            let at_e = b.at_identity(spec);
            // Constant coefficients read off at the identity; global
            // closure verified against the full bracket.
            let mut residue = b.clone();
            for k in 0..n {
                let ck = at_e[k].clone();
                if ck.free_coords().iter().count() > 0 {
                    return Err(LieError::NotConstant(ck.to_string()));
                }
                residue = residue.add(&fields[k].scale(&ck.neg()));
                c[i][j][k] = ck.clone();
                c[j][i][k] = ck.neg();
            }
            let ch = at_e[n].clone();
            residue.vertical = residue.vertical.sub(&ch);
            charge[i][j] = ch.clone();
            charge[j][i] = ch.neg();
            for comp in residue.extended() {
                if !symexpr::is_zero_expr(&comp, &scope)? {
                    return Err(LieError::NonClosure(
                        names[i].clone(),
                        names[j].clone(),
                        comp.to_string(),
                    ));
                }
            }
        }
    }
    Ok(StructureTable {
        names,
        c,
        charge,
        scope: spec.scope(),
    })
}

/// Structure table of an abstract algebra (central generator split off as
/// the charge column).
pub fn table_from_algebra(alg: &AbstractAlgebraSpec) -> StructureTable {
    let z = alg.central;
    let names: Vec<String> = alg
        .generators
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != z)
        .map(|(_, n)| n.clone())
        .collect();
    let keep: Vec<usize> = (0..alg.dim()).filter(|&k| k != z).collect();
    let n = names.len();
    let mut c = vec![vec![vec![Expr::zero(); n]; n]; n];
    let mut charge = vec![vec![Expr::zero(); n]; n];
    for (ia, &ga) in keep.iter().enumerate() {
        for (ib, &gb) in keep.iter().enumerate() {
            let b = alg.bracket(ga, gb);
            for (ik, &gk) in keep.iter().enumerate() {
                c[ia][ib][ik] = b[gk].clone();
            }
            charge[ia][ib] = b[z].clone();
        }
    }
    StructureTable {
        names,
        c,
        charge,
        scope: alg.scope(),
    }
}

/// Jacobi verdict with the first failing triple as witness.
#[derive(Clone, Debug)]
pub struct JacobiVerdict {
    pub passed: bool,
    pub witness: Option<(String, String, String, String)>,
}

/// Cyclic-sum check over all basis triples (the central charge column
/// participates; `X0` itself is central so its own brackets vanish).
pub fn jacobi_check(table: &StructureTable) -> JacobiVerdict {
    let n = table.dim();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let e = |x: usize| AlgebraElement::basis(n, x);
                let t1 = table.bracket(&table.bracket(&e(i), &e(j)), &e(k));
                let t2 = table.bracket(&table.bracket(&e(j), &e(k)), &e(i));
                let t3 = table.bracket(&table.bracket(&e(k), &e(i)), &e(j));
                let mut sum = vec![Expr::zero(); n + 1];
                for (s, t) in sum.iter_mut().zip(
                    t1.extended()
                        .iter()
                        .zip(t2.extended().iter().zip(t3.extended().iter()))
                        .map(|(a, (b, c))| a.add(b).add(c)),
                ) {
                    *s = t;
                }
                for comp in &sum {
                    if !matches!(zeroness(comp, &table.scope), Zeroness::Zero) {
                        if symexpr::is_zero_expr(comp, &table.scope).unwrap_or(false) {
                            continue;
                        }
                        return JacobiVerdict {
                            passed: false,
                            witness: Some((
                                table.names[i].clone(),
                                table.names[j].clone(),
                                table.names[k].clone(),
                                comp.to_string(),
                            )),
                        };
                    }
                }
            }
        }
    }
    JacobiVerdict {
        passed: true,
        witness: None,
    }
}

// ---------------------------------------------------------------------------
// Linear algebra over constant coefficients
// ---------------------------------------------------------------------------

/// Rank of a matrix of expressions, with genericity conditions.
pub fn rank(rows: &[Vec<Expr>], scope: &Scope) -> (usize, Vec<String>) {
    if rows.is_empty() {
        return (0, Vec::new());
    }
    let cols = rows[0].len();
    let (kernel, conds) = kernel_basis(rows, scope);
    (cols - kernel.len(), conds)
}

/// Does `target` lie in the span of `gens` (as extended vectors)?
pub fn in_span(gens: &[Vec<Expr>], target: &[Expr], scope: &Scope) -> bool {
    if target.iter().all(|e| e.is_zero()) {
        return true;
    }
    if gens.is_empty() {
        return false;
    }
    let (r0, _) = rank(gens, scope);
    let mut aug: Vec<Vec<Expr>> = gens.to_vec();
    aug.push(target.to_vec());
    let (r1, _) = rank(&aug, scope);
    r0 == r1
}

// ---------------------------------------------------------------------------
// Characteristic subalgebra
// ---------------------------------------------------------------------------

/// Basis of `Ker Theta ∩ Ker dTheta` over constant coefficients, plus the
/// parameter conditions assumed for the generic branch.
#[derive(Clone, Debug)]
pub struct CharacteristicSubalgebra {
    pub basis: Vec<AlgebraElement>,
    pub conditions: Vec<String>,
    pub names: Vec<String>,
}

impl CharacteristicSubalgebra {
    pub fn labels(&self) -> Vec<String> {
        self.basis.iter().map(|b| b.render(&self.names)).collect()
    }
}

/// Solve `Theta(X) = 0` and `i_X dTheta = 0` at the identity: the first
/// condition excludes the vertical direction, the second is the kernel of
/// the Lie-algebra 2-cocycle.
pub fn characteristic_subalgebra(
    table: &StructureTable,
    sigma: &[Vec<Expr>],
) -> CharacteristicSubalgebra {
    let (kern, conditions) = kernel_basis(sigma, &table.scope);
    let basis = kern
        .into_iter()
        .map(|coeffs| AlgebraElement {
            coeffs,
            vertical: Expr::zero(),
        })
        .collect();
    CharacteristicSubalgebra {
        basis,
        conditions,
        names: table.names.clone(),
    }
}

/// Characteristic subalgebra of a coordinate spec, with the cross-check
/// that the curvature route and the charge route agree at the identity.
pub fn characteristic_of_group(spec: &GroupSpec) -> Result<CharacteristicSubalgebra, LieError> {
    let table = structure_constants(spec, true)?;
    let sigma = sigma_at_identity(spec)?;
    let scope = spec.scope();
    let charge_sigma = table.sigma_matrix();
    for i in 0..table.dim() {
        for j in 0..table.dim() {
            if !equal_seeded(&sigma[i][j], &charge_sigma[i][j], &scope, crate::DEFAULT_SEED)? {
                return Err(LieError::NonClosure(
                    table.names[i].clone(),
                    table.names[j].clone(),
                    format!(
                        "Sigma routes disagree: d(theta) gives {}, charges give {}",
                        sigma[i][j], charge_sigma[i][j]
                    ),
                ));
            }
        }
    }
    Ok(characteristic_subalgebra(&table, &sigma))
}

pub fn characteristic_of_algebra(alg: &AbstractAlgebraSpec) -> CharacteristicSubalgebra {
    let table = table_from_algebra(alg);
    let sigma = table.sigma_matrix();
    characteristic_subalgebra(&table, &sigma)
}

// ---------------------------------------------------------------------------
// Polarization validation
// ---------------------------------------------------------------------------

/// One verdict flag with a human-readable detail.
#[derive(Clone, Debug)]
pub struct Flag {
    pub ok: bool,
    pub detail: String,
}

/// Validation record for a first-order polarization candidate.
#[derive(Clone, Debug)]
pub struct PolarizationVerdict {
    pub horizontal: Flag,
    pub subalgebra: Flag,
    pub maximal: Flag,
    pub full: Flag,
    pub symplectic: Flag,
    pub conditions: Vec<String>,
}

impl PolarizationVerdict {
    pub fn is_polarization(&self) -> bool {
        self.horizontal.ok && self.subalgebra.ok && self.maximal.ok
    }

    pub fn flags(&self) -> Vec<(&'static str, &Flag)> {
        vec![
            ("horizontal", &self.horizontal),
            ("subalgebra", &self.subalgebra),
            ("maximal", &self.maximal),
            ("full", &self.full),
            ("symplectic", &self.symplectic),
        ]
    }
}

/// A named set of first-order algebra elements with its verdict record.
/// The verdict is only ever attached by [`PolarizationSpec::validate`].
#[derive(Clone, Debug)]
pub struct PolarizationSpec {
    pub name: String,
    pub elements: Vec<AlgebraElement>,
    pub verdict: Option<PolarizationVerdict>,
}

impl PolarizationSpec {
    pub fn first_order(name: &str, elements: Vec<AlgebraElement>) -> PolarizationSpec {
        PolarizationSpec {
            name: name.to_string(),
            elements,
            verdict: None,
        }
    }

    /// Parse the element list and validate it in one step.
    pub fn from_source(
        name: &str,
        table: &StructureTable,
        src: &str,
    ) -> Result<PolarizationSpec, LieError> {
        Ok(Self::first_order(name, parse_elements(table, src)?))
    }

    /// Run the five-flag validation and record the verdict.
    pub fn validate(
        &mut self,
        table: &StructureTable,
        sigma: &[Vec<Expr>],
        char_basis: &[AlgebraElement],
    ) -> &PolarizationVerdict {
        let v = validate_polarization(table, sigma, char_basis, &self.elements);
        self.verdict = Some(v);
        self.verdict.as_ref().unwrap()
    }
}

/// Validate the five flags of a first-order polarization candidate against
/// a structure table and the 2-cocycle matrix.
pub fn validate_polarization(
    table: &StructureTable,
    sigma: &[Vec<Expr>],
    char_basis: &[AlgebraElement],
    elements: &[AlgebraElement],
) -> PolarizationVerdict {
    let scope = &table.scope;
    let n = table.dim();
    let mut conditions = Vec::new();

    // Horizontality: no vertical component.
    let horizontal = {
        let bad: Vec<String> = elements
            .iter()
            .enumerate()
            .filter(|(_, e)| !symexpr::is_zero_expr(&e.vertical, scope).unwrap_or(false))
            .map(|(k, _)| format!("element {k} has Theta(X) = {}", elements[k].vertical))
            .collect();
        Flag {
            ok: bad.is_empty(),
            detail: if bad.is_empty() {
                "Theta(X) = 0 for all elements".into()
            } else {
                bad.join("; ")
            },
        }
    };

    let span: Vec<Vec<Expr>> = elements.iter().map(|e| e.extended()).collect();

    // Closure under the bracket.
    let subalgebra = {
        let mut bad = Vec::new();
        for i in 0..elements.len() {
            for j in (i + 1)..elements.len() {
                let b = table.bracket(&elements[i], &elements[j]);
                if !in_span(&span, &b.extended(), scope) {
                    bad.push(format!(
                        "[e{i}, e{j}] = {} escapes the span",
                        b.render(&table.names)
                    ));
                }
            }
        }
        Flag {
            ok: bad.is_empty(),
            detail: if bad.is_empty() {
                "closed under the bracket".into()
            } else {
                bad.join("; ")
            },
        }
    };

    // Maximality: no basis direction extends the span to a larger
    // horizontal subalgebra (constant complex coefficients).
    let maximal = {
        let mut witness = None;
        'cand: for cand in 0..n {
            let cand_el = AlgebraElement::basis(n, cand);
            if in_span(&span, &cand_el.extended(), scope) {
                continue;
            }
            let mut ext = span.clone();
            ext.push(cand_el.extended());
            // closure of the extended span
            let mut all: Vec<AlgebraElement> = elements.to_vec();
            all.push(cand_el);
            for i in 0..all.len() {
                for j in (i + 1)..all.len() {
                    let b = table.bracket(&all[i], &all[j]);
                    if !in_span(&ext, &b.extended(), scope) {
                        continue 'cand;
                    }
                }
            }
            witness = Some(table.names[cand].clone());
            break;
        }
        Flag {
            ok: witness.is_none(),
            detail: match witness {
                None => "no single-generator horizontal extension closes".into(),
                Some(w) => format!("extensible by X[{w}]"),
            },
        }
    };

    // Fullness: contains the characteristic subalgebra.
    let full = {
        let missing: Vec<String> = char_basis
            .iter()
            .filter(|b| !in_span(&span, &b.extended(), scope))
            .map(|b| b.render(&table.names))
            .collect();
        Flag {
            ok: missing.is_empty(),
            detail: if missing.is_empty() {
                "contains the characteristic subalgebra".into()
            } else {
                format!("misses {}", missing.join(", "))
            },
        }
    };

    // Symplecticity: dim P - dim(P ∩ G_C) = rank(Sigma)/2.
    let symplectic = {
        let (dim_p, c1) = rank(&span, scope);
        conditions.extend(c1);
        let char_span: Vec<Vec<Expr>> = char_basis.iter().map(|b| b.extended()).collect();
        let (dim_c, _) = rank(&char_span, scope);
        let mut joint = span.clone();
        joint.extend(char_span.iter().cloned());
        let (dim_join, _) = rank(&joint, scope);
        let dim_meet = dim_p + dim_c - dim_join;
        let (sigma_rank, c2) = rank(sigma, scope);
        conditions.extend(c2);
        let ok = dim_p - dim_meet == sigma_rank / 2;
        Flag {
            ok,
            detail: format!(
                "dim P = {dim_p}, dim(P ∩ G_C) = {dim_meet}, rank Sigma = {sigma_rank}"
            ),
        }
    };

    conditions.dedup();
    PolarizationVerdict {
        horizontal,
        subalgebra,
        maximal,
        full,
        symplectic,
        conditions,
    }
}

/// Parse polarization elements like `"L_a, L_q + i*mu*L_p"` over the
/// table's generators (`L_<name>`, `X0`).
pub fn parse_elements(table: &StructureTable, src: &str) -> Result<Vec<AlgebraElement>, LieError> {
    let gen_names: Vec<String> = table
        .names
        .iter()
        .map(|n| format!("L_{n}"))
        .chain(["X0".to_string()])
        .collect();
    let mut scope = Scope::new(
        gen_names.iter().map(|n| symexpr::CoordDecl::new(n)).collect(),
        table.scope.params.clone(),
    );
    scope.params = table.scope.params.clone();
    let mut out = Vec::new();
    for part in split_top_level(src) {
        let e = symexpr::parse(&part, &scope).map_err(|err| LieError::NotConstant(err.to_string()))?;
        let coeffs = crate::group_model::linear_coefficients(&e, &gen_names)
            .map_err(LieError::NotConstant)?;
        let (vert, rest) = coeffs.split_last().expect("X0 slot present");
        out.push(AlgebraElement {
            coeffs: rest.to_vec(),
            vertical: vert.clone(),
        });
    }
    Ok(out)
}

/// Split on commas that are not nested in parentheses or brackets.
pub fn split_top_level(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in src.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push(cur.trim().to_string());
                }
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

// ---------------------------------------------------------------------------
// Pseudo-extensions
// ---------------------------------------------------------------------------

/// Result of adding the linear pseudo-cocycle with gradient `lambda0`:
/// the shifted 1-form (modulo the exact part), its exterior derivative by
/// both routes, and the redefined right fields `X^R_i + lambda0_i X0`.
#[derive(Clone, Debug)]
pub struct PseudoExtension {
    pub theta_prime: OneForm,
    pub d_theta_lambda_direct: KForm,
    pub d_theta_lambda_structure: KForm,
    pub redefined_right_fields: Vec<VectorField>,
}

/// `Theta' = Theta + lambda0_i theta^L_i` (the exact `d lambda` dropped);
/// `d Theta_lambda` computed both directly and through the Maurer-Cartan
/// relation `d theta^L_i = -1/2 C^i_jk theta^L_j ^ theta^L_k`.
pub fn pseudo_extend(spec: &GroupSpec, lambda0: &[Expr]) -> Result<PseudoExtension, LieError> {
    let duals = dual_forms(spec)?;
    let theta = invariant_calculus::quantization_form(spec)?;
    let table = structure_constants(spec, true)?;
    let n = spec.chart.dim();

    let mut theta_lambda = OneForm {
        label: "theta_lambda".into(),
        coeffs: vec![Expr::zero(); n],
        vertical: Expr::zero(),
    };
    for (i, l0) in lambda0.iter().enumerate() {
        if !l0.is_zero() {
            theta_lambda = theta_lambda.add(&duals.forms[i].scale(l0));
        }
    }
    let theta_prime = theta.add(&theta_lambda);

    let d_direct = curvature(spec, &theta_lambda);

    // Structure-constant route.
    let mut d_structure = KForm::zero(n + 1, 2);
    for (i, l0) in lambda0.iter().enumerate() {
        if l0.is_zero() {
            continue;
        }
        for j in 0..n {
            for k in 0..n {
                let cijk = &table.c[j][k][i];
                if cijk.is_zero() {
                    continue;
                }
                // The ordered double sum visits each unordered pair twice,
                // which the 1/2 in the Maurer-Cartan relation absorbs.
                let coeff = l0.mul(cijk).scale(-1, 2);
                let wedge = duals.forms[j]
                    .to_kform(n)
                    .wedge(&duals.forms[k].to_kform(n))
                    .scale(&coeff);
                d_structure = d_structure.add(&wedge);
            }
        }
    }

    let redefined_right_fields = right_fields(spec)
        .iter()
        .zip(lambda0)
        .map(|(f, l0)| {
            let mut g = f.clone();
            g.vertical = g.vertical.add(l0);
            g.label = format!("{}' ", f.label).trim().to_string();
            g
        })
        .collect();

    Ok(PseudoExtension {
        theta_prime,
        d_theta_lambda_direct: d_direct,
        d_theta_lambda_structure: d_structure,
        redefined_right_fields,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_model::{registry_get, RegistryEntry};
    use std::collections::BTreeMap;
    use crate::symexpr::parse;
    use num_rational::BigRational;

    fn group(name: &str) -> GroupSpec {
        match registry_get(name).unwrap() {
            RegistryEntry::Group(g) => g,
            _ => panic!(),
        }
    }

    fn algebra(name: &str) -> AbstractAlgebraSpec {
        match registry_get(name).unwrap() {
            RegistryEntry::Algebra(a) => a,
            _ => panic!(),
        }
    }

    fn schrodinger_pinned(k: (i64, i64)) -> AbstractAlgebraSpec {
        let mut pins = BTreeMap::new();
        pins.insert("k".to_string(), BigRational::new(k.0.into(), k.1.into()));
        algebra("schrodinger-algebra").with_pins(&pins)
    }

    #[test]
    fn hw_structure_constants() {
        let spec = group("heisenberg-weyl");
        let t = structure_constants(&spec, true).unwrap();
        let scope = spec.scope();
        // [q, p] = -(1/hbar) X0, all C^k zero
        let want = parse("-1/hbar", &scope).unwrap();
        assert!(equal_seeded(&t.charge[0][1], &want, &scope, 5).unwrap());
        for k in 0..3 {
            assert!(t.c[0][1][k].is_zero());
        }
        // left constants are minus the right constants
        let tr = structure_constants(&spec, false).unwrap();
        assert!(equal_seeded(&tr.charge[0][1], &want.neg(), &scope, 5).unwrap());
        assert!(jacobi_check(&t).passed);
    }

    #[test]
    fn oscillator_right_bracket_table() {
        let spec = group("harmonic-oscillator");
        let t = structure_constants(&spec, false).unwrap();
        let scope = spec.scope();
        // [X^R_t, X^R_x] = -m omega^2 X^R_p
        let ip = t.index_of("p").unwrap();
        let want = parse("-m*omega^2", &scope).unwrap();
        assert!(equal_seeded(&t.c[0][1][ip], &want, &scope, 5).unwrap());
        // [X^R_t, X^R_p] = (1/m) X^R_x
        let ix = t.index_of("x").unwrap();
        let want = parse("1/m", &scope).unwrap();
        assert!(equal_seeded(&t.c[0][2][ix], &want, &scope, 5).unwrap());
        // [X^R_x, X^R_p] = -(1/hbar) X0
        let want = parse("-1/hbar", &scope).unwrap();
        assert!(equal_seeded(&t.charge[1][2], &want, &scope, 5).unwrap());
        assert!(jacobi_check(&t).passed);
    }

    #[test]
    fn su2_commutator_table() {
        let spec = group("su2");
        let t = structure_constants(&spec, true).unwrap();
        let scope = spec.scope();
        let (iphi, ic, ics) = (0, 1, 2);
        // [X_eta, X_c] = -2i X_c
        assert!(equal_seeded(
            &t.c[iphi][ic][ic],
            &parse("-2*i", &scope).unwrap(),
            &scope,
            5
        )
        .unwrap());
        // [X_c, X_cs] = -i X_eta - 2ij X0
        assert!(equal_seeded(&t.c[ic][ics][iphi], &parse("-i", &scope).unwrap(), &scope, 5).unwrap());
        assert!(
            equal_seeded(&t.charge[ic][ics], &parse("-2*i*j", &scope).unwrap(), &scope, 5).unwrap()
        );
        assert!(jacobi_check(&t).passed);
    }

    #[test]
    fn jacobi_detects_corruption() {
        let alg = algebra("schrodinger-algebra");
        let t = table_from_algebra(&alg);
        assert!(jacobi_check(&t).passed);
        // corrupt [x, v] = m Z into m X_t
        let mut bad = t.clone();
        let ix = bad.index_of("x").unwrap();
        let iv = bad.index_of("v").unwrap();
        let it = bad.index_of("t").unwrap();
        bad.charge[ix][iv] = Expr::zero();
        bad.charge[iv][ix] = Expr::zero();
        bad.c[ix][iv][it] = Expr::param("m");
        bad.c[iv][ix][it] = Expr::param("m").neg();
        let verdict = jacobi_check(&bad);
        assert!(!verdict.passed);
        assert!(verdict.witness.is_some());
    }

    #[test]
    fn characteristic_subalgebras() {
        // H-W: span{X_a}
        let hw = characteristic_of_group(&group("heisenberg-weyl")).unwrap();
        assert_eq!(hw.labels(), vec!["X[a]"]);
        // oscillator: span{X_t}
        let osc = characteristic_of_group(&group("harmonic-oscillator")).unwrap();
        assert_eq!(osc.labels(), vec!["X[t]"]);
        // SU(2) generic j: span{X_eta} with the j != 0 condition recorded
        let su2 = characteristic_of_group(&group("su2")).unwrap();
        assert_eq!(su2.labels(), vec!["X[phi]"]);
        assert!(!su2.conditions.is_empty());
        // Schrödinger at k = 0: {t, a, c}; generic k: {a}
        let k0 = characteristic_of_algebra(&schrodinger_pinned((0, 1)));
        let mut labels = k0.labels();
        labels.sort();
        assert_eq!(labels, vec!["X[a]", "X[c]", "X[t]"]);
        let generic = characteristic_of_algebra(&algebra("schrodinger-algebra"));
        assert_eq!(generic.labels(), vec!["X[a]"]);
        assert!(!generic.conditions.is_empty());
        let kq = characteristic_of_algebra(&schrodinger_pinned((1, 4)));
        assert_eq!(kq.labels(), vec!["X[a]"]);
    }

    #[test]
    fn characteristic_subalgebra_is_closed() {
        // Ker Theta ∩ Ker dTheta is a Lie algebra: bracket of basis
        // elements stays in the span (plus nothing vertical).
        let alg = schrodinger_pinned((0, 1));
        let table = table_from_algebra(&alg);
        let chars = characteristic_of_algebra(&alg);
        let span: Vec<Vec<Expr>> = chars.basis.iter().map(|b| b.extended()).collect();
        for x in &chars.basis {
            for y in &chars.basis {
                let b = table.bracket(x, y);
                assert!(in_span(&span, &b.extended(), &table.scope));
            }
        }
    }

    #[test]
    fn hw_polarization_verdicts() {
        let spec = group("heisenberg-weyl");
        let table = structure_constants(&spec, true).unwrap();
        let sigma = sigma_at_identity(&spec).unwrap();
        let chars = characteristic_of_group(&spec).unwrap();
        // P_q = {X_a, X_p}: horizontal, closed, maximal, full, symplectic
        let p = parse_elements(&table, "L_a, L_p").unwrap();
        let v = validate_polarization(&table, &sigma, &chars.basis, &p);
        assert!(v.horizontal.ok && v.subalgebra.ok && v.maximal.ok && v.full.ok && v.symplectic.ok);
        // the complex polarization {X_a, X_q + i mu X_p} is full + symplectic
        let pc = parse_elements(&table, "L_a, L_q + i*mu*L_p").unwrap();
        let v = validate_polarization(&table, &sigma, &chars.basis, &pc);
        assert!(v.horizontal.ok && v.subalgebra.ok && v.maximal.ok && v.full.ok && v.symplectic.ok);
        // {X_a} alone is not maximal; {X_q, X_p} is not a subalgebra mod span
        let small = parse_elements(&table, "L_a").unwrap();
        let v = validate_polarization(&table, &sigma, &chars.basis, &small);
        assert!(!v.maximal.ok);
        let qp = parse_elements(&table, "L_q, L_p").unwrap();
        let v = validate_polarization(&table, &sigma, &chars.basis, &qp);
        assert!(!v.subalgebra.ok);
        // non-horizontal example
        let nh = parse_elements(&table, "L_a, L_p + X0").unwrap();
        let v = validate_polarization(&table, &sigma, &chars.basis, &nh);
        assert!(!v.horizontal.ok);
    }

    #[test]
    fn su2_polarization_is_full_and_symplectic() {
        let spec = group("su2");
        let table = structure_constants(&spec, true).unwrap();
        let sigma = sigma_at_identity(&spec).unwrap();
        let chars = characteristic_of_group(&spec).unwrap();
        let p = parse_elements(&table, "L_phi, L_cs").unwrap();
        let v = validate_polarization(&table, &sigma, &chars.basis, &p);
        assert!(v.horizontal.ok && v.subalgebra.ok && v.maximal.ok, "{v:?}");
        assert!(v.full.ok && v.symplectic.ok, "{v:?}");
    }

    #[test]
    fn schrodinger_polarization_verdicts() {
        // k = 0: P = {t,a,x} symplectic but not full; P_C = {t,a,c} full
        // but not symplectic.
        let alg = schrodinger_pinned((0, 1));
        let table = table_from_algebra(&alg);
        let sigma = table.sigma_matrix();
        let chars = characteristic_of_algebra(&alg);
        let p = parse_elements(&table, "L_t, L_a, L_x").unwrap();
        let v = validate_polarization(&table, &sigma, &chars.basis, &p);
        assert!(v.horizontal.ok && v.subalgebra.ok && v.maximal.ok, "{v:?}");
        assert!(v.symplectic.ok && !v.full.ok, "{v:?}");
        let pc = parse_elements(&table, "L_t, L_a, L_c").unwrap();
        let v = validate_polarization(&table, &sigma, &chars.basis, &pc);
        assert!(v.horizontal.ok && v.subalgebra.ok && v.maximal.ok, "{v:?}");
        assert!(v.full.ok && !v.symplectic.ok, "{v:?}");
        // generic k: {t,a,x} becomes full and symplectic
        let alg = algebra("schrodinger-algebra");
        let table = table_from_algebra(&alg);
        let sigma = table.sigma_matrix();
        let chars = characteristic_of_algebra(&alg);
        let p = parse_elements(&table, "L_t, L_a, L_x").unwrap();
        let v = validate_polarization(&table, &sigma, &chars.basis, &p);
        assert!(v.full.ok && v.symplectic.ok, "{v:?}");
    }

    #[test]
    fn polarization_spec_records_verdict() {
        let spec = group("heisenberg-weyl");
        let table = structure_constants(&spec, true).unwrap();
        let sigma = sigma_at_identity(&spec).unwrap();
        let chars = characteristic_of_group(&spec).unwrap();
        let mut p = PolarizationSpec::from_source("Pq", &table, "L_a, L_p").unwrap();
        assert!(p.verdict.is_none());
        p.validate(&table, &sigma, &chars.basis);
        let v = p.verdict.as_ref().unwrap();
        assert!(v.is_polarization() && v.full.ok && v.symplectic.ok);
    }

    #[test]
    fn isotropy_of_validated_polarizations() {
        // Sigma(X, Y) = 0 on any horizontal subalgebra (generalized
        // Lagrange bracket vanishes).
        let spec = group("heisenberg-weyl");
        let table = structure_constants(&spec, true).unwrap();
        let sigma = sigma_at_identity(&spec).unwrap();
        let p = parse_elements(&table, "L_a, L_p").unwrap();
        let scope = spec.scope();
        for x in &p {
            for y in &p {
                let mut s = Expr::zero();
                for i in 0..table.dim() {
                    for j in 0..table.dim() {
                        s = s.add(&x.coeffs[i].mul(&y.coeffs[j]).mul(&sigma[i][j]));
                    }
                }
                assert!(symexpr::is_zero_expr(&s, &scope).unwrap());
            }
        }
    }

    #[test]
    fn pseudo_extension_reproduces_su2_theta() {
        // Start from the direct product SU(2) x U(1) (zero cocycle) and
        // add the gradient lambda0_eta = 2j: modulo an exact term this is
        // the registry Theta, and the curvatures agree.
        let su2 = group("su2");
        let mut trivial = su2.clone();
        trivial.cocycle = Expr::zero();
        let lambda0 = vec![
            Expr::param("j").scale(2, 1),
            Expr::zero(),
            Expr::zero(),
        ];
        let ext = pseudo_extend(&trivial, &lambda0).unwrap();
        // two-route d Theta_lambda comparison
        let scope = su2.extended_scope();
        for (idx, e) in &ext.d_theta_lambda_direct.comps {
            let other = ext.d_theta_lambda_structure.component(idx);
            assert!(equal_seeded(e, &other, &scope, 9).unwrap(), "at {idx:?}");
        }
        // d(Theta') equals the registry curvature
        let registry_theta = invariant_calculus::quantization_form(&su2).unwrap();
        let d_reg = curvature(&su2, &registry_theta);
        let d_ext = curvature(&trivial, &ext.theta_prime);
        for (idx, e) in &d_reg.comps {
            assert!(
                equal_seeded(e, &d_ext.component(idx), &scope, 9).unwrap(),
                "curvature mismatch at {idx:?}"
            );
        }
        // the difference Theta' - Theta_registry is closed (locally exact)
        let diff = ext
            .theta_prime
            .add(&registry_theta.scale(&Expr::int(-1)));
        let d_diff = curvature(&su2, &diff);
        assert!(d_diff.is_zero() || {
            d_diff
                .comps
                .values()
                .all(|e| symexpr::is_zero_expr(e, &scope).unwrap_or(false))
        });
        // lambda0 = 0 keeps Theta
        let ext0 = pseudo_extend(&su2, &[Expr::zero(), Expr::zero(), Expr::zero()]).unwrap();
        for (a, b) in ext0.theta_prime.coeffs.iter().zip(&registry_theta.coeffs) {
            assert!(equal_seeded(a, b, &scope, 9).unwrap());
        }
        // redefined right field picks up 2j X0
        let rf = right_fields(&su2);
        let ext_reg = pseudo_extend(&su2, &lambda0).unwrap();
        let shifted = &ext_reg.redefined_right_fields[0];
        let want = rf[0].vertical.add(&Expr::param("j").scale(2, 1));
        assert!(equal_seeded(&shifted.vertical, &want, &scope, 9).unwrap());
    }
}
