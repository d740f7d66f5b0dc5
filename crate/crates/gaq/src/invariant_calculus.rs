//! Invariant calculus on a centrally extended group: left/right fields,
//! dual 1-forms, the quantization 1-form and its curvature, Noether
//! invariants, the symplectic normal form at the identity, and measures.
//!
//! Conventions: the extended chart is `(g^1..g^n, phi)` with the fibre
//! angle last; a vector field stores one coefficient per chart coordinate
//! plus the vertical `d/dphi` component, and dually for 1-forms. The
//! unscaled connection `theta_hat` satisfies `theta_hat(X0) = 1`; the
//! published form is `Theta = kappa * theta_hat` with `kappa` the spec's
//! declared convention factor.

use crate::group_model::GroupSpec;
use crate::symexpr::{self, equal_seeded, zeroness, Expr, Scope, Zeroness};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CalcError {
    #[error("coefficient matrix is singular: {0}")]
    Singular(String),
    #[error("quantization 1-form cross-check failed at d{coord}: direct route {direct}, dual route {dual}")]
    ThetaCrossCheck {
        coord: String,
        direct: String,
        dual: String,
    },
    #[error("{0} is not constant at the identity: {1}")]
    NotConstant(String, String),
    #[error("symbolic engine: {0}")]
    Sym(#[from] symexpr::SymError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldTag {
    Left,
    Right,
    Vertical,
    Generic,
}

/// Vector field over the extended chart.
#[derive(Clone, Debug)]
pub struct VectorField {
    /// Generator label (coordinate name for invariant fields).
    pub label: String,
    pub coeffs: Vec<Expr>,
    pub vertical: Expr,
    pub tag: FieldTag,
}

impl VectorField {
    pub fn vertical_field(label: &str, dim: usize) -> VectorField {
        VectorField {
            label: label.to_string(),
            coeffs: vec![Expr::zero(); dim],
            vertical: Expr::one(),
            tag: FieldTag::Vertical,
        }
    }

    pub fn zero(dim: usize) -> VectorField {
        VectorField {
            label: String::new(),
            coeffs: vec![Expr::zero(); dim],
            vertical: Expr::zero(),
            tag: FieldTag::Generic,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vertical.is_zero() && self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, c: &Expr) -> VectorField {
        VectorField {
            label: self.label.clone(),
            coeffs: self.coeffs.iter().map(|e| e.mul(c)).collect(),
            vertical: self.vertical.mul(c),
            tag: FieldTag::Generic,
        }
    }

    pub fn add(&self, rhs: &VectorField) -> VectorField {
        VectorField {
            label: String::new(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
            vertical: self.vertical.add(&rhs.vertical),
            tag: FieldTag::Generic,
        }
    }

    /// Apply as a first-order differential operator.
    pub fn apply(&self, spec: &GroupSpec, e: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (k, c) in spec.chart.names().iter().enumerate() {
            if !self.coeffs[k].is_zero() {
                out = out.add(&self.coeffs[k].mul(&e.diff(c)));
            }
        }
        if !self.vertical.is_zero() {
            out = out.add(&self.vertical.mul(&e.diff(&spec.chart.fibre)));
        }
        out
    }

    /// Extended coefficient vector (coords then vertical slot).
    pub fn extended(&self) -> Vec<Expr> {
        let mut v = self.coeffs.clone();
        v.push(self.vertical.clone());
        v
    }

    /// Coefficients at the group identity.
    pub fn at_identity(&self, spec: &GroupSpec) -> Vec<Expr> {
        let map = identity_map(spec);
        let mut v: Vec<Expr> = self.coeffs.iter().map(|e| e.subst_raw(&map)).collect();
        v.push(self.vertical.subst_raw(&map));
        v
    }

    pub fn render(&self, spec: &GroupSpec) -> String {
        let mut parts = Vec::new();
        for (k, c) in spec.chart.names().iter().enumerate() {
            if !self.coeffs[k].is_zero() {
                parts.push(format!("({}) d/d{}", self.coeffs[k], c));
            }
        }
        if !self.vertical.is_zero() {
            parts.push(format!("({}) X0", self.vertical));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// 1-form over the extended chart (`vertical` is the `dphi` coefficient).
#[derive(Clone, Debug)]
pub struct OneForm {
    pub label: String,
    pub coeffs: Vec<Expr>,
    pub vertical: Expr,
}

impl OneForm {
    pub fn pair(&self, x: &VectorField) -> Expr {
        let mut out = self.vertical.mul(&x.vertical);
        for (a, b) in self.coeffs.iter().zip(&x.coeffs) {
            out = out.add(&a.mul(b));
        }
        out.normalize()
    }

    pub fn scale(&self, c: &Expr) -> OneForm {
        OneForm {
            label: self.label.clone(),
            coeffs: self.coeffs.iter().map(|e| e.mul(c)).collect(),
            vertical: self.vertical.mul(c),
        }
    }

    pub fn add(&self, rhs: &OneForm) -> OneForm {
        OneForm {
            label: String::new(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
            vertical: self.vertical.add(&rhs.vertical),
        }
    }

    pub fn to_kform(&self, dim: usize) -> KForm {
        let mut comps = BTreeMap::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                comps.insert(vec![k], c.clone());
            }
        }
        if !self.vertical.is_zero() {
            comps.insert(vec![dim], self.vertical.clone());
        }
        KForm {
            dim: dim + 1,
            degree: 1,
            comps,
        }
    }

    pub fn render(&self, spec: &GroupSpec) -> String {
        let mut parts = Vec::new();
        if !self.vertical.is_zero() {
            parts.push(format!("({}) d{}", self.vertical, spec.chart.fibre));
        }
        for (k, c) in spec.chart.names().iter().enumerate() {
            if !self.coeffs[k].is_zero() {
                parts.push(format!("({}) d{}", self.coeffs[k], c));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// Exterior form of arbitrary degree over the extended chart; components
/// live on strictly increasing index tuples, the fibre slot is `dim - 1`.
#[derive(Clone, Debug)]
pub struct KForm {
    pub dim: usize,
    pub degree: usize,
    pub comps: BTreeMap<Vec<usize>, Expr>,
}

/// A `TwoForm` is the antisymmetric coefficient table of a degree-2 form.
pub type TwoForm = KForm;

impl KForm {
    pub fn zero(dim: usize, degree: usize) -> KForm {
        KForm {
            dim,
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|e| e.is_zero())
    }

    fn insert(&mut self, idx: Vec<usize>, e: Expr) {
        if e.is_zero() {
            return;
        }
        let cur = self.comps.remove(&idx).unwrap_or_else(Expr::zero);
        let sum = cur.add(&e);
        if !sum.is_zero() {
            self.comps.insert(idx, sum);
        }
    }

    /// Antisymmetric component lookup for an arbitrary index tuple.
    pub fn component(&self, idx: &[usize]) -> Expr {
        let mut sorted: Vec<usize> = idx.to_vec();
        let sign = sort_sign(&mut sorted);
        if sign == 0 {
            return Expr::zero();
        }
        match self.comps.get(&sorted) {
            None => Expr::zero(),
            Some(e) => {
                if sign > 0 {
                    e.clone()
                } else {
                    e.neg()
                }
            }
        }
    }

    pub fn add(&self, rhs: &KForm) -> KForm {
        let mut out = self.clone();
        for (idx, e) in &rhs.comps {
            out.insert(idx.clone(), e.clone());
        }
        out
    }

    pub fn scale(&self, c: &Expr) -> KForm {
        KForm {
            dim: self.dim,
            degree: self.degree,
            comps: self
                .comps
                .iter()
                .map(|(k, e)| (k.clone(), e.mul(c)))
                .collect(),
        }
    }

    pub fn wedge(&self, rhs: &KForm) -> KForm {
        let mut out = KForm::zero(self.dim, self.degree + rhs.degree);
        for (ia, ea) in &self.comps {
            for (ib, eb) in &rhs.comps {
                let mut idx: Vec<usize> = ia.iter().chain(ib.iter()).copied().collect();
                let sign = sort_sign(&mut idx);
                if sign == 0 {
                    continue;
                }
                let term = ea.mul(eb);
                out.insert(idx, if sign > 0 { term } else { term.neg() });
            }
        }
        out
    }

    pub fn exterior_derivative(&self, coord_names: &[String], fibre: &str) -> KForm {
        let mut out = KForm::zero(self.dim, self.degree + 1);
        let name_of = |k: usize| -> &str {
            if k + 1 == self.dim {
                fibre
            } else {
                &coord_names[k]
            }
        };
        for (idx, e) in &self.comps {
            for k in 0..self.dim {
                if idx.contains(&k) {
                    continue;
                }
                let de = e.diff(name_of(k));
                if de.is_zero() {
                    continue;
                }
                let mut full = vec![k];
                full.extend(idx.iter().copied());
                let sign = sort_sign(&mut full);
                out.insert(full, if sign > 0 { de } else { de.neg() });
            }
        }
        out
    }

    /// Interior product with an extended coefficient vector.
    pub fn interior(&self, x: &[Expr]) -> KForm {
        let mut out = KForm::zero(self.dim, self.degree.saturating_sub(1));
        for (idx, e) in &self.comps {
            for (pos, &a) in idx.iter().enumerate() {
                if x[a].is_zero() {
                    continue;
                }
                let rest: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != pos)
                    .map(|(_, &i)| i)
                    .collect();
                let term = x[a].mul(e);
                out.insert(rest, if pos % 2 == 0 { term } else { term.neg() });
            }
        }
        out
    }

    pub fn render(&self, spec: &GroupSpec) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let names: Vec<String> = spec
            .chart
            .names()
            .into_iter()
            .chain([spec.chart.fibre.clone()])
            .collect();
        self.comps
            .iter()
            .map(|(idx, e)| {
                let wedge = idx
                    .iter()
                    .map(|&k| format!("d{}", names[k]))
                    .collect::<Vec<_>>()
                    .join("^");
                format!("({e}) {wedge}")
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn sort_sign(idx: &mut Vec<usize>) -> i32 {
    let mut sign = 1;
    let n = idx.len();
    for i in 0..n {
        for j in 0..n.saturating_sub(1 + i) {
            match idx[j].cmp(&idx[j + 1]) {
                std::cmp::Ordering::Greater => {
                    idx.swap(j, j + 1);
                    sign = -sign;
                }
                std::cmp::Ordering::Equal => return 0,
                _ => {}
            }
        }
    }
    for w in idx.windows(2) {
        if w[0] == w[1] {
            return 0;
        }
    }
    sign
}

fn identity_map(spec: &GroupSpec) -> BTreeMap<String, Expr> {
    spec.chart
        .names()
        .into_iter()
        .zip(spec.identity.iter().cloned())
        .collect()
}

// ---------------------------------------------------------------------------
// Invariant vector fields
// ---------------------------------------------------------------------------

/// Left-invariant fields `X^L_i` (generators of right translations):
/// differentiate the law in the second slot at the identity, rename the
/// live first slot back to the chart. The vertical component comes from
/// the cocycle gradient.
pub fn left_fields(spec: &GroupSpec) -> Vec<VectorField> {
    invariant_fields(spec, true)
}

/// Right-invariant fields: first slot differentiated at the identity.
pub fn right_fields(spec: &GroupSpec) -> Vec<VectorField> {
    invariant_fields(spec, false)
}

/// The vertical (fundamental) field `X0 = d/dphi`.
pub fn vertical_field(spec: &GroupSpec) -> VectorField {
    VectorField::vertical_field("X0", spec.chart.dim())
}

fn invariant_fields(spec: &GroupSpec, left: bool) -> Vec<VectorField> {
    let names = spec.chart.names();
    let id_map = identity_map(spec);
    let (kill_map, rename): (BTreeMap<String, Expr>, BTreeMap<String, Expr>) = if left {
        (
            id_map.clone(),
            names
                .iter()
                .map(|n| (symexpr::primed(n), Expr::coord(n)))
                .collect(),
        )
    } else {
        (
            names
                .iter()
                .map(|n| {
                    (
                        symexpr::primed(n),
                        id_map.get(n).cloned().unwrap_or_else(Expr::zero),
                    )
                })
                .collect(),
            BTreeMap::new(),
        )
    };

    let mut out = Vec::new();
    for gen in &names {
        let dn = if left {
            gen.clone()
        } else {
            symexpr::primed(gen)
        };
        let project = |e: &Expr| -> Expr {
            let d = e.diff(&dn).subst_raw(&kill_map);
            if rename.is_empty() {
                d
            } else {
                d.subst_raw(&rename)
            }
        };
        out.push(VectorField {
            label: gen.clone(),
            coeffs: spec.law.iter().map(&project).collect(),
            vertical: project(&spec.cocycle),
            tag: if left { FieldTag::Left } else { FieldTag::Right },
        });
    }
    out
}

/// Coefficient-wise Lie bracket `[X, Y]`, including the vertical slot.
pub fn field_commutator(spec: &GroupSpec, x: &VectorField, y: &VectorField) -> VectorField {
    let n = spec.chart.dim();
    let mut coeffs = Vec::with_capacity(n);
    for k in 0..n {
        coeffs.push(
            x.apply(spec, &y.coeffs[k])
                .sub(&y.apply(spec, &x.coeffs[k])),
        );
    }
    let vertical = x.apply(spec, &y.vertical).sub(&y.apply(spec, &x.vertical));
    VectorField {
        label: format!("[{},{}]", x.label, y.label),
        coeffs,
        vertical,
        tag: FieldTag::Generic,
    }
}

/// Lie derivative via Cartan's identity `L_X w = i_X dw + d(i_X w)`.
pub fn lie_derivative(spec: &GroupSpec, x: &VectorField, w: &KForm) -> KForm {
    let names = spec.chart.names();
    let fibre = &spec.chart.fibre;
    let xe = x.extended();
    let a = w.exterior_derivative(&names, fibre).interior(&xe);
    let b = w.interior(&xe).exterior_derivative(&names, fibre);
    a.add(&b)
}

// ---------------------------------------------------------------------------
// Dual forms and the quantization 1-form
// ---------------------------------------------------------------------------

/// Dual coframe: the coordinate 1-forms dual to the `X^L_i`, the unscaled
/// connection (fibre row), and any genericity conditions assumed while
/// pivoting.
#[derive(Clone, Debug)]
pub struct DualForms {
    pub forms: Vec<OneForm>,
    pub theta_hat: OneForm,
    pub conditions: Vec<String>,
}

/// Invert the extended coefficient matrix of the left fields.
pub fn dual_forms(spec: &GroupSpec) -> Result<DualForms, CalcError> {
    let fields = left_fields(spec);
    let scope = spec.extended_scope();
    let n = spec.chart.dim();
    let a: Vec<Vec<Expr>> = fields.iter().map(|f| f.coeffs.clone()).collect();
    let (a_inv, conditions) = invert(&a, &scope)?;
    let mut forms = Vec::new();
    for (gi, f) in fields.iter().enumerate() {
        let coeffs: Vec<Expr> = (0..n).map(|j| a_inv[j][gi].clone()).collect();
        forms.push(OneForm {
            label: f.label.clone(),
            coeffs,
            vertical: Expr::zero(),
        });
    }
    // Fibre row: dphi - sum_j (A^{-1} v)_j dx^j annihilates every X^L and
    // pays 1 on X0.
    let mut theta_coeffs = Vec::new();
    for j in 0..n {
        let mut s = Expr::zero();
        for (k, f) in fields.iter().enumerate() {
            s = s.add(&a_inv[j][k].mul(&f.vertical));
        }
        theta_coeffs.push(s.neg().normalize());
    }
    let theta_hat = OneForm {
        label: "theta_hat".into(),
        coeffs: theta_coeffs,
        vertical: Expr::one(),
    };
    Ok(DualForms {
        forms,
        theta_hat,
        conditions,
    })
}

/// Gauss-Jordan inverse over expressions; conditional pivots are assumed
/// nonzero and recorded (chart-locus conditions such as `1 + c*cs != 0`).
fn invert(m: &[Vec<Expr>], scope: &Scope) -> Result<(Vec<Vec<Expr>>, Vec<String>), CalcError> {
    let n = m.len();
    let mut a: Vec<Vec<Expr>> = m.to_vec();
    let mut inv: Vec<Vec<Expr>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Expr::one() } else { Expr::zero() })
                .collect()
        })
        .collect();
    let mut conditions = Vec::new();
    for col in 0..n {
        let mut pivot = None;
        for row in col..n {
            match zeroness(&a[row][col], scope) {
                Zeroness::NonZero => {
                    pivot = Some(row);
                    break;
                }
                Zeroness::Conditional(_) if pivot.is_none() => pivot = Some(row),
                _ => {}
            }
        }
        let row = pivot.ok_or_else(|| CalcError::Singular(format!("no pivot in column {col}")))?;
        if let Zeroness::Conditional(cond) = zeroness(&a[row][col], scope) {
            conditions.push(cond);
        }
        a.swap(col, row);
        inv.swap(col, row);
        let pinv = Expr::one().div(&a[col][col].clone());
        for j in 0..n {
            a[col][j] = a[col][j].mul(&pinv).normalize();
            inv[col][j] = inv[col][j].mul(&pinv).normalize();
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..n {
                a[r][j] = a[r][j].sub(&f.mul(&a[col][j])).normalize();
                inv[r][j] = inv[r][j].sub(&f.mul(&inv[col][j])).normalize();
            }
        }
    }
    Ok((inv, conditions))
}

/// Null-space basis of a matrix over expressions (row-major), plus the
/// genericity conditions taken while pivoting.
pub fn kernel_basis(m: &[Vec<Expr>], scope: &Scope) -> (Vec<Vec<Expr>>, Vec<String>) {
    if m.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut a: Vec<Vec<Expr>> = m.to_vec();
    let mut conditions = Vec::new();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut pv = None;
        for row in r..rows {
            match zeroness(&a[row][c], scope) {
                Zeroness::NonZero => {
                    pv = Some(row);
                    break;
                }
                Zeroness::Conditional(_) if pv.is_none() => pv = Some(row),
                _ => {}
            }
        }
        let Some(row) = pv else { continue };
        if let Zeroness::Conditional(cond) = zeroness(&a[row][c], scope) {
            conditions.push(cond);
        }
        a.swap(r, row);
        let pinv = Expr::one().div(&a[r][c].clone());
        for j in 0..cols {
            a[r][j] = a[r][j].mul(&pinv).normalize();
        }
        for row in 0..rows {
            if row == r {
                continue;
            }
            let f = a[row][c].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..cols {
                a[row][j] = a[row][j].sub(&f.mul(&a[r][j])).normalize();
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Expr::zero(); cols];
        v[free] = Expr::one();
        for (pr, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = a[pr][free].neg();
        }
        basis.push(v);
    }
    (basis, conditions)
}

/// The quantization 1-form `Theta = kappa * theta_hat`, from the cocycle
/// gradient at `g' = g^{-1}`, cross-checked against the fibre row of the
/// dual coframe.
pub fn quantization_form(spec: &GroupSpec) -> Result<OneForm, CalcError> {
    Ok(connection_form(spec)?.scale(&spec.theta_factor))
}

/// Unscaled connection (`theta_hat(X0) = 1`).
pub fn connection_form(spec: &GroupSpec) -> Result<OneForm, CalcError> {
    let names = spec.chart.names();
    let inverse_map: BTreeMap<String, Expr> = names
        .iter()
        .enumerate()
        .map(|(k, n)| (symexpr::primed(n), spec.inverse[k].clone()))
        .collect();
    let mut coeffs = Vec::new();
    for n in &names {
        coeffs.push(spec.cocycle.diff(n).subst_raw(&inverse_map).normalize());
    }
    let direct = OneForm {
        label: "theta_hat".into(),
        coeffs,
        vertical: Expr::one(),
    };
    let duals = dual_forms(spec)?;
    let scope = spec.extended_scope();
    for (k, n) in names.iter().enumerate() {
        let ok = equal_seeded(
            &direct.coeffs[k],
            &duals.theta_hat.coeffs[k],
            &scope,
            crate::DEFAULT_SEED,
        )?;
        if !ok {
            return Err(CalcError::ThetaCrossCheck {
                coord: n.clone(),
                direct: direct.coeffs[k].to_string(),
                dual: duals.theta_hat.coeffs[k].to_string(),
            });
        }
    }
    Ok(direct)
}

/// `Sigma = d w` for a 1-form.
pub fn curvature(spec: &GroupSpec, w: &OneForm) -> TwoForm {
    w.to_kform(spec.chart.dim())
        .exterior_derivative(&spec.chart.names(), &spec.chart.fibre)
}

/// Noether invariants `F_i = i_{X^R_i} Theta` plus the vertical pairing
/// (the convention factor).
pub fn noether_invariants(spec: &GroupSpec) -> Result<Vec<(String, Expr)>, CalcError> {
    let theta = quantization_form(spec)?;
    let mut out = Vec::new();
    for f in right_fields(spec) {
        out.push((f.label.clone(), theta.pair(&f)));
    }
    out.push(("X0".to_string(), theta.pair(&vertical_field(spec))));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Symplectic normal form at the identity
// ---------------------------------------------------------------------------

/// A Darboux pair: basis combinations `a`, `b` over the left basis with
/// `Sigma(a, b) = nu`.
#[derive(Clone, Debug)]
pub struct DarbouxPair {
    pub a: Vec<Expr>,
    pub b: Vec<Expr>,
    pub nu: Expr,
}

/// Normal form of the Lie-algebra 2-cocycle `Sigma|_e`.
#[derive(Clone, Debug)]
pub struct SigmaNormalForm {
    pub basis_labels: Vec<String>,
    pub pairs: Vec<DarbouxPair>,
    pub kernel: Vec<Vec<Expr>>,
    pub conditions: Vec<String>,
}

impl SigmaNormalForm {
    pub fn rank(&self) -> usize {
        2 * self.pairs.len()
    }

    pub fn combo(&self, v: &[Expr]) -> String {
        let mut parts = Vec::new();
        for (k, c) in v.iter().enumerate() {
            if !c.is_zero() {
                if c.is_one() {
                    parts.push(self.basis_labels[k].clone());
                } else {
                    parts.push(format!("({})*{}", c, self.basis_labels[k]));
                }
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// `J = sum over pairs of theta^b (x) X_a - theta^a (x) X_b`.
    pub fn j_tensor(&self) -> String {
        if self.pairs.is_empty() {
            return "0".into();
        }
        self.pairs
            .iter()
            .map(|p| {
                format!(
                    "theta^L[{b}] (x) X^L[{a}] - theta^L[{a}] (x) X^L[{b}]",
                    a = self.combo(&p.a),
                    b = self.combo(&p.b)
                )
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn kernel_labels(&self) -> Vec<String> {
        self.kernel.iter().map(|v| self.combo(v)).collect()
    }

    pub fn pair_labels(&self) -> Vec<(String, String, String)> {
        self.pairs
            .iter()
            .map(|p| (self.combo(&p.a), self.combo(&p.b), p.nu.to_string()))
            .collect()
    }
}

/// `Sigma|_e` over the left basis: entries are parameter expressions.
pub fn sigma_at_identity(spec: &GroupSpec) -> Result<Vec<Vec<Expr>>, CalcError> {
    let theta_hat = connection_form(spec)?;
    let sigma = curvature(spec, &theta_hat);
    let n = spec.chart.dim();
    let id_map = identity_map(spec);
    let mut m = vec![vec![Expr::zero(); n]; n];
    // At the identity the left fields reduce to coordinate directions, so
    // the matrix is the coordinate block of d theta_hat evaluated at e.
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let e = sigma.component(&[i, j]).subst_raw(&id_map).normalize();
            if !e.free_coords().is_empty() {
                return Err(CalcError::NotConstant(
                    format!("Sigma[{i},{j}]"),
                    e.to_string(),
                ));
            }
            m[i][j] = e;
        }
    }
    Ok(m)
}

/// Symplectic Gram-Schmidt over the left coframe, preserving chart order
/// so the reported `J` matches the conventional tables.
pub fn sigma_normal_form(spec: &GroupSpec) -> Result<SigmaNormalForm, CalcError> {
    let m = sigma_at_identity(spec)?;
    let scope = spec.scope();
    Ok(darboux_from_matrix(&m, spec.chart.names(), &scope))
}

/// Darboux reduction of an antisymmetric expression matrix.
pub fn darboux_from_matrix(
    m: &[Vec<Expr>],
    basis_labels: Vec<String>,
    scope: &Scope,
) -> SigmaNormalForm {
    let n = basis_labels.len();
    let pairing = |x: &[Expr], y: &[Expr]| -> Expr {
        let mut s = Expr::zero();
        for i in 0..n {
            for j in 0..n {
                if !m[i][j].is_zero() {
                    s = s.add(&x[i].mul(&y[j]).mul(&m[i][j]));
                }
            }
        }
        s.normalize()
    };
    let mut active: Vec<Vec<Expr>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Expr::one() } else { Expr::zero() })
                .collect()
        })
        .collect();
    let mut pairs = Vec::new();
    let mut conditions = Vec::new();
    loop {
        let mut found: Option<(usize, usize, Expr, Option<String>)> = None;
        'outer: for ui in 0..active.len() {
            for vi in ui + 1..active.len() {
                let s = pairing(&active[ui], &active[vi]);
                match zeroness(&s, scope) {
                    Zeroness::NonZero => {
                        found = Some((ui, vi, s, None));
                        break 'outer;
                    }
                    Zeroness::Conditional(c) => {
                        if found.is_none() {
                            found = Some((ui, vi, s, Some(c)));
                        }
                    }
                    Zeroness::Zero => {}
                }
            }
        }
        let Some((ui, vi, nu, cond)) = found else { break };
        if let Some(c) = cond {
            conditions.push(c);
        }
        let u = active.remove(ui);
        let v = active.remove(vi - 1);
        let nu_inv = Expr::one().div(&nu);
        for w in active.iter_mut() {
            let swv = pairing(w, &v);
            let swu = pairing(w, &u);
            for k in 0..n {
                let corr_u = swv.mul(&nu_inv).mul(&u[k]);
                let corr_v = swu.mul(&nu_inv).mul(&v[k]);
                w[k] = w[k].sub(&corr_u).add(&corr_v).normalize();
            }
        }
        pairs.push(DarbouxPair { a: u, b: v, nu });
    }
    SigmaNormalForm {
        basis_labels,
        pairs,
        kernel: active,
        conditions,
    }
}

// ---------------------------------------------------------------------------
// Measures and reality
// ---------------------------------------------------------------------------

/// Left Haar measure `Omega^L = theta^L1 ^ ... ^ theta^Ln`.
pub fn haar_measure(spec: &GroupSpec) -> Result<KForm, CalcError> {
    let duals = dual_forms(spec)?;
    let n = spec.chart.dim();
    let mut acc: Option<KForm> = None;
    for f in &duals.forms {
        let k = f.to_kform(n);
        acc = Some(match acc {
            None => k,
            Some(w) => w.wedge(&k),
        });
    }
    Ok(acc.expect("nonempty chart"))
}

/// Chart-level complex conjugation: swap paired coordinates and conjugate
/// constants.
pub fn conj_expr(spec: &GroupSpec, e: &Expr) -> Expr {
    let swap: BTreeMap<String, Expr> = spec
        .chart
        .conj_pairs
        .iter()
        .flat_map(|(a, b)| [(a.clone(), Expr::coord(b)), (b.clone(), Expr::coord(a))])
        .collect();
    conj_tree(&e.subst_raw(&swap))
}

fn conj_tree(e: &Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(c.conj()),
        Expr::Coord(_) | Expr::Param(_) => e.clone(),
        Expr::Opaque { name, args, didx } => Expr::Opaque {
            name: name.clone(),
            args: args.iter().map(conj_tree).collect(),
            didx: didx.clone(),
        },
        Expr::Sum(ts) => Expr::Sum(ts.iter().map(conj_tree).collect()).normalize(),
        Expr::Product(fs) => Expr::Product(fs.iter().map(conj_tree).collect()).normalize(),
        Expr::Power(b, x) => {
            Expr::Power(Box::new(conj_tree(b)), Box::new(conj_tree(x))).normalize()
        }
        Expr::Exp(u) => Expr::Exp(Box::new(conj_tree(u))).normalize(),
        Expr::Log(u) => Expr::Log(Box::new(conj_tree(u))).normalize(),
        Expr::Sin(u) => Expr::Sin(Box::new(conj_tree(u))).normalize(),
        Expr::Cos(u) => Expr::Cos(Box::new(conj_tree(u))).normalize(),
    }
}

/// A field is real when it equals its chart conjugate (coefficients
/// conjugated, slots swapped along the pairing).
pub fn is_real_field(spec: &GroupSpec, f: &VectorField) -> bool {
    let scope = spec.extended_scope();
    let names = spec.chart.names();
    for (k, name) in names.iter().enumerate() {
        let partner = spec.chart.conj_of(name).unwrap_or(name);
        let pk = spec.chart.index_of(partner).unwrap_or(k);
        let conj_coeff = conj_expr(spec, &f.coeffs[pk]);
        if !equal_seeded(&f.coeffs[k], &conj_coeff, &scope, crate::DEFAULT_SEED).unwrap_or(false) {
            return false;
        }
    }
    let conj_vert = conj_expr(spec, &f.vertical);
    equal_seeded(&f.vertical, &conj_vert, &scope, crate::DEFAULT_SEED).unwrap_or(false)
}

/// Contract the Haar measure with the real first-order content of a
/// polarization. Complex directions (conjugate outside the span) do not
/// reduce the integration cycle; real ones do.
pub fn polarized_measure(spec: &GroupSpec, fields: &[VectorField]) -> Result<KForm, CalcError> {
    let mut acc = haar_measure(spec)?;
    for f in fields {
        if is_real_field(spec, f) {
            acc = acc.interior(&f.extended());
            if acc.is_zero() {
                return Err(CalcError::Singular(
                    "polarized measure degenerates to zero".into(),
                ));
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_model::{registry_get, RegistryEntry};
    use crate::symexpr::parse;

    fn group(name: &str) -> GroupSpec {
        match registry_get(name).unwrap() {
            RegistryEntry::Group(g) => g,
            _ => panic!(),
        }
    }

    fn expect_eq(spec: &GroupSpec, a: &Expr, src: &str) {
        let scope = spec.extended_scope();
        let b = parse(src, &scope).unwrap();
        assert!(
            equal_seeded(a, &b, &scope, 5).unwrap(),
            "expected `{a}` == `{src}`"
        );
    }

    #[test]
    fn hw_left_and_right_fields() {
        let spec = group("heisenberg-weyl");
        let lf = left_fields(&spec);
        assert_eq!(lf[0].label, "q");
        expect_eq(&spec, &lf[0].coeffs[0], "1");
        expect_eq(&spec, &lf[0].coeffs[1], "0");
        expect_eq(&spec, &lf[0].vertical, "p/(2*hbar)");
        expect_eq(&spec, &lf[1].vertical, "-q/(2*hbar)");
        assert!(lf[2].vertical.is_zero());
        let rf = right_fields(&spec);
        expect_eq(&spec, &rf[0].vertical, "-p/(2*hbar)");
        expect_eq(&spec, &rf[1].vertical, "q/(2*hbar)");
    }

    #[test]
    fn hw_theta_and_curvature() {
        let spec = group("heisenberg-weyl");
        let theta = quantization_form(&spec).unwrap();
        expect_eq(&spec, &theta.vertical, "hbar");
        expect_eq(&spec, &theta.coeffs[0], "-p/2");
        expect_eq(&spec, &theta.coeffs[1], "q/2");
        assert!(theta.coeffs[2].is_zero());
        let sigma = curvature(&spec, &theta);
        expect_eq(&spec, &sigma.component(&[0, 1]), "1");
        let dd = sigma.exterior_derivative(&spec.chart.names(), &spec.chart.fibre);
        assert!(dd.is_zero());
        expect_eq(&spec, &theta.pair(&vertical_field(&spec)), "hbar");
        for f in left_fields(&spec) {
            assert!(theta.pair(&f).is_zero(), "Theta not horizontal on {}", f.label);
        }
    }

    #[test]
    fn hw_duality_and_noether() {
        let spec = group("heisenberg-weyl");
        let duals = dual_forms(&spec).unwrap();
        let lf = left_fields(&spec);
        let scope = spec.extended_scope();
        for (i, th) in duals.forms.iter().enumerate() {
            for (j, f) in lf.iter().enumerate() {
                let v = th.pair(f);
                let want = if i == j { Expr::one() } else { Expr::zero() };
                assert!(equal_seeded(&v, &want, &scope, 5).unwrap());
            }
        }
        let noether = noether_invariants(&spec).unwrap();
        expect_eq(&spec, &noether[0].1, "-p");
        expect_eq(&spec, &noether[1].1, "q");
        assert!(noether[2].1.is_zero());
        expect_eq(&spec, &noether[3].1, "hbar");
    }

    #[test]
    fn hw_weyl_bracket() {
        let spec = group("heisenberg-weyl");
        let lf = left_fields(&spec);
        let b = field_commutator(&spec, &lf[0], &lf[1]);
        for c in &b.coeffs {
            assert!(c.is_zero());
        }
        expect_eq(&spec, &b.vertical, "-1/hbar");
        let bb = field_commutator(&spec, &lf[0], &lf[0]);
        assert!(bb.is_zero());
    }

    #[test]
    fn hw_sigma_normal_form() {
        let spec = group("heisenberg-weyl");
        let nf = sigma_normal_form(&spec).unwrap();
        assert_eq!(nf.rank(), 2);
        expect_eq(&spec, &nf.pairs[0].nu, "1/hbar");
        let labels = nf.pair_labels();
        assert_eq!(labels[0].0, "q");
        assert_eq!(labels[0].1, "p");
        assert_eq!(nf.kernel_labels(), vec!["a".to_string()]);
        assert_eq!(
            nf.j_tensor(),
            "theta^L[p] (x) X^L[q] - theta^L[q] (x) X^L[p]"
        );
    }

    #[test]
    fn hw_polarized_measure_is_dq() {
        let spec = group("heisenberg-weyl");
        let lf = left_fields(&spec);
        let m = polarized_measure(&spec, &[lf[2].clone(), lf[1].clone()]).unwrap();
        assert_eq!(m.degree, 1);
        let scope = spec.extended_scope();
        let c = m.component(&[0]);
        let is_unit = equal_seeded(&c, &Expr::one(), &scope, 5).unwrap()
            || equal_seeded(&c, &Expr::int(-1), &scope, 5).unwrap();
        assert!(is_unit, "dq coefficient was {c}");
        assert!(m.component(&[1]).is_zero());
        assert!(m.component(&[2]).is_zero());
    }

    #[test]
    fn degenerate_polarized_measure_is_reported() {
        // contracting twice with the same real direction kills the form
        let spec = group("heisenberg-weyl");
        let lf = left_fields(&spec);
        let err = polarized_measure(&spec, &[lf[2].clone(), lf[2].clone()]);
        assert!(matches!(err, Err(CalcError::Singular(_))));
    }

    #[test]
    fn vertical_leaves_theta_invariant() {
        let spec = group("heisenberg-weyl");
        let theta = quantization_form(&spec).unwrap();
        let x0 = vertical_field(&spec);
        let l = lie_derivative(&spec, &x0, &theta.to_kform(spec.chart.dim()));
        assert!(l.is_zero());
    }

    #[test]
    fn interior_product_on_two_form() {
        // i_{d_q}(dq ^ dp) = dp
        let _spec = group("heisenberg-weyl");
        let mut w = KForm::zero(4, 2);
        w.insert(vec![0, 1], Expr::one());
        let mut x = VectorField::zero(3);
        x.coeffs[0] = Expr::one();
        let r = w.interior(&x.extended());
        assert_eq!(r.component(&[1]), Expr::one());
        assert!(r.component(&[0]).is_zero());
    }
}
