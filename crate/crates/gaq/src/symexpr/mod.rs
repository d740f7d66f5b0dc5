//! Immutable symbolic expression core.
//!
//! Expressions are exact trees over named coordinates, symbolic parameters
//! and opaque function applications, with complex-rational constants.
//! `normalize` produces a canonical expanded form (trigonometric nodes are
//! rewritten to exponentials, so the usual angle identities are decided
//! structurally); `equal` falls back to seeded random rational evaluation
//! for the mixtures the normal form cannot cancel.

mod crat;
mod eval;
mod parse;
mod poly;
mod print;

pub use crat::{rat_to_f64, CRat};
pub use eval::{eval_expr, EvalError, EvalPoint};
pub use parse::{parse, parse_ast, ParseError};
pub use poly::{clear_denominators, NAtom, NMono, NPoly, EXPAND_LIMIT};
pub use print::expr_to_string;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Absolute tolerance of the random-evaluation equality route.
pub const EQUAL_EPS: f64 = 1e-10;
/// Minimum number of valid sample points for a numeric equality verdict.
pub const EQUAL_SAMPLES: usize = 32;

/// Symbolic expression tree. Values are immutable; all operations are pure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    /// Exact complex-rational constant (the imaginary unit is `Const(i)`).
    Const(CRat),
    Coord(String),
    Param(String),
    /// Opaque application `f(args)` with a derivative multi-index per slot.
    Opaque {
        name: String,
        args: Vec<Expr>,
        didx: Vec<u32>,
    },
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

#[derive(Debug, Error)]
pub enum SymError {
    #[error("binding for unknown coordinate `{0}`")]
    UnknownBinding(String),
    #[error("coordinate `{0}` is not in the chart context")]
    UnknownCoord(String),
    #[error("equality is indeterminate: {0}")]
    Indeterminate(String),
}

/// Domain assumption attached to a named parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamDomain {
    Real,
    Positive,
    NonzeroReal,
    IntegerConstrained,
}

/// A declared parameter: domain flag plus an optional exact pin value.
#[derive(Clone, Debug)]
pub struct ParamAssumption {
    pub name: String,
    pub domain: ParamDomain,
    pub pin: Option<BigRational>,
}

impl ParamAssumption {
    pub fn new(name: &str, domain: ParamDomain) -> Self {
        ParamAssumption {
            name: name.to_string(),
            domain,
            pin: None,
        }
    }

    pub fn pinned(name: &str, domain: ParamDomain, value: BigRational) -> Self {
        ParamAssumption {
            name: name.to_string(),
            domain,
            pin: Some(value),
        }
    }
}

/// Inclusive rational sampling interval for the numeric equality route.
#[derive(Clone, Debug)]
pub struct SampleRange {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl SampleRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        SampleRange {
            lo: BigRational::from_integer(lo.into()),
            hi: BigRational::from_integer(hi.into()),
        }
    }

    pub fn rational(lo: BigRational, hi: BigRational) -> Self {
        SampleRange { lo, hi }
    }
}

/// Coordinate declaration: name plus its safe sampling box.
#[derive(Clone, Debug)]
pub struct CoordDecl {
    pub name: String,
    pub sample: SampleRange,
}

impl CoordDecl {
    pub fn new(name: &str) -> Self {
        CoordDecl {
            name: name.to_string(),
            sample: SampleRange::new(-1, 1),
        }
    }

    pub fn with_range(name: &str, lo: i64, hi: i64) -> Self {
        CoordDecl {
            name: name.to_string(),
            sample: SampleRange::new(lo, hi),
        }
    }
}

/// Chart context: the coordinates and parameters an expression may mention.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub coords: Vec<CoordDecl>,
    pub params: Vec<ParamAssumption>,
}

impl Scope {
    pub fn new(coords: Vec<CoordDecl>, params: Vec<ParamAssumption>) -> Self {
        Scope { coords, params }
    }

    pub fn coord_names(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.name.clone()).collect()
    }

    pub fn has_coord(&self, name: &str) -> bool {
        self.coords.iter().any(|c| c.name == name)
    }

    pub fn param(&self, name: &str) -> Option<&ParamAssumption> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Scope over the doubled chart `(g', g)` used by group laws.
    pub fn doubled(&self) -> Scope {
        let mut coords = Vec::new();
        for c in &self.coords {
            coords.push(CoordDecl {
                name: primed(&c.name),
                sample: c.sample.clone(),
            });
        }
        coords.extend(self.coords.iter().cloned());
        Scope {
            coords,
            params: self.params.clone(),
        }
    }

    /// Extend with additional coordinates sharing default boxes.
    pub fn with_coords(&self, extra: &[CoordDecl]) -> Scope {
        let mut s = self.clone();
        s.coords.extend(extra.iter().cloned());
        s
    }

    /// Substitute pinned parameter values into an expression.
    pub fn apply_pins(&self, e: &Expr) -> Expr {
        let mut params = BTreeMap::new();
        for p in &self.params {
            if let Some(v) = &p.pin {
                params.insert(p.name.clone(), NPoly::from_rat(v.clone()));
            }
        }
        if params.is_empty() {
            return e.normalize();
        }
        from_nf(&e.to_nf().subst(&BTreeMap::new(), &params))
    }
}

pub fn primed(name: &str) -> String {
    format!("{name}'")
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(CRat::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(CRat::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(CRat::from_int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::Const(CRat::ratio(num, den))
    }

    pub fn i() -> Expr {
        Expr::Const(CRat::i())
    }

    pub fn coord(name: &str) -> Expr {
        Expr::Coord(name.to_string())
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }

    pub fn add(&self, rhs: &Expr) -> Expr {
        from_nf(&self.to_nf().add(&rhs.to_nf()))
    }

    pub fn sub(&self, rhs: &Expr) -> Expr {
        from_nf(&self.to_nf().sub(&rhs.to_nf()))
    }

    pub fn mul(&self, rhs: &Expr) -> Expr {
        from_nf(&self.to_nf().mul(&rhs.to_nf()))
    }

    pub fn div(&self, rhs: &Expr) -> Expr {
        from_nf(&self.to_nf().mul(&rhs.to_nf().pow(&NPoly::from_int(-1))))
    }

    pub fn neg(&self) -> Expr {
        from_nf(&self.to_nf().neg())
    }

    pub fn pow(&self, e: &Expr) -> Expr {
        from_nf(&self.to_nf().pow(&e.to_nf()))
    }

    pub fn scale(&self, num: i64, den: i64) -> Expr {
        from_nf(&self.to_nf().scale(&CRat::ratio(num, den)))
    }

    pub fn is_zero(&self) -> bool {
        self.to_nf().is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.to_nf().is_one()
    }

    /// Exact constant value, if the normal form is constant.
    pub fn as_const(&self) -> Option<CRat> {
        self.to_nf().as_const()
    }

    /// Canonical expanded form. Idempotent: normal trees are fixed points.
    pub fn normalize(&self) -> Expr {
        from_nf(&self.to_nf())
    }

    /// Exact partial derivative with respect to a coordinate.
    pub fn diff(&self, coord: &str) -> Expr {
        from_nf(&self.to_nf().diff(coord))
    }

    /// Simultaneous substitution of coordinates; bindings must name chart
    /// coordinates of `scope`.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<String, Expr>,
        scope: &Scope,
    ) -> Result<Expr, SymError> {
        for k in bindings.keys() {
            if !scope.has_coord(k) {
                return Err(SymError::UnknownBinding(k.clone()));
            }
        }
        Ok(self.subst_raw(bindings))
    }

    /// Substitution without chart validation (internal plumbing).
    pub fn subst_raw(&self, bindings: &BTreeMap<String, Expr>) -> Expr {
        let map: BTreeMap<String, NPoly> = bindings
            .iter()
            .map(|(k, v)| (k.clone(), v.to_nf()))
            .collect();
        from_nf(&self.to_nf().subst(&map, &BTreeMap::new()))
    }

    /// Substitute parameters by expressions.
    pub fn subst_params(&self, bindings: &BTreeMap<String, Expr>) -> Expr {
        let map: BTreeMap<String, NPoly> = bindings
            .iter()
            .map(|(k, v)| (k.clone(), v.to_nf()))
            .collect();
        from_nf(&self.to_nf().subst(&BTreeMap::new(), &map))
    }

    pub fn free_coords(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.to_nf().free_coords(&mut s);
        s
    }

    pub fn free_params(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.to_nf().free_params(&mut s);
        s
    }

    pub fn contains_opaque(&self) -> bool {
        self.to_nf().contains_opaque()
    }

    pub fn to_nf(&self) -> NPoly {
        match self {
            Expr::Const(c) => NPoly::constant(c.clone()),
            Expr::Coord(n) => NPoly::coord(n),
            Expr::Param(n) => NPoly::param(n),
            Expr::Opaque { name, args, didx } => NPoly::atom(NAtom::Opaque {
                name: name.clone(),
                args: args.iter().map(|a| a.to_nf()).collect(),
                didx: didx.clone(),
            }),
            Expr::Sum(ts) => ts.iter().fold(NPoly::zero(), |acc, t| acc.add(&t.to_nf())),
            Expr::Product(fs) => fs.iter().fold(NPoly::one(), |acc, f| acc.mul(&f.to_nf())),
            Expr::Power(b, e) => b.to_nf().pow(&e.to_nf()),
            Expr::Exp(u) => NPoly::exp_of(&u.to_nf()),
            Expr::Log(u) => NPoly::log_of(&u.to_nf()),
            Expr::Sin(u) => {
                // sin u = (exp(iu) - exp(-iu)) / (2i)
                let iu = u.to_nf().scale(&CRat::i());
                let pos = NPoly::exp_of(&iu);
                let negp = NPoly::exp_of(&iu.neg());
                pos.sub(&negp).scale(&CRat {
                    re: BigRational::zero(),
                    im: BigRational::new((-1).into(), 2.into()),
                })
            }
            Expr::Cos(u) => {
                let iu = u.to_nf().scale(&CRat::i());
                let pos = NPoly::exp_of(&iu);
                let negp = NPoly::exp_of(&iu.neg());
                pos.add(&negp).scale(&CRat::ratio(1, 2))
            }
        }
    }
}

/// Render a normal form back into the canonical tree.
pub fn from_nf(p: &NPoly) -> Expr {
    if p.0.is_empty() {
        return Expr::zero();
    }
    let terms: Vec<Expr> = p.0.iter().map(|(m, c)| term_tree(m, c)).collect();
    if terms.len() == 1 {
        terms.into_iter().next().unwrap()
    } else {
        Expr::Sum(terms)
    }
}

fn term_tree(mono: &NMono, coeff: &CRat) -> Expr {
    let mut factors: Vec<Expr> = Vec::new();
    for (atom, expo) in &mono.0 {
        let base = atom_tree(atom);
        if expo.is_one() {
            factors.push(base);
        } else {
            factors.push(Expr::Power(Box::new(base), Box::new(from_nf(expo))));
        }
    }
    if factors.is_empty() {
        return Expr::Const(coeff.clone());
    }
    if coeff.is_one() {
        if factors.len() == 1 {
            return factors.into_iter().next().unwrap();
        }
        return Expr::Product(factors);
    }
    let mut fs = vec![Expr::Const(coeff.clone())];
    fs.extend(factors);
    Expr::Product(fs)
}

fn atom_tree(atom: &NAtom) -> Expr {
    match atom {
        NAtom::Coord(n) => Expr::Coord(n.clone()),
        NAtom::Param(n) => Expr::Param(n.clone()),
        NAtom::Exp(u) => Expr::Exp(Box::new(from_nf(u))),
        NAtom::Log(u) => Expr::Log(Box::new(from_nf(u))),
        NAtom::RatPow(r) => Expr::Const(CRat::from_rat(r.clone())),
        NAtom::SumPow(u) => from_nf(u),
        NAtom::Opaque { name, args, didx } => Expr::Opaque {
            name: name.clone(),
            args: args.iter().map(from_nf).collect(),
            didx: didx.clone(),
        },
    }
}

// ---------------------------------------------------------------------------
// Equality: normalization first, seeded rational sampling as fallback
// ---------------------------------------------------------------------------

/// Three-valued zero test used by parametric linear algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Zeroness {
    Zero,
    NonZero,
    /// Not provably zero or nonzero; carries the printable condition.
    Conditional(String),
}

/// Decide `a == b`: structural cancellation, a rational-clearing retry, then
/// random rational evaluation over the scope's safe boxes.
pub fn equal(a: &Expr, b: &Expr, scope: &Scope) -> Result<bool, SymError> {
    equal_seeded(a, b, scope, crate::DEFAULT_SEED)
}

pub fn equal_seeded(a: &Expr, b: &Expr, scope: &Scope, seed: u64) -> Result<bool, SymError> {
    let a = scope.apply_pins(a);
    let b = scope.apply_pins(b);
    let d = a.to_nf().sub(&b.to_nf());
    if d.is_zero() {
        return Ok(true);
    }
    if let Some(cleared) = poly::clear_denominators(&d) {
        if cleared.is_zero() {
            return Ok(true);
        }
    }
    numeric_equal(&a, &b, scope, seed)
}

/// Decide whether an expression is identically zero.
pub fn is_zero_expr(e: &Expr, scope: &Scope) -> Result<bool, SymError> {
    equal(e, &Expr::zero(), scope)
}

/// Provability-aware zero test (no sampling): used for pivoting decisions.
pub fn zeroness(e: &Expr, scope: &Scope) -> Zeroness {
    let p = scope.apply_pins(e).to_nf();
    if p.is_zero() {
        return Zeroness::Zero;
    }
    if let Some(cleared) = poly::clear_denominators(&p) {
        if cleared.is_zero() {
            return Zeroness::Zero;
        }
    }
    if let Some(c) = p.as_const() {
        if c.is_zero() {
            return Zeroness::Zero;
        }
        return Zeroness::NonZero;
    }
    // A single monomial with nonzero coefficient is nonzero when every atom
    // is provably nonvanishing.
    if p.0.len() == 1 {
        let (mono, _) = p.0.iter().next().unwrap();
        let all_nonzero = mono.0.keys().all(|a| match a {
            NAtom::Param(n) => matches!(
                scope.param(n).map(|p| p.domain),
                Some(ParamDomain::Positive) | Some(ParamDomain::NonzeroReal)
            ),
            NAtom::Exp(_) | NAtom::RatPow(_) => true,
            _ => false,
        });
        if all_nonzero {
            return Zeroness::NonZero;
        }
    }
    Zeroness::Conditional(format!("{} != 0", print::expr_to_string(&from_nf(&p))))
}

fn numeric_equal(a: &Expr, b: &Expr, scope: &Scope, seed: u64) -> Result<bool, SymError> {
    // Opaque applications are treated as independent symbols.
    let (na, nb, extra) = abstract_opaques(a, b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut valid = 0usize;
    let mut attempts = 0usize;
    let max_attempts = EQUAL_SAMPLES * 8;
    while valid < EQUAL_SAMPLES && attempts < max_attempts {
        attempts += 1;
        let point = sample_point(scope, &extra, &mut rng);
        let va = eval::eval_nf(&na, &point);
        let vb = eval::eval_nf(&nb, &point);
        match (va, vb) {
            (Ok(x), Ok(y)) => {
                valid += 1;
                let scale = 1f64.max(x.norm()).max(y.norm());
                if (x - y).norm() > EQUAL_EPS * scale {
                    return Ok(false);
                }
            }
            _ => continue,
        }
    }
    if valid < EQUAL_SAMPLES {
        return Err(SymError::Indeterminate(
            "evaluation hit poles at nearly all sampled points".into(),
        ));
    }
    Ok(true)
}

/// Replace opaque atoms by synthetic coordinates, consistently across both
/// sides of a comparison.
fn abstract_opaques(a: &Expr, b: &Expr) -> (NPoly, NPoly, Vec<String>) {
    let mut table: BTreeMap<NAtom, String> = BTreeMap::new();
    let mut pa = a.to_nf();
    let mut pb = b.to_nf();
    let collect = |p: &NPoly, table: &mut BTreeMap<NAtom, String>| {
        p.visit_atoms(&mut |at| {
            if matches!(at, NAtom::Opaque { .. }) && !table.contains_key(at) {
                let id = format!("__opq{}", table.len());
                table.insert(at.clone(), id);
            }
        });
    };
    collect(&pa, &mut table);
    collect(&pb, &mut table);
    if !table.is_empty() {
        pa = replace_opaques(&pa, &table);
        pb = replace_opaques(&pb, &table);
    }
    (pa, pb, table.values().cloned().collect())
}

fn replace_opaques(p: &NPoly, table: &BTreeMap<NAtom, String>) -> NPoly {
    let mut out = NPoly::zero();
    for (mono, coeff) in &p.0 {
        let mut acc = NPoly::constant(coeff.clone());
        for (atom, expo) in &mono.0 {
            let val = match table.get(atom) {
                Some(name) => NPoly::coord(name),
                None => match atom {
                    NAtom::Exp(u) => NPoly::exp_of(&replace_opaques(u, table)),
                    NAtom::Log(u) => NPoly::log_of(&replace_opaques(u, table)),
                    NAtom::SumPow(u) => replace_opaques(u, table),
                    other => NPoly::atom(other.clone()),
                },
            };
            acc = acc.mul(&val.pow(&replace_opaques(expo, table)));
        }
        out = out.add(&acc);
    }
    out
}

fn rand_rational(rng: &mut ChaCha8Rng, range: &SampleRange) -> BigRational {
    // Rational in [lo, hi] with denominator <= 16.
    let den: i64 = rng.gen_range(1..=16);
    let steps = 4 * den;
    let k: i64 = rng.gen_range(0..=steps);
    let t = BigRational::new(k.into(), steps.into());
    &range.lo + (&range.hi - &range.lo) * t
}

fn sample_point(scope: &Scope, extra: &[String], rng: &mut ChaCha8Rng) -> EvalPoint {
    let mut point = EvalPoint::default();
    for c in &scope.coords {
        let v = rand_rational(rng, &c.sample);
        point
            .coords
            .insert(c.name.clone(), Complex64::new(rat_to_f64(&v), 0.0));
    }
    let default_box = SampleRange::new(-2, 2);
    for name in extra {
        let v = rand_rational(rng, &default_box);
        point
            .coords
            .insert(name.clone(), Complex64::new(rat_to_f64(&v), 0.0));
    }
    for p in &scope.params {
        let v = match (&p.pin, p.domain) {
            (Some(v), _) => v.clone(),
            (None, ParamDomain::Positive) => rand_rational(
                rng,
                &SampleRange::rational(BigRational::new(1.into(), 3.into()), BigRational::from_integer(2.into())),
            ),
            (None, ParamDomain::NonzeroReal) | (None, ParamDomain::IntegerConstrained) => {
                let mut v = rand_rational(rng, &SampleRange::new(-2, 2));
                if v.is_zero() {
                    v = BigRational::new(1.into(), 2.into());
                }
                v
            }
            (None, ParamDomain::Real) => rand_rational(rng, &SampleRange::new(-2, 2)),
        };
        point
            .params
            .insert(p.name.clone(), Complex64::new(rat_to_f64(&v), 0.0));
    }
    point
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scope_qp() -> Scope {
        Scope::new(
            vec![CoordDecl::new("q"), CoordDecl::new("p")],
            vec![ParamAssumption::new("hbar", ParamDomain::Positive)],
        )
    }

    #[test]
    fn normalize_is_idempotent() {
        let e = Expr::coord("q")
            .mul(&Expr::coord("p"))
            .add(&Expr::Exp(Box::new(Expr::coord("q"))));
        let n1 = e.normalize();
        let n2 = n1.normalize();
        assert_eq!(n1, n2);
    }

    #[test]
    fn binomial_identity() {
        let q = Expr::coord("q");
        let p = Expr::coord("p");
        let lhs = q.add(&p).pow(&Expr::int(2));
        let rhs = q
            .pow(&Expr::int(2))
            .add(&q.mul(&p).scale(2, 1))
            .add(&p.pow(&Expr::int(2)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn euler_identity_cancels() {
        // exp(i*phi) * exp(-i*phi) = 1
        let phi = Expr::coord("phi");
        let a = Expr::Exp(Box::new(phi.mul(&Expr::i())));
        let b = Expr::Exp(Box::new(phi.mul(&Expr::i()).neg()));
        assert!(a.mul(&b).sub(&Expr::one()).is_zero());
    }

    #[test]
    fn sin_cos_pythagoras() {
        let t = Expr::coord("t");
        let s = Expr::Sin(Box::new(t.clone()));
        let c = Expr::Cos(Box::new(t.clone()));
        let lhs = s.pow(&Expr::int(2)).add(&c.pow(&Expr::int(2)));
        assert!(lhs.sub(&Expr::one()).is_zero());
    }

    #[test]
    fn angle_addition_is_structural() {
        let a = Expr::coord("q");
        let b = Expr::coord("p");
        let sum = a.add(&b);
        let lhs = Expr::Cos(Box::new(sum));
        let rhs = Expr::Cos(Box::new(a.clone()))
            .mul(&Expr::Cos(Box::new(b.clone())))
            .sub(&Expr::Sin(Box::new(a.clone())).mul(&Expr::Sin(Box::new(b.clone()))));
        assert_eq!(lhs.normalize(), rhs.normalize());
    }

    #[test]
    fn equal_rational_functions() {
        let s = scope_qp();
        // 1/(1+q) + q/(1+q) == 1 needs the clearing pass.
        let one_plus = Expr::one().add(&Expr::coord("q"));
        let lhs = Expr::one()
            .div(&one_plus)
            .add(&Expr::coord("q").div(&one_plus));
        assert!(equal(&lhs, &Expr::one(), &s).unwrap());
        assert!(!equal(&Expr::coord("q"), &Expr::coord("p"), &s).unwrap());
    }

    #[test]
    fn substitution_validates_chart() {
        let s = scope_qp();
        let e = Expr::coord("q").add(&Expr::coord("p"));
        let mut map = BTreeMap::new();
        map.insert("z".to_string(), Expr::zero());
        assert!(e.substitute(&map, &s).is_err());
        let mut ok = BTreeMap::new();
        ok.insert("q".to_string(), Expr::zero());
        ok.insert("p".to_string(), Expr::zero());
        assert!(e.substitute(&ok, &s).unwrap().is_zero());
    }

    #[test]
    fn leibniz_on_product() {
        let q = Expr::coord("q");
        let p = Expr::coord("p");
        let e = q.mul(&p).add(&Expr::Exp(Box::new(q.clone())));
        let d = e.diff("q");
        let expect = p.add(&Expr::Exp(Box::new(q.clone())));
        assert_eq!(d, expect.normalize());
    }

    #[test]
    fn chain_rule_symbolic_exponent() {
        // diff((1+c*cs)^(-j), c) = -j*cs*(1+c*cs)^(-j-1)
        let c = Expr::coord("c");
        let cs = Expr::coord("cs");
        let j = Expr::param("j");
        let base = Expr::one().add(&c.mul(&cs));
        let e = base.pow(&j.neg());
        let d = e.diff("c");
        let expect = j
            .neg()
            .mul(&cs)
            .mul(&base.pow(&j.neg().sub(&Expr::one())));
        assert_eq!(d, expect.normalize());
    }

    #[test]
    fn pinned_parameter_evaluates_everywhere() {
        let mut s = scope_qp();
        s.params.push(ParamAssumption::pinned(
            "j",
            ParamDomain::IntegerConstrained,
            BigRational::new(1.into(), 2.into()),
        ));
        let e = Expr::param("j").scale(2, 1);
        assert!(equal(&e, &Expr::one(), &s).unwrap());
    }
}
