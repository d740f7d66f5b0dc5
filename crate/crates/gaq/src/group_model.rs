//! Centrally extended group specifications and the built-in registry.
//!
//! A [`GroupSpec`] holds a coordinate chart, the composition law over the
//! doubled chart, the inverse, a real 2-cocycle entering the fibre as
//! `phi'' = phi' + phi + xi(g', g)`, and parameter assumptions. Registry
//! entries ship as sectioned text files in `specs/` and are parsed at load.
//! [`AbstractAlgebraSpec`] covers algebras given only by structure
//! constants (the deformed Schrödinger algebra).

use crate::symexpr::{
    self, eval_expr, parse, rat_to_f64, CoordDecl, EvalPoint, Expr, ParamAssumption,
    ParamDomain, SampleRange, Scope,
};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// Numeric tolerance for group-axiom spot checks.
pub const AXIOM_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("spec parse error in `{file}` line {line}: {msg}")]
    SpecFile {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("expression error: {0}")]
    Expr(#[from] symexpr::ParseError),
    #[error("unknown registry name `{0}` (try: heisenberg-weyl, su2, harmonic-oscillator, schrodinger-algebra)")]
    UnknownName(String),
    #[error("dimension mismatch: expected {expected} point components, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("point lies on the singular locus: {0}")]
    Singular(String),
    #[error("symbolic engine: {0}")]
    Sym(#[from] symexpr::SymError),
}

/// One chart coordinate: sampling boxes plus chart-level flags.
#[derive(Clone, Debug)]
pub struct CoordInfo {
    pub name: String,
    pub angular: bool,
    /// Safe box: branch-free region used by symbolic/numeric identities.
    pub sample: SampleRange,
    /// Wide box: deliberately crosses branch cuts (single-valuedness check).
    pub wide: SampleRange,
}

/// Coordinate chart with the fibre angle and conjugation pairing.
#[derive(Clone, Debug)]
pub struct Chart {
    pub coords: Vec<CoordInfo>,
    pub fibre: String,
    pub conj_pairs: Vec<(String, String)>,
}

impl Chart {
    pub fn names(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.name.clone()).collect()
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c.name == name)
    }

    pub fn has_angular(&self) -> bool {
        self.coords.iter().any(|c| c.angular)
    }

    /// Conjugate partner under the chart's Wirtinger pairing, if any.
    pub fn conj_of(&self, name: &str) -> Option<&str> {
        for (a, b) in &self.conj_pairs {
            if a == name {
                return Some(b);
            }
            if b == name {
                return Some(a);
            }
        }
        None
    }
}

/// A centrally extended group presented in coordinates.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub name: String,
    pub chart: Chart,
    pub identity: Vec<Expr>,
    /// One expression per coordinate over the doubled chart `(g', g)`.
    pub law: Vec<Expr>,
    pub inverse: Vec<Expr>,
    /// Real 2-cocycle over the doubled chart.
    pub cocycle: Expr,
    pub params: Vec<ParamAssumption>,
    /// Declared convention factor on the quantization 1-form.
    pub theta_factor: Expr,
    pub singular: Option<String>,
}

impl GroupSpec {
    /// Scope over the base chart.
    pub fn scope(&self) -> Scope {
        Scope::new(
            self.chart
                .coords
                .iter()
                .map(|c| CoordDecl {
                    name: c.name.clone(),
                    sample: c.sample.clone(),
                })
                .collect(),
            self.params.clone(),
        )
    }

    /// Scope over chart plus the fibre angle.
    pub fn extended_scope(&self) -> Scope {
        let mut s = self.scope();
        s.coords.push(CoordDecl {
            name: self.chart.fibre.clone(),
            sample: SampleRange::new(-3, 3),
        });
        s
    }

    /// Scope over the doubled chart `(g', g)`.
    pub fn doubled_scope(&self) -> Scope {
        self.scope().doubled()
    }

    /// Pin parameters to exact rational values.
    pub fn with_pins(&self, pins: &BTreeMap<String, BigRational>) -> GroupSpec {
        let mut out = self.clone();
        for p in &mut out.params {
            if let Some(v) = pins.get(&p.name) {
                p.pin = Some(v.clone());
            }
        }
        let scope = out.scope();
        out.identity = out.identity.iter().map(|e| scope.apply_pins(e)).collect();
        out.law = out.law.iter().map(|e| scope.apply_pins(e)).collect();
        out.inverse = out.inverse.iter().map(|e| scope.apply_pins(e)).collect();
        out.cocycle = scope.apply_pins(&out.cocycle);
        out.theta_factor = scope.apply_pins(&out.theta_factor);
        out
    }

    /// Substitute a two-slot expression at concrete first/second points.
    pub fn bind_slots(&self, e: &Expr, first: &[Expr], second: &[Expr]) -> Expr {
        let mut map = BTreeMap::new();
        for (k, c) in self.chart.coords.iter().enumerate() {
            map.insert(symexpr::primed(&c.name), first[k].clone());
            map.insert(c.name.clone(), second[k].clone());
        }
        e.subst_raw(&map)
    }

    /// Coordinate part of `g1 * g2` for symbolic points (no fibre).
    pub fn compose_coords(&self, g1: &[Expr], g2: &[Expr]) -> Vec<Expr> {
        self.law
            .iter()
            .map(|l| self.bind_slots(l, g1, g2))
            .collect()
    }

    /// Cocycle value `xi(g1, g2)` for symbolic points.
    pub fn cocycle_at(&self, g1: &[Expr], g2: &[Expr]) -> Expr {
        self.bind_slots(&self.cocycle, g1, g2)
    }

    /// Full extension composition on points `(coords..., phi)`.
    pub fn compose(&self, g1: &[Expr], g2: &[Expr]) -> Result<Vec<Expr>, GroupError> {
        let n = self.chart.dim();
        if g1.len() != n + 1 || g2.len() != n + 1 {
            return Err(GroupError::Dimension {
                expected: n + 1,
                got: if g1.len() != n + 1 { g1.len() } else { g2.len() },
            });
        }
        let mut out = self.compose_coords(&g1[..n], &g2[..n]);
        let fibre = g1[n].add(&g2[n]).add(&self.cocycle_at(&g1[..n], &g2[..n]));
        out.push(fibre);
        // Constant points get a pole probe against the singular locus.
        if out
            .iter()
            .all(|e| e.free_coords().is_empty() && !e.contains_opaque())
        {
            let point = self.param_defaults();
            for e in &out {
                if let Err(err) = eval_expr(e, &point) {
                    if matches!(err, symexpr::EvalError::Pole(_)) {
                        return Err(GroupError::Singular(err.to_string()));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Identity as symbolic point (coords only).
    pub fn identity_point(&self) -> Vec<Expr> {
        self.identity.clone()
    }

    fn param_defaults(&self) -> EvalPoint {
        let mut pt = EvalPoint::default();
        for p in &self.params {
            let v = match (&p.pin, p.domain) {
                (Some(v), _) => rat_to_f64(v),
                (None, ParamDomain::Positive) => 1.0,
                _ => 0.5,
            };
            pt.params.insert(p.name.clone(), Complex64::new(v, 0.0));
        }
        pt
    }

    /// Numeric law evaluation (coordinates only).
    pub fn law_value(
        &self,
        g1: &[Complex64],
        g2: &[Complex64],
        params: &EvalPoint,
    ) -> Result<Vec<Complex64>, symexpr::EvalError> {
        let pt = self.doubled_point(g1, g2, params);
        self.law.iter().map(|l| eval_expr(l, &pt)).collect()
    }

    /// Numeric cocycle evaluation.
    pub fn xi_value(
        &self,
        g1: &[Complex64],
        g2: &[Complex64],
        params: &EvalPoint,
    ) -> Result<Complex64, symexpr::EvalError> {
        let pt = self.doubled_point(g1, g2, params);
        eval_expr(&self.cocycle, &pt)
    }

    pub fn inverse_value(
        &self,
        g: &[Complex64],
        params: &EvalPoint,
    ) -> Result<Vec<Complex64>, symexpr::EvalError> {
        let mut pt = params.clone();
        for (k, c) in self.chart.coords.iter().enumerate() {
            pt.coords.insert(c.name.clone(), g[k]);
        }
        self.inverse.iter().map(|l| eval_expr(l, &pt)).collect()
    }

    fn doubled_point(&self, g1: &[Complex64], g2: &[Complex64], params: &EvalPoint) -> EvalPoint {
        let mut pt = params.clone();
        for (k, c) in self.chart.coords.iter().enumerate() {
            pt.coords.insert(symexpr::primed(&c.name), g1[k]);
            pt.coords.insert(c.name.clone(), g2[k]);
        }
        pt
    }
}

/// Abstract Lie algebra given by structure constants over named generators.
#[derive(Clone, Debug)]
pub struct AbstractAlgebraSpec {
    pub name: String,
    pub generators: Vec<String>,
    /// Index of the central vertical generator.
    pub central: usize,
    /// brackets[(i,j)] with i < j: coefficients over the generator basis.
    pub brackets: BTreeMap<(usize, usize), Vec<Expr>>,
    pub params: Vec<ParamAssumption>,
    pub symplectic_pairs: Vec<(String, String)>,
    pub characteristic_hint: Vec<String>,
}

impl AbstractAlgebraSpec {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    /// Scope with no coordinates (coefficients are parameter expressions).
    pub fn scope(&self) -> Scope {
        Scope::new(Vec::new(), self.params.clone())
    }

    /// `[g_i, g_j]` as a coefficient vector over the basis.
    pub fn bracket(&self, i: usize, j: usize) -> Vec<Expr> {
        let dim = self.dim();
        if i == j {
            return vec![Expr::zero(); dim];
        }
        let (a, b, negate) = if i < j { (i, j, false) } else { (j, i, true) };
        match self.brackets.get(&(a, b)) {
            None => vec![Expr::zero(); dim],
            Some(v) => v
                .iter()
                .map(|e| if negate { e.neg() } else { e.clone() })
                .collect(),
        }
    }

    pub fn with_pins(&self, pins: &BTreeMap<String, BigRational>) -> AbstractAlgebraSpec {
        let mut out = self.clone();
        for p in &mut out.params {
            if let Some(v) = pins.get(&p.name) {
                p.pin = Some(v.clone());
            }
        }
        let scope = out.scope();
        for v in out.brackets.values_mut() {
            for e in v.iter_mut() {
                *e = scope.apply_pins(e);
            }
        }
        out
    }
}

/// A registry entry is either kind of specification.
#[derive(Clone, Debug)]
pub enum RegistryEntry {
    Group(GroupSpec),
    Algebra(AbstractAlgebraSpec),
}

// ---------------------------------------------------------------------------
// Spec file format
// ---------------------------------------------------------------------------

/// Parse the sectioned group-spec text format (see `specs/*.gaq` for the
/// shipped instances):
///
/// ```text
/// name = heisenberg-weyl
/// fibre = phi
/// [chart]       q = -2..2            # flags: `angular`, `wide lo..hi`
/// [identity]    q = 0
/// [law]         q'' = q' + q
/// [inverse]     q = -q
/// [cocycle]     xi = (1/(2*hbar))*(p'*q - q'*p)
/// [parameters]  hbar = positive      # real | positive | nonzero | integer
/// [convention]  theta_factor = hbar
/// [conjugation] c = cs
/// [singular]    note = ...
/// ```
pub fn parse_group_spec(file: &str, text: &str) -> Result<GroupSpec, GroupError> {
    let mut sections = split_sections(file, text)?;
    let header = sections.remove("").unwrap_or_default();
    let name = require_kv(file, &header, "name")?;
    let fibre = require_kv(file, &header, "fibre")?;

    let mut params = Vec::new();
    for (line, k, v) in sections.remove("parameters").unwrap_or_default() {
        params.push(parse_param(file, line, &k, &v)?);
    }

    let mut coords = Vec::new();
    for (line, k, v) in sections.remove("chart").unwrap_or_default() {
        coords.push(parse_coord(file, line, &k, &v)?);
    }
    if coords.is_empty() {
        return Err(GroupError::SpecFile {
            file: file.into(),
            line: 0,
            msg: "empty [chart] section".into(),
        });
    }

    let conj_pairs = sections
        .remove("conjugation")
        .unwrap_or_default()
        .into_iter()
        .map(|(_, a, b)| (a, b.trim().to_string()))
        .collect();

    let chart = Chart {
        coords,
        fibre,
        conj_pairs,
    };
    let scope = Scope::new(
        chart
            .coords
            .iter()
            .map(|c| CoordDecl {
                name: c.name.clone(),
                sample: c.sample.clone(),
            })
            .collect(),
        params.clone(),
    );
    let doubled = scope.doubled();

    let identity = parse_coord_map(file, sections.remove("identity"), &chart, &scope)?;
    let law = parse_coord_map_keyed(file, sections.remove("law"), &chart, &doubled, |n| {
        format!("{n}''")
    })?;
    let inverse = parse_coord_map(file, sections.remove("inverse"), &chart, &scope)?;

    let cocycle_kvs = sections.remove("cocycle").unwrap_or_default();
    let cocycle_src = cocycle_kvs
        .iter()
        .find(|(_, k, _)| k == "xi")
        .map(|(_, _, v)| v.clone())
        .ok_or_else(|| GroupError::SpecFile {
            file: file.into(),
            line: 0,
            msg: "missing `xi = ...` in [cocycle]".into(),
        })?;
    let cocycle = parse(&cocycle_src, &doubled)?;

    let convention = sections.remove("convention").unwrap_or_default();
    let theta_src = convention
        .iter()
        .find(|(_, k, _)| k == "theta_factor")
        .map(|(_, _, v)| v.clone())
        .unwrap_or_else(|| "1".to_string());
    let theta_factor = parse(&theta_src, &scope)?;

    let singular = sections
        .remove("singular")
        .and_then(|kvs| kvs.into_iter().find(|(_, k, _)| k == "note"))
        .map(|(_, _, v)| v);

    Ok(GroupSpec {
        name,
        chart,
        identity,
        law,
        inverse,
        cocycle,
        params,
        theta_factor,
        singular,
    })
}

/// Parse the abstract-algebra text format (`[generators]`, `[brackets]`,
/// `[parameters]`, `[designation]`).
pub fn parse_algebra_spec(file: &str, text: &str) -> Result<AbstractAlgebraSpec, GroupError> {
    let mut sections = split_sections(file, text)?;
    let header = sections.remove("").unwrap_or_default();
    let name = require_kv(file, &header, "name")?;
    let central_name = require_kv(file, &header, "central")?;

    let gens_lines = sections.remove("generators").unwrap_or_default();
    let mut generators: Vec<String> = Vec::new();
    for (_, k, v) in &gens_lines {
        let row = if v.is_empty() {
            k.clone()
        } else {
            format!("{k} = {v}")
        };
        for g in row.split(',') {
            let g = g.trim();
            if !g.is_empty() {
                generators.push(g.to_string());
            }
        }
    }
    let central = generators
        .iter()
        .position(|g| *g == central_name)
        .ok_or_else(|| GroupError::SpecFile {
            file: file.into(),
            line: 0,
            msg: format!("central generator `{central_name}` is not listed"),
        })?;

    let mut params = Vec::new();
    for (line, k, v) in sections.remove("parameters").unwrap_or_default() {
        params.push(parse_param(file, line, &k, &v)?);
    }

    // Bracket right-hand sides parse over a scope whose "coordinates" are
    // the generator names, then read off as linear combinations.
    let gen_scope = Scope::new(
        generators.iter().map(|g| CoordDecl::new(g)).collect(),
        params.clone(),
    );
    let mut brackets = BTreeMap::new();
    for (line, k, v) in sections.remove("brackets").unwrap_or_default() {
        let inner = k
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| GroupError::SpecFile {
                file: file.into(),
                line,
                msg: format!("bracket key `{k}` must look like [a, b]"),
            })?;
        let mut names = inner.split(',').map(str::trim);
        let (a, b) = match (names.next(), names.next(), names.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(GroupError::SpecFile {
                    file: file.into(),
                    line,
                    msg: format!("bracket key `{k}` must name two generators"),
                })
            }
        };
        let ia = generators
            .iter()
            .position(|g| g == a)
            .ok_or_else(|| GroupError::SpecFile {
                file: file.into(),
                line,
                msg: format!("unknown generator `{a}`"),
            })?;
        let ib = generators
            .iter()
            .position(|g| g == b)
            .ok_or_else(|| GroupError::SpecFile {
                file: file.into(),
                line,
                msg: format!("unknown generator `{b}`"),
            })?;
        let rhs = parse(&v, &gen_scope)?;
        let coeffs = linear_coefficients(&rhs, &generators).map_err(|msg| GroupError::SpecFile {
            file: file.into(),
            line,
            msg,
        })?;
        let (key, coeffs) = if ia < ib {
            ((ia, ib), coeffs)
        } else {
            ((ib, ia), coeffs.iter().map(|e| e.neg()).collect())
        };
        brackets.insert(key, coeffs);
    }

    let mut symplectic_pairs = Vec::new();
    let mut characteristic_hint = Vec::new();
    for (_, k, v) in sections.remove("designation").unwrap_or_default() {
        match k.as_str() {
            "symplectic_pairs" => {
                for pair in v.split(',') {
                    if let Some((a, b)) = pair.trim().split_once(':') {
                        symplectic_pairs.push((a.trim().to_string(), b.trim().to_string()));
                    }
                }
            }
            "characteristic" => {
                characteristic_hint = v.split(',').map(|s| s.trim().to_string()).collect();
            }
            _ => {}
        }
    }

    Ok(AbstractAlgebraSpec {
        name,
        generators,
        central,
        brackets,
        params,
        symplectic_pairs,
        characteristic_hint,
    })
}

/// Read a linear combination of generator symbols off a parsed expression.
pub fn linear_coefficients(e: &Expr, generators: &[String]) -> Result<Vec<Expr>, String> {
    let mut coeffs = Vec::new();
    let mut residue = e.clone();
    for g in generators {
        let c = residue.diff(g);
        if !c.free_coords().is_empty() {
            return Err(format!("coefficient of `{g}` is not constant"));
        }
        let mut zero_map = BTreeMap::new();
        zero_map.insert(g.clone(), Expr::zero());
        residue = residue.subst_raw(&zero_map);
        coeffs.push(c);
    }
    if !residue.is_zero() {
        return Err("expression is not a linear combination of generators".into());
    }
    Ok(coeffs)
}

type Kv = (usize, String, String);

fn split_sections(file: &str, text: &str) -> Result<BTreeMap<String, Vec<Kv>>, GroupError> {
    let mut out: BTreeMap<String, Vec<Kv>> = BTreeMap::new();
    let mut current = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let is_section =
            line.starts_with('[') && line.ends_with(']') && !line.contains('=') && !line.contains(',');
        if is_section {
            current = line[1..line.len() - 1].trim().to_string();
            out.entry(current.clone()).or_default();
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => out.entry(current.clone()).or_default().push((
                idx + 1,
                k.trim().to_string(),
                v.trim().to_string(),
            )),
            None => {
                if current == "generators" {
                    out.entry(current.clone())
                        .or_default()
                        .push((idx + 1, line.to_string(), String::new()));
                } else {
                    return Err(GroupError::SpecFile {
                        file: file.into(),
                        line: idx + 1,
                        msg: format!("expected `key = value`, got `{line}`"),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn require_kv(file: &str, kvs: &[Kv], key: &str) -> Result<String, GroupError> {
    kvs.iter()
        .find(|(_, k, _)| k == key)
        .map(|(_, _, v)| v.clone())
        .ok_or_else(|| GroupError::SpecFile {
            file: file.into(),
            line: 0,
            msg: format!("missing `{key} = ...`"),
        })
}

fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('-') {
        return parse_rat(rest).map(|r| -r);
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: num_bigint::BigInt = n.trim().parse().ok()?;
        let d: num_bigint::BigInt = d.trim().parse().ok()?;
        return Some(BigRational::new(n, d));
    }
    if s.contains('.') {
        let (int_part, frac) = s.split_once('.')?;
        let mut num: num_bigint::BigInt = if int_part.is_empty() {
            0.into()
        } else {
            int_part.parse().ok()?
        };
        let mut den: num_bigint::BigInt = 1.into();
        for ch in frac.chars() {
            num = num * 10 + ch.to_digit(10)?;
            den *= 10;
        }
        return Some(BigRational::new(num, den));
    }
    s.parse::<num_bigint::BigInt>()
        .ok()
        .map(BigRational::from_integer)
}

fn parse_range(file: &str, line: usize, s: &str) -> Result<SampleRange, GroupError> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| GroupError::SpecFile {
        file: file.into(),
        line,
        msg: format!("expected `lo..hi`, got `{s}`"),
    })?;
    let lo = parse_rat(lo).ok_or_else(|| GroupError::SpecFile {
        file: file.into(),
        line,
        msg: format!("bad rational `{lo}`"),
    })?;
    let hi = parse_rat(hi).ok_or_else(|| GroupError::SpecFile {
        file: file.into(),
        line,
        msg: format!("bad rational `{hi}`"),
    })?;
    Ok(SampleRange::rational(lo, hi))
}

fn parse_coord(file: &str, line: usize, name: &str, v: &str) -> Result<CoordInfo, GroupError> {
    let mut angular = false;
    let mut sample = None;
    let mut wide = None;
    let mut toks = v.split_whitespace();
    while let Some(t) = toks.next() {
        match t {
            "angular" => angular = true,
            "wide" => {
                let r = toks.next().ok_or_else(|| GroupError::SpecFile {
                    file: file.into(),
                    line,
                    msg: "`wide` needs a range".into(),
                })?;
                wide = Some(parse_range(file, line, r)?);
            }
            other => sample = Some(parse_range(file, line, other)?),
        }
    }
    let sample = sample.ok_or_else(|| GroupError::SpecFile {
        file: file.into(),
        line,
        msg: format!("coordinate `{name}` needs a sample range"),
    })?;
    let wide = wide.unwrap_or_else(|| sample.clone());
    Ok(CoordInfo {
        name: name.to_string(),
        angular,
        sample,
        wide,
    })
}

fn parse_param(
    file: &str,
    line: usize,
    name: &str,
    v: &str,
) -> Result<ParamAssumption, GroupError> {
    let mut domain = ParamDomain::Real;
    let mut pin = None;
    let mut toks = v.split_whitespace();
    while let Some(t) = toks.next() {
        match t {
            "real" => domain = ParamDomain::Real,
            "positive" => domain = ParamDomain::Positive,
            "nonzero" => domain = ParamDomain::NonzeroReal,
            "integer" => domain = ParamDomain::IntegerConstrained,
            "pin" => {
                let raw = toks.next().ok_or_else(|| GroupError::SpecFile {
                    file: file.into(),
                    line,
                    msg: "`pin` needs a rational value".into(),
                })?;
                pin = Some(parse_rat(raw).ok_or_else(|| GroupError::SpecFile {
                    file: file.into(),
                    line,
                    msg: format!("bad pin value `{raw}`"),
                })?);
            }
            other => {
                return Err(GroupError::SpecFile {
                    file: file.into(),
                    line,
                    msg: format!("unknown parameter flag `{other}`"),
                })
            }
        }
    }
    Ok(ParamAssumption {
        name: name.to_string(),
        domain,
        pin,
    })
}

fn parse_coord_map(
    file: &str,
    kvs: Option<Vec<Kv>>,
    chart: &Chart,
    scope: &Scope,
) -> Result<Vec<Expr>, GroupError> {
    parse_coord_map_keyed(file, kvs, chart, scope, |n| n.to_string())
}

fn parse_coord_map_keyed(
    file: &str,
    kvs: Option<Vec<Kv>>,
    chart: &Chart,
    scope: &Scope,
    key_of: impl Fn(&str) -> String,
) -> Result<Vec<Expr>, GroupError> {
    let kvs = kvs.unwrap_or_default();
    let mut out = Vec::new();
    for c in &chart.coords {
        let key = key_of(&c.name);
        let src = kvs
            .iter()
            .find(|(_, k, _)| *k == key)
            .map(|(_, _, v)| v.clone())
            .ok_or_else(|| GroupError::SpecFile {
                file: file.into(),
                line: 0,
                msg: format!("missing `{key} = ...`"),
            })?;
        out.push(parse(&src, scope)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

const HW_SPEC: &str = include_str!("../specs/heisenberg-weyl.gaq");
const SU2_SPEC: &str = include_str!("../specs/su2.gaq");
const OSC_SPEC: &str = include_str!("../specs/harmonic-oscillator.gaq");
const SCHRODINGER_SPEC: &str = include_str!("../specs/schrodinger-algebra.alg");

/// Fetch a built-in specification by name.
pub fn registry_get(name: &str) -> Result<RegistryEntry, GroupError> {
    match name {
        "heisenberg-weyl" => Ok(RegistryEntry::Group(parse_group_spec(
            "heisenberg-weyl.gaq",
            HW_SPEC,
        )?)),
        "su2" => Ok(RegistryEntry::Group(parse_group_spec("su2.gaq", SU2_SPEC)?)),
        "harmonic-oscillator" => Ok(RegistryEntry::Group(parse_group_spec(
            "harmonic-oscillator.gaq",
            OSC_SPEC,
        )?)),
        "schrodinger-algebra" => Ok(RegistryEntry::Algebra(parse_algebra_spec(
            "schrodinger-algebra.alg",
            SCHRODINGER_SPEC,
        )?)),
        other => Err(GroupError::UnknownName(other.to_string())),
    }
}

/// Names `registry_get` resolves to coordinate groups.
pub const GROUP_NAMES: [&str; 3] = ["heisenberg-weyl", "su2", "harmonic-oscillator"];

/// Heisenberg-Weyl times an abelian block, generated programmatically:
/// chart `q1..qn, p1..pn, a1..ar` with the Darboux-normal cocycle.
pub fn heisenberg_weyl(n: usize, r: usize) -> GroupSpec {
    assert!(n >= 1, "need at least one symplectic pair");
    let mut names: Vec<String> = Vec::new();
    for i in 1..=n {
        names.push(if n == 1 { "q".into() } else { format!("q{i}") });
    }
    for i in 1..=n {
        names.push(if n == 1 { "p".into() } else { format!("p{i}") });
    }
    for i in 1..=r {
        names.push(if r == 1 { "a".into() } else { format!("a{i}") });
    }
    let mut text = String::from("name = heisenberg-weyl\nfibre = phi\n\n[chart]\n");
    for c in &names {
        text.push_str(&format!("{c} = -2..2\n"));
    }
    text.push_str("\n[identity]\n");
    for c in &names {
        text.push_str(&format!("{c} = 0\n"));
    }
    text.push_str("\n[law]\n");
    for c in &names {
        text.push_str(&format!("{c}'' = {c}' + {c}\n"));
    }
    text.push_str("\n[inverse]\n");
    for c in &names {
        text.push_str(&format!("{c} = -{c}\n"));
    }
    let mut xi_terms = Vec::new();
    for i in 0..n {
        let q = &names[i];
        let p = &names[n + i];
        xi_terms.push(format!("({p}'*{q} - {q}'*{p})"));
    }
    text.push_str(&format!(
        "\n[cocycle]\nxi = (1/(2*hbar))*({})\n",
        xi_terms.join(" + ")
    ));
    text.push_str("\n[parameters]\nhbar = positive\n\n[convention]\ntheta_factor = hbar\n");
    parse_group_spec("heisenberg-weyl(generated)", &text).expect("generated spec is well-formed")
}

// ---------------------------------------------------------------------------
// Axiom and cocycle verification
// ---------------------------------------------------------------------------

/// Outcome of one axiom: symbolic verdict (`None` when the normal form
/// could not decide and only sampling was used) plus numeric trials.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub symbolic: Option<bool>,
    pub trials: usize,
    pub failures: usize,
    pub witness: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.symbolic != Some(false) && self.failures == 0 && self.trials > 0
    }
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub checks: Vec<CheckOutcome>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }
}

fn symbolic_verdict(diffs: &[Expr], scope: &Scope) -> Option<bool> {
    let mut all_zero = true;
    for d in diffs {
        match symexpr::zeroness(d, scope) {
            symexpr::Zeroness::Zero => {}
            _ => all_zero = false,
        }
    }
    if all_zero {
        Some(true)
    } else {
        None
    }
}

/// Sample a point on the real group: conjugation-paired coordinates are
/// drawn as a complex value and its conjugate (elsewhere the two logs of a
/// stereographic law would branch-jump independently, faking defects).
fn sample_group_point(spec: &GroupSpec, rng: &mut ChaCha8Rng, wide: bool) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); spec.chart.dim()];
    let mut done = vec![false; spec.chart.dim()];
    for (k, c) in spec.chart.coords.iter().enumerate() {
        if done[k] {
            continue;
        }
        let r = if wide { &c.wide } else { &c.sample };
        let lo = rat_to_f64(&r.lo);
        let hi = rat_to_f64(&r.hi);
        match spec
            .chart
            .conj_of(&c.name)
            .and_then(|p| spec.chart.index_of(p))
        {
            Some(partner) if partner != k => {
                let z = Complex64::new(rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
                out[k] = z;
                out[partner] = z.conj();
                done[k] = true;
                done[partner] = true;
            }
            _ => {
                out[k] = Complex64::new(rng.gen_range(lo..=hi), 0.0);
                done[k] = true;
            }
        }
    }
    out
}

fn sample_params_point(params: &[ParamAssumption], rng: &mut ChaCha8Rng) -> EvalPoint {
    let mut pt = EvalPoint::default();
    for p in params {
        let v = match (&p.pin, p.domain) {
            (Some(v), _) => rat_to_f64(v),
            (None, ParamDomain::Positive) => rng.gen_range(0.4..1.8),
            // integer-constrained parameters must stay on the lattice or
            // the single-valuedness check would reject valid cocycles
            (None, ParamDomain::IntegerConstrained) => {
                let k: i64 = rng.gen_range(1..=2);
                if rng.gen_bool(0.5) {
                    k as f64
                } else {
                    -(k as f64)
                }
            }
            (None, _) => {
                let v: f64 = rng.gen_range(-1.5..1.5);
                if v.abs() < 0.1 {
                    0.7
                } else {
                    v
                }
            }
        };
        pt.params.insert(p.name.clone(), Complex64::new(v, 0.0));
    }
    pt
}

fn random_point(scope: &Scope, rng: &mut ChaCha8Rng) -> EvalPoint {
    let mut pt = sample_params_point(&scope.params, rng);
    for c in &scope.coords {
        let lo = rat_to_f64(&c.sample.lo);
        let hi = rat_to_f64(&c.sample.hi);
        pt.coords
            .insert(c.name.clone(), Complex64::new(rng.gen_range(lo..=hi), 0.0));
    }
    pt
}

fn format_point(pt: &EvalPoint) -> String {
    let mut parts: Vec<String> = pt
        .coords
        .iter()
        .map(|(k, v)| format!("{k}={:.4}", v.re))
        .collect();
    parts.extend(pt.params.iter().map(|(k, v)| format!("{k}={:.4}", v.re)));
    parts.join(", ")
}

fn outcome_for(name: &str, diffs: &[Expr], scope: &Scope, trials: usize, seed: u64) -> CheckOutcome {
    let symbolic = symbolic_verdict(diffs, scope);
    let mut failures = 0usize;
    let mut done = 0usize;
    let mut witness = None;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0usize;
    while done < trials && attempts < trials * 8 {
        attempts += 1;
        let pt = random_point(scope, &mut rng);
        let mut ok = true;
        let mut valid = true;
        for d in diffs {
            match eval_expr(d, &pt) {
                Ok(v) => {
                    if v.norm() > AXIOM_TOL {
                        ok = false;
                    }
                }
                Err(_) => {
                    valid = false;
                    break;
                }
            }
        }
        if !valid {
            continue;
        }
        done += 1;
        if !ok {
            failures += 1;
            if witness.is_none() {
                witness = Some(format_point(&pt));
            }
        }
    }
    CheckOutcome {
        name: name.to_string(),
        symbolic,
        trials: done,
        failures,
        witness,
    }
}

/// Check identity, associativity (coordinates and fibre) and inverse, both
/// symbolically and at random points.
pub fn verify_group_axioms(spec: &GroupSpec, trials: usize, seed: u64) -> AxiomReport {
    let scope = spec.scope();
    let doubled = scope.doubled();
    let coords: Vec<Expr> = spec.chart.names().iter().map(|c| Expr::coord(c)).collect();
    let primed: Vec<Expr> = spec
        .chart
        .names()
        .iter()
        .map(|c| Expr::coord(&symexpr::primed(c)))
        .collect();

    let mut checks = Vec::new();

    {
        let composed = spec.compose_coords(&primed, &spec.identity_point());
        let mut diffs: Vec<Expr> = composed
            .iter()
            .zip(&primed)
            .map(|(a, b)| a.sub(b))
            .collect();
        diffs.push(spec.cocycle_at(&primed, &spec.identity_point()));
        checks.push(outcome_for("right-identity", &diffs, &doubled, trials, seed));
    }
    {
        let composed = spec.compose_coords(&spec.identity_point(), &coords);
        let mut diffs: Vec<Expr> = composed
            .iter()
            .zip(&coords)
            .map(|(a, b)| a.sub(b))
            .collect();
        diffs.push(spec.cocycle_at(&spec.identity_point(), &coords));
        checks.push(outcome_for(
            "left-identity",
            &diffs,
            &doubled,
            trials,
            seed.wrapping_add(1),
        ));
    }
    {
        let (tri_scope, g1, g2, g3) = tripled(spec);
        let g12 = spec.compose_coords(&g1, &g2);
        let g23 = spec.compose_coords(&g2, &g3);
        let left = spec.compose_coords(&g12, &g3);
        let right = spec.compose_coords(&g1, &g23);
        let mut diffs: Vec<Expr> = left.iter().zip(&right).map(|(a, b)| a.sub(b)).collect();
        // Fibre associativity is exactly the strict cocycle identity.
        let fibre_left = spec.cocycle_at(&g1, &g2).add(&spec.cocycle_at(&g12, &g3));
        let fibre_right = spec.cocycle_at(&g2, &g3).add(&spec.cocycle_at(&g1, &g23));
        diffs.push(fibre_left.sub(&fibre_right));
        checks.push(outcome_for(
            "associativity",
            &diffs,
            &tri_scope,
            trials,
            seed.wrapping_add(2),
        ));
    }
    {
        let composed = spec.compose_coords(&coords, &spec.inverse);
        let diffs: Vec<Expr> = composed
            .iter()
            .zip(&spec.identity)
            .map(|(a, b)| a.sub(b))
            .collect();
        checks.push(outcome_for(
            "inverse",
            &diffs,
            &scope,
            trials,
            seed.wrapping_add(3),
        ));
    }

    AxiomReport { checks }
}

fn tripled(spec: &GroupSpec) -> (Scope, Vec<Expr>, Vec<Expr>, Vec<Expr>) {
    let mut tri_coords = Vec::new();
    for k in 1..=3 {
        for c in &spec.chart.coords {
            tri_coords.push(CoordDecl {
                name: format!("{}__{k}", c.name),
                sample: c.sample.clone(),
            });
        }
    }
    let tri_scope = Scope::new(tri_coords, spec.params.clone());
    let slot = |k: usize| -> Vec<Expr> {
        spec.chart
            .names()
            .iter()
            .map(|c| Expr::coord(&format!("{c}__{k}")))
            .collect()
    };
    (tri_scope, slot(1), slot(2), slot(3))
}

/// Cocycle report: strict additivity in the safe box, normalization, and
/// for angular charts the mod-2π single-valuedness of `e^{i xi}` sampled
/// across branch cuts in the wide box.
#[derive(Clone, Debug)]
pub struct CocycleReport {
    pub identity_at_e: bool,
    pub additivity: CheckOutcome,
    pub single_valuedness: Option<SingleValuedness>,
}

#[derive(Clone, Debug)]
pub struct SingleValuedness {
    pub trials: usize,
    /// Samples where the real-valued cocycle identity jumped by 2π-multiples.
    pub branch_events: usize,
    pub failures: usize,
    pub max_violation: f64,
    pub witness: Option<String>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.identity_at_e
            && self.additivity.passed()
            && self
                .single_valuedness
                .as_ref()
                .map(|s| s.failures == 0 && s.trials > 0)
                .unwrap_or(true)
    }
}

pub fn verify_cocycle(spec: &GroupSpec, trials: usize, seed: u64) -> CocycleReport {
    let scope = spec.scope();
    let e_pt = spec.identity_point();
    let xi_ee = spec.cocycle_at(&e_pt, &e_pt);
    let identity_at_e = symexpr::is_zero_expr(&xi_ee, &scope).unwrap_or(false);

    let (tri_scope, g1, g2, g3) = tripled(spec);
    let g12 = spec.compose_coords(&g1, &g2);
    let g23 = spec.compose_coords(&g2, &g3);
    let lhs = spec.cocycle_at(&g1, &g2).add(&spec.cocycle_at(&g12, &g3));
    let rhs = spec.cocycle_at(&g2, &g3).add(&spec.cocycle_at(&g1, &g23));
    let additivity = outcome_for("cocycle-additivity", &[lhs.sub(&rhs)], &tri_scope, trials, seed);

    let single_valuedness = if spec.chart.has_angular() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut branch_events = 0usize;
        let mut failures = 0usize;
        let mut max_violation = 0f64;
        let mut witness = None;
        let mut done = 0usize;
        let mut attempts = 0usize;
        while done < trials && attempts < trials * 8 {
            attempts += 1;
            let params = sample_params_point(&spec.params, &mut rng);
            let a = sample_group_point(spec, &mut rng, true);
            let b = sample_group_point(spec, &mut rng, true);
            let c = sample_group_point(spec, &mut rng, true);
            let delta = (|| -> Result<Complex64, symexpr::EvalError> {
                let ab = spec.law_value(&a, &b, &params)?;
                let bc = spec.law_value(&b, &c, &params)?;
                let lhs = spec.xi_value(&a, &b, &params)? + spec.xi_value(&ab, &c, &params)?;
                let rhs = spec.xi_value(&b, &c, &params)? + spec.xi_value(&a, &bc, &params)?;
                Ok(lhs - rhs)
            })();
            let delta = match delta {
                Ok(d) => d,
                Err(_) => continue,
            };
            done += 1;
            if delta.norm() > 1e-6 {
                branch_events += 1;
            }
            let violation = ((Complex64::i() * delta).exp() - Complex64::new(1.0, 0.0)).norm();
            if violation > max_violation {
                max_violation = violation;
            }
            if violation > AXIOM_TOL {
                failures += 1;
                if witness.is_none() {
                    witness = Some(format!(
                        "xi defect {:.6}, |e^(i*defect) - 1| = {:.3e}",
                        delta.re, violation
                    ));
                }
            }
        }
        Some(SingleValuedness {
            trials: done,
            branch_events,
            failures,
            max_violation,
            witness,
        })
    } else {
        None
    };

    CocycleReport {
        identity_at_e,
        additivity,
        single_valuedness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::equal_seeded;

    pub(crate) fn group(name: &str) -> GroupSpec {
        match registry_get(name).unwrap() {
            RegistryEntry::Group(g) => g,
            _ => panic!("{name} is not a group spec"),
        }
    }

    #[test]
    fn registry_knows_its_names() {
        assert!(matches!(
            registry_get("heisenberg-weyl"),
            Ok(RegistryEntry::Group(_))
        ));
        assert!(matches!(
            registry_get("schrodinger-algebra"),
            Ok(RegistryEntry::Algebra(_))
        ));
        assert!(matches!(registry_get("su3"), Err(GroupError::UnknownName(_))));
    }

    #[test]
    fn hw_compose_matches_hand_value() {
        // (1,0,0,0) * (0,1,0,0) -> (1,1,0,-1/2) at hbar = 1.
        let mut pins = BTreeMap::new();
        pins.insert("hbar".to_string(), BigRational::from_integer(1.into()));
        let spec = group("heisenberg-weyl").with_pins(&pins);
        let g1 = vec![Expr::int(1), Expr::zero(), Expr::zero(), Expr::zero()];
        let g2 = vec![Expr::zero(), Expr::int(1), Expr::zero(), Expr::zero()];
        let out = spec.compose(&g1, &g2).unwrap();
        assert_eq!(out[0], Expr::int(1));
        assert_eq!(out[1], Expr::int(1));
        assert!(out[2].is_zero());
        assert_eq!(out[3], Expr::ratio(-1, 2));
    }

    #[test]
    fn compose_with_identity_is_identity_map() {
        let spec = group("heisenberg-weyl");
        let scope = spec.extended_scope();
        let mut g: Vec<Expr> = spec.chart.names().iter().map(|c| Expr::coord(c)).collect();
        g.push(Expr::coord(&spec.chart.fibre));
        let mut e: Vec<Expr> = spec.identity_point();
        e.push(Expr::zero());
        let out = spec.compose(&g, &e).unwrap();
        for (a, b) in out.iter().zip(&g) {
            assert!(equal_seeded(a, b, &scope, 7).unwrap());
        }
    }

    #[test]
    fn su2_fibre_bundle_right_action() {
        // (eta', c', cs') * (eta, 0, 0) = (eta' eta, c', cs')
        let spec = group("su2");
        let scope = spec.doubled_scope();
        let primed: Vec<Expr> = spec
            .chart
            .names()
            .iter()
            .map(|c| Expr::coord(&symexpr::primed(c)))
            .collect();
        let fibre_pt = vec![Expr::coord("phi"), Expr::zero(), Expr::zero()];
        let out = spec.compose_coords(&primed, &fibre_pt);
        let want_phi = Expr::coord("phi'").add(&Expr::coord("phi"));
        assert!(equal_seeded(&out[0], &want_phi, &scope, 5).unwrap());
        assert!(equal_seeded(&out[1], &Expr::coord("c'"), &scope, 5).unwrap());
        assert!(equal_seeded(&out[2], &Expr::coord("cs'"), &scope, 5).unwrap());
    }

    #[test]
    fn compose_detects_singular_locus() {
        // su2 law pole: exp(2i phi') = cs' * c
        let mut pins = BTreeMap::new();
        pins.insert("j".to_string(), BigRational::new(1.into(), 2.into()));
        let spec = group("su2").with_pins(&pins);
        let g1 = vec![Expr::zero(), Expr::zero(), Expr::one(), Expr::zero()];
        let g2 = vec![Expr::zero(), Expr::one(), Expr::zero(), Expr::zero()];
        assert!(matches!(
            spec.compose(&g1, &g2),
            Err(GroupError::Singular(_))
        ));
        // dimension mismatch is caught before evaluation
        assert!(matches!(
            spec.compose(&g1[..2].to_vec(), &g2),
            Err(GroupError::Dimension { .. })
        ));
    }

    #[test]
    fn hw_axioms_and_cocycle_pass() {
        let spec = group("heisenberg-weyl");
        let rep = verify_group_axioms(&spec, 25, 11);
        assert!(rep.all_passed(), "{rep:?}");
        for c in &rep.checks {
            assert_eq!(c.symbolic, Some(true), "{c:?}");
        }
        let coc = verify_cocycle(&spec, 25, 11);
        assert!(coc.passed());
        assert!(coc.single_valuedness.is_none());
    }

    #[test]
    fn corrupted_hw_cocycle_fails_fibre_associativity() {
        let spec = group("heisenberg-weyl");
        // A nonlinear first slot breaks the additivity identity.
        let mut bad = spec.clone();
        bad.cocycle = parse("(1/(2*hbar))*(p'^2*q - q'*p)", &spec.doubled_scope()).unwrap();
        let rep = verify_group_axioms(&bad, 25, 13);
        let assoc = rep
            .checks
            .iter()
            .find(|c| c.name == "associativity")
            .unwrap();
        assert!(!assoc.passed());
        let coc = verify_cocycle(&bad, 25, 13);
        assert!(!coc.additivity.passed());
        assert!(coc.additivity.witness.is_some());
    }

    #[test]
    fn symmetric_bilinear_form_is_still_a_cocycle() {
        // (p'q + q'p)/2hbar is the coboundary of qp/2hbar, so the axioms
        // hold; only the antisymmetric part carries cohomology.
        let spec = group("heisenberg-weyl");
        let mut sym = spec.clone();
        sym.cocycle = parse("(1/(2*hbar))*(p'*q + q'*p)", &spec.doubled_scope()).unwrap();
        assert!(verify_group_axioms(&sym, 25, 13).all_passed());
        assert!(verify_cocycle(&sym, 25, 13).passed());
    }

    #[test]
    fn generated_hw_matches_registry_file() {
        let gen = heisenberg_weyl(1, 1);
        let file = group("heisenberg-weyl");
        assert_eq!(gen.chart.names(), file.chart.names());
        let scope = gen.doubled_scope();
        for (a, b) in gen.law.iter().zip(&file.law) {
            assert!(equal_seeded(a, b, &scope, 3).unwrap());
        }
        assert!(equal_seeded(&gen.cocycle, &file.cocycle, &scope, 3).unwrap());
    }

    #[test]
    fn generated_hw_scales_in_n_and_r() {
        let spec = heisenberg_weyl(2, 3);
        assert_eq!(
            spec.chart.names(),
            vec!["q1", "q2", "p1", "p2", "a1", "a2", "a3"]
        );
        assert!(verify_group_axioms(&spec, 15, 31).all_passed());
        assert!(verify_cocycle(&spec, 15, 31).passed());
    }

    #[test]
    fn schrodinger_algebra_table() {
        let alg = match registry_get("schrodinger-algebra").unwrap() {
            RegistryEntry::Algebra(a) => a,
            _ => unreachable!(),
        };
        assert_eq!(alg.generators, vec!["x", "v", "a", "t", "c", "Z"]);
        let ix = alg.index_of("x").unwrap();
        let iv = alg.index_of("v").unwrap();
        let iz = alg.index_of("Z").unwrap();
        let b = alg.bracket(ix, iv);
        assert_eq!(b[iz], Expr::param("m"));
        // [t, c] = a + 2ik Z (real Bargmann parameterization of the
        // pseudo-extension; Z acts as i on equivariant functions).
        let it = alg.index_of("t").unwrap();
        let ic = alg.index_of("c").unwrap();
        let ia = alg.index_of("a").unwrap();
        let b = alg.bracket(it, ic);
        assert_eq!(b[ia], Expr::one());
        assert_eq!(b[iz], Expr::param("k").mul(&Expr::i()).scale(2, 1));
        // antisymmetry through the accessor
        let b2 = alg.bracket(ic, it);
        assert_eq!(b2[ia], Expr::int(-1));
    }
}
