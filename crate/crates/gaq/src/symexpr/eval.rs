//! Floating evaluation of normal forms at complex points.

use super::poly::{NAtom, NPoly};
use super::Expr;
use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("pole or undefined value at `{0}`")]
    Pole(String),
    #[error("opaque function `{0}` cannot be evaluated numerically")]
    Opaque(String),
}

/// Numeric assignment for coordinates and parameters.
#[derive(Clone, Debug, Default)]
pub struct EvalPoint {
    pub coords: BTreeMap<String, Complex64>,
    pub params: BTreeMap<String, Complex64>,
}

impl EvalPoint {
    pub fn coord(mut self, name: &str, v: f64) -> Self {
        self.coords.insert(name.into(), Complex64::new(v, 0.0));
        self
    }

    pub fn param(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.into(), Complex64::new(v, 0.0));
        self
    }
}

const POLE_MAG: f64 = 1e12;

pub fn eval_nf(p: &NPoly, point: &EvalPoint) -> Result<Complex64, EvalError> {
    let mut sum = Complex64::new(0.0, 0.0);
    for (mono, coeff) in &p.0 {
        let mut term = coeff.to_complex64();
        for (atom, expo) in &mono.0 {
            let base = eval_atom(atom, point)?;
            let e = eval_nf(expo, point)?;
            let v = cpow(base, e, atom)?;
            term *= v;
        }
        if !term.re.is_finite() || !term.im.is_finite() {
            return Err(EvalError::Pole("overflow".into()));
        }
        sum += term;
    }
    if sum.norm() > POLE_MAG {
        return Err(EvalError::Pole("magnitude blow-up".into()));
    }
    Ok(sum)
}

fn cpow(base: Complex64, expo: Complex64, atom: &NAtom) -> Result<Complex64, EvalError> {
    if base.norm() == 0.0 {
        if expo.im == 0.0 && expo.re > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(EvalError::Pole(format!("{atom:?}^({expo})")));
    }
    if expo.im == 0.0 && expo.re.fract() == 0.0 && expo.re.abs() < 64.0 {
        return Ok(base.powi(expo.re as i32));
    }
    let v = base.powc(expo);
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Pole(format!("{atom:?}^({expo})")))
    }
}

fn eval_atom(atom: &NAtom, point: &EvalPoint) -> Result<Complex64, EvalError> {
    match atom {
        NAtom::Coord(n) => point
            .coords
            .get(n)
            .copied()
            .ok_or_else(|| EvalError::Unbound(n.clone())),
        NAtom::Param(n) => point
            .params
            .get(n)
            .copied()
            .ok_or_else(|| EvalError::Unbound(n.clone())),
        NAtom::Exp(u) => {
            let v = eval_nf(u, point)?.exp();
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(EvalError::Pole("exp overflow".into()))
            }
        }
        NAtom::Log(u) => {
            let v = eval_nf(u, point)?;
            if v.norm() == 0.0 {
                return Err(EvalError::Pole("log(0)".into()));
            }
            Ok(v.ln())
        }
        NAtom::RatPow(r) => Ok(Complex64::new(super::rat_to_f64(r), 0.0)),
        NAtom::SumPow(u) => eval_nf(u, point),
        NAtom::Opaque { name, .. } => Err(EvalError::Opaque(name.clone())),
    }
}

/// Evaluate an expression at a numeric point.
pub fn eval_expr(e: &Expr, point: &EvalPoint) -> Result<Complex64, EvalError> {
    eval_nf(&e.to_nf(), point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Expr;

    #[test]
    fn evaluates_products_and_poles() {
        let e = Expr::coord("q").mul(&Expr::coord("p"));
        let pt = EvalPoint::default().coord("q", 2.0).coord("p", 3.0);
        assert_eq!(eval_expr(&e, &pt).unwrap().re, 6.0);

        let inv = Expr::one().div(&Expr::coord("q"));
        let origin = EvalPoint::default().coord("q", 0.0);
        assert!(matches!(eval_expr(&inv, &origin), Err(EvalError::Pole(_))));

        let unbound = eval_expr(&Expr::coord("z"), &EvalPoint::default());
        assert!(matches!(unbound, Err(EvalError::Unbound(_))));
    }

    #[test]
    fn evaluates_symbolic_power() {
        // (1+c*cs)^(-1) at c=cs=1 -> 0.5
        let base = Expr::one().add(&Expr::coord("c").mul(&Expr::coord("cs")));
        let e = base.pow(&Expr::int(-1));
        let pt = EvalPoint::default().coord("c", 1.0).coord("cs", 1.0);
        assert!((eval_expr(&e, &pt).unwrap().re - 0.5).abs() < 1e-12);
    }
}
