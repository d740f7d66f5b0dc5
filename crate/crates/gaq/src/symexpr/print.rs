//! Canonical text rendering; output parses back to an `equal` expression.

use super::{CRat, Expr};
use num_traits::Signed;
use std::fmt;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", expr_to_string(self))
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    match e {
        Expr::Sum(ts) => {
            let mut out = String::new();
            for (k, t) in ts.iter().enumerate() {
                let (neg, body) = signed_term(t);
                if k == 0 {
                    if neg {
                        out.push('-');
                    }
                } else if neg {
                    out.push_str(" - ");
                } else {
                    out.push_str(" + ");
                }
                out.push_str(&body);
            }
            out
        }
        _ => {
            let (neg, body) = signed_term(e);
            if neg {
                format!("-{body}")
            } else {
                body
            }
        }
    }
}

/// Split a leading real sign off a term for pretty sums.
fn signed_term(e: &Expr) -> (bool, String) {
    match e {
        Expr::Const(c) => {
            if c.is_real() && c.re.is_negative() {
                (true, const_str(&CRat::from_rat(-c.re.clone())))
            } else {
                (false, const_str(c))
            }
        }
        Expr::Product(fs) => {
            if let Some(Expr::Const(c)) = fs.first() {
                if c.is_real() && c.re.is_negative() {
                    let pos = CRat::from_rat(-c.re.clone());
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let repr = if pos.is_one() {
                        product_str(&rest)
                    } else {
                        let mut v = vec![Expr::Const(pos)];
                        v.extend(rest);
                        product_str(&v)
                    };
                    return (true, repr);
                }
            }
            (false, product_str(fs))
        }
        other => (false, atomic_str(other, Prec::Sum)),
    }
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Sum,
    Product,
    Power,
}

fn product_str(fs: &[Expr]) -> String {
    if fs.is_empty() {
        return "1".to_string();
    }
    fs.iter()
        .map(|f| atomic_str(f, Prec::Product))
        .collect::<Vec<_>>()
        .join("*")
}

fn atomic_str(e: &Expr, ctx: Prec) -> String {
    match e {
        Expr::Const(c) => {
            let s = const_str(c);
            if ctx > Prec::Sum && (!c.is_real() || c.re.is_negative() || !c.re.is_integer()) {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Coord(n) | Expr::Param(n) => n.clone(),
        Expr::Sum(_) => format!("({})", expr_to_string(e)),
        Expr::Product(fs) => {
            let s = product_str(fs);
            if ctx > Prec::Product {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Power(b, x) => {
            let base = atomic_str(b, Prec::Power);
            let base = match **b {
                Expr::Power(_, _) | Expr::Const(_) => format!("({})", expr_to_string(b)),
                _ => base,
            };
            let expo = match **x {
                Expr::Const(ref c) if c.is_real() && c.re.is_integer() && !c.re.is_negative() => {
                    const_str(c)
                }
                Expr::Coord(ref n) | Expr::Param(ref n) => n.clone(),
                _ => format!("({})", expr_to_string(x)),
            };
            format!("{base}^{expo}")
        }
        Expr::Exp(u) => format!("exp({})", expr_to_string(u)),
        Expr::Log(u) => format!("log({})", expr_to_string(u)),
        Expr::Sin(u) => format!("sin({})", expr_to_string(u)),
        Expr::Cos(u) => format!("cos({})", expr_to_string(u)),
        Expr::Opaque { name, args, didx } => {
            let args_s = args
                .iter()
                .map(expr_to_string)
                .collect::<Vec<_>>()
                .join(", ");
            if didx.iter().all(|&d| d == 0) {
                return format!("{name}({args_s})");
            }
            // Slot derivatives over plain coordinate arguments render in
            // D-notation; anything else gets a mangled opaque name.
            let plain: Vec<Option<&str>> = args
                .iter()
                .map(|a| match a {
                    Expr::Coord(n) => Some(n.as_str()),
                    _ => None,
                })
                .collect();
            if plain.iter().all(|p| p.is_some()) {
                let mut out = format!("{name}({args_s})");
                for (k, &d) in didx.iter().enumerate() {
                    if d > 0 {
                        out = format!("D[{out}, {}, {d}]", plain[k].unwrap());
                    }
                }
                out
            } else {
                let tag: Vec<String> = didx.iter().map(|d| d.to_string()).collect();
                format!("{name}__d{}({args_s})", tag.join("_"))
            }
        }
    }
}

fn const_str(c: &CRat) -> String {
    if c.is_zero() {
        return "0".to_string();
    }
    format!("{c}")
}

#[cfg(test)]
mod tests {
    use crate::symexpr::{equal, parse::parse, CoordDecl, ParamAssumption, ParamDomain, Scope};

    fn scope() -> Scope {
        Scope::new(
            vec![
                CoordDecl::new("q"),
                CoordDecl::new("p"),
                CoordDecl::new("c"),
                CoordDecl::new("cs"),
            ],
            vec![
                ParamAssumption::new("j", ParamDomain::IntegerConstrained),
                ParamAssumption::new("hbar", ParamDomain::Positive),
            ],
        )
    }

    #[test]
    fn print_parse_round_trip() {
        let s = scope();
        for src in [
            "q*p + exp(q)",
            "(1 + c*cs)^(-j)",
            "1/2 - 3*i*q",
            "q^2/(1 + p)^3",
            "sin(q)*cos(p) - i",
            "sqrt(2)*q",
            "D[Phi(q, p), q, 2]",
            "exp(i*q)/hbar",
        ] {
            let e = parse(src, &s).unwrap();
            let printed = e.to_string();
            let back = parse(&printed, &s)
                .unwrap_or_else(|err| panic!("reparse of `{printed}` failed: {err}"));
            assert!(
                equal(&e, &back, &s).unwrap(),
                "round trip drifted: `{src}` -> `{printed}`"
            );
        }
    }
}
