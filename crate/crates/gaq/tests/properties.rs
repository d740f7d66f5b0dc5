//! Property tests of the expression core and the operator algebra:
//! Leibniz on random trees, print/parse round-trips, idempotent
//! normalization, and agreement of the symbolic and numeric equality
//! routes on a large sample.

use gaq::symexpr::{
    equal_seeded, expr_to_string, parse, CoordDecl, Expr, ParamAssumption, ParamDomain, Scope,
};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scope() -> Scope {
    Scope::new(
        vec![CoordDecl::new("q"), CoordDecl::new("p")],
        vec![ParamAssumption::new("hbar", ParamDomain::Positive)],
    )
}

/// Random expression trees over (q, p, hbar); exponents kept small and
/// denominators simple so the numeric route stays far from poles.
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-3i64..=3).prop_map(Expr::int),
        (1i64..=3).prop_map(|d| Expr::ratio(1, d)),
        Just(Expr::coord("q")),
        Just(Expr::coord("p")),
        Just(Expr::param("hbar")),
        Just(Expr::i()),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner.clone(), 2u32..=3).prop_map(|(a, n)| a.pow(&Expr::int(n as i64))),
            inner.clone().prop_map(|a| Expr::Sin(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Cos(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Exp(Box::new(a.scale(1, 4)))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn leibniz_rule_on_random_trees(e in arb_expr(), f in arb_expr()) {
        let s = scope();
        let lhs = e.mul(&f).diff("q");
        let rhs = e.diff("q").mul(&f).add(&e.mul(&f.diff("q")));
        match equal_seeded(&lhs, &rhs, &s, 0xa11ce) {
            Ok(ok) => prop_assert!(ok, "Leibniz failed on {e} * {f}"),
            Err(_) => {} // pole-saturated sample; nothing to decide
        }
    }

    #[test]
    fn diff_is_linear(e in arb_expr(), f in arb_expr()) {
        let s = scope();
        let lhs = e.add(&f).diff("p");
        let rhs = e.diff("p").add(&f.diff("p"));
        if let Ok(ok) = equal_seeded(&lhs, &rhs, &s, 0xa11cf) {
            prop_assert!(ok);
        }
    }

    #[test]
    fn normalize_is_structurally_idempotent(e in arb_expr()) {
        let n1 = e.normalize();
        let n2 = n1.normalize();
        prop_assert_eq!(n1, n2);
    }

    #[test]
    fn print_parse_round_trip(e in arb_expr()) {
        let s = scope();
        let printed = expr_to_string(&e.normalize());
        let back = parse(&printed, &s).expect("printer output parses");
        match equal_seeded(&e, &back, &s, 0xbeef) {
            Ok(ok) => prop_assert!(ok, "round trip drifted: {printed}"),
            Err(_) => {}
        }
    }
}

/// The symbolic and numeric equality routes agree on a large random
/// sample: whenever normalization proves two expressions equal, sampling
/// confirms it, and rewrite-equivalent pairs are accepted by both routes.
#[test]
fn symbolic_and_numeric_routes_agree() {
    let s = scope();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0usize;
    for round in 0..1000u64 {
        let e = random_expr(&mut rng, 0);
        // an algebraically rewritten copy: (e + q) - q, doubled and halved
        let q = Expr::coord("q");
        let rewritten = e.add(&q).sub(&q).scale(2, 1).scale(1, 2);
        let sym_zero = e.sub(&rewritten).is_zero();
        let verdict = match equal_seeded(&e, &rewritten, &s, 1000 + round) {
            Ok(v) => v,
            Err(_) => continue,
        };
        assert!(verdict, "numeric route rejected a rewrite of {e}");
        if sym_zero {
            checked += 1;
        }
        // a genuinely different expression must be rejected
        let different = e.add(&Expr::one());
        if let Ok(v) = equal_seeded(&e, &different, &s, 2000 + round) {
            assert!(!v, "numeric route confused {e} with {e} + 1");
        }
    }
    assert!(checked > 800, "symbolic route decided only {checked}/1000");
}

/// Central-difference oracle for the differentiation core: the symbolic
/// derivative of a random tree must match the numeric slope of the tree
/// itself (the oracle never touches the `diff` code path).
#[test]
fn symbolic_derivative_matches_central_difference() {
    use gaq::symexpr::{eval_expr, EvalPoint};
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let eps = 1e-6;
    let mut checked = 0usize;
    for _ in 0..300 {
        let e = random_expr(&mut rng, 0);
        let d = e.diff("q");
        let q0: f64 = rng.gen_range(-0.9..0.9);
        let p0: f64 = rng.gen_range(-0.9..0.9);
        let at = |q: f64| -> Option<f64> {
            let pt = EvalPoint::default()
                .coord("q", q)
                .coord("p", p0)
                .param("hbar", 1.3);
            eval_expr(&e, &pt).ok().map(|v| v.re)
        };
        let (Some(plus), Some(minus)) = (at(q0 + eps), at(q0 - eps)) else {
            continue;
        };
        let fd = (plus - minus) / (2.0 * eps);
        let pt = EvalPoint::default()
            .coord("q", q0)
            .coord("p", p0)
            .param("hbar", 1.3);
        let Ok(sym) = eval_expr(&d, &pt) else { continue };
        let scale = 1f64.max(sym.norm()).max(fd.abs());
        assert!(
            (fd - sym.re).abs() < 1e-4 * scale,
            "diff oracle mismatch on {e}: fd {fd}, symbolic {}",
            sym.re
        );
        checked += 1;
    }
    assert!(checked > 200, "only {checked}/300 samples evaluated");
}

fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth >= 3 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..5) {
            0 => Expr::int(rng.gen_range(-3..=3)),
            1 => Expr::coord("q"),
            2 => Expr::coord("p"),
            3 => Expr::param("hbar"),
            _ => Expr::ratio(1, rng.gen_range(1..=4)),
        };
    }
    let a = random_expr(rng, depth + 1);
    let b = random_expr(rng, depth + 1);
    match rng.gen_range(0..5) {
        0 => a.add(&b),
        1 => a.mul(&b),
        2 => a.pow(&Expr::int(2)),
        3 => Expr::Sin(Box::new(a)),
        _ => Expr::Exp(Box::new(a.scale(1, 4))),
    }
}
