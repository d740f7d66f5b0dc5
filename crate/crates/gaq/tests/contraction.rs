//! Group contraction: the harmonic-oscillator law degenerates to the
//! Galilei-type law as omega -> 0, checked as a numeric limit (the law is
//! smooth in omega; pinning omega = 0 directly would hit the removable
//! 0/0 in the sin(omega t)/omega terms).

use gaq::group_model::{registry_get, GroupSpec, RegistryEntry};
use gaq::symexpr::EvalPoint;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn oscillator() -> GroupSpec {
    match registry_get("harmonic-oscillator").unwrap() {
        RegistryEntry::Group(g) => g,
        _ => unreachable!(),
    }
}

#[test]
fn oscillator_contracts_to_galilei() {
    let spec = oscillator();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let omega = 1e-6;
    let hbar = 1.0;
    let m = 1.3;
    let mut params = EvalPoint::default();
    params.params.insert("omega".into(), Complex64::new(omega, 0.0));
    params.params.insert("hbar".into(), Complex64::new(hbar, 0.0));
    params.params.insert("m".into(), Complex64::new(m, 0.0));

    for _ in 0..50 {
        let g1: Vec<Complex64> = (0..3)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        let g2: Vec<Complex64> = (0..3)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        let (t1, x1, p1) = (g1[0].re, g1[1].re, g1[2].re);
        let (t2, x2, p2) = (g2[0].re, g2[1].re, g2[2].re);

        let law = spec.law_value(&g1, &g2, &params).unwrap();
        // Galilei limit: t'' = t' + t, x'' = x + x' + (p'/m) t,
        // p'' = p + p'.
        assert!((law[0].re - (t1 + t2)).abs() < 1e-4);
        assert!((law[1].re - (x2 + x1 + p1 * t2 / m)).abs() < 1e-4);
        assert!((law[2].re - (p2 + p1)).abs() < 1e-4);

        // Cocycle limit: the free-particle exponent
        // (x' p - p' x + p' p t / m) / (2 hbar).
        let xi = spec.xi_value(&g1, &g2, &params).unwrap();
        let want = (x1 * p2 - p1 * x2 + p1 * p2 * t2 / m) / (2.0 * hbar);
        assert!(
            (xi.re - want).abs() < 1e-4,
            "xi limit: got {}, want {want}",
            xi.re
        );
    }
}
