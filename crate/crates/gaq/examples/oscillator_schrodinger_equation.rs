//! Configuration space from a higher-order polarization: the oscillator
//! group has no real full+symplectic first-order polarization, but the
//! second-order family {X_t - (i hbar/2m) X_x^2, X_p} closes, its
//! equations solve to psi = zeta e^{-ipx/2hbar} Phi(t, x), and the
//! residual equation on Phi is the harmonic-oscillator Schrödinger
//! equation, verified numerically on the Hermite solutions.
//!
//! Run with: `cargo run --example oscillator_schrodinger_equation`

use gaq::enveloping::{check_ho_polarization, PbwAlgebra};
use gaq::group_model::{registry_get, RegistryEntry};
use gaq::lie_structure::structure_constants;
use gaq::representations::{apply_polarization, hermite_residual_check, registry_scenario};
use num_rational::BigRational;

fn main() {
    let spec = match registry_get("harmonic-oscillator").unwrap() {
        RegistryEntry::Group(g) => g,
        _ => unreachable!(),
    };

    // closure of the second-order family
    let table = structure_constants(&spec, true).unwrap();
    let alg = PbwAlgebra::new(table);
    let family = vec![
        alg.parse_poly("L_t - (i*hbar/(2*m))*L_x^2").unwrap(),
        alg.parse_poly("L_p").unwrap(),
    ];
    let verdict = check_ho_polarization(&alg, &family).unwrap();
    println!("P^HO_x closes: {}", verdict.closes);
    for r in &verdict.records {
        println!("  pair {:?}: residue {}", r.pair, r.residue_rendered);
    }

    // solve the polarization equations
    let (ansatz, ops) = registry_scenario(&spec, "PHOx").unwrap();
    println!("ansatz prefactor: {}", ansatz.prefactor);
    println!("reduced coordinates: {:?}", ansatz.reduced_coords);
    let residuals = apply_polarization(&spec, &ops, &ansatz).unwrap();
    for r in &residuals {
        if r.solved() {
            println!("  [{}] psi = 0 solved exactly", r.operator);
        } else {
            println!("  [{}] residual equation on Phi:", r.operator);
            println!("      {} = 0", r.expr);
            println!("      (multiply by i*hbar: the Schrödinger equation)");
        }
    }

    // Hermite solutions annihilate the residual
    let one = BigRational::from_integer(1.into());
    let xs: Vec<f64> = (0..41).map(|k| -4.0 + 0.2 * k as f64).collect();
    let ts = vec![0.0, 0.5];
    println!("\nHermite levels (hbar = m = omega = 1):");
    println!("{:>3} {:>14} {:>8} {:>8}", "n", "max residual", "energy", "expect");
    for n in 0..=5 {
        let rep = hermite_residual_check(n, &one, &one, &one, &xs, &ts).unwrap();
        println!(
            "{:>3} {:>14.3e} {:>8.3} {:>8.3}",
            n, rep.max_residual, rep.energy, rep.expected_energy
        );
    }
}
