//! The configuration-space representation of the Heisenberg-Weyl group:
//! solve the polarization equations, read off the reduced operators, and
//! recover the canonical position/derivative pair with the Weyl bracket.
//!
//! Run with: `cargo run --example hw_representation`

use gaq::group_model::{registry_get, RegistryEntry};
use gaq::representations::{apply_polarization, reduce_right_action, registry_scenario};

fn main() {
    let spec = match registry_get("heisenberg-weyl").unwrap() {
        RegistryEntry::Group(g) => g,
        _ => unreachable!(),
    };

    // P_q = {X^L_a, X^L_p}: the solver derives the ansatz ...
    let (ansatz, ops) = registry_scenario(&spec, "Pq").unwrap();
    println!("psi = ({}) * Phi({})", ansatz.prefactor, ansatz.reduced_coords.join(", "));

    // ... and applying the polarization elements confirms it
    let residuals = apply_polarization(&spec, &ops, &ansatz).unwrap();
    for r in &residuals {
        println!("  [{}] residual: {}", r.operator, if r.solved() { "0".into() } else { r.expr.to_string() });
    }

    // the right actions drop to the quotient
    for gen in ["q", "p", "a"] {
        let op = reduce_right_action(&spec, &ansatz, gen).unwrap();
        println!("X^R_{gen} acts on Phi as: {}", op.render());
    }
    println!();
    println!("X^R_q -> d/dq and X^R_p -> (i/hbar) q: the Schrödinger");
    println!("representation, unitary for the measure dq obtained by");
    println!("contracting the Haar measure with the polarization.");
}
