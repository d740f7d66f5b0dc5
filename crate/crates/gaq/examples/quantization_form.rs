//! The quantization 1-form: derived from the cocycle gradient at
//! `g' = g^{-1}`, cross-checked against the dual coframe, with its
//! curvature, Noether invariants, and the symplectic normal form
//! (Darboux pairs, kernel, partial complex structure J).
//!
//! Run with: `cargo run --example quantization_form`

use gaq::group_model::{registry_get, RegistryEntry};
use gaq::invariant_calculus::{
    curvature, dual_forms, noether_invariants, quantization_form, sigma_normal_form,
};

fn main() {
    for name in ["heisenberg-weyl", "harmonic-oscillator", "su2"] {
        let spec = match registry_get(name).unwrap() {
            RegistryEntry::Group(g) => g,
            _ => unreachable!(),
        };
        println!("== {name}");
        let duals = dual_forms(&spec).unwrap();
        for f in &duals.forms {
            println!("  theta^L_{:<4} = {}", f.label, f.render(&spec));
        }
        let theta = quantization_form(&spec).unwrap();
        println!("  Theta  = {}", theta.render(&spec));
        let sigma = curvature(&spec, &theta);
        println!("  dTheta = {}", sigma.render(&spec));

        for (label, e) in noether_invariants(&spec).unwrap() {
            println!("  F_{label:<4} = {e}");
        }

        let nf = sigma_normal_form(&spec).unwrap();
        for (a, b, nu) in nf.pair_labels() {
            println!("  Darboux pair ({a}, {b}) with nu = {nu}");
        }
        println!("  kernel: {}", nf.kernel_labels().join(", "));
        println!("  J = {}", nf.j_tensor());
        if !nf.conditions.is_empty() {
            println!("  assuming: {}", nf.conditions.join("; "));
        }
        println!();
    }
}
