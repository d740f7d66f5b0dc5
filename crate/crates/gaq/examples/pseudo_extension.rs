//! Pseudo-extensions: adding the coboundary generated by the linear
//! function with gradient lambda0 shifts the quantization 1-form by
//! lambda0_i theta^L_i (modulo an exact term) and redefines the right
//! generators by lambda0_i X0. Starting from the trivial product
//! SU(2) x U(1), the gradient lambda0_eta = 2j reproduces the spin-j
//! curvature.
//!
//! Run with: `cargo run --example pseudo_extension`

use gaq::group_model::{registry_get, RegistryEntry};
use gaq::invariant_calculus::{curvature, quantization_form};
use gaq::lie_structure::pseudo_extend;
use gaq::symexpr::{equal, Expr};

fn main() {
    let su2 = match registry_get("su2").unwrap() {
        RegistryEntry::Group(g) => g,
        _ => unreachable!(),
    };
    let mut trivial = su2.clone();
    trivial.cocycle = Expr::zero();

    let lambda0 = vec![Expr::param("j").scale(2, 1), Expr::zero(), Expr::zero()];
    let ext = pseudo_extend(&trivial, &lambda0).unwrap();
    println!("Theta' = {}", ext.theta_prime.render(&trivial));
    println!(
        "dTheta_lambda (direct)    = {}",
        ext.d_theta_lambda_direct.render(&trivial)
    );
    println!(
        "dTheta_lambda (structure) = {}",
        ext.d_theta_lambda_structure.render(&trivial)
    );

    // the two routes agree, and the curvature equals the registry one
    let scope = su2.extended_scope();
    let registry_theta = quantization_form(&su2).unwrap();
    let d_reg = curvature(&su2, &registry_theta);
    let d_ext = curvature(&trivial, &ext.theta_prime);
    let mut all_equal = true;
    for (idx, e) in &d_reg.comps {
        if !equal(e, &d_ext.component(idx), &scope).unwrap_or(false) {
            all_equal = false;
        }
    }
    println!("curvature matches the registry spin-j extension: {all_equal}");

    for f in &ext.redefined_right_fields {
        println!("  redefined {}", f.render(&trivial));
    }
    println!();
    println!("the pseudo-cohomology class (the coadjoint orbit through lambda0)");
    println!("carries the spin even though H^2(SU(2), U(1)) is trivial.");
}
