//! The spin-j representation built from the reduced right actions on the
//! holomorphic wave functions: dimension 2j+1, ladder matrices, Casimir
//! j(j+1), and exact adjointness with respect to the invariant measure.
//!
//! Run with: `cargo run --example su2_spin_matrices`

use gaq::representations::{check_adjointness, su2_rep_matrices, Matrix};
use num_rational::BigRational;

fn show(name: &str, m: &Matrix) {
    println!("  {name}:");
    for row in m {
        let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
        println!("    [ {} ]", cells.join(", "));
    }
}

fn main() {
    for (num, den) in [(1i64, 2i64), (1, 1), (3, 2)] {
        let j = BigRational::new(num.into(), den.into());
        let rep = su2_rep_matrices(&j).unwrap();
        println!("== j = {num}/{den} (dimension {})", rep.dim);
        println!("  reduced X^R_eta : {}", rep.reduced_eta.render());
        println!("  reduced X^R_c   : {}", rep.reduced_c.render());
        println!("  reduced X^R_c*  : {}", rep.reduced_cstar.render());
        show("J0", &rep.j0);
        show("J+", &rep.j_plus);
        show("J-", &rep.j_minus);
        show("Casimir", &rep.casimir);
        println!(
            "  weights <c^l, c^l>: {}",
            rep.weights
                .iter()
                .map(|w| w.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
        println!("  adjointness J+^dagger = J-: {}", check_adjointness(&rep).is_ok());
        println!("  {}", rep.weight_note);
        println!();
    }

    // non-integral 2j is rejected, mirroring the cocycle integrality
    let err = su2_rep_matrices(&BigRational::new(3.into(), 10.into())).unwrap_err();
    println!("j = 3/10 -> {err}");
}
