//! Derive left- and right-invariant vector fields from a group law and
//! check the standard commutation relations mechanically.
//!
//! Run with: `cargo run --example invariant_fields`

use gaq::group_model::{registry_get, RegistryEntry};
use gaq::invariant_calculus::{field_commutator, left_fields, right_fields};
use gaq::lie_structure::{jacobi_check, structure_constants};

fn main() {
    for name in ["heisenberg-weyl", "harmonic-oscillator", "su2"] {
        let spec = match registry_get(name).unwrap() {
            RegistryEntry::Group(g) => g,
            _ => unreachable!(),
        };
        println!("== {name}");
        for f in left_fields(&spec) {
            println!("  X^L_{:<4} = {}", f.label, f.render(&spec));
        }
        for f in right_fields(&spec) {
            println!("  X^R_{:<4} = {}", f.label, f.render(&spec));
        }

        // the full bracket table, solved back onto the invariant basis
        let table = structure_constants(&spec, true).unwrap();
        println!("  left brackets:");
        for i in 0..table.dim() {
            for j in (i + 1)..table.dim() {
                let mut parts = Vec::new();
                for k in 0..table.dim() {
                    if !table.c[i][j][k].is_zero() {
                        parts.push(format!("({}) X_{}", table.c[i][j][k], table.names[k]));
                    }
                }
                if !table.charge[i][j].is_zero() {
                    parts.push(format!("({}) X0", table.charge[i][j]));
                }
                if !parts.is_empty() {
                    println!(
                        "    [X_{}, X_{}] = {}",
                        table.names[i],
                        table.names[j],
                        parts.join(" + ")
                    );
                }
            }
        }
        println!("  Jacobi: {}", jacobi_check(&table).passed);

        // left and right translations commute
        let lf = left_fields(&spec);
        let rf = right_fields(&spec);
        let all_commute = lf.iter().all(|l| {
            rf.iter().all(|r| {
                let b = field_commutator(&spec, l, r);
                b.extended()
                    .iter()
                    .all(|e| gaq::symexpr::is_zero_expr(e, &spec.extended_scope()).unwrap_or(false))
            })
        });
        println!("  [X^L, X^R] = 0: {all_commute}");
        println!();
    }
}
