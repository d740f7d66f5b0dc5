//! First-order polarization verdicts: horizontality, closure, maximality,
//! fullness and symplecticity, including the Schrödinger-algebra table
//! that motivates higher-order polarizations (no candidate is both full
//! and symplectic at k = 0).
//!
//! Run with: `cargo run --example polarizations`

use gaq::group_model::{registry_get, RegistryEntry};
use gaq::invariant_calculus::sigma_at_identity;
use gaq::lie_structure::{
    characteristic_of_algebra, characteristic_of_group, parse_elements, structure_constants,
    table_from_algebra, validate_polarization,
};
use num_rational::BigRational;
use std::collections::BTreeMap;

fn main() {
    // Heisenberg-Weyl: the configuration-space polarization and the
    // complex (Bargmann-Fock) one are both full and symplectic.
    let spec = match registry_get("heisenberg-weyl").unwrap() {
        RegistryEntry::Group(g) => g,
        _ => unreachable!(),
    };
    let table = structure_constants(&spec, true).unwrap();
    let sigma = sigma_at_identity(&spec).unwrap();
    let chars = characteristic_of_group(&spec).unwrap();
    println!("heisenberg-weyl  G_C = {}", chars.labels().join(", "));
    for set in ["L_a, L_p", "L_a, L_q", "L_a, L_q + i*mu*L_p", "L_q, L_p"] {
        let elements = parse_elements(&table, set).unwrap();
        let v = validate_polarization(&table, &sigma, &chars.basis, &elements);
        println!("  {{{set}}}");
        for (name, flag) in v.flags() {
            println!("    {name:<10} {}", flag.ok);
        }
    }
    println!();

    // Schrödinger algebra at k = 0: the anomaly at the first-order level.
    let alg = match registry_get("schrodinger-algebra").unwrap() {
        RegistryEntry::Algebra(a) => a,
        _ => unreachable!(),
    };
    let mut pins = BTreeMap::new();
    pins.insert("k".to_string(), BigRational::from_integer(0.into()));
    let alg0 = alg.with_pins(&pins);
    let table = table_from_algebra(&alg0);
    let sigma = table.sigma_matrix();
    let chars = characteristic_of_algebra(&alg0);
    println!("schrodinger-algebra (k = 0)  G_C = {}", chars.labels().join(", "));
    for set in ["L_t, L_a, L_x", "L_t, L_a, L_c"] {
        let elements = parse_elements(&table, set).unwrap();
        let v = validate_polarization(&table, &sigma, &chars.basis, &elements);
        let summary: Vec<String> = v
            .flags()
            .iter()
            .map(|(n, f)| format!("{n}={}", f.ok))
            .collect();
        println!("  {{{set}}}: {}", summary.join(" "));
    }
    println!();
    println!("neither candidate is full AND symplectic: the group is anomalous,");
    println!("and the resolution is a higher-order polarization (see anomaly_scan).");
}
