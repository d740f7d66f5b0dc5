//! Define a group by a spec file and derive everything from it. The text
//! below is the extended Euclidean group of the plane written in the same
//! sectioned format as the files in `specs/`; nothing about it is built
//! into the engine.
//!
//! Run with: `cargo run --example custom_group_spec`

use gaq::group_model::{parse_group_spec, verify_cocycle, verify_group_axioms};
use gaq::invariant_calculus::{left_fields, quantization_form};
use gaq::lie_structure::characteristic_of_group;

const SPEC: &str = r#"
# A central extension of the abelian translation plane with a
# magnetic-type cocycle; b plays the momentum role against a.
name = translation-plane
fibre = phi

[chart]
a = -2..2
b = -2..2

[identity]
a = 0
b = 0

[law]
a'' = a' + a
b'' = b' + b

[inverse]
a = -a
b = -b

[cocycle]
xi = (B/2)*(b'*a - a'*b)

[parameters]
B = positive

[convention]
theta_factor = 1
"#;

fn main() {
    let spec = parse_group_spec("translation-plane", SPEC).unwrap();
    let axioms = verify_group_axioms(&spec, 30, gaq::engine_seed());
    println!("axioms pass: {}", axioms.all_passed());
    let coc = verify_cocycle(&spec, 30, gaq::engine_seed());
    println!("cocycle pass: {}", coc.passed());

    for f in left_fields(&spec) {
        println!("X^L_{} = {}", f.label, f.render(&spec));
    }
    let theta = quantization_form(&spec).unwrap();
    println!("Theta = {}", theta.render(&spec));

    let chars = characteristic_of_group(&spec).unwrap();
    println!(
        "characteristic subalgebra: {}",
        if chars.basis.is_empty() {
            "trivial".to_string()
        } else {
            chars.labels().join(", ")
        }
    );
}
