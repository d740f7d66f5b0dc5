//! Every registry specification passes its axioms symbolically and at
//! 100 random points, pinned or not.

use gaq::group_model::{
    registry_get, verify_cocycle, verify_group_axioms, GroupSpec, RegistryEntry,
};
use gaq::lie_structure::{jacobi_check, table_from_algebra};
use num_rational::BigRational;
use std::collections::BTreeMap;

fn group(name: &str) -> GroupSpec {
    match registry_get(name).unwrap() {
        RegistryEntry::Group(g) => g,
        _ => panic!(),
    }
}

#[test]
fn all_registry_groups_pass_axioms_at_100_points() {
    for name in gaq::group_model::GROUP_NAMES {
        let spec = group(name);
        let axioms = verify_group_axioms(&spec, 100, 4242);
        assert!(axioms.all_passed(), "{name}: {:#?}", axioms.checks);
        for c in &axioms.checks {
            assert!(c.trials >= 100, "{name}/{}: only {} trials", c.name, c.trials);
            assert_ne!(c.symbolic, Some(false), "{name}/{}", c.name);
        }
        let coc = verify_cocycle(&spec, 100, 4242);
        assert!(coc.passed(), "{name}: {coc:#?}");
    }
}

#[test]
fn su2_axioms_hold_with_unpinned_integer_spin() {
    // the sampler keeps 2j on the integer lattice, so the unpinned spec
    // still verifies end to end
    let spec = group("su2");
    let coc = verify_cocycle(&spec, 60, 77);
    let sv = coc.single_valuedness.as_ref().unwrap();
    assert!(coc.passed(), "{coc:#?}");
    assert!(sv.branch_events > 0);
}

#[test]
fn pinned_registry_variants_pass() {
    let mut pins = BTreeMap::new();
    pins.insert("hbar".to_string(), BigRational::new(1.into(), 3.into()));
    let spec = group("heisenberg-weyl").with_pins(&pins);
    assert!(verify_group_axioms(&spec, 100, 5).all_passed());

    let mut pins = BTreeMap::new();
    pins.insert("j".to_string(), BigRational::new(3.into(), 2.into()));
    let spec = group("su2").with_pins(&pins);
    assert!(verify_group_axioms(&spec, 100, 5).all_passed());
    assert!(verify_cocycle(&spec, 100, 5).passed());
}

#[test]
fn schrodinger_algebra_satisfies_jacobi_for_symbolic_k() {
    let alg = match registry_get("schrodinger-algebra").unwrap() {
        RegistryEntry::Algebra(a) => a,
        _ => panic!(),
    };
    assert!(jacobi_check(&table_from_algebra(&alg)).passed);
}
