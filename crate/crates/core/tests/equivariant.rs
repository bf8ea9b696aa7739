use matfact::equivariant::{
    enumerate_structures, equivariant_hom_space, forget, hom_space_component, is_equivariant_map, isotypic_decompose,
    reynolds, EquivariantStructure,
};
use matfact::homotopy::hom_space;
use matfact::oracle;
use matfact::suite::{an_object, diagonal_action, fermat_koszul};

fn suites() -> Vec<Vec<EquivariantStructure>> {
    let mut out = Vec::new();
    for n in 2..=4u32 {
        let act = diagonal_action(n, 1);
        let mut all = Vec::new();
        for k in 1..n {
            all.extend(enumerate_structures(&an_object(n, k), &act).unwrap().structures);
        }
        out.push(all);
    }
    out.push(enumerate_structures(&fermat_koszul(3, 3), &diagonal_action(3, 3)).unwrap().structures);
    out
}

#[test]
fn structure_counts_match_exhaustive_enumeration() {
    for n in 2..=6u32 {
        let act = diagonal_action(n, 1);
        let mut total = 0;
        for k in 1..n {
            let p = an_object(n, k);
            let en = enumerate_structures(&p, &act).unwrap();
            assert_eq!(en.structures.len(), n as usize);
            let brute = oracle::assignments(&p, &act);
            let found: Vec<_> = en.structures.iter().map(|e| (e.chars0().to_vec(), e.chars1().to_vec())).collect();
            let mut sorted = found.clone();
            sorted.sort();
            assert_eq!(sorted, brute);
            total += found.len();
        }
        assert_eq!(total, (n * (n - 1)) as usize);
    }
    let p = fermat_koszul(3, 3);
    let act = diagonal_action(3, 3);
    assert_eq!(enumerate_structures(&p, &act).unwrap().structures.len(), oracle::count_structures_exhaustive(&p, &act));
}

#[test]
fn reynolds_is_the_projector_onto_equivariant_maps() {
    for suite in suites() {
        for e in &suite {
            for f in &suite {
                let h = hom_space(e.base(), f.base(), None).unwrap();
                for (_, z) in h.cycle_basis() {
                    let pi = reynolds(&z, e, f).unwrap();
                    assert_eq!(reynolds(&pi, e, f).unwrap(), pi);
                    assert!(is_equivariant_map(&pi, e, f).unwrap());
                    assert_eq!(pi == z, is_equivariant_map(&z, e, f).unwrap());
                }
            }
        }
    }
}

#[test]
fn invariant_part_has_two_computations() {
    for suite in suites() {
        for e in &suite {
            for f in &suite {
                let h = hom_space(e.base(), f.base(), None).unwrap();
                let dec = isotypic_decompose(&h, e, f).unwrap();
                let inv = equivariant_hom_space(e, f, None).unwrap();
                let zero = e.action().zero_character();
                assert_eq!(inv.total, dec.dimension_of(&zero));
                for chi in e.action().characters() {
                    let comp = hom_space_component(e, f, &chi, None).unwrap();
                    assert_eq!(comp.total, dec.dimension_of(&chi));
                }
                assert_eq!(dec.total, h.total);
            }
        }
    }
}

#[test]
fn twists_sum_to_the_full_hom() {
    for suite in suites() {
        for e in &suite {
            for f in &suite {
                let full = hom_space(e.base(), f.base(), None).unwrap().total;
                let sum: usize = e
                    .action()
                    .characters()
                    .iter()
                    .map(|chi| equivariant_hom_space(e, &f.twist(chi).unwrap(), None).unwrap().total)
                    .sum();
                assert_eq!(sum, full);
            }
        }
    }
}

#[test]
fn trivial_group_changes_nothing() {
    let p = an_object(4, 1);
    let act = matfact::action::GroupAction::trivial(1);
    let en = enumerate_structures(&p, &act).unwrap();
    assert_eq!(en.structures.len(), 1);
    let e = &en.structures[0];
    assert_eq!(equivariant_hom_space(e, e, None).unwrap().report(), hom_space(&p, &p, None).unwrap().report());
    assert_eq!(forget(e), p);
}
