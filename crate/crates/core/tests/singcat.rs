mod common;

use matfact::equivariant::{enumerate_structures, forget};
use matfact::factorization::MfMorphism;
use matfact::homotopy::find_homotopy;
use matfact::oracle;
use matfact::singcat::{
    brick_change_of_basis, cok, cok_g, cok_morphism, lift_module_map, null_homotopy_factorization, stable_hom,
    two_periodicity_check, Lift,
};
use matfact::suite::{an_object, base_objects, diagonal_action, fermat_koszul};
use matfact::PolyMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn residue_field_presentation() {
    let m = cok(&an_object(2, 1));
    assert_eq!(m.presentation.to_string(), "[[x1]]");
    assert_eq!(m.annihilation_witness.to_string(), "[[x1]]");
    assert!(m.annihilated_by_w());
    assert_eq!(cok(&an_object(5, 2)).presentation.to_string(), "[[x1^3]]");
    let id = cok_morphism(&MfMorphism::identity(&an_object(3, 1)));
    assert_eq!(id.matrix, PolyMatrix::identity(1, 1, id.matrix.field()));
}

#[test]
fn cokernel_of_sum_is_block_sum() {
    let (p, q) = (an_object(4, 1), an_object(4, 3));
    let s = cok(&p.direct_sum(&q).unwrap());
    assert_eq!(s.presentation, PolyMatrix::direct_sum(&cok(&p).presentation, &cok(&q).presentation).unwrap());
    // the shift presents the cokernel of the other matrix, up to sign
    assert_eq!(cok(&p.shift()).presentation, p.p0().neg());
}

#[test]
fn periodicity_ranks_match_dense_oracle() {
    let p = fermat_koszul(2, 2);
    let ws = p.weights().unwrap().clone();
    let report = two_periodicity_check(&p, Some((-3, 4))).unwrap();
    assert!(report.all_exact);
    for row in &report.rows {
        let dense = oracle::periodicity_ranks(&p, &ws.weights, row.degree);
        assert_eq!(
            (row.rank_p1, row.rank_p0_mod_w, row.rank_p1_mod_w),
            (dense.rank_p1, dense.rank_p0_mod_w, dense.rank_p1_mod_w),
            "degree {}",
            row.degree
        );
    }
}

#[test]
fn every_suite_resolution_is_exact() {
    for o in base_objects() {
        let r = two_periodicity_check(&o.mf, None).unwrap();
        assert!(r.all_exact, "{} over {}", o.name, o.w_label);
        assert_eq!(r.splits, Some(false));
        let b = two_periodicity_check(&o.mf.trivial_brick(), None).unwrap();
        assert!(b.all_exact);
        assert_eq!(b.splits, Some(true));
    }
}

#[test]
fn brick_cokernel_is_free() {
    for o in base_objects() {
        let basis = brick_change_of_basis(&o.mf).unwrap();
        assert!(basis.holds_for(&o.mf.trivial_brick()));
        for s in [0, 1] {
            let brick = o.mf.trivial_brick();
            assert_eq!(stable_hom(&brick, &o.mf, s, None).unwrap().hom.total, 0);
            assert_eq!(stable_hom(&o.mf, &brick, s, None).unwrap().hom.total, 0);
        }
    }
}

#[test]
fn null_homotopic_maps_factor_through_the_brick() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for o in base_objects() {
        let p = &o.mf;
        let (n, f) = (p.nvars(), p.field());
        let r = p.rank();
        for _ in 0..3 {
            let (h, phi) = common::random_null_homotopic(p, p, &mut rng);
            let three = null_homotopy_factorization(&phi, &h).unwrap();
            assert!(three.check(&phi).ok());
            // the explicit witness for W * phi, too
            let chain = common::random_chain_map(p, p, &mut rng);
            let w = chain.mul_poly(p.w());
            let t = matfact::factorization::Homotopy {
                t0: chain.phi1.checked_mul(p.p0()).unwrap(),
                t1: PolyMatrix::zero(r, r, n, f),
            };
            assert!(null_homotopy_factorization(&w, &t).unwrap().check(&w).ok());
        }
    }
}

#[test]
fn lifting_the_zero_module_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 2..=5u32 {
        for a in 1..n {
            for b in 1..n {
                let (p, q) = (an_object(n, a), an_object(n, b));
                // q1 * X is zero on cokernels
                let k: u32 = rng.gen_range(0..3);
                let deg = b as i64 - a as i64 + k as i64;
                if deg < 0 {
                    continue;
                }
                let x = PolyMatrix::parse(&[&[format!("x1^{}", deg).as_str()]], 1, p.field()).unwrap();
                let f = q.p1().checked_mul(&x).unwrap();
                match lift_module_map(&p, &q, &f, None).unwrap() {
                    Lift::Lifted(phi) => {
                        assert!(phi.chain_residuals().is_empty());
                        assert!(find_homotopy(&phi, None).unwrap().found().is_some(), "n={n} a={a} b={b}");
                    }
                    other => panic!("{other:?}"),
                }
            }
        }
    }
}

#[test]
fn forgetting_commutes_with_cokernels() {
    for n in 2..=5u32 {
        let act = diagonal_action(n, 1);
        for k in 1..n {
            for e in enumerate_structures(&an_object(n, k), &act).unwrap().structures {
                assert_eq!(cok(&forget(&e)).presentation, cok_g(&e).presentation);
                assert_eq!(cok(&forget(&e)), cok_g(&e).forget());
            }
        }
    }
}
