mod common;

use matfact::factorization::{MatrixFactorization, MfMorphism};
use matfact::homotopy::{find_homotopy, HomotopyResult};
use matfact::suite::{base_objects, derived_objects, fermat_koszul};
use matfact::{Field, Polynomial};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn every_suite_object_verifies() {
    for o in derived_objects().unwrap() {
        let v = o.mf.verify();
        assert!(v.ok, "{} over {}: {:?}", o.name, o.w_label, v.residuals);
    }
}

#[test]
fn shift_twice_is_identity() {
    for o in derived_objects().unwrap() {
        assert_eq!(o.mf.shift().shift(), o.mf, "{} over {}", o.name, o.w_label);
    }
}

#[test]
fn koszul_rejects_wrong_sum() {
    let w = Polynomial::parse("x1^2 + x2^2", 2, Field::Rational).unwrap();
    let x = Polynomial::parse("x1", 2, Field::Rational).unwrap();
    match MatrixFactorization::koszul(w, &[(x.clone(), x)]) {
        Err(matfact::Error::KoszulResidual { residual }) => assert_eq!(residual.to_string(), "x2^2"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn koszul_ranks() {
    assert_eq!(fermat_koszul(2, 2).rank(), 2);
    assert_eq!(fermat_koszul(3, 3).rank(), 4);
}

#[test]
fn corrupted_entry_is_located() {
    let p = fermat_koszul(2, 2);
    let mut p0 = p.p0().clone();
    p0.set(0, 1, Polynomial::parse("x2 + 1", 2, Field::Rational).unwrap());
    let bad = MatrixFactorization::ungraded(p.w().clone(), p0, p.p1().clone()).unwrap();
    let v = bad.verify();
    assert!(!v.ok);
    assert!(v.residuals.iter().all(|r| r.row >= 1 && r.col >= 1));
    assert!(bad.ensure_verified().is_err());
}

#[test]
fn json_round_trip() {
    for o in base_objects() {
        let json = serde_json::to_string(&o.mf.to_json()).unwrap();
        let back = MatrixFactorization::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, o.mf);
    }
}

#[test]
fn standard_triangles_compose_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for o in base_objects() {
        for _ in 0..3 {
            let phi = common::random_chain_map(&o.mf, &o.mf, &mut rng);
            let t = MatrixFactorization::cone(&phi).unwrap();
            assert!(t.cone.verify().ok);
            for comp in [t.phi.then(&t.psi).unwrap(), t.psi.then(&t.xi).unwrap()] {
                assert!(comp.chain_residuals().is_empty());
                assert!(
                    matches!(find_homotopy(&comp, None).unwrap(), HomotopyResult::Found(_)),
                    "{} over {}",
                    o.name,
                    o.w_label
                );
            }
        }
    }
}

#[test]
fn cone_rejects_non_chain_maps() {
    let p = &base_objects()[0].mf;
    let mut phi = MfMorphism::identity(p);
    phi.phi1 = phi.phi1.scale(&Field::Rational.from_i64(2));
    assert!(MatrixFactorization::cone(&phi).is_err());
}

#[test]
fn direct_sum_with_zero_object() {
    let p = &base_objects()[3].mf;
    let z = MatrixFactorization::zero(p.w().clone()).unwrap();
    assert_eq!(p.direct_sum(&z).unwrap().rank(), p.rank());
}
