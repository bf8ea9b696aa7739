#![allow(dead_code)]

use matfact::factorization::{MatrixFactorization, MfMorphism};
use matfact::homotopy::hom_space;
use matfact::Polynomial;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random homogeneous chain map `P -> Q`: a random combination of the
/// cycle basis in one randomly chosen degree of the support window.
pub fn random_chain_map(p: &MatrixFactorization, q: &MatrixFactorization, rng: &mut ChaCha8Rng) -> MfMorphism {
    let h = hom_space(p, q, None).unwrap();
    let cycles = h.cycle_basis();
    let mut degrees: Vec<i64> = cycles.iter().map(|(d, _)| *d).collect();
    degrees.dedup();
    let mut out = MfMorphism::zero(p, q).unwrap();
    if degrees.is_empty() {
        return out;
    }
    let d = degrees[rng.gen_range(0..degrees.len())];
    for (_, z) in cycles.iter().filter(|(e, _)| *e == d) {
        let c: i64 = rng.gen_range(-3..=3);
        out = out.checked_add(&z.mul_poly(&Polynomial::from_i64(p.nvars(), p.field(), c))).unwrap();
    }
    out
}

/// A random odd map `(t0, t1)` of a random degree in the support window,
/// with small integer coefficients, and its boundary `D(t)`.
pub fn random_null_homotopic(
    p: &MatrixFactorization,
    q: &MatrixFactorization,
    rng: &mut ChaCha8Rng,
) -> (matfact::factorization::Homotopy, MfMorphism) {
    use matfact::homotopy::{HomPair, Indexer, Parity, Window};
    let pair = HomPair::new(p, q).unwrap();
    let s = matfact::homotopy::hom_support(p, q).unwrap().unwrap();
    let d = rng.gen_range(s.lo..=s.hi);
    let space = pair.space(Parity::Odd, Window::Degree(d), None).unwrap();
    let ix = Indexer::seeded(&space);
    let v = matfact::linalg::from_pairs(
        (0..space.len()).map(|i| (i, p.field().from_i64(rng.gen_range(-3..=3)))),
    );
    let (t0, t1) = pair.matrices_of(Parity::Odd, &v, &ix);
    let h = matfact::factorization::Homotopy { t0, t1 };
    let phi = h.boundary(p, q).unwrap();
    (h, phi)
}
