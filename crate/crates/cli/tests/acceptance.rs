//! Acceptance criteria, one PASS/FAIL line each:
//! `cargo test -p matfact-cli --test acceptance -- --nocapture`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use matfact::equivariant::{
    enumerate_structures, equivariant_hom_space, forget, is_equivariant_map, isotypic_decompose, reynolds,
    EquivariantStructure,
};
use matfact::factorization::{Homotopy, MatrixFactorization, MfMorphism};
use matfact::homotopy::{find_homotopy, hom_space, hom_support, HomPair, HomotopyResult, Indexer, Parity, Window};
use matfact::oracle;
use matfact::singcat::{cok, cok_g, null_homotopy_factorization, stable_hom};
use matfact::suite::{an_object, base_objects, derived_objects, diagonal_action, fermat_koszul, SuiteObject};
use matfact::{PolyMatrix, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn label(o: &SuiteObject) -> String {
    format!("{} over {}", o.name, o.w_label)
}

/// Chain maps `P -> Q`: random combinations of the cycle basis in one degree.
fn random_chain_map(p: &MatrixFactorization, q: &MatrixFactorization, rng: &mut ChaCha8Rng) -> MfMorphism {
    let cycles = hom_space(p, q, None).unwrap().cycle_basis();
    let mut degrees: Vec<i64> = cycles.iter().map(|(d, _)| *d).collect();
    degrees.dedup();
    let mut out = MfMorphism::zero(p, q).unwrap();
    if let Some(&d) = degrees.get(rng.gen_range(0..degrees.len().max(1))) {
        for (_, z) in cycles.iter().filter(|(e, _)| *e == d) {
            let c = Polynomial::from_i64(p.nvars(), p.field(), rng.gen_range(-3..=3));
            out = out.checked_add(&z.mul_poly(&c)).unwrap();
        }
    }
    out
}

/// `D(t)` for a random odd `t` of one degree, with the `t` itself.
fn random_null_homotopic(p: &MatrixFactorization, rng: &mut ChaCha8Rng) -> (Homotopy, MfMorphism) {
    let pair = HomPair::new(p, p).unwrap();
    let s = hom_support(p, p).unwrap().unwrap();
    let space = pair.space(Parity::Odd, Window::Degree(rng.gen_range(s.lo..=s.hi)), None).unwrap();
    let ix = Indexer::seeded(&space);
    let v = matfact::linalg::from_pairs((0..space.len()).map(|i| (i, p.field().from_i64(rng.gen_range(-3..=3)))));
    let (t0, t1) = pair.matrices_of(Parity::Odd, &v, &ix);
    let h = Homotopy { t0, t1 };
    let phi = h.boundary(p, p).unwrap();
    (h, phi)
}

fn cyclic_structures(n: u32) -> Vec<EquivariantStructure> {
    let act = diagonal_action(n, 1);
    (1..n).flat_map(|k| enumerate_structures(&an_object(n, k), &act).unwrap().structures).collect()
}

fn equivariant_suites() -> Vec<Vec<EquivariantStructure>> {
    let mut out: Vec<_> = (2..=6).map(cyclic_structures).collect();
    out.push(enumerate_structures(&fermat_koszul(3, 3), &diagonal_action(3, 3)).unwrap().structures);
    out
}

fn ac1() -> Check {
    for o in derived_objects().map_err(|e| e.to_string())? {
        let v = o.mf.verify();
        ensure(v.ok, || format!("{}: {:?}", label(&o), v.residuals))?;
    }
    Ok(())
}

fn ac2() -> Check {
    for o in derived_objects().map_err(|e| e.to_string())? {
        ensure(o.mf.shift().shift() == o.mf, || label(&o))?;
    }
    Ok(())
}

fn ac3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for o in base_objects() {
        for i in 0..20 {
            let phi = random_chain_map(&o.mf, &o.mf, &mut rng);
            let t = MatrixFactorization::cone(&phi).map_err(|e| e.to_string())?;
            for comp in [t.phi.then(&t.psi).unwrap(), t.psi.then(&t.xi).unwrap()] {
                let r = find_homotopy(&comp, None).map_err(|e| e.to_string())?;
                ensure(matches!(r, HomotopyResult::Found(_)), || format!("{} map #{i}", label(&o)))?;
            }
        }
    }
    Ok(())
}

fn ac4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for o in base_objects() {
        let p = &o.mf;
        let zero = PolyMatrix::zero(p.rank(), p.rank(), p.nvars(), p.field());
        let mut maps: Vec<MfMorphism> = hom_space(p, p, None).unwrap().cycle_basis().into_iter().map(|(_, z)| z).collect();
        maps.extend((0..5).map(|_| random_chain_map(p, p, &mut rng)));
        maps.push(MfMorphism::identity(p));
        for phi in maps {
            let w_phi = phi.mul_poly(p.w());
            let witness = Homotopy { t0: phi.phi1.checked_mul(p.p0()).unwrap(), t1: zero.clone() };
            ensure(witness.witnesses(&w_phi), || format!("{}: explicit witness", label(&o)))?;
            let found = find_homotopy(&w_phi, None).map_err(|e| e.to_string())?;
            ensure(found.found().is_some(), || format!("{}: solver", label(&o)))?;
        }
        let id = Homotopy { t0: p.p0().clone(), t1: zero };
        ensure(id.witnesses(&MfMorphism::identity(p).mul_poly(p.w())), || format!("{}: (p0, 0)", label(&o)))?;
    }
    Ok(())
}

fn ac5() -> Check {
    for n in 2..=6u32 {
        let table: Vec<Vec<usize>> = (1..n)
            .map(|a| (1..n).map(|b| hom_space(&an_object(n, a), &an_object(n, b), None).unwrap().total).collect())
            .collect();
        let expected = oracle::an_hom_table(n as usize, false);
        ensure(table == expected, || format!("n = {n}: solver {table:?}, oracle {expected:?}"))?;
    }
    ensure(oracle::an_hom_table(2, false) == vec![vec![1]], || "n = 2 anchor".into())
}

fn ac6() -> Check {
    for o in base_objects() {
        let brick = o.mf.trivial_brick();
        let r = find_homotopy(&MfMorphism::identity(&brick), None).map_err(|e| e.to_string())?;
        ensure(matches!(r, HomotopyResult::Found(_)), || format!("{}: brick identity", label(&o)))?;
        for s in [0, 1] {
            let from = stable_hom(&brick, &o.mf, s, None).unwrap().hom;
            let to = stable_hom(&o.mf, &brick, s, None).unwrap().hom;
            ensure(from.certified && to.certified && from.total == 0 && to.total == 0, || {
                format!("{}: shift {s}: {} / {}", label(&o), from.total, to.total)
            })?;
        }
    }
    Ok(())
}

fn ac7() -> Check {
    for n in 2..=6u32 {
        let act = diagonal_action(n, 1);
        for k in 1..n {
            let p = an_object(n, k);
            let found = enumerate_structures(&p, &act).map_err(|e| e.to_string())?.structures.len();
            let brute = oracle::count_structures_exhaustive(&p, &act);
            ensure(found == n as usize && brute == n as usize, || format!("n = {n}, k = {k}: {found} vs {brute}"))?;
        }
    }
    Ok(())
}

fn ac8() -> Check {
    for suite in equivariant_suites() {
        for e in &suite {
            for f in &suite {
                let h = hom_space(e.base(), f.base(), None).unwrap();
                for (_, z) in h.cycle_basis() {
                    let pi = reynolds(&z, e, f).unwrap();
                    ensure(reynolds(&pi, e, f).unwrap() == pi, || "pi^2 != pi".into())?;
                    let fixed = pi == z;
                    ensure(fixed == is_equivariant_map(&z, e, f).unwrap(), || "fixed set".into())?;
                }
                let inv = equivariant_hom_space(e, f, None).unwrap().total;
                let dec = isotypic_decompose(&h, e, f).unwrap();
                let zero = e.action().zero_character();
                ensure(inv == dec.dimension_of(&zero), || format!("invariants {inv} vs {}", dec.dimension_of(&zero)))?;
            }
        }
    }
    Ok(())
}

fn ac9() -> Check {
    for suite in equivariant_suites() {
        for e in &suite {
            for f in &suite {
                let full = hom_space(e.base(), f.base(), None).unwrap().total;
                let mut sum = 0;
                for chi in e.action().characters() {
                    sum += equivariant_hom_space(e, &f.twist(&chi).unwrap(), None).unwrap().total;
                }
                ensure(sum == full, || format!("twist sum {sum} vs {full}"))?;
            }
        }
    }
    Ok(())
}

fn ac10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for o in base_objects() {
        for i in 0..10 {
            let (h, phi) = random_null_homotopic(&o.mf, &mut rng);
            let three = null_homotopy_factorization(&phi, &h).map_err(|e| e.to_string())?;
            let c = three.check(&phi);
            ensure(c.ok(), || format!("{} map #{i}: {c:?}", label(&o)))?;
        }
    }
    Ok(())
}

fn ac11() -> Check {
    for suite in equivariant_suites() {
        for e in &suite {
            ensure(cok(&forget(e)).presentation == cok_g(e).presentation, || "presentations differ".into())?;
        }
    }
    Ok(())
}

fn ac12() -> Check {
    let bin = env!("CARGO_BIN_EXE_matfact");
    let run = |args: &[&str]| Command::new(bin).args(args).output().expect("binary runs");
    let a = run(&["demo", "an", "--n", "4", "--json"]);
    let b = run(&["demo", "an", "--n", "4", "--json"]);
    ensure(a.status.code() == Some(0), || "demo exit code".into())?;
    ensure(a.stdout == b.stdout && !a.stdout.is_empty(), || "demo output differs".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = run(&["demo", "an", "--n", "4", "--out", dir.path().to_str().unwrap()]);
    ensure(out.status.code() == Some(0), || "demo --out".into())?;
    let good = dir.path().join("an.mf");
    ensure(run(&["verify", good.to_str().unwrap()]).status.code() == Some(0), || "clean fixture".into())?;
    let text = std::fs::read_to_string(&good).map_err(|e| e.to_string())?;
    let bad = dir.path().join("corrupt.mf");
    std::fs::write(&bad, text.replacen("p1 = x1^3", "p1 = 2*x1^3", 1)).map_err(|e| e.to_string())?;
    let v = run(&["verify", bad.to_str().unwrap()]);
    ensure(v.status.code() == Some(1), || format!("corrupted fixture exit {:?}", v.status.code()))?;
    ensure(String::from_utf8_lossy(&v.stdout).contains("W*id has entry"), || "residual not printed".into())?;

    let ungraded = dir.path().join("ungraded.mf");
    std::fs::write(&ungraded, "ring 1 q\nW = x1^2 + x1^3\nfactorization k\n  p0 = x1\n  p1 = x1 + x1^2\n")
        .map_err(|e| e.to_string())?;
    let t = run(&["hom", ungraded.to_str().unwrap(), "k", "k", "--window", "3"]);
    ensure(t.status.code() == Some(2), || format!("truncated exit {:?}", t.status.code()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("factorization axioms on the suite", ac1),
        ("shift involution", ac2),
        ("triangle composites null-homotopic", ac3),
        ("W-annihilation", ac4),
        ("A-series Hom tables vs oracle", ac5),
        ("brick contractibility", ac6),
        ("equivariant structure counts", ac7),
        ("Reynolds projector", ac8),
        ("isotypic completeness", ac9),
        ("null-homotopy through the brick", ac10),
        ("forgetful compatibility of cokernels", ac11),
        ("CLI determinism and exit codes", ac12),
    ];
    println!();
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into())),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("[PASS] AC-{:<2} {name} ({secs:.1}s)", i + 1),
            Err(why) => {
                println!("[FAIL] AC-{:<2} {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
