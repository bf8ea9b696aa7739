//! Standard objects and the demo reports built from them.
//!
//! The suite superpotentials are `x^n` for `n = 2..6`, `x^2 + y^2` and
//! `x^3 + y^3 + z^3`, with the cyclic group `Z_n` scaling every variable by
//! the same primitive root of unity.

use serde::Serialize;
use serde_json::{json, Value};

use crate::action::GroupAction;
use crate::equivariant::{enumerate_structures, equivariant_hom_space, EquivariantStructure};
use crate::error::{Error, Result};
use crate::factorization::{MatrixFactorization, MfMorphism};
use crate::homotopy::{find_homotopy, hom_space, HomotopyResult};
use crate::matrix::{MatrixText, PolyMatrix};
use crate::poly::Polynomial;
use crate::scalar::Field;
use crate::singcat::{brick_change_of_basis, cok, null_homotopy_factorization};
use crate::workspace::Workspace;

pub const DEMOS: [&str; 4] = ["an", "fermat", "brick", "cone-axioms"];

/// A named object of the suite together with the superpotential label.
#[derive(Clone, Debug)]
pub struct SuiteObject {
    pub w_label: String,
    pub name: String,
    pub mf: MatrixFactorization,
    /// The diagonal cyclic action the superpotential carries.
    pub action: GroupAction,
}

fn poly(s: &str, nvars: usize) -> Polynomial {
    Polynomial::parse(s, nvars, Field::Rational).expect("well-formed literal")
}

/// `x1^n + .. + xk^n`.
pub fn fermat_w(n: u32, k: usize) -> Polynomial {
    let text: Vec<String> = (1..=k).map(|i| format!("x{i}^{n}")).collect();
    poly(&text.join(" + "), k)
}

/// The Koszul factorization of `x1^n + .. + xk^n` on the pairs `(xi, xi^{n-1})`.
pub fn fermat_koszul(n: u32, k: usize) -> MatrixFactorization {
    let pairs: Vec<(Polynomial, Polynomial)> =
        (1..=k).map(|i| (poly(&format!("x{i}"), k), poly(&format!("x{i}^{}", n - 1), k))).collect();
    MatrixFactorization::koszul(fermat_w(n, k), &pairs).expect("Koszul pairs multiply to W")
}

/// `(x^a | x^{n-a})` over `x^n`.
pub fn an_object(n: u32, a: u32) -> MatrixFactorization {
    MatrixFactorization::elementary(poly(&format!("x1^{n}"), 1), poly(&format!("x1^{a}"), 1), poly(&format!("x1^{}", n - a), 1))
        .expect("nonzero W")
}

pub fn diagonal_action(n: u32, k: usize) -> GroupAction {
    GroupAction::cyclic(n as u64, vec![1; k]).expect("valid action")
}

/// The base objects: every `(x^a | x^{n-a})` for `n = 2..6`, and the Koszul
/// factorizations of `x^2 + y^2` and `x^3 + y^3 + z^3`.
pub fn base_objects() -> Vec<SuiteObject> {
    let mut out = Vec::new();
    for n in 2..=6 {
        for a in 1..n {
            out.push(SuiteObject {
                w_label: format!("x^{n}"),
                name: format!("k{a}"),
                mf: an_object(n, a),
                action: diagonal_action(n, 1),
            });
        }
    }
    out.push(SuiteObject {
        w_label: "x^2+y^2".into(),
        name: "koszul".into(),
        mf: fermat_koszul(2, 2),
        action: diagonal_action(2, 2),
    });
    out.push(SuiteObject {
        w_label: "x^3+y^3+z^3".into(),
        name: "koszul".into(),
        mf: fermat_koszul(3, 3),
        action: diagonal_action(3, 3),
    });
    out
}

/// Base objects plus their shifts, trivial bricks, self direct sums and the
/// cones of the identity and of multiplication by `x1`.
pub fn derived_objects() -> Result<Vec<SuiteObject>> {
    let mut out = Vec::new();
    for o in base_objects() {
        let p = &o.mf;
        let x1 = Polynomial::var(p.nvars(), p.field(), 0);
        let derived = [
            ("shift", p.shift()),
            ("brick", p.trivial_brick()),
            ("sum", p.direct_sum(p)?),
            ("cone(id)", MatrixFactorization::cone(&MfMorphism::identity(p))?.cone),
            ("cone(x1)", MatrixFactorization::cone(&MfMorphism::identity(p).mul_poly(&x1))?.cone),
        ];
        for (tag, mf) in derived {
            out.push(SuiteObject { name: format!("{}.{tag}", o.name), mf, ..o.clone() });
        }
        out.push(o);
    }
    Ok(out)
}

/// Output of one demo: the workspace it ran on and a JSON report.
#[derive(Clone, Debug)]
pub struct Demo {
    pub name: String,
    pub workspace: Workspace,
    pub report: Value,
    /// False when some reported result is window-truncated.
    pub certified: bool,
}

pub fn run_demo(name: &str, n: Option<u32>) -> Result<Demo> {
    match name {
        "an" => an_demo(n.unwrap_or(4)),
        "fermat" => fermat_demo(n.unwrap_or(3)),
        "brick" => brick_demo(n.unwrap_or(3)),
        "cone-axioms" => cone_axioms_demo(),
        other => Err(Error::Usage(format!("unknown demo {other:?}; expected one of {}", DEMOS.join(", ")))),
    }
}

fn check_n(n: u32, lo: u32) -> Result<()> {
    if n < lo {
        return Err(Error::Usage(format!("--n must be at least {lo}")));
    }
    Ok(())
}

fn an_demo(n: u32) -> Result<Demo> {
    check_n(n, 2)?;
    let action = diagonal_action(n, 1);
    let mut ws = Workspace::new(poly(&format!("x1^{n}"), 1)).with_action(action.clone())?;
    let objects: Vec<MatrixFactorization> = (1..n).map(|a| an_object(n, a)).collect();
    for (a, p) in (1..n).zip(&objects) {
        ws.add_factorization(&format!("k{a}"), p.clone());
    }
    let mut certified = true;
    let mut table = |shift: bool| -> Result<Vec<Vec<usize>>> {
        let mut rows = Vec::new();
        for p in &objects {
            let mut row = Vec::new();
            for q in &objects {
                let q = if shift { q.shift() } else { q.clone() };
                let h = hom_space(p, &q, None)?;
                certified &= h.certified;
                row.push(h.total);
            }
            rows.push(row);
        }
        Ok(rows)
    };
    let hom = table(false)?;
    let hom_shift = table(true)?;
    let mut counts = Vec::new();
    for (a, p) in (1..n).zip(&objects) {
        let en = enumerate_structures(p, &action)?;
        counts.push(en.structures.len());
        let first = &en.structures[0];
        ws.add_structure(&format!("e{a}"), &format!("k{a}"), first.clone());
    }
    let report = json!({
        "demo": "an",
        "n": n,
        "W": ws.w.to_string(),
        "objects": ws.factorization_names(),
        "hom": hom,
        "hom_shift": hom_shift,
        "structure_counts": counts,
        "structures_total": counts.iter().sum::<usize>(),
        "certified": certified,
    });
    Ok(Demo { name: "an".into(), workspace: ws, report, certified })
}

fn fermat_demo(n: u32) -> Result<Demo> {
    check_n(n, 2)?;
    let k = n as usize;
    let p = fermat_koszul(n, k);
    let action = diagonal_action(n, k);
    let mut ws = Workspace::new(fermat_w(n, k)).with_action(action.clone())?;
    ws.add_factorization("koszul", p.clone());
    let structures = enumerate_structures(&p, &action)?.structures;
    for (i, e) in structures.iter().enumerate() {
        ws.add_structure(&format!("e{i}"), "koszul", e.clone());
    }
    let full = hom_space(&p, &p, None)?;
    let mut certified = full.certified;
    let mut table = Vec::new();
    let mut twist_sums = Vec::new();
    for e in &structures {
        let mut row = Vec::new();
        for f in &structures {
            let h = equivariant_hom_space(e, f, None)?;
            certified &= h.certified;
            row.push(h.total);
        }
        // the targets run over all twists of one structure, so each row sums
        // to the full Hom dimension
        twist_sums.push(row.iter().sum::<usize>());
        table.push(row);
    }
    let listing: Vec<Value> = structures
        .iter()
        .enumerate()
        .map(|(i, e)| json!({"name": format!("e{i}"), "chars0": e.chars0(), "chars1": e.chars1()}))
        .collect();
    let report = json!({
        "demo": "fermat",
        "n": n,
        "W": ws.w.to_string(),
        "rank": p.rank(),
        "structures": listing,
        "hom": full.report(),
        "equivariant_hom": table,
        "twist_sums": twist_sums,
        "certified": certified,
    });
    Ok(Demo { name: "fermat".into(), workspace: ws, report, certified })
}

#[derive(Serialize)]
struct Pair {
    first: MatrixText,
    second: MatrixText,
}

fn pair(a: &PolyMatrix, b: &PolyMatrix) -> Pair {
    Pair { first: MatrixText::from(a), second: MatrixText::from(b) }
}

/// The null-homotopic `x * id` on `(x | x^{n-1})`, factored through the
/// trivial brick, with the change of basis showing the brick's cokernel is free.
fn brick_demo(n: u32) -> Result<Demo> {
    check_n(n, 2)?;
    let q = an_object(n, 1);
    let brick = q.trivial_brick();
    let mut ws = Workspace::new(q.w().clone());
    ws.add_factorization("q", q.clone());
    ws.add_factorization("brick", brick.clone());
    let phi = MfMorphism::identity(&q).mul_poly(&poly("x1", 1));
    let h = find_homotopy(&phi, None)?
        .found()
        .cloned()
        .ok_or_else(|| Error::NotChainMap("x * id is not null-homotopic".into()))?;
    let three = null_homotopy_factorization(&phi, &h)?;
    let check = three.check(&phi);
    let basis = brick_change_of_basis(&q)?;
    let splits = matches!(find_homotopy(&MfMorphism::identity(&brick), None)?, HomotopyResult::Found(_));
    let report = json!({
        "demo": "brick",
        "n": n,
        "W": q.w().to_string(),
        "brick": pair(brick.p0(), brick.p1()),
        "phi": pair(&phi.phi0, &phi.phi1),
        "homotopy": pair(&h.t0, &h.t1),
        "into_brick": pair(&three.into_brick.phi0, &three.into_brick.phi1),
        "out_of_brick": pair(&three.out_of_brick.phi0, &three.out_of_brick.phi1),
        "checks": check,
        "change_of_basis": {
            "U": MatrixText::from(&basis.u),
            "V": MatrixText::from(&basis.v),
            "U*b1*V": MatrixText::from(&basis.normal_form),
            "holds": basis.holds_for(&brick),
        },
        "brick_cokernel": cok(&brick).report(),
        "identity_null_homotopic": splits,
    });
    let certified = check.ok() && splits && basis.holds_for(&brick);
    Ok(Demo { name: "brick".into(), workspace: ws, report, certified })
}

fn cone_axioms_demo() -> Result<Demo> {
    let mut rows = Vec::new();
    let mut all = true;
    let mut truncated = false;
    for o in base_objects() {
        let p = &o.mf;
        let x1 = Polynomial::var(p.nvars(), p.field(), 0);
        let involution = p.shift().shift() == *p;
        let mut triangle_ok = true;
        for phi in [MfMorphism::identity(p), MfMorphism::identity(p).mul_poly(&x1)] {
            let t = MatrixFactorization::cone(&phi)?;
            for comp in [t.phi.then(&t.psi)?, t.psi.then(&t.xi)?] {
                match find_homotopy(&comp, None)? {
                    HomotopyResult::Found(_) => {}
                    HomotopyResult::NoneCertified => triangle_ok = false,
                    HomotopyResult::NoneTruncated => truncated = true,
                }
            }
        }
        all &= involution && triangle_ok;
        rows.push(json!({
            "W": o.w_label,
            "object": o.name,
            "shift_involution": involution,
            "triangle_composites_null": triangle_ok,
        }));
    }
    let ws = Workspace::new(poly("x1^2", 1));
    let report = json!({"demo": "cone-axioms", "rows": rows, "all_pass": all, "certified": !truncated});
    if !all {
        return Err(Error::NotChainMap("a cone axiom failed".into()));
    }
    Ok(Demo { name: "cone-axioms".into(), workspace: ws, report, certified: !truncated })
}

/// Hom-space report for one structure pair with every twist of the target,
/// as printed by the equivariant `hom` command.
pub fn twisted_tables(e: &EquivariantStructure, f: &EquivariantStructure, window: Option<i64>) -> Result<Vec<(String, crate::homotopy::HomReport)>> {
    let mut out = Vec::new();
    for chi in e.action().characters() {
        let h = equivariant_hom_space(e, &f.twist(&chi)?, window)?;
        out.push((chi.to_string(), h.report()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn an_demo_two() {
        let d = run_demo("an", Some(2)).unwrap();
        assert_eq!(d.report["hom"], json!([[1]]));
        assert!(d.certified);
    }

    #[test]
    fn unknown_demo() {
        assert!(matches!(run_demo("nope", None), Err(Error::Usage(_))));
    }

    #[test]
    fn brick_demo_checks() {
        let d = run_demo("brick", None).unwrap();
        assert!(d.certified, "{}", d.report);
    }
}
