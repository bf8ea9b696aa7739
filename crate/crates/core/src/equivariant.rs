//! Equivariant matrix factorizations for diagonal actions of finite abelian
//! groups.
//!
//! A linearization of `P` is an assignment of a character to every generator
//! of `P0` and `P1` such that each matrix entry is character-homogeneous of
//! the difference of its row and column characters. Averaging over the group
//! is then a filter on monomials: a term survives exactly when its character
//! matches the one its position requires, since the average of a nontrivial
//! character over the group vanishes.
//!
//! Only abelian groups acting diagonally are supported.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::action::{Character, GroupAction};
use crate::error::{Error, Result};
use crate::factorization::{FactorizationJson, Homotopy, MatrixFactorization, MfMorphism};
use crate::homotopy::{hom_space_filtered, Coord, HomSpace, Slot};
use crate::linalg::{Echelon, SparseVec};
use crate::matrix::PolyMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantStructure {
    base: MatrixFactorization,
    action: GroupAction,
    chars0: Vec<Character>,
    chars1: Vec<Character>,
}

/// A monomial violating the character congruence, 1-based position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Offense {
    pub which: String,
    pub row: usize,
    pub col: usize,
    pub monomial: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub ok: bool,
    pub offending: Vec<Offense>,
}

impl EquivariantStructure {
    pub fn new(
        base: MatrixFactorization,
        action: GroupAction,
        chars0: Vec<Character>,
        chars1: Vec<Character>,
    ) -> Result<EquivariantStructure> {
        if action.exponents().iter().any(|row| row.len() != base.nvars()) {
            return Err(Error::Usage("action and factorization have different variable counts".into()));
        }
        if chars0.len() != base.rank() || chars1.len() != base.rank() {
            return Err(Error::Shape("one character per generator is required".into()));
        }
        for c in chars0.iter().chain(&chars1) {
            action.validate_character(c)?;
        }
        if !action.is_invariant(base.w()) {
            return Err(Error::NotInvariant);
        }
        Ok(EquivariantStructure { base, action, chars0, chars1 })
    }

    pub fn base(&self) -> &MatrixFactorization {
        &self.base
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn chars0(&self) -> &[Character] {
        &self.chars0
    }

    pub fn chars1(&self) -> &[Character] {
        &self.chars1
    }

    /// Checks every monomial of `p0` and `p1` against its required character.
    pub fn check(&self) -> EquivarianceReport {
        let a = &self.action;
        let mut offending = Vec::new();
        let sides = [
            ("p0", self.base.p0(), &self.chars1, &self.chars0),
            ("p1", self.base.p1(), &self.chars0, &self.chars1),
        ];
        for (which, m, rows, cols) in sides {
            for (i, j, p) in m.entries() {
                let required = a.sub(&rows[i], &cols[j]);
                for mono in p.monomials() {
                    if a.monomial_character(mono) != required {
                        offending.push(Offense {
                            which: which.into(),
                            row: i + 1,
                            col: j + 1,
                            monomial: mono.to_string(),
                        });
                    }
                }
            }
        }
        EquivarianceReport { ok: offending.is_empty(), offending }
    }

    /// Tensors with the one-dimensional representation `chi`.
    pub fn twist(&self, chi: &Character) -> Result<EquivariantStructure> {
        self.action.validate_character(chi)?;
        let shift = |cs: &[Character]| cs.iter().map(|c| self.action.add(c, chi)).collect();
        Ok(EquivariantStructure {
            base: self.base.clone(),
            action: self.action.clone(),
            chars0: shift(&self.chars0),
            chars1: shift(&self.chars1),
        })
    }

    /// The shifted object with the characters carried along.
    pub fn shift(&self) -> EquivariantStructure {
        EquivariantStructure {
            base: self.base.shift(),
            action: self.action.clone(),
            chars0: self.chars1.clone(),
            chars1: self.chars0.clone(),
        }
    }

    pub fn to_json(&self) -> FactorizationJson {
        let mut json = self.base.to_json();
        json.chars0 = Some(self.chars0.iter().map(|c| c.0.clone()).collect());
        json.chars1 = Some(self.chars1.iter().map(|c| c.0.clone()).collect());
        json
    }

    pub fn from_json(json: &FactorizationJson, action: GroupAction) -> Result<EquivariantStructure> {
        let base = MatrixFactorization::from_json(json)?;
        let (Some(c0), Some(c1)) = (&json.chars0, &json.chars1) else {
            return Err(Error::Usage("structure needs chars0 and chars1".into()));
        };
        EquivariantStructure::new(
            base,
            action,
            c0.iter().cloned().map(Character).collect(),
            c1.iter().cloned().map(Character).collect(),
        )
    }
}

/// Rejects structures whose differentials are not equivariant.
pub fn check_equivariant(e: &EquivariantStructure) -> Result<EquivarianceReport> {
    if !e.action.is_invariant(e.base.w()) {
        return Err(Error::NotInvariant);
    }
    Ok(e.check())
}

/// The forgetful functor.
pub fn forget(e: &EquivariantStructure) -> MatrixFactorization {
    e.base.clone()
}

/// All diagonal linearizations of `P`.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub structures: Vec<EquivariantStructure>,
    /// Number of orbits under twisting by characters of the group.
    pub orbits: usize,
}

impl Enumeration {
    pub fn raw(&self) -> usize {
        self.structures.len()
    }
}

/// Lists every character assignment making `P` equivariant.
///
/// Each nonzero entry relates the characters of its row and column, so the
/// assignments are determined by one free character per connected block of
/// the entry graph. Entries mixing characters admit no diagonal
/// linearization in the given basis and are rejected.
pub fn enumerate_structures(p: &MatrixFactorization, action: &GroupAction) -> Result<Enumeration> {
    if action.exponents().iter().any(|row| row.len() != p.nvars()) {
        return Err(Error::Usage("action and factorization have different variable counts".into()));
    }
    if !action.is_invariant(p.w()) {
        return Err(Error::NotInvariant);
    }
    let r = p.rank();
    // node j < r: generator j of P0; node r + i: generator i of P1.
    // an edge (a, b, c) means char[b] = char[a] + c
    let mut adj: Vec<Vec<(usize, Character)>> = vec![Vec::new(); 2 * r];
    for (which, m) in [("p0", p.p0()), ("p1", p.p1())] {
        for (i, j, poly) in m.entries() {
            if poly.is_zero() {
                continue;
            }
            let c = action
                .polynomial_character(poly)
                .ok_or(Error::MixedCharacters { which: if which == "p0" { "p0" } else { "p1" }, row: i + 1, col: j + 1 })?;
            let (from, to) = if which == "p0" { (j, r + i) } else { (r + j, i) };
            adj[from].push((to, c.clone()));
            adj[to].push((from, action.neg(&c)));
        }
    }
    // relative characters within each component
    let mut rel: Vec<Option<Character>> = vec![None; 2 * r];
    let mut component = vec![usize::MAX; 2 * r];
    let mut ncomp = 0;
    for start in 0..2 * r {
        if rel[start].is_some() {
            continue;
        }
        rel[start] = Some(action.zero_character());
        component[start] = ncomp;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            let ca = rel[a].clone().expect("visited");
            for (b, c) in &adj[a] {
                let want = action.add(&ca, c);
                match &rel[*b] {
                    None => {
                        rel[*b] = Some(want);
                        component[*b] = ncomp;
                        queue.push_back(*b);
                    }
                    Some(have) if *have != want => {
                        return Ok(Enumeration { structures: Vec::new(), orbits: 0 });
                    }
                    Some(_) => {}
                }
            }
        }
        ncomp += 1;
    }
    let chars = action.characters();
    let mut structures = Vec::new();
    let mut choice = vec![0usize; ncomp];
    loop {
        let assign = |node: usize| action.add(rel[node].as_ref().expect("visited"), &chars[choice[component[node]]]);
        let chars0 = (0..r).map(assign).collect();
        let chars1 = (r..2 * r).map(assign).collect();
        structures.push(EquivariantStructure {
            base: p.clone(),
            action: action.clone(),
            chars0,
            chars1,
        });
        // odometer over the per-component characters, last component fastest
        let mut k = ncomp;
        loop {
            if k == 0 {
                let orbits = if r == 0 { 1 } else { structures.len() / chars.len() };
                return Ok(Enumeration { structures, orbits });
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < chars.len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

fn check_pair(phi_src: &MatrixFactorization, phi_tgt: &MatrixFactorization, src: &EquivariantStructure, tgt: &EquivariantStructure) -> Result<()> {
    let same = |a: &MatrixFactorization, b: &MatrixFactorization| a.p0() == b.p0() && a.p1() == b.p1() && a.w() == b.w();
    if !same(phi_src, &src.base) || !same(phi_tgt, &tgt.base) {
        return Err(Error::StructureMismatch("the morphism does not connect the given structures".into()));
    }
    if src.action != tgt.action {
        return Err(Error::StructureMismatch("structures use different group actions".into()));
    }
    Ok(())
}

/// Character of a Hom-complex coordinate: the monomial's character minus the
/// character its position requires. Invariant maps live in character zero.
pub fn coord_character(src: &EquivariantStructure, tgt: &EquivariantStructure, c: &Coord) -> Character {
    let a = &src.action;
    let (row, col) = match c.slot {
        Slot::Phi0 => (&tgt.chars0[c.row], &src.chars0[c.col]),
        Slot::Phi1 => (&tgt.chars1[c.row], &src.chars1[c.col]),
        Slot::T0 => (&tgt.chars1[c.row], &src.chars0[c.col]),
        Slot::T1 => (&tgt.chars0[c.row], &src.chars1[c.col]),
    };
    a.sub(&a.monomial_character(&c.monomial), &a.sub(row, col))
}

fn filter_matrix(m: &PolyMatrix, keep: impl Fn(usize, usize, &crate::poly::Monomial) -> bool) -> PolyMatrix {
    let mut out = m.clone();
    for (k, j, p) in m.entries() {
        out.set(k, j, p.filter_terms(|mono| keep(k, j, mono)));
    }
    out
}

/// The component of `phi` on which the group acts by `chi`.
pub fn isotypic_part(phi: &MfMorphism, src: &EquivariantStructure, tgt: &EquivariantStructure, chi: &Character) -> Result<MfMorphism> {
    check_pair(&phi.source, &phi.target, src, tgt)?;
    let pick = |slot: Slot| {
        move |k: usize, j: usize, m: &crate::poly::Monomial| {
            coord_character(src, tgt, &Coord { slot, row: k, col: j, monomial: m.clone() }) == *chi
        }
    };
    MfMorphism::new(
        phi.source.clone(),
        phi.target.clone(),
        filter_matrix(&phi.phi0, pick(Slot::Phi0)),
        filter_matrix(&phi.phi1, pick(Slot::Phi1)),
    )
}

/// The Reynolds operator `(1/|G|) sum_g g . phi`.
pub fn reynolds(phi: &MfMorphism, src: &EquivariantStructure, tgt: &EquivariantStructure) -> Result<MfMorphism> {
    isotypic_part(phi, src, tgt, &src.action.zero_character())
}

/// Averages an odd map the same way.
pub fn reynolds_homotopy(h: &Homotopy, src: &EquivariantStructure, tgt: &EquivariantStructure) -> Homotopy {
    let zero = src.action.zero_character();
    let pick = |slot: Slot| {
        let zero = zero.clone();
        move |k: usize, j: usize, m: &crate::poly::Monomial| {
            coord_character(src, tgt, &Coord { slot, row: k, col: j, monomial: m.clone() }) == zero
        }
    };
    Homotopy { t0: filter_matrix(&h.t0, pick(Slot::T0)), t1: filter_matrix(&h.t1, pick(Slot::T1)) }
}

/// True iff every monomial of `phi` has the character its position requires.
pub fn is_equivariant_map(phi: &MfMorphism, src: &EquivariantStructure, tgt: &EquivariantStructure) -> Result<bool> {
    Ok(reynolds(phi, src, tgt)? == *phi)
}

/// `Hom` in the equivariant category: the computation of [`hom_space`]
/// restricted to invariant chain maps and invariant homotopies.
///
/// [`hom_space`]: crate::homotopy::hom_space
pub fn equivariant_hom_space(src: &EquivariantStructure, tgt: &EquivariantStructure, window: Option<i64>) -> Result<HomSpace> {
    hom_space_component(src, tgt, &src.action.zero_character(), window)
}

/// The `chi`-isotypic part of `Hom`, computed by restricting the linear
/// systems to coordinates of character `chi`.
pub fn hom_space_component(
    src: &EquivariantStructure,
    tgt: &EquivariantStructure,
    chi: &Character,
    window: Option<i64>,
) -> Result<HomSpace> {
    if src.action != tgt.action {
        return Err(Error::StructureMismatch("structures use different group actions".into()));
    }
    src.action.validate_character(chi)?;
    let filter = |c: &Coord| coord_character(src, tgt, c) == *chi;
    hom_space_filtered(&src.base, &tgt.base, window, Some(&filter))
}

/// Per-character dimensions of a Hom space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotypicComponent {
    pub character: Character,
    pub per_degree: Vec<(i64, usize)>,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotypicDecomposition {
    pub components: Vec<IsotypicComponent>,
    pub total: usize,
}

impl IsotypicDecomposition {
    pub fn dimension_of(&self, chi: &Character) -> usize {
        self.components.iter().find(|c| c.character == *chi).map_or(0, |c| c.dimension)
    }
}

/// Splits an already computed `Hom` space by character: in each degree the
/// `chi` part has dimension `rank(pi_chi Z) - rank(pi_chi B)`, where
/// `pi_chi` projects onto coordinates of character `chi`. Only characters
/// with nonzero dimension are listed.
pub fn isotypic_decompose(h: &HomSpace, src: &EquivariantStructure, tgt: &EquivariantStructure) -> Result<IsotypicDecomposition> {
    check_pair(&h.source, &h.target, src, tgt)?;
    let field = h.source.field();
    let mut table: BTreeMap<Character, Vec<(i64, usize)>> = BTreeMap::new();
    for row in &h.per_degree {
        let chars: Vec<Character> = (0..row.coords.len())
            .map(|i| coord_character(src, tgt, row.coords.coord(i)))
            .collect();
        for chi in src.action.characters() {
            let project = |v: &SparseVec| -> SparseVec { v.iter().filter(|(i, _)| chars[*i] == chi).cloned().collect() };
            let rank = |vs: &[SparseVec]| {
                let mut e = Echelon::new(field);
                for v in vs {
                    e.insert(&project(v));
                }
                e.rank()
            };
            let dim = rank(&row.cycles) - rank(&row.boundaries);
            if dim > 0 {
                table.entry(chi).or_default().push((row.d, dim));
            }
        }
    }
    let components: Vec<IsotypicComponent> = table
        .into_iter()
        .map(|(character, per_degree)| {
            let dimension = per_degree.iter().map(|(_, d)| d).sum();
            IsotypicComponent { character, per_degree, dimension }
        })
        .collect();
    let total = components.iter().map(|c| c.dimension).sum();
    Ok(IsotypicDecomposition { components, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::{find_homotopy, hom_space};
    use crate::poly::Polynomial;
    use crate::scalar::Field;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, 1, Field::Rational).unwrap()
    }

    fn elem(n: u32, k: u32) -> MatrixFactorization {
        MatrixFactorization::elementary(p(&format!("x1^{n}")), p(&format!("x1^{k}")), p(&format!("x1^{}", n - k)))
            .unwrap()
    }

    fn ch(v: u64) -> Character {
        Character(vec![v])
    }

    #[test]
    fn sign_action_structures() {
        let z2 = GroupAction::cyclic(2, vec![1]).unwrap();
        let f = elem(2, 1);
        let good = EquivariantStructure::new(f.clone(), z2.clone(), vec![ch(0)], vec![ch(1)]).unwrap();
        assert!(check_equivariant(&good).unwrap().ok);
        let bad = EquivariantStructure::new(f, z2, vec![ch(0)], vec![ch(0)]).unwrap();
        let report = check_equivariant(&bad).unwrap();
        assert!(!report.ok);
        assert_eq!((report.offending[0].which.as_str(), report.offending[0].row, report.offending[0].col), ("p0", 1, 1));
    }

    #[test]
    fn trivial_group_has_one_structure() {
        let t = GroupAction::trivial(1);
        let e = enumerate_structures(&elem(4, 1), &t).unwrap();
        assert_eq!(e.raw(), 1);
        assert!(e.structures[0].check().ok);
    }

    #[test]
    fn cyclic_structures_on_elementary() {
        for n in 2..=6u32 {
            let zn = GroupAction::cyclic(n as u64, vec![1]).unwrap();
            for k in 1..n {
                let e = enumerate_structures(&elem(n, k), &zn).unwrap();
                assert_eq!(e.raw(), n as usize);
                assert_eq!(e.orbits, 1);
                for (j, s) in e.structures.iter().enumerate() {
                    assert_eq!(s.chars0(), &[ch(j as u64)]);
                    assert_eq!(s.chars1(), &[ch((j as u64 + k as u64) % n as u64)]);
                }
            }
        }
    }

    #[test]
    fn mixed_entries_and_non_invariant_w() {
        let w = p("x1^2");
        let f = MatrixFactorization::new(w.clone(), PolyMatrix::parse(&[&["x1"]], 1, Field::Rational).unwrap(), PolyMatrix::parse(&[&["x1"]], 1, Field::Rational).unwrap()).unwrap();
        let z3 = GroupAction::cyclic(3, vec![1]).unwrap();
        assert!(matches!(enumerate_structures(&f, &z3), Err(Error::NotInvariant)));
        let sum = MatrixFactorization::new(
            p("x1^2 - 1"),
            PolyMatrix::parse(&[&["x1 + 1"]], 1, Field::Rational).unwrap(),
            PolyMatrix::parse(&[&["x1 - 1"]], 1, Field::Rational).unwrap(),
        )
        .unwrap();
        let z2 = GroupAction::cyclic(2, vec![1]).unwrap();
        assert!(matches!(
            enumerate_structures(&sum, &z2),
            Err(Error::MixedCharacters { which: "p0", row: 1, col: 1 })
        ));
    }

    #[test]
    fn reynolds_kills_x_between_equal_characters() {
        let z2 = GroupAction::cyclic(2, vec![1]).unwrap();
        let f = elem(2, 1);
        let e = EquivariantStructure::new(f.clone(), z2, vec![ch(0)], vec![ch(1)]).unwrap();
        let x = MfMorphism::identity(&f).mul_poly(&p("x1"));
        assert!(!is_equivariant_map(&x, &e, &e).unwrap());
        assert!(reynolds(&x, &e, &e).unwrap().is_zero());
        let id = MfMorphism::identity(&f);
        assert!(is_equivariant_map(&id, &e, &e).unwrap());
        assert_eq!(reynolds(&id, &e, &e).unwrap(), id);
    }

    #[test]
    fn averaged_homotopy_commutes_with_differential() {
        let z4 = GroupAction::cyclic(4, vec![1]).unwrap();
        let f = elem(4, 1);
        let g = elem(4, 2);
        let es = enumerate_structures(&f, &z4).unwrap().structures;
        let et = enumerate_structures(&g, &z4).unwrap().structures;
        let h = Homotopy {
            t0: PolyMatrix::parse(&[&["x1 + 2*x1^2 + 1"]], 1, Field::Rational).unwrap(),
            t1: PolyMatrix::parse(&[&["x1^3 - 1"]], 1, Field::Rational).unwrap(),
        };
        for s in &es {
            for t in &et {
                let dh = h.boundary(&f, &g).unwrap();
                let lhs = reynolds(&dh, s, t).unwrap();
                let rhs = reynolds_homotopy(&h, s, t).boundary(&f, &g).unwrap();
                assert_eq!(lhs, rhs);
                assert!(find_homotopy(&lhs, None).unwrap().found().is_some());
            }
        }
    }

    #[test]
    fn end_of_quadric_is_invariant() {
        let z2 = GroupAction::cyclic(2, vec![1]).unwrap();
        let f = elem(2, 1);
        let e = EquivariantStructure::new(f.clone(), z2, vec![ch(0)], vec![ch(1)]).unwrap();
        let h = hom_space(&f, &f, None).unwrap();
        let dec = isotypic_decompose(&h, &e, &e).unwrap();
        assert_eq!(dec.components.len(), 1);
        assert_eq!(dec.components[0].character, ch(0));
        assert_eq!(dec.components[0].per_degree, vec![(0, 1)]);
        assert_eq!(equivariant_hom_space(&e, &e, None).unwrap().total, 1);
    }

    #[test]
    fn twists_cover_the_full_hom_space() {
        let n = 5u32;
        let zn = GroupAction::cyclic(n as u64, vec![1]).unwrap();
        let f = elem(n, 2);
        let g = elem(n, 1);
        let s = &enumerate_structures(&f, &zn).unwrap().structures[0];
        let t = &enumerate_structures(&g, &zn).unwrap().structures[0];
        let full = hom_space(&f, &g, None).unwrap().total;
        let sum: usize = zn
            .characters()
            .iter()
            .map(|chi| equivariant_hom_space(s, &t.twist(chi).unwrap(), None).unwrap().total)
            .sum();
        assert_eq!(sum, full);
    }
}
