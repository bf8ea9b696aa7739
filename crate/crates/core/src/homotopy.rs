//! Morphism spaces in `MF(W)`: the Hom complex, null-homotopies, graded
//! `Hom` dimensions and homotopy equivalences.
//!
//! Every question is reduced to a finite linear system over the coefficient
//! field. Unknowns are the coefficients of the monomials allowed in each
//! matrix entry: in the graded case exactly the monomials of the degree the
//! entry position forces, otherwise all monomials up to a total-degree bound.
//!
//! # Certification
//!
//! For quasi-homogeneous `W` with an isolated critical point, multiplication
//! by each `dW/dx_i` is null-homotopic on the Hom complex. Tensoring with the
//! Koszul complex of the partials therefore shows that a nonzero class in
//! internal degree `d` forces a nonzero element of `Hom0 (x) A/(dW)` in
//! degree `d`, so some even entry must have degree between 0 and the top
//! degree `s` of the Milnor algebra. The default window is the set of `d`
//! allowed by this, and results over it are certified.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorization::{Homotopy, MatrixFactorization, MfMorphism, Residual};
use crate::linalg::{Echelon, LinearMap, SparseVec};
use crate::matrix::{MatrixText, PolyMatrix};
use crate::poly::{monomials_of_weighted_degree, monomials_up_to_total_degree, Monomial, Polynomial};
use crate::scalar::{Field, Scalar};
use crate::weights::{milnor_top_degree, WeightSystem};

/// Matrix slots of the Hom complex between `P` and `Q`: the even components
/// `phi0: P0 -> Q0`, `phi1: P1 -> Q1` and the odd ones `t0: P0 -> Q1`,
/// `t1: P1 -> Q0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    Phi0,
    Phi1,
    T0,
    T1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn slots(self) -> [Slot; 2] {
        match self {
            Parity::Even => [Slot::Phi0, Slot::Phi1],
            Parity::Odd => [Slot::T0, Slot::T1],
        }
    }
}

/// One coordinate: the coefficient of `monomial` in entry `(row, col)` of a slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub slot: Slot,
    pub row: usize,
    pub col: usize,
    pub monomial: Monomial,
}

/// Coordinates are kept if the filter returns true; used to restrict to an
/// isotypic component.
pub type CoordFilter<'a> = &'a dyn Fn(&Coord) -> bool;

/// How far to enumerate matrix entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Window {
    /// Graded objects: internal degree `d` of the morphism.
    Degree(i64),
    /// Ungraded objects: total degree bound on every entry.
    TotalDegree(u32),
}

/// A basis of monomial coordinates for one parity of the Hom complex.
#[derive(Clone, Debug)]
pub struct Space {
    coords: Vec<Coord>,
}

/// Growing coordinate index for image vectors.
#[derive(Clone, Debug, Default)]
pub struct Indexer {
    map: IndexMap<Coord, usize>,
}

impl Indexer {
    pub fn seeded(space: &Space) -> Indexer {
        let mut ix = Indexer::default();
        for c in &space.coords {
            ix.index(c);
        }
        ix
    }

    pub fn index(&mut self, c: &Coord) -> usize {
        let next = self.map.len();
        *self.map.entry(c.clone()).or_insert(next)
    }

    pub fn coord(&self, i: usize) -> &Coord {
        self.map.get_index(i).expect("index in range").0
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// The pair `(P, Q)` whose Hom complex is being studied.
#[derive(Clone, Copy, Debug)]
pub struct HomPair<'a> {
    pub p: &'a MatrixFactorization,
    pub q: &'a MatrixFactorization,
}

impl<'a> HomPair<'a> {
    pub fn new(p: &'a MatrixFactorization, q: &'a MatrixFactorization) -> Result<HomPair<'a>> {
        if p.w() != q.w() {
            return Err(Error::Usage(format!("superpotentials differ: {} vs {}", p.w(), q.w())));
        }
        Ok(HomPair { p, q })
    }

    fn field(&self) -> Field {
        self.p.field()
    }

    fn nvars(&self) -> usize {
        self.p.nvars()
    }

    /// Graded data `(weights, D)` when both objects are graded.
    pub fn grading(&self) -> Option<(&'a WeightSystem, i64)> {
        let ws = self.p.weights()?;
        self.q.weights()?;
        Some((ws, ws.degree as i64))
    }

    fn shape(&self, _slot: Slot) -> (usize, usize) {
        (self.q.rank(), self.p.rank())
    }

    /// Degree forced on entry `(k, j)` of `slot` for a map of internal degree `d`.
    pub fn entry_degree(&self, slot: Slot, k: usize, j: usize, d: i64) -> Option<i64> {
        let (_, dw) = self.grading()?;
        Some(match slot {
            Slot::Phi0 => self.q.n0()[k] - self.p.n0()[j] + d,
            Slot::Phi1 => self.q.n1()[k] - self.p.n1()[j] + d,
            Slot::T0 => self.q.n1()[k] - self.p.n0()[j] + d - dw,
            Slot::T1 => self.q.n0()[k] - self.p.n1()[j] + d,
        })
    }

    pub fn space(&self, parity: Parity, window: Window, filter: Option<CoordFilter>) -> Result<Space> {
        let mut coords = Vec::new();
        for slot in parity.slots() {
            let (rows, cols) = self.shape(slot);
            for k in 0..rows {
                for j in 0..cols {
                    let monos = match window {
                        Window::Degree(d) => {
                            let (ws, _) = self.grading().ok_or(Error::MissingGrading)?;
                            let e = self.entry_degree(slot, k, j, d).expect("graded");
                            monomials_of_weighted_degree(&ws.weights, e)
                        }
                        Window::TotalDegree(n) => monomials_up_to_total_degree(self.nvars(), n),
                    };
                    for m in monos {
                        let c = Coord { slot, row: k, col: j, monomial: m };
                        if filter.map_or(true, |f| f(&c)) {
                            coords.push(c);
                        }
                    }
                }
            }
        }
        Ok(Space { coords })
    }

    /// `D` applied to a single monomial coordinate, as `(coord, coefficient)` terms.
    pub fn differential_of(&self, c: &Coord) -> Vec<(Coord, Scalar)> {
        let (p, q) = (self.p, self.q);
        let one = self.field().one();
        let minus = self.field().from_i64(-1);
        let (k, j, m) = (c.row, c.col, &c.monomial);
        let mut out = Vec::new();
        match c.slot {
            // (q0 phi0 - phi1 p0, q1 phi1 - phi0 p1)
            Slot::Phi0 => {
                left(q.p0(), k, j, m, &one, Slot::T0, &mut out);
                right(p.p1(), k, j, m, &minus, Slot::T1, &mut out);
            }
            Slot::Phi1 => {
                right(p.p0(), k, j, m, &minus, Slot::T0, &mut out);
                left(q.p1(), k, j, m, &one, Slot::T1, &mut out);
            }
            // (q1 t0 + t1 p0, q0 t1 + t0 p1)
            Slot::T0 => {
                left(q.p1(), k, j, m, &one, Slot::Phi0, &mut out);
                right(p.p1(), k, j, m, &one, Slot::Phi1, &mut out);
            }
            Slot::T1 => {
                right(p.p0(), k, j, m, &one, Slot::Phi0, &mut out);
                left(q.p0(), k, j, m, &one, Slot::Phi1, &mut out);
            }
        }
        out
    }

    /// Images of every coordinate of `space` under `D`, indexed by `ix`.
    pub fn differential_images(&self, space: &Space, ix: &mut Indexer) -> Vec<SparseVec> {
        space.coords.iter().map(|c| to_sparse(self.differential_of(c), ix)).collect()
    }

    /// Coordinates of a pair of matrices placed in `slots`.
    pub fn coords_of(&self, slots: [Slot; 2], a: &PolyMatrix, b: &PolyMatrix, ix: &mut Indexer) -> SparseVec {
        let mut terms = Vec::new();
        for (slot, mat) in slots.into_iter().zip([a, b]) {
            for (k, j, poly) in mat.entries() {
                for (mono, coeff) in poly.terms() {
                    terms.push((Coord { slot, row: k, col: j, monomial: mono.clone() }, coeff.clone()));
                }
            }
        }
        to_sparse(terms, ix)
    }

    /// Rebuilds the two matrices of a parity from a coordinate vector.
    pub fn matrices_of(&self, parity: Parity, v: &SparseVec, ix: &Indexer) -> (PolyMatrix, PolyMatrix) {
        let (n, f) = (self.nvars(), self.field());
        let [s0, s1] = parity.slots();
        let (r, c) = self.shape(s0);
        let mut entries: BTreeMap<(Slot, usize, usize), Vec<(Monomial, Scalar)>> = BTreeMap::new();
        for (i, a) in v {
            let coord = ix.coord(*i);
            entries
                .entry((coord.slot, coord.row, coord.col))
                .or_default()
                .push((coord.monomial.clone(), a.clone()));
        }
        let mut m0 = PolyMatrix::zero(r, c, n, f);
        let mut m1 = PolyMatrix::zero(r, c, n, f);
        for ((slot, k, j), terms) in entries {
            let poly = Polynomial::from_terms(n, f, terms);
            if slot == s0 {
                m0.set(k, j, poly);
            } else if slot == s1 {
                m1.set(k, j, poly);
            } else {
                panic!("coordinate of the wrong parity");
            }
        }
        (m0, m1)
    }
}

impl Space {
    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

// Terms of A * (m E_kj): column j receives A[:, k] m.
fn left(a: &PolyMatrix, k: usize, j: usize, m: &Monomial, sign: &Scalar, slot: Slot, out: &mut Vec<(Coord, Scalar)>) {
    for r in 0..a.rows() {
        for (mono, c) in a.get(r, k).terms() {
            out.push((Coord { slot, row: r, col: j, monomial: mono.mul(m) }, c.mul(sign)));
        }
    }
}

// Terms of (m E_kj) * B: row k receives m B[j, :].
fn right(b: &PolyMatrix, k: usize, j: usize, m: &Monomial, sign: &Scalar, slot: Slot, out: &mut Vec<(Coord, Scalar)>) {
    for col in 0..b.cols() {
        for (mono, c) in b.get(j, col).terms() {
            out.push((Coord { slot, row: k, col, monomial: mono.mul(m) }, c.mul(sign)));
        }
    }
}

fn to_sparse(terms: Vec<(Coord, Scalar)>, ix: &mut Indexer) -> SparseVec {
    crate::linalg::from_pairs(terms.into_iter().map(|(c, a)| (ix.index(&c), a)))
}

/// Result of checking the chain-map equations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub ok: bool,
    pub residuals: Vec<Residual>,
}

/// Checks `phi1 p0 = q0 phi0` and `q1 phi1 = phi0 p1` exactly.
pub fn is_chain_map(phi: &MfMorphism) -> ChainCheck {
    let residuals = phi.chain_residuals();
    ChainCheck { ok: residuals.is_empty(), residuals }
}

/// `D(a, b) = D_Q (a, b) - (-1)^k (a, b) D_P` on a pair of the given parity.
/// Even input `(phi0, phi1)` gives `(q0 phi0 - phi1 p0, q1 phi1 - phi0 p1)`;
/// odd input `(t0, t1)` gives `(q1 t0 + t1 p0, q0 t1 + t0 p1)`.
pub fn hom_differential(
    p: &MatrixFactorization,
    q: &MatrixFactorization,
    a: &PolyMatrix,
    b: &PolyMatrix,
    parity: Parity,
) -> Result<(PolyMatrix, PolyMatrix)> {
    match parity {
        Parity::Even => Ok((
            q.p0().checked_mul(a)?.checked_sub(&b.checked_mul(p.p0())?)?,
            q.p1().checked_mul(b)?.checked_sub(&a.checked_mul(p.p1())?)?,
        )),
        Parity::Odd => Ok((
            q.p1().checked_mul(a)?.checked_add(&b.checked_mul(p.p0())?)?,
            q.p0().checked_mul(b)?.checked_add(&a.checked_mul(p.p1())?)?,
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomotopyResult {
    Found(Homotopy),
    /// No homotopy exists; the search was exhaustive.
    NoneCertified,
    /// No homotopy with entries inside the degree bound.
    NoneTruncated,
}

impl HomotopyResult {
    pub fn found(&self) -> Option<&Homotopy> {
        match self {
            HomotopyResult::Found(h) => Some(h),
            _ => None,
        }
    }
}

/// Searches for `(t0, t1)` with `phi = D(t0, t1)`.
///
/// Graded inputs are split into homogeneous components and solved degree by
/// degree, which is exhaustive. Ungraded inputs need `bound`, a total-degree
/// bound on the entries of the homotopy.
pub fn find_homotopy(phi: &MfMorphism, bound: Option<u32>) -> Result<HomotopyResult> {
    find_homotopy_filtered(phi, bound, None)
}

pub(crate) fn find_homotopy_filtered(
    phi: &MfMorphism,
    bound: Option<u32>,
    filter: Option<CoordFilter>,
) -> Result<HomotopyResult> {
    let check = is_chain_map(phi);
    if let Some(r) = check.residuals.first() {
        return Err(Error::NotChainMap(format!("{} has entry ({}, {}) = {}", r.product, r.row, r.col, r.value)));
    }
    let pair = HomPair::new(&phi.source, &phi.target)?;
    let mut total = Homotopy::zero(pair.p, pair.q);
    if pair.grading().is_some() {
        for (d, part) in phi.homogeneous_parts()? {
            match solve_homotopy(&pair, &part, Window::Degree(d), filter)? {
                Some(h) => {
                    total.t0 = total.t0.checked_add(&h.t0)?;
                    total.t1 = total.t1.checked_add(&h.t1)?;
                }
                None => return Ok(HomotopyResult::NoneCertified),
            }
        }
        return Ok(HomotopyResult::Found(total));
    }
    let n = bound.ok_or(Error::MissingGrading)?;
    Ok(match solve_homotopy(&pair, phi, Window::TotalDegree(n), filter)? {
        Some(h) => HomotopyResult::Found(h),
        None => HomotopyResult::NoneTruncated,
    })
}

fn solve_homotopy(pair: &HomPair, phi: &MfMorphism, window: Window, filter: Option<CoordFilter>) -> Result<Option<Homotopy>> {
    let space = pair.space(Parity::Odd, window, filter)?;
    let mut ix = Indexer::default();
    let images = pair.differential_images(&space, &mut ix);
    let rhs = pair.coords_of([Slot::Phi0, Slot::Phi1], &phi.phi0, &phi.phi1, &mut ix);
    let map = LinearMap::new(pair.field(), &images);
    Ok(map.solve(&rhs).map(|x| {
        // unknown indices are positions in `space`
        let (t0, t1) = pair.matrices_of(Parity::Odd, &x, &Indexer::seeded(&space));
        Homotopy { t0, t1 }
    }))
}

/// Which internal degrees a Hom computation covered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowSpec {
    Degrees { lo: i64, hi: i64 },
    TotalDegree(u32),
}

/// Chain maps, boundaries and classes in one internal degree.
#[derive(Clone, Debug)]
pub struct DegreeHom {
    /// Internal degree, or the total-degree bound for ungraded computations.
    pub d: i64,
    pub z: usize,
    pub b: usize,
    pub h: usize,
    /// Representatives of a basis of `Z/B`.
    pub representatives: Vec<(PolyMatrix, PolyMatrix)>,
    /// Basis of the chain maps (reduced echelon form over the coordinates).
    pub cycles: Vec<SparseVec>,
    /// Basis of the null-homotopic chain maps.
    pub boundaries: Vec<SparseVec>,
    /// Coordinate labels for the vectors above.
    pub coords: Indexer,
}

#[derive(Clone, Debug)]
pub struct HomSpace {
    pub source: MatrixFactorization,
    pub target: MatrixFactorization,
    pub window: WindowSpec,
    pub per_degree: Vec<DegreeHom>,
    pub total: usize,
    /// True when the window provably contains every nonzero degree.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRow {
    pub d: i64,
    #[serde(rename = "Z")]
    pub z: usize,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "H")]
    pub h: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomReport {
    pub per_degree: Vec<DegreeRow>,
    pub total: usize,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentativeText {
    pub d: i64,
    pub phi0: MatrixText,
    pub phi1: MatrixText,
}

impl HomSpace {
    pub fn report(&self) -> HomReport {
        HomReport {
            per_degree: self
                .per_degree
                .iter()
                .map(|r| DegreeRow { d: r.d, z: r.z, b: r.b, h: r.h })
                .collect(),
            total: self.total,
            certified: self.certified,
        }
    }

    /// Dimensions by degree, omitting degrees where every count is zero.
    pub fn nonzero_rows(&self) -> Vec<DegreeRow> {
        self.report().per_degree.into_iter().filter(|r| r.z + r.b + r.h > 0).collect()
    }

    pub fn representatives(&self) -> Vec<RepresentativeText> {
        self.per_degree
            .iter()
            .flat_map(|r| {
                r.representatives.iter().map(move |(a, b)| RepresentativeText {
                    d: r.d,
                    phi0: MatrixText::from(a),
                    phi1: MatrixText::from(b),
                })
            })
            .collect()
    }

    /// Representatives as morphisms.
    pub fn basis(&self) -> Vec<MfMorphism> {
        self.per_degree
            .iter()
            .flat_map(|r| r.representatives.iter())
            .map(|(a, b)| {
                MfMorphism::new(self.source.clone(), self.target.clone(), a.clone(), b.clone())
                    .expect("shapes from the coordinate space")
            })
            .collect()
    }

    /// Chain maps of all degrees in the window, as morphisms.
    pub fn cycle_basis(&self) -> Vec<(i64, MfMorphism)> {
        let pair = HomPair { p: &self.source, q: &self.target };
        self.per_degree
            .iter()
            .flat_map(|r| {
                let pair = pair;
                r.cycles.iter().map(move |v| {
                    let (a, b) = pair.matrices_of(Parity::Even, v, &r.coords);
                    (r.d, MfMorphism::new(pair.p.clone(), pair.q.clone(), a, b).expect("shapes"))
                })
            })
            .collect()
    }
}

/// Range of internal degrees that can carry classes, and whether that range
/// is proven (isolated critical point).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Support {
    pub lo: i64,
    pub hi: i64,
    pub proven: bool,
}

/// Degrees `d` for which some even entry has degree in `[0, s]`.
pub fn hom_support(p: &MatrixFactorization, q: &MatrixFactorization) -> Result<Option<Support>> {
    let pair = HomPair::new(p, q)?;
    let Some((ws, _)) = pair.grading() else { return Err(Error::MissingGrading) };
    let mut diffs: Vec<i64> = Vec::new();
    for (pn, qn) in [(p.n0(), q.n0()), (p.n1(), q.n1())] {
        for a in &pn {
            for b in &qn {
                diffs.push(a - b);
            }
        }
    }
    if diffs.is_empty() {
        return Ok(None);
    }
    let lo = *diffs.iter().min().expect("nonempty");
    let hi = *diffs.iter().max().expect("nonempty");
    Ok(Some(match milnor_top_degree(p.w(), ws)? {
        Some(s) => Support { lo, hi: hi + s, proven: true },
        None => Support { lo, hi, proven: false },
    }))
}

/// `Hom_MF(P, Q)` degree by degree.
///
/// For graded objects `window` is the largest internal degree to include
/// (the default is the proven support). For ungraded objects it is required
/// and bounds the total degree of matrix entries; such results are never
/// certified.
pub fn hom_space(p: &MatrixFactorization, q: &MatrixFactorization, window: Option<i64>) -> Result<HomSpace> {
    hom_space_filtered(p, q, window, None)
}

pub(crate) fn hom_space_filtered(
    p: &MatrixFactorization,
    q: &MatrixFactorization,
    window: Option<i64>,
    filter: Option<CoordFilter>,
) -> Result<HomSpace> {
    let pair = HomPair::new(p, q)?;
    if pair.grading().is_none() {
        let n = window.ok_or(Error::MissingGrading)?;
        let n = u32::try_from(n).map_err(|_| Error::Usage("degree bound must be non-negative".into()))?;
        let row = bounded_degree(&pair, n, filter)?;
        return Ok(HomSpace {
            source: p.clone(),
            target: q.clone(),
            window: WindowSpec::TotalDegree(n),
            total: row.h,
            per_degree: vec![row],
            certified: false,
        });
    }
    let (lo, hi, certified) = match hom_support(p, q)? {
        None => (0, -1, true),
        Some(s) => match window {
            Some(top) => (s.lo, top, s.proven && top >= s.hi),
            None if s.proven => (s.lo, s.hi, true),
            None => {
                return Err(Error::Usage(
                    "W has a non-isolated critical point; an explicit window is required".into(),
                ))
            }
        },
    };
    let mut per_degree = Vec::new();
    for d in lo..=hi {
        per_degree.push(graded_degree(&pair, d, filter)?);
    }
    let total = per_degree.iter().map(|r| r.h).sum();
    Ok(HomSpace {
        source: p.clone(),
        target: q.clone(),
        window: WindowSpec::Degrees { lo, hi },
        per_degree,
        total,
        certified,
    })
}

fn graded_degree(pair: &HomPair, d: i64, filter: Option<CoordFilter>) -> Result<DegreeHom> {
    let field = pair.field();
    let even = pair.space(Parity::Even, Window::Degree(d), filter)?;
    let odd = pair.space(Parity::Odd, Window::Degree(d), filter)?;
    let mut ix = Indexer::seeded(&even);
    // D on the even part lands in odd coordinates, kept in a separate index
    let mut odd_ix = Indexer::default();
    let d_even = pair.differential_images(&even, &mut odd_ix);
    let cycles = LinearMap::new(field, &d_even).kernel();
    let d_odd = pair.differential_images(&odd, &mut ix);
    debug_assert_eq!(ix.len(), even.len(), "boundaries stay in the even space of degree d");
    let mut bound = Echelon::new(field);
    for v in &d_odd {
        bound.insert(v);
    }
    finish(pair, d, cycles, bound, ix)
}

fn bounded_degree(pair: &HomPair, n: u32, filter: Option<CoordFilter>) -> Result<DegreeHom> {
    let field = pair.field();
    let even = pair.space(Parity::Even, Window::TotalDegree(n), filter)?;
    let odd = pair.space(Parity::Odd, Window::TotalDegree(n), filter)?;
    let mut ix = Indexer::seeded(&even);
    let mut odd_ix = Indexer::default();
    let d_even = pair.differential_images(&even, &mut odd_ix);
    let cycles = LinearMap::new(field, &d_even).kernel();
    let d_odd = pair.differential_images(&odd, &mut ix);
    // boundaries that are also chain maps of the window: Z intersect Im
    let mut stacked: Vec<SparseVec> = cycles.clone();
    stacked.extend(d_odd.iter().map(|v| crate::linalg::scale(v, &field.from_i64(-1))));
    let relations = LinearMap::new(field, &stacked).kernel();
    let mut bound = Echelon::new(field);
    for rel in relations {
        let combo: SparseVec = crate::linalg::from_pairs(
            rel.iter()
                .filter(|(i, _)| *i < cycles.len())
                .flat_map(|(i, a)| cycles[*i].iter().map(move |(j, b)| (*j, a.mul(b)))),
        );
        bound.insert(&combo);
    }
    finish(pair, n as i64, cycles, bound, ix)
}

fn finish(pair: &HomPair, d: i64, cycles: Vec<SparseVec>, bound: Echelon, ix: Indexer) -> Result<DegreeHom> {
    let b = bound.rank();
    let boundaries = bound.clone().into_rref();
    let mut quotient = bound;
    let mut representatives = Vec::new();
    for v in &cycles {
        if quotient.insert(v) {
            representatives.push(pair.matrices_of(Parity::Even, v, &ix));
        }
    }
    let z = cycles.len();
    debug_assert_eq!(z - b, representatives.len());
    Ok(DegreeHom { d, z, b, h: representatives.len(), representatives, cycles, boundaries, coords: ix })
}

/// Outcome of the homotopy-equivalence test.
#[derive(Clone, Debug)]
pub enum Equivalence {
    Yes {
        inverse: MfMorphism,
        source_homotopy: Homotopy,
        target_homotopy: Homotopy,
    },
    No,
    /// No inverse with entries inside the degree bound.
    Unknown,
}

impl Equivalence {
    pub fn is_yes(&self) -> bool {
        matches!(self, Equivalence::Yes { .. })
    }
}

/// Decides whether the chain map `phi: P -> Q` is a homotopy equivalence by
/// solving for `psi`, `h_P`, `h_Q` with `D psi = 0`, `psi phi - D h_P = id`
/// and `phi psi - D h_Q = id` in one linear system.
pub fn is_homotopy_equivalence(phi: &MfMorphism, bound: Option<u32>) -> Result<Equivalence> {
    let check = is_chain_map(phi);
    if let Some(r) = check.residuals.first() {
        return Err(Error::NotChainMap(format!("{} has entry ({}, {}) = {}", r.product, r.row, r.col, r.value)));
    }
    let (p, q) = (&phi.source, &phi.target);
    let back = HomPair::new(q, p)?;
    let end_p = HomPair::new(p, p)?;
    let end_q = HomPair::new(q, q)?;
    let graded = back.grading().is_some();
    let (w_psi, w_h) = if graded {
        let d = if phi.is_zero() {
            0
        } else {
            phi.degree().ok_or_else(|| Error::Grading("the map is not homogeneous".into()))?
        };
        (Window::Degree(-d), Window::Degree(0))
    } else {
        let n = bound.ok_or(Error::MissingGrading)?;
        (Window::TotalDegree(n), Window::TotalDegree(n))
    };
    let psi_space = back.space(Parity::Even, w_psi, None)?;
    let hp_space = end_p.space(Parity::Odd, w_h, None)?;
    let hq_space = end_q.space(Parity::Odd, w_h, None)?;

    // three blocks of equations, each with its own coordinate index
    let mut ix_a = Indexer::default();
    let mut ix_b = Indexer::default();
    let mut ix_c = Indexer::default();
    let field = p.field();
    let mut raw: Vec<[SparseVec; 3]> = Vec::new();
    for c in psi_space.coords() {
        let a = to_sparse(back.differential_of(c), &mut ix_a);
        let unit = unit_matrices(&back, c);
        let (u0, u1) = (&unit.0, &unit.1);
        // psi . phi and phi . psi
        let b = end_p.coords_of(
            [Slot::Phi0, Slot::Phi1],
            &u0.checked_mul(&phi.phi0)?,
            &u1.checked_mul(&phi.phi1)?,
            &mut ix_b,
        );
        let cc = end_q.coords_of(
            [Slot::Phi0, Slot::Phi1],
            &phi.phi0.checked_mul(u0)?,
            &phi.phi1.checked_mul(u1)?,
            &mut ix_c,
        );
        raw.push([a, b, cc]);
    }
    let minus = field.from_i64(-1);
    for c in hp_space.coords() {
        let b = crate::linalg::scale(&to_sparse(end_p.differential_of(c), &mut ix_b), &minus);
        raw.push([Vec::new(), b, Vec::new()]);
    }
    for c in hq_space.coords() {
        let cc = crate::linalg::scale(&to_sparse(end_q.differential_of(c), &mut ix_c), &minus);
        raw.push([Vec::new(), Vec::new(), cc]);
    }
    let id_p = PolyMatrix::identity(p.rank(), p.nvars(), field);
    let id_q = PolyMatrix::identity(q.rank(), q.nvars(), field);
    let rhs_b = end_p.coords_of([Slot::Phi0, Slot::Phi1], &id_p, &id_p, &mut ix_b);
    let rhs_c = end_q.coords_of([Slot::Phi0, Slot::Phi1], &id_q, &id_q, &mut ix_c);
    let (na, nb) = (ix_a.len(), ix_b.len());
    let join = |a: &SparseVec, b: &SparseVec, c: &SparseVec| -> SparseVec {
        a.iter()
            .cloned()
            .chain(b.iter().map(|(i, x)| (i + na, x.clone())))
            .chain(c.iter().map(|(i, x)| (i + na + nb, x.clone())))
            .collect()
    };
    let images: Vec<SparseVec> = raw.iter().map(|[a, b, c]| join(a, b, c)).collect();
    let rhs = join(&Vec::new(), &rhs_b, &rhs_c);
    let map = LinearMap::new(field, &images);
    let Some(x) = map.solve(&rhs) else {
        return Ok(if graded { Equivalence::No } else { Equivalence::Unknown });
    };
    let (n1, n2) = (psi_space.len(), hp_space.len());
    let part = |lo: usize, hi: usize| -> SparseVec {
        x.iter().filter(|(i, _)| *i >= lo && *i < hi).map(|(i, a)| (i - lo, a.clone())).collect()
    };
    let (psi0, psi1) = back.matrices_of(Parity::Even, &part(0, n1), &Indexer::seeded(&psi_space));
    let (hp0, hp1) = end_p.matrices_of(Parity::Odd, &part(n1, n1 + n2), &Indexer::seeded(&hp_space));
    let (hq0, hq1) = end_q.matrices_of(Parity::Odd, &part(n1 + n2, images.len()), &Indexer::seeded(&hq_space));
    Ok(Equivalence::Yes {
        inverse: MfMorphism::new(q.clone(), p.clone(), psi0, psi1)?,
        source_homotopy: Homotopy { t0: hp0, t1: hp1 },
        target_homotopy: Homotopy { t0: hq0, t1: hq1 },
    })
}

/// The pair of matrices with a single monomial at coordinate `c`.
fn unit_matrices(pair: &HomPair, c: &Coord) -> (PolyMatrix, PolyMatrix) {
    let (n, f) = (pair.nvars(), pair.field());
    let (r, cols) = pair.shape(c.slot);
    let mut a = PolyMatrix::zero(r, cols, n, f);
    let mut b = PolyMatrix::zero(r, cols, n, f);
    let entry = Polynomial::term(c.monomial.clone(), f.one());
    match c.slot {
        Slot::Phi0 | Slot::T0 => a.set(c.row, c.col, entry),
        Slot::Phi1 | Slot::T1 => b.set(c.row, c.col, entry),
    }
    (a, b)
}
