//! Matrix factorizations `(p0: P0 -> P1, p1: P1 -> P0)` with
//! `p1 p0 = W id` and `p0 p1 = W id`, their morphisms and the standard
//! constructions: elementary and Koszul factorizations, the trivial brick,
//! shift, direct sum and mapping cone.
//!
//! # Grading
//!
//! When `W` is quasi-homogeneous of degree `D`, objects may carry internal
//! generator degrees. Each object stores the degrees of the generators of
//! `P0` and `P1` together with the degree `e` of `p0`; entry `(i, j)` of `p0`
//! then has degree `deg1[i] - deg0[j] + e` and entry `(j, i)` of `p1` has
//! degree `deg0[j] - deg1[i] + D - e`. The shift swaps the generator degrees
//! and replaces `e` by `D - e`, so applying it twice returns the object
//! unchanged. The grading is bookkeeping only: the category is the ungraded
//! one, and homogeneous pieces are used to make morphism spaces finite.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{MatrixJson, PolyMatrix};
use crate::poly::{Polynomial, TermJson};
use crate::scalar::Field;
use crate::weights::{detect_weights, WeightSystem};

/// A free module of finite rank with one internal degree per generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedFreeModule {
    pub degrees: Vec<i64>,
}

impl GradedFreeModule {
    pub fn new(degrees: Vec<i64>) -> GradedFreeModule {
        GradedFreeModule { degrees }
    }

    pub fn ungraded(rank: usize) -> GradedFreeModule {
        GradedFreeModule { degrees: vec![0; rank] }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    fn concat(&self, other: &GradedFreeModule) -> GradedFreeModule {
        GradedFreeModule { degrees: self.degrees.iter().chain(&other.degrees).copied().collect() }
    }

    fn offset(&self, by: i64) -> GradedFreeModule {
        GradedFreeModule { degrees: self.degrees.iter().map(|d| d + by).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixFactorization {
    w: Polynomial,
    weights: Option<WeightSystem>,
    modules: [GradedFreeModule; 2],
    p0_degree: i64,
    p0: PolyMatrix,
    p1: PolyMatrix,
}

/// One nonzero entry of `p1 p0 - W id` or `p0 p1 - W id`, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub product: String,
    pub row: usize,
    pub col: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub residuals: Vec<Residual>,
}

fn check_ring(w: &Polynomial, m: &PolyMatrix) -> Result<()> {
    if m.nvars() != w.nvars() || m.field() != w.field() {
        return Err(Error::RingMismatch("matrix and superpotential live in different rings".into()));
    }
    Ok(())
}

impl MatrixFactorization {
    /// Builds a factorization, attaching a grading when `W` is
    /// quasi-homogeneous and every entry is homogeneous. Does not check the
    /// factorization identities; see [`MatrixFactorization::verify`].
    pub fn new(w: Polynomial, p0: PolyMatrix, p1: PolyMatrix) -> Result<MatrixFactorization> {
        let mut mf = MatrixFactorization::ungraded(w, p0, p1)?;
        if let Some(ws) = detect_weights(&mf.w)? {
            if let Ok((deg0, deg1)) = infer_grading(&ws, &mf.p0, &mf.p1) {
                mf.weights = Some(ws);
                mf.modules = [GradedFreeModule::new(deg0), GradedFreeModule::new(deg1)];
            }
        }
        Ok(mf)
    }

    /// Builds a factorization without grading data.
    pub fn ungraded(w: Polynomial, p0: PolyMatrix, p1: PolyMatrix) -> Result<MatrixFactorization> {
        if w.is_zero() {
            return Err(Error::ZeroSuperpotential);
        }
        check_ring(&w, &p0)?;
        check_ring(&w, &p1)?;
        let r = p0.rows();
        if p0.cols() != r || p1.rows() != r || p1.cols() != r {
            return Err(Error::Shape(format!(
                "p0 is {}x{} and p1 is {}x{}; both must be square of the same size",
                p0.rows(),
                p0.cols(),
                p1.rows(),
                p1.cols()
            )));
        }
        Ok(MatrixFactorization {
            w,
            weights: None,
            modules: [GradedFreeModule::ungraded(r), GradedFreeModule::ungraded(r)],
            p0_degree: 0,
            p0,
            p1,
        })
    }

    /// Builds a factorization with explicit grading data, checking that every
    /// entry is homogeneous of the degree its position forces.
    pub fn graded(
        w: Polynomial,
        weights: WeightSystem,
        deg0: Vec<i64>,
        deg1: Vec<i64>,
        p0_degree: i64,
        p0: PolyMatrix,
        p1: PolyMatrix,
    ) -> Result<MatrixFactorization> {
        let mut mf = MatrixFactorization::ungraded(w, p0, p1)?;
        if deg0.len() != mf.rank() || deg1.len() != mf.rank() {
            return Err(Error::Shape("generator degree lists must match the rank".into()));
        }
        if !weights.is_quasi_homogeneous(&mf.w) {
            return Err(Error::Grading(format!("W = {} is not homogeneous for the given weights", mf.w)));
        }
        mf.weights = Some(weights);
        mf.modules = [GradedFreeModule::new(deg0), GradedFreeModule::new(deg1)];
        mf.p0_degree = p0_degree;
        mf.check_grading()?;
        Ok(mf)
    }

    /// The rank-zero factorization, unit for direct sums.
    pub fn zero(w: Polynomial) -> Result<MatrixFactorization> {
        let (n, f) = (w.nvars(), w.field());
        MatrixFactorization::new(w, PolyMatrix::zero(0, 0, n, f), PolyMatrix::zero(0, 0, n, f))
    }

    /// The rank-one factorization `(u | v)` of `W = u v`.
    pub fn elementary(w: Polynomial, u: Polynomial, v: Polynomial) -> Result<MatrixFactorization> {
        MatrixFactorization::koszul(w, &[(u, v)])
    }

    /// Tensor product of the rank-one factorizations `(u_i | v_i)`, of rank
    /// `2^(s-1)`. Requires `sum u_i v_i = W`.
    pub fn koszul(w: Polynomial, pairs: &[(Polynomial, Polynomial)]) -> Result<MatrixFactorization> {
        if w.is_zero() {
            return Err(Error::ZeroSuperpotential);
        }
        if pairs.is_empty() {
            return Err(Error::Usage("at least one pair (u, v) is required".into()));
        }
        let (n, f) = (w.nvars(), w.field());
        let mut sum = Polynomial::zero(n, f);
        for (u, v) in pairs {
            sum = sum.checked_add(&u.checked_mul(v)?)?;
        }
        if sum != w {
            return Err(Error::KoszulResidual { residual: &w - &sum });
        }
        let (u, v) = &pairs[0];
        let mut a0 = PolyMatrix::scalar(1, u);
        let mut a1 = PolyMatrix::scalar(1, v);
        for (u, v) in &pairs[1..] {
            let r = a0.rows();
            let ui = PolyMatrix::scalar(r, u);
            let vi = PolyMatrix::scalar(r, v);
            let b0 = PolyMatrix::block2(&a0, &vi.neg(), &ui, &a1)?;
            let b1 = PolyMatrix::block2(&a1, &vi, &ui.neg(), &a0)?;
            a0 = b0;
            a1 = b1;
        }
        MatrixFactorization::new(w, a0, a1)
    }

    pub fn w(&self) -> &Polynomial {
        &self.w
    }

    pub fn nvars(&self) -> usize {
        self.w.nvars()
    }

    pub fn field(&self) -> Field {
        self.w.field()
    }

    pub fn rank(&self) -> usize {
        self.p0.rows()
    }

    pub fn p0(&self) -> &PolyMatrix {
        &self.p0
    }

    pub fn p1(&self) -> &PolyMatrix {
        &self.p1
    }

    pub fn weights(&self) -> Option<&WeightSystem> {
        self.weights.as_ref()
    }

    pub fn is_graded(&self) -> bool {
        self.weights.is_some()
    }

    pub fn module0(&self) -> &GradedFreeModule {
        &self.modules[0]
    }

    pub fn module1(&self) -> &GradedFreeModule {
        &self.modules[1]
    }

    pub fn p0_degree(&self) -> i64 {
        self.p0_degree
    }

    /// Degree `D` of `W`, when graded.
    pub fn w_degree(&self) -> Option<i64> {
        self.weights.as_ref().map(|ws| ws.degree as i64)
    }

    /// Generator degrees of `P0` normalized so that `p0` has degree zero.
    pub fn n0(&self) -> Vec<i64> {
        self.modules[0].degrees.clone()
    }

    /// Generator degrees of `P1` normalized so that `p0` has degree zero
    /// (and `p1` degree `D`).
    pub fn n1(&self) -> Vec<i64> {
        self.modules[1].offset(self.p0_degree).degrees
    }

    /// Drops the grading data.
    pub fn forget_grading(&self) -> MatrixFactorization {
        MatrixFactorization::ungraded(self.w.clone(), self.p0.clone(), self.p1.clone())
            .expect("already validated")
    }

    fn check_grading(&self) -> Result<()> {
        let Some(ws) = &self.weights else { return Ok(()) };
        let (n0, n1) = (self.n0(), self.n1());
        let d = ws.degree as i64;
        for (i, j, p) in self.p0.entries() {
            check_entry(ws, "p0", i, j, p, n1[i] - n0[j])?;
        }
        for (j, i, p) in self.p1.entries() {
            check_entry(ws, "p1", j, i, p, n0[j] - n1[i] + d)?;
        }
        Ok(())
    }

    /// Checks `p1 p0 = W id` and `p0 p1 = W id` exactly.
    pub fn verify(&self) -> VerifyReport {
        let target = PolyMatrix::scalar(self.rank(), &self.w);
        let mut residuals = Vec::new();
        for (name, prod) in [
            ("p1*p0", self.p1.checked_mul(&self.p0)),
            ("p0*p1", self.p0.checked_mul(&self.p1)),
        ] {
            let diff = prod.and_then(|m| m.checked_sub(&target)).expect("validated shapes");
            for (row, col, value) in diff.nonzero_entries() {
                residuals.push(Residual { product: name.into(), row, col, value: value.to_string() });
            }
        }
        VerifyReport { ok: residuals.is_empty(), residuals }
    }

    pub fn is_factorization(&self) -> bool {
        self.verify().ok
    }

    /// `Err(NotFactorization)` naming the first residual, if any.
    pub fn ensure_verified(&self) -> Result<()> {
        let report = self.verify();
        match report.residuals.first() {
            None => Ok(()),
            Some(r) => Err(Error::NotFactorization(format!(
                "{} - W*id has entry ({}, {}) = {}",
                r.product, r.row, r.col, r.value
            ))),
        }
    }

    /// The same matrices read over another field; grading data is kept.
    pub fn change_field(&self, field: Field) -> Result<MatrixFactorization> {
        Ok(MatrixFactorization {
            w: self.w.change_field(field)?,
            p0: self.p0.change_field(field)?,
            p1: self.p1.change_field(field)?,
            ..self.clone()
        })
    }

    /// `P[1] = (-p1, -p0)` with the modules exchanged.
    pub fn shift(&self) -> MatrixFactorization {
        MatrixFactorization {
            w: self.w.clone(),
            weights: self.weights.clone(),
            modules: [self.modules[1].clone(), self.modules[0].clone()],
            p0_degree: self.w_degree().map_or(0, |d| d - self.p0_degree),
            p0: self.p1.neg(),
            p1: self.p0.neg(),
        }
    }

    fn same_w(&self, other: &MatrixFactorization) -> Result<()> {
        if self.w != other.w {
            return Err(Error::Usage(format!(
                "superpotentials differ: {} vs {}",
                self.w, other.w
            )));
        }
        Ok(())
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &MatrixFactorization) -> Result<MatrixFactorization> {
        self.same_w(other)?;
        let p0 = self.p0.direct_sum(&other.p0)?;
        let p1 = self.p1.direct_sum(&other.p1)?;
        match (&self.weights, &other.weights) {
            (Some(ws), Some(_)) => {
                let deg0 = self.modules[0].concat(&other.modules[0]);
                // express the second summand with this summand's p0 degree
                let deg1 = self.modules[1]
                    .concat(&other.modules[1].offset(other.p0_degree - self.p0_degree));
                MatrixFactorization::graded(
                    self.w.clone(),
                    ws.clone(),
                    deg0.degrees,
                    deg1.degrees,
                    self.p0_degree,
                    p0,
                    p1,
                )
            }
            _ => MatrixFactorization::ungraded(self.w.clone(), p0, p1),
        }
    }

    /// The contractible factorization of rank `2 rank(Q)` on
    /// `B0 = Q1 + Q0`, `B1 = Q0 + Q1` with
    /// `b0 = [[-q1, id], [0, q0]]` and `b1 = [[-q0, id], [0, q1]]`.
    /// Its cokernel `coker b1` is free, isomorphic to `Q0/W`.
    pub fn trivial_brick(&self) -> MatrixFactorization {
        let r = self.rank();
        let (n, f) = (self.nvars(), self.field());
        let id = PolyMatrix::identity(r, n, f);
        let zero = PolyMatrix::zero(r, r, n, f);
        let b0 = PolyMatrix::block2(&self.p1.neg(), &id, &zero, &self.p0).expect("square blocks");
        let b1 = PolyMatrix::block2(&self.p0.neg(), &id, &zero, &self.p1).expect("square blocks");
        match &self.weights {
            Some(ws) => {
                let d = ws.degree as i64;
                let (n0, n1) = (self.n0(), self.n1());
                let deg0: Vec<i64> = n1.iter().map(|x| x - d).chain(n0.iter().copied()).collect();
                let deg1: Vec<i64> = n0.iter().chain(n1.iter()).copied().collect();
                MatrixFactorization::graded(self.w.clone(), ws.clone(), deg0, deg1, 0, b0, b1)
                    .expect("brick grading is consistent")
            }
            None => MatrixFactorization::ungraded(self.w.clone(), b0, b1).expect("square blocks"),
        }
    }

    /// Mapping cone of a chain map `phi: P -> Q` with the standard triangle
    /// `P -> Q -> C(phi) -> P[1]`.
    pub fn cone(phi: &MfMorphism) -> Result<Triangle> {
        let residual = phi.chain_residuals();
        if let Some(r) = residual.first() {
            return Err(Error::NotChainMap(format!(
                "{} has entry ({}, {}) = {}",
                r.product, r.row, r.col, r.value
            )));
        }
        let (p, q) = (&phi.source, &phi.target);
        let (n, f) = (p.nvars(), p.field());
        let (rp, rq) = (p.rank(), q.rank());
        let z = PolyMatrix::zero(rp, rq, n, f);
        let c0 = PolyMatrix::block2(&q.p0, &phi.phi1, &z, &p.p1.neg())?;
        let c1 = PolyMatrix::block2(&q.p1, &phi.phi0, &z, &p.p0.neg())?;
        let grading = match (&p.weights, &q.weights, phi.degree()) {
            (Some(ws), Some(_), Some(d)) => Some((ws.clone(), d)),
            (Some(ws), Some(_), None) if phi.is_zero() => Some((ws.clone(), 0)),
            _ => None,
        };
        let cone = match &grading {
            Some((ws, d)) => {
                let dw = ws.degree as i64;
                let deg0: Vec<i64> =
                    q.n0().into_iter().chain(p.n1().into_iter().map(|x| x - d)).collect();
                let deg1: Vec<i64> =
                    q.n1().into_iter().chain(p.n0().into_iter().map(|x| x + dw - d)).collect();
                MatrixFactorization::graded(p.w.clone(), ws.clone(), deg0, deg1, 0, c0, c1)?
            }
            None => MatrixFactorization::ungraded(p.w.clone(), c0, c1)?,
        };
        let source = if grading.is_some() { p.clone() } else { p.forget_grading() };
        let target = if grading.is_some() { q.clone() } else { q.forget_grading() };
        let id_q = PolyMatrix::identity(rq, n, f);
        let id_p = PolyMatrix::identity(rp, n, f);
        let psi = MfMorphism::new(
            target.clone(),
            cone.clone(),
            PolyMatrix::vstack(&id_q, &PolyMatrix::zero(rp, rq, n, f))?,
            PolyMatrix::vstack(&id_q, &PolyMatrix::zero(rp, rq, n, f))?,
        )?;
        let xi = MfMorphism::new(
            cone.clone(),
            source.shift(),
            PolyMatrix::hstack(&PolyMatrix::zero(rp, rq, n, f), &id_p)?,
            PolyMatrix::hstack(&PolyMatrix::zero(rp, rq, n, f), &id_p)?,
        )?;
        let phi = MfMorphism::new(source, target, phi.phi0.clone(), phi.phi1.clone())?;
        Ok(Triangle { phi, cone, psi, xi })
    }

    /// `cok`-side view: the presentation matrix `p1`.
    pub fn presentation(&self) -> &PolyMatrix {
        &self.p1
    }

    pub fn to_json(&self) -> FactorizationJson {
        FactorizationJson {
            w: self.w.to_json(),
            field: Some(self.field().to_string()),
            weights: self.weights.as_ref().map(|ws| ws.weights.clone()),
            p0_deg: self.weights.as_ref().map(|_| self.modules[0].degrees.clone()),
            p1_deg: self.weights.as_ref().map(|_| self.modules[1].degrees.clone()),
            p0_degree: self.weights.as_ref().map(|_| self.p0_degree),
            rank: self.rank(),
            p0: self.p0.to_json(),
            p1: self.p1.to_json(),
            chars0: None,
            chars1: None,
        }
    }

    /// Reads the JSON format. Degrees absent from the file are inferred when
    /// `W` is quasi-homogeneous.
    pub fn from_json(json: &FactorizationJson) -> Result<MatrixFactorization> {
        let field: Field = match &json.field {
            Some(s) => s.parse()?,
            None => Field::Rational,
        };
        let nvars = json
            .w
            .first()
            .map(|t| t.exps.len())
            .ok_or(Error::ZeroSuperpotential)?;
        let w = Polynomial::from_json(&json.w, nvars, field)?;
        let p0 = PolyMatrix::from_json(&json.p0, json.rank, nvars, field)?;
        let p1 = PolyMatrix::from_json(&json.p1, json.rank, nvars, field)?;
        match (&json.weights, &json.p0_deg, &json.p1_deg) {
            (Some(weights), Some(d0), Some(d1)) => {
                let ws = WeightSystem::new(
                    weights.clone(),
                    w.monomials()
                        .next()
                        .map(|m| m.weighted_degree(weights) as u32)
                        .unwrap_or(0),
                )?;
                let e0 = match json.p0_degree {
                    Some(e) => e,
                    None => infer_p0_degree(&ws, d0, d1, &p0).unwrap_or(0),
                };
                MatrixFactorization::graded(w, ws, d0.clone(), d1.clone(), e0, p0, p1)
            }
            (Some(weights), _, _) => {
                let ws = WeightSystem::new(
                    weights.clone(),
                    w.monomials()
                        .next()
                        .map(|m| m.weighted_degree(weights) as u32)
                        .unwrap_or(0),
                )?;
                if !ws.is_quasi_homogeneous(&w) {
                    return Err(Error::Grading("W is not homogeneous for the given weights".into()));
                }
                let (d0, d1) = infer_grading(&ws, &p0, &p1)?;
                MatrixFactorization::graded(w, ws, d0, d1, 0, p0, p1)
            }
            _ => MatrixFactorization::new(w, p0, p1),
        }
    }
}

fn check_entry(ws: &WeightSystem, which: &str, i: usize, j: usize, p: &Polynomial, expected: i64) -> Result<()> {
    for m in p.monomials() {
        let got = ws.degree_of(m);
        if got != expected {
            return Err(Error::Grading(format!(
                "{which}[{},{}] contains {m} of degree {got}, expected degree {expected}",
                i + 1,
                j + 1
            )));
        }
    }
    Ok(())
}

fn infer_p0_degree(ws: &WeightSystem, d0: &[i64], d1: &[i64], p0: &PolyMatrix) -> Option<i64> {
    let (i, j, p) = p0.entries().find(|(_, _, p)| !p.is_zero())?;
    let deg = p.homogeneous_degree(&ws.weights)?;
    Some(deg - d1.get(i)? + d0.get(j)?)
}

/// Generator degrees `(deg0, deg1)` with `p0` of degree zero making every
/// entry homogeneous of the forced degree, found by propagating along the
/// nonzero entries. Disconnected blocks are anchored at degree zero.
pub fn infer_grading(ws: &WeightSystem, p0: &PolyMatrix, p1: &PolyMatrix) -> Result<(Vec<i64>, Vec<i64>)> {
    let r = p0.rows();
    let d = ws.degree as i64;
    // nodes 0..r are P0 generators, r..2r are P1 generators;
    // an edge (a, b, delta) means deg[b] = deg[a] + delta
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); 2 * r];
    for (i, j, p) in p0.entries() {
        if p.is_zero() {
            continue;
        }
        let deg = p
            .homogeneous_degree(&ws.weights)
            .ok_or_else(|| Error::Grading(format!("p0[{},{}] = {p} is not homogeneous", i + 1, j + 1)))?;
        adj[j].push((r + i, deg));
        adj[r + i].push((j, -deg));
    }
    for (j, i, p) in p1.entries() {
        if p.is_zero() {
            continue;
        }
        let deg = p
            .homogeneous_degree(&ws.weights)
            .ok_or_else(|| Error::Grading(format!("p1[{},{}] = {p} is not homogeneous", j + 1, i + 1)))?;
        // deg0[j] - deg1[i] + D = deg
        adj[r + i].push((j, deg - d));
        adj[j].push((r + i, d - deg));
    }
    let mut deg: Vec<Option<i64>> = vec![None; 2 * r];
    for start in 0..2 * r {
        if deg[start].is_some() {
            continue;
        }
        deg[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            let da = deg[a].expect("visited");
            for &(b, delta) in &adj[a] {
                match deg[b] {
                    None => {
                        deg[b] = Some(da + delta);
                        queue.push_back(b);
                    }
                    Some(db) if db != da + delta => {
                        return Err(Error::Grading("entry degrees admit no consistent generator degrees".into()))
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let deg: Vec<i64> = deg.into_iter().map(|x| x.expect("all visited")).collect();
    Ok((deg[..r].to_vec(), deg[r..].to_vec()))
}

/// JSON form of a factorization; matrices are row-major lists of term lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationJson {
    #[serde(rename = "W")]
    pub w: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u32>>,
    #[serde(rename = "P0_deg", default, skip_serializing_if = "Option::is_none")]
    pub p0_deg: Option<Vec<i64>>,
    #[serde(rename = "P1_deg", default, skip_serializing_if = "Option::is_none")]
    pub p1_deg: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0_degree: Option<i64>,
    #[serde(default)]
    pub rank: usize,
    pub p0: MatrixJson,
    pub p1: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chars0: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chars1: Option<Vec<Vec<u64>>>,
}

/// An even morphism `(phi0: P0 -> Q0, phi1: P1 -> Q1)`. Whether it is a
/// chain map is checked separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MfMorphism {
    pub source: MatrixFactorization,
    pub target: MatrixFactorization,
    pub phi0: PolyMatrix,
    pub phi1: PolyMatrix,
}

/// An odd map `(t0: P0 -> Q1, t1: P1 -> Q0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    pub t0: PolyMatrix,
    pub t1: PolyMatrix,
}

/// The standard triangle `P -> Q -> C(phi) -> P[1]`.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub phi: MfMorphism,
    pub cone: MatrixFactorization,
    pub psi: MfMorphism,
    pub xi: MfMorphism,
}

impl MfMorphism {
    pub fn new(
        source: MatrixFactorization,
        target: MatrixFactorization,
        phi0: PolyMatrix,
        phi1: PolyMatrix,
    ) -> Result<MfMorphism> {
        source.same_w(&target)?;
        check_ring(&source.w, &phi0)?;
        check_ring(&source.w, &phi1)?;
        let (rp, rq) = (source.rank(), target.rank());
        if (phi0.rows(), phi0.cols()) != (rq, rp) || (phi1.rows(), phi1.cols()) != (rq, rp) {
            return Err(Error::Shape(format!(
                "components must be {rq}x{rp}, got {}x{} and {}x{}",
                phi0.rows(),
                phi0.cols(),
                phi1.rows(),
                phi1.cols()
            )));
        }
        Ok(MfMorphism { source, target, phi0, phi1 })
    }

    pub fn identity(p: &MatrixFactorization) -> MfMorphism {
        let id = PolyMatrix::identity(p.rank(), p.nvars(), p.field());
        MfMorphism { source: p.clone(), target: p.clone(), phi0: id.clone(), phi1: id }
    }

    pub fn zero(source: &MatrixFactorization, target: &MatrixFactorization) -> Result<MfMorphism> {
        let z = PolyMatrix::zero(target.rank(), source.rank(), source.nvars(), source.field());
        MfMorphism::new(source.clone(), target.clone(), z.clone(), z)
    }

    /// `f * phi` for a polynomial `f`.
    pub fn mul_poly(&self, f: &Polynomial) -> MfMorphism {
        MfMorphism { phi0: self.phi0.mul_poly(f), phi1: self.phi1.mul_poly(f), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.phi0.is_zero() && self.phi1.is_zero()
    }

    /// `other . self`.
    pub fn then(&self, other: &MfMorphism) -> Result<MfMorphism> {
        if self.target.p0 != other.source.p0 || self.target.p1 != other.source.p1 {
            return Err(Error::Usage("morphisms are not composable".into()));
        }
        MfMorphism::new(
            self.source.clone(),
            other.target.clone(),
            other.phi0.checked_mul(&self.phi0)?,
            other.phi1.checked_mul(&self.phi1)?,
        )
    }

    pub fn checked_add(&self, other: &MfMorphism) -> Result<MfMorphism> {
        MfMorphism::new(
            self.source.clone(),
            self.target.clone(),
            self.phi0.checked_add(&other.phi0)?,
            self.phi1.checked_add(&other.phi1)?,
        )
    }

    pub fn checked_sub(&self, other: &MfMorphism) -> Result<MfMorphism> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> MfMorphism {
        MfMorphism { phi0: self.phi0.neg(), phi1: self.phi1.neg(), ..self.clone() }
    }

    /// `phi[1] = (phi1, phi0)`.
    pub fn shift(&self) -> MfMorphism {
        MfMorphism {
            source: self.source.shift(),
            target: self.target.shift(),
            phi0: self.phi1.clone(),
            phi1: self.phi0.clone(),
        }
    }

    /// Nonzero entries of `phi1 p0 - q0 phi0` and `q1 phi1 - phi0 p1`.
    pub fn chain_residuals(&self) -> Vec<Residual> {
        let (p, q) = (&self.source, &self.target);
        let mut out = Vec::new();
        let pairs = [
            ("phi1*p0 - q0*phi0", self.phi1.checked_mul(&p.p0), q.p0.checked_mul(&self.phi0)),
            ("q1*phi1 - phi0*p1", q.p1.checked_mul(&self.phi1), self.phi0.checked_mul(&p.p1)),
        ];
        for (name, a, b) in pairs {
            let diff = a.and_then(|a| a.checked_sub(&b?)).expect("validated shapes");
            for (row, col, value) in diff.nonzero_entries() {
                out.push(Residual { product: name.into(), row, col, value: value.to_string() });
            }
        }
        out
    }

    /// Internal degree when both ends are graded and every entry is
    /// homogeneous of a common degree; `None` for the zero map.
    pub fn degree(&self) -> Option<i64> {
        let ws = self.source.weights.as_ref()?;
        self.target.weights.as_ref()?;
        let (pn0, pn1, qn0, qn1) = (self.source.n0(), self.source.n1(), self.target.n0(), self.target.n1());
        let mut found: Option<i64> = None;
        for (m, pn, qn) in [(&self.phi0, &pn0, &qn0), (&self.phi1, &pn1, &qn1)] {
            for (k, j, p) in m.entries() {
                for mono in p.monomials() {
                    let d = ws.degree_of(mono) - qn[k] + pn[j];
                    match found {
                        None => found = Some(d),
                        Some(e) if e != d => return None,
                        _ => {}
                    }
                }
            }
        }
        found
    }

    /// Splits the morphism into homogeneous components by internal degree.
    pub fn homogeneous_parts(&self) -> Result<Vec<(i64, MfMorphism)>> {
        let ws = self.source.weights.as_ref().ok_or(Error::MissingGrading)?;
        self.target.weights.as_ref().ok_or(Error::MissingGrading)?;
        let (pn0, pn1, qn0, qn1) = (self.source.n0(), self.source.n1(), self.target.n0(), self.target.n1());
        let mut parts: std::collections::BTreeMap<i64, MfMorphism> = Default::default();
        let zero = MfMorphism::zero(&self.source, &self.target)?;
        for (which, m, pn, qn) in [(0, &self.phi0, &pn0, &qn0), (1, &self.phi1, &pn1, &qn1)] {
            for (k, j, p) in m.entries() {
                for (mono, c) in p.terms() {
                    let d = ws.degree_of(mono) - qn[k] + pn[j];
                    let part = parts.entry(d).or_insert_with(|| zero.clone());
                    let target = if which == 0 { &mut part.phi0 } else { &mut part.phi1 };
                    let mut e = target.get(k, j).clone();
                    e.add_term(mono.clone(), c.clone());
                    target.set(k, j, e);
                }
            }
        }
        Ok(parts.into_iter().collect())
    }
}

impl Homotopy {
    pub fn zero(p: &MatrixFactorization, q: &MatrixFactorization) -> Homotopy {
        let z = PolyMatrix::zero(q.rank(), p.rank(), p.nvars(), p.field());
        Homotopy { t0: z.clone(), t1: z }
    }

    /// The null-homotopic map `(t1 p0 + q1 t0, q0 t1 + t0 p1)`.
    pub fn boundary(&self, p: &MatrixFactorization, q: &MatrixFactorization) -> Result<MfMorphism> {
        let phi0 = self.t1.checked_mul(&p.p0)?.checked_add(&q.p1.checked_mul(&self.t0)?)?;
        let phi1 = q.p0.checked_mul(&self.t1)?.checked_add(&self.t0.checked_mul(&p.p1)?)?;
        MfMorphism::new(p.clone(), q.clone(), phi0, phi1)
    }

    /// True iff this odd map witnesses `phi` as null-homotopic.
    pub fn witnesses(&self, phi: &MfMorphism) -> bool {
        match self.boundary(&phi.source, &phi.target) {
            Ok(b) => b.phi0 == phi.phi0 && b.phi1 == phi.phi1,
            Err(_) => false,
        }
    }
}
