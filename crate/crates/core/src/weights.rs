//! Quasi-homogeneous weight systems and Milnor algebra bounds.

use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Echelon, LinearMap, SparseVec};
use crate::poly::{monomials_of_weighted_degree, Monomial, Polynomial};
use crate::scalar::{Field, Scalar};

/// Positive integer weights `w` and total degree `D` with
/// `W(t^w x) = t^D W(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightSystem {
    pub weights: Vec<u32>,
    pub degree: u32,
}

impl WeightSystem {
    pub fn new(weights: Vec<u32>, degree: u32) -> Result<WeightSystem> {
        if weights.iter().any(|&w| w == 0) || degree == 0 {
            return Err(Error::Usage("weights and degree must be positive".into()));
        }
        Ok(WeightSystem { weights, degree })
    }

    pub fn uniform(nvars: usize, degree: u32) -> WeightSystem {
        WeightSystem { weights: vec![1; nvars], degree }
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    pub fn degree_of(&self, m: &Monomial) -> i64 {
        m.weighted_degree(&self.weights)
    }

    /// True when every monomial of `w` has weighted degree `D`.
    pub fn is_quasi_homogeneous(&self, w: &Polynomial) -> bool {
        w.nvars() == self.nvars()
            && !w.is_zero()
            && w.monomials().all(|m| self.degree_of(m) == self.degree as i64)
    }

    pub fn max_weight(&self) -> u32 {
        self.weights.iter().copied().max().unwrap_or(1)
    }
}

/// Finds positive integer weights making `w` quasi-homogeneous, normalized
/// so that `gcd(w_1, ..., w_n, D) = 1`. Uniform weights are preferred when
/// they work; otherwise the solution with the smallest `D` is returned.
pub fn detect_weights(w: &Polynomial) -> Result<Option<WeightSystem>> {
    if w.is_zero() {
        return Err(Error::ZeroSuperpotential);
    }
    let n = w.nvars();
    let monos: Vec<&Monomial> = w.monomials().collect();
    let first = monos[0];
    if first.is_one() {
        return Ok(None);
    }
    let td = first.total_degree();
    if monos.iter().all(|m| m.total_degree() == td) {
        return Ok(Some(WeightSystem::uniform(n, td)));
    }
    // Null space of the difference vectors e_k - e_1.
    let field = Field::Rational;
    let images: Vec<SparseVec> = (0..n)
        .map(|i| {
            monos[1..]
                .iter()
                .enumerate()
                .filter_map(|(k, m)| {
                    let d = m.exponents()[i] as i64 - first.exponents()[i] as i64;
                    (d != 0).then(|| (k, field.from_i64(d)))
                })
                .collect()
        })
        .collect();
    let basis = LinearMap::new(field, &images).kernel();
    if basis.is_empty() {
        return Ok(None);
    }
    let k = basis.len();
    // Enumerate the free parameters (values at the basis pivots) in 1..=bound.
    let bound: u64 = match k {
        1 => 1,
        2 => 24,
        3 => 12,
        4 => 6,
        _ => 3,
    };
    let mut best: Option<WeightSystem> = None;
    let mut params = vec![1u64; k];
    loop {
        let mut wvec = vec![BigRational::zero(); n];
        for (c, v) in params.iter().zip(&basis) {
            let c = BigRational::from_integer((*c).into());
            for (i, a) in v {
                wvec[*i] += &c * a.as_rational().expect("rational");
            }
        }
        if let Some(cand) = normalize(&wvec, first) {
            let better = match &best {
                None => true,
                Some(b) => (cand.degree, &cand.weights) < (b.degree, &b.weights),
            };
            if better {
                best = Some(cand);
            }
        }
        // odometer
        let mut j = 0;
        loop {
            if j == k {
                return Ok(best);
            }
            params[j] += 1;
            if params[j] <= bound {
                break;
            }
            params[j] = 1;
            j += 1;
        }
    }
}

fn normalize(wvec: &[BigRational], first: &Monomial) -> Option<WeightSystem> {
    if wvec.iter().any(|q| !q.is_positive()) {
        return None;
    }
    let lcm = wvec.iter().fold(num::BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<num::BigInt> = wvec.iter().map(|q| (q * &lcm).to_integer()).collect();
    let d: num::BigInt = ints
        .iter()
        .zip(first.exponents())
        .map(|(w, &e)| w * num::BigInt::from(e))
        .sum();
    let g = ints.iter().fold(d.clone(), |acc, w| acc.gcd(w));
    let weights: Option<Vec<u32>> = ints.iter().map(|w| (w / &g).to_u32()).collect();
    Some(WeightSystem { weights: weights?, degree: (d / g).to_u32()? })
}

fn check_quasi_homogeneous(w: &Polynomial, ws: &WeightSystem) -> Result<()> {
    if w.is_zero() {
        return Err(Error::ZeroSuperpotential);
    }
    if !ws.is_quasi_homogeneous(w) {
        return Err(Error::Grading(format!(
            "{w} is not quasi-homogeneous of degree {} for weights {:?}",
            ws.degree, ws.weights
        )));
    }
    Ok(())
}

/// Top degree of the Milnor algebra `A/(dW)` of a quasi-homogeneous `W`
/// with an isolated critical point: the sum of `D - 2 w_i`.
pub fn milnor_socle_bound(w: &Polynomial, ws: &WeightSystem) -> Result<i64> {
    check_quasi_homogeneous(w, ws)?;
    Ok(ws.weights.iter().map(|&wi| ws.degree as i64 - 2 * wi as i64).sum())
}

/// Dimensions of the graded pieces of `A/(dW)` in degrees `0..=up_to`.
pub fn milnor_dimensions(w: &Polynomial, ws: &WeightSystem, up_to: i64) -> Result<Vec<usize>> {
    check_quasi_homogeneous(w, ws)?;
    let field = w.field();
    let partials: Vec<Polynomial> = (0..w.nvars()).map(|i| w.derivative(i)).collect();
    let mut dims = Vec::new();
    for k in 0..=up_to {
        let basis = monomials_of_weighted_degree(&ws.weights, k);
        let index = |m: &Monomial| basis.binary_search(m).expect("homogeneous product");
        let mut ideal = Echelon::new(field);
        for (i, partial) in partials.iter().enumerate() {
            let shift = k - (ws.degree as i64 - ws.weights[i] as i64);
            if partial.is_zero() {
                continue;
            }
            for m in monomials_of_weighted_degree(&ws.weights, shift) {
                let prod = partial.mul_term(&m, &field.one());
                let v: SparseVec = {
                    let mut v: Vec<(usize, Scalar)> =
                        prod.terms().map(|(mm, c)| (index(mm), c.clone())).collect();
                    v.sort_by_key(|(i, _)| *i);
                    v
                };
                ideal.insert(&v);
            }
        }
        dims.push(basis.len() - ideal.rank());
    }
    Ok(dims)
}

/// Whether `W` has an isolated critical point (finite-dimensional Milnor
/// algebra). Decided by checking that the graded pieces vanish on a run of
/// `max_weight` consecutive degrees above the socle bound, which forces all
/// higher pieces to vanish.
pub fn has_isolated_singularity(w: &Polynomial, ws: &WeightSystem) -> Result<bool> {
    let s = milnor_socle_bound(w, ws)?;
    let top = s + ws.max_weight() as i64;
    let dims = milnor_dimensions(w, ws, top.max(0))?;
    Ok(((s + 1).max(0)..=top).all(|k| dims[k as usize] == 0))
}

/// Top nonzero degree of the Milnor algebra when `W` has an isolated
/// critical point, computed in the coefficient field of `W`; `None` when the
/// critical point is not isolated.
pub fn milnor_top_degree(w: &Polynomial, ws: &WeightSystem) -> Result<Option<i64>> {
    let s = milnor_socle_bound(w, ws)?;
    let top = s + ws.max_weight() as i64;
    let dims = milnor_dimensions(w, ws, top.max(0))?;
    if ((s + 1).max(0)..=top).any(|k| dims[k as usize] != 0) {
        return Ok(None);
    }
    Ok(dims.iter().rposition(|&d| d != 0).map(|k| k as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, n, Field::Rational).unwrap()
    }

    #[test]
    fn detects_uniform_weights() {
        let ws = detect_weights(&p("x1^3 + x2^3", 2)).unwrap().unwrap();
        assert_eq!(ws, WeightSystem { weights: vec![1, 1], degree: 3 });
    }

    #[test]
    fn detects_weighted_cusp() {
        let ws = detect_weights(&p("x1^2 + x2^3", 2)).unwrap().unwrap();
        assert_eq!(ws, WeightSystem { weights: vec![3, 2], degree: 6 });
        let ws = detect_weights(&p("x1^2*x2 + x2^4", 2)).unwrap().unwrap();
        assert_eq!(ws, WeightSystem { weights: vec![3, 2], degree: 8 });
    }

    #[test]
    fn rejects_mixed_degrees_and_zero() {
        assert_eq!(detect_weights(&p("x1 + x1^2", 1)).unwrap(), None);
        assert!(matches!(
            detect_weights(&Polynomial::zero(1, Field::Rational)),
            Err(Error::ZeroSuperpotential)
        ));
    }

    #[test]
    fn scaling_identity_holds_for_detected_weights() {
        for (s, n) in [("x1^2 + x2^3", 2), ("x1^3*x2 + x2^5 + x3^2", 3), ("x1^4", 1)] {
            let w = p(s, n);
            let ws = detect_weights(&w).unwrap().unwrap();
            let scaled = w.substitute_scaling(&ws.weights).unwrap();
            let mut e = vec![0; n + 1];
            e[n] = ws.degree;
            let t = Polynomial::term(Monomial::new(e), Field::Rational.one());
            assert_eq!(scaled, &w.extend_vars(1) * &t, "{s}");
        }
    }

    #[test]
    fn socle_bounds() {
        let ws = WeightSystem::uniform(1, 5);
        assert_eq!(milnor_socle_bound(&p("x1^5", 1), &ws).unwrap(), 3);
        let ws = WeightSystem::uniform(2, 2);
        assert_eq!(milnor_socle_bound(&p("x1^2 + x2^2", 2), &ws).unwrap(), 0);
        let ws = WeightSystem::uniform(3, 3);
        assert_eq!(milnor_socle_bound(&p("x1^3 + x2^3 + x3^3", 3), &ws).unwrap(), 3);
        assert!(milnor_socle_bound(&p("x1^3 + x2^2", 2), &ws_pair()).is_err());
    }

    fn ws_pair() -> WeightSystem {
        WeightSystem::uniform(2, 3)
    }

    #[test]
    fn isolatedness() {
        let ws = WeightSystem::uniform(3, 3);
        assert!(has_isolated_singularity(&p("x1^3 + x2^3 + x3^3", 3), &ws).unwrap());
        // x1^2*x2 is singular along the x2-axis
        let ws = WeightSystem::uniform(2, 3);
        assert!(!has_isolated_singularity(&p("x1^2*x2", 2), &ws).unwrap());
        let ws = WeightSystem::uniform(2, 2);
        assert!(has_isolated_singularity(&p("x1*x2", 2), &ws).unwrap());
        assert_eq!(milnor_top_degree(&p("x1^6", 1), &WeightSystem::uniform(1, 6)).unwrap(), Some(4));
        assert_eq!(milnor_top_degree(&p("x1^2*x2", 2), &WeightSystem::uniform(2, 3)).unwrap(), None);
    }
}
