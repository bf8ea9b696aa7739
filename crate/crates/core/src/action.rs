//! Diagonal actions of finite abelian groups `Z_{m_1} x ... x Z_{m_r}` on
//! `k[x_1, ..., x_n]`.
//!
//! The generator of the `j`-th cyclic factor sends `x_i` to
//! `eps_j^{a_{ji}} x_i` with `eps_j` a primitive `m_j`-th root of unity. Roots
//! of unity are never evaluated: characters are residue tuples and scalar
//! factors are tracked as exact phases in `Q/Z`.

use std::collections::BTreeMap;
use std::fmt;

use num::integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};

/// A character of the group, one residue per cyclic factor. The same tuples
/// also index group elements, since the character group of a finite abelian
/// group is isomorphic to the group itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Character(pub Vec<u64>);

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub type GroupElement = Character;

/// A root of unity `exp(2 pi i num/den)`, kept reduced with `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase {
    num: u64,
    den: u64,
}

impl Phase {
    pub const ONE: Phase = Phase { num: 0, den: 1 };

    pub fn new(num: i128, den: u64) -> Phase {
        let d = den as i128;
        let n = num.rem_euclid(d) as u64;
        let g = n.gcd(&den).max(1);
        if n == 0 {
            return Phase::ONE;
        }
        Phase { num: n / g, den: den / g }
    }

    pub fn add(self, other: Phase) -> Phase {
        let den = self.den.lcm(&other.den);
        Phase::new(
            (self.num * (den / self.den)) as i128 + (other.num * (den / other.den)) as i128,
            den,
        )
    }

    pub fn is_trivial(self) -> bool {
        self.num == 0
    }

    /// `+1` or `-1` when the phase is real.
    pub fn as_sign(self) -> Option<i64> {
        match (self.num, self.den) {
            (0, _) => Some(1),
            (1, 2) => Some(-1),
            _ => None,
        }
    }

    pub fn fraction(self) -> (u64, u64) {
        (self.num, self.den)
    }
}

/// A polynomial whose coefficients lie in a cyclotomic extension, stored as
/// rational components indexed by the root of unity multiplying them.
///
/// Values produced by [`GroupAction::act`] attach exactly one phase to each
/// monomial, which makes this representation canonical for them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedPolynomial {
    components: BTreeMap<Phase, Polynomial>,
}

impl TwistedPolynomial {
    pub fn untwisted(p: Polynomial) -> TwistedPolynomial {
        let mut components = BTreeMap::new();
        if !p.is_zero() {
            components.insert(Phase::ONE, p);
        }
        TwistedPolynomial { components }
    }

    pub fn components(&self) -> &BTreeMap<Phase, Polynomial> {
        &self.components
    }

    /// The underlying polynomial when every phase is trivial.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        match self.components.len() {
            0 => None,
            1 => self.components.get(&Phase::ONE).cloned(),
            _ => None,
        }
    }

    /// Evaluates the phases when they are all `+-1`.
    pub fn to_real(&self, nvars: usize, field: crate::scalar::Field) -> Option<Polynomial> {
        let mut acc = Polynomial::zero(nvars, field);
        for (ph, p) in &self.components {
            let s = ph.as_sign()?;
            acc = &acc + &p.scale(&field.from_i64(s));
        }
        Some(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAction {
    orders: Vec<u64>,
    /// `exponents[j][i]`: the generator of factor `j` scales `x_i` by `eps_j^{a}`.
    exponents: Vec<Vec<u64>>,
}

impl GroupAction {
    pub fn new(orders: Vec<u64>, exponents: Vec<Vec<u64>>, nvars: usize) -> Result<GroupAction> {
        if orders.len() != exponents.len() {
            return Err(Error::Usage(format!(
                "{} cyclic orders but {} exponent rows",
                orders.len(),
                exponents.len()
            )));
        }
        if orders.iter().any(|&m| m == 0) {
            return Err(Error::Usage("cyclic orders must be positive".into()));
        }
        let mut reduced = Vec::with_capacity(exponents.len());
        for (row, &m) in exponents.iter().zip(&orders) {
            if row.len() != nvars {
                return Err(Error::Usage(format!(
                    "exponent row has {} entries for {} variables",
                    row.len(),
                    nvars
                )));
            }
            reduced.push(row.iter().map(|a| a % m).collect::<Vec<_>>());
        }
        let action = GroupAction { orders, exponents: reduced };
        // the generator's m-th power must act trivially
        for (j, &m) in action.orders.iter().enumerate() {
            debug_assert!(action.exponents[j].iter().all(|a| (a * m) % m == 0));
        }
        Ok(action)
    }

    /// The trivial group acting on `nvars` variables.
    pub fn trivial(nvars: usize) -> GroupAction {
        GroupAction { orders: Vec::new(), exponents: Vec::new() }.with_nvars(nvars)
    }

    fn with_nvars(self, _nvars: usize) -> GroupAction {
        self
    }

    /// `Z_m` acting by `x_i -> eps^{a_i} x_i`.
    pub fn cyclic(order: u64, exponents: Vec<u64>) -> Result<GroupAction> {
        let n = exponents.len();
        GroupAction::new(vec![order], vec![exponents], n)
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn exponents(&self) -> &[Vec<u64>] {
        &self.exponents
    }

    pub fn group_order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn is_trivial_group(&self) -> bool {
        self.group_order() == 1
    }

    /// Determinant-one condition: `sum_i a_{ji} = 0 mod m_j` for every factor.
    pub fn is_special_linear(&self) -> bool {
        self.exponents
            .iter()
            .zip(&self.orders)
            .all(|(row, &m)| row.iter().sum::<u64>() % m == 0)
    }

    pub fn zero_character(&self) -> Character {
        Character(vec![0; self.orders.len()])
    }

    pub fn add(&self, a: &Character, b: &Character) -> Character {
        Character(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.orders)
                .map(|((x, y), m)| (x + y) % m)
                .collect(),
        )
    }

    pub fn neg(&self, a: &Character) -> Character {
        Character(a.0.iter().zip(&self.orders).map(|(x, m)| (m - x % m) % m).collect())
    }

    pub fn sub(&self, a: &Character, b: &Character) -> Character {
        self.add(a, &self.neg(b))
    }

    pub fn validate_character(&self, c: &Character) -> Result<()> {
        if c.0.len() != self.orders.len() || c.0.iter().zip(&self.orders).any(|(x, m)| x >= m) {
            return Err(Error::Usage(format!(
                "character ({c}) is not a residue tuple for orders {:?}",
                self.orders
            )));
        }
        Ok(())
    }

    /// All characters (equivalently all group elements) in lexicographic order.
    pub fn characters(&self) -> Vec<Character> {
        let mut out = vec![Vec::new()];
        for &m in &self.orders {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..m).map(move |c| {
                        let mut v = prefix.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(Character).collect()
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.characters()
    }

    /// Generators of the cyclic factors.
    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.orders.len())
            .map(|j| {
                let mut v = vec![0; self.orders.len()];
                v[j] = 1 % self.orders[j];
                Character(v)
            })
            .collect()
    }

    /// The character by which the group scales the monomial `x^e`.
    pub fn monomial_character(&self, m: &Monomial) -> Character {
        Character(
            self.exponents
                .iter()
                .zip(&self.orders)
                .map(|(row, &mj)| {
                    row.iter()
                        .zip(m.exponents())
                        .map(|(a, &e)| (a * e as u64) % mj)
                        .sum::<u64>()
                        % mj
                })
                .collect(),
        )
    }

    /// The common character of all monomials of `f`; `None` for zero or for
    /// polynomials mixing characters.
    pub fn polynomial_character(&self, f: &Polynomial) -> Option<Character> {
        let mut chars = f.monomials().map(|m| self.monomial_character(m));
        let first = chars.next()?;
        chars.all(|c| c == first).then_some(first)
    }

    /// The phase `chi(g)` of character `chi` evaluated at the element `g`.
    pub fn pairing(&self, chi: &Character, g: &GroupElement) -> Phase {
        let mut ph = Phase::ONE;
        for ((c, k), &m) in chi.0.iter().zip(&g.0).zip(&self.orders) {
            ph = ph.add(Phase::new((c * k) as i128, m));
        }
        ph
    }

    /// `(g . f)(x) = f(g^{-1} x)`.
    pub fn act(&self, g: &GroupElement, f: &Polynomial) -> TwistedPolynomial {
        self.act_twisted(g, &TwistedPolynomial::untwisted(f.clone()))
    }

    pub fn act_twisted(&self, g: &GroupElement, f: &TwistedPolynomial) -> TwistedPolynomial {
        let mut components: BTreeMap<Phase, Polynomial> = BTreeMap::new();
        for (ph, p) in &f.components {
            for (m, c) in p.terms() {
                let chi = self.monomial_character(m);
                let inverse = self.pairing(&chi, g);
                let total = ph.add(Phase::new(-((inverse.num) as i128), inverse.den));
                let target = components
                    .entry(total)
                    .or_insert_with(|| Polynomial::zero(p.nvars(), p.field()));
                target.add_term(m.clone(), c.clone());
            }
        }
        components.retain(|_, p| !p.is_zero());
        TwistedPolynomial { components }
    }

    /// True iff every generator fixes `f`.
    pub fn is_invariant(&self, f: &Polynomial) -> bool {
        let zero = self.zero_character();
        f.monomials().all(|m| self.monomial_character(m) == zero)
    }

    pub fn to_json(&self, sl_check: bool) -> ActionJson {
        ActionJson {
            cyclic_orders: self.orders.clone(),
            exponents: self.exponents.clone(),
            sl_check,
        }
    }

    pub fn from_json(json: &ActionJson, nvars: usize) -> Result<GroupAction> {
        let action = GroupAction::new(json.cyclic_orders.clone(), json.exponents.clone(), nvars)?;
        if json.sl_check && !action.is_special_linear() {
            return Err(Error::Usage("action fails the determinant-one check".into()));
        }
        Ok(action)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionJson {
    pub cyclic_orders: Vec<u64>,
    pub exponents: Vec<Vec<u64>>,
    #[serde(default)]
    pub sl_check: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn p(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, n, Field::Rational).unwrap()
    }

    fn gen(action: &GroupAction) -> GroupElement {
        action.generators()[0].clone()
    }

    #[test]
    fn sign_action() {
        let z2 = GroupAction::cyclic(2, vec![1]).unwrap();
        let g = gen(&z2);
        assert_eq!(z2.act(&g, &p("x1^2", 1)).as_polynomial(), Some(p("x1^2", 1)));
        let moved = z2.act(&g, &p("x1", 1));
        assert_eq!(moved.as_polynomial(), None);
        assert_eq!(moved.to_real(1, Field::Rational), Some(p("-x1", 1)));
        assert!(!z2.is_invariant(&p("x1", 1)));
    }

    #[test]
    fn fermat_cubic_is_invariant() {
        let z3 = GroupAction::cyclic(3, vec![1, 1, 1]).unwrap();
        let w = p("x1^3 + x2^3 + x3^3", 3);
        assert!(z3.is_invariant(&w));
        assert_eq!(z3.act(&gen(&z3), &w).as_polynomial(), Some(w));
        assert!(z3.is_special_linear());
    }

    #[test]
    fn product_of_negations_is_invariant() {
        let z2 = GroupAction::cyclic(2, vec![1, 1]).unwrap();
        assert!(z2.is_invariant(&p("x1*x2", 2)));
        assert!(z2.is_special_linear());
    }

    #[test]
    fn cocycle_condition() {
        let g = GroupAction::new(vec![4, 2], vec![vec![1, 3], vec![1, 0]], 2).unwrap();
        let f = p("x1^2*x2 + 3*x1*x2^3 - x2 + 5", 2);
        let elements = g.elements();
        let e = g.zero_character();
        assert_eq!(g.act(&e, &f).as_polynomial(), Some(f.clone()));
        for a in &elements {
            for b in &elements {
                let lhs = g.act_twisted(a, &g.act(b, &f));
                let rhs = g.act(&g.add(a, b), &f);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn phases_reduce() {
        assert_eq!(Phase::new(2, 4), Phase::new(1, 2));
        assert_eq!(Phase::new(-1, 3).add(Phase::new(1, 3)), Phase::ONE);
        assert_eq!(Phase::new(3, 6).as_sign(), Some(-1));
    }

    #[test]
    fn rejects_malformed_actions() {
        assert!(GroupAction::new(vec![3], vec![vec![1, 1]], 3).is_err());
        assert!(GroupAction::new(vec![3, 2], vec![vec![1]], 1).is_err());
        let json = ActionJson { cyclic_orders: vec![3], exponents: vec![vec![1, 1]], sl_check: true };
        assert!(GroupAction::from_json(&json, 2).is_err());
    }
}
