//! Exact sparse linear algebra over a [`Field`].
//!
//! Vectors are sorted `(index, coefficient)` lists without zeros. The main
//! tool is [`Echelon`], an incrementally built row-echelon basis. Kernels and
//! solutions are read off by augmenting every column image with a tag
//! coordinate that records which unknown it came from.

use std::collections::BTreeMap;

use crate::scalar::{Field, Scalar};

pub type SparseVec = Vec<(usize, Scalar)>;

/// Tag coordinates start here; real coordinates must stay below.
const TAG: usize = 1 << 48;

pub fn scale(v: &SparseVec, c: &Scalar) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, a)| (*i, a.mul(c))).collect()
}

/// `a + c * b`.
pub fn axpy(a: &SparseVec, c: &Scalar, b: &SparseVec) -> SparseVec {
    let mut acc: BTreeMap<usize, Scalar> = a.iter().cloned().collect();
    for (i, x) in b {
        add_into(&mut acc, *i, x.mul(c));
    }
    acc.into_iter().collect()
}

fn add_into(acc: &mut BTreeMap<usize, Scalar>, i: usize, x: Scalar) {
    if x.is_zero() {
        return;
    }
    match acc.get_mut(&i) {
        Some(y) => {
            let s = y.add(&x);
            if s.is_zero() {
                acc.remove(&i);
            } else {
                *y = s;
            }
        }
        None => {
            acc.insert(i, x);
        }
    }
}

/// Collects possibly repeated `(index, coefficient)` pairs into a sparse vector.
pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Scalar)>) -> SparseVec {
    let mut acc = BTreeMap::new();
    for (i, x) in pairs {
        add_into(&mut acc, i, x);
    }
    acc.into_iter().collect()
}

/// Row-echelon basis of a subspace. Each stored row has leading coefficient
/// one at its pivot; entries past the pivot are not back-reduced until
/// [`Echelon::into_rref`].
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    rows: Vec<SparseVec>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new(field: Field) -> Echelon {
        Echelon { field, rows: Vec::new(), pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    fn reduce_map(&self, v: &SparseVec) -> BTreeMap<usize, Scalar> {
        let mut acc: BTreeMap<usize, Scalar> = v.iter().cloned().collect();
        let mut cursor = 0usize;
        loop {
            let hit = acc
                .range(cursor..)
                .find(|(k, _)| self.pivots.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = hit else { break };
            let row = &self.rows[self.pivots[&k]];
            for (j, a) in row {
                add_into(&mut acc, *j, a.mul(&c).neg());
            }
            cursor = k + 1;
        }
        acc
    }

    /// Remainder of `v` after eliminating every pivot coordinate.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_map(v).into_iter().collect()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce_map(v).is_empty()
    }

    /// Adds `v` to the basis; returns false when it was already in the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce_map(v);
        let Some((&p, lead)) = r.iter().next() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero leading coefficient");
        let row: SparseVec = r.into_iter().map(|(i, a)| (i, a.mul(&inv))).collect();
        self.pivots.insert(p, self.rows.len());
        self.rows.push(row);
        true
    }

    /// Fully reduced basis, ordered by ascending pivot.
    pub fn into_rref(self) -> Vec<SparseVec> {
        let mut order: Vec<(usize, usize)> = self.pivots.iter().map(|(p, r)| (*p, *r)).collect();
        order.sort();
        let mut rows: Vec<SparseVec> = order.iter().map(|(_, r)| self.rows[*r].clone()).collect();
        let pivots: Vec<usize> = order.iter().map(|(p, _)| *p).collect();
        for j in (0..rows.len()).rev() {
            let pj = pivots[j];
            let rj = rows[j].clone();
            for row in rows.iter_mut().take(j) {
                if let Some((_, c)) = row.iter().find(|(i, _)| *i == pj) {
                    let c = c.neg();
                    *row = axpy(row, &c, &rj);
                }
            }
        }
        rows
    }
}

/// A linear map given by the images of the unknown basis vectors, factored
/// once so that kernels and solutions for several right-hand sides are cheap.
#[derive(Clone, Debug)]
pub struct LinearMap {
    field: Field,
    unknowns: usize,
    echelon: Echelon,
}

impl LinearMap {
    /// `images[j]` is the image of the `j`-th unknown. Image coordinates must
    /// be below `2^48`.
    pub fn new(field: Field, images: &[SparseVec]) -> LinearMap {
        let mut echelon = Echelon::new(field);
        for (j, img) in images.iter().enumerate() {
            debug_assert!(img.iter().all(|(i, _)| *i < TAG));
            let mut v = img.clone();
            v.push((TAG + j, field.one()));
            echelon.insert(&v);
        }
        LinearMap { field, unknowns: images.len(), echelon }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn rank(&self) -> usize {
        self.echelon.rows.iter().filter(|r| r[0].0 < TAG).count()
    }

    /// A basis of the kernel in reduced row-echelon form over the unknowns.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let mut ker = Echelon::new(self.field);
        for row in &self.echelon.rows {
            if row[0].0 >= TAG {
                let v: SparseVec = row.iter().map(|(i, a)| (i - TAG, a.clone())).collect();
                ker.insert(&v);
            }
        }
        ker.into_rref()
    }

    /// Some `x` with `A x = rhs`, or `None` when `rhs` is not in the image.
    pub fn solve(&self, rhs: &SparseVec) -> Option<SparseVec> {
        let r = self.echelon.reduce(rhs);
        if r.iter().any(|(i, _)| *i < TAG) {
            return None;
        }
        Some(r.into_iter().map(|(i, a)| (i - TAG, a.neg())).collect())
    }
}

/// Applies the map with the given column images to `x`.
pub fn apply(images: &[SparseVec], x: &SparseVec) -> SparseVec {
    from_pairs(x.iter().flat_map(|(j, c)| images[*j].iter().map(move |(i, a)| (*i, a.mul(c)))))
}

pub fn rank(field: Field, vectors: &[SparseVec]) -> usize {
    let mut e = Echelon::new(field);
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Field::Rational.from_i64(n)
    }

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        from_pairs(entries.iter().map(|(i, a)| (*i, q(*a))))
    }

    #[test]
    fn kernel_of_rank_deficient_map() {
        // columns (1,2), (2,4), (0,1)
        let images = vec![v(&[(0, 1), (1, 2)]), v(&[(0, 2), (1, 4)]), v(&[(1, 1)])];
        let map = LinearMap::new(Field::Rational, &images);
        assert_eq!(map.rank(), 2);
        let ker = map.kernel();
        assert_eq!(ker.len(), 1);
        assert!(apply(&images, &ker[0]).is_empty());
        let half = Field::Rational.parse_scalar("-1/2").unwrap();
        assert_eq!(ker[0], vec![(0, q(1)), (1, half)]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let images = vec![v(&[(0, 1), (1, 1)]), v(&[(0, 1), (1, -1)])];
        let map = LinearMap::new(Field::Rational, &images);
        let rhs = v(&[(0, 3), (1, 1)]);
        let x = map.solve(&rhs).unwrap();
        assert_eq!(apply(&images, &x), rhs);
        let degenerate = LinearMap::new(Field::Rational, &[v(&[(0, 1)])]);
        assert!(degenerate.solve(&v(&[(1, 1)])).is_none());
    }

    #[test]
    fn rref_is_canonical() {
        let mut a = Echelon::new(Field::Rational);
        a.insert(&v(&[(0, 1), (1, 1)]));
        a.insert(&v(&[(1, 1), (2, 1)]));
        let mut b = Echelon::new(Field::Rational);
        b.insert(&v(&[(1, 2), (2, 2)]));
        b.insert(&v(&[(0, 1), (2, -1)]));
        assert_eq!(a.into_rref(), b.into_rref());
    }

    #[test]
    fn modular_rank() {
        let f = Field::Prime(2);
        let one = f.one();
        let vs = vec![
            vec![(0, one.clone()), (1, one.clone())],
            vec![(1, one.clone()), (2, one.clone())],
            vec![(0, one.clone()), (2, one.clone())],
        ];
        assert_eq!(rank(f, &vs), 2);
        assert_eq!(rank(Field::Rational, &[v(&[(0, 1), (1, 1)]), v(&[(1, 1), (2, 1)]), v(&[(0, 1), (2, 1)])]), 3);
    }
}
