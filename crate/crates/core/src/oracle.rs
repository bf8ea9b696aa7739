//! Slow, independent reference computations used to check the solvers.
//!
//! Nothing here shares code with the sparse linear algebra or the Hom
//! complex: the Hom table is computed on the module side, as stable Hom over
//! the Artinian ring `k[x]/(x^n)` with dense big-rational elimination, and
//! structures are counted by trying every character assignment.

use num::{BigRational, One, Zero};

use crate::action::{Character, GroupAction};
use crate::factorization::MatrixFactorization;
use crate::poly::Monomial;

type Q = BigRational;
type Dense = Vec<Vec<Q>>;

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut Dense) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn dense_rank(rows: &[Vec<Q>]) -> usize {
    rref(&mut rows.to_vec()).len()
}

/// A basis of `{v : m v = 0}`.
fn nullspace(m: &Dense, cols: usize) -> Vec<Vec<Q>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Multiplication by `x` on `k[x]/(x^m)` in the basis `1, x, .., x^{m-1}`.
fn shift_operator(m: usize) -> Dense {
    let mut x = vec![vec![Q::zero(); m]; m];
    for i in 1..m {
        x[i][i - 1] = Q::one();
    }
    x
}

/// `k[x]`-linear maps `k^{cols} -> k^{rows}` between modules with the given
/// `x` operators, as flattened row-major matrices.
fn module_homs(xs: &Dense, xt: &Dense) -> Vec<Vec<Q>> {
    let (s, t) = (xs.len(), xt.len());
    // unknown F[i][j] at index i*s + j; equation (xt F - F xs)[i][j] = 0
    let mut eqs = Vec::new();
    for i in 0..t {
        for j in 0..s {
            let mut row = vec![Q::zero(); t * s];
            for k in 0..t {
                row[k * s + j] += &xt[i][k];
            }
            for k in 0..s {
                row[i * s + k] -= &xs[k][j];
            }
            eqs.push(row);
        }
    }
    nullspace(&eqs, t * s)
}

fn compose(g: &[Q], f: &[Q], t: usize, mid: usize, s: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); t * s];
    for i in 0..t {
        for j in 0..s {
            let mut acc = Q::zero();
            for k in 0..mid {
                acc += &g[i * mid + k] * &f[k * s + j];
            }
            out[i * s + j] = acc;
        }
    }
    out
}

/// `dim` of the stable Hom `k[x]/(x^a) -> k[x]/(x^b)` over `R = k[x]/(x^n)`:
/// module maps modulo those factoring through the free module `R`.
pub fn stable_hom_cyclic(n: usize, a: usize, b: usize) -> usize {
    let (xa, xb, xr) = (shift_operator(a), shift_operator(b), shift_operator(n));
    let all = module_homs(&xa, &xb);
    let into_r = module_homs(&xa, &xr);
    let out_of_r = module_homs(&xr, &xb);
    let mut through = Vec::new();
    for g in &out_of_r {
        for f in &into_r {
            through.push(compose(g, f, b, n, a));
        }
    }
    all.len() - dense_rank(&through)
}

/// `dim Hom((x^a | x^{n-a}), (x^b | x^{n-b}))` for `a, b = 1..n-1`, with
/// `shift` applied to the target. The cokernel of `(x^a | x^{n-a})` is
/// `k[x]/(x^{n-a})`; that of its shift is `k[x]/(x^a)`.
pub fn an_hom_table(n: usize, shift: bool) -> Vec<Vec<usize>> {
    (1..n)
        .map(|a| (1..n).map(|b| stable_hom_cyclic(n, n - a, if shift { b } else { n - b })).collect())
        .collect()
}

/// Number of character assignments making `p` equivariant, by trying all
/// `|G|^{2r}` of them.
pub fn count_structures_exhaustive(p: &MatrixFactorization, action: &GroupAction) -> usize {
    assignments(p, action).len()
}

/// All equivariant character assignments `(chars0, chars1)`, in
/// lexicographic order of the concatenated residues.
pub fn assignments(p: &MatrixFactorization, action: &GroupAction) -> Vec<(Vec<Character>, Vec<Character>)> {
    let r = p.rank();
    let orders = action.orders();
    let chars: Vec<Vec<u64>> = {
        let mut all = vec![vec![]];
        for &m in orders {
            all = all.into_iter().flat_map(|c: Vec<u64>| (0..m).map(move |v| [c.clone(), vec![v]].concat())).collect();
        }
        all
    };
    let char_of = |m: &Monomial| -> Vec<u64> {
        orders
            .iter()
            .zip(action.exponents())
            .map(|(&ord, a)| a.iter().zip(m.exponents()).map(|(ai, e)| ai * *e as u64).sum::<u64>() % ord)
            .collect()
    };
    let consistent = |c0: &[usize], c1: &[usize]| -> bool {
        let ok = |mat: &crate::matrix::PolyMatrix, tgt: &[usize], src: &[usize]| {
            mat.entries().all(|(i, j, f)| {
                f.monomials().all(|m| {
                    let mc = char_of(m);
                    (0..orders.len())
                        .all(|k| (chars[src[j]][k] + mc[k]) % orders[k] == chars[tgt[i]][k] % orders[k])
                })
            })
        };
        ok(p.p0(), c1, c0) && ok(p.p1(), c0, c1)
    };
    let g = chars.len();
    let mut out = Vec::new();
    let total = g.pow(2 * r as u32);
    for code in 0..total {
        let mut digits = Vec::with_capacity(2 * r);
        let mut c = code;
        for _ in 0..2 * r {
            digits.push(c % g);
            c /= g;
        }
        digits.reverse();
        let (c0, c1) = digits.split_at(r);
        if consistent(c0, c1) {
            out.push((
                c0.iter().map(|&i| Character(chars[i].clone())).collect(),
                c1.iter().map(|&i| Character(chars[i].clone())).collect(),
            ));
        }
    }
    out
}

/// Per-degree ranks of the two-periodic sequence, computed with dense
/// matrices on monomial bases. Generators are given by the degrees `g0`,
/// `g1` at which they sit (entry `(i, j)` has degree `source_j - target_i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseRanks {
    pub rank_p1: usize,
    pub rank_p0_mod_w: usize,
    pub rank_p1_mod_w: usize,
}

pub fn periodicity_ranks(p: &MatrixFactorization, weights: &[u32], e: i64) -> DenseRanks {
    let dw = p.w().homogeneous_degree(weights).expect("homogeneous W");
    let g0: Vec<i64> = p.n0().iter().map(|x| -x).collect();
    let g1: Vec<i64> = p.n1().iter().map(|x| -x).collect();
    let up: Vec<i64> = g1.iter().map(|x| x + dw).collect();
    let basis = |gens: &[i64], deg: i64| -> Vec<(usize, Monomial)> {
        let mut out = Vec::new();
        for (g, d) in gens.iter().enumerate() {
            for m in all_monomials(weights, deg - d) {
                out.push((g, m));
            }
        }
        out
    };
    let image = |mat: &crate::matrix::PolyMatrix, src: &[(usize, Monomial)], tgt: &[(usize, Monomial)]| -> Dense {
        src.iter()
            .map(|(g, m)| {
                let mut v = vec![Q::zero(); tgt.len()];
                for i in 0..mat.rows() {
                    for (tm, c) in mat.get(i, *g).terms() {
                        let key = (i, tm.mul(m));
                        let k = tgt.iter().position(|t| *t == key).expect("homogeneous");
                        v[k] += c.as_rational().expect("rational field");
                    }
                }
                v
            })
            .collect()
    };
    let w_rows = |gens: &[i64], tgt: &[(usize, Monomial)]| -> Dense {
        let wmat = crate::matrix::PolyMatrix::scalar(gens.len(), p.w());
        image(&wmat, &basis(gens, e - dw), tgt)
    };
    let b0 = basis(&g0, e);
    let b1 = basis(&g1, e);
    let b1_up = basis(&up, e);
    let rank_p1 = dense_rank(&image(p.p1(), &b1_up, &b0));
    let mod_w = |imgs: Dense, ws: Dense| dense_rank(&[imgs, ws.clone()].concat()) - dense_rank(&ws);
    DenseRanks {
        rank_p1,
        rank_p0_mod_w: mod_w(image(p.p0(), &b0, &b1), w_rows(&g1, &b1)),
        rank_p1_mod_w: mod_w(image(p.p1(), &b1_up, &b0), w_rows(&g0, &b0)),
    }
}

/// Monomials of a weighted degree, by brute force over bounded exponents.
fn all_monomials(weights: &[u32], deg: i64) -> Vec<Monomial> {
    if deg < 0 {
        return Vec::new();
    }
    let mut out = vec![Vec::new()];
    for _ in weights {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| (0..=deg as u32).map(move |e| [v.clone(), vec![e]].concat()))
            .collect();
    }
    out.into_iter()
        .filter(|e| e.iter().zip(weights).map(|(a, w)| (*a * *w) as i64).sum::<i64>() == deg)
        .map(Monomial::new)
        .collect()
}
