//! Exact linear algebra over Q, and Q-coordinates of tower elements.

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::fields::tower::Repr;
use crate::fields::{FieldElement, Poly, Rational};

/// Reduced row echelon form of a dense matrix; returns pivot columns.
pub(crate) fn rref(m: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let k = m[r][col].clone();
                for c in 0..ncols {
                    let delta = &k * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Builds the row-major matrix whose columns are `cols`.
fn from_columns(cols: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let nrows = cols.first().map_or(0, Vec::len);
    (0..nrows)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect()
}

pub(crate) fn rank(cols: &[Vec<Rational>]) -> usize {
    let mut m = from_columns(cols);
    rref(&mut m, cols.len()).len()
}

/// Solves Σ xᵢ·colsᵢ = b; `None` when b is not in the column span.
pub(crate) fn solve(cols: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = cols.len();
    let mut m = from_columns(cols);
    if m.is_empty() {
        m = b.iter().map(|_| Vec::new()).collect();
    }
    for (row, bi) in m.iter_mut().zip(b) {
        row.push(bi.clone());
    }
    let pivots = rref(&mut m, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][n].clone();
    }
    Some(x)
}

/// Basis of {x : Σ xᵢ·colsᵢ = 0}.
pub(crate) fn nullspace(cols: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = cols.len();
    let mut m = from_columns(cols);
    let pivots = rref(&mut m, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

fn collect_denominators(r: &Repr, acc: &mut Poly) {
    match r {
        Repr::Base(f) => {
            if !f.denom().is_one() {
                *acc = acc.lcm(f.denom());
            }
        }
        Repr::Alg(v) => v.iter().for_each(|c| collect_denominators(c, acc)),
    }
}

type Key = (Vec<usize>, usize);

fn flatten(r: &Repr, l: &Poly, prefix: &mut Vec<usize>, out: &mut BTreeMap<Key, Rational>) {
    match r {
        Repr::Base(f) => {
            let p = f.numer() * &l.exact_div(f.denom());
            for (i, c) in p.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    out.insert((prefix.clone(), i), c.clone());
                }
            }
        }
        Repr::Alg(v) => {
            for (j, c) in v.iter().enumerate() {
                prefix.push(j);
                flatten(c, l, prefix, out);
                prefix.pop();
            }
        }
    }
}

/// Q-coordinate vectors of the given elements (same tower) in a common finite
/// coordinate system. All elements are first multiplied by one nonzero base
/// element, which preserves every Q-linear relation among them.
pub(crate) fn coordinates(elems: &[FieldElement]) -> Vec<Vec<Rational>> {
    let mut l = Poly::one();
    for e in elems {
        collect_denominators(&e.repr, &mut l);
    }
    let maps: Vec<BTreeMap<Key, Rational>> = elems
        .iter()
        .map(|e| {
            let mut out = BTreeMap::new();
            flatten(&e.repr, &l, &mut Vec::new(), &mut out);
            out
        })
        .collect();
    let mut keys: Vec<&Key> = maps.iter().flat_map(|m| m.keys()).collect();
    keys.sort();
    keys.dedup();
    maps.iter()
        .map(|m| {
            keys.iter()
                .map(|k| m.get(*k).cloned().unwrap_or_else(Rational::zero))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{rat, ratio};

    fn col(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn solve_and_rank() {
        let cols = vec![col(&[1, 0, 1]), col(&[0, 1, 1])];
        assert_eq!(rank(&cols), 2);
        assert_eq!(solve(&cols, &col(&[2, 3, 5])), Some(col(&[2, 3])));
        assert_eq!(solve(&cols, &col(&[2, 3, 4])), None);
    }

    #[test]
    fn nullspace_basis() {
        let cols = vec![col(&[1, 2]), col(&[2, 4]), col(&[0, 1])];
        let ns = nullspace(&cols);
        assert_eq!(ns, vec![vec![rat(-2), rat(1), rat(0)]]);
        let half = vec![vec![ratio(1, 2)], vec![rat(1)]];
        assert_eq!(nullspace(&half), vec![vec![rat(-2), rat(1)]]);
    }
}
