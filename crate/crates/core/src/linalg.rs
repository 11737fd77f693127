//! Division-free linear algebra over commutative rings, plus exact rational
//! elimination.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::coefficient::{Coefficient, XPoly};
use crate::rational::Q;

/// Minimal commutative-ring interface. `zero_like`/`one_like` build constants
/// compatible with `self` (same basis, same parent ring).
pub trait Ring: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn vanishes(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;

    fn pow(&self, k: u32) -> Self {
        let mut acc = self.one_like();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl Ring for Q {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
}

impl Ring for Coefficient {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn vanishes(&self) -> bool {
        Coefficient::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Coefficient::zero()
    }
    fn one_like(&self) -> Self {
        Coefficient::one()
    }
}

impl Ring for XPoly {
    fn add(&self, o: &Self) -> Self {
        XPoly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        XPoly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        XPoly::mul(self, o)
    }
    fn neg(&self) -> Self {
        XPoly::neg(self)
    }
    fn vanishes(&self) -> bool {
        XPoly::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        XPoly::zero()
    }
    fn one_like(&self) -> Self {
        XPoly::constant(Coefficient::one())
    }
}

/// Determinant by Laplace expansion memoized over column subsets
/// (`O(2^n n)` ring operations, no division). Panics on an empty or
/// non-square matrix; `n` must be below 32.
pub fn det<R: Ring>(m: &[Vec<R>]) -> R {
    let n = m.len();
    assert!(n > 0 && n < 32 && m.iter().all(|r| r.len() == n), "square nonempty matrix required");
    // memo[S] = det of rows 0..|S| restricted to the columns in S
    let mut memo: HashMap<u32, R> = HashMap::new();
    let one = m[0][0].one_like();
    memo.insert(0, one);
    let mut layer: Vec<u32> = vec![0];
    for (k, row) in m.iter().enumerate() {
        let mut next: HashMap<u32, ()> = HashMap::new();
        for &s in &layer {
            for j in 0..n {
                if s & (1 << j) == 0 {
                    next.insert(s | (1 << j), ());
                }
            }
        }
        let mut new_layer: Vec<u32> = next.into_keys().collect();
        new_layer.sort_unstable();
        for &s in &new_layer {
            let mut acc = m[0][0].zero_like();
            let mut pos = 0usize;
            for (j, entry) in row.iter().enumerate() {
                if s & (1 << j) == 0 {
                    continue;
                }
                let rest = s & !(1 << j);
                if !entry.vanishes() {
                    let minor = &memo[&rest];
                    if !minor.vanishes() {
                        let t = entry.mul(minor);
                        acc = if (k + pos) % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
                    }
                }
                pos += 1;
            }
            memo.insert(s, acc);
        }
        for s in &layer {
            memo.remove(s);
        }
        layer = new_layer;
    }
    memo.remove(&((1u32 << n) - 1)).expect("full subset computed")
}

/// Row-reduced echelon form over `Q`; returns the rank and pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> (usize, Vec<usize>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    (r, pivots)
}

pub fn rank_q(m: &[Vec<Q>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).0
}

/// A basis of the right null space of `m` over `Q`.
pub fn null_space_q(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut a = m.to_vec();
    let (_, pivots) = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free].clone();
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn leibniz(m: &[Vec<Q>]) -> Q {
        let n = m.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = Q::zero();
        loop {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if perm[i] > perm[j] {
                        inv += 1;
                    }
                }
            }
            let mut t = Q::one();
            for i in 0..n {
                t *= &m[i][perm[i]];
            }
            if inv % 2 == 0 {
                total += t;
            } else {
                total -= t;
            }
            // next permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        total
    }

    #[test]
    fn determinant_matches_leibniz() {
        let m: Vec<Vec<Q>> = (0..5).map(|i| (0..5).map(|j| q(((i * 7 + j * 3) % 5) as i64 - 2 + (i == j) as i64)).collect()).collect();
        assert_eq!(det(&m), leibniz(&m));
        assert_eq!(det(&[vec![q(1), q(-3)], vec![q(1), q(-5)]]), q(-2));
    }

    #[test]
    fn null_space_annihilates() {
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        let ns = null_space_q(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            for row in &m {
                let s: Q = row.iter().zip(&v).map(|(a, b)| a * b).sum();
                assert!(s.is_zero());
            }
        }
        assert_eq!(rank_q(&m), 1);
    }
}
