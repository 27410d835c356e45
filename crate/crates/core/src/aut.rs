//! Short vectors and automorphism group orders.
//!
//! Enumeration is exact Fincke–Pohst: the partial quadratic forms are integer
//! Schur complements scaled by leading minors, and every coordinate range is
//! obtained from an integer square root.
//!
//! The group order is computed with a Plesken–Souvignier style stabiliser
//! chain: |Aut| is the product of the orbit lengths of the basis vectors
//! b_i under the pointwise stabiliser of b_1, ..., b_{i-1}.

use crate::arith::isqrt;
use crate::error::{Error, Result};
use crate::genus::symbol_raw;
use crate::lattice::GramLattice;
use crate::mass::mass;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::collections::HashMap;

/// Schur complements M_k = d_{k-1} · S_k, stored for k = 0..n.
struct Schur {
    m: Vec<Vec<Vec<i128>>>,
    d: Vec<i128>,
}

fn schur(g: &GramLattice) -> Result<Schur> {
    let n = g.dim();
    let mut cur: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| g.get(i, j) as i128).collect()).collect();
    let mut ms = vec![cur.clone()];
    let mut d = vec![1i128];
    let overflow = || Error::Input("Gram matrix too large for exact enumeration".into());
    for k in 0..n - 1 {
        let prev = *d.last().unwrap();
        let a = cur[0][0];
        let size = cur.len();
        let mut next = vec![vec![0i128; size - 1]; size - 1];
        for i in 1..size {
            for j in 1..size {
                let t = a
                    .checked_mul(cur[i][j])
                    .and_then(|x| x.checked_sub(cur[i][0].checked_mul(cur[0][j])?))
                    .ok_or_else(overflow)?;
                debug_assert_eq!(t % prev, 0);
                next[i - 1][j - 1] = t / prev;
            }
        }
        d.push(a);
        let _ = k;
        cur = next;
        ms.push(cur.clone());
    }
    Ok(Schur { m: ms, d })
}

/// All nonzero x with x·G·x ≤ bound (both signs), in lattice coordinates.
pub fn short_vectors(g: &GramLattice, bound: i64) -> Result<Vec<Vec<i64>>> {
    let n = g.dim();
    let sc = schur(g)?;
    let mut out = Vec::new();
    let mut x = vec![0i128; n];
    let b = bound as i128;
    enumerate(&sc, n, n - 1, &mut x, b, &mut out)?;
    Ok(out)
}

fn enumerate(sc: &Schur, n: usize, k: usize, x: &mut Vec<i128>, bound: i128, out: &mut Vec<Vec<i64>>) -> Result<()> {
    let m = &sc.m[k];
    let dk = sc.d[k];
    let overflow = || Error::Input("overflow in short vector enumeration".into());
    // coordinates k+1..n-1 fixed; tail form value and linear term
    let mut lin: i128 = 0;
    let mut c: i128 = 0;
    for i in 1..m.len() {
        let xi = x[k + i];
        if xi == 0 {
            continue;
        }
        lin = lin.checked_add(m[0][i].checked_mul(xi).ok_or_else(overflow)?).ok_or_else(overflow)?;
        for j in 1..m.len() {
            let t = m[i][j].checked_mul(xi).and_then(|t| t.checked_mul(x[k + j])).ok_or_else(overflow)?;
            c = c.checked_add(t).ok_or_else(overflow)?;
        }
    }
    let a = m[0][0];
    // a x² + 2 lin x + c ≤ bound·d  ⇔  (a x + lin)² ≤ lin² − a(c − bound·d)
    let rhs = bound.checked_mul(dk).ok_or_else(overflow)?;
    let disc = lin
        .checked_mul(lin)
        .and_then(|l2| l2.checked_sub(a.checked_mul(c.checked_sub(rhs)?)?))
        .ok_or_else(overflow)?;
    if disc < 0 {
        return Ok(());
    }
    let r = isqrt(disc as u128) as i128;
    let lo = (-r - lin).div_euclid(a) + if (-r - lin).rem_euclid(a) != 0 { 1 } else { 0 };
    let hi = (r - lin).div_euclid(a);
    for v in lo..=hi {
        x[k] = v;
        if k == 0 {
            if x.iter().any(|&t| t != 0) {
                out.push(x.iter().map(|&t| t as i64).collect());
            }
        } else {
            enumerate(sc, n, k - 1, x, bound, out)?;
        }
    }
    x[k] = 0;
    Ok(())
}

pub fn minimum(g: &GramLattice) -> Result<i64> {
    let bound = (0..g.dim()).map(|i| g.get(i, i)).min().unwrap();
    let vs = short_vectors(g, bound)?;
    Ok(vs.iter().map(|v| g.inner(v, v) as i64).min().unwrap())
}

struct Search {
    n: usize,
    gram: Vec<Vec<i64>>,
    vecs: Vec<Vec<i64>>,
    /// G·v for every v
    gv: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    /// candidate indices for the image of b_i
    cand: Vec<Vec<usize>>,
}

impl Search {
    fn ip(&self, a: usize, b: usize) -> i64 {
        self.vecs[a].iter().zip(&self.gv[b]).map(|(x, y)| x * y).sum()
    }

    fn apply(&self, sigma: &[usize], v: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.n];
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                for (o, &w) in out.iter_mut().zip(&self.vecs[sigma[i]]) {
                    *o += c * w;
                }
            }
        }
        out
    }

    /// Extends images[0..level] to a full automorphism.
    fn extend(&self, images: &mut Vec<usize>) -> bool {
        let level = images.len();
        if level == self.n {
            return true;
        }
        for &c in &self.cand[level] {
            if (0..level).all(|j| self.ip(c, images[j]) == self.gram[level][j]) {
                images.push(c);
                if self.extend(images) {
                    return true;
                }
                images.pop();
            }
        }
        false
    }

    fn orbit(&self, start: usize, gens: &[Vec<usize>]) -> Vec<usize> {
        let mut seen = vec![false; self.vecs.len()];
        seen[start] = true;
        let mut orb = vec![start];
        let mut i = 0;
        while i < orb.len() {
            let v = orb[i];
            for g in gens {
                let w = self.index[&self.apply(g, &self.vecs[v])];
                if !seen[w] {
                    seen[w] = true;
                    orb.push(w);
                }
            }
            i += 1;
        }
        orb
    }
}

/// Order of the automorphism group O(L).
pub fn aut_group_order(l: &GramLattice) -> Result<BigInt> {
    let g = l.lll();
    let n = g.dim();
    let maxd = (0..n).map(|i| g.get(i, i)).max().unwrap();
    let vecs = short_vectors(&g, maxd)?;
    let gram: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| g.get(i, j)).collect()).collect();
    let gv: Vec<Vec<i64>> = vecs.iter().map(|v| (0..n).map(|i| (0..n).map(|j| gram[i][j] * v[j]).sum()).collect()).collect();
    let index: HashMap<Vec<i64>, usize> = vecs.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let norms: Vec<i64> = vecs.iter().zip(&gv).map(|(v, w)| v.iter().zip(w).map(|(a, b)| a * b).sum()).collect();
    let cand: Vec<Vec<usize>> = (0..n).map(|i| (0..vecs.len()).filter(|&k| norms[k] == gram[i][i]).collect()).collect();
    let basis: Vec<usize> = (0..n)
        .map(|i| {
            let mut e = vec![0i64; n];
            e[i] = 1;
            index[&e]
        })
        .collect();
    let s = Search { n, gram, vecs, gv, index, cand };

    let mut gens: Vec<Vec<usize>> = Vec::new();
    let mut order = BigInt::one();
    for i in (0..n).rev() {
        let mut orb = s.orbit(basis[i], &gens);
        let mut excluded = vec![false; s.vecs.len()];
        for &c in &s.cand[i] {
            if excluded[c] || orb.contains(&c) {
                continue;
            }
            if (0..i).any(|j| s.ip(c, basis[j]) != s.gram[i][j]) {
                continue;
            }
            let mut images: Vec<usize> = basis[..i].to_vec();
            images.push(c);
            if s.extend(&mut images) {
                gens.push(images);
                orb = s.orbit(basis[i], &gens);
            } else {
                for w in s.orbit(c, &gens) {
                    excluded[w] = true;
                }
            }
        }
        order *= BigInt::from(orb.len());
    }
    Ok(order)
}

/// mass(genus(L)) = 1/#Aut(L), i.e. L is alone in its genus.
pub fn is_single_class(l: &GramLattice) -> Result<bool> {
    let m = mass(&symbol_raw(l))?;
    let aut = aut_group_order(l)?;
    let inv = BigRational::from_integer(aut).recip();
    debug_assert!(m.value() >= &inv);
    Ok(*m.value() == inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_orders() {
        let mut f = BigInt::one();
        for n in 1..=10usize {
            f *= 2 * n;
            assert_eq!(aut_group_order(&GramLattice::identity(n)).unwrap(), f);
        }
    }

    #[test]
    fn e8_order() {
        assert_eq!(aut_group_order(&GramLattice::e8()).unwrap(), BigInt::from(696729600u64));
        assert_eq!(short_vectors(&GramLattice::e8(), 2).unwrap().len(), 240);
    }

    #[test]
    fn a2_and_diagonal() {
        let a2 = GramLattice::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(aut_group_order(&a2).unwrap(), BigInt::from(12));
        let d = GramLattice::diagonal(&[1, 2, 3]);
        assert_eq!(aut_group_order(&d).unwrap(), BigInt::from(8));
    }

    #[test]
    fn single_class_examples() {
        assert!(is_single_class(&GramLattice::e8()).unwrap());
        assert!(is_single_class(&GramLattice::identity(5)).unwrap());
        // Z^9 shares its genus with E8 ⊥ Z
        assert!(!is_single_class(&GramLattice::identity(9)).unwrap());
    }
}
