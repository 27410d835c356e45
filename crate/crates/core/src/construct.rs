//! Explicit lattices in a prescribed square-free genus.
//!
//! 1. Read off the rational invariants (dimension, determinant class, Hasse
//!    invariants) from the symbol.
//! 2. Find a diagonal rational form ⟨a_1, …, a_{n−1}, det·∏a_i⟩ with those
//!    invariants.
//! 3. Take a lattice L_0 on which x ↦ β(x,x) is integral and maximal with that
//!    property; every lattice of the genus embeds in it.
//! 4. For each p | 2·det, descend to a sublattice e_p L ⊆ L' ⊆ L with the
//!    right p-adic symbol (e_2 = 4, e_p = p), chosen at random.
//!
//! Internally a lattice with half-integral β is stored through H = 2β.

use crate::arith::{self, hilbert_symbol, inv_mod, mod_i};
use crate::error::{Error, Result};
use crate::genus::{symbol_raw, GenusSymbol, LocalSymbol};
use crate::lattice::{hnf_with_modulus, nullspace_mod_p, GramLattice, IMat};
use crate::padic::jordan_decompose;
use crate::watson::{realize_preimage, watson_symbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Attempts per prime before giving up on the random descent.
const ATTEMPTS: usize = 20_000;

/// Hasse invariant c_p = ∏_{i<j} (a_i, a_j)_p of a diagonal form.
pub fn hasse_invariant(diag: &[i128], p: u64) -> i8 {
    let mut c = 1;
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            c *= hilbert_symbol(diag[i], diag[j], p);
        }
    }
    c
}

/// A positive diagonal form with the rational invariants of `sym`.
pub fn find_diagonal_form(sym: &GenusSymbol) -> Result<Vec<i128>> {
    let inv = sym.space_invariants();
    let n = sym.dim() as usize;
    let det = sym.det() as i128;
    let mut pool: Vec<u64> = arith::prime_divisors(2 * sym.det());
    let mut q = 2;
    for _ in 0..10 {
        q = arith::next_prime(q);
        while pool.contains(&q) {
            q = arith::next_prime(q);
        }
        pool.push(q);
    }
    pool.sort();
    // products of at most three distinct pool primes, smallest first
    let mut values: Vec<i128> = vec![1];
    for i in 0..pool.len() {
        values.push(pool[i] as i128);
        for j in i + 1..pool.len() {
            values.push((pool[i] * pool[j]) as i128);
            for k in j + 1..pool.len() {
                values.push((pool[i] * pool[j] * pool[k]) as i128);
            }
        }
    }
    values.sort();
    let check_primes = pool.clone();
    let matches = |diag: &[i128]| {
        check_primes.iter().all(|&p| {
            let want = if inv.hasse_minus.contains(&p) { -1 } else { 1 };
            hasse_invariant(diag, p) == want
        })
    };
    let free = (n - 1).min(3);
    let build = |choice: &[i128]| -> Vec<i128> {
        let mut d = vec![1i128; n - 1 - free];
        d.extend_from_slice(choice);
        let prod: i128 = d.iter().product();
        d.push(arith::squarefree_part(det * prod));
        d
    };
    // enumerate choices in order of the largest index used
    for bound in 1..=values.len() {
        let mut idx = vec![0usize; free];
        loop {
            if idx.iter().any(|&i| i == bound - 1) && idx.windows(2).all(|w| w[0] <= w[1]) {
                let choice: Vec<i128> = idx.iter().map(|&i| values[i]).collect();
                let d = build(&choice);
                if matches(&d) {
                    return Ok(d);
                }
            }
            let mut k = 0;
            while k < free {
                idx[k] += 1;
                if idx[k] < bound {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == free {
                break;
            }
        }
    }
    Err(Error::Construction("no diagonal form found over the prime pool".into()))
}

/// Gram matrix 2β of a maximal lattice with integral x ↦ β(x,x) on the space
/// of the given diagonal form.
pub fn maximal_lattice(diag: &[i128]) -> Result<GramLattice> {
    let d: Vec<i64> = diag
        .iter()
        .map(|&a| i64::try_from(2 * a).map_err(|_| Error::Construction("diagonal entry too large".into())))
        .collect::<Result<_>>()?;
    Ok(GramLattice::diagonal(&d).maximal_overlattice(true).lll())
}

pub(crate) fn gram_i128(l: &GramLattice) -> IMat {
    l.rows().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

/// Gram matrix of the rows of `b` with respect to `g`.
pub(crate) fn transform(g: &IMat, b: &IMat) -> Option<IMat> {
    let n = g.len();
    let m = b.len();
    let mut tmp = vec![vec![0i128; n]; m];
    for i in 0..m {
        for k in 0..n {
            if b[i][k] != 0 {
                for j in 0..n {
                    tmp[i][j] = tmp[i][j].checked_add(b[i][k].checked_mul(g[k][j])?)?;
                }
            }
        }
    }
    let mut out = vec![vec![0i128; m]; m];
    for i in 0..m {
        for j in i..m {
            let mut s = 0i128;
            for k in 0..n {
                s = s.checked_add(tmp[i][k].checked_mul(b[j][k])?)?;
            }
            out[i][j] = s;
            out[j][i] = s;
        }
    }
    Some(out)
}

/// β = H/2 as an integral lattice, if it is one.
fn halve(h: &IMat) -> Option<GramLattice> {
    let n = h.len();
    let mut g = Vec::with_capacity(n * n);
    for r in h {
        for &x in r {
            if x % 2 != 0 {
                return None;
            }
            g.push(i64::try_from(x / 2).ok()?);
        }
    }
    GramLattice::new(n, g).ok()
}

fn same_local(a: &LocalSymbol, b: &LocalSymbol) -> bool {
    a.p == b.p && a.canonical() == b.canonical()
}

fn local_of(l: &GramLattice, p: u64) -> LocalSymbol {
    let j = jordan_decompose(l, p);
    let parts = j
        .blocks
        .iter()
        .map(|b| {
            if p == 2 {
                crate::genus::Constituent::new2(b.scale, b.rank as u32, b.eps, b.odd, b.oddity)
            } else {
                crate::genus::Constituent::new(b.scale, b.rank as u32, b.eps)
            }
        })
        .collect();
    LocalSymbol { p, parts }
}

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
}

pub(crate) fn rank_mod_p(rows: &IMat, p: u64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    let pi = p as i128;
    let mut r: IMat = rows.iter().map(|row| row.iter().map(|&x| mod_i(x, pi)).collect()).collect();
    let mut rank = 0;
    for c in 0..n {
        let Some(pr) = (rank..r.len()).find(|&i| r[i][c] != 0) else { continue };
        r.swap(rank, pr);
        let inv = inv_mod(r[rank][c], pi).unwrap();
        for i in 0..r.len() {
            if i != rank && r[i][c] != 0 {
                let f = r[i][c] * inv % pi;
                for k in 0..n {
                    r[i][k] = mod_i(r[i][k] - f * r[rank][k], pi);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn form_value(g: &IMat, x: &[i128], y: &[i128]) -> i128 {
    let n = g.len();
    let mut s = 0i128;
    for i in 0..n {
        if x[i] != 0 {
            for j in 0..n {
                s += x[i] * g[i][j] * y[j];
            }
        }
    }
    s
}

/// Basis of {x : g(x, r) ≡ 0 mod p for all r in `rows`}.
fn orthogonal_complement(g: &IMat, rows: &IMat, p: u64) -> IMat {
    let n = g.len();
    if rows.is_empty() {
        return identity(n);
    }
    let a: IMat = rows.iter().map(|r| (0..n).map(|j| (0..n).map(|i| r[i] * g[i][j]).sum()).collect()).collect();
    nullspace_mod_p(&a, p)
}

pub(crate) fn random_combination(basis: &IMat, p: u64, rng: &mut ChaCha8Rng) -> Vec<i128> {
    let n = basis[0].len();
    let pi = p as i128;
    let mut v = vec![0i128; n];
    for b in basis {
        let c = rng.gen_range(0..pi);
        for i in 0..n {
            v[i] = (v[i] + c * b[i]) % pi;
        }
    }
    v
}

/// Random subspace W of F_p^n with radical of dimension exactly `k` and
/// total dimension k + `extra`: a random isotropic R (with g(v,v) ≡ 0 mod
/// `diag_mod`·p... see `isotropic`) plus random vectors orthogonal to R.
fn random_subspace(
    g: &IMat,
    p: u64,
    k: usize,
    extra: usize,
    isotropic: &dyn Fn(&[i128]) -> bool,
    rng: &mut ChaCha8Rng,
) -> Option<IMat> {
    let n = g.len();
    let tries = 32 * p as usize + 64;
    // R^⊥ ⊇ W forces dim(R ∩ rad) ≥ 2k + extra − n
    let rad = nullspace_mod_p(g, p);
    let lo = (2 * k + extra).saturating_sub(n);
    let hi = rad.len().min(k);
    if lo > hi {
        return None;
    }
    let j = rng.gen_range(lo..=hi);
    let mut r: IMat = Vec::new();
    while r.len() < j {
        let v = random_combination(&rad, p, rng);
        r.push(v);
        if rank_mod_p(&r, p) < r.len() {
            r.pop();
        }
    }
    for _ in j..k {
        let perp = orthogonal_complement(g, &r, p);
        if perp.is_empty() {
            return None;
        }
        let mut found = false;
        for _ in 0..tries {
            let v = random_combination(&perp, p, rng);
            if !isotropic(&v) {
                continue;
            }
            r.push(v);
            if rank_mod_p(&r, p) == r.len() {
                found = true;
                break;
            }
            r.pop();
        }
        if !found {
            return None;
        }
    }
    let perp = orthogonal_complement(g, &r, p);
    let mut w = r;
    for _ in 0..extra {
        let mut found = false;
        for _ in 0..64 {
            let v = random_combination(&perp, p, rng);
            w.push(v);
            if rank_mod_p(&w, p) == w.len() {
                found = true;
                break;
            }
            w.pop();
        }
        if !found {
            return None;
        }
    }
    Some(w)
}

pub(crate) fn reduce(g: &IMat, p: u64) -> IMat {
    g.iter().map(|r| r.iter().map(|&x| mod_i(x, p as i128)).collect()).collect()
}

/// Sublattice W + pL and its Gram matrix.
fn sub_gram(g: &IMat, w: IMat, p: u64) -> Option<IMat> {
    let b = hnf_with_modulus(w, g.len(), p as i128);
    transform(g, &b)
}

pub(crate) fn to_lattice(g: &IMat) -> Option<GramLattice> {
    let flat: Vec<i64> = g.iter().flatten().map(|&x| i64::try_from(x).ok()).collect::<Option<_>>()?;
    GramLattice::new(g.len(), flat).ok()
}

/// Random sublattice of `h` (Gram of 2β) of index p^m whose β has the local
/// symbol `target` at p; returns its 2β.
///
/// Write W = L'/pL. The scale-0 rank of L' is the rank of the form on W, so
/// W is sampled as a random isotropic radical of the required dimension plus
/// a random complement orthogonal to it.
fn descend(h: &GramLattice, target: &LocalSymbol, m: u32, rng: &mut ChaCha8Rng) -> Option<GramLattice> {
    let n = h.dim();
    let p = target.p;
    let g = gram_i128(h);
    let r1 = target.rank_at(1) as usize;
    let r0 = n - r1;
    let m = m as usize;
    if p != 2 {
        let mut target_h = target.clone();
        target_h.twist(2);
        let gb = reduce(&g, p);
        let u = n - rank_mod_p(&gb, p);
        if r1 < m + u {
            return None;
        }
        let k = r1 - m;
        let iso = |v: &[i128]| mod_i(form_value(&gb, v, v), p as i128) == 0;
        for _ in 0..ATTEMPTS {
            let Some(w) = random_subspace(&gb, p, k, r0, &iso, rng) else { continue };
            let Some(t) = sub_gram(&g, w, p) else { continue };
            let Some(l) = to_lattice(&t) else { continue };
            if same_local(&local_of(&l, p), &target_h) {
                return Some(l);
            }
        }
        return None;
    }
    let even = target.part_at(0).is_some_and(|c| !c.odd);
    let g2 = reduce(&g, 2);
    // stage 1: L'' = L' + 2L is β-integral, i.e. W1 is isotropic for H mod 2,
    // and even when the target is
    let iso1 = |v: &[i128]| !even || mod_i(form_value(&g, v, v) / 2, 2) == 0;
    for _ in 0..ATTEMPTS {
        let c1 = rng.gen_range(0..=m.min(n));
        let Some(w1) = random_subspace(&g2, 2, n - c1, 0, &iso1, rng) else { continue };
        let Some(t1) = sub_gram(&g, w1, 2) else { continue };
        let Some(beta) = halve(&t1) else { continue };
        // stage 2: 2L'' ⊆ L' ⊆ L''
        let v = arith::val_big(&beta.determinant(), 2) as usize;
        if r1 < v || (r1 - v) % 2 != 0 {
            continue;
        }
        let c2 = (r1 - v) / 2;
        if c2 > n || r1 < c2 {
            continue;
        }
        let bg = gram_i128(&beta);
        let bb = reduce(&bg, 2);
        let iso2 = |x: &[i128]| mod_i(form_value(&bg, x, x), 2) == 0;
        let Some(w2) = random_subspace(&bb, 2, r1 - c2, r0, &iso2, rng) else { continue };
        let Some(t2) = sub_gram(&bg, w2, 2) else { continue };
        let Some(l) = to_lattice(&t2) else { continue };
        if same_local(&local_of(&l, 2), target) {
            return Some(l.scaled(2));
        }
    }
    None
}

/// A lattice in the genus `sym` (square-free symbols), reproducible from `seed`.
pub fn construct_representative(sym: &GenusSymbol, seed: u64) -> Result<GramLattice> {
    sym.validate()?;
    if !sym.is_squarefree() {
        return Err(Error::Construction("symbol is not square-free".into()));
    }
    let n = sym.dim() as usize;
    let diag = find_diagonal_form(sym)?;
    let mut h = maximal_lattice(&diag)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut primes = sym.primes();
    // odd primes first, then 2
    primes.rotate_left(1);
    for p in primes {
        let target = sym.local_or_trivial(p);
        // det(2β) = 2^n det(β)
        let want = target.det_exponent() + if p == 2 { n as u32 } else { 0 };
        let have = arith::val_big(&h.determinant(), p);
        if have > want || (want - have) % 2 != 0 {
            return Err(Error::Construction(format!("index at p={p} is not a square")));
        }
        let m = (want - have) / 2;
        let l = descend(&h, &target, m, &mut rng)
            .ok_or_else(|| Error::Construction(format!("no sublattice with the required symbol at p={p}")))?;
        h = l.lll();
    }
    let result = GramLattice::new(n, h.entries().iter().map(|&x| x / 2).collect())?.lll();
    let got = symbol_raw(&result);
    if got != *sym {
        return Err(Error::Construction(format!("constructed lattice has symbol {got}")));
    }
    Ok(result)
}

/// Sublattice draws per Watson step when lifting a construction.
const LIFT_ATTEMPTS: usize = 200_000;

/// A lattice in the genus `sym`, square-free or not.
///
/// Non-square-free symbols are first pushed down with Watson maps at the
/// offending primes until they become square-free; the square-free lattice is
/// then lifted back one step at a time through Watson preimages. The lift
/// samples sublattices of a single lattice, so it succeeds reliably when the
/// genera on the way have few classes (e.g. for single-class genera).
pub fn construct_lattice(sym: &GenusSymbol, seed: u64) -> Result<GramLattice> {
    sym.validate()?;
    let mut chain: Vec<(GenusSymbol, u64)> = Vec::new();
    let mut cur = sym.clone();
    while let Some(p) = cur.locals().iter().find(|l| !l.is_squarefree()).map(|l| l.p) {
        if chain.len() > 64 {
            return Err(Error::Construction("Watson descent does not terminate".into()));
        }
        let next = watson_symbol(&cur, p).rescale();
        chain.push((cur, p));
        cur = next;
    }
    let mut l = construct_representative(&cur, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5741_5453);
    while let Some((s, p)) = chain.pop() {
        l = realize_preimage(&l, p, &s, LIFT_ATTEMPTS, &mut rng)
            .ok_or_else(|| Error::Construction(format!("no sublattice realises {s} at p={p}")))?;
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genus::parse_symbol;

    fn roundtrip(s: &str) {
        let sym = parse_symbol(s).unwrap();
        let l = construct_representative(&sym, 1).unwrap();
        assert_eq!(symbol_raw(&l), sym, "{s}");
    }

    #[test]
    fn hasse_of_sum_of_squares() {
        assert_eq!(hasse_invariant(&[1, 1, 1], 2), 1);
        assert_eq!(hasse_invariant(&[-1, -1], 2), -1);
    }

    #[test]
    fn unimodular() {
        roundtrip("I_{8,0}");
        roundtrip("II_{8,0}");
        roundtrip("I_{5,0}");
    }

    #[test]
    fn with_odd_part() {
        roundtrip("II_{10,0}(3^{-1})");
        roundtrip("II_{8,0}(5^{-1})");
    }

    #[test]
    fn through_watson_preimages() {
        for s in ["II_{9,0}(8_1^{-1})", "I_{7,0}(4_3^{-1})", "II_{7,0}(2_7^{-1} × 9^{+1})"] {
            let sym = parse_symbol(s).unwrap();
            assert!(construct_representative(&sym, 1).is_err());
            assert_eq!(symbol_raw(&construct_lattice(&sym, 1).unwrap()), sym, "{s}");
        }
    }

    #[test]
    fn with_two_adic_part() {
        roundtrip("II_{9,0}(2_1^{+1})");
        roundtrip("II_{7,0}(2_7^{-1})");
    }
}
