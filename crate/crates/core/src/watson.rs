//! Watson's descent Wat_p(L) = rescale(L ∩ pL^#).
//!
//! On a Jordan splitting L = L_0 ⊥ L_1 ⊥ … at p the map sends L_0 to pL_0 and
//! leaves the other components alone, so on symbols it moves the unimodular
//! constituent to scale 2 and then shifts everything down to scale 0. The
//! rescaling by p^{-a} twists the symbols at the other primes by p^a.
//!
//! Conversely a preimage M of L satisfies L ≅ pM_0 ⊥ M_1 ⊥ …, so up to
//! scaling M is N + pL for an orthogonal summand N of L that is p^t-modular
//! with t ∈ {0, 1}. That gives both the symbolic preimages and a cheap way of
//! realising them inside a given lattice.

use crate::construct::{gram_i128, rank_mod_p, random_combination, reduce};
use crate::genus::{symbol_raw, two_adic_class, Constituent, GenusSymbol, LocalSymbol, SymbolKey};
use crate::lattice::{hnf_with_modulus, nullspace_mod_p, rescale_primitive, GramLattice, IMat};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Wat_p(L) as an explicit (LLL-reduced) Gram matrix.
pub fn watson_map(l: &GramLattice, p: u64) -> GramLattice {
    let n = l.dim();
    let g = reduce(&gram_i128(l), p);
    let kernel = nullspace_mod_p(&g, p);
    let b = hnf_with_modulus(kernel, n, p as i128);
    rescale_primitive(n, &l.transform(&b, 1)).lll()
}

fn merge(a: Constituent, b: Constituent) -> Constituent {
    debug_assert_eq!(a.scale, b.scale);
    let odd = a.odd || b.odd;
    Constituent::new2(a.scale, a.rank + b.rank, a.eps * b.eps, odd, a.oddity + b.oddity)
}

fn insert(parts: &mut Vec<Constituent>, c: Constituent) {
    match parts.iter().position(|x| x.scale >= c.scale) {
        Some(i) if parts[i].scale == c.scale => parts[i] = merge(parts[i], c),
        Some(i) => parts.insert(i, c),
        None => parts.push(c),
    }
}

/// Local Watson image and the shift a with Wat_p(L) = p^{-a}(L ∩ pL^#).
pub fn watson_local(l: &LocalSymbol) -> (LocalSymbol, u32) {
    let mut parts: Vec<Constituent> = l.parts.iter().filter(|c| c.scale > 0).copied().collect();
    if let Some(c0) = l.part_at(0) {
        insert(&mut parts, Constituent { scale: 2, ..*c0 });
    }
    let mut out = LocalSymbol { p: l.p, parts };
    let a = out.min_scale();
    out.shift_down(a);
    (out, a)
}

fn twist_others(sym: &GenusSymbol, p: u64, local: LocalSymbol, a: u32) -> GenusSymbol {
    let mut locals: Vec<LocalSymbol> = sym
        .locals()
        .iter()
        .filter(|l| l.p != p)
        .map(|l| {
            let mut l = l.clone();
            if a % 2 == 1 {
                l.twist(p as i128);
            }
            l
        })
        .collect();
    locals.push(local);
    GenusSymbol::from_locals(sym.dim(), locals)
}

/// Wat_p on genus symbols.
pub fn watson_symbol(sym: &GenusSymbol, p: u64) -> GenusSymbol {
    let (local, a) = watson_local(&sym.local_or_trivial(p));
    twist_others(sym, p, local, a)
}

/// Number of Jordan scales spanned at p (0 at primes not dividing 2·det).
pub fn len_p(sym: &GenusSymbol, p: u64) -> u32 {
    sym.local(p).map_or(0, |l| l.len())
}

fn constituent_options(p: u64, scale: u32, rank: u32) -> Vec<Constituent> {
    let mut o = Vec::new();
    for eps in [1i8, -1] {
        if p != 2 {
            o.push(Constituent::new(scale, rank, eps));
            continue;
        }
        if rank % 2 == 0 {
            o.push(Constituent::new2(scale, rank, eps, false, 0));
        }
        for t in 0..8 {
            let c = Constituent::new2(scale, rank, eps, true, t);
            if c.is_valid_2adic() {
                o.push(c);
            }
        }
    }
    o
}

/// Ways of writing the constituent `c` as an orthogonal sum of a part of rank
/// r ≥ 1 (returned first) and an optional complement.
fn splits(p: u64, c: &Constituent) -> Vec<(Constituent, Option<Constituent>)> {
    let mut out = Vec::new();
    for r in 1..=c.rank {
        for a in constituent_options(p, c.scale, r) {
            if r == c.rank {
                if a == *c {
                    out.push((a, None));
                }
                continue;
            }
            for b in constituent_options(p, c.scale, c.rank - r) {
                if merge(a, b) == *c {
                    out.push((a, Some(b)));
                }
            }
        }
    }
    out
}

/// All primitive genus symbols g with rescale(Wat_p(g)) = rescale(sym),
/// including sym itself whenever it is one; sorted.
pub fn watson_preimage_symbols(sym: &GenusSymbol, p: u64) -> Vec<GenusSymbol> {
    let target = sym.rescale();
    let key = target.key();
    let local = target.local_or_trivial(p);
    let mut found: BTreeMap<SymbolKey, GenusSymbol> = BTreeMap::new();
    for a in [1u32, 2] {
        let lifted: Vec<Constituent> = local.parts.iter().map(|c| Constituent { scale: c.scale + a, ..*c }).collect();
        let forms = if p == 2 { two_adic_class(&lifted) } else { vec![lifted] };
        for parts in forms {
            let Some(c2) = parts.iter().find(|c| c.scale == 2) else { continue };
            for (q0, q2) in splits(p, c2) {
                let mut q: Vec<Constituent> = parts.iter().filter(|c| c.scale != 2).copied().collect();
                insert(&mut q, Constituent { scale: 0, ..q0 });
                if let Some(q2) = q2 {
                    insert(&mut q, q2);
                }
                let cand_local = LocalSymbol { p, parts: q };
                let cand = twist_others(&target, p, cand_local, a);
                if !cand.is_valid() {
                    continue;
                }
                if watson_symbol(&cand, p).rescale().key() != key {
                    continue;
                }
                found.entry(cand.key()).or_insert(cand);
            }
        }
    }
    let mut out: Vec<GenusSymbol> = found.into_values().collect();
    out.sort();
    out
}

/// Shape of the summand N with M ≅ rescale(N + pL): its rank and whether it
/// is p-modular (t = 1) rather than unimodular (t = 0).
fn summand_shape(pre: &GenusSymbol, p: u64) -> (usize, bool) {
    let l = pre.local_or_trivial(p);
    (l.rank_at(0) as usize, l.rank_at(1) > 0)
}

/// Search for a lattice pL ⊆ L' ⊆ L whose primitive rescaling has the symbol
/// `pre`, a Watson preimage of the genus of `l`.
pub fn realize_preimage(
    l: &GramLattice,
    p: u64,
    pre: &GenusSymbol,
    attempts: usize,
    rng: &mut ChaCha8Rng,
) -> Option<GramLattice> {
    let n = l.dim();
    let (d, modular) = summand_shape(pre, p);
    let g = gram_i128(l);
    let space: IMat = if modular {
        nullspace_mod_p(&reduce(&g, p), p)
    } else {
        (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
    };
    if d == 0 || d > space.len() {
        return None;
    }
    let key = pre.key();
    for _ in 0..attempts {
        let mut w: IMat = Vec::with_capacity(d);
        while w.len() < d {
            w.push(random_combination(&space, p, rng));
            if rank_mod_p(&w, p) < w.len() {
                w.pop();
            }
        }
        let b = hnf_with_modulus(w, n, p as i128);
        let cand = rescale_primitive(n, &l.transform(&b, 1));
        if symbol_raw(&cand).key() == key {
            return Some(cand.lll());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::construct_representative;
    use crate::genus::{parse_symbol, symbol_from_lattice};
    use rand::SeedableRng;

    #[test]
    fn examples() {
        let id = GramLattice::identity(4);
        assert_eq!(watson_map(&id, 3), id);
        let d = GramLattice::diagonal(&[1, 1, 4]);
        assert_eq!(symbol_raw(&watson_map(&d, 2)), symbol_raw(&GramLattice::identity(3)));
        assert_eq!(len_p(&symbol_raw(&d), 2), 3);
    }

    #[test]
    fn commuting_square() {
        for s in ["II_{10,0}(3^{-1})", "II_{9,0}(2_1^{+1})", "II_{8,0}(5^{-1})", "II_{7,0}(2_7^{-1})", "I_{6,0}(3^{+2})"] {
            let sym = parse_symbol(s).unwrap();
            let l = construct_representative(&sym, 3).unwrap();
            for p in [2, 3, 5, 7] {
                assert_eq!(watson_symbol(&sym, p).rescale(), symbol_raw(&watson_map(&l, p)), "{s} at {p}");
            }
        }
    }

    #[test]
    fn preimages_map_back() {
        let sym = parse_symbol("I_{3,0}").unwrap();
        let pre = watson_preimage_symbols(&sym, 2);
        let d = symbol_from_lattice(&GramLattice::diagonal(&[1, 1, 4]));
        assert!(pre.contains(&d));
        for g in &pre {
            assert_eq!(watson_symbol(g, 2).rescale(), sym);
        }
        // preimages at a prime not dividing 2·det: L_0 ⊥ L_2 or sym itself
        for g in watson_preimage_symbols(&sym, 5) {
            let l = g.local_or_trivial(5);
            assert!(l.rank_at(1) == 0 && l.len() != 2, "{g}");
        }
        assert!(watson_preimage_symbols(&sym, 5).len() > 1);
    }

    #[test]
    fn realizes_every_preimage() {
        let sym = parse_symbol("II_{8,0}").unwrap();
        let l = GramLattice::e8();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [2, 3] {
            for pre in watson_preimage_symbols(&sym, p) {
                let m = realize_preimage(&l, p, &pre, 5000, &mut rng).unwrap_or_else(|| panic!("{pre}"));
                assert_eq!(symbol_raw(&m), pre);
            }
        }
    }
}
