//! Checks shared by the property suite and the acceptance target.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use singleclass::arith::{hilbert_symbol, hilbert_symbol_real, prime_divisors};
use singleclass::aut::short_vectors;
use singleclass::classify::enumerate_squarefree_candidates;
use singleclass::construct::construct_lattice;
use singleclass::genus::{parse_symbol, print_symbol, symbol_raw};
use singleclass::mass::{a_bound, local_factor, mass, minimal_mass, s_lower, t_min};
use singleclass::padic::len_p;
use singleclass::watson::watson_map;
use singleclass::GramLattice;

pub fn f64_of(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

pub fn rebasing_invariance(per_fixture: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (s, l) in super::fixtures() {
        let sym = symbol_raw(l);
        for _ in 0..per_fixture {
            let m = super::rebase(l, &mut rng);
            assert_eq!(symbol_raw(&m), sym, "{s}");
        }
    }
}

pub fn parse_print_identity() -> usize {
    let fams = super::tables().families;
    for f in &fams {
        let s = parse_symbol(&f.symbol).unwrap_or_else(|e| panic!("{}: {e}", f.symbol));
        assert_eq!(print_symbol(&s), f.symbol);
    }
    fams.len()
}

pub fn watson_length_law() {
    for (s, l) in super::fixtures() {
        for p in prime_divisors(2 * l.det_u128()) {
            let before = len_p(l, p);
            let after = len_p(&watson_map(l, p), p);
            assert!(after <= before.saturating_sub(1).max(2), "{s} at p={p}: {before} -> {after}");
        }
    }
}

pub fn construct_round_trip(min_dim: u32, seeds: &[u64]) {
    for f in super::tables().families.iter().filter(|f| f.dim >= min_dim) {
        let sym = parse_symbol(&f.symbol).unwrap();
        for &seed in seeds {
            let l = construct_lattice(&sym, seed).unwrap_or_else(|e| panic!("{}: {e}", f.symbol));
            assert_eq!(symbol_raw(&l), sym, "{}", f.symbol);
        }
    }
}

/// Brute force over the box x_i² ≤ bound·(G⁻¹)_ii.
pub fn box_oracle(l: &GramLattice, bound: i64) -> Vec<Vec<i64>> {
    let n = l.dim();
    let dual = l.dual();
    let r: Vec<i64> = (0..n).map(|i| (f64_of(&dual[i][i]) * bound as f64).sqrt().floor() as i64 + 1).collect();
    fn rec(l: &GramLattice, r: &[i64], k: usize, x: &mut Vec<i64>, bound: i64, out: &mut Vec<Vec<i64>>) {
        if k == x.len() {
            let v = l.inner(x, x);
            if v > 0 && v <= bound as i128 {
                out.push(x.clone());
            }
            return;
        }
        for c in -r[k]..=r[k] {
            x[k] = c;
            rec(l, r, k + 1, x, bound, out);
        }
    }
    let mut out = Vec::new();
    rec(l, &r, 0, &mut vec![0; n], bound, &mut out);
    out.sort();
    out
}

pub fn random_small_gram(rng: &mut impl Rng) -> GramLattice {
    loop {
        let n = rng.gen_range(1..=4);
        let mut g = vec![0i64; n * n];
        for i in 0..n {
            g[i * n + i] = rng.gen_range(1..=6);
            for j in i + 1..n {
                let v = rng.gen_range(-3..=3);
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        if let Ok(l) = GramLattice::new(n, g) {
            if l.det_u128() <= 100 {
                return l;
            }
        }
    }
}

pub fn short_vectors_vs_box(cases: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let l = random_small_gram(&mut rng);
        let bound = rng.gen_range(1..=12);
        let mut fast = short_vectors(&l, bound).unwrap();
        fast.sort();
        assert_eq!(fast, box_oracle(&l, bound), "{:?} bound {bound}", l.rows());
    }
}

pub fn hilbert_triple(a: i128, b: i128, c: i128) {
    for p in prime_divisors((2 * a * b * c).unsigned_abs()) {
        assert_eq!(hilbert_symbol(a * b, c, p), hilbert_symbol(a, c, p) * hilbert_symbol(b, c, p), "({a}·{b},{c})_{p}");
        assert_eq!(hilbert_symbol(a, b, p), hilbert_symbol(b, a, p));
    }
    for (x, y) in [(a, b), (a, c), (b, c)] {
        let prod: i8 = prime_divisors((2 * x * y).unsigned_abs()).iter().map(|&p| hilbert_symbol(x, y, p)).product();
        assert_eq!(prod * hilbert_symbol_real(x, y), 1, "reciprocity for ({x},{y})");
    }
}

pub fn hilbert_random(triples: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || loop {
        let x: i128 = rng.gen_range(-2000..=2000);
        if x != 0 {
            return x;
        }
    };
    for _ in 0..triples {
        let (a, b, c) = (draw(), draw(), draw());
        hilbert_triple(a, b, c);
    }
}

/// a_bound and minimal_mass never exceed exact masses of the dim-n
/// square-free candidates; returns the number of candidates checked.
pub fn mass_bounds_sound(n: u32) -> usize {
    let slack = 1.0 - 1e-9;
    let base = s_lower(n) * t_min(n).enclosure();
    let cands = enumerate_squarefree_candidates(n).unwrap();
    for g in &cands {
        let m = f64_of(mass(g).unwrap().value());
        let odd: Vec<_> = g.locals().iter().filter(|l| l.p != 2).cloned().collect();
        let mut lb = base;
        for l in &odd {
            lb = lb * a_bound(n, l.p);
        }
        assert!(lb.lo <= m / slack, "{g}: a-bound {} > {m}", lb.lo);
        let two = g.local_or_trivial(2);
        for (i, l) in odd.iter().enumerate() {
            let rest: Vec<_> = odd.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x.clone()).collect();
            let mm = minimal_mass(&two, &rest, l.p);
            assert!(mm.lo <= m / slack, "{g}: minimal_mass {} > {m}", mm.lo);
            assert!(local_factor(g, l.p).enclosure().hi >= a_bound(n, l.p).lo * slack, "{g} at {}", l.p);
        }
    }
    cands.len()
}
