//! The classification drivers.
//!
//! 1. Square-free candidates: a depth-first search over (2-adic symbol, odd
//!    local symbols so far, next prime), pruned with the mass lower bound.
//! 2. Each candidate is realised and kept iff mass = 1/#Aut.
//! 3. Closure under Watson preimages, breadth first, starting from the
//!    square-free single-class lattices.
//! 4. Families of rescaled partial duals and their annotations.
//!
//! Every parallel stage maps over an ordered list and collects in order, so the
//! output does not depend on the number of worker threads.

use crate::arith::{next_prime, prime_divisors};
use crate::aut::aut_group_order;
use crate::construct::construct_representative;
use crate::error::{Error, Result};
use crate::genus::{enumerate_squarefree_local, symbol_raw, GenusSymbol, LocalSymbol, SymbolKey};
use crate::lattice::GramLattice;
use crate::mass::{
    b_bound, local_factor_of, local_lower_bound, mass, mass_condition_value, s_lower, standard_mass, standard_mass_enclosure, ExactMass, Interval,
    RootRational,
};
use crate::watson::{realize_preimage, watson_preimage_symbols};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex};

/// Format version of the catalogue JSON.
pub const CATALOGUE_VERSION: u32 = 1;

/// Sublattices tried per Watson preimage before giving up.
const REALIZE_ATTEMPTS: usize = 200_000;

#[derive(Clone, Debug)]
pub struct ClassifiedGenus {
    pub symbol: GenusSymbol,
    pub representative: GramLattice,
    pub mass: ExactMass,
    pub aut_order: BigInt,
    pub maximal: bool,
    pub qf_maximal: bool,
    pub family_id: usize,
    pub family_annotation: String,
}

impl ClassifiedGenus {
    pub fn det(&self) -> u128 {
        self.symbol.det()
    }

    fn sort_key(&self) -> (u128, String) {
        (self.det(), self.symbol.display_form().to_string())
    }
}

/// Certifies `l` as single-class: returns its record iff mass = 1/#Aut.
pub fn certify(l: &GramLattice) -> Result<Option<ClassifiedGenus>> {
    let sym = symbol_raw(l);
    let m = mass(&sym)?;
    if !m.satisfies_mass_condition() {
        return Ok(None);
    }
    let aut = aut_group_order(l)?;
    if *m.value() != BigRational::from_integer(aut.clone()).recip() {
        return Ok(None);
    }
    Ok(Some(ClassifiedGenus {
        symbol: sym.display_form(),
        representative: l.lll(),
        mass: m,
        aut_order: aut,
        maximal: l.is_maximal(),
        qf_maximal: l.is_qf_maximal(),
        family_id: 0,
        family_annotation: String::new(),
    }))
}

fn lower_bound_le_half(x: Interval) -> bool {
    x.lo <= 0.5
}

/// std_n(D) by determinant; the L-value in it dominates the search time, so
/// an enclosure is tried first.
#[derive(Default)]
struct StdCache {
    exact: Mutex<HashMap<u128, RootRational>>,
    approx: Mutex<HashMap<u128, Interval>>,
}

impl StdCache {
    fn get(&self, n: u32, det: u128) -> Result<RootRational> {
        if let Some(v) = self.exact.lock().unwrap().get(&det) {
            return Ok(v.clone());
        }
        let v = standard_mass(n, det)?;
        self.exact.lock().unwrap().insert(det, v.clone());
        Ok(v)
    }

    fn enclosure(&self, n: u32, det: u128) -> Result<Interval> {
        if let Some(v) = self.approx.lock().unwrap().get(&det) {
            return Ok(*v);
        }
        let v = standard_mass_enclosure(n, det)?;
        self.approx.lock().unwrap().insert(det, v);
        Ok(v)
    }
}

/// Square-free local symbols at an odd prime with their local mass factors.
struct OddOptions {
    n: u32,
    cache: Mutex<HashMap<u64, Arc<Vec<(LocalSymbol, RootRational, Interval)>>>>,
}

impl OddOptions {
    fn get(&self, p: u64) -> Arc<Vec<(LocalSymbol, RootRational, Interval)>> {
        if let Some(v) = self.cache.lock().unwrap().get(&p) {
            return v.clone();
        }
        let v: Arc<Vec<_>> = Arc::new(
            enumerate_squarefree_local(p, self.n)
                .into_iter()
                .map(|v| {
                    let f = local_factor_of(&v);
                    let e = f.enclosure();
                    (v, f, e)
                })
                .collect(),
        );
        self.cache.lock().unwrap().insert(p, v.clone());
        v
    }
}

struct Node {
    two: usize,
    odd: Vec<LocalSymbol>,
    factor: RootRational,
    approx: Interval,
    p: u64,
}

/// All primitive square-free genus symbols of rank n satisfying the mass
/// condition, sorted.
pub fn enumerate_squarefree_candidates(n: u32) -> Result<Vec<GenusSymbol>> {
    let twos = enumerate_squarefree_local(2, n);
    let s = s_lower(n);
    let std_cache = StdCache::default();
    let odd_options = OddOptions { n, cache: Mutex::new(HashMap::new()) };
    let per_two: Vec<Result<Vec<GenusSymbol>>> = (0..twos.len())
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            let mut lb: HashMap<u64, Interval> = HashMap::new();
            // a genus without odd part is never reached by appending
            let alone = GenusSymbol::from_locals(n, vec![twos[i].clone()]);
            if alone.is_valid() && mass(&alone)?.satisfies_mass_condition() {
                out.push(alone);
            }
            let f2 = local_factor_of(&twos[i]);
            let mut stack = vec![Node { two: i, odd: Vec::new(), approx: f2.enclosure(), factor: f2, p: 3 }];
            while let Some(node) = stack.pop() {
                let q = next_prime(node.p);
                let lq = *lb.entry(q).or_insert_with(|| local_lower_bound(n, q));
                let opts = odd_options.get(node.p);
                for (v, f, e) in opts.iter() {
                    // mass ≥ s(n)·∏ m_p/std_p
                    let approx = node.approx * *e;
                    let here = lower_bound_le_half(s * approx);
                    let deeper = lower_bound_le_half(s * approx * lq);
                    if !here && !deeper {
                        continue;
                    }
                    let mut odd = node.odd.clone();
                    odd.push(v.clone());
                    let factor = &node.factor * f;
                    if here {
                        let mut locals = vec![twos[node.two].clone()];
                        locals.extend(odd.iter().cloned());
                        let g = GenusSymbol::from_locals(n, locals);
                        if g.is_valid() && lower_bound_le_half(std_cache.enclosure(n, g.det())? * approx) {
                            let m = &std_cache.get(n, g.det())? * &factor;
                            if m.to_rational().is_some_and(|r| mass_condition_value(&r)) {
                                out.push(g);
                            }
                        }
                    }
                    if deeper {
                        stack.push(Node { two: node.two, odd, factor, approx, p: q });
                    }
                }
                if lower_bound_le_half(s * node.approx * lq) {
                    stack.push(Node { p: q, ..node });
                }
            }
            Ok(out)
        })
        .collect();
    let mut all: BTreeMap<SymbolKey, GenusSymbol> = BTreeMap::new();
    for r in per_two {
        for g in r? {
            all.entry(g.key()).or_insert(g);
        }
    }
    let mut v: Vec<GenusSymbol> = all.into_values().collect();
    v.sort();
    Ok(v)
}

/// Single-class lattices among the square-free candidates.
pub fn classify_squarefree(n: u32, seed: u64) -> Result<Vec<ClassifiedGenus>> {
    let cands = enumerate_squarefree_candidates(n)?;
    let res: Vec<Result<Option<ClassifiedGenus>>> = cands
        .par_iter()
        .map(|sym| {
            let l = construct_representative(sym, seed)?;
            certify(&l)
        })
        .collect();
    let mut out = Vec::new();
    for r in res {
        if let Some(c) = r? {
            out.push(c);
        }
    }
    out.sort_by_key(|c| c.sort_key());
    Ok(out)
}

/// Primes at which a single-class preimage of a lattice with this mass may
/// exist: divisors of 2·det, and primes p with b_n(p)·mass ≤ ½.
pub fn descent_primes(sym: &GenusSymbol, m: &ExactMass) -> Vec<u64> {
    let n = sym.dim();
    let det = sym.det();
    let mut out = vec![2];
    out.extend(prime_divisors(det).into_iter().filter(|&p| p != 2));
    let mi = Interval::from_rational(m.value());
    let mut p = 3;
    loop {
        if det % p as u128 != 0 {
            if !lower_bound_le_half(b_bound(n, p) * mi) {
                break;
            }
            out.push(p);
        }
        p = next_prime(p);
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn symbol_seed(seed: u64, sym: &GenusSymbol) -> u64 {
    // FNV-1a over the printed symbol
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in sym.to_string().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Closure of `seeds` under Watson preimages; returns all single-class
/// lattices found (seeds included), sorted by determinant and symbol.
pub fn classify_all(n: u32, seeds: Vec<ClassifiedGenus>, seed: u64) -> Result<Vec<ClassifiedGenus>> {
    let mut seen: HashSet<SymbolKey> = seeds.iter().map(|c| c.symbol.rescale().key()).collect();
    let mut out = seeds.clone();
    let mut frontier = seeds;
    while !frontier.is_empty() {
        let tasks: Vec<(usize, u64, Vec<GenusSymbol>)> = frontier
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, c)| {
                descent_primes(&c.symbol, &c.mass).into_iter().map(move |p| (i, p, watson_preimage_symbols(&c.symbol, p)))
            })
            .collect();
        let mut jobs: Vec<(usize, u64, GenusSymbol)> = Vec::new();
        for (i, p, syms) in tasks {
            for s in syms {
                if seen.insert(s.key()) {
                    jobs.push((i, p, s));
                }
            }
        }
        let results: Vec<Result<Option<ClassifiedGenus>>> = jobs
            .par_iter()
            .map(|(i, p, s)| {
                if s.dim() != n || !mass(s)?.satisfies_mass_condition() {
                    return Ok(None);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(symbol_seed(seed, s));
                let parent = &frontier[*i].representative;
                let l = realize_preimage(parent, *p, s, REALIZE_ATTEMPTS, &mut rng).ok_or_else(|| {
                    Error::Construction(format!("no sublattice of {} realises the preimage {s} at p={p}", frontier[*i].symbol))
                })?;
                certify(&l)
            })
            .collect();
        let mut next = Vec::new();
        for r in results {
            if let Some(c) = r? {
                next.push(c);
            }
        }
        next.sort_by_key(|c| c.sort_key());
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort_by_key(|c| c.sort_key());
    Ok(out)
}

/// Annotation μ^{*N}_{m1,m2} in the plain form `μ_{m1,m2}^{*N}`; trivial
/// parts are omitted.
pub fn annotation(mu: &BigInt, n: usize, m1: usize, m2: usize) -> String {
    let mut s = mu.to_string();
    if m1 != 0 || m2 != 0 {
        s.push_str(&format!("_{{{m1},{m2}}}"));
    }
    if n > 1 {
        s.push_str(&format!("^{{*{n}}}"));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualFamily {
    pub id: usize,
    /// Indices into the classified list; the first is the representative.
    pub members: Vec<usize>,
    pub m1: usize,
    pub m2: usize,
    pub annotation: String,
}

/// Groups sorted results into families of rescaled partial duals and fills
/// in `family_id` and `family_annotation`.
pub fn group_families(results: &mut [ClassifiedGenus]) -> Result<Vec<DualFamily>> {
    let index: HashMap<SymbolKey, usize> = results.iter().enumerate().map(|(i, c)| (c.symbol.key(), i)).collect();
    let mut parent: Vec<usize> = (0..results.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..results.len() {
        let c = &results[i];
        for p in prime_divisors(c.det()) {
            let dual = c.representative.partial_dual(p);
            let key = symbol_raw(&dual).key();
            let j = *index.get(&key).ok_or_else(|| {
                Error::Construction(format!("partial dual of {} at {p} is not in the list", c.symbol))
            })?;
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            // keep the smaller index as root: results are sorted by (det, symbol)
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..results.len() {
        groups.entry(find(&mut parent, i)).or_default().push(i);
    }
    let mut fams = Vec::new();
    for (id, (_, members)) in groups.into_iter().enumerate() {
        let m1 = members.iter().filter(|&&i| results[i].maximal).count();
        let m2 = members.iter().filter(|&&i| results[i].qf_maximal).count();
        let ann = annotation(&results[members[0]].aut_order, members.len(), m1, m2);
        for &i in &members {
            results[i].family_id = id;
            results[i].family_annotation = ann.clone();
        }
        fams.push(DualFamily { id, members, m1, m2, annotation: ann });
    }
    Ok(fams)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub dim: u32,
    pub total: usize,
    pub maximal: usize,
    pub qf_maximal: usize,
    pub max_prime: u64,
    pub max_det: u128,
}

pub fn summary_statistics(n: u32, results: &[ClassifiedGenus]) -> Summary {
    Summary {
        dim: n,
        total: results.len(),
        maximal: results.iter().filter(|c| c.maximal).count(),
        qf_maximal: results.iter().filter(|c| c.qf_maximal).count(),
        max_prime: results.iter().flat_map(|c| prime_divisors(c.det())).max().unwrap_or(1),
        max_det: results.iter().map(|c| c.det()).max().unwrap_or(1),
    }
}

/// Full classification in dimension n (or only the square-free part).
pub fn classify(n: u32, squarefree_only: bool, seed: u64) -> Result<Vec<ClassifiedGenus>> {
    if !(3..=10).contains(&n) {
        return Err(Error::Input(format!("dimension {n} is outside 3..=10")));
    }
    let sqf = classify_squarefree(n, seed)?;
    let mut all = if squarefree_only { sqf } else { classify_all(n, sqf, seed)? };
    group_families(&mut all)?;
    Ok(all)
}

// ---------------------------------------------------------------------------
// Catalogue file

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub dim: u32,
    pub symbol: String,
    pub gram: Vec<i64>,
    pub mass_num: u64,
    pub mass_den: u64,
    pub aut_order: u64,
    pub maximal: bool,
    pub qf_maximal: bool,
    pub family_id: usize,
    pub family_annotation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalogue {
    pub version: u32,
    pub dim: u32,
    pub records: Vec<Record>,
}

impl Catalogue {
    pub fn new(n: u32, results: &[ClassifiedGenus]) -> Result<Self> {
        let too_big = || Error::Input("value does not fit in 64 bits".into());
        let records = results
            .iter()
            .map(|c| {
                Ok(Record {
                    dim: n,
                    symbol: c.symbol.display_form().to_string(),
                    gram: c.representative.entries().to_vec(),
                    mass_num: c.mass.numer().to_u64().ok_or_else(too_big)?,
                    mass_den: c.mass.denom().to_u64().ok_or_else(too_big)?,
                    aut_order: c.aut_order.to_u64().ok_or_else(too_big)?,
                    maximal: c.maximal,
                    qf_maximal: c.qf_maximal,
                    family_id: c.family_id,
                    family_annotation: c.family_annotation.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Catalogue { version: CATALOGUE_VERSION, dim: n, records })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genus::parse_symbol;

    #[test]
    fn certify_known() {
        let c = certify(&GramLattice::e8()).unwrap().unwrap();
        assert_eq!(c.aut_order, BigInt::from(696729600u64));
        assert!(c.maximal && c.qf_maximal);
        assert!(certify(&GramLattice::identity(9)).unwrap().is_none());
    }

    #[test]
    fn annotations() {
        assert_eq!(annotation(&BigInt::from(8360755200u64), 2, 1, 1), "8360755200_{1,1}^{*2}");
        assert_eq!(annotation(&BigInt::from(11612160), 2, 0, 0), "11612160^{*2}");
        assert_eq!(annotation(&BigInt::from(384), 1, 1, 0), "384_{1,0}");
    }

    #[test]
    fn descent_primes_include_det() {
        let s = parse_symbol("II_{10,0}(3^{-1})").unwrap();
        let p = descent_primes(&s, &mass(&s).unwrap());
        assert!(p.starts_with(&[2, 3]));
    }

    #[test]
    fn dim10_squarefree() {
        let c = enumerate_squarefree_candidates(10).unwrap();
        assert!(c.contains(&parse_symbol("II_{10,0}(3^{-1})").unwrap()));
        let s = classify_squarefree(10, 0).unwrap();
        let names: Vec<String> = s.iter().map(|c| c.symbol.to_string()).collect();
        assert!(names.contains(&"II_{10,0}(3^{-1})".to_string()), "{names:?}");
    }
}
