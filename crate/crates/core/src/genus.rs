//! Conway–Sloane genus symbols.
//!
//! A symbol stores, for every prime dividing 2·det, one Jordan decomposition's
//! worth of constituent data. At p = 2 the same genus admits several such
//! lists; equality is decided on the canonical form obtained by oddity fusion
//! and sign walking (Conway–Sloane, SPLAG ch. 15, §7.5).
//!
//! Oddities are stored as the oddity of the unimodular constituent itself.
//! The printed subscript differs by 4 for odd-scale constituents with ε = −1.

use crate::arith::{self, hilbert_symbol, kronecker2, legendre, mod_i};
use crate::error::{Error, Result};
use crate::lattice::GramLattice;
use crate::padic::jordan_decompose;
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constituent {
    pub scale: u32,
    pub rank: u32,
    pub eps: i8,
    /// Type I (odd) at p = 2; always false at odd primes.
    pub odd: bool,
    /// Oddity mod 8 of an odd 2-adic constituent; 0 otherwise.
    pub oddity: u8,
}

impl Constituent {
    pub fn new(scale: u32, rank: u32, eps: i8) -> Self {
        Constituent { scale, rank, eps, odd: false, oddity: 0 }
    }

    pub fn new2(scale: u32, rank: u32, eps: i8, odd: bool, oddity: u8) -> Self {
        Constituent { scale, rank, eps, odd, oddity: if odd { oddity % 8 } else { 0 } }
    }

    /// Subscript as it appears in printed symbols.
    pub fn printed_oddity(&self) -> u8 {
        (self.oddity + if self.scale % 2 == 1 && self.eps == -1 { 4 } else { 0 }) % 8
    }

    /// Existence of a unimodular Z_2-lattice with this rank, sign, type and oddity.
    pub fn is_valid_2adic(&self) -> bool {
        let (r, e, t) = (self.rank, self.eps, self.oddity);
        if r == 0 {
            return false;
        }
        if !self.odd {
            return r % 2 == 0 && t == 0;
        }
        if t as u32 % 2 != r % 2 {
            return false;
        }
        match r {
            1 => {
                if e == 1 {
                    t == 1 || t == 7
                } else {
                    t == 3 || t == 5
                }
            }
            2 => {
                if e == 1 {
                    t == 0 || t == 2 || t == 6
                } else {
                    t == 2 || t == 4 || t == 6
                }
            }
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalSymbol {
    pub p: u64,
    /// Constituents of positive rank, strictly increasing scales.
    pub parts: Vec<Constituent>,
}

impl LocalSymbol {
    pub fn rank(&self) -> u32 {
        self.parts.iter().map(|c| c.rank).sum()
    }

    /// Exponent of p in the determinant.
    pub fn det_exponent(&self) -> u32 {
        self.parts.iter().map(|c| c.scale * c.rank).sum()
    }

    pub fn len(&self) -> u32 {
        match (self.parts.first(), self.parts.last()) {
            (Some(a), Some(b)) => b.scale - a.scale + 1,
            _ => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn min_scale(&self) -> u32 {
        self.parts.first().map_or(0, |c| c.scale)
    }

    pub fn rank_at(&self, scale: u32) -> u32 {
        self.parts.iter().find(|c| c.scale == scale).map_or(0, |c| c.rank)
    }

    pub fn part_at(&self, scale: u32) -> Option<&Constituent> {
        self.parts.iter().find(|c| c.scale == scale)
    }

    /// Trivial: a single unimodular constituent.
    pub fn is_trivial(&self) -> bool {
        self.parts.len() == 1 && self.parts[0].scale == 0
    }

    pub fn is_squarefree(&self) -> bool {
        self.parts.iter().all(|c| c.scale <= 1)
    }

    /// Shift all scales down by k (k ≤ min scale).
    pub fn shift_down(&mut self, k: u32) {
        for c in self.parts.iter_mut() {
            c.scale -= k;
        }
    }

    /// Multiply the form by a p-adic unit c.
    pub fn twist(&mut self, c: i128) {
        let p = self.p;
        for x in self.parts.iter_mut() {
            if p == 2 {
                if x.rank % 2 == 1 && kronecker2(c) == -1 {
                    x.eps = -x.eps;
                }
                if x.odd {
                    x.oddity = mod_i(x.oddity as i128 * c, 8) as u8;
                }
            } else if x.rank % 2 == 1 && legendre(c, p) == -1 {
                x.eps = -x.eps;
            }
        }
    }

    /// Canonical constituent list (identity for odd p).
    pub fn canonical(&self) -> Vec<Constituent> {
        if self.p == 2 {
            canonical_2adic(&self.parts)
        } else {
            self.parts.clone()
        }
    }

    /// The p-excess (odd p), used in the oddity formula.
    pub fn excess(&self) -> i64 {
        let p = self.p as i64;
        let mut e = 0;
        for c in &self.parts {
            let q = p.pow(c.scale) % 8;
            e += c.rank as i64 * (q - 1) + if c.scale % 2 == 1 && c.eps == -1 { 4 } else { 0 };
        }
        e.rem_euclid(8)
    }
}

/// Maximal runs of odd constituents with consecutive scales (indices).
pub fn compartments(s: &[Constituent]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < s.len() {
        if s[i].odd {
            let mut v = s[i].scale;
            let mut c = Vec::new();
            while i < s.len() && s[i].odd && s[i].scale == v {
                c.push(i);
                i += 1;
                v += 1;
            }
            out.push(c);
        } else {
            i += 1;
        }
    }
    out
}

/// Maximal intervals in which every adjacent pair of scales (including empty
/// constituents) has at least one odd member.
pub fn trains(s: &[Constituent]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if s.is_empty() {
        return out;
    }
    let mut cur = vec![0];
    for i in 1..s.len() {
        let (prev, c) = (&s[i - 1], &s[i]);
        let gap = c.scale - prev.scale;
        let joined = match gap {
            1 => prev.odd || c.odd,
            2 => prev.odd && c.odd,
            _ => false,
        };
        if joined {
            cur.push(i);
        } else {
            out.push(std::mem::take(&mut cur));
            cur.push(i);
        }
    }
    out.push(cur);
    out
}

/// Canonical representative: total oddity of each compartment on its first
/// constituent, minus signs walked to the start of each train.
pub fn canonical_2adic(parts: &[Constituent]) -> Vec<Constituent> {
    let mut s = parts.to_vec();
    let comps = compartments(&s);
    for cp in &comps {
        let o = cp.iter().map(|&i| s[i].oddity as u32).sum::<u32>() % 8;
        for &i in cp {
            s[i].oddity = 0;
        }
        s[cp[0]].oddity = o as u8;
    }
    for tr in trains(&s) {
        for k in (1..tr.len()).rev() {
            let t1 = tr[k];
            if s[t1].eps == -1 {
                s[t1].eps = 1;
                s[t1 - 1].eps = -s[t1 - 1].eps;
                for cp in &comps {
                    if cp.contains(&(t1 - 1)) || cp.contains(&t1) {
                        s[cp[0]].oddity = (s[cp[0]].oddity + 4) % 8;
                    }
                }
            }
        }
    }
    s
}

/// All valid 2-adic constituent lists equivalent to `parts`.
pub fn two_adic_class(parts: &[Constituent]) -> Vec<Vec<Constituent>> {
    let target = canonical_2adic(parts);
    let opts: Vec<Vec<Constituent>> = parts
        .iter()
        .map(|c| {
            let mut o = Vec::new();
            for eps in [1i8, -1] {
                if !c.odd {
                    o.push(Constituent::new2(c.scale, c.rank, eps, false, 0));
                } else {
                    for t in 0..8 {
                        let cc = Constituent::new2(c.scale, c.rank, eps, true, t);
                        if cc.is_valid_2adic() {
                            o.push(cc);
                        }
                    }
                }
            }
            o
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts.len());
    fn rec(i: usize, opts: &[Vec<Constituent>], cur: &mut Vec<Constituent>, target: &[Constituent], out: &mut Vec<Vec<Constituent>>) {
        if i == opts.len() {
            if canonical_2adic(cur) == target {
                out.push(cur.clone());
            }
            return;
        }
        for c in &opts[i] {
            cur.push(*c);
            rec(i + 1, opts, cur, target, out);
            cur.pop();
        }
    }
    rec(0, &opts, &mut cur, &target, &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct GenusSymbol {
    n: u32,
    /// locals[0] is the 2-adic symbol; odd primes dividing det follow in
    /// increasing order.
    locals: Vec<LocalSymbol>,
}

/// Canonical comparison key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolKey(u32, Vec<(u64, Vec<Constituent>)>);

impl PartialEq for GenusSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for GenusSymbol {}

impl Hash for GenusSymbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

impl PartialOrd for GenusSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered by determinant, then printed form, then canonical key.
impl Ord for GenusSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.det()
            .cmp(&other.det())
            .then_with(|| self.display_form().to_string().cmp(&other.display_form().to_string()))
            .then_with(|| self.key().cmp(&other.key()))
    }
}

impl fmt::Display for GenusSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_symbol(self))
    }
}

/// Rational-space data: dimension, squarefree determinant class, and the
/// primes with Hasse invariant −1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceInvariants {
    pub n: u32,
    pub det_class: i128,
    pub hasse_minus: Vec<u64>,
}

impl GenusSymbol {
    /// Builds a symbol from local data, normalising order and dropping
    /// trivial odd-prime entries.
    pub fn from_locals(n: u32, mut locals: Vec<LocalSymbol>) -> Self {
        locals.sort_by_key(|l| l.p);
        if locals.first().map(|l| l.p) != Some(2) {
            locals.insert(0, LocalSymbol { p: 2, parts: vec![Constituent::new2(0, n, 1, true, (n % 8) as u8)] });
        }
        locals.retain(|l| l.p == 2 || !l.is_trivial());
        GenusSymbol { n, locals }
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn locals(&self) -> &[LocalSymbol] {
        &self.locals
    }

    pub fn local(&self, p: u64) -> Option<&LocalSymbol> {
        self.locals.iter().find(|l| l.p == p)
    }

    /// Local symbol at p, trivial if p ∤ 2·det.
    pub fn local_or_trivial(&self, p: u64) -> LocalSymbol {
        self.local(p).cloned().unwrap_or_else(|| LocalSymbol {
            p,
            parts: vec![Constituent::new(0, self.n, legendre(self.det() as i128, p))],
        })
    }

    pub fn two_adic(&self) -> &LocalSymbol {
        &self.locals[0]
    }

    pub fn det(&self) -> u128 {
        self.locals.iter().map(|l| (l.p as u128).pow(l.det_exponent())).product()
    }

    /// Primes dividing 2·det, ascending.
    pub fn primes(&self) -> Vec<u64> {
        self.locals.iter().filter(|l| l.p == 2 || l.det_exponent() > 0).map(|l| l.p).collect()
    }

    pub fn is_even(&self) -> bool {
        self.two_adic().part_at(0).is_some_and(|c| !c.odd)
    }

    pub fn is_primitive(&self) -> bool {
        self.locals.iter().all(|l| l.min_scale() == 0)
    }

    pub fn is_squarefree(&self) -> bool {
        self.locals.iter().all(|l| l.is_squarefree())
    }

    pub fn key(&self) -> SymbolKey {
        SymbolKey(self.n, self.locals.iter().filter(|l| l.p == 2 || !l.is_trivial()).map(|l| (l.p, l.canonical())).collect())
    }

    /// Replace the local symbol at p (or insert it).
    pub fn with_local(&self, loc: LocalSymbol) -> GenusSymbol {
        let mut locals: Vec<LocalSymbol> = self.locals.iter().filter(|l| l.p != loc.p).cloned().collect();
        locals.push(loc);
        GenusSymbol::from_locals(self.n, locals)
    }

    /// Existence of a positive definite lattice with these invariants.
    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSymbol(m));
        let det = self.det();
        if self.locals[0].p != 2 {
            return bad("missing 2-adic data".into());
        }
        for l in &self.locals {
            if l.rank() != self.n {
                return bad(format!("ranks at p={} sum to {} instead of {}", l.p, l.rank(), self.n));
            }
            for w in l.parts.windows(2) {
                if w[0].scale >= w[1].scale {
                    return bad(format!("scales at p={} not increasing", l.p));
                }
            }
            if l.parts.iter().any(|c| c.rank == 0 || (c.eps != 1 && c.eps != -1)) {
                return bad(format!("malformed constituent at p={}", l.p));
            }
            let unit = det / (l.p as u128).pow(l.det_exponent());
            let prod: i8 = l.parts.iter().map(|c| c.eps).product();
            let expect = if l.p == 2 { kronecker2(unit as i128) } else { legendre(unit as i128, l.p) };
            if prod != expect {
                return bad(format!("determinant inconsistent at p={}", l.p));
            }
            if l.p == 2 {
                if let Some(c) = l.parts.iter().find(|c| !c.is_valid_2adic()) {
                    return bad(format!("2-adic constituent at scale {} does not exist", c.scale));
                }
            } else if l.parts.iter().any(|c| c.odd) {
                return bad("type data at odd prime".into());
            }
        }
        for p in arith::prime_divisors(det) {
            if self.local(p).is_none() {
                return bad(format!("missing local data at p={p}"));
            }
        }
        // oddity formula
        let two = self.two_adic();
        let lhs: i64 = two.parts.iter().map(|c| c.oddity as i64 + if c.scale % 2 == 1 && c.eps == -1 { 4 } else { 0 }).sum();
        let rhs: i64 = self.n as i64 + self.locals[1..].iter().map(|l| l.excess()).sum::<i64>();
        if (lhs - rhs).rem_euclid(8) != 0 {
            return bad("oddity formula violated".into());
        }
        Ok(())
    }

    /// Symbol of the primitive rescaling of any lattice in the genus.
    pub fn rescale(&self) -> GenusSymbol {
        let mins: Vec<(u64, u32)> = self.locals.iter().map(|l| (l.p, l.min_scale())).filter(|&(_, m)| m > 0).collect();
        if mins.is_empty() {
            return self.clone();
        }
        let locals = self
            .locals
            .iter()
            .map(|l| {
                let mut l = l.clone();
                let modulus = 8 * l.p as i128;
                let mut c: i128 = 1;
                for &(p, m) in &mins {
                    if p == l.p {
                        l.shift_down(m);
                    } else {
                        for _ in 0..m {
                            c = c * p as i128 % modulus;
                        }
                    }
                }
                l.twist(c);
                l
            })
            .collect();
        GenusSymbol::from_locals(self.n, locals)
    }

    pub fn space_invariants(&self) -> SpaceInvariants {
        let mut minus = Vec::new();
        for l in &self.locals {
            let diag = diagonal_model(l);
            let mut c: i8 = 1;
            for i in 0..diag.len() {
                for j in i + 1..diag.len() {
                    c *= hilbert_symbol(diag[i], diag[j], l.p);
                }
            }
            if c == -1 {
                minus.push(l.p);
            }
        }
        SpaceInvariants { n: self.n, det_class: arith::squarefree_part(self.det() as i128), hasse_minus: minus }
    }

    /// Same genus, with the 2-adic data replaced by the representative whose
    /// printed form is lexicographically smallest.
    pub fn display_form(&self) -> GenusSymbol {
        let two = self.two_adic();
        if two.parts.len() <= 1 {
            return self.clone();
        }
        let best = two_adic_class(&two.parts)
            .into_iter()
            .min_by_key(|parts| print_parts(2, parts))
            .expect("class contains the symbol itself");
        let mut s = self.clone();
        s.locals[0].parts = best;
        s
    }
}

/// A Q_p-diagonal form (integer representatives) realising a local symbol.
pub fn diagonal_model(l: &LocalSymbol) -> Vec<i128> {
    let p = l.p as i128;
    let mut out = Vec::new();
    for c in &l.parts {
        let q = p.pow(c.scale);
        if l.p != 2 {
            let nonres = (2..).find(|&u| legendre(u, l.p) == -1).unwrap();
            for _ in 1..c.rank {
                out.push(q);
            }
            out.push(q * if c.eps == 1 { 1 } else { nonres });
        } else if !c.odd {
            let k = c.rank / 2;
            let mut planes = k;
            if c.eps == -1 {
                out.extend([2 * q, 6 * q]);
                planes -= 1;
            }
            for _ in 0..planes {
                out.extend([q, -q]);
            }
        } else {
            for u in odd_units(c) {
                out.push(q * u);
            }
        }
    }
    out
}

/// Units in {1,3,5,7} with the constituent's sign and oddity.
fn odd_units(c: &Constituent) -> Vec<i128> {
    let r = c.rank as usize;
    let free = r.min(3);
    let units = [1i128, 3, 5, 7];
    let mut idx = vec![0usize; free];
    loop {
        let mut v = vec![1i128; r - free];
        v.extend(idx.iter().map(|&i| units[i]));
        let s: i128 = v.iter().sum();
        let prod = v.iter().fold(1i128, |a, &b| a * b % 8);
        if mod_i(s, 8) == c.oddity as i128 && kronecker2(prod) == c.eps {
            return v;
        }
        let mut k = 0;
        loop {
            if k == free {
                panic!("no diagonal model for constituent {c:?}");
            }
            idx[k] += 1;
            if idx[k] < 4 {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Genus symbol of an integral lattice (2-adic data as computed).
pub fn symbol_raw(l: &GramLattice) -> GenusSymbol {
    let det = l.det_u128();
    let n = l.dim() as u32;
    let locals = arith::prime_divisors(2 * det)
        .into_iter()
        .map(|p| {
            let j = jordan_decompose(l, p);
            let parts = j
                .blocks
                .iter()
                .map(|b| {
                    if p == 2 {
                        Constituent::new2(b.scale, b.rank as u32, b.eps, b.odd, b.oddity)
                    } else {
                        Constituent::new(b.scale, b.rank as u32, b.eps)
                    }
                })
                .collect();
            LocalSymbol { p, parts }
        })
        .collect();
    GenusSymbol::from_locals(n, locals)
}

/// Genus symbol of an integral lattice, in display form.
pub fn symbol_from_lattice(l: &GramLattice) -> GenusSymbol {
    symbol_raw(l).display_form()
}

pub fn canonicalize_2adic(s: &GenusSymbol) -> GenusSymbol {
    let mut c = s.clone();
    c.locals[0].parts = canonical_2adic(&s.locals[0].parts);
    c
}

/// All valid local symbols at p with scales in {0,1} and a nonzero scale-0
/// part. At odd p only nontrivial ones; at p = 2 all of them.
pub fn enumerate_squarefree_local(p: u64, n: u32) -> Vec<LocalSymbol> {
    let mut out = Vec::new();
    if p != 2 {
        for r1 in 1..n {
            for e0 in [1i8, -1] {
                for e1 in [1i8, -1] {
                    out.push(LocalSymbol { p, parts: vec![Constituent::new(0, n - r1, e0), Constituent::new(1, r1, e1)] });
                }
            }
        }
        return out;
    }
    let options = |scale: u32, r: u32| -> Vec<Constituent> {
        let mut o = Vec::new();
        for eps in [1i8, -1] {
            if r % 2 == 0 {
                o.push(Constituent::new2(scale, r, eps, false, 0));
            }
            for t in 0..8 {
                let c = Constituent::new2(scale, r, eps, true, t);
                if c.is_valid_2adic() {
                    o.push(c);
                }
            }
        }
        o
    };
    for r1 in 0..n {
        let r0 = n - r1;
        for c0 in options(0, r0) {
            if r1 == 0 {
                out.push(LocalSymbol { p, parts: vec![c0] });
                continue;
            }
            for c1 in options(1, r1) {
                out.push(LocalSymbol { p, parts: vec![c0, c1] });
            }
        }
    }
    // keep one representative per equivalence class
    let mut seen = std::collections::HashSet::new();
    out.retain(|l| seen.insert(canonical_2adic(&l.parts)));
    out
}

// ---------------------------------------------------------------------------
// Text form

fn print_parts(p: u64, parts: &[Constituent]) -> String {
    let mut s = String::new();
    for c in parts.iter().filter(|c| c.scale > 0) {
        s.push_str(&(p as u128).pow(c.scale).to_string());
        if p == 2 && c.odd {
            s.push('_');
            s.push_str(&c.printed_oddity().to_string());
        }
        s.push_str(&format!("^{{{}{}}}", if c.eps == 1 { '+' } else { '-' }, c.rank));
    }
    s
}

/// Printed form, e.g. `II_{9,0}(2_1^{+1})` or `I_{6,0}(2_1^{+1} × 3^{-2})`.
pub fn print_symbol(s: &GenusSymbol) -> String {
    let prefix = if s.is_even() { "II" } else { "I" };
    let parts: Vec<String> = s.locals.iter().map(|l| print_parts(l.p, &l.parts)).filter(|x| !x.is_empty()).collect();
    if parts.is_empty() {
        format!("{prefix}_{{{},0}}", s.n)
    } else {
        format!("{prefix}_{{{},0}}({})", s.n, parts.join(" × "))
    }
}

/// Accepts the printed form, the LaTeX form used in the tables
/// (`^{{-}1}`, `{\times}`), optional braces around oddities and optional `$`.
pub fn parse_symbol(text: &str) -> Result<GenusSymbol> {
    let norm = text
        .replace("{{-}", "{-")
        .replace("{{+}", "{+")
        .replace("{\\times}", "×")
        .replace("\\times", "×")
        .replace("\\text{II}", "II")
        .replace("\\text{I}", "I")
        .replace("\\mathrm{II}", "II")
        .replace("\\mathrm{I}", "I")
        .replace('$', "");
    let chars: Vec<char> = norm.chars().collect();
    let mut pos = 0usize;
    let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.to_string() };
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    let expect = |pos: &mut usize, lit: &str| -> Result<()> {
        for ch in lit.chars() {
            if *pos >= chars.len() || chars[*pos] != ch {
                return Err(err(*pos, &format!("expected {lit:?}")));
            }
            *pos += 1;
        }
        Ok(())
    };
    let number = |pos: &mut usize| -> Result<u128> {
        let start = *pos;
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Err(err(start, "expected a number"));
        }
        chars[start..*pos].iter().collect::<String>().parse::<u128>().map_err(|_| err(start, "number too large"))
    };

    skip_ws(&mut pos);
    let even = if chars[pos..].starts_with(&['I', 'I']) {
        pos += 2;
        true
    } else if chars.get(pos) == Some(&'I') {
        pos += 1;
        false
    } else {
        return Err(err(pos, "expected I or II"));
    };
    expect(&mut pos, "_{")?;
    let n = number(&mut pos)? as u32;
    expect(&mut pos, ",0}")?;
    if n == 0 {
        return Err(err(pos, "dimension must be positive"));
    }
    // (p, scale, rank, eps, printed oddity)
    let mut raw: Vec<(u64, u32, u32, i8, Option<u8>, usize)> = Vec::new();
    skip_ws(&mut pos);
    if pos < chars.len() {
        expect(&mut pos, "(")?;
        loop {
            skip_ws(&mut pos);
            if pos < chars.len() && chars[pos] == ')' {
                pos += 1;
                break;
            }
            if pos < chars.len() && chars[pos] == '×' {
                pos += 1;
                continue;
            }
            let start = pos;
            let q = number(&mut pos)?;
            let f = arith::factor(q);
            if f.len() != 1 {
                return Err(err(start, "constituent base must be a prime power"));
            }
            let (p, scale) = f[0];
            let mut odd = None;
            if pos < chars.len() && chars[pos] == '_' {
                pos += 1;
                let braced = chars.get(pos) == Some(&'{');
                if braced {
                    pos += 1;
                }
                let o = number(&mut pos)?;
                if braced {
                    expect(&mut pos, "}")?;
                }
                if o >= 8 {
                    return Err(err(pos, "oddity must be below 8"));
                }
                odd = Some(o as u8);
            }
            expect(&mut pos, "^{")?;
            let eps = match chars.get(pos) {
                Some('+') => 1,
                Some('-') => -1,
                _ => return Err(err(pos, "expected sign")),
            };
            pos += 1;
            let r = number(&mut pos)? as u32;
            expect(&mut pos, "}")?;
            if odd.is_some() && p != 2 {
                return Err(err(start, "oddity given at odd prime"));
            }
            raw.push((p, scale, r, eps, odd, start));
        }
        skip_ws(&mut pos);
        if pos != chars.len() {
            return Err(err(pos, "trailing input"));
        }
    }

    let mut primes: Vec<u64> = raw.iter().map(|x| x.0).collect();
    primes.push(2);
    primes.sort();
    primes.dedup();
    let mut det: u128 = 1;
    for x in &raw {
        det *= (x.0 as u128).pow(x.1 * x.2);
    }
    let mut locals = Vec::new();
    let mut excess = 0i64;
    for &p in primes.iter().filter(|&&p| p != 2) {
        let mut parts: Vec<Constituent> =
            raw.iter().filter(|x| x.0 == p).map(|x| Constituent::new(x.1, x.2, x.3)).collect();
        let (r0, e0) = scale0(n, det, p, &parts).map_err(|m| err(0, &m))?;
        parts.insert(0, Constituent::new(0, r0, e0));
        let l = LocalSymbol { p, parts };
        excess += l.excess();
        locals.push(l);
    }
    let mut parts: Vec<Constituent> = raw
        .iter()
        .filter(|x| x.0 == 2)
        .map(|x| match x.4 {
            Some(o) => {
                let t = (o + if x.1 % 2 == 1 && x.3 == -1 { 4 } else { 0 }) % 8;
                Constituent::new2(x.1, x.2, x.3, true, t)
            }
            None => Constituent::new2(x.1, x.2, x.3, false, 0),
        })
        .collect();
    let (r0, e0) = scale0(n, det, 2, &parts).map_err(|m| err(0, &m))?;
    let printed_total: i64 = parts.iter().map(|c| if c.odd { c.printed_oddity() as i64 } else if c.scale % 2 == 1 && c.eps == -1 { 4 } else { 0 }).sum();
    let t0 = (n as i64 + excess - printed_total).rem_euclid(8) as u8;
    if even && t0 != 0 {
        return Err(Error::InvalidSymbol("oddity formula violated".into()));
    }
    parts.insert(0, Constituent::new2(0, r0, e0, !even, t0));
    locals.insert(0, LocalSymbol { p: 2, parts });
    for l in &locals {
        for w in l.parts.windows(2) {
            if w[0].scale >= w[1].scale {
                return Err(err(0, &format!("constituents at p={} must have increasing scales", l.p)));
            }
        }
    }
    let s = GenusSymbol::from_locals(n, locals);
    s.validate()?;
    Ok(s)
}

/// Rank and sign of the omitted scale-0 constituent.
fn scale0(n: u32, det: u128, p: u64, parts: &[Constituent]) -> std::result::Result<(u32, i8), String> {
    let used: u32 = parts.iter().map(|c| c.rank).sum();
    if used >= n {
        return Err(format!("no room for a unimodular constituent at p={p} (symbol not primitive)"));
    }
    let e: u32 = parts.iter().map(|c| c.scale * c.rank).sum();
    let unit = (det / (p as u128).pow(e)) as i128;
    let mut e0 = if p == 2 { kronecker2(unit) } else { legendre(unit, p) };
    for c in parts {
        e0 *= c.eps;
    }
    Ok((n - used, e0))
}
