//! Smith–Minkowski–Siegel masses and the bounds derived from them.
//!
//! Exact values are assembled as a rational square times a power of π, so
//! the half-integral powers of π and the square roots coming from Γ(j/2),
//! L-values and the cross terms p^{ct/2} cancel exactly at the end.
//! The pruning bounds use outward-rounded f64 intervals.

use crate::arith::{self, bernoulli, binomial, factorial, kronecker, kronecker_symbol, rint, to_f64};
use crate::error::{Error, Result};
use crate::genus::{enumerate_squarefree_local, Constituent, GenusSymbol, LocalSymbol};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// An exact positive rational mass.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactMass(pub BigRational);

impl ExactMass {
    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// mass ≤ 1/2 and 1/mass an even integer.
    pub fn satisfies_mass_condition(&self) -> bool {
        mass_condition_value(&self.0)
    }
}

impl fmt::Display for ExactMass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

pub fn mass_condition_value(m: &BigRational) -> bool {
    let two = BigInt::from(2);
    m.is_positive() && m.numer().is_one() && (m.denom() % &two).is_zero()
}

/// A positive real number whose square is rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootRational {
    pub square: BigRational,
}

impl RootRational {
    pub fn one() -> Self {
        RootRational { square: BigRational::one() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        assert!(r.is_positive());
        RootRational { square: r * r }
    }

    /// The value, if rational.
    pub fn to_rational(&self) -> Option<BigRational> {
        let n = exact_sqrt(self.square.numer())?;
        let d = exact_sqrt(self.square.denom())?;
        Some(BigRational::new(n, d))
    }

    pub fn enclosure(&self) -> Interval {
        Interval::from_rational(&self.square).sqrt()
    }
}

impl std::ops::Mul for &RootRational {
    type Output = RootRational;
    fn mul(self, o: &RootRational) -> RootRational {
        RootRational { square: &self.square * &o.square }
    }
}

impl PartialOrd for RootRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RootRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.square.cmp(&other.square)
    }
}

impl fmt::Display for RootRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_rational() {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "sqrt({})", self.square),
        }
    }
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// value² = square · π^pi_exp
#[derive(Clone, Debug)]
struct PiPower {
    square: BigRational,
    pi_exp: i64,
}

impl PiPower {
    fn new() -> Self {
        PiPower { square: BigRational::one(), pi_exp: 0 }
    }

    fn mul_rational(&mut self, r: &BigRational) {
        self.square *= r * r;
    }

    /// Γ(j/2)
    fn mul_gamma_half(&mut self, j: u32) {
        if j % 2 == 0 {
            self.mul_rational(&rint(factorial(j / 2 - 1)));
        } else {
            let m = (j - 1) / 2;
            let c = BigRational::new(factorial(2 * m), BigInt::from(4).pow(m) * factorial(m));
            self.mul_rational(&c);
            self.pi_exp += 1;
        }
    }

    /// ζ(2k) = |B_2k| (2π)^2k / (2 (2k)!)
    fn mul_zeta_even(&mut self, k: u32) {
        let b = bernoulli(2 * k).abs();
        let c = b * rint(BigInt::from(2).pow(2 * k)) / rint(BigInt::from(2) * factorial(2 * k));
        self.mul_rational(&c);
        self.pi_exp += 4 * k as i64;
    }

    fn enclosure(&self) -> Interval {
        Interval::from_rational(&self.square).sqrt() * Interval::pi().sqrt().powi_signed(self.pi_exp as i32)
    }
}

/// Generalized Bernoulli number B_{k,χ} for χ = (f/·), F = |f|.
fn generalized_bernoulli(k: u32, f: i128) -> BigRational {
    let big_f = f.unsigned_abs();
    // power sums S_m = Σ_{a=1}^{F} χ(a) a^m, m = 0..k
    let mut acc = vec![0i128; k as usize + 1];
    let mut big = vec![BigInt::zero(); k as usize + 1];
    for a in 1..=big_f {
        let chi = kronecker_symbol(f, a);
        if chi == 0 {
            continue;
        }
        let mut pw: Option<i128> = Some(1);
        for m in 0..=k as usize {
            match pw.and_then(|x| x.checked_mul(chi as i128)).and_then(|t| acc[m].checked_add(t)) {
                Some(s) => acc[m] = s,
                None => {
                    let term = BigInt::from(a).pow(m as u32) * chi;
                    big[m] += term + BigInt::from(acc[m]);
                    acc[m] = 0;
                }
            }
            pw = pw.and_then(|x| x.checked_mul(a as i128));
        }
    }
    let sums: Vec<BigInt> = (0..=k as usize).map(|m| &big[m] + BigInt::from(acc[m])).collect();
    let mut b = BigRational::zero();
    let fb = BigInt::from(big_f);
    for j in 0..=k {
        let bj = bernoulli(j);
        if bj.is_zero() {
            continue;
        }
        let fpow = if j == 0 { BigRational::new(BigInt::one(), fb.clone()) } else { rint(fb.pow(j - 1)) };
        b += rint(binomial(k, j)) * bj * fpow * rint(sums[(k - j) as usize].clone());
    }
    b
}

/// std_n(D) without the factor L(s, χ_D), and χ_D's discriminant when that
/// factor is present.
fn standard_mass_base(n: u32, det: u128) -> Result<(PiPower, Option<i128>)> {
    if n < 3 {
        return Err(Error::Input("standard mass needs dimension at least 3".into()));
    }
    let s = n.div_ceil(2);
    let mut v = PiPower::new();
    v.mul_rational(&rint(2));
    v.pi_exp -= (n * (n + 1) / 2) as i64;
    for j in 1..=n {
        v.mul_gamma_half(j);
    }
    for k in 1..s {
        v.mul_zeta_even(k);
    }
    let mut chi = None;
    if n % 2 == 0 {
        let d = if s % 2 == 0 { det as i128 } else { -(det as i128) };
        let f = arith::fundamental_discriminant(d);
        if f == 1 {
            v.mul_zeta_even(s / 2);
        } else {
            chi = Some(f);
        }
        for p in arith::prime_divisors(2 * det) {
            let c = kronecker(f, p as u128);
            let e = BigRational::one() - BigRational::new(BigInt::from(c), BigInt::from(p).pow(s));
            v.mul_rational(&e);
        }
    }
    Ok((v, chi))
}

/// std_n(D) with D = (−1)^s det, s = ⌈n/2⌉.
pub fn standard_mass(n: u32, det: u128) -> Result<RootRational> {
    let s = n.div_ceil(2);
    let (mut v, chi) = standard_mass_base(n, det)?;
    if let Some(f) = chi {
        let big_f = f.unsigned_abs();
        let delta = if f > 0 { 0 } else { 1 };
        let sign = if ((s - delta) / 2) % 2 == 0 { -1 } else { 1 };
        let b = generalized_bernoulli(s, f) * rint(sign);
        assert!(b.is_positive(), "L-value must be positive");
        // L(s,χ) = √F/2 · (2π/F)^s · b / s!
        let c = b * rint(BigInt::from(2).pow(s)) / rint(BigInt::from(2) * BigInt::from(big_f).pow(s) * factorial(s));
        v.mul_rational(&c);
        v.square *= rint(BigInt::from(big_f));
        v.pi_exp += 2 * s as i64;
    }
    if v.pi_exp != 0 {
        return Err(Error::Input(format!("standard mass of dimension {n} is not algebraic")));
    }
    Ok(RootRational { square: v.square })
}

/// L(s, χ_f) for s ≥ 2 from a partial sum and the tail bound Σ_{k>K} k^{−s}.
fn l_value_enclosure(s: u32, f: i128) -> Interval {
    const K: u64 = 2000;
    let mut sum = 0.0f64;
    for k in 1..=K {
        let c = kronecker_symbol(f, k as u128);
        if c != 0 {
            sum += c as f64 * (k as f64).powi(-(s as i32));
        }
    }
    let tail = (K as f64).powf(1.0 - s as f64) / (s - 1) as f64;
    let slack = tail * 1.01 + 1e-12;
    Interval { lo: (sum - slack).max(0.0), hi: sum + slack }
}

/// Enclosure of std_n(D), avoiding the exact L-value.
pub fn standard_mass_enclosure(n: u32, det: u128) -> Result<Interval> {
    let s = n.div_ceil(2);
    let (v, chi) = standard_mass_base(n, det)?;
    let base = v.enclosure();
    Ok(match chi {
        Some(f) => base * l_value_enclosure(s, f),
        None => base,
    })
}

fn pinv(p: u64, e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p).pow(e))
}

/// Factor M(species) of one orthogonal piece.
fn species_factor(species: i64, p: u64) -> BigRational {
    if species == 0 {
        return BigRational::one();
    }
    let m = species.unsigned_abs() as u32;
    let s = m.div_ceil(2);
    let mut d = rint(2);
    for k in 1..s {
        d *= BigRational::one() - pinv(p, 2 * k);
    }
    if m % 2 == 0 {
        let e = pinv(p, s);
        d *= if species > 0 { BigRational::one() - e } else { BigRational::one() + e };
    }
    d.recip()
}

/// Species of the Jordan constituents (odd p), or of every scale including
/// empty neighbours (p = 2, SPLAG ch. 16 §7).
fn species(l: &LocalSymbol) -> Vec<i64> {
    let p = l.p;
    if p != 2 {
        return l
            .parts
            .iter()
            .map(|c| {
                let r = c.rank as i64;
                if r % 2 == 1 {
                    r
                } else {
                    let sign = arith::legendre(if (r / 2) % 2 == 0 { 1 } else { -1 }, p) as i64 * c.eps as i64;
                    r * sign
                }
            })
            .collect();
    }
    let max = l.parts.last().map_or(0, |c| c.scale);
    let empty = |s: u32| Constituent::new2(s, 0, 1, false, 0);
    let at = |s: i64| -> Constituent {
        if s < 0 {
            return empty(0);
        }
        l.part_at(s as u32).copied().unwrap_or_else(|| empty(s as u32))
    };
    let mut out = Vec::new();
    for s in -1..=max as i64 + 1 {
        let c = at(s);
        // a constituent is bound if an adjacent scale is odd
        let free = !(at(s - 1).odd || at(s + 1).odd);
        let r = c.rank as i64;
        let octane = (c.oddity as i64 + if c.eps == -1 { 4 } else { 0 }) % 8;
        let t = if !c.odd || r % 2 == 1 { r / 2 } else { r / 2 - 1 };
        let sp = if free && matches!(octane, 0 | 1 | 7) {
            2 * t
        } else if free && matches!(octane, 3 | 4 | 5) {
            -2 * t
        } else {
            2 * t + 1
        };
        out.push(sp);
    }
    out
}

/// std_p^{-1} = 2 ∏_{j=2}^{s} (1 − p^{2−2j})
fn std_p_inverse(n: u32, p: u64) -> BigRational {
    let s = n.div_ceil(2);
    let mut v = rint(2);
    for j in 2..=s {
        v *= BigRational::one() - pinv(p, 2 * j - 2);
    }
    v
}

/// m_p / std_p of a local symbol of rank n.
pub fn local_factor_of(l: &LocalSymbol) -> RootRational {
    let p = l.p;
    let n = l.rank();
    let mut m = BigRational::one();
    for sp in species(l) {
        m *= species_factor(sp, p);
    }
    let mut ct: u64 = 0;
    for (j, b) in l.parts.iter().enumerate() {
        for a in &l.parts[..j] {
            ct += ((b.scale - a.scale) * a.rank * b.rank) as u64;
        }
    }
    if p == 2 {
        let n_ii: u32 = l.parts.iter().filter(|c| !c.odd).map(|c| c.rank).sum();
        let n_i_i = l.parts.windows(2).filter(|w| w[0].odd && w[1].odd && w[0].scale + 1 == w[1].scale).count() as i64;
        let e = n_i_i - n_ii as i64;
        m *= if e >= 0 { rint(BigInt::from(2).pow(e as u32)) } else { pinv(2, (-e) as u32) };
    }
    m *= std_p_inverse(n, p);
    let mut sq = &m * &m;
    sq *= rint(BigInt::from(p).pow(ct as u32));
    RootRational { square: sq }
}

pub fn local_factor(sym: &GenusSymbol, p: u64) -> RootRational {
    local_factor_of(&sym.local_or_trivial(p))
}

/// Exact mass of a valid genus symbol.
pub fn mass(sym: &GenusSymbol) -> Result<ExactMass> {
    sym.validate()?;
    let mut v = standard_mass(sym.dim(), sym.det())?;
    for p in sym.primes() {
        v = &v * &local_factor(sym, p);
    }
    let r = v.to_rational().ok_or_else(|| Error::InvalidSymbol("mass is not rational".into()))?;
    Ok(ExactMass(r))
}

pub fn mass_condition(sym: &GenusSymbol) -> Result<bool> {
    Ok(mass(sym)?.satisfies_mass_condition())
}

// ---------------------------------------------------------------------------
// Bounds

/// Closed interval [lo, hi] of positive reals with outward rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn pi() -> Self {
        Interval { lo: std::f64::consts::PI.next_down(), hi: std::f64::consts::PI.next_up() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        let x = to_f64(r);
        // to_f64 is accurate to a few ulps
        Interval { lo: x * (1.0 - 1e-14), hi: x * (1.0 + 1e-14) }
    }

    pub fn from_u64(x: u64) -> Self {
        let f = x as f64;
        if f as u64 == x {
            Interval::point(f)
        } else {
            Interval { lo: f.next_down(), hi: f.next_up() }
        }
    }

    pub fn sqrt(self) -> Self {
        Interval { lo: self.lo.sqrt().next_down().max(0.0), hi: self.hi.sqrt().next_up() }
    }

    pub fn recip(self) -> Self {
        Interval { lo: (1.0 / self.hi).next_down(), hi: (1.0 / self.lo).next_up() }
    }

    pub fn powi(self, e: u32) -> Self {
        (0..e).fold(Interval::point(1.0), |acc, _| acc * self)
    }

    fn powi_signed(self, e: i32) -> Self {
        if e >= 0 {
            self.powi(e as u32)
        } else {
            self.powi((-e) as u32).recip()
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Decides x ≤ c, or None when the interval straddles c.
    pub fn le(&self, c: f64) -> Option<bool> {
        if self.hi <= c {
            Some(true)
        } else if self.lo > c {
            Some(false)
        } else {
            None
        }
    }

    pub fn lt(&self, c: f64) -> Option<bool> {
        if self.hi < c {
            Some(true)
        } else if self.lo >= c {
            Some(false)
        } else {
            None
        }
    }
}

impl std::ops::Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        debug_assert!(self.lo >= 0.0 && o.lo >= 0.0);
        Interval { lo: (self.lo * o.lo).next_down().max(0.0), hi: (self.hi * o.hi).next_up() }
    }
}

impl std::ops::Div for Interval {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        self * o.recip()
    }
}

impl std::ops::Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval { lo: (self.lo - o.hi).next_down(), hi: (self.hi - o.lo).next_up() }
    }
}

impl std::ops::Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval { lo: (self.lo + o.lo).next_down(), hi: (self.hi + o.hi).next_up() }
    }
}

/// ζ(k) for k ≥ 2.
pub fn zeta_enclosure(k: u32) -> Interval {
    assert!(k >= 2);
    if k % 2 == 0 {
        let mut v = PiPower::new();
        v.mul_zeta_even(k / 2);
        return v.enclosure();
    }
    // partial sum plus integral bounds on the tail
    const N: u64 = 4000;
    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    for m in (1..=N).rev() {
        let t = (m as f64).powi(-(k as i32));
        lo = (lo + t.next_down()).next_down();
        hi = (hi + t.next_up()).next_up();
    }
    let km1 = (k - 1) as f64;
    lo += ((N + 1) as f64).powf(-km1) / km1 * (1.0 - 1e-12);
    hi += (N as f64).powf(-km1) / km1 * (1.0 + 1e-12);
    Interval { lo: lo.next_down(), hi: hi.next_up() }
}

/// Lower bound s(n) for std_n(D), valid for every D.
pub fn s_lower(n: u32) -> Interval {
    assert!(n >= 3);
    if n % 2 == 1 {
        return standard_mass(n, 1).expect("odd standard mass").enclosure();
    }
    let s = n / 2;
    let mut v = PiPower::new();
    v.mul_rational(&rint(2));
    v.pi_exp -= (n * (n + 1) / 2) as i64;
    for j in 1..=n {
        v.mul_gamma_half(j);
    }
    for k in 1..=s {
        v.mul_zeta_even(k);
    }
    v.enclosure() / zeta_enclosure(s)
}

/// (p/(p+1))² (1 − p^{−2})^{s−1}
fn common_factor(n: u32, p: u64) -> Interval {
    let s = n.div_ceil(2);
    let pp = Interval::from_u64(p);
    let ratio = pp / (pp + Interval::point(1.0));
    let one_minus = Interval::point(1.0) - (pp * pp).recip();
    ratio * ratio * one_minus.powi(s - 1)
}

/// Local lower bound for m_p/std_p when p | det (before the ε factor).
pub fn local_lower_bound(n: u32, p: u64) -> Interval {
    let half = Interval::point(0.5);
    half * common_factor(n, p) * Interval::from_u64(p).sqrt().powi(n - 1)
}

/// a_n(p), including the factor ½.
pub fn a_bound(n: u32, p: u64) -> Interval {
    let s = n.div_ceil(2);
    let eps = if n % 2 == 0 {
        let z = zeta_enclosure(s);
        zeta_enclosure(2 * s) / (z * z)
    } else {
        Interval::point(1.0)
    };
    eps * local_lower_bound(n, p)
}

/// b_n(p), the factor ½ applied in both parities.
pub fn b_bound(n: u32, p: u64) -> Interval {
    let s = n.div_ceil(2);
    let eps = if n % 2 == 0 {
        let z = zeta_enclosure(s);
        zeta_enclosure(2 * s) / (z * z * Interval::point(2.0))
    } else {
        Interval::point(0.5)
    };
    eps * common_factor(n, p) * Interval::from_u64(p).powi(n - 1)
}

/// min over square-free 2-adic symbols of m_2/std_2.
pub fn t_min(n: u32) -> RootRational {
    enumerate_squarefree_local(2, n).iter().map(local_factor_of).min().expect("nonempty")
}

fn undecided(what: String) -> Error {
    Error::Undecided(what)
}

/// B(n) = {odd p : a_n(p) < 1}.
pub fn b_set(n: u32) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    let mut p = 3;
    loop {
        match a_bound(n, p).lt(1.0) {
            Some(true) => out.push(p),
            Some(false) => return Ok(out),
            None => return Err(undecided(format!("a_{n}({p}) < 1"))),
        }
        p = arith::next_prime(p);
    }
}

/// Largest prime p with a_n(p)·s(n)·t(n)·∏_{q∈B} a_n(q) ≤ ½.
pub fn maxprime(n: u32) -> Result<u64> {
    let mut c = s_lower(n) * t_min(n).enclosure();
    for q in b_set(n)? {
        c = c * a_bound(n, q);
    }
    let mut best = None;
    let mut p = 2;
    loop {
        match (a_bound(n, p) * c).le(0.5) {
            Some(true) => best = Some(p),
            Some(false) => {
                if a_bound(n, p).lt(1.0) != Some(true) {
                    return best.ok_or_else(|| undecided("maxprime".into()));
                }
            }
            None => return Err(undecided(format!("bound at p={p} for n={n}"))),
        }
        p = arith::next_prime(p);
    }
}

#[derive(Clone, Debug)]
pub struct MassBounds {
    pub n: u32,
    pub s_lower: Interval,
    pub t_min: RootRational,
    pub b_set: Vec<u64>,
    pub maxprime: u64,
}

pub fn bounds(n: u32) -> Result<MassBounds> {
    if n < 3 {
        return Err(Error::Input("bounds need dimension at least 3".into()));
    }
    Ok(MassBounds { n, s_lower: s_lower(n), t_min: t_min(n), b_set: b_set(n)?, maxprime: maxprime(n)? })
}

/// Lower bound for the mass of any genus with 2-adic symbol `u`, odd local
/// symbols `v`, and a nontrivial (unspecified) symbol at the odd prime q.
pub fn minimal_mass(u: &LocalSymbol, v: &[LocalSymbol], q: u64) -> Interval {
    let n = u.rank();
    let mut exact = local_factor_of(u);
    for l in v {
        exact = &exact * &local_factor_of(l);
    }
    s_lower(n) * exact.enclosure() * local_lower_bound(n, q)
}

/// Cached per-dimension constants used by the candidate search.
#[derive(Clone, Debug)]
pub struct BoundCache {
    pub n: u32,
    s: Interval,
    lb: Vec<(u64, Interval)>,
}

impl BoundCache {
    pub fn new(n: u32) -> Self {
        BoundCache { n, s: s_lower(n), lb: Vec::new() }
    }

    pub fn s_lower(&self) -> Interval {
        self.s
    }

    pub fn local_lower_bound(&mut self, q: u64) -> Interval {
        if let Some(&(_, v)) = self.lb.iter().find(|(p, _)| *p == q) {
            return v;
        }
        let v = local_lower_bound(self.n, q);
        self.lb.push((q, v));
        v
    }
}

/// f64 value of a rational, for display.
pub fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| to_f64(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genus::parse_symbol;

    fn m(s: &str) -> String {
        mass(&parse_symbol(s).unwrap()).unwrap().to_string()
    }

    #[test]
    fn standard_mass_enclosure_contains_exact() {
        for n in [4u32, 6, 8, 10] {
            for det in [1u128, 2, 3, 5, 7, 12, 23, 3 * 5 * 7, 421, 2 * 3 * 5 * 7 * 11] {
                let exact = standard_mass(n, det).unwrap().enclosure();
                let e = standard_mass_enclosure(n, det).unwrap();
                assert!(e.lo <= exact.hi && exact.lo <= e.hi, "n={n} det={det} {e:?} {exact:?}");
                assert!(e.hi - e.lo < 1e-2 * e.hi, "n={n} det={det} {e:?}");
            }
        }
    }

    #[test]
    fn table_masses() {
        assert_eq!(m("I_{8,0}"), "1/10321920");
        assert_eq!(m("II_{8,0}"), "1/696729600");
        assert_eq!(m("II_{10,0}(3^{-1})"), "1/8360755200");
        assert_eq!(m("II_{9,0}(2_1^{+1})"), "1/1393459200");
        assert_eq!(m("II_{9,0}(8_1^{-1})"), "1/11612160");
        assert_eq!(m("I_{4,0}"), "1/384");
        assert_eq!(m("I_{3,0}"), "1/48");
        assert_eq!(m("II_{7,0}(2_7^{-1})"), "1/2903040");
    }

    #[test]
    fn mass_condition_examples() {
        assert!(mass_condition_value(&arith::ratio(1, 384)));
        assert!(!mass_condition_value(&arith::ratio(1, 3)));
        assert!(!mass_condition_value(&arith::ratio(17, 32)));
    }

    #[test]
    fn odd_standard_mass_independent_of_det() {
        assert_eq!(standard_mass(5, 1).unwrap(), standard_mass(5, 3 * 7 * 11).unwrap());
    }

    #[test]
    fn table_bounds() {
        let t = ["1/8", "1/24", "1/8", "1/72", "1/16", "1/272", "1/32", "1/1056"];
        let mp = [61, 467, 73, 283, 139, 373, 193, 421];
        for n in 3..=10u32 {
            let b = bounds(n).unwrap();
            assert_eq!(b.t_min.to_string(), t[n as usize - 3]);
            assert_eq!(b.b_set, if n <= 4 { vec![3] } else { vec![] });
            assert_eq!(b.maxprime, mp[n as usize - 3]);
        }
    }

    #[test]
    fn zeta_values() {
        let z3 = zeta_enclosure(3);
        assert!(z3.lo < 1.2020569031595942 && 1.2020569031595942 < z3.hi);
        let z2 = zeta_enclosure(2);
        assert!(z2.lo <= 1.6449340668482264 && 1.6449340668482264 <= z2.hi);
    }

    #[test]
    fn minimal_mass_prunes_beyond_maxprime() {
        let u = LocalSymbol { p: 2, parts: vec![Constituent::new2(0, 5, 1, true, 5)] };
        assert_eq!(minimal_mass(&u, &[], 79).le(0.5), Some(false));
    }
}
