//! Elementary number theory on machine integers and exact rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn next_prime(p: u64) -> u64 {
    let mut q = p + 1;
    while !is_prime(q) {
        q += 1;
    }
    q
}

/// Odd primes `3 <= p <= bound`.
pub fn odd_primes_upto(bound: u64) -> Vec<u64> {
    (3..=bound).filter(|&p| is_prime(p)).collect()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn mod_i(a: i128, m: i128) -> i128 {
    let r = a % m;
    if r < 0 {
        r + m
    } else {
        r
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let g = Integer::extended_gcd(&mod_i(a, m), &m);
    if g.gcd != 1 {
        return None;
    }
    Some(mod_i(g.x, m))
}

/// A square root of `a` modulo the odd prime `p`, if one exists.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre(a as i128, p) != 1 {
        return None;
    }
    // Tonelli-Shanks
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre(z as i128, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: i128, p: u64) -> i8 {
    let a = mod_i(a, p as i128) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol (a/2): depends on a mod 8.
pub fn kronecker2(a: i128) -> i8 {
    match mod_i(a, 8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Kronecker symbol (a/n) for n > 0.
pub fn kronecker(a: i128, n: u128) -> i8 {
    let mut r = 1i8;
    for (p, e) in factor(n) {
        let k = if p == 2 { kronecker2(a) } else { legendre(a, p) };
        if e % 2 == 1 {
            r *= k;
        } else if k == 0 {
            r = 0;
        }
    }
    r
}

/// Kronecker symbol (a/n) for n > 0 by quadratic reciprocity (no factoring).
pub fn kronecker_symbol(a: i128, n: u128) -> i8 {
    assert!(n > 0);
    let mut n = n;
    let mut r = 1i8;
    let tz = n.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if tz % 2 == 1 && kronecker2(a) == -1 {
            r = -r;
        }
        n >>= tz;
    }
    // Jacobi symbol (a/n), n odd
    let mut a = mod_i(a, n as i128) as u128;
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            r = -r;
        }
        if a % 4 == 3 && n % 4 == 3 {
            r = -r;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        r
    } else {
        0
    }
}

/// Prime factorisation by trial division (inputs here are smooth).
pub fn factor(mut n: u128) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut p: u128 = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        p += if p == 2 { 1 } else { 2 };
        if p > 1 << 24 && n < u64::MAX as u128 && is_prime(n as u64) {
            break;
        }
    }
    if n > 1 {
        out.push((u64::try_from(n).expect("prime factor exceeds 64 bits"), 1));
    }
    out
}

pub fn prime_divisors(n: u128) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

/// p-adic valuation of a nonzero integer.
pub fn val(mut n: i128, p: u64) -> u32 {
    assert!(n != 0);
    let p = p as i128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn val_big(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Squarefree part (sign kept) of a nonzero integer.
pub fn squarefree_part(n: i128) -> i128 {
    let mut s: i128 = if n < 0 { -1 } else { 1 };
    for (p, e) in factor(n.unsigned_abs()) {
        if e % 2 == 1 {
            s *= p as i128;
        }
    }
    s
}

/// Fundamental discriminant of Q(sqrt(d)) for nonzero d.
pub fn fundamental_discriminant(d: i128) -> i128 {
    let f = squarefree_part(d);
    if mod_i(f, 4) == 1 {
        f
    } else {
        4 * f
    }
}

pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub fn rint(a: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(a.into())
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Bernoulli numbers B_0..B_63 with B_1 = -1/2.
pub fn bernoulli(k: u32) -> BigRational {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut b: Vec<BigRational> = vec![BigRational::one()];
        for m in 1..64u32 {
            let mut s = BigRational::zero();
            for (j, bj) in b.iter().enumerate() {
                s += rint(binomial(m + 1, j as u32)) * bj;
            }
            b.push(-s / rint(BigInt::from(m + 1)));
        }
        b
    });
    t[k as usize].clone()
}

/// Rational to f64 (approximate; used only for display and interval seeds).
pub fn to_f64(r: &BigRational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    let (nb, db) = (n.bits() as i64, d.bits() as i64);
    let shift = (nb - db - 60).max(0) as u32;
    let shift_d = (db - nb + 60).max(0) as u32;
    let n2: BigInt = if shift_d > 0 { n << shift_d } else { n.clone() };
    let d2: BigInt = if shift > 0 { d << shift } else { d.clone() };
    let q = &n2 / &d2;
    let f = q.to_f64().unwrap_or(f64::INFINITY);
    f * 2f64.powi(shift as i32 - shift_d as i32)
}

pub fn abs_rational(r: &BigRational) -> BigRational {
    r.abs()
}

/// Hilbert symbol (a, b)_p for nonzero integers a, b and a prime p.
pub fn hilbert_symbol(a: i128, b: i128, p: u64) -> i8 {
    assert!(a != 0 && b != 0);
    let (al, u) = split_p(a, p);
    let (be, v) = split_p(b, p);
    if p == 2 {
        let eps = |x: i128| (mod_i(x, 8) - 1) / 2 % 2;
        let omega = |x: i128| {
            let r = mod_i(x, 8);
            (r * r - 1) / 8 % 2
        };
        let e = eps(u) * eps(v) + al as i128 * omega(v) + be as i128 * omega(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut r: i8 = if (al * be) % 2 == 1 && p % 4 == 3 { -1 } else { 1 };
        if be % 2 == 1 {
            r *= legendre(u, p);
        }
        if al % 2 == 1 {
            r *= legendre(v, p);
        }
        r
    }
}

/// Hilbert symbol at the real place.
pub fn hilbert_symbol_real(a: i128, b: i128) -> i8 {
    if a < 0 && b < 0 {
        -1
    } else {
        1
    }
}

fn split_p(mut a: i128, p: u64) -> (u32, i128) {
    let p = p as i128;
    let mut e = 0;
    while a % p == 0 {
        a /= p;
        e += 1;
    }
    (e, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let ps: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert_eq!(next_prime(467), 479);
        assert!(is_prime(1_000_000_007));
    }

    #[test]
    fn symbols() {
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(3, 7), -1);
        assert_eq!(kronecker(5, 8), -1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(3, 9), 0);
        assert_eq!(kronecker(2, 9), 1);
        for a in -30i128..30 {
            for n in 1u128..60 {
                assert_eq!(kronecker_symbol(a, n), kronecker(a, n), "({a}/{n})");
            }
        }
        assert_eq!(fundamental_discriminant(-3), -3);
        assert_eq!(fundamental_discriminant(12), 12);
        assert_eq!(fundamental_discriminant(-4 * 9), -4);
    }

    #[test]
    fn sqrt_mod_p() {
        for p in [3u64, 5, 13, 17, 97, 467] {
            for a in 1..p {
                if let Some(r) = sqrt_mod(a, p) {
                    assert_eq!(r * r % p, a);
                }
            }
        }
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(2), ratio(1, 6));
        assert_eq!(bernoulli(4), ratio(-1, 30));
        assert_eq!(bernoulli(12), ratio(-691, 2730));
        assert!(bernoulli(7).is_zero());
    }

    #[test]
    fn hilbert() {
        assert_eq!(hilbert_symbol(3, 3, 3), -1);
        assert_eq!(hilbert_symbol(-1, -1, 2), -1);
        assert_eq!(hilbert_symbol(2, 3, 2), -1);
        assert_eq!(hilbert_symbol(1, 7, 7), 1);
        assert_eq!(hilbert_symbol(5, 7, 3), 1);
    }

    #[test]
    fn factoring() {
        assert_eq!(factor(2u128.pow(24) * 27), vec![(2, 24), (3, 3)]);
        assert_eq!(isqrt(99), 9);
        assert_eq!(val(96, 2), 5);
    }
}
