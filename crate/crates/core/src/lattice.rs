//! Integral lattices given by their Gram matrix.
//!
//! Everything here is exact. Sublattices and over-lattices are produced by
//! computing an explicit integral basis (Hermite normal form) and transforming
//! the Gram matrix; the result is LLL-reduced where that keeps entries small.

use crate::arith::{self, inv_mod, mod_i};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Integer matrix stored as rows.
pub type IMat = Vec<Vec<i128>>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GramLattice {
    n: usize,
    gram: Vec<i64>,
}

impl fmt::Debug for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GramLattice{:?}", self.rows())
    }
}

impl GramLattice {
    /// Builds a lattice from a row-major Gram matrix, checking symmetry and
    /// positive definiteness.
    pub fn new(n: usize, gram: Vec<i64>) -> Result<Self> {
        if n == 0 || gram.len() != n * n {
            return Err(Error::Input(format!("expected {} entries, got {}", n * n, gram.len())));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i * n + j] != gram[j * n + i] {
                    return Err(Error::Input(format!("gram not symmetric at ({i},{j})")));
                }
            }
        }
        let l = GramLattice { n, gram };
        if l.leading_minors().iter().any(|d| !d.is_positive()) {
            return Err(Error::Input("gram is not positive definite".into()));
        }
        Ok(l)
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("gram must be square".into()));
        }
        Self::new(n, rows.concat())
    }

    fn from_i128(n: usize, g: &[i128]) -> Self {
        let gram = g
            .iter()
            .map(|&x| i64::try_from(x).expect("gram entry exceeds 64 bits"))
            .collect();
        GramLattice { n, gram }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1; n])
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let n = d.len();
        let mut gram = vec![0; n * n];
        for i in 0..n {
            gram[i * n + i] = d[i];
        }
        GramLattice::new(n, gram).expect("diagonal entries must be positive")
    }

    /// The root lattice E8.
    pub fn e8() -> Self {
        let c: [[i64; 8]; 8] = [
            [2, -1, 0, 0, 0, 0, 0, 0],
            [-1, 2, -1, 0, 0, 0, 0, 0],
            [0, -1, 2, -1, 0, 0, 0, -1],
            [0, 0, -1, 2, -1, 0, 0, 0],
            [0, 0, 0, -1, 2, -1, 0, 0],
            [0, 0, 0, 0, -1, 2, -1, 0],
            [0, 0, 0, 0, 0, -1, 2, 0],
            [0, 0, -1, 0, 0, 0, 0, 2],
        ];
        GramLattice::new(8, c.concat()).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.gram[i * self.n + j]
    }

    pub fn entries(&self) -> &[i64] {
        &self.gram
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.gram.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    fn big(&self) -> Vec<Vec<BigInt>> {
        self.rows().iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    /// Leading principal minors d_1..d_n (fraction-free elimination).
    pub fn leading_minors(&self) -> Vec<BigInt> {
        let n = self.n;
        let mut a = self.big();
        let mut prev = BigInt::one();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let piv = a[k][k].clone();
            out.push(piv.clone());
            if piv.is_zero() {
                out.resize(n, BigInt::zero());
                return out;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&piv * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = piv;
        }
        out
    }

    pub fn determinant(&self) -> BigInt {
        self.leading_minors().pop().unwrap()
    }

    pub fn det_u128(&self) -> u128 {
        self.determinant().to_u128().expect("determinant exceeds 128 bits")
    }

    /// Gram matrix of the dual lattice in the dual basis, i.e. the inverse.
    pub fn dual(&self) -> Vec<Vec<BigRational>> {
        invert(&self.big())
    }

    pub fn is_primitive(&self) -> bool {
        self.gram.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
    }

    pub fn is_even(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) % 2 == 0)
    }

    /// Gram matrix of the lattice spanned by the rows of `b` (in the current
    /// basis), divided by `denom`.
    pub fn transform(&self, b: &IMat, denom: i128) -> Vec<BigRational> {
        let m = b.len();
        let n = self.n;
        let mut tmp = vec![vec![0i128; n]; m];
        for i in 0..m {
            for k in 0..n {
                if b[i][k] != 0 {
                    for j in 0..n {
                        tmp[i][j] += b[i][k] * self.get(k, j) as i128;
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let mut s = BigInt::zero();
                for k in 0..n {
                    s += BigInt::from(tmp[i][k]) * BigInt::from(b[j][k]);
                }
                out.push(BigRational::new(s, BigInt::from(denom)));
            }
        }
        out
    }

    /// Integral transform; panics if the result is not integral.
    pub fn transform_int(&self, b: &IMat, denom: i128) -> GramLattice {
        let g = self.transform(b, denom);
        let n = b.len();
        let gram: Vec<i64> = g
            .iter()
            .map(|x| {
                assert!(x.is_integer(), "transformed gram not integral");
                x.to_integer().to_i64().expect("gram entry exceeds 64 bits")
            })
            .collect();
        GramLattice::new(n, gram).expect("transform lost definiteness")
    }

    /// The sublattice {x in L : x mod p in W} where W is spanned by `gens`
    /// (coordinate vectors modulo p).
    pub fn sublattice_from_fp_subspace(&self, p: u64, gens: &[Vec<i64>]) -> Result<GramLattice> {
        let n = self.n;
        let pi = p as i128;
        let mut rows: IMat = Vec::new();
        for g in gens {
            if g.len() != n {
                return Err(Error::Input("subspace generator has wrong length".into()));
            }
            rows.push(g.iter().map(|&x| mod_i(x as i128, pi)).collect());
        }
        let b = hnf_with_modulus(rows, n, pi);
        Ok(self.transform_int(&b, 1))
    }

    /// The over-lattice generated by L and x/m (x integral coordinates).
    pub fn adjoin(&self, x: &[i128], m: i128) -> Result<GramLattice> {
        let b = hnf_with_modulus(vec![x.to_vec()], self.n, m);
        let g = self.transform(&b, m * m);
        if g.iter().any(|v| !v.is_integer()) {
            return Err(Error::Input("adjoined vector does not give an integral lattice".into()));
        }
        Ok(self.transform_int(&b, m * m))
    }

    /// Rescaled partial dual L^{#,p}.
    pub fn partial_dual(&self, p: u64) -> GramLattice {
        let det = self.determinant();
        let a = arith::val_big(&det, p);
        if a == 0 {
            return self.clone();
        }
        let pa = (p as i128).pow(a);
        // m * G^{-1} = adj(G) / p^a, with m the prime-to-p part of det
        let inv = self.dual();
        let rows: IMat = inv
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        let y = x * BigRational::from_integer(BigInt::from(pa) * (&det / BigInt::from(pa)));
                        assert!(y.is_integer());
                        y.to_integer().mod_floor(&BigInt::from(pa)).to_i128().unwrap()
                    })
                    .collect()
            })
            .collect();
        let b = hnf_with_modulus(rows, self.n, pa);
        rescale_primitive(self.n, &self.transform(&b, pa * pa))
    }

    /// LLL-reduced lattice together with the unimodular transform (rows are
    /// the new basis in old coordinates).
    pub fn lll_with_transform(&self) -> (GramLattice, IMat) {
        lll(self)
    }

    pub fn lll(&self) -> GramLattice {
        lll(self).0
    }

    /// Searches for a vector x (coordinates mod p) with L + Z·x/p integral,
    /// or — when `even` is set — even. Returns the first one found over primes
    /// p with p² | det.
    pub fn find_enlargement(&self, even: bool) -> Option<(u64, Vec<i128>)> {
        let det = self.det_u128();
        for (p, e) in arith::factor(det) {
            if e < 2 {
                continue;
            }
            if let Some(x) = self.isotropic_at(p, even) {
                return Some((p, x));
            }
        }
        None
    }

    fn isotropic_at(&self, p: u64, even: bool) -> Option<Vec<i128>> {
        let n = self.n;
        let pi = p as i128;
        let g: IMat = self.rows().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let ker = nullspace_mod_p(&g, p);
        if ker.is_empty() {
            return None;
        }
        let qf = |x: &[i128]| -> i128 {
            let mut s = 0i128;
            for i in 0..n {
                for j in 0..n {
                    s += x[i] * g[i][j] * x[j];
                }
            }
            s
        };
        if p == 2 {
            let modulus = if even { 8 } else { 4 };
            let k = ker.len();
            for mask in 1u32..(1 << k) {
                let mut x = vec![0i128; n];
                for (t, v) in ker.iter().enumerate() {
                    if mask >> t & 1 == 1 {
                        for i in 0..n {
                            x[i] = (x[i] + v[i]) % 2;
                        }
                    }
                }
                if mod_i(qf(&x), modulus) == 0 {
                    return Some(x);
                }
            }
            return None;
        }
        // odd p: quadratic form x^T G x / p mod p on the kernel
        let k = ker.len();
        let mut a = vec![vec![0i128; k]; k];
        for i in 0..k {
            for j in 0..k {
                let mut s = 0i128;
                for r in 0..n {
                    for c in 0..n {
                        s += ker[i][r] * g[r][c] * ker[j][c];
                    }
                }
                debug_assert_eq!(mod_i(s, pi), 0);
                a[i][j] = mod_i(s / pi, pi);
            }
        }
        let y = isotropic_vector_mod_p(&a, p)?;
        let mut x = vec![0i128; n];
        for (t, v) in ker.iter().enumerate() {
            for i in 0..n {
                x[i] = mod_i(x[i] + y[t] * v[i], pi);
            }
        }
        debug_assert_eq!(mod_i(qf(&x), pi * pi), 0);
        Some(x)
    }

    /// No proper integral over-lattice exists.
    pub fn is_maximal(&self) -> bool {
        self.find_enlargement(false).is_none()
    }

    /// Even: the quadratic form x ↦ β(x,x)/2 is maximal; odd: the quadratic
    /// form of the rescaled lattice 2L, i.e. x ↦ β(x,x), is maximal.
    pub fn is_qf_maximal(&self) -> bool {
        if self.is_even() {
            self.find_enlargement(true).is_none()
        } else {
            self.scaled(2).find_enlargement(true).is_none()
        }
    }

    pub fn scaled(&self, c: i64) -> GramLattice {
        GramLattice { n: self.n, gram: self.gram.iter().map(|&x| x.checked_mul(c).unwrap()).collect() }
    }

    /// Repeatedly adjoins isotropic vectors until no enlargement is left.
    pub fn maximal_overlattice(&self, even: bool) -> GramLattice {
        let mut l = self.clone();
        while let Some((p, x)) = l.find_enlargement(even) {
            l = l.adjoin(&x, p as i128).expect("isotropic enlargement is integral").lll();
        }
        l
    }

    /// Image of coordinate vector `x` under the bilinear form against all
    /// basis vectors: G·x.
    pub fn inner(&self, x: &[i64], y: &[i64]) -> i128 {
        let n = self.n;
        let mut s = 0i128;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += x[i] as i128 * self.get(i, j) as i128 * y[j] as i128;
            }
        }
        s
    }

    /// Plain-text form: n, then n rows. Parsing skips `#` comment lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for r in self.rows() {
            let line: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<GramLattice> {
        // lines starting with '#' are comments
        let body: String = text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n");
        let mut nums = body.split_whitespace().map(|t| {
            t.parse::<i64>().map_err(|_| Error::Input(format!("not an integer: {t:?}")))
        });
        let n = nums.next().ok_or_else(|| Error::Input("empty gram file".into()))??;
        if n <= 0 {
            return Err(Error::Input("dimension must be positive".into()));
        }
        let n = n as usize;
        let vals: Vec<i64> = nums.collect::<Result<_>>()?;
        if vals.len() != n * n {
            return Err(Error::Input(format!("expected {} entries after n, got {}", n * n, vals.len())));
        }
        GramLattice::new(n, vals)
    }
}

/// The unique positive rational multiple of `g` that is integral with
/// coprime entries.
pub fn rescale_primitive(n: usize, g: &[BigRational]) -> GramLattice {
    let mut l = BigInt::one();
    for x in g {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = g.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let mut d = BigInt::zero();
    for x in &ints {
        d = d.gcd(x);
    }
    let gram: Vec<i64> = ints.iter().map(|x| (x / &d).to_i64().expect("gram entry exceeds 64 bits")).collect();
    GramLattice::new(n, gram).expect("rescaling preserves definiteness")
}

fn invert(a: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<BigRational> = r.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            for j in 0..n {
                row.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !m[r][c].is_zero()).expect("singular matrix");
        m.swap(c, piv);
        let inv = BigRational::one() / m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..2 * n {
                    let t = &m[c][k] * &f;
                    m[r][k] -= t;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Hermite normal form basis (upper triangular rows) of the lattice spanned by
/// `gens` together with `modulus`·Z^n.
pub fn hnf_with_modulus(gens: IMat, n: usize, modulus: i128) -> IMat {
    let d = modulus;
    let mut rows: IMat = gens.into_iter().map(|r| r.iter().map(|&x| mod_i(x, d)).collect()).collect();
    for i in 0..n {
        let mut r = vec![0i128; n];
        r[i] = d;
        rows.push(r);
    }
    let mut basis: IMat = Vec::with_capacity(n);
    for col in 0..n {
        // gcd-combine all rows with a nonzero entry in this column
        let mut piv: Option<Vec<i128>> = None;
        let mut rest = Vec::with_capacity(rows.len());
        for mut r in rows.into_iter() {
            if r[col] == 0 {
                rest.push(r);
                continue;
            }
            match piv.take() {
                None => piv = Some(r),
                Some(mut p) => {
                    let eg = Integer::extended_gcd(&p[col], &r[col]);
                    let (a, b) = (p[col] / eg.gcd, r[col] / eg.gcd);
                    let newp: Vec<i128> = (0..n).map(|k| eg.x * p[k] + eg.y * r[k]).collect();
                    for k in 0..n {
                        r[k] = b * p[k] - a * r[k];
                    }
                    p = newp;
                    for k in col + 1..n {
                        p[k] = mod_i(p[k], d);
                        r[k] = mod_i(r[k], d);
                    }
                    debug_assert_eq!(r[col], 0);
                    rest.push(r);
                    piv = Some(p);
                }
            }
        }
        let mut p = piv.expect("modulus rows guarantee a pivot");
        if p[col] < 0 {
            for x in p.iter_mut() {
                *x = -*x;
            }
        }
        for k in col + 1..n {
            p[k] = mod_i(p[k], d);
        }
        basis.push(p);
        rows = rest.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
    }
    // reduce above the diagonal
    for j in 0..n {
        for i in 0..j {
            let q = basis[i][j].div_euclid(basis[j][j]);
            if q != 0 {
                let bj = basis[j].clone();
                for k in 0..n {
                    basis[i][k] -= q * bj[k];
                }
            }
        }
    }
    basis
}

/// Basis of the kernel of `a` (n×n) over F_p, as integer vectors in [0,p).
pub fn nullspace_mod_p(a: &IMat, p: u64) -> IMat {
    let n = a.len();
    let m = a[0].len();
    let pi = p as i128;
    let mut r: IMat = a.iter().map(|row| row.iter().map(|&x| mod_i(x, pi)).collect()).collect();
    let mut pivcols = Vec::new();
    let mut row = 0;
    for c in 0..m {
        let Some(pr) = (row..n).find(|&i| r[i][c] != 0) else { continue };
        r.swap(row, pr);
        let inv = inv_mod(r[row][c], pi).unwrap();
        for k in 0..m {
            r[row][k] = r[row][k] * inv % pi;
        }
        for i in 0..n {
            if i != row && r[i][c] != 0 {
                let f = r[i][c];
                for k in 0..m {
                    r[i][k] = mod_i(r[i][k] - f * r[row][k], pi);
                }
            }
        }
        pivcols.push(c);
        row += 1;
        if row == n {
            break;
        }
    }
    let mut out = Vec::new();
    for free in (0..m).filter(|c| !pivcols.contains(c)) {
        let mut v = vec![0i128; m];
        v[free] = 1;
        for (i, &pc) in pivcols.iter().enumerate() {
            v[pc] = mod_i(-r[i][free], pi);
        }
        out.push(v);
    }
    out
}

/// Nonzero isotropic vector of the symmetric form `a` over F_p (p odd).
pub fn isotropic_vector_mod_p(a: &IMat, p: u64) -> Option<Vec<i128>> {
    let k = a.len();
    let pi = p as i128;
    // diagonalise: rows of t form the new basis, d the diagonal
    let (t, d) = diagonalize_mod_p(a, p);
    let e = |i: usize| -> Vec<i128> { t[i].clone() };
    if let Some(i) = (0..k).find(|&i| d[i] == 0) {
        return Some(e(i));
    }
    let comb = |coef: &[(usize, i128)]| -> Vec<i128> {
        let mut v = vec![0i128; k];
        for &(i, c) in coef {
            for j in 0..k {
                v[j] = mod_i(v[j] + c * t[i][j], pi);
            }
        }
        v
    };
    if k == 1 {
        return None;
    }
    if k == 2 {
        // d0 x^2 + d1 = 0  <=>  x^2 = -d1/d0
        let r = mod_i(-d[1] * inv_mod(d[0], pi).unwrap(), pi);
        let s = arith::sqrt_mod(r as u64, p)?;
        return Some(comb(&[(0, s as i128), (1, 1)]));
    }
    // three variables always represent zero: d0 x^2 + d1 y^2 = -d2
    let inv1 = inv_mod(d[1], pi).unwrap();
    for x in 0..pi {
        let r = mod_i((-d[2] - d[0] * x % pi * x) * inv1, pi);
        if let Some(y) = arith::sqrt_mod(r as u64, p) {
            return Some(comb(&[(0, x), (1, y as i128), (2, 1)]));
        }
    }
    unreachable!("ternary forms over F_p are isotropic")
}

/// Returns (t, d) with t·a·tᵀ = diag(d) over F_p, p odd.
pub fn diagonalize_mod_p(a: &IMat, p: u64) -> (IMat, Vec<i128>) {
    let k = a.len();
    let pi = p as i128;
    let mut m: IMat = a.iter().map(|r| r.iter().map(|&x| mod_i(x, pi)).collect()).collect();
    let mut t: IMat = (0..k).map(|i| (0..k).map(|j| (i == j) as i128).collect()).collect();
    let mut d = vec![0i128; k];
    for i in 0..k {
        if m[i][i] == 0 {
            if let Some(j) = (i + 1..k).find(|&j| m[j][j] != 0) {
                swap_basis(&mut m, &mut t, i, j);
            } else if let Some(j) = (i + 1..k).find(|&j| m[i][j] != 0) {
                // e_i += e_j gives diagonal 2 m_ij + m_jj = 2 m_ij
                add_basis(&mut m, &mut t, i, j, 1, pi);
            }
        }
        d[i] = m[i][i];
        if d[i] == 0 {
            continue;
        }
        let inv = inv_mod(d[i], pi).unwrap();
        for j in i + 1..k {
            if m[j][i] != 0 {
                let f = mod_i(-m[j][i] * inv, pi);
                add_basis(&mut m, &mut t, j, i, f, pi);
            }
        }
    }
    (t, d)
}

fn swap_basis(m: &mut IMat, t: &mut IMat, i: usize, j: usize) {
    m.swap(i, j);
    for r in m.iter_mut() {
        r.swap(i, j);
    }
    t.swap(i, j);
}

/// e_i += f·e_j
fn add_basis(m: &mut IMat, t: &mut IMat, i: usize, j: usize, f: i128, p: i128) {
    let k = m.len();
    for c in 0..k {
        m[i][c] = mod_i(m[i][c] + f * m[j][c], p);
    }
    for r in 0..k {
        m[r][i] = mod_i(m[r][i] + f * m[r][j], p);
    }
    for c in 0..k {
        t[i][c] = mod_i(t[i][c] + f * t[j][c], p);
    }
}

/// Integral LLL on the Gram matrix (δ = 3/4).
fn lll(l: &GramLattice) -> (GramLattice, IMat) {
    let n = l.n;
    let mut g: IMat = l.rows().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut h: IMat = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    let mut lam: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    // d[0] = 1, d[i+1] = d_i in 1-based notation
    let mut d: Vec<BigInt> = vec![BigInt::one(); n + 1];
    d[1] = BigInt::from(g[0][0]);
    let mut k = 1usize;
    let mut kmax = 0usize;

    fn red(k: usize, l: usize, g: &mut IMat, h: &mut IMat, lam: &mut [Vec<BigInt>], d: &[BigInt]) {
        let two_l: BigInt = &lam[k][l] * 2;
        if two_l.abs() <= d[l + 1] {
            return;
        }
        let dl = &d[l + 1];
        let num: BigInt = &lam[k][l] * 2 + dl;
        let den: BigInt = dl * 2;
        let q = num.div_floor(&den);
        let qi = q.to_i128().unwrap();
        let n = g.len();
        let gkk = g[k][k] - 2 * qi * g[k][l] + qi * qi * g[l][l];
        for j in 0..n {
            if j != k {
                g[k][j] -= qi * g[l][j];
                g[j][k] = g[k][j];
            }
        }
        g[k][k] = gkk;
        for j in 0..n {
            h[k][j] -= qi * h[l][j];
        }
        lam[k][l] -= &q * dl;
        for i in 0..l {
            let t = &q * &lam[l][i];
            lam[k][i] -= t;
        }
    }

    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = BigInt::from(g[k][j]);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    assert!(!u.is_zero(), "LLL input is degenerate");
                    d[k + 1] = u;
                }
            }
        }
        red(k, k - 1, &mut g, &mut h, &mut lam, &d);
        let lhs: BigInt = &d[k + 1] * &d[k - 1] * 4;
        let rhs: BigInt = &d[k] * &d[k] * 3 - &lam[k][k - 1] * &lam[k][k - 1] * 4;
        if lhs < rhs {
            // swap b_k and b_{k-1}
            g.swap(k, k - 1);
            for r in g.iter_mut() {
                r.swap(k, k - 1);
            }
            h.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = lam[k][j].clone();
                lam[k][j] = lam[k - 1][j].clone();
                lam[k - 1][j] = t;
            }
            let la = lam[k][k - 1].clone();
            let b = (&d[k - 1] * &d[k + 1] + &la * &la) / &d[k];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &la * &t) / &d[k];
                lam[i][k - 1] = (&b * &t + &la * &lam[i][k]) / &d[k + 1];
            }
            d[k] = b;
            if k > 1 {
                k -= 1;
            }
        } else {
            for l2 in (0..k - 1).rev() {
                red(k, l2, &mut g, &mut h, &mut lam, &d);
            }
            k += 1;
        }
    }
    let flat: Vec<i128> = g.into_iter().flatten().collect();
    (GramLattice::from_i128(n, &flat), h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[i64]) -> GramLattice {
        GramLattice::diagonal(d)
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(GramLattice::identity(8).determinant(), BigInt::from(1));
        assert_eq!(diag(&[1, 1, 3]).determinant(), BigInt::from(3));
        assert_eq!(GramLattice::e8().determinant(), BigInt::from(1));
    }

    #[test]
    fn dual_examples() {
        let d = diag(&[1, 1, 4]).dual();
        assert_eq!(d[2][2], arith::ratio(1, 4));
        assert_eq!(d[0][0], arith::ratio(1, 1));
    }

    #[test]
    fn rescale_examples() {
        let g: Vec<BigRational> = [4, 0, 0, 0, 4, 0, 0, 0, 4].iter().map(|&x| arith::ratio(x, 1)).collect();
        assert_eq!(rescale_primitive(3, &g), GramLattice::identity(3));
        let g: Vec<BigRational> =
            [(1, 1), (0, 1), (0, 1), (0, 1), (1, 1), (0, 1), (0, 1), (0, 1), (1, 3)].iter().map(|&(a, b)| arith::ratio(a, b)).collect();
        assert_eq!(rescale_primitive(3, &g), diag(&[3, 3, 1]));
    }

    #[test]
    fn primitivity() {
        assert!(GramLattice::identity(3).is_primitive());
        assert!(!GramLattice::identity(3).scaled(2).is_primitive());
        assert!(diag(&[2, 3]).is_primitive());
    }

    #[test]
    fn sublattices() {
        let l = GramLattice::identity(3);
        assert_eq!(l.sublattice_from_fp_subspace(2, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap(), l);
        let z = l.sublattice_from_fp_subspace(2, &[]).unwrap();
        assert_eq!(z, l.scaled(4));
        let h = l.sublattice_from_fp_subspace(2, &[vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(h.determinant(), BigInt::from(4));
    }

    #[test]
    fn partial_duals() {
        let l = diag(&[1, 1, 5]);
        assert_eq!(l.partial_dual(3), l);
        let pd = diag(&[1, 1, 3]).partial_dual(3);
        assert_eq!(pd.determinant(), BigInt::from(9));
        let pd2 = pd.partial_dual(3);
        assert_eq!(pd2.determinant(), BigInt::from(3));
    }

    #[test]
    fn maximality() {
        assert!(GramLattice::identity(5).is_maximal());
        assert!(!diag(&[1, 1, 4]).is_maximal());
        assert_eq!(diag(&[1, 1, 4]).maximal_overlattice(false).determinant(), BigInt::from(1));
        assert!(GramLattice::e8().is_qf_maximal());
        // Z^8 contains E8-type even sublattices but is itself maximal integral
        assert!(GramLattice::identity(8).is_maximal());
        assert!(!GramLattice::identity(8).is_qf_maximal());
    }

    #[test]
    fn lll_reduces() {
        let g = GramLattice::from_rows(&[vec![1, 5, 7], vec![5, 26, 35], vec![7, 35, 51]]).unwrap();
        let (r, t) = g.lll_with_transform();
        assert_eq!(r.determinant(), g.determinant());
        assert!(r.entries().iter().all(|x| x.abs() <= 2));
        let back = g.transform_int(&t, 1);
        assert_eq!(back, r);
    }

    #[test]
    fn text_roundtrip() {
        let e = GramLattice::e8();
        assert_eq!(GramLattice::parse_text(&e.to_text()).unwrap(), e);
        assert!(GramLattice::parse_text("2\n1 0\n0").is_err());
    }
}
