//! p-adic Jordan decomposition.
//!
//! Works modulo p^K with K a few digits above v_p(det), which determines the
//! Jordan invariants. For p = 2 the pieces are odd 1×1 entries and even 2×2
//! blocks; a 1×1 pivot is preferred whenever one of minimal valuation exists.

use crate::arith::{self, inv_mod, kronecker2, legendre, mod_i};
use crate::lattice::GramLattice;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanBlock {
    pub scale: u32,
    /// Unimodular constituent (entries reduced mod p^(K - scale)).
    pub constituent_gram: Vec<Vec<i128>>,
    pub rank: usize,
    /// For p = 2: whether any 1×1 (odd) piece occurs.
    pub odd: bool,
    /// For p = 2: sum of 1×1 units mod 8.
    pub oddity: u8,
    /// Square class of the unit determinant: Legendre symbol for odd p,
    /// (det/2) Kronecker symbol for p = 2.
    pub eps: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanDecomposition {
    pub p: u64,
    pub blocks: Vec<JordanBlock>,
}

struct Piece {
    scale: u32,
    unit: Vec<Vec<i128>>,
}

fn val_mod(x: i128, p: i128, k: u32) -> u32 {
    if x == 0 {
        return k;
    }
    let mut v = 0;
    let mut x = x;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

pub fn jordan_decompose(l: &GramLattice, p: u64) -> JordanDecomposition {
    let n = l.dim();
    let det = l.det_u128();
    let vd = if det % (p as u128) == 0 { arith::val(det as i128, p) } else { 0 };
    let k = vd + if p == 2 { 6 } else { 3 };
    let pi = p as i128;
    let m = pi.checked_pow(k).filter(|&m| m < 1 << 62).expect("p-adic precision exceeds 62 bits");
    let mut a: Vec<Vec<i128>> = l.rows().iter().map(|r| r.iter().map(|&x| mod_i(x as i128, m)).collect()).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pieces: Vec<Piece> = Vec::new();
    let ppow = |e: u32| pi.pow(e);

    // e_i += f e_j on the active matrix
    let add = |a: &mut Vec<Vec<i128>>, i: usize, j: usize, f: i128| {
        for c in 0..n {
            a[i][c] = mod_i(a[i][c] + f * a[j][c], m);
        }
        for r in 0..n {
            a[r][i] = mod_i(a[r][i] + f * a[r][j], m);
        }
    };

    while !active.is_empty() {
        let mut best = (k + 1, usize::MAX, usize::MAX);
        for (x, &i) in active.iter().enumerate() {
            for &j in &active[x..] {
                let v = val_mod(a[i][j], pi, k);
                // diagonal entries win ties
                if v < best.0 || (v == best.0 && i == j && best.1 != best.2) {
                    best = (v, i, j);
                }
            }
        }
        let (v, i, j) = best;
        assert!(v < k, "insufficient p-adic precision");
        let pv = ppow(v);
        if i == j || p != 2 {
            let i = if i == j {
                i
            } else {
                // odd p: e_i + e_j has diagonal value of valuation v
                add(&mut a, i, j, 1);
                i
            };
            let u = a[i][i] / pv;
            let uinv = inv_mod(u, m).unwrap();
            for &r in active.iter().filter(|&&r| r != i) {
                if a[r][i] != 0 {
                    let f = mod_i(-(a[r][i] / pv) * uinv, m);
                    add(&mut a, r, i, f);
                }
            }
            pieces.push(Piece { scale: v, unit: vec![vec![mod_i(u, m / pv)]] });
            active.retain(|&r| r != i);
        } else {
            // 2x2 even block at scale v
            let (b00, b01, b11) = (a[i][i] / pv, a[i][j] / pv, a[j][j] / pv);
            let d = mod_i(b00 * b11 - b01 * b01, m);
            let dinv = inv_mod(d, m).expect("2-adic block must be unimodular");
            // inverse of [[b00,b01],[b01,b11]]
            let inv = [
                [mod_i(b11 * dinv, m), mod_i(-b01 * dinv, m)],
                [mod_i(-b01 * dinv, m), mod_i(b00 * dinv, m)],
            ];
            for &r in active.iter().filter(|&&r| r != i && r != j) {
                let (c0, c1) = (a[r][i] / pv, a[r][j] / pv);
                if c0 == 0 && c1 == 0 && a[r][i] == 0 && a[r][j] == 0 {
                    continue;
                }
                let f0 = mod_i(c0 * inv[0][0] + c1 * inv[1][0], m);
                let f1 = mod_i(c0 * inv[0][1] + c1 * inv[1][1], m);
                add(&mut a, r, i, mod_i(-f0, m));
                add(&mut a, r, j, mod_i(-f1, m));
                debug_assert_eq!(mod_i(a[r][i], m), 0);
                debug_assert_eq!(mod_i(a[r][j], m), 0);
            }
            let mm = m / pv;
            pieces.push(Piece { scale: v, unit: vec![vec![mod_i(b00, mm), mod_i(b01, mm)], vec![mod_i(b01, mm), mod_i(b11, mm)]] });
            active.retain(|&r| r != i && r != j);
        }
    }

    pieces.sort_by_key(|pc| pc.scale);
    let mut blocks: Vec<JordanBlock> = Vec::new();
    for pc in pieces {
        let r = pc.unit.len();
        let (odd, oddity, det) = if r == 1 {
            (true, mod_i(pc.unit[0][0], 8) as u8, pc.unit[0][0])
        } else {
            (false, 0u8, pc.unit[0][0] * pc.unit[1][1] - pc.unit[0][1] * pc.unit[0][1])
        };
        let det_sign = if p == 2 { kronecker2(det) } else { legendre(det, p) };
        match blocks.last_mut() {
            Some(b) if b.scale == pc.scale => {
                let off = b.rank;
                let mut g = vec![vec![0i128; off + r]; off + r];
                for x in 0..off {
                    for y in 0..off {
                        g[x][y] = b.constituent_gram[x][y];
                    }
                }
                for x in 0..r {
                    for y in 0..r {
                        g[off + x][off + y] = pc.unit[x][y];
                    }
                }
                b.constituent_gram = g;
                b.rank += r;
                b.odd |= odd;
                b.oddity = (b.oddity + oddity) % 8;
                b.eps *= det_sign;
            }
            _ => blocks.push(JordanBlock { scale: pc.scale, constituent_gram: pc.unit, rank: r, odd, oddity, eps: det_sign }),
        }
    }
    JordanDecomposition { p, blocks }
}

impl JordanDecomposition {
    /// b - a + 1 for the extreme scales a, b.
    pub fn len(&self) -> u32 {
        let a = self.blocks.first().unwrap().scale;
        let b = self.blocks.last().unwrap().scale;
        b - a + 1
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn rank_at(&self, scale: u32) -> usize {
        self.blocks.iter().find(|b| b.scale == scale).map_or(0, |b| b.rank)
    }
}

pub fn len_p(l: &GramLattice, p: u64) -> u32 {
    jordan_decompose(l, p).len()
}

pub fn is_padically_squarefree(l: &GramLattice, p: u64) -> bool {
    jordan_decompose(l, p).blocks.iter().all(|b| b.scale <= 1)
}

pub fn is_squarefree(l: &GramLattice) -> bool {
    arith::prime_divisors(l.det_u128()).into_iter().all(|p| is_padically_squarefree(l, p))
}

pub fn is_strongly_primitive(l: &GramLattice) -> bool {
    arith::prime_divisors(2 * l.det_u128()).into_iter().all(|p| {
        let j = jordan_decompose(l, p);
        j.blocks.iter().all(|b| b.scale <= 1) && j.rank_at(0) >= j.rank_at(1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_one_block() {
        for p in [2, 3, 5] {
            let j = jordan_decompose(&GramLattice::identity(5), p);
            assert_eq!(j.blocks.len(), 1);
            assert_eq!((j.blocks[0].scale, j.blocks[0].rank), (0, 5));
        }
    }

    #[test]
    fn diagonal_at_two() {
        let j = jordan_decompose(&GramLattice::diagonal(&[2, 3]), 2);
        assert_eq!(j.blocks.len(), 2);
        assert_eq!((j.blocks[0].scale, j.blocks[0].oddity), (0, 3));
        assert_eq!((j.blocks[1].scale, j.blocks[1].oddity), (1, 1));
        let l = GramLattice::diagonal(&[1, 1, 4]);
        let j = jordan_decompose(&l, 2);
        assert_eq!(j.blocks.iter().map(|b| (b.scale, b.rank)).collect::<Vec<_>>(), vec![(0, 2), (2, 1)]);
        assert_eq!(len_p(&l, 2), 3);
        assert!(!is_padically_squarefree(&l, 2));
    }

    #[test]
    fn lengths_and_predicates() {
        assert_eq!(len_p(&GramLattice::identity(4), 3), 1);
        assert_eq!(len_p(&GramLattice::diagonal(&[1, 3]), 3), 2);
        let l = GramLattice::diagonal(&[1, 3, 3]);
        assert!(is_squarefree(&l));
        assert!(!is_strongly_primitive(&l));
        assert!(is_strongly_primitive(&GramLattice::identity(3)));
    }

    #[test]
    fn e8_even_unimodular() {
        let j = jordan_decompose(&GramLattice::e8(), 2);
        assert_eq!(j.blocks.len(), 1);
        assert!(!j.blocks[0].odd);
        assert_eq!(j.blocks[0].rank, 8);
        assert_eq!(j.blocks[0].eps, 1);
    }

    #[test]
    fn off_diagonal_odd_prime() {
        // [[3,3],[3,3+9]]: needs the e_i + e_j trick only if diagonals vanish
        let l = GramLattice::from_rows(&[vec![6, 3], vec![3, 6]]).unwrap();
        let j = jordan_decompose(&l, 3);
        assert_eq!(j.blocks.iter().map(|b| (b.scale, b.rank)).collect::<Vec<_>>(), vec![(1, 1), (2, 1)]);
    }
}
