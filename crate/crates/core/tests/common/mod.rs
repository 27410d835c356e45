#![allow(dead_code)]

use serde::Deserialize;

pub mod props;

#[derive(Deserialize, Clone, Debug)]
pub struct Family {
    pub dim: u32,
    pub latex: String,
    pub symbol: String,
    pub mu: String,
    pub m1: u32,
    pub m2: u32,
    pub n: u32,
}

#[derive(Deserialize, Clone, Debug)]
pub struct Overview {
    pub dims: Vec<u32>,
    pub total: Vec<usize>,
    pub maximal: Vec<usize>,
    pub qf_maximal: Vec<usize>,
    pub max_prime: Vec<u64>,
    pub max_det: Vec<String>,
}

#[derive(Deserialize, Clone, Debug)]
pub struct Tables {
    pub overview: Overview,
    pub families: Vec<Family>,
}

pub fn tables() -> Tables {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/tables.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn families(dim: u32) -> Vec<Family> {
    tables().families.into_iter().filter(|f| f.dim == dim).collect()
}

/// Evaluates "2^18*3^6".
pub fn parse_product(s: &str) -> u128 {
    s.split('*')
        .map(|f| match f.split_once('^') {
            Some((b, e)) => b.parse::<u128>().unwrap().pow(e.parse().unwrap()),
            None => f.parse::<u128>().unwrap(),
        })
        .product()
}

pub fn overview_row(dim: u32) -> (usize, usize, usize, u64, u128) {
    let o = tables().overview;
    let i = o.dims.iter().position(|&d| d == dim).unwrap();
    (o.total[i], o.maximal[i], o.qf_maximal[i], o.max_prime[i], parse_product(&o.max_det[i]))
}

/// One lattice per table symbol (dims 4..10), built once.
pub fn fixtures() -> &'static [(String, singleclass::GramLattice)] {
    use std::sync::OnceLock;
    static F: OnceLock<Vec<(String, singleclass::GramLattice)>> = OnceLock::new();
    F.get_or_init(|| {
        tables()
            .families
            .iter()
            .map(|f| {
                let sym = singleclass::genus::parse_symbol(&f.symbol).unwrap();
                let l = singleclass::construct::construct_lattice(&sym, 1).unwrap_or_else(|e| panic!("{}: {e}", f.symbol));
                (f.symbol.clone(), l)
            })
            .collect()
    })
}

/// A random unimodular change of basis applied to `l`.
pub fn rebase(l: &singleclass::GramLattice, rng: &mut impl rand::Rng) -> singleclass::GramLattice {
    let n = l.dim();
    let mut b: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = if rng.gen_bool(0.5) { 1 } else { -1 };
        for k in 0..n {
            let t = b[j][k];
            b[i][k] += c * t;
        }
        if rng.gen_bool(0.2) {
            b.swap(i, j);
        }
        if rng.gen_bool(0.2) {
            b[i].iter_mut().for_each(|x| *x = -*x);
        }
    }
    l.transform_int(&b, 1)
}
