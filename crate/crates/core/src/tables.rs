//! The published tables, embedded as data, and the comparison against a
//! computed classification.
//!
//! Families are matched by membership: a table row names one genus of a family
//! (the one with smallest determinant, with an arbitrary choice among ties),
//! so a row matches the computed family that contains that genus.

use crate::arith::factor;
use crate::classify::{ClassifiedGenus, DualFamily, Summary};
use crate::error::{Error, Result};
use crate::genus::parse_symbol;
use num_bigint::BigInt;
use serde::Deserialize;
use std::collections::HashSet;
use std::sync::OnceLock;

const TABLES_JSON: &str = include_str!("../data/tables.json");

#[derive(Clone, Debug, Deserialize)]
pub struct FamilyRow {
    pub dim: u32,
    pub latex: String,
    pub symbol: String,
    pub mu: String,
    pub m1: usize,
    pub m2: usize,
    pub n: usize,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Overview {
    pub dims: Vec<u32>,
    pub total: Vec<usize>,
    pub maximal: Vec<usize>,
    pub qf_maximal: Vec<usize>,
    pub max_prime: Vec<u64>,
    pub max_det: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct BoundsTable {
    pub dims: Vec<u32>,
    pub t: Vec<String>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<u64>>,
    pub maxprime: Vec<u64>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ExpectedTables {
    pub overview: Overview,
    pub bounds: BoundsTable,
    pub families: Vec<FamilyRow>,
}

/// One overview column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedSummary {
    pub total: usize,
    pub maximal: usize,
    pub qf_maximal: usize,
    pub max_prime: u64,
    pub max_det: u128,
}

pub fn expected() -> &'static ExpectedTables {
    static T: OnceLock<ExpectedTables> = OnceLock::new();
    T.get_or_init(|| serde_json::from_str(TABLES_JSON).expect("embedded tables are valid JSON"))
}

/// Evaluates products like "2^18*3^6".
pub fn parse_product(s: &str) -> Result<u128> {
    let bad = || Error::Input(format!("bad product {s:?}"));
    let mut acc: u128 = 1;
    for f in s.split('*') {
        let (b, e) = f.split_once('^').unwrap_or((f, "1"));
        let b: u128 = b.trim().parse().map_err(|_| bad())?;
        let e: u32 = e.trim().parse().map_err(|_| bad())?;
        acc = b.checked_pow(e).and_then(|x| acc.checked_mul(x)).ok_or_else(bad)?;
    }
    Ok(acc)
}

/// Inverse of [`parse_product`].
pub fn format_product(n: u128) -> String {
    if n == 1 {
        return "1".into();
    }
    let parts: Vec<String> =
        factor(n).into_iter().map(|(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") }).collect();
    parts.join("*")
}

impl ExpectedTables {
    pub fn summary(&self, dim: u32) -> Option<ExpectedSummary> {
        let o = &self.overview;
        let i = o.dims.iter().position(|&d| d == dim)?;
        Some(ExpectedSummary {
            total: o.total[i],
            maximal: o.maximal[i],
            qf_maximal: o.qf_maximal[i],
            max_prime: o.max_prime[i],
            max_det: parse_product(&o.max_det[i]).ok()?,
        })
    }

    pub fn families(&self, dim: u32) -> Vec<&FamilyRow> {
        self.families.iter().filter(|f| f.dim == dim).collect()
    }

    /// (t, B, maxprime) as printed.
    pub fn bounds(&self, dim: u32) -> Option<(String, Vec<u64>, u64)> {
        let b = &self.bounds;
        let i = b.dims.iter().position(|&d| d == dim)?;
        Some((b.t[i].clone(), b.b[i].clone(), b.maxprime[i]))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub dim: u32,
    pub expected_total: usize,
    /// Genera lying in families whose table row matches in every field.
    pub matched: usize,
    pub mismatches: Vec<String>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares a classification (with families grouped) against the tables.
pub fn verify(dim: u32, results: &[ClassifiedGenus], families: &[DualFamily], summary: &Summary) -> Result<VerifyReport> {
    let t = expected();
    let exp = t.summary(dim).ok_or_else(|| Error::Input(format!("no expected data for dimension {dim}")))?;
    let mut mismatches = Vec::new();
    let got = ExpectedSummary {
        total: summary.total,
        maximal: summary.maximal,
        qf_maximal: summary.qf_maximal,
        max_prime: summary.max_prime,
        max_det: summary.max_det,
    };
    let mut field = |name: &str, e: String, g: String| {
        if e != g {
            mismatches.push(format!("overview {name}: expected {e}, got {g}"));
        }
    };
    field("total", exp.total.to_string(), got.total.to_string());
    field("maximal", exp.maximal.to_string(), got.maximal.to_string());
    field("qf-maximal", exp.qf_maximal.to_string(), got.qf_maximal.to_string());
    field("largest prime", exp.max_prime.to_string(), got.max_prime.to_string());
    field("max det", format_product(exp.max_det), format_product(got.max_det));

    let rows = t.families(dim);
    let mut matched = 0;
    if rows.is_empty() {
        // no per-genus data (dimension 3): the overview decides
        if mismatches.is_empty() {
            matched = results.len();
        }
    }
    let mut hit: HashSet<usize> = HashSet::new();
    for row in rows {
        let sym = parse_symbol(&row.symbol)?;
        let Some(i) = results.iter().position(|c| c.symbol == sym) else {
            mismatches.push(format!("{}: missing", row.symbol));
            continue;
        };
        let fam = &families[results[i].family_id];
        if !hit.insert(fam.id) {
            mismatches.push(format!("{}: family already matched by another row", row.symbol));
            continue;
        }
        let mu: BigInt = row.mu.parse().map_err(|_| Error::Input(format!("bad mu {:?}", row.mu)))?;
        let mut diffs = Vec::new();
        if results[i].aut_order != mu {
            diffs.push(format!("mu expected {mu}, got {}", results[i].aut_order));
        }
        if fam.members.len() != row.n {
            diffs.push(format!("N expected {}, got {}", row.n, fam.members.len()));
        }
        if fam.m1 != row.m1 {
            diffs.push(format!("m1 expected {}, got {}", row.m1, fam.m1));
        }
        if fam.m2 != row.m2 {
            diffs.push(format!("m2 expected {}, got {}", row.m2, fam.m2));
        }
        if diffs.is_empty() {
            matched += fam.members.len();
        } else {
            mismatches.push(format!("{}: {}", row.symbol, diffs.join("; ")));
        }
    }
    if !t.families(dim).is_empty() {
        for f in families.iter().filter(|f| !hit.contains(&f.id)) {
            mismatches.push(format!("{}: not in the tables", results[f.members[0]].symbol.display_form()));
        }
    }
    Ok(VerifyReport { dim, expected_total: exp.total, matched, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products() {
        assert_eq!(parse_product("2^18*3^6").unwrap(), (1 << 18) * 729);
        assert_eq!(format_product(191102976), "2^18*3^6");
        assert_eq!(parse_product("3*5*11*13*19").unwrap(), 3 * 5 * 11 * 13 * 19);
    }

    #[test]
    fn embedded() {
        let t = expected();
        assert_eq!(t.families(10).len(), 1);
        assert_eq!(t.summary(8).unwrap().max_det, 3u128.pow(14));
        assert_eq!(t.bounds(4).unwrap(), ("1/24".to_string(), vec![3], 467));
        let total: usize = t.families(7).iter().map(|f| f.n).sum();
        assert_eq!(total, t.summary(7).unwrap().total);
    }
}
