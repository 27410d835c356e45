//! Browser bindings: exact mass of a genus symbol, the mass-bound table, and
//! the genus symbol of a Gram matrix.

use singleclass::genus::{parse_symbol, symbol_from_lattice};
use singleclass::mass::{bounds, mass};
use singleclass::GramLattice;
use wasm_bindgen::prelude::*;

pub fn mass_text(symbol: &str) -> Result<String, String> {
    let sym = parse_symbol(symbol.trim()).map_err(|e| e.to_string())?;
    let m = mass(&sym).map_err(|e| e.to_string())?;
    Ok(format!("{}/{}", m.numer(), m.denom()))
}

pub fn bounds_text(n: u32) -> Result<String, String> {
    if !(3..=10).contains(&n) {
        return Err(format!("dimension {n} is outside 3..=10"));
    }
    let b = bounds(n).map_err(|e| e.to_string())?;
    let t = b.t_min.to_rational().ok_or("t(n) is not rational")?;
    let set: Vec<String> = b.b_set.iter().map(|p| p.to_string()).collect();
    Ok(format!("t={t} B={{{}}} maxprime={}", set.join(","), b.maxprime))
}

pub fn symbol_text(gram: &str) -> Result<String, String> {
    let l = GramLattice::parse_text(gram).map_err(|e| e.to_string())?;
    Ok(format!("{} (det {})", symbol_from_lattice(&l).display_form(), l.determinant()))
}

#[wasm_bindgen]
pub fn genus_mass(symbol: &str) -> Result<String, JsValue> {
    mass_text(symbol).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn mass_bounds(n: u32) -> Result<String, JsValue> {
    bounds_text(n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn genus_symbol(gram: &str) -> Result<String, JsValue> {
    symbol_text(gram).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_of_e8() {
        assert_eq!(mass_text("II_{8,0}").unwrap(), "1/696729600");
        assert!(mass_text("II_{8,0").is_err());
    }

    #[test]
    fn bounds_row() {
        assert_eq!(bounds_text(4).unwrap(), "t=1/24 B={3} maxprime=467");
        assert!(bounds_text(2).is_err());
    }

    #[test]
    fn symbol_of_a2() {
        assert_eq!(symbol_text("2\n2 1\n1 2\n").unwrap(), "II_{2,0}(3^{-1}) (det 3)");
    }
}
