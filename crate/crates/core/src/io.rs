//! JSON input format for DG algebras and bimodules.
//!
//! ```json
//! { "field": "Q", "basis": [{"name": "1", "degree": 0}, {"name": "a", "degree": -1}],
//!   "unit": "1",
//!   "products": [{"left": "a", "right": "a", "result": []}],
//!   "differential": [{"source": "a", "result": [["b", "1/2"]]}] }
//! ```
//!
//! Omitted products and differentials are zero; products with the unit are
//! implied. Scalars are exact decimal fractions, as strings or integers.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dg::{BasisElement, DGAlgebra, DGBimodule, FlatBasis};
use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::scalar::Field;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ScalarText {
    Text(String),
    Integer(i64),
}

impl ScalarText {
    fn text(&self) -> String {
        match self {
            ScalarText::Text(s) => s.clone(),
            ScalarText::Integer(n) => n.to_string(),
        }
    }
}

pub type Terms = Vec<(String, ScalarText)>;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub name: String,
    pub degree: i64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    pub result: Terms,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentialEntry {
    pub source: String,
    pub result: Terms,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub basis: Vec<BasisEntry>,
    pub unit: String,
    #[serde(default)]
    pub products: Vec<ProductEntry>,
    #[serde(default)]
    pub differential: Vec<DifferentialEntry>,
}

/// Action `algebra · module` (in `left`) or `module · algebra` (in `right`).
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    pub algebra: String,
    pub module: String,
    pub result: Terms,
}

/// A bimodule over a given algebra; `products` and `unit` make it an
/// algebra, which the cup product needs.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BimoduleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub left: Vec<ActionEntry>,
    #[serde(default)]
    pub right: Vec<ActionEntry>,
    #[serde(default)]
    pub differential: Vec<DifferentialEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub products: Option<Vec<ProductEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

fn syntax(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), strip_position(&e.to_string())))
}

fn strip_position(msg: &str) -> &str {
    msg.rsplit_once(" at line ").map_or(msg, |(m, _)| m)
}

fn make_basis(entries: &[BasisEntry]) -> Result<FlatBasis> {
    let mut seen = HashSet::new();
    for (i, b) in entries.iter().enumerate() {
        if b.name.is_empty() {
            return Err(Error::Parse(format!("basis[{i}].name: empty name")));
        }
        if !seen.insert(b.name.as_str()) {
            return Err(Error::Parse(format!("basis[{i}].name: duplicate basis element {:?}", b.name)));
        }
    }
    FlatBasis::new(entries.iter().map(|b| BasisElement { name: b.name.clone(), degree: b.degree }).collect())
}

fn lookup(basis: &FlatBasis, name: &str, at: &str) -> Result<usize> {
    basis.id(name).ok_or_else(|| Error::Parse(format!("{at}: unknown basis element {name:?}")))
}

fn terms(field: Field, basis: &FlatBasis, ts: &Terms, at: &str) -> Result<SparseVec> {
    let mut pairs = Vec::with_capacity(ts.len());
    for (k, (name, c)) in ts.iter().enumerate() {
        let id = lookup(basis, name, &format!("{at}.result[{k}]"))?;
        let c = field
            .parse_scalar(&c.text())
            .map_err(|e| Error::Parse(format!("{at}.result[{k}]: {e}")))?;
        pairs.push((id, c));
    }
    Ok(SparseVec::from_pairs(pairs))
}

fn fill_once(table: &mut [Option<SparseVec>], slot: usize, v: SparseVec, at: &str) -> Result<()> {
    if table[slot].is_some() {
        return Err(Error::Parse(format!("{at}: entry given twice")));
    }
    table[slot] = Some(v);
    Ok(())
}

fn products_table(field: Field, basis: &FlatBasis, unit: usize, entries: &[ProductEntry]) -> Result<Vec<SparseVec>> {
    let n = basis.len();
    let mut table: Vec<Option<SparseVec>> = vec![None; n * n];
    for (i, p) in entries.iter().enumerate() {
        let at = format!("products[{i}]");
        let x = lookup(basis, &p.left, &format!("{at}.left"))?;
        let y = lookup(basis, &p.right, &format!("{at}.right"))?;
        fill_once(&mut table, x * n + y, terms(field, basis, &p.result, &at)?, &at)?;
    }
    for x in 0..n {
        for slot in [unit * n + x, x * n + unit] {
            if table[slot].is_none() {
                table[slot] = Some(SparseVec::unit(x, field));
            }
        }
    }
    Ok(table.into_iter().map(Option::unwrap_or_default).collect())
}

fn differential_table(field: Field, basis: &FlatBasis, entries: &[DifferentialEntry]) -> Result<Vec<SparseVec>> {
    let mut table: Vec<Option<SparseVec>> = vec![None; basis.len()];
    for (i, d) in entries.iter().enumerate() {
        let at = format!("differential[{i}]");
        let x = lookup(basis, &d.source, &format!("{at}.source"))?;
        fill_once(&mut table, x, terms(field, basis, &d.result, &at)?, &at)?;
    }
    Ok(table.into_iter().map(Option::unwrap_or_default).collect())
}

/// Parses an algebra file. The result is not validated; call
/// [`DGAlgebra::validate`] for the axioms.
pub fn parse_algebra(text: &str) -> Result<DGAlgebra> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(syntax)?;
    algebra_from_file(&file)
}

pub fn algebra_from_file(file: &AlgebraFile) -> Result<DGAlgebra> {
    let field: Field = file.field.parse().map_err(|e| Error::Parse(format!("field: {e}")))?;
    let basis = make_basis(&file.basis)?;
    let unit = lookup(&basis, &file.unit, "unit")?;
    let products = products_table(field, &basis, unit, &file.products)?;
    let diff = differential_table(field, &basis, &file.differential)?;
    let name = file.name.clone().unwrap_or_else(|| "A".to_string());
    DGAlgebra::from_tables(field, name, basis, unit, products, diff)
}

/// Parses a bimodule file over `a`. The result is not validated.
pub fn parse_bimodule(text: &str, a: Arc<DGAlgebra>) -> Result<DGBimodule> {
    let file: BimoduleFile = serde_json::from_str(text).map_err(syntax)?;
    bimodule_from_file(&file, a)
}

pub fn bimodule_from_file(file: &BimoduleFile, a: Arc<DGAlgebra>) -> Result<DGBimodule> {
    let field = a.field();
    let basis = make_basis(&file.basis)?;
    let (na, nm) = (a.dim(), basis.len());
    let mut left: Vec<Option<SparseVec>> = vec![None; na * nm];
    let mut right: Vec<Option<SparseVec>> = vec![None; na * nm];
    for (side, entries, table) in [("left", &file.left, &mut left), ("right", &file.right, &mut right)] {
        for (i, e) in entries.iter().enumerate() {
            let at = format!("{side}[{i}]");
            let x = lookup(a.basis(), &e.algebra, &format!("{at}.algebra"))?;
            let m = lookup(&basis, &e.module, &format!("{at}.module"))?;
            let slot = if side == "left" { x * nm + m } else { m * na + x };
            fill_once(table, slot, terms(field, &basis, &e.result, &at)?, &at)?;
        }
    }
    for m in 0..nm {
        let u = a.unit();
        left[u * nm + m].get_or_insert_with(|| SparseVec::unit(m, field));
        right[m * na + u].get_or_insert_with(|| SparseVec::unit(m, field));
    }
    let product = match (&file.products, &file.unit) {
        (None, None) => None,
        (Some(p), Some(u)) => {
            let u = lookup(&basis, u, "unit")?;
            Some((products_table(field, &basis, u, p)?, u))
        }
        (Some(_), None) => return Err(Error::Parse("unit: a module with products needs a unit".into())),
        (None, Some(u)) => {
            let u = lookup(&basis, u, "unit")?;
            Some((products_table(field, &basis, u, &[])?, u))
        }
    };
    let diff = differential_table(field, &basis, &file.differential)?;
    let name = file.name.clone().unwrap_or_else(|| "M".to_string());
    DGBimodule::from_tables(
        name,
        a,
        basis,
        left.into_iter().map(Option::unwrap_or_default).collect(),
        right.into_iter().map(Option::unwrap_or_default).collect(),
        product,
        diff,
    )
}

fn terms_of(basis: &FlatBasis, v: &SparseVec) -> Terms {
    v.iter()
        .map(|(i, c)| (basis.name(*i).to_string(), ScalarText::Text(c.to_fraction_string())))
        .collect()
}

/// The file form of an algebra, listing every nonzero product not involving
/// the unit and every nonzero differential, in basis order.
pub fn algebra_to_file(a: &DGAlgebra) -> AlgebraFile {
    let b = a.basis();
    let n = a.dim();
    let u = a.unit();
    let mut products = Vec::new();
    for x in (0..n).filter(|&x| x != u) {
        for y in (0..n).filter(|&y| y != u) {
            let p = a.mul(x, y);
            if !p.is_zero() {
                products.push(ProductEntry {
                    left: b.name(x).to_string(),
                    right: b.name(y).to_string(),
                    result: terms_of(b, p),
                });
            }
        }
    }
    let differential = (0..n)
        .filter(|&x| !a.d(x).is_zero())
        .map(|x| DifferentialEntry { source: b.name(x).to_string(), result: terms_of(b, a.d(x)) })
        .collect();
    AlgebraFile {
        field: a.field().to_string(),
        name: Some(a.name().to_string()),
        basis: b.elements().iter().map(|e| BasisEntry { name: e.name.clone(), degree: e.degree }).collect(),
        unit: b.name(u).to_string(),
        products,
        differential,
    }
}

pub fn algebra_to_json(a: &DGAlgebra) -> String {
    serde_json::to_string_pretty(&algebra_to_file(a)).expect("algebra file serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const DUAL_NUMBERS: &str = r#"{
        "field": "Q",
        "basis": [{"name": "1", "degree": 0}, {"name": "x", "degree": 2}],
        "unit": "1"
    }"#;

    #[test]
    fn parses_and_validates() {
        let a = parse_algebra(DUAL_NUMBERS).unwrap();
        assert!(a.validate().is_valid());
        assert_eq!(a.dim(), 2);
        assert!(a.mul(1, 1).is_zero());
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = parse_algebra("{\n  \"field\": \"Q\",\n  \"basis\": [,]\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn unknown_names_carry_a_field_path() {
        let text = r#"{"field": "Q", "basis": [{"name": "1", "degree": 0}], "unit": "1",
            "products": [{"left": "1", "right": "y", "result": []}]}"#;
        let err = parse_algebra(text).unwrap_err();
        assert!(err.to_string().contains("products[0].right"), "{err}");
        let text = r#"{"field": "Q", "basis": [{"name": "1", "degree": 0}], "unit": "1", "extra": 1}"#;
        assert!(parse_algebra(text).is_err());
    }

    #[test]
    fn leibniz_violation_names_the_pair() {
        // d(u) = v but d(u·u) = 0 ≠ d(u)u + u d(u)
        let text = r#"{"field": "Q", "unit": "1",
            "basis": [{"name": "1", "degree": 0}, {"name": "u", "degree": 2},
                      {"name": "v", "degree": 3}, {"name": "uu", "degree": 4},
                      {"name": "uv", "degree": 5}, {"name": "vu", "degree": 5}],
            "products": [{"left": "u", "right": "u", "result": [["uu", "1"]]},
                         {"left": "u", "right": "v", "result": [["uv", "1"]]},
                         {"left": "v", "right": "u", "result": [["vu", "1"]]}],
            "differential": [{"source": "u", "result": [["v", "1"]]}]}"#;
        let a = parse_algebra(text).unwrap();
        let v = a.validate().violation.unwrap();
        assert!(v.axiom.contains("Leibniz"), "{v}");
        assert_eq!(v.witnesses, ["u", "u"]);
    }

    #[test]
    fn export_round_trips() {
        for a in [
            DGAlgebra::exterior(Field::Rational, &[-1, -3]).unwrap(),
            DGAlgebra::truncated_free(Field::Rational, &[("u", -2), ("v", -1)], &[(0, 1, 1)], 2).unwrap(),
            DGAlgebra::polynomial(Field::prime(7).unwrap(), &[2, 4], 8).unwrap(),
        ] {
            let back = parse_algebra(&algebra_to_json(&a)).unwrap();
            assert!(back.validate().is_valid());
            assert_eq!(back.products_table(), a.products_table());
            assert_eq!(back.diff_table(), a.diff_table());
            assert_eq!(back.basis(), a.basis());
        }
    }

    #[test]
    fn bimodule_file_with_implicit_unit_action() {
        let a = Arc::new(parse_algebra(DUAL_NUMBERS).unwrap());
        let text = r#"{"basis": [{"name": "m", "degree": 0}]}"#;
        let m = parse_bimodule(text, a).unwrap();
        assert!(m.validate().is_valid());
        assert!(crate::bar::is_ground_module(&m));
    }
}
