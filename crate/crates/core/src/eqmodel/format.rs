//! Plain-text equation files.
//!
//! ```text
//! # third-order example
//! order = 3
//! basis = falling
//! f0 = -1/2, -15/4, 0, 0
//! f1 = 1, 5, 0
//! f2 = -1/2, -5/4
//! ```
//!
//! One `key = value` per line; `#` starts a comment. `basis` is `falling`
//! (entries `f_{0,k}, f_{1,k}, …`) or `monomial` (ascending powers of z).
//! Entries are exact decimals or rationals, optionally complex as `a+bi`.
//! A missing `fk` line means `f_k ≡ 0`; `f0` is required.

use super::{Basis, CRat, EquationSpec};
use crate::error::{Error, Result};

fn parse_list(s: &str) -> Result<Vec<CRat>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| CRat::parse(t.trim())).collect()
}

pub fn parse_equation(text: &str) -> Result<EquationSpec> {
    let mut order: Option<usize> = None;
    let mut basis = Basis::Falling;
    let mut rows: Vec<(usize, Vec<CRat>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "order" => order = Some(value.parse().map_err(|_| Error::Parse(format!("line {}: bad order", lineno + 1)))?),
            "basis" => {
                basis = match value {
                    "falling" => Basis::Falling,
                    "monomial" => Basis::Monomial,
                    _ => return Err(Error::Parse(format!("line {}: unknown basis '{value}'", lineno + 1))),
                }
            }
            _ => {
                let k: usize = key
                    .strip_prefix('f')
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("line {}: unknown key '{key}'", lineno + 1)))?;
                if rows.iter().any(|(kk, _)| *kk == k) {
                    return Err(Error::Parse(format!("line {}: f{k} given twice", lineno + 1)));
                }
                let list = parse_list(value).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
                rows.push((k, list));
            }
        }
    }
    let n = order.ok_or_else(|| Error::Parse("missing `order`".into()))?;
    if let Some((k, _)) = rows.iter().find(|(k, _)| *k >= n) {
        return Err(Error::Parse(format!("f{k} is out of range for order {n}")));
    }
    if !rows.iter().any(|(k, _)| *k == 0) {
        return Err(Error::Parse("missing f0".into()));
    }
    let mut table = vec![Vec::new(); n];
    for (k, list) in rows {
        table[k] = list;
    }
    match basis {
        Basis::Falling => EquationSpec::from_falling(n, table),
        Basis::Monomial => EquationSpec::from_monomial(n, table),
    }
}

/// Falling-basis file text that parses back to the same equation.
pub fn render_equation(spec: &EquationSpec) -> String {
    let mut out = format!("order = {}\nbasis = falling\n", spec.order());
    for (k, row) in spec.falling_table().iter().enumerate() {
        let items: Vec<String> = row.iter().map(CRat::render).collect();
        out.push_str(&format!("f{k} = {}\n", items.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqmodel::example_third_order;

    #[test]
    fn falling_file() {
        let text = "# demo\norder = 3\nbasis = falling\nf0 = -1/2, -15/4, 0, 0\nf1 = 1, 5, 0\nf2 = -0.5, -1.25\n";
        assert_eq!(parse_equation(text).unwrap(), example_third_order());
    }

    #[test]
    fn monomial_file() {
        let text = "order = 3\nbasis = monomial\nf0 = 0, 11/4, -9/4, -1/2\nf1 = 0, 4, 1\nf2 = -5/4, -1/2  # tail\n";
        assert_eq!(parse_equation(text).unwrap(), example_third_order());
    }

    #[test]
    fn render_round_trip() {
        let spec = example_third_order().shift_variable(&CRat::parse("1/3+1/2i").unwrap());
        assert_eq!(parse_equation(&render_equation(&spec)).unwrap(), spec);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_equation("basis = falling\nf0 = 1"), Err(Error::Parse(_))));
        assert!(matches!(parse_equation("order = 2\nf1 = 1"), Err(Error::Parse(_))));
        assert!(matches!(parse_equation("order = 2\nf0 = 1, x"), Err(Error::Parse(_))));
        assert!(matches!(parse_equation("order = 2\nbasis = monomial\nf0 = 1, 1, 1\nf1 = 0, 0, 1"), Err(Error::Degree { k: 1, .. })));
    }
}
