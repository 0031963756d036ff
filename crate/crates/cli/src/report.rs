//! Text and JSON rendering of results.

use serde_json::{json, Map, Value};

use powerbin_core::PriceResult;

/// `v` rounded to 12 significant digits, trailing zeros dropped. Very large or
/// small magnitudes switch to exponent notation.
pub fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        trim_fraction(&s).to_string()
    } else {
        let s = format!("{v:.11e}");
        match s.split_once('e') {
            Some((mantissa, e)) => format!("{}e{e}", trim_fraction(mantissa)),
            None => s,
        }
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn price_text(kind: &str, x: f64, t: f64, result: &PriceResult) -> String {
    let mut out = format!("kind   {kind}\nx      {}\nt      {}\nvalue  {}\n", sig12(x), sig12(t), sig12(result.value));
    if !result.diagnostics.is_empty() {
        out.push_str("diagnostics\n");
        let width = result.diagnostics.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &result.diagnostics {
            out.push_str(&format!("  {k:<width$}  {}\n", sig12(*v)));
        }
    }
    out
}

pub fn price_json(kind: &str, x: f64, t: f64, result: &PriceResult) -> Value {
    let mut diagnostics = Map::new();
    for (k, v) in &result.diagnostics {
        diagnostics.insert(k.clone(), json!(v));
    }
    json!({
        "kind": kind,
        "x": x,
        "t": t,
        "value": result.value,
        "diagnostics": diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(sig12(-1234.5678901234567), "-1234.56789012");
        assert_eq!(sig12(0.000123456789012345), "0.000123456789012");
        assert_eq!(sig12(1.5e-9), "1.5e-9");
        assert_eq!(sig12(6.02214076e23), "6.02214076e23");
        assert_eq!(sig12(f64::NAN), "NaN");
    }
}
