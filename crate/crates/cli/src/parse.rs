//! Text forms of unitaries and coin states.

use num_complex::Complex64;
use qwalk_core::coin::{pauli_rotation, CMat2, CoinDensity, CoinUnitary, PauliAxis};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot parse {what} `{text}`: {reason}")]
pub struct ParseError {
    pub what: &'static str,
    pub text: String,
    pub reason: String,
}

fn fail(what: &'static str, text: &str, reason: impl Into<String>) -> ParseError {
    ParseError { what, text: text.to_owned(), reason: reason.into() }
}

fn parse_real(what: &'static str, text: &str, token: &str) -> Result<f64, ParseError> {
    let v: f64 = token.trim().parse().map_err(|_| fail(what, text, format!("`{}` is not a decimal number", token.trim())))?;
    if !v.is_finite() {
        return Err(fail(what, text, format!("`{}` is not finite", token.trim())));
    }
    Ok(v)
}

/// Four `[re, im]` pairs in row-major order; any bracket grouping is accepted
/// as long as it balances.
fn parse_matrix(what: &'static str, text: &str, body: &str) -> Result<CMat2, ParseError> {
    let mut depth = 0i32;
    let mut numbers = Vec::new();
    let mut token = String::new();
    let flush = |token: &mut String, numbers: &mut Vec<f64>| -> Result<(), ParseError> {
        if !token.trim().is_empty() {
            numbers.push(parse_real(what, text, token)?);
        }
        token.clear();
        Ok(())
    };
    for ch in body.chars() {
        match ch {
            '[' => {
                flush(&mut token, &mut numbers)?;
                depth += 1;
            }
            ']' => {
                flush(&mut token, &mut numbers)?;
                depth -= 1;
                if depth < 0 {
                    return Err(fail(what, text, "unbalanced `]`"));
                }
            }
            ',' => flush(&mut token, &mut numbers)?,
            c => token.push(c),
        }
    }
    flush(&mut token, &mut numbers)?;
    if depth != 0 {
        return Err(fail(what, text, "unbalanced `[`"));
    }
    if numbers.len() != 8 {
        return Err(fail(what, text, format!("expected 4 [re, im] pairs, found {} numbers", numbers.len())));
    }
    let z = |i: usize| Complex64::new(numbers[2 * i], numbers[2 * i + 1]);
    Ok(CMat2::new(z(0), z(1), z(2), z(3)))
}

/// `rx:θ`, `ry:θ`, `rz:θ` (radians) or `matrix:[[re,im],...]`.
pub fn parse_unitary_spec(text: &str) -> Result<CoinUnitary, ParseError> {
    const WHAT: &str = "unitary";
    let (head, body) = text.split_once(':').ok_or_else(|| fail(WHAT, text, "expected `<form>:<value>`"))?;
    let axis = match head.trim() {
        "rx" => Some(PauliAxis::X),
        "ry" => Some(PauliAxis::Y),
        "rz" => Some(PauliAxis::Z),
        "matrix" => None,
        other => return Err(fail(WHAT, text, format!("unknown form `{other}`"))),
    };
    match axis {
        Some(axis) => Ok(pauli_rotation(axis, parse_real(WHAT, text, body)?)),
        None => {
            let m = parse_matrix(WHAT, text, body)?;
            CoinUnitary::with_tolerance(m, 1e-10).map_err(|e| fail(WHAT, text, e.to_string()))
        }
    }
}

/// `plus`, `minus`, `chi:<radians>`, `diag:p` or `matrix:[[re,im],...]`.
pub fn parse_coin_spec(text: &str) -> Result<CoinDensity, ParseError> {
    const WHAT: &str = "coin";
    match text.trim() {
        "plus" => return Ok(CoinDensity::plus()),
        "minus" => return Ok(CoinDensity::minus()),
        _ => {}
    }
    let (head, body) = text.split_once(':').ok_or_else(|| fail(WHAT, text, "expected plus, minus or `<form>:<value>`"))?;
    let invalid = |e: qwalk_core::Error| fail(WHAT, text, e.to_string());
    match head.trim() {
        "chi" => Ok(CoinDensity::chi_state(parse_real(WHAT, text, body)?)),
        "diag" => CoinDensity::classical(parse_real(WHAT, text, body)?).map_err(invalid),
        "matrix" => CoinDensity::new(parse_matrix(WHAT, text, body)?).map_err(invalid),
        other => Err(fail(WHAT, text, format!("unknown form `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn rotations() {
        assert_eq!(parse_unitary_spec("ry:0").unwrap(), CoinUnitary::identity());
        let u = parse_unitary_spec("ry:0.7853981633974483").unwrap();
        assert!(u.matrix().max_abs_diff(pauli_rotation(PauliAxis::Y, FRAC_PI_4).matrix()) < 1e-16);
        assert!(parse_unitary_spec("rz:-1.5e0").is_ok());
    }

    #[test]
    fn explicit_matrices() {
        let h = "matrix:[[0.7071067811865476,0],[0.7071067811865476,0]],[[0.7071067811865476,0],[-0.7071067811865476,0]]";
        assert!(parse_unitary_spec(h).is_ok());
        let flat = parse_unitary_spec("matrix:[[0,0],[0,1],[0,1],[0,0]]").unwrap();
        assert_eq!(flat.matrix().get(0, 1), Complex64::new(0.0, 1.0));
        assert!(parse_unitary_spec("matrix:[[1,0],[0,0]],[[0,0],[0.5,0]]").unwrap_err().reason.contains("unitar"));
        assert!(parse_unitary_spec("matrix:[[1,0],[0,0]],[[1,0],[0,0]]").is_err());
    }

    #[test]
    fn errors_name_the_token() {
        let e = parse_unitary_spec("ry:pi/4").unwrap_err();
        assert!(e.reason.contains("`pi/4`"), "{e}");
        assert!(parse_unitary_spec("ry:nan").is_err());
        assert!(parse_unitary_spec("hadamard").is_err());
        assert!(parse_unitary_spec("ru:1").unwrap_err().reason.contains("`ru`"));
        assert!(parse_unitary_spec("matrix:[[1,0],[0,0],[0,0]").is_err());
        assert!(parse_unitary_spec("matrix:[[1,0],[0,0]]]").is_err());
        assert!(parse_unitary_spec("matrix:[[1,0],[0,x],[0,0],[1,0]]").unwrap_err().reason.contains("`x`"));
    }

    #[test]
    fn coins() {
        assert_eq!(parse_coin_spec("plus").unwrap(), CoinDensity::plus());
        assert_eq!(parse_coin_spec("minus").unwrap(), CoinDensity::minus());
        assert_eq!(parse_coin_spec("diag:0.3").unwrap(), CoinDensity::classical(0.3).unwrap());
        assert_eq!(parse_coin_spec("chi:0.4").unwrap(), CoinDensity::chi_state(0.4));
        assert_eq!(parse_coin_spec("matrix:[[0.5,0],[0,0]],[[0,0],[0.5,0]]").unwrap(), CoinDensity::maximally_mixed());
        assert!(parse_coin_spec("diag:1.5").is_err());
        assert!(parse_coin_spec("matrix:[[1,0],[1,0]],[[0,0],[0,0]]").is_err());
        assert!(parse_coin_spec("mixed").is_err());
    }
}
