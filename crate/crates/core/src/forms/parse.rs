//! Polynomial and JSON form literals.

use crate::error::{Error, Result};

use super::{validate_gram, QuadraticForm};

const VARS: [char; 5] = ['x', 'y', 'z', 'w', 'v'];

fn var_index(c: char) -> Option<usize> {
    VARS.iter().position(|&v| v == c)
}

/// Parses either `{"gram": [[...]]}` or a polynomial such as `x^2 + 3y^2 + xy - xz`.
///
/// Variables x, y, z, w, v map to coordinates 1..5; the rank is the largest index used.
/// The literal `0` (or an empty string) denotes the zero form.
pub fn parse_form(s: &str) -> Result<QuadraticForm> {
    let t = s.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()));
    }
    if t.is_empty() || t == "0" || t == "∅" {
        return Ok(QuadraticForm::zero());
    }
    validate_gram(parse_polynomial(t)?)
}

/// Gram matrix of a polynomial literal, without validation.
pub fn parse_polynomial(s: &str) -> Result<Vec<Vec<i64>>> {
    let cleaned: String = s
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '*')
        .map(|c| if c == '−' { '-' } else { c })
        .collect::<String>()
        .replace('²', "^2");
    let chars: Vec<char> = cleaned.chars().collect();
    let mut terms: Vec<(i64, usize, usize)> = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let mut sign = 1i64;
        if chars[pos] == '+' || chars[pos] == '-' {
            if chars[pos] == '-' {
                sign = -1;
            }
            pos += 1;
        } else if !terms.is_empty() {
            return Err(Error::Parse(format!("expected '+' or '-' at position {pos}")));
        }
        let start = pos;
        while pos < chars.len() && chars[pos].is_ascii_digit() {
            pos += 1;
        }
        let coeff: i64 = if pos > start {
            chars[start..pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| Error::Parse("bad coefficient".into()))?
        } else {
            1
        };
        let mut vars = Vec::new();
        while pos < chars.len() {
            if let Some(i) = var_index(chars[pos]) {
                vars.push(i);
                pos += 1;
            } else if chars[pos] == '^' {
                let e = chars.get(pos + 1).copied();
                if e != Some('2') || vars.is_empty() {
                    return Err(Error::Parse(format!("only squares are supported near position {pos}")));
                }
                let last = *vars.last().unwrap();
                vars.push(last);
                pos += 2;
            } else {
                break;
            }
        }
        if pos < chars.len() && chars[pos] != '+' && chars[pos] != '-' {
            return Err(Error::Parse(format!("unexpected character '{}'", chars[pos])));
        }
        if vars.len() != 2 {
            return Err(Error::Parse(format!(
                "term {} is not quadratic",
                chars[start..pos].iter().collect::<String>()
            )));
        }
        terms.push((sign * coeff, vars[0], vars[1]));
    }
    let r = terms.iter().map(|&(_, i, j)| i.max(j) + 1).max().unwrap_or(0);
    let mut g = vec![vec![0i64; r]; r];
    for (c, i, j) in terms {
        if i == j {
            g[i][i] += 2 * c;
        } else {
            g[i][j] += c;
            g[j][i] += c;
        }
    }
    Ok(g)
}

fn var_name(i: usize) -> String {
    match VARS.get(i) {
        Some(c) => c.to_string(),
        None => format!("x{}", i + 1),
    }
}

/// Renders a Gram matrix as a polynomial.
pub fn to_polynomial(g: &[Vec<i64>]) -> String {
    let r = g.len();
    if r == 0 {
        return "0".into();
    }
    let mut out = String::new();
    let mut push = |c: i64, mono: String| {
        if c == 0 {
            return;
        }
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0 { " - " } else { " + " });
        }
        if c.abs() != 1 {
            out.push_str(&c.abs().to_string());
        }
        out.push_str(&mono);
    };
    for i in 0..r {
        push(g[i][i] / 2, format!("{}^2", var_name(i)));
    }
    for i in 0..r {
        for j in i + 1..r {
            push(g[i][j], format!("{}{}", var_name(i), var_name(j)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cross_terms_and_signs() {
        let g = parse_polynomial("x^2+xy-xz+3y^2+z^2").unwrap();
        assert_eq!(g, vec![vec![2, 1, -1], vec![1, 6, 0], vec![-1, 0, 2]]);
        let g = parse_polynomial("x² + 3y² + 7z² + 9w² + 21v² + xy + yw + 7zv").unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[2][4], 7);
        assert_eq!(g[4][4], 42);
    }

    #[test]
    fn round_trip_through_text() {
        let g = parse_polynomial("x^2 - xz + 2y^2 + yz - 2yw + 5z^2 + zw + 29w^2").unwrap();
        assert_eq!(parse_polynomial(&to_polynomial(&g)).unwrap(), g);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_polynomial("x^3").is_err());
        assert!(parse_polynomial("x").is_err());
        assert!(parse_polynomial("x^2 + q^2").is_err());
    }
}
