//! Text parser for quadratic polynomials.
//!
//! Grammar: `term (+ term)* 'mod' INT` where a term is a product of integer
//! literals and variables `xK` (1-based, at most two variables per term),
//! e.g. `x1 + x2 + 5*x1*x10 + 3 mod 6`. The `*` between factors is optional
//! only between a literal and a variable when written like `5*x1`; plain
//! juxtaposition is not accepted. JSON input (detected by a leading `{`) is
//! parsed through the polynomial's serde schema.

use super::QuadPoly;
use crate::error::{Error, Result};
use crate::zmod::Modulus;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Var(usize),
    Star,
    Plus,
    Mod,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            b'*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let lit: u64 = text[start..i]
                    .parse()
                    .map_err(|_| Error::usage(format!("integer too large at position {start}")))?;
                toks.push((Tok::Int(lit), start));
            }
            b'x' | b'X' => {
                let start = i;
                i += 1;
                let ds = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(Error::usage(format!(
                        "expected variable index after 'x' at position {start}"
                    )));
                }
                let idx: usize = text[ds..i]
                    .parse()
                    .map_err(|_| Error::usage(format!("variable index too large at {start}")))?;
                if idx == 0 {
                    return Err(Error::usage(format!(
                        "variable indices are 1-based; found x0 at position {start}"
                    )));
                }
                toks.push((Tok::Var(idx - 1), start));
            }
            b'm' | b'M' => {
                if text[i..].len() >= 3 && text[i..i + 3].eq_ignore_ascii_case("mod") {
                    toks.push((Tok::Mod, i));
                    i += 3;
                } else {
                    return Err(Error::usage(format!("unexpected input at position {i}")));
                }
            }
            _ => {
                return Err(Error::usage(format!(
                    "unexpected character '{}' at position {i}",
                    b as char
                )))
            }
        }
    }
    Ok(toks)
}

struct Term {
    coeff: u64,
    vars: Vec<usize>,
    pos: usize,
}

/// Parse polynomial text (or JSON) into the canonical form. `min_n` pads the
/// variable count; the parsed maximum index wins when larger.
pub fn parse_poly_with_n(text: &str, min_n: usize) -> Result<QuadPoly> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        return serde_json::from_str(trimmed)
            .map_err(|e| Error::usage(format!("polynomial JSON: {e}")));
    }
    let toks = tokenize(trimmed)?;
    let mut pos = 0usize;

    let mut terms: Vec<Term> = Vec::new();
    loop {
        // one term: factors separated by '*'
        let tpos = toks
            .get(pos)
            .map(|&(_, p)| p)
            .ok_or_else(|| Error::usage("empty polynomial; expected a term"))?;
        let mut coeff: u128 = 1;
        let mut vars: Vec<usize> = Vec::new();
        let mut expect_factor = true;
        loop {
            match toks.get(pos) {
                Some(&(Tok::Int(v), p)) if expect_factor => {
                    coeff = coeff
                        .checked_mul(v as u128)
                        .filter(|&c| c < 1 << 100)
                        .ok_or_else(|| Error::usage(format!("coefficient overflow at {p}")))?;
                    expect_factor = false;
                    pos += 1;
                }
                Some(&(Tok::Var(i), p)) if expect_factor => {
                    vars.push(i);
                    if vars.len() > 2 {
                        return Err(Error::usage(format!(
                            "term of degree > 2 at position {p}"
                        )));
                    }
                    expect_factor = false;
                    pos += 1;
                }
                Some(&(Tok::Star, _)) if !expect_factor => {
                    expect_factor = true;
                    pos += 1;
                }
                Some(&(_, p)) if expect_factor => {
                    return Err(Error::usage(format!(
                        "expected a factor at position {p}"
                    )));
                }
                _ => break,
            }
        }
        terms.push(Term {
            coeff: (coeff % u64::MAX as u128) as u64,
            vars,
            pos: tpos,
        });
        match toks.get(pos) {
            Some(&(Tok::Plus, _)) => {
                pos += 1;
                continue;
            }
            Some(&(Tok::Mod, _)) => {
                pos += 1;
                break;
            }
            Some(&(_, p)) => {
                return Err(Error::usage(format!(
                    "expected '+' or 'mod' at position {p}"
                )))
            }
            None => return Err(Error::usage("missing 'mod m' suffix")),
        }
    }
    let m = match toks.get(pos) {
        Some(&(Tok::Int(v), _)) => v,
        Some(&(_, p)) => return Err(Error::usage(format!("expected modulus at position {p}"))),
        None => return Err(Error::usage("expected modulus after 'mod'")),
    };
    if toks.len() > pos + 1 {
        let p = toks[pos + 1].1;
        return Err(Error::usage(format!("trailing input at position {p}")));
    }
    let modulus = Modulus::new(m)?;

    let n = terms
        .iter()
        .flat_map(|t| t.vars.iter().copied())
        .max()
        .map_or(0, |i| i + 1)
        .max(min_n);
    let mut c = 0u64;
    let mut linear = vec![0u64; n];
    let mut quad: Vec<(usize, usize, u64)> = Vec::new();
    for t in terms {
        let coeff = t.coeff % m;
        match t.vars.as_slice() {
            [] => c = (c + coeff) % m,
            [i] => linear[*i] = (linear[*i] + coeff) % m,
            [i, j] => quad.push((*i, *j, coeff)),
            _ => return Err(Error::usage(format!("term of degree > 2 at {}", t.pos))),
        }
    }
    QuadPoly::from_terms(modulus, n, c, &linear, &quad)
}

/// Parse polynomial text (or JSON) into the canonical form.
pub fn parse_poly(text: &str) -> Result<QuadPoly> {
    parse_poly_with_n(text, 0)
}
