//! Textual function specifications.
//!
//! ```text
//! spec    := lincomb | poly | lincomb "+" poly | simple
//! simple  := name [":" number ("," number)*]      e.g. exp, leaky_relu:0.01, pow:3
//! lincomb := "lincomb:[" term ("," term)* "]"
//! term    := "(" weight "," spec "," arg_scale "," arg_shift ")"
//! poly    := "poly:[" c0 ("," c_i)* "]"             c0 + c1 x + c2 x^2 + ...
//! ```
//!
//! `pow:<c>` is shorthand for `pow_x_c:<c>`.

use super::{catalog_lookup, combine_linear, FunctionDescriptor, Term};
use crate::error::{Error, Result};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn number(s: &str) -> Result<f64> {
    let t = s.trim();
    let v: f64 = t
        .parse()
        .map_err(|_| parse_err(format!("expected a number, got {t:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(format!("number {t:?} is not finite")));
    }
    Ok(v)
}

/// Split on `sep` outside of any parentheses or brackets.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>> {
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(parse_err(format!("unbalanced brackets in {s:?}")));
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(parse_err(format!("unbalanced brackets in {s:?}")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn bracketed(s: &str, open: char, close: char) -> Result<&str> {
    let t = s.trim();
    t.strip_prefix(open)
        .and_then(|r| r.strip_suffix(close))
        .ok_or_else(|| parse_err(format!("expected {open}...{close}, got {t:?}")))
}

fn number_list(s: &str) -> Result<Vec<f64>> {
    let inner = bracketed(s, '[', ']')?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(number).collect()
}

fn parse_term(s: &str) -> Result<Term> {
    let inner = bracketed(s, '(', ')')?;
    let fields = split_top(inner, ',')?;
    if fields.len() < 4 {
        return Err(parse_err(format!(
            "term {s:?} needs (weight, function, scale, shift)"
        )));
    }
    let n = fields.len();
    // the function spec may itself contain commas (parameters)
    let function_text = fields[1..n - 2].join(",");
    Ok(Term {
        weight: number(fields[0])?,
        function: parse_function(&function_text)?,
        arg_scale: number(fields[n - 2])?,
        arg_shift: number(fields[n - 1])?,
    })
}

fn parse_simple(s: &str) -> Result<FunctionDescriptor> {
    let (name, params) = match s.split_once(':') {
        Some((name, rest)) => (
            name.trim(),
            rest.split(',').map(number).collect::<Result<Vec<_>>>()?,
        ),
        None => (s.trim(), Vec::new()),
    };
    let name = if name == "pow" { "pow_x_c" } else { name };
    catalog_lookup(name, &params)
}

/// Parse a function specification; see the module docs for the grammar.
pub fn parse_function(spec: &str) -> Result<FunctionDescriptor> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(parse_err("empty function specification"));
    }
    if !(spec.starts_with("lincomb:") || spec.starts_with("poly:")) {
        return parse_simple(spec);
    }
    let mut terms = Vec::new();
    let mut poly = Vec::new();
    let mut seen_terms = false;
    let mut seen_poly = false;
    for part in split_top(spec, '+')? {
        let part = part.trim();
        if let Some(rest) = part.strip_prefix("lincomb:") {
            if seen_terms {
                return Err(parse_err("more than one lincomb section"));
            }
            seen_terms = true;
            let inner = bracketed(rest, '[', ']')?;
            if !inner.trim().is_empty() {
                for t in split_top(inner, ',')? {
                    terms.push(parse_term(t)?);
                }
            }
        } else if let Some(rest) = part.strip_prefix("poly:") {
            if seen_poly {
                return Err(parse_err("more than one poly section"));
            }
            seen_poly = true;
            poly = number_list(rest)?;
        } else {
            return Err(parse_err(format!("unexpected section {part:?}")));
        }
    }
    combine_linear(terms, poly).map_err(|e| match e {
        Error::InvalidArgument(m) => parse_err(m),
        other => other,
    })
}

impl std::str::FromStr for FunctionDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_function(s)
    }
}
