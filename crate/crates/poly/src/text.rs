use num_bigint::BigInt;
use num_traits::Zero;

use crate::coeff::Rational;
use crate::error::PolyError;
use crate::polynomial::Polynomial;
use crate::system::PolySystem;

/// One term per line: `num/den e1 e2 ... en`. The zero polynomial is written
/// as a single `0/1` term with zero exponents so that its arity survives.
pub fn write_polynomial(p: &Polynomial<Rational>) -> String {
    let mut out = String::new();
    if p.is_zero() {
        out.push_str("0/1");
        for _ in 0..p.nvars() {
            out.push_str(" 0");
        }
        out.push('\n');
        return out;
    }
    for t in p.terms() {
        out.push_str(&format!("{}/{}", t.coeff.numer(), t.coeff.denom()));
        for e in &t.exps {
            out.push_str(&format!(" {e}"));
        }
        out.push('\n');
    }
    out
}

/// Blocks separated by one blank line.
pub fn write_system(sys: &PolySystem<Rational>) -> String {
    sys.polys().iter().map(write_polynomial).collect::<Vec<_>>().join("\n")
}

fn parse_term(line: &str, lineno: usize) -> Result<(Rational, Vec<u32>), PolyError> {
    let err = |message: String| PolyError::Parse { line: lineno, message };
    let mut fields = line.split_whitespace();
    let coeff = fields.next().ok_or_else(|| err("empty term".into()))?;
    let (num, den) = match coeff.split_once('/') {
        Some((n, d)) => (n, d),
        None => (coeff, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err(format!("bad numerator `{num}`")))?;
    let den: BigInt = den.parse().map_err(|_| err(format!("bad denominator `{den}`")))?;
    if den.is_zero() {
        return Err(err("zero denominator".into()));
    }
    let exps = fields
        .map(|f| f.parse::<u32>().map_err(|_| err(format!("bad exponent `{f}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((Rational::new(num, den), exps))
}

fn parse_block(lines: &[(usize, &str)]) -> Result<Polynomial<Rational>, PolyError> {
    let mut terms = Vec::with_capacity(lines.len());
    let mut nvars = None;
    for &(lineno, line) in lines {
        let (c, e) = parse_term(line, lineno)?;
        match nvars {
            None => nvars = Some(e.len()),
            Some(n) if n != e.len() => {
                return Err(PolyError::Parse {
                    line: lineno,
                    message: format!("expected {n} exponents, found {}", e.len()),
                })
            }
            _ => {}
        }
        terms.push((c, e));
    }
    let n = nvars.ok_or(PolyError::Parse { line: 0, message: "empty polynomial block".into() })?;
    Polynomial::from_terms(n, terms)
}

fn blocks(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push((i + 1, line));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

pub fn parse_polynomial(text: &str) -> Result<Polynomial<Rational>, PolyError> {
    let bs = blocks(text);
    match bs.len() {
        1 => parse_block(&bs[0]),
        0 => Err(PolyError::Parse { line: 0, message: "no terms".into() }),
        k => Err(PolyError::Parse { line: 0, message: format!("expected one block, found {k}") }),
    }
}

pub fn parse_system(text: &str) -> Result<PolySystem<Rational>, PolyError> {
    let polys = blocks(text).iter().map(|b| parse_block(b)).collect::<Result<Vec<_>, _>>()?;
    PolySystem::new(polys)
}
