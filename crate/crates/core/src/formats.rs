//! Line-oriented text formats for matrices, graphs and quadratic polynomials.
//!
//! ```text
//! matrix 2          graph 3        poly q=4 n=2
//! 0 0 1/1           0 1 2          q 0 0 1
//! 0 1 1/1*w(4,1)    1 2 1          q 0 1 2
//! 1 1 0                            l 1 3
//!                                  k 1
//! ```
//!
//! `#` starts a comment. Matrix lines list the upper triangle (`i <= j`);
//! omitted entries are zero.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::cyclotomic::Rational;
use crate::gausssum::QuadPoly;
use crate::model::{MultiGraph, PureEntry, PureMatrix};

const MAX_DIM: usize = 512;
const MAX_VARS: usize = 1 << 12;
const MAX_VERTICES: usize = 1 << 20;
const MAX_ROOT_ORDER: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn perr(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| perr(line, format!("invalid {what} '{tok}'")))
}

fn parse_bigint(tok: &str, line: usize) -> Result<BigInt, ParseError> {
    tok.parse::<BigInt>()
        .map_err(|_| perr(line, format!("invalid integer '{tok}'")))
}

/// Parse one entry: `0`, `NUM/DEN` or `NUM/DEN*w(N,K)`.
pub fn parse_entry(tok: &str, line: usize) -> Result<PureEntry, ParseError> {
    let (mag, root) = match tok.split_once('*') {
        Some((m, r)) => (m, Some(r)),
        None => (tok, None),
    };
    let (num, den) = match mag.split_once('/') {
        Some((n, d)) => (parse_bigint(n, line)?, parse_bigint(d, line)?),
        None => (parse_bigint(mag, line)?, BigInt::one()),
    };
    if !den.is_positive() {
        return Err(perr(line, "denominator must be positive"));
    }
    let value = Rational::new(num, den);
    let (n, k) = match root {
        None => (1, 0),
        Some(r) => {
            let inner = r
                .strip_prefix("w(")
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| perr(line, format!("invalid root '{r}', expected w(N,K)")))?;
            let (n, k) = inner
                .split_once(',')
                .ok_or_else(|| perr(line, "expected w(N,K)"))?;
            let n: u64 = n
                .trim()
                .parse()
                .map_err(|_| perr(line, format!("invalid root order '{n}'")))?;
            let k: u64 = k
                .trim()
                .parse()
                .map_err(|_| perr(line, format!("invalid root exponent '{k}'")))?;
            if n == 0 || n > MAX_ROOT_ORDER {
                return Err(perr(line, "root order out of range"));
            }
            (n, k)
        }
    };
    PureEntry::from_signed(value, n, k).map_err(|e| perr(line, e.to_string()))
}

pub fn format_entry(e: &PureEntry) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let m = e.magnitude();
    let mut s = format!("{}/{}", m.numer(), m.denom());
    if e.root_order() > 1 {
        let _ = write!(s, "*w({},{})", e.root_order(), e.root_exp());
    }
    s
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    keyword: &str,
) -> Result<(usize, Vec<&'a str>), ParseError> {
    let (ln, first) = lines
        .next()
        .ok_or_else(|| perr(0, format!("missing '{keyword}' header")))?;
    let toks: Vec<&str> = first.split_whitespace().collect();
    if toks.first() != Some(&keyword) {
        return Err(perr(ln, format!("expected '{keyword}' header")));
    }
    Ok((ln, toks[1..].to_vec()))
}

pub fn parse_matrix(text: &str) -> Result<PureMatrix, ParseError> {
    let mut lines = content_lines(text);
    let (ln, args) = header(&mut lines, "matrix")?;
    if args.len() != 1 {
        return Err(perr(ln, "expected 'matrix <m>'"));
    }
    let m = parse_usize(args[0], ln, "dimension")?;
    if m == 0 || m > MAX_DIM {
        return Err(perr(ln, "dimension out of range"));
    }
    let mut entries = vec![PureEntry::zero(); m * m];
    let mut seen = vec![false; m * m];
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(perr(ln, "expected 'i j entry'"));
        }
        let i = parse_usize(toks[0], ln, "row")?;
        let j = parse_usize(toks[1], ln, "column")?;
        if i >= m || j >= m {
            return Err(perr(ln, "index out of range"));
        }
        if i > j {
            return Err(perr(ln, "only upper-triangle entries (i <= j) are allowed"));
        }
        if seen[i * m + j] {
            return Err(perr(ln, format!("duplicate entry ({i}, {j})")));
        }
        seen[i * m + j] = true;
        let e = parse_entry(toks[2], ln)?;
        entries[i * m + j] = e.clone();
        entries[j * m + i] = e;
    }
    PureMatrix::new(m, entries).map_err(|e| perr(0, e.to_string()))
}

pub fn serialize_matrix(a: &PureMatrix) -> String {
    let m = a.dim();
    let mut s = format!("matrix {m}\n");
    for i in 0..m {
        for j in i..m {
            let _ = writeln!(s, "{i} {j} {}", format_entry(a.get(i, j)));
        }
    }
    s
}

pub fn parse_graph(text: &str) -> Result<MultiGraph, ParseError> {
    let mut lines = content_lines(text);
    let (ln, args) = header(&mut lines, "graph")?;
    if args.len() != 1 {
        return Err(perr(ln, "expected 'graph <n>'"));
    }
    let n = parse_usize(args[0], ln, "vertex count")?;
    if n > MAX_VERTICES {
        return Err(perr(ln, "vertex count out of range"));
    }
    let mut g = MultiGraph::new(n);
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(perr(ln, "expected 'u v mult'"));
        }
        let u = parse_usize(toks[0], ln, "vertex")?;
        let v = parse_usize(toks[1], ln, "vertex")?;
        let mult: u64 = toks[2]
            .parse()
            .map_err(|_| perr(ln, format!("invalid multiplicity '{}'", toks[2])))?;
        g.add_edge(u, v, mult).map_err(|e| perr(ln, e.to_string()))?;
    }
    Ok(g)
}

pub fn serialize_graph(g: &MultiGraph) -> String {
    let mut s = format!("graph {}\n", g.vertex_count());
    for e in g.edges() {
        let _ = writeln!(s, "{} {} {}", e.u, e.v, e.mult);
    }
    s
}

fn parse_kv(tok: &str, key: &str, line: usize) -> Result<u64, ParseError> {
    tok.strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| perr(line, format!("expected '{key}=<value>'")))
}

fn parse_coeff(tok: &str, q: u64, line: usize) -> Result<u64, ParseError> {
    let c = parse_bigint(tok, line)?;
    let r = ((c % BigInt::from(q)) + BigInt::from(q)) % BigInt::from(q);
    Ok(u64::try_from(r).expect("residue fits"))
}

pub fn parse_poly(text: &str) -> Result<QuadPoly, ParseError> {
    let mut lines = content_lines(text);
    let (ln, args) = header(&mut lines, "poly")?;
    if args.len() != 2 {
        return Err(perr(ln, "expected 'poly q=<q> n=<n>'"));
    }
    let q = parse_kv(args[0], "q", ln)?;
    let n = parse_kv(args[1], "n", ln)? as usize;
    if n > MAX_VARS {
        return Err(perr(ln, "too many variables"));
    }
    let mut f = QuadPoly::new(q, n).map_err(|e| perr(ln, e.to_string()))?;
    let var = |tok: &str, ln: usize| -> Result<usize, ParseError> {
        let i = parse_usize(tok, ln, "variable")?;
        if i >= n {
            return Err(perr(ln, format!("variable {i} out of range")));
        }
        Ok(i)
    };
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match (toks.first().copied(), toks.len()) {
            (Some("q"), 4) => {
                let i = var(toks[1], ln)?;
                let j = var(toks[2], ln)?;
                if i > j {
                    return Err(perr(ln, "quadratic terms need i <= j"));
                }
                f.add_quad(i, j, parse_coeff(toks[3], q, ln)?);
            }
            (Some("l"), 3) => {
                let i = var(toks[1], ln)?;
                f.add_lin(i, parse_coeff(toks[2], q, ln)?);
            }
            (Some("k"), 2) => f.add_const(parse_coeff(toks[1], q, ln)?),
            _ => return Err(perr(ln, "expected 'q i j c', 'l i c' or 'k c'")),
        }
    }
    Ok(f)
}

pub fn serialize_poly(f: &QuadPoly) -> String {
    let mut s = format!("poly q={} n={}\n", f.modulus(), f.num_vars());
    for ((i, j), c) in f.quad_terms() {
        let _ = writeln!(s, "q {i} {j} {c}");
    }
    for (i, c) in f.lin_terms() {
        let _ = writeln!(s, "l {i} {c}");
    }
    if f.constant() != 0 {
        let _ = writeln!(s, "k {}", f.constant());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip() {
        let text = "# Hadamard\nmatrix 2\n0 0 1/1\n0 1 1/1\n1 1 -1\n";
        let a = parse_matrix(text).unwrap();
        assert_eq!(format_entry(a.get(1, 1)), "1/1*w(2,1)");
        assert_eq!(parse_matrix(&serialize_matrix(&a)).unwrap(), a);
    }

    #[test]
    fn matrix_errors_carry_line_numbers() {
        let err = parse_matrix("matrix 2\n\n1 0 1/1\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_matrix("matrix 2\n0 1 1/1*w(0,1)\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse_matrix("graph 2\n").is_err());
    }

    #[test]
    fn graph_roundtrip() {
        let g = parse_graph("graph 3\n2 0 1\n1 1 3 # loop\n").unwrap();
        assert_eq!(g.edges()[0].u, 0);
        assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
        assert_eq!(parse_graph("graph 2\n0 1 0\n").unwrap_err().line, 2);
    }

    #[test]
    fn poly_roundtrip() {
        let f = parse_poly("poly q=4 n=2\nq 0 0 1\nq 0 1 -2\nl 1 7\nk 5\n").unwrap();
        assert_eq!(f.eval(&[1, 1]), (1 + 2 + 3 + 1) % 4);
        assert_eq!(parse_poly(&serialize_poly(&f)).unwrap(), f);
        assert!(parse_poly("poly q=6 n=1\n").is_err());
    }
}
