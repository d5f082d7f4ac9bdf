//! Line-oriented text formats for input tuples and extensions.
//!
//! Entries are decimal rational literals `a` or `a/b`; floats are not
//! accepted. Blank lines and `#` comment lines are ignored. Writes are
//! canonical (lowest terms, positive denominator), so write-then-read
//! round-trips bit-exactly.

use crate::extension::{ExtensionTuple, InputTuple};
use crate::matrix::{Matrix, Scalar};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt::Write as _;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        msg: msg.into(),
    }
}

/// A parsed tuple file: the input matrices plus an optional target size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleDocument {
    pub input: InputTuple,
    pub r: Option<usize>,
}

fn parse_scalar(tok: &str, line: usize) -> Result<Scalar, ParseError> {
    let parse_int = |s: &str| -> Result<BigInt, ParseError> {
        BigInt::from_str(s).map_err(|_| err(line, format!("invalid integer literal '{s}'")))
    };
    match tok.split_once('/') {
        None => Ok(Scalar::from_integer(parse_int(tok)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(err(line, format!("zero denominator in '{tok}'")));
            }
            Ok(Scalar::new(num, den))
        }
    }
}

fn format_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Logical lines with their 1-based numbers, comments and blanks removed.
fn logical_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            lines: logical_lines(text),
            pos: 0,
        }
    }

    fn next(&mut self) -> Result<(usize, &'a str), ParseError> {
        let last = self.lines.last().map_or(0, |(n, _)| *n);
        let item = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| err(last + 1, "unexpected end of file"))?;
        self.pos += 1;
        Ok(item)
    }

    fn expect_keyword_value(&mut self, key: &str) -> Result<(usize, &'a str), ParseError> {
        let (line, text) = self.next()?;
        let mut parts = text.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(k), Some(v), None) if k == key => Ok((line, v)),
            _ => Err(err(line, format!("expected '{key} <value>', got '{text}'"))),
        }
    }

    fn expect_usize(&mut self, key: &str) -> Result<usize, ParseError> {
        let (line, v) = self.expect_keyword_value(key)?;
        v.parse()
            .map_err(|_| err(line, format!("invalid count '{v}' for '{key}'")))
    }

    fn expect_literal(&mut self, word: &str) -> Result<(), ParseError> {
        let (line, text) = self.next()?;
        if text == word {
            Ok(())
        } else {
            Err(err(line, format!("expected '{word}', got '{text}'")))
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.lines.len()
    }

    fn parse_matrix(&mut self, rows: usize, cols: usize) -> Result<Matrix, ParseError> {
        self.expect_literal("matrix")?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (line, text) = self.next()?;
            let toks: Vec<&str> = text.split_whitespace().collect();
            if toks.len() != cols {
                return Err(err(
                    line,
                    format!("expected {cols} entries in row, got {}", toks.len()),
                ));
            }
            for tok in toks {
                data.push(parse_scalar(tok, line)?);
            }
        }
        Ok(Matrix::from_rows(
            data.chunks(cols).map(|c| c.to_vec()).collect(),
        ))
    }
}

pub fn read_tuple(text: &str) -> Result<TupleDocument, ParseError> {
    let mut cur = Cursor::new(text);
    cur.expect_literal("tuple")?;
    let n = cur.expect_usize("n")?;
    let p = cur.expect_usize("p")?;
    if p == 0 {
        return Err(err(0, "p must be at least 1"));
    }
    // Optional size line before the matrices.
    let r = if let Some(&(_, text)) = cur.lines.get(cur.pos) {
        if text.starts_with("r ") || text == "r" {
            Some(cur.expect_usize("r")?)
        } else {
            None
        }
    } else {
        None
    };
    if let Some(r) = r {
        if r < n {
            return Err(err(0, format!("r = {r} must be at least n = {n}")));
        }
    }
    let mut matrices = Vec::with_capacity(p);
    for _ in 0..p {
        matrices.push(cur.parse_matrix(n, n)?);
    }
    if !cur.at_end() {
        let (line, text) = cur.next()?;
        return Err(err(line, format!("unexpected trailing content '{text}'")));
    }
    Ok(TupleDocument {
        input: InputTuple::new(n, matrices),
        r,
    })
}

pub fn write_tuple(doc: &TupleDocument) -> String {
    let mut out = String::from("tuple\n");
    let n = doc.input.n();
    writeln!(out, "n {n}").unwrap();
    writeln!(out, "p {}", doc.input.p()).unwrap();
    if let Some(r) = doc.r {
        writeln!(out, "r {r}").unwrap();
    }
    for m in doc.input.matrices() {
        write_matrix(&mut out, m);
    }
    out
}

pub fn read_extension(text: &str) -> Result<ExtensionTuple, ParseError> {
    let mut cur = Cursor::new(text);
    cur.expect_literal("extension")?;
    let n = cur.expect_usize("n")?;
    let r = cur.expect_usize("r")?;
    let p = cur.expect_usize("p")?;
    if r < n {
        return Err(err(0, format!("r = {r} must be at least n = {n}")));
    }
    if p == 0 {
        return Err(err(0, "p must be at least 1"));
    }
    let mut matrices = Vec::with_capacity(p);
    for _ in 0..p {
        matrices.push(cur.parse_matrix(r, r)?);
    }
    if !cur.at_end() {
        let (line, text) = cur.next()?;
        return Err(err(line, format!("unexpected trailing content '{text}'")));
    }
    Ok(ExtensionTuple::from_full(n, matrices))
}

pub fn write_extension(ext: &ExtensionTuple) -> String {
    let mut out = String::from("extension\n");
    writeln!(out, "n {}", ext.n()).unwrap();
    writeln!(out, "r {}", ext.r()).unwrap();
    writeln!(out, "p {}", ext.p()).unwrap();
    for z in ext.assemble_all() {
        write_matrix(&mut out, &z);
    }
    out
}

fn write_matrix(out: &mut String, m: &Matrix) {
    out.push_str("matrix\n");
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(format_scalar).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}
