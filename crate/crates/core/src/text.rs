//! Plain-text PDA format.
//!
//! ```text
//! K F Z S
//! <F lines of K tokens, each `*` or a code in [1:S]>
//! ```
//!
//! Tokens are separated by single spaces and every line ends with `\n`.
//! [`write_pda`] emits exactly this canonical form, so reading and writing
//! round-trip bit for bit.

use std::fmt::Write as _;

use thiserror::Error;

use crate::pda::{Entry, Pda, PdaError};

/// A parse failure with a 1-based line and column.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        col,
        msg: msg.into(),
    }
}

/// Splits a line into `(1-based column, token)` pairs.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch == ' ' || ch == '\t' || ch == '\r' {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn number(line: usize, col: usize, tok: &str, what: &str) -> Result<u64, ParseError> {
    tok.parse()
        .map_err(|_| err(line, col, format!("expected {what}, found `{tok}`")))
}

pub fn read_pda(text: &str) -> Result<Pda, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (hl, header) = lines.next().ok_or_else(|| err(1, 1, "missing header"))?;
    let head = tokens(header);
    if head.len() != 4 {
        return Err(err(
            hl,
            1,
            format!("header needs `K F Z S`, found {} fields", head.len()),
        ));
    }
    let names = ["K", "F", "Z", "S"];
    let mut vals = [0u64; 4];
    for (i, (col, tok)) in head.iter().enumerate() {
        vals[i] = number(hl, *col, tok, names[i])?;
    }
    let [k, f, z, s] = vals;
    if k == 0 || f == 0 {
        return Err(err(hl, 1, "K and F must be positive"));
    }
    if s == 0 || s > u32::MAX as u64 {
        return Err(err(hl, head[3].0, "S must be in [1:2^32-1]"));
    }
    let (k, f) = (k as usize, f as usize);

    let mut cells = Vec::with_capacity(k * f);
    let mut last_line = hl;
    for row in 0..f {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| err(last_line + 1, 1, format!("expected {f} rows, found {row}")))?;
        last_line = ln;
        let toks = tokens(line);
        if toks.len() != k {
            let col = toks.get(k).map(|t| t.0).unwrap_or(line.len() + 1);
            return Err(err(
                ln,
                col,
                format!("expected {k} entries, found {}", toks.len()),
            ));
        }
        for (col, tok) in toks {
            if tok == "*" {
                cells.push(Entry::Star);
                continue;
            }
            let code = number(ln, col, tok, "`*` or a code")?;
            if code == 0 || code > s {
                return Err(err(ln, col, format!("code {code} is outside [1:{s}]")));
            }
            cells.push(Entry::Code(code as u32));
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, 1, format!("unexpected content after {f} rows")));
    }

    let p = Pda::new(f, k, s as u32, cells).map_err(|e| err(hl, 1, e.to_string()))?;
    match p.stars_per_column() {
        Ok(zz) if zz as u64 == z => Ok(p),
        Ok(zz) => Err(err(
            hl,
            head[2].0,
            format!("header claims Z = {z} but columns have {zz} stars"),
        )),
        Err(PdaError::UnequalColumns {
            col,
            expected,
            found,
        }) => Err(err(
            hl,
            head[2].0,
            format!("column {col} has {found} stars but column 0 has {expected}"),
        )),
        Err(e) => Err(err(hl, 1, e.to_string())),
    }
}

/// Canonical text. The `Z` field is taken from column 0.
pub fn write_pda(p: &Pda) -> String {
    let z = p.column_star_counts()[0];
    let mut out = String::with_capacity(p.cell_count() * 3 + 32);
    writeln!(out, "{} {} {} {}", p.cols(), p.rows(), z, p.codes()).unwrap();
    for j in 0..p.rows() {
        for (k, e) in p.row(j).iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            write!(out, "{e}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const NS2_TEXT: &str = "4 4 2 4\n* * 3 1\n2 * * 4\n1 3 * *\n* 2 4 *\n";

    #[test]
    fn reads_and_roundtrips() {
        let p = read_pda(NS2_TEXT).unwrap();
        assert_eq!(
            p,
            Pda::from_code_rows(&[&[0, 0, 3, 1], &[2, 0, 0, 4], &[1, 3, 0, 0], &[0, 2, 4, 0]])
                .unwrap()
        );
        assert_eq!(write_pda(&p), NS2_TEXT);
    }

    #[test]
    fn tolerant_whitespace_normalises() {
        let messy = "4 4 2 4\r\n*  * 3 1\n\n2 * * 4\n1 3 * *\n* 2 4 *";
        assert_eq!(write_pda(&read_pda(messy).unwrap()), NS2_TEXT);
    }

    #[test]
    fn wrong_z_header() {
        let e = read_pda(&NS2_TEXT.replacen("4 4 2 4", "4 4 3 4", 1)).unwrap_err();
        assert_eq!((e.line, e.col), (1, 5));
        assert!(e.msg.contains("Z = 3"));
    }

    #[test]
    fn errors_have_positions() {
        let e = read_pda("4 4 2 4\n* * 3 1\n2 * x 4\n1 3 * *\n* 2 4 *\n").unwrap_err();
        assert_eq!((e.line, e.col), (3, 5));
        let e = read_pda("4 4 2 4\n* * 3 1\n2 * * 9\n1 3 * *\n* 2 4 *\n").unwrap_err();
        assert_eq!((e.line, e.col), (3, 7));
        let e = read_pda("4 4 2 4\n* * 3 1\n2 * *\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = read_pda("4 4 2 4\n* * 3 1\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = read_pda("4 4 2\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(read_pda("").is_err());
    }
}
