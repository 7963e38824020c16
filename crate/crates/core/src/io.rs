//! Reading and writing bases in the fplll text format.
//!
//! ```text
//! [[17 0]
//! [15 1]
//! ]
//! ```
//!
//! A basis is an outer bracket holding one bracketed row per basis vector.
//! Entries are decimal integers with an optional leading `-` (a leading `+`
//! is accepted on input). Any ASCII whitespace may separate tokens, including
//! none at all next to a bracket, so `[[1 0][0 1]]` reads as the identity.
//! Nothing but whitespace may follow the closing bracket.
//!
//! [`write_basis`] emits exactly the layout shown above: the first row follows
//! the outer `[`, each row sits on its own line with entries separated by one
//! space, the closing `]` is on a line of its own, and the file ends with a
//! newline.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;

use crate::error::{LatticeError, Result};
use crate::types::{Basis, IntBasis};

/// Longest accepted integer token, in bytes.
pub const MAX_TOKEN_LEN: usize = 1 << 20;

struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text: text.as_bytes(), pos: 0, line: 1, column: 1 }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn bump(&mut self) {
        if self.text[self.pos] == b'\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        self.pos += 1;
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.bump();
        }
    }

    fn error(&self, message: impl Into<String>) -> LatticeError {
        LatticeError::Parse { line: self.line, column: self.column, message: message.into() }
    }

    fn expect(&mut self, want: u8) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{}`, found `{}`", want as char, c as char))),
            None => Err(self.error(format!("expected `{}`, found end of input", want as char))),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let (line, column, start) = (self.line, self.column, self.pos);
        if matches!(self.peek(), Some(b'-' | b'+')) {
            self.bump();
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            if self.pos - start >= MAX_TOKEN_LEN {
                return Err(LatticeError::OverlongToken { line, column, limit: MAX_TOKEN_LEN });
            }
            self.bump();
        }
        let token = std::str::from_utf8(&self.text[start..self.pos]).expect("ASCII digits");
        if token.is_empty() {
            let found = self.peek().map_or("end of input".to_string(), |c| format!("`{}`", c as char));
            return Err(self.error(format!("expected an integer, found {found}")));
        }
        token.trim_start_matches('+').parse().map_err(|_| LatticeError::Parse {
            line,
            column,
            message: format!("malformed integer `{token}`"),
        })
    }
}

/// Parses a basis from fplll-format text.
pub fn parse_basis(text: &str) -> Result<IntBasis> {
    let mut cur = Cursor::new(text);
    cur.expect(b'[')?;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    loop {
        cur.skip_ws();
        match cur.peek() {
            Some(b'[') => {
                cur.bump();
                let (line, column) = (cur.line, cur.column);
                let mut row = Vec::new();
                loop {
                    cur.skip_ws();
                    if cur.peek() == Some(b']') {
                        cur.bump();
                        break;
                    }
                    row.push(cur.integer()?);
                }
                if let Some(first) = rows.first() {
                    if first.len() != row.len() {
                        return Err(LatticeError::Parse {
                            line,
                            column,
                            message: format!("row has {} entries, expected {}", row.len(), first.len()),
                        });
                    }
                }
                rows.push(row);
            }
            Some(b']') => {
                cur.bump();
                break;
            }
            Some(c) => return Err(cur.error(format!("expected `[` or `]`, found `{}`", c as char))),
            None => return Err(cur.error("unterminated basis, expected `]`")),
        }
    }
    cur.skip_ws();
    if cur.peek().is_some() {
        return Err(cur.error("trailing characters after the basis"));
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(cur.error("empty basis"));
    }
    Basis::new(rows)
}

/// Formats a basis as fplll-format text.
pub fn format_basis(basis: &IntBasis) -> String {
    let mut out = String::from("[");
    for row in basis.rows() {
        out.push('[');
        for (j, x) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{x}").expect("writing to a String");
        }
        out.push_str("]\n");
    }
    out.push_str("]\n");
    out
}

pub fn read_basis(path: impl AsRef<Path>) -> Result<IntBasis> {
    parse_basis(&fs::read_to_string(path)?)
}

pub fn write_basis(path: impl AsRef<Path>, basis: &IntBasis) -> Result<()> {
    fs::write(path, format_basis(basis))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_compact_and_spaced_forms() {
        let id = Basis::identity(2);
        assert_eq!(parse_basis("[[1 0][0 1]]").unwrap(), id);
        assert_eq!(parse_basis(" [ [ 1\t0 ]\r\n[0 +1] ]\n\n").unwrap(), id);
        assert_eq!(parse_basis("[[-3 4]\n[5 -6]\n]").unwrap(), Basis::from_i64(&[vec![-3, 4], vec![5, -6]]).unwrap());
    }

    #[test]
    fn writes_fplll_layout() {
        let b = Basis::from_i64(&[vec![17, 0], vec![-15, 1]]).unwrap();
        assert_eq!(format_basis(&b), "[[17 0]\n[-15 1]\n]\n");
        assert_eq!(parse_basis(&format_basis(&b)).unwrap(), b);
    }

    #[test]
    fn reports_positions() {
        match parse_basis("[[1 0]\n[0 x]]") {
            Err(LatticeError::Parse { line: 2, column: 4, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_basis("[[1 0]\n[0 1 2]]") {
            Err(LatticeError::Parse { line: 2, column: 2, message }) => assert!(message.contains("3 entries")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_basis("[[1 0][0 1]] x"), Err(LatticeError::Parse { line: 1, column: 14, .. })));
        assert!(matches!(parse_basis("[[1 0][0 1]"), Err(LatticeError::Parse { .. })));
        assert!(matches!(parse_basis("[[1 -][0 1]]"), Err(LatticeError::Parse { .. })));
        assert!(matches!(parse_basis("[]"), Err(LatticeError::Parse { .. })));
        assert!(matches!(parse_basis(""), Err(LatticeError::Parse { line: 1, column: 1, .. })));
    }

    #[test]
    fn more_rows_than_columns_rejected() {
        assert!(matches!(parse_basis("[[1][2][3]]"), Err(LatticeError::InvalidShape(_))));
    }

    #[test]
    fn overlong_token_guard() {
        let text = format!("[[{}]]", "9".repeat(MAX_TOKEN_LEN + 1));
        assert!(matches!(parse_basis(&text), Err(LatticeError::OverlongToken { line: 1, column: 3, .. })));
    }
}
