//! The `.mds` text format.
//!
//! ```text
//! # optional comment lines
//! MDS q=3 n=3 m=3
//! 0 0 0
//! 1 1 1
//! 2 2 2
//! ```
//!
//! Writers always emit sorted words, single spaces and a trailing newline, so
//! equal codes serialize to identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::code::Code;
use crate::error::{Error, Result};

fn header_field(tok: Option<&str>, key: &str) -> std::result::Result<usize, String> {
    let tok = tok.ok_or_else(|| format!("missing `{key}=` in header"))?;
    let v = tok
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| format!("expected `{key}=<int>`, found `{tok}`"))?;
    v.parse().map_err(|_| format!("bad integer in `{tok}`"))
}

/// Parses a code; `origin` labels diagnostics.
pub fn parse_code(text: &str, origin: &str) -> Result<Code> {
    let err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("MDS") {
        return Err(err(hline + 1, format!("expected `MDS q=.. n=.. m=..`, found `{header}`")));
    }
    let q = header_field(toks.next(), "q").map_err(|m| err(hline + 1, m))?;
    let n = header_field(toks.next(), "n").map_err(|m| err(hline + 1, m))?;
    let m = header_field(toks.next(), "m").map_err(|m| err(hline + 1, m))?;
    if let Some(extra) = toks.next() {
        return Err(err(hline + 1, format!("unexpected header token `{extra}`")));
    }
    if n == 0 || !(2..=crate::code::MAX_Q).contains(&q) {
        return Err(err(hline + 1, format!("unsupported parameters q={q} n={n}")));
    }
    let mut data = Vec::with_capacity(m * n);
    let mut count = 0;
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            let s: usize = tok.parse().map_err(|_| err(ln + 1, format!("bad symbol `{tok}`")))?;
            if s >= q {
                return Err(err(ln + 1, format!("symbol {s} out of range for q={q}")));
            }
            data.push(s as u8);
        }
        if data.len() - before != n {
            return Err(err(ln + 1, format!("expected {n} symbols, found {}", data.len() - before)));
        }
        count += 1;
    }
    if count != m {
        return Err(err(hline + 1, format!("header declares m={m} but {count} words follow")));
    }
    Code::from_flat(q, n, data).map_err(|e| err(hline + 1, e.to_string()))
}

/// Serializes a code, with each comment emitted as a `# ` line before the header.
pub fn write_code(code: &Code, comments: &[String]) -> String {
    let mut out = String::with_capacity(code.as_flat().len() * 2 + 64);
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "MDS q={} n={} m={}", code.q(), code.n(), code.len());
    for w in code.words() {
        for (i, s) in w.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{s}");
        }
        out.push('\n');
    }
    out
}

pub fn read_code_file(path: &Path) -> Result<Code> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_code(&text, &path.display().to_string())
}

pub fn write_code_file(path: &Path, code: &Code, comments: &[String]) -> Result<()> {
    fs::write(path, write_code(code, comments)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_bytes() {
        let c = Code::new(3, 2, [[2, 1], [0, 0], [1, 2]]).unwrap();
        let text = write_code(&c, &["provenance: test".into()]);
        assert_eq!(text, "# provenance: test\nMDS q=3 n=2 m=3\n0 0\n1 2\n2 1\n");
        assert_eq!(parse_code(&text, "t").unwrap(), c);
    }

    #[test]
    fn unsorted_input_is_normalized() {
        let c = parse_code("MDS q=3 n=2 m=2\n2 2\n0   1\n", "t").unwrap();
        assert_eq!(write_code(&c, &[]), "MDS q=3 n=2 m=2\n0 1\n2 2\n");
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let e = parse_code("MDS q=3 n=2 m=2\n0 1\n0 3\n", "f.mds").unwrap_err();
        assert!(e.to_string().starts_with("f.mds:3:"), "{e}");
        let e = parse_code("MDS q=3 n=2 m=3\n0 1\n0 2\n", "f.mds").unwrap_err();
        assert!(e.to_string().contains("m=3"), "{e}");
        assert!(parse_code("MDS q=3 n=2\n", "f").is_err());
        assert!(parse_code("MDS q=3 n=2 m=1\n0 1 2\n", "f").is_err());
    }
}
