//! Plain-text matrix format.
//!
//! ```text
//! n M
//! a11 a12 ... a1M
//! ...
//! an1 an2 ... anM
//! ```
//!
//! Entries are written with 17 significant digits (`{:.16e}`), so a
//! write/read cycle is lossless.

use std::fmt::Write as _;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Formats a float with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_matrix_text(m: &DenseMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", m.rows(), m.cols()).unwrap();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|&v| format_f64(v)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_matrix_text(text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let parse_dim = |s: &str| {
        s.parse::<usize>().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("bad dimension {s:?}"),
        })
    };
    if dims.len() != 2 {
        return Err(Error::Parse {
            line: 1,
            msg: "header must be `n M`".into(),
        });
    }
    let (n, m) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    let mut data = Vec::with_capacity(n * m);
    let mut read_rows = 0;
    for (lineno, line) in lines {
        if read_rows == n {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("more than {n} rows"),
            });
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("bad number {tok:?}"),
            })?;
            data.push(v);
        }
        if data.len() - before != m {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected {m} entries, found {}", data.len() - before),
            });
        }
        read_rows += 1;
    }
    if read_rows != n {
        return Err(Error::Parse {
            line: read_rows + 2,
            msg: format!("expected {n} rows, found {read_rows}"),
        });
    }
    DenseMatrix::new(n, m, data)
}
