//! Line-oriented text form of kets and operators.
//!
//! ```text
//! ket photons=2 order=paths-then-pols
//! 0100 0.7071067811865476 0
//! 1000 0.7071067811865476 0
//! ```
//!
//! Operators use the same header with `operator` and `row col re im` lines.
//! Numbers are written in shortest round-trip form, so text -> value -> text
//! is exact.

use std::fmt::Write;

use num_complex::Complex64;

use super::{BasisConvention, Ket, Operator};
use crate::error::{Error, Result};
use crate::parse::{content_lines, parse_complex};

const ORDER: &str = "order=paths-then-pols";

impl Ket {
    pub fn to_text(&self) -> String {
        let conv = self.convention();
        let mut out = format!("ket photons={} {ORDER}\n", conv.photons());
        for (index, amp) in self.iter() {
            let _ = writeln!(out, "{} {:?} {:?}", conv.label(index), amp.re, amp.im);
        }
        out
    }
}

impl Operator {
    pub fn to_text(&self) -> String {
        let conv = self.convention();
        let mut out = format!("operator photons={} {ORDER}\n", conv.photons());
        let mut entries: Vec<_> = self.entries().collect();
        entries.sort_by_key(|&(r, c, _)| (r, c));
        for (r, c, v) in entries {
            let _ = writeln!(out, "{} {} {:?} {:?}", conv.label(r), conv.label(c), v.re, v.im);
        }
        out
    }
}

pub(crate) fn parse_header(line_no: usize, line: &str, kind: &str) -> Result<BasisConvention> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(kind) {
        return Err(Error::parse(line_no, format!("expected `{kind}` header")));
    }
    let mut photons = None;
    let mut order_seen = false;
    for tok in tokens {
        if let Some(n) = tok.strip_prefix("photons=") {
            let n: usize = n
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad photon count `{n}`")))?;
            photons = Some(n);
        } else if tok == ORDER {
            order_seen = true;
        } else {
            return Err(Error::parse(line_no, format!("unexpected header field `{tok}`")));
        }
    }
    if !order_seen {
        return Err(Error::parse(line_no, format!("header must declare `{ORDER}`")));
    }
    let n = photons.ok_or_else(|| Error::parse(line_no, "header lacks photons=N"))?;
    BasisConvention::new(n).map_err(|e| Error::parse(line_no, e.to_string()))
}

fn label_at(conv: BasisConvention, token: &str, line_no: usize) -> Result<usize> {
    conv.parse_label(token)
        .map_err(|e| Error::parse(line_no, e.to_string()))
}

/// Parses the output of [`Ket::to_text`].
pub fn parse_ket(text: &str) -> Result<Ket> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty ket text"))?;
    let conv = parse_header(line_no, header, "ket")?;
    let mut terms: Vec<(usize, Complex64)> = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [label, re, im] = fields[..] else {
            return Err(Error::parse(line_no, "expected `label re im`"));
        };
        let index = label_at(conv, label, line_no)?;
        if terms.iter().any(|&(k, _)| k == index) {
            return Err(Error::parse(line_no, format!("label `{label}` repeated")));
        }
        terms.push((index, parse_complex(re, im, line_no)?));
    }
    Ket::from_amplitudes(conv, terms)
}

/// Parses the output of [`Operator::to_text`].
pub fn parse_operator(text: &str) -> Result<Operator> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty operator text"))?;
    let conv = parse_header(line_no, header, "operator")?;
    if conv.photons() > super::MAX_OPERATOR_PHOTONS {
        return Err(Error::parse(line_no, "too many photons for an operator"));
    }
    let mut entries = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [row, col, re, im] = fields[..] else {
            return Err(Error::parse(line_no, "expected `row col re im`"));
        };
        let r = label_at(conv, row, line_no)?;
        let c = label_at(conv, col, line_no)?;
        if !seen.insert((r, c)) {
            return Err(Error::parse(line_no, "matrix entry repeated"));
        }
        entries.push((r, c, parse_complex(re, im, line_no)?));
    }
    Operator::from_entries(conv, entries)
}
