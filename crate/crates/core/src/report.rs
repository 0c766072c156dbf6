//! Line-delimited structured records shared by scan reports, proof
//! reports and checkpoints, with a CSV projection.
//!
//! One record per line: `kind key=value key=value ...`, keys in stable
//! insertion order. Value encodings are chosen so the type is recoverable
//! from the text alone:
//!
//! * text: double-quoted with `\"` and `\\` escapes,
//! * booleans: `true` / `false`,
//! * integers: exact decimal digits with optional sign,
//! * rationals: `numerator/denominator`,
//! * reals: `<decimal>@<precision-bits>@<dn|up>`, the payload of a
//!   directed-rounding evaluation.
//!
//! Serialization is bit-exact: parsing a serialized report reproduces the
//! same in-memory structure, and equal structures serialize identically.

use crate::rfloat::Round;
use num::{BigInt, BigRational};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    Int(BigInt),
    Rat(BigRational),
    Real { dec: String, prec: u32, dir: Round },
    Bool(bool),
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Value {
        Value::Int(n.into())
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    fn encode(&self, out: &mut String) {
        match self {
            Value::Text(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Value::Int(n) => {
                let _ = write!(out, "{n}");
            }
            Value::Rat(q) => {
                let _ = write!(out, "{}/{}", q.numer(), q.denom());
            }
            Value::Real { dec, prec, dir } => {
                let tag = match dir {
                    Round::Down => "dn",
                    Round::Up => "up",
                };
                let _ = write!(out, "{dec}@{prec}@{tag}");
            }
            Value::Bool(b) => {
                let _ = write!(out, "{b}");
            }
        }
    }

    fn decode(tok: &str, line: usize) -> Result<Value, ReportError> {
        let err = |msg: String| ReportError::Parse { line, msg };
        if let Some(rest) = tok.strip_prefix('"') {
            // the tokenizer already validated the closing quote
            let body = rest
                .strip_suffix('"')
                .ok_or_else(|| err(format!("unterminated text token {tok:?}")))?;
            let mut s = String::new();
            let mut chars = body.chars();
            while let Some(c) = chars.next() {
                if c == '\\' {
                    match chars.next() {
                        Some('"') => s.push('"'),
                        Some('\\') => s.push('\\'),
                        Some('n') => s.push('\n'),
                        other => return Err(err(format!("bad escape {other:?}"))),
                    }
                } else {
                    s.push(c);
                }
            }
            return Ok(Value::Text(s));
        }
        if tok == "true" {
            return Ok(Value::Bool(true));
        }
        if tok == "false" {
            return Ok(Value::Bool(false));
        }
        if tok.contains('@') {
            let mut parts = tok.split('@');
            let (dec, prec, tag) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(d), Some(p), Some(t), None) => (d, p, t),
                _ => return Err(err(format!("malformed real {tok:?}"))),
            };
            let prec: u32 = prec
                .parse()
                .map_err(|_| err(format!("bad precision in {tok:?}")))?;
            let dir = match tag {
                "dn" => Round::Down,
                "up" => Round::Up,
                _ => return Err(err(format!("bad rounding tag in {tok:?}"))),
            };
            return Ok(Value::Real {
                dec: dec.to_string(),
                prec,
                dir,
            });
        }
        if let Some((n, d)) = tok.split_once('/') {
            let n: BigInt = n.parse().map_err(|_| err(format!("bad rational {tok:?}")))?;
            let d: BigInt = d.parse().map_err(|_| err(format!("bad rational {tok:?}")))?;
            if d == BigInt::from(0) {
                return Err(err(format!("zero denominator in {tok:?}")));
            }
            return Ok(Value::Rat(BigRational::new(n, d)));
        }
        tok.parse::<BigInt>()
            .map(Value::Int)
            .map_err(|_| err(format!("unrecognized value {tok:?}")))
    }
}

/// One report line: a kind tag plus ordered key/value fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, Value)>,
}

impl Record {
    pub fn new(kind: impl Into<String>) -> Record {
        Record {
            kind: kind.into(),
            fields: Vec::new(),
        }
    }

    pub fn push(mut self, key: impl Into<String>, value: Value) -> Record {
        let key = key.into();
        debug_assert!(valid_token(&key), "bad key {key:?}");
        self.fields.push((key, value));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn get_int(&self, key: &str) -> Option<&BigInt> {
        match self.get(key) {
            Some(Value::Int(n)) => Some(n),
            _ => None,
        }
    }

    pub fn get_u64(&self, key: &str) -> Option<u64> {
        use num::ToPrimitive;
        self.get_int(key).and_then(|n| n.to_u64())
    }

    pub fn get_text(&self, key: &str) -> Option<&str> {
        match self.get(key) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn get_bool(&self, key: &str) -> Option<bool> {
        match self.get(key) {
            Some(Value::Bool(b)) => Some(*b),
            _ => None,
        }
    }

    pub fn get_rat(&self, key: &str) -> Option<&BigRational> {
        match self.get(key) {
            Some(Value::Rat(q)) => Some(q),
            _ => None,
        }
    }
}

fn valid_token(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || "_-.".contains(c))
}

/// Serialize records, one per line, trailing newline included.
pub fn serialize_lines(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        debug_assert!(valid_token(&r.kind), "bad kind {:?}", r.kind);
        out.push_str(&r.kind);
        for (k, v) in &r.fields {
            out.push(' ');
            out.push_str(k);
            out.push('=');
            v.encode(&mut out);
        }
        out.push('\n');
    }
    out
}

/// Split a line into kind and `key=value` tokens, respecting quotes.
fn tokenize(line: &str, lineno: usize) -> Result<Vec<String>, ReportError> {
    let mut toks = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    let mut escaped = false;
    for c in line.chars() {
        if in_quotes {
            cur.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_quotes = false;
            }
        } else if c == '"' {
            cur.push(c);
            in_quotes = true;
        } else if c == ' ' {
            if !cur.is_empty() {
                toks.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(c);
        }
    }
    if in_quotes {
        return Err(ReportError::Parse {
            line: lineno,
            msg: "unterminated quote".into(),
        });
    }
    if !cur.is_empty() {
        toks.push(cur);
    }
    Ok(toks)
}

/// Parse a serialized report. Lines must be complete; a trailing partial
/// line (no terminating newline) is ignored, which makes interrupted
/// checkpoint files recoverable.
pub fn parse_lines(text: &str) -> Result<Vec<Record>, ReportError> {
    let complete = match text.rfind('\n') {
        Some(idx) => &text[..=idx],
        None => "",
    };
    let mut records = Vec::new();
    for (i, line) in complete.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let toks = tokenize(line, lineno)?;
        let kind = toks[0].clone();
        if !valid_token(&kind) {
            return Err(ReportError::Parse {
                line: lineno,
                msg: format!("bad record kind {kind:?}"),
            });
        }
        let mut rec = Record::new(kind);
        for tok in &toks[1..] {
            let (k, v) = tok.split_once('=').ok_or_else(|| ReportError::Parse {
                line: lineno,
                msg: format!("field without '=': {tok:?}"),
            })?;
            if !valid_token(k) {
                return Err(ReportError::Parse {
                    line: lineno,
                    msg: format!("bad key {k:?}"),
                });
            }
            rec.fields.push((k.to_string(), Value::decode(v, lineno)?));
        }
        records.push(rec);
    }
    Ok(records)
}

/// CSV projection in long form: record_index,record_kind,key,value.
pub fn to_csv(records: &[Record]) -> String {
    let mut out = String::from("record_index,record_kind,key,value\n");
    for (i, r) in records.iter().enumerate() {
        for (k, v) in &r.fields {
            let mut enc = String::new();
            v.encode(&mut enc);
            let _ = writeln!(out, "{i},{},{k},{}", r.kind, csv_quote(&enc));
        }
    }
    out
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
