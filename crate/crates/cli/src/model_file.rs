//! Plain-text model files.
//!
//! ```text
//! lfbgw-model v1
//! # comment
//! types = 2
//! m = 1.0
//! g = 0.5 0.5
//! H =
//! 0.1 0.2
//! 0.3 0.0
//! ```
//!
//! A life-law file replaces `types`/`g`/`H` with the tail probabilities and
//! a tail rule:
//!
//! ```text
//! lfbgw-model v1
//! m = 1.0
//! life d = 0.5 0.25 0.125
//! tail = geometric 0.5
//! ```
//!
//! Tail rules: `zero`, `geometric <ratio>`, `example1 <gamma> <k> <c>`
//! (the family `dₙ = c n^-k e^-γn`).

use lfbgw_core::cmj::Tail;
use lfbgw_core::{LifeLaw, Matrix, ModelTriplet};

use crate::error::CliError;

pub const HEADER: &str = "lfbgw-model v1";

/// A parsed model file: either a full triplet or a bare life law.
#[derive(Debug, Clone)]
pub enum ModelFile {
    Triplet(ModelTriplet),
    Life(LifeLaw),
}

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Cursor { lines, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.lines.get(self.pos).copied();
        self.pos += 1;
        item
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }
}

fn invalid(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Validation(format!("line {line}: {}", msg.into()))
}

fn parse_floats(line: usize, text: &str) -> Result<Vec<f64>, CliError> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| invalid(line, format!("expected a number, found `{tok}`")))
        })
        .collect()
}

fn key_value<'a>(line: usize, text: &'a str, key: &str) -> Result<&'a str, CliError> {
    let mut parts = text.splitn(2, '=');
    let found = parts.next().unwrap_or("").trim();
    if found != key {
        return Err(invalid(line, format!("expected `{key} = ...`, found `{found}`")));
    }
    parts
        .next()
        .map(str::trim)
        .ok_or_else(|| invalid(line, format!("`{key}` needs a value")))
}

/// Parses the documented plain-text schema with line-anchored errors.
pub fn parse_model(text: &str) -> Result<ModelFile, CliError> {
    let mut cur = Cursor::new(text);
    match cur.next() {
        Some((_, line)) if line == HEADER => {}
        Some((n, line)) => return Err(invalid(n, format!("expected header `{HEADER}`, found `{line}`"))),
        None => return Err(CliError::Validation("empty model file".into())),
    }

    let (n_first, first) = cur
        .peek()
        .ok_or_else(|| CliError::Validation("model body is missing".into()))?;

    if first.starts_with("types") {
        cur.next();
        let types_text = key_value(n_first, first, "types")?;
        let a: usize = types_text
            .parse()
            .map_err(|_| invalid(n_first, format!("bad type count `{types_text}`")))?;
        if a == 0 {
            return Err(invalid(n_first, "type count must be positive"));
        }
        let (n_m, m_line) = cur.next().ok_or_else(|| invalid(n_first, "missing `m = ...`"))?;
        let m: f64 = key_value(n_m, m_line, "m")?
            .parse()
            .map_err(|_| invalid(n_m, "bad value for m"))?;
        let (n_g, g_line) = cur.next().ok_or_else(|| invalid(n_m, "missing `g = ...`"))?;
        let g = parse_floats(n_g, key_value(n_g, g_line, "g")?)?;
        if g.len() != a {
            return Err(invalid(n_g, format!("g has {} entries, expected {a}", g.len())));
        }
        let gsum: f64 = g.iter().sum();
        if (gsum - 1.0).abs() > 1e-12 {
            return Err(invalid(n_g, format!("g sums to {gsum}, expected 1")));
        }
        let (n_h, h_line) = cur.next().ok_or_else(|| invalid(n_g, "missing `H =`"))?;
        if h_line.trim_end_matches('=').trim() != "H" {
            return Err(invalid(n_h, format!("expected `H =`, found `{h_line}`")));
        }
        let mut rows = Vec::with_capacity(a);
        for i in 0..a {
            let (n_row, row_line) = cur
                .next()
                .ok_or_else(|| invalid(n_h, format!("H needs {a} rows, found {i}")))?;
            let row = parse_floats(n_row, row_line)?;
            if row.len() != a {
                return Err(invalid(
                    n_row,
                    format!("row {} has {} entries, expected {a}", i + 1, row.len()),
                ));
            }
            if row.iter().any(|&x| x < 0.0) {
                return Err(invalid(n_row, format!("row {} has a negative entry", i + 1)));
            }
            let sum: f64 = row.iter().sum();
            if sum > 1.0 + 1e-12 {
                return Err(invalid(n_row, format!("row {} sum exceeds 1 ({sum})", i + 1)));
            }
            rows.push(row);
        }
        if let Some((n_extra, extra)) = cur.next() {
            return Err(invalid(n_extra, format!("unexpected trailing content `{extra}`")));
        }
        let h = Matrix::from_rows(&rows).map_err(|e| CliError::Validation(e.to_string()))?;
        let t = ModelTriplet::new(h, g, m).map_err(|e| CliError::Validation(e.to_string()))?;
        return Ok(ModelFile::Triplet(t));
    }

    // Life-law body: m, life d, tail.
    let (n_m, m_line) = cur.next().unwrap();
    let m: f64 = key_value(n_m, m_line, "m")?
        .parse()
        .map_err(|_| invalid(n_m, "bad value for m"))?;
    let (n_d, d_line) = cur.next().ok_or_else(|| invalid(n_m, "missing `life d = ...`"))?;
    let d_text = d_line
        .strip_prefix("life")
        .map(str::trim)
        .ok_or_else(|| invalid(n_d, format!("expected `life d = ...`, found `{d_line}`")))?;
    let d = parse_floats(n_d, key_value(n_d, d_text, "d")?)?;
    let (n_t, t_line) = cur.next().ok_or_else(|| invalid(n_d, "missing `tail = ...`"))?;
    let tail_spec = key_value(n_t, t_line, "tail")?;
    let mut toks = tail_spec.split_whitespace();
    let tail = match toks.next() {
        Some("zero") => Tail::ZeroBeyond,
        Some("geometric") => {
            let r: f64 = toks
                .next()
                .parse_or(n_t, "geometric tail needs a ratio")?;
            Tail::Geometric { ratio: r }
        }
        Some("example1") => {
            let gamma: f64 = toks.next().parse_or(n_t, "example1 tail needs gamma")?;
            let k: f64 = toks.next().parse_or(n_t, "example1 tail needs k")?;
            let c: f64 = toks.next().parse_or(n_t, "example1 tail needs c")?;
            Tail::PowerExp { c, gamma, k }
        }
        other => {
            return Err(invalid(
                n_t,
                format!("unknown tail rule `{}`", other.unwrap_or("")),
            ))
        }
    };
    if toks.next().is_some() {
        return Err(invalid(n_t, "trailing tokens after the tail rule"));
    }
    if let Some((n_extra, extra)) = cur.next() {
        return Err(invalid(n_extra, format!("unexpected trailing content `{extra}`")));
    }
    let life = LifeLaw::new(d, m, tail).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(ModelFile::Life(life))
}

trait ParseTok {
    fn parse_or(self, line: usize, msg: &str) -> Result<f64, CliError>;
}

impl ParseTok for Option<&str> {
    fn parse_or(self, line: usize, msg: &str) -> Result<f64, CliError> {
        self.ok_or_else(|| invalid(line, msg))?
            .parse()
            .map_err(|_| invalid(line, msg))
    }
}

/// Canonical serialization; floats carry 17 significant digits so that
/// parse ∘ serialize is the identity on the stored values.
pub fn serialize_model(model: &ModelFile) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    match model {
        ModelFile::Triplet(t) => {
            out.push_str(&format!("types = {}\n", t.dim()));
            out.push_str(&format!("m = {}\n", fmt_f64(t.m())));
            let g: Vec<String> = t.g().iter().map(|&x| fmt_f64(x)).collect();
            out.push_str(&format!("g = {}\n", g.join(" ")));
            out.push_str("H =\n");
            for i in 0..t.dim() {
                let row: Vec<String> = t.h().row(i).iter().map(|&x| fmt_f64(x)).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        ModelFile::Life(l) => {
            out.push_str(&format!("m = {}\n", fmt_f64(l.m())));
            let d: Vec<String> = l.prefix().iter().map(|&x| fmt_f64(x)).collect();
            out.push_str(&format!("life d = {}\n", d.join(" ")));
            let tail = match l.tail() {
                Tail::ZeroBeyond => "zero".to_string(),
                Tail::Geometric { ratio } => format!("geometric {}", fmt_f64(*ratio)),
                Tail::PowerExp { c, gamma, k } => {
                    format!("example1 {} {} {}", fmt_f64(*gamma), fmt_f64(*k), fmt_f64(*c))
                }
                Tail::Truncated { .. } => "zero".to_string(), // prefix-only laws round-trip their prefix
            };
            out.push_str(&format!("tail = {tail}\n"));
        }
    }
    out
}

/// 17 significant digits, round-trippable.
pub fn fmt_f64(x: f64) -> String {
    let x = x + 0.0; // normalize -0.0
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x:.16e}")
    }
}
