//! `.gpicert` files: a line-oriented, exact, canonical text format for SOS
//! certificates.
//!
//! ```text
//! gpicert 1
//! ring a b
//! meta instance exponents=4,3,2 case=1
//! meta normalization 1
//! meta strictness strict_constant_square
//! meta toolchain gpisos 0.1.0 ipm+ldl
//! target 2
//! 1 0 0
//! 2 2 0
//! squares 1
//! square 2 1
//! 1 1 0
//! end
//! ```
//!
//! A term line is a rational `num/den` (or an integer) followed by one
//! exponent per ring variable. Term lists are strictly ascending in graded-lex
//! order. Every line ends in `\n`, tokens are separated by single spaces and
//! nothing follows `end`. Unknown `meta` keys are kept; known ones are
//! emitted first in a fixed order, the rest sorted by key.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::exactmath::{format_rational, parse_rational, BigRational, Monomial, MultiPoly, Ring};
use crate::gapbuild::{GapPolynomial, Normalization};
use crate::soscert::{strictness_backed, verify_certificate, SosCertificate, SosTerm, StrictnessVerdict};

pub const FORMAT_VERSION: u32 = 1;
pub const EXTENSION: &str = "gpicert";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Metadata {
    /// E.g. `exponents=2,1,1,1 case=3`.
    pub instance: Option<String>,
    pub normalization: Option<Normalization>,
    /// `None` is written as `unchecked`.
    pub strictness: Option<StrictnessVerdict>,
    pub toolchain: String,
    pub extra: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateFile {
    pub ring: Ring,
    pub target: MultiPoly,
    pub squares: Vec<SosTerm>,
    pub meta: Metadata,
}

impl CertificateFile {
    pub fn new(cert: &SosCertificate, target: &MultiPoly, meta: Metadata) -> Result<Self> {
        let ring = target.ring().union(&cert.ring);
        let squares = cert
            .terms
            .iter()
            .map(|t| Ok(SosTerm { coefficient: t.coefficient.clone(), poly: t.poly.embed(&ring)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(CertificateFile { target: target.embed(&ring)?, ring, squares, meta })
    }

    /// File for a certificate of a gap polynomial, with instance and
    /// normalization taken from it.
    pub fn for_gap(cert: &SosCertificate, gap: &GapPolynomial, strictness: Option<StrictnessVerdict>) -> Result<Self> {
        let meta = Metadata {
            instance: Some(gap.instance.descriptor()),
            normalization: Some(gap.normalization),
            strictness,
            toolchain: cert.provenance.clone(),
            extra: BTreeMap::new(),
        };
        Self::new(cert, &gap.poly, meta)
    }

    pub fn certificate(&self) -> SosCertificate {
        let provenance = self.meta.extra.get("provenance").cloned().unwrap_or_else(|| self.meta.toolchain.clone());
        SosCertificate {
            ring: self.ring.clone(),
            target_fingerprint: self.target.fingerprint(),
            terms: self.squares.clone(),
            basis: Vec::new(),
            provenance,
        }
    }

    /// Exact audit: the squares expand to the target and any strictness claim
    /// is backed by a constant square.
    pub fn audit(&self) -> FileAudit {
        let v = verify_certificate(&self.certificate(), &self.target);
        let strictness_ok = self.meta.strictness.as_ref().is_none_or(|s| strictness_backed(&self.certificate(), s));
        FileAudit { identity: v.ok, strictness_backed: strictness_ok, diagnostic: v.diagnostic }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileAudit {
    pub identity: bool,
    pub strictness_backed: bool,
    pub diagnostic: Option<String>,
}

impl FileAudit {
    pub fn passed(&self) -> bool {
        self.identity && self.strictness_backed
    }
}

/// Canonical bytes. Refuses files whose squares do not expand to the target.
pub fn emit(file: &CertificateFile) -> Result<Vec<u8>> {
    let audit = file.audit();
    if !audit.identity {
        return Err(Error::Verification(format!(
            "refusing to emit an unverified certificate: {}",
            audit.diagnostic.unwrap_or_default()
        )));
    }
    if !audit.strictness_backed {
        return Err(Error::Verification("strictness claim not backed by a constant square".into()));
    }
    let mut out = String::new();
    out.push_str(&format!("gpicert {FORMAT_VERSION}\n"));
    out.push_str("ring");
    for name in file.ring.names() {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    let m = &file.meta;
    let mut meta_line = |key: &str, value: &str| {
        check_meta_value(value)?;
        out.push_str(&format!("meta {key} {value}\n"));
        Ok::<(), Error>(())
    };
    if let Some(i) = &m.instance {
        meta_line("instance", i)?;
    }
    if let Some(n) = &m.normalization {
        meta_line("normalization", n.as_str())?;
    }
    meta_line("strictness", &m.strictness.as_ref().map_or("unchecked".to_string(), |s| s.to_string()))?;
    meta_line("toolchain", &m.toolchain)?;
    for (k, v) in &m.extra {
        if KNOWN_KEYS.contains(&k.as_str()) || k.is_empty() || k.contains(char::is_whitespace) {
            return Err(Error::Structural(format!("invalid extra metadata key {k:?}")));
        }
        meta_line(k, v)?;
    }
    out.push_str(&format!("target {}\n", file.target.len()));
    write_terms(&mut out, &file.target);
    out.push_str(&format!("squares {}\n", file.squares.len()));
    for sq in &file.squares {
        let poly = sq.poly.embed(&file.ring)?;
        out.push_str(&format!("square {} {}\n", format_rational(&sq.coefficient), poly.len()));
        write_terms(&mut out, &poly);
    }
    out.push_str("end\n");
    Ok(out.into_bytes())
}

const KNOWN_KEYS: [&str; 4] = ["instance", "normalization", "strictness", "toolchain"];

fn check_meta_value(v: &str) -> Result<()> {
    if v.is_empty() || v.contains('\n') || v.contains('\r') || v.starts_with(' ') || v.ends_with(' ') {
        return Err(Error::Structural(format!("metadata value {v:?} cannot be written on one line")));
    }
    Ok(())
}

fn write_terms(out: &mut String, p: &MultiPoly) {
    for (mono, c) in p.terms() {
        out.push_str(&format_rational(c));
        for e in mono.exponents() {
            out.push(' ');
            out.push_str(&e.to_string());
        }
        out.push('\n');
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

struct Lines<'a> {
    src: &'a str,
    pos: usize,
}

struct Line<'a> {
    text: &'a str,
    start: usize,
}

impl<'a> Line<'a> {
    fn err(&self, col: usize, message: impl Into<String>) -> ParseError {
        ParseError { offset: self.start + col, message: message.into() }
    }

    /// Tokens with their column offsets.
    fn tokens(&self) -> std::result::Result<Vec<(usize, &'a str)>, ParseError> {
        let mut out = Vec::new();
        let mut col = 0;
        for tok in self.text.split(' ') {
            if tok.is_empty() {
                return Err(self.err(col, "empty token (tokens are separated by exactly one space)"));
            }
            out.push((col, tok));
            col += tok.len() + 1;
        }
        Ok(out)
    }
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> std::result::Result<Line<'a>, ParseError> {
        let rest = &self.src[self.pos..];
        if rest.is_empty() {
            return Err(ParseError { offset: self.pos, message: format!("unexpected end of file, expected {what}") });
        }
        let Some(nl) = rest.find('\n') else {
            return Err(ParseError { offset: self.src.len(), message: format!("missing newline after {what}") });
        };
        let line = Line { text: &rest[..nl], start: self.pos };
        if let Some(i) = line.text.find('\r') {
            return Err(line.err(i, "carriage return not allowed"));
        }
        self.pos += nl + 1;
        Ok(line)
    }

    fn peek_starts_with(&self, prefix: &str) -> bool {
        self.src[self.pos..].starts_with(prefix)
    }
}

/// Strict parser: exact reconstruction or an error at a byte offset.
pub fn parse(bytes: &[u8]) -> std::result::Result<CertificateFile, ParseError> {
    let src = std::str::from_utf8(bytes).map_err(|e| ParseError {
        offset: e.valid_up_to(),
        message: "file is not valid UTF-8".into(),
    })?;
    let mut lines = Lines { src, pos: 0 };

    let header = lines.next("header")?;
    match header.text.strip_prefix("gpicert ") {
        Some(v) if v == FORMAT_VERSION.to_string() => {}
        Some(v) => return Err(header.err(8, format!("unsupported format version {v:?}"))),
        None => return Err(header.err(0, "expected `gpicert <version>`")),
    }

    let ring_line = lines.next("ring")?;
    let names: Vec<&str> = if ring_line.text == "ring" {
        Vec::new()
    } else {
        let toks = ring_line.tokens()?;
        if toks[0].1 != "ring" {
            return Err(ring_line.err(0, "expected `ring`"));
        }
        toks[1..].iter().map(|t| t.1).collect()
    };
    let ring = Ring::new(names.iter().copied()).map_err(|e| ring_line.err(0, e.to_string()))?;

    let mut meta = Metadata::default();
    let mut seen: Vec<String> = Vec::new();
    let mut toolchain = None;
    while lines.peek_starts_with("meta ") {
        let line = lines.next("meta")?;
        let body = &line.text[5..];
        let Some((key, value)) = body.split_once(' ') else {
            return Err(line.err(5, "expected `meta <key> <value>`"));
        };
        if key.is_empty() || value.is_empty() {
            return Err(line.err(5, "empty metadata key or value"));
        }
        if seen.iter().any(|k| k == key) {
            return Err(line.err(5, format!("duplicate metadata key {key:?}")));
        }
        seen.push(key.to_string());
        let vcol = 6 + key.len();
        match key {
            "instance" => meta.instance = Some(value.to_string()),
            "normalization" => {
                meta.normalization =
                    Some(Normalization::parse(value).ok_or_else(|| line.err(vcol, "unknown normalization"))?)
            }
            "strictness" => {
                meta.strictness = if value == "unchecked" {
                    None
                } else {
                    Some(StrictnessVerdict::parse(value).ok_or_else(|| line.err(vcol, "unknown strictness verdict"))?)
                }
            }
            "toolchain" => toolchain = Some(value.to_string()),
            _ => {
                meta.extra.insert(key.to_string(), value.to_string());
            }
        }
    }
    meta.toolchain = toolchain.unwrap_or_default();

    let target_terms = read_terms(&mut lines, &ring, "target")?;
    let target = MultiPoly::from_terms(&ring, target_terms).expect("arity checked");

    let head = lines.next("squares")?;
    let count = counted(&head, "squares")?;
    let mut squares = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let line = lines.next("square")?;
        let toks = line.tokens()?;
        if toks.len() != 3 || toks[0].1 != "square" {
            return Err(line.err(0, "expected `square <coefficient> <term count>`"));
        }
        let c = parse_rational(toks[1].1).ok_or_else(|| line.err(toks[1].0, "malformed rational"))?;
        if !c.is_positive() {
            return Err(line.err(toks[1].0, "square coefficient must be positive"));
        }
        let n = parse_count(toks[2].1).ok_or_else(|| line.err(toks[2].0, "malformed term count"))?;
        if n == 0 {
            return Err(line.err(toks[2].0, "a square needs at least one term"));
        }
        let terms = read_n_terms(&mut lines, &ring, n)?;
        squares.push(SosTerm { coefficient: c, poly: MultiPoly::from_terms(&ring, terms).expect("arity checked") });
    }
    let end = lines.next("end")?;
    if end.text != "end" {
        return Err(end.err(0, "expected `end`"));
    }
    if lines.pos != src.len() {
        return Err(ParseError { offset: lines.pos, message: "trailing data after `end`".into() });
    }
    Ok(CertificateFile { ring, target, squares, meta })
}

fn parse_count(s: &str) -> Option<usize> {
    if s.is_empty() || (s.len() > 1 && s.starts_with('0')) || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn counted(line: &Line<'_>, keyword: &str) -> std::result::Result<usize, ParseError> {
    let toks = line.tokens()?;
    if toks.len() != 2 || toks[0].1 != keyword {
        return Err(line.err(0, format!("expected `{keyword} <count>`")));
    }
    parse_count(toks[1].1).ok_or_else(|| line.err(toks[1].0, "malformed count"))
}

fn read_terms(
    lines: &mut Lines<'_>,
    ring: &Ring,
    keyword: &str,
) -> std::result::Result<Vec<(Monomial, BigRational)>, ParseError> {
    let head = lines.next(keyword)?;
    let n = counted(&head, keyword)?;
    read_n_terms(lines, ring, n)
}

fn read_n_terms(
    lines: &mut Lines<'_>,
    ring: &Ring,
    n: usize,
) -> std::result::Result<Vec<(Monomial, BigRational)>, ParseError> {
    let mut out: Vec<(Monomial, BigRational)> = Vec::with_capacity(n.min(1 << 16));
    for _ in 0..n {
        let line = lines.next("term")?;
        let toks = line.tokens()?;
        if toks.len() != ring.len() + 1 {
            return Err(line.err(0, format!("term needs a coefficient and {} exponents", ring.len())));
        }
        let c = parse_rational(toks[0].1).ok_or_else(|| line.err(0, "malformed rational"))?;
        if c.is_zero() {
            return Err(line.err(0, "zero coefficient"));
        }
        let mut e = Vec::with_capacity(ring.len());
        for &(col, tok) in &toks[1..] {
            let v = parse_count(tok).and_then(|v| u32::try_from(v).ok());
            e.push(v.ok_or_else(|| line.err(col, "malformed exponent"))?);
        }
        let mono = Monomial::new(e);
        if let Some((prev, _)) = out.last() {
            if *prev >= mono {
                return Err(line.err(0, "terms not in ascending graded-lex order"));
            }
        }
        out.push((mono, c));
    }
    Ok(out)
}
