//! Concrete syntax: formulas, sequents, models and the three script formats.
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*          left-associative
//! imp     := or ("->" imp)?            right-associative
//! or      := and ("|" and)*
//! and     := neg ("&" neg)*
//! neg     := "~" neg | atom | "(" formula ")"
//! atom    := FUNC "(" LETTER ["," LETTER] ")"
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::proof::{Justification, ProofLine, ProofScript};
use crate::semantics::Model;
use crate::sequent::{
    DeductionJustification, DeductionLine, DeductionScript, Sequent, SequentJustification,
    SequentLine, SequentScript, SmileyRule,
};
use crate::syntax::{is_letter_id, Atom, Connective, Formula, Functor, NameLetter, Substitution};

/// Byte range into the parsed input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }

    pub fn point(at: usize) -> Self {
        SourceSpan { start: at, end: at }
    }

    pub fn covers(&self, offset: usize) -> bool {
        self.start <= offset && offset <= self.end
    }

    fn shifted(self, by: usize) -> Self {
        SourceSpan::new(self.start + by, self.end + by)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unknown functor `{0}`")]
    UnknownFunctor(String),
    #[error("functor `{functor}` takes {expected} letter(s), found {found}")]
    ArityMismatch {
        functor: String,
        expected: usize,
        found: usize,
    },
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(String),
    #[error("invalid name letter `{0}`")]
    BadLetter(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("bad line number: {0}")]
    LineNumber(String),
    #[error("unknown justification `{0}`")]
    UnknownJustification(String),
    #[error("malformed justification: {0}")]
    Justification(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at {span}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
}

impl ParseError {
    fn new(kind: ParseErrorKind, span: SourceSpan) -> Self {
        ParseError { kind, span }
    }

    fn shifted(mut self, by: usize) -> Self {
        self.span = self.span.shifted(by);
        self
    }
}

type Result<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Entails,
    Turnstile,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Entails => "`==>`".into(),
            Tok::Turnstile => "`|-`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let rest = &text[i..];
        let (tok, len) = if c.is_ascii_whitespace() {
            i += 1;
            continue;
        } else if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("==>") {
            (Tok::Entails, 3)
        } else if rest.starts_with("->") {
            (Tok::Imp, 2)
        } else if rest.starts_with("|-") {
            (Tok::Turnstile, 2)
        } else if c.is_ascii_alphabetic() {
            let len = rest
                .bytes()
                .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                .count();
            (Tok::Ident(rest[..len].to_string()), len)
        } else {
            let tok = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'~' => Tok::Not,
                b'&' => Tok::And,
                b'|' => Tok::Or,
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(ParseError::new(
                        ParseErrorKind::UnexpectedChar(ch),
                        SourceSpan::new(i, i + ch.len_utf8()),
                    ));
                }
            };
            (tok, 1)
        };
        out.push((tok, SourceSpan::new(i, i + len)));
        i += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    end: usize,
    open_parens: Vec<SourceSpan>,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            end: text.len(),
            open_parens: Vec::new(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> SourceSpan {
        self.toks
            .get(self.pos)
            .map(|(_, s)| *s)
            .unwrap_or(SourceSpan::point(self.end))
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].1.end
        }
    }

    fn bump(&mut self) -> Option<(Tok, SourceSpan)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.toks.get(self.pos) {
            Some((Tok::RParen, span)) if self.open_parens.is_empty() => {
                ParseError::new(ParseErrorKind::UnbalancedParens, *span)
            }
            Some((tok, span)) => ParseError::new(
                ParseErrorKind::Unexpected {
                    expected: expected.to_string(),
                    found: tok.describe(),
                },
                *span,
            ),
            None if !self.open_parens.is_empty() && expected == "`)`" => ParseError::new(
                ParseErrorKind::UnbalancedParens,
                SourceSpan::new(self.open_parens[self.open_parens.len() - 1].start, self.end),
            ),
            None => ParseError::new(
                ParseErrorKind::UnexpectedEnd(expected.to_string()),
                SourceSpan::point(self.end),
            ),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<SourceSpan> {
        if self.peek() == Some(&tok) {
            Ok(self.bump().expect("peeked").1)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.imp()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.imp()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat(&Tok::Imp) {
            let rhs = self.imp()?;
            Ok(lhs.implies(rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.neg()?;
        while self.eat(&Tok::And) {
            let rhs = self.neg()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn neg(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(self.neg()?.not())
            }
            Some(Tok::LParen) => {
                let open = self.bump().expect("peeked").1;
                self.open_parens.push(open);
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                self.open_parens.pop();
                Ok(inner)
            }
            Some(Tok::Ident(_)) => self.atom(),
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let (tok, fspan) = self.bump().expect("peeked");
        let Tok::Ident(name) = tok else {
            unreachable!("atom starts with an identifier")
        };
        let functor = match Functor::from_tag(&name) {
            Some(f) => f,
            None => return Err(ParseError::new(ParseErrorKind::UnknownFunctor(name), fspan)),
        };
        let open = self.expect(Tok::LParen)?;
        self.open_parens.push(open);
        let mut letters = vec![self.letter()?];
        while self.eat(&Tok::Comma) {
            letters.push(self.letter()?);
        }
        self.expect(Tok::RParen)?;
        self.open_parens.pop();
        let span = SourceSpan::new(fspan.start, self.prev_end());
        if letters.len() != functor.arity() {
            return Err(ParseError::new(
                ParseErrorKind::ArityMismatch {
                    functor: name,
                    expected: functor.arity(),
                    found: letters.len(),
                },
                span,
            ));
        }
        let mut letters = letters.into_iter();
        let subject = letters.next().expect("at least one letter");
        let atom = match letters.next() {
            Some(predicate) => Atom::binary(functor, subject, predicate),
            None => Atom::unary(functor, subject),
        };
        Ok(Formula::Atom(atom))
    }

    fn letter(&mut self) -> Result<NameLetter> {
        match self.peek() {
            Some(Tok::Ident(id)) => {
                let id = id.clone();
                let span = self.span();
                self.pos += 1;
                NameLetter::new(id.clone())
                    .map_err(|_| ParseError::new(ParseErrorKind::BadLetter(id), span))
            }
            _ => Err(self.unexpected("a name letter")),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    /// `φ1, …, φn <sep> ω` or `<sep> ω`.
    fn sequent_like(&mut self, sep: Tok) -> Result<Sequent> {
        let mut premises = BTreeSet::new();
        if !self.eat(&sep) {
            premises.insert(self.formula()?);
            while self.eat(&Tok::Comma) {
                premises.insert(self.formula()?);
            }
            self.expect(sep)?;
        }
        let conclusion = self.formula()?;
        self.finish()?;
        Ok(Sequent {
            premises,
            conclusion,
        })
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

fn parse_formula_at(text: &str, base: usize) -> Result<Formula> {
    parse_formula(text).map_err(|e| e.shifted(base))
}

/// Parses `φ1 , … , φn ==> ω` (or `==> ω`); premises become a set.
pub fn parse_sequent(text: &str) -> Result<Sequent> {
    Parser::new(text)?.sequent_like(Tok::Entails)
}

/// Parses a Smiley deduction claim `π1, …, πn |- ω`.
pub fn parse_deduction_claim(text: &str) -> Result<Sequent> {
    Parser::new(text)?.sequent_like(Tok::Turnstile)
}

fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(atom) => {
            out.push_str(atom.functor.tag());
            out.push('(');
            out.push_str(atom.subject.as_str());
            if let Some(p) = &atom.predicate {
                out.push(',');
                out.push_str(p.as_str());
            }
            out.push(')');
        }
        Formula::Neg(inner) => {
            out.push('~');
            write_child(inner, matches!(**inner, Formula::Bin(..)), out);
        }
        Formula::Bin(op, lhs, rhs) => {
            let prec = op.precedence();
            let right_assoc = *op == Connective::Implies;
            let (lp, rp) = (bin_prec(lhs), bin_prec(rhs));
            let left_parens = lp.is_some_and(|p| p < prec || (right_assoc && p == prec));
            let right_parens = rp.is_some_and(|p| p < prec || (!right_assoc && p == prec));
            write_child(lhs, left_parens, out);
            out.push(' ');
            out.push_str(op.token());
            out.push(' ');
            write_child(rhs, right_parens, out);
        }
    }
}

fn bin_prec(f: &Formula) -> Option<u8> {
    match f {
        Formula::Bin(op, _, _) => Some(op.precedence()),
        _ => None,
    }
}

fn write_child(f: &Formula, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    } else {
        write_formula(f, out);
    }
}

/// Prints a formula with the fewest parentheses that parse back to it.
pub fn format_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_formula(self))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_formula(&Formula::Atom(self.clone())))
    }
}

fn join_premises(premises: &BTreeSet<Formula>) -> String {
    premises
        .iter()
        .map(format_formula)
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn format_sequent(s: &Sequent) -> String {
    if s.premises.is_empty() {
        format!("==> {}", s.conclusion)
    } else {
        format!("{} ==> {}", join_premises(&s.premises), s.conclusion)
    }
}

pub fn format_deduction_claim(s: &Sequent) -> String {
    if s.premises.is_empty() {
        format!("|- {}", s.conclusion)
    } else {
        format!("{} |- {}", join_premises(&s.premises), s.conclusion)
    }
}

/// Parses the model JSON format
/// `{"universe":[..],"denotation":{"S":[..],..}}`.
pub fn parse_model(text: &str) -> Result<Model> {
    let whole = SourceSpan::new(0, text.len());
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        let offset = line_col_offset(text, e.line(), e.column());
        ParseError::new(
            ParseErrorKind::Model(e.to_string()),
            SourceSpan::point(offset),
        )
    })?;
    let model_err = |msg: String, needle: Option<&str>| {
        let span = needle
            .and_then(|n| text.find(&format!("\"{n}\"")))
            .map(|at| SourceSpan::new(at, at + n_len(needle) + 2))
            .unwrap_or(whole);
        ParseError::new(ParseErrorKind::Model(msg), span)
    };
    let obj = value
        .as_object()
        .ok_or_else(|| model_err("expected a JSON object".into(), None))?;
    for key in obj.keys() {
        if key != "universe" && key != "denotation" {
            return Err(model_err(format!("unexpected field `{key}`"), Some(key)));
        }
    }
    let universe_val = obj
        .get("universe")
        .and_then(|u| u.as_array())
        .ok_or_else(|| model_err("`universe` must be an array of strings".into(), None))?;
    let mut universe = Vec::with_capacity(universe_val.len());
    let mut seen = BTreeSet::new();
    for el in universe_val {
        let s = el
            .as_str()
            .ok_or_else(|| model_err("universe elements must be strings".into(), None))?;
        if !seen.insert(s.to_string()) {
            return Err(model_err(
                format!("duplicate universe element `{s}`"),
                Some(s),
            ));
        }
        universe.push(s.to_string());
    }
    let mut model = Model::new(universe);
    let denotation = match obj.get("denotation") {
        None => return Ok(model),
        Some(d) => d
            .as_object()
            .ok_or_else(|| model_err("`denotation` must be an object".into(), None))?,
    };
    for (key, elems) in denotation {
        if !is_letter_id(key) {
            return Err(model_err(format!("invalid name letter `{key}`"), Some(key)));
        }
        let elems = elems.as_array().ok_or_else(|| {
            model_err(format!("denotation of `{key}` must be an array"), Some(key))
        })?;
        let mut names = Vec::with_capacity(elems.len());
        for el in elems {
            let s = el.as_str().ok_or_else(|| {
                model_err(
                    format!("denotation of `{key}` must list strings"),
                    Some(key),
                )
            })?;
            names.push(s);
        }
        model
            .set(
                &NameLetter::new(key.clone()).expect("checked"),
                names.iter().copied(),
            )
            .map_err(|bad| {
                model_err(
                    format!("element `{bad}` in denotation of `{key}` is not in the universe"),
                    Some(&bad),
                )
            })?;
    }
    Ok(model)
}

fn n_len(needle: Option<&str>) -> usize {
    needle.map_or(0, str::len)
}

fn line_col_offset(text: &str, line: usize, col: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (start + col.saturating_sub(1)).min(text.len())
}

/// Compact JSON with elements listed in universe order.
pub fn format_model(m: &Model) -> String {
    let universe: Vec<serde_json::Value> = m
        .universe()
        .iter()
        .map(|u| serde_json::Value::String(u.clone()))
        .collect();
    let mut out = String::from("{\"universe\":");
    out.push_str(&serde_json::Value::Array(universe).to_string());
    out.push_str(",\"denotation\":{");
    for (n, (letter, _)) in m.denotations().enumerate() {
        if n > 0 {
            out.push(',');
        }
        out.push_str(&serde_json::Value::String(letter.to_string()).to_string());
        out.push(':');
        let elems: Vec<serde_json::Value> = m
            .elements_of(letter)
            .map(|e| serde_json::Value::String(e.to_string()))
            .collect();
        out.push_str(&serde_json::Value::Array(elems).to_string());
    }
    out.push_str("}}");
    out
}

/// One non-blank script line split into its three fields.
struct RawLine<'a> {
    index: usize,
    body: &'a str,
    body_at: usize,
    just: &'a str,
    just_at: usize,
    line_span: SourceSpan,
}

fn split_script(text: &str) -> Result<Vec<RawLine<'_>>> {
    let mut out: Vec<RawLine<'_>> = Vec::new();
    let mut offset = 0;
    for raw in text.split_inclusive('\n') {
        let line_at = offset;
        offset += raw.len();
        let content = match raw.find('#') {
            Some(c) => &raw[..c],
            None => raw.trim_end_matches(['\n', '\r']),
        };
        if content.trim().is_empty() {
            continue;
        }
        let line_span = SourceSpan::new(line_at, line_at + content.len());
        let colon = content.find(':').ok_or_else(|| {
            ParseError::new(
                ParseErrorKind::LineNumber("expected `N:` at start of line".into()),
                line_span,
            )
        })?;
        let num_text = content[..colon].trim();
        let index: usize = num_text.parse().map_err(|_| {
            ParseError::new(
                ParseErrorKind::LineNumber(format!("`{num_text}` is not a line number")),
                SourceSpan::new(line_at, line_at + colon),
            )
        })?;
        let expected_min = out.last().map_or(1, |l| l.index + 1);
        let ok = match out.last() {
            None => index == 1,
            Some(prev) => index > prev.index,
        };
        if !ok {
            return Err(ParseError::new(
                ParseErrorKind::LineNumber(format!(
                    "line {index} out of order (expected {} )",
                    if out.is_empty() {
                        "1".to_string()
                    } else {
                        format!("at least {expected_min}")
                    }
                )),
                SourceSpan::new(line_at, line_at + colon),
            ));
        }
        let after = &content[colon + 1..];
        let semi = after.find(';').ok_or_else(|| {
            ParseError::new(
                ParseErrorKind::Justification("missing `; JUSTIFICATION`".into()),
                line_span,
            )
        })?;
        out.push(RawLine {
            index,
            body: &after[..semi],
            body_at: line_at + colon + 1,
            just: &after[semi + 1..],
            just_at: line_at + colon + 1 + semi + 1,
            line_span,
        });
    }
    Ok(out)
}

/// Whitespace-separated words of a justification, keeping `[...]` groups
/// together.
fn just_words(text: &str, base: usize) -> Result<Vec<(&str, SourceSpan)>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if bytes[i] == b'[' {
            match text[i..].find(']') {
                Some(close) => i += close + 1,
                None => {
                    return Err(ParseError::new(
                        ParseErrorKind::Justification("unclosed `[`".into()),
                        SourceSpan::new(base + start, base + text.len()),
                    ))
                }
            }
        } else {
            while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'[' {
                i += 1;
            }
        }
        out.push((&text[start..i], SourceSpan::new(base + start, base + i)));
    }
    Ok(out)
}

/// Parses `[S:=P, M:=Q]`.
pub fn parse_substitution(text: &str) -> Result<Substitution> {
    parse_substitution_at(text, 0)
}

fn parse_substitution_at(text: &str, base: usize) -> Result<Substitution> {
    let span = SourceSpan::new(base, base + text.len());
    let err = |msg: String| ParseError::new(ParseErrorKind::Justification(msg), span);
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| err(format!("expected `[L:=L', ...]`, found `{text}`")))?;
    let mut sigma = Substitution::identity();
    if inner.trim().is_empty() {
        return Ok(sigma);
    }
    for pair in inner.split(',') {
        let (from, to) = pair
            .split_once(":=")
            .ok_or_else(|| err(format!("expected `L:=L'`, found `{}`", pair.trim())))?;
        let from = NameLetter::new(from.trim()).map_err(|e| err(e.to_string()))?;
        let to = NameLetter::new(to.trim()).map_err(|e| err(e.to_string()))?;
        if sigma.insert(from.clone(), to).is_some() {
            return Err(err(format!("letter `{from}` substituted twice")));
        }
    }
    Ok(sigma)
}

fn parse_index(word: &str, span: SourceSpan) -> Result<usize> {
    word.parse().map_err(|_| {
        ParseError::new(
            ParseErrorKind::Justification(format!("expected a line number, found `{word}`")),
            span,
        )
    })
}

fn arity_error(tag: &str, span: SourceSpan, shape: &str) -> ParseError {
    ParseError::new(
        ParseErrorKind::Justification(format!("`{tag}` expects {shape}")),
        span,
    )
}

/// `NAME [σ]?` as used by `ax` and `def`.
fn named_instance(
    tag: &str,
    args: &[(&str, SourceSpan)],
    span: SourceSpan,
) -> Result<(String, Option<Substitution>)> {
    match args {
        [(name, _)] if !name.starts_with('[') => Ok((name.to_string(), None)),
        [(name, _), (sub, sub_span)] if !name.starts_with('[') => Ok((
            name.to_string(),
            Some(parse_substitution_at(sub, sub_span.start)?),
        )),
        _ => Err(arity_error(
            tag,
            span,
            "a name and an optional substitution",
        )),
    }
}

fn indices(
    tag: &str,
    args: &[(&str, SourceSpan)],
    span: SourceSpan,
    count: usize,
) -> Result<Vec<usize>> {
    if args.len() != count {
        return Err(arity_error(tag, span, &format!("{count} line number(s)")));
    }
    args.iter().map(|(w, s)| parse_index(w, *s)).collect()
}

fn empty_just(line: &RawLine<'_>) -> ParseError {
    ParseError::new(
        ParseErrorKind::Justification("empty justification".into()),
        line.line_span,
    )
}

pub fn parse_proof_script(text: &str) -> Result<ProofScript> {
    let mut lines = Vec::new();
    for raw in split_script(text)? {
        let formula = parse_formula_at(raw.body, raw.body_at)?;
        let words = just_words(raw.just, raw.just_at)?;
        let ((tag, tag_span), args) = words.split_first().ok_or_else(|| empty_just(&raw))?;
        let span = SourceSpan::new(tag_span.start, raw.line_span.end);
        let justification = match *tag {
            "ax" => {
                let (name, subst) = named_instance(tag, args, span)?;
                Justification::Axiom { name, subst }
            }
            "def" => {
                let (name, subst) = named_instance(tag, args, span)?;
                Justification::Definition { name, subst }
            }
            "cpl" => {
                indices(tag, args, span, 0)?;
                Justification::Cpl
            }
            "mp" => {
                let ij = indices(tag, args, span, 2)?;
                Justification::Detach(ij[0], ij[1])
            }
            "sub" => match args {
                [(i, i_span), (sub, sub_span)] => Justification::Substitute(
                    parse_index(i, *i_span)?,
                    parse_substitution_at(sub, sub_span.start)?,
                ),
                _ => return Err(arity_error(tag, span, "a line number and a substitution")),
            },
            other => {
                return Err(ParseError::new(
                    ParseErrorKind::UnknownJustification(other.to_string()),
                    *tag_span,
                ))
            }
        };
        lines.push(ProofLine {
            index: raw.index,
            formula,
            justification,
        });
    }
    Ok(ProofScript { lines })
}

pub fn format_proof_script(script: &ProofScript) -> String {
    let mut out = String::new();
    for line in &script.lines {
        out.push_str(&format!(
            "{}: {} ; {}\n",
            line.index, line.formula, line.justification
        ));
    }
    out
}

fn parse_sequent_at(text: &str, base: usize) -> Result<Sequent> {
    parse_sequent(text).map_err(|e| e.shifted(base))
}

pub fn parse_sequent_script(text: &str) -> Result<SequentScript> {
    let mut lines = Vec::new();
    for raw in split_script(text)? {
        let sequent = parse_sequent_at(raw.body, raw.body_at)?;
        let words = just_words(raw.just, raw.just_at)?;
        let ((tag, tag_span), args) = words.split_first().ok_or_else(|| empty_just(&raw))?;
        let span = SourceSpan::new(tag_span.start, raw.line_span.end);
        let justification = match *tag {
            "ax" => {
                let (name, subst) = named_instance(tag, args, span)?;
                SequentJustification::Axiom { name, subst }
            }
            "cpl" => {
                indices(tag, args, span, 0)?;
                SequentJustification::Cpl
            }
            "cut" => {
                let ij = indices(tag, args, span, 2)?;
                SequentJustification::Cut(ij[0], ij[1])
            }
            "ded" => {
                let i = indices(tag, args, span, 1)?;
                SequentJustification::Deduction(i[0])
            }
            "rule" => match args.split_first() {
                Some(((name, _), cited)) if !cited.is_empty() => SequentJustification::Rule {
                    name: name.to_string(),
                    cited: cited
                        .iter()
                        .map(|(w, s)| parse_index(w, *s))
                        .collect::<Result<_>>()?,
                },
                _ => return Err(arity_error(tag, span, "a rule name and line numbers")),
            },
            other => {
                return Err(ParseError::new(
                    ParseErrorKind::UnknownJustification(other.to_string()),
                    *tag_span,
                ))
            }
        };
        lines.push(SequentLine {
            index: raw.index,
            sequent,
            justification,
        });
    }
    Ok(SequentScript { lines })
}

pub fn format_sequent_script(script: &SequentScript) -> String {
    let mut out = String::new();
    for line in &script.lines {
        out.push_str(&format!(
            "{}: {} ; {}\n",
            line.index,
            format_sequent(&line.sequent),
            line.justification
        ));
    }
    out
}

pub fn parse_deduction_script(text: &str) -> Result<DeductionScript> {
    let mut lines = Vec::new();
    for raw in split_script(text)? {
        let claim = parse_deduction_claim(raw.body).map_err(|e| e.shifted(raw.body_at))?;
        let words = just_words(raw.just, raw.just_at)?;
        let ((tag, tag_span), args) = words.split_first().ok_or_else(|| empty_just(&raw))?;
        let span = SourceSpan::new(tag_span.start, raw.line_span.end);
        let justification = match *tag {
            "trivial" => {
                indices(tag, args, span, 0)?;
                DeductionJustification::Trivial
            }
            "rule" => {
                let Some(((r, r_span), cited)) = args.split_first() else {
                    return Err(arity_error(tag, span, "a rule number and line numbers"));
                };
                let rule = r
                    .parse::<u8>()
                    .ok()
                    .and_then(SmileyRule::from_number)
                    .ok_or_else(|| {
                        ParseError::new(
                            ParseErrorKind::Justification(format!(
                                "unknown rule `{r}` (expected 1-4)"
                            )),
                            *r_span,
                        )
                    })?;
                let cited = indices(tag, cited, span, rule.arity())?;
                DeductionJustification::Rule {
                    rule,
                    first: cited[0],
                    second: cited.get(1).copied(),
                }
            }
            "reductio" => {
                let ij = indices(tag, args, span, 2)?;
                DeductionJustification::Reductio(ij[0], ij[1])
            }
            other => {
                return Err(ParseError::new(
                    ParseErrorKind::UnknownJustification(other.to_string()),
                    *tag_span,
                ))
            }
        };
        lines.push(DeductionLine {
            index: raw.index,
            claim,
            justification,
        });
    }
    Ok(DeductionScript { lines })
}

pub fn format_deduction_script(script: &DeductionScript) -> String {
    let mut out = String::new();
    for line in &script.lines {
        out.push_str(&format!(
            "{}: {} ; {}\n",
            line.index,
            format_deduction_claim(&line.claim),
            line.justification
        ));
    }
    out
}

/// Helper for tests and tables: parse or panic with the message.
pub fn formula(text: &str) -> Formula {
    match parse_formula(text) {
        Ok(f) => f,
        Err(e) => panic!("bad formula `{text}`: {e}"),
    }
}
