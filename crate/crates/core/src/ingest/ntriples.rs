//! Line-based N-Triples parsing and serialization.
//!
//! One statement per line: `<subject> <predicate> <object> .` with IRIs in
//! angle brackets and literals in double quotes, optionally tagged
//! `@lang`. Datatyped literals are accepted; the datatype IRI is dropped
//! and the lexical form kept. Blank-node statements are outside the data
//! model: lenient parsing counts and skips them (like malformed lines),
//! strict parsing aborts.

use std::fmt;
use std::io::BufRead;

use crate::error::Error;
use crate::Result;

/// A knowledge-base resource, identified by its absolute IRI. Two
/// resources are equal iff their IRI strings are byte-equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Resource {
    iri: String,
}

impl Resource {
    /// Validates the IRI: non-empty, no whitespace.
    pub fn new(iri: impl Into<String>) -> Result<Self> {
        let iri = iri.into();
        if iri.is_empty() {
            return Err(Error::Other("empty IRI".into()));
        }
        if iri.chars().any(char::is_whitespace) {
            return Err(Error::Other(format!("IRI contains whitespace: {iri:?}")));
        }
        Ok(Self { iri })
    }

    pub fn iri(&self) -> &str {
        &self.iri
    }

    pub fn into_iri(self) -> String {
        self.iri
    }
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.iri)
    }
}

/// Object position of a triple: a resource or a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Object {
    Resource(Resource),
    Literal {
        text: String,
        language: Option<String>,
    },
}

impl Object {
    pub fn as_resource(&self) -> Option<&Resource> {
        match self {
            Object::Resource(r) => Some(r),
            Object::Literal { .. } => None,
        }
    }

    pub fn as_literal(&self) -> Option<(&str, Option<&str>)> {
        match self {
            Object::Resource(_) => None,
            Object::Literal { text, language } => Some((text, language.as_deref())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Resource,
    pub predicate: Resource,
    pub object: Object,
}

impl fmt::Display for Triple {
    /// Canonical N-Triples serialization of the triple.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_iri(f, self.subject.iri())?;
        f.write_str(" ")?;
        write_iri(f, self.predicate.iri())?;
        f.write_str(" ")?;
        match &self.object {
            Object::Resource(r) => write_iri(f, r.iri())?,
            Object::Literal { text, language } => {
                f.write_str("\"")?;
                for ch in text.chars() {
                    match ch {
                        '\\' => f.write_str("\\\\")?,
                        '"' => f.write_str("\\\"")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        '\t' => f.write_str("\\t")?,
                        c if (c as u32) < 0x20 => write!(f, "\\u{:04X}", c as u32)?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")?;
                if let Some(lang) = language {
                    write!(f, "@{lang}")?;
                }
            }
        }
        f.write_str(" .")
    }
}

fn write_iri(f: &mut fmt::Formatter<'_>, iri: &str) -> fmt::Result {
    f.write_str("<")?;
    for ch in iri.chars() {
        match ch {
            '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                write!(f, "\\u{:04X}", ch as u32)?
            }
            c if (c as u32) <= 0x20 => write!(f, "\\u{:04X}", c as u32)?,
            c => f.write_fmt(format_args!("{c}"))?,
        }
    }
    f.write_str(">")
}

/// Parsing mode: lenient skips and counts bad lines, strict aborts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Lenient,
    Strict,
}

/// Result of a parse run.
#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub triples: Vec<Triple>,
    /// Blank-node and malformed lines skipped in lenient mode.
    pub skipped: u64,
}

/// Parses a complete reader. In strict mode the first bad line aborts with
/// [`Error::Parse`]; in lenient mode bad lines are counted in
/// [`ParseOutcome::skipped`]. Empty lines and `#` comments are neither
/// triples nor errors.
pub fn parse_ntriples<R: BufRead>(reader: R, mode: ParseMode) -> Result<ParseOutcome> {
    let mut outcome = ParseOutcome::default();
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = no as u64 + 1;
        match parse_line(&line) {
            Ok(Some(triple)) => outcome.triples.push(triple),
            Ok(None) => {}
            Err(reason) => match mode {
                ParseMode::Lenient => outcome.skipped += 1,
                ParseMode::Strict => {
                    return Err(Error::Parse {
                        line: line_no,
                        reason,
                    })
                }
            },
        }
    }
    Ok(outcome)
}

/// Parses an in-memory string; see [`parse_ntriples`].
pub fn parse_ntriples_str(text: &str, mode: ParseMode) -> Result<ParseOutcome> {
    parse_ntriples(text.as_bytes(), mode)
}

/// Parses one line. `Ok(None)` for blank lines and comments; `Err(reason)`
/// for malformed or blank-node statements.
pub fn parse_line(line: &str) -> std::result::Result<Option<Triple>, String> {
    let mut p = Cursor::new(line);
    p.skip_ws();
    if p.at_end() || p.peek() == Some('#') {
        return Ok(None);
    }
    let subject = p.parse_iri().map_err(|e| format!("subject: {e}"))?;
    p.require_ws()?;
    let predicate = p.parse_iri().map_err(|e| format!("predicate: {e}"))?;
    p.require_ws()?;
    let object = p.parse_object().map_err(|e| format!("object: {e}"))?;
    p.skip_ws();
    if p.next() != Some('.') {
        return Err("expected '.' terminator".into());
    }
    p.skip_ws();
    if !(p.at_end() || p.peek() == Some('#')) {
        return Err("trailing content after '.'".into());
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Self {
            chars: s.chars().peekable(),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn next(&mut self) -> Option<char> {
        self.chars.next()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t') {
            self.next();
        }
    }

    fn require_ws(&mut self) -> std::result::Result<(), String> {
        if !matches!(self.peek(), Some(' ' | '\t')) {
            return Err("expected whitespace".into());
        }
        self.skip_ws();
        Ok(())
    }

    fn parse_unicode_escape(&mut self, long: bool) -> std::result::Result<char, String> {
        let width = if long { 8 } else { 4 };
        let mut value: u32 = 0;
        for _ in 0..width {
            let c = self.next().ok_or("truncated unicode escape")?;
            let digit = c.to_digit(16).ok_or("bad hex digit in unicode escape")?;
            value = value * 16 + digit;
        }
        char::from_u32(value).ok_or_else(|| "invalid code point".into())
    }

    fn parse_iri(&mut self) -> std::result::Result<Resource, String> {
        match self.peek() {
            Some('<') => {}
            Some('_') => return Err("blank node not supported".into()),
            _ => return Err("expected '<'".into()),
        }
        self.next();
        let mut iri = String::new();
        loop {
            match self.next() {
                None => return Err("unterminated IRI".into()),
                Some('>') => break,
                Some('\\') => match self.next() {
                    Some('u') => iri.push(self.parse_unicode_escape(false)?),
                    Some('U') => iri.push(self.parse_unicode_escape(true)?),
                    _ => return Err("bad escape in IRI".into()),
                },
                Some(c) if (c as u32) <= 0x20 => return Err("whitespace in IRI".into()),
                Some(c) if matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(format!("forbidden character {c:?} in IRI"))
                }
                Some(c) => iri.push(c),
            }
        }
        Resource::new(iri).map_err(|e| e.to_string())
    }

    fn parse_object(&mut self) -> std::result::Result<Object, String> {
        match self.peek() {
            Some('<') => Ok(Object::Resource(self.parse_iri()?)),
            Some('_') => Err("blank node not supported".into()),
            Some('"') => self.parse_literal(),
            _ => Err("expected IRI or literal".into()),
        }
    }

    fn parse_literal(&mut self) -> std::result::Result<Object, String> {
        self.next(); // opening quote
        let mut text = String::new();
        loop {
            match self.next() {
                None => return Err("unterminated literal".into()),
                Some('"') => break,
                Some('\\') => match self.next() {
                    Some('t') => text.push('\t'),
                    Some('b') => text.push('\u{8}'),
                    Some('n') => text.push('\n'),
                    Some('r') => text.push('\r'),
                    Some('f') => text.push('\u{c}'),
                    Some('"') => text.push('"'),
                    Some('\'') => text.push('\''),
                    Some('\\') => text.push('\\'),
                    Some('u') => text.push(self.parse_unicode_escape(false)?),
                    Some('U') => text.push(self.parse_unicode_escape(true)?),
                    _ => return Err("bad escape in literal".into()),
                },
                Some(c) => text.push(c),
            }
        }
        let language = match self.peek() {
            Some('@') => {
                self.next();
                let mut tag = String::new();
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                    tag.push(self.next().unwrap());
                }
                if tag.is_empty() || !tag.chars().next().unwrap().is_ascii_alphabetic() {
                    return Err("bad language tag".into());
                }
                Some(tag)
            }
            Some('^') => {
                self.next();
                if self.next() != Some('^') {
                    return Err("bad datatype marker".into());
                }
                // Datatype IRI parsed and dropped.
                self.parse_iri()?;
                None
            }
            _ => None,
        };
        Ok(Object::Literal { text, language })
    }
}
