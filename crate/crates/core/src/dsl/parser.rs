//! Hand-written recursive descent parser for pattern documents.
//!
//! The scanner is driven by the parser: ontology references after `data`
//! and the Manchester text of a `then` clause are read in dedicated modes,
//! everything else through [`Parser::peek`]/[`Parser::bump`].

use std::fmt;

use thiserror::Error;

use super::ast::*;
use crate::diagnostics::Position;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub pos: Position,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expected.as_slice() {
            [] => write!(f, "unexpected {}", self.found),
            [one] => write!(f, "expected {one}, found {}", self.found),
            many => write!(f, "expected one of {}, found {}", many.join(", "), self.found),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "logic", "pattern", "data", "combine", "end", "refinement", "refined", "to", "via", "network", "then",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Keyword(&'static str),
    Arrow,
    MapsTo,
    Eq,
    Colon,
    Semi,
    Comma,
    LBrace,
    RBrace,
    Eof,
    Invalid(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Keyword(k) => write!(f, "`{k}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::MapsTo => f.write_str("`|->`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Eof => f.write_str("end of input"),
            Tok::Invalid(c) => write!(f, "character `{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Position,
    /// Byte offset just past the token.
    end: usize,
}

struct Parser<'a> {
    src: &'a str,
    at: usize,
    pos: Position,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.at..]
    }

    fn advance_to(&mut self, offset: usize) {
        self.pos = self.pos.advance(&self.src[self.at..offset]);
        self.at = offset;
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            if trimmed.len() != rest.len() {
                self.advance_to(self.at + rest.len() - trimmed.len());
            } else if rest.starts_with("%%") {
                let len = rest.find('\n').unwrap_or(rest.len());
                self.advance_to(self.at + len);
            } else {
                return;
            }
        }
    }

    fn peek(&mut self) -> Token {
        self.skip_trivia();
        let rest = self.rest();
        let pos = self.pos;
        let mut chars = rest.chars();
        let (tok, len) = match chars.next() {
            None => (Tok::Eof, 0),
            Some(c) if is_ident_start(c) => {
                let len = rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len());
                let word = &rest[..len];
                let tok = match KEYWORDS.iter().find(|k| **k == word) {
                    Some(k) => Tok::Keyword(k),
                    None => Tok::Ident(word.to_string()),
                };
                (tok, len)
            }
            Some('-') if rest.starts_with("->") => (Tok::Arrow, 2),
            Some('|') if rest.starts_with("|->") => (Tok::MapsTo, 3),
            Some('=') => (Tok::Eq, 1),
            Some(':') => (Tok::Colon, 1),
            Some(';') => (Tok::Semi, 1),
            Some(',') => (Tok::Comma, 1),
            Some('{') => (Tok::LBrace, 1),
            Some('}') => (Tok::RBrace, 1),
            Some(c) => (Tok::Invalid(c), c.len_utf8()),
        };
        Token { tok, pos, end: self.at + len }
    }

    fn bump(&mut self) -> Token {
        let t = self.peek();
        self.advance_to(t.end);
        t
    }

    fn error(&mut self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            pos: t.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, shown: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.error(&[shown]))
        }
    }

    fn keyword(&mut self, kw: &'static str) -> Result<Token, ParseError> {
        self.expect(Tok::Keyword(kw), &format!("`{kw}`"))
    }

    fn ident(&mut self, what: &str) -> Result<Ident, ParseError> {
        let t = self.peek();
        match t.tok {
            Tok::Ident(s) => {
                self.advance_to(t.end);
                Ok(Ident::new(s, t.pos))
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn at(&mut self, tok: &Tok) -> bool {
        &self.peek().tok == tok
    }

    fn document(&mut self) -> Result<Document, ParseError> {
        self.keyword("logic")?;
        let t = self.peek();
        match &t.tok {
            Tok::Ident(s) if s == "NeSyPatterns" => {
                self.bump();
            }
            _ => return Err(self.error(&["`NeSyPatterns`"])),
        }
        let mut declarations = Vec::new();
        loop {
            match self.peek().tok {
                Tok::Keyword("pattern") => declarations.push(Decl::Pattern(self.pattern()?)),
                Tok::Keyword("refinement") => declarations.push(Decl::Refinement(self.refinement()?)),
                Tok::Keyword("network") => declarations.push(Decl::Network(self.network()?)),
                Tok::Eof => return Ok(Document { declarations }),
                _ => return Err(self.error(&["`pattern`", "`refinement`", "`network`", "end of input"])),
            }
        }
    }

    fn pattern(&mut self) -> Result<PatternDecl, ParseError> {
        self.keyword("pattern")?;
        let name = self.ident("pattern name")?;
        self.expect(Tok::Eq, "`=`")?;
        let body = match self.peek().tok {
            Tok::Keyword("combine") => {
                self.bump();
                PatternBody::Combine(self.ident("network name")?)
            }
            Tok::Keyword("data") => {
                self.bump();
                let ontology = self.data_clause()?;
                let mut chains = Vec::new();
                while !self.at(&Tok::Keyword("end")) {
                    chains.push(self.chain()?);
                }
                PatternBody::Data { ontology, chains }
            }
            _ => return Err(self.error(&["`data`", "`combine`"])),
        };
        self.keyword("end")?;
        Ok(PatternDecl { name, body })
    }

    fn data_clause(&mut self) -> Result<OntRef, ParseError> {
        if self.at(&Tok::LBrace) {
            self.bump();
            let base = self.ont_token()?;
            let extension = if self.at(&Tok::Keyword("then")) {
                self.bump();
                Some(self.fragment()?)
            } else {
                None
            };
            self.expect(Tok::RBrace, "`}`")?;
            Ok(OntRef { base, extension })
        } else {
            Ok(OntRef {
                base: self.ont_token()?,
                extension: None,
            })
        }
    }

    /// A CURIE, bare IRI or `<IRI>`, read up to whitespace, `;` or `}`.
    fn ont_token(&mut self) -> Result<Ident, ParseError> {
        self.skip_trivia();
        let rest = self.rest();
        let len = if rest.starts_with('<') {
            rest.find('>').map(|i| i + 1).unwrap_or(rest.len())
        } else {
            rest.find(|c: char| c.is_whitespace() || c == ';' || c == '}')
                .unwrap_or(rest.len())
        };
        let text = &rest[..len];
        let valid = if text.starts_with('<') {
            text.len() > 2 && text.ends_with('>')
        } else {
            !text.is_empty() && !KEYWORDS.contains(&text) && text.contains(':')
        };
        if !valid {
            return Err(ParseError {
                pos: self.pos,
                expected: vec!["ontology reference".into()],
                found: if text.is_empty() { self.peek().tok.to_string() } else { format!("`{text}`") },
            });
        }
        let ident = Ident::new(text, self.pos);
        self.advance_to(self.at + len);
        Ok(ident)
    }

    /// Raw text up to the `}` closing the enclosing data clause.
    fn fragment(&mut self) -> Result<Fragment, ParseError> {
        let rest = self.rest();
        let mut depth = 0usize;
        let mut in_iri = false;
        let mut in_str = false;
        let mut close = None;
        let mut prev = '\0';
        for (i, c) in rest.char_indices() {
            match c {
                '"' if !in_iri && prev != '\\' => in_str = !in_str,
                '<' if !in_str => in_iri = true,
                '>' if !in_str => in_iri = false,
                '{' if !in_str && !in_iri => depth += 1,
                '}' if !in_str && !in_iri => {
                    if depth == 0 {
                        close = Some(i);
                        break;
                    }
                    depth -= 1;
                }
                _ => {}
            }
            prev = c;
        }
        let Some(close) = close else {
            return Err(ParseError {
                pos: self.pos.advance(rest),
                expected: vec!["`}`".into()],
                found: "end of input".into(),
            });
        };
        let raw = &rest[..close];
        let lead = raw.len() - raw.trim_start().len();
        let pos = self.pos.advance(&raw[..lead]);
        let text = raw.trim().to_string();
        self.advance_to(self.at + close);
        Ok(Fragment { text, pos })
    }

    fn chain(&mut self) -> Result<Chain, ParseError> {
        let mut nodes = vec![self.node_ref()?];
        loop {
            match self.peek().tok {
                Tok::Arrow => {
                    self.bump();
                    nodes.push(self.node_ref()?);
                }
                Tok::Semi => {
                    self.bump();
                    return Ok(Chain { nodes });
                }
                _ => return Err(self.error(&["`->`", "`;`"])),
            }
        }
    }

    fn node_ref(&mut self) -> Result<NodeRef, ParseError> {
        let first = self.ident("class name or node identifier")?;
        if self.at(&Tok::Colon) {
            self.bump();
            let class = self.ident("class name")?;
            Ok(NodeRef { id: Some(first), class })
        } else {
            Ok(NodeRef { id: None, class: first })
        }
    }

    fn refinement(&mut self) -> Result<RefinementDecl, ParseError> {
        self.keyword("refinement")?;
        let name = self.ident("refinement name")?;
        self.expect(Tok::Eq, "`=`")?;
        let source = self.ident("pattern name")?;
        self.keyword("refined")?;
        self.keyword("to")?;
        let target = self.ident("pattern name")?;
        let explicit_map = if self.at(&Tok::Keyword("via")) {
            self.bump();
            let mut pairs = Vec::new();
            loop {
                let from = self.ident("node identifier")?;
                self.expect(Tok::MapsTo, "`|->`")?;
                let to = self.ident("node identifier")?;
                pairs.push((from, to));
                if self.at(&Tok::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
            Some(pairs)
        } else {
            None
        };
        if !self.at(&Tok::Keyword("end")) {
            let expected: &[&str] = if explicit_map.is_some() { &["`,`", "`end`"] } else { &["`via`", "`end`"] };
            return Err(self.error(expected));
        }
        self.bump();
        Ok(RefinementDecl {
            name,
            source,
            target,
            explicit_map,
        })
    }

    fn network(&mut self) -> Result<NetworkDecl, ParseError> {
        self.keyword("network")?;
        let name = self.ident("network name")?;
        self.expect(Tok::Eq, "`=`")?;
        let mut members = vec![self.ident("pattern or refinement name")?];
        while self.at(&Tok::Comma) {
            self.bump();
            members.push(self.ident("pattern or refinement name")?);
        }
        if !self.at(&Tok::Keyword("end")) {
            return Err(self.error(&["`,`", "`end`"]));
        }
        self.bump();
        Ok(NetworkDecl { name, members })
    }
}

/// Parses a pattern document.
pub fn parse(src: &str) -> Result<Document, ParseError> {
    let mut p = Parser {
        src,
        at: 0,
        pos: Position::START,
    };
    p.document()
}
