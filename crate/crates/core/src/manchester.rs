//! Reader and writer for the class-hierarchy subset of OWL2 Manchester syntax.
//!
//! Only `Prefix:`, `Ontology:` and `Class:` frames with `SubClassOf:` entries
//! naming classes are interpreted. Every other frame or entry is skipped and
//! reported as a warning.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::diagnostics::{Diagnostic, Position};
use crate::taxonomy::{ClassRef, Taxonomy, TaxonomyBuilder, TaxonomyError, DEFAULT_NAMESPACE};

const OWL_THING: &str = "http://www.w3.org/2002/07/owl#Thing";

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Iri(String),
    Str,
    Word(String),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Position,
}

impl Token {
    fn describe(&self) -> String {
        match &self.tok {
            Tok::Iri(i) => format!("<{i}>"),
            Tok::Str => "string literal".into(),
            Tok::Word(w) => format!("`{w}`"),
            Tok::Punct(c) => format!("`{c}`"),
        }
    }
}

fn syntax(pos: Position, message: impl Into<String>) -> TaxonomyError {
    TaxonomyError::Syntax {
        pos,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>, TaxonomyError> {
    let mut out = Vec::new();
    let mut pos = Position::START;
    let mut chars = src.chars().peekable();
    let bump = |pos: &mut Position, c: char| {
        if c == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let start = pos;
        if c.is_whitespace() {
            bump(&mut pos, c);
            chars.next();
        } else if c == '<' {
            chars.next();
            bump(&mut pos, c);
            let mut iri = String::new();
            loop {
                match chars.next() {
                    Some('>') => {
                        bump(&mut pos, '>');
                        break;
                    }
                    Some(ch) => {
                        bump(&mut pos, ch);
                        iri.push(ch);
                    }
                    None => return Err(syntax(start, "unterminated IRI, expected `>`")),
                }
            }
            out.push(Token { tok: Tok::Iri(iri), pos: start });
        } else if c == '"' {
            chars.next();
            bump(&mut pos, c);
            let mut escaped = false;
            loop {
                match chars.next() {
                    Some(ch) => {
                        bump(&mut pos, ch);
                        if escaped {
                            escaped = false;
                        } else if ch == '\\' {
                            escaped = true;
                        } else if ch == '"' {
                            break;
                        }
                    }
                    None => return Err(syntax(start, "unterminated string literal")),
                }
            }
            // language tag or datatype suffix
            if matches!(chars.peek(), Some('@') | Some('^')) {
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || "()[]{},".contains(ch) {
                        break;
                    }
                    bump(&mut pos, ch);
                    chars.next();
                }
            }
            out.push(Token { tok: Tok::Str, pos: start });
        } else if "()[]{},".contains(c) {
            chars.next();
            bump(&mut pos, c);
            out.push(Token { tok: Tok::Punct(c), pos: start });
        } else {
            let mut word = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() || "()[]{},<\"".contains(ch) {
                    break;
                }
                bump(&mut pos, ch);
                word.push(ch);
                chars.next();
            }
            out.push(Token { tok: Tok::Word(word), pos: start });
        }
    }
    Ok(out)
}

/// `SubClassOf:`, `Class:` and friends; prefixed names such as `owl:Thing`
/// or prefix declarations such as `owl:` are not keywords.
fn is_keyword(tok: &Tok) -> bool {
    match tok {
        Tok::Word(w) => {
            (w.ends_with(':')
                && w.matches(':').count() == 1
                && w.starts_with(|c: char| c.is_ascii_uppercase()))
                || w == "Class"
        }
        _ => false,
    }
}

fn is_frame_keyword(tok: &Tok) -> bool {
    matches!(tok, Tok::Word(w) if matches!(w.as_str(),
        "Prefix:" | "Ontology:" | "Import:" | "Class:" | "Class" | "ObjectProperty:"
        | "DataProperty:" | "AnnotationProperty:" | "Individual:" | "Datatype:"
        | "DisjointClasses:" | "EquivalentClasses:" | "DisjointProperties:"
        | "EquivalentProperties:" | "SameIndividual:" | "DifferentIndividuals:" | "Rule:"))
}

struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    end: Position,
    prefixes: HashMap<String, String>,
    builder: TaxonomyBuilder,
    /// Base taxonomy when parsing an extension fragment.
    base: Option<&'a Taxonomy>,
    declared: Vec<ClassRef>,
    referenced: Vec<(ClassRef, Position)>,
    warnings: Vec<Diagnostic>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.at)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn here(&self) -> Position {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn found(&self) -> String {
        self.peek().map(Token::describe).unwrap_or_else(|| "end of input".into())
    }

    fn skip_until(&mut self, stop: fn(&Tok) -> bool) {
        while let Some(t) = self.peek() {
            if stop(&t.tok) {
                break;
            }
            self.at += 1;
        }
    }

    fn resolve_name(&self, tok: &Token) -> Result<ClassRef, TaxonomyError> {
        let iri = match &tok.tok {
            Tok::Iri(i) => i.clone(),
            Tok::Word(w) => match w.split_once(':') {
                Some((prefix, local)) => {
                    let base = self
                        .prefixes
                        .get(prefix)
                        .ok_or_else(|| syntax(tok.pos, format!("undeclared prefix `{prefix}:`")))?;
                    format!("{base}{local}")
                }
                None => {
                    if let Some(c) = self.base.and_then(|b| b.lookup(w)) {
                        return Ok(c.clone());
                    }
                    match self.prefixes.get("") {
                        Some(base) => format!("{base}{w}"),
                        None => return self.builder.named(w),
                    }
                }
            },
            _ => return Err(syntax(tok.pos, format!("expected class name, found {}", tok.describe()))),
        };
        if iri == OWL_THING {
            return Ok(self.builder.top().clone());
        }
        ClassRef::new(&iri).map_err(|_| syntax(tok.pos, format!("`{iri}` does not name a class")))
    }

    fn parse(&mut self) -> Result<(), TaxonomyError> {
        while let Some(tok) = self.peek().cloned() {
            match &tok.tok {
                Tok::Word(w) if w == "Prefix:" => {
                    self.at += 1;
                    let name = match self.next() {
                        Some(Token { tok: Tok::Word(p), .. }) if p.ends_with(':') => {
                            p.trim_end_matches(':').to_string()
                        }
                        _ => {
                            self.at -= 1;
                            return Err(syntax(
                                self.here(),
                                format!("expected prefix name, found {}", self.found()),
                            ));
                        }
                    };
                    match self.next() {
                        Some(Token { tok: Tok::Iri(iri), .. }) => {
                            self.prefixes.insert(name, iri);
                        }
                        _ => {
                            self.at -= 1;
                            return Err(syntax(
                                self.here(),
                                format!("expected `<IRI>` in prefix declaration, found {}", self.found()),
                            ));
                        }
                    }
                }
                Tok::Word(w) if w == "Ontology:" => {
                    self.at += 1;
                    // optional ontology IRI and version IRI
                    for _ in 0..2 {
                        if matches!(self.peek(), Some(Token { tok: Tok::Iri(_), .. })) {
                            self.at += 1;
                        }
                    }
                }
                Tok::Word(w) if w == "Class:" || w == "Class" => {
                    self.at += 1;
                    self.class_frame()?;
                }
                Tok::Word(w) if is_keyword(&tok.tok) => {
                    let w = w.clone();
                    self.at += 1;
                    self.warnings.push(Diagnostic::warning(
                        tok.pos,
                        format!("`{w}` is not interpreted; skipped"),
                    ));
                    self.skip_until(is_frame_keyword);
                }
                _ => {
                    return Err(syntax(
                        tok.pos,
                        format!("expected `Prefix:`, `Ontology:` or a frame, found {}", tok.describe()),
                    ))
                }
            }
        }
        Ok(())
    }

    fn class_frame(&mut self) -> Result<(), TaxonomyError> {
        let name_tok = match self.peek() {
            Some(t) if matches!(t.tok, Tok::Word(_) | Tok::Iri(_)) && !is_keyword(&t.tok) => {
                t.clone()
            }
            _ => {
                return Err(syntax(
                    self.here(),
                    format!("expected class name after `Class:`, found {}", self.found()),
                ))
            }
        };
        self.at += 1;
        let class = self.resolve_name(&name_tok)?;
        self.builder.add_class(class.clone());
        self.declared.push(class.clone());

        while let Some(tok) = self.peek().cloned() {
            if is_frame_keyword(&tok.tok) || !is_keyword(&tok.tok) {
                if !is_frame_keyword(&tok.tok) {
                    return Err(syntax(
                        tok.pos,
                        format!("expected `SubClassOf:` or another frame entry, found {}", tok.describe()),
                    ));
                }
                break;
            }
            self.at += 1;
            match &tok.tok {
                Tok::Word(w) if w == "SubClassOf:" => self.superclasses(&class, tok.pos)?,
                Tok::Word(w) => {
                    self.warnings.push(Diagnostic::warning(
                        tok.pos,
                        format!("`{w}` entry of class `{}` is not interpreted; skipped", class.local_name()),
                    ));
                    self.skip_until(is_keyword);
                }
                _ => unreachable!(),
            }
        }
        Ok(())
    }

    fn superclasses(&mut self, class: &ClassRef, kw_pos: Position) -> Result<(), TaxonomyError> {
        loop {
            let start = self.at;
            let mut depth = 0usize;
            while let Some(t) = self.peek() {
                match &t.tok {
                    Tok::Punct('(' | '[' | '{') => depth += 1,
                    Tok::Punct(')' | ']' | '}') => depth = depth.saturating_sub(1),
                    Tok::Punct(',') if depth == 0 => break,
                    tok if depth == 0 && is_keyword(tok) => break,
                    _ => {}
                }
                self.at += 1;
            }
            let item: Vec<Token> = self.toks[start..self.at].to_vec();
            match item.as_slice() {
                [] => {
                    let pos = self.peek().map(|t| t.pos).unwrap_or(kw_pos);
                    return Err(syntax(pos, format!("expected class expression, found {}", self.found())));
                }
                [single] if matches!(single.tok, Tok::Word(_) | Tok::Iri(_)) => {
                    let sup = self.resolve_name(single)?;
                    self.referenced.push((sup.clone(), single.pos));
                    self.builder.add_subclass(class.clone(), sup);
                }
                [first, ..] => self.warnings.push(Diagnostic::warning(
                    first.pos,
                    format!(
                        "complex superclass expression of `{}` is not interpreted; skipped",
                        class.local_name()
                    ),
                )),
            }
            if matches!(self.peek(), Some(Token { tok: Tok::Punct(','), .. })) {
                self.at += 1;
            } else {
                return Ok(());
            }
        }
    }
}

fn parser<'a>(src: &str, builder: TaxonomyBuilder, base: Option<&'a Taxonomy>) -> Result<Parser<'a>, TaxonomyError> {
    let toks = lex(src)?;
    let mut prefixes = HashMap::new();
    for (p, iri) in [
        ("owl", "http://www.w3.org/2002/07/owl#"),
        ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
        ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
        ("xsd", "http://www.w3.org/2001/XMLSchema#"),
    ] {
        prefixes.insert(p.to_string(), iri.to_string());
    }
    Ok(Parser {
        toks,
        at: 0,
        end: Position::START.advance(src),
        prefixes,
        builder,
        base,
        declared: Vec::new(),
        referenced: Vec::new(),
        warnings: Vec::new(),
    })
}

/// Namespace used for unprefixed names: the default prefix if declared,
/// otherwise the ontology IRI, otherwise the bundled namespace.
fn sniff_namespace(toks: &[Token]) -> String {
    let mut ontology = None;
    for w in toks.windows(3) {
        match (&w[0].tok, &w[1].tok, &w[2].tok) {
            (Tok::Word(k), Tok::Word(p), Tok::Iri(iri)) if k == "Prefix:" && p == ":" => {
                return iri.clone();
            }
            (Tok::Word(k), Tok::Iri(iri), _) if k == "Ontology:" && ontology.is_none() => {
                ontology = Some(iri.clone());
            }
            _ => {}
        }
    }
    if let [.., Token { tok: Tok::Word(k), .. }, Token { tok: Tok::Iri(iri), .. }] = toks {
        if k == "Ontology:" && ontology.is_none() {
            ontology = Some(iri.clone());
        }
    }
    match ontology {
        Some(o) if o.ends_with('#') || o.ends_with('/') => o,
        Some(o) => format!("{o}#"),
        None => DEFAULT_NAMESPACE.to_string(),
    }
}

/// Parses a Manchester document into a taxonomy. Classes without a named
/// superclass are placed directly below top.
pub fn parse_taxonomy(src: &str) -> Result<(Taxonomy, Vec<Diagnostic>), TaxonomyError> {
    let ns = sniff_namespace(&lex(src)?);
    let mut p = parser(src, TaxonomyBuilder::new(ns), None)?;
    p.parse()?;
    for (c, _) in &p.referenced {
        p.builder.add_class(c.clone());
    }
    let t = p.builder.build()?;
    Ok((t, p.warnings))
}

pub(crate) fn extend(base: &Taxonomy, fragment: &str) -> Result<(Taxonomy, Vec<Diagnostic>), TaxonomyError> {
    let mut p = parser(fragment, base.to_builder(), Some(base))?;
    p.parse()?;
    for (c, _) in &p.referenced {
        if !base.contains(c) && !p.declared.contains(c) {
            return Err(TaxonomyError::UnknownClass(c.local_name().to_string()));
        }
    }
    let t = p.builder.build()?;
    Ok((t, p.warnings))
}

/// Renders a taxonomy so that [`parse_taxonomy`] reproduces it.
pub fn emit_manchester(t: &Taxonomy) -> String {
    let mut out = String::new();
    let ns = t.namespace();
    let _ = writeln!(out, "Prefix: : <{ns}>");
    let _ = writeln!(out, "Ontology: <{}>", ns.trim_end_matches('#'));
    for class in t.classes() {
        let _ = write!(out, "\nClass: <{}>\n", class.iri());
        let parents = t.parents(class).expect("own class");
        if !parents.is_empty() {
            let list: Vec<String> = parents.iter().map(|p| format!("<{}>", p.iri())).collect();
            let _ = writeln!(out, "    SubClassOf: {}", list.join(", "));
        }
    }
    out
}
