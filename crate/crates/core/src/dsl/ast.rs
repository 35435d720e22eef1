use crate::diagnostics::Position;

/// An identifier together with where it was written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub text: String,
    pub pos: Position,
}

impl Ident {
    pub fn new(text: impl Into<String>, pos: Position) -> Self {
        Ident { text: text.into(), pos }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub declarations: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Pattern(PatternDecl),
    Refinement(RefinementDecl),
    Network(NetworkDecl),
}

impl Decl {
    pub fn name(&self) -> &Ident {
        match self {
            Decl::Pattern(p) => &p.name,
            Decl::Refinement(r) => &r.name,
            Decl::Network(n) => &n.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternDecl {
    pub name: Ident,
    pub body: PatternBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternBody {
    Data { ontology: OntRef, chains: Vec<Chain> },
    Combine(Ident),
}

/// `data ontohub:NeSyPatterns.omn` or `data { base then <Manchester> }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntRef {
    pub base: Ident,
    pub extension: Option<Fragment>,
}

/// Raw Manchester text of a `then` clause, trimmed, with its start position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub text: String,
    pub pos: Position,
}

/// `a -> b : C -> D;`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub nodes: Vec<NodeRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRef {
    pub id: Option<Ident>,
    pub class: Ident,
}

impl NodeRef {
    pub fn pos(&self) -> Position {
        self.id.as_ref().map_or(self.class.pos, |i| i.pos)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementDecl {
    pub name: Ident,
    pub source: Ident,
    pub target: Ident,
    pub explicit_map: Option<Vec<(Ident, Ident)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkDecl {
    pub name: Ident,
    pub members: Vec<Ident>,
}
