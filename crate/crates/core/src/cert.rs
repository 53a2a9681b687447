//! Build certificates: expressions over the seeds `K1`, `K2` and the
//! operations A, B, C, D, carrying explicit ids for every new vertex.
//!
//! Text form, one expression per file, `;` starts a comment:
//!
//! ```text
//! (seed1 v) | (seed2 u v)
//! (B anchor w w2 SUB)
//! (C anchor a b c d SUB)
//! (D anchor m a b c d SUB)
//! (A1 u ((anchor1 SUB1) (anchor2 SUB2) ...) (w x))
//! (A2 u ((anchor1 SUB1) ...) (x w w2))
//! ```

use std::fmt;

use thiserror::Error;

use crate::graph::Vertex;

/// A single-base operation: new vertices hang off `anchor`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Extension {
    /// Leg `anchor - w - w2`.
    B { anchor: Vertex, w: Vertex, w2: Vertex },
    /// Two legs `anchor - a - b` and `anchor - c - d`.
    C { anchor: Vertex, a: Vertex, b: Vertex, c: Vertex, d: Vertex },
    /// Five-vertex path `b - a - m - c - d` joined to `anchor` at its center `m`.
    D { anchor: Vertex, m: Vertex, a: Vertex, b: Vertex, c: Vertex, d: Vertex },
}

impl Extension {
    pub fn anchor(&self) -> Vertex {
        match *self {
            Extension::B { anchor, .. } | Extension::C { anchor, .. } | Extension::D { anchor, .. } => anchor,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Extension::B { .. } => "B",
            Extension::C { .. } => "C",
            Extension::D { .. } => "D",
        }
    }

    pub fn new_vertices(&self) -> Vec<Vertex> {
        match *self {
            Extension::B { w, w2, .. } => vec![w, w2],
            Extension::C { a, b, c, d, .. } => vec![a, b, c, d],
            Extension::D { m, a, b, c, d, .. } => vec![m, a, b, c, d],
        }
    }

    pub fn new_edges(&self) -> Vec<(Vertex, Vertex)> {
        match *self {
            Extension::B { anchor, w, w2 } => vec![(anchor, w), (w, w2)],
            Extension::C { anchor, a, b, c, d } => vec![(anchor, a), (a, b), (anchor, c), (c, d)],
            Extension::D { anchor, m, a, b, c, d } => vec![(anchor, m), (m, a), (a, b), (m, c), (c, d)],
        }
    }
}

/// The pendant part operation A attaches to its hub.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AGadget {
    /// A1: two leaves `w`, `x` at the hub.
    TwoLeaves { w: Vertex, x: Vertex },
    /// A2: a leaf `x` and a leg `hub - w - w2`.
    LeafAndLeg { x: Vertex, w: Vertex, w2: Vertex },
}

impl AGadget {
    pub fn name(&self) -> &'static str {
        match self {
            AGadget::TwoLeaves { .. } => "A1",
            AGadget::LeafAndLeg { .. } => "A2",
        }
    }

    pub fn new_vertices(&self) -> Vec<Vertex> {
        match *self {
            AGadget::TwoLeaves { w, x } => vec![w, x],
            AGadget::LeafAndLeg { x, w, w2 } => vec![x, w, w2],
        }
    }

    pub fn new_edges(&self, hub: Vertex) -> Vec<(Vertex, Vertex)> {
        match *self {
            AGadget::TwoLeaves { w, x } => vec![(hub, w), (hub, x)],
            AGadget::LeafAndLeg { x, w, w2 } => vec![(hub, x), (hub, w), (w, w2)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Certificate {
    Seed1(Vertex),
    Seed2(Vertex, Vertex),
    Extend { step: Extension, base: Box<Certificate> },
    /// Operation A: a fresh `hub` joined to one anchor in each part.
    Join { hub: Vertex, gadget: AGadget, parts: Vec<(Vertex, Certificate)> },
}

/// One operation without its sub-certificates, as recorded by a reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuildStep {
    Seed1(Vertex),
    Seed2(Vertex, Vertex),
    Extend(Extension),
    Join { hub: Vertex, gadget: AGadget, anchors: Vec<Vertex> },
}

impl BuildStep {
    pub fn name(&self) -> &'static str {
        match self {
            BuildStep::Seed1(_) => "seed1",
            BuildStep::Seed2(..) => "seed2",
            BuildStep::Extend(e) => e.name(),
            BuildStep::Join { gadget, .. } => gadget.name(),
        }
    }
}

impl Certificate {
    pub fn extend(step: Extension, base: Certificate) -> Self {
        Certificate::Extend { step, base: Box::new(base) }
    }

    /// Number of operations, seeds excluded.
    pub fn op_count(&self) -> usize {
        match self {
            Certificate::Seed1(_) | Certificate::Seed2(..) => 0,
            Certificate::Extend { base, .. } => 1 + base.op_count(),
            Certificate::Join { parts, .. } => 1 + parts.iter().map(|(_, c)| c.op_count()).sum::<usize>(),
        }
    }

    /// Counts of seeds and operations by name, in a fixed order.
    pub fn histogram(&self) -> [(&'static str, usize); 7] {
        let mut h = [("seed1", 0), ("seed2", 0), ("A1", 0), ("A2", 0), ("B", 0), ("C", 0), ("D", 0)];
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            let name = match c {
                Certificate::Seed1(_) => "seed1",
                Certificate::Seed2(..) => "seed2",
                Certificate::Extend { step, base } => {
                    stack.push(base);
                    step.name()
                }
                Certificate::Join { gadget, parts, .. } => {
                    stack.extend(parts.iter().map(|(_, c)| c));
                    gadget.name()
                }
            };
            h.iter_mut().find(|(n, _)| *n == name).unwrap().1 += 1;
        }
        h
    }

    pub fn parse(text: &str) -> Result<Certificate, CertParseError> {
        let mut lexer = Lexer::new(text);
        let expr = lexer.expr()?;
        if let Some(tok) = lexer.next_token()? {
            return Err(CertParseError::at(tok.pos, "trailing input after certificate"));
        }
        to_certificate(&expr)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Seed1(v) => write!(f, "(seed1 {v})"),
            Certificate::Seed2(u, v) => write!(f, "(seed2 {u} {v})"),
            Certificate::Extend { step, base } => match *step {
                Extension::B { anchor, w, w2 } => write!(f, "(B {anchor} {w} {w2} {base})"),
                Extension::C { anchor, a, b, c, d } => write!(f, "(C {anchor} {a} {b} {c} {d} {base})"),
                Extension::D { anchor, m, a, b, c, d } => write!(f, "(D {anchor} {m} {a} {b} {c} {d} {base})"),
            },
            Certificate::Join { hub, gadget, parts } => {
                write!(f, "({} {hub} (", gadget.name())?;
                for (i, (anchor, sub)) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "({anchor} {sub})")?;
                }
                match *gadget {
                    AGadget::TwoLeaves { w, x } => write!(f, ") ({w} {x}))"),
                    AGadget::LeafAndLeg { x, w, w2 } => write!(f, ") ({x} {w} {w2}))"),
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{pos}: {msg}")]
pub struct CertParseError {
    pub pos: Pos,
    pub msg: String,
}

impl CertParseError {
    fn at(pos: Pos, msg: impl Into<String>) -> Self {
        CertParseError { pos, msg: msg.into() }
    }
}

#[derive(Debug)]
enum Expr {
    Atom(String, Pos),
    List(Vec<Expr>, Pos),
}

impl Expr {
    fn pos(&self) -> Pos {
        match self {
            Expr::Atom(_, p) | Expr::List(_, p) => *p,
        }
    }
}

#[derive(Debug, PartialEq)]
enum TokKind {
    Open,
    Close,
    Atom(String),
}

struct Tok {
    kind: TokKind,
    pos: Pos,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
    peeked: Option<Tok>,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), pos: Pos { line: 1, col: 1 }, peeked: None }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn next_token(&mut self) -> Result<Option<Tok>, CertParseError> {
        if let Some(t) = self.peeked.take() {
            return Ok(Some(t));
        }
        loop {
            match self.chars.peek().copied() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('(') => {
                    let pos = self.pos;
                    self.bump();
                    return Ok(Some(Tok { kind: TokKind::Open, pos }));
                }
                Some(')') => {
                    let pos = self.pos;
                    self.bump();
                    return Ok(Some(Tok { kind: TokKind::Close, pos }));
                }
                Some(_) => {
                    let pos = self.pos;
                    let mut s = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                            break;
                        }
                        s.push(c);
                        self.bump();
                    }
                    return Ok(Some(Tok { kind: TokKind::Atom(s), pos }));
                }
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, CertParseError> {
        // explicit stack: certificates can nest once per operation
        let mut stack: Vec<(Vec<Expr>, Pos)> = Vec::new();
        loop {
            let tok = self
                .next_token()?
                .ok_or_else(|| CertParseError::at(self.pos, "unexpected end of input"))?;
            let done = match tok.kind {
                TokKind::Open => {
                    stack.push((Vec::new(), tok.pos));
                    None
                }
                TokKind::Close => {
                    let (items, pos) =
                        stack.pop().ok_or_else(|| CertParseError::at(tok.pos, "unbalanced `)`"))?;
                    Some(Expr::List(items, pos))
                }
                TokKind::Atom(s) => Some(Expr::Atom(s, tok.pos)),
            };
            if let Some(e) = done {
                match stack.last_mut() {
                    Some((items, _)) => items.push(e),
                    None => return Ok(e),
                }
            }
        }
    }
}

fn id(e: &Expr) -> Result<Vertex, CertParseError> {
    match e {
        Expr::Atom(s, p) => s
            .parse::<Vertex>()
            .map_err(|_| CertParseError::at(*p, format!("expected a vertex id, found `{s}`"))),
        Expr::List(_, p) => Err(CertParseError::at(*p, "expected a vertex id, found a list")),
    }
}

fn list(e: &Expr) -> Result<&[Expr], CertParseError> {
    match e {
        Expr::List(items, _) => Ok(items),
        Expr::Atom(s, p) => Err(CertParseError::at(*p, format!("expected a list, found `{s}`"))),
    }
}

fn ids<const N: usize>(items: &[Expr]) -> Result<[Vertex; N], CertParseError> {
    let mut out = [0; N];
    for (slot, e) in out.iter_mut().zip(items) {
        *slot = id(e)?;
    }
    Ok(out)
}

fn to_certificate(root: &Expr) -> Result<Certificate, CertParseError> {
    // Extension chains can be long; unwind them iteratively and recurse
    // only into the parts of a join.
    let mut chain: Vec<Extension> = Vec::new();
    let mut cur = root;
    let base = loop {
        let items = list(cur)?;
        let (head, args) = items
            .split_first()
            .ok_or_else(|| CertParseError::at(cur.pos(), "empty list"))?;
        let Expr::Atom(tag, tag_pos) = head else {
            return Err(CertParseError::at(head.pos(), "expected an operation name"));
        };
        let arity = |n: usize| -> Result<(), CertParseError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(CertParseError::at(*tag_pos, format!("`{tag}` takes {n} arguments, got {}", args.len())))
            }
        };
        match tag.as_str() {
            "seed1" => {
                arity(1)?;
                break Certificate::Seed1(id(&args[0])?);
            }
            "seed2" => {
                arity(2)?;
                let [u, v] = ids::<2>(args)?;
                break Certificate::Seed2(u, v);
            }
            "B" => {
                arity(4)?;
                let [anchor, w, w2] = ids::<3>(args)?;
                chain.push(Extension::B { anchor, w, w2 });
                cur = &args[3];
            }
            "C" => {
                arity(6)?;
                let [anchor, a, b, c, d] = ids::<5>(args)?;
                chain.push(Extension::C { anchor, a, b, c, d });
                cur = &args[5];
            }
            "D" => {
                arity(7)?;
                let [anchor, m, a, b, c, d] = ids::<6>(args)?;
                chain.push(Extension::D { anchor, m, a, b, c, d });
                cur = &args[6];
            }
            "A1" | "A2" => {
                arity(3)?;
                let hub = id(&args[0])?;
                let mut parts = Vec::new();
                for p in list(&args[1])? {
                    let pair = list(p)?;
                    if pair.len() != 2 {
                        return Err(CertParseError::at(p.pos(), "expected `(anchor SUB)`"));
                    }
                    parts.push((id(&pair[0])?, to_certificate(&pair[1])?));
                }
                let gadget_items = list(&args[2])?;
                let gadget = if tag == "A1" {
                    if gadget_items.len() != 2 {
                        return Err(CertParseError::at(args[2].pos(), "A1 gadget is `(w x)`"));
                    }
                    let [w, x] = ids::<2>(gadget_items)?;
                    AGadget::TwoLeaves { w, x }
                } else {
                    if gadget_items.len() != 3 {
                        return Err(CertParseError::at(args[2].pos(), "A2 gadget is `(x w w2)`"));
                    }
                    let [x, w, w2] = ids::<3>(gadget_items)?;
                    AGadget::LeafAndLeg { x, w, w2 }
                };
                break Certificate::Join { hub, gadget, parts };
            }
            other => return Err(CertParseError::at(*tag_pos, format!("unknown operation `{other}`"))),
        }
    };
    Ok(chain.into_iter().rev().fold(base, |acc, step| Certificate::extend(step, acc)))
}
