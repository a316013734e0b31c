//! The line-oriented `.apn` model format.
//!
//! ```text
//! .name alarm
//! .places e0[init=1,env] p0[init=1] bad[bad]
//! .transitions t0[weakfair] t1
//! .flows t0: {e0} -> {e1}
//! .transits t0: > -> e1
//! .coords e0: (120.5, 40)
//! ```
//!
//! `#` starts a comment. Every directive may appear more than once, except
//! `.name`; references are resolved after the whole document is read.

use std::fmt::{self, Write as _};

use thiserror::Error;

use super::{Coord, Net, NetBuilder, NetError, Node, Place, PlaceKind, Transition};
use crate::transit::{Transit, TransitSource};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A parsed `.apn` document: the net plus its (possibly empty) transit relation.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub net: Net,
    /// Transits per transition index.
    pub transits: Vec<Vec<Transit>>,
}

pub fn parse_net(text: &str) -> Result<Net, ParseError> {
    parse_document(text).map(|d| d.net)
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.text[..pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    /// Returns the identifier and its starting byte offset.
    fn ident(&mut self) -> Result<(&'a str, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c == '_' || c.is_ascii_alphabetic() || (i > 0 && c.is_ascii_digit())))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return Err(self.error("expected identifier"));
        }
        self.pos += len;
        Ok((&self.text[start..start + len], start))
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_ascii_digit() || matches!(c, '-' | '+' | '.' | 'e' | 'E')))
            .map_or(rest.len(), |(i, _)| i);
        let lit = &rest[..len];
        match lit.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos += len;
                Ok(v)
            }
            _ => Err(self.error("expected number")),
        }
    }
}

/// A name reference kept with its source position for late resolution.
struct Ref {
    name: String,
    line: usize,
    column: usize,
}

impl Ref {
    fn new(c: &Cursor<'_>, name: &str, start: usize) -> Self {
        let e = c.error_at(start, "");
        Self {
            name: name.to_string(),
            line: e.line,
            column: e.column,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn net_error(&self, e: NetError) -> ParseError {
        self.error(e.to_string())
    }
}

struct FlowLine {
    transition: Ref,
    pre: Vec<Ref>,
    post: Vec<Ref>,
}

struct TransitLine {
    transition: Ref,
    pairs: Vec<(Option<Ref>, Ref)>,
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut name: Option<String> = None;
    let mut builder = NetBuilder::new("_");
    let mut flows: Vec<FlowLine> = Vec::new();
    let mut transits: Vec<TransitLine> = Vec::new();
    let mut coords: Vec<(Ref, Coord)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut c = Cursor {
            line: i + 1,
            text: content,
            pos: 0,
        };
        if c.at_end() {
            continue;
        }
        let start = c.pos;
        if !c.eat(".") {
            return Err(c.error("expected a directive such as `.places`"));
        }
        let (directive, _) = c.ident()?;
        match directive {
            "name" => {
                let (n, _) = c.ident()?;
                if name.is_some() {
                    return Err(c.error_at(start, "duplicate .name"));
                }
                name = Some(n.to_string());
            }
            "places" => {
                while !c.at_end() {
                    let (id, at) = c.ident()?;
                    let mut place = Place::new(id);
                    for (flag, value, fpos) in flags(&mut c)? {
                        match (flag, value) {
                            ("init", Some(v)) => match v {
                                "0" => place.initial = false,
                                "1" => place.initial = true,
                                _ => {
                                    return Err(c.error_at(
                                        fpos,
                                        format!("token count {v} of {id} exceeds 1"),
                                    ))
                                }
                            },
                            ("env", None) => place.kind = PlaceKind::Environment,
                            ("bad", None) => place.bad = true,
                            _ => {
                                return Err(c.error_at(fpos, format!("invalid place flag `{flag}`")))
                            }
                        }
                    }
                    builder
                        .add_place(place)
                        .map_err(|e| c.error_at(at, e.to_string()))?;
                }
            }
            "transitions" => {
                while !c.at_end() {
                    let (id, at) = c.ident()?;
                    let mut tr = Transition::new(id);
                    for (flag, value, fpos) in flags(&mut c)? {
                        match (flag, value) {
                            ("weakfair", None) => tr.weakfair = true,
                            _ => {
                                return Err(c.error_at(
                                    fpos,
                                    format!("invalid transition flag `{flag}`"),
                                ))
                            }
                        }
                    }
                    builder
                        .add_transition(tr)
                        .map_err(|e| c.error_at(at, e.to_string()))?;
                }
            }
            "flows" => {
                let (t, at) = c.ident()?;
                let transition = Ref::new(&c, t, at);
                c.expect(":")?;
                let pre = place_set(&mut c)?;
                c.expect("->")?;
                let post = place_set(&mut c)?;
                if !c.at_end() {
                    return Err(c.error("unexpected trailing input"));
                }
                flows.push(FlowLine {
                    transition,
                    pre,
                    post,
                });
            }
            "transits" => {
                let (t, at) = c.ident()?;
                let transition = Ref::new(&c, t, at);
                c.expect(":")?;
                let mut pairs = Vec::new();
                loop {
                    let src = if c.eat(">") {
                        None
                    } else {
                        let (s, at) = c.ident()?;
                        Some(Ref::new(&c, s, at))
                    };
                    c.expect("->")?;
                    let (d, at) = c.ident()?;
                    pairs.push((src, Ref::new(&c, d, at)));
                    if !c.eat(",") {
                        break;
                    }
                }
                if !c.at_end() {
                    return Err(c.error("unexpected trailing input"));
                }
                transits.push(TransitLine { transition, pairs });
            }
            "coords" => {
                let (n, at) = c.ident()?;
                let node = Ref::new(&c, n, at);
                c.expect(":")?;
                c.expect("(")?;
                let x = c.number()?;
                c.expect(",")?;
                let y = c.number()?;
                c.expect(")")?;
                if !c.at_end() {
                    return Err(c.error("unexpected trailing input"));
                }
                coords.push((node, Coord::new(x, y)));
            }
            other => {
                return Err(c.error_at(start, format!("unknown directive .{other}")));
            }
        }
    }

    let name = name.ok_or(ParseError {
        line: 1,
        column: 1,
        message: "missing .name".into(),
    })?;
    builder.name = name;

    let mut seen_flows = vec![false; builder.transitions.len()];
    for f in &flows {
        let t = transition_ref(&builder, &f.transition)?;
        if std::mem::replace(&mut seen_flows[t], true) {
            return Err(f.transition.error(format!("duplicate .flows for {}", f.transition.name)));
        }
        for p in &f.pre {
            builder
                .add_arc_in(&p.name, &f.transition.name)
                .map_err(|e| p.net_error(e))?;
        }
        for p in &f.post {
            builder
                .add_arc_out(&f.transition.name, &p.name)
                .map_err(|e| p.net_error(e))?;
        }
    }
    for (node, coord) in &coords {
        builder
            .set_coord(&node.name, *coord)
            .map_err(|e| node.net_error(e))?;
    }

    let mut transit_table: Vec<Vec<Transit>> = vec![Vec::new(); builder.transitions.len()];
    for line in &transits {
        let t = transition_ref(&builder, &line.transition)?;
        for (src, dst) in &line.pairs {
            let source = match src {
                None => TransitSource::Start,
                Some(r) => {
                    let p = place_ref(&builder, r)?;
                    if builder.pre[t].binary_search(&p).is_err() {
                        return Err(r.error(format!(
                            "transit source {} is not in the preset of {}",
                            r.name, line.transition.name
                        )));
                    }
                    TransitSource::Place(p)
                }
            };
            let target = place_ref(&builder, dst)?;
            if builder.post[t].binary_search(&target).is_err() {
                return Err(dst.error(format!(
                    "transit target {} is not in the postset of {}",
                    dst.name, line.transition.name
                )));
            }
            let transit = Transit { source, target };
            if transit_table[t].contains(&transit) {
                return Err(dst.error(format!("duplicate transit on {}", line.transition.name)));
            }
            transit_table[t].push(transit);
        }
    }

    let net = builder.build().map_err(|e| ParseError {
        line: 1,
        column: 1,
        message: e.to_string(),
    })?;
    Ok(Document {
        net,
        transits: transit_table,
    })
}

fn transition_ref(b: &NetBuilder, r: &Ref) -> Result<usize, ParseError> {
    match b.lookup(&r.name) {
        Some(Node::Transition(t)) => Ok(t),
        Some(Node::Place(_)) => Err(r.error(format!("{} is not a transition", r.name))),
        None => Err(r.error(format!("unknown node {}", r.name))),
    }
}

fn place_ref(b: &NetBuilder, r: &Ref) -> Result<usize, ParseError> {
    match b.lookup(&r.name) {
        Some(Node::Place(p)) => Ok(p),
        Some(Node::Transition(_)) => Err(r.error(format!("{} is not a place", r.name))),
        None => Err(r.error(format!("unknown node {}", r.name))),
    }
}

type Flag<'a> = (&'a str, Option<&'a str>, usize);

/// Optional `[a,b=c]` flag list directly after a node name.
fn flags<'a>(c: &mut Cursor<'a>) -> Result<Vec<Flag<'a>>, ParseError> {
    let mut out = Vec::new();
    if c.peek() != Some('[') {
        return Ok(out);
    }
    c.pos += 1;
    loop {
        let (flag, at) = c.ident()?;
        let value = if c.eat("=") {
            c.skip_ws();
            let start = c.pos;
            let rest = &c.text[start..];
            let len = rest
                .find(|ch: char| ch == ',' || ch == ']' || ch.is_whitespace())
                .unwrap_or(rest.len());
            if len == 0 {
                return Err(c.error("expected flag value"));
            }
            c.pos += len;
            Some(&c.text[start..start + len])
        } else {
            None
        };
        out.push((flag, value, at));
        if c.eat("]") {
            return Ok(out);
        }
        c.expect(",")?;
    }
}

fn place_set(c: &mut Cursor<'_>) -> Result<Vec<Ref>, ParseError> {
    c.expect("{")?;
    let mut out = Vec::new();
    if c.eat("}") {
        return Ok(out);
    }
    loop {
        let (p, at) = c.ident()?;
        out.push(Ref::new(c, p, at));
        if c.eat("}") {
            return Ok(out);
        }
        c.expect(",")?;
    }
}

/// Canonical text of a net and its transits. Parsing the output yields an
/// equal document.
pub fn render(net: &Net, transits: &[Vec<Transit>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, ".name {}", net.name());
    if !net.places().is_empty() {
        out.push_str(".places");
        for p in net.places() {
            let mut fl = Vec::new();
            if p.initial {
                fl.push("init=1");
            }
            if p.kind == PlaceKind::Environment {
                fl.push("env");
            }
            if p.bad {
                fl.push("bad");
            }
            let _ = write!(out, " {}{}", p.id, FlagList(&fl));
        }
        out.push('\n');
    }
    if !net.transitions().is_empty() {
        out.push_str(".transitions");
        for t in net.transitions() {
            let fl = if t.weakfair { vec!["weakfair"] } else { vec![] };
            let _ = write!(out, " {}{}", t.id, FlagList(&fl));
        }
        out.push('\n');
    }
    let ids = |ps: &[usize]| {
        ps.iter()
            .map(|&p| net.place(p).id.as_str())
            .collect::<Vec<_>>()
            .join(",")
    };
    for (t, tr) in net.transitions().iter().enumerate() {
        let _ = writeln!(
            out,
            ".flows {}: {{{}}} -> {{{}}}",
            tr.id,
            ids(net.pre(t)),
            ids(net.post(t))
        );
    }
    for (t, list) in transits.iter().enumerate() {
        if list.is_empty() {
            continue;
        }
        let pairs = list
            .iter()
            .map(|tr| {
                let src = match tr.source {
                    TransitSource::Start => ">",
                    TransitSource::Place(p) => net.place(p).id.as_str(),
                };
                format!("{src} -> {}", net.place(tr.target).id)
            })
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, ".transits {}: {}", net.transition(t).id, pairs);
    }
    for node in net.nodes() {
        if let Some(c) = net.coord(node) {
            let _ = writeln!(out, ".coords {}: ({}, {})", net.node_id(node), c.x, c.y);
        }
    }
    out
}

struct FlagList<'a>(&'a [&'a str]);

impl fmt::Display for FlagList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            Ok(())
        } else {
            write!(f, "[{}]", self.0.join(","))
        }
    }
}
