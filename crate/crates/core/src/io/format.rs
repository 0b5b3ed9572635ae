//! Line-oriented text formats for structures, maps and partitions.
//!
//! ```text
//! # P2
//! kind pes
//! event a12 a
//! event b12 b
//! event b3 b
//! event c c
//! le a12 b12
//! cf a12 b3
//! ```
//!
//! Statements by kind: `le`/`cf` (pes), `le`/`ac` (aes), `flow`/`cf` (fes),
//! `bundle x y -> z`/`cf` (bes) and `config a b c : a<b a<c` (poset).

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::folding::{EventMap, EventPartition};
use crate::models::{AsymES, BundleES, ClosureReport, FlowES, Kind, Model, PrimeES};
use crate::poset::{EventId, EventSet, EventStructure, Label, PosetConfig};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let line = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token { text: &line[s..i], column: line[..s].chars().count() + 1 });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, column, message: message.into() }
}

/// Events declared so far, by input position.
#[derive(Default)]
struct Declared {
    events: Vec<(EventId, Label)>,
    index: HashMap<String, usize>,
}

impl Declared {
    fn declare(&mut self, line: usize, id: &Token, label: &Token) -> Result<()> {
        let eid = EventId::new(id.text).map_err(|e| syntax(line, id.column, e.to_string()))?;
        let lab = Label::new(label.text).map_err(|e| syntax(line, label.column, e.to_string()))?;
        if self.index.contains_key(id.text) {
            return Err(Error::DuplicateDeclaration { line, id: id.text.to_string() });
        }
        self.index.insert(id.text.to_string(), self.events.len());
        self.events.push((eid, lab));
        Ok(())
    }

    fn get(&self, line: usize, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UndeclaredEvent { line, id: id.to_string() })
    }
}

fn expect_args(line: usize, toks: &[Token], n: usize) -> Result<()> {
    if toks.len() != n + 1 {
        let column = toks.get(n + 1).map_or(toks[0].column, |t| t.column);
        return Err(syntax(line, column, format!("{} expects {} arguments, found {}", toks[0].text, n, toks.len() - 1)));
    }
    Ok(())
}

fn allowed(kind: Kind, keyword: &str) -> bool {
    matches!(
        (kind, keyword),
        (_, "event")
            | (Kind::Pes, "le" | "cf")
            | (Kind::Aes, "le" | "ac")
            | (Kind::Fes, "flow" | "cf")
            | (Kind::Bes, "bundle" | "cf")
            | (Kind::Poset, "config")
    )
}

const KEYWORDS: [&str; 8] = ["event", "le", "cf", "ac", "flow", "bundle", "config", "kind"];

/// Parses a structure file.
pub fn parse_es(text: &str) -> Result<Model> {
    parse_es_with_closure(text).map(|(m, _)| m)
}

/// Parses a structure file and reports the relations added by closure.
pub fn parse_es_with_closure(text: &str) -> Result<(Model, ClosureReport)> {
    let mut kind = None;
    let mut declared = Declared::default();
    let mut pairs_a: Vec<(usize, usize)> = Vec::new();
    let mut pairs_b: Vec<(usize, usize)> = Vec::new();
    let mut bundles: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut configs: Vec<(EventSet, Vec<(usize, usize)>, usize)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        let Some(current) = kind else {
            if head.text != "kind" {
                return Err(syntax(line, head.column, "expected `kind pes|aes|fes|bes|poset`"));
            }
            expect_args(line, &toks, 1)?;
            kind = Some(toks[1].text.parse::<Kind>().map_err(|m| syntax(line, toks[1].column, m))?);
            continue;
        };
        if !KEYWORDS.contains(&head.text) {
            return Err(syntax(line, head.column, format!("unknown statement {:?}", head.text)));
        }
        if head.text == "kind" {
            return Err(syntax(line, head.column, "kind declared twice"));
        }
        if !allowed(current, head.text) {
            return Err(Error::KindMismatch { line, keyword: head.text.to_string(), kind: current.to_string() });
        }
        match head.text {
            "event" => {
                expect_args(line, &toks, 2)?;
                declared.declare(line, &toks[1], &toks[2])?;
            }
            "le" | "flow" => {
                expect_args(line, &toks, 2)?;
                pairs_a.push((declared.get(line, toks[1].text)?, declared.get(line, toks[2].text)?));
            }
            "cf" | "ac" => {
                expect_args(line, &toks, 2)?;
                pairs_b.push((declared.get(line, toks[1].text)?, declared.get(line, toks[2].text)?));
            }
            "bundle" => {
                let arrow = toks.iter().position(|t| t.text == "->").ok_or_else(|| syntax(line, head.column, "bundle expects `x .. -> y`"))?;
                if arrow + 2 != toks.len() {
                    let col = toks.get(arrow + 2).or(toks.last()).map_or(head.column, |t| t.column);
                    return Err(syntax(line, col, "bundle expects exactly one target after `->`"));
                }
                let xs = toks[1..arrow].iter().map(|t| declared.get(line, t.text)).collect::<Result<Vec<_>>>()?;
                bundles.push((xs, declared.get(line, toks[arrow + 1].text)?));
            }
            "config" => {
                let colon = toks.iter().position(|t| t.text == ":").unwrap_or(toks.len());
                let mut events = EventSet::EMPTY;
                for t in &toks[1..colon] {
                    let e = declared.get(line, t.text)?;
                    if events.contains(e) {
                        return Err(syntax(line, t.column, format!("event {} listed twice", t.text)));
                    }
                    events.insert(e);
                }
                let mut order = Vec::new();
                for t in toks.iter().skip(colon + 1) {
                    let (x, y) = t.text.split_once('<').ok_or_else(|| syntax(line, t.column, "expected a pair `x<y`"))?;
                    let (x, y) = (declared.get(line, x)?, declared.get(line, y)?);
                    if !events.contains(x) || !events.contains(y) {
                        return Err(syntax(line, t.column, "ordered events must belong to the configuration"));
                    }
                    order.push((x, y));
                }
                configs.push((events, order, line));
            }
            _ => unreachable!("keywords are checked above"),
        }
    }
    let kind = kind.ok_or_else(|| syntax(1, 1, "missing `kind` declaration"))?;
    let events = declared.events;
    Ok(match kind {
        Kind::Pes => {
            let (m, r) = PrimeES::new(events, &pairs_a, &pairs_b)?;
            (Model::Pes(m), r)
        }
        Kind::Aes => {
            let (m, r) = AsymES::new(events, &pairs_a, &pairs_b)?;
            (Model::Aes(m), r)
        }
        Kind::Fes => {
            let (m, r) = FlowES::new(events, &pairs_a, &pairs_b)?;
            (Model::Fes(m), r)
        }
        Kind::Bes => {
            let (m, r) = BundleES::new(events, &bundles, &pairs_b)?;
            (Model::Bes(m), r)
        }
        Kind::Poset => {
            let mut family = Vec::with_capacity(configs.len());
            for (set, order, line) in configs {
                let c = PosetConfig::from_order(set, &order).map_err(|e| syntax(line, 1, format!("order has a cycle through event #{}", e.cycle_through)))?;
                family.push(c);
            }
            (Model::Poset(EventStructure::new(events, family)?), ClosureReport::default())
        }
    })
}

fn write_pairs(out: &mut String, keyword: &str, ids: &[EventId], pairs: &[(usize, usize)]) {
    for &(x, y) in pairs {
        let _ = writeln!(out, "{keyword} {} {}", ids[x], ids[y]);
    }
}

/// Writes a structure with events in lexicographic order followed by reduced relations.
pub fn serialize_es(model: &Model) -> String {
    let ids = model.ids();
    let mut out = format!("kind {}\n", model.kind());
    let labels: &[Label] = match model {
        Model::Poset(m) => m.labels(),
        Model::Pes(m) => m.labels(),
        Model::Aes(m) => m.labels(),
        Model::Fes(m) => m.labels(),
        Model::Bes(m) => m.labels(),
    };
    for (id, l) in ids.iter().zip(labels) {
        let _ = writeln!(out, "event {id} {l}");
    }
    match model {
        Model::Pes(p) => {
            write_pairs(&mut out, "le", ids, &p.causality_reduction());
            write_pairs(&mut out, "cf", ids, &p.minimal_conflicts());
        }
        Model::Aes(a) => {
            write_pairs(&mut out, "le", ids, &a.causality_reduction());
            write_pairs(&mut out, "ac", ids, &a.asym_generators());
        }
        Model::Fes(f) => {
            write_pairs(&mut out, "flow", ids, &f.flow_pairs());
            write_pairs(&mut out, "cf", ids, &f.conflict_pairs());
        }
        Model::Bes(b) => {
            for &(xs, y) in b.bundles() {
                let names: Vec<&str> = xs.iter().map(|x| ids[x].as_str()).collect();
                let sep = if names.is_empty() { "" } else { " " };
                let _ = writeln!(out, "bundle {}{sep}-> {}", names.join(" "), ids[y]);
            }
            write_pairs(&mut out, "cf", ids, &b.conflict_pairs());
        }
        Model::Poset(es) => {
            for c in es.family() {
                let names: Vec<&str> = c.members().map(|e| ids[e].as_str()).collect();
                let _ = write!(out, "config");
                for n in &names {
                    let _ = write!(out, " {n}");
                }
                let red = c.reduction();
                if !red.is_empty() {
                    let _ = write!(out, " :");
                    for (x, y) in red {
                        let _ = write!(out, " {}<{}", ids[x], ids[y]);
                    }
                }
                out.push('\n');
            }
        }
    }
    out
}

fn lookup(ids: &[EventId], line: usize, id: &str) -> Result<usize> {
    ids.binary_search_by(|x| x.as_str().cmp(id)).map_err(|_| Error::UndeclaredEvent { line, id: id.to_string() })
}

/// Parses `map <src> <dst>` lines into a total map.
pub fn parse_map(text: &str, src: &[EventId], dst: &[EventId]) -> Result<EventMap> {
    let mut map = vec![usize::MAX; src.len()];
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        if head.text != "map" {
            return Err(syntax(line, head.column, format!("expected `map`, found {:?}", head.text)));
        }
        expect_args(line, &toks, 2)?;
        let x = lookup(src, line, toks[1].text)?;
        let y = lookup(dst, line, toks[2].text)?;
        if map[x] != usize::MAX {
            return Err(Error::DuplicateDeclaration { line, id: toks[1].text.to_string() });
        }
        map[x] = y;
    }
    if let Some(x) = map.iter().position(|&y| y == usize::MAX) {
        return Err(Error::NonTotalMap(format!("{} is not mapped", src[x])));
    }
    Ok(EventMap::new(map))
}

pub fn serialize_map(f: &EventMap, src: &[EventId], dst: &[EventId]) -> String {
    let mut out = String::new();
    for (x, id) in src.iter().enumerate() {
        let _ = writeln!(out, "map {id} {}", dst[f.get(x)]);
    }
    out
}

/// Parses `class <id> ...` lines; unlisted events are singletons.
pub fn parse_eq(text: &str, ids: &[EventId]) -> Result<EventPartition> {
    let mut classes = Vec::new();
    let mut seen = EventSet::EMPTY;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        if head.text != "class" {
            return Err(syntax(line, head.column, format!("expected `class`, found {:?}", head.text)));
        }
        let mut class = EventSet::EMPTY;
        for t in &toks[1..] {
            let x = lookup(ids, line, t.text)?;
            if seen.contains(x) {
                return Err(Error::DuplicateDeclaration { line, id: t.text.to_string() });
            }
            seen.insert(x);
            class.insert(x);
        }
        classes.push(class);
    }
    EventPartition::from_classes(ids.len(), &classes)
}

/// Writes the non-singleton classes, sorted.
pub fn serialize_eq(p: &EventPartition, ids: &[EventId]) -> String {
    let mut lines: Vec<String> = p
        .classes()
        .iter()
        .filter(|c| c.len() > 1)
        .map(|c| {
            let names: Vec<&str> = c.iter().map(|x| ids[x].as_str()).collect();
            format!("class {}\n", names.join(" "))
        })
        .collect();
    lines.sort();
    lines.concat()
}
