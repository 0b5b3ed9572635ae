//! Bundled fixture corpus reproducing the example structures and maps.

use crate::error::{Error, Result};
use crate::folding::EventMap;
use crate::io::format::{parse_es, parse_map};
use crate::models::Model;

/// `(name, text)` of every bundled structure.
pub const STRUCTURES: &[(&str, &str)] = &[
    ("a0", include_str!("../fixtures/a0.es")),
    ("a1", include_str!("../fixtures/a1.es")),
    ("a2", include_str!("../fixtures/a2.es")),
    ("a3", include_str!("../fixtures/a3.es")),
    ("f0", include_str!("../fixtures/f0.es")),
    ("f1", include_str!("../fixtures/f1.es")),
    ("f2", include_str!("../fixtures/f2.es")),
    ("f3", include_str!("../fixtures/f3.es")),
    ("fig1_es", include_str!("../fixtures/fig1_es.es")),
    ("fig1_pes", include_str!("../fixtures/fig1_pes.es")),
    ("fig7_a0", include_str!("../fixtures/fig7_a0.es")),
    ("fig7_a1", include_str!("../fixtures/fig7_a1.es")),
    ("fig7_a2", include_str!("../fixtures/fig7_a2.es")),
    ("fig7_a3", include_str!("../fixtures/fig7_a3.es")),
    ("p0", include_str!("../fixtures/p0.es")),
    ("p1", include_str!("../fixtures/p1.es")),
    ("p2", include_str!("../fixtures/p2.es")),
    ("p3", include_str!("../fixtures/p3.es")),
    ("p4", include_str!("../fixtures/p4.es")),
    ("p5", include_str!("../fixtures/p5.es")),
    ("p6", include_str!("../fixtures/p6.es")),
    ("p7", include_str!("../fixtures/p7.es")),
    ("p8", include_str!("../fixtures/p8.es")),
];

/// `(name, source, target, text)` of every bundled map.
pub const MAPS: &[(&str, &str, &str, &str)] = &[
    ("f01", "p0", "p1", include_str!("../fixtures/f01.map")),
    ("f02", "p0", "p2", include_str!("../fixtures/f02.map")),
    ("f12", "p1", "p2", include_str!("../fixtures/f12.map")),
    ("f30", "p3", "p0", include_str!("../fixtures/f30.map")),
    ("f31", "p3", "p1", include_str!("../fixtures/f31.map")),
    ("f45", "p4", "p5", include_str!("../fixtures/f45.map")),
    ("f46", "p4", "p6", include_str!("../fixtures/f46.map")),
    ("f78", "p7", "p8", include_str!("../fixtures/f78.map")),
    ("ff01", "f0", "f1", include_str!("../fixtures/ff01.map")),
    ("ff02", "f0", "f2", include_str!("../fixtures/ff02.map")),
    ("ff03", "f0", "f3", include_str!("../fixtures/ff03.map")),
    ("g12", "a1", "a2", include_str!("../fixtures/g12.map")),
    ("g23", "a2", "a3", include_str!("../fixtures/g23.map")),
    ("h01", "fig7_a0", "fig7_a1", include_str!("../fixtures/h01.map")),
    ("h02", "fig7_a0", "fig7_a2", include_str!("../fixtures/h02.map")),
    ("h03", "fig7_a0", "fig7_a3", include_str!("../fixtures/h03.map")),
    ("p2_a0", "p2", "a0", include_str!("../fixtures/p2_a0.map")),
];

pub fn structure_text(name: &str) -> Option<&'static str> {
    STRUCTURES.iter().find(|s| s.0 == name).map(|s| s.1)
}

/// Parses a bundled structure.
pub fn structure(name: &str) -> Result<Model> {
    parse_es(structure_text(name).ok_or_else(|| Error::UnknownEvent(format!("fixture {name}")))?)
}

/// Parses a bundled map together with its endpoints.
pub fn map(name: &str) -> Result<(Model, Model, EventMap)> {
    let &(_, src, dst, text) = MAPS.iter().find(|m| m.0 == name).ok_or_else(|| Error::UnknownEvent(format!("fixture {name}")))?;
    let (s, d) = (structure(src)?, structure(dst)?);
    let f = parse_map(text, s.ids(), d.ids())?;
    Ok((s, d, f))
}
