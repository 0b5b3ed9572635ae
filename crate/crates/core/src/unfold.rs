//! The canonical PES of an event structure, its folding `φ`, and the
//! correspondence between configurations and sets of histories.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::folding::{check_morphism, EventMap};
use crate::models::{configs_pes, PrimeES};
use crate::poset::{histories, EventId, EventSet, EventStructure, History, PosetConfig, MAX_EVENTS};

/// `P(E)`: events are the histories of `E`, ordered by prefix, in conflict
/// when incompatible.
#[derive(Clone, Debug)]
pub struct CanonicalPes {
    pub pes: PrimeES,
    /// The history behind each event of `pes`.
    pub histories: Vec<History>,
    index: HashMap<History, usize>,
}

impl CanonicalPes {
    /// The event of `E` a history belongs to.
    pub fn owner(&self, h: usize) -> usize {
        self.histories[h].owner
    }

    pub fn event_of(&self, h: &History) -> Option<usize> {
        self.index.get(h).copied()
    }

    /// `φ_E`: each history to its owner.
    pub fn phi(&self) -> EventMap {
        EventMap::new(self.histories.iter().map(|h| h.owner).collect())
    }
}

fn history_id(es: &EventStructure, h: &History) -> String {
    let names: Vec<&str> = h.config.members().map(|e| es.id(e).as_str()).collect();
    let mut id = format!("{}@{}", es.id(h.owner), names.join("."));
    let inner: Vec<String> = h.config.reduction().into_iter().filter(|&(_, y)| y != h.owner).map(|(x, y)| format!("{}.{}", es.id(x), es.id(y))).collect();
    if !inner.is_empty() {
        id.push('@');
        id.push_str(&inner.join("+"));
    }
    id
}

pub fn canonical_pes(es: &EventStructure) -> Result<CanonicalPes> {
    let hs = histories(es);
    if hs.len() > MAX_EVENTS {
        return Err(Error::TooManyEvents(hs.len()));
    }
    let mut named: Vec<(String, History)> = hs.into_iter().map(|h| (history_id(es, &h), h)).collect();
    named.sort();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (id, _) in named.iter_mut() {
        let k = seen.entry(id.clone()).or_insert(0);
        if *k > 0 {
            id.push_str(&format!("@{k}"));
        }
        *k += 1;
    }
    named.sort();
    let n = named.len();
    let histories: Vec<History> = named.iter().map(|(_, h)| h.clone()).collect();
    let index: HashMap<History, usize> = histories.iter().cloned().enumerate().map(|(i, h)| (h, i)).collect();
    let ids = named.iter().map(|(id, _)| EventId::new(id)).collect::<Result<Vec<_>>>()?;
    let labels = histories.iter().map(|h| es.label(h.owner).clone()).collect();
    let causes: Vec<EventSet> = histories.iter().map(|h2| (0..n).filter(|&u| histories[u].config.is_prefix_of(&h2.config)).collect()).collect();
    let mut compatible = vec![EventSet::EMPTY; n];
    for c in es.family() {
        let hset: EventSet = c.members().map(|x| index[&History { owner: x, config: c.history(x) }]).collect();
        for u in hset.iter() {
            compatible[u] |= hset;
        }
    }
    let conflict = compatible.iter().map(|&c| EventSet::full(n) - c).collect();
    Ok(CanonicalPes { pes: PrimeES::from_closed(ids, labels, causes, conflict), histories, index })
}

/// `φ_E : P(E) → E`.
pub fn phi(es: &EventStructure) -> Result<(CanonicalPes, EventMap)> {
    let cp = canonical_pes(es)?;
    let f = cp.phi();
    Ok((cp, f))
}

/// `hset(C) = {C[x] | x ∈ C}`, ordered by prefix.
pub fn hset(es: &EventStructure, cp: &CanonicalPes, c: &PosetConfig) -> Result<PosetConfig> {
    es.require(c)?;
    let events: EventSet = c
        .members()
        .map(|x| cp.event_of(&History { owner: x, config: c.history(x) }).expect("histories of a family configuration are events of P(E)"))
        .collect();
    Ok(PosetConfig::from_below_fn(events, |u| cp.pes.strict_causes(u)))
}

/// `flt(D) = ∪D` with `x ≤ y` iff `x` belongs to the history of `y` in `D`.
pub fn flt(cp: &CanonicalPes, canonical: &EventStructure, d: &PosetConfig) -> Result<PosetConfig> {
    canonical.require(d)?;
    let mut events = EventSet::EMPTY;
    let mut below = HashMap::new();
    for u in d.members() {
        let h = &cp.histories[u];
        events.insert(h.owner);
        below.insert(h.owner, h.config.events().without(h.owner));
    }
    Ok(PosetConfig::from_below_fn(events, |x| below[&x]))
}

fn require_morphism(src: &EventStructure, dst: &EventStructure, f: &EventMap) -> Result<()> {
    let r = check_morphism(src, dst, f)?;
    if r.verdict() {
        Ok(())
    } else {
        Err(Error::NotAMorphism(r))
    }
}

/// The unique `g : P → P(E)` with `φ_E ∘ g = f`, given by `g(x) = f(⌈x⌉)`.
pub fn factorize(p: &PrimeES, es: &EventStructure, f: &EventMap) -> Result<(CanonicalPes, EventMap)> {
    let src = configs_pes(p);
    require_morphism(&src, es, f)?;
    let cp = canonical_pes(es)?;
    let mut g = Vec::with_capacity(p.n_events());
    for x in 0..p.n_events() {
        let down = PosetConfig::from_below_fn(p.causes(x), |e| p.strict_causes(e));
        let image = down.map(f.as_slice()).expect("morphisms are injective on configurations");
        let h = History { owner: f.get(x), config: image };
        let u = cp.event_of(&h).ok_or_else(|| Error::ImageNotAHistory(es.show(&h.config)))?;
        g.push(u);
    }
    Ok((cp, EventMap::new(g)))
}

/// `P(f) : P(E) → P(E')`, `H ↦ f(H)`.
pub fn lift(src: &EventStructure, dst: &EventStructure, f: &EventMap) -> Result<(CanonicalPes, CanonicalPes, EventMap)> {
    require_morphism(src, dst, f)?;
    let cs = canonical_pes(src)?;
    let cd = canonical_pes(dst)?;
    let mut g = Vec::with_capacity(cs.histories.len());
    for h in &cs.histories {
        let image = h.config.map(f.as_slice()).expect("morphisms are injective on configurations");
        let target = History { owner: f.get(h.owner), config: image };
        let u = cd.event_of(&target).ok_or_else(|| Error::ImageNotAHistory(dst.show(&target.config)))?;
        g.push(u);
    }
    Ok((cs, cd, EventMap::new(g)))
}
