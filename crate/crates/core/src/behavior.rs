//! Configuration isomorphisms, (hereditary) history-preserving bisimilarity
//! and semantic precedence/conflict.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::folding::EventMap;
use crate::models::PrimeES;
use crate::poset::{EventId, EventSet, EventStructure, Label, PosetConfig, MAX_EVENTS};
use crate::report::CheckReport;

/// Default bound on the number of candidate triples explored by `decide_bisim`.
pub const DEFAULT_TRIPLE_CAP: usize = 1_000_000;

/// Environment variable overriding [`DEFAULT_TRIPLE_CAP`].
pub const TRIPLE_CAP_ENV: &str = "ESMIN_TRIPLE_CAP";

/// A label- and order-preserving bijection between two configurations,
/// as `(source event, target event)` pairs sorted by source.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigIso {
    pub pairs: Vec<(usize, usize)>,
}

impl ConfigIso {
    pub fn apply(&self, x: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == x).map(|p| p.1)
    }

    fn from_targets(c1: &PosetConfig, targets: &[u8]) -> Self {
        ConfigIso { pairs: c1.members().zip(targets.iter().map(|&t| t as usize)).collect() }
    }
}

/// One triple `(C, f, C')`, with `C` and `C'` given as family indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BisimTriple {
    pub left: usize,
    pub iso: ConfigIso,
    pub right: usize,
}

/// A set of triples relating the families of two structures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimRelation {
    pub triples: Vec<BisimTriple>,
    pub hereditary: bool,
}

/// All label-preserving order isomorphisms from `c1` to `c2`.
pub fn config_iso(c1: &PosetConfig, l1: &[Label], c2: &PosetConfig, l2: &[Label]) -> Vec<ConfigIso> {
    raw_isos(c1, l1, c2, l2).iter().map(|t| ConfigIso::from_targets(c1, t)).collect()
}

fn raw_isos(c1: &PosetConfig, l1: &[Label], c2: &PosetConfig, l2: &[Label]) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if c1.len() != c2.len() {
        return out;
    }
    let m1: Vec<usize> = c1.linearization();
    let m2: Vec<usize> = c2.members().collect();
    let sig = |c: &PosetConfig, e: usize| (c.below(e).len(), c.above(e).len());
    let s2: Vec<(usize, usize)> = m2.iter().map(|&e| sig(c2, e)).collect();
    let mut assign = vec![usize::MAX; m1.len()];
    let mut used = EventSet::EMPTY;
    fn go(
        k: usize,
        m1: &[usize],
        m2: &[usize],
        s2: &[(usize, usize)],
        c1: &PosetConfig,
        l1: &[Label],
        c2: &PosetConfig,
        l2: &[Label],
        assign: &mut Vec<usize>,
        used: &mut EventSet,
        out: &mut Vec<Vec<u8>>,
    ) {
        if k == m1.len() {
            let mut t = vec![0u8; m1.len()];
            for (i, &x) in m1.iter().enumerate() {
                t[c1.events().rank(x)] = assign[i] as u8;
            }
            out.push(t);
            return;
        }
        let x = m1[k];
        let sx = (c1.below(x).len(), c1.above(x).len());
        for (j, &y) in m2.iter().enumerate() {
            if used.contains(y) || s2[j] != sx || l1[x] != l2[y] {
                continue;
            }
            let consistent = (0..k).all(|i| c1.lt(m1[i], x) == c2.lt(assign[i], y) && c1.lt(x, m1[i]) == c2.lt(y, assign[i]));
            if consistent {
                assign[k] = y;
                used.insert(y);
                go(k + 1, m1, m2, s2, c1, l1, c2, l2, assign, used, out);
                used.remove(y);
            }
        }
    }
    go(0, &m1, &m2, &s2, c1, l1, c2, l2, &mut assign, &mut used, &mut out);
    out.sort();
    out
}

fn triple_cap() -> usize {
    std::env::var(TRIPLE_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_TRIPLE_CAP)
}

type Key = (u32, u32, Box<[u8]>);

/// Inserts `x ↦ y` into a map given as targets aligned with the members of `c`.
fn extend_targets(c: &PosetConfig, targets: &[u8], x: usize, y: usize) -> Box<[u8]> {
    let r = c.events().rank(x);
    let mut v = Vec::with_capacity(targets.len() + 1);
    v.extend_from_slice(&targets[..r]);
    v.push(y as u8);
    v.extend_from_slice(&targets[r..]);
    v.into_boxed_slice()
}

fn remove_target(c: &PosetConfig, targets: &[u8], x: usize) -> Box<[u8]> {
    let r = c.events().rank(x);
    let mut v = targets.to_vec();
    v.remove(r);
    v.into_boxed_slice()
}

/// Decides (h)hp-bisimilarity by a greatest-fixpoint computation over all
/// isomorphism triples and returns the greatest bisimulation, if any.
pub fn decide_bisim(es1: &EventStructure, es2: &EventStructure, hereditary: bool) -> Result<Option<BisimRelation>> {
    let cap = triple_cap();
    let mut keys: Vec<Key> = Vec::new();
    let mut index: HashMap<Key, u32> = HashMap::new();
    fn label_sig<'a>(es: &'a EventStructure, c: &PosetConfig) -> Vec<&'a Label> {
        let mut v: Vec<&Label> = c.members().map(|e| es.label(e)).collect();
        v.sort();
        v
    }
    let sig2: Vec<Vec<&Label>> = es2.family().iter().map(|c| label_sig(es2, c)).collect();
    for (i, c1) in es1.family().iter().enumerate() {
        let s1 = label_sig(es1, c1);
        for (j, c2) in es2.family().iter().enumerate() {
            if sig2[j] != s1 {
                continue;
            }
            for t in raw_isos(c1, es1.labels(), c2, es2.labels()) {
                let key: Key = (i as u32, j as u32, t.into_boxed_slice());
                index.insert(key.clone(), keys.len() as u32);
                keys.push(key);
                if keys.len() > cap {
                    return Err(Error::UniverseCap { cap });
                }
            }
        }
    }
    let mut alive = vec![true; keys.len()];
    let is_alive = |alive: &[bool], k: &Key| index.get(k).is_some_and(|&t| alive[t as usize]);
    loop {
        let mut changed = false;
        for t in 0..keys.len() {
            if !alive[t] {
                continue;
            }
            let (i, j, ref f) = keys[t];
            let (i, j) = (i as usize, j as usize);
            let c1 = es1.config(i);
            let forth = es1.single_successors(i).iter().all(|&(x, i2)| {
                es2.single_successors(j).iter().any(|&(y, j2)| {
                    es1.label(x) == es2.label(y) && is_alive(&alive, &(i2 as u32, j2 as u32, extend_targets(c1, f, x, y)))
                })
            });
            let back = forth
                && es2.single_successors(j).iter().all(|&(y, j2)| {
                    es1.single_successors(i).iter().any(|&(x, i2)| {
                        es1.label(x) == es2.label(y) && is_alive(&alive, &(i2 as u32, j2 as u32, extend_targets(c1, f, x, y)))
                    })
                });
            let down = back
                && (!hereditary
                    || es1.single_predecessors(i).iter().all(|&(x, i0)| {
                        let y = f[c1.events().rank(x)] as usize;
                        es2.single_predecessors(j)
                            .iter()
                            .find(|p| p.0 == y)
                            .is_some_and(|&(_, j0)| is_alive(&alive, &(i0 as u32, j0 as u32, remove_target(c1, f, x))))
                    }));
            if !down {
                alive[t] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let root: Key = (0, 0, Box::new([]));
    if !is_alive(&alive, &root) {
        return Ok(None);
    }
    let triples = keys
        .iter()
        .zip(&alive)
        .filter(|(_, &a)| a)
        .map(|((i, j, f), _)| BisimTriple { left: *i as usize, iso: ConfigIso::from_targets(es1.config(*i as usize), f), right: *j as usize })
        .collect();
    Ok(Some(BisimRelation { triples, hereditary }))
}

/// Checks that `rel` is an (h)hp-bisimulation between `es1` and `es2`.
pub fn check_bisimulation(es1: &EventStructure, es2: &EventStructure, rel: &BisimRelation) -> CheckReport {
    let mut report = CheckReport::default();
    let set: HashSet<(usize, Vec<(usize, usize)>, usize)> = rel.triples.iter().map(|t| (t.left, t.iso.pairs.clone(), t.right)).collect();
    let has = |i: usize, f: &[(usize, usize)], j: usize| set.contains(&(i, f.to_vec(), j));
    if !has(0, &[], 0) {
        report.push("root", "(∅, ∅, ∅) is missing");
    }
    for t in &rel.triples {
        let (c1, c2) = (es1.config(t.left), es2.config(t.right));
        let shown = || format!("({}, {})", es1.show(c1), es2.show(c2));
        let targets: Vec<u8> = t.iso.pairs.iter().map(|p| p.1 as u8).collect();
        let domain_ok = t.iso.pairs.iter().map(|p| p.0).eq(c1.members());
        let is_iso = domain_ok && raw_isos(c1, es1.labels(), c2, es2.labels()).contains(&targets);
        if !is_iso {
            report.push("isomorphism", shown());
            continue;
        }
        let extended = |x: usize, y: usize| {
            let mut f = t.iso.pairs.clone();
            f.push((x, y));
            f.sort_unstable();
            f
        };
        for &(x, i2) in es1.single_successors(t.left) {
            let matched = es2.single_successors(t.right).iter().any(|&(y, j2)| has(i2, &extended(x, y), j2));
            if !matched {
                report.push("clause-1", format!("{} cannot match {}", shown(), es1.id(x)));
            }
        }
        for &(y, j2) in es2.single_successors(t.right) {
            let matched = es1.single_successors(t.left).iter().any(|&(x, i2)| has(i2, &extended(x, y), j2));
            if !matched {
                report.push("clause-2", format!("{} cannot match {}", shown(), es2.id(y)));
            }
        }
        if rel.hereditary {
            for &(x, i0) in es1.single_predecessors(t.left) {
                let y = t.iso.apply(x).expect("domain checked");
                let restricted: Vec<(usize, usize)> = t.iso.pairs.iter().copied().filter(|p| p.0 != x).collect();
                let ok = es2.single_predecessors(t.right).iter().any(|&(y2, j0)| y2 == y && has(i0, &restricted, j0));
                if !ok {
                    report.push("downward-closure", format!("{} without {}", shown(), es1.id(x)));
                }
            }
        }
    }
    report
}

/// Builds the PES `E_R` of a hereditary bisimulation together with its
/// projections onto both structures.
pub fn bisim_to_es(es1: &EventStructure, es2: &EventStructure, rel: &BisimRelation) -> Result<(PrimeES, EventMap, EventMap)> {
    if !rel.hereditary {
        return Err(Error::NotHereditary);
    }
    let mut events: BTreeMap<(PosetConfig, Vec<(usize, usize)>), (usize, usize)> = BTreeMap::new();
    for t in &rel.triples {
        let c = es1.config(t.left);
        for x in c.members() {
            let h = c.history(x);
            let f: Vec<(usize, usize)> = t.iso.pairs.iter().copied().filter(|p| h.contains(p.0)).collect();
            let image = t.iso.apply(x).expect("iso is total on its configuration");
            events.insert((h, f), (x, image));
        }
    }
    if events.len() > MAX_EVENTS {
        return Err(Error::TooManyEvents(events.len()));
    }
    let keys: Vec<_> = events.into_iter().collect();
    let n = keys.len();
    let sub = |a: &[(usize, usize)], b: &[(usize, usize)]| a.iter().all(|p| b.contains(p));
    let mut causes = vec![EventSet::EMPTY; n];
    for (u, ((hu, fu), _)) in keys.iter().enumerate() {
        for (v, ((hv, fv), _)) in keys.iter().enumerate() {
            if hu.is_prefix_of(hv) && sub(fu, fv) {
                causes[v].insert(u);
            }
        }
    }
    let mut compatible = vec![EventSet::EMPTY; n];
    for t in &rel.triples {
        let c = es1.config(t.left);
        let covered: EventSet =
            keys.iter().enumerate().filter(|(_, ((h, f), _))| h.is_prefix_of(c) && sub(f, &t.iso.pairs)).map(|(u, _)| u).collect();
        for u in covered.iter() {
            compatible[u] |= covered;
        }
    }
    let conflict: Vec<EventSet> = compatible.iter().map(|&c| EventSet::full(n) - c).collect();
    let mut counters: HashMap<(usize, usize), usize> = HashMap::new();
    let mut named: Vec<(EventId, usize)> = Vec::with_capacity(n);
    for (u, (_, (x, y))) in keys.iter().enumerate() {
        let k = counters.entry((*x, *y)).or_insert(0);
        let id = EventId::new(&format!("{}@{}.{}", es1.id(*x), es2.id(*y), k))?;
        *k += 1;
        named.push((id, u));
    }
    named.sort();
    let mut perm = vec![0; n];
    for (new, (_, old)) in named.iter().enumerate() {
        perm[*old] = new;
    }
    let relabel = |sets: &[EventSet]| {
        let mut out = vec![EventSet::EMPTY; n];
        for (old, s) in sets.iter().enumerate() {
            out[perm[old]] = s.iter().map(|e| perm[e]).collect();
        }
        out
    };
    let ids: Vec<EventId> = named.iter().map(|(id, _)| id.clone()).collect();
    let labels: Vec<Label> = named.iter().map(|(_, old)| es1.label(keys[*old].1 .0).clone()).collect();
    let proj1: Vec<usize> = named.iter().map(|(_, old)| keys[*old].1 .0).collect();
    let proj2: Vec<usize> = named.iter().map(|(_, old)| keys[*old].1 .1).collect();
    let pes = PrimeES::from_closed(ids, labels, relabel(&causes), relabel(&conflict));
    Ok((pes, EventMap::new(proj1), EventMap::new(proj2)))
}

/// Semantic precedence `x ⌢→ y` and binary semantic conflict of a structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemanticRelations {
    precedence: Vec<EventSet>,
    conflict: Vec<EventSet>,
}

impl SemanticRelations {
    /// `x ⌢→ y`: `x <_C y` in every configuration containing both.
    pub fn precedes(&self, x: usize, y: usize) -> bool {
        self.precedence[x].contains(y)
    }

    pub fn in_conflict(&self, x: usize, y: usize) -> bool {
        self.conflict[x].contains(y)
    }

    pub fn conflicts(&self, x: usize) -> EventSet {
        self.conflict[x]
    }

    /// `#X`: no configuration contains all of `s`.
    pub fn is_conflict_set(es: &EventStructure, s: EventSet) -> bool {
        !es.is_consistent_set(s)
    }
}

pub fn semantic_relations(es: &EventStructure) -> SemanticRelations {
    let n = es.n_events();
    let all = EventSet::full(n);
    let mut precedence: Vec<EventSet> = (0..n).map(|x| all.without(x)).collect();
    let mut cooccur = vec![EventSet::EMPTY; n];
    for c in es.family() {
        for x in c.members() {
            cooccur[x] |= c.events();
            for y in c.members() {
                if x != y && !c.lt(x, y) {
                    precedence[x].remove(y);
                }
            }
        }
    }
    let conflict = (0..n).map(|x| all.without(x) - cooccur[x]).collect();
    SemanticRelations { precedence, conflict }
}

/// Every local ordering `x <_C y` entails `x ⌢→ y`.
pub fn has_global_precedence(es: &EventStructure) -> bool {
    let sem = semantic_relations(es);
    es.family().iter().all(|c| c.pairs().into_iter().all(|(x, y)| sem.precedes(x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Label;

    fn labels(names: &[&str]) -> Vec<Label> {
        names.iter().map(|n| Label::new(n).unwrap()).collect()
    }

    #[test]
    fn identity_iso_with_distinct_labels() {
        let l = labels(&["a", "c"]);
        let c = PosetConfig::from_order(EventSet::from_bits(0b11), &[(0, 1)]).unwrap();
        assert_eq!(config_iso(&c, &l, &c, &l), vec![ConfigIso { pairs: vec![(0, 0), (1, 1)] }]);
    }

    #[test]
    fn chains_with_renamed_events() {
        // a1 a2 b1 b2
        let l = labels(&["a", "a", "b", "b"]);
        let c1 = PosetConfig::from_order(EventSet::from_bits(0b0101), &[(0, 2)]).unwrap();
        let c2 = PosetConfig::from_order(EventSet::from_bits(0b1010), &[(1, 3)]).unwrap();
        assert_eq!(config_iso(&c1, &l, &c2, &l).len(), 1);
    }

    #[test]
    fn discrete_pair_with_equal_labels_has_two_isos() {
        let l = labels(&["a", "a"]);
        let c = PosetConfig::discrete(EventSet::from_bits(0b11));
        assert_eq!(config_iso(&c, &l, &c, &l).len(), 2);
    }

    #[test]
    fn mismatched_singletons_are_not_bisimilar() {
        let e = |n: &str| {
            EventStructure::new(vec![(EventId::new(n).unwrap(), Label::new(n).unwrap())], vec![PosetConfig::discrete(EventSet::singleton(0))]).unwrap()
        };
        assert!(decide_bisim(&e("a"), &e("b"), true).unwrap().is_none());
        assert!(decide_bisim(&e("a"), &e("b"), false).unwrap().is_none());
        assert!(decide_bisim(&e("a"), &e("a"), true).unwrap().is_some());
    }
}
