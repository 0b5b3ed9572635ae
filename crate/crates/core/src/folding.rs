//! Morphisms, foldings, quotients, joins and minimal quotients.

use std::collections::HashMap;
use std::fmt;

use crate::behavior::{semantic_relations, BisimRelation, BisimTriple, ConfigIso};
use crate::error::{Error, Result};
use crate::models::{recognize_aes, recognize_pes, AsymES, Kind, Model, PrimeES};
use crate::poset::{display_set, validate_family, EventId, EventSet, EventStructure, Label, PosetConfig};
use crate::report::{CheckReport, ValidationReport};

/// A total function between the events of two structures, by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventMap {
    map: Vec<usize>,
}

impl EventMap {
    pub fn new(map: Vec<usize>) -> Self {
        EventMap { map }
    }

    pub fn identity(n: usize) -> Self {
        EventMap { map: (0..n).collect() }
    }

    /// Builds a map from `(source id, target id)` pairs; every source event must be mapped once.
    pub fn from_pairs(src: &[EventId], dst: &[EventId], pairs: &[(String, String)]) -> Result<Self> {
        let find = |ids: &[EventId], s: &str| ids.binary_search_by(|x| x.as_str().cmp(s)).ok();
        let mut map = vec![usize::MAX; src.len()];
        for (a, b) in pairs {
            let x = find(src, a).ok_or_else(|| Error::NonTotalMap(format!("{a} is not a source event")))?;
            let y = find(dst, b).ok_or_else(|| Error::NonTotalMap(format!("{b} is not a target event")))?;
            if map[x] != usize::MAX {
                return Err(Error::NonTotalMap(format!("{a} is mapped twice")));
            }
            map[x] = y;
        }
        if let Some(x) = map.iter().position(|&y| y == usize::MAX) {
            return Err(Error::NonTotalMap(format!("{} is not mapped", src[x])));
        }
        Ok(EventMap { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &EventMap) -> EventMap {
        EventMap { map: self.map.iter().map(|&y| g.map[y]).collect() }
    }

    pub fn image(&self, s: EventSet) -> EventSet {
        s.iter().map(|x| self.map[x]).collect()
    }

    pub fn preimage(&self, y: usize) -> EventSet {
        self.map.iter().enumerate().filter(|(_, &v)| v == y).map(|(x, _)| x).collect()
    }

    pub fn is_surjective(&self, n_target: usize) -> bool {
        self.image(EventSet::full(self.map.len())) == EventSet::full(n_target)
    }

    /// The kernel `≡_f`.
    pub fn partition(&self) -> EventPartition {
        EventPartition::from_class_of(&self.map)
    }

    fn check_total(&self, n_src: usize, n_dst: usize) -> Result<()> {
        if self.map.len() != n_src {
            return Err(Error::NonTotalMap(format!("map has {} entries for {} source events", self.map.len(), n_src)));
        }
        if let Some(&y) = self.map.iter().find(|&&y| y >= n_dst) {
            return Err(Error::NonTotalMap(format!("image #{y} is outside the target")));
        }
        Ok(())
    }
}

/// An equivalence on events, stored as its classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventPartition {
    class_of: Vec<usize>,
    classes: Vec<EventSet>,
}

impl EventPartition {
    pub fn identity(n: usize) -> Self {
        EventPartition::from_class_of(&(0..n).collect::<Vec<_>>())
    }

    /// Builds a partition from a function whose kernel is the equivalence.
    pub fn from_class_of(key: &[usize]) -> Self {
        let mut first: HashMap<usize, usize> = HashMap::new();
        let mut classes: Vec<EventSet> = Vec::new();
        let mut class_of = vec![0; key.len()];
        for (x, k) in key.iter().enumerate() {
            let c = *first.entry(*k).or_insert_with(|| {
                classes.push(EventSet::EMPTY);
                classes.len() - 1
            });
            classes[c].insert(x);
            class_of[x] = c;
        }
        EventPartition { class_of, classes }
    }

    /// Builds a partition of `n` events from disjoint classes; unlisted events are singletons.
    pub fn from_classes(n: usize, listed: &[EventSet]) -> Result<Self> {
        let mut key: Vec<usize> = (0..n).collect();
        let mut seen = EventSet::EMPTY;
        for class in listed {
            if !class.is_disjoint(seen) {
                return Err(Error::InvalidPartition("classes overlap".to_string()));
            }
            if !class.is_subset(EventSet::full(n)) {
                return Err(Error::InvalidPartition("class mentions an unknown event".to_string()));
            }
            seen |= *class;
            if let Some(rep) = class.first() {
                for x in class.iter() {
                    key[x] = rep;
                }
            }
        }
        Ok(EventPartition::from_class_of(&key))
    }

    pub fn n_events(&self) -> usize {
        self.class_of.len()
    }

    pub fn classes(&self) -> &[EventSet] {
        &self.classes
    }

    pub fn class_of(&self, x: usize) -> EventSet {
        self.classes[self.class_of[x]]
    }

    pub fn class_index(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn same(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    pub fn is_identity(&self) -> bool {
        self.classes.len() == self.class_of.len()
    }

    /// `[s]`, as a set of class indices.
    pub fn classes_of(&self, s: EventSet) -> EventSet {
        s.iter().map(|x| self.class_of[x]).collect()
    }

    /// The transitive closure of the union of both equivalences.
    pub fn join(&self, other: &EventPartition) -> EventPartition {
        let n = self.n_events();
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for part in [self, other] {
            for class in &part.classes {
                if let Some(rep) = class.first() {
                    for x in class.iter() {
                        let (a, b) = (root(&mut parent, rep), root(&mut parent, x));
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let key: Vec<usize> = (0..n).map(|x| root(&mut parent, x)).collect();
        EventPartition::from_class_of(&key)
    }

    /// Every class of `self` lies inside a class of `other`.
    pub fn is_finer_than(&self, other: &EventPartition) -> bool {
        self.classes.iter().all(|c| c.is_subset(other.class_of(c.first().expect("classes are non-empty"))))
    }

    /// The id of a class: member ids joined by `+`.
    pub fn class_id(ids: &[EventId], class: EventSet) -> String {
        class.iter().map(|x| ids[x].as_str()).collect::<Vec<_>>().join("+")
    }

    /// Non-singleton classes, sorted, as `{a1+a2 b1+b2}`.
    pub fn canonical_string(&self, ids: &[EventId]) -> String {
        let mut v: Vec<String> = self.classes.iter().filter(|c| c.len() > 1).map(|&c| EventPartition::class_id(ids, c)).collect();
        v.sort();
        format!("{{{}}}", v.join(" "))
    }
}

fn show_map_pair(src: &[EventId], dst: &[EventId], x: usize, y: usize) -> String {
    format!("{} ↦ {}", src[x], dst[y])
}

/// Image of every source configuration as a target index (`None` when the
/// image is not a target configuration or `f` is not injective on it).
fn images(src: &EventStructure, dst: &EventStructure, f: &EventMap, report: &mut CheckReport) -> Vec<Option<usize>> {
    let mut out = Vec::with_capacity(src.family().len());
    for c in src.family() {
        match c.map(f.as_slice()) {
            None => {
                report.push("injective", src.show(c));
                out.push(None);
            }
            Some(img) => match dst.find(&img) {
                Some(j) => out.push(Some(j)),
                None => {
                    report.push("configuration", format!("{} ↦ {}", src.show(c), dst.show(&img)));
                    out.push(None);
                }
            },
        }
    }
    out
}

fn check_labels(src_ids: &[EventId], src: &[Label], dst_ids: &[EventId], dst: &[Label], f: &EventMap, report: &mut CheckReport) {
    for x in 0..f.len() {
        if src[x] != dst[f.get(x)] {
            report.push("label", show_map_pair(src_ids, dst_ids, x, f.get(x)));
        }
    }
}

/// Checks that `f` preserves labels, is injective on configurations and maps
/// each configuration onto a target configuration with the same order.
pub fn check_morphism(src: &EventStructure, dst: &EventStructure, f: &EventMap) -> Result<CheckReport> {
    f.check_total(src.n_events(), dst.n_events())?;
    let mut report = CheckReport::default();
    check_labels(src.ids(), src.labels(), dst.ids(), dst.labels(), f, &mut report);
    images(src, dst, f, &mut report);
    Ok(report)
}

/// Checks that a morphism is a folding: every target transition from the
/// image of a configuration is matched by a source transition.
pub fn check_folding(src: &EventStructure, dst: &EventStructure, f: &EventMap) -> Result<CheckReport> {
    f.check_total(src.n_events(), dst.n_events())?;
    let mut morph = CheckReport::default();
    check_labels(src.ids(), src.labels(), dst.ids(), dst.labels(), f, &mut morph);
    let img = images(src, dst, f, &mut morph);
    if !morph.verdict() {
        return Err(Error::NotAMorphism(morph));
    }
    let mut report = CheckReport::default();
    for (i, j) in img.iter().enumerate() {
        let j = j.expect("morphism");
        for &(y, j2) in dst.single_successors(j) {
            let matched = src.single_successors(i).iter().any(|&(x, i2)| f.get(x) == y && img[i2] == Some(j2));
            if !matched {
                report.push(
                    "unmatched-transition",
                    format!("{} cannot match {} --{}--> {}", src.show(src.config(i)), dst.show(dst.config(j)), dst.id(y), dst.show(dst.config(j2))),
                );
            }
        }
    }
    Ok(report)
}

pub fn is_morphism(src: &EventStructure, dst: &EventStructure, f: &EventMap) -> bool {
    check_morphism(src, dst, f).is_ok_and(|r| r.verdict())
}

pub fn is_folding(src: &EventStructure, dst: &EventStructure, f: &EventMap) -> bool {
    check_folding(src, dst, f).is_ok_and(|r| r.verdict())
}

/// The relation `R_f = {(C, f|C, f(C))}` of a morphism.
pub fn folding_relation(src: &EventStructure, dst: &EventStructure, f: &EventMap) -> Result<BisimRelation> {
    let mut morph = CheckReport::default();
    let img = images(src, dst, f, &mut morph);
    if !morph.verdict() {
        return Err(Error::NotAMorphism(morph));
    }
    let triples = src
        .family()
        .iter()
        .zip(img)
        .enumerate()
        .map(|(i, (c, j))| BisimTriple { left: i, iso: ConfigIso { pairs: c.members().map(|x| (x, f.get(x))).collect() }, right: j.expect("morphism") })
        .collect();
    Ok(BisimRelation { triples, hereditary: true })
}

fn pes_total(p: &PrimeES, q: &PrimeES, f: &EventMap) -> Result<()> {
    f.check_total(p.n_events(), q.n_events())
}

/// Syntactic PES morphism criteria: labels, `f(⌈x⌉) = ⌈f(x)⌉`, and conflict
/// between merged events and reflection of conflict.
pub fn check_morphism_pes(p: &PrimeES, q: &PrimeES, f: &EventMap) -> Result<CheckReport> {
    pes_total(p, q, f)?;
    let mut r = CheckReport::default();
    check_labels(p.ids(), p.labels(), q.ids(), q.labels(), f, &mut r);
    let (pi, qi) = (p.ids(), q.ids());
    let n = p.n_events();
    for y in 0..n {
        let img = f.image(p.causes(y));
        for x2 in (q.causes(f.get(y)) - img).iter() {
            r.push("2a", format!("{} ≤ {} has no preimage below {}", qi[x2], qi[f.get(y)], pi[y]));
        }
    }
    for y in 0..n {
        for x in p.strict_causes(y).iter() {
            if !q.le(f.get(x), f.get(y)) {
                r.push("2b", format!("{}<{} but not {}≤{}", pi[x], pi[y], qi[f.get(x)], qi[f.get(y)]));
            }
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            if f.get(x) == f.get(y) && !p.in_conflict(x, y) {
                r.push("3a", format!("{} and {} are merged but not in conflict", pi[x], pi[y]));
            }
            if q.in_conflict(f.get(x), f.get(y)) && !p.in_conflict(x, y) {
                r.push("3b", format!("{}#{} is not reflected on {} {}", qi[f.get(x)], qi[f.get(y)], pi[x], pi[y]));
            }
        }
    }
    Ok(r)
}

/// Maximal cliques of `adj` inside `within`.
fn maximal_cliques(adj: &[EventSet], within: EventSet) -> Vec<EventSet> {
    fn go(adj: &[EventSet], r: EventSet, mut p: EventSet, mut x: EventSet, out: &mut Vec<EventSet>) {
        if p.is_empty() && x.is_empty() {
            out.push(r);
            return;
        }
        let pivot = (p | x).iter().max_by_key(|&u| (adj[u] & p).len()).expect("non-empty");
        for v in (p - adj[pivot]).iter() {
            go(adj, r.with(v), p & adj[v], x & adj[v], out);
            p.remove(v);
            x.insert(v);
        }
    }
    let mut out = Vec::new();
    go(adj, EventSet::EMPTY, within, EventSet::EMPTY, &mut out);
    out
}

/// Clause shared by the PES folding criteria: for merged `x`, `y`, every
/// consistent set whose members are each consistent with `x` or with `y`
/// is consistent with some event of `candidates`.
fn consistent_extension(p: &PrimeES, x: usize, y: usize, candidates: EventSet) -> Option<EventSet> {
    let n = p.n_events();
    let all = EventSet::full(n);
    let consistent: Vec<EventSet> = (0..n).map(|u| all - p.conflicts(u)).collect();
    let adj: Vec<EventSet> = (0..n).map(|u| consistent[u].without(u)).collect();
    let domain = consistent[x] | consistent[y];
    maximal_cliques(&adj, domain).into_iter().find(|&u| !candidates.iter().any(|z| p.conflicts(z).is_disjoint(u) && !p.in_conflict(z, z)))
}

/// PES folding criteria: surjectivity, conflict inheritance along preimages,
/// and the extension clause for merged events.
pub fn check_folding_pes(p: &PrimeES, q: &PrimeES, f: &EventMap) -> Result<CheckReport> {
    let morph = check_morphism_pes(p, q, f)?;
    if !morph.verdict() {
        return Err(Error::NotAMorphism(morph));
    }
    let mut r = CheckReport::default();
    let (pi, qi) = (p.ids(), q.ids());
    for y2 in 0..q.n_events() {
        if f.preimage(y2).is_empty() {
            r.push("surjective", qi[y2].to_string());
        }
    }
    for x in 0..p.n_events() {
        for y2 in 0..q.n_events() {
            let pre = f.preimage(y2);
            if !pre.is_empty() && pre.is_subset(p.conflicts(x)) && !q.in_conflict(f.get(x), y2) {
                r.push("1", format!("{} is in conflict with every preimage of {} but {} is not", pi[x], qi[y2], qi[f.get(x)]));
            }
        }
    }
    for x in 0..p.n_events() {
        for y in x + 1..p.n_events() {
            if f.get(x) == f.get(y) {
                if let Some(u) = consistent_extension(p, x, y, f.preimage(f.get(x))) {
                    r.push("2", format!("{} {} with {}", pi[x], pi[y], display_set(u, pi)));
                }
            }
        }
    }
    Ok(r)
}

/// Outcome of an abstraction homomorphism check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractionReport {
    pub report: CheckReport,
    pub folding: CheckReport,
}

fn concurrent(p: &PrimeES, x: usize) -> EventSet {
    (0..p.n_events()).filter(|&y| !p.le(x, y) && !p.le(y, x) && !p.in_conflict(x, y)).collect()
}

/// Checks the four abstraction homomorphism clauses and reports, in
/// addition, whether `f` is a folding.
pub fn check_abstraction_hom(p: &PrimeES, q: &PrimeES, f: &EventMap) -> Result<AbstractionReport> {
    pes_total(p, q, f)?;
    let mut r = CheckReport::default();
    check_labels(p.ids(), p.labels(), q.ids(), q.labels(), f, &mut r);
    let pi = p.ids();
    for x in 0..p.n_events() {
        let fx = f.get(x);
        if f.image(p.strict_causes(x)) != q.strict_causes(fx) {
            r.push("causes", pi[x].to_string());
        }
        if f.image(p.consequences(x)) != q.consequences(fx) {
            r.push("consequences", pi[x].to_string());
        }
        if f.image(concurrent(p, x)) != concurrent(q, fx) {
            r.push("concurrent", pi[x].to_string());
        }
    }
    let folding = match check_folding(&crate::models::configs_pes(p), &crate::models::configs_pes(q), f) {
        Ok(rep) => rep,
        Err(Error::NotAMorphism(rep)) => rep,
        Err(e) => return Err(e),
    };
    Ok(AbstractionReport { report: r, folding })
}

/// Syntactic AES morphism criteria.
///
/// Clause 3b asks that `f(x)` reach `f(y)` through `↗` inside
/// `f(⌈x⌉ ∪ ⌈y⌉)` rather than `f(x) ↗ f(y)` directly: an inherited `x ↗ y`
/// may be realised in the target only through an intermediate event.
pub fn check_morphism_aes(a: &AsymES, b: &AsymES, f: &EventMap) -> Result<CheckReport> {
    f.check_total(a.n_events(), b.n_events())?;
    let mut r = CheckReport::default();
    check_labels(a.ids(), a.labels(), b.ids(), b.labels(), f, &mut r);
    let (ai, bi) = (a.ids(), b.ids());
    let n = a.n_events();
    for x in 0..n {
        let missing = b.causes(f.get(x)) - f.image(a.causes(x));
        for y2 in missing.iter() {
            r.push("2", format!("{} ≤ {} has no preimage below {}", bi[y2], bi[f.get(x)], ai[x]));
        }
    }
    for x in 0..n {
        for y in (0..n).filter(|&y| y != x) {
            let (fx, fy) = (f.get(x), f.get(y));
            if b.precedes(fx, fy) && !a.precedes(x, y) {
                r.push("3a", format!("{}↗{} is not reflected on {} {}", bi[fx], bi[fy], ai[x], ai[y]));
            }
            if a.precedes(x, y) && !a.precedes(y, x) && !reaches_within(b, fx, fy, f.image(a.causes(x) | a.causes(y))) {
                r.push("3b", format!("{}↗{} is not preserved", ai[x], ai[y]));
            }
            if fx == fy && !a.precedes(x, y) {
                r.push("4", format!("{} and {} are merged without {}↗{}", ai[x], ai[y], ai[x], ai[y]));
            }
        }
    }
    Ok(r)
}

/// Whether `y` is reachable from `x` through `↗` restricted to `s`.
fn reaches_within(a: &AsymES, x: usize, y: usize, s: EventSet) -> bool {
    let mut seen = EventSet::singleton(x);
    let mut frontier = seen;
    while !frontier.is_empty() {
        let mut next = EventSet::EMPTY;
        for u in frontier.iter() {
            next |= a.asym_succ(u) & s;
        }
        frontier = next - seen;
        seen |= next;
    }
    seen.contains(y)
}

/// `↗∃`: some member of `s` is preceded by `x`, i.e. `x ↗ s`.
fn precedes_some(a: &AsymES, x: usize, s: EventSet) -> bool {
    !a.asym_succ(x).is_disjoint(s)
}

/// Whether `h ∪ {y}` is a configuration having the configuration `h` as a prefix.
fn extends_by(a: &AsymES, h: EventSet, y: usize) -> bool {
    !h.contains(y) && a.strict_causes(y).is_subset(h) && !precedes_some(a, y, h)
}

/// AES folding criteria.
///
/// Clause 1 requires, when every preimage of `y'` precedes `x`, that `y'`
/// cannot extend `f(D)` for any configuration `D ∋ x`; asking for
/// `y' ↗∃ f(⌈x⌉)` instead rejects foldings where a cause of `y'` precedes
/// `f(⌈x⌉)`. The extension clause 2 is checked as stated, with
/// consistency of `X ∪ Y` read as inclusion in a configuration. The history
/// clause 3 ranges over sets `X` such that `H1 ∪ ⌈X⌉` is a configuration
/// extending `H1`, with `X` disjoint from `H1`, not preceded by `H` and not
/// preceding `x`; the witness `x1` is required to have the image `f(x)`.
pub fn check_folding_aes(a: &AsymES, b: &AsymES, f: &EventMap) -> Result<CheckReport> {
    let morph = check_morphism_aes(a, b, f)?;
    if !morph.verdict() {
        return Err(Error::NotAMorphism(morph));
    }
    let mut r = CheckReport::default();
    let (ai, bi) = (a.ids(), b.ids());
    let n = a.n_events();
    for y2 in 0..b.n_events() {
        if f.preimage(y2).is_empty() {
            r.push("surjective", bi[y2].to_string());
        }
    }
    let ea = crate::models::configs_aes(a);
    for x in 0..n {
        for y2 in 0..b.n_events() {
            let pre = f.preimage(y2);
            if pre.is_empty() || !pre.iter().all(|y| a.precedes(y, x)) {
                continue;
            }
            let hit = ea.family().iter().map(|d| d.events()).find(|d| d.contains(x) && extends_by(b, f.image(*d), y2));
            if let Some(d) = hit {
                r.push("1", format!("every preimage of {} precedes {} but {} extends {}", bi[y2], ai[x], bi[y2], display_set(f.image(d), bi)));
            }
        }
    }
    let maximal: Vec<EventSet> = ea
        .family()
        .iter()
        .enumerate()
        .filter(|(i, _)| ea.single_successors(*i).is_empty())
        .map(|(_, c)| c.events())
        .collect();
    let free = |v: usize| (0..n).filter(|&u| u != v && !a.precedes(v, u)).collect::<EventSet>();
    for x in 0..n {
        for y in x..n {
            if f.get(x) != f.get(y) {
                continue;
            }
            let domain = free(x) | free(y);
            let candidates = f.preimage(f.get(x));
            for &c in &maximal {
                let u = c & domain;
                if !candidates.iter().any(|z| !precedes_some(a, z, u)) {
                    r.push("2", format!("{} {} with {}", ai[x], ai[y], ea.show_set(u)));
                }
            }
        }
    }
    let eb = crate::models::configs_aes(b);
    let hists = crate::poset::histories(&ea);
    for h in &hists {
        let x = h.owner;
        let hset = h.config.events();
        for (k, h1) in ea.family().iter().enumerate() {
            let h1s = h1.events();
            if !h1.is_prefix_of(&h.config) || h1s.contains(x) {
                continue;
            }
            let target_hist = h1s.iter().map(|e| f.get(e)).collect::<EventSet>().with(f.get(x));
            if target_hist.len() != h1s.len() + 1 || !is_history_set(&eb, f.get(x), target_hist) {
                continue;
            }
            let candidates: Vec<usize> = f.preimage(f.get(x)).iter().filter(|&x1| is_history_set(&ea, x1, h1s.with(x1))).collect();
            for (_, c) in ea.family().iter().enumerate().filter(|(j, c)| *j == k || h1.is_prefix_of(c)) {
                let xs: EventSet = (c.events() - h1s)
                    .without(x)
                    .iter()
                    .filter(|&u| !hset.iter().any(|w| a.precedes(w, u)) && !a.precedes(u, x))
                    .collect();
                if !candidates.iter().any(|&x1| !precedes_some(a, x1, xs)) {
                    r.push("3", format!("{} with history {} from {} and {}", ai[x], ea.show(&h.config), ea.show(h1), ea.show_set(xs)));
                }
            }
        }
    }
    r.violations.sort();
    r.violations.dedup();
    Ok(r)
}

/// Whether `s` is a configuration in which every element is below `x`.
fn is_history_set(es: &EventStructure, x: usize, s: EventSet) -> bool {
    es.family().iter().any(|c| c.events() == s && c.down(x) == s)
}

/// Builds `E/≡` and the quotient map.
pub fn quotient(es: &EventStructure, p: &EventPartition) -> Result<(EventStructure, EventMap)> {
    if p.n_events() != es.n_events() {
        return Err(Error::InvalidPartition(format!("partition covers {} events, structure has {}", p.n_events(), es.n_events())));
    }
    let mut named: Vec<(String, usize)> = p.classes().iter().enumerate().map(|(k, &c)| (EventPartition::class_id(es.ids(), c), k)).collect();
    named.sort();
    let mut ids = Vec::with_capacity(named.len());
    let mut labels = Vec::with_capacity(named.len());
    let mut pos = vec![0; named.len()];
    for (new, (id, k)) in named.iter().enumerate() {
        let class = p.classes()[*k];
        let label = es.label(class.first().expect("non-empty"));
        if class.iter().any(|x| es.label(x) != label) {
            return Err(Error::LabelClash(id.clone()));
        }
        ids.push(EventId::new(id)?);
        labels.push(label.clone());
        pos[*k] = new;
    }
    let map = EventMap::new((0..es.n_events()).map(|x| pos[p.class_index(x)]).collect());
    let mut family = Vec::with_capacity(es.family().len());
    let mut bad = ValidationReport::default();
    for c in es.family() {
        match c.map(map.as_slice()) {
            Some(img) => family.push(img),
            None => bad.push("merged-events-cooccur", es.show(c)),
        }
    }
    if !bad.is_valid() {
        return Err(Error::InvalidResult(bad));
    }
    let q = EventStructure::from_sorted(ids, labels, family);
    let report = validate_family(&q);
    if !report.is_valid() {
        return Err(Error::InvalidResult(report));
    }
    Ok((q, map))
}

/// Clauses characterising the folding equivalences of a PES.
pub fn check_folding_equivalence_pes(p: &PrimeES, eq: &EventPartition) -> CheckReport {
    let mut r = CheckReport::default();
    let ids = p.ids();
    let n = p.n_events();
    if eq.n_events() != n {
        r.push("partition", format!("covers {} events, structure has {}", eq.n_events(), n));
        return r;
    }
    for x in 0..n {
        for y in (x + 1..n).filter(|&y| eq.same(x, y)) {
            if p.labels()[x] != p.labels()[y] {
                r.push("1", format!("{} {}", ids[x], ids[y]));
            }
            if eq.classes_of(p.causes(x)) != eq.classes_of(p.causes(y)) {
                r.push("2", format!("{} {}", ids[x], ids[y]));
            }
            if !p.in_conflict(x, y) {
                r.push("3", format!("{} {}", ids[x], ids[y]));
            }
        }
    }
    for x in 0..n {
        for &class in eq.classes() {
            if class.is_subset(p.conflicts(x)) && eq.class_of(x).iter().any(|x2| !class.is_subset(p.conflicts(x2))) {
                r.push("4", format!("{} is in conflict with all of [{}] but its class is not", ids[x], EventPartition::class_id(ids, class)));
            }
        }
    }
    for x in 0..n {
        for y in (x + 1..n).filter(|&y| eq.same(x, y)) {
            if let Some(u) = consistent_extension(p, x, y, eq.class_of(x)) {
                r.push("5", format!("{} {} with {}", ids[x], ids[y], display_set(u, ids)));
            }
        }
    }
    r
}

/// Result of joining two foldings with a common source.
#[derive(Clone, Debug)]
pub struct Join {
    pub es: EventStructure,
    pub partition: EventPartition,
    pub quotient_map: EventMap,
    pub g1: EventMap,
    pub g2: EventMap,
}

/// Joins two foldings `f1: src → dst1`, `f2: src → dst2` by quotienting the
/// source with the transitive closure of both kernels.
pub fn join_foldings(src: &EventStructure, dst1: &EventStructure, f1: &EventMap, dst2: &EventStructure, f2: &EventMap) -> Result<Join> {
    let mut failures = CheckReport::default();
    for (name, dst, f) in [("first", dst1, f1), ("second", dst2, f2)] {
        match check_folding(src, dst, f) {
            Ok(r) if r.verdict() => {}
            Ok(r) | Err(Error::NotAMorphism(r)) => {
                for v in r.violations {
                    failures.push(format!("{name}/{}", v.clause), v.witness);
                }
            }
            Err(e) => return Err(e),
        }
    }
    if !failures.verdict() {
        return Err(Error::NotFoldings(failures));
    }
    let partition = f1.partition().join(&f2.partition());
    let (es, quotient_map) = quotient(src, &partition)?;
    let induced = |dst: &EventStructure, f: &EventMap| {
        let mut g = vec![0; dst.n_events()];
        for x in 0..src.n_events() {
            g[f.get(x)] = quotient_map.get(x);
        }
        EventMap::new(g)
    };
    let g1 = induced(dst1, f1);
    let g2 = induced(dst2, f2);
    Ok(Join { es, partition, quotient_map, g1, g2 })
}

/// Target class of a minimisation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinClass {
    Poset,
    Pes,
    Aes,
}

impl fmt::Display for MinClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MinClass::Poset => "poset",
            MinClass::Pes => "pes",
            MinClass::Aes => "aes",
        })
    }
}

impl std::str::FromStr for MinClass {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "poset" => Ok(MinClass::Poset),
            "pes" => Ok(MinClass::Pes),
            "aes" => Ok(MinClass::Aes),
            _ => Err(format!("unknown class {s:?}")),
        }
    }
}

/// One maximal folding equivalence with its quotient.
#[derive(Clone, Debug)]
pub struct Solution {
    pub partition: EventPartition,
    pub quotient: Model,
    pub folding: EventMap,
}

#[derive(Clone, Debug)]
pub struct MinimizeResult {
    pub class: MinClass,
    pub solutions: Vec<Solution>,
    /// Number of candidate partitions accepted as folding equivalences.
    pub accepted: usize,
}

/// Enumerates all partitions whose classes are cliques of `compatible`.
fn partitions(n: usize, compatible: &[EventSet], visit: &mut dyn FnMut(&[EventSet])) {
    fn go(k: usize, n: usize, compatible: &[EventSet], classes: &mut Vec<EventSet>, visit: &mut dyn FnMut(&[EventSet])) {
        if k == n {
            visit(classes);
            return;
        }
        for i in 0..classes.len() {
            if classes[i].is_subset(compatible[k]) {
                classes[i].insert(k);
                go(k + 1, n, compatible, classes, visit);
                classes[i].remove(k);
            }
        }
        classes.push(EventSet::singleton(k));
        go(k + 1, n, compatible, classes, visit);
        classes.pop();
    }
    go(0, n, compatible, &mut Vec::new(), visit);
}

fn partition_of(n: usize, classes: &[EventSet]) -> EventPartition {
    let mut key = vec![0; n];
    for (k, c) in classes.iter().enumerate() {
        for x in c.iter() {
            key[x] = k;
        }
    }
    EventPartition::from_class_of(&key)
}

fn semantic_candidates(es: &EventStructure) -> Vec<EventSet> {
    let sem = semantic_relations(es);
    (0..es.n_events()).map(|x| (0..es.n_events()).filter(|&y| y != x && es.label(x) == es.label(y) && sem.in_conflict(x, y)).collect()).collect()
}

fn quotient_folds(es: &EventStructure, p: &EventPartition) -> Option<(EventStructure, EventMap)> {
    let (q, map) = quotient(es, p).ok()?;
    is_folding(es, &q, &map).then_some((q, map))
}

/// Computes maximal folding equivalences of `model` within `class`.
pub fn minimize(model: &Model, class: MinClass) -> Result<MinimizeResult> {
    let wrong = |expected: &str| Error::WrongClass { expected: expected.to_string(), found: model.kind().to_string() };
    match class {
        MinClass::Pes => {
            let Model::Pes(p) = model else { return Err(wrong("pes")) };
            let n = p.n_events();
            let cause_labels = |x: usize| {
                let mut v: Vec<&Label> = p.strict_causes(x).iter().map(|c| &p.labels()[c]).collect();
                v.sort();
                v
            };
            let compatible: Vec<EventSet> = (0..n)
                .map(|x| {
                    (0..n)
                        .filter(|&y| y != x && p.labels()[x] == p.labels()[y] && p.in_conflict(x, y) && cause_labels(x) == cause_labels(y))
                        .collect()
                })
                .collect();
            let mut accepted = Vec::new();
            partitions(n, &compatible, &mut |classes| {
                let part = partition_of(n, classes);
                if check_folding_equivalence_pes(p, &part).verdict() {
                    accepted.push(part);
                }
            });
            let top = accepted.iter().fold(EventPartition::identity(n), |acc, q| acc.join(q));
            let report = check_folding_equivalence_pes(p, &top);
            if !report.verdict() {
                return Err(Error::NotFoldings(report));
            }
            let es = crate::models::configs_pes(p);
            let (q, map) = quotient(&es, &top)?;
            let qp = recognize_pes(&q).ok_or_else(|| Error::WrongClass { expected: "pes".into(), found: "poset".into() })?;
            Ok(MinimizeResult { class, solutions: vec![Solution { partition: top, quotient: Model::Pes(qp), folding: map }], accepted: accepted.len() })
        }
        MinClass::Poset => {
            let es = model.embedding(false)?;
            let n = es.n_events();
            let compatible = semantic_candidates(&es);
            let mut accepted = Vec::new();
            partitions(n, &compatible, &mut |classes| {
                let part = partition_of(n, classes);
                if quotient_folds(&es, &part).is_some() {
                    accepted.push(part);
                }
            });
            let top = accepted.iter().fold(EventPartition::identity(n), |acc, q| acc.join(q));
            let (q, map) = quotient_folds(&es, &top).ok_or_else(|| Error::NotFoldings(CheckReport::default()))?;
            Ok(MinimizeResult { class, solutions: vec![Solution { partition: top, quotient: Model::Poset(q), folding: map }], accepted: accepted.len() })
        }
        MinClass::Aes => {
            if model.kind() != Kind::Aes {
                return Err(wrong("aes"));
            }
            let es = model.embedding(false)?;
            let n = es.n_events();
            let compatible = semantic_candidates(&es);
            let mut accepted: Vec<(EventPartition, AsymES, EventMap)> = Vec::new();
            partitions(n, &compatible, &mut |classes| {
                let part = partition_of(n, classes);
                if let Some((q, map)) = quotient_folds(&es, &part) {
                    if let Some(qa) = recognize_aes(&q) {
                        accepted.push((part, qa, map));
                    }
                }
            });
            let count = accepted.len();
            let maxima: Vec<&(EventPartition, AsymES, EventMap)> = accepted
                .iter()
                .filter(|(p, _, _)| !accepted.iter().any(|(o, _, _)| o != p && p.is_finer_than(o)))
                .collect();
            let mut solutions: Vec<Solution> = maxima
                .into_iter()
                .map(|(p, qa, map)| Solution { partition: p.clone(), quotient: Model::Aes(qa.clone()), folding: map.clone() })
                .collect();
            solutions.sort_by_key(|s| s.partition.canonical_string(es.ids()));
            Ok(MinimizeResult { class, solutions, accepted: count })
        }
    }
}

/// Whether two configurations of `es` are related by `f` as in `R_f`.
pub fn maps_config(f: &EventMap, c: &PosetConfig) -> Option<PosetConfig> {
    c.map(f.as_slice())
}
