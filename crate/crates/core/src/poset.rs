//! Finite labelled posets, families of posets and their transition system.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{BitAnd, BitOr, BitOrAssign, Sub};
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::report::{ValidationReport, Violation};

/// Upper bound on the number of events of one structure.
pub const MAX_EVENTS: usize = 128;

/// A set of event indices, stored as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventSet(u128);

impl EventSet {
    pub const EMPTY: EventSet = EventSet(0);

    pub fn singleton(e: usize) -> Self {
        EventSet(1u128 << e)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= MAX_EVENTS {
            EventSet(u128::MAX)
        } else {
            EventSet((1u128 << n) - 1)
        }
    }

    pub fn from_bits(bits: u128) -> Self {
        EventSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, e: usize) -> bool {
        e < MAX_EVENTS && self.0 >> e & 1 == 1
    }

    pub fn with(self, e: usize) -> Self {
        EventSet(self.0 | 1u128 << e)
    }

    pub fn without(self, e: usize) -> Self {
        EventSet(self.0 & !(1u128 << e))
    }

    pub fn insert(&mut self, e: usize) {
        self.0 |= 1u128 << e;
    }

    pub fn remove(&mut self, e: usize) {
        self.0 &= !(1u128 << e);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: EventSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: EventSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Number of members strictly smaller than `e`.
    pub fn rank(self, e: usize) -> usize {
        (self.0 & ((1u128 << e) - 1)).count_ones() as usize
    }

    pub fn iter(self) -> EventSetIter {
        EventSetIter(self.0)
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl BitOr for EventSet {
    type Output = EventSet;
    fn bitor(self, rhs: EventSet) -> EventSet {
        EventSet(self.0 | rhs.0)
    }
}

impl BitOrAssign for EventSet {
    fn bitor_assign(&mut self, rhs: EventSet) {
        self.0 |= rhs.0;
    }
}

impl BitAnd for EventSet {
    type Output = EventSet;
    fn bitand(self, rhs: EventSet) -> EventSet {
        EventSet(self.0 & rhs.0)
    }
}

impl Sub for EventSet {
    type Output = EventSet;
    fn sub(self, rhs: EventSet) -> EventSet {
        EventSet(self.0 & !rhs.0)
    }
}

impl FromIterator<usize> for EventSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = EventSet::EMPTY;
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl IntoIterator for EventSet {
    type Item = usize;
    type IntoIter = EventSetIter;
    fn into_iter(self) -> EventSetIter {
        self.iter()
    }
}

pub struct EventSetIter(u128);

impl Iterator for EventSetIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }
}

/// An action label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Label(String);

impl Label {
    pub fn new(text: &str) -> Result<Label> {
        let ok = !text.is_empty() && text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(Label(text.to_string()))
        } else {
            Err(Error::InvalidLabel(text.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An event identifier, unique within a structure.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EventId(String);

impl EventId {
    pub fn new(text: &str) -> Result<EventId> {
        let ok = !text.is_empty()
            && text.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '+' | '@' | '.'));
        if ok {
            Ok(EventId(text.to_string()))
        } else {
            Err(Error::InvalidEventId(text.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Sorts `(id, label)` pairs lexicographically by id.
///
/// Returns the sorted ids and labels plus the permutation from input
/// position to sorted position.
pub fn sort_events(events: Vec<(EventId, Label)>) -> Result<(Vec<EventId>, Vec<Label>, Vec<usize>)> {
    if events.len() > MAX_EVENTS {
        return Err(Error::TooManyEvents(events.len()));
    }
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by(|&a, &b| events[a].0.cmp(&events[b].0));
    for w in order.windows(2) {
        if events[w[0]].0 == events[w[1]].0 {
            return Err(Error::DuplicateEvent(events[w[0]].0.to_string()));
        }
    }
    let mut perm = vec![0; events.len()];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    let ids = order.iter().map(|&i| events[i].0.clone()).collect();
    let labels = order.iter().map(|&i| events[i].1.clone()).collect();
    Ok((ids, labels, perm))
}

/// Error raised when a declared relation is not a partial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderError {
    pub cycle_through: usize,
}

/// A finite poset of events: one configuration.
///
/// The strict order is stored as the set of strict predecessors of each
/// member, aligned with the members in ascending order, so equality is
/// structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PosetConfig {
    events: EventSet,
    below: Vec<EventSet>,
}

impl PosetConfig {
    pub fn empty() -> Self {
        PosetConfig { events: EventSet::EMPTY, below: Vec::new() }
    }

    pub fn discrete(events: EventSet) -> Self {
        PosetConfig { events, below: vec![EventSet::EMPTY; events.len()] }
    }

    /// Builds the poset generated by `pairs` (strict `x < y`), closing transitively.
    pub fn from_order(events: EventSet, pairs: &[(usize, usize)]) -> std::result::Result<Self, OrderError> {
        let mut below = vec![EventSet::EMPTY; events.len()];
        for &(x, y) in pairs {
            debug_assert!(events.contains(x) && events.contains(y));
            if x == y {
                return Err(OrderError { cycle_through: x });
            }
            below[events.rank(y)].insert(x);
        }
        let c = PosetConfig::close(events, below);
        match c.events.iter().find(|&e| c.below(e).contains(e)) {
            Some(e) => Err(OrderError { cycle_through: e }),
            None => Ok(c),
        }
    }

    /// Builds a poset from a predecessor function that is already a strict order on `events`.
    pub fn from_below_fn(events: EventSet, below: impl Fn(usize) -> EventSet) -> Self {
        PosetConfig { events, below: events.iter().map(|e| below(e) & events).collect() }
    }

    /// Builds the transitive closure of a relation given by direct predecessors.
    pub fn from_relation(events: EventSet, direct: impl Fn(usize) -> EventSet) -> std::result::Result<Self, OrderError> {
        let below = events.iter().map(|e| direct(e) & events).collect();
        let c = PosetConfig::close(events, below);
        match c.events.iter().find(|&e| c.below(e).contains(e)) {
            Some(e) => Err(OrderError { cycle_through: e }),
            None => Ok(c),
        }
    }

    fn close(events: EventSet, mut below: Vec<EventSet>) -> Self {
        for k in events.iter() {
            let bk = below[events.rank(k)];
            for b in below.iter_mut() {
                if b.contains(k) {
                    *b |= bk;
                }
            }
        }
        PosetConfig { events, below }
    }

    pub fn events(&self) -> EventSet {
        self.events
    }

    pub fn len(&self) -> usize {
        self.below.len()
    }

    pub fn is_empty(&self) -> bool {
        self.below.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.events.contains(e)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> {
        self.events.iter()
    }

    /// Strict predecessors of a member.
    pub fn below(&self, e: usize) -> EventSet {
        self.below[self.events.rank(e)]
    }

    /// `{y | y ≤ e}`.
    pub fn down(&self, e: usize) -> EventSet {
        self.below(e).with(e)
    }

    /// Strict successors of a member.
    pub fn above(&self, e: usize) -> EventSet {
        self.events.iter().zip(&self.below).filter(|(_, b)| b.contains(e)).map(|(y, _)| y).collect()
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.events.contains(y) && self.below(y).contains(x)
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        x == y && self.events.contains(x) || self.lt(x, y)
    }

    pub fn maximal(&self) -> EventSet {
        let mut m = self.events;
        for b in &self.below {
            m = m - *b;
        }
        m
    }

    pub fn minimal(&self) -> EventSet {
        self.events.iter().zip(&self.below).filter(|(_, b)| b.is_empty()).map(|(e, _)| e).collect()
    }

    /// The sub-poset on `s ∩ events`.
    pub fn restrict(&self, s: EventSet) -> PosetConfig {
        let events = self.events & s;
        PosetConfig { events, below: events.iter().map(|e| self.below(e) & events).collect() }
    }

    /// The history `C[x]`.
    pub fn history(&self, x: usize) -> PosetConfig {
        self.restrict(self.down(x))
    }

    /// Prefix order: `self ⊆ other`, with identical order on `self` and no
    /// element of `other` outside `self` below an element of `self`.
    pub fn is_prefix_of(&self, other: &PosetConfig) -> bool {
        if !self.events.is_subset(other.events) {
            return false;
        }
        self.events.iter().zip(&self.below).all(|(e, &b)| other.below(e) == b)
    }

    /// Adds `x` as a new maximal element above `preds` (closed downwards by the caller).
    pub fn extend(&self, x: usize, preds: EventSet) -> PosetConfig {
        debug_assert!(!self.events.contains(x));
        let events = self.events.with(x);
        let below = events.iter().map(|e| if e == x { preds & self.events } else { self.below(e) }).collect();
        PosetConfig { events, below }
    }

    /// All strict pairs `(x, y)` with `x < y`, sorted.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.events.iter().zip(&self.below).flat_map(|(y, b)| b.iter().map(move |x| (x, y))).collect();
        v.sort_unstable();
        v
    }

    /// The covering pairs (transitive reduction), sorted.
    pub fn reduction(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for (y, &b) in self.events.iter().zip(&self.below) {
            for x in b.iter() {
                let covered = b.iter().any(|z| z != x && self.below(z).contains(x));
                if !covered {
                    v.push((x, y));
                }
            }
        }
        v.sort_unstable();
        v
    }

    /// Transports the poset along `f`; `None` if `f` is not injective on it.
    pub fn map(&self, f: &[usize]) -> Option<PosetConfig> {
        let image: EventSet = self.events.iter().map(|e| f[e]).collect();
        if image.len() != self.len() {
            return None;
        }
        let mut below = vec![EventSet::EMPTY; self.len()];
        for (e, &b) in self.events.iter().zip(&self.below) {
            below[image.rank(f[e])] = b.iter().map(|x| f[x]).collect();
        }
        Some(PosetConfig { events: image, below })
    }

    /// A linearisation compatible with the order.
    pub fn linearization(&self) -> Vec<usize> {
        let mut members: Vec<usize> = self.events.iter().collect();
        members.sort_by_key(|&e| (self.below(e).len(), e));
        members
    }

    pub fn display<'a>(&'a self, ids: &'a [EventId]) -> ConfigDisplay<'a> {
        ConfigDisplay { config: self, ids }
    }
}

impl Ord for PosetConfig {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.events.iter().cmp(other.events.iter()))
            .then_with(|| self.below.iter().map(|b| b.bits()).cmp(other.below.iter().map(|b| b.bits())))
    }
}

impl PartialOrd for PosetConfig {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Renders a configuration as `{a b c : a<b a<c}`.
pub struct ConfigDisplay<'a> {
    config: &'a PosetConfig,
    ids: &'a [EventId],
}

impl fmt::Display for ConfigDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.config.members().map(|e| self.ids[e].as_str()).collect();
        write!(f, "{{{}", names.join(" "))?;
        let red = self.config.reduction();
        if !red.is_empty() {
            let pairs: Vec<String> = red.iter().map(|&(x, y)| format!("{}<{}", self.ids[x], self.ids[y])).collect();
            write!(f, " : {}", pairs.join(" "))?;
        }
        write!(f, "}}")
    }
}

/// Renders a set of events as `{a b}`.
pub fn display_set(s: EventSet, ids: &[EventId]) -> String {
    let names: Vec<&str> = s.iter().map(|e| ids[e].as_str()).collect();
    format!("{{{}}}", names.join(" "))
}

/// The history `C[x]` of an event.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct History {
    pub owner: usize,
    pub config: PosetConfig,
}

/// A transition `C →X C'` between two configurations of a family.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Transition {
    pub source: usize,
    pub target: usize,
    pub added: EventSet,
}

impl Transition {
    pub fn is_single(&self) -> bool {
        self.added.len() == 1
    }
}

#[derive(Debug)]
struct Steps {
    succ: Vec<Vec<(usize, usize)>>,
    pred: Vec<Vec<(usize, usize)>>,
}

/// A labelled family of finite posets.
///
/// Events are kept sorted by id; configurations are indices into
/// `family()`, which is sorted canonically and contains the empty
/// configuration at index 0.
#[derive(Debug)]
pub struct EventStructure {
    ids: Vec<EventId>,
    labels: Vec<Label>,
    family: Vec<PosetConfig>,
    index: HashMap<PosetConfig, usize>,
    diagnostics: Vec<Violation>,
    warnings: Vec<String>,
    steps: OnceLock<Steps>,
}

impl Clone for EventStructure {
    fn clone(&self) -> Self {
        EventStructure {
            ids: self.ids.clone(),
            labels: self.labels.clone(),
            family: self.family.clone(),
            index: self.index.clone(),
            diagnostics: self.diagnostics.clone(),
            warnings: self.warnings.clone(),
            steps: OnceLock::new(),
        }
    }
}

impl PartialEq for EventStructure {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.labels == other.labels && self.family == other.family
    }
}

impl Eq for EventStructure {}

impl EventStructure {
    /// Builds a structure from events in any order and configurations over
    /// the input positions of those events.
    pub fn new(events: Vec<(EventId, Label)>, family: Vec<PosetConfig>) -> Result<Self> {
        let n = events.len();
        let (ids, labels, perm) = sort_events(events)?;
        let mut remapped = Vec::with_capacity(family.len());
        for c in family {
            if let Some(bad) = c.members().find(|&e| e >= n) {
                return Err(Error::UnknownEvent(format!("#{bad}")));
            }
            remapped.push(c.map(&perm).expect("permutation is injective"));
        }
        Ok(EventStructure::from_sorted(ids, labels, remapped))
    }

    /// Builds a structure whose ids are already sorted and unique.
    pub(crate) fn from_sorted(ids: Vec<EventId>, labels: Vec<Label>, family: Vec<PosetConfig>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        let mut family: Vec<PosetConfig> = family.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let mut warnings = Vec::new();
        if family.first().is_none_or(|c| !c.is_empty()) {
            family.insert(0, PosetConfig::empty());
            warnings.push("empty configuration was missing and has been inserted".to_string());
        }
        let index = family.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        EventStructure { ids, labels, family, index, diagnostics: Vec::new(), warnings, steps: OnceLock::new() }
    }

    /// Attaches violations found while loading (for example a declared order
    /// that is not a partial order); they are reported by `validate_family`.
    pub fn with_diagnostics(mut self, diagnostics: Vec<Violation>) -> Self {
        self.diagnostics.extend(diagnostics);
        self
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn n_events(&self) -> usize {
        self.ids.len()
    }

    pub fn all_events(&self) -> EventSet {
        EventSet::full(self.ids.len())
    }

    pub fn ids(&self) -> &[EventId] {
        &self.ids
    }

    pub fn id(&self, e: usize) -> &EventId {
        &self.ids[e]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> &Label {
        &self.labels[e]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    pub fn family(&self) -> &[PosetConfig] {
        &self.family
    }

    pub fn config(&self, i: usize) -> &PosetConfig {
        &self.family[i]
    }

    pub fn find(&self, c: &PosetConfig) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn require(&self, c: &PosetConfig) -> Result<usize> {
        self.find(c).ok_or_else(|| Error::ConfigNotInFamily(c.display(&self.ids).to_string()))
    }

    pub fn show(&self, c: &PosetConfig) -> String {
        c.display(&self.ids).to_string()
    }

    pub fn show_set(&self, s: EventSet) -> String {
        display_set(s, &self.ids)
    }

    /// Builds a configuration from event ids and strict order pairs.
    pub fn config_from_ids(&self, events: &[&str], order: &[(&str, &str)]) -> Result<PosetConfig> {
        let idx = |s: &str| self.index_of(s).ok_or_else(|| Error::UnknownEvent(s.to_string()));
        let mut set = EventSet::EMPTY;
        for e in events {
            set.insert(idx(e)?);
        }
        let mut pairs = Vec::new();
        for (x, y) in order {
            pairs.push((idx(x)?, idx(y)?));
        }
        PosetConfig::from_order(set, &pairs).map_err(|e| Error::ConfigNotInFamily(format!("order through {} is cyclic", self.ids[e.cycle_through])))
    }

    fn steps(&self) -> &Steps {
        self.steps.get_or_init(|| {
            let mut succ = vec![Vec::new(); self.family.len()];
            let mut pred = vec![Vec::new(); self.family.len()];
            for (j, c) in self.family.iter().enumerate() {
                for x in c.maximal().iter() {
                    if let Some(&i) = self.index.get(&c.restrict(c.events().without(x))) {
                        succ[i].push((x, j));
                        pred[j].push((x, i));
                    }
                }
            }
            Steps { succ, pred }
        })
    }

    /// Single-event transitions from configuration `i`, as `(added event, target)`.
    pub fn single_successors(&self, i: usize) -> &[(usize, usize)] {
        &self.steps().succ[i]
    }

    /// Single-event transitions into configuration `j`, as `(removed event, source)`.
    pub fn single_predecessors(&self, j: usize) -> &[(usize, usize)] {
        &self.steps().pred[j]
    }

    pub fn is_prefix(&self, i: usize, j: usize) -> bool {
        self.family[i].is_prefix_of(&self.family[j])
    }

    /// Indices of all configurations having configuration `i` as a prefix.
    pub fn upper_bounds(&self, i: usize) -> FixedBitSet {
        let mut up = FixedBitSet::with_capacity(self.family.len());
        for (j, c) in self.family.iter().enumerate() {
            if self.family[i].is_prefix_of(c) {
                up.insert(j);
            }
        }
        up
    }

    pub fn transitions(&self, i: usize) -> Vec<Transition> {
        let c = &self.family[i];
        self.family
            .iter()
            .enumerate()
            .filter(|&(j, d)| j != i && c.is_prefix_of(d))
            .map(|(j, d)| Transition { source: i, target: j, added: d.events() - c.events() })
            .collect()
    }

    /// Whether some configuration contains all events of `s`.
    pub fn is_consistent_set(&self, s: EventSet) -> bool {
        self.family.iter().any(|c| s.is_subset(c.events()))
    }

    /// Events occurring in no configuration.
    pub fn orphans(&self) -> EventSet {
        let mut seen = EventSet::EMPTY;
        for c in &self.family {
            seen |= c.events();
        }
        self.all_events() - seen
    }
}

/// Prefix relation between two configurations.
pub fn is_prefix(c1: &PosetConfig, c2: &PosetConfig) -> bool {
    c1.is_prefix_of(c2)
}

/// Whether two configurations of `es` have a common upper bound in its family.
pub fn are_compatible(c1: &PosetConfig, c2: &PosetConfig, es: &EventStructure) -> Result<bool> {
    es.require(c1)?;
    es.require(c2)?;
    Ok(es.family().iter().any(|c| c1.is_prefix_of(c) && c2.is_prefix_of(c)))
}

/// All transitions from `c`.
pub fn successors(es: &EventStructure, c: &PosetConfig) -> Result<Vec<Transition>> {
    let i = es.require(c)?;
    Ok(es.transitions(i))
}

/// Every history `C[x]`, deduplicated and sorted.
pub fn histories(es: &EventStructure) -> Vec<History> {
    let mut set = BTreeSet::new();
    for c in es.family() {
        for x in c.members() {
            set.insert(History { owner: x, config: c.history(x) });
        }
    }
    set.into_iter().collect()
}

/// Checks prefix-closure, coherence and that every event is used.
pub fn validate_family(es: &EventStructure) -> ValidationReport {
    let mut report = ValidationReport { violations: es.diagnostics.clone(), warnings: es.warnings.clone() };
    let mut missing = BTreeSet::new();
    for c in es.family() {
        for x in c.maximal().iter() {
            let p = c.restrict(c.events().without(x));
            if es.find(&p).is_none() {
                missing.insert(p);
            }
        }
    }
    for p in missing {
        report.push("missing-prefix", es.show(&p));
    }
    if let Some(witness) = incoherent_set(es) {
        let shown: Vec<String> = witness.iter().map(|&i| es.show(es.config(i))).collect();
        report.push("incoherence", format!("{{{}}}", shown.join(", ")));
    }
    for e in es.orphans().iter() {
        report.push("orphan-event", es.id(e).to_string());
    }
    report
}

/// A pairwise-compatible set of configurations with no upper bound, shrunk
/// greedily to an inclusion-minimal one.
fn incoherent_set(es: &EventStructure) -> Option<Vec<usize>> {
    let n = es.family().len();
    let ups: Vec<FixedBitSet> = (0..n).map(|i| es.upper_bounds(i)).collect();
    let mut adj = vec![FixedBitSet::with_capacity(n); n];
    for i in 0..n {
        for j in i + 1..n {
            if !ups[i].is_disjoint(&ups[j]) {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    let has_bound = |set: &[usize]| {
        let mut acc = FixedBitSet::with_capacity(n);
        acc.insert_range(..);
        for &i in set {
            acc.intersect_with(&ups[i]);
        }
        !acc.is_clear()
    };
    let mut cliques = Vec::new();
    let mut p = FixedBitSet::with_capacity(n);
    p.insert_range(..);
    bron_kerbosch(&adj, &mut Vec::new(), p, FixedBitSet::with_capacity(n), &mut cliques);
    for clique in cliques {
        if !has_bound(&clique) {
            let mut set = clique;
            let mut k = 0;
            while k < set.len() {
                let mut smaller = set.clone();
                smaller.remove(k);
                if !has_bound(&smaller) {
                    set = smaller;
                } else {
                    k += 1;
                }
            }
            set.sort_unstable();
            return Some(set);
        }
    }
    None
}

fn bron_kerbosch(adj: &[FixedBitSet], r: &mut Vec<usize>, mut p: FixedBitSet, mut x: FixedBitSet, out: &mut Vec<Vec<usize>>) {
    if p.is_clear() && x.is_clear() {
        out.push(r.clone());
        return;
    }
    let pivot = p.ones().chain(x.ones()).max_by_key(|&u| adj[u].intersection(&p).count()).expect("p or x non-empty");
    let candidates: Vec<usize> = p.difference(&adj[pivot]).collect();
    for v in candidates {
        r.push(v);
        let mut p2 = p.clone();
        p2.intersect_with(&adj[v]);
        let mut x2 = x.clone();
        x2.intersect_with(&adj[v]);
        bron_kerbosch(adj, r, p2, x2, out);
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
}
