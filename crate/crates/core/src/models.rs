//! Prime, asymmetric, flow and bundle event structures.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::behavior::semantic_relations;
use crate::error::{Error, Result};
use crate::poset::{sort_events, validate_family, EventId, EventSet, EventStructure, Label, PosetConfig};
use crate::report::ValidationReport;

/// Relations added by closing the declared ones, for reporting.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosureReport {
    pub added: Vec<String>,
}

/// The kind of a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Poset,
    Pes,
    Aes,
    Fes,
    Bes,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Poset => "poset",
            Kind::Pes => "pes",
            Kind::Aes => "aes",
            Kind::Fes => "fes",
            Kind::Bes => "bes",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Kind, String> {
        match s {
            "poset" => Ok(Kind::Poset),
            "pes" => Ok(Kind::Pes),
            "aes" => Ok(Kind::Aes),
            "fes" => Ok(Kind::Fes),
            "bes" => Ok(Kind::Bes),
            _ => Err(format!("unknown kind {s:?}")),
        }
    }
}

/// Reflexive-transitive closure of a "direct predecessors" relation.
fn down_closure(direct: &[EventSet]) -> Vec<EventSet> {
    let n = direct.len();
    let mut down: Vec<EventSet> = (0..n).map(|x| direct[x].with(x)).collect();
    for k in 0..n {
        let dk = down[k];
        for d in down.iter_mut() {
            if d.contains(k) {
                *d |= dk;
            }
        }
    }
    down
}

fn invert(rel: &[EventSet]) -> Vec<EventSet> {
    let mut inv = vec![EventSet::EMPTY; rel.len()];
    for (x, r) in rel.iter().enumerate() {
        for y in r.iter() {
            inv[y].insert(x);
        }
    }
    inv
}

fn symmetric(pairs: &[(usize, usize)], n: usize) -> Vec<EventSet> {
    let mut rel = vec![EventSet::EMPTY; n];
    for &(x, y) in pairs {
        rel[x].insert(y);
        rel[y].insert(x);
    }
    rel
}

fn remap(pairs: &[(usize, usize)], perm: &[usize]) -> Result<Vec<(usize, usize)>> {
    pairs
        .iter()
        .map(|&(x, y)| match (perm.get(x), perm.get(y)) {
            (Some(&a), Some(&b)) => Ok((a, b)),
            _ => Err(Error::UnknownEvent(format!("#{}", x.max(y)))),
        })
        .collect()
}

/// Whether `rel` (x ↦ set of successors) restricted to `s` has a cycle.
pub(crate) fn has_cycle(rel: &[EventSet], s: EventSet) -> bool {
    let mut remaining = s;
    loop {
        let sources: EventSet = remaining.iter().filter(|&y| !remaining.iter().any(|x| rel[x].contains(y))).collect();
        if sources.is_empty() {
            return !remaining.is_empty();
        }
        remaining = remaining - sources;
    }
}

/// A prime event structure: causality `≤` and hereditary symmetric conflict `#`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeES {
    ids: Vec<EventId>,
    labels: Vec<Label>,
    causes: Vec<EventSet>,
    conflict: Vec<EventSet>,
}

impl PrimeES {
    /// Builds a PES from declared pairs over input positions, closing `≤`
    /// reflexively and transitively and `#` symmetrically and hereditarily.
    pub fn new(events: Vec<(EventId, Label)>, le: &[(usize, usize)], cf: &[(usize, usize)]) -> Result<(PrimeES, ClosureReport)> {
        let (ids, labels, perm) = sort_events(events)?;
        let n = ids.len();
        let le = remap(le, &perm)?;
        let cf = remap(cf, &perm)?;
        let mut direct = vec![EventSet::EMPTY; n];
        for &(x, y) in &le {
            direct[y].insert(x);
        }
        let causes = down_closure(&direct);
        let conflict = hereditary_conflict(&causes, &symmetric(&cf, n));
        let p = PrimeES { ids, labels, causes, conflict };
        let mut report = ClosureReport::default();
        for y in 0..n {
            for x in (p.causes[y] - direct[y]).iter().filter(|&x| x != y) {
                report.added.push(format!("le {} {}", p.ids[x], p.ids[y]));
            }
        }
        let declared = symmetric(&cf, n);
        for x in 0..n {
            for y in (p.conflict[x] - declared[x]).iter().filter(|&y| x <= y) {
                report.added.push(format!("cf {} {}", p.ids[x], p.ids[y]));
            }
        }
        Ok((p, report))
    }

    /// Builds a PES from already closed relations over sorted ids.
    pub(crate) fn from_closed(ids: Vec<EventId>, labels: Vec<Label>, causes: Vec<EventSet>, conflict: Vec<EventSet>) -> PrimeES {
        PrimeES { ids, labels, causes, conflict }
    }

    pub fn n_events(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[EventId] {
        &self.ids
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    /// `⌈x⌉`, including `x`.
    pub fn causes(&self, x: usize) -> EventSet {
        self.causes[x]
    }

    pub fn strict_causes(&self, x: usize) -> EventSet {
        self.causes[x].without(x)
    }

    /// `{y | x < y}`.
    pub fn consequences(&self, x: usize) -> EventSet {
        (0..self.n_events()).filter(|&y| y != x && self.causes[y].contains(x)).collect()
    }

    pub fn conflicts(&self, x: usize) -> EventSet {
        self.conflict[x]
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        self.causes[y].contains(x)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.le(x, y)
    }

    pub fn in_conflict(&self, x: usize, y: usize) -> bool {
        self.conflict[x].contains(y)
    }

    /// Pairwise conflict-free.
    pub fn is_consistent(&self, s: EventSet) -> bool {
        s.iter().all(|x| self.conflict[x].is_disjoint(s))
    }

    /// Causality pairs of the transitive reduction, sorted.
    pub fn causality_reduction(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for y in 0..self.n_events() {
            let strict = self.strict_causes(y);
            for x in strict.iter() {
                if !strict.iter().any(|z| z != x && self.lt(x, z)) {
                    v.push((x, y));
                }
            }
        }
        v.sort_unstable();
        v
    }

    /// Conflicts not inherited from a conflict between causes, as `x < y` pairs.
    pub fn minimal_conflicts(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for x in 0..self.n_events() {
            for y in self.conflict[x].iter().filter(|&y| x <= y) {
                let inherited = self.causes[x].iter().any(|a| self.causes[y].iter().any(|b| (a, b) != (x, y) && self.in_conflict(a, b)));
                if !inherited {
                    v.push((x, y));
                }
            }
        }
        v
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let n = self.n_events();
        for x in 0..n {
            for y in x + 1..n {
                if self.le(x, y) && self.le(y, x) {
                    r.push("causality-antisymmetry", format!("{} {}", self.ids[x], self.ids[y]));
                }
            }
        }
        for x in 0..n {
            if self.in_conflict(x, x) {
                r.push("conflict-irreflexive", format!("{}#{}", self.ids[x], self.ids[x]));
            }
            for y in self.conflict[x].iter() {
                if !self.in_conflict(y, x) {
                    r.push("conflict-symmetric", format!("{}#{}", self.ids[x], self.ids[y]));
                }
                for z in self.consequences(y).iter() {
                    if !self.in_conflict(x, z) {
                        r.push("conflict-hereditary", format!("{}#{} {}<{}", self.ids[x], self.ids[y], self.ids[y], self.ids[z]));
                    }
                }
            }
        }
        r
    }
}

fn hereditary_conflict(causes: &[EventSet], declared: &[EventSet]) -> Vec<EventSet> {
    let up = invert(causes);
    (0..causes.len())
        .map(|x| {
            let mut c = EventSet::EMPTY;
            for a in causes[x].iter() {
                for b in declared[a].iter() {
                    c |= up[b];
                }
            }
            c
        })
        .collect()
}

/// An asymmetric event structure: causality `≤` and asymmetric conflict `↗`.
///
/// `x ↗ y` reads "x precedes y": if both occur, x occurs first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymES {
    ids: Vec<EventId>,
    labels: Vec<Label>,
    causes: Vec<EventSet>,
    asym: Vec<EventSet>,
}

impl AsymES {
    /// Builds an AES from declared pairs over input positions.
    ///
    /// `↗` is closed under `x<y ⇒ x↗y`, `x↗y ∧ y<z ⇒ x↗z` and the rule that a
    /// cycle on `⌈x⌉∪⌈y⌉` induces `x↗y`. The last rule only relates events
    /// that never occur together, so it does not change the configurations.
    pub fn new(events: Vec<(EventId, Label)>, le: &[(usize, usize)], ac: &[(usize, usize)]) -> Result<(AsymES, ClosureReport)> {
        let (ids, labels, perm) = sort_events(events)?;
        let n = ids.len();
        let le = remap(le, &perm)?;
        let ac = remap(ac, &perm)?;
        let mut direct = vec![EventSet::EMPTY; n];
        for &(x, y) in &le {
            direct[y].insert(x);
        }
        let causes = down_closure(&direct);
        let mut declared = vec![EventSet::EMPTY; n];
        for &(x, y) in &ac {
            declared[x].insert(y);
        }
        let asym = close_asym(&causes, declared.clone());
        let a = AsymES { ids, labels, causes, asym };
        let mut report = ClosureReport::default();
        for y in 0..n {
            for x in (a.causes[y] - direct[y]).iter().filter(|&x| x != y) {
                report.added.push(format!("le {} {}", a.ids[x], a.ids[y]));
            }
        }
        for x in 0..n {
            for y in (a.asym[x] - declared[x]).iter() {
                report.added.push(format!("ac {} {}", a.ids[x], a.ids[y]));
            }
        }
        Ok((a, report))
    }

    pub(crate) fn from_closed(ids: Vec<EventId>, labels: Vec<Label>, causes: Vec<EventSet>, asym: Vec<EventSet>) -> AsymES {
        AsymES { ids, labels, causes, asym }
    }

    pub fn n_events(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[EventId] {
        &self.ids
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    pub fn causes(&self, x: usize) -> EventSet {
        self.causes[x]
    }

    pub fn strict_causes(&self, x: usize) -> EventSet {
        self.causes[x].without(x)
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        self.causes[y].contains(x)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.le(x, y)
    }

    /// `x ↗ y`.
    pub fn precedes(&self, x: usize, y: usize) -> bool {
        self.asym[x].contains(y)
    }

    /// `{y | x ↗ y}`.
    pub fn asym_succ(&self, x: usize) -> EventSet {
        self.asym[x]
    }

    /// `{y | y ↗ x}`.
    pub fn asym_pred(&self, x: usize) -> EventSet {
        (0..self.n_events()).filter(|&y| self.asym[y].contains(x)).collect()
    }

    /// Whether `↗` has a cycle on `s`.
    pub fn is_cyclic_on(&self, s: EventSet) -> bool {
        has_cycle(&self.asym, s)
    }

    /// `⌈s⌉` is a configuration.
    pub fn is_consistent(&self, s: EventSet) -> bool {
        let mut down = EventSet::EMPTY;
        for x in s.iter() {
            down |= self.causes[x];
        }
        !self.is_cyclic_on(down)
    }

    pub fn causality_reduction(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for y in 0..self.n_events() {
            let strict = self.strict_causes(y);
            for x in strict.iter() {
                if !strict.iter().any(|z| z != x && self.lt(x, z)) {
                    v.push((x, y));
                }
            }
        }
        v.sort_unstable();
        v
    }

    /// A generating set of `↗` pairs: removing any one changes the closure.
    pub fn asym_generators(&self) -> Vec<(usize, usize)> {
        let n = self.n_events();
        let mut gens = self.asym.clone();
        for x in 0..n {
            for y in self.asym[x].iter() {
                let mut trial = gens.clone();
                trial[x].remove(y);
                if close_asym(&self.causes, trial.clone()) == self.asym {
                    gens = trial;
                }
            }
        }
        let mut v: Vec<(usize, usize)> = (0..n).flat_map(|x| gens[x].iter().map(move |y| (x, y))).collect();
        v.sort_unstable();
        v
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let n = self.n_events();
        let name = |x: usize| self.ids[x].as_str();
        for x in 0..n {
            for y in x + 1..n {
                if self.le(x, y) && self.le(y, x) {
                    r.push("causality-antisymmetry", format!("{} {}", name(x), name(y)));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if self.lt(x, y) && !self.precedes(x, y) {
                    r.push("aes-axiom-1", format!("{}<{} without {}↗{}", name(x), name(y), name(x), name(y)));
                }
                if self.precedes(x, y) {
                    for z in (0..n).filter(|&z| self.lt(y, z) && !self.precedes(x, z)) {
                        r.push("aes-axiom-2", format!("{}↗{} {}<{} without {}↗{}", name(x), name(y), name(y), name(z), name(x), name(z)));
                    }
                }
            }
            if self.is_cyclic_on(self.causes[x]) {
                r.push("aes-axiom-3", format!("cycle on the causes of {}", name(x)));
            }
        }
        for x in 0..n {
            for y in (0..n).filter(|&y| y != x) {
                if !self.precedes(x, y) && self.is_cyclic_on(self.causes[x] | self.causes[y]) {
                    r.push("aes-axiom-4", format!("cycle on the causes of {} and {} without {}↗{}", name(x), name(y), name(x), name(y)));
                }
            }
        }
        r
    }
}

fn close_asym(causes: &[EventSet], mut asym: Vec<EventSet>) -> Vec<EventSet> {
    let n = causes.len();
    let up = invert(causes);
    loop {
        let before = asym.clone();
        for x in 0..n {
            asym[x] |= up[x].without(x);
            let mut acc = asym[x];
            for y in asym[x].iter() {
                acc |= up[y];
            }
            asym[x] = acc;
        }
        for x in 0..n {
            for y in 0..n {
                if y != x && !asym[x].contains(y) && has_cycle(&asym, causes[x] | causes[y]) {
                    asym[x].insert(y);
                }
            }
        }
        if asym == before {
            return asym;
        }
    }
}

/// A flow event structure: flow relation `≺` and symmetric conflict `#`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowES {
    ids: Vec<EventId>,
    labels: Vec<Label>,
    flow_pred: Vec<EventSet>,
    conflict: Vec<EventSet>,
}

impl FlowES {
    pub fn new(events: Vec<(EventId, Label)>, flow: &[(usize, usize)], cf: &[(usize, usize)]) -> Result<(FlowES, ClosureReport)> {
        let (ids, labels, perm) = sort_events(events)?;
        let n = ids.len();
        let flow = remap(flow, &perm)?;
        let cf = remap(cf, &perm)?;
        let mut flow_pred = vec![EventSet::EMPTY; n];
        for &(x, y) in &flow {
            flow_pred[y].insert(x);
        }
        Ok((FlowES { ids, labels, flow_pred, conflict: symmetric(&cf, n) }, ClosureReport::default()))
    }

    pub fn n_events(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[EventId] {
        &self.ids
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// `{y | y ≺ x}`.
    pub fn flow_pred(&self, x: usize) -> EventSet {
        self.flow_pred[x]
    }

    pub fn conflicts(&self, x: usize) -> EventSet {
        self.conflict[x]
    }

    pub fn flow_pairs(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = (0..self.n_events()).flat_map(|y| self.flow_pred[y].iter().map(move |x| (x, y))).collect();
        v.sort_unstable();
        v
    }

    pub fn conflict_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n_events()).flat_map(|x| self.conflict[x].iter().filter(move |&y| x <= y).map(move |y| (x, y))).collect()
    }

    pub fn is_configuration(&self, c: EventSet) -> bool {
        let succ = invert(&self.flow_pred);
        if has_cycle(&succ, c) || c.iter().any(|x| !self.conflict[x].is_disjoint(c)) {
            return false;
        }
        c.iter().all(|x| (self.flow_pred[x] - c).iter().all(|y| !(c & self.flow_pred[x] & self.conflict[y]).is_empty()))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        for x in 0..self.n_events() {
            if self.flow_pred[x].contains(x) {
                r.push("flow-irreflexive", format!("{}≺{}", self.ids[x], self.ids[x]));
            }
            if self.conflict[x].contains(x) {
                r.push("conflict-irreflexive", format!("{}#{}", self.ids[x], self.ids[x]));
            }
        }
        r
    }
}

/// A bundle event structure: bundles `X ↦ y` and symmetric conflict `#`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleES {
    ids: Vec<EventId>,
    labels: Vec<Label>,
    bundles: Vec<(EventSet, usize)>,
    conflict: Vec<EventSet>,
}

impl BundleES {
    pub fn new(events: Vec<(EventId, Label)>, bundles: &[(Vec<usize>, usize)], cf: &[(usize, usize)]) -> Result<(BundleES, ClosureReport)> {
        let (ids, labels, perm) = sort_events(events)?;
        let n = ids.len();
        let cf = remap(cf, &perm)?;
        let mut bs = Vec::new();
        for (xs, y) in bundles {
            let y = *perm.get(*y).ok_or_else(|| Error::UnknownEvent(format!("#{y}")))?;
            let mut set = EventSet::EMPTY;
            for &x in xs {
                set.insert(*perm.get(x).ok_or_else(|| Error::UnknownEvent(format!("#{x}")))?);
            }
            bs.push((set, y));
        }
        bs.sort_by_key(|&(s, y)| (y, s.iter().collect::<Vec<_>>()));
        bs.dedup();
        Ok((BundleES { ids, labels, bundles: bs, conflict: symmetric(&cf, n) }, ClosureReport::default()))
    }

    pub fn n_events(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[EventId] {
        &self.ids
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn bundles(&self) -> &[(EventSet, usize)] {
        &self.bundles
    }

    pub fn conflicts(&self, x: usize) -> EventSet {
        self.conflict[x]
    }

    pub fn conflict_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n_events()).flat_map(|x| self.conflict[x].iter().filter(move |&y| x <= y).map(move |y| (x, y))).collect()
    }

    /// `{y ∈ c | y ↦_c x}`.
    fn enabling(&self, c: EventSet, x: usize) -> EventSet {
        let mut s = EventSet::EMPTY;
        for &(b, y) in &self.bundles {
            if y == x {
                s |= b & c;
            }
        }
        s
    }

    pub fn is_configuration(&self, c: EventSet) -> bool {
        if c.iter().any(|x| !self.conflict[x].is_disjoint(c)) {
            return false;
        }
        if self.bundles.iter().any(|&(b, y)| c.contains(y) && b.is_disjoint(c)) {
            return false;
        }
        let mut succ = vec![EventSet::EMPTY; self.n_events()];
        for x in c.iter() {
            for y in self.enabling(c, x).iter() {
                succ[y].insert(x);
            }
        }
        !has_cycle(&succ, c)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        for x in 0..self.n_events() {
            if self.conflict[x].contains(x) {
                r.push("conflict-irreflexive", format!("{}#{}", self.ids[x], self.ids[x]));
            }
        }
        for &(b, y) in &self.bundles {
            for u in b.iter() {
                for v in b.iter().filter(|&v| v > u) {
                    if !self.conflict[u].contains(v) {
                        r.push("bundle-conflict", format!("{} and {} in a bundle of {} are not in conflict", self.ids[u], self.ids[v], self.ids[y]));
                    }
                }
            }
        }
        r
    }
}

/// Any of the supported models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Poset(EventStructure),
    Pes(PrimeES),
    Aes(AsymES),
    Fes(FlowES),
    Bes(BundleES),
}

impl Model {
    pub fn kind(&self) -> Kind {
        match self {
            Model::Poset(_) => Kind::Poset,
            Model::Pes(_) => Kind::Pes,
            Model::Aes(_) => Kind::Aes,
            Model::Fes(_) => Kind::Fes,
            Model::Bes(_) => Kind::Bes,
        }
    }

    pub fn ids(&self) -> &[EventId] {
        match self {
            Model::Poset(m) => m.ids(),
            Model::Pes(m) => m.ids(),
            Model::Aes(m) => m.ids(),
            Model::Fes(m) => m.ids(),
            Model::Bes(m) => m.ids(),
        }
    }

    /// The configuration structure. With `prune`, FES/BES events that occur
    /// in no configuration are dropped instead of raising an error.
    pub fn embedding(&self, prune: bool) -> Result<EventStructure> {
        match self {
            Model::Poset(m) => Ok(m.clone()),
            Model::Pes(m) => Ok(configs_pes(m)),
            Model::Aes(m) => Ok(configs_aes(m)),
            Model::Fes(m) if prune => Ok(configs_fes_pruned(m)),
            Model::Fes(m) => configs_fes(m),
            Model::Bes(m) if prune => Ok(configs_bes_pruned(m)),
            Model::Bes(m) => configs_bes(m),
        }
    }
}

/// Checks the axioms of the model's class.
pub fn validate_model(m: &Model) -> ValidationReport {
    match m {
        Model::Poset(es) => validate_family(es),
        Model::Pes(p) => p.validate(),
        Model::Aes(a) => a.validate(),
        Model::Fes(f) => f.validate(),
        Model::Bes(b) => b.validate(),
    }
}

/// Breadth-first enumeration of event sets reachable from `∅` by adding one
/// event at a time while `ok` holds.
fn enumerate(n: usize, ok: impl Fn(EventSet, usize) -> bool) -> Vec<EventSet> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(EventSet::EMPTY);
    queue.push_back(EventSet::EMPTY);
    let mut out = Vec::new();
    while let Some(s) = queue.pop_front() {
        out.push(s);
        for e in (0..n).filter(|&e| !s.contains(e)) {
            let t = s.with(e);
            if !seen.contains(&t) && ok(s, e) {
                seen.insert(t);
                queue.push_back(t);
            }
        }
    }
    out
}

/// Configurations of a PES: conflict-free, causally closed sets ordered by causality.
pub fn configs_pes(p: &PrimeES) -> EventStructure {
    let sets = enumerate(p.n_events(), |s, e| p.strict_causes(e).is_subset(s) && p.conflicts(e).is_disjoint(s.with(e)));
    let family = sets.into_iter().map(|c| PosetConfig::from_below_fn(c, |e| p.strict_causes(e))).collect();
    EventStructure::from_sorted(p.ids.clone(), p.labels.clone(), family)
}

/// Configurations of an AES: causally closed, `↗`-acyclic sets ordered by `↗*`.
pub fn configs_aes(a: &AsymES) -> EventStructure {
    let sets = enumerate(a.n_events(), |s, e| a.strict_causes(e).is_subset(s) && !a.precedes(e, e) && !a.is_cyclic_on(s.with(e)));
    let pred: Vec<EventSet> = (0..a.n_events()).map(|x| a.asym_pred(x)).collect();
    let family = sets
        .into_iter()
        .map(|c| PosetConfig::from_relation(c, |e| pred[e]).expect("configurations are acyclic"))
        .collect();
    EventStructure::from_sorted(a.ids.clone(), a.labels.clone(), family)
}

fn fes_family(f: &FlowES) -> Vec<PosetConfig> {
    let sets = enumerate(f.n_events(), |s, e| f.is_configuration(s.with(e)));
    sets.into_iter()
        .map(|c| PosetConfig::from_relation(c, |e| f.flow_pred(e)).expect("configurations are acyclic"))
        .collect()
}

fn bes_family(b: &BundleES) -> Vec<PosetConfig> {
    let sets = enumerate(b.n_events(), |s, e| b.is_configuration(s.with(e)));
    sets.into_iter()
        .map(|c| PosetConfig::from_relation(c, |e| b.enabling(c, e)).expect("configurations are acyclic"))
        .collect()
}

fn require_executable(es: EventStructure) -> Result<EventStructure> {
    let orphans = es.orphans();
    if orphans.is_empty() {
        Ok(es)
    } else {
        Err(Error::NonExecutable(orphans.iter().map(|e| es.id(e).to_string()).collect()))
    }
}

/// Drops events occurring in no configuration.
fn prune(es: EventStructure) -> EventStructure {
    let keep: Vec<usize> = (es.all_events() - es.orphans()).iter().collect();
    let mut perm = vec![0; es.n_events()];
    for (new, &old) in keep.iter().enumerate() {
        perm[old] = new;
    }
    let ids = keep.iter().map(|&e| es.id(e).clone()).collect();
    let labels = keep.iter().map(|&e| es.label(e).clone()).collect();
    let family = es.family().iter().map(|c| c.map(&perm).expect("injective")).collect();
    EventStructure::from_sorted(ids, labels, family)
}

/// Configurations of an FES; errors if some event is never executable.
pub fn configs_fes(f: &FlowES) -> Result<EventStructure> {
    require_executable(EventStructure::from_sorted(f.ids.clone(), f.labels.clone(), fes_family(f)))
}

pub fn configs_fes_pruned(f: &FlowES) -> EventStructure {
    prune(EventStructure::from_sorted(f.ids.clone(), f.labels.clone(), fes_family(f)))
}

/// Configurations of a BES; errors if some event is never executable.
pub fn configs_bes(b: &BundleES) -> Result<EventStructure> {
    require_executable(EventStructure::from_sorted(b.ids.clone(), b.labels.clone(), bes_family(b)))
}

pub fn configs_bes_pruned(b: &BundleES) -> EventStructure {
    prune(EventStructure::from_sorted(b.ids.clone(), b.labels.clone(), bes_family(b)))
}

/// A PES with exactly the family of `es`, if one exists.
pub fn recognize_pes(es: &EventStructure) -> Option<PrimeES> {
    let n = es.n_events();
    let sem = semantic_relations(es);
    let mut direct = vec![EventSet::EMPTY; n];
    for x in 0..n {
        for y in 0..n {
            if x != y && sem.precedes(x, y) && !sem.in_conflict(x, y) {
                direct[y].insert(x);
            }
        }
    }
    let causes = down_closure(&direct);
    let conflict = (0..n).map(|x| sem.conflicts(x)).collect();
    let p = PrimeES::from_closed(es.ids().to_vec(), es.labels().to_vec(), causes, conflict);
    (p.validate().is_valid() && configs_pes(&p) == *es).then_some(p)
}

/// An AES with exactly the family of `es`, if one exists.
pub fn recognize_aes(es: &EventStructure) -> Option<AsymES> {
    let n = es.n_events();
    let sem = semantic_relations(es);
    let mut direct = vec![EventSet::EMPTY; n];
    for y in 0..n {
        let with_y: Vec<&PosetConfig> = es.family().iter().filter(|c| c.contains(y)).collect();
        for x in (0..n).filter(|&x| x != y) {
            if !with_y.is_empty() && with_y.iter().all(|c| c.below(y).contains(x)) {
                direct[y].insert(x);
            }
        }
    }
    let causes = down_closure(&direct);
    let asym = (0..n).map(|x| (0..n).filter(|&y| y != x && sem.precedes(x, y)).collect()).collect();
    let a = AsymES::from_closed(es.ids().to_vec(), es.labels().to_vec(), causes.clone(), close_asym(&causes, asym));
    (a.validate().is_valid() && configs_aes(&a) == *es).then_some(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(names: &[&str]) -> Vec<(EventId, Label)> {
        names
            .iter()
            .map(|n| (EventId::new(n).unwrap(), Label::new(n.trim_end_matches(|c: char| c.is_ascii_digit())).unwrap()))
            .collect()
    }

    fn p0() -> PrimeES {
        // a1 a2 b1 b2 b3 c
        PrimeES::new(ev(&["a1", "a2", "b1", "b2", "b3", "c"]), &[(0, 2), (1, 3)], &[(0, 1), (0, 4), (1, 4)]).unwrap().0
    }

    #[test]
    fn pes_closure_inherits_conflicts() {
        let (p, report) = PrimeES::new(ev(&["a1", "a2", "b1", "b2", "b3", "c"]), &[(0, 2), (1, 3)], &[(0, 1), (0, 4), (1, 4)]).unwrap();
        assert!(p.in_conflict(2, 3));
        assert!(p.in_conflict(2, 4));
        assert!(!p.in_conflict(5, 0));
        assert!(report.added.contains(&"cf b1 b2".to_string()));
        assert_eq!(p.minimal_conflicts(), vec![(0, 1), (0, 4), (1, 4)]);
        assert!(p.validate().is_valid());
    }

    #[test]
    fn pes_self_conflict_is_reported() {
        let (p, _) = PrimeES::new(ev(&["a"]), &[], &[(0, 0)]).unwrap();
        assert_eq!(p.validate().violations[0].clause, "conflict-irreflexive");
    }

    #[test]
    fn p0_has_twelve_configurations() {
        let es = configs_pes(&p0());
        assert_eq!(es.family().len(), 12);
        assert!(validate_family(&es).is_valid());
        for c in es.family() {
            for d in es.family() {
                assert_eq!(c.is_prefix_of(d), c.events().is_subset(d.events()));
            }
        }
    }

    #[test]
    fn empty_pes_has_only_the_empty_configuration() {
        let (p, _) = PrimeES::new(vec![], &[], &[]).unwrap();
        assert_eq!(configs_pes(&p).family().len(), 1);
    }

    #[test]
    fn aes_closure_reports_added_precedence() {
        let (a, report) = AsymES::new(ev(&["a", "b"]), &[(0, 1)], &[]).unwrap();
        assert!(a.precedes(0, 1));
        assert_eq!(report.added, vec!["ac a b".to_string()]);
        assert!(a.validate().is_valid());
    }

    #[test]
    fn aes_missing_axiom_one_is_reported_on_raw_relations() {
        let a = AsymES::from_closed(
            vec![EventId::new("a").unwrap(), EventId::new("b").unwrap()],
            vec![Label::new("a").unwrap(), Label::new("b").unwrap()],
            vec![EventSet::singleton(0), EventSet::from_bits(0b11)],
            vec![EventSet::EMPTY; 2],
        );
        assert_eq!(a.validate().violations[0].clause, "aes-axiom-1");
    }

    #[test]
    fn aes_cycle_excludes_joint_occurrence() {
        let (a, _) = AsymES::new(ev(&["a", "b"]), &[], &[(0, 1), (1, 0)]).unwrap();
        let es = configs_aes(&a);
        assert_eq!(es.family().len(), 3);
        assert!(es.family().iter().all(|c| c.len() < 2));
    }

    #[test]
    fn fes_chain() {
        let (f, _) = FlowES::new(ev(&["a", "b"]), &[(0, 1)], &[]).unwrap();
        let es = configs_fes(&f).unwrap();
        let shown: Vec<String> = es.family().iter().map(|c| es.show(c)).collect();
        assert_eq!(shown, vec!["{}", "{a}", "{a b : a<b}"]);
    }

    #[test]
    fn bes_disjunctive_cause() {
        let (b, _) = BundleES::new(ev(&["a", "b", "c"]), &[(vec![0, 1], 2)], &[(0, 1)]).unwrap();
        assert!(b.validate().is_valid());
        let es = configs_bes(&b).unwrap();
        let shown: Vec<String> = es.family().iter().map(|c| es.show(c)).collect();
        assert_eq!(shown, vec!["{}", "{a}", "{b}", "{a c : a<c}", "{b c : b<c}"]);
    }

    #[test]
    fn bes_discrete() {
        let (b, _) = BundleES::new(ev(&["a", "b"]), &[], &[]).unwrap();
        assert_eq!(configs_bes(&b).unwrap().family().len(), 4);
    }

    #[test]
    fn bes_empty_bundle_is_non_executable() {
        let (b, _) = BundleES::new(ev(&["a", "x"]), &[(vec![], 1)], &[]).unwrap();
        assert!(matches!(configs_bes(&b), Err(Error::NonExecutable(v)) if v == vec!["x".to_string()]));
        assert_eq!(configs_bes_pruned(&b).n_events(), 1);
    }

    #[test]
    fn recognize_pes_roundtrip() {
        let p = p0();
        assert_eq!(recognize_pes(&configs_pes(&p)), Some(p));
    }

    #[test]
    fn pes_embedding_is_an_aes() {
        let es = configs_pes(&p0());
        let a = recognize_aes(&es).expect("every PES is an AES");
        assert!(a.precedes(0, 1) && a.precedes(1, 0));
    }
}
