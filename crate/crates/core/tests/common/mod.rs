#![allow(dead_code)]

use esmin::folding::{quotient, EventMap, EventPartition};
use esmin::models::{configs_aes, configs_pes, recognize_aes, recognize_pes, AsymES, PrimeES};
use esmin::poset::{EventId, EventStructure, Label};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn events(rng: &mut Rng8, n: usize) -> Vec<(EventId, Label)> {
    (0..n)
        .map(|i| {
            let l = if rng.gen_bool(0.5) { "a" } else { "b" };
            (EventId::new(&format!("e{i}")).unwrap(), Label::new(l).unwrap())
        })
        .collect()
}

fn pairs(rng: &mut Rng8, n: usize, p: f64, forward_only: bool) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x != y && (!forward_only || x < y) && rng.gen_bool(p) {
                v.push((x, y));
            }
        }
    }
    v
}

/// A valid random PES with at most `max` events.
pub fn pes(rng: &mut Rng8, max: usize) -> PrimeES {
    loop {
        let n = rng.gen_range(0..=max);
        let ev = events(rng, n);
        let le = pairs(rng, n, 0.25, true);
        let cf: Vec<_> = pairs(rng, n, 0.2, true);
        let (p, _) = PrimeES::new(ev, &le, &cf).unwrap();
        if p.validate().is_valid() {
            return p;
        }
    }
}

/// A valid random AES with at most `max` events.
pub fn aes(rng: &mut Rng8, max: usize) -> AsymES {
    loop {
        let n = rng.gen_range(0..=max);
        let ev = events(rng, n);
        let le = pairs(rng, n, 0.2, true);
        let ac = pairs(rng, n, 0.2, false);
        let (a, _) = AsymES::new(ev, &le, &ac).unwrap();
        if a.validate().is_valid() {
            return a;
        }
    }
}

/// A random label-respecting partition.
pub fn partition(rng: &mut Rng8, labels: &[Label]) -> EventPartition {
    let n = labels.len();
    let mut key: Vec<usize> = (0..n).collect();
    for x in 0..n {
        let same: Vec<usize> = (0..x).filter(|&y| labels[y] == labels[x]).collect();
        if !same.is_empty() && rng.gen_bool(0.8) {
            key[x] = key[same[rng.gen_range(0..same.len())]];
        }
    }
    EventPartition::from_class_of(&key)
}

/// A random map between structures, label preserving where possible.
pub fn random_map(rng: &mut Rng8, src: &[Label], dst: &[Label]) -> Option<EventMap> {
    let mut m = Vec::with_capacity(src.len());
    for l in src {
        let opts: Vec<usize> = (0..dst.len()).filter(|&y| &dst[y] == l).collect();
        if opts.is_empty() {
            return None;
        }
        m.push(opts[rng.gen_range(0..opts.len())]);
    }
    Some(EventMap::new(m))
}

/// A PES target obtained by quotienting `p` and recognising the result.
pub fn pes_quotient_target(rng: &mut Rng8, p: &PrimeES) -> Option<(PrimeES, EventMap)> {
    let es = configs_pes(p);
    let part = partition(rng, p.labels());
    let (q, f) = quotient(&es, &part).ok()?;
    recognize_pes(&q).map(|qp| (qp, f))
}

pub fn aes_quotient_target(rng: &mut Rng8, a: &AsymES) -> Option<(AsymES, EventMap)> {
    let es = configs_aes(a);
    let part = partition(rng, a.labels());
    let (q, f) = quotient(&es, &part).ok()?;
    recognize_aes(&q).map(|qa| (qa, f))
}

pub fn embed_pes(p: &PrimeES) -> EventStructure {
    configs_pes(p)
}

fn rebuild_aes(a: &AsymES, le: &[(usize, usize)], ac: &[(usize, usize)]) -> Option<AsymES> {
    let ev = a.ids().iter().cloned().zip(a.labels().iter().cloned()).collect();
    let (b, _) = AsymES::new(ev, le, ac).ok()?;
    b.validate().is_valid().then_some(b)
}

/// `a` with one asymmetric conflict generator dropped or one random pair added.
pub fn perturb_aes(rng: &mut Rng8, a: &AsymES) -> Option<AsymES> {
    let n = a.n_events();
    if n < 2 {
        return None;
    }
    let le = a.causality_reduction();
    let mut ac = a.asym_generators();
    if !ac.is_empty() && rng.gen_bool(0.5) {
        ac.remove(rng.gen_range(0..ac.len()));
    } else {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if x == y {
            return None;
        }
        ac.push((x, y));
    }
    rebuild_aes(a, &le, &ac)
}

/// `p` with one conflict generator dropped or one random conflict added.
pub fn perturb_pes(rng: &mut Rng8, p: &PrimeES) -> Option<PrimeES> {
    let n = p.n_events();
    if n < 2 {
        return None;
    }
    let le = p.causality_reduction();
    let mut cf = p.minimal_conflicts();
    if !cf.is_empty() && rng.gen_bool(0.5) {
        cf.remove(rng.gen_range(0..cf.len()));
    } else {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if x == y {
            return None;
        }
        cf.push((x, y));
    }
    let ev = p.ids().iter().cloned().zip(p.labels().iter().cloned()).collect();
    let (q, _) = PrimeES::new(ev, &le, &cf).ok()?;
    q.validate().is_valid().then_some(q)
}

/// A PES pair with a map between them: a quotient target, possibly with the
/// source or target perturbed so that the map may stop being a folding.
pub fn pes_instance(rng: &mut Rng8, max: usize) -> Option<(PrimeES, PrimeES, EventMap)> {
    let a = pes(rng, max);
    let (b, f) = pes_quotient_target(rng, &a)?;
    match rng.gen_range(0..3) {
        0 => Some((a, b, f)),
        1 => Some((perturb_pes(rng, &a)?, b, f)),
        _ => Some((a, perturb_pes(rng, &b)?, f)),
    }
}

/// The AES counterpart of [`pes_instance`].
pub fn aes_instance(rng: &mut Rng8, max: usize) -> Option<(AsymES, AsymES, EventMap)> {
    let a = aes(rng, max);
    let (b, f) = aes_quotient_target(rng, &a)?;
    match rng.gen_range(0..3) {
        0 => Some((a, b, f)),
        1 => Some((perturb_aes(rng, &a)?, b, f)),
        _ => Some((a, perturb_aes(rng, &b)?, f)),
    }
}

/// A random structure: a PES or AES embedding, or a quotient of one that
/// need not be representable in either class.
pub fn structure(rng: &mut Rng8, max: usize) -> EventStructure {
    loop {
        match rng.gen_range(0..3) {
            0 => return configs_pes(&pes(rng, max)),
            1 => return configs_aes(&aes(rng, max)),
            _ => {
                let es = configs_aes(&aes(rng, max));
                let part = partition(rng, es.labels());
                if let Ok((q, _)) = quotient(&es, &part) {
                    return q;
                }
            }
        }
    }
}

/// A random quotient of `es` together with its quotient map.
pub fn quotient_of(rng: &mut Rng8, es: &EventStructure) -> Option<(EventStructure, EventMap)> {
    let part = partition(rng, es.labels());
    quotient(es, &part).ok()
}
