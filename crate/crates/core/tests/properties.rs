mod common;

use common::*;
use esmin::behavior::{bisim_to_es, check_bisimulation, decide_bisim, has_global_precedence, semantic_relations};
use esmin::folding::{check_folding, check_folding_equivalence_pes, folding_relation, is_folding, join_foldings, minimize, EventPartition, MinClass};
use esmin::io::{parse_es, serialize_es};
use esmin::iso::are_isomorphic;
use esmin::models::{configs_aes, configs_bes_pruned, configs_fes_pruned, configs_pes, recognize_pes, validate_model, BundleES, FlowES, Model};
use esmin::poset::{validate_family, EventId, EventStructure, Label};
use esmin::unfold::{canonical_pes, phi};
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn events(r: &mut Rng8, n: usize) -> Vec<(EventId, Label)> {
    (0..n).map(|i| (EventId::new(&format!("e{i}")).unwrap(), Label::new(if r.gen_bool(0.5) { "a" } else { "b" }).unwrap())).collect()
}

fn fes(r: &mut Rng8) -> FlowES {
    let n = r.gen_range(0..=5);
    let flow: Vec<_> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| x < y && r.gen_bool(0.3)).collect();
    let cf: Vec<_> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| x < y && r.gen_bool(0.2)).collect();
    FlowES::new(events(r, n), &flow, &cf).unwrap().0
}

fn bes(r: &mut Rng8) -> BundleES {
    let n = r.gen_range(0..=5);
    let mut bundles = Vec::new();
    for y in 0..n {
        if y > 0 && r.gen_bool(0.4) {
            let xs: Vec<usize> = (0..y).filter(|_| r.gen_bool(0.5)).collect();
            if !xs.is_empty() {
                bundles.push((xs, y));
            }
        }
    }
    let cf: Vec<_> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| x < y && r.gen_bool(0.2)).collect();
    BundleES::new(events(r, n), &bundles, &cf).unwrap().0
}

/// Every partition of `0..n` into classes of equal label.
fn all_partitions(labels: &[Label]) -> Vec<EventPartition> {
    fn go(x: usize, labels: &[Label], key: &mut Vec<usize>, out: &mut Vec<EventPartition>) {
        if x == labels.len() {
            out.push(EventPartition::from_class_of(key));
            return;
        }
        let mut reps: Vec<usize> = key.clone();
        reps.sort_unstable();
        reps.dedup();
        for r in reps.into_iter().filter(|&r| labels[r] == labels[x]) {
            key.push(r);
            go(x + 1, labels, key, out);
            key.pop();
        }
        key.push(x);
        go(x + 1, labels, key, out);
        key.pop();
    }
    let mut out = Vec::new();
    go(0, labels, &mut Vec::new(), &mut out);
    out
}

fn prefix_is_partial_order(e: &EventStructure) -> bool {
    let f = e.family();
    f.iter().all(|c| c.is_prefix_of(c))
        && f.iter().all(|a| f.iter().all(|b| !(a.is_prefix_of(b) && b.is_prefix_of(a)) || a == b))
        && f.iter().all(|a| f.iter().all(|b| !a.is_prefix_of(b) || f.iter().all(|c| !b.is_prefix_of(c) || a.is_prefix_of(c))))
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn prefix_is_a_partial_order(seed in any::<u64>()) {
        let e = structure(&mut rng(seed), 5);
        prop_assert!(prefix_is_partial_order(&e));
    }

    #[test]
    fn pes_prefix_is_inclusion(seed in any::<u64>()) {
        let e = configs_pes(&pes(&mut rng(seed), 6));
        for c1 in e.family() {
            for c2 in e.family() {
                prop_assert_eq!(c1.is_prefix_of(c2), c1.events().is_subset(c2.events()));
            }
        }
    }

    #[test]
    fn aes_prefix_forbids_new_events_preceding_old(seed in any::<u64>()) {
        let a = aes(&mut rng(seed), 6);
        let e = configs_aes(&a);
        for c1 in e.family() {
            for c2 in e.family() {
                let fresh = c2.events() - c1.events();
                let expected = c1.events().is_subset(c2.events()) && fresh.iter().all(|y| c1.members().all(|x| !a.precedes(y, x)));
                prop_assert_eq!(c1.is_prefix_of(c2), expected);
            }
        }
    }

    #[test]
    fn enumerations_are_valid_families(seed in any::<u64>()) {
        let mut r = rng(seed);
        prop_assert!(validate_family(&configs_pes(&pes(&mut r, 6))).is_valid());
        prop_assert!(validate_family(&configs_aes(&aes(&mut r, 6))).is_valid());
        let f = fes(&mut r);
        if f.validate().is_valid() {
            prop_assert!(validate_family(&configs_fes_pruned(&f)).is_valid());
        }
        let b = bes(&mut r);
        if b.validate().is_valid() {
            prop_assert!(validate_family(&configs_bes_pruned(&b)).is_valid());
        }
    }

    #[test]
    fn pes_semantic_precedence_is_causality_or_conflict(seed in any::<u64>()) {
        let p = pes(&mut rng(seed), 6);
        let e = configs_pes(&p);
        prop_assert!(has_global_precedence(&e));
        let sem = semantic_relations(&e);
        for x in 0..p.n_events() {
            for y in (0..p.n_events()).filter(|&y| y != x) {
                prop_assert_eq!(sem.precedes(x, y), p.le(x, y) || p.in_conflict(x, y));
            }
        }
    }

    #[test]
    fn recognize_pes_inverts_the_embedding(seed in any::<u64>()) {
        let p = pes(&mut rng(seed), 6);
        prop_assert_eq!(recognize_pes(&configs_pes(&p)), Some(p));
    }

    #[test]
    fn format_roundtrip(seed in any::<u64>()) {
        let mut r = rng(seed);
        for m in [Model::Pes(pes(&mut r, 6)), Model::Aes(aes(&mut r, 6)), Model::Poset(structure(&mut r, 4))] {
            let text = serialize_es(&m);
            let back = parse_es(&text).unwrap();
            prop_assert_eq!(serialize_es(&back), text);
        }
    }

    #[test]
    fn canonical_pes_is_a_valid_pes_and_phi_folds(seed in any::<u64>()) {
        let e = structure(&mut rng(seed), 5);
        let (cp, f) = phi(&e).unwrap();
        prop_assert!(validate_model(&Model::Pes(cp.pes.clone())).is_valid());
        prop_assert!(is_folding(&configs_pes(&cp.pes), &e, &f));
    }

    #[test]
    fn canonical_pes_of_a_pes_is_isomorphic(seed in any::<u64>()) {
        let e = configs_pes(&pes(&mut rng(seed), 6));
        let cp = canonical_pes(&e).unwrap();
        prop_assert!(are_isomorphic(&configs_pes(&cp.pes), &e));
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn bisimilarity_is_reflexive_symmetric_and_hhp_implies_hp(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e1 = structure(&mut r, 4);
        prop_assert!(decide_bisim(&e1, &e1, true).unwrap().is_some());
        let e2 = match quotient_of(&mut r, &e1) {
            Some((q, _)) if r.gen_bool(0.5) => q,
            _ => structure(&mut r, 4),
        };
        let hhp = decide_bisim(&e1, &e2, true).unwrap();
        prop_assert_eq!(hhp.is_some(), decide_bisim(&e2, &e1, true).unwrap().is_some());
        if let Some(rel) = hhp {
            prop_assert!(check_bisimulation(&e1, &e2, &rel).verdict());
            prop_assert!(decide_bisim(&e1, &e2, false).unwrap().is_some());
            let (er, p1, p2) = bisim_to_es(&e1, &e2, &rel).unwrap();
            prop_assert!(er.validate().is_valid());
            let eer = configs_pes(&er);
            prop_assert!(check_folding(&eer, &e1, &p1).unwrap().verdict());
            prop_assert!(check_folding(&eer, &e2, &p2).unwrap().verdict());
        }
    }

    #[test]
    fn folding_relations_are_hhp_bisimulations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = structure(&mut r, 5);
        if let Some((q, f)) = quotient_of(&mut r, &e) {
            if is_folding(&e, &q, &f) {
                let rel = folding_relation(&e, &q, &f).unwrap();
                prop_assert!(check_bisimulation(&e, &q, &rel).verdict());
            }
        }
    }

    #[test]
    fn join_maps_are_foldings(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = configs_pes(&pes(&mut r, 6));
        let (Some((d1, f1)), Some((d2, f2))) = (quotient_of(&mut r, &e), quotient_of(&mut r, &e)) else { return Ok(()) };
        if is_folding(&e, &d1, &f1) && is_folding(&e, &d2, &f2) {
            let j = join_foldings(&e, &d1, &f1, &d2, &f2).unwrap();
            prop_assert!(is_folding(&d1, &j.es, &j.g1));
            prop_assert!(is_folding(&d2, &j.es, &j.g2));
            prop_assert!(is_folding(&e, &j.es, &j.quotient_map));
            prop_assert!(recognize_pes(&j.es).is_some());
        }
    }

    #[test]
    fn folding_equivalences_form_a_lattice_whose_top_is_minimize(seed in any::<u64>()) {
        let p = pes(&mut rng(seed), 5);
        let accepted: Vec<EventPartition> = all_partitions(p.labels()).into_iter().filter(|q| check_folding_equivalence_pes(&p, q).verdict()).collect();
        for a in &accepted {
            for b in &accepted {
                prop_assert!(accepted.contains(&a.join(b)));
            }
        }
        let top = accepted.iter().fold(EventPartition::identity(p.n_events()), |acc, q| acc.join(q));
        let m = minimize(&Model::Pes(p.clone()), MinClass::Pes).unwrap();
        prop_assert_eq!(&m.solutions[0].partition, &top);
        prop_assert_eq!(m.accepted, accepted.len());
    }

    #[test]
    fn minimize_is_bisimilar_and_idempotent(seed in any::<u64>()) {
        let p = pes(&mut rng(seed), 5);
        let m = minimize(&Model::Pes(p.clone()), MinClass::Pes).unwrap();
        let q = &m.solutions[0].quotient;
        prop_assert!(decide_bisim(&configs_pes(&p), &q.embedding(false).unwrap(), true).unwrap().is_some());
        let again = minimize(q, MinClass::Pes).unwrap();
        prop_assert!(again.solutions[0].partition.is_identity());
    }
}

#[test]
fn minimize_p0_is_coarser_than_f01() {
    let p0 = esmin::fixtures::structure("p0").unwrap();
    let f01 = esmin::fixtures::map("f01").unwrap().2.partition();
    let top = &minimize(&p0, MinClass::Pes).unwrap().solutions[0].partition;
    assert!(f01.is_finer_than(top) && f01 != *top);
}
