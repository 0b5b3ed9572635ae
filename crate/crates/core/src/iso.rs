//! Isomorphism of small event structures by exhaustive search.

use crate::folding::EventMap;
use crate::poset::EventStructure;

fn signature(es: &EventStructure, x: usize) -> (String, usize, usize) {
    let occurrences = es.family().iter().filter(|c| c.contains(x)).count();
    let minimal = es.family().iter().filter(|c| c.contains(x) && c.below(x).is_empty()).count();
    (es.label(x).as_str().to_string(), occurrences, minimal)
}

/// A label-preserving bijection mapping the family of `a` onto the family of `b`.
pub fn find_isomorphism(a: &EventStructure, b: &EventStructure) -> Option<EventMap> {
    let n = a.n_events();
    if n != b.n_events() || a.family().len() != b.family().len() {
        return None;
    }
    let sa: Vec<_> = (0..n).map(|x| signature(a, x)).collect();
    let sb: Vec<_> = (0..n).map(|y| signature(b, y)).collect();
    let mut ka = sa.clone();
    let mut kb = sb.clone();
    ka.sort();
    kb.sort();
    if ka != kb {
        return None;
    }
    // configurations grouped by their largest event, checked once it is assigned
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in a.family().iter().enumerate() {
        if let Some(last) = c.members().last() {
            closing[last].push(i);
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(k: usize, a: &EventStructure, b: &EventStructure, sa: &[(String, usize, usize)], sb: &[(String, usize, usize)], closing: &[Vec<usize>], map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if k == map.len() {
            return true;
        }
        for y in 0..map.len() {
            if used[y] || sa[k] != sb[y] {
                continue;
            }
            map[k] = y;
            used[y] = true;
            let ok = closing[k].iter().all(|&i| a.config(i).map(map).is_some_and(|img| b.find(&img).is_some()));
            if ok && go(k + 1, a, b, sa, sb, closing, map, used) {
                return true;
            }
            used[y] = false;
        }
        map[k] = usize::MAX;
        false
    }
    go(0, a, b, &sa, &sb, &closing, &mut map, &mut used).then(|| EventMap::new(map))
}

pub fn are_isomorphic(a: &EventStructure, b: &EventStructure) -> bool {
    find_isomorphism(a, b).is_some()
}
