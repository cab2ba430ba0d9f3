//! Independent oracles for cross-checking: everything here recomputes
//! results from definitions over explicit element or tuple sets, without
//! touching the stabilizer-chain, coloring-table, or backtracking code
//! paths it is used to check.
#![allow(dead_code)] // each test binary uses a different subset

use std::collections::{HashMap, HashSet, VecDeque};

use mclosure::{GeneratedGroup, Permutation};

/// All permutations of `0..n` in lexicographic order, as image arrays.
pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                rec(n, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

/// All m-tuples over `0..n` in lexicographic order.
pub fn all_tuples(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Orbit id of every m-tuple under the diagonal action, by plain BFS over
/// tuple vectors.
pub fn tuple_orbit_ids(g: &GeneratedGroup, m: usize) -> HashMap<Vec<usize>, usize> {
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut next = 0;
    for start in all_tuples(g.degree(), m) {
        if ids.contains_key(&start) {
            continue;
        }
        let id = next;
        next += 1;
        ids.insert(start.clone(), id);
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for gen in g.generators() {
                let image: Vec<usize> = t.iter().map(|&x| gen.image(x)).collect();
                if !ids.contains_key(&image) {
                    ids.insert(image.clone(), id);
                    queue.push_back(image);
                }
            }
        }
    }
    ids
}

/// The m-closure from the definition: filter the whole symmetric group by
/// tuple-orbit preservation.
pub fn naive_closure_elements(g: &GeneratedGroup, m: usize) -> Vec<Permutation> {
    let n = g.degree();
    let ids = tuple_orbit_ids(g, m);
    let tuples = all_tuples(n, m);
    all_perms(n)
        .into_iter()
        .filter(|images| {
            tuples.iter().all(|t| {
                let image: Vec<usize> = t.iter().map(|&x| images[x]).collect();
                ids[t] == ids[&image]
            })
        })
        .map(|images| Permutation::from_images(images).expect("filtered bijection"))
        .collect()
}

/// Sorted element list, for exact set comparisons.
pub fn sorted_elements(g: &GeneratedGroup, cap: usize) -> Vec<Permutation> {
    let mut elements = g.elements(cap).expect("under the element cap");
    elements.sort();
    elements
}

/// All partitions of `0..n` as canonical class-index vectors (restricted
/// growth strings).
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn rec(n: usize, i: usize, max: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(current.clone());
            return;
        }
        for c in 0..=max + 1 {
            current[i] = c;
            rec(n, i + 1, max.max(c), current, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    current[0] = 0;
    rec(n, 1, 0, &mut current, &mut out);
    out
}

/// Whether a partition (class-index vector) is invariant under every
/// generator: images of classes are classes.
pub fn is_invariant_partition(g: &GeneratedGroup, classes: &[usize]) -> bool {
    g.generators().iter().all(|gen| {
        let mut image_class: HashMap<usize, usize> = HashMap::new();
        (0..g.degree()).all(|x| {
            let from = classes[x];
            let to = classes[gen.image(x)];
            *image_class.entry(from).or_insert(to) == to
        })
    })
}

/// The meet (common refinement) of partitions given as class-index
/// vectors, canonicalized.
pub fn meet_partitions(n: usize, parts: &[&[usize]]) -> Vec<usize> {
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    (0..n)
        .map(|x| {
            let sig: Vec<usize> = parts.iter().map(|p| p[x]).collect();
            let next = ids.len();
            *ids.entry(sig).or_insert(next)
        })
        .collect()
}

/// Subgroup of `Sym(n)` generated by a set, as a sorted element list,
/// by plain product BFS.
pub fn generated_set(n: usize, gens: &[Permutation]) -> Vec<Permutation> {
    let mut seen: HashSet<Permutation> = HashSet::new();
    let identity = Permutation::identity(n);
    seen.insert(identity.clone());
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.compose(g).expect("equal degrees");
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<Permutation> = seen.into_iter().collect();
    out.sort();
    out
}

/// Minimal normal subgroups from the definition: inclusion-minimal among
/// the subgroups generated by full conjugacy classes.
pub fn minimal_normal_subgroups(g: &GeneratedGroup, cap: usize) -> Vec<Vec<Permutation>> {
    let n = g.degree();
    let elements = sorted_elements(g, cap);
    let mut candidates: Vec<Vec<Permutation>> = Vec::new();
    let mut seen: HashSet<Vec<Permutation>> = HashSet::new();
    for x in &elements {
        if x.is_identity() {
            continue;
        }
        let mut conjugates: Vec<Permutation> = elements
            .iter()
            .map(|e| x.conjugated_by(e).expect("equal degrees"))
            .collect();
        conjugates.sort();
        conjugates.dedup();
        let subgroup = generated_set(n, &conjugates);
        if seen.insert(subgroup.clone()) {
            candidates.push(subgroup);
        }
    }
    let is_subset = |a: &[Permutation], b: &[Permutation]| -> bool {
        let set: HashSet<&Permutation> = b.iter().collect();
        a.iter().all(|p| set.contains(p))
    };
    candidates
        .iter()
        .filter(|c| {
            !candidates
                .iter()
                .any(|d| d.len() < c.len() && is_subset(d, c))
        })
        .cloned()
        .collect()
}
