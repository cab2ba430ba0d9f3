//! Definition-based m-closures by pruned backtracking.
//!
//! [`brute_closure`] returns every permutation of the whole symmetric group
//! that fixes each orbit of m-tuples setwise, as a generated group.  It is
//! intentionally exponential and capped to small degrees; everything else
//! in the crate is tested against it.  [`relative_closure`] restricts the
//! same search to an explicit overgroup by walking its stabilizer chain.

use crate::chain::StabilizerChain;
use crate::coloring::TupleColoring;
use crate::group::GeneratedGroup;
use crate::perm::Permutation;
use crate::{Caps, Error, Result};

/// Keeps the first generator of each strict extension, dropping redundant
/// candidates.
pub(crate) fn reduce_generators<I>(degree: usize, candidates: I) -> Vec<Permutation>
where
    I: IntoIterator<Item = Permutation>,
{
    let mut chain = StabilizerChain::new(degree);
    let mut kept = Vec::new();
    for c in candidates {
        if !c.is_identity() && !chain.contains(&c) {
            chain.extend(c.clone());
            kept.push(c);
        }
    }
    kept
}

/// The m-closure of `g`: all permutations preserving the coloring of
/// m-tuples by `g`-orbits.  Sequential reference implementation.
pub fn brute_closure(g: &GeneratedGroup, m: usize, caps: &Caps) -> Result<GeneratedGroup> {
    let coloring = TupleColoring::build(g, m, caps)?;
    brute_closure_impl(g, m, caps, &coloring, false)
}

/// Parallel variant of [`brute_closure`]; identical output.
#[cfg(feature = "parallel")]
pub fn brute_closure_par(g: &GeneratedGroup, m: usize, caps: &Caps) -> Result<GeneratedGroup> {
    let coloring = TupleColoring::build_par(g, m, caps)?;
    brute_closure_impl(g, m, caps, &coloring, true)
}

fn brute_closure_impl(
    g: &GeneratedGroup,
    m: usize,
    caps: &Caps,
    coloring: &TupleColoring,
    parallel: bool,
) -> Result<GeneratedGroup> {
    let n = g.degree();
    if n > caps.oracle_degree(m) {
        return Err(Error::DegreeCapExceeded {
            degree: n as u128,
            cap: caps.oracle_degree(m),
        });
    }

    // Known subgroup of the closure; grows as elements are found.  Images
    // of point 0 are restricted to one representative per orbit of the
    // known subgroup: any element sending 0 into a covered orbit is a
    // product of an already-enumerated element and a known one.
    let mut chain = StabilizerChain::new(n);
    let mut gens: Vec<Permutation> = Vec::new();
    for gen in g.generators() {
        if !gen.is_identity() && !chain.contains(gen) {
            chain.extend(gen.clone());
            gens.push(gen.clone());
        }
    }

    let mut explored: Vec<usize> = Vec::new();
    for x in 0..n {
        if covered_points(n, &gens, &explored)[x] {
            continue;
        }
        let found = enumerate_subtree(coloring, x, parallel);
        explored.push(x);
        absorb(&mut chain, &mut gens, found, parallel);
    }
    GeneratedGroup::new(n, gens)
}

/// Extends the known subgroup with every found element outside it, in
/// order.  The parallel mode filters members out in batches between
/// extensions; the kept generator list is identical to the sequential one.
fn absorb(
    chain: &mut StabilizerChain,
    gens: &mut Vec<Permutation>,
    found: Vec<Permutation>,
    parallel: bool,
) {
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        // filter each chunk in parallel against the current chain, then
        // absorb the survivors in order; once the subgroup stops growing
        // whole chunks get rejected in parallel
        for chunk in found.chunks(512) {
            let survivors: Vec<&Permutation> =
                chunk.par_iter().filter(|p| !chain.contains(p)).collect();
            for p in survivors {
                if !chain.contains(p) {
                    chain.extend(p.clone());
                    gens.push(p.clone());
                }
            }
        }
        return;
    }
    let _ = parallel;
    for p in found {
        if !chain.contains(&p) {
            chain.extend(p.clone());
            gens.push(p);
        }
    }
}

/// Union of the orbits of `seeds` under the group generated by `gens`.
fn covered_points(n: usize, gens: &[Permutation], seeds: &[usize]) -> Vec<bool> {
    let mut covered = vec![false; n];
    let mut queue: Vec<usize> = Vec::new();
    for &s in seeds {
        if !covered[s] {
            covered[s] = true;
            queue.push(s);
        }
    }
    while let Some(x) = queue.pop() {
        for g in gens {
            let y = g.image(x);
            if !covered[y] {
                covered[y] = true;
                queue.push(y);
            }
        }
    }
    covered
}

/// All coloring-preserving permutations with `0 -> first_image`, by
/// point-image backtracking.  A branch dies as soon as any tuple that is
/// fully determined by the assigned points changes color.
fn enumerate_subtree(
    coloring: &TupleColoring,
    first_image: usize,
    parallel: bool,
) -> Vec<Permutation> {
    let n = coloring.degree();
    let mut img = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if !check_assignment(coloring, &img, 0, first_image) {
        return Vec::new();
    }
    img[0] = first_image;
    used[first_image] = true;
    if n == 1 {
        return vec![Permutation::from_images(img).expect("complete assignment")];
    }

    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..n)
            .into_par_iter()
            .map(|v| {
                if used[v] || !check_assignment(coloring, &img, 1, v) {
                    return Vec::new();
                }
                let mut img = img.clone();
                let mut used = used.clone();
                img[1] = v;
                used[v] = true;
                let mut out = Vec::new();
                dfs(coloring, 2, &mut img, &mut used, &mut out);
                out
            })
            .collect::<Vec<_>>()
            .concat();
    }
    let _ = parallel;

    let mut out = Vec::new();
    dfs(coloring, 1, &mut img, &mut used, &mut out);
    out
}

fn dfs(
    coloring: &TupleColoring,
    k: usize,
    img: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Permutation>,
) {
    let n = coloring.degree();
    if k == n {
        out.push(Permutation::from_images(img.clone()).expect("complete assignment"));
        return;
    }
    for v in 0..n {
        if used[v] || !check_assignment(coloring, img, k, v) {
            continue;
        }
        img[k] = v;
        used[v] = true;
        dfs(coloring, k + 1, img, used, out);
        img[k] = usize::MAX;
        used[v] = false;
    }
}

/// Checks every m-tuple with entries in `{0..k}` that mentions `k`, under
/// the partial map `img` extended by `k -> v`.
fn check_assignment(coloring: &TupleColoring, img: &[usize], k: usize, v: usize) -> bool {
    let n = coloring.degree();
    let m = coloring.arity();
    let radix = k + 1;
    let total = radix.pow(m as u32);
    let mut digits = vec![0usize; m];
    for t in 0..total {
        let mut rest = t;
        let mut mentions_k = false;
        for d in digits.iter_mut().rev() {
            *d = rest % radix;
            rest /= radix;
            mentions_k |= *d == k;
        }
        if !mentions_k {
            continue;
        }
        let mut code = 0usize;
        let mut image = 0usize;
        for &d in &digits {
            code = code * n + d;
            image = image * n + if d == k { v } else { img[d] };
        }
        if coloring.color_of_code(code) != coloring.color_of_code(image) {
            return false;
        }
    }
    true
}

/// The relative m-closure `G^(m) ∩ H`: the search runs over `H` only,
/// descending its stabilizer chain, with the same color pruning.
pub fn relative_closure(
    g: &GeneratedGroup,
    m: usize,
    h: &GeneratedGroup,
    caps: &Caps,
) -> Result<GeneratedGroup> {
    if g.degree() != h.degree() {
        return Err(Error::DegreeMismatch {
            left: g.degree(),
            right: h.degree(),
        });
    }
    let coloring = TupleColoring::build(g, m, caps)?;
    let n = g.degree();
    let chain = h.chain();
    let mut found = Vec::new();
    let mut pledged: Vec<(usize, usize)> = Vec::new();
    descend(chain, &coloring, 0, Permutation::identity(n), &mut pledged, &mut found);
    GeneratedGroup::new(n, reduce_generators(n, found))
}

/// Walks one chain level: every coset choice pins down the image of that
/// level's base point, which is checked against the coloring before
/// descending further.
fn descend(
    chain: &StabilizerChain,
    coloring: &TupleColoring,
    level: usize,
    acc: Permutation,
    pledged: &mut Vec<(usize, usize)>,
    found: &mut Vec<Permutation>,
) {
    if level == chain.depth() {
        if coloring.preserved_by(&acc) {
            found.push(acc);
        }
        return;
    }
    let base = chain.base_at(level);
    for x in chain.orbit_at(level) {
        let candidate = if x == base {
            acc.clone()
        } else {
            chain.rep_at(level, x).mul(&acc)
        };
        let image = candidate.image(base);
        if !check_pledged(coloring, pledged, base, image) {
            continue;
        }
        pledged.push((base, image));
        descend(chain, coloring, level + 1, candidate, pledged, found);
        pledged.pop();
    }
}

/// Checks every m-tuple over the pledged points that mentions the newest
/// one.
fn check_pledged(
    coloring: &TupleColoring,
    pledged: &[(usize, usize)],
    point: usize,
    image: usize,
) -> bool {
    let n = coloring.degree();
    let m = coloring.arity();
    let radix = pledged.len() + 1;
    let total = radix.pow(m as u32);
    let mut digits = vec![0usize; m];
    for t in 0..total {
        let mut rest = t;
        let mut mentions_new = false;
        for d in digits.iter_mut().rev() {
            *d = rest % radix;
            rest /= radix;
            mentions_new |= *d == radix - 1;
        }
        if !mentions_new {
            continue;
        }
        let mut code = 0usize;
        let mut icode = 0usize;
        for &d in &digits {
            let (p, i) = if d == radix - 1 {
                (point, image)
            } else {
                pledged[d]
            };
            code = code * n + p;
            icode = icode * n + i;
        }
        if coloring.color_of_code(code) != coloring.color_of_code(icode) {
            return false;
        }
    }
    true
}
