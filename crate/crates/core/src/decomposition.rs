//! Embedding a group into a product of strictly smaller sections: direct
//! product for intransitive groups, imprimitive wreath for imprimitive
//! ones, and wreath with product action for primitive non-basic ones.
//!
//! The primitive case runs through the socle: an elementary abelian
//! regular socle turns the point set into a vector space and the search
//! looks for a minimal subspace whose orbit decomposes the space as a
//! direct sum; otherwise a maximal cartesian decomposition stabilized by
//! the socle is found by brute force over its block systems, and subsets
//! of it are tested for a homogeneous decomposition preserved by the whole
//! group.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;

use crate::blocks::{is_primitive, minimal_block_system, BlockSystem};
use crate::group::GeneratedGroup;
use crate::perm::Permutation;
use crate::products::{build_product, ProductOperator};
use crate::{Caps, Error, Result};

/// A set of partitions of the points such that picking one class from each
/// intersects in exactly one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartesianDecomposition {
    degree: usize,
    partitions: Vec<BlockSystem>,
}

impl CartesianDecomposition {
    pub fn new(degree: usize, partitions: Vec<BlockSystem>) -> Result<Self> {
        let d = CartesianDecomposition { degree, partitions };
        d.verify()?;
        Ok(d)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn partitions(&self) -> &[BlockSystem] {
        &self.partitions
    }

    /// Checks the defining invariant: at least two classes per partition
    /// and exactly one point in every choice of classes, verified through
    /// point signatures.
    pub fn verify(&self) -> Result<()> {
        let mut product = 1u128;
        for p in &self.partitions {
            if p.degree() != self.degree {
                return Err(Error::DegreeMismatch {
                    left: self.degree,
                    right: p.degree(),
                });
            }
            if p.class_count() < 2 && self.degree > 1 {
                return Err(Error::TrivialDecomposition);
            }
            product = product.saturating_mul(p.class_count() as u128);
        }
        if product != self.degree as u128 {
            return Err(Error::Inhomogeneous);
        }
        let mut signatures = HashSet::with_capacity(self.degree);
        for point in 0..self.degree {
            let sig: Vec<usize> = self.partitions.iter().map(|p| p.class_of(point)).collect();
            if !signatures.insert(sig) {
                return Err(Error::Inhomogeneous);
            }
        }
        Ok(())
    }

    /// All partitions have the same number of classes.
    pub fn is_homogeneous(&self) -> bool {
        let mut counts = self.partitions.iter().map(BlockSystem::class_count);
        match counts.next() {
            Some(first) => counts.all(|c| c == first),
            None => true,
        }
    }

    /// The trivial decomposition: a single partition into singletons.
    pub fn is_trivial(&self) -> bool {
        self.partitions.len() == 1 && self.partitions[0].class_count() == self.degree
    }
}

/// A bijection carrying the group into a product of smaller sections.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub operator: ProductOperator,
    /// Left factor, on its own relabeled points.
    pub k: GeneratedGroup,
    /// Right factor.
    pub l: GeneratedGroup,
    /// `f`: original points to flat product points.
    pub map: Permutation,
}

impl Embedding {
    /// The product group `K star L` on the flat points.
    pub fn product(&self, caps: &Caps) -> Result<GeneratedGroup> {
        build_product(self.operator, &self.k, &self.l, caps)
    }

    /// Checks `f^-1 * g * f` lies in `K star L` for every generator of `g`.
    pub fn holds_for(&self, g: &GeneratedGroup, caps: &Caps) -> Result<bool> {
        let product = self.product(caps)?;
        for gen in g.generators() {
            if !product.contains(&gen.conjugated_by(&self.map)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The socle (product of all minimal normal subgroups) with the data the
/// embedding search needs.
#[derive(Debug, Clone)]
pub struct Socle {
    pub group: GeneratedGroup,
    pub is_abelian: bool,
    /// Prime `p` when the socle is elementary abelian regular of order `p^k`.
    pub prime: Option<usize>,
    /// The exponent `k` in that case.
    pub rank: Option<usize>,
}

/// Splits an intransitive group along its first orbit: `Delta` is the
/// orbit of the least point, `Gamma` the rest, `f` the sort-by-orbit
/// relabeling.
pub fn intransitive_embedding(g: &GeneratedGroup) -> Result<Embedding> {
    if g.is_transitive() {
        return Err(Error::Transitive);
    }
    let n = g.degree();
    let delta = g.orbit(0)?;
    let in_delta: Vec<bool> = {
        let mut v = vec![false; n];
        for &p in &delta {
            v[p] = true;
        }
        v
    };
    let gamma: Vec<usize> = (0..n).filter(|&p| !in_delta[p]).collect();
    let k = g.restriction(&delta)?;
    let l = g.restriction(&gamma)?;
    let mut images = vec![0; n];
    for (i, &p) in delta.iter().enumerate() {
        images[p] = i;
    }
    for (i, &p) in gamma.iter().enumerate() {
        images[p] = delta.len() + i;
    }
    Ok(Embedding {
        operator: ProductOperator::Direct,
        k,
        l,
        map: Permutation::from_images(images)?,
    })
}

/// Splits a transitive imprimitive group along its first proper block
/// system: `K` is the block stabilizer acting on one block, `L` the action
/// on blocks, and blocks are identified with the first one through least
/// coset representatives.
pub fn imprimitive_embedding(g: &GeneratedGroup) -> Result<Embedding> {
    if !g.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let n = g.degree();
    let mut system = None;
    for b in 1..n {
        let s = minimal_block_system(g, (0, b))?;
        if !s.is_one_class() {
            system = Some(s);
            break;
        }
    }
    let Some(system) = system else {
        return Err(Error::Primitive);
    };

    let classes = system.classes().to_vec();
    let (l, _) = g.induced_action(&classes)?;

    // Schreier generators of the stabilizer of the block containing 0,
    // with a transversal mapping block 0 to block j.
    let (stab_gens, transversal) = action_stabilizer(g, classes.len(), |perm, class| {
        system.class_of(perm.image(classes[class][0]))
    });
    let stab = GeneratedGroup::new(n, stab_gens)?;
    let k = stab.restriction(&classes[0])?;

    // Identify each block with block 0 via the least element of its coset.
    let stab_chain = stab.chain();
    let reps: Vec<Permutation> = transversal
        .iter()
        .map(|t| stab_chain.min_coset_rep(t))
        .collect();

    let block_count = classes.len();
    let pos_in_first: HashMap<usize, usize> = classes[0]
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    let mut images = vec![0; n];
    for (j, class) in classes.iter().enumerate() {
        let rep_inv = reps[j].inverse();
        for &p in class {
            let delta = pos_in_first[&rep_inv.image(p)];
            images[p] = delta * block_count + j;
        }
    }
    Ok(Embedding {
        operator: ProductOperator::WreathImprimitive,
        k,
        l,
        map: Permutation::from_images(images)?,
    })
}

/// Orbit of `0` under an action of `g` given by `apply`, returning
/// Schreier generators of the stabilizer of `0` and a transversal `t_j`
/// with `0 -> j`.
fn action_stabilizer<F>(
    g: &GeneratedGroup,
    domain: usize,
    apply: F,
) -> (Vec<Permutation>, Vec<Permutation>)
where
    F: Fn(&Permutation, usize) -> usize,
{
    let identity = Permutation::identity(g.degree());
    let mut transversal: Vec<Option<Permutation>> = vec![None; domain];
    transversal[0] = Some(identity);
    let mut queue = VecDeque::from([0usize]);
    let mut order = vec![0usize];
    while let Some(x) = queue.pop_front() {
        for gen in g.generators() {
            let y = apply(gen, x);
            if transversal[y].is_none() {
                let t = transversal[x].as_ref().unwrap().mul(gen);
                transversal[y] = Some(t);
                queue.push_back(y);
                order.push(y);
            }
        }
    }
    let mut stab_gens = Vec::new();
    for &x in &order {
        for gen in g.generators() {
            let y = apply(gen, x);
            let s = transversal[x]
                .as_ref()
                .unwrap()
                .mul(gen)
                .mul(&transversal[y].as_ref().unwrap().inverse());
            if !s.is_identity() {
                stab_gens.push(s);
            }
        }
    }
    let transversal: Vec<Permutation> = transversal.into_iter().map(Option::unwrap).collect();
    (stab_gens, transversal)
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_power(n: usize) -> Option<(usize, usize)> {
    for p in 2..=n {
        if !is_prime(p) || !n.is_multiple_of(p) {
            continue;
        }
        let mut m = n;
        let mut k = 0;
        while m.is_multiple_of(p) {
            m /= p;
            k += 1;
        }
        return (m == 1).then_some((p, k));
    }
    None
}

/// The socle of a primitive group, as the product of its minimal normal
/// subgroups.  Minimal normals are the inclusion-minimal normal closures
/// of prime-order elements; the group must be small enough to enumerate.
pub fn socle(g: &GeneratedGroup, caps: &Caps) -> Result<Socle> {
    if !is_primitive(g) {
        return Err(Error::NotPrimitive);
    }
    let elements = g.elements(caps.element_enumeration)?;

    // One representative per cyclic subgroup of prime order.
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut reps: Vec<Permutation> = Vec::new();
    for e in &elements {
        let order = e.element_order();
        if !is_prime(order) {
            continue;
        }
        let canonical = (1..order)
            .map(|j| e.pow(j))
            .min()
            .expect("prime order is at least 2");
        if seen.insert(canonical.clone()) {
            reps.push(canonical);
        }
    }

    let mut candidates: Vec<GeneratedGroup> = Vec::new();
    for rep in &reps {
        let closure = g.normal_closure(std::slice::from_ref(rep))?;
        if !candidates.iter().any(|c| {
            c.order() == closure.order() && c.contains_group(&closure).unwrap_or(false)
        }) {
            candidates.push(closure);
        }
    }

    let mut minimal: Vec<&GeneratedGroup> = Vec::new();
    'outer: for c in &candidates {
        for d in &candidates {
            if d.order() < c.order() && c.contains_group(d)? {
                continue 'outer;
            }
        }
        minimal.push(c);
    }

    let mut gens = Vec::new();
    for m in &minimal {
        gens.extend(m.generators().iter().cloned());
    }
    let group = GeneratedGroup::new(g.degree(), crate::closure::reduce_generators(g.degree(), gens))?;
    let is_abelian = group.is_abelian();

    let mut prime = None;
    let mut rank = None;
    if is_abelian && group.is_regular() {
        if let Some((p, k)) = prime_power(g.degree()) {
            let elementary = group
                .generators()
                .iter()
                .all(|gen| gen.pow(p).is_identity());
            if elementary {
                prime = Some(p);
                rank = Some(k);
            }
        }
    }
    Ok(Socle {
        group,
        is_abelian,
        prime,
        rank,
    })
}

/// Coordinates on the point set induced by an elementary abelian regular
/// group: the point `0` is the zero vector and each point corresponds to
/// the unique group element carrying `0` to it.
struct VectorSpace {
    p: usize,
    k: usize,
    coords: Vec<Vec<u8>>,
    point_of: Vec<usize>,
}

impl VectorSpace {
    fn build(s: &GeneratedGroup, p: usize, k: usize) -> Result<Self> {
        let n = s.degree();
        let mut basis: Vec<Permutation> = Vec::new();
        let mut span = vec![false; n];
        span[0] = true;
        let mut span_pts = vec![0usize];
        for gen in s.generators() {
            if span[gen.image(0)] {
                continue;
            }
            let mut power = gen.clone();
            let mut new_pts = Vec::new();
            for _ in 1..p {
                for &q in &span_pts {
                    let t = power.image(q);
                    if !span[t] {
                        span[t] = true;
                        new_pts.push(t);
                    }
                }
                power = power.mul(gen);
            }
            span_pts.extend(new_pts);
            basis.push(gen.clone());
        }
        if basis.len() != k || span_pts.len() != n {
            return Err(Error::SocleNotAbelianRegular);
        }

        let mut coords = vec![Vec::new(); n];
        let mut point_of = vec![usize::MAX; n];
        for (code, slot) in point_of.iter_mut().enumerate() {
            let digits = Self::digits_of(code, p, k);
            let mut element = Permutation::identity(n);
            for (i, &d) in digits.iter().enumerate() {
                element = element.mul(&basis[i].pow(d as usize));
            }
            let pt = element.image(0);
            if !coords[pt].is_empty() && code != 0 {
                return Err(Error::SocleNotAbelianRegular);
            }
            coords[pt] = digits;
            *slot = pt;
        }
        Ok(VectorSpace {
            p,
            k,
            coords,
            point_of,
        })
    }

    fn digits_of(code: usize, p: usize, k: usize) -> Vec<u8> {
        let mut digits = vec![0u8; k];
        let mut rest = code;
        for d in digits.iter_mut().rev() {
            *d = (rest % p) as u8;
            rest /= p;
        }
        digits
    }

    fn code_of_digits(&self, digits: &[u8]) -> usize {
        digits
            .iter()
            .fold(0usize, |acc, &d| acc * self.p + d as usize)
    }

    fn add(&self, a: usize, b: usize) -> usize {
        let digits: Vec<u8> = self.coords[a]
            .iter()
            .zip(&self.coords[b])
            .map(|(&x, &y)| ((x as usize + y as usize) % self.p) as u8)
            .collect();
        self.point_of[self.code_of_digits(&digits)]
    }

    /// Subgroup closure of a point set under vector addition.
    fn span_points(&self, seeds: &[usize]) -> Vec<usize> {
        let n = self.point_of.len();
        let mut inside = vec![false; n];
        inside[0] = true;
        let mut pts = vec![0usize];
        for &s in seeds {
            if inside[s] {
                continue;
            }
            let current = pts.clone();
            // add all multiples of s to every current point
            let mut shift = s;
            for _ in 1..self.p {
                for &q in &current {
                    let t = self.add(q, shift);
                    if !inside[t] {
                        inside[t] = true;
                        pts.push(t);
                    }
                }
                shift = self.add(shift, s);
            }
        }
        pts.sort_unstable();
        pts
    }
}

fn combinations(k: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(d);
    fn rec(k: usize, d: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == d {
            out.push(current.clone());
            return;
        }
        for c in start..k {
            current.push(c);
            rec(k, d, c + 1, current, out);
            current.pop();
        }
    }
    rec(k, d, 0, &mut current, &mut out);
    out
}

/// A minimal subspace whose orbit under the point stabilizer decomposes
/// the space as a direct sum.  Returns the subspace's point set and a
/// success flag; failure means only the whole space works, so no
/// product-action embedding exists along this route.
///
/// Subspaces are tried in dimension-ascending, reduced-row-echelon order,
/// so the returned subspace is canonical.
pub fn block_subspace(
    g: &GeneratedGroup,
    socle: &Socle,
    caps: &Caps,
) -> Result<(Vec<usize>, bool)> {
    let n = g.degree();
    let (Some(p), Some(k)) = (socle.prime, socle.rank) else {
        return Err(Error::SocleNotAbelianRegular);
    };
    if !socle.is_abelian || !socle.group.is_regular() || socle.group.degree() != n {
        return Err(Error::SocleNotAbelianRegular);
    }
    let vs = VectorSpace::build(&socle.group, p, k)?;
    let g0 = g.point_stabilizer(0)?;

    let mut nodes = 0usize;
    for d in 1..k {
        if k % d != 0 {
            continue;
        }
        for pivots in combinations(k, d) {
            // free positions: after each pivot, skipping pivot columns
            let mut free: Vec<(usize, usize)> = Vec::new();
            for (i, &c) in pivots.iter().enumerate() {
                for col in c + 1..k {
                    if !pivots.contains(&col) {
                        free.push((i, col));
                    }
                }
            }
            let assignments = (p as u128).pow(free.len() as u32);
            for a in 0..assignments {
                nodes += 1;
                if nodes > caps.search_nodes {
                    return Err(Error::SearchCapExceeded {
                        cap: caps.search_nodes,
                    });
                }
                let mut rows = vec![vec![0u8; k]; d];
                for (i, &c) in pivots.iter().enumerate() {
                    rows[i][c] = 1;
                }
                let mut rest = a;
                for &(i, col) in &free {
                    rows[i][col] = (rest % p as u128) as u8;
                    rest /= p as u128;
                }
                let pts = subspace_points(&vs, &rows);
                if direct_sum_orbit(&vs, &g0, &pts, d).is_some() {
                    return Ok((pts, true));
                }
            }
        }
    }
    Ok(((0..n).collect(), false))
}

/// All GF(p)-combinations of the row vectors, as points.
fn subspace_points(vs: &VectorSpace, rows: &[Vec<u8>]) -> Vec<usize> {
    let d = rows.len();
    let total = (vs.p as u128).pow(d as u32) as usize;
    let mut pts = Vec::with_capacity(total);
    for combo in 0..total {
        let coeffs = VectorSpace::digits_of(combo, vs.p, d);
        let mut digits = vec![0u8; vs.k];
        for (i, &c) in coeffs.iter().enumerate() {
            for (slot, &r) in digits.iter_mut().zip(&rows[i]) {
                *slot = ((*slot as usize + c as usize * r as usize) % vs.p) as u8;
            }
        }
        pts.push(vs.point_of[vs.code_of_digits(&digits)]);
    }
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// If the orbit of `delta` under the point stabilizer is a direct-sum
/// decomposition of the space, returns the orbit (sorted).
fn direct_sum_orbit(
    vs: &VectorSpace,
    g0: &GeneratedGroup,
    delta: &[usize],
    dim: usize,
) -> Option<Vec<Vec<usize>>> {
    let n = vs.point_of.len();
    let mut orbit: Vec<Vec<usize>> = vec![delta.to_vec()];
    let mut seen: HashSet<Vec<usize>> = HashSet::from([delta.to_vec()]);
    let mut i = 0;
    while i < orbit.len() {
        for gen in g0.generators() {
            let mut image: Vec<usize> = orbit[i].iter().map(|&q| gen.image(q)).collect();
            image.sort_unstable();
            if seen.insert(image.clone()) {
                orbit.push(image);
            }
        }
        i += 1;
    }
    orbit.sort();
    let r = orbit.len();
    if r * dim != vs.k {
        return None;
    }
    // incremental direct-sum check: each summand multiplies the span size
    let mut span = vec![0usize];
    for w in &orbit {
        let mut next = Vec::with_capacity(span.len() * w.len());
        let mut inside = vec![false; n];
        for &a in &span {
            for &b in w {
                let s = vs.add(a, b);
                if inside[s] {
                    return None;
                }
                inside[s] = true;
                next.push(s);
            }
        }
        if next.len() != span.len() * w.len() {
            return None;
        }
        span = next;
    }
    (span.len() == n).then_some(orbit)
}

/// The cartesian decomposition induced by a successful block subspace:
/// one partition per orbit member, whose classes are the cosets of the
/// complementary direct summands.
pub fn subspace_decomposition(
    g: &GeneratedGroup,
    socle: &Socle,
    delta: &[usize],
) -> Result<CartesianDecomposition> {
    let n = g.degree();
    let (Some(p), Some(k)) = (socle.prime, socle.rank) else {
        return Err(Error::SocleNotAbelianRegular);
    };
    let vs = VectorSpace::build(&socle.group, p, k)?;
    let g0 = g.point_stabilizer(0)?;
    let dim = delta.len().ilog(p) as usize;
    let orbit = direct_sum_orbit(&vs, &g0, delta, dim).ok_or(Error::SocleNotAbelianRegular)?;

    let mut partitions = Vec::with_capacity(orbit.len());
    for i in 0..orbit.len() {
        let mut others = Vec::new();
        for (j, w) in orbit.iter().enumerate() {
            if j != i {
                others.extend(w.iter().copied());
            }
        }
        let complement = vs.span_points(&others);
        let mut raw = vec![usize::MAX; n];
        for x in 0..n {
            if raw[x] != usize::MAX {
                continue;
            }
            let coset: Vec<usize> = complement.iter().map(|&u| vs.add(x, u)).collect();
            let rep = *coset.iter().min().unwrap();
            for q in coset {
                raw[q] = rep;
            }
        }
        partitions.push(BlockSystem::from_class_index(&raw));
    }
    CartesianDecomposition::new(n, partitions)
}

/// Image of a partition under a permutation.
fn partition_image(partition: &BlockSystem, g: &Permutation) -> BlockSystem {
    let ginv = g.inverse();
    let raw: Vec<usize> = (0..partition.degree())
        .map(|x| partition.class_of(ginv.image(x)))
        .collect();
    BlockSystem::from_class_index(&raw)
}

/// Finds a maximal nontrivial cartesian decomposition each of whose
/// partitions is a block system of the (transitive) group, by enumerating
/// all block systems and searching subsets with the grid property.  Among
/// maximal ones the lexicographically least is returned.
pub fn stabilized_decomposition(
    s: &GeneratedGroup,
    caps: &Caps,
) -> Result<Option<CartesianDecomposition>> {
    if !s.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let n = s.degree();
    if n < 4 {
        return Ok(None);
    }

    // every block system is a join of seed-minimal ones
    let mut systems: Vec<BlockSystem> = Vec::new();
    let mut keys: HashSet<Vec<usize>> = HashSet::new();
    let mut push = |sys: BlockSystem, systems: &mut Vec<BlockSystem>| -> Result<()> {
        if sys.class_count() > 1
            && sys.class_count() < n
            && keys.insert(sys.class_index().to_vec())
        {
            systems.push(sys);
            if systems.len() > caps.block_systems {
                return Err(Error::SearchCapExceeded {
                    cap: caps.block_systems,
                });
            }
        }
        Ok(())
    };
    for b in 1..n {
        push(minimal_block_system(s, (0, b))?, &mut systems)?;
    }
    let mut i = 0;
    while i < systems.len() {
        for j in 0..i {
            push(join_systems(&systems[i], &systems[j]), &mut systems)?;
        }
        i += 1;
    }
    systems.sort_by(|a, b| a.class_index().cmp(b.class_index()));

    let mut search = SubsetSearch {
        n,
        candidates: &systems,
        cap: caps.search_nodes,
        nodes: 0,
        best: None,
    };
    search.run(0, &mut Vec::new(), vec![0; n], 1)?;
    match search.best {
        Some(indices) => {
            let partitions = indices.iter().map(|&i| systems[i].clone()).collect();
            Ok(Some(CartesianDecomposition::new(n, partitions)?))
        }
        None => Ok(None),
    }
}

/// Finest common coarsening of two partitions.
fn join_systems(a: &BlockSystem, b: &BlockSystem) -> BlockSystem {
    let n = a.degree();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for sys in [a, b] {
        for class in sys.classes() {
            let first = class[0];
            for &p in &class[1..] {
                let (ra, rb) = (find(&mut parent, first), find(&mut parent, p));
                if ra != rb {
                    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let raw: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    BlockSystem::from_class_index(&raw)
}

struct SubsetSearch<'a> {
    n: usize,
    candidates: &'a [BlockSystem],
    cap: usize,
    nodes: usize,
    best: Option<Vec<usize>>,
}

impl SubsetSearch<'_> {
    /// Depth-first over index-ascending subsets; a partial subset survives
    /// only while all meet classes have the exact expected size, which is
    /// necessary for any cartesian extension.
    fn run(
        &mut self,
        start: usize,
        chosen: &mut Vec<usize>,
        sig: Vec<usize>,
        product: usize,
    ) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::SearchCapExceeded { cap: self.cap });
        }
        if product == self.n {
            let better = match &self.best {
                Some(best) => chosen.len() > best.len(),
                None => true,
            };
            if better {
                self.best = Some(chosen.clone());
            }
            return Ok(());
        }
        for i in start..self.candidates.len() {
            let part = &self.candidates[i];
            let target = product * part.class_count();
            if target > self.n || !self.n.is_multiple_of(target) {
                continue;
            }
            if let Some(refined) = refine_signature(&sig, part, target, self.n) {
                chosen.push(i);
                self.run(i + 1, chosen, refined, target)?;
                chosen.pop();
            }
        }
        Ok(())
    }
}

/// Meet of the running signature with one more partition; `None` unless
/// exactly `target` classes appear, all of size `n / target`.
fn refine_signature(
    sig: &[usize],
    part: &BlockSystem,
    target: usize,
    n: usize,
) -> Option<Vec<usize>> {
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut refined = vec![0; n];
    for x in 0..n {
        let key = (sig[x], part.class_of(x));
        let next = ids.len();
        let id = *ids.entry(key).or_insert(next);
        if id == counts.len() {
            counts.push(0);
        }
        counts[id] += 1;
        refined[x] = id;
    }
    let expected = n / target;
    (counts.len() == target && counts.iter().all(|&c| c == expected)).then_some(refined)
}

/// Searches subsets `Q` of the decomposition whose orbit under the group
/// is a homogeneous partition of it; returns the decomposition of
/// classwise meets for the first working subset (size-ascending), which
/// is then a nontrivial homogeneous decomposition preserved by the group.
pub fn preserved_homogeneous(
    g: &GeneratedGroup,
    p: &CartesianDecomposition,
) -> Result<Option<CartesianDecomposition>> {
    let parts = p.partitions();
    let k = parts.len();
    if k == 0 || k > 63 {
        return Ok(None);
    }
    let mut index: HashMap<&[usize], usize> = HashMap::new();
    for (i, part) in parts.iter().enumerate() {
        index.insert(part.class_index(), i);
    }
    // the group must permute the partitions at all
    let mut sigmas: Vec<Vec<usize>> = Vec::new();
    for gen in g.generators() {
        let mut sigma = Vec::with_capacity(k);
        for part in parts {
            let image = partition_image(part, gen);
            match index.get(image.class_index()) {
                Some(&j) => sigma.push(j),
                None => return Ok(None),
            }
        }
        sigmas.push(sigma);
    }

    let mut masks: Vec<u64> = (1..(1u64 << k) - 1).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let full = (1u64 << k) - 1;
    'subsets: for q in masks {
        // orbit of the subset under the index action
        let mut orbit = vec![q];
        let mut seen: HashSet<u64> = HashSet::from([q]);
        let mut i = 0;
        while i < orbit.len() {
            for sigma in &sigmas {
                let mut image = 0u64;
                for (b, &target) in sigma.iter().enumerate() {
                    if orbit[i] >> b & 1 == 1 {
                        image |= 1 << target;
                    }
                }
                if seen.insert(image) {
                    orbit.push(image);
                }
            }
            i += 1;
        }
        if orbit.len() < 2 {
            continue;
        }
        // the orbit must partition the index set into equal-size classes
        let mut union = 0u64;
        for &m in &orbit {
            if union & m != 0 || m.count_ones() != q.count_ones() {
                continue 'subsets;
            }
            union |= m;
        }
        if union != full {
            continue;
        }
        orbit.sort_unstable();
        let mut partitions = Vec::with_capacity(orbit.len());
        for &mask in &orbit {
            partitions.push(meet_of(parts, mask));
        }
        let candidate = CartesianDecomposition {
            degree: p.degree(),
            partitions,
        };
        if candidate.verify().is_ok() && candidate.is_homogeneous() && !candidate.is_trivial() {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// Common refinement of the partitions selected by `mask`.
fn meet_of(parts: &[BlockSystem], mask: u64) -> BlockSystem {
    let n = parts[0].degree();
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let raw: Vec<usize> = (0..n)
        .map(|x| {
            let sig: Vec<usize> = (0..parts.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| parts[b].class_of(x))
                .collect();
            let next = ids.len();
            *ids.entry(sig).or_insert(next)
        })
        .collect();
    BlockSystem::from_class_index(&raw)
}

/// Embedding into a wreath product with product action from a nontrivial
/// homogeneous preserved decomposition: `L` is the action on partitions,
/// `K` the action of the first partition's stabilizer on its classes, and
/// each partition is identified with the first through the least element
/// of the coset carrying one to the other.
pub fn product_embedding(
    g: &GeneratedGroup,
    q: &CartesianDecomposition,
) -> Result<Embedding> {
    q.verify()?;
    if q.is_trivial() {
        return Err(Error::TrivialDecomposition);
    }
    if !q.is_homogeneous() {
        return Err(Error::Inhomogeneous);
    }
    let parts = q.partitions();
    let k = parts.len();
    let n = g.degree();

    let mut index: HashMap<&[usize], usize> = HashMap::new();
    for (i, part) in parts.iter().enumerate() {
        index.insert(part.class_index(), i);
    }
    let mut sigma_gens = Vec::with_capacity(g.generators().len());
    for gen in g.generators() {
        let mut sigma = Vec::with_capacity(k);
        for part in parts {
            let image = partition_image(part, gen);
            match index.get(image.class_index()) {
                Some(&j) => sigma.push(j),
                None => return Err(Error::NotPreserved),
            }
        }
        sigma_gens.push(Permutation::from_images(sigma).map_err(|_| Error::NotPreserved)?);
    }
    let l = GeneratedGroup::new(k, sigma_gens.clone())?;

    // stabilizer of the first partition, with a transversal
    let (stab_gens, transversal) = action_stabilizer(g, k, |perm, i| {
        let image = partition_image(&parts[i], perm);
        index[image.class_index()]
    });
    let stab = GeneratedGroup::new(n, stab_gens)?;
    let kgrp = stab.restricted_to_classes(&parts[0])?;

    let stab_chain = stab.chain();
    let reps: Vec<Permutation> = transversal
        .iter()
        .map(|t| stab_chain.min_coset_rep(t))
        .collect();

    // delta index of each class of each partition, through the identification
    let delta_size = parts[0].class_count();
    let mut delta_index: Vec<Vec<usize>> = Vec::with_capacity(k);
    for (i, part) in parts.iter().enumerate() {
        let rep_inv = reps[i].inverse();
        let mut table = vec![0usize; part.class_count()];
        for (c, class) in part.classes().iter().enumerate() {
            let back = parts[0].class_of(rep_inv.image(class[0]));
            if class
                .iter()
                .any(|&pt| parts[0].class_of(rep_inv.image(pt)) != back)
            {
                return Err(Error::NotPreserved);
            }
            table[c] = back;
        }
        delta_index.push(table);
    }

    let mut images = vec![0usize; n];
    for (point, image) in images.iter_mut().enumerate() {
        let mut flat = 0usize;
        for (i, part) in parts.iter().enumerate() {
            flat = flat * delta_size + delta_index[i][part.class_of(point)];
        }
        *image = flat;
    }
    Ok(Embedding {
        operator: ProductOperator::WreathProduct,
        k: kgrp,
        l,
        map: Permutation::from_images(images)?,
    })
}

impl GeneratedGroup {
    /// Action on the classes of a partition, in canonical class order.
    fn restricted_to_classes(&self, partition: &BlockSystem) -> Result<GeneratedGroup> {
        let (action, _) = self.induced_action(partition.classes())?;
        Ok(action)
    }
}

/// Solves the embedding problem: direct for intransitive, wreath for
/// imprimitive, product action via the socle for primitive groups.
/// `None` means primitive basic: no embedding into smaller sections.
pub fn solve_embedding(g: &GeneratedGroup, caps: &Caps) -> Result<Option<Embedding>> {
    let n = g.degree();
    if n <= 1 {
        return Ok(None);
    }
    if !g.is_transitive() {
        return Ok(Some(intransitive_embedding(g)?));
    }
    match imprimitive_embedding(g) {
        Ok(embedding) => return Ok(Some(embedding)),
        Err(Error::Primitive) => {}
        Err(e) => return Err(e),
    }

    let soc = socle(g, caps)?;
    if soc.is_abelian && soc.prime.is_some() {
        let (delta, success) = block_subspace(g, &soc, caps)?;
        if success {
            let decomposition = subspace_decomposition(g, &soc, &delta)?;
            return Ok(Some(product_embedding(g, &decomposition)?));
        }
        // an elementary abelian regular socle with no proper summand
        // admits no product-action embedding; fall through defensively
    }
    if let Some(p) = stabilized_decomposition(&soc.group, caps)? {
        if let Some(q) = preserved_homogeneous(g, &p)? {
            return Ok(Some(product_embedding(g, &q)?));
        }
    }
    Ok(None)
}

/// Orders `|K| * |L|`, `|K|^|Gamma| * |L|`, `|K|^|Gamma| * |L|` for the
/// three operators; used by tests and the trace checks.
pub fn product_order(op: ProductOperator, k: &GeneratedGroup, l: &GeneratedGroup) -> BigUint {
    let (ko, lo) = (k.order(), l.order());
    match op {
        ProductOperator::Direct => ko * lo,
        ProductOperator::WreathImprimitive | ProductOperator::WreathProduct => {
            ko.pow(l.degree() as u32) * lo
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn intransitive_split() {
        let g = GeneratedGroup::new(
            5,
            vec![Permutation::from_cycles(5, &[vec![0, 1], vec![2, 3, 4]]).unwrap()],
        )
        .unwrap();
        let e = intransitive_embedding(&g).unwrap();
        assert_eq!(e.operator, ProductOperator::Direct);
        assert_eq!(e.k.degree(), 2);
        assert_eq!(e.l.degree(), 3);
        assert_eq!(e.k.order(), 2u32.into());
        assert_eq!(e.l.order(), 3u32.into());
        assert!(e.holds_for(&g, &caps()).unwrap());
    }

    #[test]
    fn intransitive_split_two_transpositions() {
        let g = GeneratedGroup::new(
            4,
            vec![
                Permutation::from_cycles(4, &[vec![0, 1]]).unwrap(),
                Permutation::from_cycles(4, &[vec![2, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let e = intransitive_embedding(&g).unwrap();
        assert_eq!(e.k.order(), 2u32.into());
        assert_eq!(e.l.order(), 2u32.into());
        assert!(e.holds_for(&g, &caps()).unwrap());
    }

    #[test]
    fn intransitive_embedding_rejects_transitive() {
        let c4 = corpus::cyclic(4);
        assert_eq!(intransitive_embedding(&c4).unwrap_err(), Error::Transitive);
    }

    #[test]
    fn imprimitive_split_of_c4() {
        let c4 = corpus::cyclic(4);
        let e = imprimitive_embedding(&c4).unwrap();
        assert_eq!(e.operator, ProductOperator::WreathImprimitive);
        assert_eq!(e.k.degree(), 2);
        assert_eq!(e.l.degree(), 2);
        assert!(e.holds_for(&c4, &caps()).unwrap());
    }

    #[test]
    fn imprimitive_split_of_wreath_recovers_factors() {
        let w = crate::products::wreath_imprimitive(&corpus::cyclic(2), &corpus::cyclic(2));
        let e = imprimitive_embedding(&w).unwrap();
        assert_eq!(e.k.order(), 2u32.into());
        assert_eq!(e.l.order(), 2u32.into());
        assert!(e.holds_for(&w, &caps()).unwrap());
    }

    #[test]
    fn imprimitive_embedding_rejects_primitive() {
        let s4 = corpus::symmetric(4);
        assert_eq!(imprimitive_embedding(&s4).unwrap_err(), Error::Primitive);
    }

    #[test]
    fn socle_of_s4_is_v4() {
        let soc = socle(&corpus::symmetric(4), &caps()).unwrap();
        assert_eq!(soc.group.order(), 4u32.into());
        assert!(soc.is_abelian);
        assert_eq!(soc.prime, Some(2));
        assert_eq!(soc.rank, Some(2));
    }

    #[test]
    fn socle_of_agl15_is_c5() {
        let soc = socle(&corpus::agl1(5), &caps()).unwrap();
        assert_eq!(soc.group.order(), 5u32.into());
        assert!(soc.is_abelian);
        assert_eq!(soc.prime, Some(5));
        assert_eq!(soc.rank, Some(1));
    }

    #[test]
    fn socle_of_s3_up_s2_is_e9() {
        let w = corpus::s3_up_s2();
        let soc = socle(&w, &caps()).unwrap();
        assert_eq!(soc.group.order(), 9u32.into());
        assert!(soc.is_abelian);
        assert!(soc.group.is_regular());
        assert_eq!(soc.prime, Some(3));
        assert_eq!(soc.rank, Some(2));
    }

    #[test]
    fn block_subspace_of_s3_up_s2() {
        let w = corpus::s3_up_s2();
        let soc = socle(&w, &caps()).unwrap();
        let (delta, success) = block_subspace(&w, &soc, &caps()).unwrap();
        assert!(success);
        assert_eq!(delta.len(), 3);
    }

    #[test]
    fn block_subspace_fails_for_prime_degree() {
        let g = corpus::agl1(5);
        let soc = socle(&g, &caps()).unwrap();
        let (delta, success) = block_subspace(&g, &soc, &caps()).unwrap();
        assert!(!success);
        assert_eq!(delta.len(), 5);
    }

    #[test]
    fn block_subspace_fails_for_agl23() {
        let g = corpus::agl2_3();
        let soc = socle(&g, &caps()).unwrap();
        assert_eq!(soc.prime, Some(3));
        assert_eq!(soc.rank, Some(2));
        let (_, success) = block_subspace(&g, &soc, &caps()).unwrap();
        assert!(!success);
    }

    #[test]
    fn stabilized_decomposition_of_e9_is_the_grid() {
        let e9 = corpus::elementary_abelian_regular(3, 2);
        let d = stabilized_decomposition(&e9, &caps()).unwrap().unwrap();
        assert_eq!(d.partitions().len(), 2);
        let rows: Vec<Vec<usize>> = vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]];
        let cols: Vec<Vec<usize>> = vec![vec![0, 3, 6], vec![1, 4, 7], vec![2, 5, 8]];
        assert_eq!(d.partitions()[0].classes(), &rows[..]);
        assert_eq!(d.partitions()[1].classes(), &cols[..]);
    }

    #[test]
    fn stabilized_decomposition_of_prime_degree_is_none() {
        let c5 = corpus::cyclic(5);
        assert!(stabilized_decomposition(&c5, &caps()).unwrap().is_none());
    }

    #[test]
    fn stabilized_decomposition_of_simple_regular_prime_is_none() {
        let c7 = corpus::cyclic(7);
        assert!(stabilized_decomposition(&c7, &caps()).unwrap().is_none());
    }

    #[test]
    fn preserved_homogeneous_on_the_grid() {
        let w = corpus::s3_up_s2();
        let soc = socle(&w, &caps()).unwrap();
        let p = stabilized_decomposition(&soc.group, &caps()).unwrap().unwrap();
        let q = preserved_homogeneous(&w, &p).unwrap().unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn preserved_homogeneous_on_single_partition_is_none() {
        let w = corpus::s3_up_s2();
        let single = CartesianDecomposition {
            degree: 9,
            partitions: vec![BlockSystem::from_class_index(&[0, 1, 2, 3, 4, 5, 6, 7, 8])],
        };
        assert!(preserved_homogeneous(&w, &single).unwrap().is_none());
    }

    #[test]
    fn product_embedding_of_grid_dihedral() {
        let d4 = GeneratedGroup::new(
            4,
            vec![
                Permutation::from_cycles(4, &[vec![0, 1, 3, 2]]).unwrap(),
                Permutation::from_cycles(4, &[vec![1, 2]]).unwrap(),
            ],
        )
        .unwrap();
        let rows = BlockSystem::from_class_index(&[0, 0, 1, 1]);
        let cols = BlockSystem::from_class_index(&[0, 1, 0, 1]);
        let q = CartesianDecomposition::new(4, vec![rows, cols]).unwrap();
        let e = product_embedding(&d4, &q).unwrap();
        assert_eq!(e.k.order(), 2u32.into());
        assert_eq!(e.l.order(), 2u32.into());
        let product = e.product(&caps()).unwrap();
        let conjugated = d4.conjugated(&e.map).unwrap();
        assert!(product.group_eq(&conjugated).unwrap());
        assert_eq!(product.order(), 8u32.into());
    }

    #[test]
    fn product_embedding_recovers_standard_factors() {
        let w = corpus::s3_up_s2();
        let q = crate::products::standard_decomposition(
            &corpus::symmetric(3),
            &corpus::symmetric(2),
            &caps(),
        )
        .unwrap();
        let e = product_embedding(&w, &q).unwrap();
        assert!(e.k.group_eq(&corpus::symmetric(3)).unwrap());
        assert!(e.l.group_eq(&corpus::symmetric(2)).unwrap());
        assert!(e.holds_for(&w, &caps()).unwrap());
    }

    #[test]
    fn stabilized_decomposition_partitions_are_invariant() {
        let e9 = corpus::elementary_abelian_regular(3, 2);
        let d = stabilized_decomposition(&e9, &caps()).unwrap().unwrap();
        for part in d.partitions() {
            for gen in e9.generators() {
                let image = partition_image(part, gen);
                assert_eq!(image.class_index(), part.class_index());
            }
        }
    }

    #[test]
    fn product_embedding_rejects_trivial() {
        let s3 = corpus::symmetric(3);
        let singleton = BlockSystem::from_class_index(&[0, 1, 2]);
        let q = CartesianDecomposition::new(3, vec![singleton]).unwrap();
        assert!(matches!(
            product_embedding(&s3, &q).unwrap_err(),
            Error::TrivialDecomposition
        ));
    }

    #[test]
    fn solve_embedding_dispatch() {
        let intransitive = GeneratedGroup::new(
            5,
            vec![Permutation::from_cycles(5, &[vec![0, 1], vec![2, 3, 4]]).unwrap()],
        )
        .unwrap();
        let e = solve_embedding(&intransitive, &caps()).unwrap().unwrap();
        assert_eq!(e.operator, ProductOperator::Direct);

        let d4 = corpus::dihedral(4);
        let e = solve_embedding(&d4, &caps()).unwrap().unwrap();
        assert_eq!(e.operator, ProductOperator::WreathImprimitive);
        assert!(e.holds_for(&d4, &caps()).unwrap());

        assert!(solve_embedding(&corpus::agl1(5), &caps()).unwrap().is_none());
    }

    #[test]
    fn solve_embedding_of_product_action_round_trips() {
        let w = corpus::s3_up_s2();
        let e = solve_embedding(&w, &caps()).unwrap().unwrap();
        assert_eq!(e.operator, ProductOperator::WreathProduct);
        assert_eq!(e.k.degree(), 3);
        assert_eq!(e.l.degree(), 2);
        assert!(e.holds_for(&w, &caps()).unwrap());
    }
}
