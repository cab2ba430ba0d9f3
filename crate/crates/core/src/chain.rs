//! Stabilizer chains (Schreier–Sims) over a fixed base order.
//!
//! Every chain stabilizes points in a prescribed order: the natural order
//! `0, 1, 2, ...` by default, optionally preceded by an explicit prefix
//! (used for point stabilizers).  Level `i` holds generators of the
//! subgroup fixing the first `i` base points, the orbit of its own base
//! point under that subgroup, and a transversal of coset representatives.
//! Base points fixed by the whole level subgroup get a trivial level, so
//! the effective base is always the smallest non-fixed point at each level
//! and the construction is fully deterministic.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::One;

use crate::perm::Permutation;
use crate::{Error, Result};

/// A coset representative and its precomputed inverse; sifting multiplies
/// by the inverse on every level, so it is stored rather than recomputed.
#[derive(Debug, Clone)]
struct Rep {
    fwd: Permutation,
    inv: Permutation,
}

impl Rep {
    fn new(fwd: Permutation) -> Self {
        let inv = fwd.inverse();
        Rep { fwd, inv }
    }
}

#[derive(Debug, Clone)]
struct Level {
    base: usize,
    /// Pool ids of the generators of this level's subgroup.
    gen_ids: Vec<usize>,
    /// Orbit of `base` in discovery order.
    orbit: Vec<usize>,
    /// point -> u with base^u = point.
    transversal: HashMap<usize, Rep>,
    /// Schreier pairs (orbit point, gen id) already sifted.
    processed: HashSet<(usize, usize)>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Self {
        let mut transversal = HashMap::new();
        transversal.insert(base, Rep::new(Permutation::identity(degree)));
        Level {
            base,
            gen_ids: Vec::new(),
            orbit: vec![base],
            transversal,
            processed: HashSet::new(),
        }
    }
}

/// A base and strong generating set for a permutation group.
#[derive(Debug, Clone)]
pub struct StabilizerChain {
    degree: usize,
    base_order: Vec<usize>,
    pool: Vec<Permutation>,
    levels: Vec<Level>,
}

impl StabilizerChain {
    /// Empty chain (trivial group) stabilizing points in natural order.
    pub fn new(degree: usize) -> Self {
        Self::with_base_prefix(degree, &[])
    }

    /// Empty chain whose base starts with `prefix`, then continues in
    /// natural order over the remaining points.
    pub fn with_base_prefix(degree: usize, prefix: &[usize]) -> Self {
        let mut base_order = prefix.to_vec();
        let mut used = vec![false; degree];
        for &p in prefix {
            used[p] = true;
        }
        base_order.extend((0..degree).filter(|&p| !used[p]));
        StabilizerChain {
            degree,
            base_order,
            pool: Vec::new(),
            levels: Vec::new(),
        }
    }

    /// Builds a chain for the group generated by `gens`.
    pub fn build(degree: usize, gens: &[Permutation]) -> Self {
        let mut chain = Self::new(degree);
        for g in gens {
            chain.extend(g.clone());
        }
        chain
    }

    /// Builds a chain whose first base points are `prefix`.
    pub fn build_with_prefix(degree: usize, gens: &[Permutation], prefix: &[usize]) -> Self {
        let mut chain = Self::with_base_prefix(degree, prefix);
        for g in gens {
            chain.extend(g.clone());
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Adds a generator, restoring the strong generating property.
    pub fn extend(&mut self, p: Permutation) {
        assert_eq!(p.degree(), self.degree, "generator degree mismatch");
        let mut work = vec![p];
        while let Some(q) = work.pop() {
            let mut residue = q;
            let mut lvl = 0;
            while !residue.is_identity() {
                if lvl == self.levels.len() {
                    let base = self.base_order[lvl];
                    self.levels.push(Level::new(base, self.degree));
                }
                let base = self.levels[lvl].base;
                let x = residue.image(base);
                if x == base {
                    lvl += 1;
                    continue;
                }
                match self.levels[lvl].transversal.get(&x) {
                    Some(u) => {
                        residue = residue.mul(&u.inv);
                        lvl += 1;
                    }
                    None => {
                        self.place(lvl, residue, &mut work);
                        break;
                    }
                }
            }
        }
    }

    /// Installs `g` as a strong generator at levels `0..=lvl` and queues the
    /// resulting unprocessed Schreier generators.
    fn place(&mut self, lvl: usize, g: Permutation, work: &mut Vec<Permutation>) {
        let id = self.pool.len();
        self.pool.push(g);
        for j in 0..=lvl {
            self.levels[j].gen_ids.push(id);
            self.extend_orbit(j);
            self.queue_schreier(j, work);
        }
    }

    /// Grows the orbit/transversal of level `j` without disturbing the
    /// representatives of points already reached.
    fn extend_orbit(&mut self, j: usize) {
        let pool = &self.pool;
        let level = &mut self.levels[j];
        let mut queue: VecDeque<usize> = level.orbit.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            for &gid in &level.gen_ids {
                let g = &pool[gid];
                let y = g.image(x);
                if !level.transversal.contains_key(&y) {
                    let uy = level.transversal[&x].fwd.mul(g);
                    level.transversal.insert(y, Rep::new(uy));
                    level.orbit.push(y);
                    queue.push_back(y);
                }
            }
        }
    }

    fn queue_schreier(&mut self, j: usize, work: &mut Vec<Permutation>) {
        let orbit = self.levels[j].orbit.clone();
        let gen_ids = self.levels[j].gen_ids.clone();
        for &x in &orbit {
            for &gid in &gen_ids {
                if !self.levels[j].processed.insert((x, gid)) {
                    continue;
                }
                let level = &self.levels[j];
                let g = &self.pool[gid];
                let y = g.image(x);
                let s = level.transversal[&x]
                    .fwd
                    .mul(g)
                    .mul(&level.transversal[&y].inv);
                if !s.is_identity() {
                    work.push(s);
                }
            }
        }
    }

    /// Sifts `p` through the chain; the residue is the identity exactly
    /// when `p` is a member.
    pub fn sift(&self, p: &Permutation) -> Permutation {
        let mut residue = p.clone();
        for level in &self.levels {
            if residue.is_identity() {
                break;
            }
            let x = residue.image(level.base);
            if x == level.base {
                continue;
            }
            match level.transversal.get(&x) {
                Some(u) => residue = residue.mul(&u.inv),
                None => break,
            }
        }
        residue
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        p.degree() == self.degree && self.sift(p).is_identity()
    }

    pub fn order(&self) -> BigUint {
        let mut order = BigUint::one();
        for level in &self.levels {
            order *= BigUint::from(level.orbit.len());
        }
        order
    }

    /// Generators of the subgroup fixing the first `depth` base points.
    pub fn generators_fixing_prefix(&self, depth: usize) -> Vec<Permutation> {
        match self.levels.get(depth) {
            Some(level) => level.gen_ids.iter().map(|&id| self.pool[id].clone()).collect(),
            None => Vec::new(),
        }
    }

    /// Number of levels with a nontrivial orbit.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn base_at(&self, level: usize) -> usize {
        self.levels[level].base
    }

    /// Orbit of the level's base point, ascending.
    pub fn orbit_at(&self, level: usize) -> Vec<usize> {
        let mut orbit = self.levels[level].orbit.clone();
        orbit.sort_unstable();
        orbit
    }

    pub fn rep_at(&self, level: usize, point: usize) -> &Permutation {
        &self.levels[level].transversal[&point].fwd
    }

    /// All group elements, deepest transversal applied first.
    pub fn elements(&self, cap: usize) -> Result<Vec<Permutation>> {
        if self.order() > BigUint::from(cap) {
            return Err(Error::ElementCapExceeded { cap });
        }
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut points = level.orbit.clone();
            points.sort_unstable();
            let mut next = Vec::with_capacity(out.len() * points.len());
            for x in points {
                let u = &level.transversal[&x].fwd;
                for e in &out {
                    next.push(e.mul(u));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Lexicographically least element of the coset `H·g` where `H` is this
    /// chain's group.  Requires a chain built with the natural base order.
    pub fn min_coset_rep(&self, g: &Permutation) -> Permutation {
        debug_assert!(self.base_order.iter().enumerate().all(|(i, &b)| i == b));
        let mut r = g.clone();
        for level in &self.levels {
            let x = level
                .orbit
                .iter()
                .copied()
                .min_by_key(|&x| r.image(x))
                .expect("orbit is nonempty");
            if x != level.base {
                r = level.transversal[&x].fwd.mul(&r);
            }
        }
        r
    }
}
