//! Block systems (invariant partitions) and primitivity testing.

use crate::group::GeneratedGroup;
use crate::{Error, Result};

/// A group-invariant partition of the points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSystem {
    degree: usize,
    class_index: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl BlockSystem {
    /// Canonicalizes a class-index vector: classes are renumbered by first
    /// occurrence, so class 0 contains point 0.
    pub fn from_class_index(raw: &[usize]) -> Self {
        let degree = raw.len();
        let mut remap: Vec<Option<usize>> = vec![None; degree];
        let mut class_index = vec![0; degree];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (point, &c) in raw.iter().enumerate() {
            let id = match remap[c] {
                Some(id) => id,
                None => {
                    let id = classes.len();
                    remap[c] = Some(id);
                    classes.push(Vec::new());
                    id
                }
            };
            class_index[point] = id;
            classes[id].push(point);
        }
        BlockSystem {
            degree,
            class_index,
            classes,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn class_of(&self, point: usize) -> usize {
        self.class_index[point]
    }

    pub fn class_index(&self) -> &[usize] {
        &self.class_index
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// One class covering everything.
    pub fn is_one_class(&self) -> bool {
        self.classes.len() == 1
    }

    /// Singletons or one class.
    pub fn is_trivial(&self) -> bool {
        self.classes.len() == 1 || self.classes.len() == self.degree
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // attach the larger root to the smaller for canonical numbering
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// The finest invariant partition in which the two seed points share a
/// class.  A one-class result means the seed admits no proper system.
pub fn minimal_block_system(g: &GeneratedGroup, seed: (usize, usize)) -> Result<BlockSystem> {
    let n = g.degree();
    let (a, b) = seed;
    if a >= n || b >= n {
        return Err(Error::PointOutOfRange {
            point: a.max(b),
            degree: n,
        });
    }
    if !g.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let mut uf = UnionFind::new(n);
    uf.union(a, b);
    let mut work = vec![(a, b)];
    while let Some((x, y)) = work.pop() {
        for gen in g.generators() {
            let (gx, gy) = (gen.image(x), gen.image(y));
            if uf.find(gx) != uf.find(gy) {
                uf.union(gx, gy);
                work.push((gx, gy));
            }
        }
    }
    let raw: Vec<usize> = (0..n).map(|p| uf.find(p)).collect();
    Ok(BlockSystem::from_class_index(&raw))
}

/// Transitive with no proper nontrivial block system.
pub fn is_primitive(g: &GeneratedGroup) -> bool {
    if !g.is_transitive() {
        return false;
    }
    for b in 1..g.degree() {
        let system = minimal_block_system(g, (0, b)).expect("transitive by the check above");
        if !system.is_one_class() {
            return false;
        }
    }
    true
}
