//! Finitely generated permutation groups and the standard structural
//! queries: orbits, membership, order, stabilizers, normal closures,
//! solvability, induced actions.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::chain::StabilizerChain;
use crate::perm::Permutation;
use crate::{Error, Result};

/// A permutation group given by a generating set, with a lazily built
/// stabilizer chain for order and membership queries.
///
/// Values are immutable after construction; the chain is built at most once
/// on first use and may be raced from multiple threads safely.
#[derive(Debug, Clone)]
pub struct GeneratedGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabilizerChain>,
}

impl GeneratedGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        Ok(GeneratedGroup {
            degree,
            generators,
            chain: OnceLock::new(),
        })
    }

    /// The trivial group on `degree` points.
    pub fn trivial(degree: usize) -> Self {
        GeneratedGroup {
            degree,
            generators: Vec::new(),
            chain: OnceLock::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn chain(&self) -> &StabilizerChain {
        self.chain
            .get_or_init(|| StabilizerChain::build(self.degree, &self.generators))
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.iter().all(Permutation::is_identity)
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: p.degree(),
            });
        }
        Ok(self.chain().contains(p))
    }

    /// True iff `other`'s generators all lie in `self`.
    pub fn contains_group(&self, other: &GeneratedGroup) -> Result<bool> {
        for g in other.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Set equality: equal orders and mutual generator containment.
    pub fn group_eq(&self, other: &GeneratedGroup) -> Result<bool> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        Ok(self.order() == other.order()
            && self.contains_group(other)?
            && other.contains_group(self)?)
    }

    /// Orbit of a point, ascending.
    pub fn orbit(&self, point: usize) -> Result<Vec<usize>> {
        if point >= self.degree {
            return Err(Error::PointOutOfRange {
                point,
                degree: self.degree,
            });
        }
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut queue = VecDeque::from([point]);
        let mut orbit = vec![point];
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = g.image(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                    queue.push_back(y);
                }
            }
        }
        orbit.sort_unstable();
        Ok(orbit)
    }

    /// All orbits, each ascending, ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut orbits = Vec::new();
        for p in 0..self.degree {
            if seen[p] {
                continue;
            }
            let orbit = self.orbit(p).expect("point is in range");
            for &x in &orbit {
                seen[x] = true;
            }
            orbits.push(orbit);
        }
        orbits
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbit(0).expect("point 0 in range").len() == self.degree
    }

    /// Regular means transitive with order equal to the degree.
    pub fn is_regular(&self) -> bool {
        self.is_transitive() && self.order() == BigUint::from(self.degree)
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .enumerate()
            .all(|(i, a)| self.generators[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    /// All elements, at most `cap` of them.
    pub fn elements(&self, cap: usize) -> Result<Vec<Permutation>> {
        self.chain().elements(cap)
    }

    /// The group `f^-1 * G * f` acting on the relabeled points.
    pub fn conjugated(&self, f: &Permutation) -> Result<GeneratedGroup> {
        if f.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: f.degree(),
            });
        }
        let gens = self
            .generators
            .iter()
            .map(|g| g.conjugated_by(f))
            .collect::<Result<Vec<_>>>()?;
        GeneratedGroup::new(self.degree, gens)
    }

    /// Stabilizer of a point, from a chain based at that point.
    pub fn point_stabilizer(&self, point: usize) -> Result<GeneratedGroup> {
        if point >= self.degree {
            return Err(Error::PointOutOfRange {
                point,
                degree: self.degree,
            });
        }
        let chain = StabilizerChain::build_with_prefix(self.degree, &self.generators, &[point]);
        GeneratedGroup::new(self.degree, chain.generators_fixing_prefix(1))
    }

    /// Smallest subgroup containing `seeds` that is closed under
    /// conjugation by this group's generators.
    pub fn normal_closure(&self, seeds: &[Permutation]) -> Result<GeneratedGroup> {
        for s in seeds {
            if s.degree() != self.degree {
                return Err(Error::DegreeMismatch {
                    left: self.degree,
                    right: s.degree(),
                });
            }
        }
        let mut chain = StabilizerChain::new(self.degree);
        let mut gens: Vec<Permutation> = Vec::new();
        let mut queue: VecDeque<Permutation> = VecDeque::new();
        for s in seeds {
            if !chain.contains(s) {
                chain.extend(s.clone());
                gens.push(s.clone());
                queue.push_back(s.clone());
            }
        }
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = x.conjugated_by(g)?;
                if !chain.contains(&y) {
                    chain.extend(y.clone());
                    gens.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        GeneratedGroup::new(self.degree, gens)
    }

    /// Derived subgroup: normal closure of the generator commutators.
    pub fn derived_subgroup(&self) -> Result<GeneratedGroup> {
        let mut seeds = Vec::new();
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                let c = a.inverse().mul(&b.inverse()).mul(a).mul(b);
                if !c.is_identity() {
                    seeds.push(c);
                }
            }
        }
        self.normal_closure(&seeds)
    }

    /// Solvability via the derived series; the series length is capped to
    /// guard against implementation bugs.
    pub fn is_solvable(&self) -> Result<bool> {
        let mut h = self.clone();
        for _ in 0..64 {
            let order = h.order();
            if order.is_one() {
                return Ok(true);
            }
            let d = h.derived_subgroup()?;
            if d.order() == order {
                return Ok(false);
            }
            h = d;
        }
        Err(Error::DerivedSeriesTooLong)
    }

    /// Action induced on an ordered list of point sets.  Returns the group
    /// on `{0..sets-1}` and whether the action is faithful.
    pub fn induced_action(&self, domain: &[Vec<usize>]) -> Result<(GeneratedGroup, bool)> {
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut keys = Vec::with_capacity(domain.len());
        for (i, set) in domain.iter().enumerate() {
            let mut key = set.clone();
            key.sort_unstable();
            if key.iter().any(|&p| p >= self.degree) {
                return Err(Error::PointOutOfRange {
                    point: *key.last().unwrap(),
                    degree: self.degree,
                });
            }
            if index.insert(key.clone(), i).is_some() {
                return Err(Error::NotInvariant);
            }
            keys.push(key);
        }
        let mut gens = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let mut images = Vec::with_capacity(domain.len());
            for key in &keys {
                let mut image: Vec<usize> = key.iter().map(|&p| g.image(p)).collect();
                image.sort_unstable();
                match index.get(&image) {
                    Some(&j) => images.push(j),
                    None => return Err(Error::NotInvariant),
                }
            }
            gens.push(Permutation::from_images(images).map_err(|_| Error::NotInvariant)?);
        }
        let induced = GeneratedGroup::new(domain.len(), gens)?;
        let faithful = induced.order() == self.order();
        Ok((induced, faithful))
    }

    /// Restriction to an invariant point set, relabeled in ascending order.
    pub fn restriction(&self, points: &[usize]) -> Result<GeneratedGroup> {
        let mut sorted = points.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let singletons: Vec<Vec<usize>> = sorted.iter().map(|&p| vec![p]).collect();
        let (restricted, _) = self.induced_action(&singletons)?;
        Ok(restricted)
    }
}
