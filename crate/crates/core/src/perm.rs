//! Permutations of `{0..n-1}` stored as image arrays.
//!
//! The whole crate uses the right-action convention: points are written on
//! the right, so `x^(pq) = (x^p)^q` and [`Permutation::compose`]`(p, q)`
//! applies `p` first.

use std::fmt;

use crate::{Error, Result};

/// A bijection on `{0..n-1}`, stored as the image of each point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// The identity on `n` points.
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from an image array, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::NotABijection);
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation of degree `n` from disjoint cycles.
    ///
    /// Points absent from every cycle are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &p) in cycle.iter().enumerate() {
                let q = cycle[(i + 1) % cycle.len()];
                if p >= n || q >= n {
                    return Err(Error::PointOutOfRange {
                        point: p.max(q),
                        degree: n,
                    });
                }
                if touched[p] {
                    return Err(Error::NotABijection);
                }
                touched[p] = true;
                images[p] = q;
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a point; panics if out of range.
    #[inline]
    pub fn image(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `p.compose(q)` applies `p` first, then `q`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.mul(other))
    }

    /// Unchecked composition for internal use on equal degrees.
    #[inline]
    pub(crate) fn mul(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    /// `k`-th power by repeated squaring.
    pub fn pow(&self, k: usize) -> Permutation {
        let mut result = Permutation::identity(self.degree());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        result
    }

    /// `f^-1 * self * f`, the action transported along `f`.
    pub fn conjugated_by(&self, f: &Permutation) -> Result<Permutation> {
        f.inverse().compose(self)?.compose(f)
    }

    /// Order of the permutation (lcm of cycle lengths).
    pub fn element_order(&self) -> usize {
        self.cycles()
            .iter()
            .map(|c| c.len())
            .fold(1usize, |acc, len| acc / gcd(acc, len) * len)
    }

    /// Smallest non-fixed point, if any.
    pub fn min_moved_point(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|&(i, &x)| i != x).map(|(i, _)| i)
    }

    pub fn moved_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i != x)
            .map(|(i, _)| i)
    }

    /// Nontrivial cycles, each rotated to start at its least point, sorted
    /// by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            cycles.push(cycle);
        }
        cycles
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.mul(other) == other.mul(self)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{}]{}", self.degree(), self)
    }
}
