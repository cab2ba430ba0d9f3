//! Orbit colorings of m-tuples under the diagonal action.
//!
//! Tuples over `{0..n-1}` are encoded big-endian in base `n`.  Colors are
//! canonical: orbits are numbered by their lexicographically least tuple,
//! so equal groups produce identical color tables in every build mode.

use std::collections::VecDeque;

use crate::group::GeneratedGroup;
use crate::perm::Permutation;
use crate::{Caps, Error, Result};

/// The partition of all m-tuples into group orbits, one color per orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleColoring {
    degree: usize,
    arity: usize,
    colors: Vec<u32>,
    color_count: usize,
}

impl TupleColoring {
    /// Number of table cells `n^m`, checked against the cap.
    fn cell_count(degree: usize, arity: usize, caps: &Caps) -> Result<usize> {
        if arity == 0 {
            return Err(Error::UnsupportedArity { m: 0 });
        }
        let cells = (degree.max(1) as u128).pow(arity as u32);
        if cells > caps.table_cells as u128 {
            return Err(Error::TableCapExceeded {
                cells,
                cap: caps.table_cells,
            });
        }
        Ok(cells as usize)
    }

    /// Sequential reference construction by orbit BFS in code order.
    pub fn build(g: &GeneratedGroup, arity: usize, caps: &Caps) -> Result<Self> {
        let n = g.degree();
        let cells = Self::cell_count(n, arity, caps)?;
        let mut colors = vec![u32::MAX; cells];
        let mut color_count = 0usize;
        let mut queue = VecDeque::new();
        let mut digits = vec![0usize; arity];
        for start in 0..cells {
            if colors[start] != u32::MAX {
                continue;
            }
            let color = color_count as u32;
            color_count += 1;
            colors[start] = color;
            queue.push_back(start);
            while let Some(code) = queue.pop_front() {
                for gen in g.generators() {
                    let image = apply_to_code(gen, code, n, arity, &mut digits);
                    if colors[image] == u32::MAX {
                        colors[image] = color;
                        queue.push_back(image);
                    }
                }
            }
        }
        Ok(TupleColoring {
            degree: n,
            arity,
            colors,
            color_count,
        })
    }

    /// Parallel construction by min-label propagation with pointer jumping;
    /// the result is identical to [`TupleColoring::build`].
    #[cfg(feature = "parallel")]
    pub fn build_par(g: &GeneratedGroup, arity: usize, caps: &Caps) -> Result<Self> {
        use rayon::prelude::*;

        let n = g.degree();
        let cells = Self::cell_count(n, arity, caps)?;
        let mut maps: Vec<&Permutation> = g.generators().iter().collect();
        let inverses: Vec<Permutation> = g.generators().iter().map(Permutation::inverse).collect();
        maps.extend(inverses.iter());

        let mut labels: Vec<u32> = (0..cells as u32).collect();
        loop {
            // hook: pull the least label across every generator edge
            let hooked: Vec<u32> = (0..cells)
                .into_par_iter()
                .map(|code| {
                    let mut digits = vec![0usize; arity];
                    let mut best = labels[code];
                    for gen in &maps {
                        let image = apply_to_code(gen, code, n, arity, &mut digits);
                        best = best.min(labels[image]);
                    }
                    best
                })
                .collect();
            // compress: follow label chains to their roots
            let mut current = hooked;
            loop {
                let jumped: Vec<u32> = current
                    .par_iter()
                    .map(|&l| current[l as usize])
                    .collect();
                if jumped == current {
                    break;
                }
                current = jumped;
            }
            if current == labels {
                break;
            }
            labels = current;
        }

        // canonical renumbering by ascending root code
        let mut color_of_root = vec![u32::MAX; cells];
        let mut color_count = 0usize;
        for code in 0..cells {
            if labels[code] as usize == code {
                color_of_root[code] = color_count as u32;
                color_count += 1;
            }
        }
        let colors: Vec<u32> = labels
            .into_par_iter()
            .map(|root| color_of_root[root as usize])
            .collect();
        Ok(TupleColoring {
            degree: n,
            arity,
            colors,
            color_count,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn color_count(&self) -> usize {
        self.color_count
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    #[inline]
    pub fn color_of_code(&self, code: usize) -> u32 {
        self.colors[code]
    }

    pub fn code(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.arity);
        tuple.iter().fold(0, |acc, &t| acc * self.degree + t)
    }

    pub fn color_of(&self, tuple: &[usize]) -> u32 {
        self.colors[self.code(tuple)]
    }

    /// True iff `p` fixes every color class setwise.
    pub fn preserved_by(&self, p: &Permutation) -> bool {
        let mut digits = vec![0usize; self.arity];
        (0..self.colors.len()).all(|code| {
            let image = apply_to_code(p, code, self.degree, self.arity, &mut digits);
            self.colors[image] == self.colors[code]
        })
    }
}

/// Image of an encoded tuple under the diagonal action of `p`.
#[inline]
pub(crate) fn apply_to_code(
    p: &Permutation,
    code: usize,
    degree: usize,
    arity: usize,
    digits: &mut [usize],
) -> usize {
    let mut rest = code;
    for d in digits.iter_mut().rev() {
        *d = rest % degree;
        rest /= degree;
    }
    let mut image = 0usize;
    for &d in digits.iter().take(arity) {
        image = image * degree + p.image(d);
    }
    image
}
