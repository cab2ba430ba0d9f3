//! Recursive m-closure for a complete class of groups (`m >= 3`).
//!
//! The recursion solves the embedding problem, closes the two factors,
//! rebuilds their product, and intersects via a relative closure; groups
//! with no embedding (primitive basic) go to the brute-force oracle, with
//! a fast path for groups whose point stabilizer has a regular orbit.

use crate::closure::{brute_closure, relative_closure};
use crate::decomposition::solve_embedding;
use crate::group::GeneratedGroup;
use crate::products::{build_product, direct_product, ProductOperator};
use crate::{Caps, Error, Result};

/// A class of groups closed under subgroups, quotients and extensions.
///
/// Only `Solvable` carries the closure guarantee the engine relies on;
/// `OddOrder` and `All` ship for experimentation (`All` voids the
/// class-preservation property).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupClass {
    Solvable,
    OddOrder,
    All,
}

impl GroupClass {
    pub fn name(&self) -> &'static str {
        match self {
            GroupClass::Solvable => "solvable",
            GroupClass::OddOrder => "odd-order",
            GroupClass::All => "all",
        }
    }

    pub fn test(&self, g: &GeneratedGroup) -> Result<bool> {
        match self {
            GroupClass::Solvable => g.is_solvable(),
            GroupClass::OddOrder => Ok(g.order().bit(0)),
            GroupClass::All => Ok(true),
        }
    }
}

/// How one engine run decomposed its input.
#[derive(Debug, Clone)]
pub struct TraceNode {
    pub degree: usize,
    pub kind: TraceKind,
}

#[derive(Debug, Clone)]
pub enum TraceKind {
    /// Primitive basic case: one oracle call unless the fast path fired.
    Base { fast_path: bool },
    /// An embedding split; `relative_call` records whether the recombination
    /// needed a relative-closure call (a single-point factor does not).
    Split {
        op: ProductOperator,
        relative_call: bool,
        left: Box<TraceNode>,
        right: Box<TraceNode>,
    },
}

impl TraceNode {
    pub fn leaf_count(&self) -> usize {
        match &self.kind {
            TraceKind::Base { .. } => 1,
            TraceKind::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    pub fn relative_call_count(&self) -> usize {
        match &self.kind {
            TraceKind::Base { .. } => 0,
            TraceKind::Split {
                relative_call,
                left,
                right,
                ..
            } => usize::from(*relative_call) + left.relative_call_count() + right.relative_call_count(),
        }
    }

    /// Brute-force oracle calls at leaves plus relative-closure calls.
    pub fn oracle_calls(&self) -> usize {
        match &self.kind {
            TraceKind::Base { fast_path } => usize::from(!fast_path),
            TraceKind::Split {
                relative_call,
                left,
                right,
                ..
            } => usize::from(*relative_call) + left.oracle_calls() + right.oracle_calls(),
        }
    }

    /// Degrees along every split satisfy the case formula
    /// `n = n_K + n_L`, `n_K * n_L` or `n_K ^ n_L`.
    pub fn degrees_consistent(&self) -> bool {
        match &self.kind {
            TraceKind::Base { .. } => true,
            TraceKind::Split {
                op, left, right, ..
            } => {
                let (nk, nl) = (left.degree as u128, right.degree as u128);
                let expected = match op {
                    ProductOperator::Direct => Some(nk + nl),
                    ProductOperator::WreathImprimitive => nk.checked_mul(nl),
                    ProductOperator::WreathProduct => nk.checked_pow(right.degree as u32),
                };
                expected == Some(self.degree as u128)
                    && left.degrees_consistent()
                    && right.degrees_consistent()
            }
        }
    }
}

/// The decomposition tree of one engine run.
#[derive(Debug, Clone)]
pub struct ClosureTrace {
    pub root: TraceNode,
}

impl ClosureTrace {
    pub fn degree(&self) -> usize {
        self.root.degree
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    pub fn relative_call_count(&self) -> usize {
        self.root.relative_call_count()
    }

    /// Leaves plus recombination steps; at most the degree.
    pub fn step_count(&self) -> usize {
        self.root.leaf_count() + self.root.relative_call_count()
    }

    pub fn oracle_calls(&self) -> usize {
        self.root.oracle_calls()
    }

    pub fn degrees_consistent(&self) -> bool {
        self.root.degrees_consistent()
    }
}

/// True iff the stabilizer of point 0 has an orbit of length equal to its
/// order; such groups are their own 3-closure and skip the oracle.
pub fn regular_orbit_fast_path(g: &GeneratedGroup) -> Result<bool> {
    if !g.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let stabilizer = g.point_stabilizer(0)?;
    let order = stabilizer.order();
    Ok(stabilizer
        .orbits()
        .iter()
        .any(|orbit| num_bigint::BigUint::from(orbit.len()) == order))
}

/// Closure of a primitive basic group: the fast path returns the group
/// itself; otherwise the 3-closure comes from the oracle and higher
/// arities refine it by a relative closure.
pub fn base_case_closure(g: &GeneratedGroup, m: usize, caps: &Caps) -> Result<GeneratedGroup> {
    Ok(base_case_impl(g, m, caps, false)?.0)
}

fn base_case_impl(
    g: &GeneratedGroup,
    m: usize,
    caps: &Caps,
    parallel: bool,
) -> Result<(GeneratedGroup, bool)> {
    if g.is_transitive() && regular_orbit_fast_path(g)? {
        return Ok((g.clone(), true));
    }
    let c3 = oracle_closure(g, 3, caps, parallel)?;
    if m == 3 {
        Ok((c3, false))
    } else {
        Ok((relative_closure(g, m, &c3, caps)?, false))
    }
}

fn oracle_closure(
    g: &GeneratedGroup,
    m: usize,
    caps: &Caps,
    parallel: bool,
) -> Result<GeneratedGroup> {
    #[cfg(feature = "parallel")]
    if parallel {
        return crate::closure::brute_closure_par(g, m, caps);
    }
    let _ = parallel;
    brute_closure(g, m, caps)
}

/// The m-closure of a group in the given class, `m >= 3`, with the trace
/// of the recursion.  Sequential reference implementation.
pub fn m_closure(
    g: &GeneratedGroup,
    m: usize,
    class: GroupClass,
    caps: &Caps,
) -> Result<(GeneratedGroup, ClosureTrace)> {
    m_closure_impl(g, m, class, caps, false)
}

/// Parallel variant: independent recursion branches run under rayon and
/// the oracles use their parallel builds.  Identical results.
#[cfg(feature = "parallel")]
pub fn m_closure_par(
    g: &GeneratedGroup,
    m: usize,
    class: GroupClass,
    caps: &Caps,
) -> Result<(GeneratedGroup, ClosureTrace)> {
    m_closure_impl(g, m, class, caps, true)
}

fn m_closure_impl(
    g: &GeneratedGroup,
    m: usize,
    class: GroupClass,
    caps: &Caps,
    parallel: bool,
) -> Result<(GeneratedGroup, ClosureTrace)> {
    if m < 3 {
        return Err(Error::UnsupportedArity { m });
    }
    if !class.test(g)? {
        return Err(Error::NotInClass { class: class.name() });
    }
    let (group, root) = closure_rec(g, m, caps, parallel)?;
    Ok((group, ClosureTrace { root }))
}

fn closure_rec(
    g: &GeneratedGroup,
    m: usize,
    caps: &Caps,
    parallel: bool,
) -> Result<(GeneratedGroup, TraceNode)> {
    let n = g.degree();
    let Some(embedding) = solve_embedding(g, caps)? else {
        let (group, fast_path) = base_case_impl(g, m, caps, parallel)?;
        return Ok((
            group,
            TraceNode {
                degree: n,
                kind: TraceKind::Base { fast_path },
            },
        ));
    };

    let (left, right) = recurse_factors(&embedding.k, &embedding.l, m, caps, parallel)?;
    let ((k_closure, k_trace), (l_closure, l_trace)) = (left, right);

    // A direct split with a single-point factor is just a relabeling of
    // the other side, so its closure transfers without a relative-closure
    // call; this keeps the oracle accounting within the degree bound.
    let single_sided = embedding.operator == ProductOperator::Direct
        && (embedding.k.degree() == 1 || embedding.l.degree() == 1);
    let (result, relative_call) = if single_sided {
        let product = direct_product(&k_closure, &l_closure);
        (product.conjugated(&embedding.map.inverse())?, false)
    } else {
        let product = build_product(embedding.operator, &k_closure, &l_closure, caps)?;
        let moved = g.conjugated(&embedding.map)?;
        let closed = relative_closure(&moved, m, &product, caps)?;
        (closed.conjugated(&embedding.map.inverse())?, true)
    };
    Ok((
        result,
        TraceNode {
            degree: n,
            kind: TraceKind::Split {
                op: embedding.operator,
                relative_call,
                left: Box::new(k_trace),
                right: Box::new(l_trace),
            },
        },
    ))
}

type FactorResult = Result<(GeneratedGroup, TraceNode)>;

fn recurse_factors(
    k: &GeneratedGroup,
    l: &GeneratedGroup,
    m: usize,
    caps: &Caps,
    parallel: bool,
) -> Result<(
    (GeneratedGroup, TraceNode),
    (GeneratedGroup, TraceNode),
)> {
    #[cfg(feature = "parallel")]
    if parallel {
        let (lhs, rhs): (FactorResult, FactorResult) = rayon::join(
            || closure_rec(k, m, caps, true),
            || closure_rec(l, m, caps, true),
        );
        return Ok((lhs?, rhs?));
    }
    let _ = parallel;
    Ok((closure_rec(k, m, caps, false)?, closure_rec(l, m, caps, false)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn engine_rejects_small_arity() {
        let c6 = corpus::cyclic(6);
        assert!(matches!(
            m_closure(&c6, 2, GroupClass::Solvable, &caps()).unwrap_err(),
            Error::UnsupportedArity { m: 2 }
        ));
    }

    #[test]
    fn engine_rejects_groups_outside_the_class() {
        let a5 = corpus::alternating(5);
        assert!(matches!(
            m_closure(&a5, 3, GroupClass::Solvable, &caps()).unwrap_err(),
            Error::NotInClass { .. }
        ));
    }

    #[test]
    fn c6_matches_the_oracle() {
        let c6 = corpus::cyclic(6);
        let (closure, trace) = m_closure(&c6, 3, GroupClass::Solvable, &caps()).unwrap();
        let brute = brute_closure(&c6, 3, &caps()).unwrap();
        assert!(closure.group_eq(&brute).unwrap());
        assert!(trace.degrees_consistent());
        assert!(trace.step_count() <= 6);
    }

    #[test]
    fn product_action_trace_splits_nine_as_three_squared() {
        let w = corpus::s3_up_s2();
        let (closure, trace) = m_closure(&w, 3, GroupClass::Solvable, &caps()).unwrap();
        let brute = brute_closure(&w, 3, &caps()).unwrap();
        assert!(closure.group_eq(&brute).unwrap());
        let TraceKind::Split { op, left, right, .. } = &trace.root.kind else {
            panic!("expected a split at the root");
        };
        assert_eq!(*op, ProductOperator::WreathProduct);
        assert_eq!((left.degree, right.degree), (3, 2));
        assert!(trace.degrees_consistent());
    }

    #[test]
    fn fast_path_examples() {
        assert!(regular_orbit_fast_path(&corpus::agl1(5)).unwrap());
        assert!(regular_orbit_fast_path(&corpus::cyclic(4)).unwrap());
        assert!(!regular_orbit_fast_path(&corpus::agl2_3()).unwrap());
        assert!(matches!(
            regular_orbit_fast_path(&corpus::v4_intransitive()).unwrap_err(),
            Error::NotTransitive
        ));
    }

    #[test]
    fn base_case_examples() {
        let agl = corpus::agl1(5);
        let closed = base_case_closure(&agl, 3, &caps()).unwrap();
        assert!(closed.group_eq(&agl).unwrap());

        let s3 = corpus::symmetric(3);
        let closed = base_case_closure(&s3, 3, &caps()).unwrap();
        assert!(closed.group_eq(&s3).unwrap());

        let trivial = GeneratedGroup::trivial(1);
        let closed = base_case_closure(&trivial, 3, &caps()).unwrap();
        assert!(closed.group_eq(&trivial).unwrap());
    }

    #[test]
    fn intransitive_groups_with_fixed_points_stay_within_step_budget() {
        let g = GeneratedGroup::new(
            4,
            vec![crate::perm::Permutation::from_cycles(4, &[vec![2, 3]]).unwrap()],
        )
        .unwrap();
        let (closure, trace) = m_closure(&g, 3, GroupClass::Solvable, &caps()).unwrap();
        assert!(closure.group_eq(&g).unwrap());
        assert!(trace.step_count() <= 4, "steps: {}", trace.step_count());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_engine_matches_sequential() {
        for g in [corpus::cyclic(6), corpus::dihedral(4), corpus::s3_up_s2()] {
            let (seq, _) = m_closure(&g, 3, GroupClass::Solvable, &caps()).unwrap();
            let (par, _) = m_closure_par(&g, 3, GroupClass::Solvable, &caps()).unwrap();
            assert!(seq.group_eq(&par).unwrap());
        }
    }
}
