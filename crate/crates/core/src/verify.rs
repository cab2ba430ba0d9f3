//! Property suites over a corpus of groups, used by the CLI `verify`
//! command.  Each property runs on every group where it is feasible under
//! the caps; infeasible groups are skipped, not failed.

use num_bigint::BigUint;

use crate::closure::brute_closure;
use crate::decomposition::solve_embedding;
use crate::engine::regular_orbit_fast_path;
use crate::group::GeneratedGroup;
use crate::{Caps, Error, TupleColoring};

/// Outcome of one property over the whole corpus.
#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    /// Failure description, empty on success.
    pub detail: String,
    /// Groups the property actually ran on.
    pub checked: usize,
}

/// Why a single check did not come back clean.
enum CheckFailure {
    /// The property is violated.
    Mismatch(String),
    /// The machinery itself errored.
    Error(Error),
}

impl From<Error> for CheckFailure {
    fn from(e: Error) -> Self {
        CheckFailure::Error(e)
    }
}

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckFailure::Mismatch(m) => write!(f, "{m}"),
            CheckFailure::Error(e) => write!(f, "{e}"),
        }
    }
}

fn mismatch(msg: impl Into<String>) -> CheckFailure {
    CheckFailure::Mismatch(msg.into())
}

type Check = std::result::Result<bool, CheckFailure>;
type GroupCheck = fn(&GeneratedGroup, &Caps) -> Check;

const PROPERTIES: &[(&str, GroupCheck)] = &[
    ("chain-order-matches-enumeration", check_chain_order),
    ("orbits-partition-points", check_orbit_partition),
    ("compose-associativity", check_associativity),
    ("closure-contains-group", check_closure_contains),
    ("closure-orbit-equality", check_closure_orbits),
    ("closure-idempotent", check_closure_idempotent),
    ("closure-monotone", check_closure_monotone),
    ("one-closure-symmetric-product", check_one_closure),
    ("solvable-stabilizers-solvable", check_solvable_stabilizers),
    ("fast-path-implies-3-closed", check_fast_path),
    ("embedding-soundness", check_embedding),
    ("regular-groups-2-closed", check_regular_two_closed),
];

/// Runs every property over the corpus; a group skipped under the caps
/// does not fail the property.
pub fn run_suite(corpus: &[(String, GeneratedGroup)], caps: &Caps) -> Vec<PropertyResult> {
    PROPERTIES
        .iter()
        .map(|&(name, check)| {
            let mut checked = 0;
            for (group_name, g) in corpus {
                match check(g, caps) {
                    Ok(true) => checked += 1,
                    Ok(false) => continue, // not applicable to this group
                    Err(failure) => {
                        return PropertyResult {
                            name,
                            passed: false,
                            detail: format!("{group_name}: {failure}"),
                            checked,
                        }
                    }
                }
            }
            PropertyResult {
                name,
                passed: true,
                detail: String::new(),
                checked,
            }
        })
        .collect()
}

fn check_chain_order(g: &GeneratedGroup, caps: &Caps) -> Check {
    if g.order() > BigUint::from(10_000u32) {
        return Ok(false);
    }
    let elements = g.elements(caps.element_enumeration.max(10_000))?;
    let distinct: std::collections::HashSet<_> = elements.iter().collect();
    if BigUint::from(distinct.len()) != g.order() {
        return Err(mismatch(format!(
            "enumerated {} distinct elements, order says {}",
            distinct.len(),
            g.order()
        )));
    }
    Ok(true)
}

fn check_orbit_partition(g: &GeneratedGroup, _caps: &Caps) -> Check {
    let orbits = g.orbits();
    let mut seen = vec![false; g.degree()];
    for orbit in &orbits {
        for &p in orbit {
            if seen[p] {
                return Err(mismatch(format!("point {p} in two orbits")));
            }
            seen[p] = true;
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(mismatch("orbits do not cover the points"));
    }
    Ok(true)
}

fn check_associativity(g: &GeneratedGroup, _caps: &Caps) -> Check {
    let gens = g.generators();
    if gens.is_empty() {
        return Ok(false);
    }
    for a in gens {
        for b in gens {
            for c in gens {
                let left = a.compose(b)?.compose(c)?;
                let right = a.compose(&b.compose(c)?)?;
                if left != right {
                    return Err(mismatch("associativity violated"));
                }
            }
        }
    }
    Ok(true)
}

fn feasible_arities(g: &GeneratedGroup, caps: &Caps) -> Vec<usize> {
    (1..=2)
        .filter(|&m| {
            g.degree() <= caps.oracle_degree(m)
                && (g.degree().max(1) as u128).pow(m as u32) <= caps.table_cells as u128
        })
        .collect()
}

fn check_closure_contains(g: &GeneratedGroup, caps: &Caps) -> Check {
    let arities = feasible_arities(g, caps);
    if arities.is_empty() {
        return Ok(false);
    }
    for m in arities {
        let closure = brute_closure(g, m, caps)?;
        if !closure.contains_group(g)? {
            return Err(mismatch(format!("closure at arity {m} loses the group")));
        }
    }
    Ok(true)
}

fn check_closure_orbits(g: &GeneratedGroup, caps: &Caps) -> Check {
    let arities = feasible_arities(g, caps);
    if arities.is_empty() {
        return Ok(false);
    }
    for m in arities {
        let closure = brute_closure(g, m, caps)?;
        let before = TupleColoring::build(g, m, caps)?;
        let after = TupleColoring::build(&closure, m, caps)?;
        if before.colors() != after.colors() {
            return Err(mismatch(format!("tuple orbits change at arity {m}")));
        }
    }
    Ok(true)
}

fn check_closure_idempotent(g: &GeneratedGroup, caps: &Caps) -> Check {
    let arities = feasible_arities(g, caps);
    if arities.is_empty() {
        return Ok(false);
    }
    for m in arities {
        let once = brute_closure(g, m, caps)?;
        let twice = brute_closure(&once, m, caps)?;
        if !once.group_eq(&twice)? {
            return Err(mismatch(format!("closure not idempotent at arity {m}")));
        }
    }
    Ok(true)
}

fn check_closure_monotone(g: &GeneratedGroup, caps: &Caps) -> Check {
    if feasible_arities(g, caps).len() < 2 {
        return Ok(false);
    }
    let at_one = brute_closure(g, 1, caps)?;
    let at_two = brute_closure(g, 2, caps)?;
    if !at_one.contains_group(&at_two)? {
        return Err(mismatch("closure at arity 2 not inside arity 1"));
    }
    Ok(true)
}

fn check_one_closure(g: &GeneratedGroup, caps: &Caps) -> Check {
    if !feasible_arities(g, caps).contains(&1) {
        return Ok(false);
    }
    let closure = brute_closure(g, 1, caps)?;
    let expected = symmetric_product_on_orbits(g);
    if !closure.group_eq(&expected)? {
        return Err(mismatch("1-closure differs from symmetric product"));
    }
    Ok(true)
}

/// Direct product of full symmetric groups on the orbits.
pub fn symmetric_product_on_orbits(g: &GeneratedGroup) -> GeneratedGroup {
    let n = g.degree();
    let mut gens = Vec::new();
    for orbit in g.orbits() {
        if orbit.len() < 2 {
            continue;
        }
        let mut transposition: Vec<usize> = (0..n).collect();
        transposition[orbit[0]] = orbit[1];
        transposition[orbit[1]] = orbit[0];
        gens.push(crate::Permutation::from_images(transposition).expect("transposition"));
        let mut rotation: Vec<usize> = (0..n).collect();
        for w in orbit.windows(2) {
            rotation[w[0]] = w[1];
        }
        rotation[*orbit.last().unwrap()] = orbit[0];
        gens.push(crate::Permutation::from_images(rotation).expect("orbit cycle"));
    }
    GeneratedGroup::new(n, gens).expect("orbit generators share the degree")
}

fn check_solvable_stabilizers(g: &GeneratedGroup, _caps: &Caps) -> Check {
    if !g.is_solvable()? {
        return Ok(false);
    }
    for p in 0..g.degree() {
        if !g.point_stabilizer(p)?.is_solvable()? {
            return Err(mismatch(format!("stabilizer of {p} is not solvable")));
        }
    }
    Ok(true)
}

fn check_fast_path(g: &GeneratedGroup, caps: &Caps) -> Check {
    if !g.is_transitive() || g.degree() > caps.oracle_degree(3) || !regular_orbit_fast_path(g)? {
        return Ok(false);
    }
    let closure = brute_closure(g, 3, caps)?;
    if !closure.group_eq(g)? {
        return Err(mismatch("fast path fired but the group is not 3-closed"));
    }
    Ok(true)
}

fn check_embedding(g: &GeneratedGroup, caps: &Caps) -> Check {
    let embedding = match solve_embedding(g, caps) {
        Ok(Some(e)) => e,
        Ok(None) => return Ok(false),
        Err(Error::ElementCapExceeded { .. }) | Err(Error::SearchCapExceeded { .. }) => {
            return Ok(false)
        }
        Err(e) => return Err(e.into()),
    };
    let n = g.degree();
    if embedding.k.degree() >= n || embedding.l.degree() >= n {
        return Err(mismatch("embedding does not shrink the degree"));
    }
    if !embedding.holds_for(g, caps)? {
        return Err(mismatch("conjugated generators leave the product"));
    }
    Ok(true)
}

fn check_regular_two_closed(g: &GeneratedGroup, caps: &Caps) -> Check {
    if g.degree() > 8 || !g.is_regular() {
        return Ok(false);
    }
    let closure = brute_closure(g, 2, caps)?;
    if !closure.group_eq(g)? {
        return Err(mismatch("regular group of degree <= 8 is not 2-closed"));
    }
    Ok(true)
}

/// The solvable corpus plus two nonsolvable controls, for `verify` runs
/// without a user corpus.
pub fn default_corpus() -> Vec<(String, GeneratedGroup)> {
    let mut corpus = crate::corpus::solvable_corpus();
    corpus.push(("s5".into(), crate::corpus::symmetric(5)));
    corpus.push(("a5".into(), crate::corpus::alternating(5)));
    corpus
}
