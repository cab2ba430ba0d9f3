//! Named small groups used by the test and verification suites: cyclic,
//! dihedral, symmetric, alternating, elementary abelian regular, one- and
//! two-dimensional affine groups, Frobenius subgroups, the quaternion
//! group in its regular action, and assorted products.

use crate::group::GeneratedGroup;
use crate::perm::Permutation;
use crate::products::{direct_product, wreath_imprimitive, wreath_product_action};
use crate::Caps;

fn perm(n: usize, cycles: &[&[usize]]) -> Permutation {
    Permutation::from_cycles(n, &cycles.iter().map(|c| c.to_vec()).collect::<Vec<_>>())
        .expect("corpus cycles are valid")
}

fn group(n: usize, gens: Vec<Permutation>) -> GeneratedGroup {
    GeneratedGroup::new(n, gens).expect("corpus generators share the degree")
}

pub fn cyclic(n: usize) -> GeneratedGroup {
    let all: Vec<usize> = (0..n).collect();
    group(n, vec![perm(n, &[&all])])
}

pub fn symmetric(n: usize) -> GeneratedGroup {
    match n {
        0 | 1 => GeneratedGroup::trivial(n.max(1)),
        2 => group(2, vec![perm(2, &[&[0, 1]])]),
        _ => {
            let all: Vec<usize> = (0..n).collect();
            group(n, vec![perm(n, &[&[0, 1]]), perm(n, &[&all])])
        }
    }
}

pub fn alternating(n: usize) -> GeneratedGroup {
    if n < 3 {
        return GeneratedGroup::trivial(n.max(1));
    }
    let rotation: Vec<usize> = if n % 2 == 1 {
        (0..n).collect()
    } else {
        (1..n).collect()
    };
    group(n, vec![perm(n, &[&[0, 1, 2]]), perm(n, &[&rotation])])
}

pub fn dihedral(n: usize) -> GeneratedGroup {
    let all: Vec<usize> = (0..n).collect();
    let mut reflection: Vec<Vec<usize>> = Vec::new();
    for i in 1..=(n - 1) / 2 {
        if i != n - i {
            reflection.push(vec![i, n - i]);
        }
    }
    if n.is_multiple_of(2) {
        reflection.push(vec![n / 2]);
    }
    let refl: Vec<&[usize]> = reflection.iter().map(|c| &c[..]).collect();
    group(n, vec![perm(n, &[&all]), perm(n, &refl)])
}

/// The translation group of GF(p)^k acting on itself; degree `p^k`,
/// points encoded big-endian in base `p`.
pub fn elementary_abelian_regular(p: usize, k: usize) -> GeneratedGroup {
    let n = p.pow(k as u32);
    let mut gens = Vec::with_capacity(k);
    for coord in 0..k {
        let stride = p.pow((k - 1 - coord) as u32);
        let images: Vec<usize> = (0..n)
            .map(|x| {
                let digit = x / stride % p;
                if digit + 1 == p {
                    x - digit * stride
                } else {
                    x + stride
                }
            })
            .collect();
        gens.push(Permutation::from_images(images).expect("translation is a bijection"));
    }
    group(n, gens)
}

fn multiplicative_order(a: usize, q: usize) -> usize {
    let mut x = a % q;
    let mut order = 1;
    while x != 1 {
        x = x * a % q;
        order += 1;
    }
    order
}

/// `AGL(1, q)` for prime `q`: all maps `x -> ax + b`, a Frobenius group of
/// order `q(q-1)`.
pub fn agl1(q: usize) -> GeneratedGroup {
    frobenius(q, q - 1)
}

/// The subgroup `x -> ax + b` of `AGL(1, q)` with `a` running over the
/// subgroup of multiplicative order `d`; order `q * d`.
pub fn frobenius(q: usize, d: usize) -> GeneratedGroup {
    assert!(d >= 1 && (q - 1).is_multiple_of(d), "d must divide q - 1");
    let translation: Vec<usize> = (0..q).map(|x| (x + 1) % q).collect();
    let a = (2..q)
        .find(|&a| multiplicative_order(a, q) == d)
        .expect("a multiplier of the requested order exists for prime q");
    let scaling: Vec<usize> = (0..q).map(|x| x * a % q).collect();
    group(
        q,
        vec![
            Permutation::from_images(translation).expect("translation is a bijection"),
            Permutation::from_images(scaling).expect("scaling by a unit is a bijection"),
        ],
    )
}

/// `AGL(2, 3)` on the 9 points of GF(3)^2 (point `(a, b)` is `3a + b`):
/// the two translations, the two shears generating `SL(2, 3)`, and a
/// determinant-2 scaling.  Order 432, primitive, solvable.
pub fn agl2_3() -> GeneratedGroup {
    let n = 9;
    let point = |a: usize, b: usize| 3 * (a % 3) + b % 3;
    let linear = |f: &dyn Fn(usize, usize) -> (usize, usize)| -> Permutation {
        let images: Vec<usize> = (0..n)
            .map(|x| {
                let (a, b) = (x / 3, x % 3);
                let (c, d) = f(a, b);
                point(c, d)
            })
            .collect();
        Permutation::from_images(images).expect("linear map is a bijection")
    };
    let translations = elementary_abelian_regular(3, 2);
    let mut gens = translations.generators().to_vec();
    gens.push(linear(&|a, b| (a + b, b)));
    gens.push(linear(&|a, b| (a, a + b)));
    gens.push(linear(&|a, b| (2 * a, b)));
    group(n, gens)
}

/// The quaternion group in its regular action on 8 points
/// (0..7 = 1, i, -1, -i, j, -j, k, -k; generators are right
/// multiplication by i and j).
pub fn quaternion_regular() -> GeneratedGroup {
    group(
        8,
        vec![
            Permutation::from_images(vec![1, 2, 3, 0, 7, 6, 4, 5]).expect("right mult by i"),
            Permutation::from_images(vec![4, 6, 5, 7, 2, 0, 3, 1]).expect("right mult by j"),
        ],
    )
}

pub fn v4_intransitive() -> GeneratedGroup {
    group(4, vec![perm(4, &[&[0, 1]]), perm(4, &[&[2, 3]])])
}

pub fn c2_wr_c2() -> GeneratedGroup {
    wreath_imprimitive(&cyclic(2), &cyclic(2))
}

pub fn s2_up_s2() -> GeneratedGroup {
    wreath_product_action(&symmetric(2), &symmetric(2), &Caps::default())
        .expect("degree 4 is under every cap")
}

pub fn s3_up_s2() -> GeneratedGroup {
    wreath_product_action(&symmetric(3), &symmetric(2), &Caps::default())
        .expect("degree 9 is under every cap")
}

pub fn s3_times_s3() -> GeneratedGroup {
    direct_product(&symmetric(3), &symmetric(3))
}

/// The solvable test corpus: at least 25 named solvable groups of degree
/// at most 9, mixing regular, imprimitive, primitive and intransitive
/// actions.
pub fn solvable_corpus() -> Vec<(String, GeneratedGroup)> {
    let mut corpus: Vec<(String, GeneratedGroup)> = Vec::new();
    for n in 2..=9 {
        corpus.push((format!("c{n}"), cyclic(n)));
    }
    for n in 3..=9 {
        corpus.push((format!("d{n}"), dihedral(n)));
    }
    corpus.push(("e4".into(), elementary_abelian_regular(2, 2)));
    corpus.push(("e8".into(), elementary_abelian_regular(2, 3)));
    corpus.push(("e9".into(), elementary_abelian_regular(3, 2)));
    corpus.push(("agl1_5".into(), agl1(5)));
    corpus.push(("agl1_7".into(), agl1(7)));
    corpus.push(("f21".into(), frobenius(7, 3)));
    corpus.push(("c2_wr_c2".into(), c2_wr_c2()));
    corpus.push(("s2_up_s2".into(), s2_up_s2()));
    corpus.push(("s3_up_s2".into(), s3_up_s2()));
    corpus.push(("s3_x_s3".into(), s3_times_s3()));
    corpus.push(("a4".into(), alternating(4)));
    corpus.push(("s4".into(), symmetric(4)));
    corpus.push(("agl2_3".into(), agl2_3()));
    corpus.push(("q8".into(), quaternion_regular()));
    corpus.push(("v4_pairs".into(), v4_intransitive()));
    corpus.push((
        "c6_on_5".into(),
        group(5, vec![perm(5, &[&[0, 1], &[2, 3, 4]])]),
    ));
    corpus.push((
        "c4_x_c2".into(),
        group(6, vec![perm(6, &[&[0, 1, 2, 3]]), perm(6, &[&[4, 5]])]),
    ));
    corpus.push((
        "c3_x_c3_split".into(),
        group(6, vec![perm(6, &[&[0, 1, 2]]), perm(6, &[&[3, 4, 5]])]),
    ));
    corpus
}
