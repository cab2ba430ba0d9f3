//! The three product actions of permutation groups: direct product on the
//! disjoint union, imprimitive wreath on the cartesian product, and wreath
//! with product action on functions.

use crate::blocks::BlockSystem;
use crate::decomposition::CartesianDecomposition;
use crate::group::GeneratedGroup;
use crate::perm::Permutation;
use crate::{Caps, Error, Result};

/// Which product is meant: `x`, `wr` or `up`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProductOperator {
    /// Direct product acting on the disjoint union.
    Direct,
    /// Wreath product acting on pairs (imprimitive action).
    WreathImprimitive,
    /// Wreath product acting on tuples (product action).
    WreathProduct,
}

impl ProductOperator {
    pub fn symbol(&self) -> &'static str {
        match self {
            ProductOperator::Direct => "x",
            ProductOperator::WreathImprimitive => "wr",
            ProductOperator::WreathProduct => "up",
        }
    }
}

/// A point of the underlying set of a product, before flattening.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructuredPoint {
    /// A point of the left factor's set.
    Left(usize),
    /// A point of the right factor's set.
    Right(usize),
    /// A pair (delta, gamma).
    Pair(usize, usize),
    /// A |Gamma|-tuple over Delta, coordinate 1 first.
    Tuple(Vec<usize>),
}

/// Translates between structured product points and flat indices.
///
/// Conventions: the disjoint union places Delta first; pairs flatten as
/// `delta * |Gamma| + gamma`; tuples flatten big-endian in base `|Delta|`
/// with coordinate 1 most significant.
#[derive(Debug, Clone)]
pub struct PointCodec {
    operator: ProductOperator,
    delta_size: usize,
    gamma_size: usize,
}

impl PointCodec {
    pub fn new(operator: ProductOperator, delta_size: usize, gamma_size: usize) -> Self {
        PointCodec {
            operator,
            delta_size,
            gamma_size,
        }
    }

    pub fn operator(&self) -> ProductOperator {
        self.operator
    }

    /// Number of flat points, exact (may exceed any usize cap).
    pub fn flat_degree(&self) -> u128 {
        let d = self.delta_size as u128;
        let g = self.gamma_size as u128;
        match self.operator {
            ProductOperator::Direct => d + g,
            ProductOperator::WreathImprimitive => d * g,
            ProductOperator::WreathProduct => d.pow(self.gamma_size as u32),
        }
    }

    pub fn encode(&self, point: &StructuredPoint) -> Result<usize> {
        let bad = |p: usize, degree: usize| Error::PointOutOfRange { point: p, degree };
        match (self.operator, point) {
            (ProductOperator::Direct, StructuredPoint::Left(d)) => {
                if *d >= self.delta_size {
                    return Err(bad(*d, self.delta_size));
                }
                Ok(*d)
            }
            (ProductOperator::Direct, StructuredPoint::Right(g)) => {
                if *g >= self.gamma_size {
                    return Err(bad(*g, self.gamma_size));
                }
                Ok(self.delta_size + g)
            }
            (ProductOperator::WreathImprimitive, StructuredPoint::Pair(d, g)) => {
                if *d >= self.delta_size {
                    return Err(bad(*d, self.delta_size));
                }
                if *g >= self.gamma_size {
                    return Err(bad(*g, self.gamma_size));
                }
                Ok(d * self.gamma_size + g)
            }
            (ProductOperator::WreathProduct, StructuredPoint::Tuple(ds)) => {
                if ds.len() != self.gamma_size {
                    return Err(Error::DegreeMismatch {
                        left: ds.len(),
                        right: self.gamma_size,
                    });
                }
                let mut flat = 0usize;
                for &d in ds {
                    if d >= self.delta_size {
                        return Err(bad(d, self.delta_size));
                    }
                    flat = flat * self.delta_size + d;
                }
                Ok(flat)
            }
            _ => Err(Error::NotInvariant),
        }
    }

    pub fn decode(&self, flat: usize) -> StructuredPoint {
        match self.operator {
            ProductOperator::Direct => {
                if flat < self.delta_size {
                    StructuredPoint::Left(flat)
                } else {
                    StructuredPoint::Right(flat - self.delta_size)
                }
            }
            ProductOperator::WreathImprimitive => {
                StructuredPoint::Pair(flat / self.gamma_size, flat % self.gamma_size)
            }
            ProductOperator::WreathProduct => {
                let mut ds = vec![0; self.gamma_size];
                let mut rest = flat;
                for d in ds.iter_mut().rev() {
                    *d = rest % self.delta_size;
                    rest /= self.delta_size;
                }
                StructuredPoint::Tuple(ds)
            }
        }
    }
}

/// Least point of each orbit, ascending.  The factor's generators get
/// lifted into one copy per orbit so that the product order comes out as
/// the closed form even for intransitive tops.
fn orbit_representatives(g: &GeneratedGroup) -> Vec<usize> {
    g.orbits().iter().map(|o| o[0]).collect()
}

/// `K x L` on the disjoint union, Delta first.
///
/// Order `|K| * |L|`; orbits refine the two sides.
pub fn direct_product(k: &GeneratedGroup, l: &GeneratedGroup) -> GeneratedGroup {
    let (dk, dl) = (k.degree(), l.degree());
    let n = dk + dl;
    let mut gens = Vec::with_capacity(k.generators().len() + l.generators().len());
    for kg in k.generators() {
        let mut images: Vec<usize> = (0..n).collect();
        images[..dk].copy_from_slice(kg.images());
        gens.push(Permutation::from_images(images).expect("lift of a bijection"));
    }
    for lg in l.generators() {
        let mut images: Vec<usize> = (0..n).collect();
        for g in 0..dl {
            images[dk + g] = dk + lg.image(g);
        }
        gens.push(Permutation::from_images(images).expect("lift of a bijection"));
    }
    GeneratedGroup::new(n, gens).expect("degrees match by construction")
}

/// `K wr L` acting on pairs: base group one copy of `K` per fiber, top
/// group permuting the fibers.
///
/// Order `|K|^|Gamma| * |L|`; the fibers `Delta x {gamma}` form an
/// invariant block system.
pub fn wreath_imprimitive(k: &GeneratedGroup, l: &GeneratedGroup) -> GeneratedGroup {
    let (dk, dl) = (k.degree(), l.degree());
    let codec = PointCodec::new(ProductOperator::WreathImprimitive, dk, dl);
    let n = dk * dl;
    let mut gens = Vec::new();
    for &copy in &orbit_representatives(l) {
        for kg in k.generators() {
            let mut images: Vec<usize> = (0..n).collect();
            for d in 0..dk {
                let from = codec.encode(&StructuredPoint::Pair(d, copy)).unwrap();
                let to = codec
                    .encode(&StructuredPoint::Pair(kg.image(d), copy))
                    .unwrap();
                images[from] = to;
            }
            gens.push(Permutation::from_images(images).expect("base lift is a bijection"));
        }
    }
    for lg in l.generators() {
        let mut images = vec![0; n];
        for d in 0..dk {
            for g in 0..dl {
                let from = codec.encode(&StructuredPoint::Pair(d, g)).unwrap();
                let to = codec
                    .encode(&StructuredPoint::Pair(d, lg.image(g)))
                    .unwrap();
                images[from] = to;
            }
        }
        gens.push(Permutation::from_images(images).expect("top lift is a bijection"));
    }
    GeneratedGroup::new(n, gens).expect("degrees match by construction")
}

/// `K up L` with the product action on `Delta^|Gamma|`: the base group
/// acts coordinatewise, the top group permutes coordinates.
///
/// Order `|K|^|Gamma| * |L|`.
pub fn wreath_product_action(
    k: &GeneratedGroup,
    l: &GeneratedGroup,
    caps: &Caps,
) -> Result<GeneratedGroup> {
    let codec = product_action_codec(k, l, caps)?;
    let n = codec.flat_degree() as usize;
    let (dk, dl) = (k.degree(), l.degree());
    let mut gens = Vec::new();
    for &coord in &orbit_representatives(l) {
        for kg in k.generators() {
            let mut images = vec![0; n];
            for (flat, img) in images.iter_mut().enumerate() {
                let StructuredPoint::Tuple(mut ds) = codec.decode(flat) else {
                    unreachable!()
                };
                ds[coord] = kg.image(ds[coord]);
                *img = codec.encode(&StructuredPoint::Tuple(ds))?;
            }
            gens.push(Permutation::from_images(images).expect("base lift is a bijection"));
        }
    }
    for lg in l.generators() {
        let linv = lg.inverse();
        let mut images = vec![0; n];
        for (flat, img) in images.iter_mut().enumerate() {
            let StructuredPoint::Tuple(ds) = codec.decode(flat) else {
                unreachable!()
            };
            let moved: Vec<usize> = (0..dl).map(|i| ds[linv.image(i)]).collect();
            *img = codec.encode(&StructuredPoint::Tuple(moved))?;
        }
        gens.push(Permutation::from_images(images).expect("top lift is a bijection"));
    }
    let _ = dk;
    GeneratedGroup::new(n, gens)
}

fn product_action_codec(k: &GeneratedGroup, l: &GeneratedGroup, caps: &Caps) -> Result<PointCodec> {
    let codec = PointCodec::new(ProductOperator::WreathProduct, k.degree(), l.degree());
    let degree = codec.flat_degree();
    if degree > caps.product_degree as u128 {
        return Err(Error::DegreeCapExceeded {
            degree,
            cap: caps.product_degree,
        });
    }
    Ok(codec)
}

/// The coordinate-fiber decomposition of the product action: one partition
/// per coordinate, whose classes fix that coordinate's value.
///
/// It is preserved by `K up L` and stabilized by the base group.
pub fn standard_decomposition(
    k: &GeneratedGroup,
    l: &GeneratedGroup,
    caps: &Caps,
) -> Result<CartesianDecomposition> {
    let codec = product_action_codec(k, l, caps)?;
    let n = codec.flat_degree() as usize;
    let dl = l.degree();
    let mut partitions = Vec::with_capacity(dl);
    for coord in 0..dl {
        let mut raw = vec![0; n];
        for (flat, slot) in raw.iter_mut().enumerate() {
            let StructuredPoint::Tuple(ds) = codec.decode(flat) else {
                unreachable!()
            };
            *slot = ds[coord];
        }
        partitions.push(BlockSystem::from_class_index(&raw));
    }
    CartesianDecomposition::new(n, partitions)
}

/// Builds the product `K star L`, dispatching on the operator.
pub fn build_product(
    op: ProductOperator,
    k: &GeneratedGroup,
    l: &GeneratedGroup,
    caps: &Caps,
) -> Result<GeneratedGroup> {
    match op {
        ProductOperator::Direct => Ok(direct_product(k, l)),
        ProductOperator::WreathImprimitive => Ok(wreath_imprimitive(k, l)),
        ProductOperator::WreathProduct => wreath_product_action(k, l, caps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, &cycles.iter().map(|c| c.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    fn grp(n: usize, gens: &[Permutation]) -> GeneratedGroup {
        GeneratedGroup::new(n, gens.to_vec()).unwrap()
    }

    fn sym(n: usize) -> GeneratedGroup {
        match n {
            1 => GeneratedGroup::trivial(1),
            2 => grp(2, &[cyc(2, &[&[0, 1]])]),
            _ => grp(
                n,
                &[
                    cyc(n, &[&[0, 1]]),
                    cyc(n, &[&(0..n).collect::<Vec<_>>()[..]]),
                ],
            ),
        }
    }

    fn cyclic(n: usize) -> GeneratedGroup {
        grp(n, &[cyc(n, &[&(0..n).collect::<Vec<_>>()[..]])])
    }

    #[test]
    fn direct_product_s2_s2() {
        let p = direct_product(&sym(2), &sym(2));
        assert_eq!(p.degree(), 4);
        assert_eq!(p.order(), 4u32.into());
        assert_eq!(p.orbits(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn direct_product_with_fixed_point() {
        let k = cyclic(3);
        let p = direct_product(&k, &GeneratedGroup::trivial(1));
        assert_eq!(p.degree(), 4);
        assert_eq!(p.order(), 3u32.into());
        assert_eq!(p.orbit(3).unwrap(), vec![3]);
    }

    #[test]
    fn direct_product_c3_c2() {
        let p = direct_product(&cyclic(3), &cyclic(2));
        assert_eq!(p.degree(), 5);
        assert_eq!(p.order(), 6u32.into());
    }

    #[test]
    fn wreath_imprimitive_c2_c2() {
        let w = wreath_imprimitive(&cyclic(2), &cyclic(2));
        assert_eq!(w.degree(), 4);
        assert_eq!(w.order(), 8u32.into());
        // pairs flatten as delta*|Gamma|+gamma, so the fibers are {0,2},{1,3}
        let system = crate::blocks::minimal_block_system(&w, (0, 2)).unwrap();
        assert_eq!(system.classes(), &[vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn wreath_imprimitive_over_one_point() {
        let k = cyclic(3);
        let w = wreath_imprimitive(&k, &GeneratedGroup::trivial(1));
        assert!(w.group_eq(&k).unwrap());
    }

    #[test]
    fn wreath_imprimitive_s2_s3() {
        let w = wreath_imprimitive(&sym(2), &sym(3));
        assert_eq!(w.degree(), 6);
        assert_eq!(w.order(), 48u32.into());
    }

    #[test]
    fn wreath_imprimitive_intransitive_top_keeps_closed_form() {
        // top <(0 1)> on 3 points has orbits {0,1},{2}: order must still be 2^3 * 2
        let top = grp(3, &[cyc(3, &[&[0, 1]])]);
        let w = wreath_imprimitive(&sym(2), &top);
        assert_eq!(w.order(), 16u32.into());
    }

    #[test]
    fn product_action_s2_s2() {
        let w = wreath_product_action(&sym(2), &sym(2), &Caps::default()).unwrap();
        assert_eq!(w.degree(), 4);
        assert_eq!(w.order(), 8u32.into());
    }

    #[test]
    fn product_action_s2_s2_is_the_grid_dihedral() {
        let w = wreath_product_action(&sym(2), &sym(2), &Caps::default()).unwrap();
        let dihedral = grp(4, &[cyc(4, &[&[0, 1, 3, 2]]), cyc(4, &[&[1, 2]])]);
        assert!(w.group_eq(&dihedral).unwrap());
    }

    #[test]
    fn product_action_s3_s2() {
        let w = wreath_product_action(&sym(3), &sym(2), &Caps::default()).unwrap();
        assert_eq!(w.degree(), 9);
        assert_eq!(w.order(), 72u32.into());
    }

    #[test]
    fn product_action_respects_degree_cap() {
        let caps = Caps {
            product_degree: 8,
            ..Caps::default()
        };
        let err = wreath_product_action(&sym(3), &sym(2), &caps).unwrap_err();
        assert!(matches!(err, Error::DegreeCapExceeded { degree: 9, .. }));
    }

    #[test]
    fn standard_decomposition_of_the_grid() {
        let d = standard_decomposition(&sym(2), &sym(2), &Caps::default()).unwrap();
        let classes: Vec<_> = d.partitions().iter().map(|p| p.classes().to_vec()).collect();
        assert_eq!(
            classes,
            vec![
                vec![vec![0, 1], vec![2, 3]],
                vec![vec![0, 2], vec![1, 3]],
            ]
        );
    }

    #[test]
    fn standard_decomposition_single_coordinate_is_trivial() {
        let d = standard_decomposition(&sym(3), &GeneratedGroup::trivial(1), &Caps::default())
            .unwrap();
        assert_eq!(d.partitions().len(), 1);
        assert_eq!(d.partitions()[0].class_count(), 3);
        assert!(d.is_trivial());
    }

    #[test]
    fn standard_decomposition_of_the_cube() {
        let d = standard_decomposition(&sym(2), &sym(3), &Caps::default()).unwrap();
        assert_eq!(d.partitions().len(), 3);
        for p in d.partitions() {
            assert_eq!(p.class_count(), 2);
            assert!(p.classes().iter().all(|c| c.len() == 4));
        }
    }

    #[test]
    fn standard_decomposition_is_preserved_and_base_stabilized() {
        let k = sym(2);
        let l = sym(3);
        let caps = Caps::default();
        let w = wreath_product_action(&k, &l, &caps).unwrap();
        let d = standard_decomposition(&k, &l, &caps).unwrap();
        let partition_keys: Vec<Vec<usize>> = d
            .partitions()
            .iter()
            .map(|p| p.class_index().to_vec())
            .collect();
        let image_key = |p: &crate::blocks::BlockSystem, g: &Permutation| {
            let ginv = g.inverse();
            let raw: Vec<usize> = (0..p.degree()).map(|x| p.class_of(ginv.image(x))).collect();
            crate::blocks::BlockSystem::from_class_index(&raw)
                .class_index()
                .to_vec()
        };
        // the whole product permutes the partitions
        for gen in w.generators() {
            for p in d.partitions() {
                assert!(partition_keys.contains(&image_key(p, gen)));
            }
        }
        // the base group fixes each partition: lift a K-generator into
        // every coordinate and check it stabilizes all of them
        for coord in 0..l.degree() {
            for kg in k.generators() {
                let mut images = vec![0usize; w.degree()];
                let codec = PointCodec::new(ProductOperator::WreathProduct, 2, 3);
                for (flat, img) in images.iter_mut().enumerate() {
                    let StructuredPoint::Tuple(mut ds) = codec.decode(flat) else {
                        unreachable!()
                    };
                    ds[coord] = kg.image(ds[coord]);
                    *img = codec.encode(&StructuredPoint::Tuple(ds)).unwrap();
                }
                let lifted = Permutation::from_images(images).unwrap();
                for p in d.partitions() {
                    assert_eq!(image_key(p, &lifted), p.class_index().to_vec());
                }
            }
        }
    }

    #[test]
    fn codec_roundtrip() {
        let codecs = [
            PointCodec::new(ProductOperator::Direct, 3, 4),
            PointCodec::new(ProductOperator::WreathImprimitive, 3, 4),
            PointCodec::new(ProductOperator::WreathProduct, 3, 4),
        ];
        for codec in &codecs {
            for flat in 0..codec.flat_degree() as usize {
                let point = codec.decode(flat);
                assert_eq!(codec.encode(&point).unwrap(), flat);
            }
        }
    }
}
