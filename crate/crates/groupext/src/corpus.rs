//! Named desk-scale example families.
//!
//! Everything here is small enough to enumerate exhaustively and is used by
//! the verification suites, the command-line tools, and the tests. Names are
//! structural (`z4-by-z2-class-1`, `pair3-z2`, …) and stable: reports refer
//! to them.

use crate::abelian::{Elem, FiniteAbelianGroup};
use crate::algebra::ConvolutionAlgebra;
use crate::bundle::{BundleHom, GroupBundle, GroupoidAction};
use crate::cohomology::{extension_from_cocycle, h2, Cocycle2};
use crate::error::Result;
use crate::extension::{semidirect, Extension};
use crate::groupoid::{
    abelian_group, cyclic_group, disjoint_union, orbit_partition, pair_groupoid,
    transformation_groupoid, FiniteGroupoid, GSpace, InvariantPartition,
};

#[derive(Debug, Clone)]
pub struct NamedExtension {
    pub name: String,
    pub ext: Extension,
}

/// A base-and-kernel context together with one extension per cohomology
/// class.
#[derive(Debug, Clone)]
pub struct ContextFamily {
    pub name: String,
    pub action: GroupoidAction,
    pub extensions: Vec<NamedExtension>,
}

fn trivial_constant(g: &FiniteGroupoid, m: i64) -> Result<GroupoidAction> {
    let b = GroupBundle::constant(g.unit_ids(), &FiniteAbelianGroup::cyclic(m))?;
    GroupoidAction::trivial(g, &b)
}

/// Cyclic base, cyclic constant kernel, trivial action.
pub fn cyclic_context(n: i64, m: i64) -> Result<GroupoidAction> {
    trivial_constant(&cyclic_group(n), m)
}

/// All classes of extensions for one context, one representative each.
pub fn context_family(name: &str, action: &GroupoidAction) -> Result<ContextFamily> {
    let h = h2(action)?;
    let mut extensions = Vec::new();
    for (i, phi) in h.class_representatives()?.into_iter().enumerate() {
        extensions.push(NamedExtension {
            name: format!("{name}-class-{i}"),
            ext: extension_from_cocycle(&phi)?,
        });
    }
    Ok(ContextFamily { name: name.to_string(), action: action.clone(), extensions })
}

/// Cyclic-by-cyclic contexts for bases of 2..6 arrows and kernel exponents
/// 2..4, each with every cohomology class realized: 27 extensions in all.
pub fn cyclic_families() -> Result<Vec<ContextFamily>> {
    let mut out = Vec::new();
    for n in 2..=6 {
        for m in 2..=4 {
            let action = cyclic_context(n, m)?;
            out.push(context_family(&format!("z{n}-by-z{m}"), &action)?);
        }
    }
    Ok(out)
}

/// The Klein-four base with a `Z2` kernel: eight classes, among them the
/// dihedral and quaternion totals.
pub fn klein_family() -> Result<ContextFamily> {
    let v = FiniteAbelianGroup::from_orders(&[2, 2])?;
    let g = abelian_group(&v)?;
    let action = trivial_constant(&g, 2)?;
    context_family("v4-by-z2", &action)
}

/// `Z2` acting on `Z3` by negation; the semidirect product is the smallest
/// nonabelian total.
pub fn sign_action() -> Result<GroupoidAction> {
    let g = cyclic_group(2);
    let b = GroupBundle::constant(g.unit_ids(), &FiniteAbelianGroup::cyclic(3))?;
    GroupoidAction::new(
        &g,
        &b,
        vec![("0".into(), vec![vec![1]]), ("1".into(), vec![vec![-1]])],
    )
}

pub fn sign_extension() -> Result<NamedExtension> {
    Ok(NamedExtension { name: "s3-sign".into(), ext: semidirect(&sign_action()?)? })
}

/// `Z3 × Z3` base with central `Z3` kernel and the bilinear cocycle
/// `φ((a₁,b₁),(a₂,b₂)) = b₁·a₂`; the total is the 27-element group of
/// exponent three.
pub fn heisenberg_context() -> Result<GroupoidAction> {
    let h = FiniteAbelianGroup::from_orders(&[3, 3])?;
    trivial_constant(&abelian_group(&h)?, 3)
}

pub fn heisenberg_cocycle() -> Result<Cocycle2> {
    let action = heisenberg_context()?;
    let h = FiniteAbelianGroup::from_orders(&[3, 3])?;
    let mut entries = Vec::new();
    for x in h.elements()? {
        for y in h.elements()? {
            let v = (x.0[1] * y.0[0]).rem_euclid(3);
            if v != 0 {
                entries.push((h.elem_id(&x), h.elem_id(&y), Elem(vec![v])));
            }
        }
    }
    Cocycle2::new(&action, entries)
}

pub fn heisenberg_extension() -> Result<NamedExtension> {
    Ok(NamedExtension {
        name: "heisenberg-3".into(),
        ext: extension_from_cocycle(&heisenberg_cocycle()?)?,
    })
}

/// Pair-groupoid base with a constant kernel and trivial action.
pub fn pair_context(k: i64, m: i64) -> Result<GroupoidAction> {
    trivial_constant(&pair_groupoid(k), m)
}

/// The bilinear twist `ω((a,b),(c,d)) = a·d` on `Z_n × Z_n`, valued in `Z_n`.
pub fn bicharacter_cocycle(n: i64) -> Result<Cocycle2> {
    let h = FiniteAbelianGroup::from_orders(&[n, n])?;
    let action = trivial_constant(&abelian_group(&h)?, n)?;
    let mut entries = Vec::new();
    for x in h.elements()? {
        for y in h.elements()? {
            let v = (x.0[0] * y.0[1]).rem_euclid(n);
            if v != 0 {
                entries.push((h.elem_id(&x), h.elem_id(&y), Elem(vec![v])));
            }
        }
    }
    Cocycle2::new(&action, entries)
}

/// The twisted algebra of the bilinear twist together with the diagonal
/// subalgebra spanned by the first factor; the masa candidate.
pub fn bicharacter_masa(n: i64) -> Result<(ConvolutionAlgebra, Vec<usize>)> {
    let omega = bicharacter_cocycle(n)?;
    let alg = crate::algebra::twisted_algebra(&omega, 1)?;
    let h = FiniteAbelianGroup::from_orders(&[n, n])?;
    let sub = h
        .elements()?
        .iter()
        .filter(|e| e.0[1] == 0)
        .map(|e| alg.index_of(&h.elem_id(e)))
        .collect::<Result<Vec<_>>>()?;
    Ok((alg, sub))
}

/// Central extensions whose convolution algebras are decomposed over the
/// characters of the kernel.
pub fn central_decomposition_family() -> Result<Vec<NamedExtension>> {
    let mut out = Vec::new();
    // split Z2-by-Z2
    let act = cyclic_context(2, 2)?;
    out.push(NamedExtension {
        name: "z2-by-z2-split".into(),
        ext: extension_from_cocycle(&Cocycle2::zero(&act))?,
    });
    // the cyclic total of order four
    let h = h2(&act)?;
    out.push(NamedExtension {
        name: "z4-over-z2".into(),
        ext: extension_from_cocycle(&h.basis[0])?,
    });
    // Klein kernel over a Z2 base, one nontrivial class
    let v = FiniteAbelianGroup::from_orders(&[2, 2])?;
    let g = cyclic_group(2);
    let b = GroupBundle::constant(g.unit_ids(), &v)?;
    let act = GroupoidAction::trivial(&g, &b)?;
    let h = h2(&act)?;
    out.push(NamedExtension {
        name: "z2-by-v4-class-1".into(),
        ext: extension_from_cocycle(&h.basis[0])?,
    });
    out.push(heisenberg_extension()?);
    Ok(out)
}

/// Extensions fed to the dual-side construction.
pub fn dual_side_family() -> Result<Vec<NamedExtension>> {
    let act = cyclic_context(2, 2)?;
    let h = h2(&act)?;
    Ok(vec![
        NamedExtension {
            name: "z2-by-z2-split".into(),
            ext: extension_from_cocycle(&Cocycle2::zero(&act))?,
        },
        NamedExtension { name: "z4-over-z2".into(), ext: extension_from_cocycle(&h.basis[0])? },
        sign_extension()?,
        heisenberg_extension()?,
    ])
}

/// One pushout-functoriality test case: an extension and two composable
/// equivariant bundle homs.
#[derive(Debug, Clone)]
pub struct FunctorialityInstance {
    pub name: String,
    pub ext: Extension,
    pub f: BundleHom,
    pub mid: GroupoidAction,
    pub g: BundleHom,
    pub top: GroupoidAction,
}

fn scaled_hom(
    ext: &Extension,
    mid_fiber: i64,
    k1: i64,
    top_fiber: i64,
    k2: i64,
) -> Result<(BundleHom, GroupoidAction, BundleHom, GroupoidAction)> {
    let base = ext.base();
    let mid_bundle = GroupBundle::constant(base.unit_ids(), &FiniteAbelianGroup::cyclic(mid_fiber))?;
    let top_bundle = GroupBundle::constant(base.unit_ids(), &FiniteAbelianGroup::cyclic(top_fiber))?;
    let mid = GroupoidAction::trivial(base, &mid_bundle)?;
    let top = GroupoidAction::trivial(base, &top_bundle)?;
    let f = BundleHom::constant(ext.kernel(), &mid_bundle, vec![vec![k1]])?;
    let g = BundleHom::constant(&mid_bundle, &top_bundle, vec![vec![k2]])?;
    Ok((f, mid, g, top))
}

/// Twelve chained-pushout instances over assorted bases.
pub fn functoriality_family() -> Result<Vec<FunctorialityInstance>> {
    let mut out = Vec::new();
    let mut push = |name: &str, ext: Extension, data: (BundleHom, GroupoidAction, BundleHom, GroupoidAction)| {
        out.push(FunctorialityInstance {
            name: name.to_string(),
            ext,
            f: data.0,
            mid: data.1,
            g: data.2,
            top: data.3,
        });
    };

    let z2 = cyclic_context(2, 2)?;
    let h = h2(&z2)?;
    let e = extension_from_cocycle(&h.basis[0])?;
    push("z2-class1-up-down", e.clone(), scaled_hom(&e, 4, 2, 2, 1)?);
    push("z2-class1-id-up", e.clone(), scaled_hom(&e, 2, 1, 4, 2)?);
    let e0 = extension_from_cocycle(&Cocycle2::zero(&z2))?;
    push("z2-split-up-down", e0.clone(), scaled_hom(&e0, 4, 2, 2, 1)?);

    let z3 = cyclic_context(3, 3)?;
    let e = extension_from_cocycle(&h2(&z3)?.class_representatives()?[1])?;
    push("z3-class1-scale-scale", e.clone(), scaled_hom(&e, 3, 2, 3, 2)?);

    let z4 = cyclic_context(4, 2)?;
    let e = extension_from_cocycle(&h2(&z4)?.basis[0])?;
    push("z4-class1-up-auto", e.clone(), scaled_hom(&e, 4, 2, 4, 3)?);

    let z44 = cyclic_context(4, 4)?;
    let e = extension_from_cocycle(&h2(&z44)?.basis[0])?;
    push("z4-by-z4-class1-down-id", e.clone(), scaled_hom(&e, 2, 1, 2, 1)?);

    let z64 = cyclic_context(6, 4)?;
    let e = extension_from_cocycle(&h2(&z64)?.basis[0])?;
    push("z6-class1-down-up", e.clone(), scaled_hom(&e, 2, 1, 4, 2)?);

    let z5 = cyclic_context(5, 2)?;
    let e = extension_from_cocycle(&Cocycle2::zero(&z5))?;
    push("z5-split-up-auto", e.clone(), scaled_hom(&e, 4, 2, 4, 3)?);

    // sign action: scalings are equivariant for the negation action
    let sign = sign_action()?;
    let e = semidirect(&sign)?;
    let base = e.base().clone();
    let b3 = GroupBundle::constant(base.unit_ids(), &FiniteAbelianGroup::cyclic(3))?;
    let mid = GroupoidAction::new(
        &base,
        &b3,
        vec![("0".into(), vec![vec![1]]), ("1".into(), vec![vec![-1]])],
    )?;
    let f = BundleHom::constant(e.kernel(), &b3, vec![vec![2]])?;
    let g = BundleHom::constant(&b3, &b3, vec![vec![2]])?;
    push(
        "s3-sign-scale-scale",
        e,
        (f, mid.clone(), g, mid.clone()),
    );

    let klein = klein_family()?;
    let e = klein.extensions[1].ext.clone();
    push("v4-base-id-up", e.clone(), scaled_hom(&e, 2, 1, 4, 2)?);

    let pair = pair_context(3, 4)?;
    let e = extension_from_cocycle(&Cocycle2::zero(&pair))?;
    push("pair3-z4-down-id", e.clone(), scaled_hom(&e, 2, 1, 2, 1)?);

    let e = heisenberg_extension()?.ext;
    push("heisenberg-scale-scale", e.clone(), scaled_hom(&e, 3, 2, 3, 2)?);

    Ok(out)
}

/// Groupoids with invariant partitions of their unit spaces, for the
/// decomposition-by-restriction checks.
pub fn partition_family() -> Result<Vec<(String, FiniteGroupoid, InvariantPartition)>> {
    let mut out = Vec::new();

    let c2 = cyclic_group(2);
    let p2 = pair_groupoid(2);
    let g = disjoint_union(&[("a", &c2), ("b", &p2)])?;
    let part = orbit_partition(&g);
    out.push(("two-components".to_string(), g, part));

    let c3 = cyclic_group(3);
    let c4 = cyclic_group(4);
    let p3 = pair_groupoid(3);
    let g = disjoint_union(&[("a", &c3), ("b", &c4), ("c", &p3)])?;
    let part = orbit_partition(&g);
    out.push(("three-components".to_string(), g, part));

    // Z2 translating two disjoint copies of itself: two pair-groupoid orbits
    let base = cyclic_group(2);
    let points: Vec<(String, String)> = (0..4).map(|i| (format!("x{i}"), "u".into())).collect();
    let space = GSpace::from_fn(&base, points, |p, a| {
        let i: i64 = p[1..].parse().unwrap();
        let k: i64 = a.parse().unwrap();
        format!("x{}", (i / 2) * 2 + ((i % 2) + k).rem_euclid(2))
    })?;
    let (g, _) = transformation_groupoid(&base, &space)?;
    let part = orbit_partition(&g);
    out.push(("translation-orbits".to_string(), g, part));

    // a coarser invariant partition than the orbits
    let g = disjoint_union(&[("a", &c2), ("b", &cyclic_group(2)), ("c", &p2)])?;
    let labels = g
        .unit_ids()
        .iter()
        .map(|u| {
            let cls = if u.starts_with("c:") { "pairs" } else { "groups" };
            (u.clone(), cls.to_string())
        })
        .collect();
    let part = InvariantPartition { labels };
    out.push(("coarse-labels".to_string(), g, part));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::validate_cocycle;
    use crate::extension::validate_extension;

    #[test]
    fn cyclic_families_have_27_extensions() {
        let families = cyclic_families().unwrap();
        assert_eq!(families.len(), 15);
        let total: usize = families.iter().map(|f| f.extensions.len()).sum();
        assert_eq!(total, 27);
        for fam in &families {
            for ne in &fam.extensions {
                assert!(validate_extension(&ne.ext).is_valid(), "{}", ne.name);
                assert!(ne.ext.base().n_arrows() <= 6);
                assert!(ne.ext.kernel().joint_exponent().unwrap() <= 4);
            }
        }
    }

    #[test]
    fn klein_family_contains_dihedral_and_quaternion_totals() {
        let fam = klein_family().unwrap();
        assert_eq!(fam.extensions.len(), 8);
        let mut involution_counts = Vec::new();
        for ne in &fam.extensions {
            let t = ne.ext.total();
            assert_eq!(t.n_arrows(), 8);
            let invs = (0..8)
                .filter(|&a| !t.is_unit_arrow(a) && t.compose(a, a).map(|s| t.is_unit_arrow(s)) == Some(true))
                .count();
            involution_counts.push(invs);
        }
        // quaternion total: a single involution; dihedral total: five
        assert!(involution_counts.contains(&1));
        assert!(involution_counts.contains(&5));
    }

    #[test]
    fn heisenberg_total_is_nonabelian_of_exponent_three() {
        let ne = heisenberg_extension().unwrap();
        assert!(validate_cocycle(&heisenberg_cocycle().unwrap()).is_valid());
        let t = ne.ext.total();
        assert_eq!(t.n_arrows(), 27);
        let noncomm =
            (0..27).any(|x| (0..27).any(|y| t.compose(x, y) != t.compose(y, x)));
        assert!(noncomm);
        for a in 0..27 {
            let cube = t.compose(t.compose(a, a).unwrap(), a).unwrap();
            assert!(t.is_unit_arrow(cube));
        }
    }

    #[test]
    fn functoriality_family_is_composable() {
        let family = functoriality_family().unwrap();
        assert!(family.len() >= 10);
        for inst in &family {
            assert!(inst.f.check(inst.ext.action(), &inst.mid).is_valid(), "{}", inst.name);
            assert!(inst.g.check(&inst.mid, &inst.top).is_valid(), "{}", inst.name);
        }
    }

    #[test]
    fn partition_family_partitions_validate() {
        for (name, g, part) in partition_family().unwrap() {
            assert!(part.check(&g).is_valid(), "{name}");
            assert!(part.label_set().len() >= 2, "{name}");
        }
    }

    #[test]
    fn masa_candidates_are_diagonals() {
        for n in [2, 3] {
            let (alg, sub) = bicharacter_masa(n).unwrap();
            assert_eq!(alg.dim() as i64, n * n);
            assert_eq!(sub.len() as i64, n);
        }
    }
}
