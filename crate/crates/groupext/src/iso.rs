//! Proper isomorphism of extensions: groupoid isomorphisms of the totals
//! that fix the kernel inclusion and commute with the projections.
//!
//! Two independent deciders are provided. `properly_isomorphic` extracts
//! cocycles along canonical sections and solves the coboundary equation
//! exactly, so its verdicts are certificates either way; the witness it
//! returns is verified before being handed out. `properly_isomorphic_search`
//! is a direct backtracking search over section images with a node budget,
//! kept deliberately free of cohomology so the two routes can be played
//! against each other.

use crate::abelian::Elem;
use crate::cohomology::{canonical_section, cocycle_from_extension, cohomologous, kernel_part, Section};
use crate::error::{Error, Result};
use crate::extension::Extension;
use crate::groupoid::GroupoidHom;
use crate::report::ValidationReport;

pub const DEFAULT_NODE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum IsoResult {
    /// A verified proper isomorphism from the first total to the second.
    Witness(GroupoidHom),
    NotIsomorphic,
    /// The search budget ran out before a verdict.
    Unknown,
}

impl IsoResult {
    pub fn is_witness(&self) -> bool {
        matches!(self, IsoResult::Witness(_))
    }
}

/// Check that `f` is a proper isomorphism from `e1` to `e2`.
pub fn verify_proper_iso(e1: &Extension, e2: &Extension, f: &GroupoidHom) -> ValidationReport {
    let mut report = ValidationReport::new("proper-isomorphism");

    let functor = f.check();
    if functor.is_valid() {
        report.check_all("is-functor", Vec::new());
    } else {
        let first = functor.first_failure().expect("invalid report has a failure");
        report.check_all(
            "is-functor",
            vec![format!("{}: {}", first.name, first.witness.clone().unwrap_or_default())],
        );
    }

    report.check_all(
        "is-bijective",
        if f.is_bijective() { Vec::new() } else { vec!["arrow map is not a bijection".into()] },
    );

    let mut witnesses = Vec::new();
    for sigma in 0..e1.total().n_arrows() {
        if e2.p(f.apply(sigma)) != e1.p(sigma) {
            witnesses.push(format!(
                "projection broken at {}",
                e1.total().arrow_id(sigma)
            ));
        }
    }
    report.check_all("commutes-with-projections", witnesses);

    let mut witnesses = Vec::new();
    for u in 0..e1.base().n_units() {
        let Ok(elems) = e1.kernel().fiber(u).elements() else {
            witnesses.push(format!("fiber at {} not finite", e1.base().unit_id(u)));
            continue;
        };
        for a in elems {
            match (e1.iota(u, &a), e2.iota(u, &a)) {
                (Ok(i1), Ok(i2)) if f.apply(i1) == i2 => {}
                _ => witnesses.push(format!(
                    "inclusion moved at unit {}, element {a:?}",
                    e1.base().unit_id(u)
                )),
            }
        }
    }
    report.check_all("fixes-kernel-inclusion", witnesses);

    report
}

/// Decide proper isomorphism by exact cohomology: extract cocycles along
/// canonical sections and solve the coboundary equation. Both verdicts are
/// certificates; a witness is verified before being returned.
pub fn properly_isomorphic(e1: &Extension, e2: &Extension) -> Result<IsoResult> {
    if !e1.same_context(e2) {
        return Err(Error::Precondition(
            "proper isomorphism is only defined over a shared base, kernel, and action".into(),
        ));
    }
    // Identical tables: the identity is a witness.
    if e1.total().arrow_ids() == e2.total().arrow_ids() && e1.total() == e2.total() {
        let id = GroupoidHom::identity(e1.total());
        if verify_proper_iso(e1, e2, &id).is_valid() {
            return Ok(IsoResult::Witness(id));
        }
    }
    let s1 = canonical_section(e1)?;
    let s2 = canonical_section(e2)?;
    let phi1 = cocycle_from_extension(e1, &s1)?;
    let phi2 = cocycle_from_extension(e2, &s2)?;
    match cohomologous(&phi1, &phi2)? {
        None => Ok(IsoResult::NotIsomorphic),
        Some(c) => {
            // τ₂'(γ) = ι₂(c(γ)) τ₂(γ) turns the cochain into a section image.
            let base = e1.base();
            let mut tau2 = Vec::with_capacity(base.n_arrows());
            for gamma in 0..base.n_arrows() {
                let shifted = e2
                    .total()
                    .compose(e2.iota(base.tgt(gamma), &c.value(gamma))?, s2.apply(gamma))
                    .ok_or_else(|| Error::Invalid("section shift failed to compose".into()))?;
                tau2.push(shifted);
            }
            let hom = hom_from_section_images(e1, e2, &s1, &tau2)?;
            let check = verify_proper_iso(e1, e2, &hom);
            if !check.is_valid() {
                return Err(Error::Invalid(
                    "cohomological witness failed verification; extensions are inconsistent".into(),
                ));
            }
            Ok(IsoResult::Witness(hom))
        }
    }
}

/// Decide proper isomorphism by backtracking over possible section images,
/// one base arrow at a time, with multiplicativity pruning. Returns
/// `Unknown` when more than `max_nodes` assignments would be explored.
/// No cohomology is consulted; witnesses are verified before return.
pub fn properly_isomorphic_search(
    e1: &Extension,
    e2: &Extension,
    max_nodes: u64,
) -> Result<IsoResult> {
    if !e1.same_context(e2) {
        return Err(Error::Precondition(
            "proper isomorphism is only defined over a shared base, kernel, and action".into(),
        ));
    }
    let base = e1.base();
    let s1 = canonical_section(e1)?;

    // Unit arrows are forced; the free choices sit over non-unit base arrows.
    let mut order: Vec<usize> = (0..base.n_arrows()).filter(|&g| !base.is_unit_arrow(g)).collect();
    order.sort_by(|&a, &b| base.arrow_id(a).cmp(base.arrow_id(b)));
    let mut assigned: Vec<Option<usize>> = vec![None; base.n_arrows()];
    for gamma in 0..base.n_arrows() {
        if base.is_unit_arrow(gamma) {
            let u = base.tgt(gamma);
            let zero = e1.kernel().fiber(u).zero();
            assigned[gamma] = Some(e2.iota(u, &zero)?);
        }
    }
    let pairs = base.composable_pairs();

    struct Frame<'a> {
        e1: &'a Extension,
        e2: &'a Extension,
        s1: &'a Section,
        order: &'a [usize],
        pairs: &'a [(usize, usize)],
        nodes: u64,
        cap: u64,
    }

    fn consistent(f: &Frame, assigned: &[Option<usize>]) -> bool {
        let base = f.e1.base();
        let t2 = f.e2.total();
        for &(g1, g2) in f.pairs {
            let (Some(a1), Some(a2)) = (assigned[g1], assigned[g2]) else { continue };
            let g12 = base.compose(g1, g2).expect("composable");
            let Some(a12) = assigned[g12] else { continue };
            // τ'(γ₁)τ'(γ₂) must differ from τ'(γ₁γ₂) by ι(φ₁(γ₁,γ₂)).
            let Some(lhs) = t2.compose(a1, a2) else { return false };
            let defect = f
                .e1
                .total()
                .compose(f.s1.apply(g1), f.s1.apply(g2))
                .and_then(|x| f.e1.total().compose(x, f.e1.total().inv(f.s1.apply(g12))));
            let Some(defect) = defect else { return false };
            let Some((u, a)) = f.e1.iota_preimage(defect) else { return false };
            let Ok(expect) = f.e2.iota(*u, a) else { return false };
            if t2.compose(expect, a12) != Some(lhs) {
                return false;
            }
        }
        true
    }

    fn search(f: &mut Frame, assigned: &mut Vec<Option<usize>>, depth: usize) -> Result<IsoResult> {
        if depth == f.order.len() {
            let tau2: Vec<usize> = assigned.iter().map(|x| x.expect("complete")).collect();
            let hom = hom_from_section_images(f.e1, f.e2, f.s1, &tau2)?;
            if verify_proper_iso(f.e1, f.e2, &hom).is_valid() {
                return Ok(IsoResult::Witness(hom));
            }
            return Ok(IsoResult::NotIsomorphic);
        }
        let gamma = f.order[depth];
        let mut candidates = f.e2.proj_hom().fiber(gamma);
        candidates.sort_by(|&a, &b| f.e2.total().arrow_id(a).cmp(f.e2.total().arrow_id(b)));
        for cand in candidates {
            f.nodes += 1;
            if f.nodes > f.cap {
                return Err(Error::SearchCapExceeded { cap: f.cap });
            }
            assigned[gamma] = Some(cand);
            if consistent(f, assigned) {
                match search(f, assigned, depth + 1)? {
                    IsoResult::NotIsomorphic => {}
                    other => return Ok(other),
                }
            }
            assigned[gamma] = None;
        }
        Ok(IsoResult::NotIsomorphic)
    }

    let mut frame = Frame { e1, e2, s1: &s1, order: &order, pairs: &pairs, nodes: 0, cap: max_nodes };
    match search(&mut frame, &mut assigned, 0) {
        Ok(result) => Ok(result),
        Err(Error::SearchCapExceeded { .. }) => Ok(IsoResult::Unknown),
        Err(e) => Err(e),
    }
}

/// Assemble the arrow map `ι₁(a)τ₁(γ) ↦ ι₂(a)τ₂'(γ)` from a choice of
/// section images in the second total.
fn hom_from_section_images(
    e1: &Extension,
    e2: &Extension,
    s1: &Section,
    tau2: &[usize],
) -> Result<GroupoidHom> {
    let t1 = e1.total();
    let t2 = e2.total();
    let map: Vec<usize> = (0..t1.n_arrows())
        .map(|sigma| {
            let gamma = e1.p(sigma);
            let a: Elem = kernel_part(e1, s1, sigma)?;
            let u = e1.base().tgt(gamma);
            t2.compose(e2.iota(u, &a)?, tau2[gamma])
                .ok_or_else(|| Error::Invalid("candidate image fails to compose".into()))
        })
        .collect::<Result<_>>()?;
    GroupoidHom::from_arrow_map(t1, t2, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FiniteAbelianGroup;
    use crate::bundle::{GroupBundle, GroupoidAction};
    use crate::cohomology::{coboundary, extension_from_cocycle, h2, Cochain1, Cocycle2};
    use crate::groupoid::cyclic_group;

    fn trivial_action(n: i64, m: i64) -> GroupoidAction {
        let g = cyclic_group(n);
        let b = GroupBundle::constant(g.unit_ids(), &FiniteAbelianGroup::cyclic(m)).unwrap();
        GroupoidAction::trivial(&g, &b).unwrap()
    }

    #[test]
    fn cohomologous_cocycles_give_witnesses() {
        let act = trivial_action(2, 2);
        let h = h2(&act).unwrap();
        let phi = &h.basis[0];
        let c = Cochain1::new(&act, vec![("1".into(), Elem(vec![1]))]).unwrap();
        let shifted = phi.add(&coboundary(&c).unwrap()).unwrap();
        let e1 = extension_from_cocycle(phi).unwrap();
        let e2 = extension_from_cocycle(&shifted).unwrap();
        let result = properly_isomorphic(&e1, &e2).unwrap();
        let IsoResult::Witness(f) = result else { panic!("expected a witness") };
        assert!(verify_proper_iso(&e1, &e2, &f).is_valid());
    }

    #[test]
    fn distinct_classes_are_refused_by_both_routes() {
        let act = trivial_action(2, 2);
        let h = h2(&act).unwrap();
        let e1 = extension_from_cocycle(&h.basis[0]).unwrap();
        let e2 = extension_from_cocycle(&Cocycle2::zero(&act)).unwrap();
        assert!(matches!(properly_isomorphic(&e1, &e2).unwrap(), IsoResult::NotIsomorphic));
        assert!(matches!(
            properly_isomorphic_search(&e1, &e2, DEFAULT_NODE_CAP).unwrap(),
            IsoResult::NotIsomorphic
        ));
    }

    #[test]
    fn search_agrees_on_witnesses() {
        let act = trivial_action(4, 2);
        let h = h2(&act).unwrap();
        let phi = &h.basis[0];
        let c = Cochain1::new(&act, vec![("1".into(), Elem(vec![1])), ("3".into(), Elem(vec![1]))])
            .unwrap();
        let shifted = phi.add(&coboundary(&c).unwrap()).unwrap();
        let e1 = extension_from_cocycle(phi).unwrap();
        let e2 = extension_from_cocycle(&shifted).unwrap();
        let result = properly_isomorphic_search(&e1, &e2, DEFAULT_NODE_CAP).unwrap();
        let IsoResult::Witness(f) = result else { panic!("expected a witness") };
        assert!(verify_proper_iso(&e1, &e2, &f).is_valid());
    }

    #[test]
    fn exhausted_budget_reports_unknown() {
        let act = trivial_action(4, 2);
        let h = h2(&act).unwrap();
        let e1 = extension_from_cocycle(&h.basis[0]).unwrap();
        let e2 = extension_from_cocycle(&h.basis[0]).unwrap();
        assert!(matches!(
            properly_isomorphic_search(&e1, &e2, 1).unwrap(),
            IsoResult::Unknown
        ));
    }

    #[test]
    fn identity_fast_path_triggers_on_equal_tables() {
        let act = trivial_action(3, 2);
        let e = extension_from_cocycle(&Cocycle2::zero(&act)).unwrap();
        let result = properly_isomorphic(&e, &e.clone()).unwrap();
        assert!(result.is_witness());
    }
}
