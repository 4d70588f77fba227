//! Extensions of a groupoid by a bundle of abelian groups, and the calculus
//! that moves between them.
//!
//! An extension is a surjection `p : Σ → G` together with a fiberwise
//! injection `ι : A → Σ` whose image is exactly `ker p`, compatible with the
//! given action in the sense that `σ ι(a) σ⁻¹ = ι(p(σ) · a)`. All of that
//! is stored as finite tables and checked by [`validate_extension`].
//!
//! The constructions follow the finite model throughout:
//!
//! * `semidirect` realizes `A ⋊ G` with `(a₁|γ₁)(a₂|γ₂) = (a₁ + γ₁·a₂ | γ₁γ₂)`;
//! * `pushout` along a bundle hom `f : A → B` is built literally as
//!   `(B ⋊ G) ×_G Σ` modulo the wide normal subgroupoid `θ(A)`,
//!   `θ(a) = ((−f(a)|e), ι(a))`, so the normality the construction relies on
//!   is verified rather than assumed;
//! * `baer_sum` is the pushout of the fibered product along the fold map;
//! * `t_groupoid` builds the dual-side extension of `Â ⋊ G` by the constant
//!   root-of-unity bundle in two independent ways (pushout of the lifted
//!   extension along the pairing, and an explicit triple quotient) and insists
//!   the two results are properly isomorphic before handing either back.

use crate::abelian::Elem;
use crate::abelian::FiniteAbelianGroup;
use crate::bundle::{
    actions_agree, diagonal_action, dual_bundle, fibered_product_bundle, nabla, validate_action,
    BundleHom, BundleSum, DualBundle, GroupBundle, GroupoidAction,
};
use crate::error::{Error, Result};
use crate::groupoid::{
    fibered_product, pair_id, quotient_by_normal_subgroupoid, relabel_units, split_pair_id,
    transformation_groupoid, FiniteGroupoid, GSpace, GroupoidHom,
};
use crate::report::ValidationReport;
use std::collections::{BTreeMap, HashMap};

/// Fiberwise injection `A → Σ`, with both directions materialized.
#[derive(Debug, Clone)]
pub struct BundleInjection {
    fwd: Vec<HashMap<Elem, usize>>,
    rev: HashMap<usize, (usize, Elem)>,
}

impl BundleInjection {
    fn new(n_units: usize) -> Self {
        BundleInjection { fwd: vec![HashMap::new(); n_units], rev: HashMap::new() }
    }

    fn insert(&mut self, unit: usize, elem: Elem, arrow: usize) -> Result<()> {
        if self.fwd[unit].insert(elem.clone(), arrow).is_some() {
            return Err(Error::Invalid(format!("duplicate inclusion entry at unit {unit}")));
        }
        if let Some(prev) = self.rev.insert(arrow, (unit, elem)) {
            return Err(Error::Invalid(format!(
                "inclusion not injective: arrow hit from unit {} twice",
                prev.0
            )));
        }
        Ok(())
    }

    pub fn apply(&self, unit: usize, elem: &Elem) -> Result<usize> {
        self.fwd[unit]
            .get(elem)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("no inclusion entry for {elem:?} at unit {unit}")))
    }

    pub fn preimage(&self, arrow: usize) -> Option<&(usize, Elem)> {
        self.rev.get(&arrow)
    }
}

#[derive(Debug, Clone)]
pub struct Extension {
    total: FiniteGroupoid,
    base: FiniteGroupoid,
    kernel: GroupBundle,
    action: GroupoidAction,
    iota: BundleInjection,
    proj: GroupoidHom,
}

impl Extension {
    /// Assemble from tables. Identifier resolution and totality are enforced
    /// here; the extension axioms are [`validate_extension`]'s business.
    pub fn new(
        total: FiniteGroupoid,
        base: FiniteGroupoid,
        kernel: GroupBundle,
        action: GroupoidAction,
        iota_entries: Vec<(String, Elem, String)>,
        proj_pairs: Vec<(String, String)>,
    ) -> Result<Self> {
        if !kernel.matches_units(&base) {
            return Err(Error::Precondition("kernel bundle must sit over the base units".into()));
        }
        let proj = GroupoidHom::from_pairs(&total, &base, &proj_pairs)?;
        let mut iota = BundleInjection::new(base.n_units());
        for (unit_id, elem, arrow_id) in iota_entries {
            let u = base.unit_idx(&unit_id)?;
            if !kernel.fiber(u).contains(&elem) {
                return Err(Error::Invalid(format!(
                    "inclusion entry {elem:?} is not reduced in the fiber at {unit_id}"
                )));
            }
            iota.insert(u, elem, total.arrow_idx(&arrow_id)?)?;
        }
        for u in 0..base.n_units() {
            let expected = kernel.fiber(u).order().ok_or_else(|| {
                Error::InfiniteFiber("extension kernels must have finite fibers".into())
            })?;
            if iota.fwd[u].len() as u64 != expected {
                return Err(Error::Invalid(format!(
                    "inclusion at {} covers {} of {} fiber elements",
                    base.unit_id(u),
                    iota.fwd[u].len(),
                    expected
                )));
            }
        }
        Ok(Extension { total, base, kernel, action, iota, proj })
    }

    pub fn total(&self) -> &FiniteGroupoid {
        &self.total
    }

    pub fn base(&self) -> &FiniteGroupoid {
        &self.base
    }

    pub fn kernel(&self) -> &GroupBundle {
        &self.kernel
    }

    pub fn action(&self) -> &GroupoidAction {
        &self.action
    }

    pub fn proj_hom(&self) -> &GroupoidHom {
        &self.proj
    }

    /// `p(σ)` as a base arrow index.
    pub fn p(&self, arrow: usize) -> usize {
        self.proj.apply(arrow)
    }

    /// `ι(a)` for `a` in the fiber over base unit `u`.
    pub fn iota(&self, u: usize, a: &Elem) -> Result<usize> {
        self.iota.apply(u, a)
    }

    /// `(u, a)` if the arrow is `ι(a)` at `u`.
    pub fn iota_preimage(&self, arrow: usize) -> Option<&(usize, Elem)> {
        self.iota.preimage(arrow)
    }

    /// Total unit sitting over a base unit.
    pub fn total_unit_over(&self, base_unit: usize) -> Result<usize> {
        (0..self.total.n_units())
            .find(|&tu| self.proj.apply_unit(tu) == base_unit)
            .ok_or_else(|| {
                Error::Precondition(format!(
                    "no total unit over {}",
                    self.base.unit_id(base_unit)
                ))
            })
    }

    /// Same base, same kernel bundle, same action tables?
    pub fn same_context(&self, other: &Extension) -> bool {
        self.base == other.base
            && self.kernel == other.kernel
            && actions_agree(&self.action, &other.action)
    }

    /// Serialize-facing views.
    pub fn iota_entries(&self) -> Vec<(String, Elem, String)> {
        let mut out = Vec::new();
        for u in 0..self.base.n_units() {
            let mut entries: Vec<(&Elem, &usize)> = self.iota.fwd[u].iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            for (elem, &arrow) in entries {
                out.push((
                    self.base.unit_id(u).to_string(),
                    elem.clone(),
                    self.total.arrow_id(arrow).to_string(),
                ));
            }
        }
        out
    }

    pub fn proj_pairs(&self) -> Vec<(String, String)> {
        (0..self.total.n_arrows())
            .map(|a| {
                (self.total.arrow_id(a).to_string(), self.base.arrow_id(self.p(a)).to_string())
            })
            .collect()
    }
}

/// The axioms of a compatible extension, reported check by check.
pub fn validate_extension(ext: &Extension) -> ValidationReport {
    let mut report = ValidationReport::new("extension");
    let total = &ext.total;
    let base = &ext.base;

    let proj_report = ext.proj.check();
    if proj_report.is_valid() {
        report.check_all("projection-is-functor", Vec::new());
    } else {
        let first = proj_report.first_failure().expect("invalid report has a failure");
        report.check_all(
            "projection-is-functor",
            vec![format!("{}: {}", first.name, first.witness.clone().unwrap_or_default())],
        );
    }

    report.check_all(
        "projection-surjective",
        if ext.proj.is_surjective() { Vec::new() } else { vec!["some base arrow has no preimage".into()] },
    );

    report.check_all(
        "unit-spaces-identified",
        if ext.proj.unit_map_is_bijective() {
            Vec::new()
        } else {
            vec!["projection does not identify unit spaces".into()]
        },
    );

    let act_report = validate_action(&ext.action);
    if act_report.is_valid() {
        report.check_all("action-is-valid", Vec::new());
    } else {
        let first = act_report.first_failure().expect("invalid report has a failure");
        report.check_all(
            "action-is-valid",
            vec![format!("{}: {}", first.name, first.witness.clone().unwrap_or_default())],
        );
    }

    // ι is a fiberwise group homomorphism landing in the right isotropy.
    let mut witnesses = Vec::new();
    for u in 0..base.n_units() {
        let fiber = ext.kernel.fiber(u);
        let Ok(elems) = fiber.elements() else {
            witnesses.push(format!("fiber at {} not finite", base.unit_id(u)));
            continue;
        };
        let Ok(tu) = ext.total_unit_over(u) else {
            witnesses.push(format!("no total unit over {}", base.unit_id(u)));
            continue;
        };
        match (ext.iota(u, &fiber.zero()), total.unit_arrow_opt(tu)) {
            (Ok(z), Some(e)) if z == e => {}
            _ => witnesses.push(format!("ι(0) is not the identity over {}", base.unit_id(u))),
        }
        for a in &elems {
            for b in &elems {
                let (Ok(ia), Ok(ib), Ok(iab)) =
                    (ext.iota(u, a), ext.iota(u, b), ext.iota(u, &fiber.add(a, b)))
                else {
                    witnesses.push(format!("inclusion partial at {}", base.unit_id(u)));
                    continue;
                };
                if total.compose(ia, ib) != Some(iab) {
                    witnesses.push(format!(
                        "ι({a:?}) ∘ ι({b:?}) ≠ ι({a:?} + {b:?}) at {}",
                        base.unit_id(u)
                    ));
                }
            }
        }
    }
    report.check_all("inclusion-is-homomorphism", witnesses);

    // image of ι = kernel of p, fiber by fiber.
    let mut witnesses = Vec::new();
    for arrow in 0..total.n_arrows() {
        let in_kernel = base.is_unit_arrow(ext.p(arrow));
        let in_image = ext.iota_preimage(arrow).is_some();
        if in_kernel != in_image {
            witnesses.push(if in_kernel {
                format!("{} projects to a unit but is not ι(a)", total.arrow_id(arrow))
            } else {
                format!("{} is ι(a) but does not project to a unit", total.arrow_id(arrow))
            });
        }
    }
    report.check_all("inclusion-image-is-projection-kernel", witnesses);

    // σ ι(a) σ⁻¹ = ι(p(σ) · a)
    let mut witnesses = Vec::new();
    'outer: for sigma in 0..total.n_arrows() {
        let gamma = ext.p(sigma);
        let u_src = base.src(gamma);
        let u_tgt = base.tgt(gamma);
        let Ok(elems) = ext.kernel.fiber(u_src).elements() else { continue };
        for a in &elems {
            let (Ok(ia), Ok(acted)) = (ext.iota(u_src, a), ext.action.apply(gamma, a)) else {
                witnesses.push(format!("conjugation data missing along {}", total.arrow_id(sigma)));
                continue 'outer;
            };
            let Ok(i_acted) = ext.iota(u_tgt, &acted) else {
                witnesses.push(format!("conjugation data missing along {}", total.arrow_id(sigma)));
                continue 'outer;
            };
            let conj = total
                .compose(sigma, ia)
                .and_then(|x| total.compose(x, total.inv(sigma)));
            if conj != Some(i_acted) {
                witnesses.push(format!(
                    "σ ι(a) σ⁻¹ ≠ ι(p(σ)·a) for σ = {}, a = {a:?}",
                    total.arrow_id(sigma)
                ));
            }
        }
    }
    report.check_all("conjugation-matches-action", witnesses);

    report
}

// ---------------------------------------------------------------------------
// Semidirect products

/// `A ⋊ G` for a validated action: arrows are `(a|γ)` with `a` in the fiber
/// over `tgt(γ)`.
pub fn semidirect(act: &GroupoidAction) -> Result<Extension> {
    let g = &act.groupoid;
    let b = &act.bundle;
    if !b.is_finite() {
        return Err(Error::InfiniteFiber("semidirect product needs finite fibers".into()));
    }
    let aid = |a: &Elem, gamma: usize| pair_id(&b.fiber(g.tgt(gamma)).elem_id(a), g.arrow_id(gamma));
    let mut arrows = Vec::new();
    let mut comp = Vec::new();
    let mut inv = Vec::new();
    let mut proj_pairs = Vec::new();
    for gamma in 0..g.n_arrows() {
        let fiber_t = b.fiber(g.tgt(gamma));
        for a in fiber_t.elements()? {
            let id = aid(&a, gamma);
            arrows.push((
                id.clone(),
                g.unit_id(g.src(gamma)).to_string(),
                g.unit_id(g.tgt(gamma)).to_string(),
            ));
            proj_pairs.push((id.clone(), g.arrow_id(gamma).to_string()));
            // (a|γ)⁻¹ = (−(γ⁻¹ · a) | γ⁻¹)
            let gi = g.inv(gamma);
            let back = act.apply(gi, &a)?;
            inv.push((id.clone(), aid(&b.fiber(g.src(gamma)).neg(&back), gi)));
            for delta in 0..g.n_arrows() {
                if g.src(gamma) != g.tgt(delta) {
                    continue;
                }
                let gd = g.compose(gamma, delta).expect("composable");
                for c in b.fiber(g.tgt(delta)).elements()? {
                    // (a|γ)(c|δ) = (a + γ·c | γδ)
                    let moved = act.apply(gamma, &c)?;
                    comp.push((id.clone(), aid(&c, delta), aid(&fiber_t.add(&a, &moved), gd)));
                }
            }
        }
    }
    let total = FiniteGroupoid::from_tables(g.unit_ids().to_vec(), arrows, comp, inv)?;
    let mut iota_entries = Vec::new();
    for u in 0..g.n_units() {
        let e = g.unit_arrow(u)?;
        for a in b.fiber(u).elements()? {
            iota_entries.push((g.unit_id(u).to_string(), a.clone(), aid(&a, e)));
        }
    }
    Extension::new(total, g.clone(), b.clone(), act.clone(), iota_entries, proj_pairs)
}

// ---------------------------------------------------------------------------
// Fibered products of extensions

/// `Σ ×_G Σ'` with kernel `A ⊕ A'`: pairs of arrows with equal projection.
/// Returns the extension and the fiberwise sum used for its kernel.
pub fn fibered_product_ext(e1: &Extension, e2: &Extension) -> Result<(Extension, BundleSum)> {
    if e1.base != e2.base {
        return Err(Error::Precondition("fibered product needs a common base".into()));
    }
    let base = &e1.base;
    let (fp, q1, _q2) = fibered_product(&e1.proj, &e2.proj)?;
    // Pullback units are pairs (u₁|u₂); name them by the base unit they cover.
    let mut rename = BTreeMap::new();
    for tu in 0..fp.n_units() {
        let (u1, _) = split_pair_id(fp.unit_id(tu))?;
        let b1 = e1.proj.apply_unit(e1.total.unit_idx(u1)?);
        rename.insert(fp.unit_id(tu).to_string(), base.unit_id(b1).to_string());
    }
    let arrows_of_fp: Vec<String> = fp.arrow_ids().to_vec();
    let total = relabel_units(&fp, &rename)?;
    let sum = fibered_product_bundle(&e1.kernel, &e2.kernel)?;
    let action = diagonal_action(&sum, &e1.action, &e2.action)?;
    let proj_pairs: Vec<(String, String)> = arrows_of_fp
        .iter()
        .map(|id| {
            let a = fp.arrow_idx(id).expect("own arrow id");
            Ok((id.clone(), base.arrow_id(e1.p(q1.apply(a))).to_string()))
        })
        .collect::<Result<_>>()?;
    let mut iota_entries = Vec::new();
    for u in 0..base.n_units() {
        let f1 = e1.kernel.fiber(u);
        let f2 = e2.kernel.fiber(u);
        for a in f1.elements()? {
            for b in f2.elements()? {
                let pair_elem = sum.pair(u, &a, &b);
                let arrow_id = pair_id(
                    e1.total.arrow_id(e1.iota(u, &a)?),
                    e2.total.arrow_id(e2.iota(u, &b)?),
                );
                iota_entries.push((base.unit_id(u).to_string(), pair_elem, arrow_id));
            }
        }
    }
    let ext = Extension::new(
        total,
        base.clone(),
        sum.sum.clone(),
        action,
        iota_entries,
        proj_pairs,
    )?;
    Ok((ext, sum))
}

// ---------------------------------------------------------------------------
// Pushouts

/// Pushout of `ext` along the bundle hom `f : A → B` (equivariant for
/// `ext.action` and `target_act`). Built as `(B ⋊ G) ×_G Σ` modulo
/// `θ(A) = {((−f(a)|e), ι(a))}`; returns the new extension and the induced
/// map `f_* : Σ → f_*Σ`.
pub fn pushout(
    ext: &Extension,
    f: &BundleHom,
    target_act: &GroupoidAction,
) -> Result<(Extension, GroupoidHom)> {
    if f.source != ext.kernel {
        return Err(Error::Precondition("hom source must be the extension kernel".into()));
    }
    if target_act.groupoid != ext.base || target_act.bundle != f.target {
        return Err(Error::Precondition("target action must put the hom target over the base".into()));
    }
    let equivariance = f.check(&ext.action, target_act);
    if !equivariance.is_valid() {
        let first = equivariance.first_failure().expect("invalid report has a failure");
        return Err(Error::Precondition(format!(
            "bundle hom incompatible with actions: {} ({})",
            first.name,
            first.witness.clone().unwrap_or_default()
        )));
    }
    let base = &ext.base;
    let b = &f.target;
    let sd = semidirect(target_act)?;
    let (big, _) = fibered_product_ext(&sd, ext)?;

    // θ(a) = ((−f(a)|e_u), ι(a)), one per kernel element; a wide subgroupoid
    // whose normality the quotient construction re-verifies.
    let sd_id = |elem: &Elem, gamma: usize| {
        pair_id(&b.fiber(base.tgt(gamma)).elem_id(elem), base.arrow_id(gamma))
    };
    let mut theta_ids = Vec::new();
    for u in 0..base.n_units() {
        let e_u = base.unit_arrow(u)?;
        for a in ext.kernel.fiber(u).elements()? {
            let fa = f.apply(u, &a)?;
            let left = sd_id(&b.fiber(u).neg(&fa), e_u);
            let right = ext.total.arrow_id(ext.iota(u, &a)?).to_string();
            theta_ids.push(pair_id(&left, &right));
        }
    }
    let (quot, pi) = quotient_by_normal_subgroupoid(big.total(), &theta_ids)?;

    let proj_pairs: Vec<(String, String)> = (0..quot.n_arrows())
        .map(|qa| {
            let rep = big.total().arrow_idx(quot.arrow_id(qa)).expect("coset rep id");
            (quot.arrow_id(qa).to_string(), base.arrow_id(big.p(rep)).to_string())
        })
        .collect();
    let mut iota_entries = Vec::new();
    for u in 0..base.n_units() {
        let e_u = base.unit_arrow(u)?;
        let tot_e = ext.total.arrow_id(
            ext.iota(u, &ext.kernel.fiber(u).zero())?,
        );
        for belem in b.fiber(u).elements()? {
            let d_arrow = pair_id(&sd_id(&belem, e_u), tot_e);
            let image = pi.apply(big.total().arrow_idx(&d_arrow)?);
            iota_entries.push((
                base.unit_id(u).to_string(),
                belem.clone(),
                quot.arrow_id(image).to_string(),
            ));
        }
    }
    let result = Extension::new(
        quot.clone(),
        base.clone(),
        b.clone(),
        target_act.clone(),
        iota_entries,
        proj_pairs,
    )?;
    // f_*(σ) = [((0|p(σ)), σ)]
    let fstar_map: Vec<usize> = (0..ext.total.n_arrows())
        .map(|sigma| {
            let gamma = ext.p(sigma);
            let d_arrow = pair_id(
                &sd_id(&b.fiber(base.tgt(gamma)).zero(), gamma),
                ext.total.arrow_id(sigma),
            );
            Ok(pi.apply(big.total().arrow_idx(&d_arrow)?))
        })
        .collect::<Result<_>>()?;
    let fstar = GroupoidHom::from_arrow_map(&ext.total, &quot, fstar_map)?;
    Ok((result, fstar))
}

// ---------------------------------------------------------------------------
// Baer sum and inverses

/// `[Σ] + [Σ']`: pushout of the fibered product along the fold map. Both
/// extensions must share base, kernel, and action.
pub fn baer_sum(e1: &Extension, e2: &Extension) -> Result<Extension> {
    if !e1.same_context(e2) {
        return Err(Error::Precondition("Baer sum needs matching base, kernel, and action".into()));
    }
    let (fp, sum) = fibered_product_ext(e1, e2)?;
    let fold = nabla(&sum)?;
    let (result, _) = pushout(&fp, &fold, &e1.action)?;
    Ok(result)
}

/// Same total groupoid with the inclusion precomposed by negation; the
/// representative of `−[Σ]`.
pub fn inverse_ext(ext: &Extension) -> Result<Extension> {
    let mut iota_entries = Vec::new();
    for u in 0..ext.base.n_units() {
        let fiber = ext.kernel.fiber(u);
        for a in fiber.elements()? {
            let arrow = ext.iota(u, &fiber.neg(&a))?;
            iota_entries.push((
                ext.base.unit_id(u).to_string(),
                a,
                ext.total.arrow_id(arrow).to_string(),
            ));
        }
    }
    Extension::new(
        ext.total.clone(),
        ext.base.clone(),
        ext.kernel.clone(),
        ext.action.clone(),
        iota_entries,
        ext.proj_pairs(),
    )
}

// ---------------------------------------------------------------------------
// Action extensions and the dual-side construction

/// Pull an extension back over a right `G`-space: `X ⋊ Σ` over `X ⋊ G`, with
/// the kernel fiber at a point `x` being the original fiber at its anchor.
pub fn action_extension(ext: &Extension, space: &GSpace) -> Result<Extension> {
    let base = &ext.base;
    let total = &ext.total;
    // Σ acts through p.
    let lifted_points: Vec<(String, String)> = space
        .point_ids()
        .iter()
        .enumerate()
        .map(|(x, id)| {
            let tu = ext.total_unit_over(space.anchor(x))?;
            Ok((id.clone(), total.unit_id(tu).to_string()))
        })
        .collect::<Result<_>>()?;
    let act_table: HashMap<(String, String), String> = {
        let mut t = HashMap::new();
        for x in 0..space.n_points() {
            for sigma in 0..total.n_arrows() {
                let gamma = ext.p(sigma);
                if space.anchor(x) != base.tgt(gamma) {
                    continue;
                }
                let moved = space.act(x, gamma).expect("anchored action is total");
                t.insert(
                    (space.point_ids()[x].clone(), total.arrow_id(sigma).to_string()),
                    space.point_ids()[moved].clone(),
                );
            }
        }
        t
    };
    let total_space = GSpace::from_fn(total, lifted_points, |p, a| {
        act_table.get(&(p.to_string(), a.to_string())).cloned().unwrap_or_default()
    })?;
    let (new_total, _) = transformation_groupoid(total, &total_space)?;
    let (new_base, _) = transformation_groupoid(base, space)?;

    let kernel = GroupBundle::new(
        space
            .point_ids()
            .iter()
            .enumerate()
            .map(|(x, id)| (id.clone(), ext.kernel.fiber(space.anchor(x)).clone()))
            .collect(),
    )?;
    let mats = (0..new_base.n_arrows())
        .map(|arw| {
            let (_, gamma_id) = split_pair_id(new_base.arrow_id(arw))?;
            let gamma = base.arrow_idx(gamma_id)?;
            Ok((new_base.arrow_id(arw).to_string(), ext.action.matrix(gamma).clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let action = GroupoidAction::new(&new_base, &kernel, mats)?;

    let proj_pairs: Vec<(String, String)> = (0..new_total.n_arrows())
        .map(|arw| {
            let (x_id, sigma_id) = split_pair_id(new_total.arrow_id(arw))?;
            let gamma = ext.p(total.arrow_idx(sigma_id)?);
            Ok((new_total.arrow_id(arw).to_string(), pair_id(x_id, base.arrow_id(gamma))))
        })
        .collect::<Result<_>>()?;
    let mut iota_entries = Vec::new();
    for (x, id) in space.point_ids().iter().enumerate() {
        let u = space.anchor(x);
        for a in ext.kernel.fiber(u).elements()? {
            let inc = ext.iota(u, &a)?;
            iota_entries.push((id.clone(), a.clone(), pair_id(id, total.arrow_id(inc))));
        }
    }
    Extension::new(new_total, new_base, kernel, action, iota_entries, proj_pairs)
}

/// The dual-side extension: both models of `f_*(Â ⋊ Σ)`, the extension of
/// `Â ⋊ G` by the constant `Z_N` bundle obtained by pushing the lifted
/// extension along the pairing characters.
#[derive(Debug, Clone)]
pub struct TGroupoid {
    /// Pushout model, the construction of record.
    pub extension: Extension,
    /// Direct quotient model `{(χ, z, σ)} / H`.
    pub quotient_model: Extension,
    pub dual: DualBundle,
    /// Pairing modulus `N`.
    pub modulus: i64,
}

pub fn t_groupoid(ext: &Extension) -> Result<TGroupoid> {
    let dual = dual_bundle(&ext.action)?;
    let n = dual.modulus;
    let lifted = action_extension(ext, &dual.space)?;

    // Pairing hom: at the point (u|χ), send a ∈ A(u) to <χ, a> ∈ Z_N.
    let zn = FiniteAbelianGroup::cyclic(n);
    let target = GroupBundle::constant(lifted.kernel.unit_ids(), &zn)?;
    let mut mats = Vec::new();
    for (pt, id) in lifted.kernel.unit_ids().iter().enumerate() {
        let (u, chi) = dual.point_data(pt)?;
        let fiber = dual.primal.fiber(u);
        let row: Vec<i64> = fiber
            .factors()
            .iter()
            .enumerate()
            .map(|(i, &d)| (n / d) * chi.0[i])
            .collect();
        mats.push((id.clone(), vec![row]));
    }
    let pairing = BundleHom::new(&lifted.kernel, &target, mats)?;
    let trivial = GroupoidAction::trivial(&lifted.base, &target)?;
    let (push_model, _) = pushout(&lifted, &pairing, &trivial)?;

    let quot_model = t_groupoid_quotient_model(ext, &dual, &lifted)?;
    match crate::iso::properly_isomorphic(&push_model, &quot_model)? {
        crate::iso::IsoResult::Witness(_) => {}
        _ => {
            return Err(Error::Invalid(
                "pushout and quotient models of the dual-side extension disagree".into(),
            ))
        }
    }
    Ok(TGroupoid { extension: push_model, quotient_model: quot_model, dual: dual.clone(), modulus: n })
}

/// The explicit model: triples `(χ, z, σ)` with `z ∈ Z_N`, modulo
/// `H = {(χ, −<χ, a>, ι(a))}`.
fn t_groupoid_quotient_model(
    ext: &Extension,
    dual: &DualBundle,
    lifted: &Extension,
) -> Result<Extension> {
    let n = dual.modulus;
    let zn = FiniteAbelianGroup::cyclic(n);
    let base = &ext.base;
    let total = &ext.total;
    let space = &dual.space;
    let (hat_base, _) = transformation_groupoid(base, space)?;

    // Arrow (χ|z|σ), from (χ·p(σ))-point to χ-point.
    let tid = |pt: usize, z: i64, sigma: usize| {
        pair_id(
            &pair_id(&space.point_ids()[pt], &zn.elem_id(&Elem(vec![z.rem_euclid(n)]))),
            total.arrow_id(sigma),
        )
    };
    let mut arrows = Vec::new();
    let mut comp = Vec::new();
    let mut inv = Vec::new();
    let mut proj_pairs = Vec::new();
    for pt in 0..space.n_points() {
        for sigma in 0..total.n_arrows() {
            let gamma = ext.p(sigma);
            if space.anchor(pt) != base.tgt(gamma) {
                continue;
            }
            let moved = space.act(pt, gamma).expect("anchored action is total");
            for z in 0..n {
                let id = tid(pt, z, sigma);
                arrows.push((
                    id.clone(),
                    space.point_ids()[moved].clone(),
                    space.point_ids()[pt].clone(),
                ));
                inv.push((id.clone(), tid(moved, -z, total.inv(sigma))));
                proj_pairs.push((
                    id.clone(),
                    pair_id(&space.point_ids()[pt], base.arrow_id(gamma)),
                ));
                for sigma2 in 0..total.n_arrows() {
                    let gamma2 = ext.p(sigma2);
                    if space.anchor(moved) != base.tgt(gamma2) {
                        continue;
                    }
                    let Some(s12) = total.compose(sigma, sigma2) else { continue };
                    for z2 in 0..n {
                        comp.push((id.clone(), tid(moved, z2, sigma2), tid(pt, z + z2, s12)));
                    }
                }
            }
        }
    }
    let big = FiniteGroupoid::from_tables(space.point_ids().to_vec(), arrows, comp, inv)?;
    let mut h_ids = Vec::new();
    for pt in 0..space.n_points() {
        let (u, chi) = dual.point_data(pt)?;
        let fiber = dual.primal.fiber(u);
        for a in fiber.elements()? {
            let z = crate::bundle::pairing_exponent(fiber, n, &chi, &a)?;
            h_ids.push(tid(pt, -z, ext.iota(u, &a)?));
        }
    }
    let (quot, pi) = quotient_by_normal_subgroupoid(&big, &h_ids)?;

    let proj_map: HashMap<&str, &str> =
        proj_pairs.iter().map(|(id, b)| (id.as_str(), b.as_str())).collect();
    let quot_proj: Vec<(String, String)> = (0..quot.n_arrows())
        .map(|qa| {
            let base_id = proj_map[quot.arrow_id(qa)];
            (quot.arrow_id(qa).to_string(), base_id.to_string())
        })
        .collect();
    let target = GroupBundle::constant(hat_base.unit_ids(), &zn)?;
    let trivial = GroupoidAction::trivial(&hat_base, &target)?;
    let mut iota_entries = Vec::new();
    for pt in 0..space.n_points() {
        let (u, _) = dual.point_data(pt)?;
        let zero = ext.kernel.fiber(u).zero();
        let unit_sigma = ext.iota(u, &zero)?;
        for z in 0..n {
            let image = pi.apply(big.arrow_idx(&tid(pt, z, unit_sigma))?);
            iota_entries.push((
                space.point_ids()[pt].clone(),
                Elem(vec![z]),
                quot.arrow_id(image).to_string(),
            ));
        }
    }
    let _ = lifted;
    Extension::new(quot, hat_base, target, trivial, iota_entries, quot_proj)
}
