//! Bundles of abelian groups over unit spaces, groupoid actions on them, and
//! the dual-bundle machinery.
//!
//! A bundle assigns a finite abelian group to each unit. A groupoid acts on a
//! bundle by giving every arrow `γ` an isomorphism `A(src γ) → A(tgt γ)`,
//! stored as an integer matrix on exponent tuples; functoriality and
//! bijectivity are checked, not assumed. Bundle homomorphisms are per-unit
//! matrices over a shared unit space.
//!
//! Duality is concrete: with `N` the least common multiple of the fiber
//! exponents, a character of `A(u) = Z_{d1} ⊕ ... ⊕ Z_{dk}` is an exponent
//! tuple `χ` acting by `a ↦ ζ_N^{Σ (N/d_i) χ_i a_i}`, which identifies the
//! dual fiber with the fiber itself. The dual of a left action is the right
//! action `(χ · γ)(a) = χ(γ · a)`, turning the dual total space into a finite
//! right `G`-space ready for a transformation groupoid.

use crate::abelian::{self, Elem, FiniteAbelianGroup};
use crate::error::{Error, Result};
use crate::groupoid::{pair_id, FiniteGroupoid, GSpace};
use crate::report::ValidationReport;
use num_complex::Complex64;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupBundle {
    units: Vec<String>,
    fibers: Vec<FiniteAbelianGroup>,
    unit_index: HashMap<String, usize>,
}

impl GroupBundle {
    pub fn new(fibers_by_unit: Vec<(String, FiniteAbelianGroup)>) -> Result<Self> {
        let mut entries = fibers_by_unit;
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateId { kind: "unit", id: w[0].0.clone() });
            }
        }
        let units: Vec<String> = entries.iter().map(|(u, _)| u.clone()).collect();
        let fibers: Vec<FiniteAbelianGroup> = entries.into_iter().map(|(_, f)| f).collect();
        let unit_index = units.iter().enumerate().map(|(i, u)| (u.clone(), i)).collect();
        Ok(GroupBundle { units, fibers, unit_index })
    }

    /// The same group over every unit.
    pub fn constant(units: &[String], fiber: &FiniteAbelianGroup) -> Result<Self> {
        GroupBundle::new(units.iter().map(|u| (u.clone(), fiber.clone())).collect())
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    pub fn unit_ids(&self) -> &[String] {
        &self.units
    }

    pub fn unit_idx(&self, id: &str) -> Result<usize> {
        self.unit_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownId { kind: "unit", id: id.into() })
    }

    pub fn fiber(&self, u: usize) -> &FiniteAbelianGroup {
        &self.fibers[u]
    }

    pub fn is_finite(&self) -> bool {
        self.fibers.iter().all(|f| f.is_finite())
    }

    /// All fibers equal?
    pub fn is_constant(&self) -> bool {
        self.fibers.windows(2).all(|w| w[0] == w[1])
    }

    /// Least `N` with `N · a = 0` in every fiber.
    pub fn joint_exponent(&self) -> Result<i64> {
        let mut n = 1i64;
        for f in &self.fibers {
            let e = f.exponent().ok_or_else(|| {
                Error::InfiniteFiber("joint exponent needs finite fibers".into())
            })?;
            n = num_integer::lcm(n, e);
        }
        Ok(n)
    }

    /// Does the bundle sit over exactly the units of `g`?
    pub fn matches_units(&self, g: &FiniteGroupoid) -> bool {
        self.units.as_slice() == g.unit_ids()
    }

    /// Total number of bundle elements, fiberwise.
    pub fn total_order(&self) -> Option<u64> {
        self.fibers.iter().map(|f| f.order()).sum::<Option<u64>>()
    }
}

/// A left action of a groupoid on a bundle over its units: each arrow `γ`
/// carries a matrix `A(src γ) → A(tgt γ)`.
#[derive(Debug, Clone)]
pub struct GroupoidAction {
    pub groupoid: FiniteGroupoid,
    pub bundle: GroupBundle,
    mats: Vec<Vec<Vec<i64>>>,
}

impl GroupoidAction {
    pub fn new(
        groupoid: &FiniteGroupoid,
        bundle: &GroupBundle,
        mats_by_arrow: Vec<(String, Vec<Vec<i64>>)>,
    ) -> Result<Self> {
        if !bundle.matches_units(groupoid) {
            return Err(Error::Precondition("bundle units differ from groupoid units".into()));
        }
        let mut mats = vec![Vec::new(); groupoid.n_arrows()];
        let mut seen = vec![false; groupoid.n_arrows()];
        for (id, m) in mats_by_arrow {
            let a = groupoid.arrow_idx(&id)?;
            if seen[a] {
                return Err(Error::DuplicateId { kind: "arrow", id });
            }
            seen[a] = true;
            mats[a] = m;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Invalid(format!(
                "no action matrix for arrow {}",
                groupoid.arrow_id(missing)
            )));
        }
        Ok(GroupoidAction { groupoid: groupoid.clone(), bundle: bundle.clone(), mats })
    }

    /// The identity action; fibers along each arrow must agree.
    pub fn trivial(groupoid: &FiniteGroupoid, bundle: &GroupBundle) -> Result<Self> {
        if !bundle.matches_units(groupoid) {
            return Err(Error::Precondition("bundle units differ from groupoid units".into()));
        }
        let mats = (0..groupoid.n_arrows())
            .map(|a| {
                let fs = bundle.fiber(groupoid.src(a));
                let ft = bundle.fiber(groupoid.tgt(a));
                if fs != ft {
                    return Err(Error::Precondition(format!(
                        "trivial action undefined: fibers differ along {}",
                        groupoid.arrow_id(a)
                    )));
                }
                Ok(identity_matrix(fs.rank()))
            })
            .collect::<Result<_>>()?;
        Ok(GroupoidAction { groupoid: groupoid.clone(), bundle: bundle.clone(), mats })
    }

    pub fn matrix(&self, a: usize) -> &Vec<Vec<i64>> {
        &self.mats[a]
    }

    /// `γ · x` for `x` in the fiber over `src(γ)`.
    pub fn apply(&self, a: usize, x: &Elem) -> Result<Elem> {
        abelian::apply_matrix(self.bundle.fiber(self.groupoid.tgt(a)), &self.mats[a], x)
    }
}

fn identity_matrix(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Are two matrices equal as maps into a fiber (entrywise congruence modulo the
/// row's invariant factor)?
fn mats_agree_into(target: &FiniteAbelianGroup, a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    for (i, (ra, rb)) in a.iter().zip(b).enumerate() {
        if ra.len() != rb.len() {
            return false;
        }
        let d = target.factors()[i];
        for (&x, &y) in ra.iter().zip(rb) {
            if d == 0 {
                if x != y {
                    return false;
                }
            } else if (x - y).rem_euclid(d) != 0 {
                return false;
            }
        }
    }
    true
}

/// Do two actions over the same groupoid and bundle agree as maps?
pub fn actions_agree(a: &GroupoidAction, b: &GroupoidAction) -> bool {
    if a.groupoid.arrow_ids() != b.groupoid.arrow_ids() || a.bundle != b.bundle {
        return false;
    }
    (0..a.groupoid.n_arrows()).all(|arw| {
        mats_agree_into(a.bundle.fiber(a.groupoid.tgt(arw)), a.matrix(arw), b.matrix(arw))
    })
}

/// Action axioms: every matrix is a bijective homomorphism between the right
/// fibers, identities act as identities, and the assignment is functorial.
pub fn validate_action(act: &GroupoidAction) -> ValidationReport {
    let mut report = ValidationReport::new("groupoid-action");
    let g = &act.groupoid;
    let b = &act.bundle;

    let mut witnesses = Vec::new();
    for a in 0..g.n_arrows() {
        let fs = b.fiber(g.src(a));
        let ft = b.fiber(g.tgt(a));
        if !abelian::matrix_is_hom(fs, ft, &act.mats[a]) {
            witnesses.push(format!("matrix of {} is not a homomorphism", g.arrow_id(a)));
        } else if !abelian::matrix_is_iso(fs, ft, &act.mats[a]) {
            witnesses.push(format!("matrix of {} is not bijective", g.arrow_id(a)));
        }
    }
    report.check_all("arrowwise-isomorphism", witnesses);

    let mut witnesses = Vec::new();
    for u in 0..g.n_units() {
        let Some(e) = g.unit_arrow_opt(u) else {
            witnesses.push(format!("unit {} has no identity arrow", g.unit_id(u)));
            continue;
        };
        let f = b.fiber(u);
        if !mats_agree_into(f, &act.mats[e], &identity_matrix(f.rank())) {
            witnesses.push(format!("identity at {} does not act trivially", g.unit_id(u)));
        }
    }
    report.check_all("identities-act-trivially", witnesses);

    let mut witnesses = Vec::new();
    for (x, y) in g.composable_pairs() {
        let Some(xy) = g.compose(x, y) else { continue };
        let lhs = abelian::mat_mul(&act.mats[x], &act.mats[y]);
        if !mats_agree_into(b.fiber(g.tgt(x)), &lhs, &act.mats[xy]) {
            witnesses.push(format!(
                "action of {} ∘ {} differs from the composite",
                g.arrow_id(x),
                g.arrow_id(y)
            ));
        }
    }
    report.check_all("functoriality", witnesses);
    report
}

/// A per-unit homomorphism between bundles over the same unit space.
#[derive(Debug, Clone)]
pub struct BundleHom {
    pub source: GroupBundle,
    pub target: GroupBundle,
    mats: Vec<Vec<Vec<i64>>>,
}

impl BundleHom {
    pub fn new(
        source: &GroupBundle,
        target: &GroupBundle,
        mats_by_unit: Vec<(String, Vec<Vec<i64>>)>,
    ) -> Result<Self> {
        if source.unit_ids() != target.unit_ids() {
            return Err(Error::Precondition("bundle hom needs a shared unit space".into()));
        }
        let mut mats = vec![Vec::new(); source.n_units()];
        let mut seen = vec![false; source.n_units()];
        for (id, m) in mats_by_unit {
            let u = source.unit_idx(&id)?;
            if seen[u] {
                return Err(Error::DuplicateId { kind: "unit", id });
            }
            seen[u] = true;
            mats[u] = m;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Invalid(format!("no matrix for unit {}", source.unit_ids()[missing])));
        }
        Ok(BundleHom { source: source.clone(), target: target.clone(), mats })
    }

    /// The same matrix over every unit.
    pub fn constant(source: &GroupBundle, target: &GroupBundle, m: Vec<Vec<i64>>) -> Result<Self> {
        let mats = source.unit_ids().iter().map(|u| (u.clone(), m.clone())).collect();
        BundleHom::new(source, target, mats)
    }

    pub fn matrix(&self, u: usize) -> &Vec<Vec<i64>> {
        &self.mats[u]
    }

    pub fn apply(&self, u: usize, x: &Elem) -> Result<Elem> {
        abelian::apply_matrix(self.target.fiber(u), &self.mats[u], x)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &BundleHom) -> Result<BundleHom> {
        if inner.target.unit_ids() != self.source.unit_ids() {
            return Err(Error::Precondition("bundle homs not composable".into()));
        }
        let mats = (0..self.mats.len())
            .map(|u| {
                (
                    self.source.unit_ids()[u].clone(),
                    abelian::mat_mul(&self.mats[u], &inner.mats[u]),
                )
            })
            .collect();
        BundleHom::new(&inner.source, &self.target, mats)
    }

    /// Well-definedness per unit plus equivariance for the given actions.
    pub fn check(&self, src_act: &GroupoidAction, tgt_act: &GroupoidAction) -> ValidationReport {
        let mut report = ValidationReport::new("bundle-hom");
        let mut witnesses = Vec::new();
        for u in 0..self.source.n_units() {
            if !abelian::matrix_is_hom(self.source.fiber(u), self.target.fiber(u), &self.mats[u]) {
                witnesses.push(format!("matrix at {} is not a homomorphism", self.source.unit_ids()[u]));
            }
        }
        report.check_all("unitwise-homomorphism", witnesses);

        let mut witnesses = Vec::new();
        let g = &src_act.groupoid;
        if g.arrow_ids() == tgt_act.groupoid.arrow_ids() {
            for a in 0..g.n_arrows() {
                let (s, t) = (g.src(a), g.tgt(a));
                let lhs = abelian::mat_mul(&self.mats[t], src_act.matrix(a));
                let rhs = abelian::mat_mul(tgt_act.matrix(a), &self.mats[s]);
                if !mats_agree_into(self.target.fiber(t), &lhs, &rhs) {
                    witnesses.push(format!("not equivariant along {}", g.arrow_id(a)));
                }
            }
        } else {
            witnesses.push("actions live over different groupoids".into());
        }
        report.check_all("equivariance", witnesses);
        report
    }
}

// ---------------------------------------------------------------------------
// Fiberwise direct sums

/// Fiberwise direct sum of two bundles over the same units, re-normalized to
/// invariant-factor form with exact coordinate changes per unit.
#[derive(Debug, Clone)]
pub struct BundleSum {
    pub left: GroupBundle,
    pub right: GroupBundle,
    pub sum: GroupBundle,
    sums: Vec<abelian::DirectSum>,
}

impl BundleSum {
    pub fn pair(&self, u: usize, a: &Elem, b: &Elem) -> Elem {
        self.sums[u].pair(a, b)
    }

    pub fn split(&self, u: usize, x: &Elem) -> (Elem, Elem) {
        self.sums[u].split(x)
    }

    pub fn at(&self, u: usize) -> &abelian::DirectSum {
        &self.sums[u]
    }
}

pub fn fibered_product_bundle(a: &GroupBundle, b: &GroupBundle) -> Result<BundleSum> {
    if a.unit_ids() != b.unit_ids() {
        return Err(Error::Precondition("fiberwise sum needs a shared unit space".into()));
    }
    let sums: Vec<abelian::DirectSum> =
        (0..a.n_units()).map(|u| abelian::DirectSum::new(a.fiber(u), b.fiber(u))).collect();
    let sum = GroupBundle::new(
        a.unit_ids()
            .iter()
            .enumerate()
            .map(|(u, id)| (id.clone(), sums[u].sum.clone()))
            .collect(),
    )?;
    Ok(BundleSum { left: a.clone(), right: b.clone(), sum, sums })
}

/// The componentwise action of `g` on a fiberwise sum.
pub fn diagonal_action(
    sum: &BundleSum,
    left_act: &GroupoidAction,
    right_act: &GroupoidAction,
) -> Result<GroupoidAction> {
    let g = &left_act.groupoid;
    if right_act.groupoid.arrow_ids() != g.arrow_ids() {
        return Err(Error::Precondition("actions live over different groupoids".into()));
    }
    let mats = (0..g.n_arrows())
        .map(|arw| {
            let (s, t) = (g.src(arw), g.tgt(arw));
            let block = block_diag(left_act.matrix(arw), right_act.matrix(arw));
            let m = abelian::mat_mul(
                &sum.at(t).fwd_matrix(),
                &abelian::mat_mul(&block, &sum.at(s).bwd_matrix()),
            );
            (g.arrow_id(arw).to_string(), m)
        })
        .collect();
    GroupoidAction::new(g, &sum.sum, mats)
}

fn block_diag(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let (ra, ca) = (a.len(), a.first().map_or(0, |r| r.len()));
    let (rb, cb) = (b.len(), b.first().map_or(0, |r| r.len()));
    let mut out = vec![vec![0i64; ca + cb]; ra + rb];
    for i in 0..ra {
        out[i][..ca].copy_from_slice(&a[i]);
    }
    for i in 0..rb {
        out[ra + i][ca..].copy_from_slice(&b[i]);
    }
    out
}

/// The fold map `a (+) a → a`, `(x, y) ↦ x + y`, on a sum whose two summands
/// coincide. Equivariant for the diagonal action by construction.
pub fn nabla(sum: &BundleSum) -> Result<BundleHom> {
    if sum.left != sum.right {
        return Err(Error::Precondition("fold map needs equal summands".into()));
    }
    let mats = (0..sum.sum.n_units())
        .map(|u| {
            let k = sum.left.fiber(u).rank();
            let mut add = vec![vec![0i64; 2 * k]; k];
            for i in 0..k {
                add[i][i] = 1;
                add[i][k + i] = 1;
            }
            (
                sum.sum.unit_ids()[u].clone(),
                abelian::mat_mul(&add, &sum.at(u).bwd_matrix()),
            )
        })
        .collect();
    BundleHom::new(&sum.sum, &sum.left, mats)
}

// ---------------------------------------------------------------------------
// Roots of unity

/// `ζ_N^k`, stored exactly as the exponent `k mod N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    modulus: i64,
    exp: i64,
}

impl RootOfUnity {
    pub fn new(modulus: i64, exp: i64) -> Self {
        assert!(modulus >= 1, "root of unity needs a positive order");
        RootOfUnity { modulus, exp: exp.rem_euclid(modulus) }
    }

    pub fn one(modulus: i64) -> Self {
        RootOfUnity::new(modulus, 0)
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn mul(&self, other: &RootOfUnity) -> RootOfUnity {
        assert_eq!(self.modulus, other.modulus, "mixed root orders");
        RootOfUnity::new(self.modulus, self.exp + other.exp)
    }

    pub fn conj(&self) -> RootOfUnity {
        RootOfUnity::new(self.modulus, -self.exp)
    }

    pub fn pow(&self, k: i64) -> RootOfUnity {
        RootOfUnity::new(self.modulus, ((self.exp as i128 * k as i128).rem_euclid(self.modulus as i128)) as i64)
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0
    }

    pub fn to_complex(&self) -> Complex64 {
        let theta = 2.0 * std::f64::consts::PI * (self.exp as f64) / (self.modulus as f64);
        Complex64::new(theta.cos(), theta.sin())
    }
}

// ---------------------------------------------------------------------------
// Characters and duals

/// `Σ (N/d_i) χ_i a_i mod N`: the exponent of `χ(a)` as an `N`-th root of
/// unity, under the standard identification of the dual with the group itself.
pub fn pairing_exponent(fiber: &FiniteAbelianGroup, n: i64, chi: &Elem, a: &Elem) -> Result<i64> {
    let mut acc: i128 = 0;
    for (i, &d) in fiber.factors().iter().enumerate() {
        if d == 0 {
            return Err(Error::InfiniteFiber("pairing needs finite fibers".into()));
        }
        if n % d != 0 {
            return Err(Error::Precondition(format!("fiber order {d} does not divide modulus {n}")));
        }
        acc += (n / d) as i128 * chi.0[i] as i128 * a.0[i] as i128;
    }
    Ok(acc.rem_euclid(n as i128) as i64)
}

pub fn character_value(
    fiber: &FiniteAbelianGroup,
    n: i64,
    chi: &Elem,
    a: &Elem,
) -> Result<RootOfUnity> {
    Ok(RootOfUnity::new(n, pairing_exponent(fiber, n, chi, a)?))
}

/// The dual of an action: the character bundle (fiberwise identified with the
/// primal bundle), its pairing modulus, and the right `G`-space of character
/// points `(u|χ)` with `(χ · γ)(a) = χ(γ · a)`.
#[derive(Debug, Clone)]
pub struct DualBundle {
    pub primal: GroupBundle,
    pub modulus: i64,
    pub characters: GroupBundle,
    pub space: GSpace,
}

impl DualBundle {
    pub fn point_id(bundle: &GroupBundle, u: usize, chi: &Elem) -> String {
        pair_id(&bundle.unit_ids()[u], &bundle.fiber(u).elem_id(chi))
    }

    /// Unit index and character of a point.
    pub fn point_data(&self, point: usize) -> Result<(usize, Elem)> {
        let id = &self.space.point_ids()[point];
        let (u, chi) = crate::groupoid::split_pair_id(id)?;
        let ui = self.primal.unit_idx(u)?;
        Ok((ui, self.primal.fiber(ui).parse_elem(chi)?))
    }
}

pub fn dual_bundle(act: &GroupoidAction) -> Result<DualBundle> {
    let b = &act.bundle;
    let g = &act.groupoid;
    if !b.is_finite() {
        return Err(Error::InfiniteFiber("dual needs finite fibers".into()));
    }
    let n = b.joint_exponent()?.max(1);
    let characters = b.clone();
    let mut points = Vec::new();
    for u in 0..b.n_units() {
        for chi in b.fiber(u).elements()? {
            points.push((DualBundle::point_id(b, u, &chi), b.unit_ids()[u].clone()));
        }
    }
    // (χ · γ)_j is pinned by (N/d^src_j)(χ·γ)_j ≡ Σ_i (N/d^tgt_i) M_ij χ_i (mod N),
    // which is divisible exactly because χ ∘ (γ ·) is itself a character.
    let dual_image = |u_tgt: usize, chi: &Elem, arw: usize| -> Result<Elem> {
        let ft = b.fiber(u_tgt);
        let fs = b.fiber(g.src(arw));
        let m = act.matrix(arw);
        let mut out = Vec::with_capacity(fs.rank());
        for (j, &dj) in fs.factors().iter().enumerate() {
            let mut acc: i128 = 0;
            for (i, &di) in ft.factors().iter().enumerate() {
                acc += (n / di) as i128 * m[i][j] as i128 * chi.0[i] as i128;
            }
            let acc = acc.rem_euclid(n as i128) as i64;
            let w = n / dj;
            if acc % w != 0 {
                return Err(Error::Invalid(format!(
                    "dual action not well-defined along {} (is the action valid?)",
                    g.arrow_id(arw)
                )));
            }
            out.push((acc / w) % dj);
        }
        fs.reduce(&out)
    };
    // Precompute so the GSpace closure stays infallible.
    let mut table: HashMap<(String, String), String> = HashMap::new();
    for u in 0..b.n_units() {
        for chi in b.fiber(u).elements()? {
            for arw in 0..g.n_arrows() {
                if g.tgt(arw) != u {
                    continue;
                }
                let img = dual_image(u, &chi, arw)?;
                table.insert(
                    (DualBundle::point_id(b, u, &chi), g.arrow_id(arw).to_string()),
                    DualBundle::point_id(b, g.src(arw), &img),
                );
            }
        }
    }
    let space = GSpace::from_fn(g, points, |p, a| {
        table.get(&(p.to_string(), a.to_string())).cloned().unwrap_or_default()
    })?;
    Ok(DualBundle { primal: b.clone(), modulus: n, characters, space })
}

/// The homomorphism `A ↦ μ_N` induced by a single character of the fiber of a
/// constant bundle: `a ↦ Σ (N/d_i) χ_i a_i` into the constant `Z_N` bundle.
pub fn character_hom(chi: &Elem, bundle: &GroupBundle, n: i64) -> Result<(BundleHom, GroupBundle)> {
    if !bundle.is_constant() {
        return Err(Error::Precondition("character hom needs a constant bundle".into()));
    }
    if bundle.n_units() == 0 {
        return Err(Error::Precondition("character hom needs a non-empty unit space".into()));
    }
    let fiber = bundle.fiber(0);
    if !fiber.contains(chi) {
        return Err(Error::Invalid("character outside the dual fiber".into()));
    }
    let mut row = Vec::with_capacity(fiber.rank());
    for (i, &d) in fiber.factors().iter().enumerate() {
        if d == 0 {
            return Err(Error::InfiniteFiber("character hom needs finite fibers".into()));
        }
        if n % d != 0 {
            return Err(Error::Precondition(format!("fiber order {d} does not divide modulus {n}")));
        }
        row.push((n / d) * chi.0[i]);
    }
    let target = GroupBundle::constant(bundle.unit_ids(), &FiniteAbelianGroup::cyclic(n))?;
    let hom = BundleHom::constant(bundle, &target, vec![row])?;
    Ok((hom, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::cyclic_group;

    fn sign_action_z2_on_z3() -> GroupoidAction {
        let g = cyclic_group(2);
        let b = GroupBundle::constant(&["u".into()], &FiniteAbelianGroup::cyclic(3)).unwrap();
        GroupoidAction::new(
            &g,
            &b,
            vec![("0".into(), vec![vec![1]]), ("1".into(), vec![vec![-1]])],
        )
        .unwrap()
    }

    #[test]
    fn sign_action_validates() {
        let act = sign_action_z2_on_z3();
        assert!(validate_action(&act).is_valid());
        let one = act.bundle.fiber(0).reduce(&[1]).unwrap();
        let flip = act.groupoid.arrow_idx("1").unwrap();
        assert_eq!(act.apply(flip, &one).unwrap(), Elem(vec![2]));
    }

    #[test]
    fn non_functorial_action_is_reported() {
        let g = cyclic_group(2);
        let b = GroupBundle::constant(&["u".into()], &FiniteAbelianGroup::cyclic(4)).unwrap();
        // "multiply by 2" is a hom but not bijective; also breaks functoriality
        let act = GroupoidAction::new(
            &g,
            &b,
            vec![("0".into(), vec![vec![1]]), ("1".into(), vec![vec![2]])],
        )
        .unwrap();
        let report = validate_action(&act);
        assert!(!report.is_valid());
    }

    #[test]
    fn fibered_product_bundle_invariant_factors() {
        let units = vec!["u".to_string()];
        let a = GroupBundle::constant(&units, &FiniteAbelianGroup::new(vec![2, 4]).unwrap()).unwrap();
        let b = GroupBundle::constant(&units, &FiniteAbelianGroup::cyclic(2)).unwrap();
        let s = fibered_product_bundle(&a, &b).unwrap();
        assert_eq!(s.sum.fiber(0).factors(), &[2, 2, 4]);
    }

    #[test]
    fn nabla_folds_and_is_equivariant() {
        let g = cyclic_group(2);
        let b = GroupBundle::constant(&["u".into()], &FiniteAbelianGroup::cyclic(3)).unwrap();
        let act = sign_action_z2_on_z3();
        let s = fibered_product_bundle(&b, &b).unwrap();
        let fold = nabla(&s).unwrap();
        let f = b.fiber(0);
        for x in f.elements().unwrap() {
            for y in f.elements().unwrap() {
                let p = s.pair(0, &x, &y);
                assert_eq!(fold.apply(0, &p).unwrap(), f.add(&x, &y));
            }
        }
        let diag = diagonal_action(&s, &act, &act).unwrap();
        assert!(validate_action(&diag).is_valid());
        assert!(fold.check(&diag, &act).is_valid());
        let _ = g;
    }

    #[test]
    fn dual_of_sign_action_negates_characters() {
        let act = sign_action_z2_on_z3();
        let d = dual_bundle(&act).unwrap();
        assert_eq!(d.modulus, 3);
        assert_eq!(d.space.n_points(), 3);
        let flip = act.groupoid.arrow_idx("1").unwrap();
        let chi = d.space.point_idx("(u|1)").unwrap();
        let moved = d.space.act(chi, flip).unwrap();
        assert_eq!(d.space.point_ids()[moved], "(u|2)");
        assert!(d.space.check(&act.groupoid).is_valid());
    }

    #[test]
    fn pairing_exponent_on_z2_hits_half() {
        let f = FiniteAbelianGroup::cyclic(2);
        let one = f.reduce(&[1]).unwrap();
        let n = 2;
        assert_eq!(pairing_exponent(&f, n, &one, &one).unwrap(), n / 2);
        assert!(character_value(&f, n, &one, &one).unwrap().to_complex().re < -0.99);
    }

    #[test]
    fn double_dual_evaluation_recovers_the_group() {
        // For A = Z2 (+) Z4 the evaluation pairing (a, χ) table must coincide
        // with the defining pairing (χ, a) table: duality is symmetric in this
        // presentation, so double-dualizing is the identity on pairing data.
        let f = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let n = f.exponent().unwrap();
        for a in f.elements().unwrap() {
            for chi in f.elements().unwrap() {
                let forward = pairing_exponent(&f, n, &chi, &a).unwrap();
                let evaluation = pairing_exponent(&f, n, &a, &chi).unwrap();
                assert_eq!(forward, evaluation);
            }
        }
        // and distinct elements give distinct evaluation characters
        let elems = f.elements().unwrap();
        for (i, a) in elems.iter().enumerate() {
            for b in elems.iter().skip(i + 1) {
                let differs = elems.iter().any(|chi| {
                    pairing_exponent(&f, n, chi, a).unwrap()
                        != pairing_exponent(&f, n, chi, b).unwrap()
                });
                assert!(differs, "evaluation characters of {a:?} and {b:?} agree");
            }
        }
    }

    #[test]
    fn character_hom_on_z2() {
        let g = cyclic_group(2);
        let b = GroupBundle::constant(&["u".into()], &FiniteAbelianGroup::cyclic(2)).unwrap();
        let chi = b.fiber(0).reduce(&[1]).unwrap();
        let (hom, target) = character_hom(&chi, &b, 2).unwrap();
        assert_eq!(target.fiber(0).factors(), &[2]);
        let one = b.fiber(0).reduce(&[1]).unwrap();
        assert_eq!(hom.apply(0, &one).unwrap(), Elem(vec![1]));
        let act = GroupoidAction::trivial(&g, &b).unwrap();
        let tact = GroupoidAction::trivial(&g, &target).unwrap();
        assert!(hom.check(&act, &tact).is_valid());
    }

    #[test]
    fn roots_of_unity_are_exact() {
        let z = RootOfUnity::new(12, 7);
        assert_eq!(z.mul(&z.conj()), RootOfUnity::one(12));
        assert_eq!(z.pow(12), RootOfUnity::one(12));
        assert_eq!(z.pow(5).exp(), 35 % 12);
        let c = z.to_complex();
        assert!((c.norm() - 1.0).abs() < 1e-12);
    }
}
