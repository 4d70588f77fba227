//! Two-cocycles, coboundaries, and the degree-two cohomology of a groupoid
//! acting on a bundle of abelian groups.
//!
//! Cocycles here are normalized: a value is stored only on composable pairs
//! of non-unit arrows, pairs involving a unit are identically zero, and every
//! stored value is reduced in the fiber over the target of the left arrow.
//! The identity demanded of `φ` over each composable triple is
//!
//! ```text
//! φ(γ₀,γ₁) + φ(γ₀γ₁,γ₂) = γ₀·φ(γ₁,γ₂) + φ(γ₀,γ₁γ₂)
//! ```
//!
//! `h2` presents the full cohomology group in one integer-linear pass: the
//! cocycle lattice is the kernel of the identity matrix augmented by the
//! fiber relations, the coboundary lattice is spanned by `δ¹` together with
//! those same relations, and the quotient is read off a Smith normal form.
//! Class representatives come back with the invariant factors, so every
//! cohomology class of a finite context can be enumerated.

use crate::abelian::{Elem, FiniteAbelianGroup};
use crate::bundle::{
    dual_bundle, BundleHom, DualBundle, GroupBundle, GroupoidAction,
};
use crate::error::{Error, Result};
use crate::extension::Extension;
use crate::groupoid::{cyclic_group, transformation_groupoid, FiniteGroupoid, GSpace};
use crate::intmat::{kernel_basis, snf, solve, solve_mod, IMat};
use crate::report::ValidationReport;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::collections::HashMap;

// ---------------------------------------------------------------------------
// Cocycles

/// A normalized 2-cocycle candidate for a groupoid action: values on
/// composable pairs of non-unit arrows, zero elsewhere.
#[derive(Debug, Clone)]
pub struct Cocycle2 {
    action: GroupoidAction,
    values: HashMap<(usize, usize), Elem>,
}

impl Cocycle2 {
    /// Build from `(left-arrow, right-arrow, value)` entries. Pairs must be
    /// composable and consist of non-unit arrows; values are reduced into the
    /// fiber over the target of the left arrow and zero values are dropped.
    pub fn new(action: &GroupoidAction, entries: Vec<(String, String, Elem)>) -> Result<Self> {
        let mut out = Cocycle2 { action: action.clone(), values: HashMap::new() };
        let g = &action.groupoid;
        let mut seen = HashMap::new();
        for (lid, rid, v) in entries {
            let a = g.arrow_idx(&lid)?;
            let b = g.arrow_idx(&rid)?;
            if g.compose(a, b).is_none() {
                return Err(Error::Precondition(format!(
                    "cocycle entry on non-composable pair ({lid}, {rid})"
                )));
            }
            if g.is_unit_arrow(a) || g.is_unit_arrow(b) {
                return Err(Error::Precondition(format!(
                    "cocycle entry on a unit arrow in ({lid}, {rid}); unit pairs are fixed to zero"
                )));
            }
            if seen.insert((a, b), ()).is_some() {
                return Err(Error::DuplicateId { kind: "cocycle pair", id: format!("({lid}, {rid})") });
            }
            let fiber = action.bundle.fiber(g.tgt(a));
            let reduced = fiber.reduce(&v.0)?;
            if reduced != fiber.zero() {
                out.values.insert((a, b), reduced);
            }
        }
        Ok(out)
    }

    pub fn zero(action: &GroupoidAction) -> Self {
        Cocycle2 { action: action.clone(), values: HashMap::new() }
    }

    pub fn action(&self) -> &GroupoidAction {
        &self.action
    }

    /// `φ(a, b)`; zero whenever either arrow is a unit.
    pub fn value(&self, a: usize, b: usize) -> Result<Elem> {
        let g = &self.action.groupoid;
        if g.compose(a, b).is_none() {
            return Err(Error::Precondition(format!(
                "cocycle evaluated on non-composable pair ({}, {})",
                g.arrow_id(a),
                g.arrow_id(b)
            )));
        }
        let fiber = self.action.bundle.fiber(g.tgt(a));
        Ok(self.values.get(&(a, b)).cloned().unwrap_or_else(|| fiber.zero()))
    }

    /// Sorted `(left, right, value)` entries, nonzero values only.
    pub fn entries(&self) -> Vec<(String, String, Elem)> {
        let g = &self.action.groupoid;
        let mut keys: Vec<&(usize, usize)> = self.values.keys().collect();
        keys.sort();
        keys.iter()
            .map(|&&(a, b)| {
                (
                    g.arrow_id(a).to_string(),
                    g.arrow_id(b).to_string(),
                    self.values[&(a, b)].clone(),
                )
            })
            .collect()
    }

    fn merge_with(&self, other: &Cocycle2, f: impl Fn(&FiniteAbelianGroup, &Elem, &Elem) -> Elem) -> Result<Cocycle2> {
        if !crate::bundle::actions_agree(&self.action, &other.action) {
            return Err(Error::Precondition("cocycle arithmetic needs a shared action".into()));
        }
        let g = &self.action.groupoid;
        let mut values = HashMap::new();
        let mut keys: Vec<(usize, usize)> = self.values.keys().chain(other.values.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        for (a, b) in keys {
            let fiber = self.action.bundle.fiber(g.tgt(a));
            let x = self.values.get(&(a, b)).cloned().unwrap_or_else(|| fiber.zero());
            let y = other.values.get(&(a, b)).cloned().unwrap_or_else(|| fiber.zero());
            let v = f(fiber, &x, &y);
            if v != fiber.zero() {
                values.insert((a, b), v);
            }
        }
        Ok(Cocycle2 { action: self.action.clone(), values })
    }

    pub fn add(&self, other: &Cocycle2) -> Result<Cocycle2> {
        self.merge_with(other, |f, x, y| f.add(x, y))
    }

    pub fn sub(&self, other: &Cocycle2) -> Result<Cocycle2> {
        self.merge_with(other, |f, x, y| f.sub(x, y))
    }

    pub fn neg(&self) -> Cocycle2 {
        let g = &self.action.groupoid;
        let values = self
            .values
            .iter()
            .map(|(&(a, b), v)| ((a, b), self.action.bundle.fiber(g.tgt(a)).neg(v)))
            .collect();
        Cocycle2 { action: self.action.clone(), values }
    }

    pub fn scale(&self, k: i64) -> Cocycle2 {
        let g = &self.action.groupoid;
        let mut values = HashMap::new();
        for (&(a, b), v) in &self.values {
            let fiber = self.action.bundle.fiber(g.tgt(a));
            let scaled = fiber.scalar_mul(k, v);
            if scaled != fiber.zero() {
                values.insert((a, b), scaled);
            }
        }
        Cocycle2 { action: self.action.clone(), values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

impl PartialEq for Cocycle2 {
    fn eq(&self, other: &Self) -> bool {
        crate::bundle::actions_agree(&self.action, &other.action) && self.values == other.values
    }
}

/// Check the cocycle identity over every composable triple.
pub fn validate_cocycle(phi: &Cocycle2) -> ValidationReport {
    let mut report = ValidationReport::new("cocycle");
    let g = &phi.action.groupoid;
    let bundle = &phi.action.bundle;
    let mut witnesses = Vec::new();
    let pairs = g.composable_pairs();
    for &(g0, g1) in &pairs {
        let g01 = g.compose(g0, g1).expect("composable");
        for g2 in g.arrows_into(g.src(g1)) {
            let g12 = g.compose(g1, g2).expect("composable");
            let fiber = bundle.fiber(g.tgt(g0));
            let lhs = fiber.add(
                &phi.value(g0, g1).expect("composable"),
                &phi.value(g01, g2).expect("composable"),
            );
            let moved = match phi.action.apply(g0, &phi.value(g1, g2).expect("composable")) {
                Ok(v) => v,
                Err(e) => {
                    witnesses.push(format!("action failed: {e}"));
                    continue;
                }
            };
            let rhs = fiber.add(&moved, &phi.value(g0, g12).expect("composable"));
            if lhs != rhs {
                witnesses.push(format!(
                    "identity fails on ({}, {}, {})",
                    g.arrow_id(g0),
                    g.arrow_id(g1),
                    g.arrow_id(g2)
                ));
            }
        }
    }
    report.check_all("cocycle-identity", witnesses);
    report
}

// ---------------------------------------------------------------------------
// Cochains and coboundaries

/// A normalized 1-cochain: an element of the fiber over `tgt(γ)` for each
/// non-unit arrow `γ`, zero on units.
#[derive(Debug, Clone)]
pub struct Cochain1 {
    action: GroupoidAction,
    values: HashMap<usize, Elem>,
}

impl Cochain1 {
    pub fn new(action: &GroupoidAction, entries: Vec<(String, Elem)>) -> Result<Self> {
        let g = &action.groupoid;
        let mut values = HashMap::new();
        for (id, v) in entries {
            let a = g.arrow_idx(&id)?;
            if g.is_unit_arrow(a) {
                return Err(Error::Precondition(format!(
                    "cochain entry on unit arrow {id}; units are fixed to zero"
                )));
            }
            let fiber = action.bundle.fiber(g.tgt(a));
            let reduced = fiber.reduce(&v.0)?;
            if values.insert(a, reduced).is_some() {
                return Err(Error::DuplicateId { kind: "cochain arrow", id });
            }
        }
        values.retain(|&a, v| *v != action.bundle.fiber(g.tgt(a)).zero());
        Ok(Cochain1 { action: action.clone(), values })
    }

    pub fn zero(action: &GroupoidAction) -> Self {
        Cochain1 { action: action.clone(), values: HashMap::new() }
    }

    pub fn action(&self) -> &GroupoidAction {
        &self.action
    }

    pub fn value(&self, a: usize) -> Elem {
        let g = &self.action.groupoid;
        self.values
            .get(&a)
            .cloned()
            .unwrap_or_else(|| self.action.bundle.fiber(g.tgt(a)).zero())
    }

    pub fn entries(&self) -> Vec<(String, Elem)> {
        let g = &self.action.groupoid;
        let mut keys: Vec<usize> = self.values.keys().copied().collect();
        keys.sort();
        keys.iter().map(|&a| (g.arrow_id(a).to_string(), self.values[&a].clone())).collect()
    }
}

/// `δc(γ₁,γ₂) = γ₁·c(γ₂) − c(γ₁γ₂) + c(γ₁)`, a cocycle for any cochain.
pub fn coboundary(c: &Cochain1) -> Result<Cocycle2> {
    let g = &c.action.groupoid;
    let bundle = &c.action.bundle;
    let mut values = HashMap::new();
    for (g1, g2) in g.composable_pairs() {
        if g.is_unit_arrow(g1) || g.is_unit_arrow(g2) {
            continue;
        }
        let g12 = g.compose(g1, g2).expect("composable");
        let fiber = bundle.fiber(g.tgt(g1));
        let moved = c.action.apply(g1, &c.value(g2))?;
        let v = fiber.add(&fiber.sub(&moved, &c.value(g12)), &c.value(g1));
        if v != fiber.zero() {
            values.insert((g1, g2), v);
        }
    }
    Ok(Cocycle2 { action: c.action.clone(), values })
}

/// Decide whether `φ₁ − φ₂ = δc` has a solution, returning the cochain if so.
/// Exact integer linear algebra; `None` is a certificate of distinct classes.
pub fn cohomologous(phi1: &Cocycle2, phi2: &Cocycle2) -> Result<Option<Cochain1>> {
    if !crate::bundle::actions_agree(&phi1.action, &phi2.action) {
        return Err(Error::Precondition("cohomologous needs a shared action".into()));
    }
    let psi = phi1.sub(phi2)?;
    let action = &phi1.action;
    let g = &action.groupoid;
    let bundle = &action.bundle;
    let chains = CochainIndex::new(g, bundle);

    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut rhs: Vec<BigInt> = Vec::new();
    let mut moduli: Vec<BigInt> = Vec::new();
    for (g1, g2) in g.composable_pairs() {
        if g.is_unit_arrow(g1) || g.is_unit_arrow(g2) {
            continue;
        }
        let g12 = g.compose(g1, g2).expect("composable");
        let fiber = bundle.fiber(g.tgt(g1));
        let rank = fiber.rank();
        let mut block: Vec<Vec<BigInt>> =
            vec![vec![BigInt::zero(); chains.total]; rank];
        // + M_{γ₁} · c(γ₂)
        let m = action.matrix(g1);
        let src_rank = bundle.fiber(g.tgt(g2)).rank();
        for (i, row) in block.iter_mut().enumerate() {
            for j in 0..src_rank {
                row[chains.coord(g2, j)] += BigInt::from(m[i][j]);
            }
        }
        // − c(γ₁γ₂) when that arrow is not a unit
        if !g.is_unit_arrow(g12) {
            for (i, row) in block.iter_mut().enumerate() {
                let col = chains.coord(g12, i);
                row[col] -= 1;
            }
        }
        // + c(γ₁)
        for (i, row) in block.iter_mut().enumerate() {
            let col = chains.coord(g1, i);
            row[col] += 1;
        }
        let target = psi.value(g1, g2)?;
        for (i, row) in block.into_iter().enumerate() {
            rows.push(row);
            rhs.push(BigInt::from(target.0[i]));
            moduli.push(BigInt::from(fiber.factors()[i]));
        }
    }
    let mut a = IMat::zeros(rows.len(), chains.total);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            a[(i, j)] = v.clone();
        }
    }
    let Some(x) = solve_mod(&a, &rhs, &moduli) else {
        return Ok(None);
    };
    let mut entries = Vec::new();
    for arrow in &chains.arrows {
        let fiber = bundle.fiber(g.tgt(*arrow));
        let coords: Vec<i64> = (0..fiber.rank())
            .map(|i| reduce_bigint(&x[chains.coord(*arrow, i)], fiber.factors()[i]))
            .collect::<Result<_>>()?;
        entries.push((g.arrow_id(*arrow).to_string(), Elem(coords)));
    }
    let c = Cochain1::new(action, entries)?;
    debug_assert_eq!(coboundary(&c)?, psi);
    Ok(Some(c))
}

fn reduce_bigint(v: &BigInt, modulus: i64) -> Result<i64> {
    let r = if modulus > 0 { v.mod_floor(&BigInt::from(modulus)) } else { v.clone() };
    r.to_i64().ok_or_else(|| Error::Numerical("cochain coordinate exceeds i64".into()))
}

// ---------------------------------------------------------------------------
// Indexing helpers for the linear systems

struct CochainIndex {
    arrows: Vec<usize>,
    offsets: HashMap<usize, usize>,
    total: usize,
}

impl CochainIndex {
    fn new(g: &FiniteGroupoid, bundle: &GroupBundle) -> Self {
        let mut arrows = Vec::new();
        let mut offsets = HashMap::new();
        let mut total = 0;
        for a in 0..g.n_arrows() {
            if g.is_unit_arrow(a) {
                continue;
            }
            arrows.push(a);
            offsets.insert(a, total);
            total += bundle.fiber(g.tgt(a)).rank();
        }
        CochainIndex { arrows, offsets, total }
    }

    fn coord(&self, arrow: usize, i: usize) -> usize {
        self.offsets[&arrow] + i
    }
}

struct PairIndex {
    pairs: Vec<(usize, usize)>,
    offsets: HashMap<(usize, usize), usize>,
    total: usize,
}

impl PairIndex {
    fn new(g: &FiniteGroupoid, bundle: &GroupBundle) -> Self {
        let mut pairs = Vec::new();
        let mut offsets = HashMap::new();
        let mut total = 0;
        for (a, b) in g.composable_pairs() {
            if g.is_unit_arrow(a) || g.is_unit_arrow(b) {
                continue;
            }
            pairs.push((a, b));
            offsets.insert((a, b), total);
            total += bundle.fiber(g.tgt(a)).rank();
        }
        PairIndex { pairs, offsets, total }
    }

    fn offset(&self, pair: (usize, usize)) -> usize {
        self.offsets[&pair]
    }
}

// ---------------------------------------------------------------------------
// H²

/// `H²` of an action, presented by invariant factors with a matching family
/// of representative cocycles (one generator per nontrivial factor).
#[derive(Debug, Clone)]
pub struct CohomologyGroup {
    pub invariant_factors: Vec<i64>,
    pub basis: Vec<Cocycle2>,
    pub group: FiniteAbelianGroup,
    action: GroupoidAction,
}

impl CohomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// One cocycle per cohomology class, indexed by the elements of `group`.
    pub fn class_representatives(&self) -> Result<Vec<Cocycle2>> {
        let mut out = Vec::new();
        for coeffs in self.group.elements()? {
            let mut phi = Cocycle2::zero(&self.action);
            for (i, &c) in coeffs.0.iter().enumerate() {
                phi = phi.add(&self.basis[i].scale(c))?;
            }
            out.push(phi);
        }
        Ok(out)
    }
}

/// Compute `H²` for a finite context by pure integer linear algebra.
pub fn h2(action: &GroupoidAction) -> Result<CohomologyGroup> {
    let g = &action.groupoid;
    let bundle = &action.bundle;
    if !bundle.is_finite() {
        return Err(Error::InfiniteFiber("h2 needs finite fibers".into()));
    }
    let pairs = PairIndex::new(g, bundle);
    let chains = CochainIndex::new(g, bundle);

    // Cocycle condition rows over all-non-unit composable triples.
    let mut d2_rows: Vec<Vec<BigInt>> = Vec::new();
    let mut row_moduli: Vec<i64> = Vec::new();
    for &(g0, g1) in &pairs.pairs {
        let g01 = g.compose(g0, g1).expect("composable");
        for g2 in g.arrows_into(g.src(g1)) {
            if g.is_unit_arrow(g2) {
                continue;
            }
            let g12 = g.compose(g1, g2).expect("composable");
            let fiber = bundle.fiber(g.tgt(g0));
            let rank = fiber.rank();
            let mut block: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); pairs.total]; rank];
            for (i, row) in block.iter_mut().enumerate() {
                row[pairs.offset((g0, g1)) + i] += 1;
                if !g.is_unit_arrow(g01) {
                    row[pairs.offset((g01, g2)) + i] += 1;
                }
                if !g.is_unit_arrow(g12) {
                    row[pairs.offset((g0, g12)) + i] -= 1;
                }
            }
            let m = action.matrix(g0);
            let src_rank = bundle.fiber(g.tgt(g1)).rank();
            for (i, row) in block.iter_mut().enumerate() {
                for j in 0..src_rank {
                    row[pairs.offset((g1, g2)) + j] -= BigInt::from(m[i][j]);
                }
            }
            for (i, row) in block.into_iter().enumerate() {
                d2_rows.push(row);
                row_moduli.push(fiber.factors()[i]);
            }
        }
    }

    // Cocycle lattice: x-part of ker [D2 | diag(row moduli)].
    let n_rows = d2_rows.len();
    let mut aug = IMat::zeros(n_rows, pairs.total + n_rows);
    for (i, row) in d2_rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            aug[(i, j)] = v.clone();
        }
        aug[(i, pairs.total + i)] = BigInt::from(row_moduli[i]);
    }
    let kernel = kernel_basis(&aug);
    let k = kernel.len();
    let mut l = IMat::zeros(pairs.total, k);
    for (j, col) in kernel.iter().enumerate() {
        for i in 0..pairs.total {
            l[(i, j)] = col[i].clone();
        }
    }

    // Coboundary lattice: δ¹ image columns followed by the fiber relations.
    let unknown_moduli: Vec<i64> = pairs
        .pairs
        .iter()
        .flat_map(|&(a, _)| bundle.fiber(g.tgt(a)).factors().iter().copied())
        .collect();
    let n_cob = chains.total + pairs.total;
    let mut kmat = IMat::zeros(pairs.total, n_cob);
    for &(g1, g2) in &pairs.pairs {
        let g12 = g.compose(g1, g2).expect("composable");
        let fiber = bundle.fiber(g.tgt(g1));
        let m = action.matrix(g1);
        let src_rank = bundle.fiber(g.tgt(g2)).rank();
        for i in 0..fiber.rank() {
            let r = pairs.offset((g1, g2)) + i;
            for j in 0..src_rank {
                kmat[(r, chains.coord(g2, j))] += BigInt::from(m[i][j]);
            }
            if !g.is_unit_arrow(g12) {
                kmat[(r, chains.coord(g12, i))] -= 1;
            }
            kmat[(r, chains.coord(g1, i))] += 1;
        }
    }
    for (i, &d) in unknown_moduli.iter().enumerate() {
        kmat[(i, chains.total + i)] = BigInt::from(d);
    }

    // Express the coboundary lattice in the cocycle basis and take SNF.
    let mut x = IMat::zeros(k, n_cob);
    for c in 0..n_cob {
        let target: Vec<BigInt> = (0..pairs.total).map(|i| kmat[(i, c)].clone()).collect();
        let sol = solve(&l, &target).ok_or_else(|| {
            Error::Numerical("coboundary lattice escaped the cocycle lattice".into())
        })?;
        for r in 0..k {
            x[(r, c)] = sol[r].clone();
        }
    }
    let decomposition = snf(&x);

    let mut invariant_factors = Vec::new();
    let mut basis = Vec::new();
    for i in 0..k {
        let d = if i < x.cols { decomposition.d[(i, i)].clone() } else { BigInt::zero() };
        let d = d
            .to_i64()
            .ok_or_else(|| Error::Numerical("invariant factor exceeds i64".into()))?;
        if d == 1 {
            continue;
        }
        invariant_factors.push(d);
        // Generator: L · (column i of U⁻¹), reduced fiberwise.
        let ucol = decomposition.uinv.col(i);
        let coords = l.mul_vec(&ucol);
        let mut entries = Vec::new();
        for (pos, &(a, b)) in pairs.pairs.iter().enumerate() {
            let fiber = bundle.fiber(g.tgt(a));
            let off = pairs.offset((a, b));
            let v: Vec<i64> = (0..fiber.rank())
                .map(|j| reduce_bigint(&coords[off + j], fiber.factors()[j]))
                .collect::<Result<_>>()?;
            let _ = pos;
            entries.push((g.arrow_id(a).to_string(), g.arrow_id(b).to_string(), Elem(v)));
        }
        basis.push(Cocycle2::new(action, entries)?);
    }
    // Invariant factors from SNF form a divisibility chain with zeros last.
    let group = FiniteAbelianGroup::new(invariant_factors.clone())?;
    Ok(CohomologyGroup { invariant_factors, basis, group, action: action.clone() })
}

// ---------------------------------------------------------------------------
// Sections and the cocycle/extension dictionary

/// A set-theoretic section of an extension's projection, normalized on units.
#[derive(Debug, Clone)]
pub struct Section {
    map: Vec<usize>,
}

impl Section {
    pub fn apply(&self, base_arrow: usize) -> usize {
        self.map[base_arrow]
    }

    pub fn check(&self, ext: &Extension) -> ValidationReport {
        let mut report = ValidationReport::new("section");
        let base = ext.base();
        let mut witnesses = Vec::new();
        for gamma in 0..base.n_arrows() {
            if ext.p(self.map[gamma]) != gamma {
                witnesses.push(format!("arrow {} is not lifted", base.arrow_id(gamma)));
            }
        }
        report.check_all("lifts-each-arrow", witnesses);
        let mut witnesses = Vec::new();
        for gamma in 0..base.n_arrows() {
            if base.is_unit_arrow(gamma) && !ext.total().is_unit_arrow(self.map[gamma]) {
                witnesses.push(format!("unit {} lifted to a non-unit", base.arrow_id(gamma)));
            }
        }
        report.check_all("preserves-units", witnesses);
        report
    }
}

/// The deterministic section: lexicographically least lift per base arrow,
/// with units lifted to units.
pub fn canonical_section(ext: &Extension) -> Result<Section> {
    let base = ext.base();
    let total = ext.total();
    let mut map = Vec::with_capacity(base.n_arrows());
    for gamma in 0..base.n_arrows() {
        let mut fiber = ext.proj_hom().fiber(gamma);
        if fiber.is_empty() {
            return Err(Error::Precondition(format!(
                "projection misses base arrow {}",
                base.arrow_id(gamma)
            )));
        }
        if base.is_unit_arrow(gamma) {
            fiber.retain(|&s| total.is_unit_arrow(s));
            if fiber.is_empty() {
                return Err(Error::Precondition(format!(
                    "no unit lift over base unit arrow {}",
                    base.arrow_id(gamma)
                )));
            }
        }
        fiber.sort_by(|&a, &b| total.arrow_id(a).cmp(total.arrow_id(b)));
        map.push(fiber[0]);
    }
    Ok(Section { map })
}

/// Write `σ = ι(a)·τ(p(σ))` and return `a`.
pub fn kernel_part(ext: &Extension, section: &Section, sigma: usize) -> Result<Elem> {
    let total = ext.total();
    let gamma = ext.p(sigma);
    let lifted = section.apply(gamma);
    let diff = total
        .compose(sigma, total.inv(lifted))
        .ok_or_else(|| Error::Precondition("section lift has wrong endpoints".into()))?;
    let (_, a) = ext
        .iota_preimage(diff)
        .ok_or_else(|| Error::Precondition("arrow does not differ from its lift by the kernel".into()))?;
    Ok(a.clone())
}

/// The cocycle measuring the failure of a section to be multiplicative:
/// `ι(φ(γ₁,γ₂)) = τ(γ₁) τ(γ₂) τ(γ₁γ₂)⁻¹`.
pub fn cocycle_from_extension(ext: &Extension, section: &Section) -> Result<Cocycle2> {
    let check = section.check(ext);
    if !check.is_valid() {
        return Err(Error::Precondition("cocycle extraction needs a normalized section".into()));
    }
    let base = ext.base();
    let total = ext.total();
    let mut entries = Vec::new();
    for (g1, g2) in base.composable_pairs() {
        if base.is_unit_arrow(g1) || base.is_unit_arrow(g2) {
            continue;
        }
        let g12 = base.compose(g1, g2).expect("composable");
        let prod = total
            .compose(section.apply(g1), section.apply(g2))
            .and_then(|x| total.compose(x, total.inv(section.apply(g12))))
            .ok_or_else(|| Error::Precondition("section lifts fail to compose".into()))?;
        let (_, a) = ext.iota_preimage(prod).ok_or_else(|| {
            Error::Precondition("section defect is not in the kernel image".into())
        })?;
        entries.push((
            base.arrow_id(g1).to_string(),
            base.arrow_id(g2).to_string(),
            a.clone(),
        ));
    }
    Cocycle2::new(ext.action(), entries)
}

/// The extension `Σ_φ`: arrows `(a|γ)`, product
/// `(a₁|γ₁)(a₂|γ₂) = (a₁ + γ₁·a₂ + φ(γ₁,γ₂) | γ₁γ₂)`.
pub fn extension_from_cocycle(phi: &Cocycle2) -> Result<Extension> {
    let action = &phi.action;
    let g = &action.groupoid;
    let b = &action.bundle;
    if !b.is_finite() {
        return Err(Error::InfiniteFiber("extension construction needs finite fibers".into()));
    }
    let report = validate_cocycle(phi);
    if !report.is_valid() {
        return Err(Error::Precondition("cocycle identity fails; no extension to build".into()));
    }
    let aid = |a: &Elem, gamma: usize| {
        crate::groupoid::pair_id(&b.fiber(g.tgt(gamma)).elem_id(a), g.arrow_id(gamma))
    };
    let mut arrows = Vec::new();
    let mut comp = Vec::new();
    let mut inv = Vec::new();
    let mut proj_pairs = Vec::new();
    for gamma in 0..g.n_arrows() {
        let fiber_t = b.fiber(g.tgt(gamma));
        let gi = g.inv(gamma);
        for a in fiber_t.elements()? {
            let id = aid(&a, gamma);
            arrows.push((
                id.clone(),
                g.unit_id(g.src(gamma)).to_string(),
                g.unit_id(g.tgt(gamma)).to_string(),
            ));
            proj_pairs.push((id.clone(), g.arrow_id(gamma).to_string()));
            // (a|γ)⁻¹ = (−γ⁻¹·a − φ(γ⁻¹,γ) | γ⁻¹)
            let fiber_s = b.fiber(g.src(gamma));
            let back = action.apply(gi, &a)?;
            let defect = phi.value(gi, gamma)?;
            inv.push((id.clone(), aid(&fiber_s.neg(&fiber_s.add(&back, &defect)), gi)));
            for delta in 0..g.n_arrows() {
                if g.src(gamma) != g.tgt(delta) {
                    continue;
                }
                let gd = g.compose(gamma, delta).expect("composable");
                let twist = phi.value(gamma, delta)?;
                for c in b.fiber(g.tgt(delta)).elements()? {
                    let moved = action.apply(gamma, &c)?;
                    let total = fiber_t.add(&fiber_t.add(&a, &moved), &twist);
                    comp.push((id.clone(), aid(&c, delta), aid(&total, gd)));
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
    Extension::new(total, g.clone(), b.clone(), action.clone(), iota_entries, proj_pairs)
}

/// Push a cocycle forward along an equivariant bundle hom.
pub fn pushforward_cocycle(
    phi: &Cocycle2,
    f: &BundleHom,
    target_act: &GroupoidAction,
) -> Result<Cocycle2> {
    if f.source != phi.action.bundle {
        return Err(Error::Precondition("hom source must carry the cocycle values".into()));
    }
    if target_act.groupoid != phi.action.groupoid || target_act.bundle != f.target {
        return Err(Error::Precondition("target action must put the hom target over the base".into()));
    }
    let equivariance = f.check(&phi.action, target_act);
    if !equivariance.is_valid() {
        return Err(Error::Precondition("bundle hom is not equivariant for the actions".into()));
    }
    let g = &phi.action.groupoid;
    let entries = phi
        .values
        .iter()
        .map(|(&(a, b), v)| {
            Ok((
                g.arrow_id(a).to_string(),
                g.arrow_id(b).to_string(),
                f.apply(g.tgt(a), v)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Cocycle2::new(target_act, entries)
}

// ---------------------------------------------------------------------------
// Transformation groupoids and the dual side

/// The action on the pulled-back bundle over a `G`-space: fiber at a point is
/// the fiber at its anchor, and `(x|γ)` acts by the matrix of `γ`.
pub fn transformation_action(act: &GroupoidAction, space: &GSpace) -> Result<GroupoidAction> {
    let g = &act.groupoid;
    let (new_base, _) = transformation_groupoid(g, space)?;
    let bundle = GroupBundle::new(
        space
            .point_ids()
            .iter()
            .enumerate()
            .map(|(x, id)| (id.clone(), act.bundle.fiber(space.anchor(x)).clone()))
            .collect(),
    )?;
    let mats = (0..new_base.n_arrows())
        .map(|arw| {
            let (_, gamma_id) = crate::groupoid::split_pair_id(new_base.arrow_id(arw))?;
            let gamma = g.arrow_idx(gamma_id)?;
            Ok((new_base.arrow_id(arw).to_string(), act.matrix(gamma).clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    GroupoidAction::new(&new_base, &bundle, mats)
}

/// Lift a cocycle through a transformation groupoid:
/// `φ̃((x|γ₁), (x·γ₁|γ₂)) = φ(γ₁,γ₂)` in the fiber at the anchor of `x`.
pub fn lift_transformation_cocycle(phi: &Cocycle2, space: &GSpace) -> Result<Cocycle2> {
    let g = &phi.action.groupoid;
    let lifted_action = transformation_action(&phi.action, space)?;
    let mut entries = Vec::new();
    for (&(g1, g2), v) in &phi.values {
        for x in 0..space.n_points() {
            if space.anchor(x) != g.tgt(g1) {
                continue;
            }
            let moved = space.act(x, g1).ok_or_else(|| {
                Error::Precondition("space action undefined on an anchored arrow".into())
            })?;
            entries.push((
                crate::groupoid::pair_id(&space.point_ids()[x], g.arrow_id(g1)),
                crate::groupoid::pair_id(&space.point_ids()[moved], g.arrow_id(g2)),
                v.clone(),
            ));
        }
    }
    Cocycle2::new(&lifted_action, entries)
}

/// The pairing against characters, as a bundle hom into the constant `Z_N`
/// bundle over the dual points, together with the trivial action it is
/// equivariant for.
pub fn character_pairing(
    dual: &DualBundle,
    lifted_action: &GroupoidAction,
) -> Result<(BundleHom, GroupoidAction)> {
    let n = dual.modulus;
    let zn = FiniteAbelianGroup::cyclic(n);
    let source = &lifted_action.bundle;
    let target = GroupBundle::constant(source.unit_ids(), &zn)?;
    let mut mats = Vec::new();
    for (pt, id) in source.unit_ids().iter().enumerate() {
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
    let hom = BundleHom::new(source, &target, mats)?;
    let trivial = GroupoidAction::trivial(&lifted_action.groupoid, &target)?;
    Ok((hom, trivial))
}

/// The `Z_N`-valued cocycle on `Â ⋊ G` induced by `φ`: lift over the dual
/// space, then push along the pairing.
pub fn hat_cocycle(phi: &Cocycle2) -> Result<(Cocycle2, DualBundle)> {
    let dual = dual_bundle(&phi.action)?;
    let lifted = lift_transformation_cocycle(phi, &dual.space)?;
    let (pairing, trivial) = character_pairing(&dual, lifted.action())?;
    let hat = pushforward_cocycle(&lifted, &pairing, &trivial)?;
    Ok((hat, dual))
}

// ---------------------------------------------------------------------------
// The rotation family

/// The integer-valued cocycle of the rotation family on the cyclic group of
/// order `n` with parameter `m` coprime to `n`:
/// `ω(k₁,k₂) = 0` if `k₁+k₂ < n`, else `n·s` with `s` the least positive
/// inverse of `m` mod `n`. Values live in a single `Z` fiber with trivial
/// action.
pub fn rotation_cocycle(n: i64, m: i64) -> Result<Cocycle2> {
    if n < 1 {
        return Err(Error::Precondition("rotation cocycle needs n ≥ 1".into()));
    }
    if num_integer::gcd(m.rem_euclid(n.max(1)), n) != 1 {
        return Err(Error::Precondition(format!(
            "rotation parameter m = {m} must be a unit mod n = {n}"
        )));
    }
    let g = cyclic_group(n);
    let z = FiniteAbelianGroup::new(vec![0])?;
    let bundle = GroupBundle::constant(g.unit_ids(), &z)?;
    let action = GroupoidAction::trivial(&g, &bundle)?;
    let s = (1..=n)
        .find(|s| (s * m).rem_euclid(n) == 1 % n)
        .expect("a unit mod n has an inverse");
    let mut entries = Vec::new();
    for k1 in 1..n {
        for k2 in 1..n {
            if k1 + k2 >= n {
                entries.push((
                    g.arrow_id(k1 as usize).to_string(),
                    g.arrow_id(k2 as usize).to_string(),
                    Elem(vec![n * s]),
                ));
            }
        }
    }
    Cocycle2::new(&action, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::validate_action;
    use crate::extension::validate_extension;
    use crate::groupoid::{abelian_group, validate_groupoid};

    fn trivial_action(n: i64, m: i64) -> GroupoidAction {
        let g = cyclic_group(n);
        let b = GroupBundle::constant(g.unit_ids(), &FiniteAbelianGroup::cyclic(m)).unwrap();
        GroupoidAction::trivial(&g, &b).unwrap()
    }

    #[test]
    fn rotation_cocycle_has_the_advertised_values() {
        let omega = rotation_cocycle(3, 2).unwrap();
        let g = &omega.action().groupoid;
        let one = g.arrow_idx("1").unwrap();
        let two = g.arrow_idx("2").unwrap();
        assert_eq!(omega.value(one, one).unwrap(), Elem(vec![0]));
        assert_eq!(omega.value(one, two).unwrap(), Elem(vec![6]));
        assert_eq!(omega.value(two, two).unwrap(), Elem(vec![6]));
        assert!(validate_cocycle(&omega).is_valid());

        let omega = rotation_cocycle(2, 1).unwrap();
        let g = &omega.action().groupoid;
        let one = g.arrow_idx("1").unwrap();
        assert_eq!(omega.value(one, one).unwrap(), Elem(vec![2]));
        assert!(validate_cocycle(&omega).is_valid());

        assert!(rotation_cocycle(4, 2).is_err());
    }

    #[test]
    fn coboundaries_are_cocycles_and_detected() {
        let act = trivial_action(4, 2);
        let g = &act.groupoid.clone();
        let c = Cochain1::new(
            &act,
            vec![
                ("1".into(), Elem(vec![1])),
                ("2".into(), Elem(vec![1])),
            ],
        )
        .unwrap();
        let dc = coboundary(&c).unwrap();
        assert!(validate_cocycle(&dc).is_valid());
        let witness = cohomologous(&dc, &Cocycle2::zero(&act)).unwrap().unwrap();
        assert_eq!(coboundary(&witness).unwrap(), dc);
        let _ = g;
    }

    #[test]
    fn h2_of_small_cyclic_contexts() {
        assert_eq!(h2(&trivial_action(2, 2)).unwrap().invariant_factors, vec![2]);
        assert_eq!(h2(&trivial_action(4, 2)).unwrap().invariant_factors, vec![2]);
        assert!(h2(&trivial_action(3, 2)).unwrap().is_trivial());
        assert_eq!(h2(&trivial_action(6, 4)).unwrap().invariant_factors, vec![2]);
    }

    #[test]
    fn h2_respects_nontrivial_actions() {
        // sign action of Z2 on Z3 kills cohomology
        let g = cyclic_group(2);
        let b = GroupBundle::constant(g.unit_ids(), &FiniteAbelianGroup::cyclic(3)).unwrap();
        let act = GroupoidAction::new(
            &g,
            &b,
            vec![("0".into(), vec![vec![1]]), ("1".into(), vec![vec![-1]])],
        )
        .unwrap();
        assert!(validate_action(&act).is_valid());
        assert!(h2(&act).unwrap().is_trivial());
    }

    #[test]
    fn h2_of_klein_context_is_rank_three() {
        let v = FiniteAbelianGroup::from_orders(&[2, 2]).unwrap();
        let g = abelian_group(&v).unwrap();
        let b = GroupBundle::constant(g.unit_ids(), &FiniteAbelianGroup::cyclic(2)).unwrap();
        let act = GroupoidAction::trivial(&g, &b).unwrap();
        let h = h2(&act).unwrap();
        assert_eq!(h.invariant_factors, vec![2, 2, 2]);
        assert_eq!(h.class_representatives().unwrap().len(), 8);
    }

    #[test]
    fn h2_generators_are_honest_cocycles() {
        let h = h2(&trivial_action(4, 4)).unwrap();
        assert_eq!(h.invariant_factors, vec![4]);
        for phi in &h.basis {
            assert!(validate_cocycle(phi).is_valid());
            assert!(cohomologous(phi, &Cocycle2::zero(phi.action())).unwrap().is_none());
        }
        // the generator really has order 4: 2·φ is still non-trivial
        let twice = h.basis[0].scale(2);
        assert!(cohomologous(&twice, &Cocycle2::zero(twice.action())).unwrap().is_none());
    }

    #[test]
    fn cocycle_extension_roundtrip() {
        let h = h2(&trivial_action(2, 2)).unwrap();
        let phi = &h.basis[0];
        let ext = extension_from_cocycle(phi).unwrap();
        assert!(validate_groupoid(ext.total()).is_valid());
        assert!(validate_extension(&ext).is_valid());
        // Z2-by-Z2 with the nontrivial class is Z4: some element has order 4
        let t = ext.total();
        let has_order_4 = (0..t.n_arrows()).any(|a| {
            let sq = t.compose(a, a).unwrap();
            !t.is_unit_arrow(sq)
        });
        assert!(has_order_4);
        let section = canonical_section(&ext).unwrap();
        let back = cocycle_from_extension(&ext, &section).unwrap();
        assert_eq!(&back, phi);
    }

    #[test]
    fn kernel_part_reconstructs_arrows() {
        let h = h2(&trivial_action(4, 2)).unwrap();
        let ext = extension_from_cocycle(&h.basis[0]).unwrap();
        let section = canonical_section(&ext).unwrap();
        let total = ext.total();
        for sigma in 0..total.n_arrows() {
            let a = kernel_part(&ext, &section, sigma).unwrap();
            let gamma = ext.p(sigma);
            let rebuilt = total
                .compose(ext.iota(ext.base().tgt(gamma), &a).unwrap(), section.apply(gamma))
                .unwrap();
            assert_eq!(rebuilt, sigma);
        }
    }

    #[test]
    fn lifted_cocycle_over_translation_space_splits() {
        // Z2 translating itself gives the pair groupoid, whose H² vanishes,
        // so any lifted cocycle must become a coboundary.
        let h = h2(&trivial_action(2, 2)).unwrap();
        let phi = &h.basis[0];
        let g = &phi.action().groupoid;
        let points: Vec<(String, String)> =
            vec![("x0".into(), "u".into()), ("x1".into(), "u".into())];
        let space = GSpace::from_fn(g, points, |p, a| {
            let i: i64 = p[1..].parse().unwrap();
            let k: i64 = a.parse().unwrap();
            format!("x{}", (i + k).rem_euclid(2))
        })
        .unwrap();
        let lifted = lift_transformation_cocycle(phi, &space).unwrap();
        assert!(validate_cocycle(&lifted).is_valid());
        assert!(cohomologous(&lifted, &Cocycle2::zero(lifted.action())).unwrap().is_some());
    }

    #[test]
    fn hat_cocycle_lands_in_the_pairing_modulus() {
        let h = h2(&trivial_action(2, 2)).unwrap();
        let (hat, dual) = hat_cocycle(&h.basis[0]).unwrap();
        assert_eq!(dual.modulus, 2);
        assert!(validate_cocycle(&hat).is_valid());
        let ext = extension_from_cocycle(&hat).unwrap();
        // two characters, each with the two arrows of Z2 over it, fibers Z2
        assert_eq!(ext.total().n_arrows(), 8);
        assert!(validate_extension(&ext).is_valid());
    }

    #[test]
    fn cocycle_arithmetic_reduces_and_cancels() {
        let act = trivial_action(2, 2);
        let h = h2(&act).unwrap();
        let phi = &h.basis[0];
        assert!(phi.add(&phi.neg()).unwrap().is_zero());
        assert!(phi.scale(2).is_zero());
        assert_eq!(phi.sub(&Cocycle2::zero(&act)).unwrap(), *phi);
    }
}
