//! Finite groupoids as explicit composition tables.
//!
//! A groupoid here is a finite set of units, a finite set of arrows with source
//! and target, a partial composition `compose(a, b)` defined exactly when
//! `src(a) = tgt(b)` (so `a` is applied after `b`), and an involutive inverse.
//! Identifiers are opaque strings; all tables are kept in sorted identifier
//! order so every construction is deterministic, and composite constructions
//! derive their identifiers from the inputs (`"(x|y)"` for pairs, coset
//! representatives for quotients).
//!
//! Construction is deliberately permissive: [`FiniteGroupoid::from_tables`]
//! only resolves identifiers and stores the tables, while
//! [`validate_groupoid`] checks the axioms and reports every violation with a
//! witness. Unit arrows are inferred from the table (the unique two-sided
//! identity at each unit) rather than declared, so an invalid table can still
//! be loaded, inspected, and reported on.

use crate::error::{Error, Result};
use crate::report::ValidationReport;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// `(units, arrows as (id, src, tgt), composition triples, inverse pairs)`.
pub type GroupoidTables =
    (Vec<String>, Vec<(String, String, String)>, Vec<(String, String, String)>, Vec<(String, String)>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    units: Vec<String>,
    arrows: Vec<String>,
    unit_index: HashMap<String, usize>,
    arrow_index: HashMap<String, usize>,
    src: Vec<usize>,
    tgt: Vec<usize>,
    comp: Vec<Option<usize>>,
    inv: Vec<usize>,
    unit_arrow: Vec<Option<usize>>,
}

impl FiniteGroupoid {
    /// Build from raw tables: `arrows` as `(id, src, tgt)`, `comp` as triples
    /// `(a, b, a∘b)`, `inv` as pairs `(a, a⁻¹)`. Identifier errors are hard
    /// failures; axiom violations are left for [`validate_groupoid`].
    pub fn from_tables(
        units: Vec<String>,
        arrows: Vec<(String, String, String)>,
        comp: Vec<(String, String, String)>,
        inv: Vec<(String, String)>,
    ) -> Result<Self> {
        let mut units = units;
        units.sort();
        for w in units.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateId { kind: "unit", id: w[0].clone() });
            }
        }
        let unit_index: HashMap<String, usize> =
            units.iter().enumerate().map(|(i, u)| (u.clone(), i)).collect();

        let mut arrows_sorted = arrows;
        arrows_sorted.sort_by(|a, b| a.0.cmp(&b.0));
        for w in arrows_sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateId { kind: "arrow", id: w[0].0.clone() });
            }
        }
        let arrow_ids: Vec<String> = arrows_sorted.iter().map(|a| a.0.clone()).collect();
        let arrow_index: HashMap<String, usize> =
            arrow_ids.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let lookup_unit = |id: &str| -> Result<usize> {
            unit_index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownId { kind: "unit", id: id.into() })
        };
        let lookup_arrow = |id: &str| -> Result<usize> {
            arrow_index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownId { kind: "arrow", id: id.into() })
        };

        let n = arrow_ids.len();
        let mut src = Vec::with_capacity(n);
        let mut tgt = Vec::with_capacity(n);
        for (_, s, t) in &arrows_sorted {
            src.push(lookup_unit(s)?);
            tgt.push(lookup_unit(t)?);
        }

        let mut comp_table = vec![None; n * n];
        for (a, b, ab) in &comp {
            let (ia, ib, iab) = (lookup_arrow(a)?, lookup_arrow(b)?, lookup_arrow(ab)?);
            let slot = &mut comp_table[ia * n + ib];
            if let Some(prev) = *slot {
                if prev != iab {
                    return Err(Error::Invalid(format!("conflicting composites for ({a}, {b})")));
                }
            }
            *slot = Some(iab);
        }

        let mut inv_table = vec![usize::MAX; n];
        for (a, ai) in &inv {
            let (ia, iai) = (lookup_arrow(a)?, lookup_arrow(ai)?);
            if inv_table[ia] != usize::MAX && inv_table[ia] != iai {
                return Err(Error::Invalid(format!("conflicting inverses for {a}")));
            }
            inv_table[ia] = iai;
        }
        if let Some(missing) = (0..n).find(|&i| inv_table[i] == usize::MAX) {
            return Err(Error::Invalid(format!("no inverse listed for {}", arrow_ids[missing])));
        }

        let mut g = FiniteGroupoid {
            units,
            arrows: arrow_ids,
            unit_index,
            arrow_index,
            src,
            tgt,
            comp: comp_table,
            inv: inv_table,
            unit_arrow: Vec::new(),
        };
        g.unit_arrow = g.infer_unit_arrows();
        Ok(g)
    }

    /// The unique two-sided identity at each unit, where one exists.
    fn infer_unit_arrows(&self) -> Vec<Option<usize>> {
        let n = self.arrows.len();
        self.units
            .iter()
            .enumerate()
            .map(|(u, _)| {
                let mut found = None;
                'cand: for e in 0..n {
                    if self.src[e] != u || self.tgt[e] != u {
                        continue;
                    }
                    for x in 0..n {
                        if self.tgt[x] == u && self.comp[e * n + x] != Some(x) {
                            continue 'cand;
                        }
                        if self.src[x] == u && self.comp[x * n + e] != Some(x) {
                            continue 'cand;
                        }
                    }
                    if found.is_some() {
                        return None; // ambiguous; reported by validate_groupoid
                    }
                    found = Some(e);
                }
                found
            })
            .collect()
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn unit_ids(&self) -> &[String] {
        &self.units
    }

    pub fn arrow_ids(&self) -> &[String] {
        &self.arrows
    }

    pub fn unit_id(&self, u: usize) -> &str {
        &self.units[u]
    }

    pub fn arrow_id(&self, a: usize) -> &str {
        &self.arrows[a]
    }

    pub fn unit_idx(&self, id: &str) -> Result<usize> {
        self.unit_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownId { kind: "unit", id: id.into() })
    }

    pub fn arrow_idx(&self, id: &str) -> Result<usize> {
        self.arrow_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownId { kind: "arrow", id: id.into() })
    }

    pub fn src(&self, a: usize) -> usize {
        self.src[a]
    }

    pub fn tgt(&self, a: usize) -> usize {
        self.tgt[a]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// `a ∘ b` ("b then a"), defined when `src(a) = tgt(b)`.
    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.comp[a * self.arrows.len() + b]
    }

    pub fn unit_arrow_opt(&self, u: usize) -> Option<usize> {
        self.unit_arrow[u]
    }

    pub fn unit_arrow(&self, u: usize) -> Result<usize> {
        self.unit_arrow[u].ok_or_else(|| {
            Error::Precondition(format!("no identity arrow at unit {}", self.units[u]))
        })
    }

    pub fn is_unit_arrow(&self, a: usize) -> bool {
        self.unit_arrow[self.tgt[a]] == Some(a) && self.src[a] == self.tgt[a]
    }

    /// All `(a, b)` with `src(a) = tgt(b)`, in index order.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.arrows.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.src[a] == self.tgt[b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn arrows_into(&self, u: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.tgt[a] == u).collect()
    }

    pub fn arrows_out_of(&self, u: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.src[a] == u).collect()
    }

    pub fn isotropy_at(&self, u: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.src[a] == u && self.tgt[a] == u).collect()
    }

    /// Raw tables, for serialization.
    pub fn to_tables(&self) -> GroupoidTables {
        let n = self.arrows.len();
        let arrows = (0..n)
            .map(|a| {
                (self.arrows[a].clone(), self.units[self.src[a]].clone(), self.units[self.tgt[a]].clone())
            })
            .collect();
        let mut comp = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if let Some(ab) = self.comp[a * n + b] {
                    comp.push((self.arrows[a].clone(), self.arrows[b].clone(), self.arrows[ab].clone()));
                }
            }
        }
        let inv = (0..n).map(|a| (self.arrows[a].clone(), self.arrows[self.inv[a]].clone())).collect();
        (self.units.clone(), arrows, comp, inv)
    }
}

/// Check the groupoid axioms, one named check per axiom, each with witnesses.
pub fn validate_groupoid(g: &FiniteGroupoid) -> ValidationReport {
    let mut report = ValidationReport::new("groupoid");
    let n = g.n_arrows();

    let mut witnesses = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let should = g.src(a) == g.tgt(b);
            let is = g.compose(a, b).is_some();
            if should != is {
                witnesses.push(if should {
                    format!("({}, {}) composable but undefined", g.arrow_id(a), g.arrow_id(b))
                } else {
                    format!("({}, {}) not composable but defined", g.arrow_id(a), g.arrow_id(b))
                });
            }
        }
    }
    report.check_all("composition-domain", witnesses);

    let mut witnesses = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if let Some(ab) = g.compose(a, b) {
                if g.src(ab) != g.src(b) || g.tgt(ab) != g.tgt(a) {
                    witnesses.push(format!(
                        "src/tgt of {} ∘ {} disagree with factors",
                        g.arrow_id(a),
                        g.arrow_id(b)
                    ));
                }
            }
        }
    }
    report.check_all("composite-endpoints", witnesses);

    let mut witnesses = Vec::new();
    for u in 0..g.n_units() {
        if g.unit_arrow_opt(u).is_none() {
            witnesses.push(format!("no unique two-sided identity at {}", g.unit_id(u)));
        }
    }
    report.check_all("identity-at-each-unit", witnesses);

    let mut witnesses = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let Some(ab) = g.compose(a, b) else { continue };
            for c in 0..n {
                let Some(bc) = g.compose(b, c) else { continue };
                if g.compose(ab, c) != g.compose(a, bc) {
                    witnesses.push(format!(
                        "({} ∘ {}) ∘ {} ≠ {} ∘ ({} ∘ {})",
                        g.arrow_id(a),
                        g.arrow_id(b),
                        g.arrow_id(c),
                        g.arrow_id(a),
                        g.arrow_id(b),
                        g.arrow_id(c)
                    ));
                }
            }
        }
    }
    report.check_all("associativity", witnesses);

    let mut witnesses = Vec::new();
    for a in 0..n {
        let ai = g.inv(a);
        if g.inv(ai) != a {
            witnesses.push(format!("inv(inv({})) ≠ {}", g.arrow_id(a), g.arrow_id(a)));
        }
        if g.src(ai) != g.tgt(a) || g.tgt(ai) != g.src(a) {
            witnesses.push(format!("inverse of {} has wrong endpoints", g.arrow_id(a)));
        }
    }
    report.check_all("inverse-endpoints", witnesses);

    let mut witnesses = Vec::new();
    for a in 0..n {
        let ai = g.inv(a);
        let left_ok = g
            .unit_arrow_opt(g.src(a))
            .is_some_and(|e| g.compose(ai, a) == Some(e));
        let right_ok = g
            .unit_arrow_opt(g.tgt(a))
            .is_some_and(|e| g.compose(a, ai) == Some(e));
        if !left_ok || !right_ok {
            witnesses.push(format!("{} ∘ inv and inv ∘ {} do not both give identities", g.arrow_id(a), g.arrow_id(a)));
        }
    }
    report.check_all("inverse-laws", witnesses);

    report
}

/// A functor between finite groupoids, stored as a total arrow map; the unit
/// map is derived from where unit arrows land.
#[derive(Debug, Clone)]
pub struct GroupoidHom {
    pub dom: FiniteGroupoid,
    pub cod: FiniteGroupoid,
    arrow_map: Vec<usize>,
    unit_map: Vec<usize>,
}

impl GroupoidHom {
    pub fn from_fn(
        dom: &FiniteGroupoid,
        cod: &FiniteGroupoid,
        f: impl Fn(&str) -> String,
    ) -> Result<Self> {
        let mut arrow_map = Vec::with_capacity(dom.n_arrows());
        for a in dom.arrow_ids() {
            arrow_map.push(cod.arrow_idx(&f(a))?);
        }
        Self::from_arrow_map(dom, cod, arrow_map)
    }

    pub fn from_pairs(
        dom: &FiniteGroupoid,
        cod: &FiniteGroupoid,
        pairs: &[(String, String)],
    ) -> Result<Self> {
        let mut table = vec![usize::MAX; dom.n_arrows()];
        for (a, fa) in pairs {
            table[dom.arrow_idx(a)?] = cod.arrow_idx(fa)?;
        }
        if let Some(missing) = (0..dom.n_arrows()).find(|&i| table[i] == usize::MAX) {
            return Err(Error::Invalid(format!("no image listed for {}", dom.arrow_id(missing))));
        }
        Self::from_arrow_map(dom, cod, table)
    }

    pub fn from_arrow_map(
        dom: &FiniteGroupoid,
        cod: &FiniteGroupoid,
        arrow_map: Vec<usize>,
    ) -> Result<Self> {
        if arrow_map.len() != dom.n_arrows() {
            return Err(Error::Shape("arrow map length mismatch".into()));
        }
        // Unit map through unit arrows; failures surface in check().
        let mut unit_map = vec![usize::MAX; dom.n_units()];
        for u in 0..dom.n_units() {
            if let Some(e) = dom.unit_arrow_opt(u) {
                unit_map[u] = cod.tgt(arrow_map[e]);
            }
        }
        Ok(GroupoidHom { dom: dom.clone(), cod: cod.clone(), arrow_map, unit_map })
    }

    pub fn identity(g: &FiniteGroupoid) -> Self {
        GroupoidHom {
            dom: g.clone(),
            cod: g.clone(),
            arrow_map: (0..g.n_arrows()).collect(),
            unit_map: (0..g.n_units()).collect(),
        }
    }

    pub fn apply(&self, a: usize) -> usize {
        self.arrow_map[a]
    }

    pub fn apply_unit(&self, u: usize) -> usize {
        self.unit_map[u]
    }

    pub fn apply_id(&self, id: &str) -> Result<&str> {
        Ok(self.cod.arrow_id(self.arrow_map[self.dom.arrow_idx(id)?]))
    }

    /// `self ∘ inner` (apply `inner` first).
    pub fn compose(&self, inner: &GroupoidHom) -> Result<GroupoidHom> {
        if inner.cod.arrow_ids() != self.dom.arrow_ids() {
            return Err(Error::Precondition("homs not composable".into()));
        }
        let arrow_map = (0..inner.dom.n_arrows()).map(|a| self.apply(inner.apply(a))).collect();
        GroupoidHom::from_arrow_map(&inner.dom, &self.cod, arrow_map)
    }

    /// Functoriality: endpoints, composition, and inverses all preserved.
    pub fn check(&self) -> ValidationReport {
        let mut report = ValidationReport::new("groupoid-hom");
        let d = &self.dom;
        let c = &self.cod;

        let mut witnesses = Vec::new();
        for u in 0..d.n_units() {
            if self.unit_map[u] == usize::MAX {
                witnesses.push(format!("unit {} has no image (missing identity arrow)", d.unit_id(u)));
            }
        }
        for a in 0..d.n_arrows() {
            let fa = self.arrow_map[a];
            if self.unit_map[d.src(a)] != c.src(fa) || self.unit_map[d.tgt(a)] != c.tgt(fa) {
                witnesses.push(format!("endpoints of {} not preserved", d.arrow_id(a)));
            }
        }
        report.check_all("endpoint-compatibility", witnesses);

        let mut witnesses = Vec::new();
        for u in 0..d.n_units() {
            let (Some(e), true) = (d.unit_arrow_opt(u), self.unit_map[u] != usize::MAX) else {
                continue;
            };
            if c.unit_arrow_opt(self.unit_map[u]) != Some(self.arrow_map[e]) {
                witnesses.push(format!("identity at {} not sent to an identity", d.unit_id(u)));
            }
        }
        report.check_all("preserves-identities", witnesses);

        let mut witnesses = Vec::new();
        for (a, b) in d.composable_pairs() {
            let Some(ab) = d.compose(a, b) else { continue };
            if c.compose(self.arrow_map[a], self.arrow_map[b]) != Some(self.arrow_map[ab]) {
                witnesses.push(format!(
                    "f({} ∘ {}) ≠ f({}) ∘ f({})",
                    d.arrow_id(a),
                    d.arrow_id(b),
                    d.arrow_id(a),
                    d.arrow_id(b)
                ));
            }
        }
        report.check_all("preserves-composition", witnesses);

        let mut witnesses = Vec::new();
        for a in 0..d.n_arrows() {
            if c.inv(self.arrow_map[a]) != self.arrow_map[d.inv(a)] {
                witnesses.push(format!("f(inv {}) ≠ inv f({})", d.arrow_id(a), d.arrow_id(a)));
            }
        }
        report.check_all("preserves-inverses", witnesses);

        report
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.cod.n_arrows()];
        for &fa in &self.arrow_map {
            if seen[fa] {
                return false;
            }
            seen[fa] = true;
        }
        self.dom.n_arrows() == self.cod.n_arrows()
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod.n_arrows()];
        for &fa in &self.arrow_map {
            seen[fa] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// Arrows of the domain mapping onto `b`.
    pub fn fiber(&self, b: usize) -> Vec<usize> {
        (0..self.dom.n_arrows()).filter(|&a| self.arrow_map[a] == b).collect()
    }

    pub fn unit_map_is_bijective(&self) -> bool {
        if self.unit_map.contains(&usize::MAX) {
            return false;
        }
        let mut seen = vec![false; self.cod.n_units()];
        for &u in &self.unit_map {
            if seen[u] {
                return false;
            }
            seen[u] = true;
        }
        self.dom.n_units() == self.cod.n_units()
    }
}

// ---------------------------------------------------------------------------
// Builders

fn padded(v: i64, max: i64) -> String {
    let width = max.max(0).to_string().len();
    format!("{v:0width$}")
}

/// The cyclic group of order `n` as a one-unit groupoid; arrow `k` is written
/// additively, so `compose(a, b) = a + b mod n`.
pub fn cyclic_group(n: i64) -> FiniteGroupoid {
    assert!(n >= 1, "cyclic group needs positive order");
    let unit = "u".to_string();
    let id = |k: i64| padded(k, n - 1);
    let arrows = (0..n).map(|k| (id(k), unit.clone(), unit.clone())).collect();
    let mut comp = Vec::new();
    for a in 0..n {
        for b in 0..n {
            comp.push((id(a), id(b), id((a + b) % n)));
        }
    }
    let inv = (0..n).map(|a| (id(a), id((n - a) % n))).collect();
    FiniteGroupoid::from_tables(vec![unit], arrows, comp, inv)
        .expect("cyclic tables are well-formed")
}

/// A finite abelian group as a one-unit groupoid with element identifiers.
pub fn abelian_group(a: &crate::abelian::FiniteAbelianGroup) -> Result<FiniteGroupoid> {
    let elems = a.elements()?;
    let unit = "u".to_string();
    let arrows = elems.iter().map(|e| (a.elem_id(e), unit.clone(), unit.clone())).collect();
    let mut comp = Vec::new();
    for x in &elems {
        for y in &elems {
            comp.push((a.elem_id(x), a.elem_id(y), a.elem_id(&a.add(x, y))));
        }
    }
    let inv = elems.iter().map(|e| (a.elem_id(e), a.elem_id(&a.neg(e)))).collect();
    FiniteGroupoid::from_tables(vec![unit], arrows, comp, inv)
}

/// The pair groupoid on `k` units: one arrow `(ui|uj)` from `uj` to `ui`.
pub fn pair_groupoid(k: i64) -> FiniteGroupoid {
    assert!(k >= 1, "pair groupoid needs at least one unit");
    let unit = |i: i64| format!("u{}", padded(i, k));
    let aid = |i: i64, j: i64| pair_id(&unit(i), &unit(j));
    let units: Vec<String> = (1..=k).map(unit).collect();
    let mut arrows = Vec::new();
    let mut comp = Vec::new();
    let mut inv = Vec::new();
    for i in 1..=k {
        for j in 1..=k {
            arrows.push((aid(i, j), unit(j), unit(i)));
            inv.push((aid(i, j), aid(j, i)));
            for l in 1..=k {
                comp.push((aid(i, j), aid(j, l), aid(i, l)));
            }
        }
    }
    FiniteGroupoid::from_tables(units, arrows, comp, inv).expect("pair tables are well-formed")
}

/// Disjoint union; identifiers are prefixed with their part's label.
pub fn disjoint_union(parts: &[(&str, &FiniteGroupoid)]) -> Result<FiniteGroupoid> {
    let labels: BTreeSet<&str> = parts.iter().map(|(l, _)| *l).collect();
    if labels.len() != parts.len() {
        return Err(Error::Invalid("duplicate part labels in disjoint union".into()));
    }
    let mut units = Vec::new();
    let mut arrows = Vec::new();
    let mut comp = Vec::new();
    let mut inv = Vec::new();
    for (label, g) in parts {
        let tag = |s: &str| format!("{label}:{s}");
        units.extend(g.unit_ids().iter().map(|u| tag(u)));
        let (_, ars, cmp, invs) = g.to_tables();
        arrows.extend(ars.into_iter().map(|(a, s, t)| (tag(&a), tag(&s), tag(&t))));
        comp.extend(cmp.into_iter().map(|(a, b, c)| (tag(&a), tag(&b), tag(&c))));
        inv.extend(invs.into_iter().map(|(a, b)| (tag(&a), tag(&b))));
    }
    FiniteGroupoid::from_tables(units, arrows, comp, inv)
}

/// Full subgroupoid on a subset of units.
pub fn restrict(g: &FiniteGroupoid, units: &[String]) -> Result<FiniteGroupoid> {
    let keep: BTreeSet<usize> =
        units.iter().map(|u| g.unit_idx(u)).collect::<Result<_>>()?;
    let kept_arrows: HashSet<usize> = (0..g.n_arrows())
        .filter(|&a| keep.contains(&g.src(a)) && keep.contains(&g.tgt(a)))
        .collect();
    let unit_ids: Vec<String> = keep.iter().map(|&u| g.unit_id(u).to_string()).collect();
    let arrows = kept_arrows
        .iter()
        .map(|&a| {
            (g.arrow_id(a).to_string(), g.unit_id(g.src(a)).to_string(), g.unit_id(g.tgt(a)).to_string())
        })
        .collect();
    let mut comp = Vec::new();
    for &a in &kept_arrows {
        for &b in &kept_arrows {
            if let Some(ab) = g.compose(a, b) {
                comp.push((g.arrow_id(a).to_string(), g.arrow_id(b).to_string(), g.arrow_id(ab).to_string()));
            }
        }
    }
    let inv = kept_arrows
        .iter()
        .map(|&a| (g.arrow_id(a).to_string(), g.arrow_id(g.inv(a)).to_string()))
        .collect();
    FiniteGroupoid::from_tables(unit_ids, arrows, comp, inv)
}

/// Quotient by a wide normal subgroupoid of the isotropy. Cosets are named by
/// their lexicographically smallest member; returns the quotient and the
/// projection functor.
pub fn quotient_by_normal_subgroupoid(
    g: &FiniteGroupoid,
    normal: &[String],
) -> Result<(FiniteGroupoid, GroupoidHom)> {
    let sub: BTreeSet<usize> = normal.iter().map(|a| g.arrow_idx(a)).collect::<Result<_>>()?;
    for &x in &sub {
        if g.src(x) != g.tgt(x) {
            return Err(Error::Precondition(format!(
                "{} is not an isotropy arrow",
                g.arrow_id(x)
            )));
        }
        if !sub.contains(&g.inv(x)) {
            return Err(Error::Precondition(format!(
                "subgroupoid not closed under inverse at {}",
                g.arrow_id(x)
            )));
        }
        for &y in &sub {
            if let Some(xy) = g.compose(x, y) {
                if !sub.contains(&xy) {
                    return Err(Error::Precondition(format!(
                        "subgroupoid not closed under composition at ({}, {})",
                        g.arrow_id(x),
                        g.arrow_id(y)
                    )));
                }
            }
        }
    }
    for u in 0..g.n_units() {
        let e = g.unit_arrow(u)?;
        if !sub.contains(&e) {
            return Err(Error::Precondition(format!("subgroupoid not wide: missing identity at {}", g.unit_id(u))));
        }
    }
    // Normality: d · N = N · d as sets, for every arrow d.
    for d in 0..g.n_arrows() {
        let right: BTreeSet<usize> = sub
            .iter()
            .filter(|&&x| g.tgt(x) == g.src(d))
            .map(|&x| g.compose(d, x).expect("composable by construction"))
            .collect();
        let left: BTreeSet<usize> = sub
            .iter()
            .filter(|&&y| g.src(y) == g.tgt(d))
            .map(|&y| g.compose(y, d).expect("composable by construction"))
            .collect();
        if right != left {
            return Err(Error::Precondition(format!(
                "subgroupoid not normal: cosets of {} differ",
                g.arrow_id(d)
            )));
        }
    }

    // Right cosets, labelled by smallest member id.
    let mut coset_of = vec![usize::MAX; g.n_arrows()];
    let mut reps: Vec<usize> = Vec::new();
    for a in 0..g.n_arrows() {
        if coset_of[a] != usize::MAX {
            continue;
        }
        let mut members: Vec<usize> = sub
            .iter()
            .filter(|&&x| g.tgt(x) == g.src(a))
            .map(|&x| g.compose(a, x).expect("composable by construction"))
            .collect();
        members.push(a);
        let rep = members
            .iter()
            .copied()
            .min_by(|&x, &y| g.arrow_id(x).cmp(g.arrow_id(y)))
            .expect("coset non-empty");
        let rep_slot = reps.len();
        reps.push(rep);
        for m in members {
            coset_of[m] = rep_slot;
        }
    }

    let rep_id = |slot: usize| g.arrow_id(reps[slot]).to_string();
    let arrows: Vec<(String, String, String)> = (0..reps.len())
        .map(|s| {
            let a = reps[s];
            (rep_id(s), g.unit_id(g.src(a)).to_string(), g.unit_id(g.tgt(a)).to_string())
        })
        .collect();
    let mut comp = Vec::new();
    for s1 in 0..reps.len() {
        for s2 in 0..reps.len() {
            if let Some(ab) = g.compose(reps[s1], reps[s2]) {
                comp.push((rep_id(s1), rep_id(s2), rep_id(coset_of[ab])));
            }
        }
    }
    let inv = (0..reps.len()).map(|s| (rep_id(s), rep_id(coset_of[g.inv(reps[s])]))).collect();
    let q = FiniteGroupoid::from_tables(g.unit_ids().to_vec(), arrows, comp, inv)?;
    let proj_map: Vec<usize> = (0..g.n_arrows())
        .map(|a| q.arrow_idx(g.arrow_id(reps[coset_of[a]])).expect("rep id present"))
        .collect();
    let proj = GroupoidHom::from_arrow_map(g, &q, proj_map)?;
    Ok((q, proj))
}

/// Rename units while keeping arrow identifiers and tables.
pub fn relabel_units(g: &FiniteGroupoid, map: &BTreeMap<String, String>) -> Result<FiniteGroupoid> {
    let rename = |u: &str| -> Result<String> {
        map.get(u)
            .cloned()
            .ok_or_else(|| Error::UnknownId { kind: "unit", id: u.into() })
    };
    let (units, arrows, comp, inv) = g.to_tables();
    let units = units.iter().map(|u| rename(u)).collect::<Result<Vec<_>>>()?;
    let arrows = arrows
        .into_iter()
        .map(|(a, s, t)| Ok((a, rename(&s)?, rename(&t)?)))
        .collect::<Result<Vec<_>>>()?;
    FiniteGroupoid::from_tables(units, arrows, comp, inv)
}

// ---------------------------------------------------------------------------
// Right actions on finite sets and transformation groupoids

/// A finite right `G`-space: points with an anchor unit, acted on by arrows.
/// `x · γ` is defined when `anchor(x) = tgt(γ)` and lands at anchor `src(γ)`.
#[derive(Debug, Clone)]
pub struct GSpace {
    points: Vec<String>,
    point_index: HashMap<String, usize>,
    anchor: Vec<usize>,
    act: Vec<Vec<Option<usize>>>,
}

impl GSpace {
    pub fn from_fn(
        g: &FiniteGroupoid,
        points: Vec<(String, String)>,
        f: impl Fn(&str, &str) -> String,
    ) -> Result<Self> {
        let mut pts = points;
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        for w in pts.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateId { kind: "point", id: w[0].0.clone() });
            }
        }
        let ids: Vec<String> = pts.iter().map(|(p, _)| p.clone()).collect();
        let point_index: HashMap<String, usize> =
            ids.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let anchor: Vec<usize> =
            pts.iter().map(|(_, u)| g.unit_idx(u)).collect::<Result<_>>()?;
        let mut act = vec![vec![None; g.n_arrows()]; ids.len()];
        for (x, row) in act.iter_mut().enumerate() {
            for (a, slot) in row.iter_mut().enumerate() {
                if anchor[x] == g.tgt(a) {
                    let img = f(&ids[x], g.arrow_id(a));
                    let ix = point_index
                        .get(&img)
                        .copied()
                        .ok_or(Error::UnknownId { kind: "point", id: img })?;
                    *slot = Some(ix);
                }
            }
        }
        Ok(GSpace { points: ids, point_index, anchor, act })
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn point_ids(&self) -> &[String] {
        &self.points
    }

    pub fn point_idx(&self, id: &str) -> Result<usize> {
        self.point_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownId { kind: "point", id: id.into() })
    }

    pub fn anchor(&self, x: usize) -> usize {
        self.anchor[x]
    }

    pub fn act(&self, x: usize, a: usize) -> Option<usize> {
        self.act[x][a]
    }

    /// Action laws: anchors transform correctly, identities fix points, and
    /// the action is compatible with composition.
    pub fn check(&self, g: &FiniteGroupoid) -> ValidationReport {
        let mut report = ValidationReport::new("g-space");
        let mut witnesses = Vec::new();
        for x in 0..self.points.len() {
            for a in 0..g.n_arrows() {
                match self.act[x][a] {
                    Some(y) => {
                        if self.anchor[x] != g.tgt(a) {
                            witnesses.push(format!("{} · {} defined off-anchor", self.points[x], g.arrow_id(a)));
                        } else if self.anchor[y] != g.src(a) {
                            witnesses.push(format!("{} · {} lands at wrong anchor", self.points[x], g.arrow_id(a)));
                        }
                    }
                    None => {
                        if self.anchor[x] == g.tgt(a) {
                            witnesses.push(format!("{} · {} undefined", self.points[x], g.arrow_id(a)));
                        }
                    }
                }
            }
        }
        report.check_all("anchor-compatibility", witnesses);

        let mut witnesses = Vec::new();
        for x in 0..self.points.len() {
            match g.unit_arrow_opt(self.anchor[x]) {
                Some(e) => {
                    if self.act[x][e] != Some(x) {
                        witnesses.push(format!("identity moves point {}", self.points[x]));
                    }
                }
                None => witnesses.push(format!("anchor of {} has no identity arrow", self.points[x])),
            }
        }
        report.check_all("identity-fixes-points", witnesses);

        let mut witnesses = Vec::new();
        for x in 0..self.points.len() {
            for (a, b) in g.composable_pairs() {
                let Some(ab) = g.compose(a, b) else { continue };
                if self.anchor[x] != g.tgt(a) {
                    continue;
                }
                let via = self.act[x][a].and_then(|y| self.act[y][b]);
                if via != self.act[x][ab] {
                    witnesses.push(format!(
                        "({} · {}) · {} ≠ {} · ({} ∘ {})",
                        self.points[x],
                        g.arrow_id(a),
                        g.arrow_id(b),
                        self.points[x],
                        g.arrow_id(a),
                        g.arrow_id(b)
                    ));
                }
            }
        }
        report.check_all("action-composition", witnesses);
        report
    }

    /// Orbit label (smallest point id in the orbit) for every point.
    pub fn orbit_labels(&self) -> Vec<String> {
        let n = self.points.len();
        let mut comp = (0..n).collect::<Vec<usize>>();
        fn find(comp: &mut Vec<usize>, x: usize) -> usize {
            if comp[x] != x {
                let r = find(comp, comp[x]);
                comp[x] = r;
            }
            comp[x]
        }
        for x in 0..n {
            for img in self.act[x].iter().flatten() {
                let (a, b) = (find(&mut comp, x), find(&mut comp, *img));
                if a != b {
                    comp[a] = b;
                }
            }
        }
        let mut label: HashMap<usize, String> = HashMap::new();
        for x in 0..n {
            let r = find(&mut comp, x);
            let entry = label.entry(r).or_insert_with(|| self.points[x].clone());
            if self.points[x] < *entry {
                *entry = self.points[x].clone();
            }
        }
        (0..n).map(|x| label[&find(&mut comp, x)].clone()).collect()
    }
}

/// The transformation groupoid `X ⋊ G`: units are the points of `X`, arrows
/// are pairs `(x|γ)` with `anchor(x) = tgt(γ)`, from `x · γ` to `x`. Returns
/// the groupoid and the projection functor onto `G`.
pub fn transformation_groupoid(
    g: &FiniteGroupoid,
    x: &GSpace,
) -> Result<(FiniteGroupoid, GroupoidHom)> {
    let space_check = x.check(g);
    if !space_check.is_valid() {
        let first = space_check.first_failure().expect("invalid report has a failure");
        return Err(Error::Precondition(format!(
            "action is not a right action: {} ({})",
            first.name,
            first.witness.clone().unwrap_or_default()
        )));
    }
    let mut arrows = Vec::new();
    let mut comp = Vec::new();
    let mut inv = Vec::new();
    let mut proj_pairs = Vec::new();
    let aid = |xi: usize, a: usize| pair_id(&x.point_ids()[xi], g.arrow_id(a));
    for xi in 0..x.n_points() {
        for a in 0..g.n_arrows() {
            let Some(xa) = x.act(xi, a) else { continue };
            arrows.push((aid(xi, a), x.point_ids()[xa].clone(), x.point_ids()[xi].clone()));
            inv.push((aid(xi, a), aid(xa, g.inv(a))));
            proj_pairs.push((aid(xi, a), g.arrow_id(a).to_string()));
            for b in 0..g.n_arrows() {
                if g.src(a) == g.tgt(b) {
                    let ab = g.compose(a, b).expect("composable");
                    comp.push((aid(xi, a), aid(xa, b), aid(xi, ab)));
                }
            }
        }
    }
    let tg = FiniteGroupoid::from_tables(x.point_ids().to_vec(), arrows, comp, inv)?;
    let proj = GroupoidHom::from_pairs(&tg, g, &proj_pairs)?;
    Ok((tg, proj))
}

// ---------------------------------------------------------------------------
// Invariant partitions

/// A labelling of units such that no arrow connects different labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantPartition {
    pub labels: BTreeMap<String, String>,
}

impl InvariantPartition {
    pub fn check(&self, g: &FiniteGroupoid) -> ValidationReport {
        let mut report = ValidationReport::new("invariant-partition");
        let mut witnesses = Vec::new();
        for u in g.unit_ids() {
            if !self.labels.contains_key(u) {
                witnesses.push(format!("unit {u} unlabelled"));
            }
        }
        report.check_all("labels-total", witnesses);
        let mut witnesses = Vec::new();
        for a in 0..g.n_arrows() {
            let ls = self.labels.get(g.unit_id(g.src(a)));
            let lt = self.labels.get(g.unit_id(g.tgt(a)));
            if let (Some(ls), Some(lt)) = (ls, lt) {
                if ls != lt {
                    witnesses.push(format!("arrow {} crosses {} / {}", g.arrow_id(a), ls, lt));
                }
            }
        }
        report.check_all("arrows-respect-labels", witnesses);
        report
    }

    pub fn label_set(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.labels.values().collect();
        set.into_iter().cloned().collect()
    }
}

/// The finest invariant partition: orbits of the unit space under arrows,
/// labelled by their smallest unit id.
pub fn orbit_partition(g: &FiniteGroupoid) -> InvariantPartition {
    let n = g.n_units();
    let mut comp = (0..n).collect::<Vec<usize>>();
    fn find(comp: &mut Vec<usize>, x: usize) -> usize {
        if comp[x] != x {
            let r = find(comp, comp[x]);
            comp[x] = r;
        }
        comp[x]
    }
    for a in 0..g.n_arrows() {
        let (x, y) = (find(&mut comp, g.src(a)), find(&mut comp, g.tgt(a)));
        if x != y {
            comp[x] = y;
        }
    }
    let mut label: HashMap<usize, String> = HashMap::new();
    for u in 0..n {
        let r = find(&mut comp, u);
        let entry = label.entry(r).or_insert_with(|| g.unit_id(u).to_string());
        if g.unit_id(u) < entry.as_str() {
            *entry = g.unit_id(u).to_string();
        }
    }
    let labels = (0..n)
        .map(|u| (g.unit_id(u).to_string(), label[&find(&mut comp, u)].clone()))
        .collect();
    InvariantPartition { labels }
}

/// The restricted groupoid over each label of a (validated) invariant
/// partition, in label order.
pub fn invariant_partition_fibers(
    g: &FiniteGroupoid,
    p: &InvariantPartition,
) -> Result<Vec<(String, FiniteGroupoid)>> {
    let report = p.check(g);
    if !report.is_valid() {
        let first = report.first_failure().expect("invalid report has a failure");
        return Err(Error::Precondition(format!(
            "partition is not invariant: {} ({})",
            first.name,
            first.witness.clone().unwrap_or_default()
        )));
    }
    let mut out = Vec::new();
    for label in p.label_set() {
        let units: Vec<String> = g
            .unit_ids()
            .iter()
            .filter(|u| p.labels.get(*u) == Some(&label))
            .cloned()
            .collect();
        out.push((label, restrict(g, &units)?));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Fibered products

/// Pullback of `p1 : G1 → B` and `p2 : G2 → B`: arrows are pairs `(a1|a2)`
/// with equal images. Returns the pullback with its two projections.
pub fn fibered_product(
    p1: &GroupoidHom,
    p2: &GroupoidHom,
) -> Result<(FiniteGroupoid, GroupoidHom, GroupoidHom)> {
    if p1.cod.arrow_ids() != p2.cod.arrow_ids() || p1.cod.unit_ids() != p2.cod.unit_ids() {
        return Err(Error::Precondition("fibered product needs a common codomain".into()));
    }
    let (g1, g2) = (&p1.dom, &p2.dom);
    let mut units = Vec::new();
    for u1 in 0..g1.n_units() {
        for u2 in 0..g2.n_units() {
            if p1.apply_unit(u1) == p2.apply_unit(u2) {
                units.push(pair_id(g1.unit_id(u1), g2.unit_id(u2)));
            }
        }
    }
    let aid = |a1: usize, a2: usize| pair_id(g1.arrow_id(a1), g2.arrow_id(a2));
    let mut pairs = Vec::new();
    for a1 in 0..g1.n_arrows() {
        for a2 in 0..g2.n_arrows() {
            if p1.apply(a1) == p2.apply(a2) {
                pairs.push((a1, a2));
            }
        }
    }
    let arrows = pairs
        .iter()
        .map(|&(a1, a2)| {
            (
                aid(a1, a2),
                pair_id(g1.unit_id(g1.src(a1)), g2.unit_id(g2.src(a2))),
                pair_id(g1.unit_id(g1.tgt(a1)), g2.unit_id(g2.tgt(a2))),
            )
        })
        .collect();
    let mut comp = Vec::new();
    for &(a1, a2) in &pairs {
        for &(b1, b2) in &pairs {
            if g1.src(a1) == g1.tgt(b1) && g2.src(a2) == g2.tgt(b2) {
                let c1 = g1.compose(a1, b1).expect("composable");
                let c2 = g2.compose(a2, b2).expect("composable");
                comp.push((aid(a1, a2), aid(b1, b2), aid(c1, c2)));
            }
        }
    }
    let inv = pairs.iter().map(|&(a1, a2)| (aid(a1, a2), aid(g1.inv(a1), g2.inv(a2)))).collect();
    let fp = FiniteGroupoid::from_tables(units, arrows, comp, inv)?;
    let q1_pairs: Vec<(String, String)> =
        pairs.iter().map(|&(a1, a2)| (aid(a1, a2), g1.arrow_id(a1).to_string())).collect();
    let q2_pairs: Vec<(String, String)> =
        pairs.iter().map(|&(a1, a2)| (aid(a1, a2), g2.arrow_id(a2).to_string())).collect();
    let q1 = GroupoidHom::from_pairs(&fp, g1, &q1_pairs)?;
    let q2 = GroupoidHom::from_pairs(&fp, g2, &q2_pairs)?;
    Ok((fp, q1, q2))
}

// ---------------------------------------------------------------------------
// Composite identifiers

pub fn pair_id(left: &str, right: &str) -> String {
    format!("({left}|{right})")
}

/// Split `"(x|y)"` at the top-level separator.
pub fn split_pair_id(id: &str) -> Result<(&str, &str)> {
    let inner = id
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Invalid(format!("`{id}` is not a pair identifier")))?;
    let mut depth = 0usize;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '|' if depth == 0 => return Ok((&inner[..i], &inner[i + 1..])),
            _ => {}
        }
    }
    Err(Error::Invalid(format!("`{id}` has no top-level separator")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FiniteAbelianGroup;
    use crate::report::CheckStatus;

    #[test]
    fn cyclic_group_validates() {
        let g = cyclic_group(4);
        assert_eq!(g.n_arrows(), 4);
        assert!(validate_groupoid(&g).is_valid());
        let e = g.unit_arrow(0).unwrap();
        assert_eq!(g.arrow_id(e), "0");
        let three = g.arrow_idx("3").unwrap();
        assert_eq!(g.arrow_id(g.inv(three)), "1");
    }

    #[test]
    fn pair_groupoid_validates_and_counts() {
        let g = pair_groupoid(3);
        assert_eq!(g.n_units(), 3);
        assert_eq!(g.n_arrows(), 9);
        assert!(validate_groupoid(&g).is_valid());
        let a = g.arrow_idx("(u1|u2)").unwrap();
        let b = g.arrow_idx("(u2|u3)").unwrap();
        assert_eq!(g.compose(a, b), Some(g.arrow_idx("(u1|u3)").unwrap()));
    }

    #[test]
    fn broken_table_is_reported_not_rejected() {
        // Z2 with comp(g, g) = g: e stays a two-sided identity but the inverse
        // laws break; the object itself loads fine and reports the violation.
        let g = FiniteGroupoid::from_tables(
            vec!["u".into()],
            vec![("e".into(), "u".into(), "u".into()), ("g".into(), "u".into(), "u".into())],
            vec![
                ("e".into(), "e".into(), "e".into()),
                ("e".into(), "g".into(), "g".into()),
                ("g".into(), "e".into(), "g".into()),
                ("g".into(), "g".into(), "g".into()),
            ],
            vec![("e".into(), "e".into()), ("g".into(), "g".into())],
        )
        .unwrap();
        let report = validate_groupoid(&g);
        assert!(!report.is_valid());
        let failing: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(failing, vec!["inverse-laws"]);
        assert!(g.unit_arrow(0).is_ok());
    }

    #[test]
    fn restrict_to_unit_gives_isotropy() {
        let g = disjoint_union(&[("a", &cyclic_group(3)), ("b", &pair_groupoid(2))]).unwrap();
        assert!(validate_groupoid(&g).is_valid());
        let r = restrict(&g, &["a:u".to_string()]).unwrap();
        assert_eq!(r.n_arrows(), 3);
        assert!(validate_groupoid(&r).is_valid());
    }

    #[test]
    fn quotient_of_z4_by_z2() {
        let g = cyclic_group(4);
        let (q, proj) = quotient_by_normal_subgroupoid(&g, &["0".into(), "2".into()]).unwrap();
        assert_eq!(q.n_arrows(), 2);
        assert!(validate_groupoid(&q).is_valid());
        assert!(proj.check().is_valid());
        assert!(proj.is_surjective());
        // kernel of the projection is exactly the chosen subgroupoid
        let e = q.unit_arrow(0).unwrap();
        let fiber: Vec<&str> = proj.fiber(e).into_iter().map(|a| g.arrow_id(a)).collect();
        assert_eq!(fiber, vec!["0", "2"]);
    }

    #[test]
    fn quotient_rejects_non_normal() {
        // in S3 (as a groupoid) a non-normal Z2 must be refused; build S3 as
        // the isotropy of a semidirect-type table: use the pair groupoid trick
        // instead: arrows of pair_groupoid(2) at unit u1 form a trivial group,
        // so craft S3 directly from a permutation table.
        let perms: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![0, 2, 1],
            vec![2, 1, 0],
            vec![1, 0, 2],
        ];
        let id = |i: usize| format!("p{i}");
        let compose_perm = |a: &Vec<usize>, b: &Vec<usize>| -> Vec<usize> {
            (0..3).map(|i| a[b[i]]).collect()
        };
        let mut comp = Vec::new();
        let mut inv = Vec::new();
        for (i, a) in perms.iter().enumerate() {
            for (j, b) in perms.iter().enumerate() {
                let c = compose_perm(a, b);
                let k = perms.iter().position(|p| *p == c).unwrap();
                comp.push((id(i), id(j), id(k)));
            }
            let ai = (0..3).map(|x| a.iter().position(|&y| y == x).unwrap()).collect::<Vec<_>>();
            inv.push((id(i), id(perms.iter().position(|p| *p == ai).unwrap())));
        }
        let arrows = (0..6).map(|i| (id(i), "u".into(), "u".into())).collect();
        let g = FiniteGroupoid::from_tables(vec!["u".into()], arrows, comp, inv).unwrap();
        assert!(validate_groupoid(&g).is_valid());
        // {identity, transposition} is not normal in S3
        let err = quotient_by_normal_subgroupoid(&g, &["p0".into(), "p3".into()]);
        assert!(matches!(err, Err(Error::Precondition(_))));
        // the alternating subgroup is normal and gives Z2
        let (q, _) = quotient_by_normal_subgroupoid(&g, &["p0".into(), "p1".into(), "p2".into()])
            .unwrap();
        assert_eq!(q.n_arrows(), 2);
    }

    #[test]
    fn quotient_by_unit_arrows_is_identity_shaped() {
        let g = pair_groupoid(2);
        let units: Vec<String> = (0..g.n_units())
            .map(|u| g.arrow_id(g.unit_arrow(u).unwrap()).to_string())
            .collect();
        let (q, proj) = quotient_by_normal_subgroupoid(&g, &units).unwrap();
        assert_eq!(q.n_arrows(), g.n_arrows());
        assert!(proj.is_bijective());
    }

    #[test]
    fn transformation_groupoid_cardinality() {
        // Z3 acting on itself by translation: 3 points, 9 arrows, one orbit.
        let g = cyclic_group(3);
        let pts: Vec<(String, String)> =
            (0..3).map(|k| (format!("x{k}"), "u".to_string())).collect();
        let x = GSpace::from_fn(&g, pts, |p, a| {
            let k: i64 = p[1..].parse().unwrap();
            let shift: i64 = a.parse().unwrap();
            format!("x{}", (k + shift) % 3)
        })
        .unwrap();
        let (tg, proj) = transformation_groupoid(&g, &x).unwrap();
        assert_eq!(tg.n_units(), 3);
        assert_eq!(tg.n_arrows(), 9);
        assert!(validate_groupoid(&tg).is_valid());
        assert!(proj.check().is_valid());
        assert_eq!(x.orbit_labels().iter().collect::<BTreeSet<_>>().len(), 1);
    }

    #[test]
    fn invariant_partition_fibers_split_disjoint_union() {
        let g = disjoint_union(&[("a", &cyclic_group(2)), ("b", &cyclic_group(3))]).unwrap();
        let p = orbit_partition(&g);
        let fibers = invariant_partition_fibers(&g, &p).unwrap();
        assert_eq!(fibers.len(), 2);
        assert_eq!(fibers[0].1.n_arrows() + fibers[1].1.n_arrows(), 5);
        // a label map that crosses components must be refused
        let mut labels = BTreeMap::new();
        for u in g.unit_ids() {
            labels.insert(u.clone(), "all".to_string());
        }
        let coarse = InvariantPartition { labels };
        assert!(coarse.check(&g).is_valid());
        assert_eq!(invariant_partition_fibers(&g, &coarse).unwrap().len(), 1);
    }

    #[test]
    fn fibered_product_of_two_covers() {
        // Z4 -> Z2 twice; the pullback has 8 arrows over one unit pair.
        let z4 = cyclic_group(4);
        let z2 = cyclic_group(2);
        let p = GroupoidHom::from_fn(&z4, &z2, |a| {
            let k: i64 = a.parse().unwrap();
            format!("{}", k % 2)
        })
        .unwrap();
        assert!(p.check().is_valid());
        let (fp, q1, q2) = fibered_product(&p, &p).unwrap();
        assert_eq!(fp.n_units(), 1);
        assert_eq!(fp.n_arrows(), 8);
        assert!(validate_groupoid(&fp).is_valid());
        assert!(q1.check().is_valid());
        assert!(q2.check().is_valid());
        for a in 0..fp.n_arrows() {
            assert_eq!(p.apply(q1.apply(a)), p.apply(q2.apply(a)));
        }
    }

    #[test]
    fn pair_ids_split_even_when_nested() {
        let id = pair_id(&pair_id("a", "b"), "c");
        assert_eq!(split_pair_id(&id).unwrap(), ("(a|b)", "c"));
        assert!(split_pair_id("nope").is_err());
    }

    #[test]
    fn abelian_group_builder_matches_cyclic() {
        let a = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let g = abelian_group(&a).unwrap();
        assert_eq!(g.n_arrows(), 4);
        assert!(validate_groupoid(&g).is_valid());
        let x = g.arrow_idx("1.0").unwrap();
        let y = g.arrow_idx("0.1").unwrap();
        assert_eq!(g.compose(x, y), Some(g.arrow_idx("1.1").unwrap()));
        assert_eq!(g.inv(x), x);
    }
}
