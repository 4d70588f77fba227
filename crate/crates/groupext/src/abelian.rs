//! Finite abelian groups in invariant-factor form.
//!
//! A group is a tuple of invariant factors `[d1, ..., dk]` with `d1 | d2 | ... `,
//! and an element is an exponent tuple reduced modulo those factors. A factor of
//! `0` stands for a copy of `Z`; infinite factors sort after all finite ones and
//! are accepted only where the calculus genuinely needs integer coefficients
//! (cocycle values in the `nZ` rotation model). Anything that must enumerate
//! elements or form duals refuses them.
//!
//! Direct sums are re-normalized to invariant-factor form through the Smith
//! normal form of the concatenated relation matrix, keeping the unimodular
//! change of coordinates so elements can be moved in and out of the sum exactly.

use crate::error::{Error, Result};
use crate::intmat::{self, IMat};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    factors: Vec<i64>,
}

/// An element of a [`FiniteAbelianGroup`], stored reduced: `0 <= e_i < d_i` for
/// finite factors, arbitrary integers on `Z` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elem(pub Vec<i64>);

impl FiniteAbelianGroup {
    /// `factors` must be non-negative, finite factors must form a divisibility
    /// chain, and infinite (`0`) factors must come last.
    pub fn new(factors: Vec<i64>) -> Result<Self> {
        let mut seen_zero = false;
        let mut prev: Option<i64> = None;
        for &d in &factors {
            if d < 0 {
                return Err(Error::Invalid(format!("negative invariant factor {d}")));
            }
            if d == 0 {
                seen_zero = true;
                continue;
            }
            if seen_zero {
                return Err(Error::Invalid("finite factor after an infinite one".into()));
            }
            if let Some(p) = prev {
                if d % p != 0 {
                    return Err(Error::Invalid(format!("factors {p} and {d} break divisibility")));
                }
            }
            prev = Some(d);
        }
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn cyclic(n: i64) -> Self {
        FiniteAbelianGroup::new(vec![n]).expect("cyclic factor must be non-negative")
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { factors: Vec::new() }
    }

    /// Normalize an arbitrary list of cyclic orders to invariant-factor form.
    pub fn from_orders(orders: &[i64]) -> Result<Self> {
        for &d in orders {
            if d < 0 {
                return Err(Error::Invalid(format!("negative cyclic order {d}")));
            }
        }
        let n = orders.len();
        let finite: Vec<i64> = orders.iter().copied().filter(|&d| d > 0).collect();
        let mut rel = IMat::zeros(n, finite.len());
        let mut col = 0;
        for (i, &d) in orders.iter().enumerate() {
            if d > 0 {
                rel[(i, col)] = BigInt::from(d);
                col += 1;
            }
        }
        let s = intmat::snf(&rel);
        let k = n.min(finite.len());
        let mut factors: Vec<i64> = (0..k)
            .map(|i| i64::try_from(&s.d[(i, i)]).expect("invariant factor fits i64"))
            .collect();
        factors.extend(std::iter::repeat_n(0, n - k));
        // SNF leaves factors sorted by divisibility but may include 1s; they are
        // legitimate (trivial coordinates) and keep the transforms square.
        FiniteAbelianGroup::new(factors)
    }

    pub fn factors(&self) -> &[i64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(|&d| d > 0)
    }

    pub fn order(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        Some(self.factors.iter().map(|&d| d as u64).product())
    }

    /// Least `n > 0` with `n * a = 0` for all `a`; `None` when infinite.
    pub fn exponent(&self) -> Option<i64> {
        if !self.is_finite() {
            return None;
        }
        Some(self.factors.last().copied().unwrap_or(1))
    }

    pub fn zero(&self) -> Elem {
        Elem(vec![0; self.factors.len()])
    }

    fn reduce_coord(&self, i: usize, v: i64) -> i64 {
        let d = self.factors[i];
        if d == 0 {
            v
        } else {
            v.rem_euclid(d)
        }
    }

    pub fn reduce(&self, raw: &[i64]) -> Result<Elem> {
        if raw.len() != self.factors.len() {
            return Err(Error::Shape(format!(
                "element has {} coordinates, group has rank {}",
                raw.len(),
                self.factors.len()
            )));
        }
        Ok(Elem(raw.iter().enumerate().map(|(i, &v)| self.reduce_coord(i, v)).collect()))
    }

    pub fn contains(&self, e: &Elem) -> bool {
        e.0.len() == self.factors.len()
            && e.0.iter().enumerate().all(|(i, &v)| self.reduce_coord(i, v) == v)
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        Elem(
            a.0.iter()
                .zip(&b.0)
                .enumerate()
                .map(|(i, (&x, &y))| self.reduce_coord(i, x.checked_add(y).expect("overflow")))
                .collect(),
        )
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        Elem(a.0.iter().enumerate().map(|(i, &x)| self.reduce_coord(i, -x)).collect())
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn scalar_mul(&self, k: i64, a: &Elem) -> Elem {
        Elem(
            a.0.iter()
                .enumerate()
                .map(|(i, &x)| {
                    let d = self.factors[i];
                    if d == 0 {
                        k.checked_mul(x).expect("overflow")
                    } else {
                        ((k as i128 * x as i128).rem_euclid(d as i128)) as i64
                    }
                })
                .collect(),
        )
    }

    pub fn elements(&self) -> Result<Vec<Elem>> {
        if !self.is_finite() {
            return Err(Error::InfiniteFiber("cannot enumerate an infinite group".into()));
        }
        let mut out = vec![self.zero()];
        for (i, &d) in self.factors.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for v in 0..d {
                    let mut t = e.clone();
                    t.0[i] = v;
                    next.push(t);
                }
            }
            out = next;
        }
        out.sort();
        Ok(out)
    }

    /// Additive order of `a`; `None` when infinite (a nonzero `Z` coordinate).
    pub fn elem_order(&self, a: &Elem) -> Option<i64> {
        let mut ord: i64 = 1;
        for (i, &v) in a.0.iter().enumerate() {
            let d = self.factors[i];
            if d == 0 {
                if v != 0 {
                    return None;
                }
                continue;
            }
            let g = num_integer::gcd(v, d);
            ord = num_integer::lcm(ord, d / g);
        }
        Some(ord)
    }

    /// Render an element for use inside identifiers: dot-joined coordinates,
    /// zero-padded per factor so lexicographic order matches numeric order.
    pub fn elem_id(&self, e: &Elem) -> String {
        if e.0.is_empty() {
            return "0".into();
        }
        e.0.iter()
            .enumerate()
            .map(|(i, &v)| {
                let d = self.factors[i];
                if d > 0 {
                    let width = (d - 1).max(0).to_string().len();
                    format!("{v:0width$}")
                } else {
                    v.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem> {
        if self.factors.is_empty() {
            return if s.is_empty() || s == "0" {
                Ok(self.zero())
            } else {
                Err(Error::Invalid(format!("`{s}` is not an element of the trivial group")))
            };
        }
        let raw: Vec<i64> = s
            .split('.')
            .map(|p| p.parse::<i64>().map_err(|_| Error::Invalid(format!("bad coordinate `{p}`"))))
            .collect::<Result<_>>()?;
        self.reduce(&raw)
    }
}

/// Apply an integer matrix (rows = target coordinates) to an element.
pub fn apply_matrix(target: &FiniteAbelianGroup, m: &[Vec<i64>], e: &Elem) -> Result<Elem> {
    if m.len() != target.rank() {
        return Err(Error::Shape(format!(
            "matrix has {} rows, target rank is {}",
            m.len(),
            target.rank()
        )));
    }
    let mut out = Vec::with_capacity(m.len());
    for row in m {
        if row.len() != e.0.len() {
            return Err(Error::Shape(format!(
                "matrix row has {} entries, element has {} coordinates",
                row.len(),
                e.0.len()
            )));
        }
        let acc: i128 = row.iter().zip(&e.0).map(|(&a, &x)| a as i128 * x as i128).sum();
        out.push(i64::try_from(acc).map_err(|_| Error::Invalid("matrix entry overflow".into()))?);
    }
    target.reduce(&out)
}

/// Does `m` define a homomorphism `src -> tgt` on exponent tuples? Each relation
/// `d_j e_j = 0` of the source must map into the target's relations.
pub fn matrix_is_hom(src: &FiniteAbelianGroup, tgt: &FiniteAbelianGroup, m: &[Vec<i64>]) -> bool {
    if m.len() != tgt.rank() || m.iter().any(|row| row.len() != src.rank()) {
        return false;
    }
    for (j, &dj) in src.factors().iter().enumerate() {
        if dj == 0 {
            continue;
        }
        for (i, &ti) in tgt.factors().iter().enumerate() {
            let v = (m[i][j] as i128) * (dj as i128);
            if ti == 0 {
                if v != 0 {
                    return false;
                }
            } else if v.rem_euclid(ti as i128) != 0 {
                return false;
            }
        }
    }
    true
}

/// Is `m` a bijective homomorphism `src -> tgt`? Finite groups are checked by
/// exhaustive image comparison; groups with `Z` coordinates require equal
/// factor profiles and a unimodular interaction, checked via Smith form.
pub fn matrix_is_iso(src: &FiniteAbelianGroup, tgt: &FiniteAbelianGroup, m: &[Vec<i64>]) -> bool {
    if !matrix_is_hom(src, tgt, m) {
        return false;
    }
    if src.is_finite() && tgt.is_finite() {
        if src.order() != tgt.order() {
            return false;
        }
        let Ok(elems) = src.elements() else { return false };
        let mut seen = std::collections::HashSet::new();
        for e in &elems {
            let Ok(img) = apply_matrix(tgt, m, e) else { return false };
            if !seen.insert(img) {
                return false;
            }
        }
        true
    } else {
        if src.factors() != tgt.factors() {
            return false;
        }
        // Mixed finite/infinite fibers: demand an invertible square matrix.
        let a = IMat::from_rows(m);
        if a.rows != a.cols {
            return false;
        }
        let s = intmat::snf(&a);
        (0..a.rows).all(|i| s.d[(i, i)] == BigInt::from(1))
    }
}

/// Direct sum `left (+) right` re-normalized to a divisibility chain, with the
/// exact unimodular coordinate change between concatenated and canonical form.
#[derive(Debug, Clone)]
pub struct DirectSum {
    pub left: FiniteAbelianGroup,
    pub right: FiniteAbelianGroup,
    pub sum: FiniteAbelianGroup,
    fwd: IMat,
    bwd: IMat,
}

impl DirectSum {
    pub fn new(left: &FiniteAbelianGroup, right: &FiniteAbelianGroup) -> Self {
        let concat: Vec<i64> =
            left.factors().iter().chain(right.factors()).copied().collect();
        let n = concat.len();
        let finite: Vec<(usize, i64)> =
            concat.iter().copied().enumerate().filter(|&(_, d)| d > 0).collect();
        let mut rel = IMat::zeros(n, finite.len());
        for (col, &(i, d)) in finite.iter().enumerate() {
            rel[(i, col)] = BigInt::from(d);
        }
        let s = intmat::snf(&rel);
        let k = n.min(finite.len());
        let mut factors: Vec<i64> = (0..k)
            .map(|i| i64::try_from(&s.d[(i, i)]).expect("invariant factor fits i64"))
            .collect();
        factors.extend(std::iter::repeat_n(0, n - k));
        let sum = FiniteAbelianGroup::new(factors).expect("SNF yields a divisibility chain");
        DirectSum { left: left.clone(), right: right.clone(), sum, fwd: s.u, bwd: s.uinv }
    }

    /// `(a, b)` in canonical coordinates of the sum.
    pub fn pair(&self, a: &Elem, b: &Elem) -> Elem {
        assert!(self.left.contains(a) && self.right.contains(b), "element outside summand");
        let concat: Vec<BigInt> =
            a.0.iter().chain(&b.0).map(|&v| BigInt::from(v)).collect();
        let y = self.fwd.mul_vec(&concat);
        let raw: Vec<i64> = y.iter().map(clamp_i64).collect();
        self.sum.reduce(&raw).expect("rank preserved by coordinate change")
    }

    /// Coordinate change concatenated -> canonical, as an integer matrix.
    pub fn fwd_matrix(&self) -> Vec<Vec<i64>> {
        imat_to_rows(&self.fwd)
    }

    /// Coordinate change canonical -> concatenated, as an integer matrix.
    pub fn bwd_matrix(&self) -> Vec<Vec<i64>> {
        imat_to_rows(&self.bwd)
    }

    /// Inverse of [`DirectSum::pair`].
    pub fn split(&self, x: &Elem) -> (Elem, Elem) {
        assert!(self.sum.contains(x), "element outside sum");
        let y: Vec<BigInt> = x.0.iter().map(|&v| BigInt::from(v)).collect();
        let concat = self.bwd.mul_vec(&y);
        let raw: Vec<i64> = concat.iter().map(clamp_i64).collect();
        let (l, r) = raw.split_at(self.left.rank());
        (
            self.left.reduce(l).expect("split preserves left rank"),
            self.right.reduce(r).expect("split preserves right rank"),
        )
    }
}

fn clamp_i64(v: &BigInt) -> i64 {
    i64::try_from(v).expect("coordinate fits i64 at desk scale")
}

fn imat_to_rows(m: &IMat) -> Vec<Vec<i64>> {
    (0..m.rows).map(|i| (0..m.cols).map(|j| clamp_i64(&m[(i, j)])).collect()).collect()
}

/// Integer matrix product, for composing coordinate changes with maps.
pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = a.len();
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    (0..rows)
        .map(|i| {
            assert_eq!(a[i].len(), inner, "dimension mismatch in matrix product");
            (0..cols)
                .map(|j| {
                    let acc: i128 =
                        (0..inner).map(|k| a[i][k] as i128 * b[k][j] as i128).sum();
                    i64::try_from(acc).expect("matrix entry fits i64 at desk scale")
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_enforces_chain() {
        assert!(FiniteAbelianGroup::new(vec![2, 4]).is_ok());
        assert!(FiniteAbelianGroup::new(vec![4, 2]).is_err());
        assert!(FiniteAbelianGroup::new(vec![2, 0]).is_ok());
        assert!(FiniteAbelianGroup::new(vec![0, 2]).is_err());
        assert!(FiniteAbelianGroup::new(vec![-1]).is_err());
    }

    #[test]
    fn arithmetic_reduces_mod_factors() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let a = g.reduce(&[1, 3]).unwrap();
        let b = g.reduce(&[1, 2]).unwrap();
        assert_eq!(g.add(&a, &b), Elem(vec![0, 1]));
        assert_eq!(g.neg(&a), Elem(vec![1, 1]));
        assert_eq!(g.scalar_mul(3, &a), Elem(vec![1, 1]));
        assert_eq!(g.elem_order(&a), Some(4));
    }

    #[test]
    fn enumeration_is_sorted_and_complete() {
        let g = FiniteAbelianGroup::from_orders(&[2, 3]).unwrap();
        let es = g.elements().unwrap();
        assert_eq!(es.len(), 6);
        assert!(es.windows(2).all(|w| w[0] < w[1]));
        let z = FiniteAbelianGroup::cyclic(0);
        assert!(z.elements().is_err());
    }

    #[test]
    fn from_orders_normalizes() {
        assert_eq!(FiniteAbelianGroup::from_orders(&[3, 2]).unwrap().factors(), &[1, 6]);
        assert_eq!(FiniteAbelianGroup::from_orders(&[4, 2, 2]).unwrap().factors(), &[2, 2, 4]);
    }

    #[test]
    fn direct_sum_of_z2z4_with_z2() {
        let a = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let b = FiniteAbelianGroup::cyclic(2);
        let ds = DirectSum::new(&a, &b);
        assert_eq!(ds.sum.factors(), &[2, 2, 4]);
        for x in a.elements().unwrap() {
            for y in b.elements().unwrap() {
                let p = ds.pair(&x, &y);
                assert!(ds.sum.contains(&p));
                assert_eq!(ds.split(&p), (x.clone(), y.clone()));
            }
        }
    }

    #[test]
    fn direct_sum_is_additive_in_both_slots() {
        let a = FiniteAbelianGroup::cyclic(2);
        let b = FiniteAbelianGroup::cyclic(3);
        let ds = DirectSum::new(&a, &b);
        assert_eq!(ds.sum.factors(), &[1, 6]);
        for x1 in a.elements().unwrap() {
            for y1 in b.elements().unwrap() {
                for x2 in a.elements().unwrap() {
                    for y2 in b.elements().unwrap() {
                        let lhs = ds.sum.add(&ds.pair(&x1, &y1), &ds.pair(&x2, &y2));
                        let rhs = ds.pair(&a.add(&x1, &x2), &b.add(&y1, &y2));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn elem_ids_sort_numerically() {
        let g = FiniteAbelianGroup::new(vec![12]).unwrap();
        let ids: Vec<String> =
            g.elements().unwrap().iter().map(|e| g.elem_id(e)).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert_eq!(ids[2], "02");
        let roundtrip = g.parse_elem("07").unwrap();
        assert_eq!(roundtrip, Elem(vec![7]));
    }

    #[test]
    fn hom_and_iso_checks() {
        let z2 = FiniteAbelianGroup::cyclic(2);
        let z4 = FiniteAbelianGroup::cyclic(4);
        // doubling is a hom Z2 -> Z4, identity-shaped map is not
        assert!(matrix_is_hom(&z2, &z4, &[vec![2]]));
        assert!(!matrix_is_hom(&z2, &z4, &[vec![1]]));
        // negation is an automorphism of Z3
        let z3 = FiniteAbelianGroup::cyclic(3);
        assert!(matrix_is_iso(&z3, &z3, &[vec![-1]]));
        assert!(!matrix_is_iso(&z4, &z4, &[vec![2]]));
        // reduction Z -> Z4 is a hom of the Z model
        let z = FiniteAbelianGroup::cyclic(0);
        assert!(matrix_is_hom(&z, &z4, &[vec![1]]));
        assert!(matrix_is_iso(&z, &z, &[vec![-1]]));
        assert!(!matrix_is_iso(&z, &z, &[vec![2]]));
    }
}
