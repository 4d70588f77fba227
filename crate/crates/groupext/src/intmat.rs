//! Exact integer matrices and Smith normal form.
//!
//! Cohomology and the invariant-factor bookkeeping for abelian groups both reduce
//! to lattice questions over `Z`, so this module keeps everything in `BigInt` and
//! tracks the full change of basis: `snf` returns `D = U * A * V` together with
//! `U`, `U^-1`, `V`, `V^-1`, which is what quotient presentations and solution
//! extraction need. Entry growth is tamed by always pivoting on a minimal
//! absolute value; at the scale of this crate (matrices up to a few hundred rows)
//! that is entirely adequate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl Index<(usize, usize)> for IMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = IMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_i -= q * row_t
    fn row_sub(&mut self, i: usize, t: usize, q: &BigInt) {
        for j in 0..self.cols {
            let d = q * &self[(t, j)];
            self[(i, j)] -= d;
        }
    }

    /// col_j -= q * col_t
    fn col_sub(&mut self, j: usize, t: usize, q: &BigInt) {
        for i in 0..self.rows {
            let d = q * &self[(i, t)];
            self[(i, j)] -= d;
        }
    }

    /// col_t += q * col_i  (used to keep `uinv` in sync with a row operation)
    fn col_add(&mut self, t: usize, i: usize, q: &BigInt) {
        for r in 0..self.rows {
            let d = q * &self[(r, i)];
            self[(r, t)] += d;
        }
    }

    /// row_t += q * row_j  (used to keep `vinv` in sync with a column operation)
    fn row_add(&mut self, t: usize, j: usize, q: &BigInt) {
        for c in 0..self.cols {
            let d = q * &self[(j, c)];
            self[(t, c)] += d;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }
}

/// Smith normal form `d = u * a * v` with invertible integer `u`, `v` and their
/// exact inverses. Diagonal entries are non-negative and each divides the next.
#[derive(Debug, Clone)]
pub struct Snf {
    pub d: IMat,
    pub u: IMat,
    pub uinv: IMat,
    pub v: IMat,
    pub vinv: IMat,
}

impl Snf {
    pub fn rank(&self) -> usize {
        let n = self.d.rows.min(self.d.cols);
        (0..n).filter(|&i| !self.d[(i, i)].is_zero()).count()
    }

    /// Nonzero diagonal entries, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let n = self.d.rows.min(self.d.cols);
        (0..n).map(|i| self.d[(i, i)].clone()).filter(|d| !d.is_zero()).collect()
    }
}

struct Worker {
    a: IMat,
    u: IMat,
    uinv: IMat,
    v: IMat,
    vinv: IMat,
}

impl Worker {
    fn swap_rows(&mut self, x: usize, y: usize) {
        self.a.swap_rows(x, y);
        self.u.swap_rows(x, y);
        self.uinv.swap_cols(x, y);
    }

    fn swap_cols(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        self.v.swap_cols(x, y);
        self.vinv.swap_rows(x, y);
    }

    fn row_sub(&mut self, i: usize, t: usize, q: &BigInt) {
        self.a.row_sub(i, t, q);
        self.u.row_sub(i, t, q);
        self.uinv.col_add(t, i, q);
    }

    fn col_sub(&mut self, j: usize, t: usize, q: &BigInt) {
        self.a.col_sub(j, t, q);
        self.v.col_sub(j, t, q);
        self.vinv.row_add(t, j, q);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.uinv.negate_col(i);
    }

    /// Smallest nonzero entry (by absolute value) of the trailing submatrix.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows {
            for j in t..self.a.cols {
                if self.a[(i, j)].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((i, j)),
                    Some(b) => {
                        if self.a[(i, j)].abs() < self.a[b].abs() {
                            best = Some((i, j));
                        }
                    }
                }
            }
        }
        best
    }

    /// Clear row t and column t down to the pivot at (t, t).
    fn reduce_at(&mut self, t: usize) {
        loop {
            let Some(p) = self.pivot(t) else { return };
            self.swap_rows(t, p.0);
            self.swap_cols(t, p.1);
            let mut dirty = false;
            for i in t + 1..self.a.rows {
                if self.a[(i, t)].is_zero() {
                    continue;
                }
                let (q, r) = self.a[(i, t)].div_rem(&self.a[(t, t)]);
                self.row_sub(i, t, &q);
                if !r.is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue; // a smaller remainder appeared; re-pivot on it
            }
            for j in t + 1..self.a.cols {
                if self.a[(t, j)].is_zero() {
                    continue;
                }
                let (q, r) = self.a[(t, j)].div_rem(&self.a[(t, t)]);
                self.col_sub(j, t, &q);
                if !r.is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                return;
            }
        }
    }
}

pub fn snf(a: &IMat) -> Snf {
    let mut w = Worker {
        a: a.clone(),
        u: IMat::identity(a.rows),
        uinv: IMat::identity(a.rows),
        v: IMat::identity(a.cols),
        vinv: IMat::identity(a.cols),
    };
    let n = a.rows.min(a.cols);
    for t in 0..n {
        if w.pivot(t).is_none() {
            break;
        }
        w.reduce_at(t);
    }
    // Divisibility chain: d_t | d_{t+1}. Folding column t+1 into column t puts
    // both entries in one block, and re-reduction leaves their gcd at (t, t).
    let mut t = 0;
    while t + 1 < n {
        let a = w.a[(t, t)].clone();
        let b = w.a[(t + 1, t + 1)].clone();
        if b.is_zero() || (!a.is_zero() && (&b % &a).is_zero()) {
            t += 1;
            continue;
        }
        let minus_one = -BigInt::one();
        w.col_sub(t, t + 1, &minus_one);
        w.reduce_at(t);
        t = 0; // chain may be disturbed upstream; rescan
    }
    for i in 0..n {
        if w.a[(i, i)].is_negative() {
            w.negate_row(i);
        }
    }
    Snf { d: w.a, u: w.u, uinv: w.uinv, v: w.v, vinv: w.vinv }
}

/// Basis of the integer kernel of `a`, as columns.
pub fn kernel_basis(a: &IMat) -> Vec<Vec<BigInt>> {
    let s = snf(a);
    let r = s.rank();
    (r..a.cols).map(|j| s.v.col(j)).collect()
}

/// One integer solution of `a * x = b`, if any.
pub fn solve(a: &IMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len());
    let s = snf(a);
    let c = s.u.mul_vec(b);
    let n = a.rows.min(a.cols);
    let mut z = vec![BigInt::zero(); a.cols];
    for (i, ci) in c.iter().enumerate() {
        let di = if i < n { s.d[(i, i)].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !ci.is_zero() {
                return None;
            }
        } else {
            let (q, r) = ci.div_rem(&di);
            if !r.is_zero() {
                return None;
            }
            z[i] = q;
        }
    }
    Some(s.v.mul_vec(&z))
}

/// One solution of `a * x = b` where row `i` is only required to hold modulo
/// `row_moduli[i]` (modulus 0 means the row must hold exactly over `Z`).
///
/// When every modulus agrees on a single positive value the congruence is solved
/// directly on the Smith form of `a`; mixed moduli fall back to the exact system
/// `[a | diag(moduli)] * (x; y) = b`.
pub fn solve_mod(a: &IMat, b: &[BigInt], row_moduli: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len());
    assert_eq!(a.rows, row_moduli.len());
    let uniform = row_moduli.first().filter(|m| !m.is_zero()).cloned();
    if let Some(n) = uniform {
        if row_moduli.iter().all(|m| *m == n) {
            return solve_uniform_congruence(a, b, &n);
        }
    }
    let extra: Vec<usize> = (0..a.rows).filter(|&i| !row_moduli[i].is_zero()).collect();
    let mut aug = IMat::zeros(a.rows, a.cols + extra.len());
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug[(i, j)] = a[(i, j)].clone();
        }
    }
    for (k, &i) in extra.iter().enumerate() {
        aug[(i, a.cols + k)] = row_moduli[i].clone();
    }
    solve(&aug, b).map(|x| x[..a.cols].to_vec())
}

fn solve_uniform_congruence(a: &IMat, b: &[BigInt], n: &BigInt) -> Option<Vec<BigInt>> {
    let s = snf(a);
    let c = s.u.mul_vec(b);
    let k = a.rows.min(a.cols);
    let mut z = vec![BigInt::zero(); a.cols];
    for (i, ci) in c.iter().enumerate() {
        let di = if i < k { s.d[(i, i)].clone() } else { BigInt::zero() };
        // d_i z ≡ c_i (mod n); for d_i = 0 this is the consistency row c_i ≡ 0.
        let ci = ci.mod_floor(n);
        if di.is_zero() {
            if !ci.is_zero() {
                return None;
            }
            continue;
        }
        let g = di.gcd(n);
        if !(&ci % &g).is_zero() {
            return None;
        }
        let nn = n / &g;
        let dd = (&di / &g).mod_floor(&nn);
        let cc = (&ci / &g).mod_floor(&nn);
        z[i] = if nn.is_one() { BigInt::zero() } else { (cc * modinv(&dd, &nn)?) % &nn };
    }
    Some(s.v.mul_vec(&z))
}

/// Inverse of `a` modulo `m` (`m > 0`, `gcd(a, m) = 1`).
pub fn modinv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn to_big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_of_known_matrix() {
        // Classic example: diag(2, 6, 12) -> invariant factors 2, 6, 12 already,
        // but a dense matrix with the same cokernel must reach the same chain.
        let a = IMat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let s = snf(&a);
        let f: Vec<i64> = s.invariant_factors().iter().map(|d| i64::try_from(d).unwrap()).collect();
        assert_eq!(f, vec![2, 2, 156]);
    }

    #[test]
    fn snf_handles_zero_and_empty() {
        let z = IMat::zeros(3, 2);
        let s = snf(&z);
        assert_eq!(s.rank(), 0);
        assert!(s.invariant_factors().is_empty());
        let e = IMat::zeros(0, 4);
        assert_eq!(snf(&e).rank(), 0);
        assert_eq!(kernel_basis(&e).len(), 4);
    }

    #[test]
    fn kernel_of_rank_one_projection() {
        let a = IMat::from_rows(&[vec![1, 1, 1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigInt = v.iter().sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn solve_exact_and_unsolvable() {
        let a = IMat::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(solve(&a, &to_big(&[4, 9])), Some(to_big(&[2, 3])));
        assert_eq!(solve(&a, &to_big(&[1, 0])), None);
    }

    #[test]
    fn solve_mod_uniform_wraps() {
        // 2x ≡ 2 (mod 4) has x = 1 (also x = 3); check the returned x solves it.
        let a = IMat::from_rows(&[vec![2]]);
        let x = solve_mod(&a, &to_big(&[2]), &to_big(&[4])).unwrap();
        let lhs = BigInt::from(2) * &x[0] - BigInt::from(2);
        assert!(lhs.mod_floor(&BigInt::from(4)).is_zero());
        assert_eq!(solve_mod(&a, &to_big(&[1]), &to_big(&[4])), None);
    }

    #[test]
    fn solve_mod_mixed_moduli() {
        // x ≡ 1 (mod 2) and x ≡ 2 (mod 3): CRT gives 5 mod 6.
        let a = IMat::from_rows(&[vec![1], vec![1]]);
        let x = solve_mod(&a, &to_big(&[1, 2]), &to_big(&[2, 3])).unwrap();
        assert!((&x[0] - BigInt::from(1)).mod_floor(&BigInt::from(2)).is_zero());
        assert!((&x[0] - BigInt::from(2)).mod_floor(&BigInt::from(3)).is_zero());
    }

    proptest! {
        #[test]
        fn snf_transforms_are_consistent(
            rows in 1usize..5, cols in 1usize..5,
            seed in proptest::collection::vec(-9i64..10, 25),
        ) {
            let mut a = IMat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a[(i, j)] = BigInt::from(seed[i * 5 + j]);
                }
            }
            let s = snf(&a);
            // u a v = d
            prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
            // tracked inverses are exact
            prop_assert_eq!(s.u.mul(&s.uinv), IMat::identity(rows));
            prop_assert_eq!(s.v.mul(&s.vinv), IMat::identity(cols));
            // diagonal, non-negative, divisibility chain
            let n = rows.min(cols);
            for i in 0..rows {
                for j in 0..cols {
                    if i != j {
                        prop_assert!(s.d[(i, j)].is_zero());
                    }
                }
            }
            for i in 0..n {
                prop_assert!(!s.d[(i, i)].is_negative());
                if i + 1 < n && !s.d[(i, i)].is_zero() && !s.d[(i + 1, i + 1)].is_zero() {
                    prop_assert!((&s.d[(i + 1, i + 1)] % &s.d[(i, i)]).is_zero());
                }
                if s.d[(i, i)].is_zero() && i + 1 < n {
                    prop_assert!(s.d[(i + 1, i + 1)].is_zero());
                }
            }
        }

        #[test]
        fn kernel_vectors_annihilate(
            rows in 1usize..4, cols in 1usize..5,
            seed in proptest::collection::vec(-6i64..7, 20),
        ) {
            let mut a = IMat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a[(i, j)] = BigInt::from(seed[i * 5 + j]);
                }
            }
            for v in kernel_basis(&a) {
                for x in a.mul_vec(&v) {
                    prop_assert!(x.is_zero());
                }
            }
        }

        #[test]
        fn solve_agrees_with_product(
            cols in 1usize..4, rows in 1usize..4,
            seed in proptest::collection::vec(-5i64..6, 16),
            xs in proptest::collection::vec(-4i64..5, 4),
        ) {
            let mut a = IMat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a[(i, j)] = BigInt::from(seed[i * 4 + j]);
                }
            }
            let x: Vec<BigInt> = xs[..cols].iter().map(|&v| BigInt::from(v)).collect();
            let b = a.mul_vec(&x);
            let got = solve(&a, &b).expect("constructed system must be solvable");
            prop_assert_eq!(a.mul_vec(&got), b);
        }
    }
}
