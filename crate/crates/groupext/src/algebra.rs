//! Finite-dimensional convolution algebras with exact monomial structure
//! constants.
//!
//! Every algebra here is spanned by monomials `u_b` indexed by a finite
//! label set, with `u_i u_j` equal to either zero or a root of unity times a
//! single basis monomial, and an involution of the same shape. Products and
//! involutions are stored exactly as [`RootOfUnity`] phases; floating point
//! enters only in the spectral analysis downstream.

use crate::abelian::Elem;
use crate::bundle::RootOfUnity;
use crate::cohomology::Cocycle2;
use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;
use crate::report::ValidationReport;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// A `*`-algebra with a distinguished monomial basis: products and stars are
/// single monomials with exact root-of-unity coefficients.
#[derive(Debug, Clone)]
pub struct ConvolutionAlgebra {
    labels: Vec<String>,
    units: Vec<usize>,
    mult: Vec<Vec<Option<(usize, RootOfUnity)>>>,
    star: Vec<(usize, RootOfUnity)>,
}

impl ConvolutionAlgebra {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownId { kind: "basis monomial", id: label.to_string() })
    }

    /// `u_i u_j` as `(k, ζ)` meaning `ζ·u_k`, or `None` for zero.
    pub fn mult(&self, i: usize, j: usize) -> Option<(usize, RootOfUnity)> {
        self.mult[i][j]
    }

    /// `u_i* = ζ·u_k`.
    pub fn star(&self, i: usize) -> (usize, RootOfUnity) {
        self.star[i]
    }

    /// The unit, `Σ u_e` over the unit monomials.
    pub fn unit_vector(&self) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.dim());
        for &i in &self.units {
            v[i] += Complex64::new(1.0, 0.0);
        }
        v
    }

    /// Matrix of left multiplication by the coefficient vector `x`.
    pub fn left_mult(&self, x: &DVector<Complex64>) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                if let Some((k, z)) = self.mult[i][j] {
                    m[(k, j)] += x[i] * z.to_complex();
                }
            }
        }
        m
    }

    /// Matrix of right multiplication by `x`.
    pub fn right_mult(&self, x: &DVector<Complex64>) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            if x[j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..n {
                if let Some((k, z)) = self.mult[i][j] {
                    m[(k, i)] += x[j] * z.to_complex();
                }
            }
        }
        m
    }

    /// The involution applied to a coefficient vector.
    pub fn star_vector(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::zeros(self.dim());
        for i in 0..self.dim() {
            let (k, z) = self.star[i];
            out[k] += x[i].conj() * z.to_complex();
        }
        out
    }

    /// Numeric product of two coefficient vectors.
    pub fn product(&self, x: &DVector<Complex64>, y: &DVector<Complex64>) -> DVector<Complex64> {
        self.left_mult(x) * y
    }

    /// Exact check of associativity, the unit law, and the `*`-axioms.
    /// Cubic in the dimension; meant for spot checks, not hot paths.
    pub fn check(&self) -> ValidationReport {
        let mut report = ValidationReport::new("convolution-algebra");
        let n = self.dim();

        let mut witnesses = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = self.mult[i][j].and_then(|(ij, z1)| {
                        self.mult[ij][k].map(|(t, z2)| (t, z1.mul(&z2)))
                    });
                    let right = self.mult[j][k].and_then(|(jk, z1)| {
                        self.mult[i][jk].map(|(t, z2)| (t, z2.mul(&z1)))
                    });
                    if left != right {
                        witnesses.push(format!(
                            "(u_{} u_{}) u_{} differs from u_{} (u_{} u_{})",
                            self.labels[i], self.labels[j], self.labels[k],
                            self.labels[i], self.labels[j], self.labels[k],
                        ));
                    }
                }
            }
        }
        report.check_all("associativity", witnesses);

        let mut witnesses = Vec::new();
        for i in 0..n {
            let from_left: Vec<(usize, RootOfUnity)> =
                self.units.iter().filter_map(|&e| self.mult[e][i]).collect();
            let from_right: Vec<(usize, RootOfUnity)> =
                self.units.iter().filter_map(|&e| self.mult[i][e]).collect();
            let ok = |v: &[(usize, RootOfUnity)]| v.len() == 1 && v[0].0 == i && v[0].1.is_one();
            if !ok(&from_left) || !ok(&from_right) {
                witnesses.push(format!("unit law fails at u_{}", self.labels[i]));
            }
        }
        report.check_all("unit-law", witnesses);

        let mut witnesses = Vec::new();
        for i in 0..n {
            let (k, z) = self.star[i];
            let (k2, z2) = self.star[k];
            if k2 != i || !z2.mul(&z.conj()).is_one() {
                witnesses.push(format!("star not involutive at u_{}", self.labels[i]));
            }
            for j in 0..n {
                // (u_i u_j)* = u_j* u_i*
                let lhs = self.mult[i][j].map(|(t, zt)| {
                    let (ts, zs) = self.star[t];
                    (ts, zt.conj().mul(&zs))
                });
                let (js, zj) = self.star[j];
                let (is, zi) = self.star[i];
                let rhs = self.mult[js][is].map(|(t, zt)| (t, zj.mul(&zi).mul(&zt)));
                if lhs != rhs {
                    witnesses.push(format!(
                        "star is not antimultiplicative on (u_{}, u_{})",
                        self.labels[i], self.labels[j]
                    ));
                }
            }
        }
        report.check_all("star-axioms", witnesses);

        report
    }
}

/// The convolution algebra of a finite groupoid: `u_a u_b = u_{ab}` when
/// composable, zero otherwise, `u_a* = u_{a⁻¹}`.
pub fn groupoid_algebra(g: &FiniteGroupoid) -> ConvolutionAlgebra {
    let n = g.n_arrows();
    let one = RootOfUnity::one(1);
    let mut mult = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if let Some(k) = g.compose(i, j) {
                mult[i][j] = Some((k, one));
            }
        }
    }
    ConvolutionAlgebra {
        labels: g.arrow_ids().to_vec(),
        units: (0..n).filter(|&a| g.is_unit_arrow(a)).collect(),
        mult,
        star: (0..n).map(|a| (g.inv(a), one)).collect(),
    }
}

/// The `k`-th power twist of a scalar-valued cocycle:
/// `u_{γ₁} u_{γ₂} = ζ_N^{k·ω(γ₁,γ₂)} u_{γ₁γ₂}`.
///
/// The cocycle must take values in rank-one finite fibers and its action must
/// be trivial: the twist of a non-central kernel is not associative, so
/// centrality is a precondition, not a convention.
pub fn twisted_algebra(phi: &Cocycle2, k: i64) -> Result<ConvolutionAlgebra> {
    let action = phi.action();
    let g = &action.groupoid;
    let bundle = &action.bundle;
    if !bundle.is_finite() {
        return Err(Error::InfiniteFiber("twisted algebra needs finite fibers".into()));
    }
    for u in 0..bundle.n_units() {
        if bundle.fiber(u).rank() > 1 {
            return Err(Error::Precondition(
                "twisted algebra needs rank-one (cyclic) fibers".into(),
            ));
        }
    }
    if !crate::bundle::actions_agree(
        action,
        &crate::bundle::GroupoidAction::trivial(g, bundle)?,
    ) {
        return Err(Error::Precondition(
            "twisted algebra needs a central kernel (trivial action)".into(),
        ));
    }
    let n_mod = bundle.joint_exponent()?.max(1);
    let phase = |a: usize, b: usize| -> Result<RootOfUnity> {
        let v = phi.value(a, b)?;
        let d = bundle.fiber(g.tgt(a)).exponent().expect("finite fiber").max(1);
        let coord = if v.0.is_empty() { 0 } else { v.0[0] };
        Ok(RootOfUnity::new(n_mod, k * (n_mod / d) * coord))
    };
    let n = g.n_arrows();
    let mut mult = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if let Some(t) = g.compose(i, j) {
                mult[i][j] = Some((t, phase(i, j)?));
            }
        }
    }
    // u_γ* = ζ̄ u_{γ⁻¹} with the phase forcing u_γ* u_γ = u_{src γ}.
    let star = (0..n)
        .map(|a| {
            let ai = g.inv(a);
            Ok((ai, phase(ai, a)?.conj()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvolutionAlgebra {
        labels: g.arrow_ids().to_vec(),
        units: (0..n).filter(|&a| g.is_unit_arrow(a)).collect(),
        mult,
        star,
    })
}

/// The scalar cocycles obtained by pairing a central kernel against each of
/// its characters, labelled by the character element.
pub fn character_twists(phi: &Cocycle2) -> Result<Vec<(Elem, Cocycle2)>> {
    let action = phi.action();
    let bundle = &action.bundle;
    if !bundle.is_constant() {
        return Err(Error::Precondition("character twists need a constant kernel bundle".into()));
    }
    if !crate::bundle::actions_agree(
        action,
        &crate::bundle::GroupoidAction::trivial(&action.groupoid, bundle)?,
    ) {
        return Err(Error::Precondition("character twists need a central kernel".into()));
    }
    let fiber = bundle.fiber(0);
    let n_mod = bundle.joint_exponent()?.max(1);
    let mut out = Vec::new();
    for chi in fiber.elements()? {
        let (hom, target) = crate::bundle::character_hom(&chi, bundle, n_mod)?;
        let target_act = crate::bundle::GroupoidAction::trivial(&action.groupoid, &target)?;
        let twisted = crate::cohomology::pushforward_cocycle(phi, &hom, &target_act)?;
        out.push((chi, twisted));
    }
    Ok(out)
}

/// Result of testing a monomial subalgebra for being maximal abelian.
#[derive(Debug, Clone)]
pub struct MasaReport {
    pub sub_dim: usize,
    pub commutant_dim: usize,
    pub commutative: bool,
    pub star_closed: bool,
}

impl MasaReport {
    pub fn is_masa(&self) -> bool {
        self.commutative && self.star_closed && self.sub_dim == self.commutant_dim
    }
}

/// Decide whether the span of the given monomials is a maximal abelian
/// `*`-subalgebra: commutativity and `*`-closure are checked exactly on the
/// monomials, the commutant dimension numerically at the given tolerance.
pub fn masa_check(
    alg: &ConvolutionAlgebra,
    sub: &[usize],
    tolerance: f64,
) -> Result<MasaReport> {
    if sub.is_empty() {
        return Err(Error::Precondition("masa check needs a nonempty monomial set".into()));
    }
    let mut sorted = sub.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != sub.len() {
        return Err(Error::Precondition("masa check monomials must be distinct".into()));
    }
    for &i in &sorted {
        if i >= alg.dim() {
            return Err(Error::Precondition(format!("monomial index {i} out of range")));
        }
    }
    let in_sub = |i: usize| sorted.binary_search(&i).is_ok();

    let mut commutative = true;
    let mut star_closed = true;
    let mut closed = true;
    for &i in &sorted {
        let (k, _) = alg.star(i);
        if !in_sub(k) {
            star_closed = false;
        }
        for &j in &sorted {
            if alg.mult(i, j) != alg.mult(j, i) {
                commutative = false;
            }
            if let Some((k, _)) = alg.mult(i, j) {
                if !in_sub(k) {
                    closed = false;
                }
            }
        }
    }
    if !closed {
        return Err(Error::Precondition(
            "the monomial set does not span a subalgebra".into(),
        ));
    }

    // Commutant dimension: intersect ker(L_s − R_s) over the sub basis, one
    // factor at a time so every decomposition stays square.
    let n = alg.dim();
    let mut basis = DMatrix::<Complex64>::identity(n, n);
    for &s in &sorted {
        if basis.ncols() == 0 {
            break;
        }
        let mut e = DVector::zeros(n);
        e[s] = Complex64::new(1.0, 0.0);
        let op = alg.left_mult(&e) - alg.right_mult(&e);
        let restricted = &op * &basis;
        let kernel = crate::wedderburn::svd_kernel_basis(&restricted, tolerance);
        basis = &basis * &kernel;
    }
    Ok(MasaReport {
        sub_dim: sorted.len(),
        commutant_dim: basis.ncols(),
        commutative,
        star_closed,
    })
}
