//! Numeric block-structure fingerprints for the convolution algebras.
//!
//! A finite-dimensional `*`-algebra over ℂ is a direct sum of matrix blocks;
//! the multiset of block sizes is a complete isomorphism invariant and is
//! what the decomposition theorems are checked against. The pipeline:
//!
//! 1. the center, as the SVD nullspace of the exact centrality system;
//! 2. a seeded random self-adjoint central element `h`;
//! 3. the spectral clusters of left multiplication by `h` (Hermitian in the
//!    monomial basis, which is orthonormal for the canonical trace);
//! 4. central idempotents as spectral projections of the unit, and block
//!    sizes as `√rank` of their left multiplications.
//!
//! A generic `h` separates the blocks; if the cluster count disagrees with
//! the center dimension the draw is retried with the next seed, and a hard
//! error is raised after five failures rather than guessing.

use crate::algebra::ConvolutionAlgebra;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
const MAX_RETRIES: u64 = 5;

#[derive(Debug, Clone, Copy)]
pub struct FingerprintOptions {
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for FingerprintOptions {
    fn default() -> Self {
        FingerprintOptions { seed: 0, tolerance: DEFAULT_TOLERANCE }
    }
}

/// The block structure of an algebra: sizes ascending, with the central
/// projection realizing each block.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub blocks: Vec<usize>,
    pub idempotents: Vec<DVector<Complex64>>,
    pub center_dim: usize,
}

impl BlockDecomposition {
    pub fn fingerprint(&self) -> Vec<usize> {
        self.blocks.clone()
    }
}

/// Basis of the nullspace of `m` at a relative singular-value tolerance,
/// returned as columns.
pub(crate) fn svd_kernel_basis(m: &DMatrix<Complex64>, tolerance: f64) -> DMatrix<Complex64> {
    let cols = m.ncols();
    if cols == 0 || m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // the thin SVD of a wide matrix hides part of the nullspace; square it up
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let max_sv = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = tolerance * max_sv.max(1.0);
    let mut kernel_rows = Vec::new();
    for (i, &sv) in svd.singular_values.iter().enumerate() {
        if sv <= cutoff {
            kernel_rows.push(i);
        }
    }
    // rows of V^H past the rank ignored by the solver are also nullspace
    for i in svd.singular_values.len()..v_t.nrows() {
        kernel_rows.push(i);
    }
    let mut basis = DMatrix::zeros(cols, kernel_rows.len());
    for (j, &r) in kernel_rows.iter().enumerate() {
        for c in 0..cols {
            basis[(c, j)] = v_t[(r, c)].conj();
        }
    }
    basis
}

/// Numeric rank at a relative tolerance.
pub(crate) fn numeric_rank(m: &DMatrix<Complex64>, tolerance: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = tolerance * max_sv.max(1.0);
    svd.singular_values.iter().filter(|&&s| s > cutoff).count()
}

/// Orthonormal basis of the center: nullspace of the stacked system
/// `Σᵢ xᵢ (c_{ij}^k − c_{ji}^k) = 0` over all `(j, k)`.
pub fn center_basis(alg: &ConvolutionAlgebra, tolerance: f64) -> DMatrix<Complex64> {
    let n = alg.dim();
    let mut sys = DMatrix::<Complex64>::zeros(n * n, n);
    for i in 0..n {
        for j in 0..n {
            if let Some((k, z)) = alg.mult(i, j) {
                sys[(j * n + k, i)] += z.to_complex();
            }
            if let Some((k, z)) = alg.mult(j, i) {
                sys[(j * n + k, i)] -= z.to_complex();
            }
        }
    }
    svd_kernel_basis(&sys, tolerance)
}

/// Compute the block decomposition of an algebra.
pub fn block_decomposition(
    alg: &ConvolutionAlgebra,
    opts: &FingerprintOptions,
) -> Result<BlockDecomposition> {
    let n = alg.dim();
    if n == 0 {
        return Err(Error::Precondition("cannot decompose the zero algebra".into()));
    }
    let center = center_basis(alg, opts.tolerance);
    let center_dim = center.ncols();
    if center_dim == 0 {
        return Err(Error::Numerical("empty center; the unit should be central".into()));
    }

    let mut last_err = None;
    for retry in 0..MAX_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(retry));
        // random self-adjoint central element
        let mut h: DVector<Complex64> = DVector::zeros(n);
        for c in 0..center_dim {
            let coeff = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for r in 0..n {
                h[r] += coeff * center[(r, c)];
            }
        }
        let h = &h + alg.star_vector(&h);

        let lh = alg.left_mult(&h);
        let herm = (&lh + lh.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();

        // cluster the (real) eigenvalues at the relative tolerance
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let scale = order
            .iter()
            .map(|&i| eig.eigenvalues[i].abs())
            .fold(1.0_f64, f64::max);
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &i in &order {
            match clusters.last_mut() {
                Some(cluster)
                    if (eig.eigenvalues[i] - eig.eigenvalues[*cluster.last().unwrap()]).abs()
                        <= opts.tolerance * scale =>
                {
                    cluster.push(i)
                }
                _ => clusters.push(vec![i]),
            }
        }
        if clusters.len() != center_dim {
            last_err = Some(Error::Numerical(format!(
                "{} spectral clusters for a {}-dimensional center",
                clusters.len(),
                center_dim
            )));
            continue;
        }

        // spectral projections of the unit are the central idempotents
        let unit = alg.unit_vector();
        let mut blocks = Vec::new();
        let mut idempotents = Vec::new();
        let mut total = 0usize;
        let mut consistent = true;
        for cluster in &clusters {
            let mut proj: DVector<Complex64> = DVector::zeros(n);
            for &i in cluster {
                let v = eig.eigenvectors.column(i);
                let coeff: Complex64 = v.iter().zip(unit.iter()).map(|(a, b)| a.conj() * b).sum();
                for r in 0..n {
                    proj[r] += coeff * v[r];
                }
            }
            let rank = numeric_rank(&alg.left_mult(&proj), opts.tolerance);
            let d = (rank as f64).sqrt().round() as usize;
            if d * d != rank || d == 0 {
                consistent = false;
                break;
            }
            total += rank;
            blocks.push(d);
            idempotents.push(proj);
        }
        if !consistent || total != n {
            last_err = Some(Error::Numerical(
                "spectral projections do not split the algebra into square blocks".into(),
            ));
            continue;
        }
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by_key(|&i| blocks[i]);
        return Ok(BlockDecomposition {
            blocks: order.iter().map(|&i| blocks[i]).collect(),
            idempotents: order.iter().map(|&i| idempotents[i].clone()).collect(),
            center_dim,
        });
    }
    Err(last_err.unwrap_or_else(|| Error::Numerical("block decomposition failed".into())))
}

/// The multiset of matrix-block sizes, ascending.
pub fn fingerprint(alg: &ConvolutionAlgebra, opts: &FingerprintOptions) -> Result<Vec<usize>> {
    Ok(block_decomposition(alg, opts)?.blocks)
}

/// A numeric model of one block: an orthonormal basis of the corner cut out
/// by a central idempotent, with its dimension and matrix size.
#[derive(Debug, Clone)]
pub struct Summand {
    pub basis: DMatrix<Complex64>,
    pub dim: usize,
    pub block: usize,
}

/// Cut the corner `zAz` out of the algebra along a central idempotent.
pub fn restrict_summand(
    alg: &ConvolutionAlgebra,
    idempotent: &DVector<Complex64>,
    tolerance: f64,
) -> Result<Summand> {
    let lz = alg.left_mult(idempotent);
    let rank = numeric_rank(&lz, tolerance);
    // orthonormal range basis from the SVD
    let svd = lz.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let mut basis = DMatrix::zeros(alg.dim(), rank);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap()
    });
    for (j, &c) in order.iter().take(rank).enumerate() {
        for r in 0..alg.dim() {
            basis[(r, j)] = u[(r, c)];
        }
    }
    // the corner must be closed under the product
    for i in 0..rank {
        for j in 0..rank {
            let x: DVector<Complex64> = basis.column(i).into();
            let y: DVector<Complex64> = basis.column(j).into();
            let p = alg.product(&x, &y);
            let inside = &basis * (basis.adjoint() * &p);
            if (&p - inside).norm() > tolerance * 10.0 * p.norm().max(1.0) {
                return Err(Error::Numerical("summand is not closed under the product".into()));
            }
        }
    }
    let d = (rank as f64).sqrt().round() as usize;
    if d * d != rank {
        return Err(Error::Numerical("summand dimension is not a square".into()));
    }
    Ok(Summand { basis, dim: rank, block: d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FiniteAbelianGroup;
    use crate::algebra::{groupoid_algebra, twisted_algebra};
    use crate::bundle::{GroupBundle, GroupoidAction};
    use crate::cohomology::h2;
    use crate::groupoid::{cyclic_group, disjoint_union, pair_groupoid};

    fn opts() -> FingerprintOptions {
        FingerprintOptions::default()
    }

    #[test]
    fn cyclic_group_algebra_splits_into_lines() {
        let alg = groupoid_algebra(&cyclic_group(4));
        assert_eq!(fingerprint(&alg, &opts()).unwrap(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn pair_groupoid_algebra_is_a_matrix_block() {
        let alg = groupoid_algebra(&pair_groupoid(3));
        assert_eq!(fingerprint(&alg, &opts()).unwrap(), vec![3]);
    }

    #[test]
    fn s3_shaped_algebra_has_the_classic_blocks() {
        let g = cyclic_group(2);
        let b = GroupBundle::constant(g.unit_ids(), &FiniteAbelianGroup::cyclic(3)).unwrap();
        let act = GroupoidAction::new(
            &g,
            &b,
            vec![("0".into(), vec![vec![1]]), ("1".into(), vec![vec![-1]])],
        )
        .unwrap();
        let ext = crate::extension::semidirect(&act).unwrap();
        let alg = groupoid_algebra(ext.total());
        assert_eq!(fingerprint(&alg, &opts()).unwrap(), vec![1, 1, 2]);
    }

    #[test]
    fn disjoint_union_fingerprints_concatenate() {
        let c2 = cyclic_group(2);
        let p2 = pair_groupoid(2);
        let g = disjoint_union(&[("a", &c2), ("b", &p2)]).unwrap();
        let alg = groupoid_algebra(&g);
        assert_eq!(fingerprint(&alg, &opts()).unwrap(), vec![1, 1, 2]);
    }

    #[test]
    fn twisted_z2_squared_is_a_full_block() {
        // the bicharacter twist on Z2² gives M2
        let h = FiniteAbelianGroup::from_orders(&[2, 2]).unwrap();
        let g = crate::groupoid::abelian_group(&h).unwrap();
        let b = GroupBundle::constant(g.unit_ids(), &FiniteAbelianGroup::cyclic(2)).unwrap();
        let act = GroupoidAction::trivial(&g, &b).unwrap();
        let mut entries = Vec::new();
        for x in h.elements().unwrap() {
            for y in h.elements().unwrap() {
                let v = (x.0[0] * y.0[1]).rem_euclid(2);
                if v != 0 {
                    entries.push((h.elem_id(&x), h.elem_id(&y), crate::abelian::Elem(vec![v])));
                }
            }
        }
        let omega = crate::cohomology::Cocycle2::new(&act, entries).unwrap();
        let alg = twisted_algebra(&omega, 1).unwrap();
        assert_eq!(fingerprint(&alg, &opts()).unwrap(), vec![2]);
    }

    #[test]
    fn z4_extension_algebra_matches_its_group() {
        let g = cyclic_group(2);
        let b = GroupBundle::constant(g.unit_ids(), &FiniteAbelianGroup::cyclic(2)).unwrap();
        let act = GroupoidAction::trivial(&g, &b).unwrap();
        let h = h2(&act).unwrap();
        let ext = crate::cohomology::extension_from_cocycle(&h.basis[0]).unwrap();
        let alg = groupoid_algebra(ext.total());
        assert_eq!(fingerprint(&alg, &opts()).unwrap(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn summand_restriction_recovers_block_sizes() {
        let alg = groupoid_algebra(&pair_groupoid(2));
        let dec = block_decomposition(&alg, &opts()).unwrap();
        assert_eq!(dec.blocks, vec![2]);
        let summand = restrict_summand(&alg, &dec.idempotents[0], 1e-9).unwrap();
        assert_eq!(summand.block, 2);
        assert_eq!(summand.dim, 4);
    }
}
