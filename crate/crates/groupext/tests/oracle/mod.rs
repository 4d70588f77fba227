//! Brute-force oracles, independent of the library's Smith-form and
//! numerical routes. Everything here recomputes expected values from first
//! principles by exhaustive enumeration over small index sets, using plain
//! integer arithmetic and the composition tables alone.
//!
//! Shared between test binaries; each uses a different subset.
#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use std::collections::HashSet;

use groupext::groupoid::FiniteGroupoid;

fn modp(x: i64, m: i64) -> i64 {
    x.rem_euclid(m)
}

/// Class data for normalized `Z_m`-valued 2-cocycles on `Z_n` with trivial
/// action, found by enumerating seeds `φ(·, 1)` and extending through the
/// cocycle identity.
pub struct BruteClasses {
    pub cocycles: usize,
    pub coboundaries: usize,
    pub class_count: usize,
    pub max_class_order: usize,
}

/// φ is stored as an n×n table, rows and columns indexed by group elements.
fn extend_seed(n: i64, m: i64, seed: &[i64]) -> Option<Vec<Vec<i64>>> {
    let nu = n as usize;
    let mut phi = vec![vec![0i64; nu]; nu];
    for j in 1..nu {
        phi[j][1] = seed[j - 1];
    }
    // identity at (j, k, 1): φ(j,k) + φ(j+k,1) = φ(k,1) + φ(j,k+1)
    for k in 1..nu - 1 {
        for j in 1..nu {
            phi[j][k + 1] = modp(phi[j][k] + phi[(j + k) % nu][1] - phi[k][1], m);
        }
    }
    // the same relation at k = n−1 must close up to φ(j, 0) = 0
    for j in 1..nu {
        if modp(phi[j][nu - 1] + phi[(j + nu - 1) % nu][1] - phi[nu - 1][1], m) != 0 {
            return None;
        }
    }
    // exhaustive recheck of the identity
    for j in 0..nu {
        for k in 0..nu {
            for l in 0..nu {
                let lhs = phi[j][k] + phi[(j + k) % nu][l];
                let rhs = phi[k][l] + phi[j][(k + l) % nu];
                if modp(lhs - rhs, m) != 0 {
                    return None;
                }
            }
        }
    }
    Some(phi)
}

fn flatten(phi: &[Vec<i64>]) -> Vec<i64> {
    phi.iter().flatten().copied().collect()
}

pub fn cyclic_classes(n: i64, m: i64) -> BruteClasses {
    let nu = n as usize;
    let seeds = (nu - 1) as u32;
    let mut cocycles: Vec<Vec<Vec<i64>>> = Vec::new();
    let total = (m as u64).pow(seeds);
    for code in 0..total {
        let mut c = code;
        let seed: Vec<i64> = (0..seeds)
            .map(|_| {
                let digit = (c % m as u64) as i64;
                c /= m as u64;
                digit
            })
            .collect();
        if let Some(phi) = extend_seed(n, m, &seed) {
            cocycles.push(phi);
        }
    }

    let mut coboundaries: HashSet<Vec<i64>> = HashSet::new();
    for code in 0..total {
        let mut cc = code;
        let mut c = vec![0i64; nu];
        for j in 1..nu {
            c[j] = (cc % m as u64) as i64;
            cc /= m as u64;
        }
        let mut delta = vec![vec![0i64; nu]; nu];
        for (x, row) in delta.iter_mut().enumerate() {
            for (y, v) in row.iter_mut().enumerate() {
                *v = modp(c[y] - c[(x + y) % nu] + c[x], m);
            }
        }
        coboundaries.insert(flatten(&delta));
    }

    assert_eq!(cocycles.len() % coboundaries.len(), 0, "coset sizes must divide");
    let class_count = cocycles.len() / coboundaries.len();
    let max_class_order = cocycles
        .iter()
        .map(|phi| {
            (1i64..)
                .find(|&t| {
                    let scaled: Vec<i64> =
                        flatten(phi).iter().map(|&v| modp(t * v, m)).collect();
                    coboundaries.contains(&scaled)
                })
                .expect("class order bounded by the group exponent") as usize
        })
        .max()
        .unwrap_or(1);

    BruteClasses {
        cocycles: cocycles.len(),
        coboundaries: coboundaries.len(),
        class_count,
        max_class_order,
    }
}

/// A `Z_m`-valued function on the non-unit composable pairs of the pair
/// groupoid on `k` points: position `((i,j),(j,l))` with `i ≠ j`, `j ≠ l`.
/// Arrows compose as `(i,j) ∘ (j,l) = (i,l)`.
pub struct PairCocycle {
    pub k: usize,
    pub m: i64,
    /// values[i][j][l] = φ((i,j),(j,l)); unit-touching entries stay zero.
    pub values: Vec<Vec<Vec<i64>>>,
}

impl PairCocycle {
    pub fn zero(k: usize, m: i64) -> Self {
        PairCocycle { k, m, values: vec![vec![vec![0; k]; k]; k] }
    }

    pub fn satisfies_identity(&self) -> bool {
        let k = self.k;
        // identity over ((i,j),(j,l),(l,p)):
        // φ((i,j),(j,l)) + φ((i,l),(l,p)) = φ((j,l),(l,p)) + φ((i,j),(j,p))
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    for p in 0..k {
                        let lhs = self.values[i][j][l] + self.values[i][l][p];
                        let rhs = self.values[j][l][p] + self.values[i][j][p];
                        if modp(lhs - rhs, self.m) != 0 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The candidate splitting cochain read off the cocycle itself:
    /// `c((i,j)) = −φ((i,0),(0,j)) + φ((j,0),(0,j))`.
    pub fn splitting_cochain(&self) -> Vec<Vec<i64>> {
        let k = self.k;
        let mut c = vec![vec![0i64; k]; k];
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    c[i][j] = modp(-self.values[i][0][j] + self.values[j][0][j], self.m);
                }
            }
        }
        c
    }

    /// δc((i,j),(j,l)) = c((j,l)) − c((i,l)) + c((i,j)).
    pub fn coboundary_of(k: usize, m: i64, c: &[Vec<i64>]) -> Self {
        let mut phi = PairCocycle::zero(k, m);
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    if i != j && j != l {
                        phi.values[i][j][l] = modp(c[j][l] - c[i][l] + c[i][j], m);
                    }
                }
            }
        }
        phi
    }

    pub fn equals(&self, other: &PairCocycle) -> bool {
        self.values == other.values
    }
}

/// Exhaustively enumerate all normalized cocycles on the pair groupoid on
/// `k` points with `Z_m` values, and check that each one is the coboundary
/// of its own splitting cochain. Returns (cocycle count, coboundary count).
/// Feasible only for small `k^3`-sized index sets.
pub fn pair_classes_exhaustive(k: usize, m: i64) -> (usize, usize) {
    let mut positions = Vec::new();
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                if i != j && j != l {
                    positions.push((i, j, l));
                }
            }
        }
    }
    let total = (m as u64).pow(positions.len() as u32);
    let mut n_cocycles = 0usize;
    for code in 0..total {
        let mut phi = PairCocycle::zero(k, m);
        let mut c = code;
        for &(i, j, l) in &positions {
            phi.values[i][j][l] = (c % m as u64) as i64;
            c /= m as u64;
        }
        if !phi.satisfies_identity() {
            continue;
        }
        n_cocycles += 1;
        let split = phi.splitting_cochain();
        let rebuilt = PairCocycle::coboundary_of(k, m, &split);
        assert!(
            rebuilt.equals(&phi),
            "a cocycle on the pair groupoid escaped its splitting cochain"
        );
    }

    let mut coboundaries: HashSet<Vec<i64>> = HashSet::new();
    let arrow_positions: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| i != j).map(move |j| (i, j)))
        .collect();
    let total_c = (m as u64).pow(arrow_positions.len() as u32);
    for code in 0..total_c {
        let mut c = vec![vec![0i64; k]; k];
        let mut cc = code;
        for &(i, j) in &arrow_positions {
            c[i][j] = (cc % m as u64) as i64;
            cc /= m as u64;
        }
        let phi = PairCocycle::coboundary_of(k, m, &c);
        coboundaries.insert(phi.values.iter().flatten().flatten().copied().collect());
    }
    (n_cocycles, coboundaries.len())
}

/// Number of conjugacy classes of a one-unit groupoid, directly from its
/// composition table.
pub fn conjugacy_class_count(g: &FiniteGroupoid) -> usize {
    assert_eq!(g.unit_ids().len(), 1, "conjugacy needs a group");
    let n = g.n_arrows();
    let mut seen = vec![false; n];
    let mut classes = 0;
    for a in 0..n {
        if seen[a] {
            continue;
        }
        classes += 1;
        for s in 0..n {
            let sa = g.compose(s, a).expect("group arrows always compose");
            let sas = g.compose(sa, g.inv(s)).expect("group arrows always compose");
            seen[sas] = true;
        }
    }
    classes
}

/// Order of the abelianization of a one-unit groupoid: the index of the
/// subgroup generated by commutators.
pub fn abelianization_order(g: &FiniteGroupoid) -> usize {
    assert_eq!(g.unit_ids().len(), 1, "abelianization needs a group");
    let n = g.n_arrows();
    let mut commutators: HashSet<usize> = HashSet::new();
    for a in 0..n {
        for b in 0..n {
            let ab = g.compose(a, b).unwrap();
            let ba = g.compose(b, a).unwrap();
            let c = g.compose(ab, g.inv(ba)).unwrap();
            commutators.insert(c);
        }
    }
    // close under composition
    let mut subgroup: HashSet<usize> = commutators.clone();
    loop {
        let mut grew = false;
        let members: Vec<usize> = subgroup.iter().copied().collect();
        for &a in &members {
            for &b in &members {
                let ab = g.compose(a, b).unwrap();
                if subgroup.insert(ab) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    n / subgroup.len()
}
