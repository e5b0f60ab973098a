//! Hilbert basis by completion over simplicial cells of the ray set.
//!
//! Every integer point of the cone lies in some simplicial cone spanned by a
//! linearly independent set of `d` extreme rays (`d` = cone dimension), and is
//! a nonnegative integer combination of those rays plus one lattice point of
//! their half-open fundamental parallelepiped. The rays together with all such
//! parallelepiped points therefore generate; the Hilbert basis is the subset
//! of irreducible candidates.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::lattice::{column_hnf, coordinates_in, inverse, rank, saturated_basis};
use super::{EngineOptions, IntVector, PolyhedralError};

/// Hilbert basis of `{x : A x = 0, x >= 0}` given its extreme rays in `n`
/// dimensions. Irreducibility uses that `x - g >= 0` already lies in such a
/// cone whenever `x` and `g` do, so it does not hold for arbitrary ray cones.
pub fn hilbert_basis_reduced(
    rays: &[IntVector],
    n: usize,
    opts: EngineOptions,
) -> Result<Vec<IntVector>, PolyhedralError> {
    if rays.is_empty() {
        return Ok(Vec::new());
    }
    let d = rank(rays);
    let basis = saturated_basis(rays, n);
    debug_assert_eq!(basis.len(), d);
    let coords: Vec<Vec<BigInt>> = rays
        .iter()
        .map(|r| {
            coordinates_in(&basis, r)
                .expect("ray lies in its own span")
                .into_iter()
                .map(|c| {
                    debug_assert!(c.is_integer());
                    c.to_integer()
                })
                .collect()
        })
        .collect();

    let mut candidates: BTreeSet<IntVector> = rays.iter().cloned().collect();
    for cell in Combinations::new(rays.len(), d) {
        // columns of k are lattice coordinates of the cell's rays
        let k: Vec<Vec<BigInt>> = (0..d)
            .map(|i| cell.iter().map(|&r| coords[r][i].clone()).collect())
            .collect();
        let kq: Vec<Vec<BigRational>> = k
            .iter()
            .map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        let Some(kinv) = inverse(&kq) else {
            continue;
        };
        let (h, _, _) = column_hnf(&k, d);
        let diag: Vec<u64> = (0..d)
            .map(|i| h[i][i].to_u64().expect("cell determinant fits in u64"))
            .collect();
        let mut u = vec![0u64; d];
        loop {
            if u.iter().any(|&x| x != 0) {
                let frac: Vec<BigRational> = (0..d)
                    .map(|i| {
                        let lambda: BigRational = (0..d)
                            .map(|j| &kinv[i][j] * BigRational::from_integer(BigInt::from(u[j])))
                            .sum();
                        lambda.fract_nonneg()
                    })
                    .collect();
                if frac.iter().any(|f| !f.is_zero()) {
                    let mut point = vec![BigRational::zero(); n];
                    for (f, &r) in frac.iter().zip(&cell) {
                        for (p, x) in point.iter_mut().zip(&rays[r]) {
                            *p += f * BigRational::from_integer(x.clone());
                        }
                    }
                    let point: IntVector = point
                        .into_iter()
                        .map(|x| {
                            debug_assert!(x.is_integer());
                            x.to_integer()
                        })
                        .collect();
                    opts.check(&point)?;
                    candidates.insert(point);
                }
            }
            // odometer over 0 <= u_i < diag_i
            let mut i = 0;
            while i < d {
                u[i] += 1;
                if u[i] < diag[i] {
                    break;
                }
                u[i] = 0;
                i += 1;
            }
            if i == d {
                break;
            }
        }
    }

    let candidates: Vec<IntVector> = candidates.into_iter().collect();
    let irreducible = candidates
        .iter()
        .filter(|x| {
            !candidates
                .iter()
                .any(|g| g != *x && g.iter().zip(x.iter()).all(|(a, b)| a <= b))
        })
        .cloned()
        .collect();
    Ok(irreducible)
}

trait FractNonneg {
    fn fract_nonneg(&self) -> BigRational;
}

impl FractNonneg for BigRational {
    /// `x - floor(x)`, in `[0, 1)`.
    fn fract_nonneg(&self) -> BigRational {
        let f = self - self.floor();
        debug_assert!(!f.is_negative());
        f
    }
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
