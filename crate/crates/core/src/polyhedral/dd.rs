use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::lattice::primitive;
use super::{EngineOptions, IntVector, PolyhedralError};

/// Zero set of a ray over the nonnegativity constraints, as a bitset.
#[derive(Clone, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn of(v: &[BigInt]) -> Self {
        let mut words = vec![0u64; v.len().div_ceil(64)];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        ZeroSet(words)
    }

    fn and(&self, other: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn contains(&self, other: &ZeroSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

/// Extreme rays of `{x in R^n : eqs x = 0, x >= 0}` by the double description
/// method. Starts from the orthant's unit rays and intersects with each
/// hyperplane in input order; ray pairs are combined when combinatorially
/// adjacent (no third ray vanishes on their common zero set).
pub fn double_description(
    eqs: &[IntVector],
    n: usize,
    opts: EngineOptions,
) -> Result<Vec<IntVector>, PolyhedralError> {
    let mut rays: Vec<IntVector> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect())
        .collect();
    for eq in eqs {
        let values: Vec<BigInt> = rays
            .iter()
            .map(|r| eq.iter().zip(r).map(|(a, b)| a * b).sum())
            .collect();
        let zeros: Vec<ZeroSet> = rays.iter().map(|r| ZeroSet::of(r)).collect();
        let mut next: Vec<IntVector> = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (i, val) in values.iter().enumerate() {
            if val.is_zero() {
                next.push(rays[i].clone());
            } else if val.is_positive() {
                pos.push(i);
            } else {
                neg.push(i);
            }
        }
        for &p in &pos {
            for &m in &neg {
                let common = zeros[p].and(&zeros[m]);
                let blocked = zeros
                    .iter()
                    .enumerate()
                    .any(|(k, z)| k != p && k != m && z.contains(&common));
                if blocked {
                    continue;
                }
                let vp = &values[p];
                let vm = -&values[m];
                let combined: IntVector = rays[m]
                    .iter()
                    .zip(&rays[p])
                    .map(|(a, b)| vp * a + &vm * b)
                    .collect();
                opts.check(&combined)?;
                next.push(primitive(combined));
            }
        }
        next.sort();
        next.dedup();
        rays = next;
    }
    Ok(rays)
}
