//! Exact computations on pointed rational cones `{x : A x = 0, x >= 0}`.
//!
//! Everything here is exact: integers are `BigInt`, rationals `BigRational`.
//! Coordinates outside an optional support are pinned to zero; all work is done
//! in the reduced coordinate space and results are embedded back.

mod dd;
mod hilbert;
pub mod lattice;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

pub use dd::double_description;
pub use hilbert::hilbert_basis_reduced;

pub type IntVector = Vec<BigInt>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyhedralError {
    #[error("intermediate coefficient needs {bits} bits, budget is {budget}")]
    CoefficientBudget { bits: u64, budget: u64 },
    #[error("the cone is {{0}}; its slice is empty")]
    EmptyCone,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl PolyhedralError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::CoefficientBudget { .. } => "CoefficientBudget",
            Self::EmptyCone => "EmptyCone",
            Self::DimensionMismatch { .. } => "DimensionMismatch",
        }
    }
}

/// Engine knobs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineOptions {
    /// Abort when an intermediate integer exceeds this many bits.
    pub max_coeff_bits: Option<u64>,
}

impl EngineOptions {
    pub(crate) fn check(&self, v: &[BigInt]) -> Result<(), PolyhedralError> {
        if let Some(budget) = self.max_coeff_bits {
            let bits = v.iter().map(BigInt::bits).max().unwrap_or(0);
            if bits > budget {
                return Err(PolyhedralError::CoefficientBudget { bits, budget });
            }
        }
        Ok(())
    }
}

/// `{x in R^dim : A x = 0, x >= 0, x_i = 0 for i outside the support}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCone {
    dim: usize,
    equations: Vec<IntVector>,
    support: Vec<bool>,
}

impl RationalCone {
    pub fn new(dim: usize, equations: Vec<IntVector>) -> Result<Self, PolyhedralError> {
        for eq in &equations {
            if eq.len() != dim {
                return Err(PolyhedralError::DimensionMismatch {
                    expected: dim,
                    found: eq.len(),
                });
            }
        }
        Ok(RationalCone {
            dim,
            equations,
            support: vec![true; dim],
        })
    }

    pub fn from_i64(dim: usize, equations: &[Vec<i64>]) -> Result<Self, PolyhedralError> {
        Self::new(
            dim,
            equations
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// Restricts to the given coordinate indices (others forced to zero).
    pub fn with_support(mut self, support: &[usize]) -> Self {
        self.support = vec![false; self.dim];
        for &i in support {
            self.support[i] = true;
        }
        self
    }

    pub fn with_equation(mut self, eq: IntVector) -> Result<Self, PolyhedralError> {
        if eq.len() != self.dim {
            return Err(PolyhedralError::DimensionMismatch {
                expected: self.dim,
                found: eq.len(),
            });
        }
        self.equations.push(eq);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn equations(&self) -> &[IntVector] {
        &self.equations
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.support[i]).collect()
    }

    pub fn in_support(&self, i: usize) -> bool {
        self.support[i]
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[BigInt]) -> bool {
        x.len() == self.dim
            && x.iter().enumerate().all(|(i, v)| {
                !v.is_negative() && (self.support[i] || v.is_zero())
            })
            && self
                .equations
                .iter()
                .all(|eq| eq.iter().zip(x).map(|(a, b)| a * b).sum::<BigInt>().is_zero())
    }

    /// Equations restricted to the support columns, zero rows dropped.
    fn reduced_equations(&self) -> Vec<IntVector> {
        let cols = self.support();
        self.equations
            .iter()
            .map(|eq| cols.iter().map(|&c| eq[c].clone()).collect::<IntVector>())
            .filter(|row: &IntVector| row.iter().any(|x| !x.is_zero()))
            .collect()
    }

    fn embed(&self, reduced: &[BigInt]) -> IntVector {
        let mut out = vec![BigInt::zero(); self.dim];
        for (v, c) in reduced.iter().zip(self.support()) {
            out[c] = v.clone();
        }
        out
    }
}

/// Primitive extreme rays, sorted in descending lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RaySet {
    #[serde(serialize_with = "crate::report::ser_bigint_vecs")]
    pub rays: Vec<IntVector>,
}

/// Irreducible generators of the integer points, sorted in descending lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HilbertBasis {
    #[serde(serialize_with = "crate::report::ser_bigint_vecs")]
    pub elements: Vec<IntVector>,
}

fn sort_desc(v: &mut Vec<IntVector>) {
    v.sort_by(|a, b| b.cmp(a));
    v.dedup();
}

/// Complete set of primitive extreme rays (double description, equations
/// processed in input order).
pub fn extreme_rays(cone: &RationalCone, opts: EngineOptions) -> Result<RaySet, PolyhedralError> {
    let n = cone.support().len();
    let reduced = double_description(&cone.reduced_equations(), n, opts)?;
    let mut rays: Vec<IntVector> = reduced.iter().map(|r| cone.embed(r)).collect();
    sort_desc(&mut rays);
    Ok(RaySet { rays })
}

/// Minimal generating set of the integer points of the cone.
pub fn hilbert_basis(cone: &RationalCone, opts: EngineOptions) -> Result<HilbertBasis, PolyhedralError> {
    let n = cone.support().len();
    let rays = double_description(&cone.reduced_equations(), n, opts)?;
    let reduced = hilbert_basis_reduced(&rays, n, opts)?;
    let mut elements: Vec<IntVector> = reduced.iter().map(|r| cone.embed(r)).collect();
    sort_desc(&mut elements);
    Ok(HilbertBasis { elements })
}

/// Optimum of a linear functional over the slice `{x in C : sum x = 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearOptimum {
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub value: BigRational,
    #[serde(serialize_with = "crate::report::ser_rational_vec")]
    pub witness: Vec<BigRational>,
}

/// Projects a nonzero nonnegative vector onto the slice `sum x = 1`.
pub fn projectivize(v: &[BigInt]) -> Vec<BigRational> {
    let total: BigInt = v.iter().sum();
    v.iter()
        .map(|x| BigRational::new(x.clone(), total.clone()))
        .collect()
}

pub fn dot_rational(f: &[BigRational], x: &[BigRational]) -> BigRational {
    f.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Maximizes `f` over the slice; the optimum is attained at a slice vertex,
/// i.e. at a projectivized extreme ray. Ties keep the first vertex in ray order.
pub fn maximize_linear(
    cone: &RationalCone,
    f: &[BigRational],
    opts: EngineOptions,
) -> Result<LinearOptimum, PolyhedralError> {
    if f.len() != cone.dim() {
        return Err(PolyhedralError::DimensionMismatch {
            expected: cone.dim(),
            found: f.len(),
        });
    }
    let rays = extreme_rays(cone, opts)?;
    optimum_over_rays(&rays.rays, f)
}

pub(crate) fn optimum_over_rays(
    rays: &[IntVector],
    f: &[BigRational],
) -> Result<LinearOptimum, PolyhedralError> {
    let mut best: Option<LinearOptimum> = None;
    for r in rays {
        let vertex = projectivize(r);
        let value = dot_rational(f, &vertex);
        if best.as_ref().map_or(true, |b| value > b.value) {
            best = Some(LinearOptimum {
                value,
                witness: vertex,
            });
        }
    }
    best.ok_or(PolyhedralError::EmptyCone)
}

/// A cone point with every support coordinate a positive integer, if one exists.
///
/// The minimum coordinate over the slice is maximized at its barycentre-side:
/// it is positive iff the sum of all extreme rays is positive on the support,
/// in which case that sum (made primitive) is returned.
pub fn positive_integer_point(
    cone: &RationalCone,
    opts: EngineOptions,
) -> Result<Option<IntVector>, PolyhedralError> {
    let rays = extreme_rays(cone, opts)?;
    if rays.rays.is_empty() {
        return Ok(None);
    }
    let mut sum = vec![BigInt::zero(); cone.dim()];
    for r in &rays.rays {
        for (s, x) in sum.iter_mut().zip(r) {
            *s += x;
        }
    }
    let positive = cone.support().iter().all(|&i| sum[i].is_positive());
    Ok(positive.then(|| lattice::primitive(sum)))
}
