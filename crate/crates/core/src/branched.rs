//! Branched-surface models whose sectors are normal disk types.
//!
//! A model is a support set of coordinates; the surfaces it carries are the
//! integer points of the matching cone restricted to that support.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::normal::{DiskType, NormalVector, COORDS_PER_TET};
use crate::polyhedral::{
    extreme_rays, hilbert_basis, positive_integer_point, projectivize, EngineOptions, IntVector,
    PolyhedralError, RationalCone,
};
use crate::report::{ser_rational, ser_rational_vec, ser_rational_vecs};
use crate::solutions::{matching_cone, to_normal};
use crate::surface::{build_surface, Component};
use crate::triangulation::Triangulation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchedError {
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error("vector is not carried: {0}")]
    NotCarried(String),
    #[error(transparent)]
    Polyhedral(#[from] PolyhedralError),
}

impl BranchedError {
    pub fn kind(&self) -> &'static str {
        match self {
            BranchedError::InvalidSupport(_) => "InvalidSupport",
            BranchedError::NotCarried(_) => "NotCarried",
            BranchedError::Polyhedral(e) => e.kind(),
        }
    }
}

/// Euler characteristic of a sector with topological Euler characteristic
/// `chi_top` and `corners` corners.
pub fn sector_chi(chi_top: i64, corners: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(chi_top)) - BigRational::new(BigInt::from(corners), BigInt::from(4))
}

/// Linear Euler characteristic on coordinate vectors.
///
/// A disk contributes `1 - arcs/2 + sum over its edge points of 1/deg(e)`:
/// itself as a face, half of each boundary arc, and its share of each vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChiFunctional {
    #[serde(serialize_with = "ser_rational_vec")]
    pub coefficients: Vec<BigRational>,
}

impl ChiFunctional {
    pub fn evaluate(&self, v: &NormalVector) -> BigRational {
        self.coefficients
            .iter()
            .zip(v.coords())
            .map(|(c, &x)| c * BigRational::from_integer(BigInt::from(x)))
            .sum()
    }

    pub fn evaluate_int(&self, v: &[BigInt]) -> BigRational {
        self.coefficients
            .iter()
            .zip(v)
            .map(|(c, x)| c * BigRational::from_integer(x.clone()))
            .sum()
    }

    pub fn evaluate_rational(&self, v: &[BigRational]) -> BigRational {
        self.coefficients.iter().zip(v).map(|(c, x)| c * x).sum()
    }

    /// Integer multiple of the functional, usable as a cone equation.
    pub fn as_equation(&self) -> IntVector {
        let lcm = self
            .coefficients
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        self.coefficients
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect()
    }
}

pub fn chi_functional(tri: &Triangulation) -> ChiFunctional {
    let degrees = tri.edge_degrees();
    let mut coefficients = Vec::with_capacity(tri.tet_count() * COORDS_PER_TET);
    for t in 0..tri.tet_count() {
        for disk in DiskType::all() {
            let mut c = BigRational::one()
                - BigRational::new(BigInt::from(disk.arc_count()), BigInt::from(2));
            for (e, &hits) in disk.edge_hits().iter().enumerate() {
                let deg = degrees[tri.edge_class(t, e)];
                c += BigRational::new(BigInt::from(hits), BigInt::from(deg));
            }
            coefficients.push(c);
        }
    }
    ChiFunctional { coefficients }
}

/// Sign of the best Euler characteristic among carried surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    CarriesPositiveChi,
    CarriesZeroChi,
    AllCarriedNegative,
}

/// A carried surface with nonnegative Euler characteristic, plus its double
/// when it is one-sided.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub vector: NormalVector,
    pub chi: i64,
    pub components: Vec<Component>,
    pub double: Option<DoubledWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubledWitness {
    pub vector: NormalVector,
    pub components: Vec<Component>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub verdict: VerdictKind,
    pub max_fundamental_chi: Option<i64>,
    pub witness: Option<Witness>,
}

/// Branched surface given by a support of disk-type sectors.
#[derive(Debug)]
pub struct BranchedSurfaceModel {
    tri: Triangulation,
    support: Vec<usize>,
    cone: RationalCone,
    positive_point: Option<NormalVector>,
    opts: EngineOptions,
    fundamentals: OnceLock<Result<Vec<NormalVector>, PolyhedralError>>,
}

impl Clone for BranchedSurfaceModel {
    fn clone(&self) -> Self {
        BranchedSurfaceModel {
            tri: self.tri.clone(),
            support: self.support.clone(),
            cone: self.cone.clone(),
            positive_point: self.positive_point.clone(),
            opts: self.opts,
            fundamentals: self.fundamentals.clone(),
        }
    }
}

/// Checks the per-tetrahedron and global octagon constraints on a support.
pub fn check_support(tri: &Triangulation, support: &[usize]) -> Result<(), BranchedError> {
    let n = tri.tet_count() * COORDS_PER_TET;
    if let Some(&bad) = support.iter().find(|&&i| i >= n) {
        return Err(BranchedError::InvalidSupport(format!("index {bad} exceeds {}", n - 1)));
    }
    let mut octagons = 0;
    for t in 0..tri.tet_count() {
        let directions: Vec<usize> = support
            .iter()
            .filter(|&&i| i / COORDS_PER_TET == t && i % COORDS_PER_TET >= 4)
            .copied()
            .collect();
        if directions.len() > 1 {
            return Err(BranchedError::InvalidSupport(format!(
                "tetrahedron {t} uses several quad/octagon types {directions:?}"
            )));
        }
        octagons += directions.iter().filter(|&&i| i % COORDS_PER_TET >= 7).count();
    }
    if octagons > 1 {
        return Err(BranchedError::InvalidSupport(format!("{octagons} octagon sectors")));
    }
    Ok(())
}

impl BranchedSurfaceModel {
    pub fn from_support(tri: &Triangulation, support: &[usize]) -> Result<Self, BranchedError> {
        Self::with_options(tri, support, EngineOptions::default())
    }

    pub fn with_options(tri: &Triangulation, support: &[usize], opts: EngineOptions) -> Result<Self, BranchedError> {
        check_support(tri, support)?;
        let mut support = support.to_vec();
        support.sort_unstable();
        support.dedup();
        let cone = matching_cone(tri).with_support(&support);
        let positive_point = if support.is_empty() {
            None
        } else {
            positive_integer_point(&cone, opts)?.map(|p| to_normal(&p))
        };
        Ok(BranchedSurfaceModel {
            tri: tri.clone(),
            support,
            cone,
            positive_point,
            opts,
            fundamentals: OnceLock::new(),
        })
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn cone(&self) -> &RationalCone {
        &self.cone
    }

    /// Whether some carried surface has positive weight on every sector.
    pub fn is_fully_carrying(&self) -> bool {
        self.positive_point.is_some()
    }

    pub fn positive_point(&self) -> Option<&NormalVector> {
        self.positive_point.as_ref()
    }

    pub fn has_octagon_sector(&self) -> bool {
        self.support.iter().any(|&i| i % COORDS_PER_TET >= 7)
    }

    pub fn carries(&self, v: &NormalVector) -> bool {
        let big: IntVector = v.coords().iter().map(|&x| BigInt::from(x)).collect();
        self.cone.contains(&big)
    }

    /// Fully carries `v`: carried and positive on every sector.
    pub fn fully_carries(&self, v: &NormalVector) -> bool {
        self.carries(v) && self.support.iter().all(|&i| v.coords()[i] > 0)
    }

    /// Hilbert basis of the carried cone, computed once.
    pub fn fundamentals(&self) -> Result<&[NormalVector], PolyhedralError> {
        self.fundamentals
            .get_or_init(|| {
                Ok(hilbert_basis(&self.cone, self.opts)?
                    .elements
                    .iter()
                    .map(|v| to_normal(v))
                    .collect())
            })
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    /// Euler characteristic of each fundamental, in the order of [`Self::fundamentals`].
    pub fn fundamental_chis(&self) -> Result<Vec<i64>, PolyhedralError> {
        let chi = chi_functional(&self.tri);
        Ok(self
            .fundamentals()?
            .iter()
            .map(|f| integer(&chi.evaluate(f)))
            .collect())
    }
}

fn integer(x: &BigRational) -> i64 {
    assert!(x.is_integer(), "Euler characteristic of an integer point is integral");
    i64::try_from(x.to_integer()).expect("Euler characteristic fits in i64")
}

/// The model whose sectors are those `v` passes through.
pub fn sub_branched_surface(b: &BranchedSurfaceModel, v: &NormalVector) -> Result<BranchedSurfaceModel, BranchedError> {
    if v.len() != b.tri.tet_count() * COORDS_PER_TET {
        return Err(BranchedError::NotCarried(format!("vector has {} coordinates", v.len())));
    }
    if !b.carries(v) {
        return Err(BranchedError::NotCarried(format!("{v} is outside the carried cone")));
    }
    if v.support() == b.support {
        return Ok(b.clone());
    }
    BranchedSurfaceModel::with_options(&b.tri, &v.support(), b.opts)
}

fn witness(tri: &Triangulation, v: &NormalVector) -> Witness {
    let s = build_surface(tri, v).expect("points of a valid support are embeddable");
    let one_sided = s.components.iter().any(|c| !c.orientable);
    let double = one_sided.then(|| {
        let d = v.scaled(2);
        let ds = build_surface(tri, &d).expect("doubles stay embeddable");
        DoubledWitness {
            vector: d,
            components: ds.components,
        }
    });
    Witness {
        vector: v.clone(),
        chi: s.chi,
        components: s.components,
        double,
    }
}

/// Decides whether `b` carries a surface of positive, zero, or only negative
/// Euler characteristic. The functional is linear and the fundamentals
/// generate every carried surface, so the best fundamental decides.
pub fn carries_nonneg_chi(b: &BranchedSurfaceModel) -> Result<Verdict, PolyhedralError> {
    let fundamentals = b.fundamentals()?;
    let chis = b.fundamental_chis()?;
    let best = chis
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0)))
        .map(|(i, &c)| (i, c));
    let verdict = match best {
        Some((_, c)) if c > 0 => VerdictKind::CarriesPositiveChi,
        Some((_, 0)) => VerdictKind::CarriesZeroChi,
        _ => VerdictKind::AllCarriedNegative,
    };
    let witness = match (verdict, best) {
        (VerdictKind::AllCarriedNegative, _) | (_, None) => None,
        (_, Some((i, c))) => {
            // prefer an orientable witness among the fundamentals of the best value
            let candidates: Vec<&NormalVector> = fundamentals
                .iter()
                .zip(&chis)
                .filter(|(_, &x)| x == c)
                .map(|(f, _)| f)
                .collect();
            let built: Vec<Witness> = candidates.iter().map(|f| witness(&b.tri, f)).collect();
            built
                .iter()
                .find(|w| w.double.is_none())
                .cloned()
                .or_else(|| built.first().cloned())
                .or_else(|| Some(witness(&b.tri, &fundamentals[i])))
        }
    };
    Ok(Verdict {
        verdict,
        max_fundamental_chi: best.map(|(_, c)| c),
        witness,
    })
}

/// Vertices of `{x in cone(b) : sum x = 1, chi(x) = 0}`.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroChiLocus {
    #[serde(serialize_with = "ser_rational_vecs")]
    pub vertices: Vec<Vec<BigRational>>,
}

pub fn zero_chi_cone(b: &BranchedSurfaceModel) -> RationalCone {
    let chi = chi_functional(&b.tri);
    b.cone
        .clone()
        .with_equation(chi.as_equation())
        .expect("functional has one coefficient per coordinate")
}

pub fn zero_chi_locus(b: &BranchedSurfaceModel) -> Result<ZeroChiLocus, PolyhedralError> {
    let rays = extreme_rays(&zero_chi_cone(b), b.opts)?;
    Ok(ZeroChiLocus {
        vertices: rays.rays.iter().map(|r| projectivize(r)).collect(),
    })
}

/// An integer point positive on every sector of `b` with Euler
/// characteristic zero, when the zero locus meets the open cone.
pub fn positive_zero_chi_point(b: &BranchedSurfaceModel) -> Result<Option<NormalVector>, PolyhedralError> {
    if b.support.is_empty() {
        return Ok(None);
    }
    Ok(positive_integer_point(&zero_chi_cone(b), b.opts)?.map(|p| to_normal(&p)))
}

/// Maximum of the Euler characteristic on the projective slice of `b`.
#[derive(Debug, Clone, Serialize)]
pub struct ChiOptimum {
    #[serde(serialize_with = "ser_rational")]
    pub value: BigRational,
    #[serde(serialize_with = "ser_rational_vec")]
    pub witness: Vec<BigRational>,
}

pub fn max_projective_chi(b: &BranchedSurfaceModel) -> Result<ChiOptimum, PolyhedralError> {
    let chi = chi_functional(&b.tri);
    let opt = crate::polyhedral::maximize_linear(&b.cone, &chi.coefficients, b.opts)?;
    Ok(ChiOptimum {
        value: opt.value,
        witness: opt.witness,
    })
}
