//! Vertex and fundamental surfaces: the matching cone is cut into its
//! quad-orthant faces, each solved separately, and the results merged.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::normal::{matching_system, COORDS_PER_TET, orthant_support, quad_orthants, NormalVector};
use crate::polyhedral::{extreme_rays, hilbert_basis, EngineOptions, IntVector, PolyhedralError, RationalCone};
use crate::surface::{build_surface, is_vertex_linking};
use crate::triangulation::Triangulation;

/// Matching equations of `tri` as a cone over all coordinates.
pub fn matching_cone(tri: &Triangulation) -> RationalCone {
    let system = matching_system(tri);
    RationalCone::from_i64(tri.tet_count() * COORDS_PER_TET, &system.matrix)
        .expect("matching rows have one entry per coordinate")
}

pub(crate) fn to_normal(v: &[BigInt]) -> NormalVector {
    NormalVector::new(
        v.iter()
            .map(|x| x.to_u64().expect("cone points are nonnegative and fit in u64"))
            .collect(),
    )
}

fn solve_orthants<F>(tri: &Triangulation, octagons: bool, solve: F) -> Result<Vec<NormalVector>, PolyhedralError>
where
    F: Fn(&RationalCone) -> Result<Vec<IntVector>, PolyhedralError> + Sync,
{
    let cone = matching_cone(tri);
    let per_orthant: Vec<Vec<NormalVector>> = quad_orthants(tri.tet_count(), octagons)
        .par_iter()
        .map(|choices| {
            let restricted = cone.clone().with_support(&orthant_support(choices));
            Ok(solve(&restricted)?
                .iter()
                .map(|v| to_normal(v))
                .filter(|v| v.octagon_weight() <= 1)
                .collect())
        })
        .collect::<Result<_, PolyhedralError>>()?;
    let mut all: Vec<NormalVector> = per_orthant.into_iter().flatten().collect();
    all.sort_by(|a, b| b.cmp(a));
    all.dedup();
    Ok(all)
}

/// Admissible primitive extreme rays (vertex surfaces). With `octagons`, rays
/// carrying an octagon of weight above one are dropped.
pub fn vertex_solutions(
    tri: &Triangulation,
    octagons: bool,
    opts: EngineOptions,
) -> Result<Vec<NormalVector>, PolyhedralError> {
    solve_orthants(tri, octagons, |c| Ok(extreme_rays(c, opts)?.rays))
}

/// Admissible Hilbert basis elements (fundamental surfaces), same octagon rule.
pub fn fundamental_solutions(
    tri: &Triangulation,
    octagons: bool,
    opts: EngineOptions,
) -> Result<Vec<NormalVector>, PolyhedralError> {
    solve_orthants(tri, octagons, |c| Ok(hilbert_basis(c, opts)?.elements))
}

/// Normal 2-spheres among the fundamental surfaces that are not vertex links.
#[derive(Debug, Clone, Serialize)]
pub struct SphereCertificate {
    pub fundamentals_checked: usize,
    pub nonlinking_spheres: Vec<NormalVector>,
    pub only_vertex_links: bool,
}

pub fn sphere_certificate(tri: &Triangulation, opts: EngineOptions) -> Result<SphereCertificate, PolyhedralError> {
    let fundamentals = fundamental_solutions(tri, false, opts)?;
    let nonlinking_spheres: Vec<NormalVector> = fundamentals
        .iter()
        .filter(|v| !is_vertex_linking(tri, v))
        .filter(|v| {
            let s = build_surface(tri, v).expect("orthant points are admissible");
            s.components.iter().any(|c| c.chi == 2)
        })
        .cloned()
        .collect();
    Ok(SphereCertificate {
        fundamentals_checked: fundamentals.len(),
        only_vertex_links: nonlinking_spheres.is_empty(),
        nonlinking_spheres,
    })
}
