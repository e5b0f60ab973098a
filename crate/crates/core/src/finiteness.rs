//! Fixed-genus enumeration of carried connected orientable surfaces and the
//! antichain certificate.
//!
//! Every carried surface is a sum `sum n_i F_i` of fundamentals. When every
//! `F_i` has negative Euler characteristic, a genus-`g` surface satisfies
//! `sum n_i |chi(F_i)| = 2g - 2`, which bounds each multiplicity.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::branched::{carries_nonneg_chi, chi_functional, BranchedSurfaceModel, VerdictKind};
use crate::normal::{matching_system, NormalVector};
use crate::polyhedral::PolyhedralError;
use crate::surface::build_surface;
use crate::triangulation::Triangulation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinitenessError {
    #[error("the model carries a surface with Euler characteristic {max_chi} >= 0; the genus-{genus} set may be infinite")]
    UnboundedRefusal { genus: i64, max_chi: i64 },
    #[error("genus must be nonnegative, got {0}")]
    GenusTooSmall(i64),
    #[error(transparent)]
    Polyhedral(#[from] PolyhedralError),
}

impl FinitenessError {
    pub fn kind(&self) -> &'static str {
        match self {
            FinitenessError::UnboundedRefusal { .. } => "UnboundedRefusal",
            FinitenessError::GenusTooSmall(_) => "GenusTooSmall",
            FinitenessError::Polyhedral(e) => e.kind(),
        }
    }
}

/// Connected orientable genus-`g` surfaces carried by a model.
#[derive(Debug, Clone, Serialize)]
pub struct GenusEnumeration {
    pub genus: i64,
    pub support: Vec<usize>,
    pub octagon_sector: bool,
    pub fundamentals: Vec<NormalVector>,
    pub fundamental_chis: Vec<i64>,
    /// Largest multiplicity tried for each fundamental.
    pub multiplicity_bounds: Vec<u64>,
    /// False when produced by [`enumerate_genus_bounded`], whose list need not be complete.
    pub complete: bool,
    pub count: usize,
    pub vectors: Vec<NormalVector>,
    /// Lexicographically least multiplicity tuple for each vector.
    pub decompositions: Vec<Vec<u64>>,
    #[serde(skip)]
    tri: Triangulation,
}

impl GenusEnumeration {
    /// A bare list of vectors, for certificates over externally produced lists.
    pub fn from_vectors(tri: &Triangulation, genus: i64, vectors: Vec<NormalVector>) -> Self {
        GenusEnumeration {
            genus,
            support: Vec::new(),
            octagon_sector: false,
            fundamentals: Vec::new(),
            fundamental_chis: Vec::new(),
            multiplicity_bounds: Vec::new(),
            complete: false,
            count: vectors.len(),
            decompositions: Vec::new(),
            vectors,
            tri: tri.clone(),
        }
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }
}

/// Lists every connected orientable genus-`g` surface carried by `b`, with
/// octagon weight exactly one when `b` has an octagon sector. Refuses when `b`
/// carries a surface of nonnegative Euler characteristic.
pub fn enumerate_genus(b: &BranchedSurfaceModel, g: i64) -> Result<GenusEnumeration, FinitenessError> {
    if g < 0 {
        return Err(FinitenessError::GenusTooSmall(g));
    }
    let verdict = carries_nonneg_chi(b)?;
    if verdict.verdict != VerdictKind::AllCarriedNegative {
        return Err(FinitenessError::UnboundedRefusal {
            genus: g,
            max_chi: verdict.max_fundamental_chi.unwrap_or(0),
        });
    }
    let chis = b.fundamental_chis()?;
    let target = 2 * g - 2;
    let bounds: Vec<u64> = chis
        .iter()
        .map(|&c| if target <= 0 { 0 } else { (target / -c) as u64 })
        .collect();
    let tuples = if target <= 0 {
        Vec::new()
    } else {
        exact_tuples(&chis, target, &bounds)
    };
    finish(b, g, chis, bounds, tuples, true)
}

/// Same filter as [`enumerate_genus`] without the verdict precondition:
/// multiplicities are capped at `max_multiplicity`, so the list may be
/// incomplete. Used to exercise the antichain failure path.
pub fn enumerate_genus_bounded(
    b: &BranchedSurfaceModel,
    g: i64,
    max_multiplicity: u64,
) -> Result<GenusEnumeration, FinitenessError> {
    if g < 0 {
        return Err(FinitenessError::GenusTooSmall(g));
    }
    let chis = b.fundamental_chis()?;
    let bounds = vec![max_multiplicity; chis.len()];
    let tuples = bounded_tuples(&chis, 2 - 2 * g, max_multiplicity);
    finish(b, g, chis, bounds, tuples, false)
}

/// Tuples with `sum n_i |chi_i| = target`, all `chi_i < 0`, `n_i <= bounds[i]`.
fn exact_tuples(chis: &[i64], target: i64, bounds: &[u64]) -> Vec<Vec<u64>> {
    fn rec(chis: &[i64], bounds: &[u64], i: usize, rest: i64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == chis.len() {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let cost = -chis[i];
        let max = bounds[i].min((rest / cost) as u64);
        for n in 0..=max {
            cur.push(n);
            rec(chis, bounds, i + 1, rest - n as i64 * cost, cur, out);
            cur.pop();
        }
    }
    if chis.is_empty() {
        return Vec::new();
    }
    let cost = -chis[0];
    (0..=bounds[0].min((target / cost) as u64))
        .into_par_iter()
        .flat_map_iter(|n| {
            let mut out = Vec::new();
            let mut cur = vec![n];
            rec(chis, bounds, 1, target - n as i64 * cost, &mut cur, &mut out);
            out
        })
        .collect()
}

/// Tuples with `sum n_i chi_i = total` and every `n_i <= cap`, excluding zero.
fn bounded_tuples(chis: &[i64], total: i64, cap: u64) -> Vec<Vec<u64>> {
    let cap_i = cap as i64;
    // reachable range of the remaining suffix
    let mut hi = vec![0i64; chis.len() + 1];
    let mut lo = vec![0i64; chis.len() + 1];
    for i in (0..chis.len()).rev() {
        hi[i] = hi[i + 1] + (chis[i] * cap_i).max(0);
        lo[i] = lo[i + 1] + (chis[i] * cap_i).min(0);
    }
    fn rec(
        chis: &[i64],
        cap: u64,
        lo: &[i64],
        hi: &[i64],
        i: usize,
        rest: i64,
        cur: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if rest < lo[i] || rest > hi[i] {
            return;
        }
        if i == chis.len() {
            if cur.iter().any(|&n| n > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for n in 0..=cap {
            cur.push(n);
            rec(chis, cap, lo, hi, i + 1, rest - n as i64 * chis[i], cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(chis, cap, &lo, &hi, 0, total, &mut Vec::new(), &mut out);
    out
}

fn finish(
    b: &BranchedSurfaceModel,
    g: i64,
    chis: Vec<i64>,
    bounds: Vec<u64>,
    tuples: Vec<Vec<u64>>,
    complete: bool,
) -> Result<GenusEnumeration, FinitenessError> {
    let fundamentals = b.fundamentals()?.to_vec();
    let tri = b.triangulation();
    let octagon_sector = b.has_octagon_sector();
    let accepted: Vec<(NormalVector, Vec<u64>)> = tuples
        .into_par_iter()
        .filter_map(|tuple| {
            let mut v = NormalVector::zero(tri.tet_count());
            for (f, &n) in fundamentals.iter().zip(&tuple) {
                if n > 0 {
                    v = v.plus(&f.scaled(n));
                }
            }
            accepts(tri, &v, g, octagon_sector).then_some((v, tuple))
        })
        .collect();
    let mut best: BTreeMap<NormalVector, Vec<u64>> = BTreeMap::new();
    for (v, tuple) in accepted {
        best.entry(v)
            .and_modify(|t| {
                if tuple < *t {
                    *t = tuple.clone();
                }
            })
            .or_insert(tuple);
    }
    let (vectors, decompositions): (Vec<_>, Vec<_>) = best.into_iter().unzip();
    Ok(GenusEnumeration {
        genus: g,
        support: b.support().to_vec(),
        octagon_sector,
        fundamentals,
        fundamental_chis: chis,
        multiplicity_bounds: bounds,
        complete,
        count: vectors.len(),
        vectors,
        decompositions,
        tri: tri.clone(),
    })
}

/// The shared filter: nonzero, octagon weight one exactly when the model has
/// an octagon sector, connected, orientable, genus `g`.
pub fn accepts(tri: &Triangulation, v: &NormalVector, g: i64, octagon_sector: bool) -> bool {
    if v.is_zero() || v.octagon_weight() != u64::from(octagon_sector) {
        return false;
    }
    let Ok(s) = build_surface(tri, v) else {
        return false;
    };
    s.components.len() == 1 && s.components[0].orientable && s.chi == 2 - 2 * g
}

/// Two comparable listed surfaces and their difference.
#[derive(Debug, Clone, Serialize)]
pub struct ComparablePair {
    pub smaller: NormalVector,
    pub larger: NormalVector,
    pub difference: NormalVector,
    pub difference_chi: i64,
    /// Whether the difference satisfies the matching equations (it is
    /// nonnegative by construction; the quad constraint is not required).
    pub difference_matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AntichainCertificate {
    pub antichain: bool,
    pub counterexample: Option<ComparablePair>,
}

/// Checks that no two listed vectors are componentwise comparable.
pub fn antichain_certificate(e: &GenusEnumeration) -> AntichainCertificate {
    for (i, a) in e.vectors.iter().enumerate() {
        for (j, b) in e.vectors.iter().enumerate() {
            if i == j || !a.dominated_by(b) {
                continue;
            }
            let difference = b.checked_minus(a).expect("dominated");
            let chi = chi_functional(&e.tri).evaluate(&difference);
            let difference_matches = matching_system(&e.tri).residual(&difference).iter().all(|&r| r == 0);
            let difference_chi = i64::try_from(chi.to_integer()).expect("small Euler characteristic");
            return AntichainCertificate {
                antichain: false,
                counterexample: Some(ComparablePair {
                    smaller: a.clone(),
                    larger: b.clone(),
                    difference,
                    difference_chi,
                    difference_matches,
                }),
            };
        }
    }
    AntichainCertificate {
        antichain: true,
        counterexample: None,
    }
}
