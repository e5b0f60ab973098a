//! Normal and almost-normal disk coordinates, matching equations and admissibility.
//!
//! Each tetrahedron owns ten coordinates in the fixed order
//! `tri[0..4], quad[0..3], oct[0..3]`, tetrahedra in index order.
//!
//! - `tri[v]` cuts off vertex `v`;
//! - `quad[k]` separates the vertex pair `{0, k+1}` from the complementary pair,
//!   i.e. it misses the opposite edges `0(k+1)` and its complement;
//! - `oct[k]` meets those same two opposite edges twice each and the other four
//!   edges once each. In every face it leaves two arcs, one at each end of the
//!   doubly-hit edge lying in that face.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::triangulation::{face_vertices, Triangulation, EDGE_VERTICES};

pub const COORDS_PER_TET: usize = 10;
pub const NORMAL_COORDS_PER_TET: usize = 7;

/// Kind of disk in a tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiskType {
    Triangle(u8),
    Quad(u8),
    Octagon(u8),
}

impl DiskType {
    /// Position inside a tetrahedron's block of coordinates.
    pub fn slot(self) -> usize {
        match self {
            DiskType::Triangle(v) => v as usize,
            DiskType::Quad(k) => 4 + k as usize,
            DiskType::Octagon(k) => 7 + k as usize,
        }
    }

    pub fn from_slot(slot: usize) -> DiskType {
        match slot {
            0..=3 => DiskType::Triangle(slot as u8),
            4..=6 => DiskType::Quad((slot - 4) as u8),
            7..=9 => DiskType::Octagon((slot - 7) as u8),
            _ => panic!("slot {slot} out of range"),
        }
    }

    pub fn all() -> impl Iterator<Item = DiskType> {
        (0..COORDS_PER_TET).map(DiskType::from_slot)
    }

    /// The two vertex sides of the disk; the first side contains vertex 0 for
    /// quads and octagons, and is `{v}` for the triangle at `v`.
    pub fn sides(self) -> ([bool; 4], [bool; 4]) {
        let mut first = [false; 4];
        match self {
            DiskType::Triangle(v) => first[v as usize] = true,
            DiskType::Quad(k) | DiskType::Octagon(k) => {
                first[0] = true;
                first[k as usize + 1] = true;
            }
        }
        let second = [!first[0], !first[1], !first[2], !first[3]];
        (first, second)
    }

    /// Corners (vertices of the face) at which the disk leaves a normal arc in face `f`.
    pub fn arcs_in_face(self, f: usize) -> Vec<usize> {
        match self {
            DiskType::Triangle(v) => {
                if v as usize == f {
                    vec![]
                } else {
                    vec![v as usize]
                }
            }
            DiskType::Quad(_) => {
                let (side, _) = self.sides();
                // partner of f on its own side
                let partner = (0..4)
                    .find(|&u| u != f && side[u] == side[f])
                    .expect("pair has two vertices");
                vec![partner]
            }
            DiskType::Octagon(_) => {
                let (side, _) = self.sides();
                // the doubly-hit edge in face f joins the two vertices on the other side
                let mut out: Vec<usize> = (0..4).filter(|&u| side[u] != side[f]).collect();
                out.sort_unstable();
                out
            }
        }
    }

    /// Number of boundary arcs of the disk.
    pub fn arc_count(self) -> usize {
        match self {
            DiskType::Triangle(_) => 3,
            DiskType::Quad(_) => 4,
            DiskType::Octagon(_) => 8,
        }
    }

    /// Number of points in which the disk meets each tetrahedron edge.
    pub fn edge_hits(self) -> [u32; 6] {
        let mut out = [0; 6];
        let (side, _) = self.sides();
        for (e, &(a, b)) in EDGE_VERTICES.iter().enumerate() {
            out[e] = match self {
                DiskType::Triangle(v) => u32::from(a == v as usize || b == v as usize),
                DiskType::Quad(_) => u32::from(side[a] != side[b]),
                DiskType::Octagon(_) => {
                    if side[a] == side[b] {
                        2
                    } else {
                        1
                    }
                }
            };
        }
        out
    }
}

/// Per-tetrahedron quad/octagon direction selection (one quad-orthant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum QuadChoice {
    None,
    Quad(u8),
    Octagon(u8),
}

/// Coordinate vector of a (possibly almost) normal surface.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NormalVector(Vec<u64>);

impl NormalVector {
    pub fn new(coords: Vec<u64>) -> Self {
        NormalVector(coords)
    }

    pub fn zero(tet_count: usize) -> Self {
        NormalVector(vec![0; tet_count * COORDS_PER_TET])
    }

    /// Accepts either 10 or 7 coordinates per tetrahedron (the latter with no
    /// octagon coordinates).
    pub fn from_coords(tet_count: usize, coords: &[u64]) -> Result<Self, String> {
        if coords.len() == tet_count * COORDS_PER_TET {
            Ok(NormalVector(coords.to_vec()))
        } else if coords.len() == tet_count * NORMAL_COORDS_PER_TET {
            let mut out = Vec::with_capacity(tet_count * COORDS_PER_TET);
            for chunk in coords.chunks(NORMAL_COORDS_PER_TET) {
                out.extend_from_slice(chunk);
                out.extend_from_slice(&[0, 0, 0]);
            }
            Ok(NormalVector(out))
        } else {
            Err(format!(
                "expected {} or {} coordinates for {} tetrahedra, found {}",
                tet_count * COORDS_PER_TET,
                tet_count * NORMAL_COORDS_PER_TET,
                tet_count,
                coords.len()
            ))
        }
    }

    /// Parses comma-separated integers.
    pub fn parse(tet_count: usize, text: &str) -> Result<Self, String> {
        let coords = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| format!("bad coordinate {:?}", s.trim()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_coords(tet_count, &coords)
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tet_count(&self) -> usize {
        self.0.len() / COORDS_PER_TET
    }

    pub fn get(&self, tet: usize, disk: DiskType) -> u64 {
        self.0[tet * COORDS_PER_TET + disk.slot()]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Indices of the nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn scaled(&self, k: u64) -> NormalVector {
        NormalVector(self.0.iter().map(|&x| x * k).collect())
    }

    /// Coordinatewise sum.
    pub fn plus(&self, other: &NormalVector) -> NormalVector {
        assert_eq!(self.len(), other.len(), "vectors of different length");
        NormalVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Coordinatewise difference, `None` when some coordinate would go negative.
    pub fn checked_minus(&self, other: &NormalVector) -> Option<NormalVector> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(NormalVector)
    }

    /// `self <= other` in every coordinate.
    pub fn dominated_by(&self, other: &NormalVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Quad/octagon direction used in each tetrahedron, or `None` if some
    /// tetrahedron uses two.
    pub fn quad_choices(&self) -> Option<Vec<QuadChoice>> {
        (0..self.tet_count())
            .map(|t| {
                let mut choice = QuadChoice::None;
                for slot in 4..COORDS_PER_TET {
                    if self.0[t * COORDS_PER_TET + slot] != 0 {
                        if choice != QuadChoice::None {
                            return None;
                        }
                        choice = match DiskType::from_slot(slot) {
                            DiskType::Quad(k) => QuadChoice::Quad(k),
                            DiskType::Octagon(k) => QuadChoice::Octagon(k),
                            DiskType::Triangle(_) => unreachable!(),
                        };
                    }
                }
                Some(choice)
            })
            .collect()
    }

    /// Total octagon weight.
    pub fn octagon_weight(&self) -> u64 {
        (0..self.tet_count())
            .map(|t| (7..10).map(|s| self.0[t * COORDS_PER_TET + s]).sum::<u64>())
            .sum()
    }
}

impl fmt::Display for NormalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// One matching equation: face class and arc type (identified by its corner on side 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchingRow {
    pub face_class: usize,
    pub tet: usize,
    pub face: usize,
    pub corner: usize,
}

/// Normal-arc matching equations: one row per (face class, arc type).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchingSystem {
    pub rows: Vec<MatchingRow>,
    pub matrix: Vec<Vec<i64>>,
}

impl MatchingSystem {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    /// Residual of every equation at `v`.
    pub fn residual(&self, v: &NormalVector) -> Vec<i64> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v.coords())
                    .map(|(&a, &x)| a * x as i64)
                    .sum()
            })
            .collect()
    }
}

/// Builds the matching equations of `tri`.
pub fn matching_system(tri: &Triangulation) -> MatchingSystem {
    let n = tri.tet_count() * COORDS_PER_TET;
    let mut rows = Vec::new();
    let mut matrix = Vec::new();
    for (class, ((t, f), (t2, f2))) in tri.face_pairs().into_iter().enumerate() {
        let perm = tri.gluing(t, f).perm;
        for corner in face_vertices(f) {
            let mut row = vec![0i64; n];
            let image = perm.apply(corner);
            for disk in DiskType::all() {
                if disk.arcs_in_face(f).contains(&corner) {
                    row[t * COORDS_PER_TET + disk.slot()] += 1;
                }
                if disk.arcs_in_face(f2).contains(&image) {
                    row[t2 * COORDS_PER_TET + disk.slot()] -= 1;
                }
            }
            rows.push(MatchingRow {
                face_class: class,
                tet: t,
                face: f,
                corner,
            });
            matrix.push(row);
        }
    }
    MatchingSystem { rows, matrix }
}

/// Why a vector is not admissible.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Indices of matching rows with nonzero residual.
    pub failed_equations: Vec<usize>,
    /// Tetrahedra using more than one quad/octagon direction.
    pub quad_violations: Vec<usize>,
    /// Set when more than one octagon is present or an octagon weight exceeds 1.
    pub octagon_violation: Option<String>,
    pub wrong_length: bool,
}

/// Checks matching equations, the quad/octagon constraint and the
/// almost-normal constraint.
pub fn is_admissible(tri: &Triangulation, v: &NormalVector) -> AdmissibilityReport {
    let mut report = AdmissibilityReport::default();
    if v.len() != tri.tet_count() * COORDS_PER_TET {
        report.wrong_length = true;
        return report;
    }
    let system = matching_system(tri);
    report.failed_equations = system
        .residual(v)
        .iter()
        .enumerate()
        .filter(|(_, &r)| r != 0)
        .map(|(i, _)| i)
        .collect();
    for t in 0..tri.tet_count() {
        let used = (4..COORDS_PER_TET)
            .filter(|&s| v.coords()[t * COORDS_PER_TET + s] != 0)
            .count();
        if used > 1 {
            report.quad_violations.push(t);
        }
    }
    let oct_slots: Vec<(usize, u64)> = (0..tri.tet_count())
        .flat_map(|t| (7..10).map(move |s| t * COORDS_PER_TET + s))
        .filter_map(|i| (v.coords()[i] != 0).then(|| (i, v.coords()[i])))
        .collect();
    if oct_slots.len() > 1 {
        report.octagon_violation = Some(format!("{} octagon coordinates are nonzero", oct_slots.len()));
    } else if let Some(&(i, w)) = oct_slots.first() {
        if w > 1 {
            report.octagon_violation = Some(format!("octagon coordinate {i} has weight {w}"));
        }
    }
    report.admissible = report.failed_equations.is_empty()
        && report.quad_violations.is_empty()
        && report.octagon_violation.is_none();
    report
}

/// Number of points on each edge class.
pub fn edge_weights(tri: &Triangulation, v: &NormalVector) -> Vec<u64> {
    (0..tri.edge_count())
        .map(|class| {
            let emb = tri.edge_embeddings(class)[0];
            tet_edge_weight(v, emb.tet, emb.edge)
        })
        .collect()
}

/// Number of points of `v` on edge `edge` of tetrahedron `tet`.
pub fn tet_edge_weight(v: &NormalVector, tet: usize, edge: usize) -> u64 {
    DiskType::all()
        .map(|d| u64::from(d.edge_hits()[edge]) * v.get(tet, d))
        .sum()
}

/// Number of intersections with the 1-skeleton.
pub fn weight(tri: &Triangulation, v: &NormalVector) -> u64 {
    edge_weights(tri, v).iter().sum()
}

/// All quad-orthants: each tetrahedron picks no direction, one quad type, or
/// (in at most one tetrahedron, when `octagons` is set) one octagon type.
pub fn quad_orthants(tet_count: usize, octagons: bool) -> Vec<Vec<QuadChoice>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(tet_count);
    fn rec(
        tet_count: usize,
        octagons: bool,
        oct_used: bool,
        current: &mut Vec<QuadChoice>,
        out: &mut Vec<Vec<QuadChoice>>,
    ) {
        if current.len() == tet_count {
            out.push(current.clone());
            return;
        }
        let mut options = vec![QuadChoice::None];
        options.extend((0..3).map(QuadChoice::Quad));
        if octagons && !oct_used {
            options.extend((0..3).map(QuadChoice::Octagon));
        }
        for choice in options {
            current.push(choice);
            let used = oct_used || matches!(choice, QuadChoice::Octagon(_));
            rec(tet_count, octagons, used, current, out);
            current.pop();
        }
    }
    rec(tet_count, octagons, false, &mut current, &mut out);
    out
}

/// Coordinate indices allowed in a quad-orthant: all triangles plus the chosen direction.
pub fn orthant_support(choices: &[QuadChoice]) -> Vec<usize> {
    let mut support = Vec::new();
    for (t, choice) in choices.iter().enumerate() {
        let base = t * COORDS_PER_TET;
        support.extend(base..base + 4);
        match *choice {
            QuadChoice::None => {}
            QuadChoice::Quad(k) => support.push(base + 4 + k as usize),
            QuadChoice::Octagon(k) => support.push(base + 7 + k as usize),
        }
    }
    support
}

/// The vector with every triangle coordinate at the corners of `vertex_class` set to 1.
pub fn vertex_link(tri: &Triangulation, vertex_class: usize) -> NormalVector {
    let mut v = NormalVector::zero(tri.tet_count());
    for t in 0..tri.tet_count() {
        for corner in 0..4 {
            if tri.vertex_class(t, corner) == vertex_class {
                v.0[t * COORDS_PER_TET + corner] = 1;
            }
        }
    }
    v
}

/// Sum of all vertex links: every triangle coordinate 1.
pub fn all_vertex_links(tri: &Triangulation) -> NormalVector {
    let mut v = NormalVector::zero(tri.tet_count());
    for t in 0..tri.tet_count() {
        for corner in 0..4 {
            v.0[t * COORDS_PER_TET + corner] = 1;
        }
    }
    v
}
