//! Reassembly of the surface of an admissible vector from its normal disks.
//!
//! Disks of one type in a tetrahedron are parallel copies, indexed `0..n` from
//! the side containing the lowest vertex label of the disk's first side (vertex
//! `v` for the triangle at `v`, vertex 0 for quads and octagons). In each face,
//! the arcs at a corner are stacked outward from that corner: triangle copies
//! first, then the copies of the single quad or octagon type reaching it.

use serde::Serialize;
use thiserror::Error;

use crate::normal::{is_admissible, tet_edge_weight, DiskType, NormalVector, COORDS_PER_TET};
use crate::triangulation::{edge_index, face_vertices, Triangulation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("vector is not admissible: {0}")]
    Inadmissible(String),
    #[error("sum uses two quad/octagon directions in tetrahedra {0:?}")]
    IncompatibleQuads(Vec<usize>),
}

impl SurfaceError {
    pub fn kind(&self) -> &'static str {
        match self {
            SurfaceError::Inadmissible(_) => "Inadmissible",
            SurfaceError::IncompatibleQuads(_) => "IncompatibleQuads",
        }
    }
}

/// One connected component of a built surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub chi: i64,
    pub orientable: bool,
    /// Genus when orientable, number of crosscaps otherwise.
    pub genus_or_crosscap: u64,
    pub disk_count: usize,
}

/// A disk copy: tetrahedron, type and index among its parallel copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Disk {
    pub tet: usize,
    pub kind: DiskType,
    pub copy: u64,
}

/// Cell complex of an admissible vector.
#[derive(Debug, Clone, Serialize)]
pub struct NormalSurface {
    pub vector: NormalVector,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub chi: i64,
    pub components: Vec<Component>,
    #[serde(skip)]
    disks: Vec<Disk>,
    /// Disk adjacencies across glued arcs with the transverse-orientation parity
    /// (`true` when the two first-side orientations disagree).
    #[serde(skip)]
    adjacency: Vec<(usize, usize, bool)>,
    #[serde(skip)]
    disk_component: Vec<usize>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Keeps the smaller root so roots are the smallest member.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Rank of copy `copy` of `kind` counted outward from `corner`.
fn rank_from_corner(kind: DiskType, copies: u64, copy: u64, corner: usize) -> u64 {
    let (first, _) = kind.sides();
    if first[corner] {
        copy
    } else {
        copies - 1 - copy
    }
}

/// Builds the cell complex of `v`. Octagon weights above one and several
/// octagons are accepted, since such vectors still describe embedded surfaces.
pub fn build_surface(tri: &Triangulation, v: &NormalVector) -> Result<NormalSurface, SurfaceError> {
    let report = is_admissible(tri, v);
    if report.wrong_length {
        return Err(SurfaceError::Inadmissible(format!(
            "expected {} coordinates, got {}",
            tri.tet_count() * COORDS_PER_TET,
            v.len()
        )));
    }
    if !report.failed_equations.is_empty() {
        return Err(SurfaceError::Inadmissible(format!(
            "matching equations {:?} fail",
            report.failed_equations
        )));
    }
    if !report.quad_violations.is_empty() {
        return Err(SurfaceError::Inadmissible(format!(
            "tetrahedra {:?} use two quad/octagon directions",
            report.quad_violations
        )));
    }
    let n = tri.tet_count();

    // disks
    let mut disks = Vec::new();
    let mut disk_base = vec![[0usize; COORDS_PER_TET]; n];
    for (t, base) in disk_base.iter_mut().enumerate() {
        for kind in DiskType::all() {
            base[kind.slot()] = disks.len();
            for copy in 0..v.get(t, kind) {
                disks.push(Disk { tet: t, kind, copy });
            }
        }
    }

    // edge points, indexed per tetrahedron edge from the lower vertex
    let mut point_base = vec![[0usize; 6]; n];
    let mut point_count = 0;
    for (t, base) in point_base.iter_mut().enumerate() {
        for (e, slot) in base.iter_mut().enumerate() {
            *slot = point_count;
            point_count += tet_edge_weight(v, t, e) as usize;
        }
    }
    let point_index = |t: usize, from: usize, to: usize, pos: u64| -> usize {
        let e = edge_index(from, to);
        let len = tet_edge_weight(v, t, e);
        let p = if from < to { pos } else { len - 1 - pos };
        point_base[t][e] + p as usize
    };

    // arc stacks: stacks[t][f][corner] lists disk ids outward from the corner
    let mut stacks: Vec<[[Vec<usize>; 4]; 4]> = vec![Default::default(); n];
    let mut point_disk = vec![usize::MAX; point_count];
    let mut arc_total = 0usize;
    for t in 0..n {
        for f in 0..4 {
            for corner in face_vertices(f) {
                let mut stack: Vec<usize> = Vec::new();
                let tri_copies = v.get(t, DiskType::Triangle(corner as u8));
                stack.extend((0..tri_copies).map(|c| disk_base[t][corner] + c as usize));
                for kind in DiskType::all().filter(|k| !matches!(k, DiskType::Triangle(_))) {
                    let copies = v.get(t, kind);
                    if copies == 0 || !kind.arcs_in_face(f).contains(&corner) {
                        continue;
                    }
                    let mut layer: Vec<(u64, usize)> = (0..copies)
                        .map(|c| {
                            (
                                rank_from_corner(kind, copies, c, corner),
                                disk_base[t][kind.slot()] + c as usize,
                            )
                        })
                        .collect();
                    layer.sort_unstable();
                    stack.extend(layer.into_iter().map(|(_, d)| d));
                }
                for (pos, &d) in stack.iter().enumerate() {
                    for other in face_vertices(f).into_iter().filter(|&x| x != corner) {
                        point_disk[point_index(t, corner, other, pos as u64)] = d;
                    }
                }
                arc_total += stack.len();
                stacks[t][f][corner] = stack;
            }
        }
    }
    debug_assert!(point_disk.iter().all(|&d| d != usize::MAX));

    // glue arcs and edge points across face pairs
    let mut disk_uf = UnionFind::new(disks.len());
    let mut point_uf = UnionFind::new(point_count);
    let mut adjacency = Vec::new();
    for ((t, f), (t2, f2)) in tri.face_pairs() {
        let perm = tri.gluing(t, f).perm;
        for corner in face_vertices(f) {
            let image = perm.apply(corner);
            let (s1, s2) = (&stacks[t][f][corner], &stacks[t2][f2][image]);
            debug_assert_eq!(s1.len(), s2.len(), "matching equations guarantee equal stacks");
            for (&d1, &d2) in s1.iter().zip(s2) {
                disk_uf.union(d1, d2);
                let flag1 = disks[d1].kind.sides().0[corner];
                let flag2 = disks[d2].kind.sides().0[image];
                adjacency.push((d1, d2, flag1 != flag2));
            }
        }
        for (i, a) in face_vertices(f).into_iter().enumerate() {
            for b in face_vertices(f).into_iter().skip(i + 1) {
                let (a2, b2) = (perm.apply(a), perm.apply(b));
                let len = tet_edge_weight(v, t, edge_index(a, b));
                for pos in 0..len {
                    point_uf.union(point_index(t, a, b, pos), point_index(t2, a2, b2, pos));
                }
            }
        }
    }

    if cfg!(debug_assertions) {
        let degrees = tri.edge_degrees();
        let mut class_size = vec![0usize; point_count];
        for p in 0..point_count {
            class_size[point_uf.find(p)] += 1;
        }
        for t in 0..n {
            for e in 0..6 {
                for p in point_base[t][e]..point_base[t][e] + tet_edge_weight(v, t, e) as usize {
                    debug_assert_eq!(class_size[point_uf.find(p)], degrees[tri.edge_class(t, e)]);
                }
            }
        }
    }

    let disk_component: Vec<usize> = (0..disks.len()).map(|d| disk_uf.find(d)).collect();
    let mut roots: Vec<usize> = disk_component.clone();
    roots.sort_unstable();
    roots.dedup();
    let component_of = |d: usize| roots.binary_search(&disk_component[d]).expect("root listed");

    let mut faces = vec![0i64; roots.len()];
    for d in 0..disks.len() {
        faces[component_of(d)] += 1;
    }
    let mut arcs = vec![0i64; roots.len()];
    for d in 0..disks.len() {
        arcs[component_of(d)] += disks[d].kind.arc_count() as i64;
    }
    let mut verts = vec![0i64; roots.len()];
    let mut vertex_total = 0;
    for p in 0..point_count {
        if point_uf.find(p) == p {
            verts[component_of(point_disk[p])] += 1;
            vertex_total += 1;
        }
    }

    let mut surface = NormalSurface {
        vector: v.clone(),
        vertices: vertex_total,
        edges: arc_total / 2,
        faces: disks.len(),
        chi: vertex_total as i64 - (arc_total / 2) as i64 + disks.len() as i64,
        components: Vec::new(),
        disks,
        adjacency,
        disk_component: disk_component.iter().map(|&r| roots.binary_search(&r).unwrap()).collect(),
    };
    let (_, orientable) = surface.transverse_orientation(false);
    surface.components = (0..roots.len())
        .map(|c| {
            let chi = verts[c] - arcs[c] / 2 + faces[c];
            Component {
                chi,
                orientable: orientable[c],
                genus_or_crosscap: if orientable[c] {
                    ((2 - chi) / 2) as u64
                } else {
                    (2 - chi) as u64
                },
                disk_count: faces[c] as usize,
            }
        })
        .collect();
    Ok(surface)
}

impl NormalSurface {
    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    /// Component index of each disk.
    pub fn disk_components(&self) -> &[usize] {
        &self.disk_component
    }

    /// Propagates a transverse orientation from the smallest disk of each
    /// component. `flip_seeds` starts every seed on its second side. Returns the
    /// per-disk choice (`true` = pointing to the first side) and per-component
    /// consistency.
    pub fn transverse_orientation(&self, flip_seeds: bool) -> (Vec<bool>, Vec<bool>) {
        let n = self.disks.len();
        let components = self.disk_component.iter().copied().max().map_or(0, |m| m + 1);
        let mut neighbours: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
        for &(a, b, parity) in &self.adjacency {
            neighbours[a].push((b, parity));
            neighbours[b].push((a, parity));
        }
        let mut colour: Vec<Option<bool>> = vec![None; n];
        let mut consistent = vec![true; components];
        for seed in 0..n {
            if colour[seed].is_some() {
                continue;
            }
            colour[seed] = Some(!flip_seeds);
            let mut queue = vec![seed];
            while let Some(d) = queue.pop() {
                let c = colour[d].expect("queued disks are coloured");
                for &(e, parity) in &neighbours[d] {
                    let want = c ^ parity;
                    match colour[e] {
                        None => {
                            colour[e] = Some(want);
                            queue.push(e);
                        }
                        Some(have) if have != want => consistent[self.disk_component[d]] = false,
                        Some(_) => {}
                    }
                }
            }
        }
        (colour.into_iter().map(|c| c.unwrap_or(true)).collect(), consistent)
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }
}

/// Coordinate-wise sum of two admissible vectors, refusing sums that use two
/// quad/octagon directions in one tetrahedron.
pub fn haken_sum(
    tri: &Triangulation,
    v: &NormalVector,
    w: &NormalVector,
) -> Result<NormalVector, SurfaceError> {
    for x in [v, w] {
        let report = is_admissible(tri, x);
        if report.wrong_length || !report.failed_equations.is_empty() || !report.quad_violations.is_empty() {
            return Err(SurfaceError::Inadmissible(format!("summand {x} violates the matching or quad constraints")));
        }
    }
    let sum = v.plus(w);
    let clashes: Vec<usize> = (0..tri.tet_count())
        .filter(|&t| (4..COORDS_PER_TET).filter(|&s| sum.coords()[t * COORDS_PER_TET + s] != 0).count() > 1)
        .collect();
    if clashes.is_empty() {
        Ok(sum)
    } else {
        Err(SurfaceError::IncompatibleQuads(clashes))
    }
}

/// True iff `v` is a nonnegative integer combination of vertex links.
pub fn is_vertex_linking(tri: &Triangulation, v: &NormalVector) -> bool {
    if v.len() != tri.tet_count() * COORDS_PER_TET {
        return false;
    }
    let mut per_class: Vec<Option<u64>> = vec![None; tri.vertex_count()];
    for t in 0..tri.tet_count() {
        if (4..COORDS_PER_TET).any(|s| v.coords()[t * COORDS_PER_TET + s] != 0) {
            return false;
        }
        for corner in 0..4 {
            let x = v.get(t, DiskType::Triangle(corner as u8));
            let slot = &mut per_class[tri.vertex_class(t, corner)];
            match *slot {
                None => *slot = Some(x),
                Some(y) if y != x => return false,
                Some(_) => {}
            }
        }
    }
    true
}
