//! Closed orientable triangulated 3-manifolds given by tetrahedron face gluings.
//!
//! Conventions:
//! - face `f` of a tetrahedron is the face opposite vertex `f`;
//! - a gluing `(t, f) -> (t', f')` carries a permutation `p` of `{0,1,2,3}` mapping
//!   vertex labels of `t` to vertex labels of `t'`, with `p[f] = f'`;
//! - tetrahedron edges are numbered `01, 02, 03, 12, 13, 23`.
//!
//! Edge, vertex and face classes are numbered in order of first appearance when
//! scanning tetrahedra (and their edges/vertices/faces) in index order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex pairs of the six edges of a tetrahedron.
pub const EDGE_VERTICES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index of the edge joining vertices `a` and `b`.
pub fn edge_index(a: usize, b: usize) -> usize {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    match (lo, hi) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("no edge between vertices {a} and {b}"),
    }
}

/// Vertices of face `f`, in increasing order.
pub fn face_vertices(f: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut k = 0;
    for v in 0..4 {
        if v != f {
            out[k] = v;
            k += 1;
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangulationError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("tetrahedron {tet} face {face} is not glued to anything")]
    UngluedFace { tet: usize, face: usize },
    #[error("tetrahedron {tet} face {face} is glued twice")]
    DoubleGluing { tet: usize, face: usize },
    #[error("tetrahedron {tet} face {face} is glued to itself")]
    FaceGluedToItself { tet: usize, face: usize },
    #[error("bad permutation on tetrahedron {tet} face {face}: {reason}")]
    BadPermutation {
        tet: usize,
        face: usize,
        reason: String,
    },
    #[error("triangulation is not orientable")]
    NonOrientable,
    #[error("not a closed 3-manifold: {0}")]
    InvalidManifold(String),
    #[error("triangulation has no tetrahedra")]
    Empty,
}

impl TriangulationError {
    /// Stable machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Syntax { .. } => "Syntax",
            Self::UngluedFace { .. } => "UngluedFace",
            Self::DoubleGluing { .. } => "DoubleGluing",
            Self::FaceGluedToItself { .. } => "FaceGluedToItself",
            Self::BadPermutation { .. } => "BadPermutation",
            Self::NonOrientable => "NonOrientable",
            Self::InvalidManifold(_) => "InvalidManifold",
            Self::Empty => "Empty",
        }
    }
}

/// A permutation of the four vertex labels of a tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u8; 4]", into = "[u8; 4]")]
pub struct Perm4([u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    pub fn new(images: [u8; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for &x in &images {
            if x > 3 || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(Perm4(images))
    }

    #[inline]
    pub fn apply(self, v: usize) -> usize {
        self.0[v] as usize
    }

    pub fn inverse(self) -> Perm4 {
        let mut inv = [0u8; 4];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Perm4(inv)
    }

    /// `true` for odd permutations.
    pub fn is_odd(self) -> bool {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        inversions % 2 == 1
    }

    pub fn images(self) -> [u8; 4] {
        self.0
    }
}

impl TryFrom<[u8; 4]> for Perm4 {
    type Error = String;
    fn try_from(images: [u8; 4]) -> Result<Self, String> {
        Perm4::new(images).ok_or_else(|| format!("{images:?} is not a permutation of 0123"))
    }
}

impl From<Perm4> for [u8; 4] {
    fn from(p: Perm4) -> [u8; 4] {
        p.0
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in self.0 {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Where a face is glued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gluing {
    pub tet: usize,
    pub face: usize,
    pub perm: Perm4,
}

/// One occurrence of an edge class inside a tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeEmbedding {
    pub tet: usize,
    pub edge: usize,
}

/// A validated closed orientable triangulation with its derived skeleton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTriangulation", into = "RawTriangulation")]
pub struct Triangulation {
    gluings: Vec<[Gluing; 4]>,
    edge_class: Vec<[usize; 6]>,
    /// `true` when tet-edge `(a, b)`, `a < b`, runs opposite to the class representative.
    edge_reversed: Vec<[bool; 6]>,
    vertex_class: Vec<[usize; 4]>,
    face_class: Vec<[usize; 4]>,
    edge_embeddings: Vec<Vec<EdgeEmbedding>>,
    vertex_count: usize,
    face_count: usize,
}

/// Serialized form: only the gluings; everything else is derived.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawTriangulation {
    pub tet_count: usize,
    pub gluings: Vec<[Gluing; 4]>,
}

impl From<Triangulation> for RawTriangulation {
    fn from(t: Triangulation) -> Self {
        RawTriangulation {
            tet_count: t.tet_count(),
            gluings: t.gluings,
        }
    }
}

impl TryFrom<RawTriangulation> for Triangulation {
    type Error = TriangulationError;
    fn try_from(raw: RawTriangulation) -> Result<Self, Self::Error> {
        if raw.gluings.len() != raw.tet_count {
            return Err(TriangulationError::InvalidManifold(format!(
                "tet_count {} but {} gluing rows",
                raw.tet_count,
                raw.gluings.len()
            )));
        }
        let mut table = vec![[None; 4]; raw.tet_count];
        for (t, row) in raw.gluings.iter().enumerate() {
            for (f, g) in row.iter().enumerate() {
                table[t][f] = Some(*g);
            }
        }
        Triangulation::from_table(table)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    /// Parity of the path to the parent (used for edge directions).
    flip: Vec<bool>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            flip: vec![false; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (root, pf) = self.find(p);
        self.flip[x] ^= pf;
        self.parent[x] = root;
        (root, self.flip[x])
    }

    /// Records that `a` and `b` are identified with relative orientation `flip`.
    /// Returns `false` on a contradiction.
    fn union(&mut self, a: usize, b: usize, flip: bool) -> bool {
        let (ra, fa) = self.find(a);
        let (rb, fb) = self.find(b);
        if ra == rb {
            return fa ^ fb == flip;
        }
        // keep the smaller index as root so class representatives are stable
        if ra < rb {
            self.parent[rb] = ra;
            self.flip[rb] = fa ^ fb ^ flip;
        } else {
            self.parent[ra] = rb;
            self.flip[ra] = fa ^ fb ^ flip;
        }
        true
    }
}

impl Triangulation {
    /// Builds a triangulation from a full gluing table, checking every invariant.
    pub fn from_table(table: Vec<[Option<Gluing>; 4]>) -> Result<Self, TriangulationError> {
        let n = table.len();
        if n == 0 {
            return Err(TriangulationError::Empty);
        }
        let mut gluings = Vec::with_capacity(n);
        for (t, row) in table.iter().enumerate() {
            let mut out = [Gluing {
                tet: 0,
                face: 0,
                perm: Perm4::IDENTITY,
            }; 4];
            for f in 0..4 {
                let g = row[f].ok_or(TriangulationError::UngluedFace { tet: t, face: f })?;
                if g.tet >= n || g.face > 3 {
                    return Err(TriangulationError::BadPermutation {
                        tet: t,
                        face: f,
                        reason: format!("target {}:{} does not exist", g.tet, g.face),
                    });
                }
                if g.perm.apply(f) != g.face {
                    return Err(TriangulationError::BadPermutation {
                        tet: t,
                        face: f,
                        reason: format!("perm {} does not send {} to {}", g.perm, f, g.face),
                    });
                }
                if g.tet == t && g.face == f {
                    return Err(TriangulationError::FaceGluedToItself { tet: t, face: f });
                }
                out[f] = g;
            }
            gluings.push(out);
        }
        // involution check
        for (t, row) in gluings.iter().enumerate() {
            for (f, g) in row.iter().enumerate() {
                let back = gluings[g.tet][g.face];
                if back.tet != t || back.face != f || back.perm != g.perm.inverse() {
                    return Err(TriangulationError::DoubleGluing { tet: t, face: f });
                }
            }
        }

        check_orientable(&gluings)?;

        // edge classes with direction tracking
        let mut edges = UnionFind::new(6 * n);
        let mut vertices = UnionFind::new(4 * n);
        for (t, row) in gluings.iter().enumerate() {
            for (f, g) in row.iter().enumerate() {
                let fv = face_vertices(f);
                for &v in &fv {
                    vertices.union(4 * t + v, 4 * g.tet + g.perm.apply(v), false);
                }
                for i in 0..3 {
                    for j in i + 1..3 {
                        let (a, b) = (fv[i], fv[j]);
                        let (pa, pb) = (g.perm.apply(a), g.perm.apply(b));
                        let flip = pa > pb;
                        if !edges.union(6 * t + edge_index(a, b), 6 * g.tet + edge_index(pa, pb), flip)
                        {
                            return Err(TriangulationError::InvalidManifold(format!(
                                "edge {}{} of tetrahedron {} is identified with itself in reverse",
                                a, b, t
                            )));
                        }
                    }
                }
            }
        }

        let mut edge_class = vec![[0usize; 6]; n];
        let mut edge_reversed = vec![[false; 6]; n];
        let mut edge_embeddings: Vec<Vec<EdgeEmbedding>> = Vec::new();
        let mut root_to_class = std::collections::HashMap::new();
        for t in 0..n {
            for e in 0..6 {
                let (root, flip) = edges.find(6 * t + e);
                let next = root_to_class.len();
                let class = *root_to_class.entry(root).or_insert(next);
                if class == edge_embeddings.len() {
                    edge_embeddings.push(Vec::new());
                }
                edge_class[t][e] = class;
                edge_reversed[t][e] = flip;
                edge_embeddings[class].push(EdgeEmbedding { tet: t, edge: e });
            }
        }

        let mut vertex_class = vec![[0usize; 4]; n];
        let mut vroots = std::collections::HashMap::new();
        for t in 0..n {
            for v in 0..4 {
                let (root, _) = vertices.find(4 * t + v);
                let next = vroots.len();
                vertex_class[t][v] = *vroots.entry(root).or_insert(next);
            }
        }
        let vertex_count = vroots.len();

        let mut face_class = vec![[usize::MAX; 4]; n];
        let mut face_count = 0;
        for t in 0..n {
            for f in 0..4 {
                if face_class[t][f] == usize::MAX {
                    let g = gluings[t][f];
                    face_class[t][f] = face_count;
                    face_class[g.tet][g.face] = face_count;
                    face_count += 1;
                }
            }
        }

        let tri = Triangulation {
            gluings,
            edge_class,
            edge_reversed,
            vertex_class,
            face_class,
            edge_embeddings,
            vertex_count,
            face_count,
        };
        let euler = tri.vertex_count as i64 - tri.edge_count() as i64 + tri.face_count as i64
            - n as i64;
        if euler != 0 {
            return Err(TriangulationError::InvalidManifold(format!(
                "V - E + F - T = {euler}; some vertex link is not a sphere"
            )));
        }
        Ok(tri)
    }

    pub fn tet_count(&self) -> usize {
        self.gluings.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_embeddings.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn gluing(&self, tet: usize, face: usize) -> Gluing {
        self.gluings[tet][face]
    }

    pub fn edge_class(&self, tet: usize, edge: usize) -> usize {
        self.edge_class[tet][edge]
    }

    /// Whether the tetrahedron edge runs against its class representative.
    pub fn edge_reversed(&self, tet: usize, edge: usize) -> bool {
        self.edge_reversed[tet][edge]
    }

    pub fn vertex_class(&self, tet: usize, vertex: usize) -> usize {
        self.vertex_class[tet][vertex]
    }

    pub fn face_class(&self, tet: usize, face: usize) -> usize {
        self.face_class[tet][face]
    }

    pub fn edge_embeddings(&self, class: usize) -> &[EdgeEmbedding] {
        &self.edge_embeddings[class]
    }

    /// Number of tetrahedron edges in each edge class.
    pub fn edge_degrees(&self) -> Vec<usize> {
        self.edge_embeddings.iter().map(Vec::len).collect()
    }

    /// Face classes as `(side 1, side 2)` pairs of `(tet, face)`, in class order.
    pub fn face_pairs(&self) -> Vec<((usize, usize), (usize, usize))> {
        let mut out = vec![((0, 0), (0, 0)); self.face_count];
        let mut seen = vec![false; self.face_count];
        for t in 0..self.tet_count() {
            for f in 0..4 {
                let c = self.face_class[t][f];
                if !seen[c] {
                    seen[c] = true;
                    let g = self.gluings[t][f];
                    out[c] = ((t, f), (g.tet, g.face));
                }
            }
        }
        out
    }

    /// Serializes to the text gluing format, one line per unordered face pair.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ((t, f), (t2, f2)) in self.face_pairs() {
            let g = self.gluings[t][f];
            debug_assert_eq!((g.tet, g.face), (t2, f2));
            out.push_str(&format!("{t}:{f} -> {t2}:{f2} perm={}\n", g.perm));
        }
        out
    }
}

fn check_orientable(gluings: &[[Gluing; 4]]) -> Result<(), TriangulationError> {
    // sign[t] * sign[t'] * sign(perm) must be -1 for every gluing
    let mut sign: Vec<Option<bool>> = vec![None; gluings.len()];
    for start in 0..gluings.len() {
        if sign[start].is_some() {
            continue;
        }
        sign[start] = Some(true);
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            let st = sign[t].expect("visited");
            for g in &gluings[t] {
                let want = if g.perm.is_odd() { st } else { !st };
                match sign[g.tet] {
                    None => {
                        sign[g.tet] = Some(want);
                        stack.push(g.tet);
                    }
                    Some(s) if s != want => return Err(TriangulationError::NonOrientable),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(())
}

fn parse_face_ref(token: &str, line: usize) -> Result<(usize, usize), TriangulationError> {
    let syntax = |message: String| TriangulationError::Syntax { line, message };
    let (t, f) = token
        .split_once(':')
        .ok_or_else(|| syntax(format!("expected tet:face, found {token:?}")))?;
    let t = t
        .trim()
        .parse::<usize>()
        .map_err(|_| syntax(format!("bad tetrahedron index {t:?}")))?;
    let f = f
        .trim()
        .parse::<usize>()
        .map_err(|_| syntax(format!("bad face index {f:?}")))?;
    if f > 3 {
        return Err(syntax(format!("face index {f} out of range 0..3")));
    }
    Ok((t, f))
}

/// Parses the text gluing format:
///
/// ```text
/// # comment
/// 0:0 -> 0:1 perm=1230
/// ```
///
/// Each unordered face pair may be listed once; listing the reverse direction as
/// well is accepted when it is the inverse gluing.
pub fn parse_triangulation(text: &str) -> Result<Triangulation, TriangulationError> {
    let mut entries: Vec<(usize, (usize, usize), (usize, usize), [u8; 4])> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| TriangulationError::Syntax {
            line: line_no,
            message,
        };
        let (lhs, rest) = line
            .split_once("->")
            .ok_or_else(|| syntax("expected `tet:face -> tet:face perm=abcd`".into()))?;
        let mut parts = rest.split_whitespace();
        let rhs = parts.next().ok_or_else(|| syntax("missing target face".into()))?;
        let perm_tok = parts.next().ok_or_else(|| syntax("missing perm=abcd".into()))?;
        if let Some(extra) = parts.next() {
            return Err(syntax(format!("unexpected token {extra:?}")));
        }
        let digits = perm_tok
            .strip_prefix("perm=")
            .ok_or_else(|| syntax(format!("expected perm=abcd, found {perm_tok:?}")))?;
        let src = parse_face_ref(lhs.trim(), line_no)?;
        let dst = parse_face_ref(rhs, line_no)?;
        let bytes = digits.as_bytes();
        if bytes.len() != 4 || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(TriangulationError::BadPermutation {
                tet: src.0,
                face: src.1,
                reason: format!("{digits:?} is not four digits"),
            });
        }
        let images = [bytes[0] - b'0', bytes[1] - b'0', bytes[2] - b'0', bytes[3] - b'0'];
        entries.push((line_no, src, dst, images));
    }

    let tet_count = entries
        .iter()
        .map(|(_, s, d, _)| s.0.max(d.0) + 1)
        .max()
        .ok_or(TriangulationError::Empty)?;
    let mut table: Vec<[Option<Gluing>; 4]> = vec![[None; 4]; tet_count];
    for (_, src, dst, images) in entries {
        let perm = Perm4::new(images).ok_or_else(|| TriangulationError::BadPermutation {
            tet: src.0,
            face: src.1,
            reason: format!("{images:?} is not a permutation of 0123"),
        })?;
        if perm.apply(src.1) != dst.1 {
            return Err(TriangulationError::BadPermutation {
                tet: src.0,
                face: src.1,
                reason: format!("perm {perm} does not send face {} to face {}", src.1, dst.1),
            });
        }
        if src == dst {
            return Err(TriangulationError::FaceGluedToItself {
                tet: src.0,
                face: src.1,
            });
        }
        let forward = Gluing {
            tet: dst.0,
            face: dst.1,
            perm,
        };
        let backward = Gluing {
            tet: src.0,
            face: src.1,
            perm: perm.inverse(),
        };
        for (at, g) in [(src, forward), (dst, backward)] {
            match table[at.0][at.1] {
                None => table[at.0][at.1] = Some(g),
                Some(existing) if existing == g => {}
                Some(_) => {
                    return Err(TriangulationError::DoubleGluing {
                        tet: at.0,
                        face: at.1,
                    })
                }
            }
        }
    }
    Triangulation::from_table(table)
}

impl FromStr for Triangulation {
    type Err = TriangulationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_triangulation(s)
    }
}

/// Summary report used by `tri info`.
#[derive(Debug, Clone, Serialize)]
pub struct TriangulationInfo {
    pub tet_count: usize,
    pub vertex_classes: usize,
    pub edge_classes: usize,
    pub face_classes: usize,
    pub edge_degrees: Vec<usize>,
    pub euler_characteristic: i64,
    pub orientable: bool,
}

impl TriangulationInfo {
    pub fn of(t: &Triangulation) -> Self {
        TriangulationInfo {
            tet_count: t.tet_count(),
            vertex_classes: t.vertex_count(),
            edge_classes: t.edge_count(),
            face_classes: t.face_count(),
            edge_degrees: t.edge_degrees(),
            euler_characteristic: t.vertex_count() as i64 - t.edge_count() as i64
                + t.face_count() as i64
                - t.tet_count() as i64,
            orientable: true,
        }
    }
}
