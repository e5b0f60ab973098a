//! Weighted train tracks and the three local splittings of a large branch.
//!
//! A track is abstract: switches with two sides, each side an ordered list of
//! branch names. A branch listed once has a free end; listed twice it joins
//! two switch ends. Weights are nonnegative with one equation per switch.
//!
//! Splitting a large branch `e` between `s1` (far side `[A, B]`) and `s2`
//! (far side `[C, D]`) replaces it by parallels `e.1` (A to C) and `e.2`
//! (B to D), plus a diagonal `e.m`:
//!
//! - left: `e.m` runs from A to D, so `a = e.1 + e.m`, `d = e.2 + e.m`;
//! - central: no diagonal;
//! - right: `e.m` runs from C to B.
//!
//! Far sides are read top to bottom, so A and C are on the same side of `e`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyhedral::{extreme_rays, positive_integer_point, EngineOptions, PolyhedralError, RationalCone};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrackError {
    #[error("invalid track: {0}")]
    InvalidTrack(String),
    #[error("branch {branch} is not splittable: {reason}")]
    NotSplittable { branch: String, reason: String },
    #[error("cone of the track has {0} extreme rays; interior sampling is capped at 20")]
    TooManyRays(usize),
    #[error(transparent)]
    Polyhedral(#[from] PolyhedralError),
}

impl TrackError {
    pub fn kind(&self) -> &'static str {
        match self {
            TrackError::InvalidTrack(_) => "InvalidTrack",
            TrackError::NotSplittable { .. } => "NotSplittable",
            TrackError::TooManyRays(_) => "TooManyRays",
            TrackError::Polyhedral(e) => e.kind(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Switch {
    pub name: String,
    pub sides: [Vec<String>; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTrack")]
pub struct TrainTrack {
    switches: Vec<Switch>,
    branches: Vec<Branch>,
}

#[derive(Deserialize)]
struct RawTrack {
    switches: Vec<Switch>,
    branches: Vec<Branch>,
}

impl TryFrom<RawTrack> for TrainTrack {
    type Error = TrackError;
    fn try_from(raw: RawTrack) -> Result<Self, TrackError> {
        TrainTrack::new(raw.switches, raw.branches)
    }
}

impl TrainTrack {
    pub fn new(switches: Vec<Switch>, branches: Vec<Branch>) -> Result<Self, TrackError> {
        let mut names = BTreeSet::new();
        for b in &branches {
            if !names.insert(b.name.as_str()) {
                return Err(TrackError::InvalidTrack(format!("duplicate branch {}", b.name)));
            }
        }
        let mut switch_names = BTreeSet::new();
        let mut ends: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &switches {
            if !switch_names.insert(s.name.as_str()) {
                return Err(TrackError::InvalidTrack(format!("duplicate switch {}", s.name)));
            }
            for name in s.sides.iter().flatten() {
                if !names.contains(name.as_str()) {
                    return Err(TrackError::InvalidTrack(format!(
                        "switch {} uses unknown branch {name}",
                        s.name
                    )));
                }
                *ends.entry(name).or_default() += 1;
            }
        }
        if let Some((name, _)) = ends.iter().find(|(_, &n)| n > 2) {
            return Err(TrackError::InvalidTrack(format!("branch {name} has more than two ends")));
        }
        Ok(TrainTrack { switches, branches })
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn branch_index(&self, name: &str) -> Option<usize> {
        self.branches.iter().position(|b| b.name == name)
    }

    /// One row per switch: side-0 weights minus side-1 weights.
    pub fn switch_equations(&self) -> Vec<Vec<i64>> {
        self.switches
            .iter()
            .map(|s| {
                let mut row = vec![0i64; self.branches.len()];
                for (side, sign) in s.sides.iter().zip([1, -1]) {
                    for name in side {
                        row[self.branch_index(name).expect("validated")] += sign;
                    }
                }
                row
            })
            .collect()
    }

    pub fn weight_cone(&self) -> RationalCone {
        RationalCone::from_i64(self.branches.len(), &self.switch_equations()).expect("rows match branch count")
    }

    /// Whether `w` is a weight on this track.
    pub fn carries(&self, w: &[i64]) -> bool {
        w.len() == self.branches.len()
            && w.iter().all(|&x| x >= 0)
            && self
                .switch_equations()
                .iter()
                .all(|row| row.iter().zip(w).map(|(a, b)| a * b).sum::<i64>() == 0)
    }

    /// Number of free ends (0, 1 or 2) of each branch.
    pub fn free_ends(&self) -> Vec<usize> {
        let mut attached = vec![0usize; self.branches.len()];
        for s in &self.switches {
            for name in s.sides.iter().flatten() {
                attached[self.branch_index(name).expect("validated")] += 1;
            }
        }
        attached.into_iter().map(|n| 2 - n).collect()
    }

    /// Total weight leaving the track through free ends.
    pub fn boundary_weight(&self, w: &[i64]) -> i64 {
        self.free_ends().iter().zip(w).map(|(&f, &x)| f as i64 * x).sum()
    }

    fn occurrences(&self, name: &str) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, s) in self.switches.iter().enumerate() {
            for (side, list) in s.sides.iter().enumerate() {
                out.extend(list.iter().filter(|n| *n == name).map(|_| (i, side)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    Left,
    Central,
    Right,
}

/// One resolution with its carrying map into the original track.
#[derive(Debug, Clone, Serialize)]
pub struct SplitTrack {
    pub resolution: Resolution,
    pub track: TrainTrack,
    /// Rows indexed by the original branches, columns by this track's.
    pub carrying_map: Vec<Vec<i64>>,
    /// Pinching projection: rows by this track's branches, columns by the original's.
    pub pinching: Vec<Vec<i64>>,
}

fn apply(m: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

impl SplitTrack {
    /// Image of a weight on this track as a weight on the original.
    pub fn image(&self, x: &[i64]) -> Vec<i64> {
        apply(&self.carrying_map, x)
    }

    pub fn pinch(&self, w: &[i64]) -> Vec<i64> {
        apply(&self.pinching, w)
    }

    fn preimage_cone(&self, w: &[i64]) -> RationalCone {
        // unknowns (x, t): switch equations on x and M x - t w = 0
        let n = self.track.branch_count();
        let mut rows: Vec<Vec<i64>> = self
            .track
            .switch_equations()
            .into_iter()
            .map(|mut r| {
                r.push(0);
                r
            })
            .collect();
        for (row, &wi) in self.carrying_map.iter().zip(w) {
            let mut r = row.clone();
            r.push(-wi);
            rows.push(r);
        }
        RationalCone::from_i64(n + 1, &rows).expect("rows have n + 1 entries")
    }

    /// Whether `w` is the image of some weight on this track.
    pub fn carries_image(&self, w: &[i64], opts: EngineOptions) -> Result<bool, TrackError> {
        let n = self.track.branch_count();
        let rays = extreme_rays(&self.preimage_cone(w), opts)?;
        Ok(rays.rays.iter().any(|r| r[n].is_positive()))
    }

    /// Whether `w` is the image of a weight positive on every branch this
    /// track's cone can weight.
    pub fn fully_carries(&self, w: &[i64], opts: EngineOptions) -> Result<bool, TrackError> {
        let n = self.track.branch_count();
        let live = cone_support(&self.track.weight_cone(), opts)?;
        let mut support: Vec<usize> = live;
        support.push(n);
        let cone = self.preimage_cone(w).with_support(&support);
        Ok(positive_integer_point(&cone, opts)?.is_some())
    }
}

/// Branches that are positive on some weight.
fn cone_support(cone: &RationalCone, opts: EngineOptions) -> Result<Vec<usize>, TrackError> {
    let rays = extreme_rays(cone, opts)?;
    Ok((0..cone.dim())
        .filter(|&i| rays.rays.iter().any(|r| r[i].is_positive()))
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct Split {
    pub branch: String,
    pub left: SplitTrack,
    pub central: SplitTrack,
    pub right: SplitTrack,
}

impl Split {
    pub fn tracks(&self) -> [&SplitTrack; 3] {
        [&self.left, &self.central, &self.right]
    }
}

/// Splits the large branch `branch`. It must be the only branch on its side
/// at two distinct switches, each with two distinct branches on the far side.
pub fn split(tau: &TrainTrack, branch: &str) -> Result<Split, TrackError> {
    let refuse = |reason: &str| TrackError::NotSplittable {
        branch: branch.to_string(),
        reason: reason.to_string(),
    };
    let e = tau.branch_index(branch).ok_or_else(|| refuse("no such branch"))?;
    let occ = tau.occurrences(branch);
    if occ.len() != 2 || occ[0].0 == occ[1].0 {
        return Err(refuse("it must join two distinct switches"));
    }
    let mut far = Vec::new();
    for &(s, side) in &occ {
        let sw = &tau.switches[s];
        if sw.sides[side].len() != 1 {
            return Err(refuse("it must be alone on its side of each switch"));
        }
        let other = &sw.sides[1 - side];
        if other.len() != 2 {
            return Err(refuse("each far side must have exactly two branches"));
        }
        far.extend(other.iter().cloned());
    }
    let distinct: BTreeSet<&String> = far.iter().collect();
    if distinct.len() != 4 || distinct.contains(&tau.branches[e].name) {
        return Err(refuse("the four far branches must be distinct and differ from it"));
    }
    let new_names = [format!("{branch}.1"), format!("{branch}.2"), format!("{branch}.m")];
    if new_names.iter().any(|n| tau.branch_index(n).is_some()) {
        return Err(refuse("split branch names are already taken"));
    }
    let [a, b, c, d] = [&far[0], &far[1], &far[2], &far[3]];
    let [p1, p2, m] = [&new_names[0], &new_names[1], &new_names[2]];

    let build = |resolution: Resolution| -> SplitTrack {
        let (at_a, at_b, at_c, at_d): (Vec<&String>, Vec<&String>, Vec<&String>, Vec<&String>) = match resolution {
            Resolution::Left => (vec![p1, m], vec![p2], vec![p1], vec![m, p2]),
            Resolution::Central => (vec![p1], vec![p2], vec![p1], vec![p2]),
            Resolution::Right => (vec![p1], vec![m, p2], vec![p1, m], vec![p2]),
        };
        let mut switches: Vec<Switch> = tau
            .switches
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != occ[0].0 && *i != occ[1].0)
            .map(|(_, s)| s.clone())
            .collect();
        for (x, list) in [(a, at_a), (b, at_b), (c, at_c), (d, at_d)] {
            switches.push(Switch {
                name: format!("{branch}@{x}"),
                sides: [vec![x.clone()], list.into_iter().cloned().collect()],
            });
        }
        let mut branches: Vec<Branch> = tau.branches.iter().filter(|x| x.name != branch).cloned().collect();
        branches.push(Branch { name: p1.clone() });
        branches.push(Branch { name: p2.clone() });
        if resolution != Resolution::Central {
            branches.push(Branch { name: m.clone() });
        }
        let track = TrainTrack::new(switches, branches).expect("split of a valid track is valid");

        let n = tau.branch_count();
        let k = track.branch_count();
        let idx = |name: &str| tau.branch_index(name).expect("far branch");
        let mut carrying_map = vec![vec![0i64; k]; n];
        let mut pinching = vec![vec![0i64; n]; k];
        for (j, br) in track.branches.iter().enumerate() {
            match tau.branch_index(&br.name) {
                Some(i) => {
                    carrying_map[i][j] = 1;
                    pinching[j][i] = 1;
                }
                None => {
                    carrying_map[e][j] = 1;
                    let row = &mut pinching[j];
                    match (resolution, br.name == *p1, br.name == *p2) {
                        (Resolution::Left, true, _) => row[idx(c)] = 1,
                        (Resolution::Left, _, true) => row[idx(b)] = 1,
                        (Resolution::Left, _, _) => {
                            row[idx(a)] = 1;
                            row[idx(c)] = -1;
                        }
                        (Resolution::Central, true, _) => row[idx(a)] = 1,
                        (Resolution::Central, _, _) => row[idx(b)] = 1,
                        (Resolution::Right, true, _) => row[idx(a)] = 1,
                        (Resolution::Right, _, true) => row[idx(d)] = 1,
                        (Resolution::Right, _, _) => {
                            row[idx(c)] = 1;
                            row[idx(a)] = -1;
                        }
                    }
                }
            }
        }
        SplitTrack {
            resolution,
            track,
            carrying_map,
            pinching,
        }
    };

    Ok(Split {
        branch: branch.to_string(),
        left: build(Resolution::Left),
        central: build(Resolution::Central),
        right: build(Resolution::Right),
    })
}

/// Whether `a` is obtained from `b` by deleting branches: every branch of `a`
/// is a branch of `b` with the same ends, and every switch of `a` is a switch
/// of `b` whose sides contain `a`'s sides (possibly with the sides swapped).
pub fn is_subtrack(a: &TrainTrack, b: &TrainTrack) -> bool {
    fn contains(big: &[String], small: &[String]) -> bool {
        let mut counts: BTreeMap<&str, i64> = BTreeMap::new();
        for x in big {
            *counts.entry(x).or_default() += 1;
        }
        small.iter().all(|x| {
            let c = counts.entry(x).or_default();
            *c -= 1;
            *c >= 0
        })
    }
    if a.branches.iter().any(|x| b.branch_index(&x.name).is_none()) {
        return false;
    }
    let switches_ok = a.switches.iter().all(|sa| {
        let Some(sb) = b.switches.iter().find(|s| s.name == sa.name) else {
            return false;
        };
        (contains(&sb.sides[0], &sa.sides[0]) && contains(&sb.sides[1], &sa.sides[1]))
            || (contains(&sb.sides[0], &sa.sides[1]) && contains(&sb.sides[1], &sa.sides[0]))
    });
    let ends_ok = a
        .branches
        .iter()
        .all(|x| a.occurrences(&x.name).len() == b.occurrences(&x.name).len());
    switches_ok && ends_ok
}

/// Outcome of comparing `cone(tau)` with the images of a family of split tracks.
#[derive(Debug, Clone, Serialize)]
pub struct CoverReport {
    pub tau_rays: Vec<Vec<i64>>,
    /// Every extreme ray of every image cone is a weight on `tau`.
    pub images_inside: bool,
    /// Every extreme ray of `cone(tau)` is the image of some weight.
    pub rays_covered: bool,
    pub uncovered_rays: Vec<Vec<i64>>,
    /// Sums of subsets of `tau`'s extreme rays that are positive on its support.
    pub interior_points_checked: usize,
    /// Those sums that no track fully carries.
    pub uncovered_interior: Vec<Vec<i64>>,
    pub covered: bool,
}

fn to_i64(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().expect("track weights fit in i64")).collect()
}

/// Closed double containment via extreme rays, then full carrying of every
/// positive subset-sum of `tau`'s extreme rays. The second part separates
/// resolutions whose closed images overlap on lower-dimensional faces.
pub fn cone_cover_report(
    tau: &TrainTrack,
    pieces: &[&SplitTrack],
    opts: EngineOptions,
) -> Result<CoverReport, TrackError> {
    let cone = tau.weight_cone();
    let tau_rays: Vec<Vec<i64>> = extreme_rays(&cone, opts)?.rays.iter().map(|r| to_i64(r)).collect();

    let mut images_inside = true;
    for p in pieces {
        for r in &extreme_rays(&p.track.weight_cone(), opts)?.rays {
            if !tau.carries(&p.image(&to_i64(r))) {
                images_inside = false;
            }
        }
    }

    let mut uncovered_rays = Vec::new();
    for r in &tau_rays {
        let mut hit = false;
        for p in pieces {
            if p.carries_image(r, opts)? {
                hit = true;
                break;
            }
        }
        if !hit {
            uncovered_rays.push(r.clone());
        }
    }

    let k = tau_rays.len();
    if k > 20 {
        return Err(TrackError::TooManyRays(k));
    }
    let support: Vec<usize> = (0..tau.branch_count())
        .filter(|&i| tau_rays.iter().any(|r| r[i] > 0))
        .collect();
    let mut samples: BTreeSet<Vec<i64>> = BTreeSet::new();
    for mask in 1u32..(1u32 << k) {
        let mut w = vec![0i64; tau.branch_count()];
        for (j, r) in tau_rays.iter().enumerate() {
            if mask & (1 << j) != 0 {
                for (x, y) in w.iter_mut().zip(r) {
                    *x += y;
                }
            }
        }
        if support.iter().all(|&i| w[i] > 0) {
            samples.insert(w);
        }
    }
    let mut uncovered_interior = Vec::new();
    for w in &samples {
        let mut hit = false;
        for p in pieces {
            if p.fully_carries(w, opts)? {
                hit = true;
                break;
            }
        }
        if !hit {
            uncovered_interior.push(w.clone());
        }
    }

    let rays_covered = uncovered_rays.is_empty();
    Ok(CoverReport {
        tau_rays,
        images_inside,
        rays_covered,
        uncovered_rays,
        interior_points_checked: samples.len(),
        covered: images_inside && rays_covered && uncovered_interior.is_empty(),
        uncovered_interior,
    })
}

/// Whether the three resolutions cover `cone(tau)`.
pub fn cone_cover_check(tau: &TrainTrack, split: &Split) -> bool {
    cone_cover_report(tau, &split.tracks(), EngineOptions::default())
        .map(|r| r.covered)
        .unwrap_or(false)
}

/// Weight on the split track carrying `w`, chosen by the sign of the
/// crossing difference; `None` if `w` is not a weight on `tau`.
pub fn lift(split: &Split, tau: &TrainTrack, w: &[i64]) -> Option<(Resolution, Vec<i64>)> {
    if !tau.carries(w) {
        return None;
    }
    split.tracks().into_iter().find_map(|p| {
        let x = p.pinch(w);
        (x.iter().all(|&v| v >= 0) && p.track.carries(&x) && p.image(&x) == w).then(|| (p.resolution, x))
    })
}

/// The standard one-large-branch track: `e` between `s1` (far side `a`, `b`)
/// and `s2` (far side `c`, `d`), all four far branches with free ends.
pub fn local_model() -> TrainTrack {
    let s = |x: &str| x.to_string();
    TrainTrack::new(
        vec![
            Switch {
                name: s("s1"),
                sides: [vec![s("e")], vec![s("a"), s("b")]],
            },
            Switch {
                name: s("s2"),
                sides: [vec![s("e")], vec![s("c"), s("d")]],
            },
        ],
        ["a", "b", "c", "d", "e"].iter().map(|n| Branch { name: s(n) }).collect(),
    )
    .expect("static track")
}
