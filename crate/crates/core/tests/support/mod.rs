//! Fixture loading and brute-force oracles shared by the integration tests.
//!
//! The oracles solve the linear systems by their own rational elimination and
//! enumerate boxes directly; they use nothing from the polyhedral engine.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Deserialize;

use laminate::normal::{matching_system, orthant_support, quad_orthants, COORDS_PER_TET};
use laminate::surface::build_surface;
use laminate::{parse_triangulation, NormalVector, Triangulation};

pub const TRIANGULATIONS: [&str; 4] = ["one_tet", "two_tet", "three_tet", "three_tet_b"];

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_path(file: &str) -> PathBuf {
    fixture_dir().join(file)
}

pub fn load(name: &str) -> Triangulation {
    let file = if name.ends_with(".tri") {
        name.to_string()
    } else {
        format!("{name}.tri")
    };
    let text = std::fs::read_to_string(fixture_path(&file)).expect("fixture exists");
    parse_triangulation(&text).expect("fixture parses")
}

#[derive(Debug, Clone, Deserialize)]
pub struct Model {
    pub name: String,
    pub triangulation: String,
    pub support: Vec<usize>,
    pub purpose: String,
}

#[derive(Deserialize)]
struct Models {
    models: Vec<Model>,
}

pub fn models() -> Vec<Model> {
    let text = std::fs::read_to_string(fixture_path("models.json")).expect("models.json exists");
    serde_json::from_str::<Models>(&text).expect("models.json parses").models
}

pub fn model(name: &str) -> Model {
    models().into_iter().find(|m| m.name == name).expect("named model")
}

/// Rank by fraction-exact Gaussian elimination.
pub fn rank(rows: &[Vec<Rational64>]) -> usize {
    rref(rows).1.len()
}

/// Reduced row echelon form and its pivot columns.
fn rref(rows: &[Vec<Rational64>]) -> (Vec<Vec<Rational64>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational64>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..cols {
                    let d = f * m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

fn submatrix(matrix: &[Vec<i64>], cols: &[usize]) -> Vec<Vec<Rational64>> {
    matrix
        .iter()
        .map(|row| cols.iter().map(|&c| Rational64::from_integer(row[c])).collect())
        .collect()
}

/// Every integer `x` with `A x = 0`, `0 <= x <= bound` and `x` zero off
/// `support`, the zero vector included. Free variables of the reduced system
/// range over the box and the pivot variables are solved for.
pub fn box_points(matrix: &[Vec<i64>], dim: usize, support: &[usize], bound: u64) -> Vec<Vec<u64>> {
    let sub = submatrix(matrix, support);
    let (red, pivots) = if sub.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        rref(&sub)
    };
    let free: Vec<usize> = (0..support.len()).filter(|c| !pivots.contains(c)).collect();
    // pivot p: den_p * x_p = - sum_f num_pf x_f
    let solved: Vec<(usize, i64, Vec<i64>)> = pivots
        .iter()
        .zip(&red)
        .map(|(&p, row)| {
            let den = free.iter().fold(1i64, |acc, &f| acc.lcm(row[f].denom()));
            let nums = free
                .iter()
                .map(|&f| -(row[f] * Rational64::from_integer(den)).to_integer())
                .collect();
            (p, den, nums)
        })
        .collect();
    let b = bound as i64;
    let mut out = Vec::new();
    let mut vals = vec![0i64; free.len()];
    loop {
        let mut x = vec![0u64; dim];
        for (k, &f) in free.iter().enumerate() {
            x[support[f]] = vals[k] as u64;
        }
        let ok = solved.iter().all(|(p, den, nums)| {
            let s: i64 = nums.iter().zip(&vals).map(|(n, v)| n * v).sum();
            if s % den != 0 {
                return false;
            }
            let v = s / den;
            if !(0..=b).contains(&v) {
                return false;
            }
            x[support[*p]] = v as u64;
            true
        });
        if ok {
            out.push(x);
        }
        let mut k = 0;
        while k < vals.len() {
            vals[k] += 1;
            if vals[k] <= b {
                break;
            }
            vals[k] = 0;
            k += 1;
        }
        if k == vals.len() {
            break;
        }
    }
    out
}

fn gcd_all(x: &[u64]) -> u64 {
    x.iter().fold(0u64, |g, &v| g.gcd(&v))
}

/// Primitive nonzero box points whose support spans a one-dimensional face.
pub fn brute_rays(matrix: &[Vec<i64>], dim: usize, support: &[usize], bound: u64) -> BTreeSet<Vec<u64>> {
    box_points(matrix, dim, support, bound)
        .into_iter()
        .filter(|x| gcd_all(x) == 1)
        .filter(|x| {
            let s: Vec<usize> = (0..dim).filter(|&i| x[i] > 0).collect();
            rank(&submatrix(matrix, &s)) + 1 == s.len()
        })
        .collect()
}

/// Nonzero box points not dominated by another nonzero box point. For cones
/// `{A x = 0, x >= 0}` this is the Hilbert basis intersected with the box.
pub fn brute_hilbert(matrix: &[Vec<i64>], dim: usize, support: &[usize], bound: u64) -> BTreeSet<Vec<u64>> {
    let mut pts: Vec<Vec<u64>> = box_points(matrix, dim, support, bound)
        .into_iter()
        .filter(|x| x.iter().any(|&v| v > 0))
        .collect();
    pts.sort_by_key(|x| x.iter().sum::<u64>());
    let mut out = BTreeSet::new();
    for (i, x) in pts.iter().enumerate() {
        let total: u64 = x.iter().sum();
        let reducible = pts[..i]
            .iter()
            .take_while(|y| y.iter().sum::<u64>() < total)
            .any(|y| y.iter().zip(x).all(|(a, b)| a <= b));
        if !reducible {
            out.insert(x.clone());
        }
    }
    out
}

/// Orthant supports in the library's order.
pub fn orthants(tri: &Triangulation, octagons: bool) -> Vec<Vec<usize>> {
    quad_orthants(tri.tet_count(), octagons)
        .iter()
        .map(|o| orthant_support(o))
        .collect()
}

/// Nonzero admissible vectors with every coordinate at most `bound`: union of
/// the box points of every orthant, octagon weight at most one.
pub fn admissible_box(tri: &Triangulation, bound: u64, octagons: bool) -> Vec<NormalVector> {
    let m = matching_system(tri);
    let dim = tri.tet_count() * COORDS_PER_TET;
    let mut all = BTreeSet::new();
    for s in orthants(tri, octagons) {
        for x in box_points(&m.matrix, dim, &s, bound) {
            let oct: u64 = x
                .chunks(COORDS_PER_TET)
                .map(|c| c[7..].iter().sum::<u64>())
                .sum();
            if oct <= 1 && x.iter().any(|&v| v > 0) {
                all.insert(x);
            }
        }
    }
    all.into_iter().map(NormalVector::new).collect()
}

/// Whether `x` is a nonnegative integer combination of `basis`.
pub fn decomposes(x: &[u64], basis: &[Vec<u64>], seen: &mut BTreeSet<Vec<u64>>) -> bool {
    if x.iter().all(|&v| v == 0) {
        return true;
    }
    if !seen.insert(x.to_vec()) {
        return false;
    }
    basis.iter().any(|g| {
        g.iter().zip(x).all(|(a, b)| a <= b) && {
            let rest: Vec<u64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
            decomposes(&rest, basis, seen)
        }
    })
}

/// The genus filter restated from its definition: nonzero, octagon weight as
/// configured, one component, orientable, `chi = 2 - 2g`.
pub fn genus_filter(tri: &Triangulation, x: &NormalVector, g: i64, octagon_sector: bool) -> bool {
    let oct: u64 = x.coords().chunks(COORDS_PER_TET).map(|c| c[7..].iter().sum::<u64>()).sum();
    if x.is_zero() || oct != u64::from(octagon_sector) {
        return false;
    }
    match build_surface(tri, x) {
        Ok(s) => s.components.len() == 1 && s.components[0].orientable && s.chi == 2 - 2 * g,
        Err(_) => false,
    }
}
