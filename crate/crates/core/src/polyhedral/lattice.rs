//! Exact integer/rational linear algebra helpers: row reduction, column Hermite
//! normal form with unimodular transform, and saturated lattice bases.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn to_rational(m: &[Vec<BigInt>]) -> RatMatrix {
    m.iter()
        .map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..cols {
                    let delta = &factor * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank(m: &[Vec<BigInt>]) -> usize {
    let mut q = to_rational(m);
    rref(&mut q).len()
}

/// Basis (as integer rows) of the rational null space `{x : m x = 0}`.
pub fn rational_kernel(m: &[Vec<BigInt>], cols: usize) -> IntMatrix {
    let mut q = to_rational(m);
    let pivots = rref(&mut q);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -q[row][free].clone();
        }
        basis.push(clear_denominators(&v));
    }
    basis
}

/// Smallest positive integer multiple of a rational vector, made primitive.
pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    primitive(ints)
}

/// Divides by the gcd of the entries (zero vector unchanged).
pub fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

/// Column-style Hermite reduction: returns `(h, u)` with `m * u = h`, `u`
/// unimodular, and `h` in lower column-echelon form with positive pivots.
/// The number of pivots equals the rank; columns after the last pivot are zero.
pub fn column_hnf(m: &[Vec<BigInt>], cols: usize) -> (IntMatrix, IntMatrix, usize) {
    let rows = m.len();
    let mut h: IntMatrix = m.to_vec();
    let mut u: IntMatrix = (0..cols)
        .map(|i| (0..cols).map(|j| BigInt::from(u8::from(i == j))).collect())
        .collect();
    let mut pivot = 0;
    for r in 0..rows {
        if pivot == cols {
            break;
        }
        for j in pivot + 1..cols {
            if h[r][j].is_zero() {
                continue;
            }
            let a = h[r][pivot].clone();
            let b = h[r][j].clone();
            let egcd = a.extended_gcd(&b);
            let (g, x, y) = (egcd.gcd, egcd.x, egcd.y);
            let (ag, bg) = (&a / &g, &b / &g);
            // [col_p, col_j] <- [x col_p + y col_j, -b/g col_p + a/g col_j]
            combine_columns(&mut h, pivot, j, &x, &y, &(-&bg), &ag);
            combine_columns(&mut u, pivot, j, &x, &y, &(-&bg), &ag);
        }
        if !h[r][pivot].is_zero() {
            if h[r][pivot].is_negative() {
                for row in h.iter_mut() {
                    row[pivot] = -row[pivot].clone();
                }
                for row in u.iter_mut() {
                    row[pivot] = -row[pivot].clone();
                }
            }
            pivot += 1;
        }
    }
    (h, u, pivot)
}

fn combine_columns(
    m: &mut IntMatrix,
    p: usize,
    j: usize,
    pp: &BigInt,
    jp: &BigInt,
    pj: &BigInt,
    jj: &BigInt,
) {
    for row in m.iter_mut() {
        let cp = row[p].clone();
        let cj = row[j].clone();
        row[p] = pp * &cp + jp * &cj;
        row[j] = pj * &cp + jj * &cj;
    }
}

/// Columns of a Z-basis of the integer kernel `{x in Z^cols : m x = 0}`.
pub fn integer_kernel(m: &[Vec<BigInt>], cols: usize) -> IntMatrix {
    if m.is_empty() {
        return (0..cols)
            .map(|i| (0..cols).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
    }
    let (_, u, rank) = column_hnf(m, cols);
    (rank..cols)
        .map(|c| u.iter().map(|row| row[c].clone()).collect())
        .collect()
}

/// Z-basis of the saturated lattice `Z^n ∩ span(vectors)`, returned as vectors.
pub fn saturated_basis(vectors: &[Vec<BigInt>], n: usize) -> IntMatrix {
    let orth = rational_kernel(vectors, n);
    integer_kernel(&orth, n)
}

/// Solves `sum_i y_i basis[i] = target` exactly; `None` when `target` is not in the span.
pub fn coordinates_in(basis: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigRational>> {
    let d = basis.len();
    let n = target.len();
    // augmented system: n equations, d unknowns
    let mut m: RatMatrix = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = basis
                .iter()
                .map(|b| BigRational::from_integer(b[i].clone()))
                .collect();
            row.push(BigRational::from_integer(target[i].clone()));
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&d) {
        return None;
    }
    let mut y = vec![BigRational::zero(); d];
    for (row, &p) in pivots.iter().enumerate() {
        y[p] = m[row][d].clone();
    }
    Some(y)
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn inverse(m: &[Vec<BigRational>]) -> Option<RatMatrix> {
    let d = m.len();
    let mut aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < d || pivots[d - 1] != d - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[d..].to_vec()).collect())
}
