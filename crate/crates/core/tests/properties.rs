mod support;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use laminate::branched::{chi_functional, sub_branched_surface, BranchedSurfaceModel};
use laminate::normal::{edge_weights, is_admissible, matching_system, weight, DiskType, COORDS_PER_TET};
use laminate::polyhedral::{extreme_rays, hilbert_basis, EngineOptions, RationalCone};
use laminate::solutions::matching_cone;
use laminate::surface::{build_surface, haken_sum};
use laminate::traintrack::{local_model, split, Resolution};
use laminate::{parse_triangulation, NormalVector, Triangulation};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

struct Pool {
    tri: Triangulation,
    /// Orthant support and the Hilbert basis of its cone.
    orthants: Vec<(Vec<usize>, Vec<NormalVector>)>,
}

fn pools() -> &'static [Pool] {
    static POOLS: OnceLock<Vec<Pool>> = OnceLock::new();
    POOLS.get_or_init(|| {
        support::TRIANGULATIONS
            .iter()
            .map(|name| {
                let tri = support::load(name);
                let cone = matching_cone(&tri);
                let orthants = support::orthants(&tri, false)
                    .into_iter()
                    .map(|s| {
                        let hb = hilbert_basis(&cone.clone().with_support(&s), EngineOptions::default())
                            .unwrap()
                            .elements
                            .iter()
                            .map(|v| NormalVector::new(v.iter().map(|x| x.to_u64().unwrap()).collect()))
                            .collect();
                        (s, hb)
                    })
                    .filter(|(_, hb): &(Vec<usize>, Vec<NormalVector>)| !hb.is_empty())
                    .collect();
                Pool { tri, orthants }
            })
            .collect()
    })
}

fn combine(basis: &[NormalVector], coeffs: &[u64], tet_count: usize) -> NormalVector {
    basis
        .iter()
        .zip(coeffs.iter().cycle())
        .fold(NormalVector::zero(tet_count), |acc, (f, &c)| acc.plus(&f.scaled(c)))
}

/// (fixture, orthant, two coefficient vectors) producing a compatible pair.
fn pair() -> impl Strategy<Value = (usize, usize, Vec<u64>, Vec<u64>)> {
    (0..support::TRIANGULATIONS.len(), any::<prop::sample::Index>())
        .prop_flat_map(|(p, o)| {
            let n = pools()[p].orthants.len();
            let o = o.index(n);
            let k = pools()[p].orthants[o].1.len();
            (
                Just(p),
                Just(o),
                prop::collection::vec(0u64..3, k),
                prop::collection::vec(0u64..3, k),
            )
        })
}

fn vectors(p: usize, o: usize, a: &[u64], b: &[u64]) -> (&'static Triangulation, NormalVector, NormalVector) {
    let pool = &pools()[p];
    let basis = &pool.orthants[o].1;
    let t = pool.tri.tet_count();
    (&pool.tri, combine(basis, a, t), combine(basis, b, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chi_functional_matches_cell_complex((p, o, a, _b) in pair()) {
        let (tri, v, _) = vectors(p, o, &a, &[]);
        let s = build_surface(tri, &v).unwrap();
        prop_assert_eq!(chi_functional(tri).evaluate(&v), BigRational::from_integer(s.chi.into()));
    }

    #[test]
    fn weight_is_linear((p, o, a, b) in pair(), k in 0u64..5) {
        let (tri, v, w) = vectors(p, o, &a, &b);
        let sum = v.plus(&w);
        prop_assert_eq!(weight(tri, &sum), weight(tri, &v) + weight(tri, &w));
        let ew: Vec<u64> = edge_weights(tri, &v).iter().zip(edge_weights(tri, &w)).map(|(x, y)| x + y).collect();
        prop_assert_eq!(edge_weights(tri, &sum), ew);
        prop_assert_eq!(weight(tri, &v.scaled(k)), k * weight(tri, &v));
    }

    #[test]
    fn residual_is_linear(p in 0..4usize, raw in prop::collection::vec((0u64..4, 0u64..4), 30)) {
        let tri = &pools()[p].tri;
        let n = tri.tet_count() * COORDS_PER_TET;
        let v = NormalVector::new(raw[..n].iter().map(|x| x.0).collect());
        let w = NormalVector::new(raw[..n].iter().map(|x| x.1).collect());
        let m = matching_system(tri);
        let sum: Vec<i64> = m.residual(&v).iter().zip(m.residual(&w)).map(|(x, y)| x + y).collect();
        prop_assert_eq!(m.residual(&v.plus(&w)), sum);
    }

    #[test]
    fn cell_counts((p, o, a, _b) in pair()) {
        let (tri, v, _) = vectors(p, o, &a, &[]);
        let s = build_surface(tri, &v).unwrap();
        prop_assert_eq!(s.vertices as u64, weight(tri, &v));
        prop_assert_eq!(s.faces as u64, v.coords().iter().sum::<u64>());
        let arcs: u64 = (0..tri.tet_count())
            .flat_map(|t| DiskType::all().map(move |d| (t, d)))
            .map(|(t, d)| v.get(t, d) * d.arc_count() as u64)
            .sum();
        prop_assert_eq!(2 * s.edges as u64, arcs);
    }

    #[test]
    fn doubling((p, o, a, _b) in pair()) {
        let (tri, v, _) = vectors(p, o, &a, &[]);
        let s = build_surface(tri, &v).unwrap();
        let d = build_surface(tri, &v.scaled(2)).unwrap();
        prop_assert_eq!(d.chi, 2 * s.chi);
        let mut expected: Vec<i64> = Vec::new();
        for c in &s.components {
            if c.orientable {
                expected.extend([c.chi, c.chi]);
            } else {
                expected.push(2 * c.chi);
            }
        }
        let mut got: Vec<i64> = d.components.iter().map(|c| c.chi).collect();
        expected.sort();
        got.sort();
        prop_assert_eq!(got, expected);
        prop_assert!(d.components.iter().all(|c| c.orientable));
    }

    #[test]
    fn orientation_seed_flip((p, o, a, _b) in pair()) {
        let (tri, v, _) = vectors(p, o, &a, &[]);
        let s = build_surface(tri, &v).unwrap();
        let (local, verdict) = s.transverse_orientation(false);
        let (flipped, verdict2) = s.transverse_orientation(true);
        prop_assert_eq!(&verdict, &verdict2);
        for (comp, (x, y)) in s.disk_components().iter().zip(local.iter().zip(&flipped)) {
            if verdict[*comp] {
                prop_assert_eq!(*x, !*y);
            }
        }
        let orientable: Vec<bool> = s.components.iter().map(|c| c.orientable).collect();
        prop_assert_eq!(verdict, orientable);
    }

    #[test]
    fn haken_sum_additive((p, o, a, b) in pair()) {
        let (tri, v, w) = vectors(p, o, &a, &b);
        let sum = haken_sum(tri, &v, &w).unwrap();
        let chi = |x: &NormalVector| build_surface(tri, x).unwrap().chi;
        prop_assert_eq!(chi(&sum), chi(&v) + chi(&w));
        prop_assert!(is_admissible(tri, &sum).admissible);
    }

    #[test]
    fn sub_branched_idempotent((p, o, a, _b) in pair()) {
        let (tri, v, _) = vectors(p, o, &a, &[]);
        prop_assume!(!v.is_zero());
        let b = BranchedSurfaceModel::from_support(tri, &pools()[p].orthants[o].0).unwrap();
        let once = sub_branched_surface(&b, &v).unwrap();
        let twice = sub_branched_surface(&once, &v).unwrap();
        prop_assert_eq!(once.support(), twice.support());
        prop_assert_eq!(once.support().to_vec(), v.support());
    }

    #[test]
    fn split_maps_preserve_boundary_and_pinch_back(a in 0i64..6, b in 0i64..6, c in 0i64..6) {
        let tau = local_model();
        let s = split(&tau, "e").unwrap();
        // any weight on tau: choose a, b, c and let d close the switch equations
        prop_assume!(a + b >= c);
        let w = vec![a, b, c, a + b - c, a + b];
        let mut resolutions = BTreeSet::new();
        for piece in s.tracks() {
            let x = piece.pinch(&w);
            if piece.track.carries(&x) {
                prop_assert_eq!(piece.image(&x), w.clone());
                prop_assert_eq!(piece.track.boundary_weight(&x), tau.boundary_weight(&w));
                resolutions.insert(piece.resolution);
            }
        }
        prop_assert!(resolutions.contains(&Resolution::Central) == (a == c));
        prop_assert!(!resolutions.is_empty());
    }

    #[test]
    fn pinch_inverts_image(xs in prop::collection::vec(0i64..5, 6)) {
        let tau = local_model();
        let s = split(&tau, "e").unwrap();
        for piece in s.tracks() {
            // build a weight on the split track from free parameters
            let x: Vec<i64> = match piece.resolution {
                Resolution::Central => vec![xs[0], xs[1], xs[0], xs[1], xs[0], xs[1]],
                Resolution::Left => vec![xs[0] + xs[2], xs[1], xs[0], xs[1] + xs[2], xs[0], xs[1], xs[2]],
                Resolution::Right => vec![xs[0], xs[1] + xs[2], xs[0] + xs[2], xs[1], xs[0], xs[1], xs[2]],
            };
            prop_assert!(piece.track.carries(&x));
            prop_assert_eq!(piece.pinch(&piece.image(&x)), x.clone());
            prop_assert_eq!(piece.track.boundary_weight(&x), tau.boundary_weight(&piece.image(&x)));
        }
    }

    #[test]
    fn engine_matches_brute_force(rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 4), 2)) {
        let flat = support::rank(
            &rows.iter().map(|r| r.iter().map(|&x| num_rational::Rational64::from_integer(x)).collect()).collect::<Vec<_>>(),
        );
        prop_assume!(flat >= 1);
        let cone = RationalCone::from_i64(4, &rows).unwrap();
        let opts = EngineOptions::default();
        let rays = extreme_rays(&cone, opts).unwrap().rays;
        let hb = hilbert_basis(&cone, opts).unwrap().elements;
        prop_assert_eq!(&rays, &extreme_rays(&cone, opts).unwrap().rays);
        for x in rays.iter().chain(&hb) {
            prop_assert!(cone.contains(x));
        }
        let all = [0, 1, 2, 3];
        let as_set = |v: &[Vec<BigInt>]| -> BTreeSet<Vec<u64>> {
            v.iter().map(|x| x.iter().map(|c| c.to_u64().unwrap()).collect()).collect()
        };
        // rays come from 2x2 minors (at most 8); basis elements lie in a cell of at most 3 rays
        prop_assert_eq!(as_set(&rays), support::brute_rays(&rows, 4, &all, 8));
        prop_assert_eq!(as_set(&hb), support::brute_hilbert(&rows, 4, &all, 24));
    }
}

#[test]
fn triangulation_round_trip_and_edge_closure() {
    for name in support::TRIANGULATIONS {
        let t = support::load(name);
        let again = parse_triangulation(&t.to_text()).unwrap();
        assert_eq!(again.to_text(), t.to_text());
        for tet in 0..t.tet_count() {
            for f in 0..4 {
                assert_eq!(again.gluing(tet, f), t.gluing(tet, f));
                let g = t.gluing(tet, f);
                let fv = laminate::triangulation::face_vertices(f);
                for i in 0..3 {
                    for j in i + 1..3 {
                        let (a, b) = (fv[i], fv[j]);
                        let (pa, pb) = (g.perm.apply(a), g.perm.apply(b));
                        assert_eq!(
                            t.edge_class(tet, laminate::triangulation::edge_index(a, b)),
                            t.edge_class(g.tet, laminate::triangulation::edge_index(pa, pb))
                        );
                    }
                }
            }
        }
    }
}
