//! Acceptance suite: one line per criterion, nonzero exit if any fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use laminate::branched::{
    carries_nonneg_chi, chi_functional, positive_zero_chi_point, BranchedSurfaceModel, VerdictKind,
};
use laminate::finiteness::{antichain_certificate, enumerate_genus};
use laminate::normal::{all_vertex_links, is_admissible, matching_system, weight, COORDS_PER_TET};
use laminate::polyhedral::{extreme_rays, hilbert_basis, EngineOptions};
use laminate::solutions::{fundamental_solutions, matching_cone};
use laminate::surface::{build_surface, haken_sum, is_vertex_linking};
use laminate::traintrack::{cone_cover_report, is_subtrack, split, TrainTrack};
use laminate::NormalVector;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    check(took <= limit, || format!("{what} took {took:.1?}, limit {limit:?}"))
}

fn as_set(v: &[Vec<num_bigint::BigInt>]) -> BTreeSet<Vec<u64>> {
    v.iter().map(|x| x.iter().map(|c| c.to_u64().unwrap()).collect()).collect()
}

fn chi_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for name in support::TRIANGULATIONS {
        let t = support::load(name);
        let chi = chi_functional(&t);
        for v in support::admissible_box(&t, 4, true) {
            let s = build_surface(&t, &v).map_err(|e| format!("{name} {v}: {e}"))?;
            check(chi.evaluate(&v) == BigRational::from_integer(s.chi.into()), || {
                format!("{name} {v}: functional {} vs complex {}", chi.evaluate(&v), s.chi)
            })?;
            total += 1;
        }
    }
    within(start, Duration::from_secs(60), "chi oracle")?;
    Ok(format!("{total} admissible vectors, coordinates <= 4, {:.1?}", start.elapsed()))
}

fn haken_additivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut summary = Vec::new();
    for name in support::TRIANGULATIONS {
        let t = support::load(name);
        let pool = support::admissible_box(&t, 3, true);
        let (mut pairs, mut attempts) = (0, 0);
        while pairs < 1000 {
            attempts += 1;
            check(attempts < 200_000, || format!("{name}: only {pairs} compatible pairs found"))?;
            let v = pool.choose(&mut rng).unwrap();
            let w = pool.choose(&mut rng).unwrap();
            let Ok(sum) = haken_sum(&t, v, w) else { continue };
            let chi = |x: &NormalVector| build_surface(&t, x).map(|s| s.chi);
            let (cv, cw, cs) = (chi(v), chi(w), chi(&sum));
            let (cv, cw, cs) = (cv.map_err(|e| e.to_string())?, cw.map_err(|e| e.to_string())?, cs.map_err(|e| e.to_string())?);
            check(cs == cv + cw, || format!("{name}: chi({v} + {w}) = {cs}, summands {cv} + {cw}"))?;
            check(weight(&t, &sum) == weight(&t, v) + weight(&t, w), || {
                format!("{name}: weight not additive on {v} + {w}")
            })?;
            pairs += 1;
        }
        summary.push(format!("{name} {pairs}/{attempts}"));
    }
    Ok(format!("compatible pairs/draws: {}", summary.join(", ")))
}

fn vertex_link_recognition() -> Outcome {
    for name in support::TRIANGULATIONS {
        let t = support::load(name);
        check(t.vertex_count() == 1, || format!("{name} has {} vertices", t.vertex_count()))?;
        let link = all_vertex_links(&t);
        check(link.coords().chunks(COORDS_PER_TET).all(|c| c[..4] == [1, 1, 1, 1] && c[4..].iter().all(|&x| x == 0)), || {
            format!("{name}: unexpected link {link}")
        })?;
        let s = build_surface(&t, &link).map_err(|e| e.to_string())?;
        check(s.components.len() == 1, || format!("{name}: {} components", s.components.len()))?;
        let c = &s.components[0];
        check(c.chi == 2 && c.orientable && c.genus_or_crosscap == 0, || format!("{name}: {c:?}"))?;
        check(is_vertex_linking(&t, &link), || format!("{name}: not recognised"))?;
    }
    Ok(format!("{} one-vertex fixtures", support::TRIANGULATIONS.len()))
}

fn polyhedral_oracle() -> Outcome {
    let start = Instant::now();
    let opts = EngineOptions::default();
    let (mut orthants, mut rays, mut basis) = (0, 0, 0);
    for name in support::TRIANGULATIONS {
        let t = support::load(name);
        let m = matching_system(&t);
        let cone = matching_cone(&t);
        let dim = t.tet_count() * COORDS_PER_TET;
        for s in support::orthants(&t, true) {
            let c = cone.clone().with_support(&s);
            let r = as_set(&extreme_rays(&c, opts).map_err(|e| e.to_string())?.rays);
            let h = as_set(&hilbert_basis(&c, opts).map_err(|e| e.to_string())?.elements);
            let br = support::brute_rays(&m.matrix, dim, &s, 8);
            let bh = support::brute_hilbert(&m.matrix, dim, &s, 8);
            check(r == br, || format!("{name} orthant {s:?}: rays {r:?} vs oracle {br:?}"))?;
            check(h == bh, || format!("{name} orthant {s:?}: basis {h:?} vs oracle {bh:?}"))?;
            orthants += 1;
            rays += r.len();
            basis += h.len();
        }
    }
    within(start, Duration::from_secs(300), "polyhedral oracle")?;
    Ok(format!(
        "{orthants} orthants, {rays} rays, {basis} basis elements, coordinates <= 8, {:.1?}",
        start.elapsed()
    ))
}

fn fundamental_decomposition() -> Outcome {
    let mut total = 0;
    for name in support::TRIANGULATIONS {
        let t = support::load(name);
        let basis: Vec<Vec<u64>> = fundamental_solutions(&t, true, EngineOptions::default())
            .map_err(|e| e.to_string())?
            .iter()
            .map(|v| v.coords().to_vec())
            .collect();
        for v in support::admissible_box(&t, 6, true) {
            check(support::decomposes(v.coords(), &basis, &mut BTreeSet::new()), || format!("{name}: {v} does not decompose"))?;
            total += 1;
        }
    }
    Ok(format!("{total} admissible vectors, coordinates <= 6"))
}

fn positive_zero_chi() -> Outcome {
    let model = support::model("three_tet_torus");
    let t = support::load(&model.triangulation);
    let b = BranchedSurfaceModel::from_support(&t, &model.support).map_err(|e| e.to_string())?;
    let p = positive_zero_chi_point(&b)
        .map_err(|e| e.to_string())?
        .ok_or("no positive point on the zero-chi system")?;
    check(b.support().iter().all(|&i| p.coords()[i] > 0), || format!("{p} not positive on the support"))?;
    check(is_admissible(&t, &p).admissible, || format!("{p} not admissible"))?;
    let s = build_surface(&t, &p).map_err(|e| e.to_string())?;
    check(s.chi == 0, || format!("{p} builds with chi {}", s.chi))?;
    Ok(format!("{} -> {p}, {} component(s), chi 0", model.name, s.components.len()))
}

fn antichain_theorem() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    for model in support::models() {
        let t = support::load(&model.triangulation);
        let b = BranchedSurfaceModel::from_support(&t, &model.support).map_err(|e| e.to_string())?;
        if carries_nonneg_chi(&b).map_err(|e| e.to_string())?.verdict != VerdictKind::AllCarriedNegative {
            continue;
        }
        let fundamentals = b.fundamentals().map_err(|e| e.to_string())?.to_vec();
        let chis = b.fundamental_chis().map_err(|e| e.to_string())?;
        let min_abs = chis.iter().map(|c| c.unsigned_abs()).min().ok_or("no fundamentals")?;
        let max_norm = fundamentals.iter().flat_map(|f| f.coords().iter().copied()).max().unwrap_or(0);
        let m = matching_system(&t);
        let dim = t.tet_count() * COORDS_PER_TET;
        let mut counts = Vec::new();
        for g in [2i64, 3] {
            let e = enumerate_genus(&b, g).map_err(|e| format!("{}: {e}", model.name))?;
            let bound = (2 * g as u64 - 2) / min_abs * max_norm;
            let oracle: Vec<NormalVector> = support::box_points(&m.matrix, dim, b.support(), bound)
                .into_iter()
                .map(NormalVector::new)
                .filter(|v| support::genus_filter(&t, v, g, b.has_octagon_sector()))
                .collect();
            check(e.vectors == oracle, || {
                format!("{} g={g}: enumeration {:?} vs oracle {:?}", model.name, e.vectors, oracle)
            })?;
            check(antichain_certificate(&e).antichain, || format!("{} g={g}: not an antichain", model.name))?;
            counts.push(format!("g{g}:{}", e.count));
        }
        lines.push(format!("{} [{}]", model.name, counts.join(" ")));
    }
    check(!lines.is_empty(), || "no model with an all-negative verdict".into())?;
    within(start, Duration::from_secs(600), "enumeration")?;
    Ok(lines.join(", "))
}

fn split_cone_cover() -> Outcome {
    let text = std::fs::read_to_string(support::fixture_path("local_split_track.json")).map_err(|e| e.to_string())?;
    let tau: TrainTrack = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let s = split(&tau, "e").map_err(|e| e.to_string())?;
    let opts = EngineOptions::default();
    let full = cone_cover_report(&tau, &s.tracks(), opts).map_err(|e| e.to_string())?;
    check(full.images_inside && full.rays_covered, || format!("closed containment fails: {full:?}"))?;
    check(full.covered, || format!("cover fails: {full:?}"))?;
    check(is_subtrack(&s.central.track, &s.left.track), || "central is not a sub-track of left".into())?;
    check(is_subtrack(&s.central.track, &s.right.track), || "central is not a sub-track of right".into())?;
    let without = cone_cover_report(&tau, &[&s.left, &s.right], opts).map_err(|e| e.to_string())?;
    let balanced = vec![1, 1, 1, 1, 2];
    check(!without.covered && without.uncovered_interior.contains(&balanced), || {
        format!("dropping the central split still covers: {without:?}")
    })?;
    Ok(format!(
        "{} rays, {} interior points; without central uncovered: {:?}",
        full.tau_rays.len(),
        full.interior_points_checked,
        without.uncovered_interior
    ))
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_laminate");
    let fixture = |f: &str| support::fixture_path(f).display().to_string();
    let mut runs: Vec<Vec<String>> = Vec::new();
    for name in support::TRIANGULATIONS {
        let t = support::load(name);
        let file = fixture(&format!("{name}.tri"));
        let link: Vec<String> = all_vertex_links(&t).coords().iter().map(u64::to_string).collect();
        runs.push(vec!["tri".into(), "info".into(), "--input".into(), file.clone()]);
        for cmd in ["vertex", "fundamental"] {
            runs.push(vec!["ns".into(), cmd.into(), "--input".into(), file.clone()]);
            runs.push(vec!["ns".into(), cmd.into(), "--input".into(), file.clone(), "--octagons".into()]);
        }
        runs.push(vec!["ns".into(), "build".into(), "--input".into(), file.clone(), "--vector".into(), link.join(",")]);
    }
    for model in support::models() {
        let file = fixture(&model.triangulation);
        let supp: Vec<String> = model.support.iter().map(usize::to_string).collect();
        for cmd in ["from-support", "verdict", "zero-chi"] {
            runs.push(vec!["bs".into(), cmd.into(), "--input".into(), file.clone(), "--support".into(), supp.join(",")]);
        }
        runs.push(vec![
            "heegaard".into(),
            "enumerate".into(),
            "-g".into(),
            "2".into(),
            "--input".into(),
            file.clone(),
            "--support".into(),
            supp.join(","),
        ]);
    }
    runs.push(vec![
        "split".into(),
        "traintrack".into(),
        "--file".into(),
        fixture("local_split_track.json"),
        "--branch".into(),
        "e".into(),
    ]);

    let snapshot = || -> Vec<Vec<u8>> {
        let mut files: Vec<_> = std::fs::read_dir(support::fixture_dir())
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        files.iter().map(|p| std::fs::read(p).unwrap()).collect()
    };
    let before = snapshot();
    let mut codes = [0usize; 3];
    for args in &runs {
        let first = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        let second = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        check(first.stdout == second.stdout && first.status == second.status, || {
            format!("laminate {} differs between runs", args.join(" "))
        })?;
        serde_json::from_slice::<serde_json::Value>(&first.stdout)
            .map_err(|e| format!("laminate {}: output is not JSON: {e}", args.join(" ")))?;
        let code = first.status.code().unwrap_or(-1);
        check((0..=2).contains(&code), || format!("laminate {}: exit {code}", args.join(" ")))?;
        codes[code as usize] += 1;
    }
    check(snapshot() == before, || "a command modified the fixtures".into())?;
    Ok(format!(
        "{} commands run twice, byte-identical (exit 0: {}, 1: {}, 2: {})",
        runs.len(),
        codes[0],
        codes[1],
        codes[2]
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("chi functional equals cell-complex chi", chi_oracle_equivalence),
        ("Haken sums add chi and weight", haken_additivity),
        ("vertex link recognised", vertex_link_recognition),
        ("extreme rays and Hilbert bases match brute force", polyhedral_oracle),
        ("admissible vectors decompose over fundamentals", fundamental_decomposition),
        ("positive integer point with chi 0", positive_zero_chi),
        ("genus lists match oracle and are antichains", antichain_theorem),
        ("split cone cover", split_cone_cover),
        ("CLI output is deterministic", cli_determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {title}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL  {title}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
