//! Acceptance suite: one pass/fail line per criterion, exact arithmetic
//! throughout. Runs without the libtest harness so the lines always print.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use hochkit::{
    bar_cobar_unit, check_bar_cobar_duality, check_bar_cobar_duality_with, dualization_map, hh_cohomology,
    hh_homology, hh_inverse_limit, hochschild_complex, koszul_dual, parse_algebra, truncation_tower,
    verify_koszul_duality, DGAlgebra, DGBimodule, DGCoalgebra, Field, GradedMap, GroupModel, HochschildComplex,
    SparseMatrix, SparseVec, Verdict, WitnessFault,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Check = fn() -> Result<(), String>;

fn q() -> Field {
    Field::Rational
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// HH*(Λ[a]) for |a| = −d with d odd, from the periodic resolution:
/// Λ[a] ⊗ k[y] with |y| = d + 1, so classes sit in degrees k(d+1) and
/// k(d+1) − d for k ≥ 0. Returns the degree and whether the class
/// involves `a`.
fn exterior_hh_classes(d: i64, window: (i64, i64)) -> BTreeMap<i64, Vec<bool>> {
    let mut out: BTreeMap<i64, Vec<bool>> = (window.0..=window.1).map(|t| (t, Vec::new())).collect();
    for k in 0..=window.1.max(0) {
        for (t, odd) in [(k * (d + 1), false), (k * (d + 1) - d, true)] {
            if let Some(v) = out.get_mut(&t) {
                v.push(odd);
            }
        }
    }
    out
}

/// Product ranks in Λ[a] ⊗ k[y]: a product of two classes vanishes only
/// when both contain `a`.
fn exterior_hh_product_ranks(d: i64, window: (i64, i64)) -> BTreeMap<(i64, i64), usize> {
    let classes = exterior_hh_classes(d, window);
    let mut out = BTreeMap::new();
    for (&i, ci) in &classes {
        for (&j, cj) in &classes {
            if i + j < window.0 || i + j > window.1 {
                continue;
            }
            let rank = ci.iter().flat_map(|x| cj.iter().map(move |y| !(*x && *y))).filter(|b| *b).count();
            out.insert((i, j), rank.min(1));
        }
    }
    out
}

fn verify_koszul(group: &str, window: (i64, i64), d: i64) -> Result<(), String> {
    let started = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_hochkit"))
        .args(["verify-koszul", "--group", group, "--window", &format!("{}:{}", window.0, window.1)])
        .output()
        .map_err(err)?;
    ensure!(status.status.code() == Some(0), "{group}: exit {:?}\n{}", status.status.code(), String::from_utf8_lossy(&status.stdout));
    ensure!(started.elapsed().as_secs() < 60, "{group}: took {:?}", started.elapsed());

    let r = verify_koszul_duality(&GroupModel::builtin(group, q()).map_err(err)?, window).map_err(err)?;
    ensure!(r.verdict == Verdict::Pass, "{group}: verdict {}", r.verdict);
    let oracle = exterior_hh_classes(d, window);
    for (t, classes) in &oracle {
        let (e, p) = r.dims[t];
        ensure!(e == classes.len() && p == Some(classes.len()), "{group} degree {t}: {e}/{p:?}, oracle {}", classes.len());
    }
    let ranks = exterior_hh_product_ranks(d, window);
    for ((i, j), expect) in &ranks {
        if oracle[i].is_empty() || oracle[j].is_empty() {
            continue;
        }
        let (e, p) = r.product_ranks.get(&(*i, *j)).copied().ok_or(format!("{group}: no product rank for ({i}, {j})"))?;
        ensure!(e == *expect && p == *expect, "{group} product ({i}, {j}): {e}/{p}, oracle {expect}");
    }
    Ok(())
}

fn koszul_verification() -> Result<(), String> {
    verify_koszul("s1", (-1, 8), 1)?;
    verify_koszul("su2", (-3, 12), 3)
}

fn inverse_limit() -> Result<(), String> {
    let window = (-1, 8);
    let g = GroupModel::builtin("s1", q()).map_err(err)?;
    let (poly, tower) = g.stage_tower(window, 9).map_err(err)?;
    let report = hh_inverse_limit(poly.clone(), &tower, window).map_err(err)?;
    ensure!(report.mittag_leffler_failures.is_empty(), "unexpected failures {:?}", report.mittag_leffler_failures);
    ensure!(report.unstabilized_degrees.is_empty(), "unstabilized {:?}", report.unstabilized_degrees);
    // stage n is k[x]/x^{n+1}; HH^t(k[x], k[x]/x^{n+1}) is one-dimensional
    // for −1 ≤ t ≤ 2n and zero otherwise, so degree t settles once 2n ≥ t
    for t in window.0..=window.1 {
        let n0 = report.stabilization[&t];
        let oracle = ((t + 1) / 2).max(1) as usize;
        ensure!(n0 == oracle && n0 <= 8, "degree {t}: n0 = {n0}, oracle {oracle}");
        ensure!(report.dims()[&t] == 1, "degree {t}: limit dim {}", report.dims()[&t]);
        for (n, dims) in &report.stage_dims {
            if *n >= n0 {
                ensure!(dims[&t] == 1, "degree {t}: stage {n} dim {}", dims[&t]);
            }
        }
    }
    let zero = GradedMap::zero(
        tower.stages()[3].complex().space().clone(),
        tower.stages()[2].complex().space().clone(),
        0,
    );
    let broken = tower.with_map(2, zero).map_err(err)?;
    let report = hh_inverse_limit(poly, &broken, window).map_err(err)?;
    ensure!(!report.mittag_leffler_failures.is_empty(), "non-surjective stage not reported");
    Ok(())
}

fn bar_cobar_duality() -> Result<(), String> {
    // homology coalgebras of S¹ and SU(2), one primitive each; the second
    // placement of SU(2) uses the cohomological sign convention
    for (degrees, window) in [(1, (-12, 0)), (3, (-12, 0)), (-3, (0, 12))] {
        let s = DGCoalgebra::exterior_primitive(q(), &[degrees]).map_err(err)?;
        let r = check_bar_cobar_duality(&s, window).map_err(err)?;
        ensure!(r.passed() && r.words_checked > 0, "primitive in degree {degrees}: {r:?}");
        let flipped =
            check_bar_cobar_duality_with(&s, window, WitnessFault { flip_sign_at_length: Some(2) }).map_err(err)?;
        ensure!(!flipped.passed(), "sign flip undetected for primitive in degree {degrees}");
    }
    Ok(())
}

fn bar_cobar_unit_check() -> Result<(), String> {
    let cases = [
        (DGAlgebra::exterior(q(), &[-1]).map_err(err)?, vec![(0, 8), (-8, 0)]),
        (DGAlgebra::exterior(q(), &[-3]).map_err(err)?, vec![(0, 8), (-8, 0)]),
        (DGAlgebra::polynomial(q(), &[2], 20).map_err(err)?, vec![(0, 8)]),
    ];
    for (a, windows) in cases {
        let a = Arc::new(a);
        for w in windows {
            let r = bar_cobar_unit(a.clone(), w).map_err(err)?;
            ensure!(r.passed(), "{} on {w:?}: {r:?}", a.name());
            ensure!(r.source_dims == r.target_dims, "{} on {w:?}: dims differ", a.name());
            let expect: usize = (w.0..=w.1).filter(|t| a.basis().space(q()).dim(*t) > 0).count();
            ensure!(r.source_dims.values().sum::<usize>() == expect, "{} on {w:?}: {:?}", a.name(), r.source_dims);
        }
    }
    Ok(())
}

fn koszul_dual_homology() -> Result<(), String> {
    let window = (-10, 10);
    let ext = Arc::new(DGAlgebra::exterior(q(), &[-1]).map_err(err)?);
    let dims = koszul_dual(ext, window).map_err(err)?.cohomology_dims().map_err(err)?;
    for t in window.0..=window.1 {
        let expect = usize::from(t >= 0 && t % 2 == 0);
        ensure!(dims.get(&t).copied().unwrap_or(0) == expect, "Λ[a]! degree {t}: {:?}", dims.get(&t));
    }
    let poly = Arc::new(DGAlgebra::polynomial(q(), &[2], 24).map_err(err)?);
    let dims = koszul_dual(poly, window).map_err(err)?.cohomology_dims().map_err(err)?;
    for t in window.0..=window.1 {
        let expect = usize::from(t == 0 || t == -1);
        ensure!(dims.get(&t).copied().unwrap_or(0) == expect, "k[x]! degree {t}: {:?}", dims.get(&t));
    }
    Ok(())
}

fn basis_cochains(c: &HochschildComplex, t: i64, limit: usize) -> Vec<hochkit::HochschildCochain> {
    (0..c.cells(t).len().min(limit)).map(|i| c.from_vector(t, &SparseVec::unit(i, c.field()))).collect()
}

/// d² = 0, Leibniz and associativity of cup on basis cochains, graded
/// commutativity in cohomology, and dualization certificates.
fn cochain_axioms(a: &Arc<DGAlgebra>, m: &Arc<DGBimodule>, window: (i64, i64)) -> Result<(), String> {
    let k = a.field();
    let name = a.name().to_string();
    let c = hochschild_complex(a.clone(), m.clone(), window).map_err(err)?;
    c.complex().check_square_zero().map_err(|e| format!("{name}: {e}"))?;
    let degrees: Vec<i64> = (window.0..=window.1).collect();
    for &s in &degrees {
        for f in basis_cochains(&c, s, 3) {
            for &t in &degrees {
                for g in basis_cochains(&c, t, 3) {
                    let lhs = c.differential(&c.cup(&f, &g).map_err(err)?);
                    let rhs = c
                        .cup(&c.differential(&f), &g)
                        .map_err(err)?
                        .add(&c.cup(&f, &c.differential(&g)).map_err(err)?.scaled(&k.sign(s)));
                    ensure!(lhs == rhs, "{name}: Leibniz fails in degrees ({s}, {t})");
                    for h in basis_cochains(&c, window.0.max(0).min(window.1), 2) {
                        let left = c.cup(&c.cup(&f, &g).map_err(err)?, &h).map_err(err)?;
                        let right = c.cup(&f, &c.cup(&g, &h).map_err(err)?).map_err(err)?;
                        ensure!(left == right, "{name}: cup not associative in degrees ({s}, {t})");
                    }
                }
            }
        }
    }
    let ring = c.cohomology().map_err(err)?;
    for (&i, ri) in &ring.representatives {
        for (&j, rj) in &ring.representatives {
            if i + j < window.0 || i + j > window.1 {
                continue;
            }
            for f in ri {
                for g in rj {
                    let diff = c.cup(f, g).map_err(err)?.sub(&c.cup(g, f).map_err(err)?.scaled(&k.sign(i * j)));
                    let (t, v) = c.to_vector(&diff).map_err(err)?;
                    let coords = ring.coordinates(t, &v).ok_or(format!("{name}: commutator is not a cocycle"))?;
                    ensure!(coords.is_zero(), "{name}: cup not graded commutative in degrees ({i}, {j})");
                }
            }
        }
    }
    for len in 0..=2 {
        let g = dualization_map(a.clone(), m.clone(), len, window).map_err(err)?;
        ensure!(g.is_isomorphism(), "{name}: dualization map of length {len}: {:?}", g.failures);
    }
    Ok(())
}

/// HH⁰ against the graded center, antisymmetry of the bracket and
/// δf = −[μ, f]; regular coefficients only.
fn regular_axioms(a: &Arc<DGAlgebra>, window: (i64, i64)) -> Result<(), String> {
    let k = a.field();
    let name = a.name().to_string();
    let m = Arc::new(DGBimodule::regular(a.clone()));
    cochain_axioms(a, &m, window)?;

    let (lo, hi) = (a.basis().min_degree().unwrap(), a.basis().max_degree().unwrap());
    let c = hochschild_complex(a.clone(), m.clone(), (lo, hi)).map_err(err)?;
    let mut center = 0;
    for t in lo..=hi {
        let empty: Vec<usize> = (0..c.cells(t).len()).filter(|&i| c.cells(t)[i].0.is_empty()).collect();
        let images = empty
            .iter()
            .map(|&i| Ok(c.to_vector(&c.differential(&c.from_vector(t, &SparseVec::unit(i, k)))).map_err(err)?.1))
            .collect::<Result<Vec<_>, String>>()?;
        center += empty.len() - SparseMatrix::from_columns(k, c.cells(t + 1).len(), images).rank();
    }
    ensure!(center == a.graded_center().len(), "{name}: HH⁰ has dim {center}, center {}", a.graded_center().len());

    let c = hochschild_complex(a.clone(), m, window).map_err(err)?;
    let mu = c.multiplication_cochain().map_err(err)?;
    for t in window.0..window.1 {
        for f in basis_cochains(&c, t, usize::MAX) {
            let lhs = c.differential(&f);
            let rhs = c.bracket(&mu, &f).map_err(err)?.scaled(&k.from_i64(-1));
            ensure!(lhs == rhs, "{name}: δf ≠ −[μ, f] in degree {t}");
        }
    }
    for s in window.0..=window.1 {
        for t in window.0..=window.1 {
            if s + t - 1 < window.0 || s + t - 1 > window.1 {
                continue;
            }
            for f in basis_cochains(&c, s, 3) {
                for g in basis_cochains(&c, t, 3) {
                    let fg = c.bracket(&f, &g).map_err(err)?;
                    let gf = c.bracket(&g, &f).map_err(err)?.scaled(&-k.sign((s - 1) * (t - 1)));
                    ensure!(fg == gf, "{name}: bracket not antisymmetric in degrees ({s}, {t})");
                }
            }
        }
    }
    Ok(())
}

/// A random finite graded algebra with at most six basis elements, all
/// non-unit degrees of one sign, given as an input file and kept only if
/// it validates and has some nonzero structure.
fn random_algebra(rng: &mut ChaCha8Rng, index: usize) -> DGAlgebra {
    loop {
        let positive = rng.gen_bool(0.5);
        let n = rng.gen_range(2..=5);
        let mut basis = vec![json!({"name": "1", "degree": 0})];
        let mut degrees = Vec::new();
        for i in 0..n {
            let d: i64 = if positive { rng.gen_range(2..=5) } else { -rng.gen_range(1..=4) };
            degrees.push(d);
            basis.push(json!({"name": format!("e{i}"), "degree": d}));
        }
        let coefficient = |rng: &mut ChaCha8Rng| ["1", "-1", "2", "1/2"][rng.gen_range(0..4)];
        let targets = |deg: i64| (0..n).filter(|&z| degrees[z] == deg).collect::<Vec<_>>();
        let mut products = Vec::new();
        let mut differential = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let zs = targets(degrees[x] + degrees[y]);
                if !zs.is_empty() && rng.gen_bool(0.6) {
                    let z = zs[rng.gen_range(0..zs.len())];
                    products.push(json!({"left": format!("e{x}"), "right": format!("e{y}"),
                        "result": [[format!("e{z}"), coefficient(rng)]]}));
                }
            }
            let zs = targets(degrees[x] + 1);
            if !zs.is_empty() && rng.gen_bool(0.6) {
                let z = zs[rng.gen_range(0..zs.len())];
                differential.push(json!({"source": format!("e{x}"), "result": [[format!("e{z}"), coefficient(rng)]]}));
            }
        }
        if products.is_empty() && differential.is_empty() {
            continue;
        }
        let file = json!({"field": "Q", "name": format!("random{index}"), "basis": basis, "unit": "1",
            "products": products, "differential": differential});
        if let Ok(a) = parse_algebra(&file.to_string()) {
            if a.validate().is_valid() {
                return a;
            }
        }
    }
}

fn group_models() -> Result<Vec<GroupModel>, String> {
    ["s1", "t2", "su2", "su3"].iter().map(|g| GroupModel::builtin(g, q()).map_err(err)).collect()
}

fn hochschild_properties() -> Result<(), String> {
    for g in group_models()? {
        let ext = g.exterior().clone();
        let window = if g.name() == "SU3" { (-3, 3) } else { (-3, 4) };
        regular_axioms(&ext, window)?;
        // the polynomial side, with the second stage as bounded coefficients
        let poly = g.polynomial(20).map_err(err)?;
        let m = Arc::new(g.stage_module(&poly, 2).map_err(err)?);
        cochain_axioms(&poly, &m, (-2, 3))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut with_products = 0;
    let mut with_differential = 0;
    for i in 0..20 {
        let a = Arc::new(random_algebra(&mut rng, i));
        let ideal = a.augmentation_ideal();
        with_products += usize::from(ideal.iter().any(|&x| ideal.iter().any(|&y| !a.mul(x, y).is_zero())));
        with_differential += usize::from(a.diff_table().iter().any(|v| !v.is_zero()));
        let positive = a.basis().max_degree().unwrap() > 0;
        let window = if positive { (-2, 3) } else { (-3, 3) };
        regular_axioms(&a, window).map_err(|e| format!("{e} ({})", hochkit::algebra_to_json(&a)))?;
    }
    ensure!(with_products > 0 && with_differential > 0, "random sample lacks products or differentials");
    Ok(())
}

fn limit_equals_direct() -> Result<(), String> {
    for g in group_models()? {
        let a = g.exterior().clone();
        let depth = -a.basis().min_degree().unwrap();
        let step = g.exterior_degrees().iter().map(|d| d.abs()).min().unwrap();
        let stages = ((depth + step - 1) / step) as usize + 3;
        let window = (-3, 6);
        let tower = truncation_tower(&a, stages).map_err(err)?;
        let limit = hh_inverse_limit(a.clone(), &tower, window).map_err(err)?;
        ensure!(limit.stabilized(), "{}: unstabilized {:?}", g.name(), limit.unstabilized_degrees);
        let direct = hh_cohomology(a.clone(), Arc::new(DGBimodule::regular(a.clone())), window).map_err(err)?;
        for t in window.0..=window.1 {
            ensure!(limit.dims()[&t] == direct.dims[&t], "{} degree {t}: limit {} direct {}", g.name(), limit.dims()[&t], direct.dims[&t]);
        }
    }
    Ok(())
}

fn hochschild_homology() -> Result<(), String> {
    let a = Arc::new(DGAlgebra::exterior(q(), &[-1]).map_err(err)?);
    let m = Arc::new(DGBimodule::regular(a.clone()));
    let dims = hh_homology(a, m, (-12, 2)).map_err(err)?.dims().map_err(err)?;
    for t in -12..=2 {
        ensure!(dims[&t] == usize::from(t <= 0), "degree {t}: dim {}", dims[&t]);
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, Check, u64); 8] = [
        ("Koszul-duality verification for S1 and SU(2)", koszul_verification, 120),
        ("inverse limit over the circle tower, Mittag-Leffler failure detected", inverse_limit, 120),
        ("bar-cobar duality witness, sign flip detected", bar_cobar_duality, 30),
        ("bar-cobar unit is a quasi-isomorphism", bar_cobar_unit_check, 60),
        ("Koszul-dual cohomology", koszul_dual_homology, 60),
        ("Hochschild axioms on models and 20 random algebras", hochschild_properties, 120),
        ("inverse limit over the truncation tower equals direct HH", limit_equals_direct, 120),
        ("Hochschild homology of the exterior algebra", hochschild_homology, 30),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {}: PASS  {name} ({secs:.1}s, budget {budget}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
