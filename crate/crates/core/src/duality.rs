//! The duality `B(S^∨) ≅ Ω(S)^∨` and the bar–cobar unit `R → Ω(B(R))`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::bar::{reduced_bar, Word};
use crate::cobar::reduced_cobar;
use crate::dg::{dualize_algebra, dualize_coalgebra, DGAlgebra, DGCoalgebra};
use crate::error::Result;
use crate::linalg::SparseVec;
use crate::scalar::FieldScalar;

/// Outcome of checking the duality witness on a window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub window: (i64, i64),
    pub words_checked: usize,
    pub bijective: bool,
    pub chain_map: bool,
    pub comultiplicative: bool,
    /// First failing check and the word witnessing it.
    pub failure: Option<String>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Deliberate corruption of the witness map, for testing the checker.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WitnessFault {
    /// Negate the image of every word with this many letters.
    pub flip_sign_at_length: Option<usize>,
}

/// Checks the map `B(S^∨) → Ω(S)^∨`, `[x₁*|…|xₙ*] ↦ σ·[x₁|…|xₙ]*` with
/// `σ = (−1)^{Σ|xᵢ| + Σ_{i<j} eᵢeⱼ}`, `eᵢ = |xᵢ| + 1`, on words of `B(S^∨)` whose
/// degree lies in `window`: bijection on bases, chain map, comultiplicative.
pub fn check_bar_cobar_duality(s: &DGCoalgebra, window: (i64, i64)) -> Result<DualityReport> {
    check_bar_cobar_duality_with(s, window, WitnessFault::default())
}

pub fn check_bar_cobar_duality_with(
    s: &DGCoalgebra,
    window: (i64, i64),
    fault: WitnessFault,
) -> Result<DualityReport> {
    check_with_sign(s, window, fault, &witness_sign_exponent)
}

/// Exponent of the witness sign for a word with letters of the given
/// degrees in `S`.
fn witness_sign_exponent(degrees: &[i64]) -> i64 {
    let mut exp: i64 = degrees.iter().sum();
    for i in 0..degrees.len() {
        for j in i + 1..degrees.len() {
            exp += (degrees[i] + 1) * (degrees[j] + 1);
        }
    }
    exp
}

fn check_with_sign(
    s: &DGCoalgebra,
    window: (i64, i64),
    fault: WitnessFault,
    sign_exponent: &dyn Fn(&[i64]) -> i64,
) -> Result<DualityReport> {
    s.require_valid()?;
    let f = s.field();
    let dual = Arc::new(dualize_coalgebra(s));
    // one extra degree on the side where the words grow keeps Δ and d exact
    let bar = reduced_bar(dual.clone(), (window.0.min(0), window.1.max(0)))?;
    let omega = reduced_cobar(Arc::new(s.clone()), (-window.1.max(0), -window.0.min(0)))?;
    let omega_dual = dualize_algebra(&omega.algebra()?);
    // letters of B(S^∨) are duals of letters of Ω(S)
    let to_s = |a: usize| -> usize {
        let name = dual.basis().name(a);
        let plain = name.strip_suffix('*').map(str::to_string).unwrap_or_else(|| format!("{name}*"));
        s.basis().id(&plain).expect("dual letter names match")
    };
    let target_of = |w: &Word| -> Option<(usize, FieldScalar)> {
        let letters: Vec<usize> = w.letters.iter().map(|a| to_s(*a)).collect();
        let (t, i) = omega.position(&Word::ground(letters.clone()))?;
        let z = omega_dual.basis().id(&star(&omega.complex().space().labels(t)[i], letters.is_empty()))?;
        let degrees: Vec<i64> = letters.iter().map(|x| s.degree(*x)).collect();
        let mut sign = f.sign(sign_exponent(&degrees));
        if fault.flip_sign_at_length == Some(w.len()) {
            sign = -sign;
        }
        Some((z, sign))
    };
    let mut report = DualityReport {
        window,
        words_checked: 0,
        bijective: true,
        chain_map: true,
        comultiplicative: true,
        failure: None,
    };
    let (blo, bhi) = bar.complex().known().unwrap();
    let mut image: BTreeMap<i64, Vec<(usize, FieldScalar)>> = BTreeMap::new();
    for t in blo..=bhi {
        let ws = bar.words(t);
        let targets = omega_dual.basis().in_degree(t);
        let mut hit = vec![false; targets.len()];
        let mut imgs = Vec::new();
        for (i, w) in ws.iter().enumerate() {
            match target_of(w) {
                Some((z, c)) if omega_dual.degree(z) == t && !hit[omega_dual.basis().local_index(z)] => {
                    hit[omega_dual.basis().local_index(z)] = true;
                    imgs.push((z, c));
                }
                _ => {
                    report.bijective = false;
                    report.failure =
                        Some(format!("word {} has no distinct dual word", bar.complex().space().labels(t)[i]));
                    return Ok(report);
                }
            }
        }
        if hit.iter().any(|h| !h) {
            report.bijective = false;
            report.failure = Some(format!("degree {t}: dual words not all hit"));
            return Ok(report);
        }
        image.insert(t, imgs);
    }
    let phi = |t: i64, i: usize| -> SparseVec {
        let (z, c) = &image[&t][i];
        SparseVec::from_pairs([(*z, c.clone())])
    };
    let phi_vec = |v: &[(Word, FieldScalar)]| -> SparseVec {
        let mut acc = SparseVec::new();
        for (w, c) in v {
            let (t, i) = bar.position(w).expect("word in range");
            acc = acc.add_scaled(c, &phi(t, i));
        }
        acc
    };
    let (wlo, whi) = window;
    for t in wlo..=whi {
        for (i, w) in bar.words(t).iter().enumerate() {
            report.words_checked += 1;
            let label = &bar.complex().space().labels(t)[i];
            if t < bhi {
                let dw: Vec<(Word, FieldScalar)> = bar.differential_of(w).into_iter().collect();
                let lhs = phi_vec(&dw);
                let rhs = omega_dual.d_vec(&phi(t, i));
                if lhs != rhs {
                    report.chain_map = false;
                    report.failure = Some(format!("chain map fails on {label}"));
                    return Ok(report);
                }
            }
            // (φ⊗φ)Δ_B w against Δ φ(w)
            let mut lhs: BTreeMap<(usize, usize), FieldScalar> = BTreeMap::new();
            for (u, v) in bar.coproduct(w) {
                let (tu, iu) = bar.position(&u).unwrap();
                let (tv, iv) = bar.position(&v).unwrap();
                let (zu, cu) = &image[&tu][iu];
                let (zv, cv) = &image[&tv][iv];
                lhs.insert((*zu, *zv), cu * cv);
            }
            let (z, c) = &image[&t][i];
            let mut rhs: BTreeMap<(usize, usize), FieldScalar> = BTreeMap::new();
            for (x, y, e) in omega_dual.coproduct(*z) {
                rhs.insert((*x, *y), c * e);
            }
            if lhs != rhs {
                report.comultiplicative = false;
                report.failure = Some(format!("comultiplicativity fails on {label}"));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

fn star(label: &str, empty: bool) -> String {
    if empty {
        "1".into()
    } else {
        format!("{label}*")
    }
}

/// Outcome of checking the unit `R → Ω(B(R))` on a window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitReport {
    pub window: (i64, i64),
    pub source_dims: BTreeMap<i64, usize>,
    pub target_dims: BTreeMap<i64, usize>,
    /// `u(dx) = d u(x)` on basis elements.
    pub chain_map: bool,
    /// The induced map on cohomology is bijective in every window degree.
    pub isomorphism: bool,
    /// `u(xy) − u(x)u(y)` is a coboundary for cohomology representatives;
    /// `u` is multiplicative only up to homotopy at cochain level.
    pub multiplicative_in_cohomology: bool,
    /// The counit `Ω(B(R)) → R` is a strict map of DG algebras.
    pub counit_strict: bool,
}

impl UnitReport {
    pub fn passed(&self) -> bool {
        self.chain_map && self.isomorphism && self.multiplicative_in_cohomology && self.counit_strict
    }
}

/// Builds `Ω(B(R))` on `window` and checks the unit `x ↦ [[x]]`.
pub fn bar_cobar_unit(r: Arc<DGAlgebra>, window: (i64, i64)) -> Result<UnitReport> {
    r.require_valid()?;
    let f = r.field();
    let b = reduced_bar(r.clone(), ((window.0 - 1).min(0), window.1.max(0)))?;
    let c = Arc::new(b.coalgebra()?);
    let omega = reduced_cobar(c.clone(), window)?;
    let oa = omega.algebra()?;
    let (olo, ohi) = omega.complex().known().unwrap();
    let in_range = |d: i64| olo <= d && d <= ohi;
    // bar word [x] ↦ coalgebra id ↦ Ω word [[x]]
    let letter = |x: usize| -> usize {
        let w = Word::ground(vec![x]);
        let (t, i) = b.position(&w).expect("one-letter word in range");
        c.basis().global(t, i)
    };
    let unit_img = |x: usize| -> Option<SparseVec> {
        if !in_range(r.degree(x)) {
            return None;
        }
        let w = if x == r.unit() { Word::ground(vec![]) } else { Word::ground(vec![letter(x)]) };
        let (t, i) = omega.position(&w)?;
        Some(SparseVec::unit(oa.basis().global(t, i), f))
    };
    let u_vec = |v: &SparseVec| -> Option<SparseVec> {
        let mut acc = SparseVec::new();
        for (x, e) in v.iter() {
            acc = acc.add_scaled(e, &unit_img(*x)?);
        }
        Some(acc)
    };
    let mut chain_map = true;
    for x in 0..r.dim() {
        if r.degree(x) < olo || r.degree(x) >= ohi {
            continue;
        }
        if u_vec(r.d(x)) != Some(oa.d_vec(&unit_img(x).unwrap())) {
            chain_map = false;
        }
    }
    let source = r.complex().cohomology(window.0, window.1)?;
    let target = omega.complex().cohomology(window.0, window.1)?;
    let source_dims: BTreeMap<i64, usize> = source.iter().map(|h| (h.degree, h.dim)).collect();
    let target_dims: BTreeMap<i64, usize> = target.iter().map(|h| (h.degree, h.dim)).collect();
    let to_global_r = |d: i64, v: &SparseVec| v.map_indices(|i| r.basis().global(d, i));
    let to_local_o = |v: &SparseVec| v.map_indices(|i| oa.basis().local_index(i));
    let mut isomorphism = source_dims == target_dims;
    for (hs, ht) in source.iter().zip(&target) {
        if !isomorphism {
            break;
        }
        let coords: Vec<SparseVec> = hs
            .representatives
            .iter()
            .map(|z| {
                let img = u_vec(&to_global_r(hs.degree, z)).expect("degree in range");
                ht.coordinates(&to_local_o(&img)).expect("image of a cocycle is a cocycle")
            })
            .collect();
        let m = crate::linalg::SparseMatrix::from_columns(f, ht.dim, coords);
        isomorphism &= m.rank() == hs.dim;
    }
    let mut multiplicative_in_cohomology = true;
    for hs in &source {
        for ht in &source {
            let d = hs.degree + ht.degree;
            let Some(hd) = target.iter().find(|h| h.degree == d) else { continue };
            for z1 in &hs.representatives {
                for z2 in &ht.representatives {
                    let (g1, g2) = (to_global_r(hs.degree, z1), to_global_r(ht.degree, z2));
                    let (Some(u1), Some(u2), Some(u12)) = (u_vec(&g1), u_vec(&g2), u_vec(&r.mul_vec(&g1, &g2))) else {
                        continue;
                    };
                    let diff = u12.sub(&oa.mul_vec(&u1, &u2));
                    if !hd.is_coboundary(&to_local_o(&diff)) {
                        multiplicative_in_cohomology = false;
                    }
                }
            }
        }
    }
    let counit_strict = check_counit(&r, &b, &c, &omega, &oa)?;
    Ok(UnitReport { window, source_dims, target_dims, chain_map, isomorphism, multiplicative_in_cohomology, counit_strict })
}

/// Counit `Ω(B(R)) → R`: `[w₁]…[wₖ] ↦ ε(w₁)…ε(wₖ)` where `ε[x] = x` and
/// longer bar words go to zero. Checked as a chain map and multiplicative on
/// basis words whose terms stay in range.
fn check_counit(
    r: &DGAlgebra,
    b: &crate::bar::BarComplex,
    c: &DGCoalgebra,
    omega: &crate::cobar::CobarComplex,
    oa: &DGAlgebra,
) -> Result<bool> {
    let f = r.field();
    // coalgebra id → R element for one-letter bar words
    let mut eps1: Vec<Option<usize>> = vec![None; c.dim()];
    for t in b.complex().space().degrees() {
        for (i, w) in b.words(t).iter().enumerate() {
            if w.len() == 1 {
                eps1[c.basis().global(t, i)] = Some(w.letters[0]);
            }
        }
    }
    let eps_word = |w: &Word| -> SparseVec {
        let mut acc = SparseVec::unit(r.unit(), f);
        for x in &w.letters {
            match eps1[*x] {
                Some(a) => acc = r.mul_vec(&acc, &SparseVec::unit(a, f)),
                None => return SparseVec::new(),
            }
        }
        acc
    };
    let word_of: Vec<Word> = (0..oa.dim())
        .map(|g| {
            let d = oa.degree(g);
            omega.words(d)[oa.basis().local_index(g)].clone()
        })
        .collect();
    let eps_vec = |v: &SparseVec| {
        let mut acc = SparseVec::new();
        for (g, e) in v.iter() {
            acc = acc.add_scaled(e, &eps_word(&word_of[*g]));
        }
        acc
    };
    let (lo, hi) = omega.complex().known().unwrap();
    let exact = |d: i64| r.exact_range().is_none_or(|(a, z)| a <= d && d <= z);
    for g in 0..oa.dim() {
        let d = oa.degree(g);
        if d < hi && exact(d + 1) && eps_vec(oa.d(g)) != r.d_vec(&eps_word(&word_of[g])) {
            return Ok(false);
        }
        for h in 0..oa.dim() {
            let e = d + oa.degree(h);
            if e < lo || e > hi || !exact(e) {
                continue;
            }
            let lhs = eps_vec(oa.mul(g, h));
            let rhs = r.mul_vec(&eps_word(&word_of[g]), &eps_word(&word_of[h]));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn duality_for_ground_coalgebra() {
        let r = check_bar_cobar_duality(&DGCoalgebra::ground(q()), (-2, 2)).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn duality_for_primitive_coalgebras() {
        for d in [1, 3] {
            let s = DGCoalgebra::exterior_primitive(q(), &[d]).unwrap();
            let r = check_bar_cobar_duality(&s, (-12, 0)).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.words_checked > 0);
        }
    }

    #[test]
    fn duality_with_differential_and_coproduct() {
        let cases = [
            DGCoalgebra::divided_power(q(), 2, 4).unwrap(),
            dualize_algebra(&DGAlgebra::truncated_free(q(), &[("u", -2), ("v", -1)], &[(0, 1, 1)], 2).unwrap()),
            dualize_algebra(&DGAlgebra::truncated_free(q(), &[("u", -3), ("v", -2)], &[(0, 1, 1)], 3).unwrap()),
        ];
        for s in cases {
            let neg = s.degree(s.supplementation_ideal()[0]) > 0;
            let w = if neg { (-8, 0) } else { (0, 8) };
            let r = check_bar_cobar_duality(&s, w).unwrap();
            assert!(r.passed(), "{}: {r:?}", s.name());
        }
    }

    #[test]
    fn injected_sign_flip_detected() {
        let s = DGCoalgebra::exterior_primitive(q(), &[1]).unwrap();
        let fault = WitnessFault { flip_sign_at_length: Some(2) };
        let r = check_bar_cobar_duality_with(&s, (-12, 0), fault).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn unit_for_ground_field() {
        let r = bar_cobar_unit(Arc::new(DGAlgebra::ground(q())), (-2, 2)).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn unit_for_exterior() {
        let r = bar_cobar_unit(Arc::new(DGAlgebra::exterior(q(), &[-1]).unwrap()), (-6, 0)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.target_dims[&0], 1);
        assert_eq!(r.target_dims[&-1], 1);
        assert_eq!(r.target_dims.values().sum::<usize>(), 2);
    }

    #[test]
    fn unit_for_polynomial() {
        let r = bar_cobar_unit(Arc::new(DGAlgebra::polynomial(q(), &[2], 12).unwrap()), (0, 6)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.source_dims, r.target_dims);
    }

    #[test]
    fn unit_for_algebra_with_differential() {
        let a = DGAlgebra::truncated_free(q(), &[("u", -2), ("v", -1)], &[(0, 1, 1)], 2).unwrap();
        let r = bar_cobar_unit(Arc::new(a), (-5, 0)).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
