//! Formal rational models of compact Lie groups: the exterior homology
//! algebra of `G` and the polynomial cohomology algebra of `BG`, the tower
//! of truncated polynomial coefficients, and a comparison of their
//! Hochschild cohomology rings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bar::koszul_dual;
use crate::dg::{DGAlgebra, DGBimodule};
use crate::error::{Error, Result};
use crate::hochschild::{hh_cohomology, GradedRingPresentation};
use crate::limit::{hh_inverse_limit, CoefficientTower, LimitReport, DEFAULT_CONFIRMATIONS};
use crate::scalar::Field;

/// Paired exterior and polynomial generator degrees of a group model.
///
/// An exterior generator of homological degree `d` sits in cohomological
/// degree `−d` and pairs with a polynomial generator of degree `d + 1`.
#[derive(Clone, Debug)]
pub struct GroupModel {
    name: String,
    field: Field,
    exterior_degrees: Vec<i64>,
    polynomial_degrees: Vec<i64>,
    exterior: Arc<DGAlgebra>,
}

impl GroupModel {
    /// Built-in models: `S1`, `T2`, `SU2`, `SU3` (case-insensitive).
    pub fn builtin(name: &str, field: Field) -> Result<Self> {
        let (ext, poly): (&[i64], &[i64]) = match name.to_ascii_lowercase().as_str() {
            "s1" => (&[-1], &[2]),
            "t2" => (&[-1, -1], &[2, 2]),
            "su2" => (&[-3], &[4]),
            "su3" => (&[-3, -5], &[4, 6]),
            _ => {
                return Err(Error::InvalidModel(format!("unknown group {name:?}; expected s1, t2, su2 or su3")))
            }
        };
        Self::custom(name.to_ascii_uppercase(), field, ext, poly)
    }

    /// A model from explicit degree lists, checked for parity and pairing.
    pub fn custom(name: impl Into<String>, field: Field, exterior: &[i64], polynomial: &[i64]) -> Result<Self> {
        if let Some(d) = exterior.iter().find(|d| **d >= 0 || *d % 2 == 0) {
            return Err(Error::InvalidModel(format!("exterior degree {d} is not negative odd")));
        }
        if let Some(d) = polynomial.iter().find(|d| **d <= 0 || *d % 2 != 0) {
            return Err(Error::InvalidModel(format!("polynomial degree {d} is not positive even")));
        }
        let mut needed: Vec<i64> = exterior.iter().map(|d| 1 - d).collect();
        let mut given = polynomial.to_vec();
        needed.sort();
        given.sort();
        if needed != given {
            return Err(Error::InvalidModel(format!(
                "degree pairing: exterior {exterior:?} needs polynomial {needed:?}, got {polynomial:?}"
            )));
        }
        Self::unpaired(name, field, exterior, polynomial)
    }

    /// A model without the pairing check, for comparing unrelated algebras.
    pub fn unpaired(name: impl Into<String>, field: Field, exterior: &[i64], polynomial: &[i64]) -> Result<Self> {
        if polynomial.iter().any(|d| *d <= 0) {
            return Err(Error::InvalidModel("polynomial degrees must be positive".into()));
        }
        let name = name.into();
        let ext = DGAlgebra::exterior(field, exterior)?.with_name(format!("C_*({name})"));
        ext.require_valid()?;
        Ok(GroupModel {
            name,
            field,
            exterior_degrees: exterior.to_vec(),
            polynomial_degrees: polynomial.to_vec(),
            exterior: Arc::new(ext),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn exterior_degrees(&self) -> &[i64] {
        &self.exterior_degrees
    }

    pub fn polynomial_degrees(&self) -> &[i64] {
        &self.polynomial_degrees
    }

    /// The exterior algebra modelling `C_*(G)`.
    pub fn exterior(&self) -> &Arc<DGAlgebra> {
        &self.exterior
    }

    /// The polynomial algebra modelling `C^*(BG)`, exact through degree `top`.
    pub fn polynomial(&self, top: i64) -> Result<Arc<DGAlgebra>> {
        let p = DGAlgebra::polynomial(self.field, &self.polynomial_degrees, top)?
            .with_name(format!("C^*(B{})", self.name));
        Ok(Arc::new(p))
    }

    /// Truncation degree `D_n = n · (largest polynomial generator degree)`.
    pub fn stage_degree(&self, n: usize) -> i64 {
        n as i64 * self.polynomial_degrees.iter().copied().max().unwrap_or(0)
    }

    /// Stage `n` of the coefficient tower: the polynomial model modulo
    /// degrees above `D_n`, as a bimodule over `poly`.
    pub fn stage_module(&self, poly: &Arc<DGAlgebra>, n: usize) -> Result<DGBimodule> {
        if n == 0 {
            return Err(Error::DimensionMismatch("stages are numbered from 1".into()));
        }
        Ok(DGBimodule::regular(poly.clone()).truncate_above(self.stage_degree(n))?.0)
    }

    /// The polynomial algebra and stages `1..=stages`, with the algebra exact
    /// far enough for Hochschild cochains on `window` with the top stage.
    pub fn stage_tower(&self, window: (i64, i64), stages: usize) -> Result<(Arc<DGAlgebra>, CoefficientTower)> {
        let top = self.stage_degree(stages) - window.0 + 2;
        let poly = self.polynomial(top)?;
        let tops: Vec<i64> = (1..=stages).map(|n| self.stage_degree(n)).collect();
        let tower = CoefficientTower::truncated_above(&DGBimodule::regular(poly.clone()), &tops)?;
        Ok((poly, tower))
    }

    /// Number of stages after which every degree up to `hi` can have
    /// stabilized, with room for the confirming isomorphisms.
    pub fn default_stages(&self, window: (i64, i64)) -> usize {
        let step = self.polynomial_degrees.iter().copied().max().unwrap_or(1).max(1);
        let reach = (window.1.max(0) + step + step - 1) / step;
        reach as usize + DEFAULT_CONFIRMATIONS + 1
    }
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (exterior {:?}, polynomial {:?})", self.name, self.exterior_degrees, self.polynomial_degrees)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// The first disagreement found, in the order: dimensions, products,
/// Koszul duals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub check: String,
    pub degree: i64,
    /// Second degree for product checks.
    pub other_degree: Option<i64>,
    pub exterior: usize,
    pub polynomial: usize,
}

/// Comparison of `HH*(C_*(G))` with `HH*(C^*(BG))` on a window.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub group: String,
    pub window: (i64, i64),
    pub field: Field,
    pub exterior: GradedRingPresentation,
    /// The limit over the stage tower, on its stabilized degrees.
    pub polynomial: GradedRingPresentation,
    pub limit: LimitReport,
    /// `(exterior, polynomial)` dimensions per degree; `None` on the
    /// polynomial side for unstabilized degrees.
    pub dims: BTreeMap<i64, (usize, Option<usize>)>,
    /// `(exterior, polynomial)` product ranks per degree pair.
    pub product_ranks: BTreeMap<(i64, i64), (usize, usize)>,
    /// Koszul dual of the exterior model against the polynomial Hilbert
    /// series, and the reverse.
    pub koszul_dual_dims: BTreeMap<String, BTreeMap<i64, (usize, usize)>>,
    pub unstabilized_degrees: Vec<i64>,
    pub first_discrepancy: Option<Discrepancy>,
    /// Set over `F_p`, where the formal models need not compute the group's
    /// actual chain algebras.
    pub formality_caveat: bool,
    pub verdict: Verdict,
}

/// Runs the comparison with the default number of tower stages.
pub fn verify_koszul_duality(g: &GroupModel, window: (i64, i64)) -> Result<VerificationReport> {
    verify_koszul_duality_with(g, window, g.default_stages(window))
}

pub fn verify_koszul_duality_with(g: &GroupModel, window: (i64, i64), stages: usize) -> Result<VerificationReport> {
    let ext_ring = hh_cohomology(
        g.exterior().clone(),
        Arc::new(DGBimodule::regular(g.exterior().clone())),
        window,
    )?;
    let (poly, tower) = g.stage_tower(window, stages)?;
    let limit = hh_inverse_limit(poly.clone(), &tower, window)?;
    let poly_ring = limit
        .limit
        .clone()
        .ok_or_else(|| Error::Validation("the stage tower failed the surjectivity check".into()))?;

    let mut first: Option<Discrepancy> = None;
    let mut note = |d: Discrepancy| {
        if first.is_none() {
            first = Some(d);
        }
    };

    let mut dims = BTreeMap::new();
    for t in window.0..=window.1 {
        let e = ext_ring.dims[&t];
        let p = poly_ring.dims.get(&t).copied();
        if let Some(p) = p {
            if p != e {
                note(Discrepancy { check: "dimension".into(), degree: t, other_degree: None, exterior: e, polynomial: p });
            }
        }
        dims.insert(t, (e, p));
    }

    let mut product_ranks = BTreeMap::new();
    let er = ext_ring.product_ranks().unwrap_or_default();
    let pr = poly_ring.product_ranks().unwrap_or_default();
    for ((i, j), e) in &er {
        let Some(p) = pr.get(&(*i, *j)) else { continue };
        if e != p {
            note(Discrepancy {
                check: "product rank".into(),
                degree: *i,
                other_degree: Some(*j),
                exterior: *e,
                polynomial: *p,
            });
        }
        product_ranks.insert((*i, *j), (*e, *p));
    }

    // H(koszul_dual(exterior)) against the polynomial Hilbert series, and back
    let mut koszul_dual_dims = BTreeMap::new();
    let ext_dual = koszul_dual(g.exterior().clone(), window)?.cohomology_dims()?;
    let poly_dims = poly.basis().space(g.field()).dims();
    let mut rows = BTreeMap::new();
    for (t, d) in ext_dual {
        let p = poly_dims.get(&t).copied().unwrap_or(0);
        if p != d {
            note(Discrepancy { check: "koszul dual of exterior".into(), degree: t, other_degree: None, exterior: d, polynomial: p });
        }
        rows.insert(t, (d, p));
    }
    koszul_dual_dims.insert("exterior".to_string(), rows);
    let poly_dual = koszul_dual(poly.clone(), window)?.cohomology_dims()?;
    let ext_dims = g.exterior().basis().space(g.field()).dims();
    let mut rows = BTreeMap::new();
    for (t, d) in poly_dual {
        let e = ext_dims.get(&t).copied().unwrap_or(0);
        if e != d {
            note(Discrepancy { check: "koszul dual of polynomial".into(), degree: t, other_degree: None, exterior: e, polynomial: d });
        }
        rows.insert(t, (e, d));
    }
    koszul_dual_dims.insert("polynomial".to_string(), rows);

    let verdict = if first.is_some() {
        Verdict::Fail
    } else if !limit.unstabilized_degrees.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(VerificationReport {
        group: g.name().to_string(),
        window,
        field: g.field(),
        exterior: ext_ring,
        polynomial: poly_ring,
        unstabilized_degrees: limit.unstabilized_degrees.clone(),
        limit,
        dims,
        product_ranks,
        koszul_dual_dims,
        first_discrepancy: first,
        formality_caveat: matches!(g.field(), Field::Prime(_)),
        verdict,
    })
}

/// Tower of truncations of a finite algebra regarded as a bimodule over
/// itself: quotients by degrees beyond `n · step`, where `step` is the
/// smallest nonzero degree size. Positive algebras are cut from above,
/// negative ones from below.
pub fn truncation_tower(a: &Arc<DGAlgebra>, stages: usize) -> Result<CoefficientTower> {
    let degs: Vec<i64> = (0..a.dim()).map(|x| a.degree(x)).filter(|d| *d != 0).collect();
    let step = degs.iter().map(|d| d.abs()).min().unwrap_or(1);
    let m = DGBimodule::regular(a.clone());
    let depths: Vec<i64> = (1..=stages as i64).map(|n| n * step).collect();
    if degs.iter().all(|d| *d > 0) {
        CoefficientTower::truncated_above(&m, &depths)
    } else if degs.iter().all(|d| *d < 0) {
        CoefficientTower::truncated_below(&m, &depths)
    } else {
        Err(Error::NotConnected(format!("{} has degrees of both signs", a.name())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn builtin_models_validate() {
        for g in ["s1", "t2", "su2", "su3"] {
            let m = GroupModel::builtin(g, q()).unwrap();
            m.exterior().require_valid().unwrap();
            m.polynomial(12).unwrap().require_valid().unwrap();
        }
        let su2 = GroupModel::builtin("su2", q()).unwrap();
        assert_eq!(su2.exterior_degrees(), &[-3]);
        assert_eq!(su2.polynomial_degrees(), &[4]);
    }

    #[test]
    fn custom_models_check_pairing() {
        let err = GroupModel::custom("bad", q(), &[-1], &[4]).unwrap_err();
        assert!(err.to_string().contains("[2]"), "{err}");
        assert!(GroupModel::custom("even", q(), &[-2], &[3]).is_err());
        assert!(GroupModel::custom("ok", q(), &[-1, -3], &[4, 2]).is_ok());
    }

    #[test]
    fn first_stage_of_circle_is_dual_numbers() {
        let g = GroupModel::builtin("s1", q()).unwrap();
        let poly = g.polynomial(10).unwrap();
        let m = g.stage_module(&poly, 1).unwrap();
        let names: Vec<&str> = (0..m.dim()).map(|i| m.basis().name(i)).collect();
        assert_eq!(names, ["1", "x"]);
    }

    #[test]
    fn stage_maps_compose_and_are_onto() {
        let g = GroupModel::builtin("su2", q()).unwrap();
        let (_, tower) = g.stage_tower((0, 4), 3).unwrap();
        let maps = tower.maps();
        let composed = maps[0].compose(&maps[1]).unwrap();
        let space3 = tower.stages()[2].complex().space();
        let space1 = tower.stages()[0].complex().space();
        for d in space3.degrees() {
            for i in 0..space3.dim(d) {
                let img = composed.apply(d, &crate::linalg::SparseVec::unit(i, q()));
                let name = &space3.labels(d)[i];
                let expect = space1.index_of(d, name);
                assert_eq!(img.nnz(), usize::from(expect.is_some()));
            }
        }
        for m in maps {
            for d in m.target().degrees() {
                assert_eq!(m.block(d).rank(), m.target().dim(d));
            }
        }
    }

    #[test]
    fn circle_and_su2_pass() {
        let s1 = verify_koszul_duality(&GroupModel::builtin("s1", q()).unwrap(), (-1, 8)).unwrap();
        assert_eq!(s1.verdict, Verdict::Pass, "{:?}", s1.first_discrepancy);
        assert!(s1.dims.values().all(|(e, p)| *e == 1 && *p == Some(1)));
        let su2 = verify_koszul_duality(&GroupModel::builtin("su2", q()).unwrap(), (-3, 12)).unwrap();
        assert_eq!(su2.verdict, Verdict::Pass, "{:?}", su2.first_discrepancy);
        let ones: Vec<i64> = su2.dims.iter().filter(|(_, (e, _))| *e == 1).map(|(t, _)| *t).collect();
        assert_eq!(ones, [-3, 0, 1, 4, 5, 8, 9, 12]);
    }

    #[test]
    fn mismatched_model_fails_with_a_degree() {
        let g = GroupModel::unpaired("mismatch", q(), &[-3], &[2]).unwrap();
        let r = verify_koszul_duality(&g, (-3, 6)).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.first_discrepancy.is_some());
    }
}
