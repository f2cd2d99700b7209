//! Inverse limits of Hochschild cohomology along towers of coefficient
//! bimodules `M₁ ← M₂ ← …`, with per-degree stabilization certificates.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dg::{check_bimodule_map, module_map, DGAlgebra, DGBimodule};
use crate::error::{Error, Result};
use crate::graded::GradedMap;
use crate::hochschild::{hochschild_complex, GradedRingPresentation, HochschildCochain, HochschildComplex};
use crate::linalg::{SparseMatrix, SparseVec};

/// Bimodules `stages[i]` over a common algebra with maps
/// `maps[i] : stages[i + 1] → stages[i]`.
#[derive(Clone, Debug)]
pub struct CoefficientTower {
    stages: Vec<Arc<DGBimodule>>,
    maps: Vec<GradedMap>,
    labels: Vec<usize>,
}

impl CoefficientTower {
    /// Checks that every map is a degree-0 bimodule chain map. Stages are
    /// labelled `1, 2, …`.
    pub fn new(stages: Vec<Arc<DGBimodule>>, maps: Vec<GradedMap>) -> Result<Self> {
        if stages.is_empty() || maps.len() + 1 != stages.len() {
            return Err(Error::DimensionMismatch(format!(
                "a tower of {} stages needs {} maps, got {}",
                stages.len(),
                stages.len().saturating_sub(1),
                maps.len()
            )));
        }
        for (i, map) in maps.iter().enumerate() {
            let (src, tgt) = (&stages[i + 1], &stages[i]);
            if map.degree() != 0 || map.source() != src.complex().space() || map.target() != tgt.complex().space() {
                return Err(Error::DimensionMismatch(format!("tower map {} has the wrong shape", i + 1)));
            }
            check_bimodule_map(src, tgt, map).into_result()?;
        }
        let labels = (1..=stages.len()).collect();
        Ok(CoefficientTower { stages, maps, labels })
    }

    /// Relabels stages, e.g. to match the truncation index `n`.
    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.stages.len() {
            return Err(Error::DimensionMismatch("one label per stage".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    /// The tower of quotients `M / (degree > topᵢ)` of `m` for increasing
    /// `tops`, with the evident projections.
    pub fn truncated_above(m: &DGBimodule, tops: &[i64]) -> Result<Self> {
        let stages: Vec<DGBimodule> =
            tops.iter().map(|&t| m.truncate_above(t).map(|(q, _)| q)).collect::<Result<_>>()?;
        Self::by_names(stages)
    }

    /// The tower of quotients `M / (degree < −depthᵢ)` of `m` for increasing
    /// `depths`.
    pub fn truncated_below(m: &DGBimodule, depths: &[i64]) -> Result<Self> {
        let stages: Vec<DGBimodule> =
            depths.iter().map(|&d| m.truncate_below(-d).map(|(q, _)| q)).collect::<Result<_>>()?;
        Self::by_names(stages)
    }

    /// Connects stages by sending each basis element to the element of the
    /// same name in the previous stage, or to zero.
    fn by_names(stages: Vec<DGBimodule>) -> Result<Self> {
        let mut maps = Vec::new();
        for w in stages.windows(2) {
            let (tgt, src) = (&w[0], &w[1]);
            let f = src.field();
            maps.push(module_map(src, tgt, |x| {
                tgt.basis().id(src.basis().name(x)).map(|y| SparseVec::unit(y, f)).unwrap_or_default()
            })?);
        }
        Self::new(stages.into_iter().map(Arc::new).collect(), maps)
    }

    pub fn stages(&self) -> &[Arc<DGBimodule>] {
        &self.stages
    }

    pub fn maps(&self) -> &[GradedMap] {
        &self.maps
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Replaces the map out of stage `i + 1`; used to probe the surjectivity
    /// check with a deliberately bad stage.
    pub fn with_map(mut self, i: usize, map: GradedMap) -> Result<Self> {
        if i >= self.maps.len() {
            return Err(Error::DimensionMismatch(format!("tower has no map {i}")));
        }
        self.maps[i] = map;
        Self::new(self.stages, self.maps)?.with_labels(self.labels)
    }
}

/// Result of a limit computation over a finite piece of a tower.
#[derive(Clone, Debug)]
pub struct LimitReport {
    pub window: (i64, i64),
    /// `(stage label, module degree)` where a tower map is not onto.
    pub mittag_leffler_failures: Vec<(usize, i64)>,
    /// Cohomology dimensions at each stage, by label.
    pub stage_dims: BTreeMap<usize, BTreeMap<i64, usize>>,
    /// Smallest label from which every later induced map on `H^t` is an
    /// isomorphism, with at least the required number of such maps.
    pub stabilization: BTreeMap<i64, usize>,
    pub unstabilized_degrees: Vec<i64>,
    /// Set when some degree did not stabilize, so a `lim¹` term cannot be
    /// ruled out from the stages given.
    pub lim1_unresolved: bool,
    /// The limit ring on the stabilized degrees, read off the last stage.
    pub limit: Option<GradedRingPresentation>,
}

impl LimitReport {
    pub fn stabilized(&self) -> bool {
        self.mittag_leffler_failures.is_empty() && self.unstabilized_degrees.is_empty()
    }

    /// Limit dimensions on the stabilized degrees.
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.limit.as_ref().map(|l| l.dims.clone()).unwrap_or_default()
    }
}

/// `lim_n HH^*(A, M_n)` on a window.
///
/// Tower maps must be onto in every degree (the Mittag-Leffler condition at
/// the coefficient level); otherwise the report lists the failures and
/// nothing is computed. Each stage's cohomology is computed independently,
/// then the induced maps decide per degree where the tower stabilizes.
pub fn hh_inverse_limit(a: Arc<DGAlgebra>, tower: &CoefficientTower, window: (i64, i64)) -> Result<LimitReport> {
    hh_inverse_limit_with(a, tower, window, DEFAULT_CONFIRMATIONS)
}

/// Number of consecutive isomorphisms past a stage required before a degree
/// counts as stabilized there.
pub const DEFAULT_CONFIRMATIONS: usize = 2;

/// As [`hh_inverse_limit`], requiring `confirmations` consecutive induced
/// isomorphisms after the stabilization stage. A finite tower cannot rule
/// out change at later stages; one confirmation is easily fooled by runs of
/// zero groups in degrees the early stages cannot reach yet.
pub fn hh_inverse_limit_with(
    a: Arc<DGAlgebra>,
    tower: &CoefficientTower,
    window: (i64, i64),
    confirmations: usize,
) -> Result<LimitReport> {
    let confirmations = confirmations.max(1);
    let mut failures = Vec::new();
    for (i, map) in tower.maps.iter().enumerate() {
        let tgt = map.target();
        for d in tgt.degrees() {
            let rank = map.block_ref(d).map_or(0, SparseMatrix::rank);
            if rank < tgt.dim(d) {
                failures.push((tower.labels[i + 1], d));
            }
        }
    }
    if !failures.is_empty() {
        return Ok(LimitReport {
            window,
            mittag_leffler_failures: failures,
            stage_dims: BTreeMap::new(),
            stabilization: BTreeMap::new(),
            unstabilized_degrees: (window.0..=window.1).collect(),
            lim1_unresolved: true,
            limit: None,
        });
    }

    let complexes: Vec<HochschildComplex> = crate::parallel_map(&tower.stages, |m| {
        hochschild_complex(a.clone(), m.clone(), window)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let rings: Vec<GradedRingPresentation> =
        crate::parallel_map(&complexes, |c| c.cohomology()).into_iter().collect::<Result<_>>()?;

    let n = tower.stages.len();
    let mut stabilization = BTreeMap::new();
    let mut unstabilized = Vec::new();
    for t in window.0..=window.1 {
        // iso[i]: H^t(M_{i+1}) → H^t(M_i) is an isomorphism
        let iso: Vec<bool> = (0..n - 1)
            .map(|i| induced_map(tower, &complexes, &rings, i, t).map(|m| is_iso(&m)))
            .collect::<Result<_>>()?;
        let mut start = n - 1;
        while start > 0 && iso[start - 1] {
            start -= 1;
        }
        if start + confirmations < n {
            stabilization.insert(t, tower.labels[start]);
        } else {
            unstabilized.push(t);
        }
    }
    let stable: Vec<i64> = stabilization.keys().copied().collect();
    let limit = rings.last().map(|r| r.restrict(|t| stable.contains(&t)));
    Ok(LimitReport {
        window,
        mittag_leffler_failures: Vec::new(),
        stage_dims: tower.labels.iter().zip(&rings).map(|(l, r)| (*l, r.dims.clone())).collect(),
        lim1_unresolved: !unstabilized.is_empty(),
        stabilization,
        unstabilized_degrees: unstabilized,
        limit,
    })
}

/// Matrix of `H^t(A, M_{i+1}) → H^t(A, M_i)` in the representative bases.
fn induced_map(
    tower: &CoefficientTower,
    complexes: &[HochschildComplex],
    rings: &[GradedRingPresentation],
    i: usize,
    t: i64,
) -> Result<SparseMatrix> {
    let (src, tgt) = (&tower.stages[i + 1], &tower.stages[i]);
    let map = &tower.maps[i];
    let f = src.field();
    let image = |m: usize| {
        let d = src.degree(m);
        map.apply(d, &SparseVec::unit(src.basis().local_index(m), f)).map_indices(|k| tgt.basis().global(d, k))
    };
    let reps = &rings[i + 1].representatives[&t];
    let mut cols = Vec::with_capacity(reps.len());
    for r in reps {
        let mut pushed = HochschildCochain::zero(t);
        for (w, v) in r.values() {
            let mut acc = SparseVec::new();
            for (m, c) in v.iter() {
                acc = acc.add_scaled(c, &image(*m));
            }
            pushed.add_value(w.clone(), &acc);
        }
        let (_, z) = complexes[i].to_vector(&pushed)?;
        let coords = rings[i].coordinates(t, &z).ok_or_else(|| {
            Error::Validation(format!("tower map {} does not send cocycles to cocycles", i + 1))
        })?;
        cols.push(coords);
    }
    Ok(SparseMatrix::from_columns(f, rings[i].dims[&t], cols))
}

fn is_iso(m: &SparseMatrix) -> bool {
    m.rows() == m.cols() && m.rank() == m.rows()
}
