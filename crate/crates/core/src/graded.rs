//! Z-graded vector spaces, degree-homogeneous maps and cochain complexes.
//!
//! Everything uses a single cohomological grading: homological degree `n` is
//! stored as degree `-n`. Differentials raise degree by one.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, Echelon, SparseMatrix, SparseVec};
use crate::scalar::{Field, FieldScalar};

/// Finite list of labelled basis elements in each populated degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVectorSpace {
    field: Field,
    degrees: BTreeMap<i64, Vec<String>>,
}

impl GradedVectorSpace {
    pub fn new(field: Field) -> Self {
        GradedVectorSpace { field, degrees: BTreeMap::new() }
    }

    /// The one-dimensional space `k` in degree 0.
    pub fn ground(field: Field) -> Self {
        let mut v = GradedVectorSpace::new(field);
        v.degrees.insert(0, vec!["1".to_string()]);
        v
    }

    /// Appends `labels` to degree `degree`; labels must stay unique.
    pub fn add_degree<S: Into<String>>(
        &mut self,
        degree: i64,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<()> {
        let slot = self.degrees.entry(degree).or_default();
        for l in labels {
            let l = l.into();
            if slot.contains(&l) {
                return Err(Error::Validation(format!("duplicate label {l:?} in degree {degree}")));
            }
            slot.push(l);
        }
        if slot.is_empty() {
            self.degrees.remove(&degree);
        }
        Ok(())
    }

    pub fn with_degree<S: Into<String>>(
        mut self,
        degree: i64,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        self.add_degree(degree, labels)?;
        Ok(self)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.degrees.get(&degree).map_or(0, Vec::len)
    }

    pub fn labels(&self, degree: i64) -> &[String] {
        self.degrees.get(&degree).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, degree: i64, label: &str) -> Option<usize> {
        self.labels(degree).iter().position(|l| l == label)
    }

    /// Populated degrees in increasing order.
    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.degrees.keys().copied()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.degrees.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.degrees.keys().next_back().copied()
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.values().map(Vec::len).sum()
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.degrees.iter().map(|(d, v)| (*d, v.len())).collect()
    }

    /// Dual basis in negated degrees, labels suffixed with `*`.
    pub fn dual(&self) -> GradedVectorSpace {
        GradedVectorSpace {
            field: self.field,
            degrees: self
                .degrees
                .iter()
                .map(|(d, ls)| (-d, ls.iter().map(|l| dual_label(l)).collect()))
                .collect(),
        }
    }
}

fn dual_label(l: &str) -> String {
    match l.strip_suffix('*') {
        Some(s) => s.to_string(),
        None => format!("{l}*"),
    }
}

/// A degree-homogeneous linear map, stored as one matrix per source degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    source: GradedVectorSpace,
    target: GradedVectorSpace,
    degree: i64,
    blocks: BTreeMap<i64, SparseMatrix>,
}

impl GradedMap {
    /// Validates block shapes; absent blocks are zero.
    pub fn new(
        source: GradedVectorSpace,
        target: GradedVectorSpace,
        degree: i64,
        blocks: BTreeMap<i64, SparseMatrix>,
    ) -> Result<Self> {
        if source.field != target.field {
            return Err(Error::FieldMismatch(source.field.to_string(), target.field.to_string()));
        }
        for (j, m) in &blocks {
            if m.cols() != source.dim(*j) || m.rows() != target.dim(j + degree) {
                return Err(Error::DimensionMismatch(format!(
                    "block at source degree {j} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    target.dim(j + degree),
                    source.dim(*j)
                )));
            }
        }
        let blocks = blocks.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(GradedMap { source, target, degree, blocks })
    }

    pub fn identity(v: &GradedVectorSpace) -> Self {
        let blocks = v.degrees().map(|d| (d, SparseMatrix::identity(v.field, v.dim(d)))).collect();
        GradedMap { source: v.clone(), target: v.clone(), degree: 0, blocks }
    }

    pub fn zero(source: GradedVectorSpace, target: GradedVectorSpace, degree: i64) -> Self {
        GradedMap { source, target, degree, blocks: BTreeMap::new() }
    }

    pub fn source(&self) -> &GradedVectorSpace {
        &self.source
    }

    pub fn target(&self) -> &GradedVectorSpace {
        &self.target
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// The matrix from source degree `j` to target degree `j + degree`.
    pub fn block(&self, j: i64) -> SparseMatrix {
        self.blocks.get(&j).cloned().unwrap_or_else(|| {
            SparseMatrix::zero(self.source.field, self.target.dim(j + self.degree), self.source.dim(j))
        })
    }

    pub fn block_ref(&self, j: i64) -> Option<&SparseMatrix> {
        self.blocks.get(&j)
    }

    pub fn apply(&self, j: i64, v: &SparseVec) -> SparseVec {
        match self.blocks.get(&j) {
            Some(m) => m.apply(v),
            None => SparseVec::new(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap) -> Result<GradedMap> {
        if other.target != self.source {
            return Err(Error::DimensionMismatch("composition of incompatible maps".into()));
        }
        let mut blocks = BTreeMap::new();
        for (j, m) in &other.blocks {
            if let Some(n) = self.blocks.get(&(j + other.degree)) {
                blocks.insert(*j, n.mul(m)?);
            }
        }
        GradedMap::new(other.source.clone(), self.target.clone(), self.degree + other.degree, blocks)
    }

    /// Linear dual `f^∨ : W^∨ → V^∨` of the same degree `d`, with Koszul sign
    /// `(-1)^{d·|φ|}` on a functional `φ`.
    pub fn dual(&self) -> GradedMap {
        let field = self.source.field;
        let d = self.degree;
        let mut blocks = BTreeMap::new();
        for (j, m) in &self.blocks {
            // φ ∈ W^∨ in degree -(j+d), image in V^∨ degree -j
            let src_deg = -(j + d);
            let sign = field.sign(d * src_deg);
            blocks.insert(src_deg, m.transpose().scaled(&sign));
        }
        GradedMap {
            source: self.target.dual(),
            target: self.source.dual(),
            degree: d,
            blocks,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Per-degree result of a cohomology computation.
#[derive(Clone, Debug)]
pub struct CohomologyDegree {
    pub degree: i64,
    pub dim: usize,
    /// Cocycles whose classes form a basis of `H^degree`.
    pub representatives: Vec<SparseVec>,
    reducer: Echelon,
}

impl CohomologyDegree {
    /// Coordinates of the class of cocycle `z` in the representative basis,
    /// or `None` when `z` is not a cocycle.
    pub fn coordinates(&self, z: &SparseVec) -> Option<SparseVec> {
        let (res, tag) = self.reducer.reduce_full_tagged(z);
        if res.is_zero() {
            Some(tag)
        } else {
            None
        }
    }

    /// True when the cocycle `z` is a coboundary.
    pub fn is_coboundary(&self, z: &SparseVec) -> bool {
        matches!(self.coordinates(z), Some(c) if c.is_zero())
    }
}

/// A cochain complex: graded space with a degree +1 differential.
///
/// `known` is the closed range of degrees on which the complex is exact
/// data; outside it the object is a truncation and nothing may be inferred.
/// `None` means the complex is bounded and known everywhere.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    space: GradedVectorSpace,
    differential: GradedMap,
    known: Option<(i64, i64)>,
}

impl CochainComplex {
    /// Builds and checks `d ∘ d = 0` wherever both composites are defined.
    pub fn new(
        space: GradedVectorSpace,
        differential: GradedMap,
        known: Option<(i64, i64)>,
    ) -> Result<Self> {
        if differential.degree != 1 || differential.source != space || differential.target != space {
            return Err(Error::DimensionMismatch("differential must be a degree +1 endomorphism".into()));
        }
        let c = CochainComplex { space, differential, known };
        c.check_square_zero()?;
        Ok(c)
    }

    /// Skips the `d ∘ d = 0` check; callers report it themselves.
    pub(crate) fn unchecked(
        space: GradedVectorSpace,
        differential: GradedMap,
        known: Option<(i64, i64)>,
    ) -> Self {
        CochainComplex { space, differential, known }
    }

    /// Builds a bounded complex from per-degree blocks `d^j : C^j → C^{j+1}`.
    pub fn from_blocks(
        space: GradedVectorSpace,
        blocks: BTreeMap<i64, SparseMatrix>,
        known: Option<(i64, i64)>,
    ) -> Result<Self> {
        let d = GradedMap::new(space.clone(), space.clone(), 1, blocks)?;
        CochainComplex::new(space, d, known)
    }

    pub fn check_square_zero(&self) -> Result<()> {
        let results: Vec<Result<()>> = self
            .differential
            .blocks
            .par_iter()
            .map(|(j, m)| {
                if let Some(n) = self.differential.blocks.get(&(j + 1)) {
                    let sq = n.mul(m)?;
                    if !sq.is_zero() {
                        let (r, c, _) = sq.triples()[0].clone();
                        return Err(Error::DifferentialSquare {
                            degree: *j,
                            detail: format!(
                                "d^2({}) has nonzero component on {}",
                                self.space.labels(*j)[c],
                                self.space.labels(j + 2)[r]
                            ),
                        });
                    }
                }
                Ok(())
            })
            .collect();
        results.into_iter().collect()
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn differential(&self) -> &GradedMap {
        &self.differential
    }

    pub fn field(&self) -> Field {
        self.space.field
    }

    pub fn known(&self) -> Option<(i64, i64)> {
        self.known
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.space.dim(degree)
    }

    fn check_window(&self, lo: i64, hi: i64) -> Result<()> {
        if lo > hi {
            return Err(Error::InsufficientTruncation(format!("empty window [{lo}, {hi}]")));
        }
        if let Some((klo, khi)) = self.known {
            if lo - 1 < klo || hi + 1 > khi {
                return Err(Error::InsufficientTruncation(format!(
                    "window [{lo}, {hi}] needs degrees [{}, {}] but the complex is only known on [{klo}, {khi}]",
                    lo - 1,
                    hi + 1
                )));
            }
        }
        Ok(())
    }

    /// Dimensions of `H^t` for `t` in `[lo, hi]`.
    pub fn cohomology_dims(&self, lo: i64, hi: i64) -> Result<BTreeMap<i64, usize>> {
        self.check_window(lo, hi)?;
        let ranks: HashMap<i64, usize> = ((lo - 1)..=hi)
            .into_par_iter()
            .map(|t| (t, self.differential.block_ref(t).map_or(0, SparseMatrix::rank)))
            .collect();
        let dims: BTreeMap<i64, usize> =
            (lo..=hi).map(|t| (t, self.dim(t) - ranks[&t] - ranks[&(t - 1)])).collect();
        self.check_euler(lo, hi, &dims);
        Ok(dims)
    }

    /// Cohomology with representative cocycles in each degree of `[lo, hi]`.
    pub fn cohomology(&self, lo: i64, hi: i64) -> Result<Vec<CohomologyDegree>> {
        self.check_window(lo, hi)?;
        let out: Vec<CohomologyDegree> =
            (lo..=hi).into_par_iter().map(|t| self.cohomology_at(t)).collect();
        let dims = out.iter().map(|h| (h.degree, h.dim)).collect();
        self.check_euler(lo, hi, &dims);
        Ok(out)
    }

    fn cohomology_at(&self, t: i64) -> CohomologyDegree {
        let field = self.field();
        let mut reducer = Echelon::new(field);
        if let Some(m) = self.differential.block_ref(t - 1) {
            let mut cols: Vec<SparseVec> = m.columns().iter().filter(|c| !c.is_zero()).cloned().collect();
            cols.sort_by_key(SparseVec::nnz);
            for c in cols {
                reducer.insert(c);
            }
        }
        let cocycles = match self.differential.block_ref(t) {
            Some(m) => kernel_basis(m),
            None => (0..self.dim(t)).map(|i| SparseVec::unit(i, field)).collect(),
        };
        let mut reps = Vec::new();
        for z in cocycles {
            let tag = SparseVec::unit(reps.len(), field);
            if reducer.insert_tagged(z.clone(), tag) {
                reps.push(z);
            }
        }
        CohomologyDegree { degree: t, dim: reps.len(), representatives: reps, reducer }
    }

    /// When the window covers every populated degree of a bounded complex,
    /// the Euler characteristics of the complex and its cohomology agree.
    fn check_euler(&self, lo: i64, hi: i64, dims: &BTreeMap<i64, usize>) {
        if self.known.is_some() {
            return;
        }
        let (Some(min), Some(max)) = (self.space.min_degree(), self.space.max_degree()) else {
            return;
        };
        if lo <= min && max <= hi {
            let chi_c: i64 = self.space.dims().iter().map(|(d, n)| sgn(*d) * *n as i64).sum();
            let chi_h: i64 = dims.iter().map(|(d, n)| sgn(*d) * *n as i64).sum();
            assert_eq!(chi_c, chi_h, "Euler characteristic mismatch");
        }
    }

    /// Tensor product with differential `d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy`.
    pub fn tensor(&self, other: &CochainComplex) -> Result<CochainComplex> {
        let field = self.field();
        if other.field() != field {
            return Err(Error::FieldMismatch(field.to_string(), other.field().to_string()));
        }
        let known = tensor_known(self, other)?;
        let a = &self.space;
        let b = &other.space;
        // degree t basis: pairs ordered by (degree of x, index of x, index of y)
        let mut index: HashMap<(i64, i64, usize, usize), (i64, usize)> = HashMap::new();
        let mut space = GradedVectorSpace::new(field);
        let mut by_deg: BTreeMap<i64, Vec<String>> = BTreeMap::new();
        for i in a.degrees() {
            for j in b.degrees() {
                let slot = by_deg.entry(i + j).or_default();
                for (x, xl) in a.labels(i).iter().enumerate() {
                    for (y, yl) in b.labels(j).iter().enumerate() {
                        index.insert((i, j, x, y), (i + j, slot.len()));
                        slot.push(format!("{xl}⊗{yl}"));
                    }
                }
            }
        }
        for (d, ls) in by_deg {
            space.add_degree(d, ls)?;
        }
        let mut entries: BTreeMap<i64, Vec<(usize, usize, FieldScalar)>> = BTreeMap::new();
        for i in a.degrees() {
            for j in b.degrees() {
                let da = self.differential.block(i);
                let db = other.differential.block(j);
                for x in 0..a.dim(i) {
                    for y in 0..b.dim(j) {
                        let (t, col) = index[&(i, j, x, y)];
                        for (x2, c) in da.column(x).iter() {
                            let (_, row) = index[&(i + 1, j, *x2, y)];
                            entries.entry(t).or_default().push((row, col, c.clone()));
                        }
                        let s = field.sign(i);
                        for (y2, c) in db.column(y).iter() {
                            let (_, row) = index[&(i, j + 1, x, *y2)];
                            entries.entry(t).or_default().push((row, col, c * &s));
                        }
                    }
                }
            }
        }
        let mut blocks = BTreeMap::new();
        for (t, es) in entries {
            let m = SparseMatrix::from_triples(
                field,
                space.dim(t + 1),
                space.dim(t),
                sum_triples(es),
            )?;
            blocks.insert(t, m);
        }
        CochainComplex::from_blocks(space, blocks, known)
    }

    /// The dual complex `Hom(C, k)` in negated degrees.
    pub fn dual(&self) -> Result<CochainComplex> {
        let known = self.known.map(|(lo, hi)| (-hi, -lo));
        CochainComplex::new(self.space.dual(), self.differential.dual(), known)
    }
}

fn sgn(d: i64) -> i64 {
    if d.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn sum_triples(es: Vec<(usize, usize, FieldScalar)>) -> Vec<(usize, usize, FieldScalar)> {
    let mut acc: BTreeMap<(usize, usize), FieldScalar> = BTreeMap::new();
    for (r, c, v) in es {
        match acc.get_mut(&(r, c)) {
            Some(x) => *x += &v,
            None => {
                acc.insert((r, c), v);
            }
        }
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect()
}

fn tensor_known(a: &CochainComplex, b: &CochainComplex) -> Result<Option<(i64, i64)>> {
    let bounds = |c: &CochainComplex| (c.space.min_degree().unwrap_or(0), c.space.max_degree().unwrap_or(0));
    match (a.known, b.known) {
        (None, None) => Ok(None),
        (Some((lo, hi)), None) => {
            let (bmin, bmax) = bounds(b);
            Ok(Some((lo + bmax, hi + bmin)))
        }
        (None, Some((lo, hi))) => {
            let (amin, amax) = bounds(a);
            Ok(Some((lo + amax, hi + amin)))
        }
        (Some(_), Some(_)) => Err(Error::InsufficientTruncation(
            "tensor product of two truncated complexes has no trustworthy degrees".into(),
        )),
    }
}
