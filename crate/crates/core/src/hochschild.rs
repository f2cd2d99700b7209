//! Hochschild cochains `Hom(T(sĀ), M)` of a DG algebra with coefficients in
//! a bimodule, their cup product and Gerstenhaber bracket, Hochschild
//! homology `M ⊗ T(sĀ)`, and the comparison `(Ā^∨)^{⊗k} ⊗ M → Hom(Ā^{⊗k}, M)`.
//!
//! A cochain is stored as a table `word ↦ value`; the basis cochain `(w, m)`
//! sends the word `w` to `m` and every other word to zero. It has degree
//! `|m| − |w|`, where `|w| = Σ(|aᵢ| − 1)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::bar::{add_word, bar_differential, require_exact, LetterWords, Word, WordComplex, WordVec};
use crate::dg::{DGAlgebra, DGBimodule};
use crate::error::{Error, Result};
use crate::graded::{CochainComplex, CohomologyDegree, GradedMap, GradedVectorSpace};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::scalar::{Field, FieldScalar};

/// A homogeneous Hochschild cochain: values on finitely many words.
#[derive(Clone, Debug, PartialEq)]
pub struct HochschildCochain {
    degree: i64,
    values: BTreeMap<Vec<usize>, SparseVec>,
}

impl HochschildCochain {
    pub fn zero(degree: i64) -> Self {
        HochschildCochain { degree, values: BTreeMap::new() }
    }

    /// The cochain sending `word` to `value` and all other words to zero.
    pub fn single(degree: i64, word: Vec<usize>, value: SparseVec) -> Self {
        let mut c = HochschildCochain::zero(degree);
        c.add_value(word, &value);
        c
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn values(&self) -> &BTreeMap<Vec<usize>, SparseVec> {
        &self.values
    }

    pub fn eval(&self, word: &[usize]) -> SparseVec {
        self.values.get(word).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add_value(&mut self, word: Vec<usize>, value: &SparseVec) {
        if value.is_zero() {
            return;
        }
        let sum = match self.values.get(&word) {
            Some(v) => v.add(value),
            None => value.clone(),
        };
        if sum.is_zero() {
            self.values.remove(&word);
        } else {
            self.values.insert(word, sum);
        }
    }

    pub fn add(&self, other: &HochschildCochain) -> HochschildCochain {
        let mut out = self.clone();
        for (w, v) in &other.values {
            out.add_value(w.clone(), v);
        }
        out
    }

    pub fn scaled(&self, c: &FieldScalar) -> HochschildCochain {
        let mut out = HochschildCochain::zero(self.degree);
        for (w, v) in &self.values {
            out.add_value(w.clone(), &v.scaled(c));
        }
        out
    }

    pub fn sub(&self, other: &HochschildCochain) -> HochschildCochain {
        let f = other.values.values().flat_map(|v| v.iter()).next().map(|(_, c)| c.field());
        match f {
            Some(f) => self.add(&other.scaled(&f.from_i64(-1))),
            None => self.clone(),
        }
    }
}

/// Lookup tables for inverting the bar differential of `Ā`: which letters
/// `b` have `a` in `db`, and which pairs `(b₁, b₂)` have `a` in `b₁b₂`.
#[derive(Clone, Debug)]
struct ReverseTables {
    d: HashMap<usize, Vec<(usize, FieldScalar)>>,
    mul: HashMap<usize, Vec<(usize, usize, FieldScalar)>>,
}

impl ReverseTables {
    fn new(a: &DGAlgebra) -> Self {
        let ideal = a.augmentation_ideal();
        let mut d: HashMap<usize, Vec<(usize, FieldScalar)>> = HashMap::new();
        let mut mul: HashMap<usize, Vec<(usize, usize, FieldScalar)>> = HashMap::new();
        for &b in &ideal {
            for (x, c) in a.d(b).iter() {
                d.entry(*x).or_default().push((b, c.clone()));
            }
            for &b2 in &ideal {
                for (x, c) in a.mul(b, b2).iter() {
                    mul.entry(*x).or_default().push((b, b2, c.clone()));
                }
            }
        }
        ReverseTables { d, mul }
    }
}

fn word_degree(a: &DGAlgebra, w: &[usize]) -> i64 {
    w.iter().map(|&x| a.degree(x) - 1).sum()
}

fn concat(parts: &[&[usize]]) -> Vec<usize> {
    let mut out = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
    for p in parts {
        out.extend_from_slice(p);
    }
    out
}

/// The normalized Hochschild cochain complex `C*(A, M)` on a degree window.
///
/// Cochains are built on `[lo − 1, hi + 1]` so that cohomology on the window
/// is exact data.
#[derive(Clone, Debug)]
pub struct HochschildComplex {
    algebra: Arc<DGAlgebra>,
    module: Arc<DGBimodule>,
    window: (i64, i64),
    cells: BTreeMap<i64, Vec<(Vec<usize>, usize)>>,
    index: HashMap<(Vec<usize>, usize), usize>,
    complex: CochainComplex,
    reverse: ReverseTables,
    regular: bool,
}

/// Builds the Hochschild cochain complex of `a` with coefficients in `m`.
///
/// `m` must be a bimodule over `a` whose stored basis is the whole module;
/// a regular module of a truncated algebra is refused. When `a` is itself a
/// truncation, its exact range must cover every letter a cochain in the
/// window can see.
pub fn hochschild_complex(
    a: Arc<DGAlgebra>,
    m: Arc<DGBimodule>,
    window: (i64, i64),
) -> Result<HochschildComplex> {
    HochschildComplex::new(a, m, window)
}

impl HochschildComplex {
    pub fn new(a: Arc<DGAlgebra>, m: Arc<DGBimodule>, window: (i64, i64)) -> Result<Self> {
        if window.0 > window.1 {
            return Err(Error::DimensionMismatch(format!("empty window {}:{}", window.0, window.1)));
        }
        if a.field() != m.field() {
            return Err(Error::FieldMismatch(a.field().to_string(), m.field().to_string()));
        }
        if !Arc::ptr_eq(&a, m.algebra()) && !same_algebra(&a, m.algebra()) {
            return Err(Error::CoefficientMismatch(format!(
                "{} is a bimodule over {}, not {}",
                m.name(),
                m.algebra().name(),
                a.name()
            )));
        }
        a.require_valid()?;
        m.require_valid()?;
        if !m.is_bounded() {
            return Err(Error::Finiteness(format!(
                "{} stands for a module unbounded in degree; compute with its truncations and an inverse limit",
                m.name()
            )));
        }
        let field = a.field();
        let built = (window.0 - 1, window.1 + 1);
        let letters: Vec<(usize, i64)> =
            a.augmentation_ideal().into_iter().map(|x| (x, a.degree(x) - 1)).collect();
        let mut words = LetterWords::new(letters, "Hochschild cochains")?;
        if m.dim() > 0 {
            let min_m = m.basis().min_degree().unwrap();
            let max_m = m.basis().max_degree().unwrap();
            match words.sign() {
                1 => require_exact(&a, (0, max_m - built.0 + 1), "Hochschild cochains")?,
                -1 => require_exact(&a, (min_m - built.1 + 1, 0), "Hochschild cochains")?,
                _ => {}
            }
        }

        let mut cells = BTreeMap::new();
        let mut index = HashMap::new();
        let mut space = GradedVectorSpace::new(field);
        for t in built.0..=built.1 {
            let mut cs = Vec::new();
            for mi in 0..m.dim() {
                for w in words.words(m.degree(mi) - t) {
                    cs.push((w, mi));
                }
            }
            cs.sort();
            for (i, c) in cs.iter().enumerate() {
                index.insert(c.clone(), i);
            }
            space.add_degree(t, cs.iter().map(|(w, mi)| cell_label(&a, &m, w, *mi)))?;
            cells.insert(t, cs);
        }
        let regular = is_regular(&a, &m);
        let mut hc = HochschildComplex {
            algebra: a,
            module: m,
            window,
            cells,
            index,
            complex: CochainComplex::unchecked(space.clone(), GradedMap::zero(space.clone(), space, 1), None),
            reverse: ReverseTables::new(&DGAlgebra::ground(field)),
            regular,
        };
        hc.reverse = ReverseTables::new(&hc.algebra);

        let mut blocks = BTreeMap::new();
        for t in built.0..built.1 {
            let rows = hc.cells[&(t + 1)].len();
            let cols = crate::parallel_map(&hc.cells[&t], |(w, mi)| {
                let e = HochschildCochain::single(t, w.clone(), SparseVec::unit(*mi, field));
                hc.to_vector(&hc.differential(&e)).map(|(_, v)| v)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let mat = SparseMatrix::from_columns(field, rows, cols);
            if !mat.is_zero() {
                blocks.insert(t, mat);
            }
        }
        hc.complex = CochainComplex::from_blocks(hc.complex.space().clone(), blocks, Some(built))?;
        Ok(hc)
    }

    pub fn algebra(&self) -> &Arc<DGAlgebra> {
        &self.algebra
    }

    pub fn module(&self) -> &Arc<DGBimodule> {
        &self.module
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn field(&self) -> Field {
        self.algebra.field()
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    /// Basis cells `(word, module element)` in cochain degree `t`.
    pub fn cells(&self, t: i64) -> &[(Vec<usize>, usize)] {
        self.cells.get(&t).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Degree of the basis cochain `(w, m)`.
    pub fn cell_degree(&self, w: &[usize], m: usize) -> i64 {
        self.module.degree(m) - word_degree(&self.algebra, w)
    }

    /// Coordinates of a cochain in the cell basis of its degree.
    pub fn to_vector(&self, f: &HochschildCochain) -> Result<(i64, SparseVec)> {
        let t = f.degree;
        if !self.cells.contains_key(&t) {
            return Err(Error::InsufficientTruncation(format!(
                "cochain degree {t} lies outside the built range"
            )));
        }
        let mut pairs = Vec::new();
        for (w, v) in &f.values {
            for (mi, c) in v.iter() {
                let i = self.index.get(&(w.clone(), *mi)).ok_or_else(|| {
                    Error::DimensionMismatch(format!("cochain of degree {t} has a value off its degree"))
                })?;
                pairs.push((*i, c.clone()));
            }
        }
        Ok((t, SparseVec::from_pairs(pairs)))
    }

    pub fn from_vector(&self, t: i64, v: &SparseVec) -> HochschildCochain {
        let f = self.field();
        let mut out = HochschildCochain::zero(t);
        for (i, c) in v.iter() {
            let (w, mi) = &self.cells[&t][*i];
            out.add_value(w.clone(), &SparseVec::unit(*mi, f).scaled(c));
        }
        out
    }

    /// `δf = D f − τ ⋆ f + (−1)^{|f|} f ⋆ τ`, where `D f = d_M f − (−1)^{|f|} f d_B`,
    /// `τ(sa) = a` and `⋆` is the convolution `μ(f ⊗ g)Δ` with Koszul signs.
    pub fn differential(&self, f: &HochschildCochain) -> HochschildCochain {
        let a = &*self.algebra;
        let m = &*self.module;
        let k = self.field();
        let t = f.degree;
        let ideal = a.augmentation_ideal();
        let mut out = HochschildCochain::zero(t + 1);
        for (w, v) in &f.values {
            out.add_value(w.clone(), &m.d_vec(v));
            let mut pre = 0;
            for i in 0..w.len() {
                if let Some(srcs) = self.reverse.d.get(&w[i]) {
                    for (b, c) in srcs {
                        let mut w2 = w.clone();
                        w2[i] = *b;
                        out.add_value(w2, &v.scaled(&(&k.sign(t + pre) * c)));
                    }
                }
                if let Some(srcs) = self.reverse.mul.get(&w[i]) {
                    for (b1, b2, c) in srcs {
                        let w2 = concat(&[&w[..i], &[*b1, *b2], &w[i + 1..]]);
                        let s = -k.sign(t + pre + a.degree(*b1) - 1);
                        out.add_value(w2, &v.scaled(&(&s * c)));
                    }
                }
                pre += a.degree(w[i]) - 1;
            }
            for &x in &ideal {
                let ex = SparseVec::unit(x, k);
                let left = m.act_left_vec(&ex, v);
                if !left.is_zero() {
                    let s = -k.sign(t * (a.degree(x) - 1));
                    out.add_value(concat(&[&[x], w]), &left.scaled(&s));
                }
                let right = m.act_right_vec(v, &ex);
                if !right.is_zero() {
                    let s = k.sign(t + pre);
                    out.add_value(concat(&[w, &[x]]), &right.scaled(&s));
                }
            }
        }
        out
    }

    /// Cup product `(f ∪ g)(uv) = (−1)^{|g||u|} f(u) g(v)`, using the product
    /// of the coefficient algebra.
    pub fn cup(&self, f: &HochschildCochain, g: &HochschildCochain) -> Result<HochschildCochain> {
        let m = &*self.module;
        if !m.is_algebra() {
            return Err(Error::NotAlgebraCoefficients);
        }
        let k = self.field();
        let mut out = HochschildCochain::zero(f.degree + g.degree);
        for (u, fu) in &f.values {
            let s = k.sign(g.degree * word_degree(&self.algebra, u));
            for (v, gv) in &g.values {
                let p = m.mul_vec(fu, gv)?;
                out.add_value(concat(&[u, v]), &p.scaled(&s));
            }
        }
        Ok(out)
    }

    /// The unit cochain: the module's unit on the empty word.
    pub fn unit_cochain(&self) -> Result<HochschildCochain> {
        let u = self.module.unit().ok_or(Error::NotAlgebraCoefficients)?;
        Ok(HochschildCochain::single(0, Vec::new(), SparseVec::unit(u, self.field())))
    }

    /// The degree-2 cochain encoding the structure of `A`:
    /// `[a] ↦ −da` and `[a|b] ↦ (−1)^{|a|−1} ab`, on all basis letters
    /// including the unit. Only defined for regular coefficients.
    pub fn multiplication_cochain(&self) -> Result<HochschildCochain> {
        self.require_regular()?;
        let a = &*self.algebra;
        let k = self.field();
        let mut mu = HochschildCochain::zero(2);
        for x in 0..a.dim() {
            mu.add_value(vec![x], &a.d(x).neg());
            for y in 0..a.dim() {
                mu.add_value(vec![x, y], &a.mul(x, y).scaled(&k.sign(a.degree(x) - 1)));
            }
        }
        Ok(mu)
    }

    /// `(f ∘ g)(w) = Σ_{w = u v x} (−1)^{(|g|−1)|u|} f(u, g(v), x)`, evaluated
    /// on one word over the full basis of `A`.
    pub fn circle_at(&self, f: &HochschildCochain, g: &HochschildCochain, w: &[usize]) -> SparseVec {
        let a = &*self.algebra;
        let k = self.field();
        let mut acc = SparseVec::new();
        let mut pre = 0;
        for i in 0..=w.len() {
            let s = k.sign((g.degree - 1) * pre);
            for j in i..=w.len() {
                let gv = g.eval(&w[i..j]);
                for (b, c) in gv.iter() {
                    let fv = f.eval(&concat(&[&w[..i], &[*b], &w[j..]]));
                    if !fv.is_zero() {
                        acc = acc.add_scaled(&(&s * c), &fv);
                    }
                }
            }
            if i < w.len() {
                pre += a.degree(w[i]) - 1;
            }
        }
        acc
    }

    /// `[f, g](w) = (f ∘ g)(w) − (−1)^{(|f|−1)(|g|−1)} (g ∘ f)(w)`.
    pub fn bracket_at(&self, f: &HochschildCochain, g: &HochschildCochain, w: &[usize]) -> SparseVec {
        let s = -self.field().sign((f.degree - 1) * (g.degree - 1));
        self.circle_at(f, g, w).add_scaled(&s, &self.circle_at(g, f, w))
    }

    /// The Gerstenhaber bracket as a normalized cochain of degree
    /// `|f| + |g| − 1`. Only defined for regular coefficients.
    pub fn bracket(&self, f: &HochschildCochain, g: &HochschildCochain) -> Result<HochschildCochain> {
        self.require_regular()?;
        let t = f.degree + g.degree - 1;
        let cells = self.cells.get(&t).ok_or_else(|| {
            Error::InsufficientTruncation(format!("bracket lands in degree {t}, outside the built range"))
        })?;
        let mut words: Vec<&Vec<usize>> = cells.iter().map(|(w, _)| w).collect();
        words.dedup();
        let mut out = HochschildCochain::zero(t);
        for w in words {
            out.add_value(w.clone(), &self.bracket_at(f, g, w));
        }
        Ok(out)
    }

    fn require_regular(&self) -> Result<()> {
        if self.regular {
            Ok(())
        } else {
            Err(Error::CoefficientMismatch(format!(
                "the bracket needs coefficients in {} itself",
                self.algebra.name()
            )))
        }
    }

    /// Cohomology on the window with representatives and, for algebra
    /// coefficients, cup-product structure constants.
    pub fn cohomology(&self) -> Result<GradedRingPresentation> {
        let (lo, hi) = self.window;
        let classes: BTreeMap<i64, CohomologyDegree> =
            self.complex.cohomology(lo, hi)?.into_iter().map(|h| (h.degree, h)).collect();
        let dims = classes.iter().map(|(t, h)| (*t, h.dim)).collect();
        let representatives: BTreeMap<i64, Vec<HochschildCochain>> = classes
            .iter()
            .map(|(t, h)| (*t, h.representatives.iter().map(|z| self.from_vector(*t, z)).collect()))
            .collect();
        let products = if self.module.is_algebra() {
            let mut pairs = Vec::new();
            for (&i, ri) in &representatives {
                for (&j, rj) in &representatives {
                    if i + j < lo || i + j > hi {
                        continue;
                    }
                    for x in 0..ri.len() {
                        for y in 0..rj.len() {
                            pairs.push((i, x, j, y));
                        }
                    }
                }
            }
            let consts = crate::parallel_map(&pairs, |&(i, x, j, y)| -> Result<ProductConstant> {
                let p = self.cup(&representatives[&i][x], &representatives[&j][y])?;
                let (_, v) = self.to_vector(&p)?;
                let coords = classes[&(i + j)].coordinates(&v).ok_or_else(|| {
                    Error::Validation(format!("cup product of cocycles in degrees {i}, {j} is not a cocycle"))
                })?;
                Ok(ProductConstant { left: (i, x), right: (j, y), result: coords })
            });
            Some(consts.into_iter().collect::<Result<Vec<_>>>()?)
        } else {
            None
        };
        Ok(GradedRingPresentation { window: self.window, dims, representatives, products, field: self.field(), classes })
    }
}

fn same_algebra(a: &DGAlgebra, b: &DGAlgebra) -> bool {
    a.dim() == b.dim()
        && (0..a.dim()).all(|x| a.degree(x) == b.degree(x))
        && a.products_table() == b.products_table()
        && a.diff_table() == b.diff_table()
}

fn is_regular(a: &DGAlgebra, m: &DGBimodule) -> bool {
    m.dim() == a.dim()
        && m.unit() == Some(a.unit())
        && (0..a.dim()).all(|x| {
            m.degree(x) == a.degree(x)
                && m.d(x) == a.d(x)
                && (0..a.dim()).all(|y| m.act_left(x, y) == a.mul(x, y) && m.act_right(x, y) == a.mul(x, y))
        })
}

fn cell_label(a: &DGAlgebra, m: &DGBimodule, w: &[usize], mi: usize) -> String {
    let letters: Vec<&str> = w.iter().map(|&x| a.basis().name(x)).collect();
    format!("[{}]*{}", letters.join("|"), m.basis().name(mi))
}

/// One structure constant `rep(left) ∪ rep(right) = Σ result_k rep_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductConstant {
    pub left: (i64, usize),
    pub right: (i64, usize),
    pub result: SparseVec,
}

/// Graded ring data computed on a window: dimensions, representative
/// cocycles, and cup-product structure constants in the representative basis.
#[derive(Clone, Debug)]
pub struct GradedRingPresentation {
    pub window: (i64, i64),
    pub dims: BTreeMap<i64, usize>,
    pub representatives: BTreeMap<i64, Vec<HochschildCochain>>,
    /// `None` when the coefficients carry no product.
    pub products: Option<Vec<ProductConstant>>,
    field: Field,
    classes: BTreeMap<i64, CohomologyDegree>,
}

impl GradedRingPresentation {
    pub fn field(&self) -> Field {
        self.field
    }

    /// Coordinates of a cocycle's class, given its cell-basis vector.
    pub fn coordinates(&self, t: i64, z: &SparseVec) -> Option<SparseVec> {
        self.classes.get(&t)?.coordinates(z)
    }

    /// Rank of the product map `H^i ⊗ H^j → H^{i+j}` for every pair of
    /// degrees whose sum lies in the window.
    pub fn product_ranks(&self) -> Option<BTreeMap<(i64, i64), usize>> {
        let products = self.products.as_ref()?;
        let mut cols: BTreeMap<(i64, i64), Vec<SparseVec>> = BTreeMap::new();
        for p in products {
            cols.entry((p.left.0, p.right.0)).or_default().push(p.result.clone());
        }
        let field = self.field;
        Some(
            cols.into_iter()
                .map(|((i, j), c)| {
                    let rows = self.dims[&(i + j)];
                    ((i, j), SparseMatrix::from_columns(field, rows, c).rank())
                })
                .collect(),
        )
    }

    /// Restriction to a set of degrees.
    pub fn restrict(&self, keep: impl Fn(i64) -> bool) -> GradedRingPresentation {
        let mut out = self.clone();
        out.dims.retain(|t, _| keep(*t));
        out.representatives.retain(|t, _| keep(*t));
        out.classes.retain(|t, _| keep(*t));
        if let Some(p) = out.products.as_mut() {
            p.retain(|c| keep(c.left.0) && keep(c.right.0) && keep(c.left.0 + c.right.0));
        }
        out
    }
}

/// `HH^*(A, M)` on a window.
pub fn hh_cohomology(a: Arc<DGAlgebra>, m: Arc<DGBimodule>, window: (i64, i64)) -> Result<GradedRingPresentation> {
    hochschild_complex(a, m, window)?.cohomology()
}

/// Hochschild chains `M ⊗ T(sĀ)` on a window, in the cohomological grading:
/// `m ⊗ [a₁|…|aₙ]` sits in degree `|m| + Σ(|aᵢ| − 1)`.
#[derive(Clone, Debug)]
pub struct HochschildHomology {
    window: (i64, i64),
    chains: WordComplex,
}

impl HochschildHomology {
    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.chains.complex
    }

    /// Basis chains in degree `t`; `right` is always the unit of `A`.
    pub fn chains(&self, t: i64) -> &[Word] {
        self.chains.words.get(&t).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn dims(&self) -> Result<BTreeMap<i64, usize>> {
        self.chains.complex.cohomology_dims(self.window.0, self.window.1)
    }
}

/// `HH_*(A, M)` as the complex `M ⊗_{A^e} B(A, A, A)`.
///
/// Its differential is the two-sided bar differential with the right end
/// `aₙ · 1` folded back onto `M`: `m ⊗ w ⊗ b ↦ (−1)^{|b|(|m| + |w|)} bm ⊗ w`.
pub fn hh_homology(a: Arc<DGAlgebra>, m: Arc<DGBimodule>, window: (i64, i64)) -> Result<HochschildHomology> {
    if window.0 > window.1 {
        return Err(Error::DimensionMismatch(format!("empty window {}:{}", window.0, window.1)));
    }
    if a.field() != m.field() {
        return Err(Error::FieldMismatch(a.field().to_string(), m.field().to_string()));
    }
    if !Arc::ptr_eq(&a, m.algebra()) && !same_algebra(&a, m.algebra()) {
        return Err(Error::CoefficientMismatch(format!("{} is not a bimodule over {}", m.name(), a.name())));
    }
    a.require_valid()?;
    m.require_valid()?;
    if !m.is_bounded() {
        return Err(Error::Finiteness(format!("{} stands for a module unbounded in degree", m.name())));
    }
    let field = a.field();
    let built = (window.0 - 1, window.1 + 1);
    let letters: Vec<(usize, i64)> = a.augmentation_ideal().into_iter().map(|x| (x, a.degree(x) - 1)).collect();
    let mut words = LetterWords::new(letters, "Hochschild chains")?;
    if m.dim() > 0 {
        let min_m = m.basis().min_degree().unwrap();
        let max_m = m.basis().max_degree().unwrap();
        match words.sign() {
            1 => require_exact(&a, (0, built.1 - min_m + 1), "Hochschild chains")?,
            -1 => require_exact(&a, (built.0 - max_m + 1, 0), "Hochschild chains")?,
            _ => {}
        }
    }
    let unit = a.unit();
    let regular = DGBimodule::regular(a.clone());
    let chains = WordComplex::build(
        field,
        built,
        |t| {
            let mut out = Vec::new();
            for mi in 0..m.dim() {
                for letters in words.words(t - m.degree(mi)) {
                    out.push(Word { left: mi, letters, right: unit });
                }
            }
            out
        },
        |w| {
            let letters: Vec<&str> = w.letters.iter().map(|&x| a.basis().name(x)).collect();
            format!("{}[{}]", m.basis().name(w.left), letters.join("|"))
        },
        |w| {
            let mut acc = WordVec::new();
            for (u, c) in bar_differential(&m, &a, &regular, w) {
                if u.right == unit {
                    add_word(&mut acc, u, c);
                    continue;
                }
                let b = u.right;
                let s = field.sign(a.degree(b) * (m.degree(u.left) + word_degree(&a, &u.letters)));
                for (m2, c2) in m.act_left(b, u.left).iter() {
                    let w2 = Word { left: *m2, letters: u.letters.clone(), right: unit };
                    add_word(&mut acc, w2, &(&s * &c) * c2);
                }
            }
            acc
        },
    )?;
    Ok(HochschildHomology { window, chains })
}

/// The comparison `g_k : (Ā^∨)^{⊗k} ⊗ M → Hom(Ā^{⊗k}, M)` on a window of
/// target degrees, with a per-degree certificate.
#[derive(Clone, Debug)]
pub struct DualizationMap {
    pub length: usize,
    pub window: (i64, i64),
    /// Degree `k` map; source degree `t − k` goes to cochain degree `t`.
    pub map: GradedMap,
    /// Degrees where the map is a bijection onto the full cochain space.
    pub certified: Vec<i64>,
    /// Degrees where the certificate fails, with the reason.
    pub failures: Vec<(i64, String)>,
}

impl DualizationMap {
    pub fn is_isomorphism(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Builds `g_k` and certifies it degree by degree. Refuses coefficients that
/// stand for modules unbounded in degree, where the map is not onto.
pub fn dualization_map(
    a: Arc<DGAlgebra>,
    m: Arc<DGBimodule>,
    k: usize,
    window: (i64, i64),
) -> Result<DualizationMap> {
    if !m.is_bounded() {
        return Err(Error::Finiteness(format!(
            "Hom(A^k, {}) is a product over infinitely many cells in some degree",
            m.name()
        )));
    }
    dualization_map_unguarded(a, m, k, window)
}

/// `g_k` without the boundedness guard. For an unbounded module the
/// certificate fails in every degree whose cochains need letters beyond the
/// exact range of `A`.
pub fn dualization_map_unguarded(
    a: Arc<DGAlgebra>,
    m: Arc<DGBimodule>,
    k: usize,
    window: (i64, i64),
) -> Result<DualizationMap> {
    if a.field() != m.field() {
        return Err(Error::FieldMismatch(a.field().to_string(), m.field().to_string()));
    }
    let field = a.field();
    let ideal = a.augmentation_ideal();
    let words = tuples(&ideal, k);
    let cell = |w: &[usize], mi: usize| m.degree(mi) - word_degree(&a, w);
    let mut source = GradedVectorSpace::new(field);
    let mut target = GradedVectorSpace::new(field);
    let mut blocks = BTreeMap::new();
    let mut certified = Vec::new();
    let mut failures = Vec::new();
    let shifts: Vec<i64> = ideal.iter().map(|&x| a.degree(x) - 1).collect();
    for t in window.0..=window.1 {
        let mut cells: Vec<(&Vec<usize>, usize)> = Vec::new();
        for w in &words {
            for mi in 0..m.dim() {
                if cell(w, mi) == t {
                    cells.push((w, mi));
                }
            }
        }
        cells.sort();
        let src_labels = cells.iter().map(|(w, mi)| {
            let ls: Vec<String> = w.iter().map(|&x| format!("{}*", a.basis().name(x))).collect();
            format!("{}⊗{}", ls.join("⊗"), m.basis().name(*mi))
        });
        source.add_degree(t - k as i64, src_labels.collect::<Vec<_>>())?;
        target.add_degree(t, cells.iter().map(|(w, mi)| cell_label(&a, &m, w, *mi)).collect::<Vec<_>>())?;
        let cols = (0..cells.len())
            .map(|i| {
                let w = cells[i].0;
                let mut e = 0;
                for x in 0..w.len() {
                    for y in x + 1..w.len() {
                        e += a.degree(w[x]) * a.degree(w[y]);
                    }
                }
                SparseVec::from_pairs([(i, field.sign(e))])
            })
            .collect();
        let mat = SparseMatrix::from_columns(field, cells.len(), cols);
        let bijective = mat.rank() == cells.len();
        if !bijective {
            failures.push((t, "map is not bijective on cells".to_string()));
        } else if let Some(reason) = missing_letters(&a, &m, k, t, &shifts) {
            failures.push((t, reason));
        } else {
            certified.push(t);
        }
        if !mat.is_zero() {
            blocks.insert(t - k as i64, mat);
        }
    }
    let map = GradedMap::new(source, target, k as i64, blocks)?;
    Ok(DualizationMap { length: k, window, map, certified, failures })
}

/// All length-`k` sequences of `letters`.
fn tuples(letters: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .iter()
            .flat_map(|w| letters.iter().map(move |&x| concat(&[w, &[x]])))
            .collect();
    }
    out
}

/// Reports when a degree-`t` cochain on `k` letters could see a letter of
/// `A` outside its exact range, so the enumerated cells are not all of
/// `Hom(Ā^{⊗k}, M)^t`.
fn missing_letters(a: &DGAlgebra, m: &DGBimodule, k: usize, t: i64, shifts: &[i64]) -> Option<String> {
    let (lo, hi) = a.exact_range()?;
    if k == 0 || m.dim() == 0 || shifts.is_empty() {
        return None;
    }
    let others = (k as i64 - 1) * if shifts[0] > 0 { *shifts.iter().min()? } else { *shifts.iter().max()? };
    if shifts[0] > 0 {
        let top = m.basis().max_degree()? - t - others + 1;
        (top > hi).then(|| format!("cells need letters up to degree {top}, {} is known only to {hi}", a.name()))
    } else {
        let bottom = m.basis().min_degree()? - t - others + 1;
        (bottom < lo).then(|| format!("cells need letters down to degree {bottom}, {} is known only from {lo}", a.name()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    fn regular(a: DGAlgebra) -> (Arc<DGAlgebra>, Arc<DGBimodule>) {
        let a = Arc::new(a);
        let m = Arc::new(DGBimodule::regular(a.clone()));
        (a, m)
    }

    fn free_with_differential(sign: i64) -> DGAlgebra {
        // du = v on generators of degrees (2, 3) or (-2, -1), words of length ≤ 2
        let gens = if sign > 0 { [("u", 2), ("v", 3)] } else { [("u", -2), ("v", -1)] };
        DGAlgebra::truncated_free(q(), &gens, &[(0, 1, 1)], 2).unwrap()
    }

    fn samples() -> Vec<(DGAlgebra, (i64, i64))> {
        vec![
            (DGAlgebra::exterior(q(), &[-1]).unwrap(), (-4, 6)),
            (DGAlgebra::exterior(q(), &[-1, -3]).unwrap(), (-4, 6)),
            (DGAlgebra::exterior(q(), &[-2, -3]).unwrap(), (-4, 6)),
            (free_with_differential(-1), (-4, 4)),
            (free_with_differential(1), (-2, 2)),
        ]
    }

    #[test]
    fn differential_squares_to_zero() {
        for (a, w) in samples() {
            let (a, m) = regular(a);
            let c = hochschild_complex(a, m, w).unwrap();
            c.complex().check_square_zero().unwrap();
        }
    }

    #[test]
    fn differential_is_minus_bracket_with_multiplication() {
        for (a, w) in samples() {
            let (a, m) = regular(a);
            let c = hochschild_complex(a, m, w).unwrap();
            let mu = c.multiplication_cochain().unwrap();
            for t in w.0..w.1 {
                for i in 0..c.cells(t).len() {
                    let f = c.from_vector(t, &SparseVec::unit(i, q()));
                    let lhs = c.differential(&f);
                    let rhs = c.bracket(&mu, &f).unwrap().scaled(&q().from_i64(-1));
                    assert_eq!(lhs, rhs, "{} degree {t} cell {i}", c.algebra().name());
                }
            }
        }
    }

    #[test]
    fn cup_satisfies_leibniz() {
        for (a, w) in samples() {
            let (a, m) = regular(a);
            let c = hochschild_complex(a, m, w).unwrap();
            let one = q().one();
            for s in w.0..=w.1 {
                for t in w.0..=w.1 {
                    if s + t + 1 > w.1 + 1 || s + t < w.0 - 1 {
                        continue;
                    }
                    for i in 0..c.cells(s).len().min(4) {
                        for j in 0..c.cells(t).len().min(4) {
                            let f = c.from_vector(s, &SparseVec::unit(i, q()));
                            let g = c.from_vector(t, &SparseVec::unit(j, q()));
                            let lhs = c.differential(&c.cup(&f, &g).unwrap());
                            let rhs = c
                                .cup(&c.differential(&f), &g)
                                .unwrap()
                                .add(&c.cup(&f, &c.differential(&g)).unwrap().scaled(&(&q().sign(s) * &one)));
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cocycles_of_length_zero_are_the_graded_center() {
        for (a, _) in samples() {
            let (a, m) = regular(a);
            let center = a.graded_center();
            let (lo, hi) = (a.basis().min_degree().unwrap(), a.basis().max_degree().unwrap());
            let c = hochschild_complex(a.clone(), m, (lo, hi)).unwrap();
            let mut count = 0;
            for t in lo..=hi {
                let zero_len: Vec<usize> =
                    (0..c.cells(t).len()).filter(|&i| c.cells(t)[i].0.is_empty()).collect();
                let block: Vec<SparseVec> = zero_len
                    .iter()
                    .map(|&i| c.to_vector(&c.differential(&c.from_vector(t, &SparseVec::unit(i, q())))).unwrap().1)
                    .collect();
                let rows = c.cells(t + 1).len();
                let rank = SparseMatrix::from_columns(q(), rows, block).rank();
                count += zero_len.len() - rank;
            }
            assert_eq!(count, center.len(), "{}", a.name());
        }
    }

    #[test]
    fn exterior_on_odd_generator_has_rank_one_in_each_degree() {
        let (a, m) = regular(DGAlgebra::exterior(q(), &[-1]).unwrap());
        let hh = hh_cohomology(a, m, (-3, 8)).unwrap();
        for t in -3..=8 {
            assert_eq!(hh.dims[&t], usize::from(t >= -1), "degree {t}");
        }
    }

    #[test]
    fn polynomial_with_truncated_coefficients_matches_koszul_resolution() {
        // HH(k[x], k[x]/x^4) = M ⊕ M[1]: one class in each degree -1..=6
        let a = Arc::new(DGAlgebra::polynomial(q(), &[2], 12).unwrap());
        let (m, _) = DGBimodule::regular(a.clone()).truncate_above(6).unwrap();
        let hh = hh_cohomology(a, Arc::new(m), (-3, 9)).unwrap();
        for t in -3..=9 {
            assert_eq!(hh.dims[&t], usize::from((-1..=6).contains(&t)), "degree {t}");
        }
        let ranks = hh.product_ranks().unwrap();
        // x^i ∪ x^j = x^{i+j} while the sum stays below x^4
        assert_eq!(ranks[&(2, 2)], 1);
        assert_eq!(ranks[&(4, 4)], 0);
        assert_eq!(ranks[&(-1, -1)], 0);
    }

    #[test]
    fn refuses_unbounded_coefficients_and_short_truncations() {
        let a = Arc::new(DGAlgebra::polynomial(q(), &[2], 8).unwrap());
        let m = Arc::new(DGBimodule::regular(a.clone()));
        assert!(matches!(hochschild_complex(a.clone(), m, (0, 4)), Err(Error::Finiteness(_))));
        // cochains in degree -1 with values in degree 6 see letters up to degree 8
        let a = Arc::new(DGAlgebra::polynomial(q(), &[2], 7).unwrap());
        let (m, _) = DGBimodule::regular(a.clone()).truncate_above(6).unwrap();
        assert!(matches!(
            hochschild_complex(a, Arc::new(m), (0, 4)),
            Err(Error::InsufficientTruncation(_))
        ));
    }

    #[test]
    fn homology_differential_squares_to_zero() {
        for (a, w) in samples() {
            let (a, m) = regular(a);
            hh_homology(a, m, w).unwrap().complex().check_square_zero().unwrap();
        }
    }

    #[test]
    fn homology_of_exterior_on_odd_generator() {
        let (a, m) = regular(DGAlgebra::exterior(q(), &[-1]).unwrap());
        let dims = hh_homology(a, m, (-8, 2)).unwrap().dims().unwrap();
        for t in -8..=2 {
            assert_eq!(dims[&t], usize::from(t <= 0), "degree {t}");
        }
    }

    #[test]
    fn homology_grows_along_the_truncation_tower() {
        let a = Arc::new(DGAlgebra::polynomial(q(), &[2], 14).unwrap());
        let mut prev: Option<BTreeMap<i64, usize>> = None;
        for n in 1..=3 {
            let (m, _) = DGBimodule::regular(a.clone()).truncate_above(2 * n).unwrap();
            let dims = hh_homology(a.clone(), Arc::new(m), (0, 8)).unwrap().dims().unwrap();
            // M ⊕ M[-1] with M = k[x]/x^{n+1}
            for t in 0..=8 {
                let expect = usize::from(t % 2 == 0 && t <= 2 * n) + usize::from(t % 2 == 1 && t <= 2 * n + 1);
                assert_eq!(dims[&t], expect, "n={n} degree {t}");
            }
            if let Some(p) = prev {
                assert!(p.iter().all(|(t, d)| dims[t] >= *d));
            }
            prev = Some(dims);
        }
    }

    #[test]
    fn dualization_map_is_certified_for_bounded_coefficients() {
        let (a, m) = regular(DGAlgebra::exterior(q(), &[-1, -3]).unwrap());
        for k in 0..=3 {
            let g = dualization_map(a.clone(), m.clone(), k, (-4, 10)).unwrap();
            assert!(g.is_isomorphism(), "{:?}", g.failures);
        }
        let a = Arc::new(DGAlgebra::polynomial(q(), &[2], 30).unwrap());
        let (m, _) = DGBimodule::regular(a.clone()).truncate_above(6).unwrap();
        let g = dualization_map(a, Arc::new(m), 2, (-6, 6)).unwrap();
        assert!(g.is_isomorphism(), "{:?}", g.failures);
    }

    #[test]
    fn dualization_map_fails_for_unbounded_coefficients() {
        let a = Arc::new(DGAlgebra::polynomial(q(), &[2], 12).unwrap());
        let m = Arc::new(DGBimodule::regular(a.clone()));
        assert!(matches!(dualization_map(a.clone(), m.clone(), 1, (-2, 2)), Err(Error::Finiteness(_))));
        let g = dualization_map_unguarded(a, m, 1, (-2, 2)).unwrap();
        assert!(!g.is_isomorphism());
    }
}
