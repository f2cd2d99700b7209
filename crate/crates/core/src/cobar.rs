//! Two-sided cobar construction `Ω(P, S, Q)` over a conilpotent coalgebra,
//! with the concatenation algebra structure for ground ends.
//!
//! A word `p ⊗ [x₁|…|xₙ] ⊗ q` has letters in the supplementation ideal and
//! sits in degree `|p| + Σ(|xᵢ| + 1) + |q|`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bar::{add_word, LetterWords, Word, WordComplex, WordVec};
use crate::dg::{conilpotency_degree, BasisElement, DGAlgebra, DGCoalgebra, FlatBasis, Tensor2};
use crate::error::{Error, Result};
use crate::graded::CochainComplex;
use crate::linalg::SparseVec;

/// Which side a comodule coacts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `λ: Q → S ⊗ Q`
    Left,
    /// `ρ: P → P ⊗ S`
    Right,
}

/// A DG comodule over a DG coalgebra. Coaction terms are stored as
/// `(module, coalgebra, c)` for right comodules and `(coalgebra, module, c)`
/// for left ones.
#[derive(Clone, Debug)]
pub struct DGComodule {
    name: String,
    coalgebra: Arc<DGCoalgebra>,
    side: Side,
    basis: FlatBasis,
    coaction: Vec<Tensor2>,
    diff: Vec<SparseVec>,
}

impl DGComodule {
    pub fn from_tables(
        name: impl Into<String>,
        coalgebra: Arc<DGCoalgebra>,
        side: Side,
        basis: FlatBasis,
        coaction: Vec<Tensor2>,
        diff: Vec<SparseVec>,
    ) -> Result<Self> {
        if coaction.len() != basis.len() || diff.len() != basis.len() {
            return Err(Error::DimensionMismatch("comodule table sizes".into()));
        }
        Ok(DGComodule { name: name.into(), coalgebra, side, basis, coaction, diff })
    }

    /// `k` coacting through the coaugmentation.
    pub fn ground(s: Arc<DGCoalgebra>, side: Side) -> Self {
        let basis = FlatBasis::new(vec![BasisElement { name: "1".into(), degree: 0 }]).unwrap();
        let u = s.unit();
        let one = s.field().one();
        let coaction = match side {
            Side::Left => vec![vec![(u, 0, one)]],
            Side::Right => vec![vec![(0, u, one)]],
        };
        DGComodule::from_tables("k", s, side, basis, coaction, vec![SparseVec::new()]).unwrap()
    }

    /// `S` coacting on itself by comultiplication.
    pub fn regular(s: Arc<DGCoalgebra>, side: Side) -> Self {
        let coaction = (0..s.dim()).map(|x| s.coproduct(x).clone()).collect();
        let diff = (0..s.dim()).map(|x| s.d(x).clone()).collect();
        DGComodule::from_tables(s.name().to_string(), s.clone(), side, s.basis().clone(), coaction, diff).unwrap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn basis(&self) -> &FlatBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, m: usize) -> i64 {
        self.basis.degree(m)
    }

    pub fn d(&self, m: usize) -> &SparseVec {
        &self.diff[m]
    }

    pub fn coalgebra(&self) -> &Arc<DGCoalgebra> {
        &self.coalgebra
    }

    /// Coaction terms with a coalgebra factor in the supplementation ideal,
    /// as `(module element, coalgebra element, c)` regardless of side.
    fn reduced_coaction(&self, m: usize) -> Vec<(usize, usize, crate::scalar::FieldScalar)> {
        let u = self.coalgebra.unit();
        self.coaction[m]
            .iter()
            .filter_map(|(a, b, c)| match self.side {
                Side::Right if *b != u => Some((*a, *b, c.clone())),
                Side::Left if *a != u => Some((*b, *a, c.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn is_ground(&self) -> bool {
        self.dim() == 1 && self.degree(0) == 0 && self.reduced_coaction(0).is_empty() && self.d(0).is_zero()
    }
}

/// The two-sided cobar complex on a degree window.
#[derive(Clone, Debug)]
pub struct CobarComplex {
    coalgebra: Arc<DGCoalgebra>,
    left: Arc<DGComodule>,
    right: Arc<DGComodule>,
    ground_ends: bool,
    window: (i64, i64),
    conilpotency: usize,
    inner: WordComplex,
}

/// `Ω(P, S, Q)` with cohomology valid on `window`. Refuses coalgebras that
/// are not conilpotent within their dimension bound.
pub fn cobar(
    left: Arc<DGComodule>,
    s: Arc<DGCoalgebra>,
    right: Arc<DGComodule>,
    window: (i64, i64),
) -> Result<CobarComplex> {
    if window.0 > window.1 {
        return Err(Error::DimensionMismatch(format!("empty window {}:{}", window.0, window.1)));
    }
    s.require_valid()?;
    if left.side != Side::Right || right.side != Side::Left {
        return Err(Error::CoefficientMismatch("cobar needs a right comodule on the left and vice versa".into()));
    }
    let bound = s.dim() + 1;
    let conilpotency = conilpotency_degree(&s, bound).ok_or(Error::NotConilpotent(bound))?;
    let f = s.field();
    let letters = s.supplementation_ideal().into_iter().map(|x| (x, s.degree(x) + 1)).collect();
    let mut gen = LetterWords::new(letters, "cobar construction")?;
    let built = (window.0 - 1, window.1 + 1);
    let span = |b: &FlatBasis| (b.min_degree().unwrap_or(0), b.max_degree().unwrap_or(0));
    let (pl, ql) = (span(left.basis()), span(right.basis()));
    let needed = match gen.sign() {
        1 => Some((0, built.1 - pl.0 - ql.0)),
        -1 => Some((built.0 - 1 - pl.1 - ql.1, 0)),
        _ => None,
    };
    if let (Some((nlo, nhi)), Some((lo, hi))) = (needed, s.exact_range()) {
        if nlo < lo || nhi > hi {
            return Err(Error::InsufficientTruncation(format!(
                "cobar construction needs {} exact in degrees {nlo}..={nhi}, but it is exact only in {lo}..={hi}",
                s.name()
            )));
        }
    }
    let ground_ends = left.is_ground() && right.is_ground();
    let (p2, q2, s2) = (left.clone(), right.clone(), s.clone());
    let enumerate = |t: i64| {
        let mut out = Vec::new();
        for p in 0..p2.dim() {
            for q in 0..q2.dim() {
                for letters in gen.words(t - p2.degree(p) - q2.degree(q)) {
                    out.push(Word { left: p, letters, right: q });
                }
            }
        }
        out
    };
    let label = |w: &Word| {
        let inner = w.letters.iter().map(|x| s2.basis().name(*x)).collect::<Vec<_>>().join("|");
        if ground_ends {
            format!("[{inner}]")
        } else {
            format!("{}⊗[{inner}]⊗{}", p2.basis().name(w.left), q2.basis().name(w.right))
        }
    };
    let differential = |w: &Word| cobar_differential(&left, &s, &right, w);
    let inner = WordComplex::build(f, built, enumerate, label, differential)?;
    Ok(CobarComplex { coalgebra: s, left, right, ground_ends, window, conilpotency, inner })
}

/// `Ω(S) = Ω(k, S, k)`.
pub fn reduced_cobar(s: Arc<DGCoalgebra>, window: (i64, i64)) -> Result<CobarComplex> {
    let p = Arc::new(DGComodule::ground(s.clone(), Side::Right));
    let q = Arc::new(DGComodule::ground(s.clone(), Side::Left));
    cobar(p, s, q, window)
}

/// Cobar differential on one word; the single source of its sign conventions.
///
/// With `ε₀ = |p|` and `εᵢ = εᵢ₋₁ + |xᵢ| + 1`:
/// `dp + Σ −(−1)^{εᵢ₋₁}[…|dxᵢ|…] + Σ (−1)^{εᵢ₋₁}(−1)^{|x'|}[…|x'|x''|…]
///  − (−1)^{|p'|} p'[s|x₁|…] + (−1)^{εₙ}[…|xₙ|s]q' + (−1)^{εₙ}[…]dq`,
/// with `Δ̄x = Σ x'⊗x''`, `ρ̄p = Σ p'⊗s` and `λ̄q = Σ s⊗q'`.
pub(crate) fn cobar_differential(p: &DGComodule, s: &DGCoalgebra, q: &DGComodule, w: &Word) -> WordVec {
    let f = s.field();
    let mut acc = WordVec::new();
    let k = w.letters.len();
    let mut pre = Vec::with_capacity(k + 1);
    pre.push(p.degree(w.left));
    for x in &w.letters {
        pre.push(pre.last().unwrap() + s.degree(*x) + 1);
    }
    for (p2, c) in p.d(w.left).iter() {
        add_word(&mut acc, Word { left: *p2, ..w.clone() }, c.clone());
    }
    for i in 0..k {
        let sgn = -f.sign(pre[i]);
        for (y, c) in s.d(w.letters[i]).iter() {
            let mut letters = w.letters.clone();
            letters[i] = *y;
            add_word(&mut acc, Word { letters, ..w.clone() }, &sgn * c);
        }
        for (x1, x2, c) in s.reduced_coproduct(w.letters[i]) {
            let sgn = f.sign(pre[i] + s.degree(x1));
            let mut letters = Vec::with_capacity(k + 1);
            letters.extend_from_slice(&w.letters[..i]);
            letters.push(x1);
            letters.push(x2);
            letters.extend_from_slice(&w.letters[i + 1..]);
            add_word(&mut acc, Word { letters, ..w.clone() }, &sgn * &c);
        }
    }
    for (p2, x, c) in p.reduced_coaction(w.left) {
        let sgn = -f.sign(p.degree(p2));
        let mut letters = Vec::with_capacity(k + 1);
        letters.push(x);
        letters.extend_from_slice(&w.letters);
        add_word(&mut acc, Word { left: p2, letters, right: w.right }, &sgn * &c);
    }
    for (q2, x, c) in q.reduced_coaction(w.right) {
        let sgn = f.sign(pre[k]);
        let mut letters = w.letters.clone();
        letters.push(x);
        add_word(&mut acc, Word { left: w.left, letters, right: q2 }, &sgn * &c);
    }
    let sgn = f.sign(pre[k]);
    for (q2, c) in q.d(w.right).iter() {
        add_word(&mut acc, Word { right: *q2, ..w.clone() }, &sgn * c);
    }
    acc
}

impl CobarComplex {
    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn coalgebra(&self) -> &Arc<DGCoalgebra> {
        &self.coalgebra
    }

    pub fn left(&self) -> &Arc<DGComodule> {
        &self.left
    }

    pub fn right(&self) -> &Arc<DGComodule> {
        &self.right
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.inner.complex
    }

    /// Conilpotency degree certified before construction.
    pub fn conilpotency(&self) -> usize {
        self.conilpotency
    }

    pub fn words(&self, degree: i64) -> &[Word] {
        self.inner.words.get(&degree).map_or(&[], Vec::as_slice)
    }

    pub fn position(&self, w: &Word) -> Option<(i64, usize)> {
        self.inner.index.get(w).copied()
    }

    pub fn differential_of(&self, w: &Word) -> WordVec {
        cobar_differential(&self.left, &self.coalgebra, &self.right, w)
    }

    pub fn cohomology_dims(&self) -> Result<BTreeMap<i64, usize>> {
        self.complex().cohomology_dims(self.window.0, self.window.1)
    }

    /// The concatenation algebra on the built degree range (which must
    /// contain 0). Products leaving the range are dropped, so the result is a
    /// window rather than a closed algebra.
    pub fn algebra(&self) -> Result<DGAlgebra> {
        if !self.ground_ends {
            return Err(Error::CoefficientMismatch("cobar algebra needs ground ends".into()));
        }
        let (lo, hi) = self.complex().known().expect("cobar complexes record their range");
        if lo > 0 || hi < 0 {
            return Err(Error::InsufficientTruncation(format!("cobar algebra needs degree 0 inside {lo}..={hi}")));
        }
        let f = self.coalgebra.field();
        let mut elements = Vec::new();
        let mut order = Vec::new();
        for (t, ws) in &self.inner.words {
            for (i, w) in ws.iter().enumerate() {
                elements.push(BasisElement {
                    name: if w.is_empty() { "1".into() } else { self.complex().space().labels(*t)[i].clone() },
                    degree: *t,
                });
                order.push(w.clone());
            }
        }
        let basis = FlatBasis::new(elements)?;
        let gid = |w: &Word| self.inner.index.get(w).map(|&(t, i)| basis.global(t, i));
        let n = basis.len();
        let mut products = vec![SparseVec::new(); n * n];
        let mut diff = vec![SparseVec::new(); n];
        for u in &order {
            let iu = gid(u).unwrap();
            for v in &order {
                let uv = Word::ground([u.letters.as_slice(), v.letters.as_slice()].concat());
                if let Some(k) = gid(&uv) {
                    products[iu * n + gid(v).unwrap()] = SparseVec::unit(k, f);
                }
            }
            if self.inner.index[u].0 < hi {
                diff[iu] = SparseVec::from_pairs(self.differential_of(u).into_iter().map(|(z, c)| (gid(&z).unwrap(), c)));
            }
        }
        let unit = gid(&Word::ground(vec![])).unwrap();
        let mut a = DGAlgebra::from_tables(
            f,
            format!("Ω({})", self.coalgebra.name()),
            basis,
            unit,
            products,
            diff,
        )?;
        a.set_exact_range(Some((lo, hi)), false);
        Ok(a)
    }
}
