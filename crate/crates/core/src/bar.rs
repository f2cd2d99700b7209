//! Two-sided bar construction `B(M, R, N)`, its coalgebra structure for
//! ground ends, the Koszul dual `R! = B(R)^∨`, and functoriality.
//!
//! A word `m ⊗ [a₁|…|aₙ] ⊗ ν` has letters in the augmentation ideal and sits
//! in degree `|m| + Σ(|aᵢ| − 1) + |ν|`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::dg::{AlgebraMap, BasisElement, DGAlgebra, DGBimodule, DGCoalgebra, FlatBasis, Tensor2};
use crate::error::{Error, Result};
use crate::graded::{CochainComplex, GradedMap, GradedVectorSpace};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::scalar::{Field, FieldScalar};

/// Sequences of letters with prescribed total (shifted) degree. Letters must
/// all have nonzero shifted degrees of one sign, so that each total degree
/// has finitely many sequences, all of length at most `|total|`.
#[derive(Clone, Debug)]
pub(crate) struct LetterWords {
    letters: Vec<(usize, i64)>,
    sign: i64,
    cache: HashMap<i64, Vec<Vec<usize>>>,
}

impl LetterWords {
    pub(crate) fn new(letters: Vec<(usize, i64)>, what: &str) -> Result<Self> {
        if let Some((l, _)) = letters.iter().find(|(_, d)| *d == 0) {
            return Err(Error::UnboundedWords(format!(
                "{what}: letter {l} has shifted degree 0, so words of every length share a degree"
            )));
        }
        let pos = letters.iter().any(|(_, d)| *d > 0);
        let neg = letters.iter().any(|(_, d)| *d < 0);
        if pos && neg {
            return Err(Error::UnboundedWords(format!(
                "{what}: shifted letter degrees of both signs; each degree has words of unbounded length"
            )));
        }
        let sign = if pos { 1 } else if neg { -1 } else { 0 };
        let mut letters = letters;
        letters.sort();
        Ok(LetterWords { letters, sign, cache: HashMap::new() })
    }

    /// +1 or −1 for the common sign of the shifted degrees; 0 with no letters.
    pub(crate) fn sign(&self) -> i64 {
        self.sign
    }

    /// All sequences with shifted degree sum `total`, in lexicographic order.
    pub(crate) fn words(&mut self, total: i64) -> Vec<Vec<usize>> {
        if total == 0 {
            return vec![Vec::new()];
        }
        if self.sign == 0 || total.signum() != self.sign {
            return Vec::new();
        }
        if let Some(w) = self.cache.get(&total) {
            return w.clone();
        }
        let mut out = Vec::new();
        for (l, d) in self.letters.clone() {
            if d.abs() > total.abs() {
                continue;
            }
            for tail in self.words(total - d) {
                let mut w = Vec::with_capacity(tail.len() + 1);
                w.push(l);
                w.extend(tail);
                out.push(w);
            }
        }
        self.cache.insert(total, out.clone());
        out
    }
}

/// A basis word `left ⊗ [letters] ⊗ right` of a two-sided (co)bar complex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub left: usize,
    pub letters: Vec<usize>,
    pub right: usize,
}

impl Word {
    pub fn ground(letters: Vec<usize>) -> Self {
        Word { left: 0, letters, right: 0 }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Linear combination of words.
pub type WordVec = BTreeMap<Word, FieldScalar>;

pub(crate) fn add_word(acc: &mut WordVec, w: Word, c: FieldScalar) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&w) {
        Some(v) => {
            *v += &c;
            if v.is_zero() {
                acc.remove(&w);
            }
        }
        None => {
            acc.insert(w, c);
        }
    }
}

/// Words of a (co)bar-type complex indexed by degree, together with its
/// cochain complex on the built range.
#[derive(Clone, Debug)]
pub(crate) struct WordComplex {
    pub words: BTreeMap<i64, Vec<Word>>,
    pub index: HashMap<Word, (i64, usize)>,
    pub complex: CochainComplex,
}

impl WordComplex {
    /// Enumerates words in degrees `built.0..=built.1`, applies `differential`
    /// to every word whose image stays inside the built range, and checks
    /// `d² = 0`.
    pub(crate) fn build(
        field: Field,
        built: (i64, i64),
        mut enumerate: impl FnMut(i64) -> Vec<Word>,
        label: impl Fn(&Word) -> String,
        differential: impl Fn(&Word) -> WordVec + Sync + Send,
    ) -> Result<Self> {
        let mut words = BTreeMap::new();
        let mut index = HashMap::new();
        let mut space = GradedVectorSpace::new(field);
        for t in built.0..=built.1 {
            let mut ws = enumerate(t);
            ws.sort();
            ws.dedup();
            for (i, w) in ws.iter().enumerate() {
                index.insert(w.clone(), (t, i));
            }
            space.add_degree(t, ws.iter().map(&label))?;
            words.insert(t, ws);
        }
        let mut blocks = BTreeMap::new();
        for t in built.0..built.1 {
            let ws = &words[&t];
            let rows = words[&(t + 1)].len();
            let cols = crate::parallel_map(ws, |w| {
                let img = differential(w);
                let mut pairs = Vec::with_capacity(img.len());
                for (u, c) in img {
                    match index.get(&u) {
                        Some(&(d, j)) if d == t + 1 => pairs.push((j, c)),
                        _ => {
                            return Err(Error::DimensionMismatch(format!(
                                "differential of a degree-{t} word left the enumerated basis"
                            )))
                        }
                    }
                }
                Ok(SparseVec::from_pairs(pairs))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let m = SparseMatrix::from_columns(field, rows, cols);
            if !m.is_zero() {
                blocks.insert(t, m);
            }
        }
        let complex = CochainComplex::from_blocks(space, blocks, Some(built))?;
        Ok(WordComplex { words, index, complex })
    }

    pub(crate) fn vector(&self, v: &WordVec) -> Result<(i64, SparseVec)> {
        let mut deg = None;
        let mut pairs = Vec::new();
        for (w, c) in v {
            let (d, i) = *self
                .index
                .get(w)
                .ok_or_else(|| Error::InsufficientTruncation("word outside the built range".into()))?;
            if deg.is_some_and(|e| e != d) {
                return Err(Error::DimensionMismatch("inhomogeneous word vector".into()));
            }
            deg = Some(d);
            pairs.push((i, c.clone()));
        }
        Ok((deg.unwrap_or(0), SparseVec::from_pairs(pairs)))
    }
}

fn require_window(window: (i64, i64)) -> Result<()> {
    if window.0 > window.1 {
        return Err(Error::DimensionMismatch(format!("empty window {}:{}", window.0, window.1)));
    }
    Ok(())
}

/// True for the one-dimensional module `k` in degree 0 acted on through the
/// augmentation.
pub fn is_ground_module(m: &DGBimodule) -> bool {
    let a = m.algebra();
    m.dim() == 1
        && m.degree(0) == 0
        && m.d(0).is_zero()
        && (0..a.dim()).filter(|&x| x != a.unit()).all(|x| m.act_left(x, 0).is_zero() && m.act_right(0, x).is_zero())
}

/// Checks that the exact range of `a` covers every letter degree in `needed`.
pub(crate) fn require_exact(a: &DGAlgebra, needed: (i64, i64), what: &str) -> Result<()> {
    if let Some((lo, hi)) = a.exact_range() {
        if needed.0 < lo || needed.1 > hi {
            return Err(Error::InsufficientTruncation(format!(
                "{what} needs {} exact in degrees {}..={}, but it is exact only in {}..={}",
                a.name(),
                needed.0,
                needed.1,
                if lo == i64::MIN { "-inf".to_string() } else { lo.to_string() },
                if hi == i64::MAX { "inf".to_string() } else { hi.to_string() },
            )));
        }
    }
    Ok(())
}

/// The two-sided bar complex on a degree window.
#[derive(Clone, Debug)]
pub struct BarComplex {
    algebra: Arc<DGAlgebra>,
    left: Arc<DGBimodule>,
    right: Arc<DGBimodule>,
    ground_ends: bool,
    window: (i64, i64),
    inner: WordComplex,
}

/// `B(M, R, N)` with cohomology valid on `window`; words are built one degree
/// beyond on each side.
pub fn bar(
    left: Arc<DGBimodule>,
    r: Arc<DGAlgebra>,
    right: Arc<DGBimodule>,
    window: (i64, i64),
) -> Result<BarComplex> {
    require_window(window)?;
    r.require_valid()?;
    for m in [&left, &right] {
        if m.algebra().as_ref() != r.as_ref() {
            return Err(Error::CoefficientMismatch(format!("{} is not a module over {}", m.name(), r.name())));
        }
        if m.field() != r.field() {
            return Err(Error::FieldMismatch(m.field().to_string(), r.field().to_string()));
        }
        m.require_valid()?;
    }
    let f = r.field();
    let letters: Vec<(usize, i64)> = r.augmentation_ideal().into_iter().map(|a| (a, r.degree(a) - 1)).collect();
    let mut gen = LetterWords::new(letters, "bar construction")?;
    let built = (window.0 - 1, window.1 + 1);
    let (lb, rb) = (left.basis(), right.basis());
    let span = |b: &FlatBasis| (b.min_degree().unwrap_or(0), b.max_degree().unwrap_or(0));
    let (ml, mr) = (span(lb), span(rb));
    if gen.sign() > 0 {
        let top = built.1 + 1 - ml.0 - mr.0;
        require_exact(&r, (0, top), "bar construction")?;
    } else if gen.sign() < 0 {
        let bottom = built.0 + 1 - ml.1 - mr.1;
        require_exact(&r, (bottom, 0), "bar construction")?;
    }
    let ground_ends = is_ground_module(&left) && is_ground_module(&right);
    let (l2, r2, a2) = (left.clone(), right.clone(), r.clone());
    let enumerate = |t: i64| {
        let mut out = Vec::new();
        for m in 0..lb.len() {
            for n in 0..rb.len() {
                for letters in gen.words(t - lb.degree(m) - rb.degree(n)) {
                    out.push(Word { left: m, letters, right: n });
                }
            }
        }
        out
    };
    let label = |w: &Word| bar_label(&l2, &a2, &r2, ground_ends, w);
    let differential = |w: &Word| bar_differential(&l2, &a2, &r2, w);
    let inner = WordComplex::build(f, built, enumerate, label, differential)?;
    Ok(BarComplex { algebra: r, left, right, ground_ends, window, inner })
}

/// `B(R) = B(k, R, k)`.
pub fn reduced_bar(r: Arc<DGAlgebra>, window: (i64, i64)) -> Result<BarComplex> {
    let k = Arc::new(DGBimodule::trivial(r.clone()));
    bar(k.clone(), r, k, window)
}

fn bar_label(m: &DGBimodule, r: &DGAlgebra, n: &DGBimodule, ground: bool, w: &Word) -> String {
    let inner = w.letters.iter().map(|a| r.basis().name(*a)).collect::<Vec<_>>().join("|");
    if ground {
        format!("[{inner}]")
    } else {
        format!("{}⊗[{inner}]⊗{}", m.basis().name(w.left), n.basis().name(w.right))
    }
}

/// Bar differential on one word; the single source of its sign conventions.
///
/// With `ε₀ = |m|` and `εᵢ = εᵢ₋₁ + |aᵢ| − 1`:
/// `d(m) + Σ −(−1)^{εᵢ₋₁}[…|daᵢ|…] + Σ (−1)^{εᵢ}[…|aᵢaᵢ₊₁|…]
///  + (−1)^{|m|}(m·a₁)[a₂|…] − (−1)^{εₙ₋₁}[…|aₙ₋₁](aₙ·ν) + (−1)^{εₙ}[…]dν`.
pub(crate) fn bar_differential(m: &DGBimodule, r: &DGAlgebra, n: &DGBimodule, w: &Word) -> WordVec {
    let f = r.field();
    let mut acc = WordVec::new();
    let k = w.letters.len();
    let mut pre = Vec::with_capacity(k + 1);
    pre.push(m.degree(w.left));
    for a in &w.letters {
        pre.push(pre.last().unwrap() + r.degree(*a) - 1);
    }
    for (m2, c) in m.d(w.left).iter() {
        add_word(&mut acc, Word { left: *m2, ..w.clone() }, c.clone());
    }
    for i in 0..k {
        let s = -f.sign(pre[i]);
        for (b, c) in r.d(w.letters[i]).iter() {
            let mut letters = w.letters.clone();
            letters[i] = *b;
            add_word(&mut acc, Word { letters, ..w.clone() }, &s * c);
        }
    }
    for i in 0..k.saturating_sub(1) {
        let s = f.sign(pre[i + 1]);
        for (b, c) in r.mul(w.letters[i], w.letters[i + 1]).iter() {
            let mut letters = Vec::with_capacity(k - 1);
            letters.extend_from_slice(&w.letters[..i]);
            letters.push(*b);
            letters.extend_from_slice(&w.letters[i + 2..]);
            add_word(&mut acc, Word { letters, ..w.clone() }, &s * c);
        }
    }
    if k > 0 {
        let s = f.sign(pre[0]);
        for (m2, c) in m.act_right(w.left, w.letters[0]).iter() {
            add_word(&mut acc, Word { left: *m2, letters: w.letters[1..].to_vec(), right: w.right }, &s * c);
        }
        let s = -f.sign(pre[k - 1]);
        for (n2, c) in n.act_left(w.letters[k - 1], w.right).iter() {
            add_word(&mut acc, Word { left: w.left, letters: w.letters[..k - 1].to_vec(), right: *n2 }, &s * c);
        }
    }
    let s = f.sign(pre[k]);
    for (n2, c) in n.d(w.right).iter() {
        add_word(&mut acc, Word { right: *n2, ..w.clone() }, &s * c);
    }
    acc
}

impl BarComplex {
    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn algebra(&self) -> &Arc<DGAlgebra> {
        &self.algebra
    }

    pub fn left(&self) -> &Arc<DGBimodule> {
        &self.left
    }

    pub fn right(&self) -> &Arc<DGBimodule> {
        &self.right
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.inner.complex
    }

    pub fn has_ground_ends(&self) -> bool {
        self.ground_ends
    }

    pub fn words(&self, degree: i64) -> &[Word] {
        self.inner.words.get(&degree).map_or(&[], Vec::as_slice)
    }

    pub fn position(&self, w: &Word) -> Option<(i64, usize)> {
        self.inner.index.get(w).copied()
    }

    pub fn word_degree(&self, w: &Word) -> i64 {
        self.left.degree(w.left)
            + w.letters.iter().map(|a| self.algebra.degree(*a) - 1).sum::<i64>()
            + self.right.degree(w.right)
    }

    pub fn max_word_length(&self) -> usize {
        self.inner.words.values().flatten().map(Word::len).max().unwrap_or(0)
    }

    pub fn differential_of(&self, w: &Word) -> WordVec {
        bar_differential(&self.left, &self.algebra, &self.right, w)
    }

    pub fn cohomology_dims(&self) -> Result<BTreeMap<i64, usize>> {
        self.complex().cohomology_dims(self.window.0, self.window.1)
    }

    /// Deconcatenation `Δ[a₁|…|aₙ] = Σ [a₁|…|aᵢ] ⊗ [aᵢ₊₁|…|aₙ]`.
    pub fn coproduct(&self, w: &Word) -> Vec<(Word, Word)> {
        (0..=w.len())
            .map(|i| (Word::ground(w.letters[..i].to_vec()), Word::ground(w.letters[i..].to_vec())))
            .collect()
    }

    /// The bar coalgebra restricted to the built degree range, which must
    /// contain 0 so that deconcatenation stays inside it. The result is a
    /// window: exact in the built range, not closed under the differential at
    /// its far edge.
    pub fn coalgebra(&self) -> Result<DGCoalgebra> {
        if !self.ground_ends {
            return Err(Error::CoefficientMismatch("bar coalgebra needs ground ends".into()));
        }
        let (lo, hi) = self.complex().known().expect("bar complexes record their range");
        if lo > 0 || hi < 0 {
            return Err(Error::InsufficientTruncation(format!(
                "bar coalgebra needs degree 0 inside {lo}..={hi}"
            )));
        }
        let f = self.algebra.field();
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
        let gid: HashMap<&Word, usize> = order
            .iter()
            .map(|w| {
                let (t, i) = self.inner.index[w];
                (w, basis.global(t, i))
            })
            .collect();
        let n = basis.len();
        let mut coproducts: Vec<Tensor2> = vec![Vec::new(); n];
        let mut diff = vec![SparseVec::new(); n];
        for w in &order {
            let id = gid[w];
            coproducts[id] = self
                .coproduct(w)
                .into_iter()
                .map(|(u, v)| (gid[&u], gid[&v], f.one()))
                .collect();
            let (t, _) = self.inner.index[w];
            if t < hi {
                diff[id] = SparseVec::from_pairs(self.differential_of(w).into_iter().map(|(u, c)| (gid[&u], c)));
            }
        }
        let mut c = DGCoalgebra::from_tables(f, format!("B({})", self.algebra.name()), basis, gid[&Word::ground(vec![])], coproducts, diff)?;
        c.set_exact_range(Some((lo, hi)), false);
        Ok(c)
    }
}

/// The Koszul dual `R! = B(R)^∨` with cohomology valid on `window`; the bar
/// construction is taken on the reflected window.
pub fn koszul_dual(r: Arc<DGAlgebra>, window: (i64, i64)) -> Result<KoszulDual> {
    require_window(window)?;
    let b = reduced_bar(r.clone(), (-window.1, -window.0))?;
    let algebra = crate::dg::dualize_coalgebra(&b.coalgebra()?).with_name(format!("{}!", r.name()));
    Ok(KoszulDual { algebra, window })
}

/// Output of [`koszul_dual`]: a windowed algebra and the degrees in which its
/// cohomology is trustworthy.
#[derive(Clone, Debug)]
pub struct KoszulDual {
    pub algebra: DGAlgebra,
    pub window: (i64, i64),
}

impl KoszulDual {
    pub fn cohomology_dims(&self) -> Result<BTreeMap<i64, usize>> {
        let (lo, hi) = self.window;
        let c = self.algebra.complex();
        let complex = CochainComplex::new(c.space().clone(), c.differential().clone(), Some((lo - 1, hi + 1)))?;
        complex.cohomology_dims(lo, hi)
    }
}

/// Unnormalized `B(k, R, k)` with letters from all of `R`, unit included.
/// Only defined when every letter has negative shifted degree, i.e. `R` is
/// concentrated in degrees `≤ 0`.
pub fn unnormalized_bar(r: Arc<DGAlgebra>, window: (i64, i64)) -> Result<CochainComplex> {
    require_window(window)?;
    r.require_valid()?;
    let f = r.field();
    let letters = (0..r.dim()).map(|a| (a, r.degree(a) - 1)).collect();
    let mut gen = LetterWords::new(letters, "unnormalized bar construction")?;
    let unit = r.unit();
    let built = (window.0 - 1, window.1 + 1);
    // the trivial module lets 1 act as the identity at the ends
    let differential = |w: &Word| {
        let mut acc = WordVec::new();
        let n = w.letters.len();
        let mut pre = vec![0i64];
        for a in &w.letters {
            pre.push(pre.last().unwrap() + r.degree(*a) - 1);
        }
        for i in 0..n {
            let s = -f.sign(pre[i]);
            for (b, c) in r.d(w.letters[i]).iter() {
                let mut l = w.letters.clone();
                l[i] = *b;
                add_word(&mut acc, Word::ground(l), &s * c);
            }
        }
        for i in 0..n.saturating_sub(1) {
            let s = f.sign(pre[i + 1]);
            for (b, c) in r.mul(w.letters[i], w.letters[i + 1]).iter() {
                let mut l = w.letters[..i].to_vec();
                l.push(*b);
                l.extend_from_slice(&w.letters[i + 2..]);
                add_word(&mut acc, Word::ground(l), &s * c);
            }
        }
        if n > 0 {
            if w.letters[0] == unit {
                add_word(&mut acc, Word::ground(w.letters[1..].to_vec()), f.one());
            }
            if w.letters[n - 1] == unit {
                add_word(&mut acc, Word::ground(w.letters[..n - 1].to_vec()), -f.sign(pre[n - 1]));
            }
        }
        acc
    };
    let label = |w: &Word| format!("[{}]", w.letters.iter().map(|a| r.basis().name(*a)).collect::<Vec<_>>().join("|"));
    Ok(WordComplex::build(f, built, |t| gen.words(t).into_iter().map(Word::ground).collect(), label, differential)?.complex)
}

/// The map `B(φ): B(R) → B(R')` induced by an algebra map, on the common window.
pub fn bar_map(phi: &AlgebraMap, source: &BarComplex, target: &BarComplex) -> Result<GradedMap> {
    let f = phi.source.field();
    let mut blocks = BTreeMap::new();
    for (t, ws) in &source.inner.words {
        let cols = ws
            .iter()
            .map(|w| {
                let mut acc: WordVec = WordVec::new();
                acc.insert(Word { left: 0, letters: Vec::new(), right: 0 }, f.one());
                for a in &w.letters {
                    let img = &phi.images[*a];
                    let mut next = WordVec::new();
                    for (u, c) in &acc {
                        for (b, e) in img.iter() {
                            let mut l = u.letters.clone();
                            l.push(*b);
                            add_word(&mut next, Word::ground(l), c * e);
                        }
                    }
                    acc = next;
                }
                let (_, v) = target.inner.vector(&acc)?;
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        blocks.insert(*t, SparseMatrix::from_columns(f, target.complex().dim(*t), cols));
    }
    GradedMap::new(source.complex().space().clone(), target.complex().space().clone(), 0, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn letter_words_bounded() {
        let mut g = LetterWords::new(vec![(1, 1), (2, 3)], "t").unwrap();
        assert_eq!(g.words(3), vec![vec![1, 1, 1], vec![2]]);
        assert!(LetterWords::new(vec![(1, 0)], "t").is_err());
        assert!(LetterWords::new(vec![(1, 1), (2, -1)], "t").is_err());
    }

    #[test]
    fn bar_of_ground_field() {
        let b = reduced_bar(Arc::new(DGAlgebra::ground(q())), (-3, 3)).unwrap();
        let dims = b.cohomology_dims().unwrap();
        assert_eq!(dims[&0], 1);
        assert_eq!(dims.values().sum::<usize>(), 1);
    }

    #[test]
    fn bar_of_exterior() {
        let r = Arc::new(DGAlgebra::exterior(q(), &[-1]).unwrap());
        let b = reduced_bar(r, (-8, 0)).unwrap();
        let dims = b.cohomology_dims().unwrap();
        for t in -8..=0 {
            assert_eq!(dims[&t], usize::from(t % 2 == 0), "degree {t}");
        }
        assert!(b.complex().differential().is_zero());
        assert!(b.max_word_length() <= 5);
    }

    #[test]
    fn bar_of_polynomial() {
        let r = Arc::new(DGAlgebra::polynomial(q(), &[2], 8).unwrap());
        let b = reduced_bar(r, (0, 3)).unwrap();
        let dims = b.cohomology_dims().unwrap();
        assert_eq!((dims[&0], dims[&1], dims[&2], dims[&3]), (1, 1, 0, 0));
    }

    #[test]
    fn polynomial_truncation_guard() {
        let r = Arc::new(DGAlgebra::polynomial(q(), &[2], 4).unwrap());
        assert!(matches!(reduced_bar(r, (0, 6)), Err(Error::InsufficientTruncation(_))));
    }

    #[test]
    fn degree_one_letters_rejected() {
        let r = Arc::new(DGAlgebra::exterior(q(), &[1]).unwrap());
        assert!(matches!(reduced_bar(r, (0, 2)), Err(Error::UnboundedWords(_))));
    }

    #[test]
    fn two_sided_bar_squares_to_zero() {
        for r in [
            DGAlgebra::exterior(q(), &[-1]).unwrap(),
            DGAlgebra::exterior(q(), &[-1, -3]).unwrap(),
            DGAlgebra::polynomial(q(), &[2], 12).unwrap(),
            DGAlgebra::truncated_free(q(), &[("u", -2), ("v", -1)], &[(0, 1, 1)], 2).unwrap(),
            DGAlgebra::truncated_free(q(), &[("u", 2), ("v", 3)], &[(0, 1, 1)], 3).unwrap(),
        ] {
            let r = Arc::new(r);
            let reg = Arc::new(DGBimodule::regular(r.clone()));
            let k = Arc::new(DGBimodule::trivial(r.clone()));
            let w = if r.degree(r.augmentation_ideal()[0]) < 0 { (-6, 0) } else { (0, 6) };
            for (m, n) in [(&reg, &k), (&k, &reg), (&reg, &reg)] {
                bar(m.clone(), r.clone(), n.clone(), w).unwrap();
            }
        }
    }

    #[test]
    fn resolution_is_acyclic() {
        // B(R, R, k) resolves k: cohomology is k in degree 0
        let r = Arc::new(DGAlgebra::exterior(q(), &[-1]).unwrap());
        let reg = Arc::new(DGBimodule::regular(r.clone()));
        let k = Arc::new(DGBimodule::trivial(r.clone()));
        let dims = bar(reg, r, k, (-8, 0)).unwrap().cohomology_dims().unwrap();
        assert_eq!(dims.iter().filter(|(_, d)| **d > 0).collect::<Vec<_>>(), vec![(&0, &1)]);
    }

    #[test]
    fn normalized_matches_unnormalized() {
        for r in [
            DGAlgebra::exterior(q(), &[-1]).unwrap(),
            DGAlgebra::truncated_free(q(), &[("u", -2), ("v", -1)], &[(0, 1, 1)], 2).unwrap(),
        ] {
            let r = Arc::new(r);
            let u = unnormalized_bar(r.clone(), (-6, 0)).unwrap().cohomology_dims(-6, 0).unwrap();
            let n = reduced_bar(r, (-6, 0)).unwrap().cohomology_dims().unwrap();
            assert_eq!(u, n);
        }
    }

    #[test]
    fn acyclic_algebra_has_trivial_bar() {
        // T(u, v)/(length > 1) with du = v is k ⊕ (acyclic), so B is k up to degree
        let r = Arc::new(DGAlgebra::truncated_free(q(), &[("u", -2), ("v", -1)], &[(0, 1, 1)], 1).unwrap());
        let dims = reduced_bar(r, (-6, 0)).unwrap().cohomology_dims().unwrap();
        assert_eq!(dims.values().sum::<usize>(), 1);
    }

    #[test]
    fn koszul_duals() {
        let k = koszul_dual(Arc::new(DGAlgebra::ground(q())), (-2, 2)).unwrap();
        assert_eq!(k.cohomology_dims().unwrap().values().sum::<usize>(), 1);
        let e = koszul_dual(Arc::new(DGAlgebra::exterior(q(), &[-1]).unwrap()), (0, 8)).unwrap();
        let dims = e.cohomology_dims().unwrap();
        for t in 0..=8 {
            assert_eq!(dims[&t], usize::from(t % 2 == 0));
        }
        let p = koszul_dual(Arc::new(DGAlgebra::polynomial(q(), &[2], 12).unwrap()), (-6, 2)).unwrap();
        let dims = p.cohomology_dims().unwrap();
        for t in -6..=2 {
            assert_eq!(dims[&t], usize::from(t == 0 || t == -1), "degree {t}");
        }
    }

    #[test]
    fn bar_coalgebra_is_valid() {
        let r = Arc::new(DGAlgebra::polynomial(q(), &[2], 10).unwrap());
        let c = reduced_bar(r, (0, 6)).unwrap().coalgebra().unwrap();
        assert!(c.validate().is_valid(), "{:?}", c.validate());
    }
}
