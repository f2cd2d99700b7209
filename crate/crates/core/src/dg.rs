//! Differential graded algebras, coalgebras and bimodules stored by
//! basis-level structure constants.
//!
//! Every structure is indexed by a flat basis: elements sorted by degree, then
//! by insertion order. Structure constants are sparse vectors over that basis.
//! Constructors only check that the tables are well formed; the algebraic
//! axioms are checked by `validate`, which every downstream construction
//! requires to pass.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::graded::{CochainComplex, GradedMap, GradedVectorSpace};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::scalar::{Field, FieldScalar};

/// A basis element: label and cohomological degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
}

/// Flat basis ordered by degree; gives global ids to the basis of a
/// [`GradedVectorSpace`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatBasis {
    elements: Vec<BasisElement>,
    local: Vec<usize>,
    by_degree: BTreeMap<i64, Vec<usize>>,
    by_name: HashMap<String, usize>,
}

impl FlatBasis {
    /// Sorts stably by degree. Names must be unique.
    pub fn new(elements: Vec<BasisElement>) -> Result<Self> {
        let mut elements = elements;
        elements.sort_by_key(|e| e.degree);
        let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        let mut local = Vec::with_capacity(elements.len());
        let mut by_name = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            let slot = by_degree.entry(e.degree).or_default();
            local.push(slot.len());
            slot.push(i);
            if by_name.insert(e.name.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate basis name {:?}", e.name)));
            }
        }
        Ok(FlatBasis { elements, local, by_degree, by_name })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.elements[i].degree
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i].name
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// Position of global id `i` inside its degree.
    pub fn local_index(&self, i: usize) -> usize {
        self.local[i]
    }

    pub fn in_degree(&self, d: i64) -> &[usize] {
        self.by_degree.get(&d).map_or(&[], Vec::as_slice)
    }

    pub fn global(&self, d: i64, local: usize) -> usize {
        self.by_degree[&d][local]
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.by_degree.keys().copied()
    }

    pub fn space(&self, field: Field) -> GradedVectorSpace {
        let mut v = GradedVectorSpace::new(field);
        for (d, ids) in &self.by_degree {
            v.add_degree(*d, ids.iter().map(|i| self.elements[*i].name.clone()))
                .expect("names are unique");
        }
        v
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.by_degree.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.by_degree.keys().next_back().copied()
    }

    /// Renders a global-id vector as `c·name + ...`.
    pub fn render(&self, v: &SparseVec) -> String {
        if v.is_zero() {
            return "0".into();
        }
        v.iter()
            .map(|(i, c)| {
                if c.is_one() {
                    self.name(*i).to_string()
                } else {
                    format!("({c})·{}", self.name(*i))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Builds the cochain complex of a flat basis from global-id differential
/// images.
fn complex_from_global(
    field: Field,
    basis: &FlatBasis,
    diff: &[SparseVec],
) -> Result<CochainComplex> {
    let space = basis.space(field);
    let mut blocks = BTreeMap::new();
    for d in basis.degrees() {
        let cols: Vec<SparseVec> = basis
            .in_degree(d)
            .iter()
            .map(|&i| {
                let mut pairs = Vec::new();
                for (j, c) in diff[i].iter() {
                    if basis.degree(*j) != d + 1 {
                        return Err(Error::Validation(format!(
                            "differential of {} has a component on {} in degree {} (expected {})",
                            basis.name(i),
                            basis.name(*j),
                            basis.degree(*j),
                            d + 1
                        )));
                    }
                    pairs.push((basis.local_index(*j), c.clone()));
                }
                Ok(SparseVec::from_pairs(pairs))
            })
            .collect::<Result<_>>()?;
        let m = SparseMatrix::from_columns(field, space.dim(d + 1), cols);
        if !m.is_zero() {
            blocks.insert(d, m);
        }
    }
    let dmap = GradedMap::new(space.clone(), space.clone(), 1, blocks)?;
    // d^2 is reported by validate with witnesses, so build without the check.
    Ok(CochainComplex::unchecked(space, dmap, None))
}

/// A failed axiom with the basis elements witnessing it.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Violation {
    pub axiom: String,
    pub witnesses: Vec<String>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at ({}): {}", self.axiom, self.witnesses.join(", "), self.detail)
    }
}

/// Result of checking every axiom by basis enumeration; carries the first
/// violation found.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ValidationReport {
    pub violation: Option<Violation>,
}

impl ValidationReport {
    pub fn ok() -> Self {
        ValidationReport { violation: None }
    }

    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }

    fn fail(axiom: &str, witnesses: &[&str], detail: String) -> Self {
        ValidationReport {
            violation: Some(Violation {
                axiom: axiom.to_string(),
                witnesses: witnesses.iter().map(|s| s.to_string()).collect(),
                detail,
            }),
        }
    }

    pub fn into_result(self) -> Result<()> {
        match self.violation {
            None => Ok(()),
            Some(v) => Err(Error::Validation(v.to_string())),
        }
    }
}

macro_rules! check {
    ($report:expr) => {{
        let r = $report;
        if !r.is_valid() {
            return r;
        }
    }};
}

/// Apply a bilinear table `table[x * n + y]` to two vectors.
fn bilinear(table: &[SparseVec], n: usize, a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut acc = SparseVec::new();
    for (x, cx) in a.iter() {
        for (y, cy) in b.iter() {
            let t = &table[x * n + y];
            if !t.is_zero() {
                acc = acc.add_scaled(&(cx * cy), t);
            }
        }
    }
    acc
}

fn linear(images: &[SparseVec], v: &SparseVec) -> SparseVec {
    let mut acc = SparseVec::new();
    for (x, c) in v.iter() {
        acc = acc.add_scaled(c, &images[*x]);
    }
    acc
}

/// A DG algebra: basis, unit, multiplication constants and differential.
#[derive(Debug)]
pub struct DGAlgebra {
    field: Field,
    name: String,
    basis: FlatBasis,
    unit: usize,
    products: Vec<SparseVec>,
    diff: Vec<SparseVec>,
    complex: CochainComplex,
    exact: Option<(i64, i64)>,
    closed: bool,
    validated: OnceLock<ValidationReport>,
}

impl Clone for DGAlgebra {
    fn clone(&self) -> Self {
        DGAlgebra {
            field: self.field,
            name: self.name.clone(),
            basis: self.basis.clone(),
            unit: self.unit,
            products: self.products.clone(),
            diff: self.diff.clone(),
            complex: self.complex.clone(),
            exact: self.exact,
            closed: self.closed,
            validated: OnceLock::new(),
        }
    }
}

impl PartialEq for DGAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.basis == other.basis
            && self.unit == other.unit
            && self.products == other.products
            && self.diff == other.diff
    }
}

impl DGAlgebra {
    /// Builds from global-id tables. `products[x * n + y]` is `m(x, y)` and
    /// `diff[x]` is `d(x)`, both over the flat basis ids of `basis`.
    pub fn from_tables(
        field: Field,
        name: impl Into<String>,
        basis: FlatBasis,
        unit: usize,
        products: Vec<SparseVec>,
        diff: Vec<SparseVec>,
    ) -> Result<Self> {
        let n = basis.len();
        if products.len() != n * n || diff.len() != n || unit >= n {
            return Err(Error::DimensionMismatch("algebra table sizes".into()));
        }
        let complex = complex_from_global(field, &basis, &diff)?;
        Ok(DGAlgebra {
            field,
            name: name.into(),
            basis,
            unit,
            products,
            diff,
            complex,
            exact: None,
            closed: true,
            validated: OnceLock::new(),
        })
    }

    /// The ground field as an algebra: `k` in degree 0.
    pub fn ground(field: Field) -> Self {
        let basis = FlatBasis::new(vec![BasisElement { name: "1".into(), degree: 0 }]).unwrap();
        DGAlgebra::from_tables(field, "k", basis, 0, vec![SparseVec::unit(0, field)], vec![SparseVec::new()])
            .unwrap()
    }

    /// Exterior algebra on generators of the given (odd) degrees, zero
    /// differential. Generators are named `a` (one generator) or `a1, a2, …`.
    pub fn exterior(field: Field, degrees: &[i64]) -> Result<Self> {
        let g = degrees.len();
        if g > 16 {
            return Err(Error::InvalidModel("too many exterior generators".into()));
        }
        let gen_name = |i: usize| if g == 1 { "a".to_string() } else { format!("a{}", i + 1) };
        let mono_name = |mask: u32| {
            if mask == 0 {
                "1".to_string()
            } else {
                (0..g).filter(|i| mask & (1 << i) != 0).map(gen_name).collect::<Vec<_>>().join("")
            }
        };
        let mono_deg = |mask: u32| (0..g).filter(|i| mask & (1 << i) != 0).map(|i| degrees[i]).sum::<i64>();
        let masks: Vec<u32> = (0..(1u32 << g)).collect();
        let elements = masks
            .iter()
            .map(|&m| BasisElement { name: mono_name(m), degree: mono_deg(m) })
            .collect();
        let basis = FlatBasis::new(elements)?;
        let id_of: HashMap<u32, usize> =
            masks.iter().map(|&m| (m, basis.id(&mono_name(m)).unwrap())).collect();
        let n = basis.len();
        let mut products = vec![SparseVec::new(); n * n];
        for &s in &masks {
            for &t in &masks {
                if s & t != 0 {
                    continue;
                }
                // sign of reordering the concatenation s·t into increasing order
                let mut e = 0i64;
                for i in 0..g {
                    if s & (1 << i) == 0 {
                        continue;
                    }
                    for j in 0..i {
                        if t & (1 << j) != 0 {
                            e += degrees[i] * degrees[j];
                        }
                    }
                }
                products[id_of[&s] * n + id_of[&t]] = SparseVec::from_pairs([(id_of[&(s | t)], field.sign(e))]);
            }
        }
        let name = format!("Λ{:?}", degrees);
        DGAlgebra::from_tables(field, name, basis, id_of[&0], products, vec![SparseVec::new(); n])
    }

    /// Polynomial algebra on generators of the given (even) degrees, truncated
    /// to monomials of degree `≤ top` (and `≥ top` for negative generators).
    /// The result agrees with the polynomial algebra exactly through `top`.
    pub fn polynomial(field: Field, degrees: &[i64], top: i64) -> Result<Self> {
        if degrees.iter().any(|d| *d <= 0) {
            return Err(Error::InvalidModel("polynomial generators must have positive degree".into()));
        }
        let g = degrees.len();
        let gen_name = |i: usize| if g == 1 { "x".to_string() } else { format!("x{}", i + 1) };
        let mut monos: Vec<Vec<u32>> = vec![vec![0; g]];
        let mut frontier = monos.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for m in &frontier {
                // only raise exponents at or after the last nonzero one to avoid duplicates
                let start = m.iter().rposition(|e| *e > 0).unwrap_or(0);
                for i in start..g {
                    let mut m2 = m.clone();
                    m2[i] += 1;
                    let deg: i64 = m2.iter().zip(degrees).map(|(e, d)| *e as i64 * d).sum();
                    if deg <= top {
                        next.push(m2);
                    }
                }
            }
            monos.extend(next.iter().cloned());
            frontier = next;
        }
        let mono_name = |m: &[u32]| {
            if m.iter().all(|e| *e == 0) {
                return "1".to_string();
            }
            m.iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(i, e)| if *e == 1 { gen_name(i) } else { format!("{}^{e}", gen_name(i)) })
                .collect::<Vec<_>>()
                .join("")
        };
        let mono_deg = |m: &[u32]| m.iter().zip(degrees).map(|(e, d)| *e as i64 * d).sum::<i64>();
        let elements =
            monos.iter().map(|m| BasisElement { name: mono_name(m), degree: mono_deg(m) }).collect();
        let basis = FlatBasis::new(elements)?;
        let ids: HashMap<Vec<u32>, usize> =
            monos.iter().map(|m| (m.clone(), basis.id(&mono_name(m)).unwrap())).collect();
        let n = basis.len();
        let mut products = vec![SparseVec::new(); n * n];
        for a in &monos {
            for b in &monos {
                let c: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if let Some(&k) = ids.get(&c) {
                    products[ids[a] * n + ids[b]] = SparseVec::unit(k, field);
                }
            }
        }
        let name = format!("k{:?}≤{top}", degrees);
        let unit = ids[&vec![0; g]];
        let mut alg = DGAlgebra::from_tables(field, name, basis, unit, products, vec![SparseVec::new(); n])?;
        alg.exact = Some((i64::MIN, top));
        Ok(alg)
    }

    /// Free associative algebra on the given generators modulo words longer
    /// than `max_len`. `differential` lists terms `(i, j, c)` meaning
    /// `d(gᵢ) ∋ c·gⱼ`, extended as a derivation.
    pub fn truncated_free(
        field: Field,
        generators: &[(&str, i64)],
        differential: &[(usize, usize, i64)],
        max_len: usize,
    ) -> Result<Self> {
        let g = generators.len();
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut layer = words.clone();
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w| (0..g).map(move |i| [w.as_slice(), &[i]].concat()))
                .collect();
            words.extend(layer.iter().cloned());
        }
        let word_name = |w: &[usize]| {
            if w.is_empty() {
                "1".to_string()
            } else {
                w.iter().map(|i| generators[*i].0).collect::<Vec<_>>().join("")
            }
        };
        let word_deg = |w: &[usize]| w.iter().map(|i| generators[*i].1).sum::<i64>();
        let basis = FlatBasis::new(
            words.iter().map(|w| BasisElement { name: word_name(w), degree: word_deg(w) }).collect(),
        )?;
        let ids: HashMap<Vec<usize>, usize> =
            words.iter().map(|w| (w.clone(), basis.id(&word_name(w)).unwrap())).collect();
        let n = basis.len();
        let mut products = vec![SparseVec::new(); n * n];
        let mut diff = vec![SparseVec::new(); n];
        for u in &words {
            for v in &words {
                if let Some(&k) = ids.get(&[u.as_slice(), v.as_slice()].concat()) {
                    products[ids[u] * n + ids[v]] = SparseVec::unit(k, field);
                }
            }
            let mut acc = SparseVec::new();
            for pos in 0..u.len() {
                let sign = field.sign(word_deg(&u[..pos]));
                for &(i, j, c) in differential {
                    if u[pos] == i {
                        let mut w = u.clone();
                        w[pos] = j;
                        acc = acc.add_scaled(&(&sign * &field.from_i64(c)), &SparseVec::unit(ids[&w], field));
                    }
                }
            }
            diff[ids[u]] = acc;
        }
        DGAlgebra::from_tables(field, format!("T{:?}≤{max_len}", generators), basis, ids[&Vec::new()], products, diff)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn basis(&self) -> &FlatBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn degree(&self, x: usize) -> i64 {
        self.basis.degree(x)
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    /// `Some((lo, hi))` when this algebra stands for a larger one and agrees
    /// with it only for basis elements and structure-constant results in
    /// degrees `lo..=hi`; `None` means exact everywhere.
    pub fn exact_range(&self) -> Option<(i64, i64)> {
        self.exact
    }

    /// Whether the tables form a genuine DG algebra (a quotient by an ideal).
    /// Windows cut from both sides are not closed, and validation then skips
    /// axioms whose terms leave the exact range.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn set_exact_range(&mut self, range: Option<(i64, i64)>, closed: bool) {
        self.exact = range;
        self.closed = closed;
        self.validated = OnceLock::new();
    }

    fn checkable(&self, d: i64) -> bool {
        self.closed || self.exact.is_none_or(|(lo, hi)| lo <= d && d <= hi)
    }

    pub fn mul(&self, x: usize, y: usize) -> &SparseVec {
        &self.products[x * self.dim() + y]
    }

    pub fn mul_vec(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        bilinear(&self.products, self.dim(), a, b)
    }

    pub fn d(&self, x: usize) -> &SparseVec {
        &self.diff[x]
    }

    pub fn d_vec(&self, v: &SparseVec) -> SparseVec {
        linear(&self.diff, v)
    }

    pub fn has_zero_differential(&self) -> bool {
        self.diff.iter().all(SparseVec::is_zero)
    }

    /// Basis ids of the augmentation ideal (everything but the unit).
    pub fn augmentation_ideal(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| i != self.unit).collect()
    }

    pub fn products_table(&self) -> &[SparseVec] {
        &self.products
    }

    pub fn diff_table(&self) -> &[SparseVec] {
        &self.diff
    }

    /// Checks every axiom by basis enumeration (cached).
    pub fn validate(&self) -> ValidationReport {
        self.validated.get_or_init(|| self.run_validation()).clone()
    }

    pub fn require_valid(&self) -> Result<()> {
        self.validate().into_result()
    }

    fn run_validation(&self) -> ValidationReport {
        let b = &self.basis;
        let f = self.field;
        let n = self.dim();
        check!(check_degrees_diff(b, &self.diff));
        check!(check_d_squared(b, &self.diff, |d| self.checkable(d + 2)));
        for x in 0..n {
            for y in 0..n {
                for (z, _) in self.mul(x, y).iter() {
                    if b.degree(*z) != b.degree(x) + b.degree(y) {
                        return ValidationReport::fail(
                            "degree",
                            &[b.name(x), b.name(y)],
                            format!(
                                "m({}, {}) has component {} in degree {}, expected {}",
                                b.name(x),
                                b.name(y),
                                b.name(*z),
                                b.degree(*z),
                                b.degree(x) + b.degree(y)
                            ),
                        );
                    }
                }
            }
        }
        if b.degree(self.unit) != 0 {
            return ValidationReport::fail("unit", &[b.name(self.unit)], "unit must have degree 0".into());
        }
        for x in 0..n {
            let ex = SparseVec::unit(x, f);
            if self.mul(self.unit, x) != &ex || self.mul(x, self.unit) != &ex {
                return ValidationReport::fail("unit", &[b.name(x)], "m(1, x) = x = m(x, 1) fails".into());
            }
        }
        if !self.d(self.unit).is_zero() {
            return ValidationReport::fail("unit", &[b.name(self.unit)], "d(1) must vanish".into());
        }
        for x in 0..n {
            for y in 0..n {
                let xy = self.mul(x, y);
                for z in 0..n {
                    let (dx, dy, dz) = (b.degree(x), b.degree(y), b.degree(z));
                    if ![dx + dy, dy + dz, dx + dy + dz].iter().all(|d| self.checkable(*d)) {
                        continue;
                    }
                    let left = self.mul_vec(xy, &SparseVec::unit(z, f));
                    let right = self.mul_vec(&SparseVec::unit(x, f), self.mul(y, z));
                    if left != right {
                        return ValidationReport::fail(
                            "associativity",
                            &[b.name(x), b.name(y), b.name(z)],
                            format!("(xy)z = {} but x(yz) = {}", b.render(&left), b.render(&right)),
                        );
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let (dx, dy) = (b.degree(x), b.degree(y));
                if ![dx + dy, dx + dy + 1, dx + 1, dy + 1].iter().all(|d| self.checkable(*d)) {
                    continue;
                }
                let lhs = self.d_vec(self.mul(x, y));
                let ex = SparseVec::unit(x, f);
                let ey = SparseVec::unit(y, f);
                let rhs = self
                    .mul_vec(self.d(x), &ey)
                    .add_scaled(&f.sign(b.degree(x)), &self.mul_vec(&ex, self.d(y)));
                if lhs != rhs {
                    return ValidationReport::fail(
                        "Leibniz",
                        &[b.name(x), b.name(y)],
                        format!("d(xy) = {} but dx·y ± x·dy = {}", b.render(&lhs), b.render(&rhs)),
                    );
                }
            }
        }
        let deg0 = b.in_degree(0);
        if deg0 != [self.unit] {
            let other = deg0.iter().find(|&&i| i != self.unit).map(|&i| b.name(i)).unwrap_or("?");
            return ValidationReport::fail(
                "connected",
                &[other],
                "degree-0 part must be exactly the unit line".into(),
            );
        }
        // augmentation is a DG algebra map: the ideal is closed under m and d
        for &x in &self.augmentation_ideal() {
            if self.d(x).get(self.unit).is_some() {
                return ValidationReport::fail("augmentation", &[b.name(x)], "d(x) has a unit component".into());
            }
            for &y in &self.augmentation_ideal() {
                if self.mul(x, y).get(self.unit).is_some() {
                    return ValidationReport::fail(
                        "augmentation",
                        &[b.name(x), b.name(y)],
                        "product of augmentation-ideal elements has a unit component".into(),
                    );
                }
            }
        }
        ValidationReport::ok()
    }

    /// Graded center intersected with the cycles:
    /// `{z : dz = 0, zx = (-1)^{|z||x|} xz for all x}`, as global-id vectors.
    pub fn graded_center(&self) -> Vec<SparseVec> {
        let f = self.field;
        let mut out = Vec::new();
        for d in self.basis.degrees() {
            let ids = self.basis.in_degree(d);
            // stack the linear conditions on coefficients of degree-d elements
            let mut cols: Vec<Vec<(usize, FieldScalar)>> = vec![Vec::new(); ids.len()];
            let n = self.dim();
            for (k, &z) in ids.iter().enumerate() {
                let mut row_base = 0usize;
                for x in 0..n {
                    let comm = self
                        .mul(z, x)
                        .add_scaled(&-f.sign(d * self.degree(x)), self.mul(x, z));
                    for (i, c) in comm.iter() {
                        cols[k].push((row_base + i, c.clone()));
                    }
                    row_base += n;
                }
                for (i, c) in self.d(z).iter() {
                    cols[k].push((row_base + i, c.clone()));
                }
            }
            let rows = n * n + n;
            let m = SparseMatrix::from_columns(
                f,
                rows,
                cols.into_iter().map(SparseVec::from_pairs).collect(),
            );
            for v in crate::linalg::kernel_basis(&m) {
                out.push(v.map_indices(|k| ids[k]));
            }
        }
        out
    }
}

fn check_degrees_diff(b: &FlatBasis, diff: &[SparseVec]) -> ValidationReport {
    for (x, dx) in diff.iter().enumerate() {
        for (z, _) in dx.iter() {
            if b.degree(*z) != b.degree(x) + 1 {
                return ValidationReport::fail(
                    "degree",
                    &[b.name(x)],
                    format!("d({}) has component {} in degree {}", b.name(x), b.name(*z), b.degree(*z)),
                );
            }
        }
    }
    ValidationReport::ok()
}

fn check_d_squared(b: &FlatBasis, diff: &[SparseVec], checkable: impl Fn(i64) -> bool) -> ValidationReport {
    for (x, dx) in diff.iter().enumerate() {
        if !checkable(b.degree(x)) {
            continue;
        }
        let dd = linear(diff, dx);
        if !dd.is_zero() {
            return ValidationReport::fail("d^2 = 0", &[b.name(x)], format!("d(d(x)) = {}", b.render(&dd)));
        }
    }
    ValidationReport::ok()
}

/// A tensor `Σ c · x⊗y` over a flat basis.
pub type Tensor2 = Vec<(usize, usize, FieldScalar)>;

fn tensor2_normalize(t: Tensor2) -> Tensor2 {
    let mut acc: BTreeMap<(usize, usize), FieldScalar> = BTreeMap::new();
    for (x, y, c) in t {
        match acc.get_mut(&(x, y)) {
            Some(v) => *v += &c,
            None => {
                acc.insert((x, y), c);
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((x, y), c)| (x, y, c)).collect()
}

/// A DG coalgebra with counit and coaugmentation given by a distinguished
/// degree-0 basis element `1`: `ε(1) = 1`, `ε` vanishes on other basis
/// elements, and the coaugmentation sends `1 ↦ 1`.
#[derive(Debug, Clone)]
pub struct DGCoalgebra {
    field: Field,
    name: String,
    basis: FlatBasis,
    unit: usize,
    coproducts: Vec<Tensor2>,
    diff: Vec<SparseVec>,
    complex: CochainComplex,
    exact: Option<(i64, i64)>,
    closed: bool,
}

impl DGCoalgebra {
    pub fn from_tables(
        field: Field,
        name: impl Into<String>,
        basis: FlatBasis,
        unit: usize,
        coproducts: Vec<Tensor2>,
        diff: Vec<SparseVec>,
    ) -> Result<Self> {
        let n = basis.len();
        if coproducts.len() != n || diff.len() != n || unit >= n {
            return Err(Error::DimensionMismatch("coalgebra table sizes".into()));
        }
        let complex = complex_from_global(field, &basis, &diff)?;
        let coproducts = coproducts.into_iter().map(tensor2_normalize).collect();
        Ok(DGCoalgebra {
            field,
            name: name.into(),
            basis,
            unit,
            coproducts,
            diff,
            complex,
            exact: None,
            closed: true,
        })
    }

    pub fn ground(field: Field) -> Self {
        let basis = FlatBasis::new(vec![BasisElement { name: "1".into(), degree: 0 }]).unwrap();
        DGCoalgebra::from_tables(field, "k", basis, 0, vec![vec![(0, 0, field.one())]], vec![SparseVec::new()])
            .unwrap()
    }

    /// Exterior coalgebra: the linear dual of the exterior algebra on
    /// generators of degrees `-d` for each `d` in `degrees`, so the
    /// primitives sit in the given degrees.
    pub fn exterior_primitive(field: Field, degrees: &[i64]) -> Result<Self> {
        let neg: Vec<i64> = degrees.iter().map(|d| -d).collect();
        let alg = DGAlgebra::exterior(field, &neg)?;
        Ok(dualize_algebra(&alg).with_name(format!("Λ^∨{:?}", degrees)))
    }

    /// Divided-power coalgebra on one generator of degree `deg`, truncated to
    /// `a^[0..=top_power]`: `Δ a^[n] = Σ a^[i] ⊗ a^[n-i]`.
    pub fn divided_power(field: Field, deg: i64, top_power: usize) -> Result<Self> {
        let name = |i: usize| if i == 0 { "1".to_string() } else { format!("a[{i}]") };
        let basis = FlatBasis::new(
            (0..=top_power).map(|i| BasisElement { name: name(i), degree: deg * i as i64 }).collect(),
        )?;
        let id = |i: usize| basis.id(&name(i)).unwrap();
        let coproducts = (0..=top_power)
            .map(|n| (0..=n).map(|i| (id(i), id(n - i), field.one())).collect())
            .collect::<Vec<Tensor2>>();
        let mut ordered = vec![Vec::new(); top_power + 1];
        for (n, t) in coproducts.into_iter().enumerate() {
            ordered[id(n)] = t;
        }
        DGCoalgebra::from_tables(field, format!("Γ[{deg}]≤{top_power}"), basis.clone(), id(0), ordered, vec![SparseVec::new(); top_power + 1])
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &FlatBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn degree(&self, x: usize) -> i64 {
        self.basis.degree(x)
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    /// Degrees in which basis, comultiplication and differential agree with
    /// the coalgebra this one approximates; `None` means exact everywhere.
    pub fn exact_range(&self) -> Option<(i64, i64)> {
        self.exact
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn set_exact_range(&mut self, range: Option<(i64, i64)>, closed: bool) {
        self.exact = range;
        self.closed = closed;
    }

    fn checkable(&self, d: i64) -> bool {
        self.closed || self.exact.is_none_or(|(lo, hi)| lo <= d && d <= hi)
    }

    pub fn coproduct(&self, x: usize) -> &Tensor2 {
        &self.coproducts[x]
    }

    pub fn d(&self, x: usize) -> &SparseVec {
        &self.diff[x]
    }

    pub fn d_vec(&self, v: &SparseVec) -> SparseVec {
        linear(&self.diff, v)
    }

    /// Reduced comultiplication: the terms of `Δx` with neither factor the unit.
    pub fn reduced_coproduct(&self, x: usize) -> Tensor2 {
        self.coproducts[x]
            .iter()
            .filter(|(a, b, _)| *a != self.unit && *b != self.unit)
            .cloned()
            .collect()
    }

    pub fn supplementation_ideal(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| i != self.unit).collect()
    }

    fn coproduct_vec(&self, v: &SparseVec) -> Tensor2 {
        let mut out = Vec::new();
        for (x, c) in v.iter() {
            for (a, b, e) in &self.coproducts[*x] {
                out.push((*a, *b, c * e));
            }
        }
        tensor2_normalize(out)
    }

    pub fn validate(&self) -> ValidationReport {
        let b = &self.basis;
        let f = self.field;
        let n = self.dim();
        check!(check_degrees_diff(b, &self.diff));
        check!(check_d_squared(b, &self.diff, |d| self.checkable(d) && self.checkable(d + 2)));
        for x in 0..n {
            for (a, c, _) in &self.coproducts[x] {
                if b.degree(*a) + b.degree(*c) != b.degree(x) {
                    return ValidationReport::fail(
                        "degree",
                        &[b.name(x)],
                        format!("Δ({}) has term {}⊗{} of wrong degree", b.name(x), b.name(*a), b.name(*c)),
                    );
                }
            }
        }
        if b.degree(self.unit) != 0 {
            return ValidationReport::fail("counit", &[b.name(self.unit)], "1 must have degree 0".into());
        }
        for x in 0..n {
            // (ε⊗1)Δx = x = (1⊗ε)Δx
            let left = SparseVec::from_pairs(
                self.coproducts[x].iter().filter(|(a, _, _)| *a == self.unit).map(|(_, c, e)| (*c, e.clone())),
            );
            let right = SparseVec::from_pairs(
                self.coproducts[x].iter().filter(|(_, c, _)| *c == self.unit).map(|(a, _, e)| (*a, e.clone())),
            );
            let ex = SparseVec::unit(x, f);
            if left != ex || right != ex {
                return ValidationReport::fail("counit", &[b.name(x)], "(ε⊗1)Δ = id = (1⊗ε)Δ fails".into());
            }
        }
        if !self.d(self.unit).is_zero() {
            return ValidationReport::fail("coaugmentation", &[b.name(self.unit)], "d(1) must vanish".into());
        }
        for x in 0..n {
            if self.d(x).get(self.unit).is_some() {
                return ValidationReport::fail("counit", &[b.name(x)], "ε(dx) must vanish".into());
            }
        }
        for x in 0..n {
            // (Δ⊗1)Δ = (1⊗Δ)Δ
            let mut left: BTreeMap<(usize, usize, usize), FieldScalar> = BTreeMap::new();
            let mut right: BTreeMap<(usize, usize, usize), FieldScalar> = BTreeMap::new();
            for (a, c, e) in &self.coproducts[x] {
                for (a1, a2, e2) in &self.coproducts[*a] {
                    add_to(&mut left, (*a1, *a2, *c), e * e2);
                }
                for (c1, c2, e2) in &self.coproducts[*c] {
                    add_to(&mut right, (*a, *c1, *c2), e * e2);
                }
            }
            left.retain(|_, v| !v.is_zero());
            right.retain(|_, v| !v.is_zero());
            if left != right {
                return ValidationReport::fail("coassociativity", &[b.name(x)], "(Δ⊗1)Δx ≠ (1⊗Δ)Δx".into());
            }
        }
        for x in (0..n).filter(|&x| self.checkable(b.degree(x)) && self.checkable(b.degree(x) + 1)) {
            // Δ(dx) = (d⊗1 + 1⊗d)Δx with (1⊗d)(a⊗c) = (-1)^{|a|} a⊗dc
            let lhs = self.coproduct_vec(self.d(x));
            let mut rhs = Vec::new();
            for (a, c, e) in &self.coproducts[x] {
                for (a2, e2) in self.d(*a).iter() {
                    rhs.push((*a2, *c, e * e2));
                }
                let s = f.sign(b.degree(*a));
                for (c2, e2) in self.d(*c).iter() {
                    rhs.push((*a, *c2, &(e * e2) * &s));
                }
            }
            if lhs != tensor2_normalize(rhs) {
                return ValidationReport::fail("co-Leibniz", &[b.name(x)], "Δd ≠ (d⊗1 + 1⊗d)Δ".into());
            }
        }
        ValidationReport::ok()
    }

    pub fn require_valid(&self) -> Result<()> {
        self.validate().into_result()
    }
}

fn add_to<K: Ord>(m: &mut BTreeMap<K, FieldScalar>, k: K, v: FieldScalar) {
    match m.get_mut(&k) {
        Some(x) => *x += &v,
        None => {
            m.insert(k, v);
        }
    }
}

/// Dual basis of a flat basis: labels starred, degrees negated.
fn dual_basis(b: &FlatBasis) -> (FlatBasis, Vec<usize>) {
    let dual = FlatBasis::new(
        b.elements()
            .iter()
            .map(|e| BasisElement {
                name: if e.name == "1" { "1".to_string() } else { star(&e.name) },
                degree: -e.degree,
            })
            .collect(),
    )
    .expect("dual names stay unique");
    let map = (0..b.len())
        .map(|i| {
            let e = &b.elements()[i];
            dual.id(&if e.name == "1" { "1".to_string() } else { star(&e.name) }).unwrap()
        })
        .collect();
    (dual, map)
}

fn star(s: &str) -> String {
    match s.strip_suffix('*') {
        Some(t) => t.to_string(),
        None => format!("{s}*"),
    }
}

/// The dual algebra `S^∨ = Hom(S, k)`: `(x*·y*)(z) = (-1)^{|x||y|} ⟨Δz, x⊗y⟩`,
/// unit = dual of the counit element, `d(φ) = (-1)^{|φ|} φ∘d`.
pub fn dualize_coalgebra(s: &DGCoalgebra) -> DGAlgebra {
    let f = s.field;
    let (basis, map) = dual_basis(&s.basis);
    let n = basis.len();
    let mut products = vec![Vec::new(); n * n];
    for z in 0..s.dim() {
        for (x, y, c) in &s.coproducts[z] {
            let sign = f.sign(s.degree(*x) * s.degree(*y));
            products[map[*x] * n + map[*y]].push((map[z], c * &sign));
        }
    }
    let mut diff = vec![Vec::new(); n];
    for z in 0..s.dim() {
        for (x, c) in s.d(z).iter() {
            // x* ↦ (-1)^{|x*|} coefficient of x in dz times z*
            let sign = f.sign(s.degree(*x));
            diff[map[*x]].push((map[z], c * &sign));
        }
    }
    let mut a = DGAlgebra::from_tables(
        f,
        format!("({})^∨", s.name),
        basis,
        map[s.unit],
        products.into_iter().map(SparseVec::from_pairs).collect(),
        diff.into_iter().map(SparseVec::from_pairs).collect(),
    )
    .expect("dual tables are well formed");
    a.set_exact_range(s.exact.map(negate_range), s.closed);
    a
}

fn negate_range((lo, hi): (i64, i64)) -> (i64, i64) {
    (hi.saturating_neg(), lo.saturating_neg())
}

/// The dual coalgebra `A^∨`: `Δ(z*) = Σ (-1)^{|x||y|} c^{xy}_z x*⊗y*`.
pub fn dualize_algebra(a: &DGAlgebra) -> DGCoalgebra {
    let f = a.field;
    let (basis, map) = dual_basis(&a.basis);
    let n = a.dim();
    let mut coproducts: Vec<Tensor2> = vec![Vec::new(); n];
    for x in 0..n {
        for y in 0..n {
            let sign = f.sign(a.degree(x) * a.degree(y));
            for (z, c) in a.mul(x, y).iter() {
                coproducts[map[*z]].push((map[x], map[y], c * &sign));
            }
        }
    }
    let mut diff = vec![Vec::new(); n];
    for z in 0..n {
        for (x, c) in a.d(z).iter() {
            let sign = f.sign(a.degree(*x));
            diff[map[*x]].push((map[z], c * &sign));
        }
    }
    let mut c = DGCoalgebra::from_tables(
        f,
        format!("({})^∨", a.name),
        basis,
        map[a.unit],
        coproducts,
        diff.into_iter().map(SparseVec::from_pairs).collect(),
    )
    .expect("dual tables are well formed");
    c.set_exact_range(a.exact.map(negate_range), a.closed);
    c
}

/// Smallest `n ≥ 1` such that the iterated reduced comultiplication
/// `S̄ → S̄^{⊗n}` vanishes, or `None` if it does not vanish for `n ≤ bound`.
pub fn conilpotency_degree(s: &DGCoalgebra, bound: usize) -> Option<usize> {
    let reduced: Vec<Tensor2> = (0..s.dim()).map(|x| s.reduced_coproduct(x)).collect();
    // current images of every basis element of S̄ under the (n)-fold map
    let mut current: Vec<BTreeMap<Vec<usize>, FieldScalar>> = s
        .supplementation_ideal()
        .into_iter()
        .map(|x| BTreeMap::from([(vec![x], s.field.one())]))
        .collect();
    for n in 1..=bound {
        if current.iter().all(BTreeMap::is_empty) {
            return Some(n);
        }
        current = current
            .into_iter()
            .map(|t| {
                let mut next = BTreeMap::new();
                for (word, c) in t {
                    for (a, b, e) in &reduced[word[0]] {
                        let mut w = Vec::with_capacity(word.len() + 1);
                        w.push(*a);
                        w.push(*b);
                        w.extend_from_slice(&word[1..]);
                        add_to(&mut next, w, &c * e);
                    }
                }
                next.retain(|_, v: &mut FieldScalar| !v.is_zero());
                next
            })
            .collect();
    }
    None
}

/// A DG bimodule over a DG algebra, optionally with a compatible product
/// making it a bimodule algebra.
#[derive(Debug, Clone)]
pub struct DGBimodule {
    field: Field,
    name: String,
    algebra: Arc<DGAlgebra>,
    basis: FlatBasis,
    /// `left[a * n_m + m] = a·m`
    left: Vec<SparseVec>,
    /// `right[m * n_a + a] = m·a`
    right: Vec<SparseVec>,
    product: Option<Vec<SparseVec>>,
    unit: Option<usize>,
    diff: Vec<SparseVec>,
    complex: CochainComplex,
    bounded: bool,
}

impl DGBimodule {
    #[allow(clippy::too_many_arguments)]
    pub fn from_tables(
        name: impl Into<String>,
        algebra: Arc<DGAlgebra>,
        basis: FlatBasis,
        left: Vec<SparseVec>,
        right: Vec<SparseVec>,
        product: Option<(Vec<SparseVec>, usize)>,
        diff: Vec<SparseVec>,
    ) -> Result<Self> {
        let field = algebra.field();
        let (na, nm) = (algebra.dim(), basis.len());
        if left.len() != na * nm || right.len() != na * nm || diff.len() != nm {
            return Err(Error::DimensionMismatch("bimodule table sizes".into()));
        }
        if let Some((p, u)) = &product {
            if p.len() != nm * nm || *u >= nm {
                return Err(Error::DimensionMismatch("bimodule product table size".into()));
            }
        }
        let complex = complex_from_global(field, &basis, &diff)?;
        let (product, unit) = match product {
            Some((p, u)) => (Some(p), Some(u)),
            None => (None, None),
        };
        Ok(DGBimodule {
            field,
            name: name.into(),
            algebra,
            basis,
            left,
            right,
            product,
            unit,
            diff,
            complex,
            bounded: true,
        })
    }

    /// `A` as a bimodule over itself, with its own product. When `A` is a
    /// truncation of a larger algebra the result stands for that larger
    /// module and is marked unbounded.
    pub fn regular(a: Arc<DGAlgebra>) -> Self {
        let n = a.dim();
        let left = a.products_table().to_vec();
        let mut right = vec![SparseVec::new(); n * n];
        for m in 0..n {
            for x in 0..n {
                right[m * n + x] = a.mul(m, x).clone();
            }
        }
        DGBimodule::from_tables(
            a.name().to_string(),
            a.clone(),
            a.basis().clone(),
            left,
            right,
            Some((a.products_table().to_vec(), a.unit())),
            a.diff_table().to_vec(),
        )
        .expect("regular bimodule tables")
        .with_bounded(a.exact_range().is_none())
    }

    /// The ground field `k` with both actions through the augmentation.
    pub fn trivial(a: Arc<DGAlgebra>) -> Self {
        let f = a.field();
        let basis = FlatBasis::new(vec![BasisElement { name: "1".into(), degree: 0 }]).unwrap();
        let n = a.dim();
        let mut left = vec![SparseVec::new(); n];
        let mut right = vec![SparseVec::new(); n];
        left[a.unit()] = SparseVec::unit(0, f);
        right[a.unit()] = SparseVec::unit(0, f);
        DGBimodule::from_tables(
            "k",
            a,
            basis,
            left,
            right,
            Some((vec![SparseVec::unit(0, f)], 0)),
            vec![SparseVec::new()],
        )
        .expect("trivial bimodule tables")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Marks whether the stored basis is the whole module (`true`) or a
    /// finite stand-in for a module unbounded in degree.
    pub fn with_bounded(mut self, bounded: bool) -> Self {
        self.bounded = bounded;
        self
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> &Arc<DGAlgebra> {
        &self.algebra
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

    pub fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    pub fn is_algebra(&self) -> bool {
        self.product.is_some()
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    pub fn act_left(&self, a: usize, m: usize) -> &SparseVec {
        &self.left[a * self.dim() + m]
    }

    pub fn act_right(&self, m: usize, a: usize) -> &SparseVec {
        &self.right[m * self.algebra.dim() + a]
    }

    pub fn act_left_vec(&self, a: &SparseVec, m: &SparseVec) -> SparseVec {
        bilinear(&self.left, self.dim(), a, m)
    }

    pub fn act_right_vec(&self, m: &SparseVec, a: &SparseVec) -> SparseVec {
        bilinear(&self.right, self.algebra.dim(), m, a)
    }

    pub fn mul(&self, x: usize, y: usize) -> Option<&SparseVec> {
        self.product.as_ref().map(|p| &p[x * self.dim() + y])
    }

    pub fn mul_vec(&self, a: &SparseVec, b: &SparseVec) -> Result<SparseVec> {
        match &self.product {
            Some(p) => Ok(bilinear(p, self.dim(), a, b)),
            None => Err(Error::NotAlgebraCoefficients),
        }
    }

    pub fn d(&self, m: usize) -> &SparseVec {
        &self.diff[m]
    }

    pub fn d_vec(&self, v: &SparseVec) -> SparseVec {
        linear(&self.diff, v)
    }

    pub fn validate(&self) -> ValidationReport {
        let a = &*self.algebra;
        let b = &self.basis;
        let ab = a.basis();
        let f = self.field;
        let (na, nm) = (a.dim(), self.dim());
        check!(a.validate());
        check!(check_degrees_diff(b, &self.diff));
        check!(check_d_squared(b, &self.diff, |_| true));
        for x in 0..na {
            for m in 0..nm {
                for (side, v) in [("left", self.act_left(x, m)), ("right", self.act_right(m, x))] {
                    for (z, _) in v.iter() {
                        if b.degree(*z) != ab.degree(x) + b.degree(m) {
                            return ValidationReport::fail(
                                "degree",
                                &[ab.name(x), b.name(m)],
                                format!("{side} action lands in degree {}", b.degree(*z)),
                            );
                        }
                    }
                }
            }
        }
        for m in 0..nm {
            let em = SparseVec::unit(m, f);
            if self.act_left(a.unit(), m) != &em || self.act_right(m, a.unit()) != &em {
                return ValidationReport::fail("unit action", &[b.name(m)], "1·m = m = m·1 fails".into());
            }
        }
        for x in 0..na {
            let ex = SparseVec::unit(x, f);
            for y in 0..na {
                let ey = SparseVec::unit(y, f);
                let xy = a.mul(x, y);
                for m in 0..nm {
                    let em = SparseVec::unit(m, f);
                    let l1 = self.act_left_vec(xy, &em);
                    let l2 = self.act_left_vec(&ex, self.act_left(y, m));
                    if l1 != l2 {
                        return ValidationReport::fail(
                            "left associativity",
                            &[ab.name(x), ab.name(y), b.name(m)],
                            "(xy)m ≠ x(ym)".into(),
                        );
                    }
                    let r1 = self.act_right_vec(&self.act_right_vec(&em, &ex), &ey);
                    let r2 = self.act_right_vec(&em, xy);
                    if r1 != r2 {
                        return ValidationReport::fail(
                            "right associativity",
                            &[b.name(m), ab.name(x), ab.name(y)],
                            "(mx)y ≠ m(xy)".into(),
                        );
                    }
                    let c1 = self.act_right_vec(self.act_left(x, m), &ey);
                    let c2 = self.act_left_vec(&ex, self.act_right(m, y));
                    if c1 != c2 {
                        return ValidationReport::fail(
                            "bimodule compatibility",
                            &[ab.name(x), b.name(m), ab.name(y)],
                            "(xm)y ≠ x(my)".into(),
                        );
                    }
                }
            }
        }
        for x in 0..na {
            let ex = SparseVec::unit(x, f);
            for m in 0..nm {
                let em = SparseVec::unit(m, f);
                let s = f.sign(ab.degree(x));
                let lhs = self.d_vec(self.act_left(x, m));
                let rhs = self
                    .act_left_vec(a.d(x), &em)
                    .add_scaled(&s, &self.act_left_vec(&ex, self.d(m)));
                if lhs != rhs {
                    return ValidationReport::fail("Leibniz (left)", &[ab.name(x), b.name(m)], "d(xm) mismatch".into());
                }
                let s = f.sign(b.degree(m));
                let lhs = self.d_vec(self.act_right(m, x));
                let rhs = self
                    .act_right_vec(self.d(m), &ex)
                    .add_scaled(&s, &self.act_right_vec(&em, a.d(x)));
                if lhs != rhs {
                    return ValidationReport::fail("Leibniz (right)", &[b.name(m), ab.name(x)], "d(mx) mismatch".into());
                }
            }
        }
        if let Some(p) = &self.product {
            let u = self.unit.unwrap();
            for m in 0..nm {
                for k in 0..nm {
                    for (z, _) in p[m * nm + k].iter() {
                        if b.degree(*z) != b.degree(m) + b.degree(k) {
                            return ValidationReport::fail("degree", &[b.name(m), b.name(k)], "product degree".into());
                        }
                    }
                }
            }
            for m in 0..nm {
                let em = SparseVec::unit(m, f);
                if p[u * nm + m] != em || p[m * nm + u] != em {
                    return ValidationReport::fail("unit", &[b.name(m)], "module product unit".into());
                }
                for k in 0..nm {
                    let ek = SparseVec::unit(k, f);
                    for l in 0..nm {
                        let el = SparseVec::unit(l, f);
                        let lhs = bilinear(p, nm, &p[m * nm + k], &el);
                        let rhs = bilinear(p, nm, &em, &p[k * nm + l]);
                        if lhs != rhs {
                            return ValidationReport::fail(
                                "associativity",
                                &[b.name(m), b.name(k), b.name(l)],
                                "module product".into(),
                            );
                        }
                    }
                    let lhs = self.d_vec(&p[m * nm + k]);
                    let rhs = bilinear(p, nm, self.d(m), &ek)
                        .add_scaled(&f.sign(b.degree(m)), &bilinear(p, nm, &em, self.d(k)));
                    if lhs != rhs {
                        return ValidationReport::fail("Leibniz", &[b.name(m), b.name(k)], "module product".into());
                    }
                    // bimodule algebra: actions are through the unit map
                    for x in 0..na {
                        let xm = self.act_left(x, m);
                        let x1 = self.act_left(x, u);
                        if xm != &bilinear(p, nm, x1, &em) {
                            return ValidationReport::fail(
                                "bimodule algebra",
                                &[ab.name(x), b.name(m)],
                                "x·m ≠ (x·1)m".into(),
                            );
                        }
                        if self.act_right(m, x) != &bilinear(p, nm, &em, self.act_right(u, x)) {
                            return ValidationReport::fail(
                                "bimodule algebra",
                                &[b.name(m), ab.name(x)],
                                "m·x ≠ m(1·x)".into(),
                            );
                        }
                    }
                }
            }
        }
        ValidationReport::ok()
    }

    pub fn require_valid(&self) -> Result<()> {
        self.validate().into_result()
    }

    /// Quotient by all basis elements of degree `> top_degree`; returns the
    /// quotient and the projection. The discarded span must be a
    /// sub-bimodule (always the case for non-negatively graded algebras).
    pub fn truncate_above(&self, top_degree: i64) -> Result<(DGBimodule, GradedMap)> {
        self.truncate_by(|d| d <= top_degree, format!("≤{top_degree}"))
    }

    /// Quotient by all basis elements of degree `< bottom_degree`; the
    /// mirror of [`truncate_above`](Self::truncate_above) for non-positively
    /// graded algebras.
    pub fn truncate_below(&self, bottom_degree: i64) -> Result<(DGBimodule, GradedMap)> {
        self.truncate_by(|d| d >= bottom_degree, format!("≥{bottom_degree}"))
    }

    fn truncate_by(&self, keep: impl Fn(i64) -> bool, tag: String) -> Result<(DGBimodule, GradedMap)> {
        let f = self.field;
        let kept: Vec<usize> = (0..self.dim()).filter(|&m| keep(self.degree(m))).collect();
        let dropped = |v: &SparseVec| v.iter().all(|(z, _)| !keep(self.degree(*z)));
        // closure of the discarded span
        for m in (0..self.dim()).filter(|&m| !keep(self.degree(m))) {
            let mut imgs = vec![self.d(m).clone()];
            for x in 0..self.algebra.dim() {
                imgs.push(self.act_left(x, m).clone());
                imgs.push(self.act_right(m, x).clone());
            }
            if let Some(p) = &self.product {
                for k in 0..self.dim() {
                    imgs.push(p[m * self.dim() + k].clone());
                    imgs.push(p[k * self.dim() + m].clone());
                }
            }
            if !imgs.iter().all(&dropped) {
                return Err(Error::Validation(format!(
                    "truncation {tag}: discarded element {} does not span a sub-bimodule",
                    self.basis.name(m)
                )));
            }
        }
        let basis = FlatBasis::new(kept.iter().map(|&m| self.basis.elements()[m].clone()).collect())?;
        let new_id: HashMap<usize, usize> =
            kept.iter().map(|&m| (m, basis.id(self.basis.name(m)).unwrap())).collect();
        let project = |v: &SparseVec| {
            SparseVec::from_pairs(v.iter().filter_map(|(z, c)| new_id.get(z).map(|&k| (k, c.clone()))))
        };
        let nm = basis.len();
        let na = self.algebra.dim();
        let mut left = vec![SparseVec::new(); na * nm];
        let mut right = vec![SparseVec::new(); na * nm];
        let mut diff = vec![SparseVec::new(); nm];
        let mut product = self.product.as_ref().map(|_| vec![SparseVec::new(); nm * nm]);
        for &m in &kept {
            let k = new_id[&m];
            diff[k] = project(self.d(m));
            for x in 0..na {
                left[x * nm + k] = project(self.act_left(x, m));
                right[k * na + x] = project(self.act_right(m, x));
            }
            if let (Some(p), Some(src)) = (product.as_mut(), self.product.as_ref()) {
                for &m2 in &kept {
                    p[k * nm + new_id[&m2]] = project(&src[m * self.dim() + m2]);
                }
            }
        }
        let unit = self.unit.and_then(|u| new_id.get(&u).copied());
        let product = match (product, unit) {
            (Some(p), Some(u)) => Some((p, u)),
            _ => None,
        };
        let q = DGBimodule::from_tables(
            format!("{}/({})", self.name, tag),
            self.algebra.clone(),
            basis,
            left,
            right,
            product,
            diff,
        )?;
        let map = module_map(self, &q, |m| new_id.get(&m).map(|&k| SparseVec::unit(k, f)).unwrap_or_default())?;
        Ok((q, map))
    }
}

/// Builds the degree-0 graded map between two modules' spaces from global-id
/// images.
pub fn module_map(
    source: &DGBimodule,
    target: &DGBimodule,
    image: impl Fn(usize) -> SparseVec,
) -> Result<GradedMap> {
    let f = source.field;
    let sspace = source.complex.space().clone();
    let tspace = target.complex.space().clone();
    let mut blocks = BTreeMap::new();
    for d in source.basis.degrees() {
        let cols = source
            .basis
            .in_degree(d)
            .iter()
            .map(|&m| image(m).map_indices(|z| target.basis.local_index(z)))
            .collect();
        blocks.insert(d, SparseMatrix::from_columns(f, tspace.dim(d), cols));
    }
    GradedMap::new(sspace, tspace, 0, blocks)
}

/// Checks that a degree-0 map between bimodules over the same algebra commutes
/// with the differentials and both actions, on basis elements.
pub fn check_bimodule_map(source: &DGBimodule, target: &DGBimodule, map: &GradedMap) -> ValidationReport {
    let f = source.field;
    let img = |m: usize| -> SparseVec {
        let d = source.degree(m);
        map.apply(d, &SparseVec::unit(source.basis.local_index(m), f))
            .map_indices(|k| target.basis.global(d, k))
    };
    let img_vec = |v: &SparseVec| {
        let mut acc = SparseVec::new();
        for (m, c) in v.iter() {
            acc = acc.add_scaled(c, &img(*m));
        }
        acc
    };
    for m in 0..source.dim() {
        if img_vec(source.d(m)) != target.d_vec(&img(m)) {
            return ValidationReport::fail("chain map", &[source.basis.name(m)], "φd ≠ dφ".into());
        }
        for x in 0..source.algebra.dim() {
            let ex = SparseVec::unit(x, f);
            if img_vec(source.act_left(x, m)) != target.act_left_vec(&ex, &img(m))
                || img_vec(source.act_right(m, x)) != target.act_right_vec(&img(m), &ex)
            {
                return ValidationReport::fail(
                    "bimodule map",
                    &[source.algebra.basis().name(x), source.basis.name(m)],
                    "φ does not commute with the actions".into(),
                );
            }
        }
    }
    ValidationReport::ok()
}

/// Degree-0 map of DG algebras given by images of basis elements.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    pub source: Arc<DGAlgebra>,
    pub target: Arc<DGAlgebra>,
    pub images: Vec<SparseVec>,
}

impl AlgebraMap {
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        linear(&self.images, v)
    }

    /// Checks degree, unit, multiplicativity, chain-map and augmentation
    /// compatibility on basis elements.
    pub fn validate(&self) -> ValidationReport {
        let (s, t) = (&*self.source, &*self.target);
        let f = s.field();
        if self.images.len() != s.dim() {
            return ValidationReport::fail("shape", &[], "one image per basis element".into());
        }
        for x in 0..s.dim() {
            for (z, _) in self.images[x].iter() {
                if t.degree(*z) != s.degree(x) {
                    return ValidationReport::fail("degree", &[s.basis().name(x)], "map must have degree 0".into());
                }
            }
            if x != s.unit() && self.images[x].get(t.unit()).is_some() {
                return ValidationReport::fail("augmentation", &[s.basis().name(x)], "ideal must map to ideal".into());
            }
        }
        if self.images[s.unit()] != SparseVec::unit(t.unit(), f) {
            return ValidationReport::fail("unit", &[], "1 ↦ 1 fails".into());
        }
        for x in 0..s.dim() {
            if self.apply(s.d(x)) != t.d_vec(&self.images[x]) {
                return ValidationReport::fail("chain map", &[s.basis().name(x)], "φd ≠ dφ".into());
            }
            for y in 0..s.dim() {
                if self.apply(s.mul(x, y)) != t.mul_vec(&self.images[x], &self.images[y]) {
                    return ValidationReport::fail(
                        "multiplicativity",
                        &[s.basis().name(x), s.basis().name(y)],
                        "φ(xy) ≠ φ(x)φ(y)".into(),
                    );
                }
            }
        }
        ValidationReport::ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn exterior_is_valid() {
        let a = DGAlgebra::exterior(q(), &[-1]).unwrap();
        assert!(a.validate().is_valid(), "{:?}", a.validate());
        let a2 = DGAlgebra::exterior(q(), &[-3, -5]).unwrap();
        assert!(a2.validate().is_valid());
        let a1a2 = a2.basis().id("a1a2").unwrap();
        let x = a2.basis().id("a1").unwrap();
        let y = a2.basis().id("a2").unwrap();
        assert_eq!(a2.mul(y, x), &SparseVec::from_pairs([(a1a2, q().from_i64(-1))]));
    }

    #[test]
    fn wrong_degree_product_reported() {
        let f = q();
        let basis = FlatBasis::new(vec![
            BasisElement { name: "1".into(), degree: 0 },
            BasisElement { name: "x".into(), degree: 2 },
            BasisElement { name: "y".into(), degree: 3 },
        ])
        .unwrap();
        let n = 3;
        let mut p = vec![SparseVec::new(); n * n];
        for i in 0..n {
            p[i] = SparseVec::unit(i, f);
            p[i * n] = SparseVec::unit(i, f);
        }
        p[n + 1] = SparseVec::unit(2, f); // m(x, x) = y in degree 3, not 4
        let a = DGAlgebra::from_tables(f, "bad", basis, 0, p, vec![SparseVec::new(); n]).unwrap();
        let v = a.validate().violation.unwrap();
        assert_eq!(v.axiom, "degree");
        assert_eq!(v.witnesses, vec!["x", "x"]);
    }

    #[test]
    fn associativity_failure_names_triple() {
        // basis 1, x (deg 2), x2 (deg 4), x3 (deg 6) with x·x = x2, x·x2 = x3
        // but x2·x = 0: (x·x)·x = 0 ≠ x·(x·x) = x3
        let f = q();
        let names = ["1", "x", "x2", "x3"];
        let basis = FlatBasis::new(
            names.iter().enumerate().map(|(i, s)| BasisElement { name: s.to_string(), degree: 2 * i as i64 }).collect(),
        )
        .unwrap();
        let n = 4;
        let mut p = vec![SparseVec::new(); n * n];
        for i in 0..n {
            p[i] = SparseVec::unit(i, f);
            p[i * n] = SparseVec::unit(i, f);
        }
        p[n + 1] = SparseVec::unit(2, f);
        p[n + 2] = SparseVec::unit(3, f);
        let a = DGAlgebra::from_tables(f, "bad", basis, 0, p, vec![SparseVec::new(); n]).unwrap();
        let v = a.validate().violation.unwrap();
        assert_eq!(v.axiom, "associativity");
        assert_eq!(v.witnesses, vec!["x", "x", "x"]);
    }

    #[test]
    fn dual_of_trivial_coalgebra() {
        let k = dualize_coalgebra(&DGCoalgebra::ground(q()));
        assert_eq!(k.dim(), 1);
        assert!(k.validate().is_valid());
    }

    #[test]
    fn dual_of_primitive_coalgebra_is_exterior() {
        let s = DGCoalgebra::exterior_primitive(q(), &[1]).unwrap();
        assert!(s.validate().is_valid());
        let a = dualize_coalgebra(&s);
        assert!(a.validate().is_valid());
        assert_eq!(a.complex().space().dims(), BTreeMap::from([(-1, 1), (0, 1)]));
        let x = a.basis().in_degree(-1)[0];
        assert!(a.mul(x, x).is_zero());
    }

    #[test]
    fn double_dual_round_trip() {
        let a = DGAlgebra::exterior(q(), &[-1, -3]).unwrap();
        let back = dualize_coalgebra(&dualize_algebra(&a));
        assert_eq!(back.complex().space().dims(), a.complex().space().dims());
        assert!(back.validate().is_valid());
        for x in 0..a.dim() {
            for y in 0..a.dim() {
                let bx = back.basis().id(a.basis().name(x)).unwrap_or_else(|| back.basis().id("1").unwrap());
                let by = back.basis().id(a.basis().name(y)).unwrap_or_else(|| back.basis().id("1").unwrap());
                let expect = a.mul(x, y).map_indices(|z| back.basis().id(a.basis().name(z)).unwrap());
                assert_eq!(back.mul(bx, by), &expect);
            }
        }
    }

    #[test]
    fn conilpotency_examples() {
        assert_eq!(conilpotency_degree(&DGCoalgebra::ground(q()), 5), Some(1));
        let s = DGCoalgebra::exterior_primitive(q(), &[1]).unwrap();
        assert_eq!(conilpotency_degree(&s, 5), Some(2));
        // divided powers with |a| = 2 truncated at degree D = 8: top a^[4]
        let g = DGCoalgebra::divided_power(q(), 2, 4).unwrap();
        assert!(g.validate().is_valid());
        let n = conilpotency_degree(&g, 20).unwrap();
        assert_eq!(n, 5);
        assert!(n <= 8);
        assert_eq!(conilpotency_degree(&g, 3), None);
    }

    #[test]
    fn truncation_examples() {
        let a = Arc::new(DGAlgebra::polynomial(q(), &[2], 10).unwrap());
        let m = DGBimodule::regular(a.clone());
        assert!(m.validate().is_valid());
        let (same, _) = m.truncate_above(12).unwrap();
        assert_eq!(same.dim(), m.dim());
        let (t4, p) = m.truncate_above(4).unwrap();
        assert!(t4.validate().is_valid());
        assert_eq!(t4.dim(), 3);
        let x = a.basis().id("x").unwrap();
        let x2 = t4.basis().id("x^2").unwrap();
        assert!(t4.act_left(x, x2).is_zero());
        assert!(check_bimodule_map(&m, &t4, &p).is_valid());
        let (t6, p6) = m.truncate_above(6).unwrap();
        let (t64, p64) = t6.truncate_above(4).unwrap();
        assert_eq!(t64.basis(), t4.basis());
        assert_eq!(p64.compose(&p6).unwrap(), p);
    }

    #[test]
    fn truncation_not_closed_is_error() {
        // for negatively graded algebras, cutting from above is not a quotient
        let a = Arc::new(DGAlgebra::exterior(q(), &[-1]).unwrap());
        let m = DGBimodule::regular(a);
        assert!(m.truncate_above(-1).is_err());
        let (t, _) = m.truncate_below(0).unwrap();
        assert_eq!(t.dim(), 1);
        assert!(t.validate().is_valid());
    }

    #[test]
    fn truncated_free_is_valid() {
        let a = DGAlgebra::truncated_free(q(), &[("u", -2), ("v", -1)], &[(0, 1, 1)], 2).unwrap();
        assert_eq!(a.dim(), 7);
        assert!(a.validate().is_valid(), "{:?}", a.validate());
        let uu = a.basis().id("uu").unwrap();
        assert_eq!(a.d(uu).nnz(), 2);
    }

    #[test]
    fn graded_center_of_exterior() {
        let a = DGAlgebra::exterior(q(), &[-1]).unwrap();
        assert_eq!(a.graded_center().len(), 2);
        let a2 = DGAlgebra::exterior(q(), &[-1, -1]).unwrap();
        // 1, a1a2 are central; a1 and a2 anticommute with each other (odd·odd),
        // so graded-commutativity makes them central as well
        assert_eq!(a2.graded_center().len(), 4);
    }
}
