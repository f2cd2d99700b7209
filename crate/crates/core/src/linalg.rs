//! Sparse exact linear algebra: vectors, column-major matrices, row reduction,
//! kernels, quotients and incremental echelon bases.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::scalar::{Field, FieldScalar};

/// Sparse vector: sorted `(index, value)` pairs with no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, FieldScalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize, field: Field) -> Self {
        SparseVec { entries: vec![(i, field.one())] }
    }

    /// Builds from arbitrary pairs, summing duplicates and dropping zeros.
    pub fn from_pairs<I: IntoIterator<Item = (usize, FieldScalar)>>(pairs: I) -> Self {
        let mut acc: BTreeMap<usize, FieldScalar> = BTreeMap::new();
        for (i, v) in pairs {
            match acc.get_mut(&i) {
                Some(x) => *x += &v,
                None => {
                    acc.insert(i, v);
                }
            }
        }
        SparseVec {
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn from_dense(values: &[FieldScalar]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize, field: Field) -> Vec<FieldScalar> {
        let mut out = vec![field.zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, FieldScalar)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, FieldScalar)> {
        self.entries.iter()
    }

    pub fn leading(&self) -> Option<&(usize, FieldScalar)> {
        self.entries.first()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn get(&self, i: usize) -> Option<&FieldScalar> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn scaled(&self, c: &FieldScalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &FieldScalar, other: &SparseVec) -> SparseVec {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y * c));
                        b.next();
                    } else {
                        let s = x + &(y * c);
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        match other.entries.first() {
            None => self.clone(),
            Some((_, v)) => self.add_scaled(&v.field().one(), other),
        }
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        match other.entries.first() {
            None => self.clone(),
            Some((_, v)) => self.add_scaled(&v.field().from_i64(-1), other),
        }
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, -v)).collect(),
        }
    }

    /// Relabels indices through `f`; `f` must be injective.
    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().map(|(i, v)| (f(*i), v.clone())))
    }
}

impl FromIterator<(usize, FieldScalar)> for SparseVec {
    fn from_iter<T: IntoIterator<Item = (usize, FieldScalar)>>(iter: T) -> Self {
        SparseVec::from_pairs(iter)
    }
}

/// Column-major sparse matrix over a single field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Self {
        SparseMatrix { field, rows, cols, columns: vec![SparseVec::new(); cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        SparseMatrix {
            field,
            rows: n,
            cols: n,
            columns: (0..n).map(|i| SparseVec::unit(i, field)).collect(),
        }
    }

    /// Builds from `(row, col, value)` triples; duplicates are an error and
    /// zero values are dropped.
    pub fn from_triples(
        field: Field,
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (usize, usize, FieldScalar)>,
    ) -> Result<Self> {
        let mut per_col: Vec<BTreeMap<usize, FieldScalar>> = vec![BTreeMap::new(); cols];
        for (r, c, v) in triples {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            if v.field() != field {
                return Err(Error::FieldMismatch(field.to_string(), v.field().to_string()));
            }
            if per_col[c].insert(r, v).is_some() {
                return Err(Error::DimensionMismatch(format!("duplicate entry ({r}, {c})")));
            }
        }
        let columns = per_col
            .into_iter()
            .map(|m| SparseVec { entries: m.into_iter().filter(|(_, v)| !v.is_zero()).collect() })
            .collect();
        Ok(SparseMatrix { field, rows, cols, columns })
    }

    /// Builds from column vectors; indices must be below `rows`.
    pub fn from_columns(field: Field, rows: usize, columns: Vec<SparseVec>) -> Self {
        debug_assert!(columns.iter().all(|c| c.max_index().is_none_or(|m| m < rows)));
        SparseMatrix { field, rows, cols: columns.len(), columns }
    }

    pub fn from_dense_rows(field: Field, rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let triples = rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0)
                .map(move |(j, v)| (i, j, field.from_i64(*v)))
        });
        SparseMatrix::from_triples(field, nrows, ncols, triples).expect("well-formed dense rows")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(SparseVec::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SparseVec::is_zero)
    }

    pub fn get(&self, r: usize, c: usize) -> FieldScalar {
        self.columns[c].get(r).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn triples(&self) -> Vec<(usize, usize, FieldScalar)> {
        let mut out: Vec<_> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v.clone())))
            .collect();
        out.sort_by_key(|(r, c, _)| (*r, *c));
        out
    }

    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut rows: Vec<Vec<(usize, FieldScalar)>> = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col.iter() {
                rows[*r].push((c, v.clone()));
            }
        }
        rows.into_iter().map(|entries| SparseVec { entries }).collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix {
            field: self.field,
            rows: self.cols,
            cols: self.rows,
            columns: self.row_vectors(),
        }
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut acc = SparseVec::new();
        for (j, x) in v.iter() {
            acc = acc.add_scaled(x, &self.columns[*j]);
        }
        acc
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(SparseMatrix {
            field: self.field,
            rows: self.rows,
            cols: other.cols,
            columns: other.columns.iter().map(|c| self.apply(c)).collect(),
        })
    }

    pub fn scaled(&self, c: &FieldScalar) -> SparseMatrix {
        SparseMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            columns: self.columns.iter().map(|v| v.scaled(c)).collect(),
        }
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix sum shape".into()));
        }
        Ok(SparseMatrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.row_vectors();
        rows.retain(|r| !r.is_zero());
        rows.sort_by_key(SparseVec::nnz);
        let mut e = Echelon::new(self.field);
        for r in rows {
            e.insert(r);
        }
        e.rank()
    }
}

/// Reduced row echelon form with Markowitz-style pivot selection: for each
/// column in order, the eligible row with the fewest nonzeros is chosen
/// (ties broken by lowest row index). Returns the RREF (pivot rows first, in
/// pivot-column order, then zero rows) and the pivot columns.
pub fn rref(m: &SparseMatrix) -> (SparseMatrix, Vec<usize>) {
    let field = m.field;
    let mut rows: Vec<Option<SparseVec>> =
        m.row_vectors().into_iter().map(|r| if r.is_zero() { None } else { Some(r) }).collect();
    // column -> rows currently having an entry there
    let mut col_rows: Vec<std::collections::BTreeSet<usize>> =
        vec![std::collections::BTreeSet::new(); m.cols];
    for (i, r) in rows.iter().enumerate() {
        if let Some(r) = r {
            for (c, _) in r.iter() {
                col_rows[*c].insert(i);
            }
        }
    }
    let mut pivot_rows: Vec<SparseVec> = Vec::new();
    let mut pivots = Vec::new();
    for c in 0..m.cols {
        let Some(&best) = col_rows[c]
            .iter()
            .min_by_key(|&&i| (rows[i].as_ref().map_or(usize::MAX, SparseVec::nnz), i))
        else {
            continue;
        };
        let prow = rows[best].take().unwrap();
        for (cc, _) in prow.iter() {
            col_rows[*cc].remove(&best);
        }
        let inv = prow.get(c).unwrap().inv();
        let prow = prow.scaled(&inv);
        // eliminate column c from remaining unused rows
        let targets: Vec<usize> = col_rows[c].iter().copied().collect();
        for i in targets {
            let r = rows[i].take().unwrap();
            for (cc, _) in r.iter() {
                col_rows[*cc].remove(&i);
            }
            let f = -r.get(c).unwrap();
            let nr = r.add_scaled(&f, &prow);
            if !nr.is_zero() {
                for (cc, _) in nr.iter() {
                    col_rows[*cc].insert(i);
                }
                rows[i] = Some(nr);
            }
        }
        // back-substitute into earlier pivot rows
        for pr in pivot_rows.iter_mut() {
            if let Some(v) = pr.get(c) {
                let f = -v;
                *pr = pr.add_scaled(&f, &prow);
            }
        }
        pivot_rows.push(prow);
        pivots.push(c);
    }
    let nrows = m.rows;
    let triples = pivot_rows
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().map(move |(c, v)| (i, *c, v.clone())));
    let out = SparseMatrix::from_triples(field, nrows, m.cols, triples).expect("rref shape");
    (out, pivots)
}

/// Basis of the null space `{v : m v = 0}`, one vector per free column.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let field = m.field;
    let (r, pivots) = rref(m);
    let rows = r.row_vectors();
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    // for each free column f: v_f = e_f - sum_i R[i][f] e_{pivot_i}
    let mut free_entries: HashMap<usize, Vec<(usize, FieldScalar)>> = HashMap::new();
    for (i, &p) in pivots.iter().enumerate() {
        for (c, v) in rows[i].iter() {
            if *c != p {
                free_entries.entry(*c).or_default().push((p, -v));
            }
        }
    }
    (0..m.cols)
        .filter(|c| !is_pivot[*c])
        .map(|f| {
            let mut e = free_entries.remove(&f).unwrap_or_default();
            e.push((f, field.one()));
            SparseVec::from_pairs(e)
        })
        .collect()
}

/// Coset representatives of a complement of `span(sub)` inside `k^ambient_dim`,
/// together with the projection onto those representatives' coordinates.
pub fn quotient_basis(
    sub: &[SparseVec],
    ambient_dim: usize,
    field: Field,
) -> Result<(Vec<SparseVec>, SparseMatrix)> {
    let mut e = Echelon::new(field);
    for v in sub {
        if let Some(m) = v.max_index() {
            if m >= ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "vector index {m} outside ambient dimension {ambient_dim}"
                )));
            }
        }
        e.insert(v.clone());
    }
    let free: Vec<usize> = (0..ambient_dim).filter(|i| !e.has_pivot(*i)).collect();
    let pos: HashMap<usize, usize> = free.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let reps: Vec<SparseVec> = free.iter().map(|&i| SparseVec::unit(i, field)).collect();
    let cols = (0..ambient_dim)
        .map(|j| {
            let r = e.reduce_full(&SparseVec::unit(j, field));
            r.map_indices(|i| pos[&i])
        })
        .collect();
    Ok((reps, SparseMatrix::from_columns(field, free.len(), cols)))
}

/// Incrementally built echelon basis keyed by leading index. Rows may carry a
/// tag vector recording how they were formed from user-supplied generators.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    rows: HashMap<usize, (SparseVec, SparseVec)>,
}

impl Echelon {
    pub fn new(field: Field) -> Self {
        Echelon { field, rows: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn has_pivot(&self, i: usize) -> bool {
        self.rows.contains_key(&i)
    }

    /// Inserts `v`; returns true when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        self.insert_tagged(v, SparseVec::new())
    }

    pub fn insert_tagged(&mut self, v: SparseVec, tag: SparseVec) -> bool {
        let (r, t) = self.reduce_leading(v, tag);
        match r.leading() {
            None => false,
            Some((p, lead)) => {
                let inv = lead.inv();
                let p = *p;
                self.rows.insert(p, (r.scaled(&inv), t.scaled(&inv)));
                true
            }
        }
    }

    /// Reduces leading entries until the leading index is not a pivot.
    fn reduce_leading(&self, mut v: SparseVec, mut tag: SparseVec) -> (SparseVec, SparseVec) {
        while let Some((p, c)) = v.leading() {
            match self.rows.get(p) {
                Some((row, rt)) => {
                    let f = -c;
                    tag = tag.add_scaled(&f, rt);
                    v = v.add_scaled(&f, row);
                }
                None => break,
            }
        }
        (v, tag)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce_leading(v.clone(), SparseVec::new()).0.is_zero()
    }

    /// Eliminates every pivot index from `v`; the result is supported on
    /// non-pivot indices only.
    pub fn reduce_full(&self, v: &SparseVec) -> SparseVec {
        self.reduce_full_tagged(v).0
    }

    /// Like [`reduce_full`](Self::reduce_full), also returning the tag
    /// combination that was subtracted.
    pub fn reduce_full_tagged(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut v = v.clone();
        let mut tag = SparseVec::new();
        let mut k = 0;
        while k < v.nnz() {
            let (i, c) = v.entries()[k].clone();
            match self.rows.get(&i) {
                Some((row, rt)) => {
                    tag = tag.add_scaled(&c, rt);
                    v = v.add_scaled(&-c, row);
                    // the row's leading entry is i, so entries before k are untouched
                }
                None => k += 1,
            }
        }
        (v, tag)
    }

    pub fn field(&self) -> Field {
        self.field
    }
}
