//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use hochkit::{DGAlgebra, DGBimodule, Field, SparseMatrix};

/// A deterministic `n × n` matrix over `field` with about three nonzeros
/// per column, from a linear congruential sequence.
pub fn banded_matrix(field: Field, n: usize) -> SparseMatrix {
    let mut state: u64 = 0x9e37_79b9;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as i64
    };
    let triples = (0..n).flat_map(|j| {
        let offsets = [0, 1 + (next() as usize % 3), 4 + (next() as usize % 5)];
        let values: Vec<i64> = (0..3).map(|_| next() % 7 - 3).collect();
        offsets.into_iter().zip(values).map(move |(o, v)| ((j + o) % n, j, v))
    });
    let triples: Vec<_> = triples.filter(|t| t.2 != 0).map(|(r, c, v)| (r, c, field.from_i64(v))).collect();
    SparseMatrix::from_triples(field, n, n, triples).expect("indices in range")
}

/// An algebra with its regular bimodule.
pub fn regular(a: DGAlgebra) -> (Arc<DGAlgebra>, Arc<DGBimodule>) {
    let a = Arc::new(a);
    (a.clone(), Arc::new(DGBimodule::regular(a)))
}
