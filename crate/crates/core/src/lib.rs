//! Exact computational engine for differential graded algebras: Hochschild
//! (co)homology with cup product and Gerstenhaber bracket, two-sided bar and
//! cobar constructions, Koszul duals, inverse limits over coefficient towers,
//! and formal models of compact Lie groups and their classifying spaces.

pub mod bar;
pub mod cobar;
pub mod dg;
pub mod duality;
pub mod error;
pub mod graded;
pub mod hochschild;
pub mod io;
pub mod limit;
pub mod linalg;
pub mod models;
pub mod scalar;

pub use bar::{
    bar, bar_map, is_ground_module, koszul_dual, reduced_bar, unnormalized_bar, BarComplex, KoszulDual, Word,
    WordVec,
};
pub use cobar::{cobar, reduced_cobar, CobarComplex, DGComodule, Side};
pub use dg::{
    check_bimodule_map, conilpotency_degree, dualize_algebra, module_map, dualize_coalgebra, AlgebraMap, BasisElement, DGAlgebra,
    DGBimodule, DGCoalgebra, FlatBasis, ValidationReport, Violation,
};
pub use duality::{
    bar_cobar_unit, check_bar_cobar_duality, check_bar_cobar_duality_with, DualityReport, UnitReport, WitnessFault,
};
pub use error::{Error, Result};
pub use hochschild::{
    dualization_map, dualization_map_unguarded, hh_cohomology, hh_homology, hochschild_complex, DualizationMap,
    GradedRingPresentation, HochschildHomology, HochschildCochain, HochschildComplex, ProductConstant,
};
pub use graded::{CochainComplex, CohomologyDegree, GradedMap, GradedVectorSpace};
pub use io::{algebra_to_json, parse_algebra, parse_bimodule};
pub use limit::{hh_inverse_limit, hh_inverse_limit_with, DEFAULT_CONFIRMATIONS, CoefficientTower, LimitReport};
pub use linalg::{kernel_basis, quotient_basis, rref, Echelon, SparseMatrix, SparseVec};
pub use models::{
    truncation_tower, verify_koszul_duality, verify_koszul_duality_with, Discrepancy, GroupModel, Verdict, VerificationReport,
};
pub use scalar::{Field, FieldScalar};

/// Maps `f` over `items` on the rayon pool, preserving order.
pub(crate) fn parallel_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}
