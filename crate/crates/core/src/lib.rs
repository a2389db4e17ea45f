//! Decomposition of multi-parameter persistence modules over F2.
//!
//! A module is given by a graded presentation matrix, either read directly or
//! built from a 1-critical simplicial filtration. The matrix is reduced by
//! grade-respecting row and column additions into a block diagonal form whose
//! blocks present the indecomposable summands.

pub mod cli;
pub mod diagonalize;
pub mod error;
pub mod f2;
pub mod filtration;
pub mod graded_matrix;
pub mod grades;
pub mod invariants;
pub mod oracle;
pub mod presentation;

pub use diagonalize::{
    basis_labels, block_reduce, lin, lin_inv, tot_diagonalize, BlockSet, DiagonalizeOptions,
    Diagonalization, IndexBlock, Op, OpCertificate, OpKind,
};
pub use error::{Error, Result};
pub use f2::{col_reduce, low, rank, BitVec, ColOpLog, ColReduction, F2Matrix};
pub use graded_matrix::{AdmissibleOps, GradedMatrix};
pub use grades::{strictly_distinct, topo_order, Grade, GradeOrderContext};
pub use filtration::{parse_filtration, Filtration, Simplex};
pub use presentation::{
    kernel_gens, minimize, parse_presentation, pres_2param, pres_dparam, pres_h0,
    rewrite_in_basis, write_presentation, CaseTag, KernelElement, KernelMode, Presentation,
};
pub use invariants::{
    betti01, betti_higher_2param, betti_table, dimension_function, persistent_betti, BettiTable,
    DimFunction, GradeBox,
};
pub use oracle::{block_partition, brute_force_finest, dim_oracle};
