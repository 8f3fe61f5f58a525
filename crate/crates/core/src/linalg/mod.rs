//! Exact sparse linear algebra over the rationals.
//!
//! Elimination first splits the input into blocks that share no coordinates
//! (tensor-power differentials decompose heavily this way), then reduces each
//! block independently and in parallel: densely when it has at most
//! [`DENSE_COLUMN_THRESHOLD`] coordinates, sparsely otherwise. Pivots are the
//! leading nonzero entries, so results never depend on thread scheduling.

mod echelon;
mod elimination;
mod matrix;
mod vector;

pub use echelon::{quotient_coordinates, Echelon, PivotSide, SubspaceBasis};
pub use elimination::{
    column_space, rank, rank_and_kernel, row_space, rref, solve, SolveOutcome, DENSE_COLUMN_THRESHOLD,
};
pub use matrix::SparseMatrix;
pub use vector::SparseVector;
