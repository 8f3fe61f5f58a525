//! Finite matrix structure: truncated shifts and block projections, signed
//! permutations, and splittings of multiplication.

mod permutation;
mod shift;
mod splitting;

pub use permutation::{involution_extension, sigma_conjugator, SignedPermutation};
pub use shift::{FrameConfig, ShiftFrame};
pub use splitting::{
    corner_splitting, corrupted_splitting, frame_corner_splitting, scalar_splitting, tensor_splitting,
    SplittingData, SplittingLaws,
};
