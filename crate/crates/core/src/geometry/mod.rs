//! Admissible balls, coverings by maximal admissible balls, partitions of
//! unity subordinate to them, and one-dimensional Whitney decompositions.

mod ball;
mod covering;
mod partition;
mod whitney;

pub use ball::{is_admissible, maximal_admissible_ball, maximal_radius, support_bound, Ball};
pub use covering::{covering_1d, covering_nd, AdmissibleCovering, CoveringOptions};
pub use partition::{smoothstep, PartitionOfUnity, WeightProfile};
pub use whitney::{whitney_1d, Interval, WhitneyDecomposition};
