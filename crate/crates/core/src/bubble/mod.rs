//! Bubble powers and the reduction from bounded-pathwidth instances to
//! path instances over `A^k`.

mod bags;
mod decide;

pub use bags::{normalize_bags, BagTuple};
pub use decide::{
    decide_csp, lift_solution, pathwidth_to_path, width_bound, width_bounds, BubbleConfig,
    BubbleReduction, BubbleStructure, BubbleVerdict, WidthBounds,
};
