//! Monte-Carlo engines and tree machinery.
//!
//! Forward simulation grows the planar genealogy of a model (first daughter
//! leftmost), the contour codecs turn finite planar trees into labeled
//! excursions and back, and the extraction routines recover the associated
//! individual-based process and the spinal decomposition from a tree.

mod contour;
mod engine;
mod tree;

pub use contour::{
    contour_to_tree, tree_to_contour, ContourPath, ContourState, JumpEvent, JumpExcursion,
    JumpingContour, Label, LabeledKernel, DEFAULT_STEP_CAP,
};
pub use engine::{
    extract_individuals, simulate_bgw, simulate_cmj, spinal_decompose, BgwRun, CmjRun, Individual,
    SimConfig, Spine, Start,
};
pub use tree::{Node, NodeId, PlanarTree};
